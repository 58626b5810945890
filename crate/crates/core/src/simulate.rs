//! Forward simulation of event histories by competing-risks sampling: the
//! waiting time is drawn from `Exp(Λ)`, then the dyad with probability
//! `λ_d / Λ`.
//!
//! The random stream is ChaCha20 seeded from a `u64`, so a seed reproduces
//! the same history on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::covariates::CovariateSet;
use crate::effects::{EffectSpecification, Model, SufficientState};
use crate::error::{RemError, Result};
use crate::history::{Event, EventHistory, Support, Timing};
use crate::likelihood::{check_theta, model_snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Stop after this many events; the horizon is the last event time.
    Events(usize),
    /// Stop at this time.
    Horizon(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub theta: Vec<f64>,
    pub spec: EffectSpecification,
    pub covariates: CovariateSet,
    pub stop: StopRule,
    pub seed: u64,
}

pub type SimRng = ChaCha20Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// One draw of `(sender, receiver)` and the waiting time until it occurs.
pub fn draw_next_event<R: Rng + ?Sized>(
    state: &SufficientState,
    spec: &EffectSpecification,
    cov: &CovariateSet,
    theta: &[f64],
    rng: &mut R,
) -> Result<((usize, usize), f64)> {
    let model = Model::bind(spec, state.actors(), cov)?;
    draw_with_model(&model, state, theta, rng)
}

fn draw_with_model<R: Rng + ?Sized>(
    model: &Model,
    state: &SufficientState,
    theta: &[f64],
    rng: &mut R,
) -> Result<((usize, usize), f64)> {
    let snap = model_snapshot(model, state, theta)?;
    let total = snap.total();
    if !total.is_finite() || total <= 0.0 {
        return Err(RemError::NumericalRange(format!(
            "total hazard {total:e} after {} events",
            state.event_count()
        )));
    }
    let e: f64 = rng.sample(Exp1);
    let wait = e / total;

    let support = Support::new(state.actors());
    let max = snap.log_hazards.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = snap.log_hazards.iter().map(|&x| (x - max).exp()).collect();
    let sum: f64 = weights.iter().sum();
    let mut target = rng.random::<f64>() * sum;
    let mut pick = weights.len() - 1;
    for (d, &w) in weights.iter().enumerate() {
        if target < w {
            pick = d;
            break;
        }
        target -= w;
    }
    Ok((support.dyad(pick), wait))
}

/// Simulates an exact-time history.
pub fn simulate_history(cfg: &SimulationConfig) -> Result<EventHistory> {
    let model = Model::bind(&cfg.spec, cfg.n, &cfg.covariates)?;
    check_theta(&cfg.theta, model.dim())?;
    match cfg.stop {
        StopRule::Horizon(t) if !(t.is_finite() && t >= 0.0) => {
            return Err(RemError::InvalidInput(format!("horizon {t} must be finite and nonnegative")))
        }
        _ => {}
    }
    let mut rng = seeded_rng(cfg.seed);
    let mut state = SufficientState::new(cfg.n);
    let mut events = Vec::new();
    let mut now = 0.0;
    loop {
        if let StopRule::Events(m) = cfg.stop {
            if events.len() >= m {
                break;
            }
        }
        let ((s, r), wait) = draw_with_model(&model, &state, &cfg.theta, &mut rng)?;
        let next = now + wait;
        if let StopRule::Horizon(t) = cfg.stop {
            if next > t {
                break;
            }
        }
        if next <= now {
            return Err(RemError::NumericalRange(format!(
                "waiting time {wait:e} vanishes at time {now}"
            )));
        }
        now = next;
        let ev = Event::new(now, s, r);
        state.update(&ev);
        events.push(ev);
    }
    let horizon = match cfg.stop {
        StopRule::Events(_) => now,
        StopRule::Horizon(t) => t,
    };
    EventHistory::new(cfg.n, Timing::Exact, events, Some(horizon))
}
