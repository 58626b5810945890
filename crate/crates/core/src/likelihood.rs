//! Ordinal and exact-time log-likelihoods under the log-linear hazard
//! `λ(s, r) = exp(θᵀ u(s, r))`.
//!
//! Ordinal histories contribute one multinomial choice per event:
//! `ℓ_i = η(a_i) − log Σ_a exp η(a)`. Exact histories contribute the
//! competing-risks density of each waiting time, `ℓ_i = η(a_i) − Δt_i Λ_i`,
//! plus the censoring term `−(T − t_m) Λ_{m+1}` for the quiet period after
//! the last event.

use serde::{Deserialize, Serialize};

use crate::covariates::CovariateSet;
use crate::effects::{EffectSpecification, Model, SufficientState};
use crate::error::{RemError, Result};
use crate::history::{EventHistory, Support, Timing};

/// Log-hazards of every dyad in the support at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSnapshot {
    pub log_hazards: Vec<f64>,
    /// `log Λ`, computed with log-sum-exp.
    pub log_total: f64,
}

impl RateSnapshot {
    fn from_log_hazards(log_hazards: Vec<f64>) -> Self {
        let log_total = log_sum_exp(&log_hazards);
        RateSnapshot {
            log_hazards,
            log_total,
        }
    }

    /// Total hazard `Λ`.
    pub fn total(&self) -> f64 {
        self.log_total.exp()
    }

    pub fn hazard(&self, d: usize) -> f64 {
        self.log_hazards[d].exp()
    }

    /// `λ_d / Λ` for every dyad.
    pub fn probabilities(&self) -> Vec<f64> {
        self.log_hazards
            .iter()
            .map(|&eta| (eta - self.log_total).exp())
            .collect()
    }
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

pub(crate) fn check_theta(theta: &[f64], k: usize) -> Result<()> {
    if theta.len() != k {
        return Err(RemError::Parameter(format!(
            "expected {k} parameters, got {}",
            theta.len()
        )));
    }
    if let Some(i) = theta.iter().position(|v| !v.is_finite()) {
        return Err(RemError::Parameter(format!("parameter {} is not finite", i + 1)));
    }
    Ok(())
}

/// Log-hazards of all candidate dyads given the current state.
pub fn rate_snapshot(
    state: &SufficientState,
    spec: &EffectSpecification,
    cov: &CovariateSet,
    theta: &[f64],
) -> Result<RateSnapshot> {
    let model = Model::bind(spec, state.actors(), cov)?;
    model_snapshot(&model, state, theta)
}

pub(crate) fn model_snapshot(model: &Model, state: &SufficientState, theta: &[f64]) -> Result<RateSnapshot> {
    check_theta(theta, model.dim())?;
    let support = Support::new(state.actors());
    let mut u = vec![0.0; model.dim()];
    let etas = support
        .iter()
        .map(|(s, r)| {
            model.statistics(state, s, r, &mut u);
            dot(theta, &u)
        })
        .collect();
    Ok(RateSnapshot::from_log_hazards(etas))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodResult {
    pub mode: Timing,
    /// Total log-likelihood, including the censoring term in exact mode.
    pub loglik: f64,
    /// Per-event contributions `ℓ_i`.
    pub contributions: Vec<f64>,
    /// Deviance residuals `−2 ℓ_i`.
    pub residuals: Vec<f64>,
    /// Exact mode only: `−(T − t_m) Λ_{m+1}`.
    pub censoring: Option<f64>,
    pub gradient: Vec<f64>,
}

/// Statistics for every instant and dyad of one history, computed once so
/// that likelihood evaluations are a single dense sweep.
///
/// Fixed-effect indicators are not stored; they are re-derived from the dyad
/// index.
#[derive(Debug, Clone)]
pub struct Evaluator {
    model: Model,
    mode: Timing,
    support: Support,
    instants: usize,
    /// Parameter slots stored in `table`, in column order.
    dense: Vec<usize>,
    table: Vec<f64>,
    indicators: Vec<Vec<(usize, f64)>>,
    /// Realized dyad per event.
    realized: Vec<usize>,
    /// Waiting times (exact mode), including the censoring gap last.
    gaps: Vec<f64>,
}

impl Evaluator {
    pub fn new(h: &EventHistory, spec: &EffectSpecification, cov: &CovariateSet, mode: Timing) -> Result<Self> {
        let model = Model::bind(spec, h.actors(), cov)?;
        Self::from_model(h, model, mode)
    }

    pub fn from_model(h: &EventHistory, model: Model, mode: Timing) -> Result<Self> {
        let gaps = match mode {
            Timing::Ordinal => Vec::new(),
            Timing::Exact => {
                if h.timing() != Timing::Exact {
                    return Err(RemError::InvalidInput(
                        "exact-time likelihood needs an exact-time history".into(),
                    ));
                }
                let gaps = h.waiting_times().expect("exact history has a horizon");
                for (i, &g) in gaps[..gaps.len() - 1].iter().enumerate() {
                    if g <= 0.0 {
                        return Err(RemError::Simultaneity {
                            row: i + 1,
                            time: h.events()[i].time,
                        });
                    }
                }
                gaps
            }
        };
        let support = h.support();
        let n_dyads = support.len();
        let mask = model.indicator_slots();
        let dense: Vec<usize> = (0..model.dim()).filter(|&j| !mask[j]).collect();
        let instants = h.len() + usize::from(mode == Timing::Exact);

        let mut table = Vec::with_capacity(instants * n_dyads * dense.len());
        let mut state = SufficientState::new(h.actors());
        let mut u = vec![0.0; model.dim()];
        let mut realized = Vec::with_capacity(h.len());
        for i in 0..instants {
            if !dense.is_empty() {
                for (s, r) in support.iter() {
                    model.statistics(&state, s, r, &mut u);
                    table.extend(dense.iter().map(|&j| u[j]));
                }
            }
            if let Some(ev) = h.events().get(i) {
                if !support.contains(ev.sender, ev.receiver) {
                    return Err(RemError::Support {
                        index: i + 1,
                        sender: ev.sender + 1,
                        receiver: ev.receiver + 1,
                    });
                }
                realized.push(support.index(ev.sender, ev.receiver));
                state.update(ev);
            }
        }
        let mut scratch = Vec::new();
        let indicators = support
            .iter()
            .map(|(s, r)| {
                model.indicators(s, r, &mut scratch);
                scratch.clone()
            })
            .collect();
        Ok(Evaluator {
            model,
            mode,
            support,
            instants,
            dense,
            table,
            indicators,
            realized,
            gaps,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn mode(&self) -> Timing {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn events(&self) -> usize {
        self.realized.len()
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// Realized dyad index of event `i`.
    pub fn realized(&self, i: usize) -> usize {
        self.realized[i]
    }

    fn row(&self, instant: usize, d: usize) -> &[f64] {
        let w = self.dense.len();
        let start = (instant * self.support.len() + d) * w;
        &self.table[start..start + w]
    }

    /// Log-hazards of all dyads just before event `instant` (or, in exact
    /// mode, during the censored period when `instant == events()`).
    pub fn log_hazards(&self, instant: usize, theta: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let dense_theta: Vec<f64> = self.dense.iter().map(|&j| theta[j]).collect();
        for d in 0..self.support.len() {
            let mut eta = dot(&dense_theta, self.row(instant, d));
            for &(slot, v) in &self.indicators[d] {
                eta += theta[slot] * v;
            }
            out.push(eta);
        }
    }

    /// Full statistic vector of dyad `d` at `instant`.
    pub fn statistics(&self, instant: usize, d: usize) -> Vec<f64> {
        let mut u = vec![0.0; self.dim()];
        for (&j, &v) in self.dense.iter().zip(self.row(instant, d)) {
            u[j] = v;
        }
        for &(slot, v) in &self.indicators[d] {
            u[slot] += v;
        }
        u
    }

    fn accumulate(&self, instant: usize, d: usize, weight: f64, grad: &mut [f64]) {
        for (&j, &v) in self.dense.iter().zip(self.row(instant, d)) {
            grad[j] += weight * v;
        }
        for &(slot, v) in &self.indicators[d] {
            grad[slot] += weight * v;
        }
    }

    /// Log-likelihood, per-event contributions and (optionally) gradient.
    pub fn evaluate(&self, theta: &[f64], with_gradient: bool) -> Result<LikelihoodResult> {
        check_theta(theta, self.dim())?;
        let m = self.realized.len();
        let mut grad = vec![0.0; self.dim()];
        let mut contributions = Vec::with_capacity(m);
        let mut censoring = None;
        let mut etas = Vec::with_capacity(self.support.len());
        for i in 0..self.instants {
            self.log_hazards(i, theta, &mut etas);
            let max = etas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = etas.iter().map(|&e| (e - max).exp()).sum();
            let log_total = max + sum.ln();
            match self.mode {
                Timing::Ordinal => {
                    let d = self.realized[i];
                    contributions.push(etas[d] - log_total);
                    if with_gradient {
                        self.accumulate(i, d, 1.0, &mut grad);
                        for (dd, &e) in etas.iter().enumerate() {
                            self.accumulate(i, dd, -(e - log_total).exp(), &mut grad);
                        }
                    }
                }
                Timing::Exact => {
                    let gap = self.gaps[i];
                    // Δt Λ = exp(log Δt + log Λ); zero for a zero-length censoring gap.
                    let exposure = if gap > 0.0 { (gap.ln() + log_total).exp() } else { 0.0 };
                    if i < m {
                        let d = self.realized[i];
                        contributions.push(etas[d] - exposure);
                        if with_gradient {
                            self.accumulate(i, d, 1.0, &mut grad);
                        }
                    } else {
                        censoring = Some(-exposure);
                    }
                    if with_gradient && gap > 0.0 {
                        let scale = gap.ln() + max;
                        for (dd, &e) in etas.iter().enumerate() {
                            self.accumulate(i, dd, -(e - max + scale).exp(), &mut grad);
                        }
                    }
                }
            }
        }
        let loglik = contributions.iter().sum::<f64>() + censoring.unwrap_or(0.0);
        let residuals = contributions.iter().map(|l| -2.0 * l).collect();
        Ok(LikelihoodResult {
            mode: self.mode,
            loglik,
            contributions,
            residuals,
            censoring,
            gradient: if with_gradient { grad } else { Vec::new() },
        })
    }
}

/// Log-likelihood using only the order of events.
pub fn ordinal_loglik(
    h: &EventHistory,
    spec: &EffectSpecification,
    cov: &CovariateSet,
    theta: &[f64],
) -> Result<LikelihoodResult> {
    Evaluator::new(h, spec, cov, Timing::Ordinal)?.evaluate(theta, true)
}

/// Log-likelihood using exact waiting times and the terminal censoring gap.
pub fn temporal_loglik(
    h: &EventHistory,
    spec: &EffectSpecification,
    cov: &CovariateSet,
    theta: &[f64],
) -> Result<LikelihoodResult> {
    Evaluator::new(h, spec, cov, Timing::Exact)?.evaluate(theta, true)
}

pub fn loglik_gradient(
    h: &EventHistory,
    spec: &EffectSpecification,
    cov: &CovariateSet,
    theta: &[f64],
    mode: Timing,
) -> Result<Vec<f64>> {
    Ok(Evaluator::new(h, spec, cov, mode)?.evaluate(theta, true)?.gradient)
}
