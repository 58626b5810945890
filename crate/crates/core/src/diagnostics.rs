//! Model adequacy: deviance residuals, guessing equivalents, rank-based
//! classification accuracy and "surprising" events.

use serde::{Deserialize, Serialize};

use crate::covariates::CovariateSet;
use crate::effects::EffectSpecification;
use crate::error::{RemError, Result};
use crate::estimation::FitResult;
use crate::history::{EventHistory, Timing};
use crate::likelihood::Evaluator;

/// Per-event deviance residual of uniform guessing over `n (n − 1)` dyads.
pub fn null_residual(n: usize) -> f64 {
    2.0 * ((n * (n - 1)) as f64).ln()
}

/// Effective number of equally likely alternatives implied by residual `d`.
pub fn guessing_equivalent(d: f64) -> f64 {
    (d / 2.0).exp()
}

/// 1 / (m′ · exp(Σλ)): mean waiting time until one of `multiplicity`
/// equally hazardous events with summed log-multiplier `coef_sum` occurs.
pub fn scenario_waiting_time(coef_sum: f64, multiplicity: usize) -> f64 {
    1.0 / (multiplicity as f64 * coef_sum.exp())
}

/// Sample quantiles with linear interpolation between order statistics
/// (the default definition in most statistics packages).
pub fn quantiles(values: &[f64], probs: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    probs
        .iter()
        .map(|&p| {
            if sorted.is_empty() {
                return f64::NAN;
            }
            let h = (sorted.len() - 1) as f64 * p;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankMatch {
    pub ranks: Vec<usize>,
    /// (sender, receiver) predicted correctly.
    pub predicted_match: Vec<[bool; 2]>,
    pub exact_match: Vec<bool>,
}

/// Ranks and match flags for each event.
///
/// The rank orders dyads by descending hazard, ties broken by ascending dyad
/// index. The predicted sender is the actor with the largest total outgoing
/// hazard, the predicted receiver the one with the largest incoming hazard.
pub(crate) fn rank_and_match_eval(eval: &Evaluator, theta: &[f64]) -> RankMatch {
    let support = eval.support();
    let n = support.actors();
    let m = eval.events();
    let mut out = RankMatch {
        ranks: Vec::with_capacity(m),
        predicted_match: Vec::with_capacity(m),
        exact_match: Vec::with_capacity(m),
    };
    let mut etas = Vec::with_capacity(support.len());
    let mut out_rate = vec![0.0; n];
    let mut in_rate = vec![0.0; n];
    for i in 0..m {
        eval.log_hazards(i, theta, &mut etas);
        let real = eval.realized(i);
        let target = etas[real];
        let rank = 1 + etas
            .iter()
            .enumerate()
            .filter(|&(d, &e)| e > target || (e == target && d < real))
            .count();

        let max = etas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        out_rate.iter_mut().for_each(|v| *v = 0.0);
        in_rate.iter_mut().for_each(|v| *v = 0.0);
        for (d, &e) in etas.iter().enumerate() {
            let (s, r) = support.dyad(d);
            let w = (e - max).exp();
            out_rate[s] += w;
            in_rate[r] += w;
        }
        let (s, r) = support.dyad(real);
        out.ranks.push(rank);
        out.predicted_match
            .push([argmax(&out_rate) == s, argmax(&in_rate) == r]);
        out.exact_match.push(rank == 1);
    }
    out
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Recomputes ranks and match flags for a fitted model.
pub fn rank_and_match(
    h: &EventHistory,
    spec: &EffectSpecification,
    cov: &CovariateSet,
    fit: &FitResult,
) -> Result<RankMatch> {
    let eval = Evaluator::new(h, spec, cov, fit.mode)?;
    Ok(rank_and_match_eval(&eval, &fit.coefficients))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SurpriseRule {
    /// Residual above `threshold`; the null residual when `None`.
    Residual { threshold: Option<f64> },
    /// Rank above `ceil(quantile · n (n − 1))`.
    Rank { quantile: f64 },
}

/// Flags events judged surprising under `rule`.
pub fn surprise_flags(fit: &FitResult, rule: SurpriseRule) -> Result<Vec<bool>> {
    match rule {
        SurpriseRule::Residual { threshold } => {
            let cut = match threshold {
                Some(t) => t,
                None if fit.mode == Timing::Ordinal => null_residual(fit.actors),
                None => {
                    return Err(RemError::UnsupportedFeature(
                        "exact-time fits have no fixed null residual".into(),
                    ))
                }
            };
            Ok(fit.residuals.iter().map(|&d| d > cut).collect())
        }
        SurpriseRule::Rank { quantile } => {
            let cut = rank_cutoff(fit.actors, quantile);
            Ok(fit.observed_ranks.iter().map(|&r| r > cut).collect())
        }
    }
}

/// `ceil(q · n (n − 1))`.
pub fn rank_cutoff(n: usize, quantile: f64) -> usize {
    (quantile * (n * (n - 1)) as f64).ceil() as usize
}

/// Sub-history of the events flagged by `rule`.
pub fn surprise_events(h: &EventHistory, fit: &FitResult, rule: SurpriseRule) -> Result<EventHistory> {
    if h.len() != fit.events || h.digest() != fit.history_digest {
        return Err(RemError::Comparability("fit was made on a different history".into()));
    }
    Ok(h.subset(&surprise_flags(fit, rule)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurpriseSummary {
    pub below_null: f64,
    pub below_cutoff: f64,
    pub above_null: f64,
    pub at_null: f64,
}

pub const DEFAULT_RESIDUAL_CUTOFF: f64 = 3.0;

/// Fractions of residuals below the null residual, below 3, above the null
/// residual, and exactly at it.
pub fn surprise_fraction(fit: &FitResult) -> Result<SurpriseSummary> {
    if fit.mode != Timing::Ordinal {
        return Err(RemError::UnsupportedFeature(
            "exact-time fits have no fixed null residual".into(),
        ));
    }
    let null = null_residual(fit.actors);
    let m = fit.residuals.len();
    if m == 0 {
        return Err(RemError::InvalidInput("fit has no events".into()));
    }
    let count = |pred: &dyn Fn(f64) -> bool| fit.residuals.iter().filter(|&&d| pred(d)).count();
    let below = count(&|d| d < null);
    let above = count(&|d| d > null);
    let below_cut = count(&|d| d < DEFAULT_RESIDUAL_CUTOFF);
    let mf = m as f64;
    Ok(SurpriseSummary {
        below_null: below as f64 / mf,
        below_cutoff: below_cut as f64 / mf,
        above_null: above as f64 / mf,
        at_null: (m - below - above) as f64 / mf,
    })
}

/// Points of the empirical CDF of `rank / n(n−1)`: one per distinct value.
pub fn rank_ecdf(ranks: &[usize], n: usize) -> Vec<(f64, f64)> {
    let total = (n * (n - 1)) as f64;
    let mut sorted = ranks.to_vec();
    sorted.sort_unstable();
    let m = sorted.len() as f64;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, &r) in sorted.iter().enumerate() {
        let x = r as f64 / total;
        let y = (i + 1) as f64 / m;
        match points.last_mut() {
            Some(last) if last.0 == x => last.1 = y,
            _ => points.push((x, y)),
        }
    }
    points
}

/// Fraction of events whose `rank / n(n−1)` is at most `threshold`.
pub fn ecdf_at(ranks: &[usize], n: usize, threshold: f64) -> f64 {
    if ranks.is_empty() {
        return f64::NAN;
    }
    let total = (n * (n - 1)) as f64;
    ranks.iter().filter(|&&r| r as f64 / total <= threshold).count() as f64 / ranks.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Equal-width histogram with Sturges' bin count.
pub fn residual_histogram(residuals: &[f64]) -> Vec<HistogramBin> {
    if residuals.is_empty() {
        return Vec::new();
    }
    let lo = residuals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = ((residuals.len() as f64).log2().ceil() as usize + 1).max(1);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            lower: lo + b as f64 * width,
            upper: if b + 1 == bins { hi.max(lo + width) } else { lo + (b + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for &d in residuals {
        let b = (((d - lo) / width) as usize).min(bins - 1);
        out[b].count += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdequacyReport {
    pub mode: Timing,
    pub events: usize,
    pub residuals: Vec<f64>,
    /// Ordinal only.
    pub null_residual: Option<f64>,
    pub surprise: Option<SurpriseSummary>,
    /// Quantiles (0, .25, .5, .75, 1) of `exp(D_i / 2)`; ordinal only.
    pub guessing_equivalent_quantiles: Option<[f64; 5]>,
    pub observed_ranks: Vec<usize>,
    pub any_match: f64,
    pub all_match: f64,
    pub sender_match: f64,
    pub receiver_match: f64,
    pub exact_match: f64,
    /// ECDF of rank fraction at 0.05, 0.10 and 0.25.
    pub coverage_at: Vec<(f64, f64)>,
    pub rank_ecdf: Vec<(f64, f64)>,
}

pub fn adequacy_report(fit: &FitResult) -> AdequacyReport {
    let m = fit.events;
    let mean = |count: usize| if m == 0 { f64::NAN } else { count as f64 / m as f64 };
    let pm = &fit.predicted_match;
    let ordinal = fit.mode == Timing::Ordinal;
    let guess = ordinal.then(|| {
        let g: Vec<f64> = fit.residuals.iter().map(|&d| guessing_equivalent(d)).collect();
        let q = quantiles(&g, &[0.0, 0.25, 0.5, 0.75, 1.0]);
        [q[0], q[1], q[2], q[3], q[4]]
    });
    AdequacyReport {
        mode: fit.mode,
        events: m,
        residuals: fit.residuals.clone(),
        null_residual: ordinal.then(|| null_residual(fit.actors)),
        surprise: surprise_fraction(fit).ok(),
        guessing_equivalent_quantiles: guess,
        observed_ranks: fit.observed_ranks.clone(),
        any_match: mean(pm.iter().filter(|p| p[0] || p[1]).count()),
        all_match: mean(pm.iter().filter(|p| p[0] && p[1]).count()),
        sender_match: mean(pm.iter().filter(|p| p[0]).count()),
        receiver_match: mean(pm.iter().filter(|p| p[1]).count()),
        exact_match: mean(fit.exact_match.iter().filter(|&&b| b).count()),
        coverage_at: [0.05, 0.10, 0.25]
            .iter()
            .map(|&t| (t, ecdf_at(&fit.observed_ranks, fit.actors, t)))
            .collect(),
        rank_ecdf: rank_ecdf(&fit.observed_ranks, fit.actors),
    }
}
