//! Maximum-likelihood fitting and model comparison.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::covariates::CovariateSet;
use crate::diagnostics;
use crate::effects::EffectSpecification;
use crate::error::{RemError, Result};
use crate::history::{EventHistory, Timing};
use crate::likelihood::{check_theta, Evaluator};
use crate::optimize::{inf_norm, minimize, BfgsOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub mode: Timing,
    pub max_iter: usize,
    /// Convergence requires `max |∇ℓ(θ̂)| < tolerance`.
    pub tolerance: f64,
    /// Starting point; zeros when absent.
    pub initial: Option<Vec<f64>>,
    pub compute_hessian: bool,
}

impl FitOptions {
    pub fn new(mode: Timing) -> Self {
        FitOptions {
            mode,
            max_iter: 500,
            tolerance: 1e-6,
            initial: None,
            compute_hessian: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    #[serde(with = "crate::float_serde")]
    pub gradient_norm: f64,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationCriteria {
    #[serde(with = "crate::float_serde")]
    pub deviance: f64,
    #[serde(with = "crate::float_serde")]
    pub aic: f64,
    #[serde(with = "crate::float_serde")]
    pub aicc: f64,
    #[serde(with = "crate::float_serde")]
    pub bic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub mode: Timing,
    pub actors: usize,
    pub events: usize,
    pub effects: Vec<String>,
    pub parameter_names: Vec<String>,
    #[serde(with = "crate::float_serde::vec")]
    pub coefficients: Vec<f64>,
    #[serde(with = "crate::float_serde::vec")]
    pub standard_errors: Vec<f64>,
    #[serde(with = "crate::float_serde::vec")]
    pub z_values: Vec<f64>,
    #[serde(with = "crate::float_serde::vec")]
    pub p_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::float_serde::matrix")]
    pub hessian: Option<Vec<Vec<f64>>>,
    #[serde(with = "crate::float_serde")]
    pub loglik: f64,
    #[serde(with = "crate::float_serde")]
    pub null_deviance: f64,
    pub null_df: usize,
    #[serde(with = "crate::float_serde")]
    pub residual_deviance: f64,
    pub residual_df: i64,
    #[serde(with = "crate::float_serde")]
    pub chi_square: f64,
    pub chi_square_df: usize,
    #[serde(with = "crate::float_serde")]
    pub chi_square_p: f64,
    #[serde(with = "crate::float_serde")]
    pub aic: f64,
    #[serde(with = "crate::float_serde")]
    pub aicc: f64,
    #[serde(with = "crate::float_serde")]
    pub bic: f64,
    /// Deviance residuals `−2 ℓ_i`, one per event.
    #[serde(with = "crate::float_serde::vec")]
    pub residuals: Vec<f64>,
    /// Exact mode: censoring contribution to the log-likelihood.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::float_serde::option")]
    pub censoring: Option<f64>,
    /// Rank of each realized event among all candidates (1 = highest hazard).
    pub observed_ranks: Vec<usize>,
    /// Per event: (sender predicted, receiver predicted).
    pub predicted_match: Vec<[bool; 2]>,
    /// Per event: realized dyad is the single highest-hazard dyad.
    pub exact_match: Vec<bool>,
    #[serde(with = "crate::float_serde::vec")]
    pub gradient: Vec<f64>,
    pub convergence: ConvergenceReport,
    pub warnings: Vec<String>,
    pub history_digest: String,
}

/// AIC, small-sample corrected AIC and BIC from a maximised log-likelihood
/// with `k` parameters and `m` observations.
pub fn information_criteria(loglik: f64, k: usize, m: usize) -> (InformationCriteria, Option<String>) {
    let deviance = -2.0 * loglik;
    let kf = k as f64;
    let aic = deviance + 2.0 * kf;
    let (aicc, warning) = if m > k + 1 {
        (aic + 2.0 * kf * (kf + 1.0) / (m as f64 - kf - 1.0), None)
    } else {
        (
            f64::INFINITY,
            Some(format!("AICC undefined with {m} events and {k} parameters")),
        )
    };
    let bic = deviance + kf * (m as f64).ln();
    (
        InformationCriteria {
            deviance,
            aic,
            aicc,
            bic,
        },
        warning,
    )
}

/// Deviance of the homogeneous model: uniform choice in ordinal mode, a
/// single fitted pacing rate in exact mode.
pub fn null_deviance(mode: Timing, n: usize, m: usize, horizon: f64) -> f64 {
    let dyads = (n * (n - 1)) as f64;
    let mf = m as f64;
    match mode {
        Timing::Ordinal => 2.0 * mf * dyads.ln(),
        Timing::Exact if m == 0 => 0.0,
        Timing::Exact => -2.0 * (mf * (mf / (dyads * horizon)).ln() - mf),
    }
}

/// Standard errors, z-values and two-sided normal p-values from the
/// Hessian of the negative log-likelihood.
pub fn standard_errors(hessian: &[Vec<f64>], theta: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Option<String>) {
    let k = theta.len();
    let nan = || vec![f64::NAN; k];
    if hessian.len() != k || hessian.iter().any(|row| row.len() != k) {
        return (nan(), nan(), nan(), Some("Hessian has the wrong shape".into()));
    }
    if hessian.iter().flatten().any(|v| !v.is_finite()) {
        return (nan(), nan(), nan(), Some("Hessian has non-finite entries".into()));
    }
    let h = DMatrix::from_fn(k, k, |i, j| hessian[i][j]);
    let (inverse, warning) = match h.clone().cholesky() {
        Some(ch) => (Some(ch.inverse()), None),
        None => (
            h.try_inverse(),
            Some("Hessian is not positive definite; standard errors unreliable".to_string()),
        ),
    };
    let Some(inv) = inverse else {
        return (nan(), nan(), nan(), Some("Hessian is singular".into()));
    };
    let se: Vec<f64> = (0..k)
        .map(|i| {
            let v = inv[(i, i)];
            if v > 0.0 && v.is_finite() {
                v.sqrt()
            } else {
                f64::NAN
            }
        })
        .collect();
    let z: Vec<f64> = theta.iter().zip(&se).map(|(t, s)| t / s).collect();
    let p = z.iter().map(|z| erfc(z.abs() / std::f64::consts::SQRT_2)).collect();
    let warning = warning.or_else(|| {
        se.iter()
            .any(|s| s.is_nan())
            .then(|| "some standard errors are undefined".to_string())
    });
    (se, z, p, warning)
}

/// Hessian of `−ℓ` by central differences of the analytic gradient.
pub fn numerical_hessian(eval: &Evaluator, theta: &[f64]) -> Result<Vec<Vec<f64>>> {
    let k = theta.len();
    let mut cols = Vec::with_capacity(k);
    for j in 0..k {
        let h = 1e-4 * theta[j].abs().max(1.0);
        let mut plus = theta.to_vec();
        let mut minus = theta.to_vec();
        plus[j] += h;
        minus[j] -= h;
        let gp = eval.evaluate(&plus, true)?.gradient;
        let gm = eval.evaluate(&minus, true)?.gradient;
        cols.push(
            gp.iter()
                .zip(&gm)
                .map(|(a, b)| -(a - b) / (2.0 * h))
                .collect::<Vec<f64>>(),
        );
    }
    Ok((0..k)
        .map(|i| (0..k).map(|j| 0.5 * (cols[j][i] + cols[i][j])).collect())
        .collect())
}

/// Builds the full result for parameters `theta` without optimising.
pub fn evaluate_fit(
    h: &EventHistory,
    spec: &EffectSpecification,
    cov: &CovariateSet,
    theta: &[f64],
    mode: Timing,
    compute_hessian: bool,
) -> Result<FitResult> {
    let eval = Evaluator::new(h, spec, cov, mode)?;
    check_theta(theta, eval.dim())?;
    let report = ConvergenceReport {
        converged: true,
        iterations: 0,
        evaluations: 0,
        gradient_norm: f64::NAN,
        message: "evaluated at supplied parameters".into(),
    };
    assemble(h, spec, &eval, theta.to_vec(), report, compute_hessian)
}

fn assemble(
    h: &EventHistory,
    spec: &EffectSpecification,
    eval: &Evaluator,
    theta: Vec<f64>,
    mut report: ConvergenceReport,
    compute_hessian: bool,
) -> Result<FitResult> {
    let mode = eval.mode();
    let lik = eval.evaluate(&theta, true)?;
    report.gradient_norm = inf_norm(&lik.gradient);
    let k = theta.len();
    let m = h.len();
    let mut warnings = Vec::new();

    let (hessian, (se, z, p)) = if compute_hessian && k > 0 {
        let hess = numerical_hessian(eval, &theta)?;
        let (se, z, p, warn) = standard_errors(&hess, &theta);
        warnings.extend(warn);
        (Some(hess), (se, z, p))
    } else {
        (None, (vec![f64::NAN; k], vec![f64::NAN; k], vec![f64::NAN; k]))
    };

    let (ic, warn) = information_criteria(lik.loglik, k, m);
    warnings.extend(warn);
    let null_dev = null_deviance(mode, h.actors(), m, h.horizon().unwrap_or(0.0));
    // An exact-time null model carries one pacing parameter.
    let null_k = usize::from(mode == Timing::Exact);
    let chi_df = k.saturating_sub(null_k);
    let chi = null_dev - ic.deviance;
    let chi_p = if chi_df == 0 {
        1.0
    } else if chi <= 0.0 {
        1.0
    } else {
        ChiSquared::new(chi_df as f64).map(|d| d.sf(chi)).unwrap_or(f64::NAN)
    };

    let ranks = diagnostics::rank_and_match_eval(eval, &theta);

    Ok(FitResult {
        mode,
        actors: h.actors(),
        events: m,
        effects: spec.names(),
        parameter_names: eval.model().parameter_names().to_vec(),
        coefficients: theta,
        standard_errors: se,
        z_values: z,
        p_values: p,
        hessian,
        loglik: lik.loglik,
        null_deviance: null_dev,
        null_df: m,
        residual_deviance: ic.deviance,
        residual_df: m as i64 - chi_df as i64,
        chi_square: chi,
        chi_square_df: chi_df,
        chi_square_p: chi_p,
        aic: ic.aic,
        aicc: ic.aicc,
        bic: ic.bic,
        residuals: lik.residuals,
        censoring: lik.censoring,
        observed_ranks: ranks.ranks,
        predicted_match: ranks.predicted_match,
        exact_match: ranks.exact_match,
        gradient: lik.gradient,
        convergence: report,
        warnings,
        history_digest: h.digest(),
    })
}

/// Maximum-likelihood fit by BFGS from `opts.initial` (default zeros).
///
/// Non-convergence returns [`RemError::NotConverged`] carrying the full
/// result at the best iterate.
pub fn fit(h: &EventHistory, spec: &EffectSpecification, cov: &CovariateSet, opts: &FitOptions) -> Result<FitResult> {
    if !(opts.tolerance > 0.0) {
        return Err(RemError::InvalidInput("tolerance must be positive".into()));
    }
    let eval = Evaluator::new(h, spec, cov, opts.mode)?;
    let k = eval.dim();
    if k == 0 {
        return Err(RemError::InvalidInput("model has no parameters".into()));
    }
    let x0 = opts.initial.clone().unwrap_or_else(|| vec![0.0; k]);
    check_theta(&x0, k)?;

    let outcome = minimize(
        &x0,
        |theta| match eval.evaluate(theta, true) {
            Ok(res) => (-res.loglik, res.gradient.iter().map(|g| -g).collect()),
            Err(_) => (f64::INFINITY, vec![0.0; k]),
        },
        BfgsOptions {
            max_iter: opts.max_iter,
            gtol: opts.tolerance,
        },
    );
    let report = ConvergenceReport {
        converged: outcome.converged,
        iterations: outcome.iterations,
        evaluations: outcome.evaluations,
        gradient_norm: inf_norm(&outcome.grad),
        message: outcome.message,
    };
    let result = assemble(h, spec, &eval, outcome.x, report, opts.compute_hessian)?;
    if result.convergence.converged {
        Ok(result)
    } else {
        Err(RemError::NotConverged(Box::new(result)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preference {
    First,
    Second,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// `BIC_first − BIC_second`.
    pub bic_difference: f64,
    pub preferred: Preference,
}

/// BIC comparison of two fits on the same history (lower is better).
pub fn compare(a: &FitResult, b: &FitResult) -> Result<Comparison> {
    if a.history_digest != b.history_digest {
        return Err(RemError::Comparability("fits were made on different histories".into()));
    }
    if a.mode != b.mode {
        return Err(RemError::Comparability(format!(
            "likelihood modes differ ({} vs {})",
            a.mode, b.mode
        )));
    }
    let diff = a.bic - b.bic;
    let preferred = if diff < 0.0 {
        Preference::First
    } else if diff > 0.0 {
        Preference::Second
    } else {
        Preference::Tie
    };
    Ok(Comparison {
        bic_difference: diff,
        preferred,
    })
}
