//! Python bindings: `import rem`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rem_core::diagnostics::{self, SurpriseRule};
use rem_core::estimation::Preference;
use rem_core::io::{edgelist_rows_from_csv, read_edgelist, write_edgelist};
use rem_core::summary::format_summary;
use rem_core::{
    aggregate_sociomatrix, parse_edgelist, simulate_history, validate_covariates, Covariate, CovariateSet,
    EffectKind, EffectSpecification, Evaluator, FitOptions, SimulationConfig, StopRule, Timing,
};

create_exception!(rem, RemError, PyException);
create_exception!(rem, NotConvergedError, RemError);

fn err(e: rem_core::RemError) -> PyErr {
    match e {
        rem_core::RemError::NotConverged(_) => NotConvergedError::new_err(e.to_string()),
        other => RemError::new_err(other.to_string()),
    }
}

fn timing(raw: &str) -> PyResult<Timing> {
    raw.parse::<Timing>().map_err(err)
}

fn spec(effects: Vec<String>, n: usize, group_actor: Option<usize>) -> PyResult<EffectSpecification> {
    let mut s = EffectSpecification::parse(&effects).map_err(err)?;
    if let Some(g) = group_actor {
        if g == 0 || g > n {
            return Err(PyValueError::new_err(format!("group_actor {g} outside 1..={n}")));
        }
        s = s.with_group_actor(g - 1);
    }
    Ok(s)
}

/// Covariates from a dict of nested lists (or arrays). Actor covariates are
/// `n × p` or a flat length-`n` column; covariates used by `CovEvent` are
/// `p × n × n` or a single `n × n` slice.
fn covariates(spec: &EffectSpecification, raw: Option<&Bound<'_, PyDict>>) -> PyResult<CovariateSet> {
    let mut set = CovariateSet::new();
    let Some(raw) = raw else { return Ok(set) };
    for (k, v) in raw.iter() {
        let name: String = k.extract()?;
        let dyadic = spec
            .entries
            .iter()
            .any(|e| e.kind == EffectKind::CovEvent && e.binding_name() == name);
        let cov = if dyadic {
            match v.extract::<Vec<Vec<Vec<f64>>>>() {
                Ok(slices) => Covariate::dyad(slices),
                Err(_) => Covariate::dyad(vec![v.extract::<Vec<Vec<f64>>>()?]),
            }
        } else {
            match v.extract::<Vec<Vec<f64>>>() {
                Ok(rows) => Covariate::actor(rows),
                Err(_) => Covariate::actor_column(&v.extract::<Vec<f64>>()?),
            }
        };
        set.insert(name, cov);
    }
    Ok(set)
}

/// A validated, time-ordered event history. Actor ids are 1-based on the
/// Python side.
#[pyclass(name = "EventHistory", module = "rem", frozen)]
struct PyEventHistory {
    inner: rem_core::EventHistory,
}

#[pymethods]
impl PyEventHistory {
    /// Rows of `(t, s, r)`; exact histories end with `(T, None, None)`.
    #[new]
    #[pyo3(signature = (rows, n, timing = "ordinal"))]
    fn new(rows: Vec<(Option<f64>, Option<f64>, Option<f64>)>, n: usize, timing: &str) -> PyResult<Self> {
        let rows: Vec<[Option<f64>; 3]> = rows.into_iter().map(|(t, s, r)| [t, s, r]).collect();
        let inner = parse_edgelist(&rows, n, self::timing(timing)?).map_err(err)?;
        Ok(PyEventHistory { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, n, timing = "ordinal"))]
    fn read(path: std::path::PathBuf, n: usize, timing: &str) -> PyResult<Self> {
        let inner = read_edgelist(&path, n, self::timing(timing)?).map_err(err)?;
        Ok(PyEventHistory { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, n, timing = "ordinal"))]
    fn from_csv(text: &str, n: usize, timing: &str) -> PyResult<Self> {
        let rows = edgelist_rows_from_csv(text.as_bytes()).map_err(err)?;
        let inner = parse_edgelist(&rows, n, self::timing(timing)?).map_err(err)?;
        Ok(PyEventHistory { inner })
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        write_edgelist(&self.inner, &mut buf).map_err(err)?;
        Ok(String::from_utf8(buf).expect("edgelist CSV is ASCII"))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.actors()
    }

    #[getter]
    fn timing(&self) -> String {
        self.inner.timing().to_string()
    }

    #[getter]
    fn horizon(&self) -> Option<f64> {
        self.inner.horizon()
    }

    /// `(t, sender, receiver)` with 1-based ids.
    fn events(&self) -> Vec<(f64, usize, usize)> {
        self.inner.events().iter().map(|e| (e.time, e.sender + 1, e.receiver + 1)).collect()
    }

    fn sociomatrix(&self) -> Vec<Vec<u64>> {
        aggregate_sociomatrix(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("EventHistory(n={}, events={}, timing={})", self.inner.actors(), self.inner.len(), self.inner.timing())
    }
}

#[pyclass(name = "FitResult", module = "rem", frozen)]
struct PyFitResult {
    inner: rem_core::FitResult,
}

#[pymethods]
impl PyFitResult {
    #[getter]
    fn parameter_names(&self) -> Vec<String> {
        self.inner.parameter_names.clone()
    }

    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.inner.coefficients.clone()
    }

    #[getter]
    fn standard_errors(&self) -> Vec<f64> {
        self.inner.standard_errors.clone()
    }

    #[getter]
    fn z_values(&self) -> Vec<f64> {
        self.inner.z_values.clone()
    }

    #[getter]
    fn p_values(&self) -> Vec<f64> {
        self.inner.p_values.clone()
    }

    #[getter]
    fn loglik(&self) -> f64 {
        self.inner.loglik
    }

    #[getter]
    fn null_deviance(&self) -> f64 {
        self.inner.null_deviance
    }

    #[getter]
    fn residual_deviance(&self) -> f64 {
        self.inner.residual_deviance
    }

    #[getter]
    fn aic(&self) -> f64 {
        self.inner.aic
    }

    #[getter]
    fn aicc(&self) -> f64 {
        self.inner.aicc
    }

    #[getter]
    fn bic(&self) -> f64 {
        self.inner.bic
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.convergence.converged
    }

    #[getter]
    fn residuals(&self) -> Vec<f64> {
        self.inner.residuals.clone()
    }

    #[getter]
    fn observed_ranks(&self) -> Vec<usize> {
        self.inner.observed_ranks.clone()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    fn summary(&self) -> String {
        format_summary(&self.inner)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyFitResult { inner })
    }

    /// Match rates, surprise fractions and rank coverage as a dict.
    fn adequacy<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = diagnostics::adequacy_report(&self.inner);
        let d = PyDict::new(py);
        d.set_item("any_match", r.any_match)?;
        d.set_item("all_match", r.all_match)?;
        d.set_item("sender_match", r.sender_match)?;
        d.set_item("receiver_match", r.receiver_match)?;
        d.set_item("exact_match", r.exact_match)?;
        d.set_item("null_residual", r.null_residual)?;
        d.set_item("guessing_equivalent_quantiles", r.guessing_equivalent_quantiles.map(|q| q.to_vec()))?;
        if let Some(s) = r.surprise {
            d.set_item("below_null", s.below_null)?;
            d.set_item("below_cutoff", s.below_cutoff)?;
            d.set_item("above_null", s.above_null)?;
            d.set_item("at_null", s.at_null)?;
        }
        d.set_item("coverage_at", r.coverage_at)?;
        d.set_item("rank_ecdf", r.rank_ecdf)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "FitResult({}, deviance={:.3}, bic={:.3}, converged={})",
            self.inner.parameter_names.join(", "),
            self.inner.residual_deviance,
            self.inner.bic,
            self.inner.convergence.converged
        )
    }
}

/// Maximum-likelihood fit; the likelihood follows the history's timing.
#[pyfunction]
#[pyo3(signature = (history, effects, covariates = None, max_iter = 500, tol = 1e-6, group_actor = None))]
fn fit(
    history: &PyEventHistory,
    effects: Vec<String>,
    covariates: Option<&Bound<'_, PyDict>>,
    max_iter: usize,
    tol: f64,
    group_actor: Option<usize>,
) -> PyResult<PyFitResult> {
    let h = &history.inner;
    let s = spec(effects, h.actors(), group_actor)?;
    let cov = validate_covariates(self::covariates(&s, covariates)?, h).map_err(err)?;
    let mut opts = FitOptions::new(h.timing());
    opts.max_iter = max_iter;
    opts.tolerance = tol;
    let inner = rem_core::fit(h, &s, &cov, &opts).map_err(err)?;
    Ok(PyFitResult { inner })
}

/// Log-likelihood at `theta`.
#[pyfunction]
#[pyo3(signature = (history, effects, theta, covariates = None, group_actor = None))]
fn loglik(
    history: &PyEventHistory,
    effects: Vec<String>,
    theta: Vec<f64>,
    covariates: Option<&Bound<'_, PyDict>>,
    group_actor: Option<usize>,
) -> PyResult<f64> {
    let h = &history.inner;
    let s = spec(effects, h.actors(), group_actor)?;
    let cov = validate_covariates(self::covariates(&s, covariates)?, h).map_err(err)?;
    let eval = Evaluator::new(h, &s, &cov, h.timing()).map_err(err)?;
    Ok(eval.evaluate(&theta, false).map_err(err)?.loglik)
}

/// Exact-time simulation stopped after `events` events or at `horizon`.
#[pyfunction]
#[pyo3(signature = (n, effects, theta, covariates = None, events = None, horizon = None, seed = 0, group_actor = None))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    n: usize,
    effects: Vec<String>,
    theta: Vec<f64>,
    covariates: Option<&Bound<'_, PyDict>>,
    events: Option<usize>,
    horizon: Option<f64>,
    seed: u64,
    group_actor: Option<usize>,
) -> PyResult<PyEventHistory> {
    let stop = match (events, horizon) {
        (Some(m), None) => StopRule::Events(m),
        (None, Some(t)) => StopRule::Horizon(t),
        _ => return Err(PyValueError::new_err("give exactly one of events or horizon")),
    };
    let s = spec(effects, n, group_actor)?;
    let cfg = SimulationConfig {
        n,
        theta,
        covariates: self::covariates(&s, covariates)?,
        spec: s,
        stop,
        seed,
    };
    let inner = simulate_history(&cfg).map_err(err)?;
    Ok(PyEventHistory { inner })
}

/// `(BIC_a − BIC_b, "first" | "second" | "tie")`.
#[pyfunction]
fn compare(a: &PyFitResult, b: &PyFitResult) -> PyResult<(f64, &'static str)> {
    let c = rem_core::compare(&a.inner, &b.inner).map_err(err)?;
    let which = match c.preferred {
        Preference::First => "first",
        Preference::Second => "second",
        Preference::Tie => "tie",
    };
    Ok((c.bic_difference, which))
}

/// Events flagged as surprising: by rank quantile when given, else by
/// deviance residual (default threshold: the null residual).
#[pyfunction]
#[pyo3(signature = (history, fit, rank_quantile = None, residual_threshold = None))]
fn surprise_events(
    history: &PyEventHistory,
    fit: &PyFitResult,
    rank_quantile: Option<f64>,
    residual_threshold: Option<f64>,
) -> PyResult<PyEventHistory> {
    let rule = match rank_quantile {
        Some(q) => SurpriseRule::Rank { quantile: q },
        None => SurpriseRule::Residual {
            threshold: residual_threshold,
        },
    };
    let inner = diagnostics::surprise_events(&history.inner, &fit.inner, rule).map_err(err)?;
    Ok(PyEventHistory { inner })
}

#[pyfunction]
fn null_residual(n: usize) -> f64 {
    diagnostics::null_residual(n)
}

#[pyfunction]
fn guessing_equivalent(d: f64) -> f64 {
    diagnostics::guessing_equivalent(d)
}

#[pymodule]
fn rem(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEventHistory>()?;
    m.add_class::<PyFitResult>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(loglik, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(surprise_events, m)?)?;
    m.add_function(wrap_pyfunction!(null_residual, m)?)?;
    m.add_function(wrap_pyfunction!(guessing_equivalent, m)?)?;
    m.add("RemError", m.py().get_type::<RemError>())?;
    m.add("NotConvergedError", m.py().get_type::<NotConvergedError>())?;
    Ok(())
}
