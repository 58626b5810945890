//! Named actor and dyad covariates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{RemError, Result};
use crate::history::EventHistory;

/// One named covariate array. Layouts follow the edgelist conventions:
/// actors are indexed in id order, columns index covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Covariate {
    /// `n × p`, one row per actor.
    Actor { values: Vec<Vec<f64>> },
    /// `p × n × n`, one sender-by-receiver slice per covariate.
    Dyad { values: Vec<Vec<Vec<f64>>> },
    /// `m × p × n`; accepted and shape-checked only.
    ActorTimeVarying { values: Vec<Vec<Vec<f64>>> },
    /// `m × p × n × n`; accepted and shape-checked only.
    DyadTimeVarying { values: Vec<Vec<Vec<Vec<f64>>>> },
}

impl Covariate {
    pub fn actor(values: Vec<Vec<f64>>) -> Self {
        Covariate::Actor { values }
    }

    pub fn dyad(values: Vec<Vec<Vec<f64>>>) -> Self {
        Covariate::Dyad { values }
    }

    /// Single-column actor covariate.
    pub fn actor_column(column: &[f64]) -> Self {
        Covariate::Actor {
            values: column.iter().map(|&v| vec![v]).collect(),
        }
    }

    /// Number of covariate columns `p`.
    pub fn columns(&self) -> usize {
        match self {
            Covariate::Actor { values } => values.first().map_or(0, Vec::len),
            Covariate::Dyad { values } => values.len(),
            Covariate::ActorTimeVarying { values } => values.first().map_or(0, Vec::len),
            Covariate::DyadTimeVarying { values } => values.first().map_or(0, Vec::len),
        }
    }

    pub fn is_time_varying(&self) -> bool {
        matches!(
            self,
            Covariate::ActorTimeVarying { .. } | Covariate::DyadTimeVarying { .. }
        )
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Covariate::Actor { .. } => "actor",
            Covariate::Dyad { .. } => "dyad",
            Covariate::ActorTimeVarying { .. } => "time-varying actor",
            Covariate::DyadTimeVarying { .. } => "time-varying dyad",
        }
    }

    fn check(&self, name: &str, n: usize, m: usize) -> Result<()> {
        let shape_err = |expected: String, found: String| RemError::Shape {
            entry: name.to_string(),
            expected,
            found,
        };
        let finite_err = || RemError::Shape {
            entry: name.to_string(),
            expected: "finite entries".into(),
            found: "NaN or infinite value".into(),
        };
        let check_matrix = |rows: &[Vec<f64>], r: usize, c: Option<usize>, what: &str| -> Result<usize> {
            if rows.len() != r {
                return Err(shape_err(format!("{r} {what} rows"), format!("{} rows", rows.len())));
            }
            let width = c.unwrap_or_else(|| rows.first().map_or(0, Vec::len));
            for (i, row) in rows.iter().enumerate() {
                if row.len() != width {
                    return Err(shape_err(
                        format!("{width} columns in every row"),
                        format!("{} columns in row {}", row.len(), i + 1),
                    ));
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(finite_err());
                }
            }
            Ok(width)
        };
        match self {
            Covariate::Actor { values } => {
                let p = check_matrix(values, n, None, "actor")?;
                if p == 0 {
                    return Err(shape_err("at least one column".into(), "none".into()));
                }
            }
            Covariate::Dyad { values } => {
                if values.is_empty() {
                    return Err(shape_err("at least one slice".into(), "none".into()));
                }
                for slice in values {
                    check_matrix(slice, n, Some(n), "sender")?;
                }
            }
            Covariate::ActorTimeVarying { values } => {
                if values.len() != m {
                    return Err(shape_err(format!("{m} time slices"), format!("{}", values.len())));
                }
                let p = values.first().map_or(0, Vec::len);
                for slice in values {
                    if slice.len() != p {
                        return Err(shape_err(format!("{p} covariates per slice"), format!("{}", slice.len())));
                    }
                    for col in slice {
                        if col.len() != n {
                            return Err(shape_err(format!("{n} actors"), format!("{}", col.len())));
                        }
                        if col.iter().any(|v| !v.is_finite()) {
                            return Err(finite_err());
                        }
                    }
                }
            }
            Covariate::DyadTimeVarying { values } => {
                if values.len() != m {
                    return Err(shape_err(format!("{m} time slices"), format!("{}", values.len())));
                }
                let p = values.first().map_or(0, Vec::len);
                for slice in values {
                    if slice.len() != p {
                        return Err(shape_err(format!("{p} covariates per slice"), format!("{}", slice.len())));
                    }
                    for mat in slice {
                        check_matrix(mat, n, Some(n), "sender")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Covariates bound by name, e.g. `CovInt` for the `CovInt` effect.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CovariateSet {
    entries: BTreeMap<String, Covariate>,
}

impl CovariateSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, cov: Covariate) -> Self {
        self.insert(name, cov);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, cov: Covariate) {
        self.entries.insert(name.into(), cov);
    }

    pub fn get(&self, name: &str) -> Option<&Covariate> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Checks every entry against the history's actor and event counts.
pub fn validate_covariates(c: CovariateSet, h: &EventHistory) -> Result<CovariateSet> {
    for (name, cov) in &c.entries {
        cov.check(name, h.actors(), h.len())?;
    }
    Ok(c)
}
