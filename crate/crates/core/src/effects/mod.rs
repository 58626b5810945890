//! The effect catalog and the statistic vector `u(s, r, X, A_t)`.
//!
//! An [`EffectSpecification`] names effects exactly as they appear in the
//! catalog (`NIDSnd`, `CovInt`, `PSAB-BA`, ...). Binding it against an actor
//! count and a [`CovariateSet`] yields a [`Model`], which knows the parameter
//! layout and evaluates statistics for candidate dyads from a
//! [`SufficientState`].
//!
//! Normalisation conventions:
//! * degree effects divide by the number of past events `m_t` (total degree
//!   by `2 m_t`), with `0/0 = 0`;
//! * recency effects are `1/k` for the partner's rank `k` among distinct
//!   past partners, `0` if never seen;
//! * triadic effects count partners through binary past-edge existence.

mod pshift;
mod state;

use serde::{Deserialize, Serialize};

pub use pshift::{classify_pshift, PShiftLabel};
pub use state::SufficientState;

use crate::covariates::{Covariate, CovariateSet};
use crate::error::{RemError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EffectKind {
    NIDSnd,
    NIDRec,
    NODSnd,
    NODRec,
    NTDegSnd,
    NTDegRec,
    FrPSndSnd,
    FrRecSnd,
    RRecSnd,
    RSndSnd,
    CovSnd,
    CovRec,
    CovInt,
    CovEvent,
    OTPSnd,
    ITPSnd,
    OSPSnd,
    ISPSnd,
    FESnd,
    FERec,
    FEInt,
    PShift(PShiftLabel),
}

impl EffectKind {
    /// Every effect in the catalog.
    pub fn catalog() -> Vec<EffectKind> {
        use EffectKind::*;
        let mut all = vec![
            NIDSnd, NIDRec, NODSnd, NODRec, NTDegSnd, NTDegRec, FrPSndSnd, FrRecSnd, RRecSnd,
            RSndSnd, CovSnd, CovRec, CovInt, CovEvent, OTPSnd, ITPSnd, OSPSnd, ISPSnd, FESnd,
            FERec, FEInt,
        ];
        all.extend(PShiftLabel::ALL.iter().map(|&l| PShift(l)));
        all
    }

    pub fn name(self) -> String {
        use EffectKind::*;
        let s = match self {
            NIDSnd => "NIDSnd",
            NIDRec => "NIDRec",
            NODSnd => "NODSnd",
            NODRec => "NODRec",
            NTDegSnd => "NTDegSnd",
            NTDegRec => "NTDegRec",
            FrPSndSnd => "FrPSndSnd",
            FrRecSnd => "FrRecSnd",
            RRecSnd => "RRecSnd",
            RSndSnd => "RSndSnd",
            CovSnd => "CovSnd",
            CovRec => "CovRec",
            CovInt => "CovInt",
            CovEvent => "CovEvent",
            OTPSnd => "OTPSnd",
            ITPSnd => "ITPSnd",
            OSPSnd => "OSPSnd",
            ISPSnd => "ISPSnd",
            FESnd => "FESnd",
            FERec => "FERec",
            FEInt => "FEInt",
            PShift(l) => return format!("PS{}", l.code()),
        };
        s.to_string()
    }

    pub fn parse(name: &str) -> Result<EffectKind> {
        if let Some(code) = name.strip_prefix("PS") {
            return PShiftLabel::from_code(code)
                .map(EffectKind::PShift)
                .ok_or_else(|| RemError::UnknownEffect(name.to_string()));
        }
        Self::catalog()
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| RemError::UnknownEffect(name.to_string()))
    }

    pub fn is_covariate(self) -> bool {
        matches!(
            self,
            EffectKind::CovSnd | EffectKind::CovRec | EffectKind::CovInt | EffectKind::CovEvent
        )
    }

    pub fn is_fixed_effect(self) -> bool {
        matches!(self, EffectKind::FESnd | EffectKind::FERec | EffectKind::FEInt)
    }
}

/// One requested effect. Covariate effects are bound to the covariate of the
/// same name unless `binding` says otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectEntry {
    pub kind: EffectKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding: Option<String>,
}

impl EffectEntry {
    pub fn binding_name(&self) -> String {
        self.binding.clone().unwrap_or_else(|| self.kind.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EffectSpecification {
    pub entries: Vec<EffectEntry>,
    /// Zero-based id of the actor that stands for "the group" in non-dyadic
    /// participation shifts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_actor: Option<usize>,
}

impl EffectSpecification {
    /// Parses names such as `CovInt`, `PSAB-BA` or `CovSnd:intercept` (the
    /// part after `:` names the covariate binding).
    pub fn parse<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut entries = Vec::with_capacity(names.len());
        for raw in names {
            let raw = raw.as_ref().trim();
            let (name, binding) = match raw.split_once(':') {
                Some((n, b)) => (n.trim(), Some(b.trim().to_string())),
                None => (raw, None),
            };
            let kind = EffectKind::parse(name)?;
            if binding.is_some() && !kind.is_covariate() {
                return Err(RemError::Binding {
                    effect: name.to_string(),
                    reason: "only covariate effects take a binding".into(),
                });
            }
            entries.push(EffectEntry { kind, binding });
        }
        Ok(EffectSpecification {
            entries,
            group_actor: None,
        })
    }

    pub fn with_group_actor(mut self, actor: usize) -> Self {
        self.group_actor = Some(actor);
        self
    }

    pub fn names(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| match &e.binding {
                Some(b) => format!("{}:{}", e.kind.name(), b),
                None => e.kind.name(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TermData {
    None,
    /// `n × p` actor values.
    Actor(Vec<Vec<f64>>),
    /// `p × n × n` dyad values.
    Dyad(Vec<Vec<Vec<f64>>>),
}

#[derive(Debug, Clone, PartialEq)]
struct Term {
    kind: EffectKind,
    offset: usize,
    dim: usize,
    data: TermData,
}

/// An effect specification bound to an actor count and covariate data.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    n: usize,
    group: Option<usize>,
    terms: Vec<Term>,
    dim: usize,
    names: Vec<String>,
}

impl Model {
    pub fn bind(spec: &EffectSpecification, n: usize, cov: &CovariateSet) -> Result<Model> {
        if let Some(g) = spec.group_actor {
            if g >= n {
                return Err(RemError::InvalidInput(format!(
                    "group actor {} outside 1..={n}",
                    g + 1
                )));
            }
        }
        let mut terms = Vec::with_capacity(spec.entries.len());
        let mut names = Vec::new();
        let mut offset = 0;
        for entry in &spec.entries {
            let kind = entry.kind;
            let name = kind.name();
            if spec.entries.iter().filter(|e| e.kind == kind).count() > 1 {
                return Err(RemError::Binding {
                    effect: name,
                    reason: "effect listed more than once".into(),
                });
            }
            let (dim, data) = match kind {
                k if k.is_covariate() => {
                    let key = entry.binding_name();
                    let cov = cov.get(&key).ok_or_else(|| RemError::Binding {
                        effect: name.clone(),
                        reason: format!("no covariate named `{key}`"),
                    })?;
                    if cov.is_time_varying() {
                        return Err(RemError::UnsupportedFeature(format!(
                            "time-varying covariate `{key}` cannot be bound to `{name}`"
                        )));
                    }
                    match (k, cov) {
                        (EffectKind::CovEvent, Covariate::Dyad { values }) => {
                            check_dyad(&key, values, n)?;
                            (values.len(), TermData::Dyad(values.clone()))
                        }
                        (EffectKind::CovEvent, other) => {
                            return Err(RemError::Binding {
                                effect: name,
                                reason: format!("needs a dyad covariate, `{key}` is {}", other.kind_name()),
                            })
                        }
                        (_, Covariate::Actor { values }) => {
                            check_actor(&key, values, n)?;
                            (values[0].len(), TermData::Actor(values.clone()))
                        }
                        (_, other) => {
                            return Err(RemError::Binding {
                                effect: name,
                                reason: format!("needs an actor covariate, `{key}` is {}", other.kind_name()),
                            })
                        }
                    }
                }
                k if k.is_fixed_effect() => (n, TermData::None),
                EffectKind::PShift(label) if !label.is_dyadic() && spec.group_actor.is_none() => {
                    return Err(RemError::UnsupportedFeature(format!(
                        "non-dyadic participation shift `{name}` requires a group actor"
                    )))
                }
                _ => (1, TermData::None),
            };
            if dim == 1 && !kind.is_covariate() && !kind.is_fixed_effect() {
                names.push(name);
            } else {
                names.extend((1..=dim).map(|j| format!("{name}.{j}")));
            }
            terms.push(Term {
                kind,
                offset,
                dim,
                data,
            });
            offset += dim;
        }
        Ok(Model {
            n,
            group: spec.group_actor,
            terms,
            dim: offset,
            names,
        })
    }

    pub fn actors(&self) -> usize {
        self.n
    }

    /// Total parameter dimension `K`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Parameter names in vector order (`CovSnd.1`, `PSAB-BA`, `FESnd.3`, ...).
    pub fn parameter_names(&self) -> &[String] {
        &self.names
    }

    /// Writes `u(s, r)` for the given state into `out` (length `K`).
    pub fn statistics(&self, st: &SufficientState, s: usize, r: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let m = st.event_count() as f64;
        let ratio = |num: u64, den: f64| if den > 0.0 { num as f64 / den } else { 0.0 };
        for t in &self.terms {
            let o = t.offset;
            match t.kind {
                EffectKind::NIDSnd => out[o] = ratio(st.indegree(s), m),
                EffectKind::NIDRec => out[o] = ratio(st.indegree(r), m),
                EffectKind::NODSnd => out[o] = ratio(st.outdegree(s), m),
                EffectKind::NODRec => out[o] = ratio(st.outdegree(r), m),
                EffectKind::NTDegSnd => out[o] = ratio(st.indegree(s) + st.outdegree(s), 2.0 * m),
                EffectKind::NTDegRec => out[o] = ratio(st.indegree(r) + st.outdegree(r), 2.0 * m),
                EffectKind::FrPSndSnd => {
                    out[o] = ratio(st.dyad_count(s, r), st.outdegree(s) as f64)
                }
                EffectKind::FrRecSnd => {
                    out[o] = ratio(st.dyad_count(r, s), st.indegree(s) as f64)
                }
                EffectKind::RRecSnd => {
                    out[o] = st.receipt_rank(s, r).map_or(0.0, |k| 1.0 / k as f64)
                }
                EffectKind::RSndSnd => out[o] = st.send_rank(s, r).map_or(0.0, |k| 1.0 / k as f64),
                EffectKind::OTPSnd => out[o] = st.two_paths(s, r) as f64,
                EffectKind::ITPSnd => out[o] = st.two_paths(r, s) as f64,
                EffectKind::OSPSnd => out[o] = st.outbound_shared(s, r) as f64,
                EffectKind::ISPSnd => out[o] = st.inbound_shared(s, r) as f64,
                EffectKind::CovSnd | EffectKind::CovRec | EffectKind::CovInt => {
                    let TermData::Actor(x) = &t.data else { unreachable!() };
                    for j in 0..t.dim {
                        out[o + j] = match t.kind {
                            EffectKind::CovSnd => x[s][j],
                            EffectKind::CovRec => x[r][j],
                            _ => x[s][j] + x[r][j],
                        };
                    }
                }
                EffectKind::CovEvent => {
                    let TermData::Dyad(x) = &t.data else { unreachable!() };
                    for j in 0..t.dim {
                        out[o + j] = x[j][s][r];
                    }
                }
                EffectKind::FESnd | EffectKind::FERec | EffectKind::FEInt => {
                    out[o..o + t.dim].iter_mut().for_each(|v| *v = 0.0);
                    if t.kind != EffectKind::FERec {
                        out[o + s] += 1.0;
                    }
                    if t.kind != EffectKind::FESnd {
                        out[o + r] += 1.0;
                    }
                }
                EffectKind::PShift(label) => {
                    let got = classify_pshift(st.previous(), (s, r), self.group);
                    out[o] = if got == label { 1.0 } else { 0.0 };
                }
            }
        }
    }

    /// Convenience wrapper allocating the output vector.
    pub fn statistics_vec(&self, st: &SufficientState, s: usize, r: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.statistics(st, s, r, &mut out);
        out
    }

    /// Parameter slots filled by fixed-effect indicators; all other slots are
    /// "dense" statistics that depend on history or covariates.
    pub(crate) fn indicator_slots(&self) -> Vec<bool> {
        let mut mask = vec![false; self.dim];
        for t in &self.terms {
            if t.kind.is_fixed_effect() {
                mask[t.offset..t.offset + t.dim].iter_mut().for_each(|m| *m = true);
            }
        }
        mask
    }

    /// `(slot, value)` pairs of nonzero fixed-effect indicators for `(s, r)`.
    pub(crate) fn indicators(&self, s: usize, r: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        for t in &self.terms {
            match t.kind {
                EffectKind::FESnd => out.push((t.offset + s, 1.0)),
                EffectKind::FERec => out.push((t.offset + r, 1.0)),
                EffectKind::FEInt => {
                    out.push((t.offset + s, 1.0));
                    out.push((t.offset + r, 1.0));
                }
                _ => {}
            }
        }
    }
}

fn check_actor(key: &str, values: &[Vec<f64>], n: usize) -> Result<()> {
    let p = values.first().map_or(0, Vec::len);
    if values.len() != n || p == 0 || values.iter().any(|row| row.len() != p) {
        return Err(RemError::Shape {
            entry: key.to_string(),
            expected: format!("{n} × p actor matrix with p ≥ 1"),
            found: format!("{} rows", values.len()),
        });
    }
    Ok(())
}

fn check_dyad(key: &str, values: &[Vec<Vec<f64>>], n: usize) -> Result<()> {
    let ok = !values.is_empty()
        && values
            .iter()
            .all(|slice| slice.len() == n && slice.iter().all(|row| row.len() == n));
    if !ok {
        return Err(RemError::Shape {
            entry: key.to_string(),
            expected: format!("p × {n} × {n} dyad array"),
            found: format!("{} slices of mismatched size", values.len()),
        });
    }
    Ok(())
}

/// Parameter dimension `K` of `spec` bound against `n` actors and `cov`.
pub fn effect_dimension(spec: &EffectSpecification, n: usize, cov: &CovariateSet) -> Result<usize> {
    Model::bind(spec, n, cov).map(|m| m.dim())
}

/// `u(s, r)` for one candidate dyad.
pub fn compute_statistics(
    state: &SufficientState,
    spec: &EffectSpecification,
    cov: &CovariateSet,
    cand: (usize, usize),
) -> Result<Vec<f64>> {
    let model = Model::bind(spec, state.actors(), cov)?;
    Ok(model.statistics_vec(state, cand.0, cand.1))
}

/// Absorbs `ev` into `state`.
pub fn update_state(state: &mut SufficientState, ev: &crate::history::Event) {
    state.update(ev);
}
