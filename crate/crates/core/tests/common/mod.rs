//! Brute-force reference implementations used by the integration tests.
//!
//! Nothing here touches the library's incremental state: every statistic is
//! recomputed from the raw event prefix, and likelihoods are built from
//! explicit per-step softmax / exponential densities.

#![allow(dead_code)]

use rand::Rng;
use rem_core::{Covariate, CovariateSet, EffectSpecification, Event, EventHistory, Timing};

/// Plain covariate arrays keyed by effect.
#[derive(Debug, Clone, Default)]
pub struct OracleCov {
    pub snd: Option<Vec<Vec<f64>>>,
    pub rec: Option<Vec<Vec<f64>>>,
    pub int: Option<Vec<Vec<f64>>>,
    /// `p × n × n`
    pub event: Option<Vec<Vec<Vec<f64>>>>,
}

impl OracleCov {
    pub fn to_set(&self) -> CovariateSet {
        let mut set = CovariateSet::new();
        if let Some(v) = &self.snd {
            set.insert("CovSnd", Covariate::actor(v.clone()));
        }
        if let Some(v) = &self.rec {
            set.insert("CovRec", Covariate::actor(v.clone()));
        }
        if let Some(v) = &self.int {
            set.insert("CovInt", Covariate::actor(v.clone()));
        }
        if let Some(v) = &self.event {
            set.insert("CovEvent", Covariate::dyad(v.clone()));
        }
        set
    }
}

/// Effects the oracle understands (everything that needs no group actor).
pub const ORACLE_EFFECTS: &[&str] = &[
    "NIDSnd", "NIDRec", "NODSnd", "NODRec", "NTDegSnd", "NTDegRec", "FrPSndSnd", "FrRecSnd", "RRecSnd",
    "RSndSnd", "CovSnd", "CovRec", "CovInt", "CovEvent", "OTPSnd", "ITPSnd", "OSPSnd", "ISPSnd", "FESnd",
    "FERec", "FEInt", "PSAB-BA", "PSAB-BY", "PSAB-AY", "PSAB-XA", "PSAB-XB", "PSAB-XY",
];

fn recency(partners_newest_last: impl Iterator<Item = usize>, target: usize) -> f64 {
    let mut seen: Vec<usize> = Vec::new();
    let all: Vec<usize> = partners_newest_last.collect();
    for &p in all.iter().rev() {
        if !seen.contains(&p) {
            seen.push(p);
        }
    }
    match seen.iter().position(|&p| p == target) {
        Some(k) => 1.0 / (k as f64 + 1.0),
        None => 0.0,
    }
}

fn dyadic_shift(prev: Option<(usize, usize)>, s: usize, r: usize) -> Option<&'static str> {
    let (a, b) = prev?;
    if s == b && r == a {
        Some("AB-BA")
    } else if s == b {
        Some("AB-BY")
    } else if s == a && r == b {
        None
    } else if s == a {
        Some("AB-AY")
    } else if r == a {
        Some("AB-XA")
    } else if r == b {
        Some("AB-XB")
    } else {
        Some("AB-XY")
    }
}

/// Statistic vector for candidate `(s, r)` after the events in `prefix`.
pub fn statistics(n: usize, prefix: &[(usize, usize)], effects: &[&str], cov: &OracleCov, s: usize, r: usize) -> Vec<f64> {
    let m = prefix.len() as f64;
    let indeg = |v: usize| prefix.iter().filter(|e| e.1 == v).count() as f64;
    let outdeg = |v: usize| prefix.iter().filter(|e| e.0 == v).count() as f64;
    let count = |a: usize, b: usize| prefix.iter().filter(|e| **e == (a, b)).count() as f64;
    let edge = |a: usize, b: usize| prefix.contains(&(a, b));
    let ratio = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    let mut out = Vec::new();
    for &name in effects {
        match name {
            "NIDSnd" => out.push(ratio(indeg(s), m)),
            "NIDRec" => out.push(ratio(indeg(r), m)),
            "NODSnd" => out.push(ratio(outdeg(s), m)),
            "NODRec" => out.push(ratio(outdeg(r), m)),
            "NTDegSnd" => out.push(ratio(indeg(s) + outdeg(s), 2.0 * m)),
            "NTDegRec" => out.push(ratio(indeg(r) + outdeg(r), 2.0 * m)),
            "FrPSndSnd" => out.push(ratio(count(s, r), outdeg(s))),
            "FrRecSnd" => out.push(ratio(count(r, s), indeg(s))),
            "RRecSnd" => out.push(recency(prefix.iter().filter(|e| e.1 == s).map(|e| e.0), r)),
            "RSndSnd" => out.push(recency(prefix.iter().filter(|e| e.0 == s).map(|e| e.1), r)),
            "CovSnd" => out.extend(cov.snd.as_ref().unwrap()[s].iter().copied()),
            "CovRec" => out.extend(cov.rec.as_ref().unwrap()[r].iter().copied()),
            "CovInt" => {
                let x = cov.int.as_ref().unwrap();
                out.extend(x[s].iter().zip(&x[r]).map(|(a, b)| a + b));
            }
            "CovEvent" => out.extend(cov.event.as_ref().unwrap().iter().map(|slice| slice[s][r])),
            "OTPSnd" => out.push((0..n).filter(|&k| edge(s, k) && edge(k, r)).count() as f64),
            "ITPSnd" => out.push((0..n).filter(|&k| edge(r, k) && edge(k, s)).count() as f64),
            "OSPSnd" => out.push((0..n).filter(|&k| edge(s, k) && edge(r, k)).count() as f64),
            "ISPSnd" => out.push((0..n).filter(|&k| edge(k, s) && edge(k, r)).count() as f64),
            "FESnd" => out.extend((0..n).map(|i| f64::from(u8::from(i == s)))),
            "FERec" => out.extend((0..n).map(|i| f64::from(u8::from(i == r)))),
            "FEInt" => out.extend((0..n).map(|i| f64::from(u8::from(i == s)) + f64::from(u8::from(i == r)))),
            ps if ps.starts_with("PS") => {
                let hit = dyadic_shift(prefix.last().copied(), s, r) == Some(&ps[2..]);
                out.push(f64::from(u8::from(hit)));
            }
            other => panic!("oracle does not know {other}"),
        }
    }
    out
}

pub fn dyads(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|s| (0..n).filter(move |&r| r != s).map(move |r| (s, r))).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-event log-likelihood contributions and the censoring term (exact mode).
pub fn loglik(
    n: usize,
    events: &[(f64, usize, usize)],
    horizon: Option<f64>,
    effects: &[&str],
    cov: &OracleCov,
    theta: &[f64],
    mode: Timing,
) -> (Vec<f64>, f64) {
    let support = dyads(n);
    let mut prefix = Vec::new();
    let mut contributions = Vec::new();
    let mut last = 0.0;
    let eta_at = |prefix: &[(usize, usize)]| -> Vec<f64> {
        support.iter().map(|&(s, r)| dot(theta, &statistics(n, prefix, effects, cov, s, r))).collect()
    };
    for &(t, s, r) in events {
        let eta = eta_at(&prefix);
        let d = support.iter().position(|&x| x == (s, r)).unwrap();
        let l = match mode {
            Timing::Ordinal => {
                let probs: Vec<f64> = eta.iter().map(|e| e.exp()).collect();
                let z: f64 = probs.iter().sum();
                (probs[d] / z).ln()
            }
            Timing::Exact => {
                let total: f64 = eta.iter().map(|e| e.exp()).sum();
                eta[d] - (t - last) * total
            }
        };
        contributions.push(l);
        last = t;
        prefix.push((s, r));
    }
    let censor = match (mode, horizon) {
        (Timing::Exact, Some(h)) => {
            let total: f64 = eta_at(&prefix).iter().map(|e| e.exp()).sum();
            -(h - last) * total
        }
        _ => 0.0,
    };
    (contributions, censor)
}

pub struct Instance {
    pub n: usize,
    pub events: Vec<(f64, usize, usize)>,
    pub horizon: f64,
    pub effects: Vec<&'static str>,
    pub cov: OracleCov,
}

impl Instance {
    pub fn history(&self, mode: Timing) -> EventHistory {
        let events = self
            .events
            .iter()
            .enumerate()
            .map(|(i, &(t, s, r))| match mode {
                Timing::Ordinal => Event::new((i + 1) as f64, s, r),
                Timing::Exact => Event::new(t, s, r),
            })
            .collect();
        let horizon = (mode == Timing::Exact).then_some(self.horizon);
        EventHistory::new(self.n, mode, events, horizon).unwrap()
    }

    pub fn spec(&self) -> EffectSpecification {
        EffectSpecification::parse(&self.effects).unwrap()
    }

    pub fn dim(&self) -> usize {
        statistics(self.n, &[], &self.effects, &self.cov, 0, 1).len()
    }

    pub fn prefix(&self) -> Vec<(usize, usize)> {
        self.events.iter().map(|&(_, s, r)| (s, r)).collect()
    }
}

/// Random small instance: `n ∈ [2, max_n]`, `m ∈ [0, max_m]`, a random
/// subset of the oracle's effects with random covariates.
pub fn random_instance<R: Rng>(rng: &mut R, max_n: usize, max_m: usize, max_effects: usize) -> Instance {
    let n = rng.random_range(2..=max_n);
    let m = rng.random_range(0..=max_m);
    let mut t = 0.0;
    let mut events = Vec::with_capacity(m);
    for _ in 0..m {
        t += rng.random_range(0.05..1.0);
        let s = rng.random_range(0..n);
        let mut r = rng.random_range(0..n - 1);
        if r >= s {
            r += 1;
        }
        events.push((t, s, r));
    }
    let horizon = t + rng.random_range(0.0..1.0);
    let k = rng.random_range(1..=max_effects);
    let mut effects: Vec<&'static str> = Vec::new();
    while effects.len() < k {
        let e = ORACLE_EFFECTS[rng.random_range(0..ORACLE_EFFECTS.len())];
        if !effects.contains(&e) {
            effects.push(e);
        }
    }
    let mut cov = OracleCov::default();
    let actor = |rng: &mut R| -> Vec<Vec<f64>> {
        let p = rng.random_range(1..=2);
        (0..n).map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
    };
    if effects.contains(&"CovSnd") {
        cov.snd = Some(actor(rng));
    }
    if effects.contains(&"CovRec") {
        cov.rec = Some(actor(rng));
    }
    if effects.contains(&"CovInt") {
        cov.int = Some(actor(rng));
    }
    if effects.contains(&"CovEvent") {
        let p = rng.random_range(1..=2);
        cov.event = Some(
            (0..p)
                .map(|_| (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect())
                .collect(),
        );
    }
    Instance { n, events, horizon, effects, cov }
}

pub fn random_theta<R: Rng>(rng: &mut R, k: usize, scale: f64) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Relative error with a unit floor on the denominator.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Central finite-difference gradient of `f`.
pub fn fd_gradient(theta: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    (0..theta.len())
        .map(|j| {
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[j] += h;
            minus[j] -= h;
            (f(&plus) - f(&minus)) / (2.0 * h)
        })
        .collect()
}

/// Kolmogorov distribution tail `P(K > x)`.
pub fn kolmogorov_tail(x: f64) -> f64 {
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powi(k as i32 - 1) * (-2.0 * k * k * x * x).exp();
        sum += term;
    }
    sum.clamp(0.0, 1.0)
}

/// Optional data directory for the public datasets.
pub fn data_dir() -> Option<std::path::PathBuf> {
    let dir = std::env::var_os("REM_DATA_DIR")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"));
    dir.is_dir().then_some(dir)
}

/// Exact-time history drawn from the model itself.
pub fn simulated(n: usize, m: usize, seed: u64, effects: &[&str], theta: &[f64], cov: CovariateSet) -> EventHistory {
    rem_core::simulate_history(&rem_core::SimulationConfig {
        n,
        theta: theta.to_vec(),
        spec: EffectSpecification::parse(effects).unwrap(),
        covariates: cov,
        stop: rem_core::StopRule::Events(m),
        seed,
    })
    .unwrap()
}

/// Same events, ordinal timing.
pub fn as_ordinal(h: &EventHistory) -> EventHistory {
    let events = h
        .events()
        .iter()
        .enumerate()
        .map(|(i, e)| Event::new((i + 1) as f64, e.sender, e.receiver))
        .collect();
    EventHistory::new(h.actors(), Timing::Ordinal, events, None).unwrap()
}
