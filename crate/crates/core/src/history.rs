//! Event sequences, the dyadic support, and edgelist ingestion.
//!
//! Actor ids are 1-based in every external format and zero-based inside the
//! crate. An edgelist is an `m × 3` table `(time-or-order, sender, receiver)`
//! ordered by its first column. In exact-time mode the final row is a null
//! event whose time marks the end of observation.

use serde::{Deserialize, Serialize};

use crate::error::{RemError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Timing {
    /// Only the order of events is known.
    Ordinal,
    /// Event times are known; waiting times enter the likelihood.
    Exact,
}

impl std::str::FromStr for Timing {
    type Err = RemError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ordinal" => Ok(Timing::Ordinal),
            "exact" | "temporal" | "interval" => Ok(Timing::Exact),
            other => Err(RemError::InvalidInput(format!(
                "timing must be `ordinal` or `exact`, got `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for Timing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Timing::Ordinal => f.write_str("ordinal"),
            Timing::Exact => f.write_str("exact"),
        }
    }
}

/// A single directed action. `sender` and `receiver` are zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub sender: usize,
    pub receiver: usize,
}

impl Event {
    pub fn new(time: f64, sender: usize, receiver: usize) -> Self {
        Event {
            time,
            sender,
            receiver,
        }
    }

    pub fn dyad(&self) -> (usize, usize) {
        (self.sender, self.receiver)
    }
}

/// The fixed set of ordered pairs `(s, r)` with `s != r`.
///
/// Dyads are indexed sender-major: all receivers of actor 0 first, skipping
/// the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Support {
    n: usize,
}

impl Support {
    pub fn new(n: usize) -> Self {
        Support { n }
    }

    pub fn actors(&self) -> usize {
        self.n
    }

    /// `n (n - 1)`.
    pub fn len(&self) -> usize {
        self.n * self.n.saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, s: usize, r: usize) -> bool {
        s < self.n && r < self.n && s != r
    }

    pub fn index(&self, s: usize, r: usize) -> usize {
        debug_assert!(self.contains(s, r));
        s * (self.n - 1) + if r > s { r - 1 } else { r }
    }

    pub fn dyad(&self, index: usize) -> (usize, usize) {
        let s = index / (self.n - 1);
        let k = index % (self.n - 1);
        (s, if k >= s { k + 1 } else { k })
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).map(move |d| self.dyad(d))
    }
}

/// A validated, time-ordered relational event history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "HistoryRecord", try_from = "HistoryRecord")]
pub struct EventHistory {
    n: usize,
    timing: Timing,
    events: Vec<Event>,
    horizon: Option<f64>,
}

impl EventHistory {
    /// Builds a history from zero-based events, checking every invariant.
    pub fn new(n: usize, timing: Timing, events: Vec<Event>, horizon: Option<f64>) -> Result<Self> {
        if n < 2 {
            return Err(RemError::InvalidInput(format!(
                "actor count must be at least 2, got {n}"
            )));
        }
        let mut prev: Option<f64> = None;
        for (i, ev) in events.iter().enumerate() {
            let row = i + 1;
            if !ev.time.is_finite() || ev.time < 0.0 {
                return Err(RemError::InvalidInput(format!(
                    "row {row}: event time {} must be finite and nonnegative",
                    ev.time
                )));
            }
            if ev.sender >= n {
                return Err(RemError::IdRange { row, id: (ev.sender + 1) as f64, n });
            }
            if ev.receiver >= n {
                return Err(RemError::IdRange { row, id: (ev.receiver + 1) as f64, n });
            }
            if ev.sender == ev.receiver {
                return Err(RemError::SelfLoop { row, id: ev.sender + 1 });
            }
            match (timing, prev) {
                (Timing::Exact, Some(p)) if ev.time == p => {
                    return Err(RemError::Simultaneity { row, time: ev.time });
                }
                (Timing::Exact, None) if ev.time <= 0.0 => {
                    return Err(RemError::Simultaneity { row, time: ev.time });
                }
                (_, Some(p)) if ev.time < p || (timing == Timing::Ordinal && ev.time == p) => {
                    return Err(RemError::Ordering { row, prev: p, found: ev.time });
                }
                _ => {}
            }
            prev = Some(ev.time);
        }
        let horizon = match timing {
            Timing::Ordinal => None,
            Timing::Exact => {
                let h = horizon.ok_or_else(|| {
                    RemError::InvalidInput("exact-time history needs an observation horizon".into())
                })?;
                if !h.is_finite() || h < prev.unwrap_or(0.0) {
                    return Err(RemError::Ordering {
                        row: events.len() + 1,
                        prev: prev.unwrap_or(0.0),
                        found: h,
                    });
                }
                Some(h)
            }
        };
        Ok(EventHistory {
            n,
            timing,
            events,
            horizon,
        })
    }

    pub fn actors(&self) -> usize {
        self.n
    }

    pub fn timing(&self) -> Timing {
        self.timing
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// End of observation; `None` for ordinal histories.
    pub fn horizon(&self) -> Option<f64> {
        self.horizon
    }

    pub fn support(&self) -> Support {
        Support::new(self.n)
    }

    /// Waiting times `t_i - t_{i-1}` with `t_0 = 0`, followed by the final
    /// censoring gap `horizon - t_m`. Exact mode only.
    pub fn waiting_times(&self) -> Option<Vec<f64>> {
        let horizon = self.horizon?;
        let mut last = 0.0;
        let mut gaps: Vec<f64> = self
            .events
            .iter()
            .map(|e| {
                let gap = e.time - last;
                last = e.time;
                gap
            })
            .collect();
        gaps.push(horizon - last);
        Some(gaps)
    }

    /// Keeps the events selected by `keep`, preserving order and horizon.
    pub fn subset(&self, keep: &[bool]) -> EventHistory {
        let events = self
            .events
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(e, _)| *e)
            .collect();
        EventHistory {
            n: self.n,
            timing: self.timing,
            events,
            horizon: self.horizon,
        }
    }

    /// The history as edgelist rows with 1-based ids; exact histories end
    /// with the terminal null row.
    pub fn to_rows(&self) -> Vec<[Option<f64>; 3]> {
        let mut rows: Vec<[Option<f64>; 3]> = self
            .events
            .iter()
            .map(|e| {
                [
                    Some(e.time),
                    Some((e.sender + 1) as f64),
                    Some((e.receiver + 1) as f64),
                ]
            })
            .collect();
        if let Some(h) = self.horizon {
            rows.push([Some(h), None, None]);
        }
        rows
    }

    /// Stable digest of actor count, timing and events; used to check that
    /// two fits were made on the same data.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        hasher.update([self.timing as u8]);
        for e in &self.events {
            hasher.update(e.time.to_le_bytes());
            hasher.update((e.sender as u64).to_le_bytes());
            hasher.update((e.receiver as u64).to_le_bytes());
        }
        if let Some(h) = self.horizon {
            hasher.update(h.to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn actor_id(value: f64, row: usize, n: usize) -> Result<usize> {
    if value.fract() != 0.0 || value < 1.0 || value > n as f64 {
        return Err(RemError::IdRange { row, id: value, n });
    }
    Ok(value as usize - 1)
}

/// Parses an `m × 3` edgelist table.
///
/// Ordinal histories may use any strictly increasing first column; it is
/// reindexed to `1..=m`, and an empty table is an empty history. Exact
/// histories consume the final row as the observation horizon, ignoring its
/// sender and receiver fields.
pub fn parse_edgelist(rows: &[[Option<f64>; 3]], n: usize, timing: Timing) -> Result<EventHistory> {
    if rows.is_empty() && timing == Timing::Exact {
        return Err(RemError::InvalidInput("edgelist has no rows".into()));
    }
    let (body, horizon) = match timing {
        Timing::Ordinal => (rows, None),
        Timing::Exact => {
            let (last, body) = rows.split_last().expect("nonempty");
            let h = last[0].ok_or(RemError::MissingValue { row: rows.len() })?;
            (body, Some(h))
        }
    };
    let mut events = Vec::with_capacity(body.len());
    for (i, row) in body.iter().enumerate() {
        let row_no = i + 1;
        let [Some(t), Some(s), Some(r)] = *row else {
            return Err(RemError::MissingValue { row: row_no });
        };
        if !t.is_finite() || !s.is_finite() || !r.is_finite() {
            return Err(RemError::MissingValue { row: row_no });
        }
        let sender = actor_id(s, row_no, n)?;
        let receiver = actor_id(r, row_no, n)?;
        events.push(Event::new(t, sender, receiver));
    }
    if timing == Timing::Ordinal {
        for (i, pair) in events.windows(2).enumerate() {
            if pair[1].time <= pair[0].time {
                return Err(RemError::Ordering {
                    row: i + 2,
                    prev: pair[0].time,
                    found: pair[1].time,
                });
            }
        }
        for (i, e) in events.iter_mut().enumerate() {
            e.time = (i + 1) as f64;
        }
    }
    EventHistory::new(n, timing, events, horizon)
}

/// Counts of events per (sender, receiver); rows are senders.
pub fn aggregate_sociomatrix(h: &EventHistory) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; h.n]; h.n];
    for e in &h.events {
        m[e.sender][e.receiver] += 1;
    }
    m
}

#[derive(Serialize, Deserialize)]
struct HistoryRecord {
    n: usize,
    timing: Timing,
    edgelist: Vec<[Option<f64>; 3]>,
}

impl From<EventHistory> for HistoryRecord {
    fn from(h: EventHistory) -> Self {
        HistoryRecord {
            n: h.n,
            timing: h.timing,
            edgelist: h.to_rows(),
        }
    }
}

impl TryFrom<HistoryRecord> for EventHistory {
    type Error = RemError;

    fn try_from(rec: HistoryRecord) -> Result<Self> {
        parse_edgelist(&rec.edgelist, rec.n, rec.timing)
    }
}
