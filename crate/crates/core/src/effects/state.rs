//! Incrementally maintained history summaries.
//!
//! Each update touches only the rows and columns of the two actors involved,
//! plus an `O(n)` sweep when a dyad is observed for the first time (two-path
//! and shared-partner tallies).

use crate::history::Event;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SufficientState {
    n: usize,
    events: u64,
    indegree: Vec<u64>,
    outdegree: Vec<u64>,
    /// `dyad[s * n + r]` = number of past events `s -> r`.
    dyad: Vec<u64>,
    /// Distinct past senders to each actor, most recent first.
    received_from: Vec<Vec<usize>>,
    /// Distinct past targets of each actor, most recent first.
    sent_to: Vec<Vec<usize>>,
    /// `two_path[i * n + j]` = #{k : i -> k and k -> j observed}.
    two_path: Vec<u32>,
    /// `out_shared[i * n + j]` = #{k : i -> k and j -> k observed}.
    out_shared: Vec<u32>,
    /// `in_shared[i * n + j]` = #{k : k -> i and k -> j observed}.
    in_shared: Vec<u32>,
    previous: Option<(usize, usize)>,
}

impl SufficientState {
    pub fn new(n: usize) -> Self {
        SufficientState {
            n,
            events: 0,
            indegree: vec![0; n],
            outdegree: vec![0; n],
            dyad: vec![0; n * n],
            received_from: vec![Vec::new(); n],
            sent_to: vec![Vec::new(); n],
            two_path: vec![0; n * n],
            out_shared: vec![0; n * n],
            in_shared: vec![0; n * n],
            previous: None,
        }
    }

    /// Replays `events` into a fresh state.
    pub fn from_events(n: usize, events: &[Event]) -> Self {
        let mut st = Self::new(n);
        for e in events {
            st.update(e);
        }
        st
    }

    pub fn actors(&self) -> usize {
        self.n
    }

    /// Number of events absorbed so far.
    pub fn event_count(&self) -> u64 {
        self.events
    }

    pub fn indegree(&self, v: usize) -> u64 {
        self.indegree[v]
    }

    pub fn outdegree(&self, v: usize) -> u64 {
        self.outdegree[v]
    }

    pub fn dyad_count(&self, s: usize, r: usize) -> u64 {
        self.dyad[s * self.n + r]
    }

    pub fn has_edge(&self, s: usize, r: usize) -> bool {
        self.dyad[s * self.n + r] > 0
    }

    pub fn previous(&self) -> Option<(usize, usize)> {
        self.previous
    }

    /// 1-based recency rank of `partner` among the distinct actors that have
    /// sent to `v`.
    pub fn receipt_rank(&self, v: usize, partner: usize) -> Option<usize> {
        self.received_from[v].iter().position(|&a| a == partner).map(|k| k + 1)
    }

    /// 1-based recency rank of `partner` among the distinct targets of `v`.
    pub fn send_rank(&self, v: usize, partner: usize) -> Option<usize> {
        self.sent_to[v].iter().position(|&a| a == partner).map(|k| k + 1)
    }

    pub fn two_paths(&self, from: usize, to: usize) -> u32 {
        self.two_path[from * self.n + to]
    }

    pub fn outbound_shared(&self, a: usize, b: usize) -> u32 {
        self.out_shared[a * self.n + b]
    }

    pub fn inbound_shared(&self, a: usize, b: usize) -> u32 {
        self.in_shared[a * self.n + b]
    }

    /// Absorbs the next event.
    pub fn update(&mut self, ev: &Event) {
        let n = self.n;
        let (a, b) = ev.dyad();
        let first_time = self.dyad[a * n + b] == 0;

        self.events += 1;
        self.outdegree[a] += 1;
        self.indegree[b] += 1;
        self.dyad[a * n + b] += 1;
        move_to_front(&mut self.received_from[b], a);
        move_to_front(&mut self.sent_to[a], b);
        self.previous = Some((a, b));

        if first_time {
            for k in 0..n {
                // i -> a -> b for every i with i -> a
                if self.dyad[k * n + a] > 0 {
                    self.two_path[k * n + b] += 1;
                }
                // a -> b -> j for every j with b -> j
                if self.dyad[b * n + k] > 0 {
                    self.two_path[a * n + k] += 1;
                }
                // a and k now share outbound partner b
                if k != a && self.dyad[k * n + b] > 0 {
                    self.out_shared[a * n + k] += 1;
                    self.out_shared[k * n + a] += 1;
                }
                // b and k now share inbound partner a
                if k != b && self.dyad[a * n + k] > 0 {
                    self.in_shared[b * n + k] += 1;
                    self.in_shared[k * n + b] += 1;
                }
            }
        }
    }
}

fn move_to_front(list: &mut Vec<usize>, v: usize) {
    if let Some(pos) = list.iter().position(|&x| x == v) {
        list[..=pos].rotate_right(1);
    } else {
        list.insert(0, v);
    }
}
