//! Synchronous round-based message passing over a weighted digraph.
//!
//! Each round has two phases. Messages sent in round `r` sit in the
//! recipients' inboxes at the start of round `r + 1`; the compute phase then
//! runs every node against its own state and inbox only. Inboxes are ordered
//! by sender id, so reductions over them are reproducible.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::SimError;
use crate::graph::WeightedDigraph;

/// Bits accounted per transmitted scalar.
pub const BITS_PER_SCALAR: usize = 64;

pub trait MessageSize {
    /// Number of 64-bit scalars carried.
    fn scalars(&self) -> usize;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<M> {
    pub from: usize,
    pub msg: M,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outbox<M> {
    Silent,
    /// One copy to every out-neighbor.
    Broadcast(M),
    /// Explicit `(recipient, message)` pairs; each recipient must be an
    /// out-neighbor.
    Directed(Vec<(usize, M)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SimStats {
    pub rounds: usize,
    pub messages: usize,
    pub max_payload_scalars: usize,
    pub total_scalars: usize,
    /// Rounds keyed by the largest payload sent in them (0 for silent rounds).
    #[serde(skip)]
    pub rounds_by_payload: BTreeMap<usize, usize>,
}

impl SimStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stats json serialization")
    }

    pub fn merge(&mut self, other: &SimStats) {
        self.rounds += other.rounds;
        self.messages += other.messages;
        self.total_scalars += other.total_scalars;
        self.max_payload_scalars = self.max_payload_scalars.max(other.max_payload_scalars);
        for (&p, &c) in &other.rounds_by_payload {
            *self.rounds_by_payload.entry(p).or_default() += c;
        }
    }
}

pub struct SimNetwork<S, M> {
    topology: WeightedDigraph,
    states: Vec<S>,
    inboxes: Vec<Vec<Envelope<M>>>,
    round: usize,
    stats: SimStats,
    mode: ExecMode,
}

impl<S, M> SimNetwork<S, M>
where
    S: Send,
    M: Clone + Send + Sync + MessageSize,
{
    pub fn new(topology: WeightedDigraph, states: Vec<S>) -> Result<Self, SimError> {
        if states.len() != topology.n() {
            return Err(SimError::SizeMismatch {
                states: states.len(),
                n: topology.n(),
            });
        }
        let n = topology.n();
        Ok(Self {
            topology,
            states,
            inboxes: (0..n).map(|_| Vec::new()).collect(),
            round: 0,
            stats: SimStats::default(),
            mode: ExecMode::Sequential,
        })
    }

    pub fn with_mode(mut self, mode: ExecMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn topology(&self) -> &WeightedDigraph {
        &self.topology
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    /// Mutable access for test hooks that inject values between rounds.
    pub fn states_mut(&mut self) -> &mut [S] {
        &mut self.states
    }

    pub fn into_states(self) -> Vec<S> {
        self.states
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn stats(&self) -> &SimStats {
        &self.stats
    }

    /// Messages waiting for delivery at the next compute phase.
    pub fn pending(&self, node: usize) -> &[Envelope<M>] {
        &self.inboxes[node]
    }

    /// Runs one synchronous round. `compute(id, state, inbox)` sees only the
    /// messages sent to `id` in the previous round.
    pub fn run_round<F>(&mut self, compute: F) -> Result<(), SimError>
    where
        F: Fn(usize, &mut S, &[Envelope<M>]) -> Outbox<M> + Sync,
    {
        let inboxes = std::mem::take(&mut self.inboxes);
        let outboxes: Vec<Outbox<M>> = match self.mode {
            ExecMode::Sequential => self
                .states
                .iter_mut()
                .zip(&inboxes)
                .enumerate()
                .map(|(i, (s, inbox))| compute(i, s, inbox))
                .collect(),
            ExecMode::Parallel => self
                .states
                .par_iter_mut()
                .zip(inboxes.par_iter())
                .enumerate()
                .map(|(i, (s, inbox))| compute(i, s, inbox))
                .collect(),
        };

        let n = self.topology.n();
        let mut next: Vec<Vec<Envelope<M>>> = (0..n).map(|_| Vec::new()).collect();
        let mut round_max = 0usize;
        // Senders in ascending order keep every inbox sorted by sender id.
        for (src, out) in outboxes.into_iter().enumerate() {
            match out {
                Outbox::Silent => {}
                Outbox::Broadcast(msg) => {
                    let size = msg.scalars();
                    for &dst in self.topology.out_neighbors(src) {
                        next[dst].push(Envelope {
                            from: src,
                            msg: msg.clone(),
                        });
                        self.stats.messages += 1;
                        self.stats.total_scalars += size;
                        round_max = round_max.max(size);
                    }
                }
                Outbox::Directed(list) => {
                    for (dst, msg) in list {
                        if dst >= n || !self.topology.has_edge(src, dst) {
                            return Err(SimError::NoSuchEdge { src, dst });
                        }
                        let size = msg.scalars();
                        next[dst].push(Envelope { from: src, msg });
                        self.stats.messages += 1;
                        self.stats.total_scalars += size;
                        round_max = round_max.max(size);
                    }
                }
            }
        }
        for inbox in &mut next {
            inbox.sort_by_key(|e| e.from);
        }
        self.inboxes = next;
        self.stats.max_payload_scalars = self.stats.max_payload_scalars.max(round_max);
        *self.stats.rounds_by_payload.entry(round_max).or_default() += 1;
        self.stats.rounds += 1;
        self.round += 1;
        Ok(())
    }
}

/// CONGEST slots needed to ship `payload_scalars` over a link carrying
/// `log2(n)` bits per slot.
pub fn congest_slots(payload_scalars: usize, n: usize) -> usize {
    assert!(n >= 2, "CONGEST accounting needs n >= 2");
    let bits = (payload_scalars * BITS_PER_SCALAR) as f64;
    (bits / (n as f64).log2()).ceil() as usize
}

/// Each recorded round costs the slots of its largest message; silent rounds
/// cost one slot.
pub fn congest_equivalent_rounds(stats: &SimStats, n: usize) -> usize {
    stats
        .rounds_by_payload
        .iter()
        .map(|(&payload, &count)| count * congest_slots(payload, n).max(1))
        .sum()
}

/// The same round count with every message carrying `n` scalars.
pub fn baseline_congest_rounds(stats: &SimStats, n: usize) -> usize {
    stats.rounds * congest_slots(n, n)
}
