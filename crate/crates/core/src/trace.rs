//! Per-iteration trace records and their CSV/JSON encodings.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Dominant eigenvalue of the modified Laplacian is real.
    R,
    /// Dominant eigenvalue is one of a complex-conjugate pair.
    I,
    Undecided,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::R => "R",
            Scenario::I => "I",
            Scenario::Undecided => "Undecided",
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One centralized iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    pub d_check: f64,
    pub d_hat: f64,
    pub d: f64,
    pub lam_check: f64,
    pub lam_hat: f64,
    pub lam_tilde: f64,
    pub scenario: Scenario,
}

/// One node at one distributed iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTraceRecord {
    pub k: usize,
    pub node: usize,
    pub d_check: f64,
    pub d_hat: f64,
    pub d: f64,
    pub lam_tilde: f64,
    pub scenario: Scenario,
    pub lam_check: f64,
    pub lam_hat: f64,
    /// The node's entry of the normalized state vector.
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trace {
    Central(Vec<TraceRecord>),
    Distributed(Vec<NodeTraceRecord>),
}

impl Trace {
    pub fn len(&self) -> usize {
        match self {
            Trace::Central(t) => t.len(),
            Trace::Distributed(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory csv writer");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

/// CSV with header `k,d_check,d_hat,d,lam_check,lam_hat,lam_tilde,scenario`.
pub fn central_trace_csv(records: &[TraceRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("in-memory csv writer");
    }
    if records.is_empty() {
        w.write_record([
            "k",
            "d_check",
            "d_hat",
            "d",
            "lam_check",
            "lam_hat",
            "lam_tilde",
            "scenario",
        ])
        .expect("in-memory csv writer");
    }
    into_string(w)
}

/// CSV with header `k,node,d_check,d_hat,d,lam_tilde,scenario`.
pub fn node_trace_csv(records: &[NodeTraceRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "k",
        "node",
        "d_check",
        "d_hat",
        "d",
        "lam_tilde",
        "scenario",
    ])
    .expect("in-memory csv writer");
    for r in records {
        w.serialize((
            r.k,
            r.node,
            r.d_check,
            r.d_hat,
            r.d,
            r.lam_tilde,
            r.scenario.as_str(),
        ))
        .expect("in-memory csv writer");
    }
    into_string(w)
}

/// First iteration from which every later record carries `scenario`, or
/// `None` if the final record disagrees.
pub fn scenario_stable_from<'a, I>(ks_and_scenarios: I, scenario: Scenario) -> Option<usize>
where
    I: IntoIterator<Item = (usize, &'a Scenario)>,
{
    let mut since = None;
    for (k, s) in ks_and_scenarios {
        if *s == scenario {
            since.get_or_insert(k);
        } else {
            since = None;
        }
    }
    since
}
