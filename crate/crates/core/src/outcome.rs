//! Verdicts, statistics and per-query event logs shared by all engines.

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::sat::SatError;
use crate::trace::Trace;
use crate::unroll::UnrollError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error("property must range over current-state bits: {0}")]
    Property(#[from] UnrollError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// `method` names the rule that closed the proof.
    Safe {
        method: String,
        k: usize,
    },
    Unsafe {
        trace: Trace,
        k: usize,
    },
    BoundReached {
        k: usize,
    },
}

impl Verdict {
    pub fn k(&self) -> usize {
        match self {
            Verdict::Safe { k, .. } | Verdict::Unsafe { k, .. } | Verdict::BoundReached { k } => *k,
        }
    }

    pub fn is_safe(&self) -> bool {
        matches!(self, Verdict::Safe { .. })
    }

    pub fn is_unsafe(&self) -> bool {
        matches!(self, Verdict::Unsafe { .. })
    }

    pub fn trace(&self) -> Option<&Trace> {
        match self {
            Verdict::Unsafe { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub sat_queries: usize,
    pub interpolants: usize,
    pub restarts: usize,
    pub wall_time: Duration,
}

/// Which formula a logged SAT query checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    /// `I(S0) & !P(S0)`.
    Base,
    /// `I(S0) & path(0, k) & !P(Sk)`.
    Bmc,
    /// `I(S0) & path(0, k) & loop_free(0, k)`.
    LoopFree,
    /// Inductive step at bound `k`.
    Induction,
    /// `A & B` of the interpolation loop.
    AbCheck,
    /// `!(ITP -> Q)` of the interpolation loop.
    Fixpoint,
    /// Reachable-state exploration of the explicit checker.
    Explicit,
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryKind::Base => "I & !P",
            QueryKind::Bmc => "run_k & !P_k",
            QueryKind::LoopFree => "I & loop-free",
            QueryKind::Induction => "induction",
            QueryKind::AbCheck => "A & B",
            QueryKind::Fixpoint => "!(ITP -> Q)",
            QueryKind::Explicit => "explicit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum QueryResult {
    Sat,
    Unsat,
}

impl From<bool> for QueryResult {
    fn from(sat: bool) -> Self {
        if sat {
            QueryResult::Sat
        } else {
            QueryResult::Unsat
        }
    }
}

impl fmt::Display for QueryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryResult::Sat => "SAT",
            QueryResult::Unsat => "UNSAT",
        })
    }
}

/// One logged query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub k: usize,
    /// Interpolant iteration at this bound (interpolation engine only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration: Option<usize>,
    pub query: QueryKind,
    pub result: QueryResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpolant: Option<String>,
    /// Accumulated reachable-state approximation after this query.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
}

impl Event {
    pub fn new(k: usize, query: QueryKind, result: impl Into<QueryResult>) -> Self {
        Event {
            k,
            iteration: None,
            query,
            result: result.into(),
            interpolant: None,
            q: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub verdict: Verdict,
    pub stats: Stats,
    pub events: Vec<Event>,
    /// Inductive invariant certifying a `Safe` verdict, when the engine has one.
    pub invariant: Option<Formula>,
}
