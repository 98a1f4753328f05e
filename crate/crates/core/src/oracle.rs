//! Explicit-state reference checker.
//!
//! Breadth-first search over the declared edge list, with no SAT solving.
//! Used as ground truth for the symbolic engines.

use std::collections::VecDeque;
use std::time::Instant;

use crate::formula::{Formula, FormulaError};
use crate::fsmlang::SymbolicFsm;
use crate::outcome::{CheckOutcome, Event, QueryKind, Stats, Verdict};
use crate::trace::{Trace, TraceStep};

/// BFS layers from the initial states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachSet {
    /// Shortest distance from an initial state, by state index.
    depth: Vec<Option<usize>>,
    parent: Vec<Option<usize>>,
}

impl ReachSet {
    pub fn depth(&self, state: usize) -> Option<usize> {
        self.depth[state]
    }

    pub fn contains(&self, state: usize) -> bool {
        self.depth[state].is_some()
    }

    /// Reachable state indices in ascending order.
    pub fn states(&self) -> Vec<usize> {
        (0..self.depth.len())
            .filter(|&i| self.contains(i))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.depth.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest shortest distance to any reachable state.
    pub fn max_depth(&self) -> usize {
        self.depth.iter().flatten().copied().max().unwrap_or(0)
    }

    /// State indices along a shortest path from an initial state to `state`.
    pub fn path_to(&self, state: usize) -> Option<Vec<usize>> {
        self.depth[state]?;
        let mut path = vec![state];
        let mut cur = state;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

pub fn reachable(fsm: &SymbolicFsm) -> ReachSet {
    let n = fsm.states().len();
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in fsm.edges() {
        succ[a].push(b);
    }
    let mut depth = vec![None; n];
    let mut parent = vec![None; n];
    let mut queue = VecDeque::new();
    for &i in fsm.inits() {
        if depth[i].is_none() {
            depth[i] = Some(0);
            queue.push_back(i);
        }
    }
    while let Some(s) = queue.pop_front() {
        let d = depth[s].unwrap_or(0);
        for &t in &succ[s] {
            if depth[t].is_none() {
                depth[t] = Some(d + 1);
                parent[t] = Some(s);
                queue.push_back(t);
            }
        }
    }
    ReachSet { depth, parent }
}

/// Largest BFS depth of any reachable state.
pub fn diameter(fsm: &SymbolicFsm) -> usize {
    reachable(fsm).max_depth()
}

/// Whether `prop` holds in a declared state.
pub fn holds_in(fsm: &SymbolicFsm, prop: &Formula, state: usize) -> Result<bool, FormulaError> {
    prop.evaluate(&fsm.state_assignment(&fsm.states()[state].bits))
}

/// Checks `prop` on every reachable state. A violation comes with a shortest
/// trace; `k` is its number of transitions, or the diameter when safe.
pub fn check_explicit(fsm: &SymbolicFsm, prop: &Formula) -> Result<CheckOutcome, FormulaError> {
    let started = Instant::now();
    let reach = reachable(fsm);
    let mut bad = None;
    for s in reach.states() {
        if !holds_in(fsm, prop, s)? {
            let d = reach.depth(s).unwrap_or(0);
            if bad.is_none_or(|(_, best)| d < best) {
                bad = Some((s, d));
            }
        }
    }
    let (verdict, unsafe_) = match bad {
        Some((s, d)) => {
            let path = reach.path_to(s).unwrap_or_default();
            let trace = Trace(
                path.iter()
                    .map(|&i| TraceStep::new(fsm, fsm.states()[i].bits.clone()))
                    .collect(),
            );
            (Verdict::Unsafe { trace, k: d }, true)
        }
        None => (
            Verdict::Safe {
                method: "explicit".into(),
                k: reach.max_depth(),
            },
            false,
        ),
    };
    Ok(CheckOutcome {
        events: vec![Event::new(verdict.k(), QueryKind::Explicit, unsafe_)],
        verdict,
        stats: Stats {
            wall_time: started.elapsed(),
            ..Stats::default()
        },
        invariant: None,
    })
}
