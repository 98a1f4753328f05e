//! Conflict-driven clause learning over a [`CnfFormula`].
//!
//! Two watched literals per clause, first-UIP learning with non-chronological
//! backjumping, and Luby restarts. Decisions follow either the static variable
//! order (CNF index order, which is first occurrence in the source formula) or
//! VSIDS-style activities. Decisions always try `false` first.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::cnf::CnfFormula;
use super::{Heuristic, SolverConfig};

/// Internal literal code: `2 * var + negated`, with 0-based variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Lit(u32);

impl Lit {
    fn new(var: usize, positive: bool) -> Lit {
        Lit((var as u32) << 1 | (!positive) as u32)
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn positive(self) -> bool {
        self.0 & 1 == 0
    }
    fn neg(self) -> Lit {
        Lit(self.0 ^ 1)
    }
    fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LBool {
    True,
    False,
    Undef,
}

pub(crate) enum Outcome {
    /// Value of every CNF variable, 0-based.
    Sat(Vec<bool>),
    Unsat,
    Exhausted,
}

pub(crate) struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assigns: Vec<LBool>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    heuristic: Heuristic,
    decision_budget: Option<u64>,
    pub(crate) decisions: u64,
    pub(crate) conflicts: u64,
    /// Set when the clause set is unsatisfiable at level 0.
    inconsistent: bool,
}

const VAR_DECAY: f64 = 0.95;
const RESTART_BASE: u64 = 64;

impl Solver {
    pub(crate) fn new(cnf: &CnfFormula, cfg: &SolverConfig) -> Solver {
        let n = cnf.num_vars() as usize;
        let mut activity = vec![0.0; n];
        if cfg.heuristic == Heuristic::Activity {
            // tiny seeded perturbation breaks ties reproducibly
            let mut rng = StdRng::seed_from_u64(cfg.seed);
            for a in &mut activity {
                *a = rng.gen::<f64>() * 1e-6;
            }
        }
        let mut s = Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![LBool::Undef; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: vec![false; n],
            activity,
            var_inc: 1.0,
            heuristic: cfg.heuristic,
            decision_budget: cfg.decision_budget,
            decisions: 0,
            conflicts: 0,
            inconsistent: cnf.trivially_false,
        };
        for clause in &cnf.clauses {
            if s.inconsistent {
                break;
            }
            let lits = clause
                .iter()
                .map(|l| Lit::new(l.var() as usize - 1, l.is_positive()))
                .collect();
            s.add_clause(lits);
        }
        s
    }

    fn value(&self, l: Lit) -> LBool {
        match self.assigns[l.var()] {
            LBool::Undef => LBool::Undef,
            LBool::True if l.positive() => LBool::True,
            LBool::False if !l.positive() => LBool::True,
            _ => LBool::False,
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn add_clause(&mut self, mut lits: Vec<Lit>) {
        lits.sort_by_key(|l| l.0);
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return; // tautology
        }
        lits.retain(|&l| self.value(l) != LBool::False);
        if lits.iter().any(|&l| self.value(l) == LBool::True) {
            return;
        }
        match lits.len() {
            0 => self.inconsistent = true,
            1 => {
                self.enqueue(lits[0], None);
                if self.propagate().is_some() {
                    self.inconsistent = true;
                }
            }
            _ => {
                let cref = self.clauses.len();
                self.watches[lits[0].neg().idx()].push(cref);
                self.watches[lits[1].neg().idx()].push(cref);
                self.clauses.push(lits);
            }
        }
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        debug_assert_eq!(self.assigns[v], LBool::Undef);
        self.assigns[v] = if l.positive() {
            LBool::True
        } else {
            LBool::False
        };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation. `watches[p]` holds the clauses watching `!p`, so
    /// they are visited when `p` becomes true. Returns a conflicting clause.
    fn propagate(&mut self) -> Option<usize> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p.neg();
            let ws = std::mem::take(&mut self.watches[p.idx()]);
            let mut kept = Vec::with_capacity(ws.len());
            let mut i = 0;
            while i < ws.len() {
                let cref = ws[i];
                i += 1;
                if conflict.is_some() {
                    kept.push(cref);
                    continue;
                }
                let clause = &mut self.clauses[cref];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.value(first) == LBool::True {
                    kept.push(cref);
                    continue;
                }
                let clause = &self.clauses[cref];
                let replacement =
                    (2..clause.len()).find(|&k| self.value(clause[k]) != LBool::False);
                if let Some(k) = replacement {
                    let clause = &mut self.clauses[cref];
                    clause.swap(1, k);
                    let watch = clause[1].neg().idx();
                    self.watches[watch].push(cref);
                    continue;
                }
                kept.push(cref);
                if self.value(first) == LBool::False {
                    conflict = Some(cref);
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            // clauses may have been re-added to this list while it was taken
            let added = std::mem::take(&mut self.watches[p.idx()]);
            kept.extend(added);
            self.watches[p.idx()] = kept;
        }
        conflict
    }

    /// First-UIP analysis. Returns the learnt clause (asserting literal first)
    /// and the backjump level.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit(0)];
        let mut pending = 0usize;
        let mut p: Option<Lit> = None;
        let mut cref = conflict;
        let mut idx = self.trail.len();
        loop {
            let start = if p.is_some() { 1 } else { 0 };
            for k in start..self.clauses[cref].len() {
                let q = self.clauses[cref][k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= self.decision_level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var()] = false;
            pending -= 1;
            p = Some(lit);
            if pending == 0 {
                break;
            }
            cref = self.reason[lit.var()].expect("implied literal without reason");
        }
        learnt[0] = p.unwrap().neg();
        for l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        let mut backjump = 0;
        if learnt.len() > 1 {
            let (max_i, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(_, l)| self.level[l.var()])
                .unwrap();
            learnt.swap(1, max_i);
            backjump = self.level[learnt[1].var()];
        }
        self.var_inc /= VAR_DECAY;
        (learnt, backjump)
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let keep = self.trail_lim[level];
        for l in self.trail.drain(keep..) {
            self.assigns[l.var()] = LBool::Undef;
            self.reason[l.var()] = None;
        }
        self.trail_lim.truncate(level);
        self.qhead = keep;
    }

    fn pick_branch(&self) -> Option<usize> {
        let mut unassigned = (0..self.assigns.len()).filter(|&v| self.assigns[v] == LBool::Undef);
        match self.heuristic {
            Heuristic::Static => unassigned.next(),
            Heuristic::Activity => unassigned.fold(None, |best: Option<usize>, v| match best {
                Some(b) if self.activity[b] >= self.activity[v] => Some(b),
                _ => Some(v),
            }),
        }
    }

    pub(crate) fn solve(&mut self) -> Outcome {
        if self.inconsistent {
            return Outcome::Unsat;
        }
        let mut restart_round = 0u32;
        loop {
            let limit = luby(restart_round) * RESTART_BASE;
            restart_round += 1;
            let mut conflicts_here = 0u64;
            loop {
                if let Some(conflict) = self.propagate() {
                    self.conflicts += 1;
                    conflicts_here += 1;
                    if self.decision_level() == 0 {
                        return Outcome::Unsat;
                    }
                    let (learnt, backjump) = self.analyze(conflict);
                    self.cancel_until(backjump);
                    if learnt.len() == 1 {
                        self.enqueue(learnt[0], None);
                    } else {
                        let cref = self.clauses.len();
                        self.watches[learnt[0].neg().idx()].push(cref);
                        self.watches[learnt[1].neg().idx()].push(cref);
                        let asserting = learnt[0];
                        self.clauses.push(learnt);
                        self.enqueue(asserting, Some(cref));
                    }
                    continue;
                }
                if conflicts_here >= limit {
                    self.cancel_until(0);
                    break;
                }
                let Some(v) = self.pick_branch() else {
                    let model = self.assigns.iter().map(|&a| a == LBool::True).collect();
                    return Outcome::Sat(model);
                };
                if self.decision_budget.is_some_and(|b| self.decisions >= b) {
                    return Outcome::Exhausted;
                }
                self.decisions += 1;
                self.trail_lim.push(self.trail.len());
                self.enqueue(Lit::new(v, false), None);
            }
        }
    }
}

/// Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < (i as u64) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i as u64 {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size as u32;
    }
    1 << seq
}
