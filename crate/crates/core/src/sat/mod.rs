//! Self-contained SAT decision procedure over [`Formula`].
//!
//! Every query is standalone: the formula is converted to CNF with
//! [`to_cnf`] and handed to a fresh CDCL solver.

mod cnf;
mod solver;

use std::fs;
use std::path::PathBuf;

use thiserror::Error;

use crate::formula::{Assignment, Formula};

pub use cnf::{to_cnf, CnfFormula, Literal};

#[derive(Debug, Error)]
pub enum SatError {
    #[error("decision budget of {0} exhausted")]
    ResourceLimit(u64),
    #[error("failed to write CNF dump {path}: {source}")]
    Dump {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Lowest unassigned CNF index first (first occurrence in the formula).
    #[default]
    Static,
    /// Highest conflict activity first, ties broken by a seeded perturbation.
    Activity,
}

#[derive(Debug, Clone, Default)]
pub struct SolverConfig {
    pub heuristic: Heuristic,
    pub seed: u64,
    /// Give up after this many decisions.
    pub decision_budget: Option<u64>,
    /// Write every query as DIMACS into this directory.
    pub dump_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// A model over exactly `vars(f)`.
    Sat(Assignment),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Assignment> {
        match self {
            SatResult::Sat(m) => Some(m),
            SatResult::Unsat => None,
        }
    }
}

/// Solves `f` under `cfg` without touching any counters or dumps.
pub fn check_with(f: &Formula, cfg: &SolverConfig) -> Result<SatResult, SatError> {
    solve_cnf(&to_cnf(f), cfg)
}

fn solve_cnf(cnf: &CnfFormula, cfg: &SolverConfig) -> Result<SatResult, SatError> {
    let mut s = solver::Solver::new(cnf, cfg);
    match s.solve() {
        solver::Outcome::Unsat => Ok(SatResult::Unsat),
        solver::Outcome::Exhausted => Err(SatError::ResourceLimit(s.decisions)),
        solver::Outcome::Sat(values) => {
            let model = cnf
                .var_map
                .iter()
                .map(|(v, &i)| (v.clone(), values[i as usize - 1]))
                .collect();
            Ok(SatResult::Sat(model))
        }
    }
}

pub fn check(f: &Formula) -> Result<SatResult, SatError> {
    check_with(f, &SolverConfig::default())
}

/// `true` iff `f` is valid.
pub fn holds(f: &Formula) -> Result<bool, SatError> {
    Ok(!check(&Formula::not(f.clone()))?.is_sat())
}

/// `true` iff `f` entails `g`.
pub fn implies(f: &Formula, g: &Formula) -> Result<bool, SatError> {
    let q = Formula::and([f.clone(), Formula::not(g.clone())]);
    Ok(!check(&q)?.is_sat())
}

/// `true` iff `f` and `g` are logically equivalent.
pub fn equivalent(f: &Formula, g: &Formula) -> Result<bool, SatError> {
    holds(&Formula::iff(f.clone(), g.clone()))
}

/// A solver front end that counts queries and optionally dumps them.
///
/// One session belongs to one engine run.
#[derive(Debug)]
pub struct SatSession {
    config: SolverConfig,
    label: String,
    queries: usize,
}

impl SatSession {
    pub fn new(config: SolverConfig, label: impl Into<String>) -> Self {
        SatSession {
            config,
            label: label.into(),
            queries: 0,
        }
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn check(&mut self, f: &Formula) -> Result<SatResult, SatError> {
        self.queries += 1;
        let cnf = to_cnf(f);
        if let Some(dir) = &self.config.dump_dir {
            let path = dir.join(format!("{}-{:04}.cnf", self.label, self.queries));
            fs::write(&path, cnf.to_dimacs()).map_err(|source| SatError::Dump { path, source })?;
        }
        solve_cnf(&cnf, &self.config)
    }

    pub fn implies(&mut self, f: &Formula, g: &Formula) -> Result<bool, SatError> {
        let q = Formula::and([f.clone(), Formula::not(g.clone())]);
        Ok(!self.check(&q)?.is_sat())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::tests::{all_assignments, arb_formula};
    use crate::formula::VarId;
    use proptest::prelude::*;

    fn v(name: &str) -> Formula {
        Formula::named(name)
    }

    fn brute_force_sat(f: &Formula) -> bool {
        let vars: Vec<_> = f.vars().into_iter().collect();
        let found = all_assignments(&vars).any(|a| f.evaluate(&a).unwrap());
        found
    }

    #[test]
    fn contradiction_is_unsat() {
        let f = Formula::and([v("a"), Formula::not(v("a"))]);
        assert_eq!(check(&f).unwrap(), SatResult::Unsat);
    }

    #[test]
    fn implication_is_sat_with_valid_model() {
        let f = Formula::implies(v("a"), v("b"));
        let SatResult::Sat(m) = check(&f).unwrap() else {
            panic!("expected sat")
        };
        assert_eq!(m.len(), 2);
        assert!(f.evaluate(&m).unwrap());
    }

    #[test]
    fn constants() {
        assert_eq!(
            check(&Formula::True).unwrap(),
            SatResult::Sat(Assignment::new())
        );
        assert_eq!(check(&Formula::False).unwrap(), SatResult::Unsat);
        assert!(check(&Formula::Or(vec![Formula::False, v("q")]))
            .unwrap()
            .is_sat());
    }

    #[test]
    fn holds_examples() {
        assert!(holds(&Formula::Or(vec![v("p"), Formula::not(v("p"))])).unwrap());
        assert!(!holds(&Formula::xor(v("a"), v("b"))).unwrap());
        // the refuting model of a ^ b sets both inputs false
        let SatResult::Sat(cex) = check(&Formula::not(Formula::xor(v("a"), v("b")))).unwrap()
        else {
            panic!("expected a counterexample")
        };
        assert_eq!(cex.get(&VarId::new("a").unwrap()), Some(false));
        assert_eq!(cex.get(&VarId::new("b").unwrap()), Some(false));
        let f = Formula::implies(Formula::And(vec![v("a"), v("b")]), v("a"));
        assert!(holds(&f).unwrap());
    }

    #[test]
    fn implies_examples() {
        assert!(implies(&Formula::False, &v("g")).unwrap());
        assert!(implies(&v("x"), &Formula::Or(vec![v("x"), v("y")])).unwrap());
        assert!(!implies(&Formula::Or(vec![v("x"), v("y")]), &v("x")).unwrap());
    }

    #[test]
    fn decision_budget_gives_up() {
        // pigeonhole 4 into 3 needs many decisions
        let p = |i: usize, j: usize| v(&format!("p{i}_{j}"));
        let mut cs = Vec::new();
        for i in 0..4 {
            cs.push(Formula::or((0..3).map(|j| p(i, j))));
        }
        for j in 0..3 {
            for a in 0..4 {
                for b in a + 1..4 {
                    cs.push(Formula::not(Formula::and([p(a, j), p(b, j)])));
                }
            }
        }
        let f = Formula::and(cs);
        let cfg = SolverConfig {
            decision_budget: Some(2),
            ..Default::default()
        };
        assert!(matches!(
            check_with(&f, &cfg),
            Err(SatError::ResourceLimit(_))
        ));
        assert_eq!(check(&f).unwrap(), SatResult::Unsat);
    }

    #[test]
    fn session_counts_and_dumps() {
        let dir = std::env::temp_dir().join(format!("fsmv-dump-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let mut s = SatSession::new(
            SolverConfig {
                dump_dir: Some(dir.clone()),
                ..Default::default()
            },
            "t",
        );
        s.check(&v("a")).unwrap();
        assert!(s.implies(&v("a"), &v("a")).unwrap());
        assert_eq!(s.queries(), 2);
        let text = fs::read_to_string(dir.join("t-0001.cnf")).unwrap();
        assert!(text.contains("p cnf 1 1"));
        fs::remove_dir_all(dir).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn agrees_with_truth_table(f in arb_formula(10)) {
            let expected = brute_force_sat(&f);
            match check(&f).unwrap() {
                SatResult::Sat(m) => {
                    prop_assert!(expected);
                    prop_assert_eq!(m.len(), f.vars().len());
                    prop_assert!(f.evaluate(&m).unwrap());
                }
                SatResult::Unsat => prop_assert!(!expected),
            }
        }

        #[test]
        fn cnf_projection_matches_every_assignment(f in arb_formula(5)) {
            let vars: Vec<_> = f.vars().into_iter().collect();
            for a in all_assignments(&vars) {
                let cube = Formula::and(a.iter().map(|(v, b)| {
                    let lit = Formula::var(v.clone());
                    if b { lit } else { Formula::not(lit) }
                }));
                let sat = check(&Formula::And(vec![f.clone(), cube])).unwrap().is_sat();
                prop_assert_eq!(sat, f.evaluate(&a).unwrap());
            }
        }

        #[test]
        fn activity_heuristic_is_deterministic(f in arb_formula(8), seed in 0u64..4) {
            let cfg = SolverConfig { heuristic: Heuristic::Activity, seed, ..Default::default() };
            let a = check_with(&f, &cfg).unwrap();
            let b = check_with(&f, &cfg).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.is_sat(), brute_force_sat(&f));
        }
    }
}
