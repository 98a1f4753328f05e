//! Tseitin conversion from [`Formula`] to clause form.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::formula::{Formula, VarId};

/// A literal over a 1-based CNF variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(var >= 1, "CNF variables are 1-based");
        Literal { var, positive }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    /// DIMACS integer form.
    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }
}

/// Equisatisfiable clause form of a formula.
///
/// Original variables take indices `1..=var_map.len()` in order of first
/// occurrence; Tseitin auxiliaries follow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub clauses: Vec<Vec<Literal>>,
    pub var_map: BTreeMap<VarId, u32>,
    pub aux_count: u32,
    /// The input folded to `false` before any clause was needed.
    pub trivially_false: bool,
}

impl CnfFormula {
    pub fn num_vars(&self) -> u32 {
        self.var_map.len() as u32 + self.aux_count
    }

    /// Original variables indexed by CNF variable (index 0 unused).
    pub fn originals(&self) -> Vec<Option<VarId>> {
        let mut out = vec![None; self.num_vars() as usize + 1];
        for (v, &i) in &self.var_map {
            out[i as usize] = Some(v.clone());
        }
        out
    }

    /// DIMACS text with `c` comment lines naming the original variables.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let mut names: Vec<_> = self.var_map.iter().collect();
        names.sort_by_key(|(_, &i)| i);
        for (v, i) in names {
            let _ = writeln!(out, "c {i} {v}");
        }
        if self.trivially_false {
            let _ = writeln!(out, "p cnf {} 1", self.num_vars());
            out.push_str("0\n");
            return out;
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars(), self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{} ", l.to_dimacs());
            }
            out.push_str("0\n");
        }
        out
    }
}

pub fn to_cnf(f: &Formula) -> CnfFormula {
    let mut enc = Encoder::default();
    for v in f.vars_in_order() {
        enc.next_var += 1;
        enc.var_map.insert(v, enc.next_var);
    }
    let originals = enc.next_var;
    enc.assert(f);
    if enc.trivially_false {
        enc.clauses.clear();
    }
    CnfFormula {
        clauses: enc.clauses,
        aux_count: enc.next_var - originals,
        var_map: enc.var_map,
        trivially_false: enc.trivially_false,
    }
}

#[derive(Default)]
struct Encoder {
    clauses: Vec<Vec<Literal>>,
    var_map: BTreeMap<VarId, u32>,
    next_var: u32,
    true_lit: Option<Literal>,
    trivially_false: bool,
}

impl Encoder {
    fn fresh(&mut self) -> Literal {
        self.next_var += 1;
        Literal::new(self.next_var, true)
    }

    fn constant(&mut self, value: bool) -> Literal {
        let t = match self.true_lit {
            Some(t) => t,
            None => {
                let t = self.fresh();
                self.clauses.push(vec![t]);
                self.true_lit = Some(t);
                t
            }
        };
        if value {
            t
        } else {
            !t
        }
    }

    /// Adds clauses forcing `f` to hold. Top-level conjunctions and
    /// disjunctions are emitted directly without a defining auxiliary.
    fn assert(&mut self, f: &Formula) {
        match f {
            Formula::True => {}
            Formula::False => self.trivially_false = true,
            Formula::And(cs) => cs.iter().for_each(|c| self.assert(c)),
            Formula::Or(cs) if cs.is_empty() => self.trivially_false = true,
            Formula::Or(cs) => {
                let clause = cs.iter().map(|c| self.encode(c)).collect();
                self.clauses.push(clause);
            }
            Formula::Implies(a, b) => {
                let clause = vec![!self.encode(a), self.encode(b)];
                self.clauses.push(clause);
            }
            other => {
                let l = self.encode(other);
                self.clauses.push(vec![l]);
            }
        }
    }

    /// Returns a literal equivalent to `f` under the emitted definitions.
    fn encode(&mut self, f: &Formula) -> Literal {
        match f {
            Formula::True => self.constant(true),
            Formula::False => self.constant(false),
            Formula::Var(v) => Literal::new(self.var_map[v], true),
            Formula::Not(a) => !self.encode(a),
            Formula::And(cs) => {
                let lits: Vec<_> = cs.iter().map(|c| self.encode(c)).collect();
                let out = self.fresh();
                let mut long = vec![out];
                for &l in &lits {
                    self.clauses.push(vec![!out, l]);
                    long.push(!l);
                }
                self.clauses.push(long);
                out
            }
            Formula::Or(cs) => {
                let lits: Vec<_> = cs.iter().map(|c| self.encode(c)).collect();
                self.define_or(lits)
            }
            Formula::Implies(a, b) => {
                let a = self.encode(a);
                let b = self.encode(b);
                self.define_or(vec![!a, b])
            }
            Formula::Xor(a, b) => {
                let a = self.encode(a);
                let b = self.encode(b);
                self.define_xor(a, b)
            }
            Formula::Iff(a, b) => {
                let a = self.encode(a);
                let b = self.encode(b);
                !self.define_xor(a, b)
            }
        }
    }

    fn define_or(&mut self, lits: Vec<Literal>) -> Literal {
        let out = self.fresh();
        let mut long = vec![!out];
        for l in lits {
            self.clauses.push(vec![out, !l]);
            long.push(l);
        }
        self.clauses.push(long);
        out
    }

    fn define_xor(&mut self, a: Literal, b: Literal) -> Literal {
        let out = self.fresh();
        self.clauses.push(vec![!out, a, b]);
        self.clauses.push(vec![!out, !a, !b]);
        self.clauses.push(vec![out, !a, b]);
        self.clauses.push(vec![out, a, !b]);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Formula {
        Formula::named(name)
    }

    /// Models of the clause set, projected onto the original variables.
    fn projected_models(cnf: &CnfFormula) -> Vec<Vec<bool>> {
        let n = cnf.num_vars() as usize;
        let m = cnf.var_map.len();
        let mut out = Vec::new();
        for bits in 0u64..(1 << n) {
            let val = |l: &Literal| (bits >> (l.var() - 1) & 1 == 1) == l.is_positive();
            if !cnf.trivially_false && cnf.clauses.iter().all(|c| c.iter().any(val)) {
                let proj: Vec<bool> = (0..m).map(|i| bits >> i & 1 == 1).collect();
                if !out.contains(&proj) {
                    out.push(proj);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn false_is_marked_trivially_false() {
        let cnf = to_cnf(&Formula::False);
        assert!(cnf.trivially_false);
        assert!(cnf.clauses.is_empty());
        assert!(cnf.to_dimacs().ends_with("p cnf 0 1\n0\n"));
    }

    #[test]
    fn var_is_a_unit_clause() {
        let cnf = to_cnf(&v("a"));
        assert_eq!(cnf.clauses, vec![vec![Literal::new(1, true)]]);
        assert_eq!(cnf.aux_count, 0);
    }

    #[test]
    fn xor_projects_to_two_models() {
        let cnf = to_cnf(&Formula::xor(v("a"), v("b")));
        assert_eq!(
            projected_models(&cnf),
            vec![vec![false, true], vec![true, false]]
        );
    }

    #[test]
    fn originals_come_first_in_occurrence_order() {
        let f = Formula::Or(vec![Formula::And(vec![v("z"), v("a")]), v("m")]);
        let cnf = to_cnf(&f);
        let order: Vec<_> = cnf.originals()[1..=3]
            .iter()
            .map(|o| o.as_ref().unwrap().name().to_string())
            .collect();
        assert_eq!(order, ["z", "a", "m"]);
    }

    #[test]
    fn dimacs_header_counts_clauses() {
        let cnf = to_cnf(&Formula::And(vec![v("a"), Formula::not(v("b"))]));
        let text = cnf.to_dimacs();
        assert!(text.contains("p cnf 2 2\n1 0\n-2 0\n"), "{text}");
    }
}
