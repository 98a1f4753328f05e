//! Model fixtures, a seeded random model generator and small graph oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use fsm_verify::formula::{Formula, VarId};
use fsm_verify::fsmlang::{compile, parse, parse_property, CompileOptions, SymbolicFsm};
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};

/// Four states in a chain, with the last two forming a loop back to `S1`.
pub const LADDER: &str = "SIZE : 2\nS0 : 00\nS1 : 01\nS2 : 10\nS3 : 11\nINIT(S0)\n\
    NEXT(S0) := S1\nNEXT(S1) := S2\nNEXT(S2) := S3\nNEXT(S3) := S3\nNEXT(S3) := S1\n";

/// `s3` feeds a hub `s0` that alternates with `s1` and `s2`.
pub const HUB: &str = "SIZE : 2\ns0 : 00\ns1 : 01\ns2 : 10\ns3 : 11\nINIT(s3)\n\
    NEXT(s1) := s0\nNEXT(s0) := s1\nNEXT(s0) := s2\nNEXT(s2) := s0\nNEXT(s3) := s0\n";
pub const HUB_PROP: &str = "!(x1 ^ x0)";

/// Six states, `S<i>` encoded as `i`; `111` is never declared.
pub const RING: &str = "SIZE : 3\nS0 : 000\nS1 : 001\nS2 : 010\nS3 : 011\nS4 : 100\nS5 : 101\n\
    INIT(S5)\nNEXT(S0) := S1\nNEXT(S1) := S2\nNEXT(S1) := S3\nNEXT(S2) := S3\n\
    NEXT(S2) := S5\nNEXT(S3) := S4\nNEXT(S4) := S0\nNEXT(S5) := S0\n";
pub const RING_PROP: &str = "!(x2 & x1 & x0)";

pub fn model(text: &str) -> SymbolicFsm {
    compile(&parse(text).unwrap(), CompileOptions::default()).unwrap()
}

pub fn property(fsm: &SymbolicFsm, text: &str) -> Formula {
    parse_property(text, fsm).unwrap().formula
}

pub struct Instance {
    pub seed: u64,
    pub text: String,
    pub prop_text: String,
    pub fsm: SymbolicFsm,
    pub prop: Formula,
}

/// Random model with 2 to 5 bits, a random subset of encodings declared,
/// 1 to 3 successors per state and a property that is either "avoid these
/// states" or a random formula over the bits.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(2..=5);
    let total = 1usize << n;
    let m = rng.gen_range(2..=total.min(12));
    let codes = sample(&mut rng, total, m).into_vec();
    let max_succ = rng.gen_range(1..=3);

    let mut text = format!("SIZE : {n}\n");
    for (i, code) in codes.iter().enumerate() {
        text.push_str(&format!("s{i} : {code:0n$b}\n"));
    }
    let inits = rng.gen_range(1..=2.min(m));
    for i in sample(&mut rng, m, inits) {
        text.push_str(&format!("INIT(s{i})\n"));
    }
    for i in 0..m {
        for _ in 0..rng.gen_range(1..=max_succ) {
            text.push_str(&format!("NEXT(s{i}) := s{}\n", rng.gen_range(0..m)));
        }
    }

    let fsm = model(&text);
    let prop_text = if rng.gen_bool(0.5) {
        let bad: Vec<String> = (0..rng.gen_range(0..=2))
            .map(|_| format!("s{}", rng.gen_range(0..m)))
            .collect();
        if bad.is_empty() {
            "true".to_string()
        } else {
            format!("!({})", bad.join(" | "))
        }
    } else {
        let vars: Vec<VarId> = fsm.x().to_vec();
        random_formula(&mut rng, &vars, 3).to_string()
    };
    let prop = property(&fsm, &prop_text);
    Instance {
        seed,
        text,
        prop_text,
        fsm,
        prop,
    }
}

pub fn random_formula(rng: &mut StdRng, vars: &[VarId], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Formula::constant(rng.gen_bool(0.5)),
            _ => Formula::var(vars[rng.gen_range(0..vars.len())].clone()),
        };
    }
    let mut sub = || random_formula(rng, vars, depth - 1);
    let (a, b) = (sub(), sub());
    match rng.gen_range(0..6) {
        0 => Formula::not(a),
        1 => Formula::And(vec![a, b]),
        2 => Formula::Or(vec![a, b]),
        3 => Formula::xor(a, b),
        4 => Formula::implies(a, b),
        _ => Formula::iff(a, b),
    }
}

/// Names of declared states whose encoding satisfies `f` (over `x`).
pub fn state_set(fsm: &SymbolicFsm, f: &Formula) -> BTreeSet<String> {
    fsm.states()
        .iter()
        .filter(|s| f.evaluate(&fsm.state_assignment(&s.bits)).unwrap())
        .map(|s| s.name.clone())
        .collect()
}

pub fn names(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// One-step image of a set of state names over the declared edges.
pub fn image(fsm: &SymbolicFsm, set: &BTreeSet<String>) -> BTreeSet<String> {
    fsm.edges()
        .iter()
        .filter(|(a, _)| set.contains(&fsm.states()[*a].name))
        .map(|(_, b)| fsm.states()[*b].name.clone())
        .collect()
}

pub fn init_names(fsm: &SymbolicFsm) -> BTreeSet<String> {
    fsm.inits()
        .iter()
        .map(|&i| fsm.states()[i].name.clone())
        .collect()
}

/// Number of states on the longest simple path starting in an initial state.
pub fn longest_simple_path(fsm: &SymbolicFsm) -> usize {
    fn dfs(fsm: &SymbolicFsm, s: usize, seen: &mut Vec<bool>) -> usize {
        seen[s] = true;
        let mut best = 0;
        for &(a, b) in fsm.edges() {
            if a == s && !seen[b] {
                best = best.max(dfs(fsm, b, seen));
            }
        }
        seen[s] = false;
        best + 1
    }
    let mut seen = vec![false; fsm.states().len()];
    fsm.inits()
        .iter()
        .map(|&i| dfs(fsm, i, &mut seen))
        .max()
        .unwrap_or(0)
}
