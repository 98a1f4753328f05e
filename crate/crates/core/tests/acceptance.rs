//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use fsm_verify::formula::{Formula, VarId};
use fsm_verify::fsmlang::{encode_state, parse_expr, parse_property, plain_var};
use fsm_verify::itp::{
    build_ab, compute_interpolant, rename_to_state_vars, run_itp, verify_craig, ItpConfig,
};
use fsm_verify::kind::{loop_free_query, run_kind, CompletenessMode, KindConfig};
use fsm_verify::oracle::check_explicit;
use fsm_verify::outcome::{QueryKind, QueryResult, Verdict};
use fsm_verify::sat::{self, SatResult};
use fsm_verify::unroll::Unroller;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const RANDOM_INSTANCES: u64 = 200;

fn step_vars(step: usize, n: usize) -> Vec<VarId> {
    (0..n)
        .map(|i| VarId::new(format!("v_{step}_{i}")).unwrap())
        .collect()
}

fn within(limit: Duration, started: Instant) -> Result<Duration, String> {
    let took = started.elapsed();
    if took > limit {
        return Err(format!("took {took:?}, limit {limit:?}"));
    }
    Ok(took)
}

fn ladder_interpolant() -> Check {
    let started = Instant::now();
    let fsm = model(LADDER);
    let p = property(&fsm, "!S3");
    let ab = build_ab(fsm.init(), &fsm, &p, 1).map_err(|e| e.to_string())?;
    let itp = compute_interpolant(&ab).map_err(|e| e.to_string())?;
    let expected = encode_state("01", &step_vars(1, 2));
    ensure!(
        sat::equivalent(&itp, &expected).unwrap(),
        "interpolant {itp} is not {expected}"
    );
    let took = within(Duration::from_secs(1), started)?;
    Ok(format!("interpolant {itp} in {took:?}"))
}

fn hub_kind_sequence() -> Check {
    let started = Instant::now();
    let fsm = model(HUB);
    let p = property(&fsm, HUB_PROP);
    let out = run_kind(&fsm, &p, &KindConfig::default()).map_err(|e| e.to_string())?;
    let seq: Vec<_> = out.events.iter().map(|e| (e.k, e.result)).collect();
    let expected = [
        (0, QueryResult::Unsat),
        (1, QueryResult::Unsat),
        (2, QueryResult::Sat),
    ];
    ensure!(seq == expected, "verdict sequence {seq:?}");
    let Verdict::Unsafe { trace, k: 2 } = &out.verdict else {
        return Err(format!("verdict {:?}", out.verdict));
    };
    ensure!(trace.len() == 3, "trace has {} states", trace.len());
    trace.validate(&fsm, &p).map_err(|e| e.to_string())?;
    let took = within(Duration::from_secs(1), started)?;
    Ok(format!("UNSAT, UNSAT, SAT; trace {trace}; {took:?}"))
}

fn hub_itp_sequence() -> Check {
    let started = Instant::now();
    let fsm = model(HUB);
    let p = property(&fsm, HUB_PROP);
    let cfg = ItpConfig {
        k0: 1,
        increment: Some(2),
        ..Default::default()
    };
    let out = run_itp(&fsm, &p, &cfg).map_err(|e| e.to_string())?;
    let shape: Vec<_> = out
        .events
        .iter()
        .map(|e| (e.k, e.iteration, e.query, e.result))
        .collect();
    let expected = [
        (0, None, QueryKind::Base, QueryResult::Unsat),
        (1, Some(0), QueryKind::AbCheck, QueryResult::Unsat),
        (1, Some(0), QueryKind::Fixpoint, QueryResult::Sat),
        (1, Some(1), QueryKind::AbCheck, QueryResult::Sat),
        (3, Some(0), QueryKind::AbCheck, QueryResult::Sat),
    ];
    ensure!(shape == expected, "event sequence {shape:?}");

    let itp_text = out.events[1]
        .interpolant
        .as_deref()
        .ok_or("no interpolant logged")?;
    let itp = parse_expr(itp_text, plain_var).map_err(|e| e.to_string())?;
    let hub_at_1 = encode_state("00", &step_vars(1, 2));
    ensure!(
        sat::equivalent(&itp, &hub_at_1).unwrap(),
        "interpolant {itp_text} is not s0"
    );

    let q_text = out.events[2].q.as_deref().ok_or("no Q logged")?;
    let q = parse_property(q_text, &fsm)
        .map_err(|e| e.to_string())?
        .formula;
    let inits = init_names(&fsm);
    let expected_q: BTreeSet<_> = inits.union(&image(&fsm, &inits)).cloned().collect();
    ensure!(
        state_set(&fsm, &q) == expected_q,
        "Q = {q_text}, expected {expected_q:?}"
    );

    ensure!(
        out.verdict.is_unsafe() && out.verdict.k() == 3,
        "verdict {:?}",
        out.verdict
    );
    ensure!(out.stats.restarts == 1, "{} restarts", out.stats.restarts);
    out.verdict
        .trace()
        .unwrap()
        .validate(&fsm, &p)
        .map_err(|e| e.to_string())?;
    let took = within(Duration::from_secs(1), started)?;
    Ok(format!(
        "restart 1 -> 3, Q = {expected_q:?}, unsafe; {took:?}"
    ))
}

fn ring_tables() -> Check {
    let started = Instant::now();
    let fsm = model(RING);
    let p = property(&fsm, RING_PROP);

    let out = run_kind(&fsm, &p, &KindConfig::default()).map_err(|e| e.to_string())?;
    let ks: Vec<_> = out.events.iter().map(|e| e.k).collect();
    ensure!(
        ks == (0..8).collect::<Vec<_>>(),
        "kind checked bounds {ks:?}"
    );
    ensure!(
        out.events.iter().all(|e| e.result == QueryResult::Unsat),
        "a BMC query was SAT"
    );
    ensure!(
        out.verdict
            == Verdict::Safe {
                method: "base-exhaustive".into(),
                k: 8
            },
        "kind verdict {:?}",
        out.verdict
    );

    let out = run_itp(&fsm, &p, &ItpConfig::default()).map_err(|e| e.to_string())?;
    ensure!(
        out.verdict.is_safe() && out.verdict.k() == 1,
        "itp verdict {:?}",
        out.verdict
    );
    ensure!(
        out.stats.interpolants == 5,
        "{} interpolants",
        out.stats.interpolants
    );
    let q_sets: Vec<BTreeSet<String>> = out
        .events
        .iter()
        .filter(|e| e.query == QueryKind::Fixpoint)
        .map(|e| {
            state_set(
                &fsm,
                &parse_property(e.q.as_ref().unwrap(), &fsm).unwrap().formula,
            )
        })
        .collect();
    // exact-image iteration from the initial states
    let mut expected = vec![init_names(&fsm)];
    for _ in 0..4 {
        let last = expected.last().unwrap().clone();
        expected.push(last.union(&image(&fsm, &last)).cloned().collect());
    }
    let grown: Vec<BTreeSet<String>> = expected[1..].to_vec();
    let mut logged = q_sets.clone();
    logged.pop();
    ensure!(
        logged == grown[..4],
        "Q sets {q_sets:?}, expected {grown:?}"
    );
    ensure!(
        q_sets.last() == grown.last(),
        "fixpoint Q {:?}",
        q_sets.last()
    );
    let hand = [
        names(&["S5", "S0"]),
        names(&["S5", "S0", "S1"]),
        names(&["S5", "S0", "S1", "S2", "S3"]),
        names(&["S5", "S0", "S1", "S2", "S3", "S4"]),
    ];
    ensure!(grown == hand, "oracle Q sets {grown:?}");
    ensure!(expected[0] == names(&["S5"]), "initial Q {:?}", expected[0]);
    let took = within(Duration::from_secs(1), started)?;
    Ok(format!(
        "kind safe at 8, itp safe at 1 after 5 interpolants; {took:?}"
    ))
}

fn craig_suite() -> Check {
    let mut checked = 0;
    for seed in 0..RANDOM_INSTANCES {
        let inst = random_instance(seed);
        let (fsm, p) = (&inst.fsm, &inst.prop);
        for k in 1..=3 {
            let mut q = fsm.init().clone();
            for _ in 0..8 {
                let ab = build_ab(&q, fsm, p, k).map_err(|e| e.to_string())?;
                if sat::check(&ab.conjunction()).unwrap().is_sat() {
                    break;
                }
                let itp = compute_interpolant(&ab).map_err(|e| e.to_string())?;
                checked += 1;
                if let Err(v) = verify_craig(&ab, &itp).unwrap() {
                    return Err(format!("seed {seed}, k {k}: {v}"));
                }
                let r = rename_to_state_vars(&itp, fsm).map_err(|e| e.to_string())?;
                if sat::implies(&r, &q).unwrap() {
                    break;
                }
                q = Formula::Or(vec![q, r]).simplify();
            }
        }
    }
    ensure!(checked > 0, "no interpolants computed");
    Ok(format!(
        "{checked} interpolants over {RANDOM_INSTANCES} models, 0 violations"
    ))
}

fn oracle_equivalence() -> Check {
    let started = Instant::now();
    let kind_cfg = KindConfig {
        completeness: CompletenessMode::LoopFree,
        ..Default::default()
    };
    let (mut safe, mut unsafe_) = (0, 0);
    for seed in 0..RANDOM_INSTANCES {
        let inst = random_instance(seed);
        let (fsm, p) = (&inst.fsm, &inst.prop);
        let oracle = check_explicit(fsm, p).unwrap().verdict;
        let kind = run_kind(fsm, p, &kind_cfg)
            .map_err(|e| e.to_string())?
            .verdict;
        let itp = run_itp(fsm, p, &ItpConfig::default())
            .map_err(|e| e.to_string())?
            .verdict;
        let ctx = format!("seed {seed}, P = {}", inst.prop_text);
        for (name, v) in [("kind", &kind), ("itp", &itp)] {
            ensure!(
                v.is_safe() == oracle.is_safe(),
                "{ctx}: {name} {v:?} vs oracle {oracle:?}"
            );
            ensure!(v.is_safe() || v.is_unsafe(), "{ctx}: {name} gave up");
            if let Some(t) = v.trace() {
                t.validate(fsm, p)
                    .map_err(|e| format!("{ctx}: {name} trace: {e}"))?;
            }
        }
        if let Some(t) = oracle.trace() {
            let kt = kind.trace().unwrap();
            ensure!(
                kt.len() == t.len(),
                "{ctx}: kind trace {} vs BFS {}",
                kt.len(),
                t.len()
            );
            unsafe_ += 1;
        } else {
            safe += 1;
        }
    }
    let took = within(Duration::from_secs(60), started)?;
    Ok(format!(
        "{safe} safe, {unsafe_} unsafe, 0 disagreements; {took:?}"
    ))
}

fn sat_truth_tables() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut sat_count, mut unsat_count) = (0, 0);
    for i in 0..500 {
        let n = rng.gen_range(1..=12);
        let vars: Vec<VarId> = (0..n)
            .map(|j| VarId::new(format!("p{j}")).unwrap())
            .collect();
        let depth = rng.gen_range(1..=6);
        let f = random_formula(&mut rng, &vars, depth);
        let fv: Vec<VarId> = f.vars().into_iter().collect();
        let brute = (0u32..1 << fv.len()).any(|bits| {
            let a = fv
                .iter()
                .enumerate()
                .map(|(j, v)| (v.clone(), bits >> j & 1 == 1))
                .collect();
            f.evaluate(&a).unwrap()
        });
        match sat::check(&f).unwrap() {
            SatResult::Sat(model) => {
                ensure!(brute, "formula {i} reported SAT but has no model: {f}");
                let mut full = model.clone();
                for v in &fv {
                    if full.get(v).is_none() {
                        full.insert(v.clone(), false);
                    }
                }
                ensure!(
                    f.evaluate(&full).unwrap(),
                    "formula {i}: model does not satisfy {f}"
                );
                sat_count += 1;
            }
            SatResult::Unsat => {
                ensure!(!brute, "formula {i} reported UNSAT but is satisfiable: {f}");
                unsat_count += 1;
            }
        }
    }
    Ok(format!(
        "500 formulas ({sat_count} SAT, {unsat_count} UNSAT), 0 disagreements"
    ))
}

fn loop_free_completeness() -> Check {
    let fsm = model(RING);
    let p = property(&fsm, RING_PROP);
    let longest = longest_simple_path(&fsm);
    let mut u = Unroller::new(&fsm);
    let first_unsat = (1..=8)
        .find(|&k| !sat::check(&loop_free_query(&mut u, k)).unwrap().is_sat())
        .ok_or("loop-free query never became UNSAT")?;
    ensure!(
        first_unsat <= longest,
        "first UNSAT at k={first_unsat}, longest simple path {longest}"
    );

    let lf = KindConfig {
        completeness: CompletenessMode::LoopFree,
        ..Default::default()
    };
    let lf = run_kind(&fsm, &p, &lf).map_err(|e| e.to_string())?.verdict;
    let b2n = run_kind(&fsm, &p, &KindConfig::default())
        .map_err(|e| e.to_string())?
        .verdict;
    ensure!(lf.is_safe() && b2n.is_safe(), "verdicts {lf:?}, {b2n:?}");
    ensure!(
        lf.k() <= b2n.k(),
        "loop-free stopped at {} after bound-2n at {}",
        lf.k(),
        b2n.k()
    );
    Ok(format!(
        "first UNSAT at k={first_unsat} (longest simple path {longest} states); safe at {} vs {}",
        lf.k(),
        b2n.k()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "chain-model interpolant equals the successor state",
            ladder_interpolant,
        ),
        ("hub model BMC verdict sequence", hub_kind_sequence),
        ("hub model interpolation with restart", hub_itp_sequence),
        ("ring model BMC and interpolation fixpoint", ring_tables),
        ("Craig conditions on random models", craig_suite),
        ("engines agree with explicit search", oracle_equivalence),
        ("SAT solver agrees with truth tables", sat_truth_tables),
        (
            "loop-free completeness on the ring model",
            loop_free_completeness,
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
