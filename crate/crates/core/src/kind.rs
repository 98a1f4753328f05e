//! Bounded model checking with the k-induction loop.
//!
//! The loop accumulates `I(S0)` into every query, so an unsatisfiable step
//! means "no violation at exactly distance k". Termination comes from one of
//! three completeness rules, chosen by [`CompletenessMode`], optionally
//! shortened by a strengthened inductive step.

use std::time::Instant;

use crate::formula::Formula;
use crate::fsmlang::SymbolicFsm;
use crate::outcome::{CheckOutcome, EngineError, Event, QueryKind, Stats, Verdict};
use crate::sat::{SatResult, SatSession, SolverConfig};
use crate::unroll::{UnrollError, Unroller};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompletenessMode {
    /// Stop once every step below `2^n` has been checked.
    #[default]
    Bound2n,
    /// Stop once no loop-free path of length `k` leaves an initial state.
    LoopFree,
    /// Only stop at `max_k`.
    None,
}

#[derive(Debug, Clone, Default)]
pub struct KindConfig {
    /// Largest bound to try; defaults to `2^n`.
    pub max_k: Option<usize>,
    pub completeness: CompletenessMode,
    pub strengthened_induction: bool,
    pub solver: SolverConfig,
}

/// `2^n`, saturating.
pub fn state_space_bound(fsm: &SymbolicFsm) -> usize {
    1usize.checked_shl(fsm.width() as u32).unwrap_or(usize::MAX)
}

/// `I(S0) & !P(S0)`.
pub fn base_query(u: &mut Unroller, prop: &Formula) -> Result<Formula, UnrollError> {
    Ok(Formula::and([
        u.at_step(u.fsm().init(), 0)?,
        Formula::not(u.at_step(prop, 0)?),
    ]))
}

/// `I(S0) & path(0, k) & !P(Sk)`.
pub fn bmc_query(u: &mut Unroller, prop: &Formula, k: usize) -> Result<Formula, UnrollError> {
    Ok(Formula::and([
        u.at_step(u.fsm().init(), 0)?,
        u.path(0, k),
        Formula::not(u.at_step(prop, k)?),
    ]))
}

/// `I(S0) & path(0, k) & loop_free(0, k)`.
pub fn loop_free_query(u: &mut Unroller, k: usize) -> Formula {
    let init = u.at_step(u.fsm().init(), 0).expect("I ranges over x");
    Formula::and([init, u.path(0, k), u.loop_free(0, k)])
}

/// `path(0, k) & !P(Sk)`; strengthened with `P(Si)` for `i < k` and
/// `loop_free(0, k)`.
pub fn induction_query(
    u: &mut Unroller,
    prop: &Formula,
    k: usize,
    strengthened: bool,
) -> Result<Formula, UnrollError> {
    let mut parts = vec![u.path(0, k)];
    if strengthened {
        for i in 0..k {
            parts.push(u.at_step(prop, i)?);
        }
        parts.push(u.loop_free(0, k));
    }
    parts.push(Formula::not(u.at_step(prop, k)?));
    Ok(Formula::and(parts))
}

pub fn check_base(fsm: &SymbolicFsm, prop: &Formula) -> Result<SatResult, EngineError> {
    let q = base_query(&mut Unroller::new(fsm), prop)?;
    Ok(crate::sat::check(&q)?)
}

pub fn bmc_step(fsm: &SymbolicFsm, prop: &Formula, k: usize) -> Result<SatResult, EngineError> {
    assert!(k >= 1, "bmc_step needs k >= 1");
    let q = bmc_query(&mut Unroller::new(fsm), prop, k)?;
    Ok(crate::sat::check(&q)?)
}

pub fn induction_step(
    fsm: &SymbolicFsm,
    prop: &Formula,
    k: usize,
    strengthened: bool,
) -> Result<SatResult, EngineError> {
    assert!(k >= 1, "induction_step needs k >= 1");
    let q = induction_query(&mut Unroller::new(fsm), prop, k, strengthened)?;
    Ok(crate::sat::check(&q)?)
}

/// Runs BMC for `k = 0, 1, 2, ...` until a counterexample, a completeness
/// rule, or the bound.
pub fn run_kind(
    fsm: &SymbolicFsm,
    prop: &Formula,
    cfg: &KindConfig,
) -> Result<CheckOutcome, EngineError> {
    let started = Instant::now();
    let mut sat = SatSession::new(cfg.solver.clone(), "kind");
    let mut u = Unroller::new(fsm);
    let mut events = Vec::new();
    let two_n = state_space_bound(fsm);
    let max_k = cfg.max_k.unwrap_or(two_n);

    let finish = |verdict: Verdict, sat: &SatSession, events: Vec<Event>| CheckOutcome {
        verdict,
        stats: Stats {
            sat_queries: sat.queries(),
            wall_time: started.elapsed(),
            ..Stats::default()
        },
        events,
        invariant: None,
    };

    let base = sat.check(&base_query(&mut u, prop)?)?;
    events.push(Event::new(0, QueryKind::Base, base.is_sat()));
    if let SatResult::Sat(model) = base {
        let trace = u.decode_trace(&model, 0);
        return Ok(finish(Verdict::Unsafe { trace, k: 0 }, &sat, events));
    }

    let mut k = 1;
    loop {
        if cfg.completeness == CompletenessMode::Bound2n && k >= two_n {
            let verdict = Verdict::Safe {
                method: "base-exhaustive".into(),
                k,
            };
            return Ok(finish(verdict, &sat, events));
        }
        if k > max_k {
            return Ok(finish(Verdict::BoundReached { k: max_k }, &sat, events));
        }

        let step = sat.check(&bmc_query(&mut u, prop, k)?)?;
        events.push(Event::new(k, QueryKind::Bmc, step.is_sat()));
        if let SatResult::Sat(model) = step {
            let trace = u.decode_trace(&model, k);
            return Ok(finish(Verdict::Unsafe { trace, k }, &sat, events));
        }

        if cfg.completeness == CompletenessMode::LoopFree {
            let simple = sat.check(&loop_free_query(&mut u, k))?;
            events.push(Event::new(k, QueryKind::LoopFree, simple.is_sat()));
            if !simple.is_sat() {
                let verdict = Verdict::Safe {
                    method: "loop-free".into(),
                    k,
                };
                return Ok(finish(verdict, &sat, events));
            }
        }

        if cfg.strengthened_induction {
            let step = sat.check(&induction_query(&mut u, prop, k, true)?)?;
            events.push(Event::new(k, QueryKind::Induction, step.is_sat()));
            if !step.is_sat() {
                let verdict = Verdict::Safe {
                    method: "induction".into(),
                    k,
                };
                return Ok(finish(verdict, &sat, events));
            }
        }

        k += 1;
    }
}
