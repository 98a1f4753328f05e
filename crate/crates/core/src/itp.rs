//! Interpolation-based unbounded model checking.
//!
//! The bounded query `I(S0) & path(0, k) & (!P(S1) | ... | !P(Sk))` is split
//! into `A = Q(S0) & T(S0, S1)` and `B = path(1, k) & (!P(S1) | ... | !P(Sk))`.
//! When `A & B` is unsatisfiable, the interpolant is obtained by existentially
//! eliminating the variables of `A` that `B` does not mention, one Shannon
//! expansion at a time. Renamed back to the state variables it
//! over-approximates the image of `Q`. `Q` grows by disjunction until the new
//! interpolant adds nothing (a fixpoint, so the property holds) or `A & B`
//! becomes satisfiable. A satisfiable query against the true initial states
//! is a real counterexample; otherwise the bound grows and `Q` restarts at
//! `I`.

use std::collections::BTreeMap;
use std::time::Instant;

use thiserror::Error;

use crate::formula::{Formula, VarId};
use crate::fsmlang::SymbolicFsm;
use crate::kind::base_query;
use crate::outcome::{CheckOutcome, EngineError, Event, QueryKind, QueryResult, Stats, Verdict};
use crate::sat::{self, SatError, SatResult, SatSession, SolverConfig};
use crate::trace::Trace;
use crate::unroll::{TimedVar, UnrollError, Unroller};

#[derive(Debug, Error)]
pub enum ItpError {
    #[error("A & B is satisfiable; no interpolant exists")]
    SatisfiablePair,
    #[error(transparent)]
    Sat(#[from] SatError),
}

/// Which Craig condition an interpolant failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CraigViolation {
    #[error("A does not imply the interpolant")]
    NotImpliedByA,
    #[error("interpolant & B is satisfiable")]
    ConsistentWithB,
    #[error("interpolant mentions `{0}`, which is not shared by A and B")]
    ForeignVariable(VarId),
}

/// The two halves of a bounded query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbPair {
    /// `Q(S0) & T(S0, S1)`.
    pub a: Formula,
    /// `path(1, k) & (!P(S1) | ... | !P(Sk))`.
    pub b: Formula,
    pub k: usize,
}

impl AbPair {
    pub fn conjunction(&self) -> Formula {
        Formula::And(vec![self.a.clone(), self.b.clone()])
    }
}

pub fn build_ab(
    q: &Formula,
    fsm: &SymbolicFsm,
    prop: &Formula,
    k: usize,
) -> Result<AbPair, UnrollError> {
    build_ab_with(&mut Unroller::new(fsm), q, prop, k)
}

fn build_ab_with(
    u: &mut Unroller,
    q: &Formula,
    prop: &Formula,
    k: usize,
) -> Result<AbPair, UnrollError> {
    assert!(k >= 1, "build_ab needs k >= 1");
    let a = Formula::And(vec![u.at_step(q, 0)?, u.trans_at(0)]);
    let bad = (1..=k)
        .map(|i| u.at_step(prop, i).map(Formula::not))
        .collect::<Result<Vec<_>, _>>()?;
    let bad = Formula::or(bad);
    let b = if k == 1 {
        bad
    } else {
        Formula::And(vec![u.path(1, k), bad])
    };
    Ok(AbPair { a, b, k })
}

/// Existentially quantifies `elim` out of `f`, in the given order, by
/// `f := f[x := true] | f[x := false]`.
pub fn eliminate(f: &Formula, elim: &[VarId]) -> Formula {
    let mut acc = f.simplify();
    for x in elim {
        let pos = acc.substitute(&BTreeMap::from([(x.clone(), Formula::True)]));
        let neg = acc.substitute(&BTreeMap::from([(x.clone(), Formula::False)]));
        acc = Formula::Or(vec![pos, neg]).simplify();
    }
    acc
}

/// Variables of `A` that `B` does not mention, in elimination order:
/// step-0 bits in ascending order first, then any other timed variables by
/// step and bit, then anything else by name.
fn local_vars(ab: &AbPair) -> Vec<VarId> {
    let b_vars = ab.b.vars();
    let mut local: Vec<VarId> =
        ab.a.vars()
            .into_iter()
            .filter(|v| !b_vars.contains(v))
            .collect();
    local.sort_by_key(|v| match TimedVar::parse(v) {
        Some(t) => (0, t.step, t.bit, String::new()),
        None => (1, 0, 0, v.name().to_string()),
    });
    local
}

fn interpolant_of(ab: &AbPair) -> Formula {
    eliminate(&ab.a, &local_vars(ab)).simplify()
}

/// Interpolant of an unsatisfiable pair. Fails with
/// [`ItpError::SatisfiablePair`] when `A & B` has a model.
pub fn compute_interpolant(ab: &AbPair) -> Result<Formula, ItpError> {
    if sat::check(&ab.conjunction())?.is_sat() {
        return Err(ItpError::SatisfiablePair);
    }
    Ok(interpolant_of(ab))
}

/// Checks the three Craig conditions.
pub fn verify_craig(ab: &AbPair, itp: &Formula) -> Result<Result<(), CraigViolation>, SatError> {
    let (a_vars, b_vars) = (ab.a.vars(), ab.b.vars());
    if let Some(v) = itp
        .vars()
        .into_iter()
        .find(|v| !a_vars.contains(v) || !b_vars.contains(v))
    {
        return Ok(Err(CraigViolation::ForeignVariable(v)));
    }
    if !sat::implies(&ab.a, itp)? {
        return Ok(Err(CraigViolation::NotImpliedByA));
    }
    if sat::check(&Formula::And(vec![itp.clone(), ab.b.clone()]))?.is_sat() {
        return Ok(Err(CraigViolation::ConsistentWithB));
    }
    Ok(Ok(()))
}

/// Maps `v_1_i` to `x_i`.
pub fn rename_to_state_vars(itp: &Formula, fsm: &SymbolicFsm) -> Result<Formula, UnrollError> {
    let mut bad = None;
    let renamed = itp.map_vars(&mut |v| match TimedVar::parse(v) {
        Some(TimedVar { step: 1, bit }) if bit < fsm.width() => {
            Some(Formula::var(fsm.x()[bit].clone()))
        }
        _ => {
            bad.get_or_insert_with(|| v.clone());
            None
        }
    });
    match bad {
        Some(v) => Err(UnrollError::ForeignVariable(v)),
        None => Ok(renamed),
    }
}

#[derive(Debug, Clone)]
pub struct ItpConfig {
    /// Initial bound, at least 1.
    pub k0: usize,
    /// Bound increase on restart; defaults to the number of state bits.
    pub increment: Option<usize>,
    /// Give up with `BoundReached` after this many restarts.
    pub max_restarts: Option<usize>,
    pub solver: SolverConfig,
}

impl Default for ItpConfig {
    fn default() -> Self {
        ItpConfig {
            k0: 1,
            increment: None,
            max_restarts: None,
            solver: SolverConfig::default(),
        }
    }
}

pub fn run_itp(
    fsm: &SymbolicFsm,
    prop: &Formula,
    cfg: &ItpConfig,
) -> Result<CheckOutcome, EngineError> {
    assert!(cfg.k0 >= 1, "k0 must be at least 1");
    let started = Instant::now();
    let increment = cfg.increment.unwrap_or(fsm.width()).max(1);
    let mut sat = SatSession::new(cfg.solver.clone(), "itp");
    let mut u = Unroller::new(fsm);
    let mut events = Vec::new();
    let mut stats = Stats::default();

    let finish = |verdict, mut stats: Stats, sat: &SatSession, events, invariant| {
        stats.sat_queries = sat.queries();
        stats.wall_time = started.elapsed();
        CheckOutcome {
            verdict,
            stats,
            events,
            invariant,
        }
    };

    let base = sat.check(&base_query(&mut u, prop)?)?;
    events.push(Event::new(0, QueryKind::Base, base.is_sat()));
    if let SatResult::Sat(model) = base {
        let trace = u.decode_trace(&model, 0);
        return Ok(finish(
            Verdict::Unsafe { trace, k: 0 },
            stats,
            &sat,
            events,
            None,
        ));
    }

    let mut k = cfg.k0;
    loop {
        let mut q = fsm.init().clone();
        // set once an interpolant has been joined into q since the last restart
        let mut widened = false;
        let mut iteration = 0;
        loop {
            let ab = build_ab_with(&mut u, &q, prop, k)?;
            let result = sat.check(&ab.conjunction())?;
            let mut event = Event::new(k, QueryKind::AbCheck, result.is_sat());
            event.iteration = Some(iteration);

            if let SatResult::Sat(model) = result {
                events.push(event);
                if !widened {
                    let trace = shortest_violation(&mut u, &model, prop, k);
                    return Ok(finish(
                        Verdict::Unsafe { trace, k },
                        stats,
                        &sat,
                        events,
                        None,
                    ));
                }
                if cfg.max_restarts.is_some_and(|cap| stats.restarts >= cap) {
                    return Ok(finish(
                        Verdict::BoundReached { k },
                        stats,
                        &sat,
                        events,
                        None,
                    ));
                }
                stats.restarts += 1;
                k += increment;
                break;
            }

            let itp = interpolant_of(&ab);
            stats.interpolants += 1;
            #[cfg(debug_assertions)]
            if let Ok(Err(violation)) = verify_craig(&ab, &itp) {
                panic!("interpolant {itp} violates a Craig condition: {violation}");
            }
            event.interpolant = Some(itp.to_string());
            events.push(event);

            let image = rename_to_state_vars(&itp, fsm)?;
            let contained = sat.implies(&image, &q)?;
            let mut event = Event::new(k, QueryKind::Fixpoint, QueryResult::from(!contained));
            event.iteration = Some(iteration);
            if contained {
                event.q = Some(q.to_string());
                events.push(event);
                let verdict = Verdict::Safe {
                    method: "interpolant-fixpoint".into(),
                    k,
                };
                return Ok(finish(verdict, stats, &sat, events, Some(q)));
            }
            q = Formula::Or(vec![q, image]).simplify();
            widened = true;
            event.q = Some(q.to_string());
            events.push(event);
            iteration += 1;
        }
    }
}

/// Cuts a model of `I & path(0, k) & (!P1 | ... | !Pk)` at the first step
/// that violates `prop`.
fn shortest_violation(
    u: &mut Unroller,
    model: &crate::formula::Assignment,
    prop: &Formula,
    k: usize,
) -> Trace {
    let full = u.decode_trace(model, k);
    let fsm = u.fsm();
    let first_bad = full
        .steps()
        .iter()
        .position(|s| {
            !prop
                .evaluate(&fsm.state_assignment(&s.bits))
                .unwrap_or(true)
        })
        .unwrap_or(k);
    Trace(full.0[..=first_bad].to_vec())
}
