//! Time-indexed copies of the state bits and the formulas built from them.
//!
//! Bit `i` at step `k` is the variable `v_k_i`. Step-`k` copies of `I`, `T`
//! and `P` are obtained by renaming `x_i` (and `y_i`) to these variables.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{Assignment, Formula, VarId};
use crate::fsmlang::SymbolicFsm;
use crate::trace::{Trace, TraceStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnrollError {
    #[error("variable `{0}` is not a current-state variable")]
    ForeignVariable(VarId),
}

/// Bit `bit` of the state at unrolling step `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimedVar {
    pub step: usize,
    pub bit: usize,
}

impl TimedVar {
    pub fn name(self) -> String {
        format!("v_{}_{}", self.step, self.bit)
    }

    /// Inverse of [`name`](Self::name).
    pub fn parse(v: &VarId) -> Option<TimedVar> {
        let rest = v.name().strip_prefix("v_")?;
        let (step, bit) = rest.split_once('_')?;
        let canonical = |s: &str| !s.is_empty() && (s == "0" || !s.starts_with('0'));
        if !canonical(step) || !canonical(bit) {
            return None;
        }
        Some(TimedVar {
            step: step.parse().ok()?,
            bit: bit.parse().ok()?,
        })
    }
}

/// Builds step-indexed formulas for one model. Timed variables are created
/// on first use and reused afterwards.
#[derive(Debug)]
pub struct Unroller<'a> {
    fsm: &'a SymbolicFsm,
    steps: Vec<Vec<VarId>>,
    x_index: HashMap<VarId, usize>,
    y_index: HashMap<VarId, usize>,
}

impl<'a> Unroller<'a> {
    pub fn new(fsm: &'a SymbolicFsm) -> Self {
        let index = |vs: &[VarId]| {
            vs.iter()
                .cloned()
                .enumerate()
                .map(|(i, v)| (v, i))
                .collect()
        };
        Unroller {
            fsm,
            steps: Vec::new(),
            x_index: index(fsm.x()),
            y_index: index(fsm.y()),
        }
    }

    pub fn fsm(&self) -> &'a SymbolicFsm {
        self.fsm
    }

    /// The `width` variables of step `k`, bit 0 first.
    pub fn step_vars(&mut self, k: usize) -> &[VarId] {
        let n = self.fsm.width();
        while self.steps.len() <= k {
            let step = self.steps.len();
            let vars = (0..n)
                .map(|bit| VarId::new(TimedVar { step, bit }.name()).unwrap())
                .collect();
            self.steps.push(vars);
        }
        &self.steps[k]
    }

    pub fn timed(&mut self, step: usize, bit: usize) -> VarId {
        self.step_vars(step)[bit].clone()
    }

    /// `f` over `x` renamed to step `k`.
    pub fn at_step(&mut self, f: &Formula, k: usize) -> Result<Formula, UnrollError> {
        if let Some(foreign) = f.vars().into_iter().find(|v| !self.x_index.contains_key(v)) {
            return Err(UnrollError::ForeignVariable(foreign));
        }
        let vars = self.step_vars(k).to_vec();
        Ok(f.map_vars(&mut |v| Some(Formula::var(vars[self.x_index[v]].clone()))))
    }

    /// `T` from step `k` to step `k + 1`.
    pub fn trans_at(&mut self, k: usize) -> Formula {
        let cur = self.step_vars(k).to_vec();
        let next = self.step_vars(k + 1).to_vec();
        let (xi, yi) = (&self.x_index, &self.y_index);
        self.fsm.trans().map_vars(&mut |v| {
            xi.get(v)
                .map(|&i| Formula::var(cur[i].clone()))
                .or_else(|| yi.get(v).map(|&i| Formula::var(next[i].clone())))
        })
    }

    /// Conjunction of `trans_at(i)` for `from <= i < to`; `True` when empty.
    pub fn path(&mut self, from: usize, to: usize) -> Formula {
        assert!(from <= to, "path bounds out of order");
        Formula::and((from..to).map(|i| self.trans_at(i)))
    }

    /// Every pair of steps in `from..=to` differs in at least one bit.
    pub fn loop_free(&mut self, from: usize, to: usize) -> Formula {
        assert!(from <= to, "loop_free bounds out of order");
        let n = self.fsm.width();
        let mut pairs = Vec::new();
        for i in from..=to {
            for j in i + 1..=to {
                let differs = (0..n).map(|b| {
                    Formula::xor(
                        Formula::var(self.timed(i, b)),
                        Formula::var(self.timed(j, b)),
                    )
                });
                pairs.push(Formula::or(differs.collect::<Vec<_>>()));
            }
        }
        Formula::and(pairs)
    }

    /// Reads the states at steps `0..=k` out of a model. Bits missing from
    /// the model read as `false`.
    pub fn decode_trace(&mut self, model: &Assignment, k: usize) -> Trace {
        let n = self.fsm.width();
        let steps = (0..=k)
            .map(|step| {
                let vars = self.step_vars(step);
                let bits: String = (0..n)
                    .rev()
                    .map(|b| {
                        if model.value_or_false(&vars[b]) {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect();
                TraceStep::new(self.fsm, bits)
            })
            .collect();
        Trace(steps)
    }
}
