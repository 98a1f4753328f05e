//! Counterexample traces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::fsmlang::SymbolicFsm;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub bits: String,
    /// Declared name of the state, if the bit pattern has one.
    pub state: Option<String>,
}

impl TraceStep {
    pub fn new(fsm: &SymbolicFsm, bits: String) -> Self {
        let state = fsm
            .state_by_bits(&bits)
            .map(|i| fsm.states()[i].name.clone());
        TraceStep { bits, state }
    }
}

impl std::fmt::Display for TraceStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.state {
            Some(name) => write!(f, "{name} ({})", self.bits),
            None => write!(f, "<{}>", self.bits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace is empty")]
    Empty,
    #[error("step {0} is not a declared state")]
    Undeclared(usize),
    #[error("trace does not start in an initial state")]
    NotInitial,
    #[error("no declared edge leaving step {0}")]
    MissingEdge(usize),
    #[error("final state satisfies the property")]
    NotViolating,
}

/// A path from an initial state to a state violating the property.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trace(pub Vec<TraceStep>);

impl Trace {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.0
    }

    /// Checks the trace against the declared edge list: it starts in an
    /// initial state, follows declared edges, and ends in a state where
    /// `prop` is false.
    pub fn validate(&self, fsm: &SymbolicFsm, prop: &Formula) -> Result<(), TraceError> {
        let last = self.0.last().ok_or(TraceError::Empty)?;
        let idx: Vec<usize> = self
            .0
            .iter()
            .enumerate()
            .map(|(i, s)| fsm.state_by_bits(&s.bits).ok_or(TraceError::Undeclared(i)))
            .collect::<Result<_, _>>()?;
        if !fsm.inits().contains(&idx[0]) {
            return Err(TraceError::NotInitial);
        }
        if let Some(i) = idx.windows(2).position(|w| !fsm.is_edge(w[0], w[1])) {
            return Err(TraceError::MissingEdge(i));
        }
        let holds = prop
            .evaluate(&fsm.state_assignment(&last.bits))
            .map_err(|_| TraceError::NotViolating)?;
        if holds {
            return Err(TraceError::NotViolating);
        }
        Ok(())
    }
}

impl std::fmt::Display for Trace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}
