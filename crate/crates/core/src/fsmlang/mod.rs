//! Model-file front end: parser, compiler to symbolic form, and the
//! property expression language.
//!
//! Bit-strings are written most significant bit first. With `SIZE : n`
//! character 0 of a bit-string is bit `n-1` (variable `x{n-1}`), the last
//! character is bit 0, so `10` reads as `x1 & !x0`.

mod ast;
mod prop;

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{Assignment, Formula, VarId};

pub use ast::{parse, FsmAst};
pub use prop::{
    parse_expr, parse_property, plain_var, PropertyError, PropertyErrorKind, PropertySpec,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("bit-string has {found} bits but SIZE is {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("state `{0}` is declared twice")]
    DuplicateName(String),
    #[error("encoding {bits} is already used by state `{other}`")]
    DuplicateEncoding { bits: String, other: String },
    #[error("state `{0}` is not declared")]
    UndeclaredState(String),
    #[error("no INIT line")]
    MissingInit,
    #[error("no SIZE line")]
    MissingSize,
}

impl ParseError {
    pub fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, column, kind }
    }

    fn syntax(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Self::new(line, column, ParseErrorKind::Syntax(msg.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("states without successors: {}", .0.join(", "))]
    Deadlock(Vec<String>),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CompileOptions {
    /// Give every deadlocked state an implicit self-loop instead of failing.
    pub allow_deadlock: bool,
}

/// Current-state variable for bit `i`.
pub fn state_var(i: usize) -> VarId {
    VarId::new(format!("x{i}")).unwrap()
}

/// Next-state variable for bit `i`.
pub fn next_var(i: usize) -> VarId {
    VarId::new(format!("y{i}")).unwrap()
}

/// Conjunction of literals fixing `vars` to `bits`. `vars[i]` is bit `i`;
/// the first character of `bits` is the highest bit.
///
/// # Panics
///
/// Panics if the lengths differ or `bits` contains characters other than
/// `0` and `1`.
pub fn encode_state(bits: &str, vars: &[VarId]) -> Formula {
    assert_eq!(bits.len(), vars.len(), "bit-string width mismatch");
    let n = vars.len();
    Formula::and(bits.chars().enumerate().map(|(pos, c)| {
        let var = Formula::var(vars[n - 1 - pos].clone());
        match c {
            '1' => var,
            '0' => Formula::not(var),
            other => panic!("invalid bit {other:?}"),
        }
    }))
}

/// Assignment of `vars` (bit `i` at `vars[i]`) to `bits`.
pub fn bits_assignment(bits: &str, vars: &[VarId]) -> Assignment {
    let n = vars.len();
    bits.chars()
        .enumerate()
        .map(|(pos, c)| (vars[n - 1 - pos].clone(), c == '1'))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDef {
    pub name: String,
    pub bits: String,
}

/// Compiled model: initial-state formula over `x`, transition relation over
/// `x` and `y`, plus the declared state table and edge list.
#[derive(Debug, Clone)]
pub struct SymbolicFsm {
    width: usize,
    x: Vec<VarId>,
    y: Vec<VarId>,
    states: Vec<StateDef>,
    by_name: HashMap<String, usize>,
    by_bits: HashMap<String, usize>,
    inits: Vec<usize>,
    edges: Vec<(usize, usize)>,
    init: Formula,
    trans: Formula,
    prop: Option<String>,
}

impl SymbolicFsm {
    /// Number of state bits.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn x(&self) -> &[VarId] {
        &self.x
    }

    pub fn y(&self) -> &[VarId] {
        &self.y
    }

    pub fn init(&self) -> &Formula {
        &self.init
    }

    pub fn trans(&self) -> &Formula {
        &self.trans
    }

    pub fn states(&self) -> &[StateDef] {
        &self.states
    }

    /// Indices into [`states`](Self::states) of the initial states.
    pub fn inits(&self) -> &[usize] {
        &self.inits
    }

    /// Declared edges as state-index pairs, deduplicated, including implicit
    /// self-loops added for deadlocked states.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Property text from a `PROP` line, if the model file had one.
    pub fn embedded_property(&self) -> Option<&str> {
        self.prop.as_deref()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn state_by_bits(&self, bits: &str) -> Option<usize> {
        self.by_bits.get(bits).copied()
    }

    pub fn is_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Assignment of the current-state variables to `bits`.
    pub fn state_assignment(&self, bits: &str) -> Assignment {
        bits_assignment(bits, &self.x)
    }
}

pub fn compile(ast: &FsmAst, opts: CompileOptions) -> Result<SymbolicFsm, CompileError> {
    let width = ast.size;
    let x: Vec<VarId> = (0..width).map(state_var).collect();
    let y: Vec<VarId> = (0..width).map(next_var).collect();
    let states: Vec<StateDef> = ast
        .state_defs
        .iter()
        .map(|(name, bits)| StateDef {
            name: name.clone(),
            bits: bits.clone(),
        })
        .collect();
    let by_name: HashMap<String, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.clone(), i))
        .collect();
    let by_bits = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.bits.clone(), i))
        .collect();

    let deadlocks = ast.deadlocks();
    if !deadlocks.is_empty() && !opts.allow_deadlock {
        return Err(CompileError::Deadlock(deadlocks));
    }

    let mut inits: Vec<usize> = Vec::new();
    for name in &ast.inits {
        let i = by_name[name];
        if !inits.contains(&i) {
            inits.push(i);
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (from, to) in &ast.nexts {
        let e = (by_name[from], by_name[to]);
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    for name in &deadlocks {
        let i = by_name[name];
        edges.push((i, i));
    }

    let init = Formula::or(inits.iter().map(|&i| encode_state(&states[i].bits, &x)));
    let trans = Formula::and(states.iter().enumerate().filter_map(|(i, s)| {
        let targets: Vec<Formula> = edges
            .iter()
            .filter(|(from, _)| *from == i)
            .map(|&(_, to)| encode_state(&states[to].bits, &y))
            .collect();
        (!targets.is_empty())
            .then(|| Formula::implies(encode_state(&s.bits, &x), Formula::or(targets)))
    }));

    Ok(SymbolicFsm {
        width,
        x,
        y,
        states,
        by_name,
        by_bits,
        inits,
        edges,
        init,
        trans,
        prop: ast.prop.clone(),
    })
}
