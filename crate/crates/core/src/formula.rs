//! Boolean formulas over named variables.
//!
//! Formulas are immutable trees with structural equality. `And`/`Or` are
//! n-ary and keep their children in the order they were built, so compiled
//! transition relations render the same way every time.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("invalid variable name {0:?}: names must be non-empty and contain no whitespace")]
    InvalidName(String),
    #[error("variable `{0}` is not bound by the assignment")]
    Unbound(VarId),
}

/// A named Boolean variable. Two ids are equal iff their names are equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VarId(Arc<str>);

impl VarId {
    pub fn new(name: impl AsRef<str>) -> Result<Self, FormulaError> {
        let name = name.as_ref();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(FormulaError::InvalidName(name.to_string()));
        }
        Ok(VarId(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for VarId {
    type Error = FormulaError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        VarId::new(value)
    }
}

impl From<VarId> for String {
    fn from(v: VarId) -> String {
        v.0.to_string()
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A truth assignment to a set of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<VarId, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: VarId, value: bool) -> Option<bool> {
        self.0.insert(var, value)
    }

    pub fn get(&self, var: &VarId) -> Option<bool> {
        self.0.get(var).copied()
    }

    /// Value of `var`, or `false` when it is not bound.
    pub fn value_or_false(&self, var: &VarId) -> bool {
        self.get(var).unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, bool)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }
}

impl FromIterator<(VarId, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (VarId, bool)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Var(VarId),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(v: VarId) -> Formula {
        Formula::Var(v)
    }

    /// Variable by name.
    ///
    /// # Panics
    ///
    /// Panics if `name` is not a valid [`VarId`].
    pub fn named(name: &str) -> Formula {
        Formula::Var(VarId::new(name).expect("invalid variable name"))
    }

    pub fn constant(value: bool) -> Formula {
        if value {
            Formula::True
        } else {
            Formula::False
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction of `children`. Zero children give `True`, one child is
    /// returned as is; nothing else is rewritten.
    pub fn and(children: impl IntoIterator<Item = Formula>) -> Formula {
        let mut children: Vec<Formula> = children.into_iter().collect();
        match children.len() {
            0 => Formula::True,
            1 => children.pop().unwrap(),
            _ => Formula::And(children),
        }
    }

    /// Disjunction of `children`; zero children give `False`.
    pub fn or(children: impl IntoIterator<Item = Formula>) -> Formula {
        let mut children: Vec<Formula> = children.into_iter().collect();
        match children.len() {
            0 => Formula::False,
            1 => children.pop().unwrap(),
            _ => Formula::Or(children),
        }
    }

    pub fn xor(a: Formula, b: Formula) -> Formula {
        Formula::Xor(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Formula::True | Formula::False)
    }

    /// Set of variables occurring in the formula.
    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    /// Variables in order of first occurrence (left-to-right, depth first).
    pub fn vars_in_order(&self) -> Vec<VarId> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.for_each_var(&mut |v| {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        });
        out
    }

    fn for_each_var(&self, visit: &mut impl FnMut(&VarId)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var(v) => visit(v),
            Formula::Not(a) => a.for_each_var(visit),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.for_each_var(visit)),
            Formula::Xor(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.for_each_var(visit);
                b.for_each_var(visit);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Var(_) => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(cs) | Formula::Or(cs) => 1 + cs.iter().map(Formula::size).sum::<usize>(),
            Formula::Xor(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool, FormulaError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(v) => a.get(v).ok_or_else(|| FormulaError::Unbound(v.clone()))?,
            Formula::Not(f) => !f.evaluate(a)?,
            Formula::And(cs) => {
                let mut acc = true;
                for c in cs {
                    // evaluate every child so unbound variables are always reported
                    acc &= c.evaluate(a)?;
                }
                acc
            }
            Formula::Or(cs) => {
                let mut acc = false;
                for c in cs {
                    acc |= c.evaluate(a)?;
                }
                acc
            }
            Formula::Xor(l, r) => l.evaluate(a)? != r.evaluate(a)?,
            Formula::Implies(l, r) => {
                let l = l.evaluate(a)?;
                let r = r.evaluate(a)?;
                !l || r
            }
            Formula::Iff(l, r) => l.evaluate(a)? == r.evaluate(a)?,
        })
    }

    /// Simultaneous substitution: replacements are not themselves rewritten.
    pub fn substitute(&self, map: &BTreeMap<VarId, Formula>) -> Formula {
        self.map_vars(&mut |v| map.get(v).cloned())
    }

    /// Replaces every variable `v` for which `f(v)` returns `Some`.
    pub fn map_vars(&self, f: &mut impl FnMut(&VarId) -> Option<Formula>) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Var(v) => f(v).unwrap_or_else(|| Formula::Var(v.clone())),
            Formula::Not(a) => Formula::Not(Box::new(a.map_vars(f))),
            Formula::And(cs) => Formula::And(cs.iter().map(|c| c.map_vars(f)).collect()),
            Formula::Or(cs) => Formula::Or(cs.iter().map(|c| c.map_vars(f)).collect()),
            Formula::Xor(a, b) => Formula::xor(a.map_vars(f), b.map_vars(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_vars(f), b.map_vars(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_vars(f), b.map_vars(f)),
        }
    }

    /// Best-effort rewriting to a smaller equivalent formula.
    ///
    /// Folds constants, removes double negation, flattens nested `And`/`Or`,
    /// drops duplicate children and detects complementary pairs. The result
    /// never mentions a variable the input did not.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Var(_) => self.clone(),
            Formula::Not(a) => negate(a.simplify()),
            Formula::And(cs) => simplify_nary(cs, true),
            Formula::Or(cs) => simplify_nary(cs, false),
            Formula::Xor(a, b) => simplify_xor(a.simplify(), b.simplify()),
            Formula::Iff(a, b) => negate(simplify_xor(a.simplify(), b.simplify())),
            Formula::Implies(a, b) => {
                let a = a.simplify();
                let b = b.simplify();
                match (&a, &b) {
                    (Formula::False, _) | (_, Formula::True) => Formula::True,
                    (Formula::True, _) => b,
                    (_, Formula::False) => negate(a),
                    _ if a == b => Formula::True,
                    _ if is_complement(&a, &b) => b,
                    _ => Formula::implies(a, b),
                }
            }
        }
    }
}

/// Negation of an already simplified formula.
fn negate(f: Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(inner) => *inner,
        other => Formula::not(other),
    }
}

fn is_complement(a: &Formula, b: &Formula) -> bool {
    matches!(a, Formula::Not(x) if **x == *b) || matches!(b, Formula::Not(x) if **x == *a)
}

fn simplify_xor(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::False, x) | (x, Formula::False) => x,
        (Formula::True, x) | (x, Formula::True) => negate(x),
        (a, b) if a == b => Formula::False,
        (a, b) if is_complement(&a, &b) => Formula::True,
        (a, b) => Formula::xor(a, b),
    }
}

fn simplify_nary(children: &[Formula], conjunction: bool) -> Formula {
    let (unit, zero) = if conjunction {
        (Formula::True, Formula::False)
    } else {
        (Formula::False, Formula::True)
    };
    let mut flat = Vec::with_capacity(children.len());
    for c in children {
        let s = c.simplify();
        match s {
            s if s == unit => {}
            s if s == zero => return zero,
            Formula::And(inner) if conjunction => flat.extend(inner),
            Formula::Or(inner) if !conjunction => flat.extend(inner),
            s => flat.push(s),
        }
    }
    let mut seen: HashSet<&Formula> = HashSet::with_capacity(flat.len());
    let mut keep = vec![false; flat.len()];
    for (i, c) in flat.iter().enumerate() {
        let complement_seen = match c {
            Formula::Not(inner) => seen.contains(inner.as_ref()),
            other => seen.contains(&Formula::not(other.clone())),
        };
        if complement_seen {
            return zero;
        }
        keep[i] = seen.insert(c);
    }
    let out = flat
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c));
    if conjunction {
        Formula::and(out)
    } else {
        Formula::or(out)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Var(v) => write!(f, "{v}"),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::And(cs) => write_nary(f, cs, " & "),
            Formula::Or(cs) => write_nary(f, cs, " | "),
            Formula::Xor(a, b) => write!(f, "({a} ^ {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <-> {b})"),
        }
    }
}

fn write_nary(f: &mut fmt::Formatter<'_>, cs: &[Formula], op: &str) -> fmt::Result {
    f.write_str("(")?;
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(op)?;
        }
        write!(f, "{c}")?;
    }
    f.write_str(")")
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
