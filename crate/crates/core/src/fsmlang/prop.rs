//! Property expressions.
//!
//! Precedence from tightest to loosest: `!`, `&`, `^`, `|`, `->`, `<->`.
//! `->` associates to the right, everything else to the left. Atoms are
//! `true`, `false`, and identifiers resolved by the caller.

use thiserror::Error;

use super::{encode_state, SymbolicFsm};
use crate::formula::{Formula, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {kind}")]
pub struct PropertyError {
    pub column: usize,
    pub kind: PropertyErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropertyErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("bit x{index} is out of range for a {width}-bit model")]
    IndexOutOfRange { index: usize, width: usize },
}

/// A safety property: the formula must hold in every reachable state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySpec {
    pub source: String,
    pub formula: Formula,
}

/// Parses a property over the current-state bits `x0..x{n-1}` and the
/// model's state names. `x<i>` always denotes a bit, even if a state of
/// that name exists.
pub fn parse_property(text: &str, fsm: &SymbolicFsm) -> Result<PropertySpec, PropertyError> {
    let formula = parse_expr(text, |name| {
        if let Some(index) = bit_index(name) {
            return if index < fsm.width() {
                Ok(Formula::var(fsm.x()[index].clone()))
            } else {
                Err(PropertyErrorKind::IndexOutOfRange {
                    index,
                    width: fsm.width(),
                })
            };
        }
        match fsm.state_index(name) {
            Some(i) => Ok(encode_state(&fsm.states()[i].bits, fsm.x())),
            None => Err(PropertyErrorKind::UnknownAtom(name.to_string())),
        }
    })?;
    Ok(PropertySpec {
        source: text.to_string(),
        formula,
    })
}

fn bit_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses an expression, mapping identifiers through `resolve`.
pub fn parse_expr(
    text: &str,
    resolve: impl Fn(&str) -> Result<Formula, PropertyErrorKind>,
) -> Result<Formula, PropertyError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.chars().count() + 1,
        resolve: &resolve,
    };
    let f = p.iff()?;
    match p.peek() {
        None => Ok(f),
        Some((col, tok)) => Err(syntax(*col, format!("unexpected {}", tok.describe()))),
    }
}

/// Convenience resolver treating every identifier as a plain variable.
pub fn plain_var(name: &str) -> Result<Formula, PropertyErrorKind> {
    VarId::new(name)
        .map(Formula::var)
        .map_err(|_| PropertyErrorKind::UnknownAtom(name.to_string()))
}

fn syntax(column: usize, msg: impl Into<String>) -> PropertyError {
    PropertyError {
        column,
        kind: PropertyErrorKind::Syntax(msg.into()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Xor => "`^`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PropertyError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        let rest = &chars[i..];
        let (tok, len) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '!' => (Tok::Not, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '^' => (Tok::Xor, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '-' if rest.starts_with(&['-', '>']) => (Tok::Implies, 2),
            '<' if rest.starts_with(&['<', '-', '>']) => (Tok::Iff, 3),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = rest
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                    .count();
                (Tok::Ident(rest[..len].iter().collect()), len)
            }
            other => return Err(syntax(col, format!("unexpected character `{other}`"))),
        };
        out.push((col, tok));
        i += len;
    }
    Ok(out)
}

struct Parser<'r, R> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    resolve: &'r R,
}

impl<R: Fn(&str) -> Result<Formula, PropertyErrorKind>> Parser<'_, R> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().is_some_and(|(_, t)| t == tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula, PropertyError> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, PropertyError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, PropertyError> {
        let mut items = vec![self.xor()?];
        while self.eat(&Tok::Or) {
            items.push(self.xor()?);
        }
        Ok(Formula::or(items))
    }

    fn xor(&mut self) -> Result<Formula, PropertyError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Xor) {
            let rhs = self.and()?;
            lhs = Formula::xor(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, PropertyError> {
        let mut items = vec![self.unary()?];
        while self.eat(&Tok::And) {
            items.push(self.unary()?);
        }
        Ok(Formula::and(items))
    }

    fn unary(&mut self) -> Result<Formula, PropertyError> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, PropertyError> {
        let Some((col, tok)) = self.tokens.get(self.pos).cloned() else {
            return Err(syntax(self.end, "unexpected end of expression"));
        };
        self.pos += 1;
        match tok {
            Tok::LParen => {
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    let col = self.peek().map_or(self.end, |(c, _)| *c);
                    return Err(syntax(col, "expected `)`"));
                }
                Ok(inner)
            }
            Tok::Ident(name) if name == "true" => Ok(Formula::True),
            Tok::Ident(name) if name == "false" => Ok(Formula::False),
            Tok::Ident(name) => {
                (self.resolve)(&name).map_err(|kind| PropertyError { column: col, kind })
            }
            other => Err(syntax(col, format!("unexpected {}", other.describe()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::tests::arb_formula;
    use crate::fsmlang::tests::LADDER_MODEL;
    use crate::fsmlang::{compile, parse, CompileOptions};
    use proptest::prelude::*;

    fn v(name: &str) -> Formula {
        Formula::named(name)
    }

    fn model() -> SymbolicFsm {
        compile(&parse(LADDER_MODEL).unwrap(), CompileOptions::default()).unwrap()
    }

    fn prop(text: &str) -> Result<Formula, PropertyError> {
        parse_property(text, &model()).map(|p| p.formula)
    }

    #[test]
    fn property_examples() {
        assert_eq!(
            prop("x1 & x0").unwrap(),
            Formula::And(vec![v("x1"), v("x0")])
        );
        assert_eq!(
            prop("!(x1 ^ x0)").unwrap(),
            Formula::not(Formula::xor(v("x1"), v("x0")))
        );
        assert_eq!(
            prop("!s3").unwrap(),
            Formula::not(Formula::And(vec![v("x1"), v("x0")]))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            prop("!x0 & x1 ^ x0 | x1").unwrap(),
            Formula::Or(vec![
                Formula::xor(Formula::And(vec![Formula::not(v("x0")), v("x1")]), v("x0")),
                v("x1"),
            ])
        );
        assert_eq!(
            prop("x0 -> x1 -> x0").unwrap(),
            Formula::implies(v("x0"), Formula::implies(v("x1"), v("x0")))
        );
        assert_eq!(
            prop("x0 <-> x1 -> x0").unwrap(),
            Formula::iff(v("x0"), Formula::implies(v("x1"), v("x0")))
        );
        assert_eq!(
            prop("x1 & x0 & true").unwrap(),
            Formula::And(vec![v("x1"), v("x0"), Formula::True])
        );
    }

    #[test]
    fn property_errors() {
        assert_eq!(
            prop("x1 & s9").unwrap_err(),
            PropertyError {
                column: 6,
                kind: PropertyErrorKind::UnknownAtom("s9".into())
            }
        );
        assert_eq!(
            prop("x2").unwrap_err().kind,
            PropertyErrorKind::IndexOutOfRange { index: 2, width: 2 }
        );
        assert!(matches!(
            prop("x1 &").unwrap_err().kind,
            PropertyErrorKind::Syntax(_)
        ));
        assert!(matches!(
            prop("(x1").unwrap_err().kind,
            PropertyErrorKind::Syntax(_)
        ));
        assert!(matches!(
            prop("x1 x0").unwrap_err().kind,
            PropertyErrorKind::Syntax(_)
        ));
        assert_eq!(prop("x1 $ x0").unwrap_err().column, 4);
        assert!(matches!(
            prop("").unwrap_err().kind,
            PropertyErrorKind::Syntax(_)
        ));
    }

    proptest! {
        #[test]
        fn rendered_formulas_parse_back(f in arb_formula(5)) {
            prop_assert_eq!(parse_expr(&f.to_string(), plain_var).unwrap(), f);
        }
    }
}
