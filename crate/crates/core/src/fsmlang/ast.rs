use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{ParseError, ParseErrorKind};

/// Parsed model file, before compilation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsmAst {
    pub size: usize,
    /// `(name, bits)` in declaration order.
    pub state_defs: Vec<(String, String)>,
    pub inits: Vec<String>,
    /// `(from, to)` in file order, duplicates preserved.
    pub nexts: Vec<(String, String)>,
    pub prop: Option<String>,
}

/// Parses the model-file format.
///
/// ```text
/// SIZE : 2
/// s0 : 00
/// s1 : 01
/// INIT(s0)
/// NEXT(s0) := s1
/// NEXT(s1) := s0
/// PROP : !s1     # optional
/// ```
///
/// `#` starts a comment; blank lines are ignored; line endings may be `\n`
/// or `\r\n`.
pub fn parse(text: &str) -> Result<FsmAst, ParseError> {
    let mut size: Option<(usize, usize)> = None;
    let mut state_defs: Vec<(String, String)> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    let mut by_bits: HashMap<String, usize> = HashMap::new();
    let mut inits = Vec::new();
    let mut nexts = Vec::new();
    let mut prop = None;
    // first line referencing each state name, checked once all lines are read
    let mut references: Vec<(String, usize, usize)> = Vec::new();

    for (row, raw) in text.lines().enumerate() {
        let line = row + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor::new(content, line);
        cur.skip_ws();
        if cur.at_end() {
            continue;
        }
        let (word_col, word) = cur.ident()?;
        match word.as_str() {
            "SIZE" => {
                cur.expect(':')?;
                let (col, n) = cur.number()?;
                cur.finish()?;
                if size.is_some() {
                    return Err(ParseError::syntax(line, word_col, "duplicate SIZE line"));
                }
                if n == 0 {
                    return Err(ParseError::syntax(line, col, "SIZE must be positive"));
                }
                if n > 30 {
                    return Err(ParseError::syntax(
                        line,
                        col,
                        "SIZE above 30 is not supported",
                    ));
                }
                size = Some((n, line));
            }
            "INIT" => {
                cur.expect('(')?;
                let (col, name) = cur.ident()?;
                cur.expect(')')?;
                cur.finish()?;
                references.push((name.clone(), line, col));
                inits.push(name);
            }
            "NEXT" => {
                cur.expect('(')?;
                let (from_col, from) = cur.ident()?;
                cur.expect(')')?;
                cur.expect_str(":=")?;
                let (to_col, to) = cur.ident()?;
                cur.finish()?;
                references.push((from.clone(), line, from_col));
                references.push((to.clone(), line, to_col));
                nexts.push((from, to));
            }
            "PROP" => {
                cur.expect(':')?;
                cur.skip_ws();
                let expr = cur.rest().trim_end().to_string();
                if expr.is_empty() {
                    return Err(ParseError::syntax(line, cur.col(), "empty PROP expression"));
                }
                if prop.is_some() {
                    return Err(ParseError::syntax(line, word_col, "duplicate PROP line"));
                }
                prop = Some(expr);
            }
            _ => {
                cur.expect(':')?;
                cur.skip_ws();
                let bits_col = cur.col();
                let bits = cur.take_while(|c| !c.is_whitespace()).to_string();
                cur.finish()?;
                let Some((n, _)) = size else {
                    return Err(ParseError::syntax(
                        line,
                        word_col,
                        "state declared before the SIZE line",
                    ));
                };
                if bits.is_empty() || bits.chars().any(|c| c != '0' && c != '1') {
                    return Err(ParseError::syntax(
                        line,
                        bits_col,
                        format!("expected a bit-string, found {bits:?}"),
                    ));
                }
                if bits.len() != n {
                    return Err(ParseError::new(
                        line,
                        bits_col,
                        ParseErrorKind::WidthMismatch {
                            expected: n,
                            found: bits.len(),
                        },
                    ));
                }
                if by_name.contains_key(&word) {
                    return Err(ParseError::new(
                        line,
                        word_col,
                        ParseErrorKind::DuplicateName(word),
                    ));
                }
                if let Some(&other) = by_bits.get(&bits) {
                    return Err(ParseError::new(
                        line,
                        bits_col,
                        ParseErrorKind::DuplicateEncoding {
                            bits,
                            other: state_defs[other].0.clone(),
                        },
                    ));
                }
                by_name.insert(word.clone(), state_defs.len());
                by_bits.insert(bits.clone(), state_defs.len());
                state_defs.push((word, bits));
            }
        }
    }

    let Some((size, _)) = size else {
        return Err(ParseError::new(1, 1, ParseErrorKind::MissingSize));
    };
    for (name, line, col) in references {
        if !by_name.contains_key(&name) {
            return Err(ParseError::new(
                line,
                col,
                ParseErrorKind::UndeclaredState(name),
            ));
        }
    }
    if inits.is_empty() {
        let last = text.lines().count().max(1);
        return Err(ParseError::new(last, 1, ParseErrorKind::MissingInit));
    }
    Ok(FsmAst {
        size,
        state_defs,
        inits,
        nexts,
        prop,
    })
}

impl FsmAst {
    /// Declared states with no outgoing `NEXT` line.
    pub fn deadlocks(&self) -> Vec<String> {
        self.state_defs
            .iter()
            .filter(|(name, _)| !self.nexts.iter().any(|(from, _)| from == name))
            .map(|(name, _)| name.clone())
            .collect()
    }

    pub fn bits_of(&self, name: &str) -> Option<&str> {
        self.state_defs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_str())
    }

    /// Successor names of each source state, in file order.
    pub fn successors(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (from, to) in &self.nexts {
            out.entry(from.as_str()).or_default().push(to.as_str());
        }
        out
    }
}

/// Canonical rendering; `parse` of the output reproduces the AST.
impl fmt::Display for FsmAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SIZE : {}", self.size)?;
        for (name, bits) in &self.state_defs {
            writeln!(f, "{name} : {bits}")?;
        }
        writeln!(f)?;
        for init in &self.inits {
            writeln!(f, "INIT({init})")?;
        }
        for (from, to) in &self.nexts {
            writeln!(f, "NEXT({from}) := {to}")?;
        }
        if let Some(prop) = &self.prop {
            writeln!(f, "PROP : {prop}")?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { text, pos: 0, line }
    }

    fn col(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.rest().trim().is_empty()
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let rest = self.rest();
        let len = rest.find(|c| !pred(c)).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.line, self.col(), msg)
    }

    fn found(&self) -> String {
        match self.rest().chars().next() {
            Some(c) => format!("`{c}`"),
            None => "end of line".to_string(),
        }
    }

    fn ident(&mut self) -> Result<(usize, String), ParseError> {
        self.skip_ws();
        let col = self.col();
        let first_ok = self
            .rest()
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        if !first_ok {
            return Err(self.error(format!("expected an identifier, found {}", self.found())));
        }
        let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        Ok((col, word.to_string()))
    }

    fn number(&mut self) -> Result<(usize, usize), ParseError> {
        self.skip_ws();
        let col = self.col();
        let digits = self.take_while(|c| c.is_ascii_digit());
        digits
            .parse()
            .map(|n| (col, n))
            .map_err(|_| ParseError::syntax(self.line, col, "expected a number"))
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`, found {}", self.found())))
        }
    }

    fn expect_str(&mut self, s: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {}", self.found())))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing input {}", self.found())))
        }
    }
}
