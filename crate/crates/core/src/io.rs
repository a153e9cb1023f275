//! Text format for presentations.
//!
//! ```text
//! # genus two surface
//! a1 b1 a2 b2
//! a1 b1 A1 B1 a2 b2 a2^-1 b2^-1
//! ```
//!
//! The first non-comment line lists the generator names; every further
//! non-comment line is one relator. A token is a generator name, optionally
//! followed by `^k`; a name whose first letter is upper case denotes the
//! inverse of the lower-case generator unless it is itself a generator name.
//! `#` starts a comment. The printer writes inverses as `^-1`.

use thiserror::Error;

use crate::chabauty::{BasicOpenSet, ChabautyError};
use crate::smallcancel::{RelatorFamily, SmallCancelError};
use crate::words::{Alphabet, Generator, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("no generator line")]
    NoGenerators,
    #[error("{line}:{col}: invalid generator name {name:?}")]
    BadGeneratorName { line: usize, col: usize, name: String },
    #[error("{line}:{col}: duplicate generator {name:?}")]
    DuplicateGenerator { line: usize, col: usize, name: String },
    #[error("{line}:{col}: unknown generator {name:?}")]
    UnknownGenerator { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}: relator reduces to the empty word")]
    EmptyRelator { line: usize },
    #[error("{line}: {source}")]
    OpenSet { line: usize, source: ChabautyError },
    #[error("relator on line {line}: {source}")]
    Family { line: usize, source: SmallCancelError },
}

/// Generators plus cyclically reduced relators, in file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
    /// Source line of each relator, for diagnostics.
    pub lines: Vec<usize>,
}

impl Presentation {
    /// Validates the relators as a [`RelatorFamily`].
    pub fn into_family(self) -> Result<RelatorFamily, ParseError> {
        let lines = self.lines.clone();
        RelatorFamily::new(self.alphabet, self.relators).map_err(|e| {
            let idx = match &e {
                SmallCancelError::EmptyRelator(i)
                | SmallCancelError::NotCyclicallyReduced(i)
                | SmallCancelError::ProperPower(i) => *i,
                _ => 0,
            };
            ParseError::Family { line: lines.get(idx).copied().unwrap_or(0), source: e }
        })
    }
}

/// Meaningful lines as (1-based line number, column offset of the first
/// character, text without the comment).
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        (!body.trim().is_empty()).then_some((i + 1, body))
    })
}

/// Tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(move |(s, t)| (line[..s].chars().count() + 1, t))
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_alphanumeric() || c == '_')
}

fn parse_alphabet(line: usize, body: &str) -> Result<Alphabet, ParseError> {
    let mut names: Vec<String> = Vec::new();
    for (col, name) in tokens(body) {
        if !valid_name(name) {
            return Err(ParseError::BadGeneratorName { line, col, name: name.into() });
        }
        if names.iter().any(|n| n == name) {
            return Err(ParseError::DuplicateGenerator { line, col, name: name.into() });
        }
        names.push(name.into());
    }
    Alphabet::new(names).map_err(|_| ParseError::NoGenerators)
}

fn lookup(alphabet: &Alphabet, name: &str) -> Option<Generator> {
    if let Some(g) = alphabet.gen(name) {
        return Some(g);
    }
    let mut chars = name.chars();
    let first = chars.next()?;
    if !first.is_uppercase() {
        return None;
    }
    let lowered: String = first.to_lowercase().chain(chars).collect();
    alphabet.gen(&lowered).map(Generator::inverse)
}

/// Parses one word (whitespace-separated tokens); `line` is used in
/// diagnostics. The result is freely reduced.
pub fn parse_word_at(alphabet: &Alphabet, text: &str, line: usize) -> Result<Word, ParseError> {
    let mut letters = Vec::new();
    for (col, tok) in tokens(text) {
        let (name, exp) = match tok.split_once('^') {
            None => (tok, 1i64),
            Some((name, e)) => {
                let exp = e.parse::<i64>().map_err(|_| ParseError::Syntax {
                    line,
                    col: col + name.chars().count() + 1,
                    message: format!("bad exponent {e:?}"),
                })?;
                (name, exp)
            }
        };
        if name.is_empty() {
            return Err(ParseError::Syntax { line, col, message: "missing generator before '^'".into() });
        }
        let g = lookup(alphabet, name).ok_or_else(|| ParseError::UnknownGenerator { line, col, name: name.into() })?;
        let g = if exp < 0 { g.inverse() } else { g };
        letters.extend(std::iter::repeat_n(g, exp.unsigned_abs() as usize));
    }
    Ok(Word::reduce(letters))
}

pub fn parse_word(alphabet: &Alphabet, text: &str) -> Result<Word, ParseError> {
    parse_word_at(alphabet, text, 1)
}

pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut lines = content_lines(text);
    let (first, body) = lines.next().ok_or(ParseError::NoGenerators)?;
    let alphabet = parse_alphabet(first, body)?;
    let mut relators = Vec::new();
    let mut at = Vec::new();
    for (line, body) in lines {
        let (core, _) = parse_word_at(&alphabet, body, line)?.cyclic_reduce();
        if core.is_empty() {
            return Err(ParseError::EmptyRelator { line });
        }
        relators.push(core);
        at.push(line);
    }
    Ok(Presentation { alphabet, relators, lines: at })
}

/// Canonical text: generator line, then one relator per line.
pub fn print_presentation(p: &Presentation) -> String {
    let mut out = p.alphabet.names().join(" ");
    out.push('\n');
    for r in &p.relators {
        out.push_str(&p.alphabet.render(r));
        out.push('\n');
    }
    out
}

/// Open-set file: the generator line, then lines `+ WORD` (must be trivial)
/// and `- WORD` (must be nontrivial).
pub fn parse_open_set(text: &str) -> Result<BasicOpenSet, ParseError> {
    let mut lines = content_lines(text);
    let (first, body) = lines.next().ok_or(ParseError::NoGenerators)?;
    let alphabet = parse_alphabet(first, body)?;
    let mut contain = Vec::new();
    let mut avoid = Vec::new();
    let mut last_line = first;
    for (line, body) in lines {
        last_line = line;
        let trimmed = body.trim_start();
        let col = body.len() - trimmed.len() + 1;
        let (sign, rest) = trimmed.split_at(trimmed.chars().next().map_or(0, char::len_utf8));
        let w = parse_word_at(&alphabet, rest, line)?;
        match sign {
            "+" => contain.push(w),
            "-" => avoid.push(w),
            _ => return Err(ParseError::Syntax { line, col, message: "expected '+' or '-'".into() }),
        }
    }
    BasicOpenSet::new(alphabet, contain, avoid).map_err(|source| ParseError::OpenSet { line: last_line, source })
}

pub fn print_open_set(o: &BasicOpenSet) -> String {
    let a = o.alphabet();
    let mut out = a.names().join(" ");
    out.push('\n');
    for w in o.must_contain() {
        out.push_str(&format!("+ {}\n", a.render(w)));
    }
    for w in o.must_avoid() {
        out.push_str(&format!("- {}\n", a.render(w)));
    }
    out
}
