//! Free-group words over an indexed alphabet.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("generator index {index} out of range for alphabet of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("alphabet names must be pairwise distinct and non-empty (offending name {0:?})")]
    BadName(String),
    #[error("alphabet mismatch")]
    AlphabetMismatch,
}

/// A generator or its formal inverse, packed as `2 * index + (inverse as u32)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(u32);

impl Generator {
    pub fn new(index: usize, inverse: bool) -> Self {
        Generator(((index as u32) << 1) | inverse as u32)
    }

    pub fn pos(index: usize) -> Self {
        Self::new(index, false)
    }

    pub fn neg(index: usize) -> Self {
        Self::new(index, true)
    }

    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Generator(self.0 ^ 1)
    }

    /// Dense code in `0..2 * alphabet_size`.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Self {
        Generator(code as u32)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "g{}^-1", self.index())
        } else {
            write!(f, "g{}", self.index())
        }
    }
}

/// Freely reduced word. The empty word is the identity.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Generator>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Generator>>(raw: I) -> Self {
        let mut letters: Vec<Generator> = Vec::new();
        for g in raw {
            if letters.last() == Some(&g.inverse()) {
                letters.pop();
            } else {
                letters.push(g);
            }
        }
        Word { letters }
    }

    pub fn letter(g: Generator) -> Self {
        Word { letters: vec![g] }
    }

    /// Builds a word from signed 1-based indices: `3` is generator 2, `-3` its inverse.
    pub fn from_signed(raw: &[i32]) -> Self {
        Self::reduce(raw.iter().map(|&s| {
            assert!(s != 0, "signed generator code must be nonzero");
            Generator::new(s.unsigned_abs() as usize - 1, s < 0)
        }))
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let a = &self.letters;
        let b = &other.letters;
        let mut k = 0;
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k].inverse() {
            k += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * k);
        letters.extend_from_slice(&a[..a.len() - k]);
        letters.extend_from_slice(&b[k..]);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// `g · self · g⁻¹`
    pub fn conjugate(&self, g: &Word) -> Word {
        g.concat(self).concat(&g.inverse())
    }

    /// `a · b · a⁻¹ · b⁻¹`
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.letters.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `self = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        (
            Word {
                letters: self.letters[k..n - k].to_vec(),
            },
            Word {
                letters: self.letters[..k].to_vec(),
            },
        )
    }

    /// The cyclic conjugate starting at position `start`.
    pub fn rotate(&self, start: usize) -> Word {
        if self.letters.is_empty() {
            return Word::empty();
        }
        let s = start % self.letters.len();
        let mut letters = Vec::with_capacity(self.letters.len());
        letters.extend_from_slice(&self.letters[s..]);
        letters.extend_from_slice(&self.letters[..s]);
        Word { letters }
    }

    /// All `k` rotations, indexed by starting position. Entries repeat exactly
    /// when the word is a proper power.
    pub fn cyclic_conjugates(&self) -> Result<Vec<Word>, WordError> {
        if !self.is_cyclically_reduced() {
            return Err(WordError::NotCyclicallyReduced);
        }
        Ok((0..self.len()).map(|i| self.rotate(i)).collect())
    }

    /// Exponent sum of each generator (image in the abelianization).
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut sums = vec![0; rank];
        for g in &self.letters {
            sums[g.index()] += g.sign();
        }
        sums
    }

    /// Largest generator index used, plus one.
    pub fn support_rank(&self) -> usize {
        self.letters.iter().map(|g| g.index() + 1).max().unwrap_or(0)
    }

    pub(crate) fn from_reduced_unchecked(letters: Vec<Generator>) -> Word {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        Word { letters }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "ε");
        }
        for (i, g) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "{g:?}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scan {
    Linear,
    Cyclic,
}

/// Start positions of `pattern` inside `host`.
///
/// In cyclic mode the host is read periodically and positions are taken
/// modulo `|host|`; for patterns no longer than the host this is the usual
/// scan of `host · host` truncated to `2|host| − 1` letters.
pub fn occurrences(pattern: &Word, host: &Word, mode: Scan) -> Vec<usize> {
    let p = pattern.letters();
    let h = host.letters();
    if p.is_empty() || h.is_empty() {
        return Vec::new();
    }
    match mode {
        Scan::Linear => {
            if p.len() > h.len() {
                return Vec::new();
            }
            (0..=h.len() - p.len())
                .filter(|&s| &h[s..s + p.len()] == p)
                .collect()
        }
        Scan::Cyclic => {
            let n = h.len();
            (0..n)
                .filter(|&s| p.iter().enumerate().all(|(j, g)| h[(s + j) % n] == *g))
                .collect()
        }
    }
}

/// Printable generator names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, WordError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || names[..i].contains(n) {
                return Err(WordError::BadName(n.clone()));
            }
        }
        if names.is_empty() {
            return Err(WordError::BadName(String::new()));
        }
        Ok(Alphabet { names })
    }

    /// `x1, ..., xm`
    pub fn numbered(prefix: &str, m: usize) -> Self {
        Alphabet {
            names: (1..=m).map(|i| format!("{prefix}{i}")).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn gen(&self, name: &str) -> Option<Generator> {
        self.index_of(name).map(Generator::pos)
    }

    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        match w.letters().iter().find(|g| g.index() >= self.size()) {
            Some(g) => Err(WordError::IndexOutOfRange {
                index: g.index(),
                size: self.size(),
            }),
            None => Ok(()),
        }
    }

    /// Canonical rendering, inverses written `name^-1`.
    pub fn render(&self, w: &Word) -> String {
        w.letters()
            .iter()
            .map(|g| {
                if g.is_inverse() {
                    format!("{}^-1", self.names[g.index()])
                } else {
                    self.names[g.index()].clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Every freely reduced word of length exactly `len` over `rank` generators,
/// in lexicographic order of letter codes.
pub fn reduced_words_of_length(rank: usize, len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut cur: Vec<Generator> = Vec::with_capacity(len);
    fn rec(rank: usize, len: usize, cur: &mut Vec<Generator>, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(Word::from_reduced_unchecked(cur.clone()));
            return;
        }
        for code in 0..2 * rank {
            let g = Generator::from_code(code);
            if cur.last() == Some(&g.inverse()) {
                continue;
            }
            cur.push(g);
            rec(rank, len, cur, out);
            cur.pop();
        }
    }
    rec(rank, len, &mut cur, &mut out);
    out
}
