//! C'(1/6) small cancellation: piece scanning, Dehn's algorithm, and the
//! independence and continuity certificates that follow from Greendlinger's
//! lemma.
//!
//! Pieces are occurrence-based: a location is a (relator, orientation, cyclic
//! start) triple, and a word is a piece wherever it reads off a cyclic
//! conjugate of a relator or of its inverse. A word of length `ℓ` is 1/6-large
//! for a relator of length `k` when `6ℓ ≥ k`, and essential when `2ℓ > k`.

use std::collections::{BTreeSet, HashMap};
use std::hash::{BuildHasherDefault, Hasher};

use thiserror::Error;

use crate::exec::Exec;
use crate::words::{Alphabet, Generator, Word, WordError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SmallCancelError {
    #[error("relator {0} is empty")]
    EmptyRelator(usize),
    #[error("relator {0} is not cyclically reduced")]
    NotCyclicallyReduced(usize),
    #[error("relator {0} is a proper power")]
    ProperPower(usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("family is not C'(1/6): {0}")]
    NotC16(Box<PieceReport>),
    #[error("word lies in the normal closure of the chosen subfamily")]
    InNormalClosure,
    #[error("index {0} out of range")]
    BadIndex(usize),
}

/// Finite relator family; every member is nonempty, cyclically reduced and
/// not a proper power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelatorFamily {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl RelatorFamily {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, SmallCancelError> {
        for (i, r) in relators.iter().enumerate() {
            alphabet.check(r)?;
            if r.is_empty() {
                return Err(SmallCancelError::EmptyRelator(i));
            }
            if !r.is_cyclically_reduced() {
                return Err(SmallCancelError::NotCyclicallyReduced(i));
            }
            let mut rots = r.cyclic_conjugates()?;
            rots.extend(r.inverse().cyclic_conjugates()?);
            let total = rots.len();
            rots.sort();
            rots.dedup();
            if rots.len() != total {
                return Err(SmallCancelError::ProperPower(i));
            }
        }
        Ok(RelatorFamily { alphabet, relators })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn len(&self) -> usize {
        self.relators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relators.is_empty()
    }

    /// Members with the given indices, in increasing index order.
    pub fn subfamily(&self, keep: &BTreeSet<usize>) -> RelatorFamily {
        RelatorFamily {
            alphabet: self.alphabet.clone(),
            relators: keep
                .iter()
                .filter_map(|&i| self.relators.get(i).cloned())
                .collect(),
        }
    }

    pub fn without(&self, drop: usize) -> RelatorFamily {
        let keep = (0..self.len()).filter(|&i| i != drop).collect();
        self.subfamily(&keep)
    }
}

/// A position in the cyclic word `relators[relator]^(±1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location {
    pub relator: usize,
    pub inverse: bool,
    pub start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceReport {
    pub witness: Word,
    pub relator_index: usize,
    pub position: usize,
    pub inverse: bool,
    pub second_occurrence: Location,
    /// `|witness| / |relator|` as an exact fraction.
    pub ratio: (usize, usize),
}

impl PieceReport {
    pub fn first_occurrence(&self) -> Location {
        Location {
            relator: self.relator_index,
            inverse: self.inverse,
            start: self.position,
        }
    }
}

impl std::fmt::Display for PieceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "piece {:?} of length {}/{} at relator {} ({}) position {} recurs at relator {} ({}) position {}",
            self.witness,
            self.ratio.0,
            self.ratio.1,
            self.relator_index,
            if self.inverse { "inverse" } else { "direct" },
            self.position,
            self.second_occurrence.relator,
            if self.second_occurrence.inverse { "inverse" } else { "direct" },
            self.second_occurrence.start
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum C16Verdict {
    Ok,
    Violation(Box<PieceReport>),
}

impl C16Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, C16Verdict::Ok)
    }
}

// ---------------------------------------------------------------------------
// Cyclic window hashing

const HASH_BASE: u64 = 0x100_0000_01b3;

#[derive(Default)]
struct PassHasher(u64);

impl Hasher for PassHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, _: &[u8]) {
        unreachable!("only u64 keys are hashed")
    }
    fn write_u64(&mut self, v: u64) {
        self.0 = v.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

type HashIndex = HashMap<u64, Vec<Location>, BuildHasherDefault<PassHasher>>;

#[inline]
fn letter_key(g: Generator) -> u64 {
    g.code() as u64 + 1
}

/// Hashes of all cyclic windows of length `t` (`t ≤ letters.len()`), by start.
fn cyclic_window_hashes(letters: &[Generator], t: usize, out: &mut Vec<u64>) {
    out.clear();
    let n = letters.len();
    debug_assert!(t >= 1 && t <= n);
    let top = HASH_BASE.wrapping_pow(t as u32 - 1);
    let mut h = 0u64;
    for g in &letters[..t] {
        h = h.wrapping_mul(HASH_BASE).wrapping_add(letter_key(*g));
    }
    for s in 0..n {
        out.push(h);
        let leaving = letter_key(letters[s]);
        let entering = letter_key(letters[(s + t) % n]);
        h = h
            .wrapping_sub(leaving.wrapping_mul(top))
            .wrapping_mul(HASH_BASE)
            .wrapping_add(entering);
    }
}

#[inline]
fn cyclic_eq(a: &[Generator], sa: usize, b: &[Generator], sb: usize, len: usize) -> bool {
    let (na, nb) = (a.len(), b.len());
    (0..len).all(|j| a[(sa + j) % na] == b[(sb + j) % nb])
}

fn cyclic_slice(a: &[Generator], start: usize, len: usize) -> Word {
    let n = a.len();
    Word::reduce((0..len).map(|j| a[(start + j) % n]))
}

/// Relators in both orientations, as raw letter arrays.
struct Oriented {
    texts: Vec<[Vec<Generator>; 2]>,
}

impl Oriented {
    fn new(relators: &[Word]) -> Self {
        Oriented {
            texts: relators
                .iter()
                .map(|r| [r.letters().to_vec(), r.inverse().letters().to_vec()])
                .collect(),
        }
    }

    fn text(&self, loc: Location) -> &[Generator] {
        &self.texts[loc.relator][loc.inverse as usize]
    }

    /// Index of every cyclic window of length `t` over relators accepted by `filter`.
    fn index(&self, t: usize, filter: impl Fn(usize) -> bool) -> HashIndex {
        let mut map = HashIndex::default();
        let mut hashes = Vec::new();
        for (j, pair) in self.texts.iter().enumerate() {
            if !filter(j) || pair[0].len() < t {
                continue;
            }
            for (o, text) in pair.iter().enumerate() {
                cyclic_window_hashes(text, t, &mut hashes);
                for (s, &h) in hashes.iter().enumerate() {
                    map.entry(h).or_default().push(Location {
                        relator: j,
                        inverse: o == 1,
                        start: s,
                    });
                }
            }
        }
        map
    }
}

fn large_threshold(k: usize) -> usize {
    k.div_ceil(6)
}

fn essential_threshold(k: usize) -> usize {
    k / 2 + 1
}

/// Decides the C'(1/6) condition. A 1/6-large piece that recurs anywhere has
/// a prefix of exactly the threshold length that recurs at the matching
/// location, so only threshold-length windows need to be compared.
pub fn check_c16(family: &RelatorFamily) -> C16Verdict {
    let oriented = Oriented::new(family.relators());
    let thresholds: BTreeSet<usize> = family
        .relators()
        .iter()
        .map(|r| large_threshold(r.len()))
        .collect();
    let mut hashes = Vec::new();
    let mut best: Option<PieceReport> = None;
    for t in thresholds {
        let index = oriented.index(t, |_| true);
        for (i, r) in family.relators().iter().enumerate() {
            if large_threshold(r.len()) != t {
                continue;
            }
            if best.as_ref().is_some_and(|b| b.relator_index < i) {
                break;
            }
            'scan: for o in 0..2 {
                let text = &oriented.texts[i][o];
                cyclic_window_hashes(text, t, &mut hashes);
                for (s, h) in hashes.iter().enumerate() {
                    let here = Location {
                        relator: i,
                        inverse: o == 1,
                        start: s,
                    };
                    let Some(cands) = index.get(h) else { continue };
                    for &other in cands {
                        if other == here || !cyclic_eq(text, s, oriented.text(other), other.start, t) {
                            continue;
                        }
                        let report = PieceReport {
                            witness: cyclic_slice(text, s, t),
                            relator_index: i,
                            position: s,
                            inverse: o == 1,
                            second_occurrence: other,
                            ratio: (t, r.len()),
                        };
                        if best.as_ref().is_none_or(|b| b.relator_index > i) {
                            best = Some(report);
                        }
                        break 'scan;
                    }
                }
            }
        }
    }
    match best {
        Some(r) => C16Verdict::Violation(Box::new(r)),
        None => C16Verdict::Ok,
    }
}

/// Every location where `w` occurs as a piece of the family.
pub fn piece_locations(w: &Word, family: &RelatorFamily) -> Vec<Location> {
    let mut out = Vec::new();
    if w.is_empty() {
        return out;
    }
    for (j, r) in family.relators().iter().enumerate() {
        if w.len() > r.len() {
            continue;
        }
        for (o, text) in [r.clone(), r.inverse()].iter().enumerate() {
            for s in crate::words::occurrences(w, text, crate::words::Scan::Cyclic) {
                out.push(Location {
                    relator: j,
                    inverse: o == 1,
                    start: s,
                });
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Dehn's algorithm

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DehnStep {
    pub input: Word,
    pub piece: Word,
    pub relator: usize,
    pub output: Word,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DehnTrace {
    pub steps: Vec<DehnStep>,
}

struct Hit {
    relator: usize,
    pos: usize,
    len: usize,
    loc: Location,
}

/// Dehn reducer for a certified C'(1/6) family.
pub struct DehnEngine {
    oriented: Oriented,
    lengths: Vec<usize>,
    /// Essential threshold and the window index of the relators sharing it.
    tiers: Vec<(usize, HashIndex)>,
}

impl DehnEngine {
    pub fn new(family: &RelatorFamily) -> Result<Self, SmallCancelError> {
        match check_c16(family) {
            C16Verdict::Ok => Ok(Self::from_certified(family)),
            C16Verdict::Violation(r) => Err(SmallCancelError::NotC16(r)),
        }
    }

    /// Skips the C'(1/6) check; callers guarantee `family` passed it (for
    /// instance as a subfamily of a certified family).
    pub fn from_certified(family: &RelatorFamily) -> Self {
        let oriented = Oriented::new(family.relators());
        let lengths: Vec<usize> = family.relators().iter().map(Word::len).collect();
        let thresholds: BTreeSet<usize> = lengths.iter().map(|&k| essential_threshold(k)).collect();
        let tiers = thresholds
            .into_iter()
            .map(|t| {
                let index = oriented.index(t, |j| essential_threshold(lengths[j]) == t);
                (t, index)
            })
            .collect();
        DehnEngine {
            oriented,
            lengths,
            tiers,
        }
    }

    /// Essential piece with the lowest (relator, cyclic position), if any.
    fn find_hit(&self, x: &[Generator], hashes: &mut Vec<u64>) -> Option<Hit> {
        let n = x.len();
        let mut best: Option<Hit> = None;
        for (t, index) in &self.tiers {
            if *t > n {
                break;
            }
            cyclic_window_hashes(x, *t, hashes);
            for (pos, h) in hashes.iter().enumerate() {
                let Some(cands) = index.get(h) else { continue };
                for &loc in cands {
                    if best
                        .as_ref()
                        .is_some_and(|b| (b.relator, b.pos) <= (loc.relator, pos))
                    {
                        continue;
                    }
                    let text = self.oriented.text(loc);
                    if !cyclic_eq(x, pos, text, loc.start, *t) {
                        continue;
                    }
                    let k = self.lengths[loc.relator];
                    let mut len = *t;
                    while len < n.min(k) && x[(pos + len) % n] == text[(loc.start + len) % k] {
                        len += 1;
                    }
                    best = Some(Hit {
                        relator: loc.relator,
                        pos,
                        len,
                        loc,
                    });
                }
            }
        }
        best
    }

    fn substitute(&self, x: &[Generator], hit: &Hit) -> Vec<Generator> {
        let n = x.len();
        let text = self.oriented.text(hit.loc);
        let k = text.len();
        let complement_inv = (hit.len..k).rev().map(|j| text[(hit.loc.start + j) % k].inverse());
        let rest = (hit.len..n).map(|j| x[(hit.pos + j) % n]);
        let w = Word::reduce(complement_inv.chain(rest));
        w.cyclic_reduce().0.letters().to_vec()
    }

    /// Runs Dehn's algorithm on the cyclic reduction of `w`. The result is
    /// cyclically reduced and has no essential piece on any cyclic conjugate.
    pub fn reduce(&self, w: &Word) -> (Word, DehnTrace) {
        let mut cur = w.cyclic_reduce().0;
        let mut trace = DehnTrace::default();
        let mut hashes = Vec::new();
        while let Some(hit) = self.find_hit(cur.letters(), &mut hashes) {
            let next = Word::from_reduced_unchecked(self.substitute(cur.letters(), &hit));
            let piece = cyclic_slice(cur.letters(), hit.pos, hit.len);
            trace.steps.push(DehnStep {
                input: cur,
                piece,
                relator: hit.relator,
                output: next.clone(),
            });
            cur = next;
        }
        (cur, trace)
    }

    /// Dehn result length and number of substitutions, without recording a trace.
    pub fn reduce_count(&self, w: &[Generator]) -> (usize, usize) {
        let mut cur = Word::reduce(w.iter().copied()).cyclic_reduce().0.letters().to_vec();
        let mut hashes = Vec::new();
        let mut steps = 0;
        while let Some(hit) = self.find_hit(&cur, &mut hashes) {
            cur = self.substitute(&cur, &hit);
            steps += 1;
        }
        (cur.len(), steps)
    }

    pub fn in_normal_closure(&self, w: &Word) -> bool {
        self.reduce_count(w.letters()).0 == 0
    }

    /// Indices `j` whose relator carries an essential piece that is also a
    /// piece of (the cyclic reduction of) `w`.
    pub fn essential_overlaps(&self, w: &Word) -> BTreeSet<usize> {
        let core = w.cyclic_reduce().0;
        let x = core.letters();
        let mut out = BTreeSet::new();
        let mut hashes = Vec::new();
        for (t, index) in &self.tiers {
            if *t > x.len() {
                break;
            }
            cyclic_window_hashes(x, *t, &mut hashes);
            for (pos, h) in hashes.iter().enumerate() {
                let Some(cands) = index.get(h) else { continue };
                for &loc in cands {
                    if cyclic_eq(x, pos, self.oriented.text(loc), loc.start, *t) {
                        out.insert(loc.relator);
                    }
                }
            }
        }
        out
    }
}

pub fn dehn_reduce(w: &Word, family: &RelatorFamily) -> Result<(Word, DehnTrace), SmallCancelError> {
    Ok(DehnEngine::new(family)?.reduce(w))
}

pub fn in_normal_closure(w: &Word, family: &RelatorFamily) -> Result<bool, SmallCancelError> {
    Ok(DehnEngine::new(family)?.in_normal_closure(w))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Independence {
    Ok,
    Dependent(usize),
}

/// Checks `u_i ∉ ⟨⟨u_j : j ≠ i⟩⟩` for every member.
pub fn independence_check(family: &RelatorFamily, exec: Exec) -> Result<Independence, SmallCancelError> {
    if let C16Verdict::Violation(r) = check_c16(family) {
        return Err(SmallCancelError::NotC16(r));
    }
    let indices: Vec<usize> = (0..family.len()).collect();
    let dependent = exec.find_first(&indices, |&i| {
        let rest = DehnEngine::from_certified(&family.without(i));
        rest.in_normal_closure(&family.relators()[i]).then_some(())
    });
    Ok(match dependent {
        Some((i, ())) => Independence::Dependent(i),
        None => Independence::Ok,
    })
}

/// Relators outside `keep` that must be excluded so that `w` stays outside the
/// normal closure: those carrying an essential piece that is a piece of `w`.
/// The complement of the returned set is a cofinite index set `P ⊇ keep` with
/// `w ∉ ⟨⟨u_j : j ∈ P⟩⟩`.
pub fn cofinite_continuity_witness(
    w: &Word,
    keep: &BTreeSet<usize>,
    family: &RelatorFamily,
) -> Result<BTreeSet<usize>, SmallCancelError> {
    if let Some(&bad) = keep.iter().find(|&&j| j >= family.len()) {
        return Err(SmallCancelError::BadIndex(bad));
    }
    let full = DehnEngine::new(family)?;
    let sub = DehnEngine::from_certified(&family.subfamily(keep));
    if sub.in_normal_closure(w) {
        return Err(SmallCancelError::InNormalClosure);
    }
    Ok(full
        .essential_overlaps(w)
        .into_iter()
        .filter(|j| !keep.contains(j))
        .collect())
}

/// A C'(1/6) family of `count` relators over the first two generators.
///
/// Relator `n` is `x^{a_1} y^{b_1} ⋯ x^{a_7} y^{b_7}` where the fourteen
/// exponents form a block of consecutive integers that no other relator uses,
/// the `a_j` increasing through the lower half and the `b_j` decreasing
/// through the upper half. Any subword containing a full bounded syllable has
/// a unique location, so a repeated piece spans at most two adjacent partial
/// syllables and is shorter than `a_j + b_j`, about a seventh of the relator.
/// Relator lengths strictly increase with the index. The result is always
/// re-checked with [`check_c16`].
pub fn make_c16_family(alphabet: &Alphabet, count: usize) -> Result<RelatorFamily, SmallCancelError> {
    if alphabet.size() < 2 {
        return Err(WordError::IndexOutOfRange { index: 1, size: alphabet.size() }.into());
    }
    let syllables = C16_SYLLABLES;
    let x = Generator::pos(0);
    let y = Generator::pos(1);
    let relators = (0..count)
        .map(|n| {
            let base = 1 + 2 * syllables * n;
            let mut letters = Vec::new();
            for j in 0..syllables {
                letters.extend(std::iter::repeat_n(x, base + j));
                letters.extend(std::iter::repeat_n(y, base + 2 * syllables - 1 - j));
            }
            Word::reduce(letters)
        })
        .collect();
    let family = RelatorFamily::new(alphabet.clone(), relators)?;
    match check_c16(&family) {
        C16Verdict::Ok => Ok(family),
        C16Verdict::Violation(r) => Err(SmallCancelError::NotC16(r)),
    }
}

const C16_SYLLABLES: usize = 7;
