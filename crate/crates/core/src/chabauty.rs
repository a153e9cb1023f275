//! Basic open sets `{S ◁ F_m : F ⊆ S, S ∩ F′ = ∅}` of the space of marked
//! groups, membership through word-problem oracles, and a finite sample of
//! points given by the normal subgroups of small index.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::exec::Exec;
use crate::smallcancel::{DehnEngine, RelatorFamily, SmallCancelError};
use crate::words::{reduced_words_of_length, Alphabet, Word, WordError};

pub const MAX_RANK: usize = 3;
pub const MAX_INDEX: usize = 7;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChabautyError {
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    #[error("the empty word cannot be avoided")]
    EmptyWordAvoided,
    #[error("rank {rank} and index {index} exceed the limits {MAX_RANK} and {MAX_INDEX}")]
    ScaleLimit { rank: usize, index: usize },
    #[error("sample has no member {0}")]
    BadTarget(usize),
    #[error("separating set misclassifies sample member {0}")]
    SeparationFailed(usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    SmallCancel(#[from] SmallCancelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Undetermined,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// Normal subgroup of index `degree`, given by the regular action of the
/// quotient on its own elements: `images[g][i]` is point `i` moved by
/// generator `g`. Points are numbered in breadth-first order from the base
/// point 0 (generators tried in order, each positive before negative), so
/// two certificates are equal iff their kernels are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteQuotientCert {
    pub degree: usize,
    pub images: Vec<Vec<u8>>,
    /// Name of the quotient group.
    pub target: String,
}

impl FiniteQuotientCert {
    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// The base point moved by `w` (letters act left to right).
    pub fn act(&self, w: &Word) -> usize {
        let mut pt = 0usize;
        for g in w.letters() {
            let perm = &self.images[g.index()];
            pt = if g.is_inverse() {
                perm.iter().position(|&x| x as usize == pt).expect("permutation")
            } else {
                perm[pt] as usize
            };
        }
        pt
    }

    /// Kernel membership: a normal subgroup is the stabilizer of any point.
    pub fn contains(&self, w: &Word) -> bool {
        self.act(w) == 0
    }
}

pub enum Oracle {
    Free,
    /// `Z^m`: trivial iff every exponent sum vanishes.
    FreeAbelian,
    Dehn(DehnEngine),
    Quotient(FiniteQuotientCert),
    Custom(Box<dyn Fn(&Word) -> Verdict + Send + Sync>),
}

/// A point of the space of marked groups, known only through its word
/// problem.
pub struct MarkedGroup {
    alphabet: Alphabet,
    oracle: Oracle,
}

impl MarkedGroup {
    pub fn free(alphabet: Alphabet) -> Self {
        MarkedGroup { alphabet, oracle: Oracle::Free }
    }

    pub fn free_abelian(alphabet: Alphabet) -> Self {
        MarkedGroup { alphabet, oracle: Oracle::FreeAbelian }
    }

    pub fn small_cancel(family: &RelatorFamily) -> Result<Self, ChabautyError> {
        Ok(MarkedGroup {
            alphabet: family.alphabet().clone(),
            oracle: Oracle::Dehn(DehnEngine::new(family)?),
        })
    }

    pub fn quotient(alphabet: Alphabet, cert: FiniteQuotientCert) -> Result<Self, ChabautyError> {
        if cert.rank() != alphabet.size() {
            return Err(ChabautyError::AlphabetMismatch);
        }
        Ok(MarkedGroup { alphabet, oracle: Oracle::Quotient(cert) })
    }

    pub fn custom(alphabet: Alphabet, f: impl Fn(&Word) -> Verdict + Send + Sync + 'static) -> Self {
        MarkedGroup { alphabet, oracle: Oracle::Custom(Box::new(f)) }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn is_trivial(&self, w: &Word) -> Verdict {
        if w.is_empty() {
            return Verdict::Yes;
        }
        match &self.oracle {
            Oracle::Free => Verdict::No,
            Oracle::FreeAbelian => Verdict::from_bool(w.exponent_sums(self.alphabet.size()).iter().all(|&e| e == 0)),
            Oracle::Dehn(e) => Verdict::from_bool(e.in_normal_closure(w)),
            Oracle::Quotient(c) => Verdict::from_bool(c.contains(w)),
            Oracle::Custom(f) => f(w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasicOpenSet {
    alphabet: Alphabet,
    must_contain: BTreeSet<Word>,
    must_avoid: BTreeSet<Word>,
}

impl BasicOpenSet {
    pub fn new(
        alphabet: Alphabet,
        must_contain: impl IntoIterator<Item = Word>,
        must_avoid: impl IntoIterator<Item = Word>,
    ) -> Result<Self, ChabautyError> {
        let must_contain: BTreeSet<Word> = must_contain.into_iter().collect();
        let must_avoid: BTreeSet<Word> = must_avoid.into_iter().collect();
        for w in must_contain.iter().chain(&must_avoid) {
            alphabet.check(w)?;
        }
        if must_avoid.contains(&Word::empty()) {
            return Err(ChabautyError::EmptyWordAvoided);
        }
        Ok(BasicOpenSet { alphabet, must_contain, must_avoid })
    }

    /// Every subgroup.
    pub fn whole(alphabet: Alphabet) -> Self {
        BasicOpenSet { alphabet, must_contain: BTreeSet::new(), must_avoid: BTreeSet::new() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn must_contain(&self) -> &BTreeSet<Word> {
        &self.must_contain
    }

    pub fn must_avoid(&self) -> &BTreeSet<Word> {
        &self.must_avoid
    }

    /// `O(F₁, F₁′) ∩ O(F₂, F₂′) = O(F₁ ∪ F₂, F₁′ ∪ F₂′)`.
    pub fn intersect(&self, other: &BasicOpenSet) -> Result<BasicOpenSet, ChabautyError> {
        if self.alphabet != other.alphabet {
            return Err(ChabautyError::AlphabetMismatch);
        }
        Ok(BasicOpenSet {
            alphabet: self.alphabet.clone(),
            must_contain: self.must_contain.union(&other.must_contain).cloned().collect(),
            must_avoid: self.must_avoid.union(&other.must_avoid).cloned().collect(),
        })
    }
}

pub fn in_open_set(g: &MarkedGroup, o: &BasicOpenSet) -> Result<Verdict, ChabautyError> {
    if g.alphabet != o.alphabet {
        return Err(ChabautyError::AlphabetMismatch);
    }
    let mut undetermined = false;
    let checks = o
        .must_contain
        .iter()
        .map(|w| (w, Verdict::Yes))
        .chain(o.must_avoid.iter().map(|w| (w, Verdict::No)));
    for (w, wanted) in checks {
        match g.is_trivial(w) {
            Verdict::Undetermined => undetermined = true,
            v if v != wanted => return Ok(Verdict::No),
            _ => {}
        }
    }
    Ok(if undetermined { Verdict::Undetermined } else { Verdict::Yes })
}

/// The neighbourhood `{S : R ⊆ S, S ∩ F′ = ∅}` of `⟨X | R⟩`. For a finitely
/// presented group these sets, with `F′` ranging over finite sets, form a
/// neighbourhood basis.
pub fn finitely_presented_neighbourhood(
    alphabet: Alphabet,
    relators: impl IntoIterator<Item = Word>,
    avoid: impl IntoIterator<Item = Word>,
) -> Result<BasicOpenSet, ChabautyError> {
    BasicOpenSet::new(alphabet, relators, avoid)
}

type Perm = Vec<u8>;

fn compose(a: &Perm, b: &Perm) -> Perm {
    // apply a, then b
    a.iter().map(|&x| b[x as usize]).collect()
}

fn invert(a: &Perm) -> Perm {
    let mut inv = vec![0u8; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x as usize] = i as u8;
    }
    inv
}

/// Closure of a set of permutations under composition.
fn generate(gens: &[Perm], degree: usize) -> Vec<Perm> {
    let id: Perm = (0..degree as u8).collect();
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = compose(&p, g);
            if seen.insert(q.clone()) {
                order.push(q.clone());
                queue.push_back(q);
            }
        }
    }
    order
}

fn cycle(n: usize) -> Perm {
    (0..n).map(|i| ((i + 1) % n) as u8).collect()
}

/// Every group of order at most 7, up to isomorphism, as a permutation group.
fn catalogue() -> Vec<(String, Vec<Perm>)> {
    let mut out: Vec<(String, Vec<Perm>)> = Vec::new();
    for n in 2..=7 {
        out.push((format!("Z/{n}"), generate(&[cycle(n)], n)));
        if n == 4 {
            out.push(("Z/2xZ/2".into(), generate(&[vec![1, 0, 3, 2], vec![2, 3, 0, 1]], 4)));
        }
        if n == 6 {
            out.push(("S3".into(), generate(&[cycle(3), vec![1, 0, 2]], 3)));
        }
    }
    out
}

/// Regular action of the subgroup generated by `imgs` on itself, numbered
/// canonically; `None` unless the images generate all of `elements`.
fn regular_certificate(imgs: &[&Perm], elements: &[Perm], target: &str) -> Option<FiniteQuotientCert> {
    let degree = elements.len();
    let id = &elements[0];
    let mut label: std::collections::HashMap<Perm, u8> = std::collections::HashMap::from([(id.clone(), 0u8)]);
    let mut order = vec![id.clone()];
    let mut head = 0;
    let inverses: Vec<Perm> = imgs.iter().map(|g| invert(g)).collect();
    while head < order.len() {
        let p = order[head].clone();
        head += 1;
        for (g, gi) in imgs.iter().zip(&inverses) {
            for q in [compose(&p, g), compose(&p, gi)] {
                if !label.contains_key(&q) {
                    label.insert(q.clone(), order.len() as u8);
                    order.push(q);
                }
            }
        }
    }
    if order.len() != degree {
        return None;
    }
    let images = imgs
        .iter()
        .map(|g| order.iter().map(|p| label[&compose(p, g)]).collect())
        .collect();
    Some(FiniteQuotientCert { degree, images, target: target.to_string() })
}

/// All normal subgroups of `F_m` of index exactly `k`, sorted.
pub fn enumerate_normal_exact_index(m: usize, k: usize) -> Result<Vec<FiniteQuotientCert>, ChabautyError> {
    if m == 0 || m > MAX_RANK || k == 0 || k > MAX_INDEX {
        return Err(ChabautyError::ScaleLimit { rank: m, index: k });
    }
    if k == 1 {
        return Ok(vec![FiniteQuotientCert { degree: 1, images: vec![vec![0]; m], target: "1".into() }]);
    }
    let mut found: BTreeSet<FiniteQuotientCert> = BTreeSet::new();
    for (name, elements) in catalogue().into_iter().filter(|(_, e)| e.len() == k) {
        let total = k.pow(m as u32);
        for code in 0..total {
            let imgs: Vec<&Perm> = (0..m).map(|i| &elements[code / k.pow(i as u32) % k]).collect();
            if let Some(c) = regular_certificate(&imgs, &elements, &name) {
                found.insert(c);
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Normal subgroups of `F_m` with index `2 ≤ k ≤ n` (the whole group is
/// left out; it is [`enumerate_normal_exact_index`]`(m, 1)`).
pub fn enumerate_normal_lowindex(m: usize, n: usize, exec: Exec) -> Result<Vec<FiniteQuotientCert>, ChabautyError> {
    if m == 0 || m > MAX_RANK || n > MAX_INDEX {
        return Err(ChabautyError::ScaleLimit { rank: m, index: n });
    }
    let per_index = exec.map_range(2..n.max(1) + 1, |k| enumerate_normal_exact_index(m, k));
    let mut out = Vec::new();
    for r in per_index {
        out.extend(r?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    Separated(BasicOpenSet),
    NotSeparated { other: usize },
}

/// Looks for a basic open set containing `sample[target]` and no other
/// sample member, built from reduced words of length at most `max_len`: for
/// each other member the shortest word in exactly one of the two kernels
/// goes into `must_contain` or `must_avoid`. The result is re-tested before
/// being returned. This is a statement about the finite sample only.
pub fn isolated_in_sample(
    alphabet: &Alphabet,
    target: usize,
    sample: &[FiniteQuotientCert],
    max_len: usize,
) -> Result<Separation, ChabautyError> {
    let t = sample.get(target).ok_or(ChabautyError::BadTarget(target))?;
    if sample.iter().any(|c| c.rank() != alphabet.size()) {
        return Err(ChabautyError::AlphabetMismatch);
    }
    let words: Vec<Word> = (1..=max_len)
        .flat_map(|l| reduced_words_of_length(alphabet.size(), l))
        .collect();
    let mut contain = BTreeSet::new();
    let mut avoid = BTreeSet::new();
    for (i, other) in sample.iter().enumerate() {
        if i == target {
            continue;
        }
        // Already excluded by the words chosen so far?
        if contain.iter().any(|w| !other.contains(w)) || avoid.iter().any(|w| other.contains(w)) {
            continue;
        }
        match words.iter().find(|w| t.contains(w) != other.contains(w)) {
            Some(w) if t.contains(w) => {
                contain.insert(w.clone());
            }
            Some(w) => {
                avoid.insert(w.clone());
            }
            None => return Ok(Separation::NotSeparated { other: i }),
        }
    }
    let o = BasicOpenSet::new(alphabet.clone(), contain, avoid)?;
    for (i, c) in sample.iter().enumerate() {
        let g = MarkedGroup::quotient(alphabet.clone(), c.clone())?;
        if in_open_set(&g, &o)? != Verdict::from_bool(i == target) {
            return Err(ChabautyError::SeparationFailed(i));
        }
    }
    Ok(Separation::Separated(o))
}
