//! Graph products of infinite cyclic groups indexed by the integers, where
//! vertices `i` and `j` commute exactly when `|i − j|` lies in a distance set.
//!
//! With distance set `J`, this graph product is the base group of the
//! truncated presentation `⟨t, x | [tⁿxt⁻ⁿ, x], n ∈ J⟩` of `Z ≀ Z`: the
//! conjugate `tᵏxt⁻ᵏ` becomes the generator of vertex `k`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::words::{Alphabet, Generator, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphProdError {
    #[error("distance {0} is in the commuting set")]
    DistanceInSet(u64),
    #[error("word has nonzero t-exponent sum {0}")]
    NotInBase(i64),
    #[error("distance must be positive")]
    ZeroDistance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Distances {
    Only(BTreeSet<u64>),
    AllBut(BTreeSet<u64>),
}

/// Edge `{i, j}` iff `i ≠ j` and `|i − j|` is in the distance set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationGraph {
    distances: Distances,
}

impl CommutationGraph {
    pub fn with_distances(d: impl IntoIterator<Item = u64>) -> Self {
        CommutationGraph {
            distances: Distances::Only(d.into_iter().filter(|&x| x > 0).collect()),
        }
    }

    /// Every distance except the listed ones.
    pub fn all_but(d: impl IntoIterator<Item = u64>) -> Self {
        CommutationGraph {
            distances: Distances::AllBut(d.into_iter().collect()),
        }
    }

    /// No edges: the free product.
    pub fn empty() -> Self {
        Self::with_distances([])
    }

    /// All edges: the free abelian group.
    pub fn complete() -> Self {
        Self::all_but([])
    }

    pub fn has_distance(&self, d: u64) -> bool {
        d > 0
            && match &self.distances {
                Distances::Only(s) => s.contains(&d),
                Distances::AllBut(s) => !s.contains(&d),
            }
    }

    #[inline]
    pub fn commute(&self, i: i64, j: i64) -> bool {
        self.has_distance(i.abs_diff(j))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub vertex: i64,
    pub exponent: i64,
}

impl Syllable {
    pub fn new(vertex: i64, exponent: i64) -> Self {
        Syllable { vertex, exponent }
    }
}

/// Graph-product element in canonical normal form: reduced (no two syllables
/// on the same vertex can be shuffled together) and lexicographically least
/// by vertex within its shuffle class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GPWord {
    syllables: Vec<Syllable>,
}

impl GPWord {
    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }
}

/// Inserts one syllable into a reduced word. Scanning from the right, the
/// syllable passes over commuting vertices until it meets its own vertex
/// (merge) or a blocking one (append). Removing a syllable that commutes with
/// everything after it leaves a reduced word, so no cascade is needed.
fn push_syllable(stack: &mut Vec<Syllable>, s: Syllable, graph: &CommutationGraph) {
    if s.exponent == 0 {
        return;
    }
    for idx in (0..stack.len()).rev() {
        let v = stack[idx].vertex;
        if v == s.vertex {
            stack[idx].exponent += s.exponent;
            if stack[idx].exponent == 0 {
                stack.remove(idx);
            }
            return;
        }
        if !graph.commute(v, s.vertex) {
            break;
        }
    }
    stack.push(s);
}

fn lex_least(mut rest: Vec<Syllable>, graph: &CommutationGraph) -> Vec<Syllable> {
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut pick = 0;
        for i in 0..rest.len() {
            let free = rest[..i].iter().all(|p| graph.commute(p.vertex, rest[i].vertex));
            if free && rest[i].vertex < rest[pick].vertex {
                pick = i;
            }
        }
        out.push(rest.remove(pick));
    }
    out
}

pub fn gp_normalize(raw: &[Syllable], graph: &CommutationGraph) -> GPWord {
    let mut stack = Vec::with_capacity(raw.len());
    for &s in raw {
        push_syllable(&mut stack, s, graph);
    }
    GPWord {
        syllables: lex_least(stack, graph),
    }
}

pub fn gp_is_trivial(w: &GPWord) -> bool {
    w.is_empty()
}

/// `[x_i, x_j]` as a raw syllable sequence.
pub fn vertex_commutator(i: i64, j: i64) -> Vec<Syllable> {
    vec![
        Syllable::new(i, 1),
        Syllable::new(j, 1),
        Syllable::new(i, -1),
        Syllable::new(j, -1),
    ]
}

/// Alphabet `{t, x}` of the wreath-product relators.
pub fn wreath_alphabet() -> Alphabet {
    Alphabet::new(["t", "x"]).expect("static names")
}

const T: usize = 0;
const X: usize = 1;

/// `uₙ = [tⁿxt⁻ⁿ, x]` over [`wreath_alphabet`].
pub fn wreath_relator(n: u64) -> Word {
    let t_n = Word::letter(Generator::pos(T)).pow(n as i64);
    let x = Word::letter(Generator::pos(X));
    Word::commutator(&x.conjugate(&t_n), &x)
}

/// Rewrites a word over `{t, x}` with zero `t`-exponent sum as a syllable
/// sequence: an `x^{±1}` read at `t`-height `h` becomes `(h, ±1)`.
pub fn wreath_syllables(w: &Word) -> Result<Vec<Syllable>, GraphProdError> {
    let mut height = 0i64;
    let mut out = Vec::new();
    for g in w.letters() {
        if g.index() == T {
            height += g.sign();
        } else {
            out.push(Syllable::new(height, g.sign()));
        }
    }
    if height != 0 {
        return Err(GraphProdError::NotInBase(height));
    }
    Ok(out)
}

/// Whether `w ∈ ⟨t, x⟩` lies in the normal closure of `{u_n : n ∈ J}`.
pub fn in_wreath_kernel(w: &Word, graph: &CommutationGraph) -> bool {
    match wreath_syllables(w) {
        Ok(s) => gp_is_trivial(&gp_normalize(&s, graph)),
        Err(_) => false,
    }
}

/// Certifies `u_s ∉ ⟨⟨u_n : n ∈ J⟩⟩` by retracting the graph product over `J`
/// onto the vertices `0..=window` and checking that the image of `u_s` is
/// nontrivial. Returns `false` when the retraction loses the certificate
/// (`window < s`).
pub fn wreath_independence(s: u64, j: &BTreeSet<u64>, window: u64) -> Result<bool, GraphProdError> {
    if s == 0 {
        return Err(GraphProdError::ZeroDistance);
    }
    if j.contains(&s) {
        return Err(GraphProdError::DistanceInSet(s));
    }
    let graph = CommutationGraph::with_distances(j.iter().copied());
    let image: Vec<Syllable> = wreath_syllables(&wreath_relator(s))?
        .into_iter()
        .filter(|y| (0..=window as i64).contains(&y.vertex))
        .collect();
    Ok(!gp_is_trivial(&gp_normalize(&image, &graph)))
}
