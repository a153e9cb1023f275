//! Word problem for Coxeter groups whose generators are indexed by the
//! integers, with `μ(i, j)` depending only on `|i − j|` (the "wreathed"
//! families), solved by Tits' braid-move algorithm.
//!
//! A word is reduced exactly when no word in its braid class (everything
//! reachable by braid moves alone) contains two equal adjacent letters, so
//! deciding triviality alternates between exploring the braid class and
//! deleting one `ss` pair.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Search budget (braid-class nodes) used when the caller has no opinion.
pub const DEFAULT_NODE_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(m) => Some(m),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(m) => write!(f, "{m}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("generators must be distinct")]
    SameVertex,
    #[error("off-diagonal entry must be at least 2 or infinite, got {0}")]
    InvalidEntry(u32),
    #[error("distance must be positive")]
    ZeroDistance,
    #[error("mu({0}) is infinite, so there is no relator")]
    InfiniteRelator(u64),
    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(usize),
    #[error("(st)^{k} has the wrong triviality for order {order}")]
    VerificationFailed { k: u32, order: Order },
}

/// Coxeter matrix on vertex set Z. Entries depend on the distance `|i − j|`
/// (shift-invariant); individual pairs may be overridden, which breaks shift
/// invariance but is convenient for small explicit systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterMatrix {
    default: Order,
    by_distance: BTreeMap<u64, Order>,
    pairs: BTreeMap<(i64, i64), Order>,
}

fn check_entry(o: Order) -> Result<Order, CoxeterError> {
    match o {
        Order::Finite(m) if m < 2 => Err(CoxeterError::InvalidEntry(m)),
        o => Ok(o),
    }
}

impl CoxeterMatrix {
    /// `μ(d) = default` except at the listed distances.
    pub fn wreathed(
        default: Order,
        distances: impl IntoIterator<Item = (u64, Order)>,
    ) -> Result<Self, CoxeterError> {
        let mut by_distance = BTreeMap::new();
        for (d, o) in distances {
            if d == 0 {
                return Err(CoxeterError::ZeroDistance);
            }
            by_distance.insert(d, check_entry(o)?);
        }
        Ok(CoxeterMatrix {
            default: check_entry(default)?,
            by_distance,
            pairs: BTreeMap::new(),
        })
    }

    pub fn uniform(order: Order) -> Result<Self, CoxeterError> {
        Self::wreathed(order, [])
    }

    /// Overrides a single unordered pair.
    pub fn with_pair(mut self, s: i64, t: i64, order: Order) -> Result<Self, CoxeterError> {
        if s == t {
            return Err(CoxeterError::SameVertex);
        }
        self.pairs.insert((s.min(t), s.max(t)), check_entry(order)?);
        Ok(self)
    }

    pub fn distance_entry(&self, d: u64) -> Order {
        if d == 0 {
            return Order::Finite(1);
        }
        *self.by_distance.get(&d).unwrap_or(&self.default)
    }

    pub fn entry(&self, s: i64, t: i64) -> Order {
        if s == t {
            return Order::Finite(1);
        }
        match self.pairs.get(&(s.min(t), s.max(t))) {
            Some(&o) => o,
            None => self.distance_entry(s.abs_diff(t)),
        }
    }

    /// Same entries on `letters`, infinite everywhere else.
    pub fn restricted(&self, letters: &[i64]) -> CoxeterMatrix {
        let mut m = CoxeterMatrix {
            default: Order::Infinite,
            by_distance: BTreeMap::new(),
            pairs: BTreeMap::new(),
        };
        for (a, &s) in letters.iter().enumerate() {
            for &t in &letters[a + 1..] {
                if s != t {
                    m.pairs.insert((s.min(t), s.max(t)), self.entry(s, t));
                }
            }
        }
        m
    }
}

/// Word in the Coxeter generators, with adjacent equal letters cancelled.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CoxWord {
    letters: Vec<i64>,
}

impl CoxWord {
    pub fn new(letters: impl IntoIterator<Item = i64>) -> Self {
        let mut out: Vec<i64> = Vec::new();
        for s in letters {
            if out.last() == Some(&s) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        CoxWord { letters: out }
    }

    /// `(s t)^k`.
    pub fn dihedral(s: i64, t: i64, k: u32) -> Self {
        Self::new((0..k).flat_map(|_| [s, t]))
    }

    pub fn letters(&self) -> &[i64] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &CoxWord) -> CoxWord {
        CoxWord::new(self.letters.iter().chain(&other.letters).copied())
    }

    /// Generators are involutions, so the inverse is the reversal.
    pub fn inverse(&self) -> CoxWord {
        CoxWord {
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    /// Distinct letters, sorted.
    pub fn support(&self) -> Vec<i64> {
        let mut s = self.letters.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoxVerdict {
    Trivial,
    Nontrivial,
    Undetermined { explored: usize },
}

impl CoxVerdict {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            CoxVerdict::Trivial => Some(true),
            CoxVerdict::Nontrivial => Some(false),
            CoxVerdict::Undetermined { .. } => None,
        }
    }
}

/// The word and its orders, re-indexed over the word's own letters.
struct Local {
    word: Vec<u16>,
    orders: Vec<Vec<Option<u32>>>,
}

fn localize(w: &CoxWord, matrix: &CoxeterMatrix) -> Local {
    let support = w.support();
    let index: BTreeMap<i64, u16> = support.iter().enumerate().map(|(i, &s)| (s, i as u16)).collect();
    let orders = support
        .iter()
        .map(|&s| support.iter().map(|&t| matrix.entry(s, t).finite()).collect())
        .collect();
    Local {
        word: w.letters.iter().map(|s| index[s]).collect(),
        orders,
    }
}

/// Cheap nontriviality certificate: the abelianization of a Coxeter group is
/// `(Z/2)^c` where `c` counts components of the odd-order graph, so a trivial
/// word uses each component an even number of times.
fn abelian_obstruction(local: &Local) -> bool {
    let k = local.orders.len();
    let mut comp: Vec<usize> = (0..k).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for a in 0..k {
        for b in a + 1..k {
            if matches!(local.orders[a][b], Some(m) if m % 2 == 1) {
                let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                comp[ra] = rb;
            }
        }
    }
    let mut parity = vec![false; k];
    for &s in &local.word {
        let r = find(&mut comp, s as usize);
        parity[r] ^= true;
    }
    parity.iter().any(|&p| p)
}

fn free_reduce(w: &[u16]) -> Vec<u16> {
    let mut out: Vec<u16> = Vec::with_capacity(w.len());
    for &s in w {
        if out.last() == Some(&s) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

fn braid_neighbours(w: &[u16], orders: &[Vec<Option<u32>>], mut visit: impl FnMut(Vec<u16>)) {
    for i in 0..w.len().saturating_sub(1) {
        let (a, b) = (w[i], w[i + 1]);
        if a == b {
            continue;
        }
        let Some(m) = orders[a as usize][b as usize] else {
            continue;
        };
        let m = m as usize;
        if i + m > w.len() {
            continue;
        }
        let alternates = (0..m).all(|j| w[i + j] == if j % 2 == 0 { a } else { b });
        if alternates {
            let mut v = w.to_vec();
            for j in 0..m {
                v[i + j] = if j % 2 == 0 { b } else { a };
            }
            visit(v);
        }
    }
}

/// Reduces to a Tits-reduced word, or reports the nodes explored when the
/// budget runs out.
fn tits_reduce(start: Vec<u16>, orders: &[Vec<Option<u32>>], budget: usize) -> Result<Vec<u16>, usize> {
    let mut word = free_reduce(&start);
    let mut explored = 0usize;
    'outer: loop {
        if word.is_empty() {
            return Ok(word);
        }
        let mut seen: HashSet<Vec<u16>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(word.clone());
        queue.push_back(word.clone());
        while let Some(w) = queue.pop_front() {
            if let Some(i) = w.windows(2).position(|p| p[0] == p[1]) {
                let mut shorter = w;
                shorter.drain(i..i + 2);
                word = free_reduce(&shorter);
                continue 'outer;
            }
            let mut over = false;
            braid_neighbours(&w, orders, |v| {
                if !over && seen.insert(v.clone()) {
                    explored += 1;
                    if explored > budget {
                        over = true;
                    }
                    queue.push_back(v);
                }
            });
            if over {
                return Err(explored);
            }
        }
        return Ok(word);
    }
}

/// Decides `w = 1` in the Coxeter group of `matrix`. Only the letters of `w`
/// are consulted: by Tits' theorem the parabolic subgroup they generate is the
/// Coxeter group of the restricted matrix.
pub fn tits_is_trivial(w: &CoxWord, matrix: &CoxeterMatrix, budget: usize) -> CoxVerdict {
    if w.is_empty() {
        return CoxVerdict::Trivial;
    }
    if w.len() % 2 == 1 {
        return CoxVerdict::Nontrivial;
    }
    let local = localize(w, matrix);
    if abelian_obstruction(&local) {
        return CoxVerdict::Nontrivial;
    }
    match tits_reduce(local.word, &local.orders, budget) {
        Ok(r) if r.is_empty() => CoxVerdict::Trivial,
        Ok(_) => CoxVerdict::Nontrivial,
        Err(explored) => CoxVerdict::Undetermined { explored },
    }
}

/// Tits-reduced form of `w` (a shortest representative), if the budget allows.
pub fn tits_normal_word(w: &CoxWord, matrix: &CoxeterMatrix, budget: usize) -> Result<CoxWord, CoxeterError> {
    let support = w.support();
    let local = localize(w, matrix);
    tits_reduce(local.word, &local.orders, budget)
        .map(|r| CoxWord::new(r.into_iter().map(|i| support[i as usize])))
        .map_err(CoxeterError::BudgetExceeded)
}

/// Order of `st`, read from the matrix and then certified by the word problem:
/// `(st)^m = 1` and `(st)^k ≠ 1` for `k < m`. For an infinite entry the powers
/// up to 6 are certified nontrivial.
pub fn rank2_order(s: i64, t: i64, matrix: &CoxeterMatrix, budget: usize) -> Result<Order, CoxeterError> {
    if s == t {
        return Err(CoxeterError::SameVertex);
    }
    let order = matrix.entry(s, t);
    let (upto, top) = match order {
        Order::Finite(m) => (m, Some(m)),
        Order::Infinite => (7, None),
    };
    for k in 1..=upto {
        let expect_trivial = top == Some(k);
        match tits_is_trivial(&CoxWord::dihedral(s, t, k), matrix, budget) {
            CoxVerdict::Undetermined { explored } => return Err(CoxeterError::BudgetExceeded(explored)),
            v if v.as_bool() == Some(expect_trivial) => {}
            _ => return Err(CoxeterError::VerificationFailed { k, order }),
        }
    }
    Ok(order)
}

/// `r_p = (w₀ w_p)^{μ(p)}`.
pub fn coxeter_relator(p: u64, mu: &CoxeterMatrix) -> Result<CoxWord, CoxeterError> {
    match mu.distance_entry(p) {
        Order::Finite(m) => Ok(CoxWord::dihedral(0, p as i64, m)),
        Order::Infinite => Err(CoxeterError::InfiniteRelator(p)),
    }
}

/// Certifies that `r_p` is not a consequence of the relators `r_n`,
/// `n ∈ window ∖ {p}`: in that group the pair `(0, p)` has infinite order, so
/// `r_p` is evaluated over the matrix with `μ'(p) = ∞`.
pub fn coxeter_relator_independence(
    p: u64,
    mu: &CoxeterMatrix,
    window: &std::collections::BTreeSet<u64>,
    budget: usize,
) -> Result<bool, CoxeterError> {
    if p == 0 {
        return Err(CoxeterError::ZeroDistance);
    }
    let rp = coxeter_relator(p, mu)?;
    let others = window
        .iter()
        .filter(|&&n| n != p && n > 0)
        .map(|&n| (n, mu.distance_entry(n)));
    let reduced = CoxeterMatrix::wreathed(Order::Infinite, others)?;
    match tits_is_trivial(&rp, &reduced, budget) {
        CoxVerdict::Trivial => Ok(false),
        CoxVerdict::Nontrivial => Ok(true),
        CoxVerdict::Undetermined { explored } => Err(CoxeterError::BudgetExceeded(explored)),
    }
}
