//! Independence of finite families of normal subgroups, through the standard
//! map `Φ: J ↦ N_J` (the subgroup generated by the members indexed by `J`).
//!
//! `Φ` is injective iff no member lies in the join of the others; the
//! abelian backend can also check injectivity directly by comparing the
//! canonical forms of all `2^|I|` joins.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::exec::Exec;
use crate::graphprod::{in_wreath_kernel, wreath_relator, CommutationGraph, GraphProdError};
use crate::smallcancel::{check_c16, C16Verdict, DehnEngine, RelatorFamily, SmallCancelError};
use crate::words::Word;

/// Largest index set accepted by [`injectivity_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndFamError {
    #[error("index {0} is not in the family")]
    NotSubset(usize),
    #[error("brute force needs at most {BRUTEFORCE_LIMIT} members, got {0}")]
    SizeLimit(usize),
    #[error("operation needs the abelian backend")]
    BackendMismatch,
    #[error("vector of dimension {got} in Z^{expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    SmallCancel(#[from] SmallCancelError),
    #[error(transparent)]
    GraphProd(#[from] GraphProdError),
}

/// Subgroup of `Z^d` in Hermite normal form: echelon rows with positive
/// pivots and entries above each pivot reduced into `[0, pivot)`. Two
/// subgroups are equal iff their forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupZd {
    dim: usize,
    basis: Vec<Vec<i64>>,
}

fn pivot_col(row: &[i64]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

impl SubgroupZd {
    pub fn trivial(dim: usize) -> Self {
        SubgroupZd { dim, basis: Vec::new() }
    }

    pub fn generated_by(dim: usize, gens: &[Vec<i64>]) -> Result<Self, IndFamError> {
        if let Some(g) = gens.iter().find(|g| g.len() != dim) {
            return Err(IndFamError::DimensionMismatch { expected: dim, got: g.len() });
        }
        Ok(Self::hermite(dim, gens.iter().map(|g| g.iter().map(|&x| x as i128).collect()).collect()))
    }

    fn hermite(dim: usize, mut rows: Vec<Vec<i128>>) -> Self {
        rows.retain(|r| r.iter().any(|&x| x != 0));
        let mut basis: Vec<Vec<i128>> = Vec::new();
        for col in 0..dim {
            // Euclid on column `col` among the remaining rows.
            loop {
                let mut active: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
                if active.len() <= 1 {
                    break;
                }
                active.sort_by_key(|&i| rows[i][col].abs());
                let p = active[0];
                let pivot_row = rows[p].clone();
                for &i in &active[1..] {
                    let q = rows[i][col] / pivot_row[col];
                    for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                        *x -= q * y;
                    }
                }
            }
            if let Some(i) = rows.iter().position(|r| r[col] != 0) {
                let mut r = rows.swap_remove(i);
                if r[col] < 0 {
                    r.iter_mut().for_each(|x| *x = -*x);
                }
                basis.push(r);
            }
            rows.retain(|r| r.iter().any(|&x| x != 0));
        }
        // Reduce above the pivots.
        for k in 0..basis.len() {
            let c = pivot_col_i128(&basis[k]);
            let pivot = basis[k][c];
            for j in 0..k {
                let q = basis[j][c].div_euclid(pivot);
                if q != 0 {
                    let row = basis[k].clone();
                    for (x, y) in basis[j].iter_mut().zip(&row) {
                        *x -= q * y;
                    }
                }
            }
        }
        SubgroupZd {
            dim,
            basis: basis
                .into_iter()
                .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("HNF entry overflow")).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.dim {
            return false;
        }
        let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for row in &self.basis {
            let c = pivot_col(row).expect("nonzero basis row");
            if v[..c].iter().any(|&x| x != 0) {
                return false;
            }
            let a = row[c] as i128;
            if v[c] % a != 0 {
                return false;
            }
            let q = v[c] / a;
            for (x, &y) in v.iter_mut().zip(row) {
                *x -= q * y as i128;
            }
        }
        v.iter().all(|&x| x == 0)
    }

    pub fn contains_subgroup(&self, other: &SubgroupZd) -> bool {
        other.basis.iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &SubgroupZd) -> SubgroupZd {
        let rows = self
            .basis
            .iter()
            .chain(&other.basis)
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        Self::hermite(self.dim, rows)
    }
}

fn pivot_col_i128(row: &[i128]) -> usize {
    row.iter().position(|&x| x != 0).expect("nonzero basis row")
}

#[derive(Clone, Debug)]
pub enum Backend {
    /// Subgroups of `Z^d`.
    Abelian { dim: usize, members: Vec<SubgroupZd> },
    /// Normal closures of single relators of a C'(1/6) family.
    SmallCancel(RelatorFamily),
    /// Normal closures of the wreath relators `u_n`, one per listed distance.
    GraphProd(Vec<u64>),
}

/// A finite family `(N_i)_{i ∈ I}` with `I = {0, …, len − 1}`.
#[derive(Clone, Debug)]
pub struct FamilyHandle {
    backend: Backend,
}

impl FamilyHandle {
    pub fn abelian(dim: usize, members: Vec<SubgroupZd>) -> Result<Self, IndFamError> {
        if let Some(m) = members.iter().find(|m| m.dim != dim) {
            return Err(IndFamError::DimensionMismatch { expected: dim, got: m.dim });
        }
        Ok(FamilyHandle { backend: Backend::Abelian { dim, members } })
    }

    /// Family of cyclic subgroups `⟨v_i⟩`.
    pub fn cyclic(dim: usize, gens: &[Vec<i64>]) -> Result<Self, IndFamError> {
        let members = gens
            .iter()
            .map(|g| SubgroupZd::generated_by(dim, std::slice::from_ref(g)))
            .collect::<Result<_, _>>()?;
        Self::abelian(dim, members)
    }

    pub fn small_cancel(family: RelatorFamily) -> Result<Self, IndFamError> {
        if let C16Verdict::Violation(r) = check_c16(&family) {
            return Err(SmallCancelError::NotC16(r).into());
        }
        Ok(FamilyHandle { backend: Backend::SmallCancel(family) })
    }

    pub fn wreath(distances: Vec<u64>) -> Result<Self, IndFamError> {
        if distances.contains(&0) {
            return Err(GraphProdError::ZeroDistance.into());
        }
        Ok(FamilyHandle { backend: Backend::GraphProd(distances) })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn len(&self) -> usize {
        match &self.backend {
            Backend::Abelian { members, .. } => members.len(),
            Backend::SmallCancel(f) => f.len(),
            Backend::GraphProd(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Decision procedure for membership in `N_J` over a word backend.
pub enum NormalClosureOracle {
    Dehn(DehnEngine),
    Wreath(CommutationGraph),
}

impl NormalClosureOracle {
    pub fn contains(&self, w: &Word) -> bool {
        match self {
            NormalClosureOracle::Dehn(e) => e.in_normal_closure(w),
            NormalClosureOracle::Wreath(g) => in_wreath_kernel(w, g),
        }
    }
}

pub enum StandardImage {
    Subgroup(SubgroupZd),
    Oracle(NormalClosureOracle),
}

impl StandardImage {
    pub fn subgroup(&self) -> Option<&SubgroupZd> {
        match self {
            StandardImage::Subgroup(s) => Some(s),
            StandardImage::Oracle(_) => None,
        }
    }
}

fn check_subset(j: &BTreeSet<usize>, len: usize) -> Result<(), IndFamError> {
    match j.iter().find(|&&i| i >= len) {
        Some(&i) => Err(IndFamError::NotSubset(i)),
        None => Ok(()),
    }
}

fn abelian_join(dim: usize, members: &[SubgroupZd], j: impl IntoIterator<Item = usize>) -> SubgroupZd {
    let rows: Vec<Vec<i128>> = j
        .into_iter()
        .flat_map(|i| members[i].basis.iter())
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    SubgroupZd::hermite(dim, rows)
}

/// `Φ(J)`: the canonical subgroup for the abelian backend, a membership
/// oracle for the word backends.
pub fn standard_map(j: &BTreeSet<usize>, family: &FamilyHandle) -> Result<StandardImage, IndFamError> {
    check_subset(j, family.len())?;
    Ok(match &family.backend {
        Backend::Abelian { dim, members } => StandardImage::Subgroup(abelian_join(*dim, members, j.iter().copied())),
        Backend::SmallCancel(f) => StandardImage::Oracle(NormalClosureOracle::Dehn(DehnEngine::from_certified(&f.subfamily(j)))),
        Backend::GraphProd(d) => StandardImage::Oracle(NormalClosureOracle::Wreath(CommutationGraph::with_distances(
            j.iter().map(|&i| d[i]),
        ))),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Vector(Vec<i64>),
    Word(Word),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndependenceReport {
    Ok,
    /// `index` is the first member contained in the join of the others and
    /// `witness` a generator of it lying there; `dependent` lists every such
    /// member.
    Dependent { index: usize, witness: Witness, dependent: Vec<usize> },
}

impl IndependenceReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, IndependenceReport::Ok)
    }
}

/// Whether member `i` lies in `Φ(I ∖ {i})`, with a witnessing generator.
fn member_dependence(family: &FamilyHandle, i: usize) -> Option<Witness> {
    let n = family.len();
    match &family.backend {
        Backend::Abelian { dim, members } => {
            let rest = abelian_join(*dim, members, (0..n).filter(|&k| k != i));
            // Every generator must lie in the join; report the first one.
            if members[i].basis.iter().all(|g| rest.contains(g)) {
                Some(Witness::Vector(members[i].basis.first().cloned().unwrap_or_else(|| vec![0; *dim])))
            } else {
                None
            }
        }
        Backend::SmallCancel(f) => {
            let rest = DehnEngine::from_certified(&f.without(i));
            let r = &f.relators()[i];
            rest.in_normal_closure(r).then(|| Witness::Word(r.clone()))
        }
        Backend::GraphProd(d) => {
            let graph = CommutationGraph::with_distances((0..n).filter(|&k| k != i).map(|k| d[k]));
            let r = wreath_relator(d[i]);
            in_wreath_kernel(&r, &graph).then_some(Witness::Word(r))
        }
    }
}

/// The criterion "`N_i ⊄ Φ(I ∖ {i})` for every `i`", which is equivalent to
/// injectivity of `Φ`.
pub fn is_independent(family: &FamilyHandle, exec: Exec) -> IndependenceReport {
    let indices: Vec<usize> = (0..family.len()).collect();
    let found: Vec<(usize, Witness)> = exec
        .map(&indices, |&i| member_dependence(family, i).map(|w| (i, w)))
        .into_iter()
        .flatten()
        .collect();
    match found.first() {
        None => IndependenceReport::Ok,
        Some((index, witness)) => IndependenceReport::Dependent {
            index: *index,
            witness: witness.clone(),
            dependent: found.iter().map(|(i, _)| *i).collect(),
        },
    }
}

/// Injectivity of `Φ` by comparing all `2^|I|` canonical forms.
pub fn injectivity_bruteforce(family: &FamilyHandle, exec: Exec) -> Result<bool, IndFamError> {
    let Backend::Abelian { dim, members } = &family.backend else {
        return Err(IndFamError::BackendMismatch);
    };
    let n = members.len();
    if n > BRUTEFORCE_LIMIT {
        return Err(IndFamError::SizeLimit(n));
    }
    let images = exec.map_range(0..1usize << n, |mask| {
        abelian_join(*dim, members, (0..n).filter(move |&i| mask >> i & 1 == 1))
    });
    let mut seen = HashSet::with_capacity(images.len());
    Ok(images.into_iter().all(|s| seen.insert(s)))
}

/// `J ⊆ K ⇒ Φ(J) ⊆ Φ(K)` over all pairs of subsets (abelian backend).
pub fn is_monotone(family: &FamilyHandle) -> Result<bool, IndFamError> {
    let Backend::Abelian { dim, members } = &family.backend else {
        return Err(IndFamError::BackendMismatch);
    };
    let n = members.len();
    if n > BRUTEFORCE_LIMIT {
        return Err(IndFamError::SizeLimit(n));
    }
    let images: Vec<SubgroupZd> = (0..1usize << n)
        .map(|mask| abelian_join(*dim, members, (0..n).filter(|&i| mask >> i & 1 == 1)))
        .collect();
    Ok((0..1usize << n).all(|k| {
        // iterate over the submasks of k
        let mut j = k;
        loop {
            if !images[k].contains_subgroup(&images[j]) {
                return false;
            }
            if j == 0 {
                return true;
            }
            j = (j - 1) & k;
        }
    }))
}
