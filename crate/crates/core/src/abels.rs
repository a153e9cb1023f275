//! Exact arithmetic for Abels' matrix groups over `Z[1/p]`: the scalars, upper
//! triangular matrices with `p`-power diagonals, Hensel lifting, and the
//! eigenline subgroups `E_i ⊂ Z[1/p]²` of the companion matrix `M₀` of
//! `X² + p³X − 1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelsError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = 2: the eigenvalues of M0 coincide mod 2")]
    EigenvaluesCongruent,
    #[error("operands use different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("matrix size {0} outside 3..=5")]
    BadSize(usize),
    #[error("index ({i}, {j}) is not strictly upper triangular in size {n}")]
    BadIndex { i: usize, j: usize, n: usize },
    #[error("matrix violates the group shape: {0}")]
    BadShape(String),
    #[error("Hensel criterion fails: v(f(a)) = {value}, v(f'(a)) = {derivative}")]
    HenselCriterion { value: u64, derivative: u64 },
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("eigenline index must be 1 or 2, got {0}")]
    BadEigenIndex(u8),
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_big(p: u64, k: u64) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// `p`-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// Element `numerator / p^exponent` of `Z[1/p]`, kept with `p ∤ numerator`
/// whenever the exponent is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZInvP {
    num: BigInt,
    exp: u64,
    p: u64,
}

impl ZInvP {
    pub fn new(num: impl Into<BigInt>, exp: u64, p: u64) -> Self {
        let mut x = ZInvP { num: num.into(), exp, p };
        x.canonicalize();
        x
    }

    pub fn from_int(n: impl Into<BigInt>, p: u64) -> Self {
        ZInvP { num: n.into(), exp: 0, p }
    }

    pub fn zero(p: u64) -> Self {
        Self::from_int(0, p)
    }

    pub fn one(p: u64) -> Self {
        Self::from_int(1, p)
    }

    /// `p^k` for any integer `k`.
    pub fn pow_p(k: i64, p: u64) -> Self {
        if k >= 0 {
            Self::from_int(pow_big(p, k as u64), p)
        } else {
            ZInvP { num: BigInt::one(), exp: k.unsigned_abs(), p }
        }
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let p = BigInt::from(self.p);
        while self.exp > 0 {
            let (q, r) = self.num.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            self.num = q;
            self.exp -= 1;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    /// `p`-adic valuation of the value; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        valuation(&self.num, self.p).map(|v| v as i64 - self.exp as i64)
    }

    /// Inverse of a unit `±p^k`; `None` for non-units.
    pub fn unit_inverse(&self) -> Option<Self> {
        let v = self.valuation()?;
        let unit = &self.num / pow_big(self.p, v.max(0) as u64);
        if unit.abs() != BigInt::one() {
            return None;
        }
        Some(if unit.is_negative() { -Self::pow_p(-v, self.p) } else { Self::pow_p(-v, self.p) })
    }

    fn lift(&self, exp: u64) -> BigInt {
        &self.num * pow_big(self.p, exp - self.exp)
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, AbelsError> {
        self.same_prime(o)?;
        let e = self.exp.max(o.exp);
        Ok(Self::new(self.lift(e) + o.lift(e), e, self.p))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, AbelsError> {
        self.same_prime(o)?;
        Ok(Self::new(&self.num * &o.num, self.exp + o.exp, self.p))
    }

    fn same_prime(&self, o: &Self) -> Result<(), AbelsError> {
        if self.p == o.p {
            Ok(())
        } else {
            Err(AbelsError::PrimeMismatch(self.p, o.p))
        }
    }
}

impl fmt::Display for ZInvP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exp {
            0 => write!(f, "{}", self.num),
            1 => write!(f, "{}/{}", self.num, self.p),
            e => write!(f, "{}/{}^{}", self.num, self.p, e),
        }
    }
}

// The operator forms panic on mixed primes; use `try_add`/`try_mul` when the
// operands come from unchecked input.
impl std::ops::Add for &ZInvP {
    type Output = ZInvP;
    fn add(self, o: &ZInvP) -> ZInvP {
        self.try_add(o).expect("ZInvP operands over different primes")
    }
}

impl std::ops::Mul for &ZInvP {
    type Output = ZInvP;
    fn mul(self, o: &ZInvP) -> ZInvP {
        self.try_mul(o).expect("ZInvP operands over different primes")
    }
}

impl std::ops::Neg for &ZInvP {
    type Output = ZInvP;
    fn neg(self) -> ZInvP {
        ZInvP { num: -&self.num, exp: self.exp, p: self.p }
    }
}

impl std::ops::Neg for ZInvP {
    type Output = ZInvP;
    fn neg(self) -> ZInvP {
        -&self
    }
}

impl std::ops::Sub for &ZInvP {
    type Output = ZInvP;
    fn sub(self, o: &ZInvP) -> ZInvP {
        self + &(-o)
    }
}

pub fn zinvp_add(a: &ZInvP, b: &ZInvP) -> Result<ZInvP, AbelsError> {
    a.try_add(b)
}

pub fn zinvp_mul(a: &ZInvP, b: &ZInvP) -> Result<ZInvP, AbelsError> {
    a.try_mul(b)
}

pub fn zinvp_neg(a: &ZInvP) -> ZInvP {
    -a
}

/// Residue modulo `p^precision`, in `[0, p^precision)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdicApprox {
    residue: BigInt,
    precision: u32,
    p: u64,
}

impl PAdicApprox {
    pub fn new(value: impl Into<BigInt>, precision: u32, p: u64) -> Result<Self, AbelsError> {
        if precision == 0 {
            return Err(AbelsError::ZeroPrecision);
        }
        let residue = value.into().mod_floor(&pow_big(p, precision as u64));
        Ok(PAdicApprox { residue, precision, p })
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> BigInt {
        pow_big(self.p, self.precision as u64)
    }

    /// Truncation to a lower precision.
    pub fn reduce_to(&self, k: u32) -> Result<Self, AbelsError> {
        Self::new(self.residue.clone(), k.min(self.precision), self.p)
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.p, self.precision)
    }
}

/// Evaluates a polynomial given by coefficients in increasing degree.
pub fn poly_eval(poly: &[BigInt], x: &BigInt) -> BigInt {
    poly.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn poly_derivative(poly: &[BigInt]) -> Vec<BigInt> {
    poly.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

/// Lifts `root0` to a root of `poly` modulo `p^k` by Newton iteration.
///
/// With `d = v(f'(a₀))` and `v(f(a₀)) > 2d`, there is a unique `p`-adic root
/// `r` with `v(r − a₀) > d`; the result is `r mod p^k`, so lifts at different
/// precisions are compatible.
pub fn hensel_lift(poly: &[BigInt], root0: &BigInt, p: u64, k: u32) -> Result<PAdicApprox, AbelsError> {
    if k == 0 {
        return Err(AbelsError::ZeroPrecision);
    }
    if !is_prime(p) {
        return Err(AbelsError::NotPrime(p));
    }
    let fa = poly_eval(poly, root0);
    if fa.is_zero() {
        return PAdicApprox::new(root0.clone(), k, p);
    }
    let dpoly = poly_derivative(poly);
    let vf = valuation(&fa, p).expect("nonzero");
    let d = match valuation(&poly_eval(&dpoly, root0), p) {
        Some(d) if vf > 2 * d => d,
        d => {
            return Err(AbelsError::HenselCriterion {
                value: vf,
                derivative: d.unwrap_or(u64::MAX),
            })
        }
    };
    let target = k as u64 + d;
    let modulus = pow_big(p, target + d + 2);
    let pd = pow_big(p, d);
    let mut a = root0.mod_floor(&modulus);
    loop {
        let fa = poly_eval(poly, &a).mod_floor(&modulus);
        if fa.is_zero() || valuation(&fa, p).expect("nonzero") >= target {
            return PAdicApprox::new(a, k, p);
        }
        // f'(a) = p^d · u with u a unit; step by (f(a)/p^d) · u⁻¹.
        let u = poly_eval(&dpoly, &a) / &pd;
        let u_inv = mod_inverse(&u, &modulus, p);
        let step = (fa / &pd) * u_inv;
        a = (a - step).mod_floor(&modulus);
    }
}

/// Inverse of a `p`-adic unit modulo `modulus = p^N`.
fn mod_inverse(u: &BigInt, modulus: &BigInt, p: u64) -> BigInt {
    let g = u.mod_floor(modulus).extended_gcd(modulus);
    debug_assert!(g.gcd.is_one(), "not a unit mod {p}");
    g.x.mod_floor(modulus)
}

/// `X² + p³X − 1`, low degree first.
pub fn m0_polynomial(p: u64) -> Vec<BigInt> {
    vec![BigInt::from(-1), pow_big(p, 3), BigInt::one()]
}

/// Companion matrix `[[0, 1], [1, −p³]]` of `X² + p³X − 1`.
pub fn m0_matrix(p: u64) -> [[BigInt; 2]; 2] {
    [[BigInt::zero(), BigInt::one()], [BigInt::one(), -pow_big(p, 3)]]
}

/// Eigen-decomposition of `M₀` modulo `p^k`. `λ₁ ≡ 1` and `λ₂ ≡ −1 (mod p)`;
/// the eigenvector for `λ` is `(1, λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenData {
    pub p: u64,
    pub lambda1: PAdicApprox,
    pub lambda2: PAdicApprox,
    pub v1: (PAdicApprox, PAdicApprox),
    pub v2: (PAdicApprox, PAdicApprox),
    /// `p⁶ + 4` is not a perfect square, so `M₀` is not diagonalizable over Q.
    pub discriminant_nonsquare: bool,
}

impl EigenData {
    pub fn precision(&self) -> u32 {
        self.lambda1.precision
    }

    pub fn lambda(&self, i: u8) -> Result<&PAdicApprox, AbelsError> {
        match i {
            1 => Ok(&self.lambda1),
            2 => Ok(&self.lambda2),
            _ => Err(AbelsError::BadEigenIndex(i)),
        }
    }
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &r * &r == *n
    }
}

pub fn m0_data(p: u64, k: u32) -> Result<EigenData, AbelsError> {
    if !is_prime(p) {
        return Err(AbelsError::NotPrime(p));
    }
    if p == 2 {
        return Err(AbelsError::EigenvaluesCongruent);
    }
    let disc = pow_big(p, 6) + 4;
    let poly = m0_polynomial(p);
    let lambda1 = hensel_lift(&poly, &BigInt::one(), p, k)?;
    let lambda2 = hensel_lift(&poly, &BigInt::from(-1), p, k)?;
    let one = PAdicApprox::new(1, k, p)?;
    Ok(EigenData {
        p,
        v1: (one.clone(), lambda1.clone()),
        v2: (one, lambda2.clone()),
        lambda1,
        lambda2,
        discriminant_nonsquare: !is_perfect_square(&disc),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    Member,
    NonMember,
    Undetermined,
}

/// Writes `(a, b) = (A, B) / p^m` with integers `A`, `B` and minimal `m`.
fn common_denominator(a: &ZInvP, b: &ZInvP) -> (BigInt, BigInt, u64) {
    let m = a.exp.max(b.exp);
    (a.lift(m), b.lift(m), m)
}

/// Membership of `(a, b)` in `p^{−n}Z² + E_i`.
///
/// In the eigenbasis, `(a, b) = c₁v₁ + c₂v₂` with `c_{3−i}(λ_i − λ_{3−i}) = b − λ_i a`.
/// Since the eigenvalues differ mod `p`, membership is `v_p(B − λ_i A) ≥ m − n`.
/// The precision rule asks for `k ≥ m − n + 1` to read the polar part.
pub fn shifted_membership(a: &ZInvP, b: &ZInvP, i: u8, n: u64, data: &EigenData) -> Result<Membership, AbelsError> {
    let lambda = data.lambda(i)?;
    for x in [a, b] {
        if x.p != data.p {
            return Err(AbelsError::PrimeMismatch(x.p, data.p));
        }
    }
    let (big_a, big_b, m) = common_denominator(a, b);
    if m <= n {
        return Ok(Membership::Member);
    }
    let need = m - n;
    if (data.precision() as u64) < need + 1 {
        return Ok(Membership::Undetermined);
    }
    let residual = (big_b - &lambda.residue * big_a).mod_floor(&pow_big(data.p, need));
    Ok(if residual.is_zero() { Membership::Member } else { Membership::NonMember })
}

pub fn eigenline_membership(a: &ZInvP, b: &ZInvP, i: u8, data: &EigenData) -> Result<Membership, AbelsError> {
    shifted_membership(a, b, i, 0, data)
}

/// `M₀ · (a, b) = (b, a − p³b)`.
pub fn m0_apply(a: &ZInvP, b: &ZInvP) -> (ZInvP, ZInvP) {
    let p3 = ZInvP::from_int(pow_big(a.p, 3), a.p);
    (b.clone(), a - &(&p3 * b))
}

/// A random element of `p^{−n}Z² + E_i` whose polar part in the `v_i`
/// direction has order at most `p^m`.
pub fn sample_shifted_member(
    rng: &mut impl Rng,
    i: u8,
    n: u64,
    m: u64,
    data: &EigenData,
) -> Result<(ZInvP, ZInvP), AbelsError> {
    let p = data.p;
    let lambda = data.lambda(i)?;
    let pm = pow_big(p, m);
    let c = BigInt::from(rng.gen_range(0..u64::MAX)).mod_floor(&pm);
    let lam = lambda.residue.mod_floor(&pm);
    let eig_a = ZInvP::new(c.clone(), m, p);
    let eig_b = ZInvP::new(c * lam, m, p);
    let za = ZInvP::new(rng.gen_range(-1000i64..=1000), n, p);
    let zb = ZInvP::new(rng.gen_range(-1000i64..=1000), n, p);
    Ok((&eig_a + &za, &eig_b + &zb))
}

/// Randomized subgroup checks for `E₁`, `E₂` and the shifted groups
/// `p^{−n}Z² + E_i` (`n ≤ 3`): membership of sampled elements, closure under
/// addition, negation and `M₀`, and nesting in `n`. Elements are sampled with
/// polar order below the working precision so that every verdict is decided.
pub fn eigenline_invariance_check(data: &EigenData, samples: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = data.precision() as u64;
    if k < 2 {
        return true;
    }
    let decided = |r: Result<Membership, AbelsError>| r.ok();
    for _ in 0..samples {
        let i = rng.gen_range(1..=2u8);
        let n = rng.gen_range(0..=3u64);
        let (m1, m2) = (rng.gen_range(1..k), rng.gen_range(1..k));
        let (Ok(x), Ok(y)) = (
            sample_shifted_member(&mut rng, i, n, m1, data),
            sample_shifted_member(&mut rng, i, n, m2, data),
        ) else {
            return false;
        };
        let sum = (&x.0 + &y.0, &x.1 + &y.1);
        let neg = (-&x.0, -&x.1);
        let image = m0_apply(&x.0, &x.1);
        for (a, b) in [&x, &y, &sum, &neg, &image] {
            let here = decided(shifted_membership(a, b, i, n, data));
            if here != Some(Membership::Member) && here != Some(Membership::Undetermined) {
                return false;
            }
            // p^{−n}Z² + E_i ⊆ p^{−(n+1)}Z² + E_i
            if here == Some(Membership::Member)
                && decided(shifted_membership(a, b, i, n + 1, data)) == Some(Membership::NonMember)
            {
                return false;
            }
        }
        if decided(shifted_membership(&x.0, &x.1, i, n, data)) != Some(Membership::Member) {
            return false;
        }
    }
    true
}

/// Upper triangular `n × n` matrix over `Z[1/p]` (`3 ≤ n ≤ 5`) with corner
/// diagonal entries 1 and interior diagonal entries integral powers of `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelsMatrix {
    n: usize,
    p: u64,
    entries: Vec<ZInvP>,
}

impl AbelsMatrix {
    pub fn identity(n: usize, p: u64) -> Result<Self, AbelsError> {
        if !(3..=5).contains(&n) {
            return Err(AbelsError::BadSize(n));
        }
        let entries = (0..n * n)
            .map(|t| if t / n == t % n { ZInvP::one(p) } else { ZInvP::zero(p) })
            .collect();
        Ok(AbelsMatrix { n, p, entries })
    }

    /// Builds from rows, checking the group shape.
    pub fn from_rows(rows: Vec<Vec<ZInvP>>, p: u64) -> Result<Self, AbelsError> {
        let n = rows.len();
        if !(3..=5).contains(&n) {
            return Err(AbelsError::BadSize(n));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(AbelsError::BadShape("rows of unequal length".into()));
        }
        let entries: Vec<ZInvP> = rows.into_iter().flatten().collect();
        if let Some(x) = entries.iter().find(|x| x.p != p) {
            return Err(AbelsError::PrimeMismatch(x.p, p));
        }
        let m = AbelsMatrix { n, p, entries };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), AbelsError> {
        let n = self.n;
        for i in 0..n {
            for j in 0..i {
                if !self.get(i, j).is_zero() {
                    return Err(AbelsError::BadShape(format!("nonzero entry below diagonal at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        for &c in &[0, n - 1] {
            if *self.get(c, c) != ZInvP::one(self.p) {
                return Err(AbelsError::BadShape(format!("corner ({0}, {0}) must be 1", c + 1)));
            }
        }
        for i in 1..n - 1 {
            let d = self.get(i, i);
            let is_power = d.unit_inverse().is_some() && d.numerator().is_positive();
            if !is_power {
                return Err(AbelsError::BadShape(format!("diagonal ({0}, {0}) = {d} is not a power of p", i + 1)));
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Zero-based access.
    pub fn get(&self, i: usize, j: usize) -> &ZInvP {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<ZInvP>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.p).expect("valid size")
    }
}

impl fmt::Display for AbelsMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// `e_{ij}^a = 1 + a·E_{ij}` with one-based `i < j`.
pub fn elementary(i: usize, j: usize, a: &ZInvP, n: usize) -> Result<AbelsMatrix, AbelsError> {
    let mut m = AbelsMatrix::identity(n, a.p)?;
    if !(1 <= i && i < j && j <= n) {
        return Err(AbelsError::BadIndex { i, j, n });
    }
    m.entries[(i - 1) * n + (j - 1)] = a.clone();
    Ok(m)
}

/// Diagonal matrix with `p^{exps[t]}` in interior position `t + 2`.
pub fn diagonal(exps: &[i64], n: usize, p: u64) -> Result<AbelsMatrix, AbelsError> {
    let mut m = AbelsMatrix::identity(n, p)?;
    if exps.len() != n - 2 {
        return Err(AbelsError::BadShape(format!("{} interior exponents for size {n}", exps.len())));
    }
    for (t, &e) in exps.iter().enumerate() {
        m.entries[(t + 1) * n + t + 1] = ZInvP::pow_p(e, p);
    }
    Ok(m)
}

pub fn mat_mul(a: &AbelsMatrix, b: &AbelsMatrix) -> Result<AbelsMatrix, AbelsError> {
    if a.n != b.n {
        return Err(AbelsError::BadSize(b.n));
    }
    if a.p != b.p {
        return Err(AbelsError::PrimeMismatch(a.p, b.p));
    }
    let n = a.n;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZInvP::zero(a.p);
            // upper triangular: only i ≤ t ≤ j contributes
            for t in i..=j.max(i) {
                if t > j {
                    break;
                }
                let (x, y) = (a.get(i, t), b.get(t, j));
                if !x.is_zero() && !y.is_zero() {
                    acc = &acc + &(x * y);
                }
            }
            entries.push(acc);
        }
    }
    Ok(AbelsMatrix { n, p: a.p, entries })
}

/// Inverse by back substitution; diagonal entries are units of `Z[1/p]`.
pub fn mat_inv(a: &AbelsMatrix) -> Result<AbelsMatrix, AbelsError> {
    let n = a.n;
    let p = a.p;
    let diag_inv: Vec<ZInvP> = (0..n)
        .map(|i| {
            a.get(i, i)
                .unit_inverse()
                .ok_or_else(|| AbelsError::BadShape(format!("diagonal ({0}, {0}) is not a unit", i + 1)))
        })
        .collect::<Result<_, _>>()?;
    let mut inv = vec![ZInvP::zero(p); n * n];
    for j in 0..n {
        inv[j * n + j] = diag_inv[j].clone();
        for i in (0..j).rev() {
            // (A X)_{ij} = 0 ⇒ X_{ij} = −a_{ii}⁻¹ Σ_{i<t≤j} a_{it} X_{tj}
            let mut acc = ZInvP::zero(p);
            for t in i + 1..=j {
                let x = a.get(i, t);
                if !x.is_zero() {
                    acc = &acc + &(x * &inv[t * n + j]);
                }
            }
            inv[i * n + j] = -(&diag_inv[i] * &acc);
        }
    }
    Ok(AbelsMatrix { n, p, entries: inv })
}

/// `[x, y] = x y x⁻¹ y⁻¹`.
pub fn commutator(x: &AbelsMatrix, y: &AbelsMatrix) -> Result<AbelsMatrix, AbelsError> {
    let xy = mat_mul(x, y)?;
    mat_mul(&mat_mul(&xy, &mat_inv(x)?)?, &mat_inv(y)?)
}

/// Whether a 5 × 5 matrix lies in the subgroup whose last two rows are those
/// of the identity.
pub fn in_variant_group(m: &AbelsMatrix) -> bool {
    m.n == 5 && (3..5).all(|i| (0..5).all(|j| *m.get(i, j) == if i == j { ZInvP::one(m.p) } else { ZInvP::zero(m.p) }))
}

/// The centre map `(a, b) ↦ e₁₄^a · e₁₅^b` of the 5 × 5 variant.
pub fn center_element(a: &ZInvP, b: &ZInvP) -> Result<AbelsMatrix, AbelsError> {
    mat_mul(&elementary(1, 4, a, 5)?, &elementary(1, 5, b, 5)?)
}

/// Whether `m` has the form `e₁₄^a · e₁₅^b`.
pub fn is_center_form(m: &AbelsMatrix) -> bool {
    let id = AbelsMatrix::identity(m.n, m.p).expect("valid size");
    m.n == 5
        && (0..5).all(|i| (0..5).all(|j| (i, j) == (0, 3) || (i, j) == (0, 4) || m.get(i, j) == id.get(i, j)))
}

/// Generators of the 5 × 5 variant: `e₁₂, e₂₃, e₃₄, e₃₅, e₂₄, e₂₅` with
/// entry 1, and `diag(1, p, 1, 1, 1)`, `diag(1, 1, p, 1, 1)`. Conjugating
/// the unipotent generators by the diagonal ones reaches all of `Z[1/p]` in
/// each position, and commutators fill in row 1.
pub fn variant_generators(p: u64) -> Vec<AbelsMatrix> {
    let one = ZInvP::one(p);
    let mut g: Vec<AbelsMatrix> = [(1, 2), (2, 3), (3, 4), (3, 5), (2, 4), (2, 5)]
        .iter()
        .map(|&(i, j)| elementary(i, j, &one, 5).expect("valid index"))
        .collect();
    let mut d2 = AbelsMatrix::identity(5, p).expect("valid size");
    d2.entries[6] = ZInvP::from_int(p, p);
    let mut d3 = AbelsMatrix::identity(5, p).expect("valid size");
    d3.entries[12] = ZInvP::from_int(p, p);
    g.push(d2);
    g.push(d3);
    g
}

pub fn commutes(x: &AbelsMatrix, y: &AbelsMatrix) -> bool {
    matches!((mat_mul(x, y), mat_mul(y, x)), (Ok(a), Ok(b)) if a == b)
}

/// Whether `m` commutes with every generator of the 5 × 5 variant.
pub fn is_central_in_variant(m: &AbelsMatrix) -> bool {
    variant_generators(m.p).iter().all(|g| commutes(m, g))
}

/// `p`-adic residual `poly(r) mod p^k`, as a small certificate.
pub fn residual(poly: &[BigInt], r: &PAdicApprox) -> BigInt {
    poly_eval(poly, &r.residue).mod_floor(&r.modulus())
}

/// Convenience for reports: a residue that fits in 128 bits.
pub fn residue_u128(r: &PAdicApprox) -> Option<u128> {
    r.residue.to_u128()
}
