//! Thompson's group F as piecewise-linear homeomorphisms of `[0, 1]` with
//! dyadic breakpoints and power-of-two slopes, in exact arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThompsonError {
    #[error("breakpoints must start at (0,0) and end at (1,1)")]
    Endpoints,
    #[error("breakpoints must be strictly increasing in both coordinates")]
    NotIncreasing,
    #[error("slope between breakpoints {0} and {1} is not a power of 2")]
    BadSlope(usize, usize),
    #[error("p and q must be nonzero")]
    ZeroParameter,
    #[error("p and q must be coprime")]
    NotCoprime,
    #[error("sigma must have slope 2 at both endpoints")]
    BadSigma,
    #[error("character {chi} is not divisible by {by}")]
    NotDivisible { chi: i64, by: i64 },
    #[error("cannot parse dyadic rational {0:?}")]
    BadDyadic(String),
}

/// `mantissa / 2^exponent`, with an odd mantissa whenever the exponent is
/// positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exponent: u32) -> Self {
        let mut m = mantissa.into();
        let mut e = exponent;
        if m.is_zero() {
            e = 0;
        }
        while e > 0 && m.is_even() {
            m >>= 1;
            e -= 1;
        }
        Dyadic { mantissa: m, exponent: e }
    }

    pub fn int(n: i64) -> Self {
        Self::new(n, 0)
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn half() -> Self {
        Self::new(1, 1)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    fn scaled(&self, e: u32) -> BigInt {
        &self.mantissa << (e - self.exponent)
    }

    /// `self · 2^k` for any integer `k`.
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if k >= 0 {
            Dyadic::new(&self.mantissa << k as usize, self.exponent)
        } else {
            Dyadic::new(self.mantissa.clone(), self.exponent + k.unsigned_abs() as u32)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }
}

impl std::ops::Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, o: &Dyadic) -> Dyadic {
        let e = self.exponent.max(o.exponent);
        Dyadic::new(self.scaled(e) + o.scaled(e), e)
    }
}

impl std::ops::Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, o: &Dyadic) -> Dyadic {
        let e = self.exponent.max(o.exponent);
        Dyadic::new(self.scaled(e) - o.scaled(e), e)
    }
}

impl std::ops::Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &o.mantissa, self.exponent + o.exponent)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let e = self.exponent.max(o.exponent);
        self.scaled(e).cmp(&o.scaled(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else {
            write!(f, "{}/{}", self.mantissa, BigInt::one() << self.exponent as usize)
        }
    }
}

/// Accepts `n`, `n/d` with `d` a power of two, and `n/2^k`.
impl FromStr for Dyadic {
    type Err = ThompsonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ThompsonError::BadDyadic(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            None => (s, None),
            Some((n, d)) => (n.trim(), Some(d.trim())),
        };
        let num: BigInt = n.parse().map_err(|_| bad())?;
        let exp = match d {
            None => 0,
            Some(d) => match d.strip_prefix("2^") {
                Some(k) => k.parse::<u32>().map_err(|_| bad())?,
                None => {
                    let d: u64 = d.parse().map_err(|_| bad())?;
                    if d == 0 || !d.is_power_of_two() {
                        return Err(bad());
                    }
                    d.trailing_zeros()
                }
            },
        };
        Ok(Dyadic::new(num, exp))
    }
}

/// `log₂(dy / dx)` when the ratio of two positive dyadics is a power of two.
fn log2_ratio(dy: &Dyadic, dx: &Dyadic) -> Option<i64> {
    if !dy.is_positive() || !dx.is_positive() {
        return None;
    }
    let (a, b) = (&dy.mantissa, &dx.mantissa);
    let shift = dx.exponent as i64 - dy.exponent as i64;
    // dy/dx = (a/b) · 2^shift, and a, b are odd or the exponents are zero
    let (ta, tb) = (a.trailing_zeros().unwrap_or(0), b.trailing_zeros().unwrap_or(0));
    if (a >> ta as usize) != (b >> tb as usize) {
        return None;
    }
    Some(ta as i64 - tb as i64 + shift)
}

/// An element of F given by its breakpoints, always in canonical form: every
/// listed interior point is a genuine change of slope.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicPL {
    points: Vec<(Dyadic, Dyadic)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct CharacterPair {
    pub chi0: i64,
    pub chi1: i64,
}

impl std::ops::Add for CharacterPair {
    type Output = CharacterPair;
    fn add(self, o: CharacterPair) -> CharacterPair {
        CharacterPair {
            chi0: self.chi0 + o.chi0,
            chi1: self.chi1 + o.chi1,
        }
    }
}

impl DyadicPL {
    pub fn identity() -> Self {
        DyadicPL {
            points: vec![(Dyadic::zero(), Dyadic::zero()), (Dyadic::one(), Dyadic::one())],
        }
    }

    /// Validates the breakpoints and drops redundant (collinear) ones.
    pub fn new(points: Vec<(Dyadic, Dyadic)>) -> Result<Self, ThompsonError> {
        let zero = (Dyadic::zero(), Dyadic::zero());
        let one = (Dyadic::one(), Dyadic::one());
        if points.len() < 2 || points[0] != zero || points[points.len() - 1] != one {
            return Err(ThompsonError::Endpoints);
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(ThompsonError::NotIncreasing);
            }
            if log2_ratio(&(&w[1].1 - &w[0].1), &(&w[1].0 - &w[0].0)).is_none() {
                return Err(ThompsonError::BadSlope(i, i + 1));
            }
        }
        Ok(Self::canonical(points))
    }

    fn canonical(points: Vec<(Dyadic, Dyadic)>) -> Self {
        let mut out: Vec<(Dyadic, Dyadic)> = Vec::with_capacity(points.len());
        for pt in points {
            if out.len() >= 2 {
                let a = &out[out.len() - 2];
                let b = &out[out.len() - 1];
                let s1 = log2_ratio(&(&b.1 - &a.1), &(&b.0 - &a.0));
                let s2 = log2_ratio(&(&pt.1 - &b.1), &(&pt.0 - &b.0));
                if s1 == s2 {
                    out.pop();
                }
            }
            out.push(pt);
        }
        DyadicPL { points: out }
    }

    pub fn breakpoints(&self) -> &[(Dyadic, Dyadic)] {
        &self.points
    }

    /// `log₂` of the slope on each segment.
    pub fn slopes(&self) -> Vec<i64> {
        self.points
            .windows(2)
            .map(|w| log2_ratio(&(&w[1].1 - &w[0].1), &(&w[1].0 - &w[0].0)).expect("validated slope"))
            .collect()
    }

    fn eval_on(points: &[(Dyadic, Dyadic)], x: &Dyadic, swap: bool) -> Dyadic {
        let key = |p: &(Dyadic, Dyadic)| if swap { p.1.clone() } else { p.0.clone() };
        let val = |p: &(Dyadic, Dyadic)| if swap { p.0.clone() } else { p.1.clone() };
        let idx = points.partition_point(|p| key(p) <= *x).clamp(1, points.len() - 1);
        let (a, b) = (&points[idx - 1], &points[idx]);
        let (ka, kb, va, vb) = (key(a), key(b), val(a), val(b));
        let slope = log2_ratio(&(&vb - &va), &(&kb - &ka)).expect("validated slope");
        &va + &(x - &ka).mul_pow2(slope)
    }

    /// `f(x)` for `x ∈ [0, 1]`.
    pub fn evaluate(&self, x: &Dyadic) -> Dyadic {
        Self::eval_on(&self.points, x, false)
    }

    /// `f⁻¹(y)` without building the inverse.
    pub fn preimage(&self, y: &Dyadic) -> Dyadic {
        Self::eval_on(&self.points, y, true)
    }

    pub fn is_identity(&self) -> bool {
        self.points.len() == 2
    }

    pub fn fixes(&self, x: &Dyadic) -> bool {
        self.evaluate(x) == *x
    }
}

impl fmt::Display for DyadicPL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|(x, y)| format!("({x},{y})")).collect();
        write!(f, "[{}]", pts.join(","))
    }
}

/// `f ∘ g` (apply `g` first).
pub fn compose(f: &DyadicPL, g: &DyadicPL) -> DyadicPL {
    let mut xs: Vec<Dyadic> = g.points.iter().map(|p| p.0.clone()).collect();
    xs.extend(f.points.iter().map(|p| g.preimage(&p.0)));
    xs.sort();
    xs.dedup();
    let points = xs
        .into_iter()
        .map(|x| {
            let y = f.evaluate(&g.evaluate(&x));
            (x, y)
        })
        .collect();
    DyadicPL::canonical(points)
}

pub fn inverse(f: &DyadicPL) -> DyadicPL {
    DyadicPL {
        points: f.points.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
    }
}

/// `f^n` for any integer `n`, by repeated squaring.
pub fn power(f: &DyadicPL, n: i64) -> DyadicPL {
    let mut base = if n < 0 { inverse(f) } else { f.clone() };
    let mut e = n.unsigned_abs();
    let mut acc = DyadicPL::identity();
    while e > 0 {
        if e & 1 == 1 {
            acc = compose(&acc, &base);
        }
        base = compose(&base, &base);
        e >>= 1;
    }
    acc
}

/// `f g f⁻¹ g⁻¹`.
pub fn commutator(f: &DyadicPL, g: &DyadicPL) -> DyadicPL {
    compose(&compose(f, g), &compose(&inverse(f), &inverse(g)))
}

pub fn characters(f: &DyadicPL) -> CharacterPair {
    let s = f.slopes();
    CharacterPair {
        chi0: s[0],
        chi1: s[s.len() - 1],
    }
}

/// Membership in `N_{p,q} = ker(pχ₀ − qχ₁)`.
#[allow(non_snake_case)]
pub fn in_Npq(f: &DyadicPL, p: i64, q: i64) -> Result<bool, ThompsonError> {
    check_pq(p, q)?;
    let c = characters(f);
    Ok(p * c.chi0 == q * c.chi1)
}

fn check_pq(p: i64, q: i64) -> Result<(), ThompsonError> {
    if p == 0 || q == 0 {
        return Err(ThompsonError::ZeroParameter);
    }
    if p.unsigned_abs().gcd(&q.unsigned_abs()) != 1 {
        return Err(ThompsonError::NotCoprime);
    }
    Ok(())
}

/// Copy of `f` squeezed into `[0, 1/2]`, identity on `[1/2, 1]`.
pub fn embed_i0(f: &DyadicPL) -> DyadicPL {
    let mut points: Vec<_> = f.points.iter().map(|(x, y)| (x.mul_pow2(-1), y.mul_pow2(-1))).collect();
    points.push((Dyadic::one(), Dyadic::one()));
    DyadicPL::canonical(points)
}

/// Copy of `f` squeezed into `[1/2, 1]`, identity on `[0, 1/2]`.
pub fn embed_i1(f: &DyadicPL) -> DyadicPL {
    let h = Dyadic::half();
    let mut points = vec![(Dyadic::zero(), Dyadic::zero())];
    points.extend(f.points.iter().map(|(x, y)| (&h + &x.mul_pow2(-1), &h + &y.mul_pow2(-1))));
    DyadicPL::canonical(points)
}

fn check_sigma(sigma: &DyadicPL) -> Result<(), ThompsonError> {
    if characters(sigma) != (CharacterPair { chi0: 1, chi1: 1 }) {
        return Err(ThompsonError::BadSigma);
    }
    Ok(())
}

fn exact_div(chi: i64, by: i64) -> Result<i64, ThompsonError> {
    if chi % by != 0 {
        return Err(ThompsonError::NotDivisible { chi, by });
    }
    Ok(chi / by)
}

/// `j₀(f) = i₀(f) · i₁(σ)^{pχ₀(f)/q}`, an element of `N_{p,q}` fixing 1/2.
pub fn build_j0(f: &DyadicPL, p: i64, q: i64, sigma: &DyadicPL) -> Result<DyadicPL, ThompsonError> {
    check_pq(p, q)?;
    check_sigma(sigma)?;
    let n = p * exact_div(characters(f).chi0, q)?;
    Ok(compose(&embed_i0(f), &power(&embed_i1(sigma), n)))
}

/// `j₁(f) = i₀(σ)^{qχ₁(f)/p} · i₁(f)`, an element of `N_{p,q}` fixing 1/2.
pub fn build_j1(f: &DyadicPL, p: i64, q: i64, sigma: &DyadicPL) -> Result<DyadicPL, ThompsonError> {
    check_pq(p, q)?;
    check_sigma(sigma)?;
    let n = q * exact_div(characters(f).chi1, p)?;
    Ok(compose(&power(&embed_i0(sigma), n), &embed_i1(f)))
}

/// `[F, F]` is the common kernel of `χ₀` and `χ₁`.
pub fn in_commutator_subgroup(f: &DyadicPL) -> bool {
    characters(f) == CharacterPair::default()
}

fn d(n: i64, e: u32) -> Dyadic {
    Dyadic::new(n, e)
}

/// Breakpoints `(0,0), (1/2,1/4), (3/4,1/2), (1,1)`; characters `(−1, 1)`.
pub fn standard_a() -> DyadicPL {
    DyadicPL::new(vec![(d(0, 0), d(0, 0)), (d(1, 1), d(1, 2)), (d(3, 2), d(1, 1)), (d(1, 0), d(1, 0))])
        .expect("static breakpoints")
}

/// `i₁(A)`; characters `(0, 1)`.
pub fn standard_b() -> DyadicPL {
    embed_i1(&standard_a())
}

/// `A⁻¹ B²`, which has slope 2 at both endpoints.
pub fn standard_sigma() -> DyadicPL {
    compose(&inverse(&standard_a()), &power(&standard_b(), 2))
}
