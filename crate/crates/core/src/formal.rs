//! Exact rational scalars, one- and two-variable Laurent objects, and truncated series.
//!
//! A [`TruncSeries`] knows the highest exponent it has determined. Asking for a
//! coefficient above that order is an [`FormalError::Underdetermined`] error rather
//! than a silent zero, which keeps residues of infinite binomial series honest.
//!
//! The three combinatorial identities used in the Zhu-algebra proofs are checked
//! here by full expansion ([`verify_dlm52`], [`verify_dlm53`], [`verify_alternating_sum`]).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational coefficient. `BigRational` keeps itself reduced with a positive denominator.
pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormalError {
    #[error("coefficient of x^{exponent} is beyond truncation order {order}")]
    Underdetermined { exponent: i64, order: i64 },
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-7/4"` and similar.
pub fn parse_scalar(s: &str) -> Result<Scalar, FormalError> {
    let s = s.trim();
    let bad = || FormalError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Scalar::new(n, d))
        }
        None => Ok(Scalar::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `Some(n)` when the scalar is an integer that fits in an i64.
pub fn as_i64(a: &Scalar) -> Option<i64> {
    if a.is_integer() {
        i64::try_from(a.to_integer()).ok()
    } else {
        None
    }
}

pub fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

pub fn factorial(k: u32) -> Scalar {
    let mut acc = BigInt::one();
    for t in 2..=k {
        acc *= t;
    }
    Scalar::from_integer(acc)
}

/// Generalized binomial a(a-1)...(a-k+1)/k!.
pub fn binom(a: &Scalar, k: u32) -> Scalar {
    let mut num = Scalar::one();
    for t in 0..k {
        num *= a - int(t as i64);
    }
    num / factorial(k)
}

pub fn binom_i(a: i64, k: i64) -> Scalar {
    if k < 0 {
        return Scalar::zero();
    }
    binom(&int(a), k as u32)
}

/// Σ_{j=0}^{trunc} binom(a,j) x^j, i.e. (1+x)^a known through x^trunc.
pub fn binom_expand(a: &Scalar, trunc: i64) -> TruncSeries {
    let mut coeffs = BTreeMap::new();
    let mut c = Scalar::one();
    for j in 0..=trunc.max(-1) {
        if j > 0 {
            c = c * (a - int(j - 1)) / int(j);
        }
        if !c.is_zero() {
            coeffs.insert(j, c.clone());
        }
    }
    TruncSeries { coeffs, lowest_exponent: 0, truncation_order: trunc }
}

fn insert_nonzero<K: Ord>(map: &mut BTreeMap<K, Scalar>, k: K, v: Scalar) {
    if v.is_zero() {
        map.remove(&k);
    } else {
        map.insert(k, v);
    }
}

fn accumulate<K: Ord + Clone>(map: &mut BTreeMap<K, Scalar>, k: K, v: Scalar) {
    if v.is_zero() {
        return;
    }
    let cur = map.remove(&k).unwrap_or_else(Scalar::zero);
    insert_nonzero(map, k, cur + v);
}

/// Finite Laurent polynomial in one variable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Scalar>,
    pub var: char,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { coeffs: BTreeMap::new(), var: 'x' }
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(e: i64, c: Scalar) -> Self {
        let mut p = Self::zero();
        insert_nonzero(&mut p.coeffs, e, c);
        p
    }

    /// (1+x)^n for n ≥ 0.
    pub fn one_plus_x_pow(n: u32) -> Self {
        let mut p = Self::zero();
        for j in 0..=n as i64 {
            insert_nonzero(&mut p.coeffs, j, binom_i(n as i64, j));
        }
        p
    }

    pub fn coeff(&self, e: i64) -> Scalar {
        self.coeffs.get(&e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(), var: self.var }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.coeffs {
            insert_nonzero(&mut out.coeffs, *e, c * s);
        }
        out
    }

    pub fn residue(&self) -> Scalar {
        self.coeff(-1)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            accumulate(&mut out.coeffs, *e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &rhs.scale(&-Scalar::one())
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a, x) in &self.coeffs {
            for (b, y) in &rhs.coeffs {
                accumulate(&mut out.coeffs, a + b, x * y);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(e, c)| format!("({c}){}^{e}", self.var)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Laurent series bounded below and known only through `truncation_order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: BTreeMap<i64, Scalar>,
    pub lowest_exponent: i64,
    pub truncation_order: i64,
}

impl TruncSeries {
    pub fn new(lowest_exponent: i64, truncation_order: i64) -> Self {
        TruncSeries { coeffs: BTreeMap::new(), lowest_exponent, truncation_order }
    }

    /// Exact polynomial, with coefficients determined through `truncation_order`.
    pub fn from_laurent(p: &LaurentPoly, truncation_order: i64) -> Self {
        let lowest = p.terms().next().map(|(e, _)| e).unwrap_or(0).min(truncation_order);
        let coeffs = p.terms().filter(|(e, _)| *e <= truncation_order).map(|(e, c)| (e, c.clone())).collect();
        TruncSeries { coeffs, lowest_exponent: lowest, truncation_order }
    }

    pub fn coeff(&self, e: i64) -> Result<Scalar, FormalError> {
        if e > self.truncation_order {
            return Err(FormalError::Underdetermined { exponent: e, order: self.truncation_order });
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(Scalar::zero))
    }

    pub fn set(&mut self, e: i64, c: Scalar) {
        assert!(e >= self.lowest_exponent && e <= self.truncation_order, "exponent {e} outside series range");
        insert_nonzero(&mut self.coeffs, e, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: i64) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            lowest_exponent: self.lowest_exponent + k,
            truncation_order: self.truncation_order + k,
        }
    }

    pub fn residue(&self) -> Result<Scalar, FormalError> {
        self.coeff(-1)
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.truncation_order.min(rhs.truncation_order);
        let mut out = TruncSeries::new(self.lowest_exponent.min(rhs.lowest_exponent), order);
        for (e, c) in self.terms().chain(rhs.terms()) {
            if e <= order {
                accumulate(&mut out.coeffs, e, c.clone());
            }
        }
        out
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    /// A product coefficient at e needs a_i b_{e-i} for every i, so it is known only
    /// while both factors are known: e ≤ min(ord_a + low_b, ord_b + low_a).
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        let order = (self.truncation_order + rhs.lowest_exponent).min(rhs.truncation_order + self.lowest_exponent);
        let mut out = TruncSeries::new(self.lowest_exponent + rhs.lowest_exponent, order);
        for (a, x) in self.terms() {
            for (b, y) in rhs.terms() {
                if a + b <= order {
                    accumulate(&mut out.coeffs, a + b, x * y);
                }
            }
        }
        out
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = -c.clone();
        }
        out
    }
}

/// Finite Laurent polynomial in two variables; keys are (exponent of x1, exponent of x2).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivariatePoly {
    coeffs: BTreeMap<(i64, i64), Scalar>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, e1: i64, e2: i64, c: Scalar) {
        accumulate(&mut self.coeffs, (e1, e2), c);
    }

    pub fn coeff(&self, e1: i64, e2: i64) -> Scalar {
        self.coeffs.get(&(e1, e2)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }
}

/// Σ_{m=0}^N C(m+N,N) [(-1)^m (1+x)^{N+1} - (-1)^N (1+x)^m] / x^{N+m+1} = 1
pub fn verify_dlm52(n: u32) -> bool {
    let ni = n as i64;
    let mut total = LaurentPoly::zero();
    for m in 0..=n {
        let mi = m as i64;
        let a = LaurentPoly::one_plus_x_pow(n + 1).scale(&sign(mi));
        let b = LaurentPoly::one_plus_x_pow(m).scale(&sign(ni));
        let term = (&a - &b).shift(-(ni + mi + 1)).scale(&binom_i(mi + ni, ni));
        total = &total + &term;
    }
    total == LaurentPoly::constant(Scalar::one())
}

/// The two-variable companion identity: for each m the bracket
/// Σ_{i=0}^{N-m} Σ_j C(-N-m-1,i) C(m,j) (-1)^i x2^{i+j} / x1^{m+i} - 1/x1^m,
/// weighted by (-1)^m C(m+N,N), sums to zero.
pub fn verify_dlm53(n: u32) -> bool {
    let ni = n as i64;
    let mut total = BivariatePoly::zero();
    for m in 0..=ni {
        let outer = sign(m) * binom_i(m + ni, ni);
        for i in 0..=(ni - m) {
            let ci = binom_i(-ni - m - 1, i) * sign(i);
            for j in 0..=m {
                total.add_term(-(m + i), i + j, &outer * &ci * binom_i(m, j));
            }
        }
        total.add_term(-m, 0, -outer);
    }
    total.is_zero()
}

/// Σ_{m=0}^{i} C(m+N,N) C(-N-m-1, i-m).
pub fn verify_alternating_sum(n: u32, i: u32) -> Scalar {
    let (ni, ii) = (n as i64, i as i64);
    (0..=ii).map(|m| binom_i(m + ni, ni) * binom_i(-ni - m - 1, ii - m)).fold(Scalar::zero(), |a, b| a + b)
}

/// Residue pairing Res_x g(x) Σ_k a_k x^{-k-1} = Σ_k g_k a_k over the finitely many k
/// from the series' lowest exponent up to `kmax`, where `kmax` bounds the nonzero a_k.
pub fn residue_pairing<T, F>(g: &TruncSeries, kmax: i64, mut a: F) -> Result<Vec<(Scalar, T)>, FormalError>
where
    F: FnMut(i64) -> T,
{
    let mut out = Vec::new();
    if kmax < g.lowest_exponent {
        return Ok(out);
    }
    if kmax > g.truncation_order {
        return Err(FormalError::Underdetermined { exponent: kmax, order: g.truncation_order });
    }
    for (k, c) in g.terms() {
        if k > kmax {
            break;
        }
        out.push((c.clone(), a(k)));
    }
    Ok(out)
}

/// x^p (1+x)^a known through exponent `order`.
pub fn shifted_binomial(p: i64, a: &Scalar, order: i64) -> TruncSeries {
    binom_expand(a, (order - p).max(0)).shift(p).with_order(order.max(p))
}

impl TruncSeries {
    fn with_order(mut self, order: i64) -> Self {
        if order < self.truncation_order {
            self.coeffs.retain(|e, _| *e <= order);
            self.truncation_order = order;
        }
        self
    }
}

pub fn scalar_to_string(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

pub fn is_negative(s: &Scalar) -> bool {
    s.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_examples() {
        assert_eq!(binom(&int(-2), 3), int(-4));
        assert_eq!(binom(&int(5), 0), int(1));
        assert_eq!(binom(&frac(1, 2), 2), frac(-1, 8));
    }

    #[test]
    fn binom_expand_examples() {
        let s = binom_expand(&int(-1), 3);
        let got: Vec<_> = (0..=3).map(|e| s.coeff(e).unwrap()).collect();
        assert_eq!(got, vec![int(1), int(-1), int(1), int(-1)]);
        let s = binom_expand(&int(2), 5);
        assert_eq!(s.terms().count(), 3);
        assert_eq!(s.coeff(5).unwrap(), int(0));
        let s = binom_expand(&frac(3, 2), 2);
        assert_eq!(s.coeff(2).unwrap(), frac(3, 8));
        assert!(s.coeff(3).is_err());
    }

    #[test]
    fn residue_examples() {
        let p = &LaurentPoly::monomial(-1, int(3)) + &LaurentPoly::constant(int(2));
        assert_eq!(p.residue(), int(3));
        assert_eq!(LaurentPoly::monomial(2, int(1)).residue(), int(0));
        assert_eq!(LaurentPoly::one_plus_x_pow(2).shift(-2).residue(), int(2));
        let s = binom_expand(&frac(1, 3), 0).shift(-2);
        assert!(matches!(s.residue(), Err(FormalError::Underdetermined { .. })));
    }

    #[test]
    fn product_tracks_tightest_order() {
        let a = binom_expand(&frac(1, 2), 4);
        let b = binom_expand(&frac(1, 2), 2).shift(-1);
        let c = &a * &b;
        assert_eq!(c.truncation_order, 1);
        assert_eq!(c.lowest_exponent, -1);
        // (1+x)^{1/2}(1+x)^{1/2} x^{-1} = x^{-1} + 1 through x^1
        assert_eq!(c.coeff(-1).unwrap(), int(1));
        assert_eq!(c.coeff(0).unwrap(), int(1));
        assert_eq!(c.coeff(1).unwrap(), int(0));
        assert!(c.coeff(2).is_err());
    }

    #[test]
    fn identity_small_cases() {
        assert!(verify_dlm52(0) && verify_dlm52(1));
        assert!(verify_dlm53(0) && verify_dlm53(1));
        assert_eq!(verify_alternating_sum(3, 0), int(1));
        assert_eq!(verify_alternating_sum(3, 2), int(0));
    }

    #[test]
    fn parse_roundtrip() {
        assert_eq!(parse_scalar("-7/4").unwrap(), frac(-7, 4));
        assert_eq!(scalar_to_string(&frac(6, 3)), "2");
        assert!(parse_scalar("1/0").is_err());
    }
}
