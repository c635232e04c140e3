//! Exact arithmetic in the commutative ring Q[sqrt(2), sqrt(pi)].
//!
//! Every closed-form probability, expectation, skew normalization and moment
//! handled by this crate is a finite sum of monomials `sqrt2^s * sqrtpi^p`
//! (`s` in {0,1} after reduction, `p >= 0`) with arbitrary-precision rational
//! coefficients. `pi` itself is `sqrtpi^2`, so half-integer gamma values,
//! `sqrt(2)`-mixtures and `pi`-polynomials all live in one ring.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::mpfloat::MpFloat;
use crate::Result;

/// Monomial key: exponent of sqrt(2) (reduced mod 2) and of sqrt(pi).
type Key = (u8, u32);

/// An element of Q[sqrt(2), sqrt(pi)] in canonical form: no zero coefficients,
/// sqrt(2)-exponent reduced modulo 2 with the integer part folded into the
/// rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactValue {
    terms: BTreeMap<Key, BigRational>,
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ExactValue {
    pub fn zero() -> Self {
        ExactValue { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        ExactValue::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        ExactValue::from_rational(big(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        ExactValue::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::monomial(q, 0, 0)
    }

    /// `coeff * sqrt2^s * sqrtpi^p` with `s` arbitrary (reduced on entry).
    pub fn monomial(coeff: BigRational, s: u64, p: u32) -> Self {
        let mut v = ExactValue::zero();
        v.add_term(coeff, s, p);
        v
    }

    /// sqrt(2) as a ring element.
    pub fn sqrt2() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    /// sqrt(pi) as a ring element.
    pub fn sqrt_pi() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    /// pi as a ring element (sqrtpi^2).
    pub fn pi() -> Self {
        Self::monomial(BigRational::one(), 0, 2)
    }

    /// 2^(k/2) expressed in the ring: 2^(k div 2) * sqrt2^(k mod 2).
    /// Negative `k` yields the rational power of two times 1/sqrt2 = sqrt2/2.
    pub fn pow2_half(k: i64) -> Self {
        let (q, r) = (k.div_euclid(2), k.rem_euclid(2));
        let mut c = BigRational::one();
        if q >= 0 {
            c *= BigRational::from_integer(BigInt::one() << (q as usize));
        } else {
            c /= BigRational::from_integer(BigInt::one() << ((-q) as usize));
        }
        Self::monomial(c, r as u64, 0)
    }

    fn add_term(&mut self, coeff: BigRational, s: u64, p: u32) {
        if coeff.is_zero() {
            return;
        }
        // fold 2^(s div 2) into the coefficient, keep s mod 2
        let fold = BigRational::from_integer(BigInt::one() << ((s / 2) as usize));
        let c = coeff * fold;
        let key = ((s % 2) as u8, p);
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn neg(&self) -> Self {
        ExactValue { terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(s, p), c) in &other.terms {
            out.add_term(c.clone(), s as u64, p);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Ring product. Monomials combine as
    /// `(s1,p1)*(s2,p2) -> ((s1+s2) mod 2, p1+p2)` with the coefficient picking
    /// up `2^((s1+s2) div 2)`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = ExactValue::zero();
        for (&(s1, p1), c1) in &self.terms {
            for (&(s2, p2), c2) in &other.terms {
                out.add_term(c1 * c2, (s1 + s2) as u64, p1 + p2);
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return ExactValue::zero();
        }
        ExactValue { terms: self.terms.iter().map(|(k, v)| (*k, v * q)).collect() }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&big(n))
    }

    /// Divide by sqrtpi^k. Errors unless every monomial carries at least
    /// sqrtpi^k (the quotient must stay in the ring).
    pub fn div_sqrt_pi_pow(&self, k: u32) -> Result<Self> {
        let mut out = ExactValue::zero();
        for (&(s, p), c) in &self.terms {
            if p < k {
                return Err(Error::InexactDivision(format!(
                    "term with sqrtpi^{p} not divisible by sqrtpi^{k}"
                )));
            }
            out.add_term(c.clone(), s as u64, p - k);
        }
        Ok(out)
    }

    /// Divide by sqrt2^k (k >= 0): multiplies by 2^(-k/2) in the ring.
    pub fn div_sqrt2_pow(&self, k: i64) -> Self {
        self.mul(&Self::pow2_half(-k))
    }

    /// True when the value is a plain rational (no radicals).
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&(s, p)| s == 0 && p == 0)
    }

    /// The coefficient of the monomial `sqrt2^s * sqrtpi^p`.
    pub fn coeff(&self, s: u8, p: u32) -> BigRational {
        self.terms.get(&(s, p)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Iterate canonical terms as `(s, p, coefficient)`.
    pub fn iter_terms(&self) -> impl Iterator<Item = (u8, u32, &BigRational)> {
        self.terms.iter().map(|(&(s, p), c)| (s, p, c))
    }

    /// Gamma(n/2) exactly: rational for even `n`, rational * sqrtpi for odd
    /// `n`, through Gamma(1/2) = sqrt(pi) and Gamma(x+1) = x Gamma(x).
    pub fn gamma_half(n: i64) -> Result<Self> {
        if n <= 0 {
            return Err(Error::Domain(format!("gamma_half requires n >= 1, got {n}")));
        }
        let mut c = BigRational::one();
        let mut k = n;
        while k > 2 {
            // Gamma(k/2) = ((k-2)/2) Gamma((k-2)/2)
            c *= BigRational::new(BigInt::from(k - 2), BigInt::from(2));
            k -= 2;
        }
        if k == 2 {
            Ok(ExactValue::from_rational(c)) // Gamma(1) = 1
        } else {
            Ok(ExactValue::monomial(c, 0, 1)) // Gamma(1/2) = sqrt(pi)
        }
    }

    /// Gamma(n) = (n-1)! exactly for integer n >= 1.
    pub fn gamma_int(n: i64) -> Result<Self> {
        Self::gamma_half(2 * n)
    }

    /// Evaluate to a floating value with `precision_bits` of working precision.
    pub fn to_float(&self, precision_bits: u32) -> MpFloat {
        let prec = precision_bits.max(53);
        let work = prec + 32;
        let sqrt2 = MpFloat::from_u32(2, work).sqrt();
        let sqrtpi = MpFloat::pi(work).sqrt();
        let mut acc = MpFloat::zero(work);
        for (&(s, p), c) in &self.terms {
            let mut t = MpFloat::from_rational(c, work);
            if s == 1 {
                t = t.mul(&sqrt2);
            }
            if p > 0 {
                t = t.mul(&sqrtpi.powi(p));
            }
            acc = acc.add(&t);
        }
        acc.round_to(prec)
    }

    /// Double-precision value.
    pub fn to_f64(&self) -> f64 {
        self.to_float(64).to_f64()
    }

    /// Canonical serialization: terms ordered by (p, s), each rendered as
    /// `<rational>` for the unit monomial or `<rational>*sqrt2^<s>*sqrtpi^<p>`
    /// otherwise, joined by `+`. Zero serializes as `0`.
    pub fn canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<Key> = self.terms.keys().cloned().collect();
        keys.sort_by_key(|&(s, p)| (p, s));
        let parts: Vec<String> = keys
            .iter()
            .map(|&(s, p)| {
                let c = &self.terms[&(s, p)];
                if (s, p) == (0, 0) {
                    format!("{c}")
                } else {
                    format!("{c}*sqrt2^{s}*sqrtpi^{p}")
                }
            })
            .collect();
        parts.join("+")
    }

    /// Parse the canonical serialization produced by [`canonical_string`].
    ///
    /// [`canonical_string`]: ExactValue::canonical_string
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(ExactValue::zero());
        }
        let mut out = ExactValue::zero();
        // split on '+' that starts a new term (every term begins after a '+')
        for part in s.split('+') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::Parse(format!("empty term in {s:?}")));
            }
            let mut fields = part.split('*');
            let rat = fields.next().unwrap();
            let coeff: BigRational =
                rat.parse().map_err(|e| Error::Parse(format!("bad rational {rat:?}: {e}")))?;
            let (mut sexp, mut pexp) = (0u64, 0u32);
            for f in fields {
                if let Some(v) = f.strip_prefix("sqrt2^") {
                    sexp = v.parse().map_err(|_| Error::Parse(format!("bad exponent {f:?}")))?;
                } else if let Some(v) = f.strip_prefix("sqrtpi^") {
                    pexp = v.parse().map_err(|_| Error::Parse(format!("bad exponent {f:?}")))?;
                } else {
                    return Err(Error::Parse(format!("unknown factor {f:?}")));
                }
            }
            out.add_term(coeff, sexp, pexp);
        }
        Ok(out)
    }

    /// Human-readable rendering with `pi` powers, e.g. `1 - (1/4)*pi` or
    /// `(1/4)*sqrt2`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<Key> = self.terms.keys().cloned().collect();
        keys.sort_by_key(|&(s, p)| (p, s));
        let mut out = String::new();
        for (i, &(s, p)) in keys.iter().enumerate() {
            let c = &self.terms[&(s, p)];
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if s == 1 {
                factors.push("sqrt2".into());
            }
            let whole_pi = p / 2;
            if whole_pi == 1 {
                factors.push("pi".into());
            } else if whole_pi > 1 {
                factors.push(format!("pi^{whole_pi}"));
            }
            if p % 2 == 1 {
                factors.push("sqrtpi".into());
            }
            let coeff_str = if mag.is_integer() {
                format!("{}", mag.numer())
            } else {
                format!("({}/{})", mag.numer(), mag.denom())
            };
            if factors.is_empty() {
                out.push_str(&coeff_str);
            } else if mag.is_one() {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&coeff_str);
                out.push('*');
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

/// Coefficient ring abstraction so that the generating-function determinant
/// code serves both the exact ring and plain floating point.
pub trait Ring: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Ring for ExactValue {
    fn zero() -> Self {
        ExactValue::zero()
    }
    fn one() -> Self {
        ExactValue::one()
    }
    fn add(&self, other: &Self) -> Self {
        ExactValue::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        ExactValue::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ExactValue::mul(self, other)
    }
    fn neg(&self) -> Self {
        ExactValue::neg(self)
    }
    fn is_zero(&self) -> bool {
        ExactValue::is_zero(self)
    }
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

/// Dense polynomial in the generating-function parameter zeta, generic over
/// the coefficient ring. Index = power of zeta.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaPolynomial<C: Ring> {
    coeffs: Vec<C>,
}

impl<C: Ring> ZetaPolynomial<C> {
    pub fn zero() -> Self {
        ZetaPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        let mut p = ZetaPolynomial { coeffs: vec![c] };
        p.normalize();
        p
    }

    /// `a + b*zeta`.
    pub fn linear(a: C, b: C) -> Self {
        let mut p = ZetaPolynomial { coeffs: vec![a, b] };
        p.normalize();
        p
    }

    pub fn from_coeffs(coeffs: Vec<C>) -> Self {
        let mut p = ZetaPolynomial { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        ZetaPolynomial::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        ZetaPolynomial { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    /// Product truncated at zeta^`max_deg` (inclusive). Higher coefficients of
    /// the generating function are never read, so elimination work is capped.
    pub fn mul_trunc(&self, other: &Self, max_deg: usize) -> Self {
        if self.is_zero() || other.is_zero() {
            return ZetaPolynomial::zero();
        }
        let deg = (self.coeffs.len() - 1 + other.coeffs.len() - 1).min(max_deg);
        let mut out = vec![C::zero(); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > deg || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > deg {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        ZetaPolynomial::from_coeffs(out)
    }
}

/// Determinant of a square matrix of zeta-polynomials by division-free
/// column-subset expansion, truncating every product at zeta^`max_deg`.
///
/// The matrix is row-major, `n x n`. Exactness is preserved for ring
/// coefficients; no division is performed.
pub fn det_zeta<C: Ring>(mat: &[ZetaPolynomial<C>], n: usize, max_deg: usize) -> ZetaPolynomial<C> {
    assert_eq!(mat.len(), n * n);
    if n == 0 {
        return ZetaPolynomial::constant(C::one());
    }
    // dp over column subsets: after processing rows 0..popcount(mask)-1 using
    // exactly the columns in `mask`, dp[mask] is the signed minor sum.
    let full = 1usize << n;
    let mut dp: Vec<Option<ZetaPolynomial<C>>> = vec![None; full];
    dp[0] = Some(ZetaPolynomial::constant(C::one()));
    for mask in 0usize..full {
        let Some(cur) = dp[mask].clone() else { continue };
        if cur.is_zero() && mask != 0 {
            continue;
        }
        let row = (mask as u32).count_ones() as usize;
        if row == n {
            continue;
        }
        // parity of inversions: count of set bits above column c
        for c in 0..n {
            let bit = 1usize << c;
            if mask & bit != 0 {
                continue;
            }
            let entry = &mat[row * n + c];
            if entry.is_zero() {
                continue;
            }
            let above = (mask >> (c + 1)).count_ones();
            let term = cur.mul_trunc(entry, max_deg);
            let term = if above % 2 == 1 { term.neg() } else { term };
            let slot = mask | bit;
            dp[slot] = Some(match dp[slot].take() {
                Some(acc) => acc.add(&term),
                None => term,
            });
        }
    }
    dp[full - 1].take().unwrap_or_else(ZetaPolynomial::zero)
}
