//! Minimal arbitrary-precision binary floating point on top of `BigInt`.
//!
//! Supports exactly what the exact-to-float conversion and the large-`N`
//! log-scale determinants need: field operations, square roots, comparisons,
//! conversion from big rationals, and pi at arbitrary precision. Values are
//! `mantissa * 2^exponent` with the mantissa kept at a fixed bit width;
//! results are truncated-rounded to working precision after every operation,
//! so relative error stays within a few ulp per operation.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Arbitrary-precision float: `mant * 2^exp`, `|mant|` normalized to
/// `prec` bits (or zero).
#[derive(Debug, Clone)]
pub struct MpFloat {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

fn bit_len(n: &BigInt) -> u64 {
    n.bits()
}

impl MpFloat {
    pub fn zero(prec: u32) -> Self {
        MpFloat { mant: BigInt::zero(), exp: 0, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn from_u32(v: u32, prec: u32) -> Self {
        Self::from_bigint(BigInt::from(v), prec)
    }

    pub fn from_bigint(v: BigInt, prec: u32) -> Self {
        MpFloat { mant: v, exp: 0, prec }.normalized()
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite());
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if v < 0.0 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074i64) // subnormal
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        MpFloat { mant: BigInt::from(sign) * BigInt::from(mant), exp, prec }.normalized()
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        if q.is_zero() {
            return Self::zero(prec);
        }
        let num = q.numer().clone();
        let den = q.denom().clone();
        // scale numerator so the integer quotient carries prec+2 bits
        let shift = (bit_len(&den) as i64 + prec as i64 + 2) - bit_len(&num) as i64;
        let scaled = if shift >= 0 { num << shift as usize } else { num >> (-shift) as usize };
        let quot = scaled / den;
        MpFloat { mant: quot, exp: -shift, prec }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let len = bit_len(&self.mant.abs());
        let target = self.prec as u64;
        if len > target {
            let drop = (len - target) as i64;
            // round to nearest by inspecting the top dropped bit
            let rounded = (&self.mant >> ((drop - 1) as usize) as usize) + sign_unit(&self.mant);
            self.mant = rounded >> 1usize;
            self.exp += drop;
            // carry can lengthen the mantissa by one bit; renormalize cheaply
            let len2 = bit_len(&self.mant.abs());
            if len2 > target {
                self.mant = &self.mant >> 1usize;
                self.exp += 1;
            }
        }
        self
    }

    pub fn round_to(&self, prec: u32) -> Self {
        MpFloat { mant: self.mant.clone(), exp: self.exp, prec }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn neg(&self) -> Self {
        MpFloat { mant: -self.mant.clone(), exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        MpFloat { mant: self.mant.abs(), exp: self.exp, prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return other.round_to(prec);
        }
        if other.is_zero() {
            return self.round_to(prec);
        }
        // align exponents; cap the shift so a negligible addend cannot blow up memory
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let shift = hi.exp - lo.exp;
        if shift > prec as i64 + 8 {
            // lo is below the rounding threshold of hi
            return hi.round_to(prec);
        }
        let mant = (&hi.mant << shift as usize) + &lo.mant;
        MpFloat { mant, exp: lo.exp, prec }.normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        MpFloat { mant: &self.mant * &other.mant, exp: self.exp + other.exp, prec }.normalized()
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return Self::zero(prec);
        }
        let extra = prec as i64 + 4 + bit_len(&other.mant.abs()) as i64
            - bit_len(&self.mant.abs()) as i64;
        let scaled =
            if extra >= 0 { &self.mant << extra as usize } else { &self.mant >> (-extra) as usize };
        let quot = scaled / &other.mant;
        MpFloat { mant: quot, exp: self.exp - extra - other.exp, prec }.normalized()
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = MpFloat::from_u32(1, self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Square root by Newton iteration on the integer mantissa.
    pub fn sqrt(&self) -> Self {
        assert!(!self.mant.is_negative(), "sqrt of negative value");
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec;
        // write self = m * 2^e with e even and m carrying ~2*prec bits
        let mut m = self.mant.clone();
        let mut e = self.exp;
        let want = 2 * (prec as u64 + 4);
        let len = bit_len(&m);
        let mut shift = want as i64 - len as i64;
        if (e - shift) % 2 != 0 {
            shift += 1;
        }
        if shift >= 0 {
            m <<= shift as usize;
        } else {
            m >>= (-shift) as usize;
        }
        e -= shift;
        let root = m.sqrt();
        MpFloat { mant: root, exp: e / 2, prec }.normalized()
    }

    /// pi at the given precision (Machin: pi/4 = 4 atan(1/5) - atan(1/239)).
    pub fn pi(prec: u32) -> Self {
        let work = prec as u64 + 16;
        let one = BigInt::from(1) << work as usize;
        fn atan_inv(x: u64, one: &BigInt) -> BigInt {
            // atan(1/x) = sum (-1)^k / ((2k+1) x^(2k+1)), fixed point
            let x2 = BigInt::from(x) * BigInt::from(x);
            let mut term = one / BigInt::from(x);
            let mut acc = term.clone();
            let mut k = 1u64;
            while !term.is_zero() {
                term = term / &x2;
                if term.is_zero() {
                    break;
                }
                let t = &term / BigInt::from(2 * k + 1);
                if k % 2 == 1 {
                    acc -= t;
                } else {
                    acc += t;
                }
                k += 1;
            }
            acc
        }
        let quarter = BigInt::from(4) * atan_inv(5, &one) - atan_inv(239, &one);
        MpFloat { mant: quarter * BigInt::from(4), exp: -(work as i64), prec }.normalized()
    }

    /// Decompose as (mantissa in [1,2), base-2 exponent); f64 mantissa.
    pub fn to_f64_parts(&self) -> (f64, i64) {
        if self.is_zero() {
            return (0.0, 0);
        }
        let len = bit_len(&self.mant.abs()) as i64;
        let keep = 53.min(len);
        let top = (&self.mant >> (len - keep) as usize).to_i64().unwrap() as f64;
        let mant = top / ((1i64 << (keep - 1)) as f64); // in [1,2)
        (mant, self.exp + len - 1)
    }

    pub fn to_f64(&self) -> f64 {
        let (m, e) = self.to_f64_parts();
        if m == 0.0 {
            return 0.0;
        }
        if e > 1023 {
            return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e < -1070 {
            return 0.0;
        }
        m * (e as f64).exp2()
    }

    /// Natural log as f64 (mantissa log plus exponent times ln 2); accurate to
    /// f64 precision even when the value itself over/underflows f64.
    pub fn ln_f64(&self) -> f64 {
        assert!(self.mant.is_positive(), "ln of non-positive value");
        let (m, e) = self.to_f64_parts();
        m.ln() + (e as f64) * std::f64::consts::LN_2
    }

    pub fn cmp_abs(&self, other: &Self) -> std::cmp::Ordering {
        self.abs().sub(&other.abs()).sign_ord()
    }

    fn sign_ord(&self) -> std::cmp::Ordering {
        match self.mant.sign() {
            Sign::Minus => std::cmp::Ordering::Less,
            Sign::NoSign => std::cmp::Ordering::Equal,
            Sign::Plus => std::cmp::Ordering::Greater,
        }
    }
}

fn sign_unit(n: &BigInt) -> BigInt {
    match n.sign() {
        Sign::Minus => BigInt::from(-1),
        _ => BigInt::from(1),
    }
}
