//! Exact evaluation of the scalar moments entering the probability
//! determinants: signed Gaussian double moments for single-factor products,
//! the closed finite-sum moment entries for two factors (square and
//! rectangular), the raw alpha matrices built from the skew-orthogonal
//! polynomials, and the odd-dimension moment column.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::exactnum::ExactValue;
use crate::special::meijer_a_numeric;
use crate::special::quad::QuadratureSpec;
use crate::weights::{skew_poly, ProductSpec};
use crate::Result;

/// Element of Q(zeta_8), zeta = exp(i pi / 4): coefficients of
/// 1, zeta, zeta^2, zeta^3 with zeta^4 = -1.
#[derive(Debug, Clone, PartialEq)]
struct Cyc8([BigRational; 4]);

impl Cyc8 {
    fn zero() -> Self {
        Cyc8([
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        ])
    }

    /// zeta^k scaled by a rational.
    fn power(k: i64, c: BigRational) -> Self {
        let mut v = Self::zero();
        let k = k.rem_euclid(8) as usize;
        let (idx, sign) = if k < 4 { (k, 1) } else { (k - 4, -1) };
        v.0[idx] = if sign < 0 { -c } else { c };
        v
    }

    fn add_assign(&mut self, other: &Self) {
        for i in 0..4 {
            self.0[i] += &other.0[i];
        }
    }

    fn scale(&self, c: &BigRational) -> Self {
        Cyc8([&self.0[0] * c, &self.0[1] * c, &self.0[2] * c, &self.0[3] * c])
    }

    /// Multiply by zeta^k.
    fn rotate(&self, k: i64) -> Self {
        let mut out = Self::zero();
        for i in 0..4usize {
            let c = &self.0[i];
            if c.is_zero() {
                continue;
            }
            let other = Cyc8::power(k + i as i64, c.clone());
            out.add_assign(&other);
        }
        out
    }

    /// Extract the real value, which must have the form c0 + c1 sqrt(2)
    /// (i.e. coefficients satisfy c2 = 0, c3 = -c1).
    fn to_exact_real(&self) -> Result<ExactValue> {
        if !self.0[2].is_zero() || self.0[1] != -self.0[3].clone() {
            return Err(Error::Inconsistent(format!(
                "angular integral produced a non-real value: {:?}",
                self.0
            )));
        }
        // zeta - zeta^3 = sqrt(2)
        Ok(ExactValue::from_rational(self.0[0].clone())
            .add(&ExactValue::monomial(self.0[1].clone(), 1, 0)))
    }
}

/// Signed Gaussian double moment
/// T(a, b) = int int x^a y^b exp(-(x^2+y^2)/2) sgn(y - x) dx dy,
/// evaluated exactly by polar factorization: the radial part is
/// 2^((a+b)/2) Gamma((a+b)/2 + 1); the angular part expands
/// cos^a sin^b in eighth roots of unity and integrates term by term over the
/// arc where sin > cos and its complement. No floating point enters.
pub fn gaussian_sign_moment(a: u32, b: u32) -> Result<ExactValue> {
    if a + b > 70 {
        return Err(Error::Domain("gaussian_sign_moment bounded to a + b <= 70".into()));
    }
    if (a + b) % 2 == 0 {
        // integrand is odd under the quarter-turn symmetry
        return Ok(ExactValue::zero());
    }
    // cos^a sin^b = 2^-(a+b) (-i)^b sum_p sum_q C(a,p) C(b,q) (-1)^(b-q)
    //               zeta^(2(2p - a + 2q - b))  ... with zeta^2 = i
    let mut angular = Cyc8::zero();
    let denom = BigRational::from_integer(BigInt::one() << (a + b) as usize);
    for p in 0..=a {
        let ca = binomial(BigInt::from(a), BigInt::from(p));
        for q in 0..=b {
            let cb = binomial(BigInt::from(b), BigInt::from(q));
            let k = 2 * (p as i64 + q as i64) - (a as i64 + b as i64);
            if k == 0 {
                continue; // arc difference vanishes for the constant term
            }
            // D_k = 2 (zeta^(5k) - zeta^k) / (i k) =  -2 zeta^2 (zeta^(5k) - zeta^k) / k
            let mut dk = Cyc8::power(5 * k + 2, BigRational::from_integer(BigInt::from(-2)))
                .scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
            dk.add_assign(
                &Cyc8::power(k + 2, BigRational::from_integer(BigInt::from(2)))
                    .scale(&BigRational::new(BigInt::one(), BigInt::from(k))),
            );
            // sign (-1)^(b-q) and the (-i)^b = zeta^(-2b) factor
            let mut coeff = BigRational::from_integer(ca.clone() * cb) / &denom;
            if (b - q) % 2 == 1 {
                coeff = -coeff;
            }
            angular.add_assign(&dk.rotate(-2 * (b as i64)).scale(&coeff));
        }
    }
    let angular = angular.to_exact_real()?;
    // radial: 2^((a+b)/2) Gamma((a+b)/2 + 1) = 2^((a+b)/2) Gamma((a+b+2)/2)
    let radial = ExactValue::pow2_half((a + b) as i64)
        .mul(&ExactValue::gamma_half((a + b) as i64 + 2)?);
    Ok(radial.mul(&angular))
}

/// Exact two-factor moment entry a_{j,k} for interior offset `nu`
/// (`nu = 0` is the square case): the closed finite sum
///
///   Gamma(k) Gamma(j+k-1/2) Gamma(j+k+nu/2-1/2)
///     * sum_{t=0}^{k-1} Gamma(t+j-1/2) Gamma(t+j+nu/2-1/2)
///                        / (t! Gamma(t+2j+k+nu-1)).
///
/// The result is pi^2 times a rational for even `nu` and pi times a rational
/// for odd `nu`.
pub fn a_exact_m2(j: u32, k: u32, nu: u32) -> Result<ExactValue> {
    if j == 0 || k == 0 {
        return Err(Error::Domain("a_exact_m2 requires j, k >= 1".into()));
    }
    let (j, k, nu) = (j as i64, k as i64, nu as i64);
    let rational_of = |v: ExactValue| -> BigRational {
        debug_assert!(v.is_rational());
        v.coeff(0, 0)
    };
    let mut sum = ExactValue::zero();
    for t in 0..k {
        let num = ExactValue::gamma_half(2 * t + 2 * j - 1)?
            .mul(&ExactValue::gamma_half(2 * t + 2 * j + nu - 1)?);
        let den = rational_of(ExactValue::gamma_half(2 * t + 2)?)
            * rational_of(ExactValue::gamma_half(2 * (t + 2 * j + k + nu - 1))?);
        sum = sum.add(&num.scale(&den.recip()));
    }
    let pre = ExactValue::gamma_half(2 * k)?
        .mul(&ExactValue::gamma_half(2 * (j + k) - 1)?)
        .mul(&ExactValue::gamma_half(2 * (j + k) + nu - 1)?);
    Ok(pre.mul(&sum))
}

/// Raw moment column entry mu_{2j-1} = integral of w_r(x) x^(2j-2):
/// the product over factors of 2^(j-1/2) Gamma(j - 1/2 + nu_k / 2).
pub fn mu_raw(spec: &ProductSpec, j: u32) -> Result<ExactValue> {
    let j = j as i64;
    let mut v = ExactValue::one();
    for &nu_k in &spec.factor_shifts() {
        v = v
            .mul(&ExactValue::pow2_half(2 * j - 1))
            .mul(&ExactValue::gamma_half(2 * j - 1 + nu_k as i64)?);
    }
    Ok(v)
}

/// Storage for a raw alpha matrix: exact ring elements or doubles.
#[derive(Debug, Clone)]
pub enum AlphaData {
    Exact(Vec<ExactValue>),
    Numeric(Vec<f64>),
}

/// Evaluation mode for moment matrices and distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Numeric,
}

/// The raw skew-product matrix entering the generating-function determinant:
/// entries alpha_{2j-1, 2l} at u = v = 1 built on the skew-orthogonal
/// polynomials, rows j = 1..ceil(N/2), columns l = 1..floor(N/2), plus the
/// raw moment column for odd N.
#[derive(Debug, Clone)]
pub struct AlphaMatrix {
    pub spec: ProductSpec,
    pub rows: usize,
    pub cols: usize,
    pub entries: AlphaData,
    pub mu_column: Option<AlphaData>,
}

impl AlphaMatrix {
    pub fn entry_f64(&self, j: usize, l: usize) -> f64 {
        match &self.entries {
            AlphaData::Exact(v) => v[j * self.cols + l].to_f64(),
            AlphaData::Numeric(v) => v[j * self.cols + l],
        }
    }
}

/// Exact single-factor raw entry: T(2j-2, 2l-1) - c_l T(2j-2, 2l-3).
fn alpha_entry_m1(spec: &ProductSpec, j: u32, l: u32) -> Result<ExactValue> {
    let lead = gaussian_sign_moment(2 * j - 2, 2 * l - 1)?;
    let poly = skew_poly(spec, (2 * l - 1) as usize);
    if poly.correction == 0 {
        return Ok(lead);
    }
    let c = BigRational::from_integer(BigInt::from(poly.correction));
    let sub = gaussian_sign_moment(2 * j - 2, 2 * l - 3)?;
    Ok(lead.sub(&sub.scale(&c)))
}

/// Exact two-factor raw entry:
/// 2^((j+l-1/2)m) a_{j,l} - c_l 2^((j+l-3/2)m) a_{j,l-1}.
fn alpha_entry_m2(spec: &ProductSpec, j: u32, l: u32) -> Result<ExactValue> {
    let m = spec.m as i64;
    let nu = spec.interior().first().copied().unwrap_or(0);
    let lead = a_exact_m2(j, l, nu)?
        .mul(&ExactValue::pow2_half((2 * (j + l) as i64 - 1) * m));
    if l == 1 {
        return Ok(lead);
    }
    let poly = skew_poly(spec, (2 * l - 1) as usize);
    let c = BigRational::from_integer(BigInt::from(poly.correction));
    let sub = a_exact_m2(j, l - 1, nu)?
        .mul(&ExactValue::pow2_half((2 * (j + l) as i64 - 3) * m))
        .scale(&c);
    Ok(lead.sub(&sub))
}

/// Build the raw alpha matrix (and odd-N moment column) for a product spec.
/// Exact mode requires m <= 2; numeric mode evaluates the moment entries by
/// nested quadrature and is limited to m <= 4.
pub fn alpha_matrix(spec: &ProductSpec, mode: Mode, qspec: &QuadratureSpec) -> Result<AlphaMatrix> {
    let n = spec.n;
    let rows = n.div_ceil(2) as usize;
    let cols = (n / 2) as usize;
    let odd = n % 2 == 1;
    match mode {
        Mode::Exact => {
            if spec.m > 2 {
                return Err(Error::Unsupported(format!(
                    "exact moment matrices exist only for one or two factors (m = {})",
                    spec.m
                )));
            }
            let mut entries = Vec::with_capacity(rows * cols);
            for j in 1..=rows as u32 {
                for l in 1..=cols as u32 {
                    entries.push(match spec.m {
                        1 => alpha_entry_m1(spec, j, l)?,
                        _ => alpha_entry_m2(spec, j, l)?,
                    });
                }
            }
            let mu_column = if odd {
                Some(AlphaData::Exact(
                    (1..=rows as u32).map(|j| mu_raw(spec, j)).collect::<Result<Vec<_>>>()?,
                ))
            } else {
                None
            };
            Ok(AlphaMatrix { spec: spec.clone(), rows, cols, entries: AlphaData::Exact(entries), mu_column })
        }
        Mode::Numeric => {
            let m = spec.m;
            let shifts = spec.factor_shifts();
            let mut entries = Vec::with_capacity(rows * cols);
            for j in 1..=rows as u32 {
                for l in 1..=cols as u32 {
                    let a_l = meijer_a_numeric(m, j, l, &shifts, qspec)?;
                    // 2^((j+l-1/2) m), exponent possibly half-integral
                    let expo = (2 * (j + l) as i32 - 1) * m as i32;
                    let mut v = a_l * 2f64.powf(0.5 * expo as f64);
                    if l > 1 {
                        let poly = skew_poly(spec, (2 * l - 1) as usize);
                        let a_lm1 = meijer_a_numeric(m, j, l - 1, &shifts, qspec)?;
                        let expo2 = (2 * (j + l) as i32 - 3) * m as i32;
                        v -= poly.correction as f64 * 2f64.powf(0.5 * expo2 as f64) * a_lm1;
                    }
                    entries.push(v);
                }
            }
            let mu_column = if odd {
                Some(AlphaData::Numeric(
                    (1..=rows as u32)
                        .map(|j| mu_raw(spec, j).map(|v| v.to_f64()))
                        .collect::<Result<Vec<_>>>()?,
                ))
            } else {
                None
            };
            Ok(AlphaMatrix { spec: spec.clone(), rows, cols, entries: AlphaData::Numeric(entries), mu_column })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quad::{integrate_line, QuadratureSpec};

    /// Independent 2-D quadrature oracle for the signed Gaussian moments;
    /// the inner integral splits at the sign change so every piece is smooth.
    fn t_oracle(a: u32, b: u32) -> f64 {
        let spec = QuadratureSpec::with_tol(1e-12, 1e-10);
        let g = |y: f64, b: u32| y.powi(b as i32) * (-0.5 * y * y).exp();
        integrate_line(
            |x| {
                let above =
                    crate::special::quad::integrate_semi_inf(|y| g(y, b), x, &spec).unwrap();
                let below =
                    crate::special::quad::integrate_semi_inf(|y| g(-y, b), -x, &spec).unwrap();
                g(x, a) * (above - below)
            },
            &spec,
        )
        .unwrap()
    }

    #[test]
    fn sign_moment_reference_values() {
        assert!(gaussian_sign_moment(0, 0).unwrap().is_zero());
        // T(0,1) = 2 sqrt(pi)
        let t01 = gaussian_sign_moment(0, 1).unwrap();
        assert_eq!(t01, ExactValue::sqrt_pi().scale_int(2));
        // T(1,2) = -sqrt(pi), frozen from the quadrature oracle
        let t12 = gaussian_sign_moment(1, 2).unwrap();
        assert_eq!(t12, ExactValue::sqrt_pi().scale_int(-1));
        assert!((t12.to_f64() - t_oracle(1, 2)).abs() < 1e-8);
        assert!((t01.to_f64() - t_oracle(0, 1)).abs() < 1e-8);
        // one with sqrt2 content
        let t03 = gaussian_sign_moment(0, 3).unwrap();
        assert!((t03.to_f64() - t_oracle(0, 3)).abs() < 1e-7);
    }

    #[test]
    fn sign_moment_antisymmetry_and_parity() {
        for a in 0..6u32 {
            for b in 0..6u32 {
                let tab = gaussian_sign_moment(a, b).unwrap();
                let tba = gaussian_sign_moment(b, a).unwrap();
                assert_eq!(tab, tba.neg(), "antisymmetry at ({a},{b})");
                if (a + b) % 2 == 0 {
                    assert!(tab.is_zero(), "parity vanishing at ({a},{b})");
                }
            }
        }
        // parity vanishing further out
        for s in [10u32, 16, 20] {
            assert!(gaussian_sign_moment(s / 2, s - s / 2).unwrap().is_zero());
        }
    }

    #[test]
    fn two_factor_entries_exact() {
        let pi2 = ExactValue::pi().mul(&ExactValue::pi());
        // a_{1,1} = pi^2/4
        assert_eq!(a_exact_m2(1, 1, 0).unwrap(), pi2.scale(&BigRational::new(1.into(), 4.into())));
        // a_{1,2} = 39 pi^2 / 128
        assert_eq!(
            a_exact_m2(1, 2, 0).unwrap(),
            pi2.scale(&BigRational::new(39.into(), 128.into()))
        );
        // rectangular: offset 1 gives pi times a rational
        let a = a_exact_m2(1, 1, 1).unwrap();
        assert_eq!(a, ExactValue::pi().scale(&BigRational::new(1.into(), 4.into())));
        let a2 = a_exact_m2(1, 1, 2).unwrap();
        assert_eq!(a2, pi2.scale(&BigRational::new(1.into(), 32.into())));
    }

    #[test]
    fn alpha_entries_match_spec_examples() {
        let qspec = QuadratureSpec::default();
        // single factor, entry (1,1): alpha_{1,2} = T(0,1) = 2 sqrt(pi)
        let s1 = ProductSpec::square(3, 1);
        let a1 = alpha_matrix(&s1, Mode::Exact, &qspec).unwrap();
        match &a1.entries {
            AlphaData::Exact(v) => assert_eq!(v[0], ExactValue::sqrt_pi().scale_int(2)),
            _ => unreachable!(),
        }
        // mu column: mu_1 = mu_3 = sqrt(2 pi)
        match a1.mu_column.as_ref().unwrap() {
            AlphaData::Exact(v) => {
                let sqrt2pi = ExactValue::pow2_half(1).mul(&ExactValue::sqrt_pi());
                assert_eq!(v[0], sqrt2pi);
                assert_eq!(v[1], sqrt2pi);
            }
            _ => unreachable!(),
        }
        // two factors, entry (1,1): 2^3 a_{1,1} = 2 pi^2
        let s2 = ProductSpec::square(2, 2);
        let a2 = alpha_matrix(&s2, Mode::Exact, &qspec).unwrap();
        assert!((a2.entry_f64(0, 0) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
        // exact mode refuses m = 3
        assert!(alpha_matrix(&ProductSpec::square(2, 3), Mode::Exact, &qspec).is_err());
    }

    #[test]
    fn exact_vs_numeric_alpha_two_factors() {
        let qspec = QuadratureSpec::default();
        for n in [4u32, 7, 12] {
            let spec = ProductSpec::square(n, 2);
            let ex = alpha_matrix(&spec, Mode::Exact, &qspec).unwrap();
            let nu = alpha_matrix(&spec, Mode::Numeric, &qspec).unwrap();
            for j in 0..ex.rows {
                for l in 0..ex.cols {
                    let a = ex.entry_f64(j, l);
                    let b = nu.entry_f64(j, l);
                    assert!(
                        (a - b).abs() <= 1e-8 * a.abs(),
                        "entry ({j},{l}) at N={n}: exact {a} vs numeric {b}"
                    );
                }
            }
        }
    }
}
