//! Numeric evaluation of the Meijer G family behind the moment matrices:
//! the m-fold real-integral representation of the entries a_{j,k} (with
//! per-factor shifts for rectangular products) and a Mellin–Barnes contour
//! evaluator for the one-point weight, used as an independent cross-check.

use num_complex::Complex64;

use crate::error::Error;
use crate::special::gamma_fn;
use crate::special::quad::{integrate, QuadratureSpec};
use crate::Result;

/// Unregularized incomplete beta B_x(a, k) = int_0^x t^(a-1) (1-t)^(k-1) dt
/// for integer k >= 1, by the finite binomial expansion of (1-t)^(k-1).
pub fn inc_beta_int(a: f64, k: u32, x: f64) -> f64 {
    debug_assert!(k >= 1);
    let mut binom = 1.0f64; // C(k-1, i)
    let mut sum = 0.0;
    let xa = x.powf(a);
    let mut xi = 1.0; // x^i
    for i in 0..k {
        let term = binom * xa * xi / (a + i as f64);
        sum += if i % 2 == 0 { term } else { -term };
        xi *= x;
        binom *= (k - 1 - i) as f64 / (i + 1) as f64;
    }
    sum
}

/// Entry a_{j,k} of the all-real probability determinant for a product of
/// `m` factors with dimension offsets `nu` (length m, last entry 0 for the
/// square case), to the requested tolerance:
///
///   a = Gamma(j+k-1/2)^m * I,
///   I = integral over (0,inf)^m restricted to u_1...u_m > 1 of
///       prod_l u_l^(k + nu_l/2 - 1) (1 + u_l)^-(j+k-1/2+nu_l) du_l.
///
/// The factor with zero shift is integrated innermost in closed form
/// (incomplete beta); the remaining m-1 integrals nest adaptive quadrature.
/// For m = 2 this reproduces the closed finite-sum evaluation exactly.
pub fn meijer_a_numeric(
    m: u32,
    j: u32,
    k: u32,
    nu: &[u32],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if m == 0 || j == 0 || k == 0 {
        return Err(Error::Domain("meijer_a_numeric requires m, j, k >= 1".into()));
    }
    if m > 4 {
        return Err(Error::Unsupported(format!(
            "nested quadrature for the moment entries is limited to m <= 4 (got m = {m}); \
             use the Monte Carlo module beyond that"
        )));
    }
    let mut shifts: Vec<f64> = nu.iter().map(|&v| v as f64).collect();
    shifts.resize(m as usize, 0.0);
    // innermost factor must have zero shift for the closed-form inner integral
    let inner_pos = shifts
        .iter()
        .position(|&v| v == 0.0)
        .ok_or_else(|| Error::Domain("shift list must contain a zero entry".into()))?;
    shifts.swap(inner_pos, m as usize - 1);
    let jj = j as f64;
    let kk = k as f64;
    let d = jj + kk - 0.5;
    let inner_a = jj - 0.5;

    // recursive nesting over the shifted factors; `prod` accumulates u_l.
    // substituting u = s^2, s = t/(1-t) keeps the half-integer endpoint
    // powers polynomial so the adaptive rule converges at full accuracy.
    fn nest(
        shifts: &[f64],
        level: usize,
        prod: f64,
        d: f64,
        kk: f64,
        inner_a: f64,
        inner_k: u32,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        if level + 1 == shifts.len() {
            // closed form: integral over u > 1/prod of u^(k-1)(1+u)^(-d)
            let x = prod / (1.0 + prod);
            return Ok(inc_beta_int(inner_a, inner_k, x));
        }
        let nu_l = shifts[level];
        let sub = spec.inner();
        integrate(
            |t| {
                let om = 1.0 - t;
                if t <= 0.0 || om <= 0.0 {
                    return 0.0;
                }
                let s = t / om;
                let u = s * s;
                let w = 2.0 * s / (om * om);
                let f = u.powf(kk + 0.5 * nu_l - 1.0) * (1.0 + u).powf(-(d + nu_l));
                if !(f > 0.0) || !w.is_finite() {
                    return 0.0;
                }
                let inner =
                    nest(shifts, level + 1, prod * u, d, kk, inner_a, inner_k, &sub).unwrap_or(0.0);
                f * inner * w
            },
            0.0,
            1.0,
            spec,
        )
    }

    let integral = nest(&shifts, 0, 1.0, d, kk, inner_a, k, spec)?;
    Ok(gamma_fn(d).powi(m as i32) * integral)
}

// Lanczos approximation (g = 7, 9 terms) for the complex gamma function.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma(z) for complex z (Lanczos, reflection for Re z < 1/2).
pub fn gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi = std::f64::consts::PI;
        return pi / ((pi * z).sin() * gamma_complex(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    let sqrt2pi = (2.0 * std::f64::consts::PI).sqrt();
    sqrt2pi * t.powc(z + 0.5) * (-t).exp() * x
}

/// One-point weight by direct Mellin–Barnes contour integration:
///
///   w(lambda) = (1/pi) * Re int_0^T  2^(m s/2 - 1) prod_l Gamma((s+nu_l)/2)
///               * lambda^(-s) dt,   s = c + i t,
///
/// with c = 1. Independent of the convolution/Bessel route; used as an
/// oracle for the weight at m >= 3.
pub fn mellin_barnes_wr(m: u32, nu: &[u32], lambda: f64, spec: &QuadratureSpec) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::Domain("mellin_barnes_wr requires lambda > 0".into()));
    }
    let mut shifts: Vec<f64> = nu.iter().map(|&v| v as f64).collect();
    shifts.resize(m as usize, 0.0);
    let c = 1.0f64;
    let ln_lam = lambda.ln();
    let ln2 = std::f64::consts::LN_2;
    let f = |t: f64| -> f64 {
        let s = Complex64::new(c, t);
        let mut g = Complex64::new(1.0, 0.0);
        for &nu_l in &shifts {
            g *= gamma_complex((s + nu_l) / 2.0);
        }
        // 2^(m s / 2 - 1) * lambda^(-s)
        let expo = s * (0.5 * m as f64 * ln2) - Complex64::new(ln2, 0.0) - s * ln_lam;
        (g * expo.exp()).re
    };
    // |Gamma(c/2 + it/2)|^m decays like exp(-m pi |t| / 4): truncate adaptively
    let t_max = (4.0 / (m as f64 * std::f64::consts::PI)) * (-f64::ln(1e-18)).max(10.0) + 10.0;
    let v = integrate(f, 0.0, t_max, spec)?;
    Ok(v / std::f64::consts::PI)
}

/// Scaled outward integral used by tests: int_1^inf u^(k-1)(1+u)^(-d) du.
pub fn tail_beta(d: f64, k: u32) -> f64 {
    inc_beta_int(d - k as f64, k, 0.5)
}

#[allow(unused_imports)]
use crate::special::quad as _quad_for_docs;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inc_beta_simple_cases() {
        // B_x(1/2, 1) = 2 sqrt(x)
        assert!((inc_beta_int(0.5, 1, 0.25) - 1.0).abs() < 1e-15);
        // B_x(1, 2) = x - x^2/2
        let x = 0.37;
        assert!((inc_beta_int(1.0, 2, x) - (x - x * x / 2.0)).abs() < 1e-15);
        // against adaptive quadrature for a half-integer first parameter
        let spec = QuadratureSpec::with_tol(1e-14, 1e-13);
        let a = 2.5;
        let q = integrate(|t| t.powf(a - 1.0) * (1.0 - t).powi(4), 0.0, 0.8, &spec).unwrap();
        assert!((inc_beta_int(a, 5, 0.8) - q).abs() < 1e-13);
    }

    #[test]
    fn single_factor_entry_matches_closed_form() {
        // m=1, j=k=1: Gamma(3/2) * int_1^inf (1+u)^(-3/2) du = sqrt(pi/2)
        let spec = QuadratureSpec::default();
        let a = meijer_a_numeric(1, 1, 1, &[], &spec).unwrap();
        assert!((a - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn two_factor_entries_match_reference() {
        let spec = QuadratureSpec::default();
        // j=k=1: pi^2/4; j=1,k=2: 39 pi^2/128
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let a11 = meijer_a_numeric(2, 1, 1, &[0, 0], &spec).unwrap();
        assert!((a11 - pi2 / 4.0).abs() < 1e-9 * pi2);
        let a12 = meijer_a_numeric(2, 1, 2, &[0, 0], &spec).unwrap();
        assert!((a12 - 39.0 * pi2 / 128.0).abs() < 1e-9 * pi2);
    }

    #[test]
    fn complex_gamma_reference() {
        let g = gamma_complex(Complex64::new(0.5, 0.0));
        assert!((g.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(g.im.abs() < 1e-12);
        // |Gamma(1 + i)| = sqrt(pi / sinh(pi))
        let g2 = gamma_complex(Complex64::new(1.0, 1.0));
        let expect = (std::f64::consts::PI / std::f64::consts::PI.sinh()).sqrt();
        assert!((g2.norm() - expect).abs() < 1e-12);
    }

    #[test]
    fn mellin_barnes_single_factor_is_gaussian() {
        let spec = QuadratureSpec::with_tol(1e-13, 1e-12);
        for &lam in &[0.5, 1.0, 2.0] {
            let w = mellin_barnes_wr(1, &[], lam, &spec).unwrap();
            let expect = (-0.5 * lam * lam).exp();
            assert!((w - expect).abs() < 1e-10, "lambda={lam}: {w} vs {expect}");
        }
    }
}
