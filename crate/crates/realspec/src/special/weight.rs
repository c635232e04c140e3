//! The one-point weight function of the product ensemble, evaluated
//! numerically for any number of factors.
//!
//! On the positive half-line the weight is the multiplicative convolution of
//! the per-factor kernels f_nu(t) = t^nu exp(-t^2/2) / 2^(nu/2) (even
//! extension in lambda, overall scale 2^(m-1)). Two factors always combine
//! in closed Bessel form; extra factors add one quadrature level each.

use crate::error::Error;
use crate::special::bessel::bessel_k_nu_half;
use crate::special::quad::{integrate_semi_inf, QuadratureSpec};
use crate::Result;

/// Closed two-factor core: (f_a * f_b)(y) for y > 0, equal to
/// 2^(-(a+b)/2) y^((a+b)/2) K_((a-b)/2)(y).
fn pair_core(nu_a: u32, nu_b: u32, y: f64) -> Result<f64> {
    let (hi, lo) = if nu_a >= nu_b { (nu_a, nu_b) } else { (nu_b, nu_a) };
    let s = (hi + lo) as f64;
    let k = bessel_k_nu_half(hi - lo, y)?;
    Ok((0.5 * y).powf(0.5 * s) * k)
}

fn factor_kernel(nu: u32, t: f64) -> f64 {
    t.powi(nu as i32) * (-0.5 * t * t).exp() / 2f64.powf(0.5 * nu as f64)
}

/// Numeric one-point weight w_r(lambda) for `m` factors with interior
/// dimension offsets `nu` (length m-1; empty for the square case).
///
/// Closed forms: m=1 Gaussian, m=2 Bessel-K. For m >= 3 the remaining
/// factors are integrated by adaptive quadrature around the two-factor core.
/// At lambda = 0 the all-square weight has a logarithmic singularity for
/// m >= 2, which is reported as a domain error rather than a value.
pub fn weight_wr_numeric(m: u32, nu: &[u32], lambda: f64, spec: &QuadratureSpec) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("weight requires m >= 1".into()));
    }
    if nu.len() + 1 != m as usize && !(nu.is_empty()) {
        return Err(Error::Domain(format!(
            "expected {} interior dimension offsets for m = {m}, got {}",
            m - 1,
            nu.len()
        )));
    }
    let mut shifts: Vec<u32> = nu.to_vec();
    shifts.resize(m as usize, 0); // trailing factor always has offset 0
    let lam = lambda.abs();

    if m == 1 {
        return Ok((-0.5 * lam * lam).exp());
    }
    if lam == 0.0 {
        if shifts.iter().all(|&v| v == 0) {
            return Err(Error::Domain(
                "one-point weight is logarithmically singular at 0 for m >= 2".into(),
            ));
        }
        if m == 2 {
            // (lambda/2)^(nu/2) K_(nu/2)(lambda) -> Gamma(nu/2)/2 as lambda -> 0
            let nu1 = shifts[0].max(shifts[1]) as f64;
            return Ok(libm::tgamma(0.5 * nu1));
        }
        return Err(Error::Unsupported(
            "evaluation exactly at 0 is not implemented for m >= 3".into(),
        ));
    }

    // order so the two largest offsets form the closed pair (keeps the
    // quadrature factors light); the pair order difference sets the K order
    shifts.sort_unstable();
    let nu_b = shifts.pop().unwrap();
    let nu_a = shifts.pop().unwrap();
    let scale = 2f64.powi(m as i32 - 1);

    if m == 2 {
        return Ok(scale * pair_core(nu_a, nu_b, lam)?);
    }

    // integrate the remaining factors; one adaptive level per factor
    fn nest(
        rest: &[u32],
        level: usize,
        scale_t: f64,
        lam: f64,
        nu_a: u32,
        nu_b: u32,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        if level == rest.len() {
            return pair_core(nu_a, nu_b, lam / scale_t);
        }
        let sub = spec.inner();
        integrate_semi_inf(
            |t| {
                if t <= 0.0 {
                    return 0.0;
                }
                let f = factor_kernel(rest[level], t) / t;
                if f == 0.0 {
                    return 0.0;
                }
                f * nest(rest, level + 1, scale_t * t, lam, nu_a, nu_b, spec).unwrap_or(0.0)
            },
            0.0,
            &sub,
        )
    }
    Ok(scale * nest(&shifts, 0, 1.0, lam, nu_a, nu_b, spec)?)
}
