//! Finite-N Pfaffian correlation-kernel entries for the real and complex
//! sectors, spectral densities, and their local and global scaling limits.
//!
//! All real-sector quantities derive from the pre-kernel
//!
//!   S(x,y) = w(x) sum_{i=0}^{N-2} g_i [ x^(i+1) A_i(y) - x^i A_(i+1)(y) ],
//!   A_i(y) = integral of w(v) sgn(y-v) v^i,
//!   g_i    = prod_k 2^(nu_k) / (2 sqrt(2 pi) Gamma(i+1+nu_k)),
//!
//! with D = -dS/dy and I-tilde the antiderivative entry. The complex-sector
//! pre-kernel at coincident points gives the complex density
//! 2 y w_c(x,y) sum_i g_i |z|^(2i), whose upper-half-plane mass counts the
//! conjugate pairs.

use num_complex::Complex64;
use serde_json::json;

use crate::error::Error;
use crate::exactnum::ExactValue;
use crate::moments::Mode;
use crate::probabilities::expected_reals;
use crate::special::quad::{integrate, integrate_line, integrate_semi_inf, QuadratureSpec};
use crate::special::weight_wr_numeric;
use crate::weights::{weight_wc, ProductSpec};
use crate::Result;

/// Scaling regime attached to a density grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    None,
    Global,
    LocalOrigin,
}

/// A sampled density: abscissae (plus ordinates for complex points) and
/// nonnegative values.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub spec: Option<ProductSpec>,
    pub scaling: Scaling,
    pub abscissae: Vec<f64>,
    /// Imaginary parts when the grid lives in the upper half plane.
    pub ordinates: Option<Vec<f64>>,
    pub values: Vec<f64>,
}

impl DensityGrid {
    /// CSV rows `x,value` (or `x,y,value` for complex grids).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.ordinates {
            None => {
                out.push_str("x,value\n");
                for (x, v) in self.abscissae.iter().zip(&self.values) {
                    out.push_str(&format!("{x:.12e},{v:.12e}\n"));
                }
            }
            Some(ys) => {
                out.push_str("x,y,value\n");
                for ((x, y), v) in self.abscissae.iter().zip(ys).zip(&self.values) {
                    out.push_str(&format!("{x:.12e},{y:.12e},{v:.12e}\n"));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "spec": self.spec.as_ref().map(|s| json!({"N": s.n, "m": s.m, "nu": s.nu})),
            "scaling": match self.scaling {
                Scaling::None => "none",
                Scaling::Global => "global",
                Scaling::LocalOrigin => "local-origin",
            },
            "abscissae": self.abscissae,
            "ordinates": self.ordinates,
            "values": self.values,
        })
    }
}

/// Entries of the 2x2 kernel block at one point pair of the real sector.
#[derive(Debug, Clone, Copy)]
pub struct KernelEntries {
    pub x: f64,
    pub y: f64,
    pub s: f64,
    pub d: f64,
    pub i_tilde: f64,
}

/// Kernel-sum coefficients g_0 .. g_(count-1).
pub fn kernel_sum_coeffs(spec: &ProductSpec, count: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut g = ExactValue::one();
        for &nu_k in &spec.factor_shifts() {
            // 2^(nu_k) / (2 sqrt(2 pi)) = 2^(nu_k - 3/2) / sqrt(pi)
            let gamma = ExactValue::gamma_int(i as i64 + 1 + nu_k as i64)?;
            let inv = gamma.coeff(0, 0).recip();
            g = g.scale(&inv).mul(&ExactValue::pow2_half(2 * nu_k as i64 - 3));
        }
        // the 1/sqrt(pi)^m part is applied here in floating point
        out.push(g.to_f64() / std::f64::consts::PI.powf(0.5 * spec.m as f64));
    }
    Ok(out)
}

fn wr(spec: &ProductSpec, v: f64, q: &QuadratureSpec) -> f64 {
    weight_wr_numeric(spec.m, spec.interior(), v, q).unwrap_or(0.0)
}

/// The sign-weighted moments A_j(y) for j = 0..=max_j against the one-point
/// weight. Even j reduce to 2 sgn(y) int_0^|y|; odd j to -2 int_|y|^inf.
pub fn a_moments(spec: &ProductSpec, y: f64, max_j: usize, q: &QuadratureSpec) -> Result<Vec<f64>> {
    let ay = y.abs();
    let qin = QuadratureSpec { max_subdivisions: q.max_subdivisions, ..q.inner() };
    let mut out = Vec::with_capacity(max_j + 1);
    for j in 0..=max_j {
        let v = if j % 2 == 0 {
            if ay == 0.0 {
                0.0
            } else {
                let body = integrate(|v| wr(spec, v, &qin) * v.powi(j as i32), 0.0, ay, q)?;
                2.0 * y.signum() * body
            }
        } else {
            let tail = integrate_semi_inf(|v| wr(spec, v, &qin) * v.powi(j as i32), ay, q)?;
            -2.0 * tail
        };
        out.push(v);
    }
    Ok(out)
}

/// Pre-kernel S(x, y) of the real sector (even N).
pub fn pre_kernel_real(spec: &ProductSpec, x: f64, y: f64, q: &QuadratureSpec) -> Result<f64> {
    if spec.n % 2 != 0 {
        return Err(Error::Unsupported("kernel formulas are for even N".into()));
    }
    let a = a_moments(spec, y, spec.n as usize - 1, q)?;
    let g = kernel_sum_coeffs(spec, spec.n as usize - 1)?;
    Ok(pre_kernel_cached(spec, x, &a, &g, q))
}

fn pre_kernel_cached(spec: &ProductSpec, x: f64, a: &[f64], g: &[f64], q: &QuadratureSpec) -> f64 {
    let n = spec.n as usize;
    let w = wr(spec, x, q);
    if w == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut xp = 1.0; // x^i
    for i in 0..=(n - 2) {
        sum += g[i] * (x * xp * a[i] - xp * a[i + 1]);
        xp *= x;
    }
    w * sum
}

/// Real spectral density rho(x) = S(x, x) on a grid.
pub fn density_real(spec: &ProductSpec, xs: &[f64], q: &QuadratureSpec) -> Result<DensityGrid> {
    if spec.n % 2 != 0 {
        return Err(Error::Unsupported("kernel formulas are for even N".into()));
    }
    let g = kernel_sum_coeffs(spec, spec.n as usize - 1)?;
    let mut values = Vec::with_capacity(xs.len());
    for &x in xs {
        let a = a_moments(spec, x, spec.n as usize - 1, q)?;
        values.push(pre_kernel_cached(spec, x, &a, &g, q));
    }
    Ok(DensityGrid {
        spec: Some(spec.clone()),
        scaling: Scaling::None,
        abscissae: xs.to_vec(),
        ordinates: None,
        values,
    })
}

/// Integral of the real density over the line (equals the expected number of
/// real eigenvalues).
pub fn density_real_mass(spec: &ProductSpec, q: &QuadratureSpec) -> Result<f64> {
    let g = kernel_sum_coeffs(spec, spec.n as usize - 1)?;
    integrate_line(
        |x| {
            let a = match a_moments(spec, x, spec.n as usize - 1, q) {
                Ok(a) => a,
                Err(_) => return 0.0,
            };
            pre_kernel_cached(spec, x, &a, &g, q)
        },
        q,
    )
}

/// Complex spectral density rho(z) = 2 y w_c(x,y) sum_i g_i |z|^(2i) at the
/// given upper-half-plane points (x, y); its upper-half-plane integral is
/// the expected number of conjugate pairs, (N - E[#reals]) / 2. Exact pair
/// weights exist for m <= 2.
pub fn density_complex(
    spec: &ProductSpec,
    points: &[(f64, f64)],
    q: &QuadratureSpec,
) -> Result<DensityGrid> {
    if spec.n % 2 != 0 {
        return Err(Error::Unsupported("kernel formulas are for even N".into()));
    }
    let g = kernel_sum_coeffs(spec, spec.n as usize - 1)?;
    let mut values = Vec::with_capacity(points.len());
    for &(x, y) in points {
        let wc = weight_wc(spec.m, x, y, q)?;
        let z2 = x * x + y * y;
        let mut sum = 0.0;
        let mut p = 1.0;
        for gi in g.iter().take(spec.n as usize - 1) {
            sum += gi * p;
            p *= z2;
        }
        values.push(2.0 * y * wc * sum);
    }
    Ok(DensityGrid {
        spec: Some(spec.clone()),
        scaling: Scaling::None,
        abscissae: points.iter().map(|p| p.0).collect(),
        ordinates: Some(points.iter().map(|p| p.1).collect()),
        values,
    })
}

/// Complex-sector pre-kernel S(w, z); the other kernel entries follow from
/// I-tilde(w,z) = i S(conj w, z) and D(w,z) = -i S(w, conj z).
pub fn pre_kernel_complex(
    spec: &ProductSpec,
    w: Complex64,
    z: Complex64,
    q: &QuadratureSpec,
) -> Result<Complex64> {
    let g = kernel_sum_coeffs(spec, spec.n as usize - 1)?;
    let wc_w = weight_wc(spec.m, w.re, w.im.abs(), q)?;
    let wc_z = weight_wc(spec.m, z.re, z.im.abs(), q)?;
    let zb = z.conj();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    for gi in g.iter().take(spec.n as usize - 1) {
        sum += gi * p;
        p *= w * zb;
    }
    // the complex-sector basis carries (w_c / 2)^(1/2) per point, so the
    // leading 2 of the kernel sum cancels
    Ok(Complex64::i() * (wc_w * wc_z).sqrt() * (zb - w) * sum)
}

/// Kernel entries (S, D, I-tilde) at a real point pair: D by Richardson
/// central differences, I-tilde by integrating S plus the half-sign term.
pub fn kernel_entries_real(
    spec: &ProductSpec,
    x: f64,
    y: f64,
    q: &QuadratureSpec,
) -> Result<KernelEntries> {
    if spec.n % 2 != 0 {
        return Err(Error::Unsupported("kernel formulas are for even N".into()));
    }
    let nmax = spec.n as usize - 1;
    let g = kernel_sum_coeffs(spec, nmax)?;
    let s_at = |xx: f64, yy: f64| -> Result<f64> {
        let a = a_moments(spec, yy, nmax, q)?;
        Ok(pre_kernel_cached(spec, xx, &a, &g, q))
    };
    let s = s_at(x, y)?;
    // D = -dS/dy, Richardson-extrapolated central differences
    let h = 1e-4 * y.abs().max(1.0);
    let central =
        |hh: f64| -> Result<f64> { Ok((s_at(x, y + hh)? - s_at(x, y - hh)?) / (2.0 * hh)) };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let d = -(4.0 * d2 - d1) / 3.0;
    // I-tilde(x,y) = int_x^y S(t, y) dt + sgn(x-y)/2; the orientation is
    // pinned by dI/dx = -S and by the bulk closed form
    let ay = a_moments(spec, y, nmax, q)?;
    let body = integrate(|t| pre_kernel_cached(spec, t, &ay, &g, q), x, y, q)?;
    let i_tilde = body + 0.5 * (x - y).signum();
    Ok(KernelEntries { x, y, s, d, i_tilde })
}

/// Pfaffian of an antisymmetric 2n x 2n matrix (recursive expansion along
/// the first row; used for small correlation blocks).
pub fn pfaffian(mat: &[f64], n: usize) -> f64 {
    assert_eq!(mat.len(), n * n);
    if n == 0 {
        return 1.0;
    }
    assert!(n % 2 == 0, "pfaffian needs even dimension");
    if n == 2 {
        return mat[1];
    }
    let mut acc = 0.0;
    let mut sign = 1.0;
    for j in 1..n {
        let a0j = mat[j];
        if a0j != 0.0 {
            let keep: Vec<usize> = (0..n).filter(|&r| r != 0 && r != j).collect();
            let k = keep.len();
            let mut minor = vec![0.0; k * k];
            for (ri, &r) in keep.iter().enumerate() {
                for (ci, &c) in keep.iter().enumerate() {
                    minor[ri * k + ci] = mat[r * n + c];
                }
            }
            acc += sign * a0j * pfaffian(&minor, k);
        }
        sign = -sign;
    }
    acc
}

/// Two-point correlation of real eigenvalues: the Pfaffian of the assembled
/// 4x4 kernel block.
pub fn correlation_two_point(spec: &ProductSpec, x: f64, y: f64, q: &QuadratureSpec) -> Result<f64> {
    let kxx = kernel_entries_real(spec, x, x, q)?;
    let kyy = kernel_entries_real(spec, y, y, q)?;
    let kxy = kernel_entries_real(spec, x, y, q)?;
    let kyx = kernel_entries_real(spec, y, x, q)?;
    // basis (e_x, f_x, e_y, f_y); block (i,j) = [[D, S], [-S^T, I-tilde]]
    let mut m = vec![0.0; 16];
    let mut put = |r: usize, c: usize, v: f64| {
        m[r * 4 + c] = v;
        m[c * 4 + r] = -v;
    };
    put(0, 1, kxx.s);
    put(2, 3, kyy.s);
    put(0, 2, kxy.d);
    put(0, 3, kxy.s);
    put(1, 2, -kyx.s);
    put(1, 3, kxy.i_tilde);
    Ok(pfaffian(&m, 4))
}

/// The kernel-sum generating function F(w) = sum_i g_i w^i carried to
/// infinite order (the large-N limit of the finite sums).
fn local_series(m: u32, nu: &[u32], w: f64) -> f64 {
    let mut shifts: Vec<u32> = nu.to_vec();
    shifts.resize(m as usize, 0);
    let norm: f64 = shifts
        .iter()
        .map(|&v| 2f64.powi(v as i32) / (2.0 * (2.0 * std::f64::consts::PI).sqrt()))
        .product();
    let mut sum = 0.0;
    let mut i = 0u64;
    let mut term = shifts.iter().map(|&v| 1.0 / libm::tgamma(1.0 + v as f64)).product::<f64>();
    loop {
        sum += term;
        i += 1;
        let mut ratio = 1.0;
        for &v in &shifts {
            ratio /= i as f64 + v as f64;
        }
        term *= w * ratio;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) || i > 100_000 {
            break;
        }
    }
    norm * sum
}

/// Large-N real density at the origin scale:
/// rho(x) = integral of |x - v| w(x) w(v) F(x v) dv, with F the infinite
/// kernel sum (it reduces to (2 sqrt(2 pi))^-m times the hypergeometric
/// series 0F_{m-1} in the square case).
pub fn local_density_origin_real(m: u32, nu: &[u32], x: f64, q: &QuadratureSpec) -> Result<f64> {
    let wx = weight_wr_numeric(m, nu, x, q)?;
    integrate_line(
        |v| {
            let wv = weight_wr_numeric(m, nu, v, q).unwrap_or(0.0);
            if wv == 0.0 {
                return 0.0;
            }
            (x - v).abs() * wx * wv * local_series(m, nu, x * v)
        },
        q,
    )
}

/// Large-N complex density near the origin: 2 y w_c(x, y) F(|z|^2)
/// (exact pair weight exists for m <= 2).
pub fn local_density_origin_complex(
    m: u32,
    nu: &[u32],
    x: f64,
    y: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let wc = weight_wc(m, x, y, q)?;
    Ok(2.0 * y * wc * local_series(m, nu, x * x + y * y))
}

/// Global (macroscopic) real density: |x|^(1/m - 1) / (2m) on [-1, 1].
pub fn global_density_real(m: u32, x: f64) -> f64 {
    if m == 1 {
        return if x.abs() < 1.0 { 0.5 } else { 0.0 };
    }
    if x != 0.0 && x * x < 1.0 {
        x.abs().powf(1.0 / m as f64 - 1.0) / (2.0 * m as f64)
    } else {
        0.0
    }
}

/// Antiderivative of the global real density (for exact bin averages):
/// sgn(x) |x|^(1/m) / 2, clipped to the support.
pub fn global_density_real_cdf(m: u32, x: f64) -> f64 {
    let c = x.clamp(-1.0, 1.0);
    0.5 * c.signum() * c.abs().powf(1.0 / m as f64)
}

/// Global complex density: |w|^(2/m - 2) / (m pi) on the unit disk.
pub fn global_density_complex(m: u32, r: f64) -> f64 {
    if m == 1 {
        return if r.abs() < 1.0 { 1.0 / std::f64::consts::PI } else { 0.0 };
    }
    if r != 0.0 && r.abs() < 1.0 {
        r.abs().powf(2.0 / m as f64 - 2.0) / (m as f64 * std::f64::consts::PI)
    } else {
        0.0
    }
}

/// Triple-consistency helper: (quadrature mass of the real density,
/// expected real-eigenvalue count) for even N.
pub fn density_mass_vs_expected(spec: &ProductSpec, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let mass = density_real_mass(spec, q)?;
    let mode = if spec.m <= 2 { Mode::Exact } else { Mode::Numeric };
    let (_, expect) = expected_reals(spec, mode)?;
    Ok((mass, expect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::erfc;

    /// Closed-form single-factor pre-kernel: the finite-N expression through
    /// incomplete gamma functions, used as the oracle for the quadrature path.
    pub fn s_m1_closed(n: u32, x: f64, y: f64) -> f64 {
        let nn = n as i32;
        // Gamma(N-1, xy)/Gamma(N-1) = exp(-xy) sum_{k<N-1} (xy)^k / k!
        let t = x * y;
        let mut q_upper = 0.0;
        let mut term = 1.0;
        for k in 0..(nn - 1) {
            if k > 0 {
                term *= t / k as f64;
            }
            q_upper += term;
        }
        q_upper *= (-t).exp();
        // gamma((N-1)/2, y^2/2) via upward recurrence from gamma(1/2, .)
        let ty = 0.5 * y * y;
        let mut s = 0.5f64;
        let mut low = std::f64::consts::PI.sqrt() * crate::special::erf(ty.sqrt());
        while s + 1.0 <= 0.5 * (nn as f64 - 1.0) {
            low = s * low - ty.powf(s) * (-ty).exp();
            s += 1.0;
        }
        let gamma_n1 = libm::tgamma(nn as f64 - 1.0);
        let pref = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        pref * ((-0.5 * (x - y) * (x - y)).exp() * q_upper
            + 2f64.powf(0.5 * (nn as f64 - 3.0))
                * (-0.5 * x * x).exp()
                * x.powi(nn - 1)
                * y.signum()
                * low
                / gamma_n1)
    }

    #[test]
    fn single_factor_kernel_matches_closed_form() {
        let q = QuadratureSpec::default();
        let spec = ProductSpec::square(2, 1);
        // S(0,0) = 1/sqrt(2 pi)
        let s00 = pre_kernel_real(&spec, 0.0, 0.0, &q).unwrap();
        assert!((s00 - 0.3989422804014327).abs() < 1e-10);
        for n in [4u32, 10] {
            let spec = ProductSpec::square(n, 1);
            for &x in &[-1.5, -0.3, 0.8] {
                for &y in &[-0.7, 0.4, 1.9] {
                    let s = pre_kernel_real(&spec, x, y, &q).unwrap();
                    let c = s_m1_closed(n, x, y);
                    assert!(
                        (s - c).abs() <= 1e-8 * c.abs().max(1e-6),
                        "N={n} S({x},{y}) = {s} vs closed {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn odd_moment_vanishes_at_infinity() {
        // A_1(y -> inf) -> 0 for the single factor
        let q = QuadratureSpec::default();
        let spec = ProductSpec::square(4, 1);
        let a = a_moments(&spec, 40.0, 1, &q).unwrap();
        assert!(a[1].abs() < 1e-12);
    }

    #[test]
    fn density_mass_equals_expected_count() {
        let q = QuadratureSpec::with_tol(1e-11, 1e-9);
        for (m, n, expect) in [(1u32, 4u32, 1.9445), (2, 6, 2.8622)] {
            let spec = ProductSpec::square(n, m);
            let (mass, ex) = density_mass_vs_expected(&spec, &q).unwrap();
            assert!((mass - ex).abs() < 1e-6, "m={m} N={n}: mass {mass} vs exact {ex}");
            assert!((ex - expect).abs() < 1e-4, "m={m} N={n}: {ex} vs {expect}");
        }
    }

    #[test]
    fn density_is_symmetric() {
        let q = QuadratureSpec::default();
        let spec = ProductSpec::square(4, 2);
        let grid = density_real(&spec, &[-1.3, -0.4, 0.4, 1.3], &q).unwrap();
        assert!((grid.values[0] - grid.values[3]).abs() < 1e-8);
        assert!((grid.values[1] - grid.values[2]).abs() < 1e-8);
        assert!(grid.values.iter().all(|&v| v >= -1e-10));
    }

    #[test]
    fn kernel_entries_basic_relations() {
        let q = QuadratureSpec::default();
        let spec = ProductSpec::square(6, 1);
        // D(x,x) = 0 by antisymmetry
        let kxx = kernel_entries_real(&spec, 0.4, 0.4, &q).unwrap();
        assert!(kxx.d.abs() < 1e-6);
        // antisymmetry under swap
        let kxy = kernel_entries_real(&spec, 0.2, 0.9, &q).unwrap();
        let kyx = kernel_entries_real(&spec, 0.9, 0.2, &q).unwrap();
        assert!((kxy.d + kyx.d).abs() < 1e-8 * kxy.d.abs().max(1e-4));
        assert!((kxy.i_tilde + kyx.i_tilde).abs() < 1e-8);
    }

    #[test]
    fn bulk_kernel_single_factor() {
        // near the origin at large N the kernel entries take the stationary
        // translation-invariant form
        let q = QuadratureSpec::default();
        let spec = ProductSpec::square(40, 1);
        let pref = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        for &(x, y) in &[(0.0, 0.0), (0.1, -0.1), (0.3, 0.1)] {
            let k = kernel_entries_real(&spec, x, y, &q).unwrap();
            let u = x - y;
            let s_bulk = pref * (-0.5 * u * u).exp();
            let d_bulk = (y - x) * pref * (-0.5 * u * u).exp();
            let i_bulk = 0.5 * u.signum() * erfc(u.abs() / std::f64::consts::SQRT_2);
            assert!((k.s - s_bulk).abs() < 1e-3, "S at ({x},{y}): {} vs {s_bulk}", k.s);
            assert!((k.d - d_bulk).abs() < 1e-3, "D at ({x},{y}): {} vs {d_bulk}", k.d);
            assert!((k.i_tilde - i_bulk).abs() < 1e-3, "I at ({x},{y})");
        }
    }

    #[test]
    fn two_point_factorizes_at_large_separation() {
        let q = QuadratureSpec::default();
        let spec = ProductSpec::square(40, 1);
        let (x, y) = (-2.5, 2.5);
        let rho2 = correlation_two_point(&spec, x, y, &q).unwrap();
        let rx = pre_kernel_real(&spec, x, x, &q).unwrap();
        let ry = pre_kernel_real(&spec, y, y, &q).unwrap();
        assert!((rho2 - rx * ry).abs() <= 1e-3 * (rx * ry), "rho2 {rho2} vs {}", rx * ry);
    }

    #[test]
    fn local_density_single_factor_is_flat() {
        let q = QuadratureSpec::default();
        for &x in &[0.0, 0.7, -1.9] {
            let v = local_density_origin_real(1, &[], x, &q).unwrap();
            assert!((v - 0.3989422804014327).abs() < 1e-9, "x={x}: {v}");
        }
    }

    #[test]
    fn local_complex_vanishes_on_axis() {
        let q = QuadratureSpec::default();
        let v = local_density_origin_complex(1, &[], 0.3, 1e-12, &q).unwrap();
        assert!(v < 1e-10);
    }

    #[test]
    fn local_matches_finite_n_two_factors() {
        let q = QuadratureSpec::with_tol(1e-11, 1e-9);
        let spec = ProductSpec::square(40, 2);
        let x = 1.0;
        let local = local_density_origin_real(2, &[0], x, &q).unwrap();
        let finite = pre_kernel_real(&spec, x, x, &q).unwrap();
        assert!(local > 0.0);
        assert!((local - finite).abs() < 1e-2, "local {local} vs finite-N {finite}");
    }

    #[test]
    fn global_density_laws() {
        // complex law at m=2, |w| = 0.5: 1/pi
        assert!((global_density_complex(2, 0.5) - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        // real law for a single factor is flat 1/2 on (-1,1)
        assert_eq!(global_density_real(1, 0.3), 0.5);
        assert_eq!(global_density_real(1, -0.99), 0.5);
        // outside support everything vanishes
        for m in 1..=4 {
            assert_eq!(global_density_real(m, 1.2), 0.0);
            assert_eq!(global_density_complex(m, 1.0001), 0.0);
        }
        // mass of the real law is 1
        let q = QuadratureSpec::default();
        for m in 1..=3u32 {
            let mass = integrate(|x| global_density_real(m, x), -1.0, 1.0, &q).unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "m={m}: {mass}");
        }
    }

    #[test]
    fn complex_sector_relations() {
        // density from the coincident-point pre-kernel is real, positive, and
        // equals the direct density formula
        let q = QuadratureSpec::default();
        let spec = ProductSpec::square(4, 1);
        let z = Complex64::new(0.4, 0.6);
        let s = pre_kernel_complex(&spec, z, z, &q).unwrap();
        assert!(s.im.abs() < 1e-12);
        assert!(s.re > 0.0);
        let grid = density_complex(&spec, &[(0.4, 0.6)], &q).unwrap();
        assert!((grid.values[0] - s.re).abs() < 1e-10);
    }

    #[test]
    fn complex_density_mass_counts_pairs() {
        // twice the upper-half-plane mass of the complex density equals
        // N minus the expected number of real eigenvalues
        use crate::special::quad::integrate_semi_inf;
        let q = QuadratureSpec::with_tol(1e-9, 1e-8);
        for (m, n) in [(1u32, 4u32), (2, 4)] {
            let spec = ProductSpec::square(n, m);
            let g = kernel_sum_coeffs(&spec, n as usize - 1).unwrap();
            let mass = integrate_line(
                |x| {
                    integrate_semi_inf(
                        |y| {
                            let wc = match weight_wc(m, x, y, &q.inner()) {
                                Ok(v) => v,
                                Err(_) => return 0.0,
                            };
                            let z2 = x * x + y * y;
                            let mut sum = 0.0;
                            let mut p = 1.0;
                            for gi in g.iter().take(n as usize - 1) {
                                sum += gi * p;
                                p *= z2;
                            }
                            2.0 * y * wc * sum
                        },
                        0.0,
                        &q.inner(),
                    )
                    .unwrap_or(0.0)
                },
                &q,
            )
            .unwrap();
            let (_, expect) = expected_reals(&spec, Mode::Exact).unwrap();
            let target = n as f64 - expect;
            assert!(
                (2.0 * mass - target).abs() < 1e-4,
                "m={m} N={n}: 2*mass = {} vs {target}",
                2.0 * mass
            );
        }
    }

    #[test]
    fn pfaffian_reference() {
        // Pf [[0, a], [-a, 0]] = a
        assert_eq!(pfaffian(&[0.0, 3.5, -3.5, 0.0], 2), 3.5);
        // 4x4: Pf = a01 a23 - a02 a13 + a03 a12
        let (a01, a02, a03, a12, a13, a23) = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let m = vec![
            0.0, a01, a02, a03, //
            -a01, 0.0, a12, a13, //
            -a02, -a12, 0.0, a23, //
            -a03, -a13, -a23, 0.0,
        ];
        assert_eq!(pfaffian(&m, 4), a01 * a23 - a02 * a13 + a03 * a12);
    }
}
