//! The distribution of the number of real eigenvalues, via determinants of
//! generating-function polynomials over the exact ring (one or two factors,
//! square or rectangular) or over doubles (any m the quadrature reaches),
//! plus the expected count and the asymptotic fit of the no-real-eigenvalue
//! probability.

use num_rational::BigRational;
use serde_json::json;

use crate::error::Error;
use crate::exactnum::{det_zeta, ExactValue, ZetaPolynomial};
use crate::moments::{a_exact_m2, alpha_matrix, mu_raw, AlphaData, Mode};
use crate::mpfloat::MpFloat;
use crate::special::quad::QuadratureSpec;
use crate::special::{ln_gamma, meijer_a_numeric};
use crate::weights::{skew_poly, skew_norm, ProductSpec};
use crate::Result;

/// One entry of the count distribution.
#[derive(Debug, Clone)]
pub struct CountProbability {
    /// Number of real eigenvalues (same parity as N).
    pub k: u32,
    /// Exact ring value when the mode allows it.
    pub exact: Option<ExactValue>,
    /// Floating value (derived from the exact one in exact mode).
    pub value: f64,
}

/// Full probability distribution of the number of real eigenvalues.
#[derive(Debug, Clone)]
pub struct RealCountDistribution {
    pub spec: ProductSpec,
    pub mode: Mode,
    /// Entries for k = N mod 2, N mod 2 + 2, ..., N.
    pub entries: Vec<CountProbability>,
}

impl RealCountDistribution {
    pub fn probability(&self, k: u32) -> Option<&CountProbability> {
        self.entries.iter().find(|e| e.k == k)
    }

    /// Exact sum of all probabilities (exact mode only).
    pub fn exact_sum(&self) -> Option<ExactValue> {
        let mut s = ExactValue::zero();
        for e in &self.entries {
            s = s.add(e.exact.as_ref()?);
        }
        Some(s)
    }

    /// Machine-readable form: spec, mode, and per-k exact/float entries.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "spec": { "N": self.spec.n, "m": self.spec.m, "nu": self.spec.nu },
            "mode": match self.mode { Mode::Exact => "exact", Mode::Numeric => "numeric" },
            "entries": self.entries.iter().map(|e| json!({
                "k": e.k,
                "exact": e.exact.as_ref().map(|v| v.canonical_string()),
                "float": format!("{:.15e}", e.value),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Inverse of a one-monomial ring value (gamma products are always single
/// monomials r * sqrt2^s * sqrtpi^p).
fn invert_monomial(v: &ExactValue) -> Result<(BigRational, i64, u32)> {
    let mut terms = v.iter_terms();
    let (s, p, c) = terms
        .next()
        .ok_or_else(|| Error::Domain("cannot invert zero".into()))?;
    if terms.next().is_some() {
        return Err(Error::Domain("normalization is not a monomial".into()));
    }
    Ok((c.recip(), s as i64, p))
}

/// Product over factors and j = 1..N of Gamma((j + nu_k)/2), as a monomial.
fn gamma_norm_product(spec: &ProductSpec) -> Result<ExactValue> {
    let mut prod = ExactValue::one();
    for &nu_k in &spec.factor_shifts() {
        for j in 1..=spec.n as i64 {
            prod = prod.mul(&ExactValue::gamma_half(j + nu_k as i64)?);
        }
    }
    Ok(prod)
}

/// Rescaled diagonal entry 2^(-(2j - 1/2) m) h_{j-1}.
fn h_rescaled(spec: &ProductSpec, j: u32) -> Result<ExactValue> {
    Ok(skew_norm(spec, j)?.mul(&ExactValue::pow2_half(-((4 * j as i64 - 1) * spec.m as i64))))
}

/// Rescaled moment column entry: product over factors of
/// Gamma(j - 1/2 + nu_k / 2).
fn mu_rescaled(spec: &ProductSpec, j: u32) -> Result<ExactValue> {
    Ok(mu_raw(spec, j)?.mul(&ExactValue::pow2_half(-((2 * j as i64 - 1) * spec.m as i64))))
}

/// Exact distribution by the raw route: determinant of
/// (zeta - 1) alpha_{2j-1,2l} + h_{j-1} delta_{jl} (moment column appended
/// for odd N), normalized by 2^(-m N(N+1)/4) / prod Gamma.
fn distribution_exact(spec: &ProductSpec) -> Result<Vec<ExactValue>> {
    let qspec = QuadratureSpec::default();
    let am = alpha_matrix(spec, Mode::Exact, &qspec)?;
    let AlphaData::Exact(entries) = &am.entries else { unreachable!() };
    let n = spec.n as usize;
    let size = am.rows.max(if n % 2 == 1 { am.rows } else { am.cols });
    let max_deg = n / 2;
    let mut mat = vec![ZetaPolynomial::<ExactValue>::zero(); size * size];
    for j in 0..am.rows {
        for l in 0..am.cols {
            let alpha = &entries[j * am.cols + l];
            let mut constant = alpha.neg();
            if j == l {
                constant = constant.add(&skew_norm(spec, (j + 1) as u32)?);
            }
            mat[j * size + l] = ZetaPolynomial::linear(constant, alpha.clone());
        }
        if n % 2 == 1 {
            let AlphaData::Exact(mu) = am.mu_column.as_ref().unwrap() else { unreachable!() };
            mat[j * size + am.cols] = ZetaPolynomial::constant(mu[j].clone());
        }
    }
    let det = det_zeta(&mat, size, max_deg);
    // normalization: 2^(-m N(N+1)/4) / gamma product
    let pow2 = ExactValue::pow2_half(-((spec.m as i64) * (spec.n as i64) * (spec.n as i64 + 1) / 2));
    let (ginv, gs, gp) = invert_monomial(&gamma_norm_product(spec)?)?;
    let mut probs = Vec::with_capacity(max_deg + 1);
    for kz in 0..=max_deg {
        let c = det.coeff(kz);
        let v = c
            .mul(&pow2)
            .scale(&ginv)
            .div_sqrt2_pow(gs)
            .div_sqrt_pi_pow(gp)?;
        probs.push(v);
    }
    Ok(probs)
}

/// Rescaled-route determinant (diagonal 2-powers folded into the entries);
/// must produce identical probabilities — exercised by tests.
#[cfg_attr(not(test), allow(dead_code))]
fn distribution_exact_rescaled(spec: &ProductSpec) -> Result<Vec<ExactValue>> {
    let n = spec.n as usize;
    let rows = spec.n.div_ceil(2) as usize;
    let cols = (spec.n / 2) as usize;
    let size = rows;
    let max_deg = n / 2;
    let m = spec.m;
    if m > 2 {
        return Err(Error::Unsupported("exact mode needs m <= 2".into()));
    }
    let nu1 = spec.interior().first().copied().unwrap_or(0);
    let a = |j: u32, l: u32| -> Result<ExactValue> {
        if l == 0 {
            return Ok(ExactValue::zero());
        }
        if m == 1 {
            // single-factor moments in rescaled form: alpha / 2^((j+l-1/2) m)
            let raw = crate::moments::gaussian_sign_moment(2 * j - 2, 2 * l - 1)?;
            Ok(raw.mul(&ExactValue::pow2_half(-(2 * (j + l) as i64 - 1))))
        } else {
            a_exact_m2(j, l, nu1)
        }
    };
    let mut mat = vec![ZetaPolynomial::<ExactValue>::zero(); size * size];
    for j in 1..=rows as u32 {
        for l in 1..=cols as u32 {
            let c_l = skew_poly(spec, (2 * l - 1) as usize).correction;
            let combo = a(j, l)?.sub(
                &a(j, l - 1)?
                    .scale(&BigRational::from_integer(c_l.into()))
                    .mul(&ExactValue::pow2_half(-2 * m as i64)),
            );
            let mut constant = combo.neg();
            if j == l {
                constant = constant.add(&h_rescaled(spec, j)?);
            }
            mat[(j as usize - 1) * size + (l as usize - 1)] =
                ZetaPolynomial::linear(constant, combo);
        }
        if n % 2 == 1 {
            mat[(j as usize - 1) * size + cols] =
                ZetaPolynomial::constant(mu_rescaled(spec, j)?);
        }
    }
    let det = det_zeta(&mat, size, max_deg);
    let (ginv, gs, gp) = invert_monomial(&gamma_norm_product(spec)?)?;
    (0..=max_deg)
        .map(|kz| det.coeff(kz).scale(&ginv).div_sqrt2_pow(gs).div_sqrt_pi_pow(gp))
        .collect()
}

/// Numeric distribution over doubles, rescaled entries.
fn distribution_numeric(spec: &ProductSpec, qspec: &QuadratureSpec) -> Result<Vec<f64>> {
    let n = spec.n as usize;
    let rows = spec.n.div_ceil(2) as usize;
    let cols = (spec.n / 2) as usize;
    let size = rows;
    let max_deg = n / 2;
    let m = spec.m;
    let shifts = spec.factor_shifts();
    // cache a_{j,l}
    let mut cache = vec![f64::NAN; rows * (cols + 1)];
    let mut a = |j: u32, l: u32| -> Result<f64> {
        if l == 0 {
            return Ok(0.0);
        }
        let idx = (j as usize - 1) * (cols + 1) + l as usize - 1;
        if cache[idx].is_nan() {
            cache[idx] = meijer_a_numeric(m, j, l, &shifts, qspec)?;
        }
        Ok(cache[idx])
    };
    let mut mat = vec![ZetaPolynomial::<f64>::zero(); size * size];
    for j in 1..=rows as u32 {
        for l in 1..=cols as u32 {
            let c_l = skew_poly(spec, (2 * l - 1) as usize).correction as f64;
            let combo = a(j, l)? - c_l * 2f64.powi(-(m as i32)) * a(j, l - 1)?;
            let h = if j == l { h_rescaled(spec, j)?.to_f64() } else { 0.0 };
            mat[(j as usize - 1) * size + (l as usize - 1)] =
                ZetaPolynomial::linear(h - combo, combo);
        }
        if n % 2 == 1 {
            mat[(j as usize - 1) * size + cols] =
                ZetaPolynomial::constant(mu_rescaled(spec, j)?.to_f64());
        }
    }
    let det = det_zeta(&mat, size, max_deg);
    let mut lg = 0.0;
    for &nu_k in &shifts {
        for j in 1..=spec.n as i64 {
            lg += ln_gamma(0.5 * (j + nu_k as i64) as f64);
        }
    }
    let norm = (-lg).exp();
    let probs: Vec<f64> = (0..=max_deg).map(|kz| det.coeff(kz) * norm).collect();
    let total: f64 = probs.iter().sum();
    if !(total.is_finite()) || (total - 1.0).abs() > 1e-6 {
        return Err(Error::Numeric(format!(
            "numeric determinant ill-conditioned: probabilities sum to {total}"
        )));
    }
    Ok(probs)
}

/// The probability distribution of the number of real eigenvalues for the
/// given product. Exact mode requires at most two factors.
pub fn real_count_distribution(spec: &ProductSpec, mode: Mode) -> Result<RealCountDistribution> {
    real_count_distribution_with(spec, mode, &QuadratureSpec::default())
}

/// As [`real_count_distribution`] with explicit quadrature control for the
/// numeric path.
pub fn real_count_distribution_with(
    spec: &ProductSpec,
    mode: Mode,
    qspec: &QuadratureSpec,
) -> Result<RealCountDistribution> {
    if spec.n == 0 {
        return Err(Error::Domain("distribution requires N >= 1".into()));
    }
    let parity = spec.n % 2;
    let entries = match mode {
        Mode::Exact => distribution_exact(spec)?
            .into_iter()
            .enumerate()
            .map(|(kz, v)| CountProbability {
                k: 2 * kz as u32 + parity,
                value: v.to_f64(),
                exact: Some(v),
            })
            .collect(),
        Mode::Numeric => distribution_numeric(spec, qspec)?
            .into_iter()
            .enumerate()
            .map(|(kz, v)| CountProbability { k: 2 * kz as u32 + parity, exact: None, value: v })
            .collect(),
    };
    Ok(RealCountDistribution { spec: spec.clone(), mode, entries })
}

/// Probability that the whole spectrum is real, computed BOTH as the top
/// generating-function coefficient and by the direct moment determinant;
/// the two routes must agree.
pub fn prob_all_real(spec: &ProductSpec, mode: Mode) -> Result<CountProbability> {
    let dist = real_count_distribution(spec, mode)?;
    let top = dist.entries.last().cloned().ok_or_else(|| Error::Domain("empty".into()))?;
    // direct route: det of the rescaled moment entries (column of rescaled
    // moments appended for odd N), normalized by the gamma product
    let n = spec.n;
    let rows = n.div_ceil(2) as usize;
    let cols = (n / 2) as usize;
    let size = rows;
    match mode {
        Mode::Exact => {
            let nu1 = spec.interior().first().copied().unwrap_or(0);
            let mut mat = vec![ZetaPolynomial::<ExactValue>::zero(); size * size];
            for j in 1..=rows as u32 {
                for l in 1..=cols as u32 {
                    let a = if spec.m == 1 {
                        crate::moments::gaussian_sign_moment(2 * j - 2, 2 * l - 1)?
                            .mul(&ExactValue::pow2_half(-(2 * (j + l) as i64 - 1)))
                    } else {
                        a_exact_m2(j, l, nu1)?
                    };
                    mat[(j as usize - 1) * size + (l as usize - 1)] = ZetaPolynomial::constant(a);
                }
                if n % 2 == 1 {
                    mat[(j as usize - 1) * size + cols] =
                        ZetaPolynomial::constant(mu_rescaled(spec, j)?);
                }
            }
            let det = det_zeta(&mat, size, 0).coeff(0);
            let (ginv, gs, gp) = invert_monomial(&gamma_norm_product(spec)?)?;
            let direct = det.scale(&ginv).div_sqrt2_pow(gs).div_sqrt_pi_pow(gp)?;
            let top_exact = top.exact.clone().expect("exact mode");
            if direct != top_exact {
                return Err(Error::Inconsistent(format!(
                    "all-real probability routes disagree: {} vs {}",
                    direct.canonical_string(),
                    top_exact.canonical_string()
                )));
            }
            Ok(top)
        }
        Mode::Numeric => {
            let qspec = QuadratureSpec::default();
            let shifts = spec.factor_shifts();
            let mut mat = vec![ZetaPolynomial::<f64>::zero(); size * size];
            for j in 1..=rows as u32 {
                for l in 1..=cols as u32 {
                    mat[(j as usize - 1) * size + (l as usize - 1)] =
                        ZetaPolynomial::constant(meijer_a_numeric(spec.m, j, l, &shifts, &qspec)?);
                }
                if n % 2 == 1 {
                    mat[(j as usize - 1) * size + cols] =
                        ZetaPolynomial::constant(mu_rescaled(spec, j)?.to_f64());
                }
            }
            let det = det_zeta(&mat, size, 0).coeff(0);
            let mut lg = 0.0;
            for &nu_k in &shifts {
                for jj in 1..=n as i64 {
                    lg += ln_gamma(0.5 * (jj + nu_k as i64) as f64);
                }
            }
            let direct = det * (-lg).exp();
            if (direct - top.value).abs() > 1e-8 * top.value.abs().max(1e-12) {
                return Err(Error::Inconsistent(format!(
                    "all-real probability routes disagree: {direct} vs {}",
                    top.value
                )));
            }
            Ok(top)
        }
    }
}

/// Expected number of real eigenvalues, computed BOTH as sum k p_k over the
/// distribution and by the alternating moment sum
/// 2 sum_i (-1)^i 2^((i+3/2)m) g_i a_(ceil(i/2)+1..), plus one for odd N.
pub fn expected_reals(spec: &ProductSpec, mode: Mode) -> Result<(Option<ExactValue>, f64)> {
    let dist = real_count_distribution(spec, mode)?;
    match mode {
        Mode::Exact => {
            let mut from_dist = ExactValue::zero();
            for e in &dist.entries {
                from_dist = from_dist.add(&e.exact.clone().unwrap().scale_int(e.k as i64));
            }
            let from_sum = expected_reals_moment_sum_exact(spec)?;
            if from_dist != from_sum {
                return Err(Error::Inconsistent(format!(
                    "expected-count routes disagree: {} vs {}",
                    from_dist.canonical_string(),
                    from_sum.canonical_string()
                )));
            }
            let v = from_dist.to_f64();
            Ok((Some(from_dist), v))
        }
        Mode::Numeric => {
            let from_dist: f64 = dist.entries.iter().map(|e| e.k as f64 * e.value).sum();
            let from_sum = expected_reals_moment_sum_numeric(spec)?;
            if (from_dist - from_sum).abs() > 1e-7 * from_dist.abs().max(1e-9) {
                return Err(Error::Inconsistent(format!(
                    "expected-count routes disagree: {from_dist} vs {from_sum}"
                )));
            }
            Ok((None, from_dist))
        }
    }
}

/// Kernel-sum coefficients g_i = prod_k 2^(nu_k) / (2 sqrt(2 pi) Gamma(i+1+nu_k)),
/// returned without the 1/sqrt(pi)^m factor: caller divides at the end.
fn g_coeff_no_pi(spec: &ProductSpec, i: u32) -> Result<(ExactValue, u32)> {
    // returns (value with sqrtpi^0 content, power of sqrtpi to divide later)
    let mut v = ExactValue::one();
    for &nu_k in &spec.factor_shifts() {
        let g = ExactValue::gamma_int(i as i64 + 1 + nu_k as i64)?;
        let (ginv, gs, gp) = invert_monomial(&g)?;
        debug_assert_eq!((gs, gp), (0, 0));
        v = v
            .scale(&ginv)
            .mul(&ExactValue::pow2_half(2 * nu_k as i64 - 3));
    }
    Ok((v, spec.m))
}

fn expected_reals_moment_sum_exact(spec: &ProductSpec) -> Result<ExactValue> {
    if spec.m > 2 {
        return Err(Error::Unsupported("exact mode needs m <= 2".into()));
    }
    let n = spec.n;
    let nu1 = spec.interior().first().copied().unwrap_or(0);
    let mut acc = ExactValue::zero();
    for i in 0..n.saturating_sub(1) {
        let (j, l) = ((i / 2 + 1) + (i % 2), i / 2 + 1);
        let a = if spec.m == 1 {
            // rescaled entry a_{j,l} = alpha^mono / 2^((j+l-1/2)m)
            crate::moments::gaussian_sign_moment(2 * j - 2, 2 * l - 1)?
                .mul(&ExactValue::pow2_half(-(2 * (j + l) as i64 - 1)))
        } else {
            a_exact_m2(j, l, nu1)?
        };
        let (g, pi_pow) = g_coeff_no_pi(spec, i)?;
        let term = a
            .mul(&g)
            .mul(&ExactValue::pow2_half((2 * i as i64 + 3) * spec.m as i64))
            .div_sqrt_pi_pow(pi_pow)?
            .scale_int(if i % 2 == 0 { 2 } else { -2 });
        acc = acc.add(&term);
    }
    if n % 2 == 1 {
        acc = acc.add(&ExactValue::one());
    }
    Ok(acc)
}

fn expected_reals_moment_sum_numeric(spec: &ProductSpec) -> Result<f64> {
    let qspec = QuadratureSpec::default();
    let shifts = spec.factor_shifts();
    let n = spec.n;
    let mut acc = 0.0;
    for i in 0..n.saturating_sub(1) {
        let (j, l) = ((i / 2 + 1) + (i % 2), i / 2 + 1);
        let a = meijer_a_numeric(spec.m, j, l, &shifts, &qspec)?;
        let mut lg = 0.0;
        for &nu_k in &shifts {
            lg += ln_gamma((i + 1 + nu_k) as f64) + 0.5 * (2.0 * std::f64::consts::PI).ln()
                + std::f64::consts::LN_2
                - nu_k as f64 * std::f64::consts::LN_2;
        }
        let g = (-lg).exp();
        let term = 2.0 * a * g * 2f64.powf((i as f64 + 1.5) * spec.m as f64);
        acc += if i % 2 == 0 { term } else { -term };
    }
    if n % 2 == 1 {
        acc += 1.0;
    }
    Ok(acc)
}

/// Least-squares fit of log p_{N,0} to a sqrt(N) + b + c/sqrt(N) over even N
/// in `n_range`, at the given mantissa precision. Returns (a, b, c).
///
/// The determinant at zeta = 0 is evaluated in arbitrary-precision floating
/// point with scaled-pivot LU; instability is detected by repeating the fit
/// at doubled precision.
pub fn pnull_fit(m: u32, n_range: &[u32], precision_bits: u32) -> Result<(f64, f64, f64)> {
    if n_range.len() < 3 {
        return Err(Error::Domain("fit needs at least 3 points".into()));
    }
    if m > 2 {
        return Err(Error::Unsupported(
            "high-precision no-real-eigenvalue fit requires exact entries (m <= 2)".into(),
        ));
    }
    let fit_at = |prec: u32| -> Result<(f64, f64, f64)> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &n in n_range {
            if n % 2 != 0 {
                return Err(Error::Domain("fit is over even N".into()));
            }
            let log_p = log_pnull(m, n, prec)?;
            xs.push((n as f64).sqrt());
            ys.push(log_p);
        }
        Ok(lsq_three(&xs, &ys))
    };
    let lo = fit_at(precision_bits)?;
    let hi = fit_at(precision_bits * 2)?;
    if (lo.0 - hi.0).abs() > 1e-6 * lo.0.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "insufficient precision: leading coefficient moved from {} to {}",
            lo.0, hi.0
        )));
    }
    Ok(hi)
}

/// log p_{N,0} for even N at the given precision.
pub fn log_pnull(m: u32, n: u32, prec: u32) -> Result<f64> {
    let spec = ProductSpec::square(n, m);
    let half = (n / 2) as usize;
    let nu1 = 0u32;
    // rescaled entries at zeta = 0: h-tilde delta - (a_{j,l} - 2^-m c_l a_{j,l-1})
    let mut mat: Vec<MpFloat> = Vec::with_capacity(half * half);
    for j in 1..=half as u32 {
        for l in 1..=half as u32 {
            let a_l = if m == 1 {
                crate::moments::gaussian_sign_moment(2 * j - 2, 2 * l - 1)?
                    .mul(&ExactValue::pow2_half(-(2 * (j + l) as i64 - 1)))
            } else {
                a_exact_m2(j, l, nu1)?
            };
            let c_l = skew_poly(&spec, (2 * l - 1) as usize).correction;
            let mut combo = a_l;
            if l > 1 {
                let a_lm1 = if m == 1 {
                    crate::moments::gaussian_sign_moment(2 * j - 2, 2 * l - 3)?
                        .mul(&ExactValue::pow2_half(-(2 * (j + l) as i64 - 3)))
                } else {
                    a_exact_m2(j, l - 1, nu1)?
                };
                combo = combo.sub(
                    &a_lm1
                        .scale(&BigRational::from_integer(c_l.into()))
                        .mul(&ExactValue::pow2_half(-2 * m as i64)),
                );
            }
            let mut e = combo.neg();
            if j == l {
                e = e.add(&h_rescaled(&spec, j)?);
            }
            mat.push(e.to_float(prec));
        }
    }
    let (ln_det, sign) = lu_log_det(&mut mat, half);
    if sign <= 0 {
        return Err(Error::Numeric("non-positive determinant for a probability".into()));
    }
    let mut lg = 0.0;
    for _ in 0..m {
        for j in 1..=n as i64 {
            lg += ln_gamma(0.5 * j as f64);
        }
    }
    Ok(ln_det - lg)
}

/// LU with partial pivoting over MpFloat; returns (ln |det|, sign).
fn lu_log_det(mat: &mut [MpFloat], n: usize) -> (f64, i32) {
    let mut sign = 1i32;
    let mut ln_det = 0.0f64;
    for col in 0..n {
        // pivot
        let mut best = col;
        for r in col + 1..n {
            if mat[r * n + col].cmp_abs(&mat[best * n + col]) == std::cmp::Ordering::Greater {
                best = r;
            }
        }
        if mat[best * n + col].is_zero() {
            return (f64::NEG_INFINITY, 0);
        }
        if best != col {
            for c in 0..n {
                mat.swap(col * n + c, best * n + c);
            }
            sign = -sign;
        }
        let pivot = mat[col * n + col].clone();
        ln_det += pivot.abs().ln_f64();
        if pivot.to_f64_parts().0 < 0.0 {
            sign = -sign;
        }
        for r in col + 1..n {
            if mat[r * n + col].is_zero() {
                continue;
            }
            let factor = mat[r * n + col].div(&pivot);
            for c in col + 1..n {
                let t = factor.mul(&mat[col * n + c]);
                mat[r * n + c] = mat[r * n + c].sub(&t);
            }
            mat[r * n + col] = MpFloat::zero(pivot.precision());
        }
    }
    (ln_det, sign)
}

/// Ordinary least squares on the model y = a x + b + c / x.
fn lsq_three(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let row = [x, 1.0, 1.0 / x];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    // solve 3x3
    let mut a = ata;
    let mut b = atb;
    for col in 0..3 {
        let mut best = col;
        for r in col + 1..3 {
            if a[r][col].abs() > a[best][col].abs() {
                best = r;
            }
        }
        a.swap(col, best);
        b.swap(col, best);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut sol = [0.0f64; 3];
    for r in (0..3).rev() {
        let mut v = b[r];
        for c in r + 1..3 {
            v -= a[r][c] * sol[c];
        }
        sol[r] = v / a[r][r];
    }
    (sol[0], sol[1], sol[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn two_factor_n2_distribution() {
        let spec = ProductSpec::square(2, 2);
        let dist = real_count_distribution(&spec, Mode::Exact).unwrap();
        let quarter_pi = ExactValue::pi().scale(&q(1, 4));
        assert_eq!(dist.entries.len(), 2);
        assert_eq!(dist.entries[0].k, 0);
        assert_eq!(dist.entries[0].exact.as_ref().unwrap(), &ExactValue::one().sub(&quarter_pi));
        assert_eq!(dist.entries[1].k, 2);
        assert_eq!(dist.entries[1].exact.as_ref().unwrap(), &quarter_pi);
    }

    #[test]
    fn single_factor_n3_distribution() {
        let spec = ProductSpec::square(3, 1);
        let dist = real_count_distribution(&spec, Mode::Exact).unwrap();
        // p_{3,3} = sqrt2/4, p_{3,1} = 1 - sqrt2/4
        let s24 = ExactValue::sqrt2().scale(&q(1, 4));
        assert_eq!(dist.entries[1].exact.as_ref().unwrap(), &s24);
        assert_eq!(dist.entries[0].exact.as_ref().unwrap(), &ExactValue::one().sub(&s24));
    }

    #[test]
    fn two_factor_n4_distribution_matches_reference() {
        let spec = ProductSpec::square(4, 2);
        let dist = real_count_distribution(&spec, Mode::Exact).unwrap();
        let pi = ExactValue::pi();
        let pi2 = pi.mul(&pi);
        let p44 = pi2.scale(&q(201, 8192));
        let p42 = pi.scale(&q(755, 2048)).sub(&pi2.scale(&q(201, 4096)));
        let p40 = ExactValue::one().sub(&pi.scale(&q(755, 2048))).add(&pi2.scale(&q(201, 8192)));
        assert_eq!(dist.entries[2].exact.as_ref().unwrap(), &p44);
        assert_eq!(dist.entries[1].exact.as_ref().unwrap(), &p42);
        assert_eq!(dist.entries[0].exact.as_ref().unwrap(), &p40);
    }

    #[test]
    fn exact_normalization_sums_to_one() {
        for m in 1..=2u32 {
            for n in 1..=10u32 {
                let spec = ProductSpec::square(n, m);
                let dist = real_count_distribution(&spec, Mode::Exact).unwrap();
                assert_eq!(
                    dist.exact_sum().unwrap(),
                    ExactValue::one(),
                    "sum != 1 at N={n}, m={m}"
                );
            }
        }
        // rectangular
        for nu in 1..=3u32 {
            for n in 2..=7u32 {
                let spec = ProductSpec::rectangular(n, 2, &[nu]).unwrap();
                let dist = real_count_distribution(&spec, Mode::Exact).unwrap();
                assert_eq!(dist.exact_sum().unwrap(), ExactValue::one(), "rect N={n} nu={nu}");
            }
        }
    }

    #[test]
    fn raw_and_rescaled_routes_agree() {
        for m in 1..=2u32 {
            for n in 1..=10u32 {
                let spec = ProductSpec::square(n, m);
                let raw = distribution_exact(&spec).unwrap();
                let res = distribution_exact_rescaled(&spec).unwrap();
                assert_eq!(raw, res, "route mismatch at N={n}, m={m}");
            }
        }
        let spec = ProductSpec::rectangular(5, 2, &[2]).unwrap();
        assert_eq!(
            distribution_exact(&spec).unwrap(),
            distribution_exact_rescaled(&spec).unwrap()
        );
    }

    #[test]
    fn all_real_probability_dual_route() {
        // p_{N,N} for a single factor is 2^(-N(N-1)/4)
        for n in 2..=8u32 {
            let spec = ProductSpec::square(n, 1);
            let p = prob_all_real(&spec, Mode::Exact).unwrap();
            let expect = ExactValue::pow2_half(-(n as i64 * (n as i64 - 1) / 2));
            assert_eq!(p.exact.unwrap(), expect, "N={n}");
        }
        // rectangular reference: N=4, interior offset 1 -> 3/64
        let spec = ProductSpec::rectangular(4, 2, &[1]).unwrap();
        let p = prob_all_real(&spec, Mode::Exact).unwrap();
        assert_eq!(p.exact.unwrap(), ExactValue::from_ratio(3, 64));
    }

    #[test]
    fn expected_reals_reference_values() {
        // N=2, two factors: pi/2
        let (e, v) = expected_reals(&ProductSpec::square(2, 2), Mode::Exact).unwrap();
        assert_eq!(e.unwrap(), ExactValue::pi().scale(&q(1, 2)));
        assert!((v - 1.5707963267948966).abs() < 1e-12);
        // N=2, one factor: sqrt(2)
        let (e, v) = expected_reals(&ProductSpec::square(2, 1), Mode::Exact).unwrap();
        assert_eq!(e.unwrap(), ExactValue::sqrt2());
        assert!((v - 1.4142135623730951).abs() < 1e-12);
        // N=7, two factors: 1 + (22392747/33554432) pi
        let (e, v) = expected_reals(&ProductSpec::square(7, 2), Mode::Exact).unwrap();
        let expect = ExactValue::one().add(&ExactValue::pi().scale(&q(22392747, 33554432)));
        assert_eq!(e.unwrap(), expect);
        assert!((v - 3.0966).abs() < 1e-4);
    }

    #[test]
    fn numeric_matches_exact_two_factors() {
        for n in [2u32, 3, 5, 6] {
            let spec = ProductSpec::square(n, 2);
            let ex = real_count_distribution(&spec, Mode::Exact).unwrap();
            let nu = real_count_distribution(&spec, Mode::Numeric).unwrap();
            for (a, b) in ex.entries.iter().zip(&nu.entries) {
                assert!((a.value - b.value).abs() < 1e-8, "N={n} k={}", a.k);
            }
        }
    }

    #[test]
    fn all_real_probability_increases_with_factor_count() {
        for n in 2..=6u32 {
            let p1 = prob_all_real(&ProductSpec::square(n, 1), Mode::Exact).unwrap().value;
            let p2 = prob_all_real(&ProductSpec::square(n, 2), Mode::Exact).unwrap().value;
            let d3 = real_count_distribution(&ProductSpec::square(n, 3), Mode::Numeric).unwrap();
            let p3 = d3.entries.last().unwrap().value;
            assert!(p1 < p2 && p2 < p3, "N={n}: {p1} {p2} {p3}");
        }
    }

    #[test]
    fn arithmetic_form_of_exact_probabilities() {
        // single factor: r + s sqrt(2); two factors: polynomial in pi of
        // degree at most floor(N/2)
        for n in 2..=9u32 {
            let d1 = real_count_distribution(&ProductSpec::square(n, 1), Mode::Exact).unwrap();
            for e in &d1.entries {
                for (s, p, _) in e.exact.as_ref().unwrap().iter_terms() {
                    assert!(p == 0 && s <= 1, "m=1 term sqrt2^{s} sqrtpi^{p} at N={n}");
                }
            }
            let d2 = real_count_distribution(&ProductSpec::square(n, 2), Mode::Exact).unwrap();
            for e in &d2.entries {
                for (s, p, _) in e.exact.as_ref().unwrap().iter_terms() {
                    assert!(s == 0 && p % 2 == 0 && p / 2 <= n / 2, "m=2 term at N={n}");
                }
            }
        }
    }

    #[test]
    fn degenerate_fit_is_rejected() {
        assert!(pnull_fit(2, &[50, 52], 64).is_err());
    }

    #[test]
    fn log_pnull_small_cases_match_distribution() {
        for (m, n) in [(1u32, 6u32), (2, 6), (2, 10)] {
            let spec = ProductSpec::square(n, m);
            let dist = real_count_distribution(&spec, Mode::Exact).unwrap();
            let p0 = dist.entries[0].value;
            let lp = log_pnull(m, n, 128).unwrap();
            assert!((lp - p0.ln()).abs() < 1e-9, "m={m} N={n}: {lp} vs {}", p0.ln());
        }
    }
}
