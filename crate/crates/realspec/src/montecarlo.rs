//! Deterministic, embarrassingly parallel Monte Carlo verification: sample
//! Gaussian (or random-sign) matrix products, classify eigenvalues exactly
//! through the real Schur form, and estimate the quantities the exact
//! modules compute.
//!
//! Reproducibility contract: every sample draws its entries from an
//! independent ChaCha12 stream keyed by (seed, sample index), so results are
//! bit-identical for a fixed (seed, samples) regardless of the worker count
//! or scheduling. Normal variates use Box–Muller with libm transcendentals.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::Error;
use crate::kernels::{DensityGrid, Scaling};
use crate::weights::ProductSpec;
use crate::Result;

/// Entry distribution of the factor matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryLaw {
    Gaussian,
    /// Independent signs +-1 (universality probe).
    Rademacher,
}

/// One Monte Carlo run configuration.
#[derive(Debug, Clone)]
pub struct McConfig {
    pub spec: ProductSpec,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub entry_law: EntryLaw,
}

impl McConfig {
    pub fn new(spec: ProductSpec, samples: u64, seed: u64) -> Self {
        McConfig { spec, samples, seed, workers: default_workers(), entry_law: EntryLaw::Gaussian }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// One draw: real eigenvalues, upper-half-plane pair representatives, and
/// the trace of the squared product.
#[derive(Debug, Clone)]
pub struct SpectrumSample {
    pub reals: Vec<f64>,
    pub complex_pairs: Vec<(f64, f64)>,
    pub trace_sq: f64,
}

/// Deterministic per-sample generator: ChaCha12 keyed by the run seed with
/// the stream id set to the sample index (attempt retries shift the stream).
fn sample_rng(seed: u64, index: u64, attempt: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    // splitmix64 expansion of the run seed
    let mut s = seed;
    for chunk in key.chunks_mut(8) {
        s = s.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(index.wrapping_add(attempt << 48));
    rng
}

/// Uniform in (0, 1] from the top 53 bits.
fn uniform_01(rng: &mut ChaCha12Rng) -> f64 {
    (((rng.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
}

/// Standard normal pairs by Box–Muller over libm transcendentals
/// (platform-stable).
struct NormalSource<'a> {
    rng: &'a mut ChaCha12Rng,
    spare: Option<f64>,
}

impl<'a> NormalSource<'a> {
    fn new(rng: &'a mut ChaCha12Rng) -> Self {
        NormalSource { rng, spare: None }
    }

    fn next(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1 = uniform_01(self.rng);
        let u2 = uniform_01(self.rng);
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }
}

fn draw_product(cfg: &McConfig, rng: &mut ChaCha12Rng) -> Result<DMatrix<f64>> {
    let n = cfg.spec.n as usize;
    let dims: Vec<(usize, usize)> = (0..cfg.spec.m as usize)
        .map(|i| (n + cfg.spec.nu[i] as usize, n + cfg.spec.nu[i + 1] as usize))
        .collect();
    let mut product: Option<DMatrix<f64>> = None;
    match cfg.entry_law {
        EntryLaw::Gaussian => {
            let mut normals = NormalSource::new(rng);
            for &(r, c) in &dims {
                let f = DMatrix::from_fn(r, c, |_, _| normals.next());
                product = Some(match product {
                    None => f,
                    Some(p) => p * f,
                });
            }
        }
        EntryLaw::Rademacher => {
            for &(r, c) in &dims {
                let f = DMatrix::from_fn(
                    r,
                    c,
                    |_, _| if rng.next_u64() & 1 == 1 { 1.0 } else { -1.0 },
                );
                product = Some(match product {
                    None => f,
                    Some(p) => p * f,
                });
            }
        }
    }
    let p = product.expect("at least one factor");
    // entries grow like N^(m/2); anything near overflow means a misuse
    if p.iter().any(|v| !v.is_finite() || v.abs() > 1e300) {
        return Err(Error::Numeric("matrix product overflowed the guard".into()));
    }
    Ok(p)
}

/// Classify the spectrum of a real matrix through its real Schur form:
/// 1x1 diagonal blocks are real eigenvalues, 2x2 blocks with negative
/// discriminant are conjugate pairs with y = sqrt(-disc)/2. No tolerance is
/// applied to imaginary parts; the block structure alone decides.
fn classify_schur(t: &DMatrix<f64>) -> (Vec<f64>, Vec<(f64, f64)>) {
    let n = t.nrows();
    let mut reals = Vec::new();
    let mut pairs = Vec::new();
    let mut i = 0usize;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (a, b) = (t[(i, i)], t[(i, i + 1)]);
            let (c, d) = (t[(i + 1, i)], t[(i + 1, i + 1)]);
            let disc = (a - d) * (a - d) + 4.0 * b * c;
            if disc < 0.0 {
                pairs.push((0.5 * (a + d), 0.5 * (-disc).sqrt()));
            } else {
                // an unsplit block with real spectrum
                let mid = 0.5 * (a + d);
                let off = 0.5 * disc.sqrt();
                reals.push(mid + off);
                reals.push(mid - off);
            }
            i += 2;
        } else {
            reals.push(t[(i, i)]);
            i += 1;
        }
    }
    (reals, pairs)
}

/// Draw sample `index` of the run. Retries on QR non-convergence use
/// shifted streams; the retry count is surfaced by [`estimate_distribution`].
pub fn sample_spectrum(cfg: &McConfig, index: u64) -> Result<SpectrumSample> {
    sample_spectrum_counted(cfg, index).map(|(s, _)| s)
}

fn sample_spectrum_counted(cfg: &McConfig, index: u64) -> Result<(SpectrumSample, u64)> {
    let mut retries = 0u64;
    for attempt in 0..64u64 {
        let mut rng = sample_rng(cfg.seed, index, attempt);
        let p = draw_product(cfg, &mut rng)?;
        let trace_sq = {
            let n = p.nrows();
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += p[(i, j)] * p[(j, i)];
                }
            }
            s
        };
        let n = p.nrows();
        let schur = nalgebra::linalg::Schur::try_new(p, f64::EPSILON, 80 * n.max(8));
        match schur {
            Some(s) => {
                let (_, t) = s.unpack();
                let (reals, complex_pairs) = classify_schur(&t);
                debug_assert_eq!(reals.len() + 2 * complex_pairs.len(), n);
                return Ok((SpectrumSample { reals, complex_pairs, trace_sq }, retries));
            }
            None => retries += 1,
        }
    }
    Err(Error::Numeric(format!("Schur iteration failed 64 times for sample {index}")))
}

/// Empirical distribution of the number of real eigenvalues.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub spec: ProductSpec,
    pub samples: u64,
    pub counts: BTreeMap<u32, u64>,
    /// QR retries (stays a negligible fraction of samples).
    pub retries: u64,
    pub mean_trace_sq: f64,
    pub mean_reals: f64,
}

impl McEstimate {
    pub fn frequency(&self, k: u32) -> f64 {
        *self.counts.get(&k).unwrap_or(&0) as f64 / self.samples as f64
    }

    /// Wilson score interval at `z` standard normal quantiles
    /// (z = 3 is the 99.7% band used by the verification suite).
    pub fn wilson_ci(&self, k: u32, z: f64) -> (f64, f64) {
        let n = self.samples as f64;
        let p = self.frequency(k);
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * ((p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()) / denom;
        (center - half, center + half)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .counts
            .iter()
            .map(|(&k, &c)| {
                let (lo, hi) = self.wilson_ci(k, 3.0);
                serde_json::json!({
                    "k": k, "count": c,
                    "freq": self.frequency(k),
                    "ci_low": lo, "ci_high": hi,
                })
            })
            .collect();
        serde_json::json!({
            "spec": {"N": self.spec.n, "m": self.spec.m, "nu": self.spec.nu},
            "samples": self.samples,
            "retries": self.retries,
            "mean_reals": self.mean_reals,
            "mean_trace_sq": self.mean_trace_sq,
            "entries": entries,
        })
    }
}

/// Run the sampler and count real eigenvalues per draw. Work is split over
/// `cfg.workers` threads; per-sample streams make the result independent of
/// the split.
pub fn estimate_distribution(cfg: &McConfig) -> Result<McEstimate> {
    struct Partial {
        counts: BTreeMap<u32, u64>,
        retries: u64,
        trace_sq_sum: f64,
        reals_sum: u64,
        error: Option<Error>,
    }
    let workers = cfg.workers.max(1);
    let partials: Vec<Partial> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let cfg = cfg.clone();
            handles.push(scope.spawn(move || {
                let mut part = Partial {
                    counts: BTreeMap::new(),
                    retries: 0,
                    trace_sq_sum: 0.0,
                    reals_sum: 0,
                    error: None,
                };
                let mut idx = w as u64;
                while idx < cfg.samples {
                    match sample_spectrum_counted(&cfg, idx) {
                        Ok((s, r)) => {
                            *part.counts.entry(s.reals.len() as u32).or_insert(0) += 1;
                            part.retries += r;
                            part.trace_sq_sum += s.trace_sq;
                            part.reals_sum += s.reals.len() as u64;
                        }
                        Err(e) => {
                            part.error = Some(e);
                            break;
                        }
                    }
                    idx += workers as u64;
                }
                part
            }));
        }
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut counts = BTreeMap::new();
    let mut retries = 0;
    let mut trace_sq_sum = 0.0;
    let mut reals_sum = 0u64;
    for p in partials {
        if let Some(e) = p.error {
            return Err(e);
        }
        for (k, c) in p.counts {
            *counts.entry(k).or_insert(0) += c;
        }
        retries += p.retries;
        trace_sq_sum += p.trace_sq_sum;
        reals_sum += p.reals_sum;
    }
    if retries as f64 > 1e-6 * cfg.samples as f64 + 3.0 {
        return Err(Error::Numeric(format!(
            "QR retried {retries} times over {} samples",
            cfg.samples
        )));
    }
    Ok(McEstimate {
        spec: cfg.spec.clone(),
        samples: cfg.samples,
        counts,
        retries,
        mean_trace_sq: trace_sq_sum / cfg.samples as f64,
        mean_reals: reals_sum as f64 / cfg.samples as f64,
    })
}

/// Histogram of real eigenvalues rescaled by N^(-m/2), normalized to unit
/// mass; returns the grid (bin centers) and the total eigenvalue count.
pub fn histogram_real_global(cfg: &McConfig, bins: usize) -> Result<(DensityGrid, u64)> {
    let range = 1.25f64;
    let width = 2.0 * range / bins as f64;
    let scale = (cfg.spec.n as f64).powf(-0.5 * cfg.spec.m as f64);
    let workers = cfg.workers.max(1);
    let partials: Vec<std::result::Result<(Vec<u64>, u64), Error>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let cfg = cfg.clone();
            handles.push(scope.spawn(move || {
                let mut hist = vec![0u64; bins];
                let mut total = 0u64;
                let mut idx = w as u64;
                while idx < cfg.samples {
                    let (s, _) = sample_spectrum_counted(&cfg, idx)?;
                    for &lam in &s.reals {
                        total += 1;
                        let x = lam * scale;
                        let b = ((x + range) / width).floor();
                        if b >= 0.0 && (b as usize) < bins {
                            hist[b as usize] += 1;
                        }
                    }
                    idx += workers as u64;
                }
                Ok((hist, total))
            }));
        }
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut hist = vec![0u64; bins];
    let mut total = 0u64;
    for p in partials {
        let (h, t) = p?;
        for (a, b) in hist.iter_mut().zip(h) {
            *a += b;
        }
        total += t;
    }
    let norm = 1.0 / (total as f64 * width);
    let abscissae: Vec<f64> = (0..bins).map(|b| -range + (b as f64 + 0.5) * width).collect();
    let values: Vec<f64> = hist.iter().map(|&c| c as f64 * norm).collect();
    Ok((
        DensityGrid {
            spec: Some(cfg.spec.clone()),
            scaling: Scaling::Global,
            abscissae,
            ordinates: None,
            values,
        },
        total,
    ))
}

/// L1 distance between a histogram and a reference law given through its
/// antiderivative (the law is bin-averaged exactly, so no discretization
/// bias enters), restricted to bins whose center lies in |x| within the
/// window.
pub fn l1_distance_avg(
    grid: &DensityGrid,
    law_cdf: impl Fn(f64) -> f64,
    window: (f64, f64),
) -> f64 {
    if grid.abscissae.len() < 2 {
        return 0.0;
    }
    let width = grid.abscissae[1] - grid.abscissae[0];
    let mut acc = 0.0;
    for (&x, &v) in grid.abscissae.iter().zip(&grid.values) {
        let ax = x.abs();
        if ax >= window.0 && ax <= window.1 {
            let avg = (law_cdf(x + 0.5 * width) - law_cdf(x - 0.5 * width)) / width;
            acc += (v - avg).abs() * width;
        }
    }
    acc
}

/// L1 distance between a histogram and a reference law on |x| inside
/// [window.0, window.1], by bin-midpoint evaluation.
pub fn l1_distance(grid: &DensityGrid, law: impl Fn(f64) -> f64, window: (f64, f64)) -> f64 {
    if grid.abscissae.len() < 2 {
        return 0.0;
    }
    let width = grid.abscissae[1] - grid.abscissae[0];
    let mut acc = 0.0;
    for (&x, &v) in grid.abscissae.iter().zip(&grid.values) {
        let ax = x.abs();
        if ax >= window.0 && ax <= window.1 {
            acc += (v - law(x)).abs() * width;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u32, m: u32, samples: u64, seed: u64) -> McConfig {
        McConfig::new(ProductSpec::square(n, m), samples, seed)
    }

    #[test]
    fn scalar_product_is_always_real() {
        let c = cfg(1, 3, 200, 7);
        for i in 0..200 {
            let s = sample_spectrum(&c, i).unwrap();
            assert_eq!(s.reals.len(), 1);
            assert!(s.complex_pairs.is_empty());
        }
    }

    #[test]
    fn parity_invariant_holds_exactly() {
        for (n, m) in [(2u32, 1u32), (3, 2), (4, 2), (5, 3), (6, 1)] {
            let c = cfg(n, m, 60, 11);
            for i in 0..c.samples {
                let s = sample_spectrum(&c, i).unwrap();
                assert_eq!(s.reals.len() + 2 * s.complex_pairs.len(), n as usize);
                assert_eq!(s.reals.len() as u32 % 2, n % 2, "parity at N={n} m={m}");
                assert!(s.complex_pairs.iter().all(|&(_, y)| y > 0.0));
            }
        }
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let mut a = cfg(4, 2, 400, 99);
        a.workers = 1;
        let mut b = cfg(4, 2, 400, 99);
        b.workers = 7;
        let ra = estimate_distribution(&a).unwrap();
        let rb = estimate_distribution(&b).unwrap();
        // integer statistics are identical whatever the thread split
        assert_eq!(ra.counts, rb.counts);
        assert!((ra.mean_trace_sq - rb.mean_trace_sq).abs() < 1e-12 * ra.mean_trace_sq.abs());
        // identical configs reproduce bit-identical aggregates
        let rb2 = estimate_distribution(&b).unwrap();
        assert_eq!(rb.mean_trace_sq.to_bits(), rb2.mean_trace_sq.to_bits());
        assert_eq!(rb.counts, rb2.counts);
        // per-sample streams are bit-identical across configs
        for i in [0u64, 13, 399] {
            let sa = sample_spectrum(&a, i).unwrap();
            let sb = sample_spectrum(&b, i).unwrap();
            assert_eq!(sa.trace_sq.to_bits(), sb.trace_sq.to_bits());
            assert_eq!(sa.reals.len(), sb.reals.len());
        }
        // and a different seed moves the counts
        let rc = estimate_distribution(&cfg(4, 2, 400, 100)).unwrap();
        assert_ne!(ra.counts, rc.counts);
    }

    #[test]
    fn two_factor_n2_frequency_near_exact() {
        let c = cfg(2, 2, 40_000, 2024);
        let est = estimate_distribution(&c).unwrap();
        // exact all-real probability here is pi/4 = 0.7854
        let (lo, hi) = est.wilson_ci(2, 3.0);
        assert!(
            lo < std::f64::consts::FRAC_PI_4 && std::f64::consts::FRAC_PI_4 < hi,
            "CI ({lo},{hi}) missed pi/4"
        );
        let total: f64 = est.counts.keys().map(|&k| est.frequency(k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_square_mean_matches_moment() {
        // E tr P^2 = N^m
        let c = cfg(4, 2, 30_000, 5);
        let est = estimate_distribution(&c).unwrap();
        let se = 3.0 * 140.0 / (c.samples as f64).sqrt();
        assert!(
            (est.mean_trace_sq - 16.0).abs() < se,
            "mean tr P^2 = {} vs 16 +- {se}",
            est.mean_trace_sq
        );
    }

    #[test]
    fn rectangular_sampling_dimensions() {
        let spec = ProductSpec::rectangular(2, 2, &[3]).unwrap();
        let c = McConfig::new(spec, 50, 3);
        for i in 0..50 {
            let s = sample_spectrum(&c, i).unwrap();
            assert_eq!(s.reals.len() + 2 * s.complex_pairs.len(), 2);
        }
    }

    #[test]
    fn histogram_is_normalized() {
        let c = cfg(16, 1, 300, 8);
        let (grid, total) = histogram_real_global(&c, 40).unwrap();
        assert!(total > 0);
        let width = grid.abscissae[1] - grid.abscissae[0];
        let mass: f64 = grid.values.iter().map(|v| v * width).sum();
        // mass inside the window can fall slightly below 1 (edge spill)
        assert!(mass > 0.9 && mass <= 1.0 + 1e-12, "mass = {mass}");
    }
}
