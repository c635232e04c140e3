//! Command-line front end: every computation of the library behind one
//! binary with machine-readable output, plus reproduction commands for the
//! library's reference tables and the global-density figure data.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use realspec::kernels;
use realspec::moments::Mode;
use realspec::montecarlo::{self, EntryLaw, McConfig};
use realspec::probabilities::{self, pnull_fit, prob_all_real, real_count_distribution};
use realspec::special::QuadratureSpec;
use realspec::weights::ProductSpec;
use realspec::Error;

#[derive(Parser)]
#[command(
    name = "realspec",
    about = "Real-eigenvalue statistics of products of real Gaussian matrices",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Pretty,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Real,
    Complex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawArg {
    Gaussian,
    Rademacher,
}

#[derive(Args)]
struct SpecArgs {
    /// Matrix dimension N
    #[arg(short = 'N', long = "N", visible_alias = "dim")]
    n: u32,
    /// Number of factors in the product
    #[arg(short, long, default_value_t = 1)]
    m: u32,
    /// Interior dimension offsets, comma separated (m-1 values; omit for square)
    #[arg(long, value_delimiter = ',')]
    nu: Option<Vec<u32>>,
}

impl SpecArgs {
    fn build(&self) -> Result<ProductSpec, Error> {
        match &self.nu {
            None => Ok(ProductSpec::square(self.n, self.m)),
            Some(v) => {
                // a lone zero is accepted as the square shorthand for any m
                if v.iter().all(|&x| x == 0) && v.len() != (self.m as usize).saturating_sub(1) {
                    return Ok(ProductSpec::square(self.n, self.m));
                }
                ProductSpec::rectangular(self.n, self.m, v)
            }
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "pretty")]
    format: FormatArg,
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Distribution of the number of real eigenvalues
    Prob {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Probability that the whole spectrum is real (dual-route checked)
    Allreal {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Expected number of real eigenvalues (dual-route checked)
    Expect {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Finite-N spectral density on a grid
    Density {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "real")]
        kind: KindArg,
        #[arg(long, default_value_t = -4.0)]
        xmin: f64,
        #[arg(long, default_value_t = 4.0)]
        xmax: f64,
        #[arg(long, default_value_t = 81)]
        points: usize,
        /// Imaginary part for the complex-plane slice
        #[arg(long, default_value_t = 0.5)]
        y: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Kernel entries S, D, I-tilde and the two-point correlation at (x, y)
    Kernel {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Large-N local density at the origin scale
    Local {
        #[arg(short, long)]
        m: u32,
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<u32>>,
        #[arg(long, value_enum, default_value = "real")]
        kind: KindArg,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 0.5)]
        y: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Global (macroscopic) scaled density
    Global {
        #[arg(short, long)]
        m: u32,
        #[arg(long, value_enum, default_value = "real")]
        kind: KindArg,
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte Carlo estimate of the real-eigenvalue count distribution
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Run seed (required: simulations are reproducible by contract)
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value = "gaussian")]
        law: LawArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reference tables: 1 = count distribution (two factors, N = 2..7),
    /// 2 = expected counts, 3 = all-real probabilities for rectangular pairs
    Table {
        #[arg(long)]
        id: u32,
        /// Append a fresh simulation column with this many samples
        #[arg(long)]
        simulate_samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Global real-density figure data: histogram plus the limiting law
    Figure {
        #[arg(long, default_value_t = 1)]
        id: u32,
        /// Scale as N,reps
        #[arg(long, value_delimiter = ',', num_args = 1..=2, default_values_t = [256, 200])]
        scale: Vec<u64>,
        #[arg(short, long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, value_enum, default_value = "gaussian")]
        law: LawArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fit log p_{N,0} over even N to a sqrt(N) + b + c/sqrt(N)
    Pnullfit {
        #[arg(short, long)]
        m: u32,
        #[arg(long, default_value_t = 50)]
        nmin: u32,
        #[arg(long, default_value_t = 120)]
        nmax: u32,
        #[arg(long, default_value_t = 2)]
        step: u32,
        /// Mantissa precision in bits (default from REALSPEC_PREC or 256)
        #[arg(long)]
        prec: Option<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn default_prec(cli: Option<u32>) -> u32 {
    cli.or_else(|| std::env::var("REALSPEC_PREC").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(256)
        .max(53)
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Numeric => Mode::Numeric,
    }
}

fn emit(out: &OutArgs, text: String) -> Result<(), Error> {
    match &out.out {
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
        }
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Domain(format!("write failed: {e}")))?;
        }
    }
    Ok(())
}

fn float_str(v: f64) -> String {
    format!("{v:.15e}")
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Prob { spec, mode, out } => {
            let spec = spec.build()?;
            let dist = real_count_distribution(&spec, mode_of(mode))?;
            let text = match out.format {
                FormatArg::Json => format!("{:#}\n", dist.to_json()),
                FormatArg::Csv => {
                    let mut t = String::from("k,exact,float\n");
                    for e in &dist.entries {
                        t.push_str(&format!(
                            "{},{},{}\n",
                            e.k,
                            e.exact.as_ref().map(|v| v.canonical_string()).unwrap_or_default(),
                            float_str(e.value)
                        ));
                    }
                    t
                }
                FormatArg::Pretty => {
                    let mut parts = Vec::new();
                    for e in &dist.entries {
                        match &e.exact {
                            Some(v) => parts.push(format!(
                                "p[{}] = {} \u{2248} {:.4}",
                                e.k,
                                v.pretty(),
                                e.value
                            )),
                            None => parts.push(format!("p[{}] \u{2248} {:.6}", e.k, e.value)),
                        }
                    }
                    format!("{}\n", parts.join("; "))
                }
            };
            emit(&out, text)
        }
        Command::Allreal { spec, mode, out } => {
            let spec = spec.build()?;
            let p = prob_all_real(&spec, mode_of(mode))?;
            let text = match out.format {
                FormatArg::Json => format!(
                    "{:#}\n",
                    json!({
                        "spec": {"N": spec.n, "m": spec.m, "nu": spec.nu},
                        "k": p.k,
                        "exact": p.exact.as_ref().map(|v| v.canonical_string()),
                        "float": float_str(p.value),
                    })
                ),
                FormatArg::Csv => format!(
                    "k,exact,float\n{},{},{}\n",
                    p.k,
                    p.exact.as_ref().map(|v| v.canonical_string()).unwrap_or_default(),
                    float_str(p.value)
                ),
                FormatArg::Pretty => match &p.exact {
                    Some(v) => format!("p[{}] = {} \u{2248} {:.6}\n", p.k, v.pretty(), p.value),
                    None => format!("p[{}] \u{2248} {:.8}\n", p.k, p.value),
                },
            };
            emit(&out, text)
        }
        Command::Expect { spec, mode, out } => {
            let spec = spec.build()?;
            let (exact, value) = probabilities::expected_reals(&spec, mode_of(mode))?;
            let text = match out.format {
                FormatArg::Json => format!(
                    "{:#}\n",
                    json!({
                        "spec": {"N": spec.n, "m": spec.m, "nu": spec.nu},
                        "exact": exact.as_ref().map(|v| v.canonical_string()),
                        "float": float_str(value),
                    })
                ),
                FormatArg::Csv => format!(
                    "exact,float\n{},{}\n",
                    exact.as_ref().map(|v| v.canonical_string()).unwrap_or_default(),
                    float_str(value)
                ),
                FormatArg::Pretty => match &exact {
                    Some(v) => format!("E[#reals] = {} \u{2248} {:.6}\n", v.pretty(), value),
                    None => format!("E[#reals] \u{2248} {:.8}\n", value),
                },
            };
            emit(&out, text)
        }
        Command::Density { spec, kind, xmin, xmax, points, y, out } => {
            let spec = spec.build()?;
            let q = QuadratureSpec::default();
            let grid: Vec<f64> = (0..points)
                .map(|i| xmin + (xmax - xmin) * i as f64 / (points.max(2) - 1) as f64)
                .collect();
            let density = match kind {
                KindArg::Real => kernels::density_real(&spec, &grid, &q)?,
                KindArg::Complex => {
                    let pts: Vec<(f64, f64)> = grid.iter().map(|&x| (x, y)).collect();
                    kernels::density_complex(&spec, &pts, &q)?
                }
            };
            let text = match out.format {
                FormatArg::Json => format!("{:#}\n", density.to_json()),
                _ => density.to_csv(),
            };
            emit(&out, text)
        }
        Command::Kernel { spec, x, y, out } => {
            let spec = spec.build()?;
            let q = QuadratureSpec::default();
            let k = kernels::kernel_entries_real(&spec, x, y, &q)?;
            let rho2 = kernels::correlation_two_point(&spec, x, y, &q)?;
            let text = match out.format {
                FormatArg::Json => format!(
                    "{:#}\n",
                    json!({
                        "spec": {"N": spec.n, "m": spec.m, "nu": spec.nu},
                        "x": x, "y": y,
                        "S": k.s, "D": k.d, "I": k.i_tilde,
                        "rho2": rho2,
                    })
                ),
                FormatArg::Csv => {
                    format!("x,y,S,D,I,rho2\n{x},{y},{},{},{},{rho2}\n", k.s, k.d, k.i_tilde)
                }
                FormatArg::Pretty => format!(
                    "S({x},{y}) = {:.10}\nD({x},{y}) = {:.10}\nI({x},{y}) = {:.10}\nrho2 = {rho2:.10}\n",
                    k.s, k.d, k.i_tilde
                ),
            };
            emit(&out, text)
        }
        Command::Local { m, nu, kind, x, y, out } => {
            let q = QuadratureSpec::default();
            let shifts = nu.unwrap_or_default();
            let v = match kind {
                KindArg::Real => kernels::local_density_origin_real(m, &shifts, x, &q)?,
                KindArg::Complex => kernels::local_density_origin_complex(m, &shifts, x, y, &q)?,
            };
            emit(&out, format_scalar(out.format, "local_density", v))
        }
        Command::Global { m, kind, x, out } => {
            let v = match kind {
                KindArg::Real => kernels::global_density_real(m, x),
                KindArg::Complex => kernels::global_density_complex(m, x),
            };
            emit(&out, format_scalar(out.format, "global_density", v))
        }
        Command::Simulate { spec, samples, seed, workers, law, out } => {
            let spec = spec.build()?;
            let mut cfg = McConfig::new(spec, samples, seed);
            if let Some(w) = workers {
                cfg.workers = w.max(1);
            }
            cfg.entry_law = match law {
                LawArg::Gaussian => EntryLaw::Gaussian,
                LawArg::Rademacher => EntryLaw::Rademacher,
            };
            let est = montecarlo::estimate_distribution(&cfg)?;
            let text = match out.format {
                FormatArg::Json => format!("{:#}\n", est.to_json()),
                FormatArg::Csv => {
                    let mut t = String::from("k,count,freq,ci_low,ci_high\n");
                    for (&k, &c) in &est.counts {
                        let (lo, hi) = est.wilson_ci(k, 3.0);
                        t.push_str(&format!("{k},{c},{},{lo},{hi}\n", est.frequency(k)));
                    }
                    t
                }
                FormatArg::Pretty => {
                    let mut t = format!(
                        "{} samples, mean #reals = {:.4}, mean tr P^2 = {:.4}\n",
                        est.samples, est.mean_reals, est.mean_trace_sq
                    );
                    for (&k, _) in &est.counts {
                        t.push_str(&format!("p[{k}] \u{2248} {:.5}\n", est.frequency(k)));
                    }
                    t
                }
            };
            emit(&out, text)
        }
        Command::Table { id, simulate_samples, seed, out } => {
            let text = render_table(id, simulate_samples, seed, out.format)?;
            emit(&out, text)
        }
        Command::Figure { id, scale, m, seed, bins, law, out } => {
            if id != 1 {
                return Err(Error::Domain(format!("unknown figure id {id}")));
            }
            let n = scale.first().copied().unwrap_or(256) as u32;
            let reps = scale.get(1).copied().unwrap_or(200);
            let mut cfg = McConfig::new(ProductSpec::square(n, m), reps, seed);
            cfg.entry_law = match law {
                LawArg::Gaussian => EntryLaw::Gaussian,
                LawArg::Rademacher => EntryLaw::Rademacher,
            };
            let (grid, total) = montecarlo::histogram_real_global(&cfg, bins)?;
            let text = match out.format {
                FormatArg::Json => format!(
                    "{:#}\n",
                    json!({
                        "N": n, "m": m, "reps": reps, "total_real_eigenvalues": total,
                        "x": grid.abscissae,
                        "histogram": grid.values,
                        "law": grid.abscissae.iter()
                            .map(|&x| kernels::global_density_real(m, x))
                            .collect::<Vec<_>>(),
                    })
                ),
                _ => {
                    let mut t = String::from("x,histogram,law\n");
                    for (&x, &v) in grid.abscissae.iter().zip(&grid.values) {
                        t.push_str(&format!(
                            "{x:.6},{v:.8},{:.8}\n",
                            kernels::global_density_real(m, x)
                        ));
                    }
                    t
                }
            };
            emit(&out, text)
        }
        Command::Pnullfit { m, nmin, nmax, step, prec, out } => {
            let prec = default_prec(prec);
            let ns: Vec<u32> = (nmin..=nmax).step_by(step.max(1) as usize).collect();
            let (a, b, c) = pnull_fit(m, &ns, prec)?;
            let text = match out.format {
                FormatArg::Json => format!(
                    "{:#}\n",
                    json!({"m": m, "N_range": ns, "prec": prec, "a": a, "b": b, "c": c})
                ),
                FormatArg::Csv => format!("a,b,c\n{a},{b},{c}\n"),
                FormatArg::Pretty => format!(
                    "log p_N0 \u{2248} {a:.4} sqrt(N) + {b:.4} + {c:.4}/sqrt(N)   (prec {prec} bits)\n"
                ),
            };
            emit(&out, text)
        }
    }
}

fn format_scalar(format: FormatArg, name: &str, v: f64) -> String {
    match format {
        FormatArg::Json => format!("{:#}\n", json!({ name: v })),
        FormatArg::Csv => format!("{name}\n{}\n", float_str(v)),
        FormatArg::Pretty => format!("{name} = {v:.10}\n"),
    }
}

/// The three reference tables, exact columns as canonical strings.
fn render_table(
    id: u32,
    simulate_samples: Option<u64>,
    seed: u64,
    format: FormatArg,
) -> Result<String, Error> {
    match id {
        1 => {
            let mut rows = Vec::new();
            for n in 2..=7u32 {
                let spec2 = ProductSpec::square(n, 2);
                let dist2 = real_count_distribution(&spec2, Mode::Exact)?;
                let dist1 = real_count_distribution(&ProductSpec::square(n, 1), Mode::Exact)?;
                let sim = match simulate_samples {
                    Some(samples) => Some(montecarlo::estimate_distribution(&McConfig::new(
                        spec2, samples, seed,
                    ))?),
                    None => None,
                };
                for (e2, e1) in dist2.entries.iter().zip(&dist1.entries) {
                    rows.push(json!({
                        "N": n,
                        "k": e2.k,
                        "exact": e2.exact.as_ref().unwrap().canonical_string(),
                        "float": float_str(e2.value),
                        "simul": sim.as_ref().map(|s| s.frequency(e2.k)),
                        "single_factor_float": float_str(e1.value),
                    }));
                }
            }
            render_rows(format, &rows, &["N", "k", "exact", "float", "simul", "single_factor_float"])
        }
        2 => {
            let mut rows = Vec::new();
            for n in 2..=7u32 {
                let spec2 = ProductSpec::square(n, 2);
                let (e2, v2) = probabilities::expected_reals(&spec2, Mode::Exact)?;
                let (_, v1) = probabilities::expected_reals(&ProductSpec::square(n, 1), Mode::Exact)?;
                let sim = match simulate_samples {
                    Some(samples) => {
                        let est = montecarlo::estimate_distribution(&McConfig::new(
                            spec2, samples, seed,
                        ))?;
                        Some(est.mean_reals)
                    }
                    None => None,
                };
                rows.push(json!({
                    "N": n,
                    "exact": e2.unwrap().canonical_string(),
                    "float": float_str(v2),
                    "simul": sim,
                    "single_factor_float": float_str(v1),
                }));
            }
            render_rows(format, &rows, &["N", "exact", "float", "simul", "single_factor_float"])
        }
        3 => {
            let mut rows = Vec::new();
            for n in 2..=7u32 {
                for nu in 0..=3u32 {
                    let spec = ProductSpec::rectangular(n, 2, &[nu])?;
                    let p = prob_all_real(&spec, Mode::Exact)?;
                    rows.push(json!({
                        "N": n,
                        "nu": nu,
                        "exact": p.exact.as_ref().unwrap().canonical_string(),
                        "float": float_str(p.value),
                    }));
                }
            }
            render_rows(format, &rows, &["N", "nu", "exact", "float"])
        }
        other => Err(Error::Domain(format!("unknown table id {other}"))),
    }
}

fn render_rows(
    format: FormatArg,
    rows: &[serde_json::Value],
    columns: &[&str],
) -> Result<String, Error> {
    Ok(match format {
        FormatArg::Json => format!("{:#}\n", serde_json::Value::Array(rows.to_vec())),
        FormatArg::Csv | FormatArg::Pretty => {
            let mut t = columns.join(",");
            t.push('\n');
            for r in rows {
                let cells: Vec<String> = columns
                    .iter()
                    .map(|c| match &r[*c] {
                        serde_json::Value::Null => String::new(),
                        serde_json::Value::String(s) => s.clone(),
                        v => v.to_string(),
                    })
                    .collect();
                t.push_str(&cells.join(","));
                t.push('\n');
            }
            t
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Unsupported(_) => ExitCode::from(3),
                Error::Quadrature { .. } | Error::Numeric(_) | Error::Inconsistent(_) => {
                    ExitCode::from(4)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}
