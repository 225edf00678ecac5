//! Command-line front end: tables, verification suites and seeded experiments.
//!
//! Output is deterministic for a given configuration. The thread count can
//! be set with `RAYON_NUM_THREADS`; it does not change any output.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kohn_sphere::coefficients::{candidate_destinations, coeff, epsilon, support, Direction};
use kohn_sphere::exact::rational_string;
use num::Zero;
use kohn_sphere::multiplier_calculus::{
    bochner_riesz_sweep, component_section, log_spaced, m_theta_norm_sq, m_theta_norm_sq_exact, plancherel_check,
    shell_sum_estimate, sobolev_check, weighted_kernel_norm_sq, ComponentCache, KernelPolynomial, McOptions,
    Multiplier, PlancherelOptions, WeightedNorm,
};
use kohn_sphere::spectrum::{dimension, indices_with_eigenvalue_sq, shell, FormIndex, Kind};
use kohn_sphere::sphere_geometry::{
    mc_ball_statistics, rational_sphere_points, surface_measure, triangle_inequality_violations, ExactScalar,
    SpherePoint,
};
use kohn_sphere::verify::{run_suite, Suite, VerifyConfig};
use kohn_sphere::Error;

/// Exit code for invalid input.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for failed verification or internal errors.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A parsed invocation.
#[derive(Debug, Parser)]
#[command(name = "kohn-sphere", version, about = "Spectral calculus of the Kohn Laplacian on spheres")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct Degree {
    /// Complex dimension.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Form degree.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
}

#[derive(Debug, Args)]
pub struct Component {
    #[command(flatten)]
    pub degree: Degree,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub p: i64,
    #[arg(long, default_value_t = 1)]
    pub q: i64,
    /// Phi or Psi.
    #[arg(long, default_value = "Phi")]
    pub kind: String,
}

#[derive(Debug, Args)]
pub struct Sampling {
    /// Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Seed; required whenever sampling happens.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Eigenvalues,
    Coefficients,
    Kernels,
    Plancherel,
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    /// Indicator of `(0, 1]`.
    Indicator,
    /// `lambda` on `[0, 1]`.
    Ramp,
    /// Smooth bump centred at `1/2` with radius `1/2`.
    Bump,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeometryCheck {
    Balls,
    Triangle,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Components with eigenvalue at most `imax`, or shell totals.
    Spectrum {
        #[command(flatten)]
        degree: Degree,
        #[arg(long, default_value_t = 4)]
        imax: u64,
        /// One row per shell with its total dimension.
        #[arg(long)]
        shells: bool,
    },
    /// Multiplication coefficients of one component.
    Coeffs {
        #[command(flatten)]
        component: Component,
    },
    /// Exact identity suites; exits with 1 on any failure.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// All degrees when omitted.
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, default_value_t = 2)]
        pmax: i64,
        #[arg(long, default_value_t = 2)]
        qmax: i64,
        /// Exact base points for kernel identities.
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Ball measures, weighted ball integrals and the triangle inequality.
    Geometry {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_enum, default_value = "balls")]
        check: GeometryCheck,
        /// Radii; defaults to 0.1, 0.2, ..., 2.
        #[arg(long, value_delimiter = ',')]
        r: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Norms of one component kernel at an exact base point.
    Kernel {
        #[command(flatten)]
        component: Component,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        /// Index of the exact base point.
        #[arg(long, default_value_t = 1)]
        point: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Weighted Plancherel ratios for `F = G(. / N)`.
    Plancherel {
        #[command(flatten)]
        degree: Degree,
        #[arg(long = "N", value_delimiter = ',', default_value = "4,8,16,32")]
        big_n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.4")]
        theta: Vec<f64>,
        #[arg(long, value_enum, default_value = "indicator")]
        shape: Shape,
        /// Also compute the left side exactly (theta 0 or 1 only).
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 1)]
        point: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Lattice and shell sums.
    Shells {
        #[command(flatten)]
        degree: Degree,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 20)]
        imax: u64,
    },
    /// Spectral bounds for `(1 + r^2 box_b)^{-l}`.
    Sobolev {
        #[command(flatten)]
        degree: Degree,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5,1,2,4")]
        r: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        ell: u32,
    },
    /// L1 norms of Bochner-Riesz kernels.
    Riesz {
        #[command(flatten)]
        degree: Degree,
        /// Defaults to 2n.
        #[arg(long)]
        delta: Option<f64>,
        /// Defaults to 12 log-spaced values in [1/48, 1/4].
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        /// Number of exact base points.
        #[arg(long, default_value_t = 1)]
        points: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
}

/// A failure mapped to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidDimension(_)
            | Error::InvalidDegree { .. }
            | Error::InvalidIndex { .. }
            | Error::InvalidArgument(_)
            | Error::Divergent(_)
            | Error::NotUnit(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    }
}

type Outcome = std::result::Result<(), Failure>;

fn emit<T: Serialize>(rows: &[T], format: Format, out: &mut dyn Write) -> Outcome {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(io_failure)?;
            }
            w.flush().map_err(io_failure)
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows).map_err(io_failure)?;
            writeln!(out).map_err(io_failure)
        }
    }
}

fn require_seed(s: &Sampling, default_samples: usize) -> std::result::Result<McOptions, Failure> {
    let seed = s
        .seed
        .ok_or_else(|| usage("--seed is required for Monte Carlo commands"))?;
    let samples = s.samples.unwrap_or(default_samples);
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    Ok(McOptions { samples, seed })
}

fn optional_mc(s: &Sampling) -> std::result::Result<Option<McOptions>, Failure> {
    match (s.samples, s.seed) {
        (None, None) => Ok(None),
        (_, None) => Err(usage("--seed is required with --samples")),
        (samples, Some(seed)) => Ok(Some(McOptions {
            samples: samples.unwrap_or(20_000),
            seed,
        })),
    }
}

fn parse_index(c: &Component) -> std::result::Result<FormIndex, Failure> {
    let kind: Kind = c.kind.parse()?;
    Ok(FormIndex::new(c.degree.n, c.degree.j, c.p, c.q, kind)?)
}

fn base_point(n: usize, index: usize) -> std::result::Result<SpherePoint, Failure> {
    kohn_sphere::spectrum::is_valid_index(n, 0, 0, 0, Kind::Phi)?;
    Ok(rational_sphere_points(n, index + 1, 0).swap_remove(index))
}

#[derive(Serialize)]
struct SpectrumRow {
    kind: Kind,
    p: i64,
    q: i64,
    lambda_sq: u64,
    dim: String,
}

#[derive(Serialize)]
struct ShellRow {
    i: u64,
    members: usize,
    total_dim: String,
    ratio: f64,
}

#[derive(Serialize)]
struct CoeffRow {
    quantity: &'static str,
    source: String,
    kind: Kind,
    p: i64,
    q: i64,
    value: String,
}

#[derive(Serialize)]
struct SuiteRow {
    suite: Suite,
    checks: usize,
    failures: usize,
    status: &'static str,
}

#[derive(Serialize)]
struct BallRow {
    t: f64,
    ball_measure: f64,
    ball_measure_se: f64,
    measure_ratio: f64,
    measure_ratio_se: f64,
    doubling_ratio: f64,
    doubling_ratio_se: f64,
    weighted_ratio: f64,
    weighted_ratio_se: f64,
}

#[derive(Serialize)]
struct TriangleRow {
    n: usize,
    triples: usize,
    violations: usize,
}

#[derive(Serialize)]
struct QuantityRow {
    quantity: &'static str,
    rational: Option<String>,
    pi_power: Option<i32>,
    value: f64,
    std_err: f64,
}

impl QuantityRow {
    fn exact(quantity: &'static str, v: &ExactScalar) -> Self {
        QuantityRow {
            quantity,
            rational: Some(rational_string(v.real_part())),
            pi_power: Some(v.pi_power),
            value: v.to_f64(),
            std_err: 0.0,
        }
    }
}

#[derive(Serialize)]
struct PlancherelRow {
    big_n: usize,
    theta: f64,
    support: usize,
    m_theta_norm_sq: f64,
    m_half_theta_norm_sq: f64,
    shell_max_sum: f64,
    n_norm: f64,
    shell_ratio: f64,
    hormander_ratio: f64,
    exact_lhs: Option<String>,
    exact_lhs_pi_power: Option<i32>,
    mc_lhs: Option<f64>,
    mc_lhs_se: Option<f64>,
}

#[derive(Serialize)]
struct RieszRow {
    point: usize,
    t: f64,
    support: usize,
    l1: f64,
    std_err: f64,
}

/// Executes a parsed configuration, writing results to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cfg.output {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => {
                let mut w = std::io::BufWriter::new(f);
                let r = execute(cfg, &mut w, err);
                r.and_then(|_| w.flush().map_err(io_failure))
            }
            Err(e) => Err(usage(format!("cannot create {}: {e}", path.display()))),
        },
        None => execute(cfg, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let format = cfg.format;
    match &cfg.command {
        Command::Spectrum { degree, imax, shells } => {
            let (n, j) = (degree.n, degree.j);
            if *shells {
                let mut rows = Vec::new();
                for i in 2..=*imax {
                    let s = shell(n, j, i)?;
                    let total = s.total_dimension();
                    rows.push(ShellRow {
                        i,
                        members: s.members.len(),
                        ratio: total.to_string().parse::<f64>().unwrap_or(f64::INFINITY)
                            / (i as f64).powi(2 * n as i32 - 1),
                        total_dim: total.to_string(),
                    });
                }
                emit(&rows, format, out)
            } else {
                let rows: Vec<SpectrumRow> = indices_with_eigenvalue_sq(n, j, 1, imax * imax)?
                    .into_iter()
                    .map(|idx| SpectrumRow {
                        kind: idx.kind(),
                        p: idx.p(),
                        q: idx.q(),
                        lambda_sq: idx.eigenvalue_sq(),
                        dim: dimension(&idx).to_string(),
                    })
                    .collect();
                emit(&rows, format, out)
            }
        }
        Command::Coeffs { component } => {
            let src = parse_index(component)?;
            let mut rows = Vec::new();
            for (quantity, d) in [("delta", Direction::Z), ("delta_bar", Direction::ZBar)] {
                for dst in support(d, &src) {
                    rows.push(CoeffRow {
                        quantity,
                        source: src.to_string(),
                        kind: dst.kind(),
                        p: dst.p(),
                        q: dst.q(),
                        value: rational_string(&coeff(d, &src, &dst)),
                    });
                }
            }
            for dst in candidate_destinations(&src) {
                let e = epsilon(&src, &dst);
                if !e.is_zero() {
                    rows.push(CoeffRow {
                        quantity: "epsilon",
                        source: src.to_string(),
                        kind: dst.kind(),
                        p: dst.p(),
                        q: dst.q(),
                        value: rational_string(&e),
                    });
                }
            }
            emit(&rows, format, out)
        }
        Command::Verify {
            suite,
            n,
            j,
            pmax,
            qmax,
            points,
            seed,
        } => {
            let vc = VerifyConfig {
                n: *n,
                j: *j,
                pmax: *pmax,
                qmax: *qmax,
                points: *points,
                seed: *seed,
            };
            let suites: Vec<Suite> = match suite {
                SuiteArg::Eigenvalues => vec![Suite::Eigenvalues],
                SuiteArg::Coefficients => vec![Suite::Coefficients],
                SuiteArg::Kernels => vec![Suite::Kernels],
                SuiteArg::Plancherel => vec![Suite::Plancherel],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            let mut rows = Vec::new();
            let mut first = None;
            for s in suites {
                let r = run_suite(s, &vc)?;
                if first.is_none() {
                    first = r.failures.first().cloned();
                }
                rows.push(SuiteRow {
                    suite: s,
                    checks: r.checks,
                    failures: r.failures.len(),
                    status: if r.passed() { "pass" } else { "fail" },
                });
            }
            emit(&rows, format, out)?;
            match first {
                Some(f) => {
                    let _ = writeln!(err, "counterexample: {}\n  left:  {}\n  right: {}", f.check, f.left, f.right);
                    Err(Failure {
                        code: EXIT_FAILURE,
                        message: "verification failed".into(),
                    })
                }
                None => Ok(()),
            }
        }
        Command::Geometry {
            n,
            check,
            r,
            theta,
            sampling,
        } => {
            let mc = require_seed(sampling, 100_000)?;
            match check {
                GeometryCheck::Triangle => {
                    kohn_sphere::spectrum::is_valid_index(*n, 0, 0, 0, Kind::Phi)?;
                    let v = triangle_inequality_violations(*n, mc.samples, mc.seed);
                    emit(
                        &[TriangleRow {
                            n: *n,
                            triples: mc.samples,
                            violations: v,
                        }],
                        format,
                        out,
                    )
                }
                GeometryCheck::Balls => {
                    let radii: Vec<f64> = if r.is_empty() {
                        (1..=20).map(|k| k as f64 / 10.0).collect()
                    } else {
                        r.clone()
                    };
                    let z = base_point(*n, 0)?.to_float();
                    let mut rows = Vec::new();
                    for t in radii {
                        let b = mc_ball_statistics(&z, t, *theta, mc.samples, mc.seed)?;
                        let (m, wr) = (b.measure_ratio(), b.weighted_ratio());
                        rows.push(BallRow {
                            t,
                            ball_measure: b.ball_measure.mean,
                            ball_measure_se: b.ball_measure.std_err,
                            measure_ratio: m.mean,
                            measure_ratio_se: m.std_err,
                            doubling_ratio: b.doubling_ratio.mean,
                            doubling_ratio_se: b.doubling_ratio.std_err,
                            weighted_ratio: wr.mean,
                            weighted_ratio_se: wr.std_err,
                        });
                    }
                    emit(&rows, format, out)
                }
            }
        }
        Command::Kernel {
            component,
            theta,
            point,
            sampling,
        } => {
            let idx = parse_index(component)?;
            let mc = optional_mc(sampling)?;
            let w = base_point(idx.n(), *point)?;
            let cache = ComponentCache::new();
            let section = component_section(&*cache.get(&idx)?, &w)?;
            let mut k = KernelPolynomial::new(idx.n(), idx.j())?;
            k.insert(idx, num::complex::Complex64::new(1.0, 0.0))?;
            let dim = ExactScalar::rational(num::BigRational::from_integer(num::BigInt::from(dimension(&idx))), 0);
            let mut rows = vec![
                QuantityRow::exact("hs_integral", &section.hs_integral()),
                QuantityRow::exact("dim_over_sigma", &(&dim / &surface_measure(idx.n()))),
            ];
            rows.push(match weighted_kernel_norm_sq(&k, &w, *theta, mc, &cache)? {
                WeightedNorm::Exact(v) => QuantityRow::exact("weighted_norm_sq", &v),
                WeightedNorm::Estimate(e) => QuantityRow {
                    quantity: "weighted_norm_sq",
                    rational: None,
                    pi_power: None,
                    value: e.mean,
                    std_err: e.std_err,
                },
            });
            if *theta == 0.0 || *theta == 1.0 {
                let exact = k.to_exact()?;
                rows.push(QuantityRow::exact(
                    "m_theta_norm_sq",
                    &m_theta_norm_sq_exact(&exact, *theta as u8)?,
                ));
            } else {
                rows.push(QuantityRow {
                    quantity: "m_theta_norm_sq",
                    rational: None,
                    pi_power: None,
                    value: m_theta_norm_sq(&k, *theta)?,
                    std_err: 0.0,
                });
            }
            emit(&rows, format, out)
        }
        Command::Plancherel {
            degree,
            big_n,
            theta,
            shape,
            exact,
            point,
            sampling,
        } => {
            let mc = optional_mc(sampling)?;
            let w = base_point(degree.n, *point)?;
            let g = match shape {
                Shape::Indicator => Multiplier::Indicator {
                    lo: 0.0,
                    hi: 1.0,
                    lo_closed: false,
                    hi_closed: true,
                },
                Shape::Ramp => Multiplier::ramp(),
                Shape::Bump => Multiplier::Bump {
                    center: 0.5,
                    radius: 0.5,
                },
            };
            let cache = ComponentCache::new();
            let mut rows = Vec::new();
            for nn in big_n {
                for th in theta {
                    let opts = PlancherelOptions { exact: *exact, mc };
                    let r = plancherel_check(&g, degree.n, degree.j, *nn, *th, &w, opts, &cache)?;
                    rows.push(PlancherelRow {
                        big_n: r.big_n,
                        theta: r.theta,
                        support: r.support,
                        m_theta_norm_sq: r.m_theta_norm_sq,
                        m_half_theta_norm_sq: r.m_half_theta_norm_sq,
                        shell_max_sum: r.shell_max_sum,
                        n_norm: r.n_norm,
                        shell_ratio: r.shell_ratio,
                        hormander_ratio: r.hormander_ratio,
                        exact_lhs: r.exact_lhs.as_ref().map(|v| rational_string(v.real_part())),
                        exact_lhs_pi_power: r.exact_lhs.as_ref().map(|v| v.pi_power),
                        mc_lhs: r.mc_lhs.map(|e| e.mean),
                        mc_lhs_se: r.mc_lhs.map(|e| e.std_err),
                    });
                }
            }
            emit(&rows, format, out)
        }
        Command::Shells { degree, theta, imax } => {
            let rows = (2..=*imax)
                .map(|i| shell_sum_estimate(degree.n, degree.j, *theta, i))
                .collect::<kohn_sphere::Result<Vec<_>>>()?;
            emit(&rows, format, out)
        }
        Command::Sobolev { degree, r, ell } => {
            let rows = r
                .iter()
                .map(|r| sobolev_check(degree.n, degree.j, *r, *ell))
                .collect::<kohn_sphere::Result<Vec<_>>>()?;
            emit(&rows, format, out)
        }
        Command::Riesz {
            degree,
            delta,
            t,
            points,
            sampling,
        } => {
            let mc = require_seed(sampling, 20_000)?;
            let delta = delta.unwrap_or(2.0 * degree.n as f64);
            let ts = if t.is_empty() {
                log_spaced(1.0 / 48.0, 0.25, 12)
            } else {
                t.clone()
            };
            let cache = ComponentCache::new();
            let mut rows = Vec::new();
            for k in 0..(*points).max(1) {
                let w = base_point(degree.n, k)?;
                let opts = McOptions {
                    samples: mc.samples,
                    seed: mc.seed.wrapping_add(k as u64),
                };
                for p in bochner_riesz_sweep(degree.n, degree.j, delta, &ts, &w, opts, &cache)? {
                    rows.push(RieszRow {
                        point: k,
                        t: p.t,
                        support: p.support,
                        l1: p.l1.mean,
                        std_err: p.l1.std_err,
                    });
                }
            }
            emit(&rows, format, out)
        }
    }
}

