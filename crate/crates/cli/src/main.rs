//! Command-line front end: every computation in the library as a subcommand
//! with machine-readable output.
//!
//! Exit codes: 0 on success, 1 on a domain or precondition error, 2 on a
//! usage error. JSON output carries a top-level `"schema": "yamabe-lab/1"`
//! key; identical arguments (and seed) produce byte-identical output.
//! `YAMABE_LAB_THREADS` caps internal parallelism.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::process::ExitCode;
use yamabe_lab::domain::{Domain, MetricData};
use yamabe_lab::energy::{boundary_quotient, yamabe_energy, FunctionOnDomain, Grids};
use yamabe_lab::harmonic::{nondegeneracy_check, steklov_spectrum, BoundaryTrace};
use yamabe_lab::minimize::{minimize_q, uniqueness_experiment, MinimizerConfig};
use yamabe_lab::schwarzschild::{self, SchwarzschildParams};
use yamabe_lab::{
    check_corollary_volume, check_cr_theorem, check_nonpositive_uniqueness, check_theorem1,
    cherrier_ball_bound, cherrier_condition, cherrier_reference_constant, CRData,
    DegeneracyVerdict, EscobarParams, Theorem1Input,
};

const SCHEMA: &str = "yamabe-lab/1";

#[derive(Parser)]
#[command(
    name = "yamabe-lab",
    version,
    about = "Numerical laboratory for boundary Yamabe-type energies on balls and annuli"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    /// Cap on worker threads (overrides YAMABE_LAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainKind {
    Ball,
    Annulus,
}

#[derive(Args, Clone)]
struct DomainArgs {
    /// Model domain.
    #[arg(long, value_enum, default_value_t = DomainKind::Ball)]
    domain: DomainKind,
    /// Ambient dimension (full angular resolution at n = 3, radial data above).
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Ball radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Annulus inner radius.
    #[arg(long, default_value_t = 0.5)]
    r_in: f64,
    /// Annulus outer radius.
    #[arg(long, default_value_t = 1.0)]
    r_out: f64,
}

impl DomainArgs {
    fn build(&self) -> yamabe_lab::Result<Domain> {
        match self.domain {
            DomainKind::Ball => Domain::ball(self.n, self.radius),
            DomainKind::Annulus => Domain::annulus(self.n, self.r_in, self.r_out),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Boundary Yamabe energy of a described metric on a ball or annulus.
    Energy {
        #[command(flatten)]
        domain: DomainArgs,
        /// Constant rescaling of the Euclidean metric.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Band limit controlling the quadrature resolution.
        #[arg(long, default_value_t = 4)]
        l_max: usize,
    },
    /// Conformal boundary quotient of a trace's harmonic extension.
    Quotient {
        #[command(flatten)]
        domain: DomainArgs,
        /// Constant trace value per boundary component (comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0], allow_negative_numbers = true)]
        constant: Vec<f64>,
        /// Extra coefficient, repeatable: component,l,m,value.
        #[arg(long = "coeff")]
        coeffs: Vec<String>,
        #[arg(long, default_value_t = 8)]
        l_max: usize,
    },
    /// Minimize the quotient over boundary traces by projected gradient descent.
    Minimize {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 8)]
        l_max: usize,
        /// Mean-curvature constant per boundary component (defaults to the
        /// Euclidean values).
        #[arg(
            long = "h-boundary",
            value_delimiter = ',',
            allow_negative_numbers = true
        )]
        h_boundary: Option<Vec<f64>>,
        /// Amplitude of the random initial perturbation around 1.
        #[arg(long, default_value_t = 0.3)]
        init_amplitude: f64,
        /// Extra initial coefficient, repeatable: component,l,m,value.
        #[arg(long = "init-coeff")]
        init_coeffs: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        grad_tol: f64,
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
        /// Run this many seeded starts and report the ratio spread of the
        /// first two (a uniqueness experiment).
        #[arg(long)]
        multi_start: Option<usize>,
        /// Write the iteration history (iter,energy,grad_norm) to this CSV.
        #[arg(long)]
        history: Option<std::path::PathBuf>,
    },
    /// Steklov spectrum of a ball or annulus, with a degeneracy verdict.
    Steklov {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 8)]
        l_max: usize,
        /// Constant mean curvature to test: is H/(n-1) in the spectrum?
        #[arg(long = "H", allow_negative_numbers = true)]
        h: Option<f64>,
        /// Membership tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Energy-comparison sufficient condition for a pair of metrics.
    CheckThm1 {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Volume ratio Vol(M,h)/Vol(M,g).
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Constant C in the area comparison dA_g <= C^{(n-1)/2} dA_h.
        #[arg(long = "c")]
        area_constant: f64,
        #[arg(long)]
        h_g: f64,
        #[arg(long)]
        h_h: f64,
        /// Sup of the largest eigenvalue of H_h h against H_g g.
        #[arg(long)]
        ratio_sup: f64,
        /// Assert the exact area relation instead of the C bound.
        #[arg(long, default_value_t = false)]
        area_equality: bool,
    },
    /// Volume-normalized corollary of the comparison condition.
    CheckCorollary {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Acknowledge Vol(M,h) = Vol(M,g); required.
        #[arg(long, default_value_t = false)]
        vol_equal: bool,
        #[arg(long)]
        h_g: f64,
        #[arg(long)]
        h_h: f64,
        /// Sup of the boundary density difference (see docs).
        #[arg(long, allow_negative_numbers = true)]
        density_condition: f64,
    },
    /// Nonpositive-curvature uniqueness criterion on summarized data.
    CheckNonpositive {
        /// Max |R| over the two metrics.
        #[arg(long, default_value_t = 0.0)]
        r_max_abs: f64,
        /// Mean-curvature constants of the first metric, per component.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        h_first: Vec<f64>,
        /// Mean-curvature constants of the second metric, per component.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        h_second: Vec<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Smallness condition for prescribed boundary curvature; with no
    /// explicit data, the closed-form unit-ball bound.
    Cherrier {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sup_v_prime: Option<f64>,
        #[arg(long)]
        c_bound: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Schwarzschild annulus: curvatures, energies, limits, threshold mass.
    Annulus {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Inner radius in (0, 1).
        #[arg(long)]
        r: f64,
        /// Mass parameter.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Sweep masses on a log grid up to this value and emit a table.
        #[arg(long)]
        sweep_to: Option<f64>,
        #[arg(long, default_value_t = 33)]
        sweep_points: usize,
        /// Locate the threshold mass for the energy comparison.
        #[arg(long, default_value_t = false)]
        find_m0: bool,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// The closed-form solution family on the unit ball: residuals and the
    /// quotient's constancy across family members.
    Escobar {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Family center along the first axis, |a| < 1.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a: f64,
        /// Additional centers for a constancy report (comma separated).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        family: Option<Vec<f64>>,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Umbilicity-defect sweep along the bumped-ball boundary.
    Bump {
        #[arg(long)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.3)]
        width: f64,
        #[arg(long, default_value_t = 720)]
        samples: usize,
    },
    /// CR energy (and optionally the conformal quotient) of tabulated data.
    CrEnergy {
        /// CSV with columns weight,R and optionally u,grad_norm.
        #[arg(long)]
        csv: std::path::PathBuf,
        /// CR dimension parameter (real dimension 2n+1).
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Also evaluate the conformal quotient (needs u and grad_norm).
        #[arg(long, default_value_t = false)]
        quotient: bool,
    },
    /// CR energy-comparison sufficient condition.
    CheckCr {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        r_theta: f64,
        #[arg(long)]
        r_big_theta: f64,
        #[arg(long)]
        ratio_sup: f64,
    },
}

/// Tabular payload for the csv format.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

struct Report {
    command: &'static str,
    params: Value,
    result: Value,
    table: Option<Table>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("YAMABE_LAB_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .ok();
    match run(&cli) {
        Ok(report) => match emit(&cli, &report) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(1)
            }
        },
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn parse_coeff(spec: &str) -> yamabe_lab::Result<(usize, usize, isize, f64)> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 4 {
        return Err(yamabe_lab::Error::InvalidInput(format!(
            "coefficient {spec:?} must be component,l,m,value"
        )));
    }
    let bad = |what: &str| yamabe_lab::Error::InvalidInput(format!("bad {what} in {spec:?}"));
    Ok((
        parts[0].trim().parse().map_err(|_| bad("component"))?,
        parts[1].trim().parse().map_err(|_| bad("degree"))?,
        parts[2].trim().parse().map_err(|_| bad("order"))?,
        parts[3].trim().parse().map_err(|_| bad("value"))?,
    ))
}

fn trace_from_args(
    domain: &Domain,
    l_max: usize,
    constants: &[f64],
    coeffs: &[String],
) -> yamabe_lab::Result<BoundaryTrace> {
    let n_comp = domain.boundary_components().len();
    let mut constants = constants.to_vec();
    if constants.len() == 1 && n_comp == 2 {
        constants.push(constants[0]);
    }
    let mut trace = BoundaryTrace::constant(domain, l_max, &constants)?;
    for spec in coeffs {
        let (comp, l, m, value) = parse_coeff(spec)?;
        if comp >= n_comp || l > l_max || m.unsigned_abs() > l {
            return Err(yamabe_lab::Error::InvalidInput(format!(
                "coefficient {spec:?} out of range"
            )));
        }
        trace = trace.with_coefficient(comp, l, m, value);
    }
    Ok(trace)
}

fn run(cli: &Cli) -> yamabe_lab::Result<Report> {
    match &cli.command {
        Command::Energy {
            domain,
            scale,
            l_max,
        } => {
            let dom = domain.build()?;
            let grids = Grids::new(&dom, *l_max);
            let metric =
                MetricData::euclidean(&dom, &grids.volume, &grids.sphere).scaled(*scale, dom.n());
            let report = yamabe_energy(&dom, &metric, &grids)?;
            Ok(Report {
                command: "energy",
                params: json!({"n": dom.n(), "scale": scale, "l_max": l_max}),
                result: serde_json::to_value(report).unwrap(),
                table: None,
            })
        }
        Command::Quotient {
            domain,
            constant,
            coeffs,
            l_max,
        } => {
            let dom = domain.build()?;
            let grids = Grids::new(&dom, *l_max);
            let metric = MetricData::euclidean(&dom, &grids.volume, &grids.sphere);
            let trace = trace_from_args(&dom, *l_max, constant, coeffs)?;
            let phi = FunctionOnDomain::harmonic(&dom, &trace, &grids)?;
            let q = boundary_quotient(&dom, &metric, &phi, &grids)?;
            Ok(Report {
                command: "quotient",
                params: json!({"n": dom.n(), "l_max": l_max}),
                result: json!({"quotient": q, "dirichlet": phi.dirichlet}),
                table: None,
            })
        }
        Command::Minimize {
            domain,
            l_max,
            h_boundary,
            init_amplitude,
            init_coeffs,
            seed,
            grad_tol,
            max_iters,
            multi_start,
            history,
        } => {
            let dom = domain.build()?;
            let grids = Grids::new(&dom, *l_max);
            let mut metric = MetricData::euclidean(&dom, &grids.volume, &grids.sphere);
            if let Some(hs) = h_boundary {
                if hs.len() != metric.boundary.len() {
                    return Err(yamabe_lab::Error::InvalidInput(format!(
                        "{} boundary curvatures for {} components",
                        hs.len(),
                        metric.boundary.len()
                    )));
                }
                for (b, h) in metric.boundary.iter_mut().zip(hs) {
                    b.mean_curvature.fill(*h);
                }
            }
            let config = MinimizerConfig {
                l_max: *l_max,
                grad_tol: *grad_tol,
                max_iters: *max_iters,
                seed: *seed,
                ..Default::default()
            };
            let init_for = |s: u64| -> yamabe_lab::Result<BoundaryTrace> {
                let mut trace = yamabe_lab::random_trace(&dom, *l_max, s, *init_amplitude)?;
                for spec in init_coeffs {
                    let (comp, l, m, value) = parse_coeff(spec)?;
                    trace = trace.with_coefficient(comp, l, m, value);
                }
                Ok(trace)
            };
            let runs = multi_start.unwrap_or(1).max(1);
            let results: Vec<_> = (0..runs)
                .map(|k| {
                    let init = init_for(seed + k as u64)?;
                    minimize_q(&dom, &metric, &init, &config, &grids)
                })
                .collect::<yamabe_lab::Result<_>>()?;
            if let Some(path) = history {
                let file = std::fs::File::create(path)?;
                results[0].write_history_csv(std::io::BufWriter::new(file))?;
            }
            let best = results
                .iter()
                .min_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap())
                .unwrap();
            let spread = if results.len() >= 2 {
                Some(uniqueness_experiment(
                    &dom,
                    &grids,
                    &results[0],
                    &results[1],
                )?)
            } else {
                None
            };
            let table = Table {
                header: vec!["iter".into(), "energy".into(), "grad_norm".into()],
                rows: results[0]
                    .energies
                    .iter()
                    .zip(&results[0].grad_norms)
                    .enumerate()
                    .map(|(i, (e, g))| vec![i.to_string(), e.to_string(), g.to_string()])
                    .collect(),
            };
            Ok(Report {
                command: "minimize",
                params: json!({
                    "n": dom.n(), "l_max": l_max, "seed": seed,
                    "grad_tol": grad_tol, "max_iters": max_iters, "runs": runs,
                }),
                result: json!({
                    "energy": best.energy,
                    "iterations": best.iterations,
                    "converged": best.converged,
                    "positive": best.positive,
                    "final_grad_norm": best.grad_norms.last(),
                    "energies": results.iter().map(|r| r.energy).collect::<Vec<_>>(),
                    "ratio_spread": spread.map(|s| s.ratio_spread),
                }),
                table: Some(table),
            })
        }
        Command::Steklov {
            domain,
            l_max,
            h,
            tol,
        } => {
            let dom = domain.build()?;
            let spectrum = steklov_spectrum(&dom, *l_max)?;
            let verdict = h.map(|h| nondegeneracy_check(h, &spectrum, dom.n(), Some(*tol)));
            let table = Table {
                header: vec!["index".into(), "eigenvalue".into()],
                rows: spectrum
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vec![i.to_string(), v.to_string()])
                    .collect(),
            };
            Ok(Report {
                command: "steklov",
                params: json!({"n": dom.n(), "l_max": l_max, "H": h, "tol": tol}),
                result: json!({
                    "eigenvalues": spectrum.eigenvalues,
                    "certified_up_to": spectrum.certified_up_to,
                    "degenerate": verdict
                        .as_ref()
                        .map(|v| v.verdict == DegeneracyVerdict::Degenerate),
                    "verdict": verdict,
                }),
                table: Some(table),
            })
        }
        Command::CheckThm1 {
            n,
            gamma,
            area_constant,
            h_g,
            h_h,
            ratio_sup,
            area_equality,
        } => {
            let report = check_theorem1(&Theorem1Input {
                n: *n,
                gamma: *gamma,
                area_constant: *area_constant,
                h_g: *h_g,
                h_h: *h_h,
                metric_ratio_sup: *ratio_sup,
                area_equality: *area_equality,
            })?;
            Ok(Report {
                command: "check-thm1",
                params: json!({"n": n, "gamma": gamma, "C": area_constant,
                               "H_g": h_g, "H_h": h_h, "ratio_sup": ratio_sup}),
                result: serde_json::to_value(report).unwrap(),
                table: None,
            })
        }
        Command::CheckCorollary {
            n,
            vol_equal,
            h_g,
            h_h,
            density_condition,
        } => {
            let report = check_corollary_volume(*n, *vol_equal, *h_g, *h_h, *density_condition)?;
            Ok(Report {
                command: "check-corollary",
                params: json!({"n": n, "H_g": h_g, "H_h": h_h,
                               "density_condition": density_condition}),
                result: serde_json::to_value(report).unwrap(),
                table: None,
            })
        }
        Command::CheckNonpositive {
            r_max_abs,
            h_first,
            h_second,
            tol,
        } => {
            let verdict = check_nonpositive_uniqueness(*r_max_abs, h_first, h_second, *tol);
            Ok(Report {
                command: "check-nonpositive",
                params: json!({"r_max_abs": r_max_abs, "tol": tol}),
                result: serde_json::to_value(verdict).unwrap(),
                table: None,
            })
        }
        Command::Cherrier {
            n,
            sup_v_prime,
            c_bound,
            mu,
        } => match (sup_v_prime, c_bound, mu) {
            (Some(v), Some(c), Some(mu)) => {
                let check = cherrier_condition(*n, *v, *c, *mu)?;
                Ok(Report {
                    command: "cherrier",
                    params: json!({"n": n, "sup_v_prime": v, "c_bound": c, "mu": mu}),
                    result: serde_json::to_value(check).unwrap(),
                    table: None,
                })
            }
            (None, None, None) => {
                if *n < 3 {
                    return Err(yamabe_lab::Error::InvalidInput(format!(
                        "dimension {n} < 3"
                    )));
                }
                let bound = cherrier_ball_bound(*n);
                Ok(Report {
                    command: "cherrier",
                    params: json!({"n": n}),
                    result: json!({
                        "bound": bound,
                        "reference_bound": cherrier_reference_constant(*n),
                        "satisfied": bound < 1.0,
                    }),
                    table: None,
                })
            }
            _ => Err(yamabe_lab::Error::InvalidInput(
                "give all of --sup-v-prime, --c-bound, --mu, or none of them".into(),
            )),
        },
        Command::Annulus {
            n,
            r,
            m,
            sweep_to,
            sweep_points,
            find_m0,
            tol,
        } => {
            let p = SchwarzschildParams::new(*n, *r, *m)?;
            let dom = p.domain();
            let grids = Grids::new(&dom, 2);
            let (h_inner, h_outer) = schwarzschild::schwarzschild_mean_curvatures(&p);
            let pipeline = schwarzschild::pipeline_energy(&p, &grids)?;
            // the Euclidean annulus energy by direct quadrature of the
            // definition, next to its closed form
            let euclid_metric = MetricData::euclidean(&dom, &grids.volume, &grids.sphere);
            let euclid_quadrature = yamabe_energy(&dom, &euclid_metric, &grids)?.energy;
            let mut result = json!({
                "m": m,
                "energy": schwarzschild::schwarzschild_energy(&p),
                "euclid_energy": schwarzschild::euclidean_annulus_energy(*n, *r),
                "euclid_energy_quadrature": euclid_quadrature,
                "limit": schwarzschild::schwarzschild_energy_limit(*n, *r),
                "h_inner": h_inner,
                "h_outer": h_outer,
                "pipeline_energy": pipeline.energy,
            });
            let mut table = None;
            if let Some(m_max) = sweep_to {
                let points = (*sweep_points).max(2);
                let lo = (m.max(1e-6)).ln();
                let hi = m_max.ln();
                let masses: Vec<f64> = (0..points)
                    .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
                    .collect();
                let rows = schwarzschild::sweep(*n, *r, &masses)?;
                result["sweep"] = serde_json::to_value(&rows).unwrap();
                table = Some(Table {
                    header: vec![
                        "m".into(),
                        "energy".into(),
                        "euclid_energy".into(),
                        "limit".into(),
                    ],
                    rows: rows
                        .iter()
                        .map(|row| {
                            vec![
                                row.m.to_string(),
                                row.energy.to_string(),
                                row.euclid_energy.to_string(),
                                row.limit.to_string(),
                            ]
                        })
                        .collect(),
                });
            }
            if *find_m0 {
                let report = schwarzschild::find_m0(*n, *r, *tol)?;
                result["m0"] = serde_json::to_value(report).unwrap();
            }
            Ok(Report {
                command: "annulus",
                params: json!({"n": n, "r": r, "m": m}),
                result,
                table,
            })
        }
        Command::Escobar {
            n,
            a,
            family,
            resolution,
        } => {
            let p = EscobarParams::axial(*n, *a)?;
            let res = yamabe_lab::escobar_residual(&p, *resolution);
            let q = yamabe_lab::escobar_quotient(&p, None);
            let mut result = json!({
                "a": a,
                "residual_interior": res.interior_max,
                "residual_boundary": res.boundary_max,
                "quotient": q,
            });
            let mut table = None;
            if let Some(centers) = family {
                let mut rows = Vec::new();
                let mut values = Vec::new();
                for &c in centers {
                    let pc = EscobarParams::axial(*n, c)?;
                    let qc = yamabe_lab::escobar_quotient(&pc, None);
                    let rc = yamabe_lab::escobar_residual(&pc, *resolution);
                    values.push(qc);
                    rows.push(vec![
                        c.to_string(),
                        qc.to_string(),
                        rc.boundary_max.to_string(),
                    ]);
                }
                let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - values.iter().cloned().fold(f64::INFINITY, f64::min);
                result["family_quotients"] = json!(values);
                result["family_spread"] = json!(spread);
                table = Some(Table {
                    header: vec!["a".into(), "quotient".into(), "boundary_residual".into()],
                    rows,
                });
            }
            Ok(Report {
                command: "escobar",
                params: json!({"n": n, "a": a, "resolution": resolution}),
                result,
                table,
            })
        }
        Command::Bump {
            amplitude,
            width,
            samples,
        } => {
            let demo = yamabe_lab::bump_ball_demo(*amplitude, *width, *samples)?;
            let table = Table {
                header: vec!["theta".into(), "defect".into()],
                rows: demo
                    .profile
                    .iter()
                    .map(|(t, d)| vec![t.to_string(), d.to_string()])
                    .collect(),
            };
            Ok(Report {
                command: "bump",
                params: json!({"amplitude": amplitude, "width": width, "samples": samples}),
                result: json!({
                    "max_defect": demo.max_defect,
                    "argmax_theta": demo.argmax_theta,
                }),
                table: Some(table),
            })
        }
        Command::CrEnergy { csv, n, quotient } => {
            let data = CRData::from_csv(csv, *n)?;
            let energy = yamabe_lab::cr_energy(&data)?;
            let q = if *quotient {
                Some(yamabe_lab::cr_quotient(&data)?)
            } else {
                None
            };
            Ok(Report {
                command: "cr-energy",
                params: json!({"n": n, "nodes": data.weights.len()}),
                result: json!({
                    "energy": energy,
                    "quotient": q,
                    "volume": data.volume(),
                }),
                table: None,
            })
        }
        Command::CheckCr {
            gamma,
            r_theta,
            r_big_theta,
            ratio_sup,
        } => {
            let report = check_cr_theorem(*gamma, *r_theta, *r_big_theta, *ratio_sup)?;
            Ok(Report {
                command: "check-cr",
                params: json!({"gamma": gamma, "R_theta": r_theta,
                               "R_Theta": r_big_theta, "ratio_sup": ratio_sup}),
                result: serde_json::to_value(report).unwrap(),
                table: None,
            })
        }
    }
}

fn emit(cli: &Cli, report: &Report) -> std::io::Result<()> {
    let text = match cli.format {
        Format::Json => {
            let envelope = json!({
                "schema": SCHEMA,
                "command": report.command,
                "params": report.params,
                "result": report.result,
            });
            let mut s = serde_json::to_string_pretty(&envelope).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => match &report.table {
            Some(table) => {
                let mut s = table.header.join(",");
                s.push('\n');
                for row in &table.rows {
                    s.push_str(&row.join(","));
                    s.push('\n');
                }
                s
            }
            None => {
                let mut s = String::from("key,value\n");
                flatten(&report.result, "", &mut |key, value| {
                    s.push_str(&format!("{key},{value}\n"));
                });
                s
            }
        },
        Format::Human => {
            let mut s = format!("{}\n", report.command);
            flatten(&report.result, "", &mut |key, value| {
                s.push_str(&format!("  {key} = {value}\n"));
            });
            s
        }
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Depth-first flattening of a JSON value into dotted key/value lines.
fn flatten(value: &Value, prefix: &str, sink: &mut impl FnMut(&str, String)) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(v, &key, sink);
            }
        }
        Value::Array(items) => {
            if items.len() > 12 {
                sink(prefix, format!("[{} values]", items.len()));
            } else {
                for (i, v) in items.iter().enumerate() {
                    flatten(v, &format!("{prefix}[{i}]"), sink);
                }
            }
        }
        other => sink(prefix, render_scalar(other)),
    }
}

fn render_scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
