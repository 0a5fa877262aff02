//! Command-line front end: deterministic runs, CSV/JSON artifacts, atomic
//! writes, and one distinct exit code per error class.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use convnorm::bounds::{bounds_row, BoundsRow};
use convnorm::diagnostics::{
    center_shift, delta_diameter, near_support, validate_lemma_3_1, validate_lemma_4_1,
};
use convnorm::engine::{iterate, InitialCondition, IterationConfig};
use convnorm::exponents::ExponentTriple;
use convnorm::grid::{read_csv, sample_kernel, write_csv, KernelSpec};
use convnorm::laplace::{reproduce_table1, sweep_minimum, Table1Row};
use convnorm::oracle::{
    brute_force_norm, chirp_decay, engine_norm, fit_loglog_slope, spectral_norm_p2,
    DiscreteOperator,
};
use convnorm::{Error, Result};

#[derive(Parser)]
#[command(
    name = "convnorm",
    version,
    about = "Numerical (p,r)-norms of convolution operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Grid size N (defaults: 512; chirp uses 16384)
    #[arg(long, global = true, alias = "N")]
    n: Option<usize>,

    /// Grid half-length L (defaults: 16; chirp uses 8)
    #[arg(long, global = true, alias = "L")]
    l: Option<f64>,

    /// Stopping tolerance on the p'-power norm increments
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Iteration budget (half-steps)
    #[arg(long, global = true, default_value_t = 10_000)]
    max_iter: usize,

    /// Seed for every randomized component
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file; stdout when omitted. Writes are atomic (temp + rename).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format (each command has a canonical default)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Debug)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bound columns over a grid of p
    Bounds {
        /// Single abscissa; overrides the grid flags
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1.05)]
        p_min: f64,
        #[arg(long, default_value_t = 1.95)]
        p_max: f64,
        #[arg(long, default_value_t = 0.05)]
        p_step: f64,
    },
    /// Run the fixed-point iteration for one kernel and exponent pair
    Solve {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        /// Explicit r (otherwise solved from 1/p + 1/q + 1/r = 2)
        #[arg(long)]
        r: Option<f64>,
        /// laplace | gaussian[:b] | chirp:LAMBDA[:b] | file:PATH
        #[arg(long, default_value = "laplace")]
        kernel: String,
        /// gaussian[:dispersion] | indicator:a:b
        #[arg(long, default_value = "gaussian:1")]
        initial: String,
        /// Write the final iterate as CSV (plus sidecar) to this path
        #[arg(long)]
        final_f: Option<PathBuf>,
        /// Rerun with 2N and 2L and report per-value deltas
        #[arg(long)]
        double_check: bool,
    },
    /// Reproduce the reference table of Laplace norms
    Table1 {
        #[arg(long)]
        double_check: bool,
    },
    /// Scan and refine the minimum of N(p)
    Sweep {
        #[arg(long, default_value_t = 1.02)]
        p_lo: f64,
        #[arg(long, default_value_t = 1.98)]
        p_hi: f64,
        #[arg(long, default_value_t = 0.02)]
        coarse_step: f64,
        #[arg(long, default_value_t = 1e-4)]
        refine_tol: f64,
        /// Also emit the four bound columns per scan point (plot data)
        #[arg(long)]
        with_bounds: bool,
    },
    /// Concentration diagnostics of a serialized grid function
    Diag {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        p: f64,
    },
    /// Randomized validators for the two elementary lemmas
    Validate {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Compare engine, brute force, and (at p = 2) the spectral formula on Z/m
    Oracle {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[arg(long, default_value_t = 1.5)]
        q: f64,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Chirped-kernel norm decay over a list of rates
    Chirp {
        #[arg(long, default_value = "16,32,64,128", value_delimiter = ',')]
        lambdas: Vec<f64>,
        /// Gaussian base kernel width
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bounds { .. } => "bounds",
            Command::Solve { .. } => "solve",
            Command::Table1 { .. } => "table1",
            Command::Sweep { .. } => "sweep",
            Command::Diag { .. } => "diag",
            Command::Validate { .. } => "validate",
            Command::Oracle { .. } => "oracle",
            Command::Chirp { .. } => "chirp",
        }
    }

    fn default_grid(&self) -> (usize, f64) {
        match self {
            Command::Chirp { .. } => (16_384, 8.0),
            _ => (512, 16.0),
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Bounds { .. }
            | Command::Table1 { .. }
            | Command::Sweep { .. }
            | Command::Chirp { .. } => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// The fully resolved configuration, embedded into every artifact.
#[derive(Serialize, Clone)]
struct ResolvedConfig {
    command: String,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
    output: String,
    format: String,
}

impl ResolvedConfig {
    fn csv_header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# command = {}", self.command);
        let _ = writeln!(s, "# N = {}", self.n);
        let _ = writeln!(s, "# L = {}", fmt_f64(self.l));
        let _ = writeln!(s, "# tol = {}", fmt_f64(self.tol));
        let _ = writeln!(s, "# max_iter = {}", self.max_iter);
        let _ = writeln!(s, "# seed = {}", self.seed);
        let _ = writeln!(s, "# output = {}", self.output);
        let _ = writeln!(s, "# format = {}", self.format);
        s
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InfeasibleExponents(_) => 3,
        Error::Domain(_) | Error::Parse(_) => 4,
        Error::Io(_) => 5,
        Error::ValidatorFailed(_)
        | Error::CrosscheckFailed(_)
        | Error::Precondition(_)
        | Error::ParametersInfeasible(_) => 6,
        Error::ShapeMismatch(_)
        | Error::ZeroFunction(_)
        | Error::DegenerateConvolution
        | Error::DegenerateWindow(_)
        | Error::ChirpUnresolved(_) => 7,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Domain(_) => "domain",
        Error::InfeasibleExponents(_) => "infeasible_exponents",
        Error::ShapeMismatch(_) => "shape_mismatch",
        Error::ZeroFunction(_) => "zero_function",
        Error::DegenerateConvolution => "degenerate_convolution",
        Error::Precondition(_) => "precondition",
        Error::ParametersInfeasible(_) => "parameters_infeasible",
        Error::DegenerateWindow(_) => "degenerate_window",
        Error::ValidatorFailed(_) => "validator_failed",
        Error::CrosscheckFailed(_) => "crosscheck_failed",
        Error::ChirpUnresolved(_) => "chirp_unresolved",
        Error::Io(_) => "io",
        Error::Parse(_) => "parse",
    }
}

/// Write atomically: temp file in the target directory, then rename.
fn write_output(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp~");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(output: &Option<PathBuf>, contents: &str) -> Result<()> {
    match output {
        Some(path) => write_output(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn parse_kernel(spec: &str, p: f64) -> Result<KernelSpec> {
    let mut parts = spec.split(':');
    let head = parts.next().unwrap_or_default();
    let rest: Vec<&str> = parts.collect();
    let parse_num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|e| Error::Parse(format!("kernel parameter '{s}': {e}")))
    };
    match head {
        "laplace" => Ok(KernelSpec::LaplaceHp { p }),
        "gaussian" => {
            let b = rest.first().map(|s| parse_num(s)).transpose()?.unwrap_or(1.0);
            Ok(KernelSpec::Gaussian { b })
        }
        "chirp" => {
            let lambda = rest
                .first()
                .ok_or_else(|| Error::Parse("chirp kernel needs a rate: chirp:LAMBDA[:b]".into()))
                .and_then(|s| parse_num(s))?;
            let b = rest.get(1).map(|s| parse_num(s)).transpose()?.unwrap_or(1.0);
            Ok(KernelSpec::Chirped { base: Box::new(KernelSpec::Gaussian { b }), lambda })
        }
        "file" => {
            let path = rest
                .first()
                .ok_or_else(|| Error::Parse("file kernel needs a path: file:PATH".into()))?;
            Ok(KernelSpec::Tabulated(read_csv(Path::new(path))?))
        }
        other => Err(Error::Parse(format!(
            "unknown kernel '{other}' (expected laplace | gaussian[:b] | chirp:LAMBDA[:b] | file:PATH)"
        ))),
    }
}

fn parse_initial(spec: &str) -> Result<InitialCondition> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse_num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|e| Error::Parse(format!("initial parameter '{s}': {e}")))
    };
    match parts.as_slice() {
        ["gaussian"] => Ok(InitialCondition::Gaussian { dispersion: 1.0 }),
        ["gaussian", d] => Ok(InitialCondition::Gaussian {
            dispersion: parse_num(d)?,
        }),
        ["indicator", a, b] => Ok(InitialCondition::Indicator {
            a: parse_num(a)?,
            b: parse_num(b)?,
        }),
        _ => Err(Error::Parse(format!(
            "unknown initial condition '{spec}' (expected gaussian[:d] | indicator:a:b)"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (dn, dl) = cli.command.default_grid();
    let n = cli.n.unwrap_or(dn);
    let l = cli.l.unwrap_or(dl);
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let config = ResolvedConfig {
        command: cli.command.name().to_string(),
        n,
        l,
        tol: cli.tol,
        max_iter: cli.max_iter,
        seed: cli.seed,
        output: cli
            .output
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "-".into()),
        format: format!("{format:?}").to_lowercase(),
    };
    match run(&cli, n, l, format, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let record = json!({
                "error": { "kind": error_kind(&err), "message": err.to_string() }
            });
            eprintln!("{record}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn run(cli: &Cli, n: usize, l: f64, format: Format, config: &ResolvedConfig) -> Result<()> {
    let iter_cfg = IterationConfig {
        tol: cli.tol,
        max_iter: cli.max_iter,
        ..Default::default()
    };
    match &cli.command {
        Command::Bounds {
            p,
            p_min,
            p_max,
            p_step,
        } => {
            let ps: Vec<f64> = match p {
                Some(p) => vec![*p],
                None => {
                    if !(*p_step > 0.0 && p_min <= p_max) {
                        return Err(Error::domain("need p_min <= p_max and p_step > 0"));
                    }
                    let count = ((p_max - p_min) / p_step).round() as usize;
                    (0..=count).map(|i| p_min + i as f64 * p_step).collect()
                }
            };
            let rows: Vec<BoundsRow> = ps.iter().map(|&p| bounds_row(p)).collect::<Result<_>>()?;
            let contents = match format {
                Format::Csv => {
                    let mut s = config.csv_header();
                    s.push_str("p,c_rt,c_f,c_h,c_s,empirical_gap\n");
                    for r in &rows {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{}",
                            fmt_f64(r.p),
                            fmt_f64(r.c_rt),
                            fmt_f64(r.c_f),
                            fmt_f64(r.c_h),
                            fmt_f64(r.c_s),
                            fmt_f64(r.empirical_gap)
                        );
                    }
                    s
                }
                Format::Json => pretty(&json!({ "config": config, "rows": rows })),
            };
            emit(&cli.output, &contents)
        }

        Command::Solve {
            p,
            q,
            r,
            kernel,
            initial,
            final_f,
            double_check,
        } => {
            let triple = match r {
                Some(r) => ExponentTriple::new(*p, *q, *r)?,
                None => ExponentTriple::complete(*p, *q)?,
            };
            let spec = parse_kernel(kernel, *p)?;
            let mut cfg = iter_cfg.clone();
            cfg.initial = parse_initial(initial)?;
            // a tabulated kernel carries its own grid
            let (n, l) = match &spec {
                KernelSpec::Tabulated(g) => (g.len(), g.half_length()),
                _ => (n, l),
            };
            let run_once = |n: usize, l: f64| -> Result<_> {
                let sampled = sample_kernel(&spec, n, l, triple.q())?;
                iterate(&sampled, &triple, &cfg)
            };
            let report = run_once(n, l)?;
            if let Some(path) = final_f {
                write_csv(&report.final_f, path)?;
            }
            let double = if *double_check {
                if matches!(spec, KernelSpec::Tabulated(_) | KernelSpec::Discrete(_)) {
                    return Err(Error::domain(
                        "--double-check needs a resamplable kernel; tabulated data cannot be refined",
                    ));
                }
                let r2n = run_once(2 * n, l)?;
                let r2l = run_once(n, 2.0 * l)?;
                Some(json!({
                    "norm_2n": r2n.norm_estimate,
                    "delta_2n": r2n.norm_estimate - report.norm_estimate,
                    "norm_2l": r2l.norm_estimate,
                    "delta_2l": r2l.norm_estimate - report.norm_estimate,
                }))
            } else {
                None
            };
            let contents = match format {
                Format::Json => {
                    let mut doc = json!({
                        "p": triple.p(),
                        "q": triple.q(),
                        "r": triple.r(),
                        "N": n,
                        "L": l,
                        "tol": cli.tol,
                        "max_iter": cli.max_iter,
                        "norm_estimate": report.norm_estimate,
                        "iterations_used": report.iterations_used,
                        "residual": report.residual,
                        "converged": report.converged,
                        "truncation_bound": report.truncation_bound,
                        "history": report.history,
                        "shifts": report.shifts,
                        "config": config,
                    });
                    if let Some(d) = double {
                        doc["double_check"] = d;
                    }
                    pretty(&doc)
                }
                Format::Csv => {
                    let mut s = config.csv_header();
                    s.push_str(
                        "p,q,r,norm_estimate,iterations_used,residual,converged,truncation_bound\n",
                    );
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{}",
                        fmt_f64(triple.p()),
                        fmt_f64(triple.q()),
                        fmt_f64(triple.r()),
                        fmt_f64(report.norm_estimate),
                        report.iterations_used,
                        fmt_f64(report.residual),
                        report.converged,
                        fmt_f64(report.truncation_bound)
                    );
                    s
                }
            };
            emit(&cli.output, &contents)
        }

        Command::Table1 { double_check } => {
            let rows = reproduce_table1(n, l, &iter_cfg);
            let doubled = if *double_check {
                let base_l = rows
                    .iter()
                    .find_map(|r| r.run.as_ref().ok().map(|run| run.l))
                    .unwrap_or(l);
                Some((
                    reproduce_table1(2 * n, l, &iter_cfg),
                    reproduce_table1(n, 2.0 * base_l, &iter_cfg),
                ))
            } else {
                None
            };
            let contents = match format {
                Format::Csv => table1_csv(config, &rows, doubled.as_ref()),
                Format::Json => {
                    let items: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|row| match &row.run {
                            Ok(run) => json!({
                                "p": row.p,
                                "n_numeric": run.report.norm_estimate,
                                "c_sb": run.bounds.c_s,
                                "iterations": run.report.iterations_used,
                                "residual": run.report.residual,
                                "truncation_bound": run.report.truncation_bound,
                                "L": run.l,
                                "converged": run.report.converged,
                                "truncation_warning": run.truncation_warning,
                            }),
                            Err(e) => json!({ "p": row.p, "error": e.to_string() }),
                        })
                        .collect();
                    pretty(&json!({ "config": config, "rows": items }))
                }
            };
            emit(&cli.output, &contents)
        }

        Command::Sweep {
            p_lo,
            p_hi,
            coarse_step,
            refine_tol,
            with_bounds,
        } => {
            let result = sweep_minimum(*p_lo, *p_hi, *coarse_step, *refine_tol, n, l, &iter_cfg)?;
            let mut s = config.csv_header();
            let _ = writeln!(s, "# p_star = {}", fmt_f64(result.p_star));
            let _ = writeln!(s, "# n_star = {}", fmt_f64(result.n_star));
            let _ = writeln!(s, "# unimodal = {}", result.unimodal);
            if *with_bounds {
                s.push_str("p,n_numeric,c_rt,c_f,c_h,c_s\n");
                for &(p, v) in &result.scan {
                    let row = bounds_row(p)?;
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        fmt_f64(p),
                        fmt_f64(v),
                        fmt_f64(row.c_rt),
                        fmt_f64(row.c_f),
                        fmt_f64(row.c_h),
                        fmt_f64(row.c_s)
                    );
                }
            } else {
                s.push_str("p,n_numeric\n");
                for &(p, v) in &result.scan {
                    let _ = writeln!(s, "{},{}", fmt_f64(p), fmt_f64(v));
                }
            }
            let summary = pretty(&json!({
                "p_star": result.p_star,
                "n_star": result.n_star,
                "unimodal": result.unimodal,
                "config": config,
            }));
            match format {
                Format::Csv => {
                    emit(&cli.output, &s)?;
                    match &cli.output {
                        Some(path) => {
                            let mut os = path.as_os_str().to_owned();
                            os.push(".summary.json");
                            write_output(Path::new(&os), &summary)
                        }
                        None => {
                            print!("{summary}");
                            Ok(())
                        }
                    }
                }
                Format::Json => emit(
                    &cli.output,
                    &pretty(&json!({
                        "p_star": result.p_star,
                        "n_star": result.n_star,
                        "unimodal": result.unimodal,
                        "scan": result.scan,
                        "config": config,
                    })),
                ),
            }
        }

        Command::Diag { input, delta, p } => {
            let f = read_csv(input)?;
            let diameter = delta_diameter(&f, *delta, *p)?;
            let support = near_support(&f, *delta, *p)?;
            let shift = center_shift(&f, *delta, *p)?;
            let doc = json!({
                "diameter": diameter,
                "near_support": { "a": support.a, "b": support.b },
                "center_shift": shift,
                "delta": delta,
                "p": p,
                "input": input.display().to_string(),
                "config": config,
            });
            emit(&cli.output, &pretty(&doc))
        }

        Command::Validate { samples } => {
            let r31 = validate_lemma_3_1(*samples, cli.seed)?;
            let r41 = validate_lemma_4_1(*samples, cli.seed.wrapping_add(1))?;
            let doc = json!({
                "lemma_3_1": r31,
                "lemma_4_1": r41,
                "config": config,
            });
            emit(&cli.output, &pretty(&doc))
        }

        Command::Oracle {
            m,
            p,
            q,
            r,
            restarts,
        } => {
            let triple = match r {
                Some(r) => ExponentTriple::new(*p, *q, *r)?,
                None => ExponentTriple::complete(*p, *q)?,
            };
            let op = DiscreteOperator::random(*m, triple, cli.seed)?;
            let spectral = if (triple.p() - 2.0).abs() <= 1e-12 && (triple.r() - 2.0).abs() <= 1e-12
            {
                Some(spectral_norm_p2(&op)?)
            } else {
                None
            };
            let engine_value = engine_norm(&op, *restarts, cli.seed ^ 0x00b5)?;
            let brute = brute_force_norm(&op, *restarts, cli.seed ^ 0x5a5a)?;
            let mut agree = (engine_value - brute).abs() <= 1e-6;
            if let Some(s) = spectral {
                agree &= (s - brute).abs() <= 1e-10;
            }
            let doc = json!({
                "m": m,
                "p": triple.p(),
                "q": triple.q(),
                "r": triple.r(),
                "spectral": spectral,
                "brute_force": brute,
                "engine": engine_value,
                "agree": agree,
                "restarts": restarts,
                "config": config,
            });
            emit(&cli.output, &pretty(&doc))
        }

        Command::Chirp { lambdas, b, p, q } => {
            let triple = ExponentTriple::complete(*p, *q)?;
            let base = KernelSpec::Gaussian { b: *b };
            let points = chirp_decay(&base, lambdas, n, l, &triple)?;
            let slope = fit_loglog_slope(&points);
            let contents = match format {
                Format::Csv => {
                    let mut s = config.csv_header();
                    s.push_str("lambda,norm,slope_fit\n");
                    for &(lambda, norm) in &points {
                        let _ = writeln!(
                            s,
                            "{},{},{}",
                            fmt_f64(lambda),
                            fmt_f64(norm),
                            fmt_f64(slope)
                        );
                    }
                    s
                }
                Format::Json => pretty(&json!({
                    "points": points,
                    "slope_fit": slope,
                    "config": config,
                })),
            };
            emit(&cli.output, &contents)
        }
    }
}

fn table1_csv(
    config: &ResolvedConfig,
    rows: &[Table1Row],
    doubled: Option<&(Vec<Table1Row>, Vec<Table1Row>)>,
) -> String {
    let mut s = config.csv_header();
    if doubled.is_some() {
        s.push_str("p,n_numeric,c_sb,iterations,residual,truncation_bound,delta_2n,delta_2l\n");
    } else {
        s.push_str("p,n_numeric,c_sb,iterations,residual,truncation_bound\n");
    }
    for (i, row) in rows.iter().enumerate() {
        match &row.run {
            Ok(run) => {
                let _ = write!(
                    s,
                    "{},{},{},{},{},{}",
                    fmt_f64(row.p),
                    fmt_f64(run.report.norm_estimate),
                    fmt_f64(run.bounds.c_s),
                    run.report.iterations_used,
                    fmt_f64(run.report.residual),
                    fmt_f64(run.report.truncation_bound)
                );
                if let Some((by_n, by_l)) = doubled {
                    let delta = |other: &Table1Row| -> String {
                        other
                            .run
                            .as_ref()
                            .map(|o| fmt_f64(o.report.norm_estimate - run.report.norm_estimate))
                            .unwrap_or_else(|e| format!("error: {e}"))
                    };
                    let _ = write!(s, ",{},{}", delta(&by_n[i]), delta(&by_l[i]));
                }
                s.push('\n');
            }
            Err(e) => {
                let _ = writeln!(s, "{},error: {e}", fmt_f64(row.p));
            }
        }
    }
    s
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON serializes");
    s.push('\n');
    s
}
