//! `rotbound` command-line front end.
//!
//! Exit status: 0 on success, 1 on invalid input or domain errors, 2 on
//! numerical failure (including a verification that does not hold).

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use rotbound::appendix::{check_lemma, Lemma};
use rotbound::bounds::eval_am;
use rotbound::matrix_lab::{optimal_partition, path_experiment, run_experiment, uniform_partition, Layout};
use rotbound::optimizer::{am_comparison_points, brute_force_tn, t1_closed, t2_closed};
use rotbound::{compare_bounds, t_closed, PaperConstants};

#[derive(Parser, Debug)]
#[command(name = "rotbound", version, about = "Optimal rotation bounds for spectral subspaces under off-diagonal perturbations")]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Bracket tolerance for the κ and ϑ root solves.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solved constants and branch breakpoints.
    Constants,
    /// Sweep every bound over a range of ratios.
    Curve {
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 0.5)]
        to: f64,
        #[arg(long, default_value_t = 500)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Closed-form maximiser of W at a total rotation budget θ.
    Optimize {
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
    },
    /// Grid-search oracle for T_n(θ), next to the closed form.
    Brute {
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1500)]
        steps: usize,
    },
    /// Grid verification of the auxiliary inequalities.
    VerifyAppendix {
        #[arg(long)]
        lemma: Option<Lemma>,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
    /// Checks x < T(M*(x)) with an explicit parameter sequence.
    VerifyRemarkAm {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    /// Random-matrix trials of the angle bound.
    Experiment {
        #[arg(long)]
        dim: usize,
        /// Fixed ‖V‖/d; sampled per trial from (0.01, c_crit − 0.001) when omitted.
        #[arg(long, allow_negative_numbers = true)]
        ratio: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
        /// Place part of the far cluster below σ.
        #[arg(long)]
        split_sigma: bool,
        /// Also write one row per trial to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Follow B_t = A + tV over a partition of [0, ratio].
    Path {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_negative_numbers = true)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
        /// Uniform partition with this many steps; the optimal partition when omitted.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        split_sigma: bool,
    },
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<rotbound::Error> for Failure {
    fn from(e: rotbound::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

/// What a subcommand produced, and whether the check it ran held.
struct Report {
    body: String,
    holds: bool,
}

fn round_sig(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.*e}", digits - 1).parse().unwrap_or(v)
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = json!(round_sig(x, 15));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn csv_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(csv_num).unwrap_or_default()
}

fn json_report<T: Serialize>(value: &T, holds: bool) -> Result<Report, Failure> {
    Ok(Report { body: to_json(value)?, holds })
}

fn check_finite(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Input(format!("--{name} must be finite, got {v}")))
    }
}

fn layout(split: bool) -> Layout {
    if split {
        Layout::Split
    } else {
        Layout::Subordinated
    }
}

fn curve(c: &PaperConstants, from: f64, to: f64, points: usize, format: Format) -> Result<Report, Failure> {
    check_finite("from", from)?;
    check_finite("to", to)?;
    if points < 2 {
        return Err(Failure::Input(format!("--points must be at least 2, got {points}")));
    }
    if !(0.0 <= from && from < to && to <= 0.5) {
        return Err(Failure::Input(format!("need 0 ≤ from < to ≤ 0.5, got [{from}, {to}]")));
    }
    let samples = (0..points)
        .map(|i| {
            let x = if i + 1 == points { to } else { from + (to - from) * i as f64 / (points - 1) as f64 };
            compare_bounds(x, c.kappa)
        })
        .collect::<rotbound::Result<Vec<_>>>()?;
    let body = match format {
        Format::Json => to_json(&samples)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "f_kmm", "f_ms", "m_star", "n"])?;
            for s in &samples {
                w.write_record([csv_num(s.x), csv_opt(s.kmm), csv_opt(s.ms), csv_opt(s.am), csv_opt(s.new)])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Failure::Input(e.to_string()))?)
                .expect("CSV of ASCII numbers is UTF-8")
        }
    };
    Ok(Report { body, holds: true })
}

fn brute(c: &PaperConstants, theta: f64, n: usize, steps: usize) -> Result<Report, Failure> {
    check_finite("theta", theta)?;
    let value = brute_force_tn(theta, n, steps)?;
    let closed = match n {
        0 => None,
        1 => t1_closed(theta).ok(),
        _ => t2_closed(theta, c.vartheta).ok(),
    };
    json_report(
        &json!({
            "theta": theta,
            "n": n,
            "steps": steps,
            "brute_force": value,
            "closed_form": closed,
            "difference": closed.map(|t| value - t),
        }),
        true,
    )
}

fn verify_appendix(c: &PaperConstants, lemma: Option<Lemma>, grid: usize) -> Result<Report, Failure> {
    let lemmas: Vec<Lemma> = lemma.map_or_else(|| Lemma::ALL.to_vec(), |l| vec![l]);
    let reports = lemmas
        .into_iter()
        .map(|l| check_lemma(l, grid, c.vartheta))
        .collect::<rotbound::Result<Vec<_>>>()?;
    let holds = reports.iter().all(|r| r.passed);
    json_report(&reports, holds)
}

fn verify_remark_am(c: &PaperConstants, x: f64) -> Result<Report, Failure> {
    check_finite("x", x)?;
    let (lambda, value) = am_comparison_points(x)?;
    let theta = eval_am(x)?;
    let t = t_closed(theta, c.vartheta)?;
    let holds = x < t.value && (value - x).abs() <= 1e-10;
    json_report(
        &json!({
            "x": x,
            "m_star": theta,
            "lambda": lambda,
            "max_w": value,
            "t_of_m_star": t.value,
            "margin": t.value - x,
            "holds": holds,
        }),
        holds,
    )
}

#[derive(Serialize)]
struct ExperimentSummary {
    seed: u64,
    dim: usize,
    trials: usize,
    gap: f64,
    ratio: Option<f64>,
    layout: Layout,
    violations: usize,
    min_slack: Option<f64>,
    max_measured: Option<f64>,
    max_measured_over_bound: Option<f64>,
    csv: Option<PathBuf>,
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    dim: usize,
    ratio: Option<f64>,
    trials: usize,
    seed: u64,
    gap: f64,
    split: bool,
    csv_path: Option<PathBuf>,
) -> Result<Report, Failure> {
    if let Some(r) = ratio {
        check_finite("ratio", r)?;
    }
    check_finite("gap", gap)?;
    let layout = layout(split);
    let records = run_experiment(seed, trials, dim, gap, ratio, layout)?;
    if let Some(path) = &csv_path {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["seed", "dim", "ratio", "measured", "bound", "slack"])?;
        for r in &records {
            w.write_record([
                r.seed.to_string(),
                r.dim.to_string(),
                csv_num(r.ratio),
                csv_num(r.measured.radians()),
                csv_num(r.bound.radians()),
                csv_num(r.slack),
            ])?;
        }
        w.flush()?;
    }
    let fold = |f: fn(&rotbound::matrix_lab::AngleRecord) -> f64, pick: fn(f64, f64) -> f64| {
        records.iter().map(f).reduce(pick)
    };
    let summary = ExperimentSummary {
        seed,
        dim,
        trials,
        gap,
        ratio,
        layout,
        violations: records.iter().filter(|r| r.slack < -1e-9).count(),
        min_slack: fold(|r| r.slack, f64::min),
        max_measured: fold(|r| r.measured.radians(), f64::max),
        max_measured_over_bound: fold(|r| r.measured.radians() / r.bound.radians(), f64::max),
        csv: csv_path,
    };
    let holds = summary.violations == 0;
    json_report(&summary, holds)
}

#[allow(clippy::too_many_arguments)]
fn path(
    c: &PaperConstants,
    dim: usize,
    ratio: f64,
    seed: u64,
    gap: f64,
    steps: Option<usize>,
    split: bool,
) -> Result<Report, Failure> {
    check_finite("ratio", ratio)?;
    let partition = match steps {
        Some(0) => return Err(Failure::Input("--steps must be positive".into())),
        Some(k) => uniform_partition(ratio, k),
        None => optimal_partition(ratio, c.kappa, c.vartheta)?,
    };
    let report = path_experiment(seed, dim, gap, ratio, &partition, layout(split))?;
    let holds = report.passed();
    json_report(&report, holds)
}

fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    if !(cli.tol > 0.0 && cli.tol < 1e-3) {
        return Err(Failure::Input(format!("--tol must lie in (0, 1e-3), got {}", cli.tol)));
    }
    let c = PaperConstants::compute(cli.tol)?;
    match &cli.command {
        Command::Constants => json_report(&c, true),
        Command::Curve { from, to, points, format } => curve(&c, *from, *to, *points, *format),
        Command::Optimize { theta } => {
            check_finite("theta", *theta)?;
            json_report(&t_closed(*theta, c.vartheta)?, true)
        }
        Command::Brute { theta, n, steps } => brute(&c, *theta, *n, *steps),
        Command::VerifyAppendix { lemma, grid } => verify_appendix(&c, *lemma, *grid),
        Command::VerifyRemarkAm { x } => verify_remark_am(&c, *x),
        Command::Experiment { dim, ratio, trials, seed, gap, split_sigma, csv } => {
            experiment(*dim, *ratio, *trials, *seed, *gap, *split_sigma, csv.clone())
        }
        Command::Path { dim, ratio, seed, gap, steps, split_sigma } => {
            path(&c, *dim, *ratio, *seed, *gap, *steps, *split_sigma)
        }
    }
}

fn emit(cli: &Cli, body: &str) -> io::Result<()> {
    match &cli.output {
        Some(p) => File::create(p)?.write_all(body.as_bytes()),
        None => io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            if let Err(e) = emit(&cli, &report.body) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if report.holds {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: verification did not hold");
                ExitCode::from(2)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
