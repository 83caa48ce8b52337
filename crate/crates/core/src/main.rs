//! `trapbound`: two-sided trapezoid-error envelopes from the command line.
//!
//! Exit codes: 0 on success, 1 on usage/parse/domain errors, 2 when a
//! mathematical inequality that should hold is violated.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use trapbound::means::ApplicationReport;
use trapbound::report::{
    builtin_corpus, csv_row, fmt_full, fmt_table, parse_corpus, render_table, sweep_csv, to_json,
    violated_checks, XChoice, CSV_HEADER,
};
use trapbound::{
    application_check, mean, mean_chain_check, solve_mvt, Application, FunctionDef, Interval,
    MeanKind, MeanPair, MeanValuePoint, SolveOptions,
};

#[derive(Parser)]
#[command(
    name = "trapbound",
    version,
    about = "Two-sided trapezoid-rule error bounds, mean-value points, and special means"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full envelope report for one function on one interval
    Bounds(BoundsArgs),
    /// Solve the mean-value equation and print the point
    Meanpoint(MeanpointArgs),
    /// Mean table with chain verdict, or a worked application check
    Means(MeansArgs),
    /// Run the pipeline over a corpus and emit CSV rows
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct BoundsArgs {
    /// Function of s, e.g. "1/s^2"
    #[arg(long = "fn")]
    function: String,
    /// Left endpoint
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Right endpoint
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    /// Evaluation point: "auto" solves the mean-value equation; a number
    /// probes the envelope there (the sandwich is then not enforced)
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    x: String,
    /// Root-solver tolerance (integrals always use the 1e-10 oracle)
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Scan-grid size for the mean-value solver
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct MeanpointArgs {
    /// Function of s, e.g. "exp(s)"
    #[arg(long = "fn")]
    function: String,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    /// List every root found, not just the canonical one
    #[arg(long)]
    all_roots: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct MeansArgs {
    /// First argument of the mean table
    #[arg(long, requires = "beta", allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Second argument of the mean table
    #[arg(long, requires = "alpha", allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Check a worked application: recip_sq, recip, log, or power
    #[arg(long, value_name = "WHICH", conflicts_with_all = ["alpha", "beta"])]
    check_app: Option<String>,
    /// Left endpoint for --check-app
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Right endpoint for --check-app
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Exponent for --check-app power
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct SweepArgs {
    /// Corpus file with `name | expression | a | b` lines
    #[arg(long, conflicts_with = "builtin")]
    corpus: Option<PathBuf>,
    /// Builtin corpus name
    #[arg(long, default_value = "paper")]
    builtin: String,
    /// Worker threads; output is byte-identical for any value
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1024)]
    grid: usize,
}

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

fn main() -> ExitCode {
    // Map clap usage errors to exit 1; 2 is reserved for mathematical
    // violations.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Bounds(args) => cmd_bounds(&args),
        Command::Meanpoint(args) => cmd_meanpoint(&args),
        Command::Means(args) => cmd_means(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    };
    ExitCode::from(code)
}

fn input_error(err: impl std::fmt::Display) -> u8 {
    eprintln!("error: {err}");
    EXIT_INPUT
}

fn cmd_bounds(args: &BoundsArgs) -> u8 {
    let iv = match Interval::new(args.a, args.b) {
        Ok(iv) => iv,
        Err(e) => return input_error(e),
    };
    let x_choice = if args.x == "auto" {
        XChoice::Auto
    } else {
        match args.x.parse::<f64>() {
            Ok(x) => XChoice::Manual(x),
            Err(_) => {
                return input_error(format!("--x must be `auto` or a number, got `{}`", args.x))
            }
        }
    };
    let opts = SolveOptions {
        grid_n: args.grid,
        tol: args.tol,
    };
    let (report, info) = match trapbound::report::build_report(&args.function, iv, x_choice, &opts)
    {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    match args.format {
        Format::Table => print!("{}", render_table(&report, &info)),
        Format::Json => println!("{}", to_json(&report)),
        Format::Csv => {
            println!("{CSV_HEADER}");
            println!("{}", csv_row(&report.function, &report));
        }
    }
    let violated = violated_checks(&report, &info);
    if violated.is_empty() {
        EXIT_OK
    } else {
        for name in violated {
            eprintln!("inequality violated: {name}");
        }
        EXIT_VIOLATION
    }
}

#[derive(Serialize)]
struct MeanPointJson {
    x: f64,
    residual: f64,
    degenerate: bool,
    roots: Vec<f64>,
}

fn cmd_meanpoint(args: &MeanpointArgs) -> u8 {
    let iv = match Interval::new(args.a, args.b) {
        Ok(iv) => iv,
        Err(e) => return input_error(e),
    };
    let f = match FunctionDef::parse(&args.function) {
        Ok(f) => f,
        Err(e) => return input_error(e),
    };
    let opts = SolveOptions {
        grid_n: args.grid,
        tol: args.tol,
    };
    let point: MeanValuePoint = match solve_mvt(&f, iv, &opts) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    match args.format {
        Format::Json => {
            let json = MeanPointJson {
                x: point.x,
                residual: point.residual,
                degenerate: point.degenerate,
                roots: point.roots.clone(),
            };
            println!("{}", to_json(&json));
        }
        Format::Csv => {
            println!("x,residual,degenerate");
            println!(
                "{},{},{}",
                fmt_full(point.x),
                fmt_full(point.residual),
                point.degenerate
            );
        }
        Format::Table => {
            println!("x           {}", fmt_full(point.x));
            println!("residual    {}", fmt_table(point.residual));
            println!("degenerate  {}", point.degenerate);
            if let Some((lo, hi)) = point.bracket {
                println!("bracket     [{}, {}]", fmt_full(lo), fmt_full(hi));
            }
            if args.all_roots {
                let roots = point
                    .roots
                    .iter()
                    .map(|r| fmt_full(*r))
                    .collect::<Vec<_>>()
                    .join(", ");
                println!("roots       [{roots}]");
            }
        }
    }
    EXIT_OK
}

#[derive(Serialize)]
struct MeansTableJson {
    alpha: f64,
    beta: f64,
    #[serde(rename = "A")]
    arithmetic: f64,
    #[serde(rename = "G")]
    geometric: f64,
    #[serde(rename = "H")]
    harmonic: f64,
    #[serde(rename = "L")]
    logarithmic: f64,
    #[serde(rename = "I")]
    identric: f64,
    #[serde(rename = "M_2")]
    power_2: f64,
    #[serde(rename = "L_2")]
    gen_log_2: f64,
    chain_ok: bool,
}

fn cmd_means(args: &MeansArgs) -> u8 {
    if let Some(which) = &args.check_app {
        let (a, b) = match (args.a, args.b) {
            (Some(a), Some(b)) => (a, b),
            _ => return input_error("--check-app requires --a and --b"),
        };
        let application = match which.as_str() {
            "recip_sq" => Application::RecipSq,
            "recip" => Application::Recip,
            "log" => Application::Log,
            "power" => match args.p {
                Some(p) => Application::Power(p),
                None => return input_error("--check-app power requires --p"),
            },
            other => {
                return input_error(format!(
                    "unknown application `{other}` (expected recip_sq, recip, log, power)"
                ))
            }
        };
        let iv = match Interval::new(a, b) {
            Ok(iv) => iv,
            Err(e) => return input_error(e),
        };
        let report = match application_check(application, iv) {
            Ok(r) => r,
            Err(e) => return input_error(e),
        };
        print_application(&report, args.format);
        return if report.sandwich_ok && report.middle_ok {
            EXIT_OK
        } else {
            if !report.sandwich_ok {
                eprintln!("inequality violated: application sandwich");
            }
            if !report.middle_ok {
                eprintln!(
                    "identity violated: mean-form middle vs quadrature (diff {})",
                    fmt_table(report.middle_abs_diff)
                );
            }
            EXIT_VIOLATION
        };
    }

    let (alpha, beta) = match (args.alpha, args.beta) {
        (Some(alpha), Some(beta)) => (alpha, beta),
        _ => return input_error("means needs --alpha and --beta (or --check-app)"),
    };
    let pair = match MeanPair::new(alpha, beta) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let value = |kind: MeanKind| mean(kind, pair).expect("total on positive pairs");
    let table = MeansTableJson {
        alpha,
        beta,
        arithmetic: value(MeanKind::Arithmetic),
        geometric: value(MeanKind::Geometric),
        harmonic: value(MeanKind::Harmonic),
        logarithmic: value(MeanKind::Logarithmic),
        identric: value(MeanKind::Identric),
        power_2: value(MeanKind::Power(2.0)),
        gen_log_2: value(MeanKind::GeneralizedLog(2.0)),
        chain_ok: mean_chain_check(pair),
    };
    match args.format {
        Format::Json => println!("{}", to_json(&table)),
        Format::Csv => {
            println!("mean,value");
            for (name, v) in [
                ("A", table.arithmetic),
                ("G", table.geometric),
                ("H", table.harmonic),
                ("L", table.logarithmic),
                ("I", table.identric),
                ("M_2", table.power_2),
                ("L_2", table.gen_log_2),
            ] {
                println!("{name},{}", fmt_full(v));
            }
            println!("chain_ok,{}", table.chain_ok);
        }
        Format::Table => {
            for (name, v) in [
                ("A  ", table.arithmetic),
                ("G  ", table.geometric),
                ("H  ", table.harmonic),
                ("L  ", table.logarithmic),
                ("I  ", table.identric),
                ("M_2", table.power_2),
                ("L_2", table.gen_log_2),
            ] {
                println!("{name}  {}", fmt_table(v));
            }
            println!(
                "chain H <= G <= L <= I <= A: {}",
                if table.chain_ok { "ok" } else { "VIOLATED" }
            );
        }
    }
    EXIT_OK
}

#[derive(Serialize)]
struct ApplicationJson {
    name: String,
    a: f64,
    b: f64,
    x: f64,
    degenerate: bool,
    mean_lower: f64,
    mean_middle: f64,
    mean_upper: f64,
    middle_abs_diff: f64,
    middle_ok: bool,
    sandwich_ok: bool,
}

fn print_application(report: &ApplicationReport, format: Format) {
    match format {
        Format::Json => {
            let json = ApplicationJson {
                name: report.name.clone(),
                a: report.a,
                b: report.b,
                x: report.mvt.x,
                degenerate: report.mvt.degenerate,
                mean_lower: report.mean_lower,
                mean_middle: report.mean_middle,
                mean_upper: report.mean_upper,
                middle_abs_diff: report.middle_abs_diff,
                middle_ok: report.middle_ok,
                sandwich_ok: report.sandwich_ok,
            };
            println!("{}", to_json(&json));
        }
        Format::Csv => {
            println!(
                "name,a,b,x,degenerate,mean_lower,mean_middle,mean_upper,middle_ok,sandwich_ok"
            );
            println!(
                "{},{},{},{},{},{},{},{},{},{}",
                report.name,
                fmt_full(report.a),
                fmt_full(report.b),
                fmt_full(report.mvt.x),
                report.mvt.degenerate,
                fmt_full(report.mean_lower),
                fmt_full(report.mean_middle),
                fmt_full(report.mean_upper),
                report.middle_ok,
                report.sandwich_ok,
            );
        }
        Format::Table => {
            println!("application    {}", report.name);
            println!(
                "interval       [{}, {}]",
                fmt_table(report.a),
                fmt_table(report.b)
            );
            println!(
                "x              {}{}",
                fmt_table(report.mvt.x),
                if report.mvt.degenerate {
                    " (degenerate)"
                } else {
                    ""
                }
            );
            if let (Some(cx), Some(diff)) = (report.closed_form_x, report.x_abs_diff) {
                println!(
                    "closed-form x  {} (|diff| {})",
                    fmt_table(cx),
                    fmt_table(diff)
                );
            }
            println!("mean lower     {}", fmt_table(report.mean_lower));
            println!("mean middle    {}", fmt_table(report.mean_middle));
            println!("mean upper     {}", fmt_table(report.mean_upper));
            println!(
                "middle check   {} (diff {})",
                if report.middle_ok { "ok" } else { "VIOLATED" },
                fmt_table(report.middle_abs_diff)
            );
            println!(
                "sandwich       {}",
                if report.sandwich_ok { "ok" } else { "VIOLATED" }
            );
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> u8 {
    let entries = if let Some(path) = &args.corpus {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return input_error(format!("cannot read {}: {e}", path.display())),
        };
        match parse_corpus(&text) {
            Ok(entries) => entries,
            Err(e) => return input_error(e),
        }
    } else {
        match builtin_corpus(&args.builtin) {
            Ok(entries) => entries,
            Err(e) => return input_error(e),
        }
    };
    let opts = SolveOptions {
        grid_n: args.grid,
        tol: args.tol,
    };
    match sweep_csv(&entries, &opts, args.jobs) {
        Ok(csv) => {
            print!("{csv}");
            EXIT_OK
        }
        Err(e) => input_error(e),
    }
}
