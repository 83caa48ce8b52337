//! Report assembly and rendering for the CLI: the stable JSON schema, the
//! CSV row format, the human table, corpus files, and the sweep driver.
//!
//! Floating-point values are printed with 17 significant digits in JSON and
//! CSV so every value round-trips exactly; tables use 6.

use std::io;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounds::{
    alt_form_bounds, classical_trap_bound, envelope, gap_delta, intermediate_sandwich_check, psi,
    simpson_exactness, SIMPSON_CLASS_TOL,
};
use crate::expr::FunctionDef;
use crate::meanvalue::{average_gap_derivative, secant_slope, solve_mvt, SolveOptions};
use crate::quad::Interval;
use crate::Error;

/// How the report's evaluation point was chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XChoice {
    /// Solve the mean-value equation.
    Auto,
    /// Use a caller-supplied interior point; the envelope sandwich is then
    /// not guaranteed and is reported but not enforced.
    Manual(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalJson {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvtJson {
    pub x: f64,
    pub residual: f64,
    pub degenerate: bool,
    pub roots: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryJson {
    #[serde(rename = "M")]
    pub max_dist: f64,
    #[serde(rename = "m")]
    pub min_dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeJson {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AltFormJson {
    pub lower_int: f64,
    pub upper_int: f64,
    pub integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpsonJson {
    #[serde(rename = "in_class_F")]
    pub in_class_f: bool,
    pub value: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecksJson {
    pub sandwich_ok: bool,
    pub eq24_ok: bool,
    pub delta_identity_ok: bool,
}

/// The full per-run report, with the stable field names of the JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub function: String,
    pub interval: IntervalJson,
    pub mvt: MvtJson,
    pub geometry: GeometryJson,
    pub envelope: EnvelopeJson,
    pub alt_form: AltFormJson,
    pub psi: f64,
    pub classical_trap_bound: f64,
    pub simpson: SimpsonJson,
    pub checks: ChecksJson,
}

/// Run metadata shown in the table output but outside the JSON schema.
#[derive(Debug, Clone, PartialEq)]
pub struct RunInfo {
    pub elapsed: Duration,
    pub solver_tol: f64,
    pub grid_n: usize,
    pub x_was_solved: bool,
    /// The sandwich is only guaranteed (and enforced by the exit code) for
    /// a solved, non-degenerate mean-value point.
    pub sandwich_applicable: bool,
}

/// Build the full report for one function and interval.
pub fn build_report(
    function_text: &str,
    iv: Interval,
    x_choice: XChoice,
    opts: &SolveOptions,
) -> Result<(Report, RunInfo), Error> {
    let started = Instant::now();
    let f = FunctionDef::parse(function_text)?.with_domain_hint(iv);

    let (mvt, x_was_solved) = match x_choice {
        XChoice::Auto => (solve_mvt(&f, iv, opts)?, true),
        XChoice::Manual(x) => {
            let secant = secant_slope(&f, iv)?;
            let residual = (average_gap_derivative(&f, iv, x)? - secant).abs();
            (
                crate::meanvalue::MeanValuePoint {
                    x,
                    residual,
                    degenerate: false,
                    roots: vec![x],
                    bracket: None,
                },
                false,
            )
        }
    };

    let x = mvt.x;
    let env = envelope(&f, iv, x)?;
    let alt = alt_form_bounds(&f, iv, x)?;
    let psi_value = psi(&f, iv, x)?.value;
    let classical = classical_trap_bound(&f, iv)?;
    let simpson = simpson_exactness(&f, iv, SIMPSON_CLASS_TOL)?;
    let delta_closed = gap_delta(&f, iv, x)?;

    let sandwich_slack = 1e-9 * (1.0 + env.middle.abs());
    let checks = ChecksJson {
        sandwich_ok: env.lower <= env.middle + sandwich_slack
            && env.middle <= env.upper + sandwich_slack,
        eq24_ok: intermediate_sandwich_check(&f, iv, x)?,
        delta_identity_ok: (delta_closed - env.delta).abs() <= 1e-9 * (1.0 + env.delta.abs()),
    };

    let report = Report {
        function: function_text.to_string(),
        interval: IntervalJson {
            a: iv.a(),
            b: iv.b(),
        },
        mvt: MvtJson {
            x: mvt.x,
            residual: mvt.residual,
            degenerate: mvt.degenerate,
            roots: mvt.roots.clone(),
        },
        geometry: GeometryJson {
            max_dist: env.geometry.max_dist,
            min_dist: env.geometry.min_dist,
        },
        envelope: EnvelopeJson {
            lower: env.lower,
            middle: env.middle,
            upper: env.upper,
            delta: env.delta,
        },
        alt_form: AltFormJson {
            lower_int: alt.lower_int,
            upper_int: alt.upper_int,
            integral: env.integral,
        },
        psi: psi_value,
        classical_trap_bound: classical,
        simpson: SimpsonJson {
            in_class_f: simpson.in_class_f,
            value: simpson.simpson_value,
            discrepancy: simpson.discrepancy,
        },
        checks,
    };
    let info = RunInfo {
        elapsed: started.elapsed(),
        solver_tol: opts.tol,
        grid_n: opts.grid_n,
        x_was_solved,
        sandwich_applicable: x_was_solved && !mvt.degenerate,
    };
    Ok((report, info))
}

/// Names of the applicable checks that failed; exit code 2 when non-empty.
pub fn violated_checks(report: &Report, info: &RunInfo) -> Vec<&'static str> {
    let mut violated = Vec::new();
    if info.sandwich_applicable && !report.checks.sandwich_ok {
        violated.push("envelope sandwich (lower <= middle <= upper)");
    }
    if !report.checks.eq24_ok {
        violated.push("intermediate sandwich on the split integrals");
    }
    if !report.checks.delta_identity_ok {
        violated.push("closed-form delta vs upper - lower");
    }
    violated
}

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize any report-like value to JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    String::from_utf8(buf).expect("serialized JSON is UTF-8")
}

/// 17 significant digits, round-trip safe.
pub fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

/// 6 significant digits for tables.
pub fn fmt_table(v: f64) -> String {
    format!("{v:.5e}")
}

pub const CSV_HEADER: &str =
    "name,expr,a,b,x,degenerate,M,m,lower,middle,upper,delta,classical_bound,in_class_F,sandwich_ok";

/// One CSV row in the schema's column order.
pub fn csv_row(name: &str, report: &Report) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        name,
        report.function,
        fmt_full(report.interval.a),
        fmt_full(report.interval.b),
        fmt_full(report.mvt.x),
        report.mvt.degenerate,
        fmt_full(report.geometry.max_dist),
        fmt_full(report.geometry.min_dist),
        fmt_full(report.envelope.lower),
        fmt_full(report.envelope.middle),
        fmt_full(report.envelope.upper),
        fmt_full(report.envelope.delta),
        fmt_full(report.classical_trap_bound),
        report.simpson.in_class_f,
        report.checks.sandwich_ok,
    )
}

/// Human-readable table for one report.
pub fn render_table(report: &Report, info: &RunInfo) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        out.push_str(&format!("{k:<22}{v}\n"));
    };
    line("function", report.function.clone());
    line(
        "interval",
        format!(
            "[{}, {}]",
            fmt_table(report.interval.a),
            fmt_table(report.interval.b)
        ),
    );
    line(
        "x",
        format!(
            "{} ({}{})",
            fmt_table(report.mvt.x),
            if info.x_was_solved {
                "solved"
            } else {
                "supplied"
            },
            if report.mvt.degenerate {
                ", degenerate"
            } else {
                ""
            },
        ),
    );
    line("residual", fmt_table(report.mvt.residual));
    if report.mvt.roots.len() > 1 {
        line(
            "roots",
            report
                .mvt
                .roots
                .iter()
                .map(|r| fmt_table(*r))
                .collect::<Vec<_>>()
                .join(", "),
        );
    }
    line(
        "M, m",
        format!(
            "{}, {}",
            fmt_table(report.geometry.max_dist),
            fmt_table(report.geometry.min_dist)
        ),
    );
    line("integral", fmt_table(report.alt_form.integral));
    line("lower", fmt_table(report.envelope.lower));
    line("middle (trap - avg)", fmt_table(report.envelope.middle));
    line("upper", fmt_table(report.envelope.upper));
    line("delta", fmt_table(report.envelope.delta));
    line(
        "alt-form sandwich",
        format!(
            "{} <= integral <= {}",
            fmt_table(report.alt_form.lower_int),
            fmt_table(report.alt_form.upper_int)
        ),
    );
    line("psi", fmt_table(report.psi));
    line(
        "classical trap bound",
        fmt_table(report.classical_trap_bound),
    );
    line(
        "simpson",
        format!(
            "in_class_F={}, value={}, discrepancy={}",
            report.simpson.in_class_f,
            fmt_table(report.simpson.value),
            fmt_table(report.simpson.discrepancy)
        ),
    );
    let verdict = |ok: bool| if ok { "ok" } else { "VIOLATED" };
    line(
        "checks",
        format!(
            "sandwich={}{}, intermediate={}, delta-identity={}",
            verdict(report.checks.sandwich_ok),
            if info.sandwich_applicable {
                ""
            } else {
                " (not enforced)"
            },
            verdict(report.checks.eq24_ok),
            verdict(report.checks.delta_identity_ok),
        ),
    );
    line(
        "oracle",
        format!(
            "quadrature tol 1e-10, solver tol {:e}, grid {}",
            info.solver_tol, info.grid_n
        ),
    );
    line(
        "elapsed",
        format!("{:.1} ms", info.elapsed.as_secs_f64() * 1e3),
    );
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus line {line}: expected `name | expression | a | b`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("corpus line {line}: bad number `{text}`")]
    BadNumber { line: usize, text: String },
    #[error("corpus line {line}: interval must satisfy a < b")]
    BadInterval { line: usize },
    #[error("corpus contains no entries")]
    Empty,
    #[error("unknown builtin corpus `{name}` (available: paper)")]
    UnknownBuiltin { name: String },
}

/// One corpus line: a named function over an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub expr_text: String,
    pub a: f64,
    pub b: f64,
}

/// Parse the `name | expression | a | b` corpus format. `#` starts a
/// comment; blank lines are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parts: Vec<&str> = content.split('|').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(CorpusError::Malformed {
                line,
                text: content.to_string(),
            });
        }
        let a: f64 = parts[2].parse().map_err(|_| CorpusError::BadNumber {
            line,
            text: parts[2].to_string(),
        })?;
        let b: f64 = parts[3].parse().map_err(|_| CorpusError::BadNumber {
            line,
            text: parts[3].to_string(),
        })?;
        if Interval::new(a, b).is_err() {
            return Err(CorpusError::BadInterval { line });
        }
        entries.push(CorpusEntry {
            name: parts[0].to_string(),
            expr_text: parts[1].to_string(),
            a,
            b,
        });
    }
    if entries.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(entries)
}

/// The builtin `paper` corpus: the worked applications plus the exponential.
pub fn builtin_corpus(name: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    if name != "paper" {
        return Err(CorpusError::UnknownBuiltin {
            name: name.to_string(),
        });
    }
    let e = std::f64::consts::E;
    let entry = |name: &str, expr: &str, a: f64, b: f64| CorpusEntry {
        name: name.to_string(),
        expr_text: expr.to_string(),
        a,
        b,
    };
    Ok(vec![
        entry("recip_sq", "1/s^2", 1.0, 2.0),
        entry("recip", "1/s", 1.0, 2.0),
        entry("log", "ln(s)", 1.0, e),
        entry("pow2", "s^2", 1.0, 2.0),
        entry("pow3", "s^3", 1.0, 2.0),
        entry("pow_half", "s^0.5", 1.0, 2.0),
        entry("exp", "exp(s)", 1.0, 2.0),
    ])
}

#[derive(Debug, thiserror::Error)]
#[error("sweep entry `{name}` failed: {source}")]
pub struct SweepError {
    pub name: String,
    #[source]
    pub source: Error,
}

/// Run the full pipeline over every corpus entry and emit CSV, one row per
/// entry in input order. Rows may be computed on `jobs` threads; the output
/// is byte-identical regardless of `jobs`.
pub fn sweep_csv(
    entries: &[CorpusEntry],
    opts: &SolveOptions,
    jobs: usize,
) -> Result<String, SweepError> {
    let jobs = jobs.max(1).min(entries.len().max(1));
    let results: Vec<Option<Result<String, Error>>> = {
        let slots: Mutex<Vec<Option<Result<String, Error>>>> =
            Mutex::new((0..entries.len()).map(|_| None).collect());
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= entries.len() {
                        break;
                    }
                    let entry = &entries[i];
                    let row = Interval::new(entry.a, entry.b)
                        .map_err(Error::from)
                        .and_then(|iv| build_report(&entry.expr_text, iv, XChoice::Auto, opts))
                        .map(|(report, _)| csv_row(&entry.name, &report));
                    slots.lock().expect("sweep mutex")[i] = Some(row);
                });
            }
        });
        slots.into_inner().expect("sweep mutex")
    };

    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (i, slot) in results.into_iter().enumerate() {
        let row = slot.expect("every sweep slot is filled");
        match row {
            Ok(row) => {
                out.push_str(&row);
                out.push('\n');
            }
            Err(source) => {
                return Err(SweepError {
                    name: entries[i].name.clone(),
                    source,
                })
            }
        }
    }
    Ok(out)
}
