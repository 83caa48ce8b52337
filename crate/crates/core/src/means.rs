//! Bivariate means and the special-means applications of the envelope.
//!
//! The catalogue: arithmetic `A`, geometric `G`, harmonic `H`, power `M_r`,
//! identric `I`, logarithmic `L`, and generalized log-mean `L_p`. `L_p` is
//! nondecreasing in `p` with the limits `L_{-1} = L` and `L_0 = I`, and the
//! classical chain `H <= G <= L <= I <= A` holds for every positive pair.
//!
//! The applications instantiate the trapezoid-error envelope for
//! `f = 1/s^2`, `1/s`, `ln s`, and `s^p`, whose trapezoid errors collapse
//! to closed mean expressions: `G^2/H(a^2,b^2) - 1` (after scaling by
//! `G^2`), `1/H - 1/L`, `ln G - ln I`, and `M_p^p - L_p^p`.

use thiserror::Error;

use crate::bounds::{envelope, Envelope};
use crate::expr::{BinaryOp, Expr, FunctionDef};
use crate::meanvalue::{solve_mvt, MeanValuePoint, SolveOptions};
use crate::quad::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanError {
    #[error("mean arguments must be strictly positive, got ({alpha}, {beta})")]
    NonPositive { alpha: f64, beta: f64 },
    #[error("power mean requires r != 0")]
    PowerZeroOrder,
    #[error("generalized log-mean requires p outside {{-1, 0}}; use L or I for the limits")]
    GenLogBadOrder,
    #[error("the log application needs a >= 1 so that ln stays non-negative, got a = {a}")]
    LogDomain { a: f64 },
    #[error("the power application requires p outside {{-1, 0}}, got p = {p}")]
    PowerAppBadOrder { p: f64 },
    #[error("applications need 0 < a, got a = {a}")]
    NonPositiveInterval { a: f64 },
}

/// Pair of strictly positive arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPair {
    alpha: f64,
    beta: f64,
}

impl MeanPair {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, MeanError> {
        if !alpha.is_finite() || !beta.is_finite() || alpha <= 0.0 || beta <= 0.0 {
            return Err(MeanError::NonPositive { alpha, beta });
        }
        Ok(MeanPair { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// The mean families. `Power(r)` accepts any `r != 0` (the catalogue's
/// `r >= 1` restriction is not enforced; the power application uses real
/// exponents). `GeneralizedLog(p)` needs `p` outside `{-1, 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Harmonic,
    Power(f64),
    Identric,
    Logarithmic,
    GeneralizedLog(f64),
}

impl MeanKind {
    pub fn label(&self) -> String {
        match self {
            MeanKind::Arithmetic => "A".to_string(),
            MeanKind::Geometric => "G".to_string(),
            MeanKind::Harmonic => "H".to_string(),
            MeanKind::Power(r) => format!("M_{r}"),
            MeanKind::Identric => "I".to_string(),
            MeanKind::Logarithmic => "L".to_string(),
            MeanKind::GeneralizedLog(p) => format!("L_{p}"),
        }
    }
}

/// Evaluate a mean. Equal arguments return the common value (the
/// continuity extension) for every family.
pub fn mean(kind: MeanKind, pair: MeanPair) -> Result<f64, MeanError> {
    let (a, b) = (pair.alpha, pair.beta);
    match kind {
        MeanKind::Arithmetic => Ok((a + b) / 2.0),
        MeanKind::Geometric => Ok((a * b).sqrt()),
        MeanKind::Harmonic => Ok(2.0 * a * b / (a + b)),
        MeanKind::Power(r) => {
            if r == 0.0 {
                return Err(MeanError::PowerZeroOrder);
            }
            if a == b {
                return Ok(a);
            }
            Ok(((a.powf(r) + b.powf(r)) / 2.0).powf(1.0 / r))
        }
        MeanKind::Identric => {
            if a == b {
                return Ok(a);
            }
            // exp((b ln b - a ln a)/(b - a) - 1), algebraically
            // (1/e)(b^b/a^a)^(1/(b-a)) but stable for large arguments.
            Ok(((b * b.ln() - a * a.ln()) / (b - a) - 1.0).exp())
        }
        MeanKind::Logarithmic => {
            if a == b {
                return Ok(a);
            }
            Ok((a - b) / (a.ln() - b.ln()))
        }
        MeanKind::GeneralizedLog(p) => {
            if p == -1.0 || p == 0.0 {
                return Err(MeanError::GenLogBadOrder);
            }
            if a == b {
                return Ok(a);
            }
            Ok(generalized_log_mean_pow(p, pair)?.powf(1.0 / p))
        }
    }
}

/// `L_p^p(alpha, beta) = (beta^(p+1) - alpha^(p+1)) / ((p+1)(beta - alpha))`,
/// the form the power application uses directly (it equals the average of
/// `s^p` over the pair).
pub fn generalized_log_mean_pow(p: f64, pair: MeanPair) -> Result<f64, MeanError> {
    if p == -1.0 || p == 0.0 {
        return Err(MeanError::GenLogBadOrder);
    }
    let (a, b) = (pair.alpha, pair.beta);
    if a == b {
        return Ok(a.powf(p));
    }
    Ok((b.powf(p + 1.0) - a.powf(p + 1.0)) / ((p + 1.0) * (b - a)))
}

/// Check `H <= G <= L <= I <= A` with slack `1e-12` scaled to the pair.
pub fn mean_chain_check(pair: MeanPair) -> bool {
    let h = mean(MeanKind::Harmonic, pair).expect("H is total on positive pairs");
    let g = mean(MeanKind::Geometric, pair).expect("G is total on positive pairs");
    let l = mean(MeanKind::Logarithmic, pair).expect("L is total on positive pairs");
    let i = mean(MeanKind::Identric, pair).expect("I is total on positive pairs");
    let a = mean(MeanKind::Arithmetic, pair).expect("A is total on positive pairs");
    let chain = [h, g, l, i, a];
    chain.windows(2).all(|w| {
        let slack = 1e-12 * (1.0 + w[0].abs().max(w[1].abs()));
        w[0] <= w[1] + slack
    })
}

/// Per-axiom verdict with the worst relative violation observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomResult {
    pub ok: bool,
    pub worst: f64,
}

/// Report of the five mean-function axioms checked on sample grids.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub kind_label: String,
    pub homogeneity: AxiomResult,
    pub symmetry: AxiomResult,
    pub reflexivity: AxiomResult,
    pub monotonicity: AxiomResult,
    pub internality: AxiomResult,
}

impl AxiomReport {
    pub fn all_ok(&self) -> bool {
        self.homogeneity.ok
            && self.symmetry.ok
            && self.reflexivity.ok
            && self.monotonicity.ok
            && self.internality.ok
    }
}

const AXIOM_TOL: f64 = 1e-10;

/// Verify homogeneity, symmetry, reflexivity, componentwise monotonicity,
/// and internality for `kind` over all pairs drawn from `samples`
/// (strictly positive values).
pub fn mean_axioms_check(kind: MeanKind, samples: &[f64]) -> Result<AxiomReport, MeanError> {
    for &s in samples {
        if !s.is_finite() || s <= 0.0 {
            return Err(MeanError::NonPositive { alpha: s, beta: s });
        }
    }
    let m = |x: f64, y: f64| mean(kind, MeanPair::new(x, y).expect("positive samples"));

    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut homogeneity = AxiomResult {
        ok: true,
        worst: 0.0,
    };
    let mut symmetry = AxiomResult {
        ok: true,
        worst: 0.0,
    };
    let mut reflexivity = AxiomResult {
        ok: true,
        worst: 0.0,
    };
    let mut monotonicity = AxiomResult {
        ok: true,
        worst: 0.0,
    };
    let mut internality = AxiomResult {
        ok: true,
        worst: 0.0,
    };

    let record = |result: &mut AxiomResult, violation: f64| {
        if violation > result.worst {
            result.worst = violation;
        }
        if violation > AXIOM_TOL {
            result.ok = false;
        }
    };

    for &x in &sorted {
        let refl = m(x, x)?;
        record(&mut reflexivity, (refl - x).abs() / x);
        for &y in &sorted {
            let v = m(x, y)?;
            record(&mut symmetry, (v - m(y, x)?).abs() / (1.0 + v.abs()));
            let (lo, hi) = (x.min(y), x.max(y));
            let internal_violation = (lo - v).max(v - hi).max(0.0) / (1.0 + hi);
            record(&mut internality, internal_violation);
            for scale in [0.5, 2.0, 10.0] {
                let scaled = m(scale * x, scale * y)?;
                record(
                    &mut homogeneity,
                    (scaled - scale * v).abs() / (1.0 + (scale * v).abs()),
                );
            }
        }
    }

    // Componentwise monotonicity over the sorted grid.
    for i in 0..sorted.len() {
        for j in 0..sorted.len() {
            for k in i..sorted.len() {
                for l in j..sorted.len() {
                    let small = m(sorted[i], sorted[j])?;
                    let large = m(sorted[k], sorted[l])?;
                    record(
                        &mut monotonicity,
                        (small - large).max(0.0) / (1.0 + large.abs()),
                    );
                }
            }
        }
    }

    Ok(AxiomReport {
        kind_label: kind.label(),
        homogeneity,
        symmetry,
        reflexivity,
        monotonicity,
        internality,
    })
}

/// The four worked applications of the envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Application {
    /// `f = 1/s^2`: mean-value point `sqrt(ab)`, middle `G^2/H(a^2,b^2) - 1`
    /// after scaling by `G^2`.
    RecipSq,
    /// `f = 1/s`: middle `1/H - 1/L`.
    Recip,
    /// `f = ln s` (requires `a >= 1`): middle `ln G - ln I`.
    Log,
    /// `f = s^p`, `p` outside `{-1, 0}`: middle `M_p^p - L_p^p`.
    Power(f64),
}

impl Application {
    pub fn name(&self) -> String {
        match self {
            Application::RecipSq => "recip_sq".to_string(),
            Application::Recip => "recip".to_string(),
            Application::Log => "log".to_string(),
            Application::Power(p) => format!("power({p})"),
        }
    }
}

/// Application report: the mean-form sides of the envelope at the solved
/// mean-value point, cross-checked against the quadrature envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct ApplicationReport {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub mvt: MeanValuePoint,
    /// Closed-form mean-value point, when the application has one
    /// (`sqrt(ab)` for `1/s^2`), and the solver's distance from it.
    pub closed_form_x: Option<f64>,
    pub x_abs_diff: Option<f64>,
    /// Scaling applied to the quadrature envelope before comparison
    /// (`G^2` for `1/s^2`, otherwise 1).
    pub scale: f64,
    pub mean_lower: f64,
    pub mean_middle: f64,
    pub mean_upper: f64,
    /// `|mean_middle - scale * quadrature middle|`.
    pub middle_abs_diff: f64,
    pub middle_ok: bool,
    pub sandwich_ok: bool,
    /// The raw quadrature envelope at the solved point.
    pub envelope: Envelope,
}

/// Instantiate the envelope for one of the worked applications: solve for
/// the mean-value point, evaluate the displayed mean-form sides, and check
/// (i) the mean-form middle equals the quadrature middle to `1e-8` and (ii)
/// the sandwich ordering.
pub fn application_check(
    which: Application,
    iv: Interval,
) -> Result<ApplicationReport, crate::Error> {
    let (a, b) = (iv.a(), iv.b());
    if a <= 0.0 {
        return Err(MeanError::NonPositiveInterval { a }.into());
    }
    let pair = MeanPair::new(a, b)?;

    let func = match which {
        Application::RecipSq => FunctionDef::parse("1/s^2").expect("fixed expression"),
        Application::Recip => FunctionDef::parse("1/s").expect("fixed expression"),
        Application::Log => {
            if a < 1.0 {
                return Err(MeanError::LogDomain { a }.into());
            }
            FunctionDef::parse("ln(s)").expect("fixed expression")
        }
        Application::Power(p) => {
            if p == -1.0 || p == 0.0 {
                return Err(MeanError::PowerAppBadOrder { p }.into());
            }
            FunctionDef::new(Expr::binary(
                BinaryOp::Pow,
                Expr::Variable,
                Expr::Constant(p),
            ))
        }
    };
    let func = func.with_domain_hint(iv);

    let mvt = solve_mvt(&func, iv, &SolveOptions::default())?;
    let x = mvt.x;
    let env = envelope(&func, iv, x)?;

    // Mean-form average of f over the interval and the value at x.
    let (avg_mf, fx, scale, mean_middle, closed_form_x) = match which {
        Application::RecipSq => {
            let g = mean(MeanKind::Geometric, pair)?;
            let h_sq = mean(MeanKind::Harmonic, MeanPair::new(a * a, b * b)?)?;
            (
                1.0 / (g * g),
                1.0 / (x * x),
                g * g,
                g * g / h_sq - 1.0,
                Some(g),
            )
        }
        Application::Recip => {
            let h = mean(MeanKind::Harmonic, pair)?;
            let l = mean(MeanKind::Logarithmic, pair)?;
            (1.0 / l, 1.0 / x, 1.0, 1.0 / h - 1.0 / l, None)
        }
        Application::Log => {
            let g = mean(MeanKind::Geometric, pair)?;
            let i = mean(MeanKind::Identric, pair)?;
            (i.ln(), x.ln(), 1.0, g.ln() - i.ln(), None)
        }
        Application::Power(p) => {
            let lp_pow = generalized_log_mean_pow(p, pair)?;
            let mp_pow = (a.powf(p) + b.powf(p)) / 2.0;
            (lp_pow, x.powf(p), 1.0, mp_pow - lp_pow, None)
        }
    };

    let len = b - a;
    let prod = (x - a) * (b - x);
    let side = |d: f64| scale * (len * len / (2.0 * d * d)) * (avg_mf - d * d * fx / prod);
    let mean_lower = side(env.geometry.max_dist);
    let mean_upper = side(env.geometry.min_dist);

    let middle_abs_diff = (mean_middle - scale * env.middle).abs();
    let slack = 1e-9 * (1.0 + mean_middle.abs());
    Ok(ApplicationReport {
        name: which.name(),
        a,
        b,
        x_abs_diff: closed_form_x.map(|cx| (x - cx).abs()),
        closed_form_x,
        scale,
        mean_lower,
        mean_middle,
        mean_upper,
        middle_abs_diff,
        middle_ok: middle_abs_diff <= 1e-8,
        sandwich_ok: mean_lower <= mean_middle + slack && mean_middle <= mean_upper + slack,
        envelope: env,
        mvt,
    })
}
