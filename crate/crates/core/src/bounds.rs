//! The two-sided trapezoid-error envelope and its derived forms.
//!
//! For positive `f` on `[a, b]` and an interior point `x`, with
//! `M = max(x-a, b-x)` and `m = min(x-a, b-x)`, the envelope brackets the
//! trapezoid error `middle = (f(a)+f(b))/2 - avg(f)`:
//!
//! ```text
//! ((b-a)^2 / 2M^2) [avg - M^2 f(x)/((x-a)(b-x))]
//!     <= middle <=
//! ((b-a)^2 / 2m^2) [avg - m^2 f(x)/((x-a)(b-x))]
//! ```
//!
//! The sandwich is guaranteed when `x` solves the mean-value equation; the
//! operations here accept arbitrary interior `x` so property tests can
//! probe where it does and does not hold. In degenerate cases (the
//! mean-value equation holds everywhere) the solver's midpoint makes the
//! envelope collapse to equality, so the sandwich is only *asserted* for
//! non-degenerate solutions.
//!
//! All integrals come from the adaptive oracle at its default tolerance;
//! no partial integrals are shared between terms.

use thiserror::Error;

use crate::expr::{EvalError, FunctionDef};
use crate::meanvalue::{self, MvtError};
use crate::quad::{integrate, sup_abs_derivative, Interval, QuadError, DEFAULT_TOL};

/// Default tolerance for the midpoint mean-value test deciding membership
/// in the Simpson-exact class.
pub const SIMPSON_CLASS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("x = {x} must lie strictly inside ({a}, {b})")]
    OutOfRange { x: f64, a: f64, b: f64 },
    #[error("positivity violated: f({at}) = {value} <= 0 (f must be positive on the interval)")]
    Positivity { at: f64, value: f64 },
    #[error("the max/min and midpoint-distance forms of (M, m) disagree: {detail}")]
    GeometryMismatch { detail: String },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Mvt(#[from] MvtError),
}

/// The split geometry at `x`: distances to the far and near endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub x: f64,
    /// `M = max(x-a, b-x) = (b-a)/2 + |x - (a+b)/2|`.
    pub max_dist: f64,
    /// `m = min(x-a, b-x) = (b-a)/2 - |x - (a+b)/2|`.
    pub min_dist: f64,
}

/// The envelope report at a given `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub lower: f64,
    /// `(f(a)+f(b))/2 - (1/(b-a)) ∫ f`: the trapezoid error being bounded.
    pub middle: f64,
    pub upper: f64,
    pub geometry: Geometry,
    /// `upper - lower`.
    pub delta: f64,
    /// The oracle value of `∫_a^b f`.
    pub integral: f64,
}

/// `Ψ_f(a,b;x) = (b-a)^2 f(x) / (2(x-a)(b-x)) + (f(a)+f(b))/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue {
    pub value: f64,
}

/// Bounds on the integral itself, the rearranged form of the envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltFormBounds {
    pub lower_int: f64,
    pub upper_int: f64,
}

/// Result of the Simpson-exactness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpsonCheck {
    /// True when the midpoint solves the mean-value equation within
    /// tolerance, i.e. the three-point Simpson formula evaluates the
    /// integral exactly.
    pub in_class_f: bool,
    /// `(b-a)/3 [2 f(mid) + (f(a)+f(b))/2]`.
    pub simpson_value: f64,
    /// Oracle integral.
    pub integral: f64,
    /// `|simpson_value - integral|`.
    pub discrepancy: f64,
}

/// Hermite-Hadamard members for convex `f` (convexity is the caller's
/// assertion), with the standard `1/(b-a)` normalization on the integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteHadamard {
    pub midpoint_value: f64,
    pub average: f64,
    pub endpoint_average: f64,
    pub holds: bool,
}

fn require_interior(iv: Interval, x: f64) -> Result<(), BoundsError> {
    if !iv.contains_interior(x) {
        return Err(BoundsError::OutOfRange {
            x,
            a: iv.a(),
            b: iv.b(),
        });
    }
    Ok(())
}

fn ensure_positive(f: &FunctionDef, iv: Interval) -> Result<(), BoundsError> {
    match meanvalue::ensure_positive(f, iv) {
        Ok(()) => Ok(()),
        Err(MvtError::Positivity { at, value }) => Err(BoundsError::Positivity { at, value }),
        Err(e) => Err(e.into()),
    }
}

/// Compute `(M, m)` from both closed forms and cross-check them.
pub fn geometry(iv: Interval, x: f64) -> Result<Geometry, BoundsError> {
    require_interior(iv, x)?;
    let max_min = ((x - iv.a()).max(iv.b() - x), (x - iv.a()).min(iv.b() - x));
    let half = iv.length() / 2.0;
    let offset = (x - iv.midpoint()).abs();
    let via_mid = (half + offset, half - offset);
    let tol = 1e-14 * (1.0 + iv.length());
    if (max_min.0 - via_mid.0).abs() > tol || (max_min.1 - via_mid.1).abs() > tol {
        return Err(BoundsError::GeometryMismatch {
            detail: format!("max/min gives {max_min:?}, midpoint form gives {via_mid:?}"),
        });
    }
    Ok(Geometry {
        x,
        max_dist: max_min.0,
        min_dist: max_min.1,
    })
}

/// The envelope at `x`. Requires `f` positive; `x` need not solve the
/// mean-value equation (the sandwich is only guaranteed when it does).
pub fn envelope(f: &FunctionDef, iv: Interval, x: f64) -> Result<Envelope, BoundsError> {
    require_interior(iv, x)?;
    ensure_positive(f, iv)?;
    let geo = geometry(iv, x)?;
    let len = iv.length();
    let integral = integrate(f, iv, DEFAULT_TOL)?.value;
    let avg = integral / len;
    let fx = f.eval(x)?;
    let ratio = fx / ((x - iv.a()) * (iv.b() - x));
    let side = |d: f64| len * len / (2.0 * d * d) * (avg - d * d * ratio);
    let lower = side(geo.max_dist);
    let upper = side(geo.min_dist);
    let middle = (f.eval(iv.a())? + f.eval(iv.b())?) / 2.0 - avg;
    Ok(Envelope {
        lower,
        middle,
        upper,
        geometry: geo,
        delta: upper - lower,
        integral,
    })
}

/// Closed-form width of the envelope,
/// `Δ = ((M^2 - m^2) / (2 m^2 M^2)) (b-a) ∫ f`,
/// which equals `upper - lower` for any interior `x`.
pub fn gap_delta(f: &FunctionDef, iv: Interval, x: f64) -> Result<f64, BoundsError> {
    let geo = geometry(iv, x)?;
    let integral = integrate(f, iv, DEFAULT_TOL)?.value;
    let m2 = geo.min_dist * geo.min_dist;
    let big_m2 = geo.max_dist * geo.max_dist;
    Ok((big_m2 - m2) / (2.0 * m2 * big_m2) * iv.length() * integral)
}

/// `Ψ_f(a,b;x)`.
pub fn psi(f: &FunctionDef, iv: Interval, x: f64) -> Result<PsiValue, BoundsError> {
    require_interior(iv, x)?;
    let len = iv.length();
    let fx = f.eval(x)?;
    let value = len * len / (2.0 * (x - iv.a()) * (iv.b() - x)) * fx
        + (f.eval(iv.a())? + f.eval(iv.b())?) / 2.0;
    Ok(PsiValue { value })
}

/// Rearranged sandwich on the integral itself:
///
/// ```text
/// 2m^2(b-a)/(2m^2+(b-a)^2) Ψ  <=  ∫ f  <=  2M^2(b-a)/(2M^2+(b-a)^2) Ψ
/// ```
///
/// An algebraic rearrangement of the envelope: both sandwiches hold or
/// fail together at the same `(f, iv, x)`.
pub fn alt_form_bounds(
    f: &FunctionDef,
    iv: Interval,
    x: f64,
) -> Result<AltFormBounds, BoundsError> {
    require_interior(iv, x)?;
    ensure_positive(f, iv)?;
    let geo = geometry(iv, x)?;
    let psi_value = psi(f, iv, x)?.value;
    let len = iv.length();
    let coeff = |d: f64| 2.0 * d * d * len / (2.0 * d * d + len * len);
    Ok(AltFormBounds {
        lower_int: coeff(geo.min_dist) * psi_value,
        upper_int: coeff(geo.max_dist) * psi_value,
    })
}

/// Class membership test: does the midpoint solve the mean-value equation?
/// If it does, the three-point Simpson formula
/// `(b-a)/3 [2 f(mid) + (f(a)+f(b))/2]` reproduces the integral without any
/// fourth-derivative error term.
pub fn simpson_exactness(
    f: &FunctionDef,
    iv: Interval,
    tol: f64,
) -> Result<SimpsonCheck, BoundsError> {
    ensure_positive(f, iv)?;
    let secant = meanvalue::secant_slope(f, iv)?;
    let mid = iv.midpoint();
    let g_mid = meanvalue::average_gap_derivative(f, iv, mid)? - secant;
    let in_class_f = g_mid.abs() <= tol * (1.0 + secant.abs());
    let simpson_value =
        iv.length() / 3.0 * (2.0 * f.eval(mid)? + (f.eval(iv.a())? + f.eval(iv.b())?) / 2.0);
    let integral = integrate(f, iv, DEFAULT_TOL)?.value;
    Ok(SimpsonCheck {
        in_class_f,
        simpson_value,
        integral,
        discrepancy: (simpson_value - integral).abs(),
    })
}

/// Classical trapezoid bound `(b-a)^3/12 ||f''||_inf`.
pub fn classical_trap_bound(f: &FunctionDef, iv: Interval) -> Result<f64, BoundsError> {
    let sup = sup_abs_derivative(f, 2, iv)?;
    Ok(iv.length().powi(3) / 12.0 * sup)
}

/// Normalized Hermite-Hadamard members
/// `f(mid) <= (1/(b-a)) ∫ f <= (f(a)+f(b))/2`.
pub fn hermite_hadamard_check(
    f: &FunctionDef,
    iv: Interval,
) -> Result<HermiteHadamard, BoundsError> {
    let midpoint_value = f.eval(iv.midpoint())?;
    let average = integrate(f, iv, DEFAULT_TOL)?.value / iv.length();
    let endpoint_average = (f.eval(iv.a())? + f.eval(iv.b())?) / 2.0;
    let holds = midpoint_value <= average + 1e-12 && average <= endpoint_average + 1e-12;
    Ok(HermiteHadamard {
        midpoint_value,
        average,
        endpoint_average,
        holds,
    })
}

/// The intermediate sandwich
///
/// ```text
/// (1/M^2) ∫_a^b f <= (1/(b-x)^2) ∫_x^b f + (1/(x-a)^2) ∫_a^x f <= (1/m^2) ∫_a^b f
/// ```
///
/// which holds for *every* interior `x` when `f` is positive, not just the
/// mean-value point.
pub fn intermediate_sandwich_check(
    f: &FunctionDef,
    iv: Interval,
    x: f64,
) -> Result<bool, BoundsError> {
    require_interior(iv, x)?;
    ensure_positive(f, iv)?;
    let geo = geometry(iv, x)?;
    let whole = integrate(f, iv, DEFAULT_TOL)?.value;
    let right = integrate(f, Interval::new(x, iv.b())?, DEFAULT_TOL)?.value;
    let left = integrate(f, Interval::new(iv.a(), x)?, DEFAULT_TOL)?.value;
    let middle = right / ((iv.b() - x) * (iv.b() - x)) + left / ((x - iv.a()) * (x - iv.a()));
    let lower = whole / (geo.max_dist * geo.max_dist);
    let upper = whole / (geo.min_dist * geo.min_dist);
    let slack = 1e-9 * (1.0 + middle.abs());
    Ok(middle >= lower - slack && middle <= upper + slack)
}
