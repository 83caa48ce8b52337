//! Reference numerical integration and the classical composite rules.
//!
//! `integrate` is the oracle used everywhere an exact integral is needed:
//! adaptive Simpson subdivision with Richardson extrapolation, accepting a
//! panel once its error estimate fits within the tolerance budget
//! proportional to the panel length.

use thiserror::Error;

use crate::expr::{DiffError, EvalError, FunctionDef};

/// Absolute tolerance used by the rest of the crate when it needs an
/// integral "exactly".
pub const DEFAULT_TOL: f64 = 1e-10;

/// Subdivision depth cap; exceeding it yields [`QuadError::NonConvergent`].
const MAX_DEPTH: u32 = 50;

/// Grid size for sup-norm estimation of derivatives. Fixed so results are
/// reproducible across runs.
const SUP_GRID_POINTS: usize = 4097;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid interval [{a}, {b}]: endpoints must be finite with a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid tolerance {tol}: must be positive and finite")]
    InvalidTolerance { tol: f64 },
    #[error("invalid panel count {n}: {reason}")]
    InvalidPanelCount { n: u32, reason: &'static str },
    #[error("invalid derivative order {order}: must be at least 1")]
    InvalidOrder { order: u32 },
    #[error(
        "quadrature did not converge within depth {MAX_DEPTH}: best estimate {best:e} \
         (error estimate {err_estimate:e})"
    )]
    NonConvergent { best: f64, err_estimate: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Diff(#[from] DiffError),
}

/// Integration domain `[a, b]` with `a < b`, both finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, QuadError> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(QuadError::InvalidInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains_interior(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }
}

/// Result of adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    /// Estimated integral value.
    pub value: f64,
    /// Accumulated Richardson error estimate; at most the requested
    /// tolerance on success.
    pub err_estimate: f64,
    /// Number of integrand evaluations.
    pub evals: u64,
}

struct Adaptive<'a> {
    f: &'a FunctionDef,
    tol_per_len: f64,
    evals: u64,
    err_sum: f64,
    depth_exceeded: bool,
}

impl<'a> Adaptive<'a> {
    fn eval(&mut self, s: f64) -> Result<f64, QuadError> {
        self.evals += 1;
        Ok(self.f.eval(s)?)
    }

    #[allow(clippy::too_many_arguments)]
    fn panel(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        depth: u32,
    ) -> Result<f64, QuadError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let refined = left + right;
        let err = (refined - whole) / 15.0;
        if err.abs() <= self.tol_per_len * h {
            self.err_sum += err.abs();
            return Ok(refined + err);
        }
        if depth >= MAX_DEPTH {
            self.depth_exceeded = true;
            self.err_sum += err.abs();
            return Ok(refined + err);
        }
        let l = self.panel(a, m, fa, flm, fm, left, depth + 1)?;
        let r = self.panel(m, b, fm, frm, fb, right, depth + 1)?;
        Ok(l + r)
    }
}

/// Adaptive Simpson integration of `f` over `iv` to absolute tolerance
/// `tol`. Domain errors from `f` propagate; if any panel is still failing
/// its budget at the depth cap the whole run errors out, carrying the best
/// estimate assembled so far.
pub fn integrate(f: &FunctionDef, iv: Interval, tol: f64) -> Result<QuadResult, QuadError> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(QuadError::InvalidTolerance { tol });
    }
    let (a, b) = (iv.a(), iv.b());
    let mut state = Adaptive {
        f,
        tol_per_len: tol / iv.length(),
        evals: 0,
        err_sum: 0.0,
        depth_exceeded: false,
    };
    let m = iv.midpoint();
    let fa = state.eval(a)?;
    let fm = state.eval(m)?;
    let fb = state.eval(b)?;
    let whole = iv.length() / 6.0 * (fa + 4.0 * fm + fb);
    let value = state.panel(a, b, fa, fm, fb, whole, 0)?;
    if state.depth_exceeded {
        return Err(QuadError::NonConvergent {
            best: value,
            err_estimate: state.err_sum,
        });
    }
    Ok(QuadResult {
        value,
        err_estimate: state.err_sum,
        evals: state.evals,
    })
}

/// Composite trapezoid rule with `n >= 1` panels. `n = 1` is the plain
/// two-point rule `(b-a) (f(a)+f(b)) / 2`.
pub fn composite_trapezoid(f: &FunctionDef, iv: Interval, n: u32) -> Result<f64, QuadError> {
    if n < 1 {
        return Err(QuadError::InvalidPanelCount {
            n,
            reason: "must be at least 1",
        });
    }
    let h = iv.length() / n as f64;
    let mut sum = 0.5 * (f.eval(iv.a())? + f.eval(iv.b())?);
    for i in 1..n {
        sum += f.eval(iv.a() + i as f64 * h)?;
    }
    Ok(sum * h)
}

/// Composite Simpson rule with an even number of panels. `n = 2` is the
/// three-point rule `(b-a)/6 [f(a) + 4 f(mid) + f(b)]`.
pub fn composite_simpson(f: &FunctionDef, iv: Interval, n: u32) -> Result<f64, QuadError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(QuadError::InvalidPanelCount {
            n,
            reason: "must be even and at least 2",
        });
    }
    let h = iv.length() / n as f64;
    let mut sum = f.eval(iv.a())? + f.eval(iv.b())?;
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f.eval(iv.a() + i as f64 * h)?;
    }
    Ok(sum * h / 3.0)
}

/// Estimate `sup |f^(order)|` on `iv`: differentiate symbolically, scan a
/// fixed 4097-point uniform grid, then refine around the grid argmax with a
/// golden-section search. The result is never below the grid maximum, but
/// remains a sampled estimate and can undercount spiky derivatives.
pub fn sup_abs_derivative(f: &FunctionDef, order: u32, iv: Interval) -> Result<f64, QuadError> {
    if order == 0 {
        return Err(QuadError::InvalidOrder { order });
    }
    let deriv = FunctionDef::new(f.expr.differentiate_n(order)?);
    let n = SUP_GRID_POINTS;
    let h = iv.length() / (n - 1) as f64;
    let mut grid_max = f64::NEG_INFINITY;
    let mut argmax = 0;
    for i in 0..n {
        let s = if i == n - 1 {
            iv.b()
        } else {
            iv.a() + i as f64 * h
        };
        let v = deriv.eval(s)?.abs();
        if v > grid_max {
            grid_max = v;
            argmax = i;
        }
    }
    let lo = iv.a() + argmax.saturating_sub(1) as f64 * h;
    let hi = iv.a() + ((argmax + 1).min(n - 1)) as f64 * h;
    let refined = golden_section_max(&deriv, lo, hi.min(iv.b()))?;
    Ok(grid_max.max(refined))
}

/// Golden-section search for the maximum of `|d|` on `[lo, hi]`.
fn golden_section_max(d: &FunctionDef, mut lo: f64, mut hi: f64) -> Result<f64, QuadError> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = f64::NEG_INFINITY;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut v1 = d.eval(x1)?.abs();
    let mut v2 = d.eval(x2)?.abs();
    for _ in 0..100 {
        best = best.max(v1).max(v2);
        if (hi - lo).abs() <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if v1 < v2 {
            lo = x1;
            x1 = x2;
            v1 = v2;
            x2 = lo + INV_PHI * (hi - lo);
            v2 = d.eval(x2)?.abs();
        } else {
            hi = x2;
            x2 = x1;
            v2 = v1;
            x1 = hi - INV_PHI * (hi - lo);
            v1 = d.eval(x1)?.abs();
        }
    }
    Ok(best)
}

/// Minimum of `f` over 1025 points strictly inside `iv`, returned as
/// `(location, value)`. Used to enforce the positivity hypothesis without
/// tripping on functions that vanish exactly at an endpoint.
pub(crate) fn min_interior_sample(f: &FunctionDef, iv: Interval) -> Result<(f64, f64), EvalError> {
    const SAMPLES: usize = 1025;
    let step = iv.length() / (SAMPLES + 1) as f64;
    let mut min_at = iv.midpoint();
    let mut min_val = f64::INFINITY;
    for i in 1..=SAMPLES {
        let s = iv.a() + i as f64 * step;
        let v = f.eval(s)?;
        if v < min_val {
            min_val = v;
            min_at = s;
        }
    }
    Ok((min_at, min_val))
}
