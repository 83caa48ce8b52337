//! Symbolic differentiation with respect to `s`.

use thiserror::Error;

use super::{BinaryOp, Expr, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot differentiate `{node}`: absolute value has no derivative at its kink")]
pub struct DiffError {
    pub node: String,
}

// Constructors that drop the trivial factors produced by the chain rule
// (u' = 1 or 0) so repeated differentiation stays compact. Anything beyond
// that is left to `Expr::simplify`, which only folds constants.

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Constant(c) if *c == v)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    Expr::binary(BinaryOp::Add, a, b)
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_const(&b, 0.0) {
        return a;
    }
    if is_const(&a, 0.0) {
        return neg(b);
    }
    Expr::binary(BinaryOp::Sub, a, b)
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return Expr::Constant(0.0);
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::binary(BinaryOp::Mul, a, b)
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        return Expr::Constant(0.0);
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::binary(BinaryOp::Div, a, b)
}

fn neg(a: Expr) -> Expr {
    if let Expr::Constant(c) = a {
        return Expr::Constant(-c);
    }
    Expr::unary(UnaryOp::Neg, a)
}

fn pow(base: Expr, exponent: f64) -> Expr {
    if exponent == 0.0 {
        return Expr::Constant(1.0);
    }
    if exponent == 1.0 {
        return base;
    }
    Expr::binary(BinaryOp::Pow, base, Expr::Constant(exponent))
}

pub fn differentiate(e: &Expr) -> Result<Expr, DiffError> {
    Ok(match e {
        Expr::Constant(_) => Expr::Constant(0.0),
        Expr::Variable => Expr::Constant(1.0),
        Expr::Unary(op, child) => {
            let u = child.as_ref();
            let du = differentiate(u)?;
            match op {
                UnaryOp::Neg => neg(du),
                UnaryOp::Ln => div(du, u.clone()),
                UnaryOp::Exp => mul(du, Expr::unary(UnaryOp::Exp, u.clone())),
                UnaryOp::Sin => mul(du, Expr::unary(UnaryOp::Cos, u.clone())),
                UnaryOp::Cos => neg(mul(du, Expr::unary(UnaryOp::Sin, u.clone()))),
                UnaryOp::Sqrt => div(
                    du,
                    mul(Expr::Constant(2.0), Expr::unary(UnaryOp::Sqrt, u.clone())),
                ),
                UnaryOp::Abs => {
                    return Err(DiffError {
                        node: e.to_string(),
                    })
                }
            }
        }
        Expr::Binary(op, left, right) => {
            let (u, v) = (left.as_ref(), right.as_ref());
            match op {
                BinaryOp::Add => add(differentiate(u)?, differentiate(v)?),
                BinaryOp::Sub => sub(differentiate(u)?, differentiate(v)?),
                BinaryOp::Mul => add(
                    mul(differentiate(u)?, v.clone()),
                    mul(u.clone(), differentiate(v)?),
                ),
                BinaryOp::Div => div(
                    sub(
                        mul(differentiate(u)?, v.clone()),
                        mul(u.clone(), differentiate(v)?),
                    ),
                    mul(v.clone(), v.clone()),
                ),
                BinaryOp::Pow => match (u, v) {
                    // u^c: power rule.
                    (_, Expr::Constant(c)) => mul(
                        mul(Expr::Constant(*c), pow(u.clone(), c - 1.0)),
                        differentiate(u)?,
                    ),
                    // c^v: c^v * ln(c) * v'.
                    (Expr::Constant(_), _) => mul(
                        mul(e.clone(), Expr::unary(UnaryOp::Ln, u.clone())),
                        differentiate(v)?,
                    ),
                    // u^v: u^v * (v' ln u + v u'/u).
                    _ => mul(
                        e.clone(),
                        add(
                            mul(differentiate(v)?, Expr::unary(UnaryOp::Ln, u.clone())),
                            mul(v.clone(), div(differentiate(u)?, u.clone())),
                        ),
                    ),
                },
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::Expr;

    fn d(text: &str) -> Expr {
        Expr::parse(text).unwrap().differentiate().unwrap()
    }

    fn d_n(text: &str, n: u32) -> Expr {
        Expr::parse(text).unwrap().differentiate_n(n).unwrap()
    }

    #[test]
    fn golden_derivatives() {
        assert_eq!(d("s^3").eval(2.0).unwrap(), 12.0);
        assert!((d_n("1/s", 2).eval(2.0).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(d("ln(s)"), Expr::parse("1/s").unwrap());
    }

    #[test]
    fn abs_is_rejected() {
        let err = Expr::parse("abs(s)+1")
            .unwrap()
            .differentiate()
            .unwrap_err();
        assert!(err.node.contains("abs(s)"));
    }

    #[test]
    fn chain_and_product_rules() {
        // d/ds exp(s^2) = 2s exp(s^2)
        let v = d("exp(s^2)").eval(1.5).unwrap();
        assert!((v - 3.0 * (2.25f64).exp()).abs() < 1e-12);
        // d/ds s*sin(s) = sin(s) + s cos(s)
        let v = d("s*sin(s)").eval(0.7).unwrap();
        assert!((v - (0.7f64.sin() + 0.7 * 0.7f64.cos())).abs() < 1e-15);
        // d/ds sqrt(s) = 1/(2 sqrt(s))
        let v = d("sqrt(s)").eval(4.0).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        // Real exponent: d/ds s^0.5 matches sqrt derivative.
        let v = d("s^0.5").eval(4.0).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn variable_exponent_rules() {
        // d/ds 2^s = 2^s ln 2
        let v = d("2^s").eval(3.0).unwrap();
        assert!((v - 8.0 * 2.0f64.ln()).abs() < 1e-12);
        // d/ds s^s = s^s (ln s + 1)
        let v = d("s^s").eval(2.0).unwrap();
        assert!((v - 4.0 * (2.0f64.ln() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn fourth_derivatives_stay_evaluable() {
        // d^4/ds^4 of 1/s is 24/s^5.
        let v = d_n("1/s", 4).eval(2.0).unwrap();
        assert!((v - 24.0 / 32.0).abs() < 1e-12);
        // d^4/ds^4 of sin(s) is sin(s).
        let v = d_n("sin(s)", 4).eval(1.1).unwrap();
        assert!((v - 1.1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_central_difference() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        // Corpus expressions at 100 random interior points each.
        let corpus = [
            ("1/s^2", 1.0, 2.0),
            ("1/s", 1.0, 2.0),
            ("ln(s)", 1.0, std::f64::consts::E),
            ("s^2", 0.1, 2.0),
            ("s^3", 0.1, 2.0),
            ("s^0.5", 0.5, 2.0),
            ("exp(s)", 0.0, 1.0),
            ("cos(s-1)+2", 0.0, 2.0),
        ];
        let h = 1e-5;
        let mut rng = StdRng::seed_from_u64(31);
        for (text, lo, hi) in corpus {
            let e = Expr::parse(text).unwrap();
            let de = e.differentiate().unwrap();
            for _ in 0..100 {
                let s = rng.gen_range(lo + 2.0 * h..hi - 2.0 * h);
                let exact = de.eval(s).unwrap();
                let fd = (e.eval(s + h).unwrap() - e.eval(s - h).unwrap()) / (2.0 * h);
                let tol = 1e-5 * (1.0 + exact.abs());
                assert!(
                    (exact - fd).abs() <= tol,
                    "{text} at s={s}: symbolic {exact} vs central difference {fd}"
                );
            }
        }
    }
}
