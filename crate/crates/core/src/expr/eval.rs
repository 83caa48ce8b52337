//! Floating-point evaluation with domain checking.

use thiserror::Error;

use super::{BinaryOp, Expr, UnaryOp};

/// Domain violation raised during evaluation, carrying the printed
/// subexpression that produced it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("ln of non-positive value {value} in `{expr}`")]
    LnNonPositive { value: f64, expr: String },
    #[error("square root of negative value {value} in `{expr}`")]
    SqrtNegative { value: f64, expr: String },
    #[error("division by zero in `{expr}`")]
    DivisionByZero { expr: String },
    #[error("zero raised to negative exponent {exponent} in `{expr}`")]
    ZeroToNegative { exponent: f64, expr: String },
    #[error("negative base {base} with non-integer exponent {exponent} in `{expr}`")]
    NegativeBase {
        base: f64,
        exponent: f64,
        expr: String,
    },
}

pub fn eval(e: &Expr, s: f64) -> Result<f64, EvalError> {
    match e {
        Expr::Constant(c) => Ok(*c),
        Expr::Variable => Ok(s),
        Expr::Unary(op, child) => {
            let v = eval(child, s)?;
            match op {
                UnaryOp::Neg => Ok(-v),
                UnaryOp::Ln => {
                    if v <= 0.0 {
                        Err(EvalError::LnNonPositive {
                            value: v,
                            expr: e.to_string(),
                        })
                    } else {
                        Ok(v.ln())
                    }
                }
                UnaryOp::Exp => Ok(v.exp()),
                UnaryOp::Sin => Ok(v.sin()),
                UnaryOp::Cos => Ok(v.cos()),
                UnaryOp::Sqrt => {
                    if v < 0.0 {
                        Err(EvalError::SqrtNegative {
                            value: v,
                            expr: e.to_string(),
                        })
                    } else {
                        Ok(v.sqrt())
                    }
                }
                UnaryOp::Abs => Ok(v.abs()),
            }
        }
        Expr::Binary(op, left, right) => {
            let l = eval(left, s)?;
            let r = eval(right, s)?;
            match op {
                BinaryOp::Add => Ok(l + r),
                BinaryOp::Sub => Ok(l - r),
                BinaryOp::Mul => Ok(l * r),
                BinaryOp::Div => {
                    if r == 0.0 {
                        Err(EvalError::DivisionByZero {
                            expr: e.to_string(),
                        })
                    } else {
                        Ok(l / r)
                    }
                }
                BinaryOp::Pow => pow(l, r, e),
            }
        }
    }
}

/// `l^r` with the domain rules: a zero base needs a non-negative exponent,
/// a negative base needs an integer-valued exponent.
fn pow(l: f64, r: f64, e: &Expr) -> Result<f64, EvalError> {
    if l == 0.0 && r < 0.0 {
        return Err(EvalError::ZeroToNegative {
            exponent: r,
            expr: e.to_string(),
        });
    }
    if l < 0.0 && (r.fract() != 0.0 || !r.is_finite()) {
        return Err(EvalError::NegativeBase {
            base: l,
            exponent: r,
            expr: e.to_string(),
        });
    }
    Ok(l.powf(r))
}

#[cfg(test)]
mod tests {
    use super::super::Expr;
    use super::*;

    fn eval_str(text: &str, s: f64) -> Result<f64, EvalError> {
        Expr::parse(text).unwrap().eval(s)
    }

    #[test]
    fn basic_values() {
        assert_eq!(eval_str("1/s^2", 2.0).unwrap(), 0.25);
        assert_eq!(eval_str("ln(s)", 1.0).unwrap(), 0.0);
        assert_eq!(eval_str("2+3*4", 0.0).unwrap(), 14.0);
        assert_eq!(eval_str("2^3^2", 0.0).unwrap(), 512.0);
        assert_eq!(eval_str("-s^2", 3.0).unwrap(), -9.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            eval_str("1/s", 0.0),
            Err(EvalError::DivisionByZero { .. })
        ));
        assert!(matches!(
            eval_str("ln(s-1)", 1.0),
            Err(EvalError::LnNonPositive { .. })
        ));
        assert!(matches!(
            eval_str("sqrt(s)", -4.0),
            Err(EvalError::SqrtNegative { .. })
        ));
        assert!(matches!(
            eval_str("s^-1", 0.0),
            Err(EvalError::ZeroToNegative { .. })
        ));
        assert!(matches!(
            eval_str("s^0.5", -1.0),
            Err(EvalError::NegativeBase { .. })
        ));
    }

    #[test]
    fn error_names_offending_subexpression() {
        let err = eval_str("2+1/(s-1)", 1.0).unwrap_err();
        assert_eq!(err.to_string(), "division by zero in `1/(s-1)`");
    }

    #[test]
    fn negative_base_integer_exponent_is_fine() {
        assert_eq!(eval_str("s^3", -2.0).unwrap(), -8.0);
        assert_eq!(eval_str("s^2", -2.0).unwrap(), 4.0);
        assert_eq!(eval_str("s^0", 0.0).unwrap(), 1.0);
    }
}
