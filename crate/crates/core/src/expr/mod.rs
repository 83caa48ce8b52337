//! Arithmetic expressions in the single variable `s`.
//!
//! The grammar is deliberately small: decimal constants, the variable `s`,
//! the binary operators `+ - * / ^`, unary minus, and the function calls
//! `ln`, `exp`, `sin`, `cos`, `sqrt`, `abs`. Expressions are immutable
//! trees; evaluation and symbolic differentiation never mutate the input,
//! so values can be shared freely across threads.

mod diff;
mod eval;
mod parse;

pub use diff::DiffError;
pub use eval::EvalError;
pub use parse::ParseError;

use std::fmt;
use std::str::FromStr;

use crate::quad::Interval;

/// Unary operators. `Neg` prints as a prefix `-`; the rest print as
/// function calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Ln,
    Exp,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Ln => "ln",
            UnaryOp::Exp => "exp",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
        }
    }
}

/// Binary operators, in increasing precedence: `+ -`, then `* /`, then `^`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Expression tree over the variable `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Constant(c)
    }

    pub fn variable() -> Expr {
        Expr::Variable
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Expr {
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Expr {
        Expr::Binary(op, Box::new(left), Box::new(right))
    }

    /// Parse an expression from text. See the module docs for the grammar.
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse::parse(text)
    }

    /// Evaluate at `s`, reporting domain violations (log of a non-positive
    /// value, square root of a negative, division by zero, bad powers)
    /// together with the offending subexpression.
    pub fn eval(&self, s: f64) -> Result<f64, EvalError> {
        eval::eval(self, s)
    }

    /// Symbolic derivative with respect to `s`. `abs` is rejected.
    pub fn differentiate(&self) -> Result<Expr, DiffError> {
        diff::differentiate(self)
    }

    /// `n`-th symbolic derivative.
    pub fn differentiate_n(&self, n: u32) -> Result<Expr, DiffError> {
        let mut d = self.clone();
        for _ in 0..n {
            d = d.differentiate()?.simplify();
        }
        Ok(d)
    }

    /// Fold constant subtrees: `Constant op Constant` binaries and negation
    /// of constants. No other rewriting happens, so simplified trees stay
    /// structurally predictable.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Constant(_) | Expr::Variable => self.clone(),
            Expr::Unary(op, child) => {
                let child = child.simplify();
                if let (UnaryOp::Neg, Expr::Constant(c)) = (op, &child) {
                    return Expr::Constant(-c);
                }
                Expr::unary(*op, child)
            }
            Expr::Binary(op, left, right) => {
                let left = left.simplify();
                let right = right.simplify();
                if let (Expr::Constant(a), Expr::Constant(b)) = (&left, &right) {
                    let folded = match op {
                        BinaryOp::Add => a + b,
                        BinaryOp::Sub => a - b,
                        BinaryOp::Mul => a * b,
                        BinaryOp::Div => a / b,
                        BinaryOp::Pow => a.powf(*b),
                    };
                    // Keep non-finite results unfolded so they surface as
                    // domain errors at evaluation time instead.
                    if folded.is_finite() {
                        return Expr::Constant(folded);
                    }
                }
                Expr::binary(*op, left, right)
            }
        }
    }

    /// Printing precedence. Atoms bind tightest; function-style unaries are
    /// atoms because they always print with parentheses.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Constant(c) if *c < 0.0 => 3,
            Expr::Constant(_) | Expr::Variable => 5,
            Expr::Unary(UnaryOp::Neg, _) => 3,
            Expr::Unary(_, _) => 5,
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => 2,
            Expr::Binary(BinaryOp::Pow, _, _) => 4,
        }
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, child: &Expr, needs_parens: bool) -> fmt::Result {
    if needs_parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    /// Prints a string that re-parses to a structurally equivalent tree
    /// (negative constants come back as negated positives).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(c) => write!(f, "{c}"),
            Expr::Variable => write!(f, "s"),
            Expr::Unary(UnaryOp::Neg, child) => {
                write!(f, "-")?;
                fmt_child(f, child, child.precedence() < 3)
            }
            Expr::Unary(op, child) => write!(f, "{}({child})", op.name()),
            Expr::Binary(op, left, right) => {
                let prec = self.precedence();
                match op {
                    // ^ is right-associative and binds tighter than unary
                    // minus, so negated or exponentiated bases need parens.
                    BinaryOp::Pow => {
                        fmt_child(f, left, left.precedence() <= prec)?;
                        write!(f, "^")?;
                        fmt_child(f, right, right.precedence() < 3)
                    }
                    _ => {
                        fmt_child(f, left, left.precedence() < prec)?;
                        write!(f, "{}", op.symbol())?;
                        fmt_child(f, right, right.precedence() <= prec)
                    }
                }
            }
        }
    }
}

/// A parsed function of `s` with an optional label and an optional interval
/// on which it is known to be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub expr: Expr,
    pub name: Option<String>,
    pub domain_hint: Option<Interval>,
}

impl FunctionDef {
    pub fn new(expr: Expr) -> Self {
        FunctionDef {
            expr,
            name: None,
            domain_hint: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Ok(FunctionDef::new(Expr::parse(text)?))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_domain_hint(mut self, iv: Interval) -> Self {
        self.domain_hint = Some(iv);
        self
    }

    /// The label if set, otherwise the printed expression.
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.expr.to_string())
    }

    pub fn eval(&self, s: f64) -> Result<f64, EvalError> {
        self.expr.eval(s)
    }
}

impl FromStr for FunctionDef {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FunctionDef::parse(s)
    }
}
