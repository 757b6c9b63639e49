//! Arithmetic expressions over chart coordinates.
//!
//! This is the small language in which metric and cubic-form components are
//! written: constants, coordinates `x1..xn`, the four arithmetic operators,
//! `^`, unary minus, and a fixed set of analytic functions.  Expressions are
//! plain ASTs; the only rewriting ever applied is constant folding (and
//! erasing `+0`, `*1`-style identities), so a differentiated expression stays
//! a faithful record of the chain rule that produced it.  No CAS-style
//! simplification happens anywhere — correctness over cosmetics.
//!
//! Coordinates are zero-based in the API (`Coord(0)` is `x1`); only the
//! textual syntax is one-based.

mod parse;

pub use parse::parse;

use crate::error::Error;
use crate::Result;
use std::fmt;

/// Analytic functions available in expression source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }
}

/// Expression AST.  Build with the smart constructors ([`Expr::add`] and
/// friends) to get constant folding; the raw variants are public so tests
/// and pattern matches stay straightforward.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based coordinate index; rendered as `x{i+1}`.
    Coord(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    /// Coordinate `x{axis+1}`.
    pub fn coord(axis: usize) -> Expr {
        Expr::Coord(axis)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            (Expr::Const(z), e) if z == 0.0 => e,
            (e, Expr::Const(z)) if z == 0.0 => e,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            (e, Expr::Const(z)) if z == 0.0 => e,
            (Expr::Const(z), e) if z == 0.0 => Expr::neg(e),
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            (Expr::Const(z), _) | (_, Expr::Const(z)) if z == 0.0 => Expr::Const(0.0),
            (Expr::Const(o), e) if o == 1.0 => e,
            (e, Expr::Const(o)) if o == 1.0 => e,
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) if y != 0.0 => Expr::Const(x / y),
            (e, Expr::Const(o)) if o == 1.0 => e,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) if x.powf(y).is_finite() => Expr::Const(x.powf(y)),
            (e, Expr::Const(o)) if o == 1.0 => e,
            (_, Expr::Const(z)) if z == 0.0 => Expr::Const(1.0),
            (a, b) => Expr::Pow(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(x) => Expr::Const(-x),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        // Literal arguments fold only where the function is total there;
        // folding must never hide a would-be domain error.
        if let Expr::Const(x) = a {
            let v = match f {
                Func::Sin => Some(x.sin()),
                Func::Cos => Some(x.cos()),
                Func::Tanh => Some(x.tanh()),
                Func::Exp => Some(x.exp()).filter(|v| v.is_finite()),
                Func::Log => (x > 0.0).then(|| x.ln()),
                Func::Sqrt => (x >= 0.0).then(|| x.sqrt()),
            };
            if let Some(v) = v {
                return Expr::Const(v);
            }
            return Expr::Call(f, Box::new(Expr::Const(x)));
        }
        Expr::Call(f, Box::new(a))
    }

    /// Evaluate at a point; the point's length is the chart dimension.
    ///
    /// Division by zero, `log`/`sqrt` off their domain, fractional powers of
    /// negative bases, and overflow to a non-finite value all surface as
    /// [`Error::Domain`].
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Coord(i) => {
                if *i >= point.len() {
                    return Err(Error::CoordOutOfRange {
                        index: *i + 1,
                        dim: point.len(),
                    });
                }
                point[*i]
            }
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Div(a, b) => {
                let den = b.eval(point)?;
                if den == 0.0 {
                    return Err(Error::domain("division by zero"));
                }
                a.eval(point)? / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval(point)?;
                let exp = b.eval(point)?;
                if base < 0.0 && exp.fract() != 0.0 {
                    return Err(Error::domain(format!(
                        "fractional power {exp} of negative base {base}"
                    )));
                }
                if base == 0.0 && exp < 0.0 {
                    return Err(Error::domain("zero raised to a negative power"));
                }
                base.powf(exp)
            }
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Call(f, a) => {
                let x = a.eval(point)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Tanh => x.tanh(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(Error::domain(format!("log of non-positive value {x}")));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(Error::domain(format!("sqrt of negative value {x}")));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!("non-finite result {v}")))
        }
    }

    /// Exact partial derivative with respect to the zero-based `axis`.
    ///
    /// Pure chain rule plus constant folding; the result is an ordinary
    /// expression that can be differentiated again.
    pub fn differentiate(&self, axis: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Coord(i) => Expr::Const(if *i == axis { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => Expr::add(a.differentiate(axis), b.differentiate(axis)),
            Expr::Sub(a, b) => Expr::sub(a.differentiate(axis), b.differentiate(axis)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.differentiate(axis), (**b).clone()),
                Expr::mul((**a).clone(), b.differentiate(axis)),
            ),
            Expr::Div(a, b) => {
                // (a/b)' = a'/b - a b'/b^2, assembled as one quotient so the
                // denominator stays visibly squared.
                let num = Expr::sub(
                    Expr::mul(a.differentiate(axis), (**b).clone()),
                    Expr::mul((**a).clone(), b.differentiate(axis)),
                );
                Expr::div(num, Expr::pow((**b).clone(), Expr::Const(2.0)))
            }
            Expr::Pow(a, b) => {
                let da = a.differentiate(axis);
                if let Expr::Const(c) = **b {
                    // d(a^c) = c a^(c-1) a'
                    return Expr::mul(
                        Expr::mul(
                            Expr::Const(c),
                            Expr::pow((**a).clone(), Expr::Const(c - 1.0)),
                        ),
                        da,
                    );
                }
                // General a^b = exp(b log a):
                // d = a^b (b' log a + b a'/a)
                let db = b.differentiate(axis);
                let inner = Expr::add(
                    Expr::mul(db, Expr::call(Func::Log, (**a).clone())),
                    Expr::div(Expr::mul((**b).clone(), da), (**a).clone()),
                );
                Expr::mul(self.clone(), inner)
            }
            Expr::Neg(a) => Expr::neg(a.differentiate(axis)),
            Expr::Call(f, a) => {
                let da = a.differentiate(axis);
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, (**a).clone()),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, (**a).clone())),
                    Func::Exp => Expr::call(Func::Exp, (**a).clone()),
                    Func::Log => {
                        return Expr::div(da, (**a).clone());
                    }
                    Func::Sqrt => {
                        return Expr::div(
                            da,
                            Expr::mul(Expr::Const(2.0), Expr::call(Func::Sqrt, (**a).clone())),
                        );
                    }
                    Func::Tanh => Expr::sub(
                        Expr::Const(1.0),
                        Expr::pow(Expr::call(Func::Tanh, (**a).clone()), Expr::Const(2.0)),
                    ),
                };
                Expr::mul(outer, da)
            }
        }
    }

    /// Largest coordinate axis referenced, if any (zero-based).
    pub fn max_axis(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Coord(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.max_axis().into_iter().chain(b.max_axis()).max(),
            Expr::Neg(a) | Expr::Call(_, a) => a.max_axis(),
        }
    }

    /// True when this is literally `Const(0.0)`.
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Coord(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            Expr::Const(c) => write_number(f, *c)?,
            Expr::Coord(i) => write!(f, "x{}", i + 1)?,
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " / ")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)?;
            }
            Expr::Pow(a, b) => {
                // `^` is right-associative and binds tighter than unary
                // minus on the left: the base must be an atom.
                a.fmt_prec(f, 5)?;
                write!(f, "^")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_prec(f, 1)?;
                write!(f, ")")?;
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Integral values print without a trailing `.0`; everything else uses the
/// shortest representation that round-trips through `f64` parsing.
fn write_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 {
        // Negative literals only arise from folding; print through Neg
        // syntax so the text stays parseable into the same folded value.
        write!(f, "-")?;
        return write_number(f, -v);
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        write!(f, "{}", v as i64)
    } else {
        write!(f, "{v:?}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
