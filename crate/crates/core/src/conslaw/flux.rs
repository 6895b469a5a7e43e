use std::fmt;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arithmetic expression in one variable `v`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, v: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => v,
            Expr::Neg(a) => -a.eval(v),
            Expr::Add(a, b) => a.eval(v) + b.eval(v),
            Expr::Sub(a, b) => a.eval(v) - b.eval(v),
            Expr::Mul(a, b) => a.eval(v) * b.eval(v),
            Expr::Div(a, b) => a.eval(v) / b.eval(v),
            Expr::Pow(a, b) => {
                let (x, p) = (a.eval(v), b.eval(v));
                if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                    x.powi(p as i32)
                } else {
                    x.powf(p)
                }
            }
        }
    }

    fn constant(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Var => None,
            Expr::Neg(a) => a.constant().map(|c| -c),
            Expr::Add(a, b) => Some(a.constant()? + b.constant()?),
            Expr::Sub(a, b) => Some(a.constant()? - b.constant()?),
            Expr::Mul(a, b) => Some(a.constant()? * b.constant()?),
            Expr::Div(a, b) => Some(a.constant()? / b.constant()?),
            Expr::Pow(a, b) => Some(a.constant()?.powf(b.constant()?)),
        }
    }

    /// Symbolic d/dv. Exponents must be constant.
    pub fn derivative(&self) -> Result<Expr> {
        use Expr::*;
        let b = Box::new;
        Ok(match self {
            Const(_) => Const(0.0),
            Var => Const(1.0),
            Neg(a) => Neg(b(a.derivative()?)),
            Add(x, y) => Add(b(x.derivative()?), b(y.derivative()?)),
            Sub(x, y) => Sub(b(x.derivative()?), b(y.derivative()?)),
            Mul(x, y) => Add(b(Mul(b(x.derivative()?), y.clone())), b(Mul(x.clone(), b(y.derivative()?)))),
            Div(x, y) => Div(
                b(Sub(b(Mul(b(x.derivative()?), y.clone())), b(Mul(x.clone(), b(y.derivative()?))))),
                b(Pow(y.clone(), b(Const(2.0)))),
            ),
            Pow(x, p) => {
                let c = p.constant().ok_or_else(|| Error::Unsupported("derivative of a non-constant exponent".into()))?;
                Mul(b(Mul(b(Const(c)), b(Pow(x.clone(), b(Const(c - 1.0)))))), b(x.derivative()?))
            }
        })
    }

    /// Coefficients c₀, c₁, … when the expression is a polynomial in v.
    pub fn polynomial(&self) -> Option<Vec<f64>> {
        fn add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
            (0..a.len().max(b.len()))
                .map(|i| a.get(i).copied().unwrap_or(0.0) + sign * b.get(i).copied().unwrap_or(0.0))
                .collect()
        }
        fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
            let mut out = vec![0.0; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        }
        match self {
            Expr::Const(c) => Some(vec![*c]),
            Expr::Var => Some(vec![0.0, 1.0]),
            Expr::Neg(a) => Some(a.polynomial()?.iter().map(|c| -c).collect()),
            Expr::Add(a, b) => Some(add(&a.polynomial()?, &b.polynomial()?, 1.0)),
            Expr::Sub(a, b) => Some(add(&a.polynomial()?, &b.polynomial()?, -1.0)),
            Expr::Mul(a, b) => Some(mul(&a.polynomial()?, &b.polynomial()?)),
            Expr::Div(a, b) => {
                let d = b.constant().filter(|d| *d != 0.0)?;
                Some(a.polynomial()?.iter().map(|c| c / d).collect())
            }
            Expr::Pow(a, p) => {
                let e = p.constant().filter(|e| e.fract() == 0.0 && (0.0..=32.0).contains(e))? as usize;
                let base = a.polynomial()?;
                Some((0..e).fold(vec![1.0], |acc, _| mul(&acc, &base)))
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "v"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
        }
    }
}

/// Recursive-descent parser. `^` binds tightest and is right-associative; unary minus
/// applies to a whole power, so `-v^2` is `-(v^2)`.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in flux expression", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == b'+' { Expr::Add(Box::new(lhs), Box::new(rhs)) } else { Expr::Sub(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == b'*' { Expr::Mul(Box::new(lhs), Box::new(rhs)) } else { Expr::Div(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'v') => {
                self.pos += 1;
                Ok(Expr::Var)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                    self.pos += 1;
                }
                if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
                    let mark = self.pos;
                    self.pos += 1;
                    if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                        self.pos += 1;
                    }
                    let digits = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if self.pos == digits {
                        self.pos = mark;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                text.parse().map(Expr::Const).map_err(|_| self.err(&format!("bad number '{text}'")))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end")),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Flux a(v) with derivative a′ and primitive F(ξ) = ∫₀^ξ a.
#[derive(Clone)]
pub struct FluxFunction {
    name: String,
    a: ScalarFn,
    da: ScalarFn,
    primitive: ScalarFn,
    /// How F is evaluated: "polynomial" or "quadrature".
    primitive_kind: &'static str,
}

impl fmt::Debug for FluxFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxFunction").field("name", &self.name).field("primitive", &self.primitive_kind).finish()
    }
}

impl Serialize for FluxFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

fn quadrature(f: &ScalarFn, lo: f64, hi: f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(20).expect("non-zero"));
    // Composite rule on unit-length pieces keeps accuracy for wide intervals.
    let pieces = ((hi - lo).abs().ceil() as usize).clamp(1, 1 << 16);
    let h = (hi - lo) / pieces as f64;
    (0..pieces).map(|i| rule.integrate(lo + i as f64 * h, lo + (i + 1) as f64 * h, |x| f(x))).sum()
}

impl FluxFunction {
    /// Builds from callables; F is obtained by quadrature when not supplied.
    pub fn from_fns(
        name: impl Into<String>,
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        da: impl Fn(f64) -> f64 + Send + Sync + 'static,
        primitive: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> Self {
        let a: ScalarFn = Arc::new(a);
        let (primitive, primitive_kind): (ScalarFn, _) = match primitive {
            Some(p) => (Arc::from(p), "supplied"),
            None => {
                let inner = a.clone();
                (Arc::new(move |x| quadrature(&inner, 0.0, x)), "quadrature")
            }
        };
        Self { name: name.into(), a, da: Arc::new(da), primitive, primitive_kind }
    }

    pub fn from_expr(name: impl Into<String>, expr: &Expr) -> Result<Self> {
        let a_expr = expr.clone();
        let d_expr = expr.derivative()?;
        let a: ScalarFn = Arc::new(move |v| a_expr.eval(v));
        let da: ScalarFn = Arc::new(move |v| d_expr.eval(v));
        let (primitive, primitive_kind): (ScalarFn, _) = match expr.polynomial() {
            Some(coeffs) => {
                let integral: Vec<f64> = coeffs.iter().enumerate().map(|(i, c)| c / (i + 1) as f64).collect();
                (Arc::new(move |x| integral.iter().rev().fold(0.0, |acc, c| (acc + c) * x)), "polynomial")
            }
            None => {
                let inner = a.clone();
                (Arc::new(move |x| quadrature(&inner, 0.0, x)), "quadrature")
            }
        };
        Ok(Self { name: name.into(), a, da, primitive, primitive_kind })
    }

    /// "linear", "quadratic:c" (v + c·v²), "cubic:c" (v + c·v³), "custom:EXPR", or a bare expression.
    pub fn by_name(name: &str) -> Result<Self> {
        let name = name.trim();
        let coeff = |rest: &str| -> Result<f64> {
            rest.trim().parse().map_err(|_| Error::Parse(format!("bad flux coefficient '{rest}'")))
        };
        let expr = if name == "linear" {
            "v".to_string()
        } else if let Some(rest) = name.strip_prefix("quadratic:") {
            format!("v + ({}) * v^2", coeff(rest)?)
        } else if let Some(rest) = name.strip_prefix("cubic:") {
            format!("v + ({}) * v^3", coeff(rest)?)
        } else if let Some(rest) = name.strip_prefix("custom:") {
            rest.to_string()
        } else {
            name.to_string()
        };
        Self::from_expr(name, &parse_expr(&expr)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn primitive_kind(&self) -> &'static str {
        self.primitive_kind
    }

    pub fn a(&self, v: f64) -> f64 {
        (self.a)(v)
    }

    pub fn da(&self, v: f64) -> f64 {
        (self.da)(v)
    }

    pub fn primitive(&self, v: f64) -> f64 {
        (self.primitive)(v)
    }

    /// |F(hi) − F(lo) − ∫_lo^hi a| by independent quadrature.
    pub fn primitive_error(&self, lo: f64, hi: f64) -> f64 {
        (self.primitive(hi) - self.primitive(lo) - quadrature(&self.a, lo, hi)).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parser_precedence() {
        let e = parse_expr("1 + 2*v^2 - -v/4").unwrap();
        assert_abs_diff_eq!(e.eval(2.0), 1.0 + 8.0 + 0.5);
        assert_abs_diff_eq!(parse_expr("-v^2").unwrap().eval(3.0), -9.0);
        assert_abs_diff_eq!(parse_expr("2^3^2").unwrap().eval(0.0), 512.0);
        assert_abs_diff_eq!(parse_expr("1.5e-1*v").unwrap().eval(2.0), 0.3);
        assert!(parse_expr("v +").is_err());
        assert!(parse_expr("(v").is_err());
        assert!(parse_expr("x").is_err());
    }

    #[test]
    fn polynomial_detection() {
        assert_eq!(parse_expr("(v+1)^2").unwrap().polynomial(), Some(vec![1.0, 2.0, 1.0]));
        assert_eq!(parse_expr("v/2").unwrap().polynomial(), Some(vec![0.0, 0.5]));
        assert_eq!(parse_expr("1/(1+v^2)").unwrap().polynomial(), None);
    }

    #[test]
    fn named_fluxes() {
        let q = FluxFunction::by_name("quadratic:1").unwrap();
        assert_abs_diff_eq!(q.a(2.0), 6.0);
        assert_abs_diff_eq!(q.da(2.0), 5.0);
        assert_abs_diff_eq!(q.primitive(3.0), 4.5 + 9.0, epsilon = 1e-12);
        assert_eq!(q.primitive_kind(), "polynomial");
        let c = FluxFunction::by_name("cubic:-2").unwrap();
        assert_abs_diff_eq!(c.a(1.0), -1.0);
        assert_abs_diff_eq!(c.da(1.0), -5.0);
        assert!(FluxFunction::by_name("quadratic:x").is_err());
    }

    #[test]
    fn primitive_matches_quadrature() {
        for name in ["linear", "quadratic:0.5", "cubic:3", "custom:1/(1+v^2)", "v^3 - v"] {
            let f = FluxFunction::by_name(name).unwrap();
            assert!(f.primitive_error(-1.3, 2.1) < 1e-8, "{name}");
        }
        let atan = FluxFunction::by_name("1/(1+v^2)").unwrap();
        assert_eq!(atan.primitive_kind(), "quadrature");
        assert_abs_diff_eq!(atan.primitive(1.0), std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
        assert_abs_diff_eq!(atan.da(1.0), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn closures_get_quadrature_primitive() {
        let f = FluxFunction::from_fns("sin", f64::sin, f64::cos, None);
        assert_abs_diff_eq!(f.primitive(std::f64::consts::PI), 2.0, epsilon = 1e-12);
    }
}
