//! Expression trees in one complex variable: parsing, evaluation, symbolic
//! differentiation and truncated Laurent expansion.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("pole at z = {0}")]
    Pole(Complex64),
    #[error("non-finite value at z = {0}")]
    NonFinite(Complex64),
    #[error("essential singularity at z = {0}")]
    Essential(Complex64),
    #[error("series expansion lost all significant terms at z = {0}")]
    Indeterminate(Complex64),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Z,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Neg(Box<Expr>),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Expr {
    pub fn z() -> Self {
        Expr::Z
    }

    pub fn constant(v: Complex64) -> Self {
        Expr::Const(v)
    }

    pub fn real(v: f64) -> Self {
        Expr::Const(c(v, 0.0))
    }

    pub fn zero() -> Self {
        Expr::real(0.0)
    }

    pub fn one() -> Self {
        Expr::real(1.0)
    }

    fn as_const(&self) -> Option<Complex64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Z => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Pow(a, _) | Expr::Exp(a) | Expr::Neg(a) => a.is_constant(),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(x), _) if x == c(0.0, 0.0) => b,
            (_, Some(y)) if y == c(0.0, 0.0) => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(x), _) if x == c(0.0, 0.0) => Expr::neg(b),
            (_, Some(y)) if y == c(0.0, 0.0) => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(x), _) | (_, Some(x)) if x == c(0.0, 0.0) => Expr::zero(),
            (Some(x), _) if x == c(1.0, 0.0) => b,
            (_, Some(y)) if y == c(1.0, 0.0) => a,
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != c(0.0, 0.0) => Expr::Const(x / y),
            (Some(x), _) if x == c(0.0, 0.0) => Expr::zero(),
            (_, Some(y)) if y == c(1.0, 0.0) => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match (n, a.as_const()) {
            (0, _) => Expr::one(),
            (1, _) => a,
            (_, Some(x)) if x != c(0.0, 0.0) || n > 0 => Expr::Const(x.powi(n)),
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn exp(a: Expr) -> Expr {
        match a.as_const() {
            Some(x) => Expr::Const(x.exp()),
            None => Expr::Exp(Box::new(a)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(x) => Expr::Const(-x),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, ExprError> {
        let v = match self {
            Expr::Const(v) => *v,
            Expr::Z => z,
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Sub(a, b) => a.eval(z)? - b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => {
                let den = b.eval(z)?;
                if den == c(0.0, 0.0) {
                    return Err(ExprError::Pole(z));
                }
                a.eval(z)? / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval(z)?;
                if *n < 0 && base == c(0.0, 0.0) {
                    return Err(ExprError::Pole(z));
                }
                base.powi(*n)
            }
            Expr::Exp(a) => a.eval(z)?.exp(),
            Expr::Neg(a) => -a.eval(z)?,
        };
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::NonFinite(z))
        }
    }

    /// Symbolic `d/dz`.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Z => Expr::one(),
            Expr::Add(a, b) => Expr::add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => Expr::sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.derivative(), (**b).clone()),
                    Expr::mul((**a).clone(), b.derivative()),
                ),
                Expr::pow((**b).clone(), 2),
            ),
            Expr::Pow(a, n) => Expr::mul(
                Expr::mul(Expr::real(*n as f64), Expr::pow((**a).clone(), n - 1)),
                a.derivative(),
            ),
            Expr::Exp(a) => Expr::mul(self.clone(), a.derivative()),
            Expr::Neg(a) => Expr::neg(a.derivative()),
        }
    }

    /// Truncated Laurent expansion about `p`.
    pub fn series(&self, p: Complex64) -> Result<Series, ExprError> {
        Ok(match self {
            Expr::Const(v) => Series::constant(*v),
            Expr::Z => Series::variable(p),
            Expr::Add(a, b) => a.series(p)?.add(&b.series(p)?),
            Expr::Sub(a, b) => a.series(p)?.add(&b.series(p)?.neg()),
            Expr::Mul(a, b) => a.series(p)?.mul(&b.series(p)?),
            Expr::Div(a, b) => a.series(p)?.mul(&b.series(p)?.recip(p)?),
            Expr::Pow(a, n) => a.series(p)?.powi(*n, p)?,
            Expr::Exp(a) => a.series(p)?.exp(p)?,
            Expr::Neg(a) => a.series(p)?.neg(),
        })
    }

    /// Order of vanishing at `p`: positive for zeros, negative for poles,
    /// `None` when the expression vanishes identically near `p`.
    pub fn order_at(&self, p: Complex64) -> Result<Option<i32>, ExprError> {
        Ok(self.series(p)?.order())
    }

    /// Value at `p`, passing to the limit at removable singularities.
    pub fn eval_limit(&self, p: Complex64) -> Result<Complex64, ExprError> {
        match self.eval(p) {
            Ok(v) => Ok(v),
            Err(ExprError::Pole(_)) | Err(ExprError::NonFinite(_)) => self.series(p)?.value(p),
            Err(e) => Err(e),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(v) if v.re != 0.0 && v.im != 0.0 => 5,
            Expr::Const(v) if v.re < 0.0 || v.im < 0.0 => 3,
            _ => 5,
        }
    }
}

const SERIES_TERMS: usize = 24;
/// Coefficients below this fraction of the operand scale count as cancelled.
const CANCEL_TOL: f64 = 1e-11;

/// `Σ_k c[k] (z − p)^{val + k}`, with `scale` tracking the magnitude of the
/// operands that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub val: i32,
    pub coeffs: Vec<Complex64>,
    scale: f64,
    zero: bool,
}

impl Series {
    fn constant(v: Complex64) -> Self {
        let mut coeffs = vec![c(0.0, 0.0); SERIES_TERMS];
        coeffs[0] = v;
        let zero = v == c(0.0, 0.0);
        Series { val: 0, coeffs, scale: v.norm(), zero }
    }

    fn variable(p: Complex64) -> Self {
        let mut coeffs = vec![c(0.0, 0.0); SERIES_TERMS];
        if p == c(0.0, 0.0) {
            coeffs[0] = c(1.0, 0.0);
            return Series { val: 1, coeffs, scale: 1.0, zero: false };
        }
        coeffs[0] = p;
        coeffs[1] = c(1.0, 0.0);
        Series { val: 0, coeffs, scale: p.norm().max(1.0), zero: false }
    }

    fn zero_series() -> Self {
        Series { val: 0, coeffs: vec![c(0.0, 0.0); SERIES_TERMS], scale: 0.0, zero: true }
    }

    /// Drops cancelled leading coefficients.
    fn normalize(mut self) -> Self {
        if self.zero {
            return self;
        }
        let thresh = CANCEL_TOL * self.scale;
        let lead = self.coeffs.iter().position(|v| v.norm() > thresh);
        match lead {
            None => Series::zero_series(),
            Some(k) => {
                self.coeffs.drain(..k);
                self.val += k as i32;
                self
            }
        }
    }

    pub fn order(&self) -> Option<i32> {
        if self.zero {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn value(&self, p: Complex64) -> Result<Complex64, ExprError> {
        match self.order() {
            None => Ok(c(0.0, 0.0)),
            Some(v) if v > 0 => Ok(c(0.0, 0.0)),
            Some(0) => Ok(self.coeffs[0]),
            Some(_) => Err(ExprError::Pole(p)),
        }
    }

    /// Coefficient of `(z − p)^k`.
    pub fn coefficient(&self, k: i32) -> Complex64 {
        if self.zero || k < self.val {
            return c(0.0, 0.0);
        }
        self.coeffs.get((k - self.val) as usize).copied().unwrap_or(c(0.0, 0.0))
    }

    pub(crate) fn neg(&self) -> Self {
        Series { coeffs: self.coeffs.iter().map(|v| -v).collect(), ..self.clone() }
    }

    pub(crate) fn add(&self, o: &Self) -> Self {
        if self.zero {
            return o.clone();
        }
        if o.zero {
            return self.clone();
        }
        let val = self.val.min(o.val);
        let top = (self.val + self.coeffs.len() as i32).min(o.val + o.coeffs.len() as i32);
        let len = (top - val).max(0) as usize;
        let coeffs = (0..len)
            .map(|k| self.coefficient(val + k as i32) + o.coefficient(val + k as i32))
            .collect();
        Series { val, coeffs, scale: self.scale.max(o.scale), zero: false }.normalize()
    }

    pub(crate) fn mul(&self, o: &Self) -> Self {
        if self.zero || o.zero {
            return Series::zero_series();
        }
        let len = self.coeffs.len().min(o.coeffs.len());
        let mut coeffs = vec![c(0.0, 0.0); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            for (j, b) in o.coeffs.iter().take(len - i).enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let scale = self.coeffs[0].norm() * o.coeffs[0].norm();
        Series { val: self.val + o.val, coeffs, scale, zero: false }.normalize()
    }

    pub(crate) fn recip(&self, p: Complex64) -> Result<Self, ExprError> {
        if self.zero {
            return Err(ExprError::Pole(p));
        }
        if self.coeffs.is_empty() {
            return Err(ExprError::Indeterminate(p));
        }
        let a = &self.coeffs;
        let mut b = vec![c(0.0, 0.0); a.len()];
        b[0] = a[0].inv();
        for k in 1..a.len() {
            let mut acc = c(0.0, 0.0);
            for j in 1..=k {
                acc += a[j] * b[k - j];
            }
            b[k] = -acc * b[0];
        }
        let scale = b[0].norm();
        Ok(Series { val: -self.val, coeffs: b, scale, zero: false })
    }

    fn powi(&self, n: i32, p: Complex64) -> Result<Self, ExprError> {
        let base = if n < 0 { self.recip(p)? } else { self.clone() };
        let mut out = Series::constant(c(1.0, 0.0));
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    fn exp(&self, p: Complex64) -> Result<Self, ExprError> {
        if self.zero {
            return Ok(Series::constant(c(1.0, 0.0)));
        }
        if self.val < 0 {
            return Err(ExprError::Essential(p));
        }
        let len = self.coeffs.len() + self.val as usize;
        let a: Vec<Complex64> = (0..len as i32).map(|k| self.coefficient(k)).collect();
        let mut b = vec![c(0.0, 0.0); len];
        b[0] = a[0].exp();
        for k in 1..len {
            let mut acc = c(0.0, 0.0);
            for j in 1..=k {
                acc += a[j] * b[k - j] * j as f64;
            }
            b[k] = acc / k as f64;
        }
        let scale = b[0].norm();
        Ok(Series { val: 0, coeffs: b, scale, zero: false })
    }
}

fn fmt_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

fn fmt_const(v: Complex64) -> String {
    match (v.re, v.im) {
        (re, im) if im == 0.0 => fmt_number(re),
        (re, im) if re == 0.0 => format!("{}i", fmt_number(im)),
        (re, im) if im < 0.0 => format!("({}-{}i)", fmt_number(re), fmt_number(-im)),
        (re, im) => format!("({}+{}i)", fmt_number(re), fmt_number(im)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, min: u8| {
            if e.precedence() < min {
                format!("({e})")
            } else {
                format!("{e}")
            }
        };
        match self {
            Expr::Const(v) => write!(f, "{}", fmt_const(*v)),
            Expr::Z => write!(f, "z"),
            Expr::Add(a, b) => write!(f, "{} + {}", wrap(a, 1), wrap(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", wrap(a, 1), wrap(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", wrap(a, 2), wrap(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", wrap(a, 2), wrap(b, 3)),
            Expr::Pow(a, n) if *n < 0 => write!(f, "{}^({})", wrap(a, 5), n),
            Expr::Pow(a, n) => write!(f, "{}^{}", wrap(a, 5), n),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Neg(a) => write!(f, "-{}", wrap(a, 3)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Ident(&'static str),
    Op(char),
}

const IDENTS: [&str; 8] = ["exp", "cosh", "sinh", "pi", "z", "w", "i", "e"];

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    let err = |pos: usize, msg: &str| ExprError::Parse { pos, msg: msg.to_string() };
    while k < bytes.len() {
        let ch = bytes[k] as char;
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = k;
            while k < bytes.len() && (bytes[k].is_ascii_digit() || bytes[k] == b'.') {
                k += 1;
            }
            // An exponent needs a digit after `e` and an optional sign.
            if k < bytes.len() && (bytes[k] == b'e' || bytes[k] == b'E') {
                let mut j = k + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    k = j;
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let v: f64 = s[start..k].parse().map_err(|_| err(start, "malformed number"))?;
            let is_imag = k < bytes.len()
                && bytes[k] == b'i'
                && !s[k..].starts_with("inf")
                && !(k + 1 < bytes.len() && bytes[k + 1].is_ascii_alphabetic());
            if is_imag {
                k += 1;
                out.push((start, Tok::Imag(v)));
            } else {
                out.push((start, Tok::Num(v)));
            }
        } else if ch.is_ascii_alphabetic() {
            let rest = &s[k..];
            let name = IDENTS
                .iter()
                .filter(|n| rest.starts_with(**n))
                .max_by_key(|n| n.len())
                .ok_or_else(|| err(k, "unknown identifier"))?;
            out.push((k, Tok::Ident(name)));
            k += name.len();
        } else if "+-*/^()".contains(ch) {
            out.push((k, Tok::Op(ch)));
            k += 1;
        } else {
            return Err(err(k, &format!("unexpected character '{ch}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.len)
    }

    fn err(&self, msg: &str) -> ExprError {
        ExprError::Parse { pos: self.offset(), msg: msg.to_string() }
    }

    fn expect(&mut self, ch: char) -> Result<(), ExprError> {
        if self.peek() == Some(&Tok::Op(ch)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{ch}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Op('-')) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Imag(_) | Tok::Ident(_) | Tok::Op('(')))
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ if self.starts_atom() => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn int_exponent(&mut self) -> Result<i32, ExprError> {
        let paren = self.peek() == Some(&Tok::Op('('));
        if paren {
            self.pos += 1;
        }
        let sign = match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                -1
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        let n = match self.peek() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => *v as i32,
            _ => return Err(self.err("exponent must be an integer")),
        };
        self.pos += 1;
        if paren {
            self.expect(')')?;
        }
        Ok(sign * n)
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let n = self.int_exponent()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::real(v)),
            Tok::Imag(v) => Ok(Expr::Const(c(0.0, v))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name {
                "z" | "w" => Ok(Expr::Z),
                "i" => Ok(Expr::Const(c(0.0, 1.0))),
                "e" => Ok(Expr::real(std::f64::consts::E)),
                "pi" => Ok(Expr::real(std::f64::consts::PI)),
                func => {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    let ep = Expr::Exp(Box::new(arg.clone()));
                    let em = Expr::Exp(Box::new(Expr::Neg(Box::new(arg))));
                    let half = Box::new(Expr::real(0.5));
                    Ok(match func {
                        "exp" => ep,
                        "cosh" => Expr::Mul(half, Box::new(Expr::Add(Box::new(ep), Box::new(em)))),
                        _ => Expr::Mul(half, Box::new(Expr::Sub(Box::new(ep), Box::new(em)))),
                    })
                }
            },
            Tok::Op(ch) => {
                self.pos -= 1;
                Err(self.err(&format!("unexpected '{ch}'")))
            }
        }
    }
}

impl FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0, len: s.len() };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Expr {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_eval() {
        let z = c(0.3, -0.7);
        let cases: [(&str, Complex64); 8] = [
            ("z^2 + 1", z * z + 1.0),
            ("2z - 3i", z * 2.0 - c(0.0, 3.0)),
            ("-z^2", -(z * z)),
            ("(z^3 - 1)^2/z^2", (z.powi(3) - 1.0).powi(2) / (z * z)),
            ("exp(-z)", (-z).exp()),
            ("cosh(z)", z.cosh()),
            ("1.5e-1z", z * 0.15),
            ("(0.5-0.8660254037844386i)*z^(-2)", c(0.5, -0.866_025_403_784_438_6) / (z * z)),
        ];
        for (s, expected) in cases {
            let v = parse(s).eval(z).unwrap();
            assert!((v - expected).norm() < 1e-14, "{s}: {v} vs {expected}");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["z^2 + 1", "(1+2i)*exp(-z)", "1/(z - 1)^(-3)", "-(z - 2)*z", "2 - (3 - z)"] {
            let e = parse(s);
            let back = parse(&e.to_string());
            let z = c(0.41, 1.3);
            assert!((e.eval(z).unwrap() - back.eval(z).unwrap()).norm() < 1e-14, "{s} -> {e}");
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("z^1.5".parse::<Expr>(), Err(ExprError::Parse { .. })));
        assert!(matches!("sin(z)".parse::<Expr>(), Err(ExprError::Parse { .. })));
        assert!(matches!("(z + 1".parse::<Expr>(), Err(ExprError::Parse { .. })));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let e = parse("(z^3 - 2)^2/z^2 + exp(2z)*z");
        let d = e.derivative();
        let z = c(0.7, 0.4);
        let h = 1e-5;
        let fd = (e.eval(z + h).unwrap() - e.eval(z - h).unwrap()) / (2.0 * h);
        assert!((d.eval(z).unwrap() - fd).norm() < 1e-7);
    }

    #[test]
    fn orders_and_limits() {
        let e = parse("(z^3 - 1)^2/z^2");
        assert_eq!(e.order_at(c(0.0, 0.0)).unwrap(), Some(-2));
        assert_eq!(e.order_at(c(1.0, 0.0)).unwrap(), Some(2));
        assert_eq!(e.order_at(c(0.5, 0.0)).unwrap(), Some(0));
        let r = parse("(exp(z) - 1)/z");
        assert!(matches!(r.eval(c(0.0, 0.0)), Err(ExprError::Pole(_))));
        assert!((r.eval_limit(c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(parse("z - z").order_at(c(2.0, 0.0)).unwrap(), None);
        assert!(matches!(parse("exp(1/z)").order_at(c(0.0, 0.0)), Err(ExprError::Essential(_))));
    }
}
