//! Literal parsing: complex constants and polynomial coefficients.

use gaussmap::weierstrass::Expr;
use num_complex::Complex64;

/// Largest accepted polynomial degree.
const MAX_DEGREE: usize = 64;

/// A complex constant in expression syntax, e.g. `1.5-2i`, `e`, `1/e`, `exp(i*pi/3)`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let e: Expr = s.parse().map_err(|e| format!("'{s}': {e}"))?;
    if !e.is_constant() {
        return Err(format!("'{s}' is not a constant"));
    }
    e.eval(Complex64::new(0.0, 0.0)).map_err(|e| format!("'{s}': {e}"))
}

/// Whitespace- or comma-separated complex constants.
pub fn complex_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(|ch: char| ch == ',' || ch.is_whitespace()).filter(|t| !t.is_empty()).map(complex).collect()
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[Complex64], b: &[Complex64], sign: f64) -> Vec<Complex64> {
    let mut out = a.to_vec();
    out.resize(a.len().max(b.len()), Complex64::new(0.0, 0.0));
    for (k, y) in b.iter().enumerate() {
        out[k] += y * sign;
    }
    out
}

/// Exact coefficient arithmetic over the expression tree; `None` if the
/// expression is not a polynomial in `w`.
fn coefficients(e: &Expr) -> Option<Vec<Complex64>> {
    let constant = |e: &Expr| e.eval(Complex64::new(0.0, 0.0)).ok();
    let out = match e {
        _ if e.is_constant() => vec![constant(e)?],
        Expr::Z => vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        Expr::Add(a, b) => poly_add(&coefficients(a)?, &coefficients(b)?, 1.0),
        Expr::Sub(a, b) => poly_add(&coefficients(a)?, &coefficients(b)?, -1.0),
        Expr::Mul(a, b) => poly_mul(&coefficients(a)?, &coefficients(b)?),
        Expr::Div(a, b) if b.is_constant() => {
            let d = constant(b)?;
            coefficients(a)?.iter().map(|x| x / d).collect()
        }
        Expr::Pow(a, n) if *n >= 0 => {
            let base = coefficients(a)?;
            let mut acc = vec![Complex64::new(1.0, 0.0)];
            for _ in 0..*n {
                acc = poly_mul(&acc, &base);
                if acc.len() > MAX_DEGREE + 1 {
                    return None;
                }
            }
            acc
        }
        Expr::Neg(a) => coefficients(a)?.iter().map(|x| -x).collect(),
        _ => return None,
    };
    (out.len() <= MAX_DEGREE + 1).then_some(out)
}

/// Ascending coefficients of a polynomial in `w` written as an expression,
/// e.g. `w^3 - 2i*w + 1`.
pub fn polynomial(s: &str) -> Result<Vec<Complex64>, String> {
    let e: Expr = s.parse().map_err(|e| format!("'{s}': {e}"))?;
    let mut out = coefficients(&e).ok_or_else(|| format!("'{s}' is not a polynomial in w of degree at most {MAX_DEGREE}"))?;
    while out.len() > 1 && out.last() == Some(&Complex64::new(0.0, 0.0)) {
        out.pop();
    }
    if out.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(format!("'{s}' has non-finite coefficients"));
    }
    Ok(out)
}

/// `NxM` grid dimensions.
pub fn grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("grid '{s}' is not of the form NxM"))?;
    let n = a.trim().parse().map_err(|_| format!("bad grid count '{a}'"))?;
    let m = b.trim().parse().map_err(|_| format!("bad grid count '{b}'"))?;
    Ok((n, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert_eq!(complex("1.5-2i").unwrap(), Complex64::new(1.5, -2.0));
        assert!((complex("1/e").unwrap().re - (-1f64).exp()).abs() < 1e-15);
        assert!(complex("z+1").is_err());
        assert_eq!(complex_list("1, 0 i,2").unwrap().len(), 4);
    }

    #[test]
    fn polynomial_coefficients() {
        let p = polynomial("w^3 - 2i*w + 1").unwrap();
        assert_eq!(p, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -2.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert_eq!(polynomial("0").unwrap(), vec![Complex64::new(0.0, 0.0)]);
        assert!(polynomial("1/w").is_err());
        assert!(polynomial("exp(w)").is_err());
        assert_eq!(polynomial("(w-1)^2/2").unwrap()[1], Complex64::new(-1.0, 0.0));
        assert!(polynomial("w^65").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(grid("32x16").unwrap(), (32, 16));
        assert!(grid("32").is_err());
    }
}
