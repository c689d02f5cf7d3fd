//! Dense complex polynomials in ascending coefficient order.

use num_complex::Complex64;

pub(crate) type Poly = Vec<Complex64>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub(crate) fn max_norm(p: &[Complex64]) -> f64 {
    p.iter().fold(0.0, |m, c| m.max(c.norm()))
}

/// Degree, or `None` for the zero polynomial.
pub(crate) fn degree(p: &[Complex64]) -> Option<usize> {
    p.iter().rposition(|c| *c != zero())
}

/// Drops leading coefficients at most `tol` times the max-norm.
pub(crate) fn trim(mut p: Poly, tol: f64) -> Poly {
    let cut = tol * max_norm(&p);
    while p.last().is_some_and(|c| c.norm() <= cut) {
        p.pop();
    }
    p
}

pub(crate) fn eval(p: &[Complex64], w: Complex64) -> Complex64 {
    p.iter().rev().fold(zero(), |acc, c| acc * w + c)
}

pub(crate) fn derivative(p: &[Complex64]) -> Poly {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

pub(crate) fn add(a: &[Complex64], b: &[Complex64]) -> Poly {
    let mut out = vec![zero(); a.len().max(b.len())];
    for (k, c) in a.iter().enumerate() {
        out[k] += c;
    }
    for (k, c) in b.iter().enumerate() {
        out[k] += c;
    }
    out
}

pub(crate) fn scale(a: &[Complex64], s: Complex64) -> Poly {
    a.iter().map(|c| c * s).collect()
}

pub(crate) fn mul(a: &[Complex64], b: &[Complex64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn powi(a: &[Complex64], n: usize) -> Poly {
    (0..n).fold(vec![Complex64::new(1.0, 0.0)], |acc, _| mul(&acc, a))
}

/// Coefficients of `p(c + h)` in powers of `h`.
pub(crate) fn taylor_shift(p: &[Complex64], c: Complex64) -> Poly {
    let mut a = p.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let next = a[j + 1];
            a[j] += c * next;
        }
    }
    a
}

/// Remainder of `a` modulo `b`; `b` must have a nonzero leading coefficient.
pub(crate) fn rem(a: &[Complex64], b: &[Complex64]) -> Poly {
    let db = b.len() - 1;
    let lead = b[db];
    let mut r = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1;
        let q = r[k] / lead;
        for (j, bj) in b.iter().enumerate() {
            r[k - db + j] -= q * bj;
        }
        r.pop();
    }
    r
}

/// Degree of `gcd(a, b)` by the Euclidean algorithm, treating remainders
/// below `tol` (relative to the running max-norm) as zero.
pub(crate) fn gcd_degree(a: &[Complex64], b: &[Complex64], tol: f64) -> usize {
    let norm = |p: Poly| {
        let p = trim(p, tol);
        let m = max_norm(&p);
        if m == 0.0 {
            p
        } else {
            scale(&p, Complex64::new(1.0 / m, 0.0))
        }
    };
    let (mut x, mut y) = (norm(a.to_vec()), norm(b.to_vec()));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    loop {
        if y.is_empty() {
            return x.len().saturating_sub(1);
        }
        let r = rem(&x, &y);
        // Remainders are measured against the dividend's unit max-norm.
        let r: Poly = if max_norm(&r) <= tol { Vec::new() } else { norm(r) };
        x = y;
        y = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shift_and_eval() {
        let p = vec![c(1.0, 0.0), c(-2.0, 1.0), c(0.0, 0.0), c(3.0, 0.0)];
        let center = c(0.4, -1.2);
        let s = taylor_shift(&p, center);
        let h = c(0.3, 0.2);
        assert!((eval(&s, h) - eval(&p, center + h)).norm() < 1e-12);
        assert!((s[1] - eval(&derivative(&p), center)).norm() < 1e-12);
    }

    #[test]
    fn gcd_detects_common_factor() {
        let a = mul(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 1.0), c(1.0, 0.0)]);
        let b = mul(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(0.0, 3.0), c(1.0, 0.0)]);
        assert_eq!(gcd_degree(&a, &b, 1e-10), 1);
        assert_eq!(gcd_degree(&[c(1.0, 0.0)], &powi(&[c(0.0, 0.0), c(1.0, 0.0)], 3), 1e-10), 0);
        assert_eq!(gcd_degree(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)], 1e-10), 0);
    }
}
