//! `SL(2, C)` matrices and their Möbius transformations.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extended::ExtComplex;
use crate::minkowski::{LorentzMat, MinkVec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobiusError {
    #[error("matrix is singular (|det| = {0:e})")]
    Singular(f64),
    #[error("matrix entries are not finite")]
    NonFinite,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A 2×2 complex matrix `[[a, b], [c, d]]` with `ad − bc = 1`. `S` and `−S`
/// define the same transformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMat {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusMat {
    /// Normalizes `[[a, b], [c, d]]` to determinant one.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, MobiusError> {
        if ![a, b, c, d].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(MobiusError::NonFinite);
        }
        let det = a * d - b * c;
        let scale = [a, b, c, d].iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if det.norm() <= 1e-14 * scale * scale || scale == 0.0 {
            return Err(MobiusError::Singular(det.norm()));
        }
        let s = det.sqrt().inv();
        Ok(MobiusMat { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    pub fn from_real(a: f64, b: f64, cc: f64, d: f64) -> Result<Self, MobiusError> {
        Self::new(c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0))
    }

    pub fn from_rows(m: [[Complex64; 2]; 2]) -> Result<Self, MobiusError> {
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    pub fn identity() -> Self {
        MobiusMat { a: c(1.0, 0.0), b: c(0.0, 0.0), c: c(0.0, 0.0), d: c(1.0, 0.0) }
    }

    /// `diag(e^u, e^{−u})`.
    pub fn diag(u: f64) -> Self {
        MobiusMat { a: c(u.exp(), 0.0), b: c(0.0, 0.0), c: c(0.0, 0.0), d: c((-u).exp(), 0.0) }
    }

    /// `[[cos α, sin α], [−sin α, cos α]]`.
    pub fn rotation(alpha: f64) -> Self {
        let (s, co) = alpha.sin_cos();
        MobiusMat { a: c(co, 0.0), b: c(s, 0.0), c: c(-s, 0.0), d: c(co, 0.0) }
    }

    /// `[[0, i e^{−iα}], [i e^{iα}, 0]]`.
    pub fn elliptic(alpha: f64) -> Self {
        let i = c(0.0, 1.0);
        MobiusMat {
            a: c(0.0, 0.0),
            b: i * Complex64::from_polar(1.0, -alpha),
            c: i * Complex64::from_polar(1.0, alpha),
            d: c(0.0, 0.0),
        }
    }

    /// `[[1, 1], [0, 1]]`.
    pub fn unipotent() -> Self {
        MobiusMat { a: c(1.0, 0.0), b: c(1.0, 0.0), c: c(0.0, 0.0), d: c(1.0, 0.0) }
    }

    pub fn rows(&self) -> [[Complex64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn compose(&self, o: &Self) -> Self {
        MobiusMat {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Self {
        MobiusMat { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Entrywise complex conjugate `S̄`.
    pub fn conj(&self) -> Self {
        MobiusMat { a: self.a.conj(), b: self.b.conj(), c: self.c.conj(), d: self.d.conj() }
    }

    pub fn neg(&self) -> Self {
        MobiusMat { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        MobiusMat { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    /// Conjugate-similarity action `T̄ S T⁻¹`.
    pub fn conj_action(&self, t: &Self) -> Self {
        t.conj().compose(self).compose(&t.inverse())
    }

    pub fn max_abs(&self) -> f64 {
        [self.a, self.b, self.c, self.d].iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Entrywise distance to `other`, minimized over the sign ambiguity.
    pub fn distance_pm(&self, other: &Self) -> f64 {
        let dist = |s: f64| {
            [
                self.a - other.a * s,
                self.b - other.b * s,
                self.c - other.c * s,
                self.d - other.d * s,
            ]
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()))
        };
        dist(1.0).min(dist(-1.0))
    }

    /// Extended evaluation of `(aw + b)/(cw + d)`.
    pub fn apply(&self, w: &ExtComplex) -> ExtComplex {
        match *w {
            ExtComplex::Infinity => {
                if self.c == c(0.0, 0.0) {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(self.a / self.c)
                }
            }
            ExtComplex::Finite(w) => {
                let num = self.a * w + self.b;
                let den = self.c * w + self.d;
                if den == c(0.0, 0.0) {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(num / den)
                }
            }
        }
    }

    pub fn apply_finite(&self, w: Complex64) -> ExtComplex {
        self.apply(&ExtComplex::Finite(w))
    }

    /// Derivative `1/(cw + d)²` of the transformation at a finite point.
    pub fn derivative(&self, w: Complex64) -> Complex64 {
        let den = self.c * w + self.d;
        (den * den).inv()
    }
}

impl fmt::Display for MobiusMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |z: Complex64| format!("{}", ExtComplex::Finite(z));
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            show(self.a),
            show(self.b),
            show(self.c),
            show(self.d)
        )
    }
}

/// Hermitian matrix `[[x4 − x3, x1 + ix2], [x1 − ix2, x4 + x3]]` of a real vector.
fn to_hermitian(x: &MinkVec) -> [[Complex64; 2]; 2] {
    let [x1, x2, x3, x4] = x.0;
    [[c(x4 - x3, 0.0), c(x1, x2)], [c(x1, -x2), c(x4 + x3, 0.0)]]
}

fn from_hermitian(h: &[[Complex64; 2]; 2]) -> MinkVec {
    let x4 = 0.5 * (h[0][0].re + h[1][1].re);
    let x3 = 0.5 * (h[1][1].re - h[0][0].re);
    MinkVec::new(h[0][1].re, h[0][1].im, x3, x4)
}

/// The element of `SO⁺(3,1)` inducing `M_T` on the sphere of null directions:
/// `(P⁻¹(w), 1)` is sent to a positive multiple of `(P⁻¹(M_T(w)), 1)`.
pub fn lorentz_from_sl2(t: &MobiusMat) -> LorentzMat {
    let m = t.rows();
    let mut sigma = [[0.0; 4]; 4];
    for j in 0..4 {
        let h = to_hermitian(&MinkVec::basis(j));
        let mut th = [[c(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        th[r][s] += m[r][k] * h[k][l] * m[s][l].conj();
                    }
                }
            }
        }
        let col = from_hermitian(&th);
        for i in 0..4 {
            sigma[i][j] = col.0[i];
        }
    }
    LorentzMat(sigma)
}
