//! The quadric `Q₁,₁ ⊂ CP^{2,1}`, its chart to `C* × C*`, the null pair of a
//! space-like plane and the canonical metric `g`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extended::ExtComplex;
use crate::minkowski::{stereographic, CVec, LorentzMat, MinkVec};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadricError {
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("point is not on the quadric (|<z,z>| = {0:e})")]
    NotOnQuadric(f64),
    #[error("vectors are not an orthonormal space-like pair (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("degenerate pair: w2 = conj(w1)")]
    DegeneratePair,
    #[error("chart entry at infinity; evaluate in the reciprocal chart")]
    InfiniteEntry,
}

/// A point of `CP^{2,1}`, stored with its largest-modulus component equal to 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProjPoint<T = f64> {
    rep: CVec<T>,
}

impl<T: Scalar> ProjPoint<T> {
    pub fn new(z: CVec<T>) -> Result<Self, QuadricError> {
        let mut pivot = 0;
        let mut best = T::zero();
        for (i, c) in z.0.iter().enumerate() {
            let m = c.norm();
            if !m.is_finite() {
                return Err(QuadricError::ZeroVector);
            }
            if m > best {
                best = m;
                pivot = i;
            }
        }
        if best == T::zero() {
            return Err(QuadricError::ZeroVector);
        }
        let p = z.0[pivot];
        Ok(ProjPoint { rep: CVec(z.0.map(|c| c / p)) })
    }

    pub fn from_components(z: [Complex<T>; 4]) -> Result<Self, QuadricError> {
        Self::new(CVec(z))
    }

    pub fn from_real(u: &MinkVec<T>) -> Result<Self, QuadricError> {
        Self::new(u.to_complex())
    }

    pub fn rep(&self) -> &CVec<T> {
        &self.rep
    }

    /// True when the two representatives are complex multiples of each other:
    /// every 2×2 minor `z_i w_j - z_j w_i` is at most `tol·|z||w|`.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        let (z, w) = (&self.rep.0, &other.rep.0);
        let scale = self.rep.norm() * other.rep.norm();
        for i in 0..4 {
            for j in i + 1..4 {
                if (z[i] * w[j] - z[j] * w[i]).norm() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn transform(&self, sigma: &LorentzMat<T>) -> Self {
        Self::new(sigma.apply_complex(&self.rep)).expect("Lorentz maps are invertible")
    }

    pub fn conj(&self) -> Self {
        Self::new(self.rep.conj()).expect("conjugate of nonzero vector is nonzero")
    }
}

impl<T: Scalar> PartialEq for ProjPoint<T> {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, T::lit(1e-9))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    NotInQ,
    InQ,
    InQPlus,
}

/// Position of `p` relative to `Q₁,₁` and its positive part, with relative tolerance `tol`.
pub fn quadric_membership_tol<T: Scalar>(p: &ProjPoint<T>, tol: T) -> Membership {
    let z = p.rep();
    let n2 = z.norm() * z.norm();
    if z.bilinear(z).norm() > tol * n2 {
        Membership::NotInQ
    } else if z.hermitian(z).re > tol * n2 {
        Membership::InQPlus
    } else {
        Membership::InQ
    }
}

pub fn quadric_membership<T: Scalar>(p: &ProjPoint<T>) -> Membership {
    quadric_membership_tol(p, T::lit(crate::minkowski::DEFAULT_TOL))
}

/// Chart coordinates `(w₁, w₂)` of a point of `Q₁,₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPair<T = f64> {
    pub w1: ExtComplex<T>,
    pub w2: ExtComplex<T>,
}

impl<T: Scalar> ChartPair<T> {
    pub fn new(w1: ExtComplex<T>, w2: ExtComplex<T>) -> Self {
        ChartPair { w1, w2 }
    }

    pub fn finite(w1: Complex<T>, w2: Complex<T>) -> Self {
        ChartPair { w1: ExtComplex::Finite(w1), w2: ExtComplex::Finite(w2) }
    }

    /// Largest chordal distance between corresponding entries.
    pub fn chordal_distance(&self, other: &Self) -> T {
        self.w1.chordal_distance(&other.w1).max(self.w2.chordal_distance(&other.w2))
    }

    /// True on the degenerate locus `w₂ = w̄₁` (chordal test).
    pub fn is_degenerate(&self, tol: T) -> bool {
        self.w2.chordal_distance(&self.w1.conj()) <= tol
    }
}

/// Homogeneous coordinates `(a : b)` of a point of the Riemann sphere, using
/// the chart with modulus at most one.
fn homogeneous<T: Scalar>(w: &ExtComplex<T>) -> (Complex<T>, Complex<T>) {
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    match *w {
        ExtComplex::Infinity => (one, zero),
        ExtComplex::Finite(w) if w.norm() <= T::one() => (w, one),
        ExtComplex::Finite(w) => (one, w.inv()),
    }
}

/// Ratio `a/b` choosing between two equivalent fractions the one with the
/// larger denominator; a vanishing denominator gives `∞`.
fn ratio<T: Scalar>(
    num1: Complex<T>,
    den1: Complex<T>,
    num2: Complex<T>,
    den2: Complex<T>,
    tol: T,
) -> ExtComplex<T> {
    let (num, den) = if den1.norm() >= den2.norm() { (num1, den1) } else { (num2, den2) };
    if den.norm() <= tol {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite(num / den)
    }
}

/// The chart `Ψ` of `Q₁,₁` with its limit branches at infinity.
pub fn psi_chart<T: Scalar>(p: &ProjPoint<T>) -> Result<ChartPair<T>, QuadricError> {
    if quadric_membership(p) == Membership::NotInQ {
        let z = p.rep();
        return Err(QuadricError::NotOnQuadric(z.bilinear(z).norm().to_f64().unwrap_or(f64::NAN)));
    }
    let [z1, z2, z3, z4] = p.rep().0;
    let i = Complex::new(T::zero(), T::one());
    // On the quadric (z1 + iz2)(z1 - iz2) = (z4 - z3)(z4 + z3), so each
    // coordinate has two equivalent fractions.
    let tol = T::epsilon() * T::lit(8.0);
    let w1 = ratio(z1 + i * z2, z3 + z4, z4 - z3, z1 - i * z2, tol);
    let w2 = ratio(z1 - i * z2, z3 + z4, z4 - z3, z1 + i * z2, tol);
    Ok(ChartPair { w1, w2 })
}

/// Representative `[w₁ + w₂, −i(w₁ − w₂), 1 − w₁w₂, 1 + w₁w₂]` in homogeneous form.
pub fn psi_inverse<T: Scalar>(c: &ChartPair<T>) -> ProjPoint<T> {
    let (a1, b1) = homogeneous(&c.w1);
    let (a2, b2) = homogeneous(&c.w2);
    let i = Complex::new(T::zero(), T::one());
    let z = [
        a1 * b2 + a2 * b1,
        -i * (a1 * b2 - a2 * b1),
        b1 * b2 - a1 * a2,
        b1 * b2 + a1 * a2,
    ];
    ProjPoint::new(CVec(z)).expect("homogeneous chart image is nonzero")
}

/// Unnormalized representative of finite chart coordinates.
pub fn psi_inverse_rep<T: Scalar>(w1: Complex<T>, w2: Complex<T>) -> CVec<T> {
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    CVec([w1 + w2, -i * (w1 - w2), one - w1 * w2, one + w1 * w2])
}

/// Hermitian norm of the representative, equal to `2|w₂ − w̄₁|²`.
pub fn hermitian_gap<T: Scalar>(c: &ChartPair<T>) -> Result<T, QuadricError> {
    match (c.w1, c.w2) {
        (ExtComplex::Finite(w1), ExtComplex::Finite(w2)) => {
            let z = psi_inverse_rep(w1, w2);
            Ok(z.hermitian(&z).re)
        }
        _ => Err(QuadricError::InfiniteEntry),
    }
}

/// The point `[u − iv]` of an orthonormal space-like pair.
pub fn plane_to_proj<T: Scalar>(u: &MinkVec<T>, v: &MinkVec<T>) -> Result<ProjPoint<T>, QuadricError> {
    let dev = (u.inner(u) - T::one())
        .abs()
        .max((v.inner(v) - T::one()).abs())
        .max(u.inner(v).abs());
    if dev > T::lit(1e-8) {
        return Err(QuadricError::NotOrthonormal(dev.to_f64().unwrap_or(f64::NAN)));
    }
    ProjPoint::new(CVec::from_parts(u, &-*v))
}

/// Oriented orthonormal basis `(u, v)` with `[u − iv] = p`, for `p ∈ Q₁,₁⁺`.
pub fn plane_basis<T: Scalar>(p: &ProjPoint<T>) -> Result<(MinkVec<T>, MinkVec<T>), QuadricError> {
    if quadric_membership(p) != Membership::InQPlus {
        return Err(QuadricError::DegeneratePair);
    }
    let z = p.rep();
    let h = z.hermitian(z).re;
    let s = (T::lit(2.0) / h).sqrt();
    let z = z.scale(Complex::new(s, T::zero()));
    Ok((z.re(), -z.im()))
}

/// The null vectors `y = (P⁻¹(w₁), 1)` and `y* = (P⁻¹(w̄₂), 1)`.
pub fn null_pair<T: Scalar>(c: &ChartPair<T>) -> Result<(MinkVec<T>, MinkVec<T>), QuadricError> {
    if c.is_degenerate(T::lit(1e-12)) {
        return Err(QuadricError::DegeneratePair);
    }
    Ok((stereographic(&c.w1), stereographic(&c.w2.conj())))
}

/// A local coordinate on one factor of `C* × C*`: either `w` itself or `ζ = 1/w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LocalCoord<T = f64> {
    Direct(Complex<T>),
    Reciprocal(Complex<T>),
}

impl<T: Scalar> LocalCoord<T> {
    /// Chooses the chart in which the coordinate has modulus at most one.
    pub fn of(w: &ExtComplex<T>) -> Self {
        match *w {
            ExtComplex::Infinity => LocalCoord::Reciprocal(Complex::new(T::zero(), T::zero())),
            ExtComplex::Finite(w) if w.norm() <= T::one() => LocalCoord::Direct(w),
            ExtComplex::Finite(w) => LocalCoord::Reciprocal(w.inv()),
        }
    }
}

/// The metric `g = Re[4 dw̄₁ dw₂ / (w̄₁ − w₂)²]` at finite chart coordinates.
pub fn metric_g<T: Scalar>(
    c: &ChartPair<T>,
    dw1: Complex<T>,
    dw2: Complex<T>,
) -> Result<T, QuadricError> {
    match (c.w1, c.w2) {
        (ExtComplex::Finite(w1), ExtComplex::Finite(w2)) => {
            metric_g_local(LocalCoord::Direct(w1), LocalCoord::Direct(w2), dw1, dw2)
        }
        _ => Err(QuadricError::InfiniteEntry),
    }
}

/// The metric `g` in any combination of direct and reciprocal coordinates;
/// the differentials are taken in the same coordinates.
pub fn metric_g_local<T: Scalar>(
    x1: LocalCoord<T>,
    x2: LocalCoord<T>,
    d1: Complex<T>,
    d2: Complex<T>,
) -> Result<T, QuadricError> {
    let one = Complex::new(T::one(), T::zero());
    let four = T::lit(4.0);
    let (sign, gap, scale) = match (x1, x2) {
        (LocalCoord::Direct(a), LocalCoord::Direct(b))
        | (LocalCoord::Reciprocal(a), LocalCoord::Reciprocal(b)) => {
            (T::one(), a.conj() - b, T::one().max(a.norm()).max(b.norm()))
        }
        (LocalCoord::Reciprocal(a), LocalCoord::Direct(b))
        | (LocalCoord::Direct(a), LocalCoord::Reciprocal(b)) => {
            (-T::one(), one - a.conj() * b, T::one().max(a.norm() * b.norm()))
        }
    };
    if gap.norm() < T::lit(1e-12) * scale {
        return Err(QuadricError::DegeneratePair);
    }
    Ok(sign * (d1.conj() * d2 * four / (gap * gap)).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::det4;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn pp(z: [Complex<f64>; 4]) -> ProjPoint {
        ProjPoint::from_components(z).unwrap()
    }

    fn fin(re: f64, im: f64) -> ExtComplex {
        ExtComplex::finite(re, im)
    }

    #[test]
    fn membership_examples() {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        assert_eq!(quadric_membership(&pp([l, c(0.0, 1.0), o, o])), Membership::InQPlus);
        assert_eq!(quadric_membership(&pp([o, o, l, l])), Membership::InQ);
        assert_eq!(quadric_membership(&pp([l, o, o, o])), Membership::NotInQ);
    }

    #[test]
    fn chart_examples() {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let p = pp([l, c(0.0, -1.0), l, l]);
        assert_eq!(psi_chart(&p).unwrap(), ChartPair::new(fin(1.0, 0.0), fin(0.0, 0.0)));
        let p = pp([o, o, -l, l]);
        assert_eq!(
            psi_chart(&p).unwrap(),
            ChartPair::new(ExtComplex::Infinity, ExtComplex::Infinity)
        );
        let p = pp([l, c(0.0, 1.0), c(-2.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(psi_chart(&p).unwrap(), ChartPair::new(fin(2.0, 0.0), ExtComplex::Infinity));
        assert!(matches!(psi_chart(&pp([l, o, o, o])), Err(QuadricError::NotOnQuadric(_))));
    }

    #[test]
    fn inverse_examples() {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let z = psi_inverse(&ChartPair::new(fin(0.0, 0.0), fin(0.0, 0.0)));
        assert_eq!(z, pp([o, o, l, l]));
        let z = psi_inverse(&ChartPair::new(ExtComplex::Infinity, ExtComplex::Infinity));
        assert_eq!(z, pp([o, o, -l, l]));
        let z = psi_inverse(&ChartPair::new(fin(1.0, 0.0), fin(0.0, 0.0)));
        assert_eq!(z, pp([l, c(0.0, -1.0), l, l]));
    }

    #[test]
    fn gap_examples() {
        let g = hermitian_gap(&ChartPair::new(fin(0.0, 0.0), fin(0.0, 1.0))).unwrap();
        assert!((g - 2.0).abs() < 1e-14);
        let g = hermitian_gap(&ChartPair::new(fin(0.3, 0.7), fin(0.3, -0.7))).unwrap();
        assert!(g.abs() < 1e-14);
        let g = hermitian_gap(&ChartPair::new(fin(1.0, 0.0), fin(-1.0, 0.0))).unwrap();
        assert!((g - 8.0).abs() < 1e-14);
    }

    #[test]
    fn plane_examples() {
        let e = MinkVec::<f64>::basis;
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let p12 = plane_to_proj(&e(0), &e(1)).unwrap();
        assert_eq!(p12, pp([l, c(0.0, -1.0), o, o]));
        let p21 = plane_to_proj(&e(1), &e(0)).unwrap();
        assert_eq!(p21, pp([l, c(0.0, 1.0), o, o]));
        assert_ne!(p12, p21);
        let t = std::f64::consts::FRAC_PI_3;
        let u = e(0).scale(t.cos()) + e(1).scale(t.sin());
        let v = e(1).scale(t.cos()) - e(0).scale(t.sin());
        assert_eq!(plane_to_proj(&u, &v).unwrap(), p12);
        assert_eq!(quadric_membership(&p12), Membership::InQPlus);
        assert!(matches!(plane_to_proj(&e(0), &e(0)), Err(QuadricError::NotOrthonormal(_))));
    }

    #[test]
    fn null_pair_examples() {
        assert_eq!(
            null_pair(&ChartPair::new(fin(0.0, 0.0), fin(0.0, 0.0))),
            Err(QuadricError::DegeneratePair)
        );
        let (y, ys) = null_pair(&ChartPair::new(fin(0.0, 0.0), ExtComplex::Infinity)).unwrap();
        assert_eq!(y, MinkVec::new(0.0, 0.0, 1.0, 1.0));
        assert_eq!(ys, MinkVec::new(0.0, 0.0, -1.0, 1.0));
        let (y, ys) = null_pair(&ChartPair::new(fin(1.0, 0.0), fin(-1.0, 0.0))).unwrap();
        assert_eq!(y, MinkVec::new(1.0, 0.0, 0.0, 1.0));
        assert_eq!(ys, MinkVec::new(-1.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn null_pair_is_orthogonal_and_oriented() {
        for &(a, b) in &[(c(0.3, -0.2), c(1.5, 0.4)), (c(-2.0, 1.0), c(0.1, 0.9)), (c(0.0, 0.0), c(0.0, 2.0))] {
            let cp = ChartPair::finite(a, b);
            let (u, v) = plane_basis(&psi_inverse(&cp)).unwrap();
            let (y, ys) = null_pair(&cp).unwrap();
            for n in [&y, &ys] {
                assert!(n.inner(n).abs() < 1e-12);
                assert!(n.inner(&u).abs() < 1e-9);
                assert!(n.inner(&v).abs() < 1e-9);
            }
            // With z = u - iv the frame (u, v, y*, y) is positively oriented.
            let cols: [[f64; 4]; 4] =
                std::array::from_fn(|r| [u.0[r], v.0[r], ys.0[r], y.0[r]]);
            assert!(det4(&cols) > 0.0);
        }
    }

    #[test]
    fn metric_examples() {
        let cp = ChartPair::new(fin(0.0, 0.0), fin(0.0, 1.0));
        assert_eq!(metric_g(&cp, c(1.0, 0.0), c(0.0, 0.0)).unwrap(), 0.0);
        assert!((metric_g(&cp, c(1.0, 0.0), c(1.0, 0.0)).unwrap() + 4.0).abs() < 1e-14);
        // On the diagonal w1 = w2 = w the form restricts to -|dw|²/(Im w)².
        let w = c(0.4, 0.5);
        let dw = c(0.3, -0.2);
        let g = metric_g(&ChartPair::finite(w, w), dw, dw).unwrap();
        assert!((g + dw.norm_sqr() / (w.im * w.im)).abs() < 1e-12);
        assert_eq!(
            metric_g(&ChartPair::finite(w, w.conj()), dw, dw),
            Err(QuadricError::DegeneratePair)
        );
    }

    #[test]
    fn reciprocal_chart_agrees() {
        let (w1, w2) = (c(0.4, 0.3), c(2.0, -1.5));
        let (d1, d2) = (c(0.2, 0.1), c(-0.3, 0.5));
        let direct = metric_g(&ChartPair::finite(w1, w2), d1, d2).unwrap();
        let z2 = w2.inv();
        let dz2 = -d2 * z2 * z2;
        let mixed = metric_g_local(LocalCoord::Direct(w1), LocalCoord::Reciprocal(z2), d1, dz2).unwrap();
        assert!((direct - mixed).abs() < 1e-12);
        let z1 = w1.inv();
        let dz1 = -d1 * z1 * z1;
        let both = metric_g_local(LocalCoord::Reciprocal(z1), LocalCoord::Reciprocal(z2), dz1, dz2).unwrap();
        assert!((direct - both).abs() < 1e-12);
    }
}
