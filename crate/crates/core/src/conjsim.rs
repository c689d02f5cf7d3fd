//! Conjugate similarity `S ~ ±T̄ S T⁻¹` on `SL(2, C)`: the realified operator
//! `R_S`, conjugate eigenvalues, canonical forms with an explicit conjugating
//! matrix, and the fixed set `E_S = {w : M_S(w) = w̄}`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::extended::ExtComplex;
use crate::mobius::MobiusMat;

pub type RealMat4 = Matrix4<f64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Matrix of `v ↦ conj(S v)` acting on `(Re v₁, Re v₂, Im v₁, Im v₂)`:
/// `((A, −B), (−B, −A))` with `A = Re S`, `B = Im S`.
pub fn rmat(s: &MobiusMat) -> RealMat4 {
    let m = s.rows();
    let mut r = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let (a, b) = (m[i][j].re, m[i][j].im);
            r[(i, j)] = a;
            r[(i, j + 2)] = -b;
            r[(i + 2, j)] = -b;
            r[(i + 2, j + 2)] = -a;
        }
    }
    r
}

/// Multiplication by `i` in the realification basis.
pub fn jmat() -> RealMat4 {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = -1.0;
    j[(1, 3)] = -1.0;
    j[(2, 0)] = 1.0;
    j[(3, 1)] = 1.0;
    j
}

fn to_complex2(x: &Vector4<f64>) -> [Complex64; 2] {
    [c(x[0], x[2]), c(x[1], x[3])]
}

/// `s = tr(S̄ S)`, which is real and at least −2. The characteristic
/// polynomial of `R_S` is `x⁴ − s x² + 1`.
pub fn conj_trace(s: &MobiusMat) -> f64 {
    s.conj().compose(s).trace().re
}

/// Real null space of `m` with singular values below `tol · max(1, |m|)`.
fn null_space(m: &RealMat4, tol: f64) -> Vec<Vector4<f64>> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max().max(1.0);
    (0..4)
        .filter(|&k| svd.singular_values[k] <= tol * smax)
        .map(|k| v_t.row(k).transpose())
        .collect()
}

/// Right singular vector belonging to the smallest singular value.
fn smallest_singular_vector(m: &RealMat4) -> Vector4<f64> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let k = svd.singular_values.imin();
    v_t.row(k).transpose()
}

/// A positive conjugate eigenvalue `r` (`S v = r v̄`) and its real eigenspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjEigen {
    pub r: f64,
    pub dimension: usize,
    pub basis: Vec<[Complex64; 2]>,
}

/// Relative band around `s = 2` inside which the eigenspace dimension decides the class.
const BOUNDARY_TOL: f64 = 1e-10;
/// Singular-value threshold for eigenspace dimensions.
const KERNEL_TOL: f64 = 1e-8;

fn on_boundary(s: &MobiusMat, trace: f64) -> bool {
    let scale = s.max_abs().powi(2).max(1.0);
    (trace - 2.0).abs() <= BOUNDARY_TOL * scale
}

/// Positive real eigenvalues of `R_S` with their eigenspaces, largest first.
pub fn conj_eigen(s: &MobiusMat, tol: f64) -> Vec<ConjEigen> {
    let r = rmat(s);
    let trace = conj_trace(s);
    let eig = |val: f64| {
        let m = r - RealMat4::identity() * val;
        let ker = null_space(&m, tol);
        let ker = if ker.is_empty() { vec![smallest_singular_vector(&m)] } else { ker };
        ConjEigen { r: val, dimension: ker.len(), basis: ker.iter().map(to_complex2).collect() }
    };
    if on_boundary(s, trace) {
        vec![eig(1.0)]
    } else if trace > 2.0 {
        let u = 0.5 * (trace / 2.0).acosh();
        vec![eig(u.exp()), eig((-u).exp())]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConjTag {
    Diag { u: f64 },
    Rotation { alpha: f64 },
    Unipotent,
}

impl ConjTag {
    pub fn name(&self) -> &'static str {
        match self {
            ConjTag::Diag { .. } => "DIAG",
            ConjTag::Rotation { .. } => "ROTATION",
            ConjTag::Unipotent => "UNIPOTENT",
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match *self {
            ConjTag::Diag { u } => Some(u),
            ConjTag::Rotation { alpha } => Some(alpha),
            ConjTag::Unipotent => None,
        }
    }

    /// `diag(e^u, e^{−u})`, the rotation by `α`, or `[[1, 1], [0, 1]]`.
    pub fn canonical(&self) -> MobiusMat {
        match *self {
            ConjTag::Diag { u } => MobiusMat::diag(u),
            ConjTag::Rotation { alpha } => MobiusMat::rotation(alpha),
            ConjTag::Unipotent => MobiusMat::unipotent(),
        }
    }
}

/// Canonical form of `S` with a witness `T ∈ SL(2, C)` such that
/// `S = sign · T̄ C T⁻¹`, `C` the canonical matrix of the tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjClass {
    pub tag: ConjTag,
    pub witness_t: Option<MobiusMat>,
    pub sign: i8,
    pub diagnostic: Option<String>,
}

impl ConjClass {
    /// Largest entrywise deviation of `sign · T̄ C T⁻¹` from `s`.
    pub fn witness_residual(&self, s: &MobiusMat) -> Option<f64> {
        let t = self.witness_t?;
        let mut m = self.tag.canonical().conj_action(&t);
        if self.sign < 0 {
            m = m.neg();
        }
        Some(
            [m.a - s.a, m.b - s.b, m.c - s.c, m.d - s.d]
                .iter()
                .fold(0.0f64, |acc, z| acc.max(z.norm())),
        )
    }
}

/// Normalizes `T₀` to determinant one, multiplying by `i` when `det T₀ < 0`
/// (which flips the sign in `S = ±T̄ C T⁻¹`).
fn normalize_witness(v1: [Complex64; 2], v2: [Complex64; 2]) -> Option<(MobiusMat, i8)> {
    let det = v1[0] * v2[1] - v2[0] * v1[1];
    if det.norm() < 1e-300 {
        return None;
    }
    let (phase, sign, d) = if det.re >= 0.0 { (c(1.0, 0.0), 1, det.re) } else { (c(0.0, 1.0), -1, -det.re) };
    let k = phase / d.sqrt();
    let t = MobiusMat { a: v1[0] * k, b: v2[0] * k, c: v1[1] * k, d: v2[1] * k };
    Some((t, sign))
}

pub fn conj_canonical(s: &MobiusMat) -> ConjClass {
    let r = rmat(s);
    let id = RealMat4::identity();
    let trace = conj_trace(s);
    let mut diagnostic = None;
    let det_drift = (s.det() - c(1.0, 0.0)).norm();
    if det_drift > 1e-8 {
        diagnostic = Some(format!("det S deviates from 1 by {det_drift:e}"));
    }

    let (tag, witness) = if on_boundary(s, trace) {
        let ker = null_space(&(r - id), KERNEL_TOL);
        if ker.len() >= 2 {
            let w = normalize_witness(to_complex2(&ker[0]), to_complex2(&ker[1]));
            (ConjTag::Diag { u: 0.0 }, w)
        } else {
            let m = r - id;
            let u1 = if ker.is_empty() { smallest_singular_vector(&m) } else { ker[0] };
            let u2 = m
                .svd(true, true)
                .solve(&u1, 1e-10)
                .unwrap_or_else(|_| Vector4::zeros());
            (ConjTag::Unipotent, normalize_witness(to_complex2(&u1), to_complex2(&u2)))
        }
    } else if trace > 2.0 {
        let u = 0.5 * (trace / 2.0).acosh();
        let x1 = smallest_singular_vector(&(r - id * u.exp()));
        let x2 = smallest_singular_vector(&(r - id * (-u).exp()));
        (ConjTag::Diag { u }, normalize_witness(to_complex2(&x1), to_complex2(&x2)))
    } else {
        if trace < -2.0 - BOUNDARY_TOL * s.max_abs().powi(2).max(1.0) {
            diagnostic = Some(format!("tr(conj(S) S) = {trace} is below -2"));
        }
        let alpha = 0.5 * (trace / 2.0).clamp(-1.0, 1.0).acos();
        let lambda = Complex64::from_polar(1.0, alpha);
        let rc: Matrix4<Complex64> = r.map(|x| c(x, 0.0)) - Matrix4::<Complex64>::identity() * lambda;
        let svd = rc.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let k = svd.singular_values.imin();
        let z: Vector4<Complex64> = v_t.row(k).transpose().map(|x| x.conj());
        let re = z.map(|x| x.re);
        let im = z.map(|x| x.im);
        (ConjTag::Rotation { alpha }, normalize_witness(to_complex2(&re), to_complex2(&im)))
    };

    let mut class = ConjClass { tag, witness_t: None, sign: 1, diagnostic };
    if let Some((t, sign)) = witness {
        class.witness_t = Some(t);
        class.sign = sign;
        let res = class.witness_residual(s).unwrap_or(f64::INFINITY);
        if !(res <= 1e-7 * s.max_abs().max(1.0)) {
            class.witness_t = None;
            class.sign = 1;
            let note = format!("witness rejected (residual {res:e})");
            class.diagnostic = Some(match class.diagnostic {
                Some(d) => format!("{d}; {note}"),
                None => note,
            });
        }
    }
    class
}

/// True when the canonical tags agree and their parameters differ by at most `1e−8`.
pub fn conj_similar(s1: &MobiusMat, s2: &MobiusMat) -> bool {
    let (a, b) = (conj_canonical(s1).tag, conj_canonical(s2).tag);
    if a.name() != b.name() {
        return false;
    }
    match (a.parameter(), b.parameter()) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-8,
        _ => true,
    }
}

/// A circle or a line (through `∞`) in the extended plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Circline {
    Circle { center: Complex64, radius: f64 },
    /// `point` is the foot of the perpendicular from the origin, `direction` a unit vector.
    Line { point: Complex64, direction: Complex64 },
}

impl Circline {
    fn line(p: Complex64, q: Complex64) -> Self {
        let mut d = (q - p) / (q - p).norm();
        if d.re < 0.0 || (d.re == 0.0 && d.im < 0.0) {
            d = -d;
        }
        let foot = p - d * (p.re * d.re + p.im * d.im);
        Circline::Line { point: foot, direction: d }
    }

    /// The circline through three distinct points of the sphere.
    pub fn through(p: [ExtComplex; 3]) -> Self {
        let finite: Vec<Complex64> = p.iter().filter_map(|w| w.as_finite()).collect();
        if finite.len() < 3 {
            return Self::line(finite[0], finite[1]);
        }
        let (a, b, cc) = (finite[0], finite[1], finite[2]);
        let cross = ((b - a).conj() * (cc - a)).im;
        let scale = (b - a).norm() * (cc - a).norm();
        if cross.abs() <= 1e-12 * scale {
            return Self::line(a, b);
        }
        let (a2, b2, c2) = (a.norm_sqr(), b.norm_sqr(), cc.norm_sqr());
        let d = 2.0 * (a.re * (b.im - cc.im) + b.re * (cc.im - a.im) + cc.re * (a.im - b.im));
        let ux = (a2 * (b.im - cc.im) + b2 * (cc.im - a.im) + c2 * (a.im - b.im)) / d;
        let uy = (a2 * (cc.re - b.re) + b2 * (a.re - cc.re) + c2 * (b.re - a.re)) / d;
        let center = c(ux, uy);
        Circline::Circle { center, radius: (a - center).norm() }
    }

    /// Distance-based membership test with absolute tolerance `tol`.
    pub fn contains(&self, w: &ExtComplex, tol: f64) -> bool {
        match (*self, *w) {
            (Circline::Line { .. }, ExtComplex::Infinity) => true,
            (Circline::Circle { .. }, ExtComplex::Infinity) => false,
            (Circline::Circle { center, radius }, ExtComplex::Finite(z)) => {
                ((z - center).norm() - radius).abs() <= tol * (1.0 + radius)
            }
            (Circline::Line { point, direction }, ExtComplex::Finite(z)) => {
                ((z - point).conj() * direction).im.abs() <= tol * (1.0 + point.norm())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EFixSet {
    Finite { points: Vec<ExtComplex> },
    Circline { circline: Circline },
}

impl EFixSet {
    /// Number of points, or `None` for a circline.
    pub fn cardinality(&self) -> Option<usize> {
        match self {
            EFixSet::Finite { points } => Some(points.len()),
            EFixSet::Circline { .. } => None,
        }
    }
}

fn ratio(v: &[Complex64; 2]) -> ExtComplex {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    if v[1].norm() <= 1e-12 * n {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite(v[0] / v[1])
    }
}

/// The set `{v₁/v₂ : v a conjugate eigenvector of S}`.
pub fn e_set(s: &MobiusMat) -> EFixSet {
    let eigen = conj_eigen(s, KERNEL_TOL);
    if let Some(e) = eigen.iter().find(|e| e.dimension >= 2) {
        let (a, b) = (e.basis[0], e.basis[1]);
        let sum = [a[0] + b[0], a[1] + b[1]];
        let circline = Circline::through([ratio(&a), ratio(&b), ratio(&sum)]);
        return EFixSet::Circline { circline };
    }
    EFixSet::Finite { points: eigen.iter().map(|e| ratio(&e.basis[0])).collect() }
}
