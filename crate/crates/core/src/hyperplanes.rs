//! Hyperplanes `H_A` of the quadric: Möbius graphs, orbit classification,
//! the invariant `I`, symmetry algebras and the canonical hyperplane metrics.

use std::f64::consts::{PI, TAU};

use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minkowski::{classify_vector, CVec, VectorType};
use crate::mobius::MobiusMat;
use crate::quadrature::integrate;
use crate::quadric::{quadric_membership_tol, Membership, ProjPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperplaneError {
    #[error("[A] lies on the quadric; H_A is not a Möbius graph")]
    AOnQuadric,
    #[error("invariant I is indeterminate (0/0)")]
    Indeterminate,
    #[error("point {0} is outside the domain of the hyperplane chart")]
    OutOfDomain(String),
    #[error("invalid hyperplane parameter: {0}")]
    InvalidParameter(String),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Coefficient matrix of the graph `w₂ = M_S(w₁)` of `H_A`, normalized to `SL(2, C)`.
/// Its determinant before normalization is `−⟨A, A⟩`.
pub fn mobius_from_a(a: &ProjPoint) -> Result<MobiusMat, HyperplaneError> {
    if quadric_membership_tol(a, 1e-12) != Membership::NotInQ {
        return Err(HyperplaneError::AOnQuadric);
    }
    let [a1, a2, a3, a4] = a.rep().0;
    let i = c(0.0, 1.0);
    MobiusMat::new(a1 - i * a2, a3 - a4, a3 + a4, -(a1 + i * a2)).map_err(|_| HyperplaneError::AOnQuadric)
}

/// The point `[(a − d, i(a + d), b + c, c − b)]`, inverse of [`mobius_from_a`].
pub fn a_from_mobius(s: &MobiusMat) -> ProjPoint {
    let i = c(0.0, 1.0);
    ProjPoint::new(CVec([s.a - s.d, i * (s.a + s.d), s.b + s.c, s.c - s.b]))
        .expect("an invertible matrix gives a nonzero vector")
}

/// Value of the invariant `I`, which may be infinite or undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IValue {
    Finite(f64),
    Infinite,
    Indeterminate,
}

impl IValue {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            IValue::Finite(x) => Some(x),
            IValue::Infinite => Some(f64::INFINITY),
            IValue::Indeterminate => None,
        }
    }
}

/// `I([A]) = |⟨A, A⟩| / ⟨A, Ā⟩`, with `+∞` for a vanishing denominator.
pub fn invariant_i(a: &ProjPoint) -> Result<f64, HyperplaneError> {
    match invariant_value(a, 1e-12) {
        IValue::Finite(x) => Ok(x),
        IValue::Infinite => Ok(f64::INFINITY),
        IValue::Indeterminate => Err(HyperplaneError::Indeterminate),
    }
}

fn invariant_value(a: &ProjPoint, tol: f64) -> IValue {
    let z = a.rep();
    let n2 = z.norm() * z.norm();
    let num = z.bilinear(z).norm();
    let den = z.hermitian(z).re;
    let num_zero = num <= tol * n2;
    let den_zero = den.abs() <= tol * n2;
    match (num_zero, den_zero) {
        (true, true) => IValue::Indeterminate,
        (false, true) => IValue::Infinite,
        (true, false) => IValue::Finite(0.0),
        (false, false) => IValue::Finite(num / den),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HyperplaneTag {
    InQPlus,
    InQNullboundary,
    TotallyRealSpace,
    TotallyRealTime,
    Hyperbolic { u: f64 },
    Elliptic { alpha: f64 },
    Parabolic,
}

impl HyperplaneTag {
    pub fn name(&self) -> &'static str {
        match self {
            HyperplaneTag::InQPlus => "IN_Q_PLUS",
            HyperplaneTag::InQNullboundary => "IN_Q_NULLBOUNDARY",
            HyperplaneTag::TotallyRealSpace => "TOTALLY_REAL_SPACE",
            HyperplaneTag::TotallyRealTime => "TOTALLY_REAL_TIME",
            HyperplaneTag::Hyperbolic { .. } => "HYPERBOLIC",
            HyperplaneTag::Elliptic { .. } => "ELLIPTIC",
            HyperplaneTag::Parabolic => "PARABOLIC",
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match *self {
            HyperplaneTag::Hyperbolic { u } => Some(u),
            HyperplaneTag::Elliptic { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn same_kind(&self, other: &Self) -> bool {
        self.name() == other.name()
    }

    /// Canonical representative of the orbit.
    pub fn canonical_rep(&self) -> ProjPoint {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let z = match *self {
            HyperplaneTag::InQPlus => [l, i, o, o],
            HyperplaneTag::InQNullboundary => [o, o, l, l],
            HyperplaneTag::TotallyRealSpace => [l, o, o, o],
            HyperplaneTag::TotallyRealTime => [o, o, o, l],
            HyperplaneTag::Hyperbolic { u } => [c(u.tanh(), 0.0), i, o, o],
            HyperplaneTag::Elliptic { alpha } => [o, o, c(alpha.cos(), 0.0), c(0.0, alpha.sin())],
            HyperplaneTag::Parabolic => [l, o, i, i],
        };
        ProjPoint::from_components(z).expect("canonical representatives are nonzero")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneClass {
    pub tag: HyperplaneTag,
    pub canonical_rep: ProjPoint,
    pub invariant_i: IValue,
}

/// Orbit type of `[A]` under `SO⁺(3,1)` with the default tolerance `1e−9`.
pub fn classify_a(a: &ProjPoint) -> HyperplaneClass {
    classify_a_tol(a, 1e-9)
}

pub fn classify_a_tol(a: &ProjPoint, tol: f64) -> HyperplaneClass {
    let tag = classify_tag(a, tol);
    HyperplaneClass { tag, canonical_rep: tag.canonical_rep(), invariant_i: invariant_value(a, tol) }
}

fn classify_tag(a: &ProjPoint, tol: f64) -> HyperplaneTag {
    match quadric_membership_tol(a, tol) {
        Membership::InQPlus => return HyperplaneTag::InQPlus,
        Membership::InQ => return HyperplaneTag::InQNullboundary,
        Membership::NotInQ => {}
    }
    let z = a.rep();
    let (x, y) = (z.re(), z.im());
    let (xx, yy, xy) = (x.inner(&x), y.inner(&y), x.inner(&y));
    // Phase rotation e^{iθ} making the real and imaginary parts orthogonal.
    let theta = if xy == 0.0 && xx == yy { 0.0 } else { 0.5 * (-2.0 * xy).atan2(xx - yy) };
    let (s, co) = theta.sin_cos();
    let xr = x.scale(co) - y.scale(s);
    let yr = x.scale(s) + y.scale(co);
    let (nx, ny) = (xr.euclid_norm(), yr.euclid_norm());
    let mut minor = 0.0f64;
    for i in 0..4 {
        for j in i + 1..4 {
            minor = minor.max((xr.0[i] * yr.0[j] - xr.0[j] * yr.0[i]).abs());
        }
    }
    if minor <= tol * nx * ny || nx.min(ny) <= tol * nx.max(ny) {
        let v = if nx >= ny { xr } else { yr };
        return match classify_vector(&v, tol) {
            VectorType::Spacelike => HyperplaneTag::TotallyRealSpace,
            VectorType::Timelike => HyperplaneTag::TotallyRealTime,
            VectorType::Null | VectorType::Zero => HyperplaneTag::InQNullboundary,
        };
    }
    let (px, py) = (xr.inner(&xr), yr.inner(&yr));
    let wedge = px * py;
    if wedge.abs() <= tol * (nx * ny).powi(2) {
        HyperplaneTag::Parabolic
    } else if wedge > 0.0 {
        let (lo, hi) = if px.abs() <= py.abs() { (px.abs(), py.abs()) } else { (py.abs(), px.abs()) };
        HyperplaneTag::Hyperbolic { u: (lo / hi).sqrt().atanh() }
    } else {
        let (space, time) = if px > 0.0 { (px, py) } else { (py, px) };
        HyperplaneTag::Elliptic { alpha: (-time / space).sqrt().atan() }
    }
}

/// Real Lie algebra `{X ∈ sl(2, C) : X̄S − SX = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryAlgebra {
    pub dimension: usize,
    pub basis: Vec<[[Complex64; 2]; 2]>,
}

fn sl2_from_params(p: &[f64]) -> [[Complex64; 2]; 2] {
    let x1 = c(p[0], p[1]);
    [[x1, c(p[2], p[3])], [c(p[4], p[5]), -x1]]
}

/// Null space of the real-linear map `X ↦ X̄S − SX` on trace-free matrices,
/// returned as an orthonormal basis of `R⁶` coordinates.
pub fn symmetry_algebra(s: &MobiusMat) -> SymmetryAlgebra {
    let sm = s.rows();
    let mut m = SMatrix::<f64, 8, 6>::zeros();
    for k in 0..6 {
        let mut p = [0.0; 6];
        p[k] = 1.0;
        let x = sl2_from_params(&p);
        for r in 0..2 {
            for col in 0..2 {
                let mut v = c(0.0, 0.0);
                for l in 0..2 {
                    v += x[r][l].conj() * sm[l][col] - sm[r][l] * x[l][col];
                }
                let row = 2 * (2 * r + col);
                m[(row, k)] = v.re;
                m[(row + 1, k)] = v.im;
            }
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max().max(1.0);
    let mut basis = Vec::new();
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv <= 1e-9 * smax {
            let row: Vec<f64> = (0..6).map(|j| v_t[(k, j)]).collect();
            basis.push(sl2_from_params(&row));
        }
    }
    SymmetryAlgebra { dimension: basis.len(), basis }
}

/// The five representative hyperplanes, each with its natural coordinates:
/// `w` for I and II, `t + iθ` for III and IV, `x + iy` for V.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "UPPERCASE")]
pub enum HyperplaneCase {
    I,
    II,
    III { u: f64 },
    IV { alpha: f64 },
    V,
}

impl HyperplaneCase {
    fn validate(&self) -> Result<(), HyperplaneError> {
        match *self {
            HyperplaneCase::III { u } if !(u > 0.0 && u.is_finite()) => {
                Err(HyperplaneError::InvalidParameter(format!("u = {u} must be positive")))
            }
            HyperplaneCase::IV { alpha } if !(alpha > 0.0 && alpha < PI / 2.0) => Err(
                HyperplaneError::InvalidParameter(format!("alpha = {alpha} must lie in (0, pi/2)")),
            ),
            _ => Ok(()),
        }
    }

    /// The matrix `S` whose graph is the hyperplane.
    pub fn matrix(&self) -> MobiusMat {
        match *self {
            HyperplaneCase::I => MobiusMat::identity(),
            HyperplaneCase::II => MobiusMat::rotation(PI / 2.0),
            HyperplaneCase::III { u } => MobiusMat::diag(u),
            HyperplaneCase::IV { alpha } => MobiusMat::elliptic(alpha),
            HyperplaneCase::V => MobiusMat::unipotent(),
        }
    }
}

/// Signed conformal factor `λ` with `g = λ |d(coordinate)|²`.
pub fn hyperplane_metric(case: HyperplaneCase, point: Complex64) -> Result<f64, HyperplaneError> {
    case.validate()?;
    if !(point.re.is_finite() && point.im.is_finite()) {
        return Err(HyperplaneError::OutOfDomain(point.to_string()));
    }
    Ok(match case {
        HyperplaneCase::I => {
            if point.im == 0.0 {
                return Err(HyperplaneError::OutOfDomain(point.to_string()));
            }
            -1.0 / (point.im * point.im)
        }
        HyperplaneCase::II => 4.0 / (1.0 + point.norm_sqr()).powi(2),
        HyperplaneCase::III { u } => {
            let theta = point.im;
            let d = (-u).exp() * Complex64::from_polar(1.0, -theta) - u.exp() * Complex64::from_polar(1.0, theta);
            (4.0 / (d * d)).re
        }
        HyperplaneCase::IV { alpha } => {
            let t = point.re;
            let d = (-t).exp() * Complex64::from_polar(1.0, -alpha) - t.exp() * Complex64::from_polar(1.0, alpha);
            -(4.0 / (d * d)).re
        }
        HyperplaneCase::V => {
            let d = c(1.0, 2.0 * point.im);
            (4.0 / (d * d)).re
        }
    })
}

/// Outcome of an exhaustion of a hyperplane by growing subdomains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AreaResult {
    /// `value` integrates the signed factor `λ`, `absolute` integrates `|λ|`.
    Finite { value: f64, absolute: f64, levels: usize },
    Diverges { areas: Vec<f64> },
    Inconclusive { areas: Vec<f64> },
}

/// Exhaustion schedule: level `k` has size `first · 2^{k−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exhaustion {
    pub first: f64,
    pub max_levels: usize,
    pub divergence_level: usize,
    pub tolerance: f64,
}

impl Default for Exhaustion {
    fn default() -> Self {
        Exhaustion { first: 2.0, max_levels: 24, divergence_level: 8, tolerance: 1e-4 }
    }
}

/// Signed and absolute area of the level-`s` subdomain. The factor depends on
/// one coordinate only, so the area is a one-dimensional integral times the
/// length of the other coordinate range.
fn level_area(case: HyperplaneCase, s: f64) -> (f64, f64) {
    let lam = |p: Complex64| hyperplane_metric(case, p).unwrap_or(0.0);
    let quad = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
        let pair = |x: f64| {
            let v = f(x);
            [v, v.abs()]
        };
        integrate(pair, a, b, 1e-11, 1e-12, 4000).value
    };
    let ([signed, abs], length) = match case {
        HyperplaneCase::I => {
            let lo = 1.0 / s.max(1.0 + 1e-9);
            let v = quad(&|y| lam(c(0.0, y)), lo, s.max(lo));
            ([2.0 * v[0], 2.0 * v[1]], 2.0 * s)
        }
        HyperplaneCase::II => (quad(&|r| r * lam(c(r, 0.0)), 0.0, s), TAU),
        HyperplaneCase::III { .. } => (quad(&|th| lam(c(0.0, th)), 0.0, TAU), 2.0 * s),
        HyperplaneCase::IV { .. } => (quad(&|t| lam(c(t, 0.0)), -s, s), TAU),
        HyperplaneCase::V => (quad(&|y| lam(c(0.0, y)), -s, s), 2.0 * s),
    };
    (signed * length, abs * length)
}

/// Total area of a representative hyperplane, decided by exhaustion:
/// `Diverges` when the absolute area at level `k = divergence_level` is at
/// least `k` times the first one, `Finite` when successive levels agree to
/// `tolerance`.
pub fn hyperplane_total_area(case: HyperplaneCase, schedule: &Exhaustion) -> Result<AreaResult, HyperplaneError> {
    case.validate()?;
    let mut signed = Vec::new();
    let mut areas = Vec::new();
    for k in 1..=schedule.max_levels {
        let s = schedule.first * 2f64.powi(k as i32 - 1);
        let (sv, av) = level_area(case, s);
        signed.push(sv);
        areas.push(av);
        if k == schedule.divergence_level && av >= k as f64 * areas[0] {
            return Ok(AreaResult::Diverges { areas });
        }
        if k >= 2 {
            let da = (av - areas[k - 2]).abs();
            let ds = (sv - signed[k - 2]).abs();
            if da < schedule.tolerance && ds < schedule.tolerance {
                return Ok(AreaResult::Finite { value: sv, absolute: av, levels: k });
            }
        }
    }
    Ok(AreaResult::Inconclusive { areas })
}
