//! Weierstrass data `(ψ₁, ψ₂, dh = f dz)` of space-like stationary surfaces in
//! `R^{3,1}`: the holomorphic null form `φ`, the induced metric, the Gauss
//! curvature, period checks, meshes, the dual minimal immersion in `R⁴`, the
//! three degenerate families and a catalog of examples.

mod catalog;
mod curvature;
mod expr;
mod mesh;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extended::ExtComplex;
use crate::minkowski::CVec;
use crate::quadrature::circle_trapezoid;
use crate::quadric::{metric_g_local, LocalCoord};

pub use catalog::{catalog, catalog_entries, residues, CatalogEntry, Expected};
pub use curvature::{total_curvature, TotalCurvature};
pub use expr::{Expr, ExprError, Series};
pub use mesh::{
    dual_immersion, integrate_surface, DualChecks, DualSurface, GridSpec, SurfaceMesh,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeierstrassError {
    #[error("pole of the W-data not cancelled by a zero of dh at z = {0}")]
    PoleHit(Complex64),
    #[error("degenerate metric (ψ₂ = conj ψ₁ or dh = 0) at z = {0}")]
    DegenerateMetric(Complex64),
    #[error("real period {period:e} exceeds tolerance: {context}")]
    PeriodObstruction { period: f64, context: String },
    #[error("family precondition failed: {0}")]
    FamilyPreconditionFailed(String),
    #[error("unknown example '{0}'")]
    UnknownExample(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point z = {0} is outside the domain")]
    OutOfDomain(Complex64),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Base region of a planar parameter domain. `outer = None` means no outer
/// bound; an annulus with `inner = 0` contains its center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Rectangle { re: [f64; 2], im: [f64; 2] },
    Annulus { center: Complex64, inner: f64, outer: Option<f64> },
}

impl Region {
    pub fn plane() -> Self {
        Region::Annulus { center: c(0.0, 0.0), inner: 0.0, outer: None }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Rectangle { re, im } => {
                let tol = 1e-12 * (1.0 + re[0].abs().max(re[1].abs()).max(im[0].abs()).max(im[1].abs()));
                z.re >= re[0] - tol && z.re <= re[1] + tol && z.im >= im[0] - tol && z.im <= im[1] + tol
            }
            Region::Annulus { center, inner, outer } => {
                let r = (z - center).norm();
                r >= inner * (1.0 - 1e-12) && outer.is_none_or(|o| r <= o * (1.0 + 1e-12))
            }
        }
    }
}

/// A closed test loop `|z − center| = radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Loop {
    pub center: Complex64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub region: Region,
    #[serde(default)]
    pub punctures: Vec<Complex64>,
    #[serde(default)]
    pub loops: Vec<Loop>,
}

impl Domain {
    pub fn new(region: Region, punctures: Vec<Complex64>, loops: Vec<Loop>) -> Result<Self, WeierstrassError> {
        let d = Domain { region, punctures, loops };
        d.validate()?;
        Ok(d)
    }

    pub fn plane() -> Self {
        Domain { region: Region::plane(), punctures: vec![], loops: vec![] }
    }

    pub fn rectangle(re: [f64; 2], im: [f64; 2]) -> Self {
        Domain { region: Region::Rectangle { re, im }, punctures: vec![], loops: vec![] }
    }

    /// The plane minus `punctures`, with a test loop around each puncture of
    /// radius a quarter of its distance to the nearest other puncture.
    pub fn punctured_plane(punctures: Vec<Complex64>) -> Self {
        let loops = punctures
            .iter()
            .map(|&p| {
                let sep = punctures
                    .iter()
                    .filter(|&&q| q != p)
                    .map(|&q| (q - p).norm())
                    .fold(f64::INFINITY, f64::min);
                let radius = if sep.is_finite() { 0.25 * sep } else { 1.0 };
                Loop { center: p, radius }
            })
            .collect();
        Domain { region: Region::plane(), punctures, loops }
    }

    pub fn validate(&self) -> Result<(), WeierstrassError> {
        let bad = |m: String| Err(WeierstrassError::InvalidDomain(m));
        match self.region {
            Region::Rectangle { re, im } if !(re[0] < re[1] && im[0] < im[1]) => {
                return bad("rectangle bounds must be increasing".into())
            }
            Region::Annulus { inner, outer, .. } if inner < 0.0 || outer.is_some_and(|o| o <= inner) => {
                return bad("annulus radii must satisfy 0 <= inner < outer".into())
            }
            _ => {}
        }
        for p in &self.punctures {
            if !self.region.contains(*p) {
                return bad(format!("puncture {p} lies outside the region"));
            }
        }
        for l in &self.loops {
            if l.radius <= 0.0 {
                return bad("loop radius must be positive".into());
            }
            for p in &self.punctures {
                if ((p - l.center).norm() - l.radius).abs() < 1e-3 * l.radius {
                    return bad(format!("loop around {} passes too close to puncture {p}", l.center));
                }
            }
        }
        Ok(())
    }

    pub fn is_puncture(&self, z: Complex64) -> bool {
        self.punctures.iter().any(|p| (p - z).norm() <= 1e-14 * (1.0 + p.norm()))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.region.contains(z) && !self.is_puncture(z)
    }

    /// Distance from `z` to the nearest puncture.
    pub fn puncture_distance(&self, z: Complex64) -> f64 {
        self.punctures.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Finite box `(re range, im range)` used for sampling.
    pub fn sample_box(&self) -> ([f64; 2], [f64; 2]) {
        match self.region {
            Region::Rectangle { re, im } => (re, im),
            Region::Annulus { center, outer, .. } => {
                let spread = self.punctures.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
                let r = outer.unwrap_or((2.0 * spread + 2.0).max(4.0));
                ([center.re - r, center.re + r], [center.im - r, center.im + r])
            }
        }
    }

    /// Sample points of the domain, keeping a small distance from punctures.
    pub fn sample_points(&self, n: usize) -> Vec<Complex64> {
        let n = n.max(2);
        let mut pts = Vec::new();
        match self.region {
            Region::Rectangle { re, im } => {
                for i in 0..n {
                    for j in 0..n {
                        let x = re[0] + (re[1] - re[0]) * i as f64 / (n - 1) as f64;
                        let y = im[0] + (im[1] - im[0]) * j as f64 / (n - 1) as f64;
                        pts.push(c(x, y));
                    }
                }
            }
            Region::Annulus { center, inner, .. } => {
                let (re, _) = self.sample_box();
                let r_out = 0.5 * (re[1] - re[0]);
                let r_in = inner.max(1e-2 * r_out);
                let (l0, l1) = (r_in.ln(), r_out.ln());
                for i in 0..n {
                    let r = (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp();
                    for j in 0..n {
                        // Offset angles so that rays avoid the real axis.
                        let th = TAU * (j as f64 + 0.37) / n as f64;
                        pts.push(center + Complex64::from_polar(r, th));
                    }
                }
                if inner == 0.0 && !self.is_puncture(center) {
                    pts.push(center);
                }
            }
        }
        let (re, im) = self.sample_box();
        let keep = 1e-3 * (re[1] - re[0]).max(im[1] - im[0]);
        pts.retain(|&z| self.contains(z) && self.puncture_distance(z) > keep);
        pts
    }
}

/// Weierstrass data `(ψ₁, ψ₂, dh = f dz)` on a planar domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub psi1: Expr,
    pub psi2: Expr,
    pub f: Expr,
    pub domain: Domain,
}

/// Pointwise values of the W-data and their `z`-derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jet {
    pub psi1: Complex64,
    pub psi2: Complex64,
    pub f: Complex64,
    pub dpsi1: Complex64,
    pub dpsi2: Complex64,
}

/// W-data with the symbolic derivatives prepared once.
pub(crate) struct Prepared<'a> {
    pub w: &'a WData,
    dpsi1: Expr,
    dpsi2: Expr,
}

fn phi_from_values(p1: Complex64, p2: Complex64, f: Complex64) -> CVec {
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    CVec::new([(p1 + p2) * f, -i * (p1 - p2) * f, (one - p1 * p2) * f, (one + p1 * p2) * f])
}

/// Degenerate-locus guard for `|ψ₁ − conj ψ₂|`.
fn gap_is_degenerate(p1: Complex64, p2: Complex64) -> bool {
    (p1 - p2.conj()).norm() < 1e-10 * (1.0 + p1.norm()) * (1.0 + p2.norm())
}

impl<'a> Prepared<'a> {
    pub fn new(w: &'a WData) -> Self {
        Prepared { w, dpsi1: w.psi1.derivative(), dpsi2: w.psi2.derivative() }
    }

    fn check_domain(&self, z: Complex64) -> Result<(), WeierstrassError> {
        if self.w.domain.contains(z) {
            Ok(())
        } else {
            Err(WeierstrassError::OutOfDomain(z))
        }
    }

    /// Direct evaluation; `None` at singular points of any ingredient.
    pub fn jet(&self, z: Complex64) -> Option<Jet> {
        Some(Jet {
            psi1: self.w.psi1.eval(z).ok()?,
            psi2: self.w.psi2.eval(z).ok()?,
            f: self.w.f.eval(z).ok()?,
            dpsi1: self.dpsi1.eval(z).ok()?,
            dpsi2: self.dpsi2.eval(z).ok()?,
        })
    }

    /// `φ` from Laurent expansions of the data about `z`.
    fn phi_series(&self, z: Complex64) -> Result<CVec, WeierstrassError> {
        let s1 = self.w.psi1.series(z)?;
        let s2 = self.w.psi2.series(z)?;
        let sf = self.w.f.series(z)?;
        let one = Expr::one().series(z)?;
        let i = Expr::constant(c(0.0, 1.0)).series(z)?;
        let prod = s1.mul(&s2);
        let comps = [
            s1.add(&s2).mul(&sf),
            i.neg().mul(&s1.add(&s2.neg())).mul(&sf),
            one.add(&prod.neg()).mul(&sf),
            one.add(&prod).mul(&sf),
        ];
        let mut out = [c(0.0, 0.0); 4];
        for (k, s) in comps.iter().enumerate() {
            out[k] = s.value(z).map_err(|_| WeierstrassError::PoleHit(z))?;
        }
        Ok(CVec::new(out))
    }

    pub fn phi_unchecked(&self, z: Complex64) -> Result<CVec, WeierstrassError> {
        match (self.w.psi1.eval(z), self.w.psi2.eval(z), self.w.f.eval(z)) {
            (Ok(p1), Ok(p2), Ok(f)) => {
                let phi = phi_from_values(p1, p2, f);
                if phi.0.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                    return Ok(phi);
                }
                Err(WeierstrassError::PoleHit(z))
            }
            _ => self.phi_series(z),
        }
    }

    pub fn phi(&self, z: Complex64) -> Result<CVec, WeierstrassError> {
        self.check_domain(z)?;
        self.phi_unchecked(z)
    }

    pub fn ds2(&self, z: Complex64) -> Result<f64, WeierstrassError> {
        self.check_domain(z)?;
        match (self.w.psi1.eval(z), self.w.psi2.eval(z), self.w.f.eval(z)) {
            (Ok(p1), Ok(p2), Ok(f)) => Ok(2.0 * (p1 - p2.conj()).norm_sqr() * f.norm_sqr()),
            _ => Ok(self.phi_series(z)?.hermitian(&self.phi_series(z)?).re),
        }
    }

    /// `K·λ²`, which does not involve `f`; this is the total-curvature density.
    pub fn curvature_density(&self, z: Complex64) -> Result<f64, WeierstrassError> {
        match self.jet(z) {
            Some(j) => {
                if gap_is_degenerate(j.psi1, j.psi2) {
                    return Err(WeierstrassError::DegenerateMetric(z));
                }
                let g = j.psi1 - j.psi2.conj();
                let m = g.norm_sqr();
                let unit = g / g.norm();
                Ok(-4.0 * (j.dpsi1.conj() * j.dpsi2 * unit * unit).re / m)
            }
            None => Ok(-self.pullback_local(z)?),
        }
    }

    /// `G*g(∂_z, ∂_z)` from Laurent expansions in the chart where each `ψᵢ`
    /// is bounded; used where the data are singular.
    fn pullback_local(&self, z: Complex64) -> Result<f64, WeierstrassError> {
        let local = |e: &Expr| -> Result<(LocalCoord, Complex64), WeierstrassError> {
            let s = e.series(z)?;
            match s.order() {
                Some(k) if k < 0 => {
                    let r = Expr::div(Expr::one(), e.clone()).series(z)?;
                    Ok((LocalCoord::Reciprocal(r.coefficient(0)), r.coefficient(1)))
                }
                _ => Ok((LocalCoord::Direct(s.coefficient(0)), s.coefficient(1))),
            }
        };
        let (x1, d1) = local(&self.w.psi1)?;
        let (x2, d2) = local(&self.w.psi2)?;
        metric_g_local(x1, x2, d1, d2).map_err(|_| WeierstrassError::DegenerateMetric(z))
    }

    pub fn gauss_k(&self, z: Complex64) -> Result<f64, WeierstrassError> {
        self.check_domain(z)?;
        if let Some(j) = self.jet(z) {
            if gap_is_degenerate(j.psi1, j.psi2) || j.f == c(0.0, 0.0) {
                return Err(WeierstrassError::DegenerateMetric(z));
            }
            let d1 = j.dpsi1 / j.f;
            let d2 = j.dpsi2 / j.f;
            let g = j.psi1 - j.psi2.conj();
            let m = g.norm();
            let unit = g / m;
            return Ok(-2.0 * (d1.conj() * d2 * unit * unit).re / (m * m * m * m));
        }
        let lam2 = self.ds2(z)?;
        if !(lam2 > 0.0) {
            return Err(WeierstrassError::DegenerateMetric(z));
        }
        Ok(-self.pullback_local(z)? / lam2)
    }
}

/// The coefficient of `dz` in `φ = (ψ₁ + ψ₂, −i(ψ₁ − ψ₂), 1 − ψ₁ψ₂, 1 + ψ₁ψ₂) dh`.
/// Removable singularities are evaluated through Laurent expansions.
pub fn phi_from_wdata(w: &WData, z: Complex64) -> Result<CVec, WeierstrassError> {
    Prepared::new(w).phi(z)
}

/// `ds² = 2|ψ₁ − conj ψ₂|²|f|²`, i.e. `λ²` in `ds² = λ²|dz|²`.
pub fn metric_ds2(w: &WData, z: Complex64) -> Result<f64, WeierstrassError> {
    Prepared::new(w).ds2(z)
}

/// Gauss curvature `K = −Re[2 conj(ψ₁′) ψ₂′ (ψ₁ − conj ψ₂)²] / |ψ₁ − conj ψ₂|⁶`
/// with `ψᵢ′ = dψᵢ/dh`.
pub fn gauss_k(w: &WData, z: Complex64) -> Result<f64, WeierstrassError> {
    Prepared::new(w).gauss_k(z)
}

/// Pullback of the quadric metric by the Gauss map along `dz`, computed from
/// central differences with one Richardson step, against `−K ds²(dz, dz)`.
pub fn pullback_check(w: &WData, z: Complex64, dz: Complex64) -> Result<(f64, f64), WeierstrassError> {
    let p = Prepared::new(w);
    let k = p.gauss_k(z)?;
    let rhs = -k * p.ds2(z)? * dz.norm_sqr();
    let lim = |e: &Expr, at: Complex64| -> Result<ExtComplex, WeierstrassError> {
        match e.series(at)?.order() {
            Some(o) if o < 0 => Ok(ExtComplex::Infinity),
            _ => Ok(ExtComplex::Finite(e.eval_limit(at)?)),
        }
    };
    let coord = |e: &Expr| -> Result<(LocalCoord, bool), WeierstrassError> {
        Ok(match LocalCoord::of(&lim(e, z)?) {
            LocalCoord::Direct(v) => (LocalCoord::Direct(v), false),
            LocalCoord::Reciprocal(v) => (LocalCoord::Reciprocal(v), true),
        })
    };
    let (x1, r1) = coord(&w.psi1)?;
    let (x2, r2) = coord(&w.psi2)?;
    let h = 1e-3 * w.domain.puncture_distance(z).min(1.0) / dz.norm().max(f64::MIN_POSITIVE);
    let diff = |e: &Expr, recip: bool| -> Result<Complex64, WeierstrassError> {
        let value = |t: f64| -> Result<Complex64, WeierstrassError> {
            let v = e.eval_limit(z + dz * t)?;
            Ok(if recip { v.inv() } else { v })
        };
        let d = |s: f64| -> Result<Complex64, WeierstrassError> { Ok((value(s)? - value(-s)?) / (2.0 * s)) };
        Ok((d(0.5 * h)? * 4.0 - d(h)?) / 3.0)
    };
    let d1 = diff(&w.psi1, r1)?;
    let d2 = diff(&w.psi2, r2)?;
    let lhs = metric_g_local(x1, x2, d1, d2).map_err(|_| WeierstrassError::DegenerateMetric(z))?;
    Ok((lhs, rhs))
}

/// `φ* = (φ₁, φ₂, φ₃, iφ₄)`, the null form of the dual minimal immersion in `R⁴`.
pub fn dual_phi(w: &WData, z: Complex64) -> Result<CVec, WeierstrassError> {
    let mut phi = phi_from_wdata(w, z)?;
    phi.0[3] *= c(0.0, 1.0);
    Ok(phi)
}

/// Gauss curvature of the dual immersion: with `λ*² = 2|f|²(1 + |ψ₁|²)(1 + |ψ₂|²)`,
/// `K* = −2[|ψ₁_z|²/(1 + |ψ₁|²)² + |ψ₂_z|²/(1 + |ψ₂|²)²] / λ*²`.
pub fn dual_gauss_k(w: &WData, z: Complex64) -> Result<f64, WeierstrassError> {
    let p = Prepared::new(w);
    p.check_domain(z)?;
    let j = p.jet(z).ok_or(WeierstrassError::PoleHit(z))?;
    let lam2 = 2.0 * j.f.norm_sqr() * (1.0 + j.psi1.norm_sqr()) * (1.0 + j.psi2.norm_sqr());
    if !(lam2 > 0.0) {
        return Err(WeierstrassError::DegenerateMetric(z));
    }
    let t1 = j.dpsi1.norm_sqr() / (1.0 + j.psi1.norm_sqr()).powi(2);
    let t2 = j.dpsi2.norm_sqr() / (1.0 + j.psi2.norm_sqr()).powi(2);
    Ok(-2.0 * (t1 + t2) / lam2)
}

/// Zeros of `e` in the sampling box of `domain`, found by the multiplicity-
/// robust Newton iteration on `e/e′` from a grid of seeds and confirmed by
/// Laurent order. Punctures are excluded.
pub fn find_zeros(e: &Expr, domain: &Domain) -> Vec<Complex64> {
    if e.is_constant() {
        return vec![];
    }
    let d1 = e.derivative();
    let d2 = d1.derivative();
    let (re, im) = domain.sample_box();
    let span = (re[1] - re[0]).max(im[1] - im[0]);
    let mut roots: Vec<Complex64> = Vec::new();
    let n = 24;
    for a in 0..n {
        for b in 0..n {
            let mut z = c(
                re[0] + (re[1] - re[0]) * (a as f64 + 0.5) / n as f64,
                im[0] + (im[1] - im[0]) * (b as f64 + 0.5) / n as f64,
            );
            let mut found = false;
            for _ in 0..60 {
                let (Ok(v), Ok(v1), Ok(v2)) = (e.eval(z), d1.eval(z), d2.eval(z)) else {
                    break;
                };
                if v == c(0.0, 0.0) {
                    found = true;
                    break;
                }
                let den = v1 * v1 - v * v2;
                if den == c(0.0, 0.0) {
                    break;
                }
                let step = v * v1 / den;
                z -= step;
                if !(z.re.is_finite() && z.im.is_finite()) || (z - c(re[0], im[0])).norm() > 4.0 * span {
                    break;
                }
                if step.norm() <= 1e-14 * (1.0 + z.norm()) {
                    found = true;
                    break;
                }
            }
            if !found || !domain.region.contains(z) || domain.puncture_distance(z) < 1e-7 * (1.0 + z.norm()) {
                continue;
            }
            if roots.iter().any(|r| (r - z).norm() < 1e-7 * (1.0 + z.norm())) {
                continue;
            }
            if matches!(e.order_at(z), Ok(Some(k)) if k > 0) {
                roots.push(z);
            }
        }
    }
    roots
}

/// Poles of `e` in the sampling box, found as zeros of `1/e`.
pub fn find_poles(e: &Expr, domain: &Domain) -> Vec<Complex64> {
    find_zeros(&Expr::div(Expr::one(), e.clone()), domain)
        .into_iter()
        .filter(|&p| matches!(e.order_at(p), Ok(Some(k)) if k < 0))
        .collect()
}

/// Zero/pole orders of the data at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub z: Complex64,
    /// Declared puncture (an end) or an interior point.
    pub puncture: bool,
    /// `None` when the function vanishes identically.
    pub order_f: Option<i32>,
    pub order_psi1: Option<i32>,
    pub order_psi2: Option<i32>,
    pub ok: bool,
}

/// The four loop integrals and the three period identities on one loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopReport {
    pub curve: Loop,
    pub psi1_dh: Complex64,
    pub psi2_dh: Complex64,
    pub dh: Complex64,
    pub psi1_psi2_dh: Complex64,
    pub nodes: usize,
    pub converged: bool,
    /// `|∮ψ₁dh + conj ∮ψ₂dh|`, `|Re ∮dh|`, `|Re ∮ψ₁ψ₂dh|`.
    pub residuals: [f64; 3],
    pub ok: bool,
}

impl LoopReport {
    /// Real periods `Re ∮φ` of the four components.
    pub fn real_periods(&self) -> [f64; 4] {
        let i = c(0.0, 1.0);
        let (p1, p2, h, p12) = (self.psi1_dh, self.psi2_dh, self.dh, self.psi1_psi2_dh);
        [(p1 + p2).re, (-i * (p1 - p2)).re, (h - p12).re, (h + p12).re]
    }

    /// Periods `∮φ` of the four components.
    pub fn periods(&self) -> [Complex64; 4] {
        let i = c(0.0, 1.0);
        let (p1, p2, h, p12) = (self.psi1_dh, self.psi2_dh, self.dh, self.psi1_psi2_dh);
        [p1 + p2, -i * (p1 - p2), h - p12, h + p12]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub min_gap: f64,
    pub min_gap_at: Option<Complex64>,
    /// Points where `ψ₂ = conj ψ₁` was located (after refinement).
    pub gap_zeros: Vec<Complex64>,
    pub orders: Vec<OrderCheck>,
    pub loops: Vec<LoopReport>,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

const GAP_FLAG: f64 = 1e-9;
const PERIOD_TOL: f64 = 1e-8;

/// Newton refinement of a zero of `ψ₂ − conj ψ₁`, which is not holomorphic:
/// with `a = ψ₂′`, `b = −conj ψ₁′` the step solves `g + a dz + b conj(dz) = 0`.
fn refine_gap_zero(p: &Prepared, mut z: Complex64) -> Option<Complex64> {
    // Iterates escaping the sampled window chase a gap that closes only at infinity.
    let (re, im) = p.w.domain.sample_box();
    let reach = (re[1] - re[0]).max(im[1] - im[0]);
    let near = |z: Complex64| {
        z.re > re[0] - reach && z.re < re[1] + reach && z.im > im[0] - reach && z.im < im[1] + reach
    };
    for _ in 0..50 {
        if !near(z) {
            return None;
        }
        let j = p.jet(z)?;
        let g = j.psi2 - j.psi1.conj();
        let a = j.dpsi2;
        let b = -j.dpsi1.conj();
        let det = a.norm_sqr() - b.norm_sqr();
        let step = if det.abs() > 1e-14 * (a.norm_sqr() + b.norm_sqr()) {
            (-g * a.conj() + b * g.conj()) / det
        } else {
            // Singular linearization: gradient step on |g|²/2.
            let grad = (a.conj() * g + b * g.conj()).conj();
            let s = (a.norm() + b.norm()).powi(2);
            if s == 0.0 {
                return None;
            }
            -grad / s
        };
        z += step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let j = p.jet(z)?;
    let gap = (j.psi2 - j.psi1.conj()).norm();
    (gap < GAP_FLAG * (1.0 + j.psi1.norm()) * (1.0 + j.psi2.norm()) && p.w.domain.contains(z)).then_some(z)
}

/// Loop integrals `∮(ψ₁, ψ₂, 1, ψ₁ψ₂) f dz` by the trapezoid rule, doubling
/// the node count from 256 until successive values agree to 1e−9.
pub fn loop_integrals(w: &WData, l: &Loop) -> Result<LoopReport, WeierstrassError> {
    let p = Prepared::new(w);
    let eval = |z: Complex64| -> Result<[Complex64; 4], WeierstrassError> {
        let phi = p.phi_unchecked(z)?;
        let i = c(0.0, 1.0);
        // ψ₁dh, ψ₂dh, dh, ψ₁ψ₂dh recovered linearly from φ.
        let s = phi.0[0];
        let d = phi.0[1] * i;
        Ok([(s + d) * 0.5, (s - d) * 0.5, (phi.0[2] + phi.0[3]) * 0.5, (phi.0[3] - phi.0[2]) * 0.5])
    };
    let run = |nodes: usize| -> Result<[Complex64; 4], WeierstrassError> {
        let mut err = None;
        let mut out = [c(0.0, 0.0); 4];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = circle_trapezoid(
                |z| match eval(z) {
                    Ok(v) => v[k],
                    Err(e) => {
                        err.get_or_insert(e);
                        c(0.0, 0.0)
                    }
                },
                l.center,
                l.radius,
                nodes,
            );
        }
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    };
    let mut nodes = 256;
    let mut prev = run(nodes)?;
    let mut converged = false;
    while nodes < 16384 {
        nodes *= 2;
        let next = run(nodes)?;
        let scale = next.iter().fold(1.0f64, |m, v| m.max(v.norm()));
        let diff = next.iter().zip(prev.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        prev = next;
        if diff <= 1e-9 * scale {
            converged = true;
            break;
        }
    }
    let [i1, i2, ih, i12] = prev;
    let residuals = [(i1 + i2.conj()).norm(), ih.re.abs(), i12.re.abs()];
    let scale = prev.iter().fold(1.0f64, |m, v| m.max(v.norm()));
    let ok = residuals.iter().all(|r| *r <= PERIOD_TOL * scale);
    Ok(LoopReport {
        curve: *l,
        psi1_dh: i1,
        psi2_dh: i2,
        dh: ih,
        psi1_psi2_dh: i12,
        nodes,
        converged,
        residuals,
        ok,
    })
}

fn order_or_err(e: &Expr, z: Complex64) -> Result<Option<i32>, String> {
    e.order_at(z).map_err(|err| err.to_string())
}

/// Numerical check of the three constraints on W-data: the gap
/// `ψ₂ ≠ conj ψ₁`, the matching of zeros of `dh` with poles of `ψᵢ`, and the
/// period conditions on every test loop.
pub fn wdata_validate(w: &WData) -> ValidationReport {
    let p = Prepared::new(w);
    let mut violations = Vec::new();
    if let Err(e) = w.domain.validate() {
        violations.push(e.to_string());
    }

    let mut min_gap = f64::INFINITY;
    let mut min_at = None;
    let mut candidates: Vec<(f64, Complex64)> = Vec::new();
    for z in w.domain.sample_points(64) {
        let Some(j) = p.jet(z) else { continue };
        let gap = (j.psi2 - j.psi1.conj()).norm();
        let rel = gap / ((1.0 + j.psi1.norm()) * (1.0 + j.psi2.norm()));
        candidates.push((rel, z));
        if gap < min_gap {
            min_gap = gap;
            min_at = Some(z);
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gap_zeros: Vec<Complex64> = Vec::new();
    for &(_, z) in candidates.iter().take(16) {
        if let Some(r) = refine_gap_zero(&p, z) {
            if !gap_zeros.iter().any(|q| (q - r).norm() < 1e-6 * (1.0 + r.norm())) {
                gap_zeros.push(r);
            }
        }
    }
    for &z in &gap_zeros {
        if let Some(j) = p.jet(z) {
            let gap = (j.psi2 - j.psi1.conj()).norm();
            if gap < min_gap {
                min_gap = gap;
                min_at = Some(z);
            }
        }
    }
    if min_gap < GAP_FLAG || !gap_zeros.is_empty() {
        let at = min_at.map(|z| z.to_string()).unwrap_or_default();
        violations.push(format!("psi2 = conj(psi1) is attained (min gap {min_gap:e} at {at})"));
    }

    let mut orders = Vec::new();
    let mut interior: Vec<Complex64> = find_zeros(&w.f, &w.domain);
    for e in [&w.psi1, &w.psi2] {
        for z in find_poles(e, &w.domain) {
            if !interior.iter().any(|q| (q - z).norm() < 1e-7 * (1.0 + z.norm())) {
                interior.push(z);
            }
        }
    }
    let points = w.domain.punctures.iter().map(|&z| (z, true)).chain(interior.into_iter().map(|z| (z, false)));
    for (z, puncture) in points {
        let (of, o1, o2) = match (order_or_err(&w.f, z), order_or_err(&w.psi1, z), order_or_err(&w.psi2, z)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (a, b, c) => {
                let msg = [a.err(), b.err(), c.err()].into_iter().flatten().collect::<Vec<_>>().join("; ");
                violations.push(format!("order counting failed at {z}: {msg}"));
                continue;
            }
        };
        let ok = puncture || {
            // φ must be holomorphic and nonzero: ord f + min(0, ord ψ₁, ord ψ₂, ord ψ₁ψ₂) = 0.
            let big = i32::MAX / 4;
            let (a, b) = (o1.unwrap_or(big), o2.unwrap_or(big));
            of.is_some_and(|f| f + 0.min(a).min(b).min(a.saturating_add(b)) == 0)
        };
        if !ok {
            violations.push(format!(
                "zero of dh and poles of psi do not match at {z} (orders f {of:?}, psi1 {o1:?}, psi2 {o2:?})"
            ));
        }
        orders.push(OrderCheck { z, puncture, order_f: of, order_psi1: o1, order_psi2: o2, ok });
    }

    let mut loops = Vec::new();
    for l in &w.domain.loops {
        match loop_integrals(w, l) {
            Ok(rep) => {
                if !rep.ok {
                    violations.push(format!(
                        "period conditions fail on |z - {}| = {} (residuals {:?})",
                        l.center, l.radius, rep.residuals
                    ));
                }
                if !rep.converged {
                    violations.push(format!("loop quadrature did not converge on |z - {}| = {}", l.center, l.radius));
                }
                loops.push(rep);
            }
            Err(e) => violations.push(format!("loop |z - {}| = {}: {e}", l.center, l.radius)),
        }
    }

    ValidationReport { min_gap, min_gap_at: min_at, gap_zeros, orders, loops, violations }
}

fn nowhere_zero(e: &Expr, domain: &Domain, what: &str) -> Result<(), WeierstrassError> {
    if let Some(z) = find_zeros(e, domain).first() {
        return Err(WeierstrassError::FamilyPreconditionFailed(format!("{what} vanishes at {z}")));
    }
    if let Some(z) = find_poles(e, domain).first() {
        return Err(WeierstrassError::FamilyPreconditionFailed(format!("{what} has a pole at {z}")));
    }
    Ok(())
}

/// Hyperbolic family: `ψ₂ = e^{2u}ψ`. Requires `ψ` and `f` holomorphic
/// without zeros on the domain.
pub fn family_hyperbolic(psi: Expr, f: Expr, u: f64, domain: Domain) -> Result<WData, WeierstrassError> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(WeierstrassError::FamilyPreconditionFailed(format!("u = {u} must lie in (0, inf)")));
    }
    nowhere_zero(&f, &domain, "dh")?;
    nowhere_zero(&psi, &domain, "psi")?;
    let psi2 = Expr::mul(Expr::real((2.0 * u).exp()), psi.clone());
    Ok(WData { name: None, psi1: psi, psi2, f, domain })
}

/// Elliptic family with `ω = g dz`: `ψ₂ = e^{−2iα}/ψ` and `dh = e^{iα} ω`.
/// Requires each zero of `ω` to be a zero or pole of `ψ` of the same order.
pub fn family_elliptic(psi: Expr, g: Expr, alpha: f64, domain: Domain) -> Result<WData, WeierstrassError> {
    if !(alpha > 0.0 && alpha <= std::f64::consts::FRAC_PI_2) {
        return Err(WeierstrassError::FamilyPreconditionFailed(format!("alpha = {alpha} must lie in (0, pi/2]")));
    }
    let mut points = find_zeros(&g, &domain);
    points.extend(find_zeros(&psi, &domain));
    points.extend(find_poles(&psi, &domain));
    if let Some(z) = find_poles(&g, &domain).first() {
        return Err(WeierstrassError::FamilyPreconditionFailed(format!("omega has a pole at {z}")));
    }
    for z in points {
        let og = g.order_at(z)?.unwrap_or(i32::MAX);
        let op = psi.order_at(z)?.unwrap_or(i32::MAX);
        if og != op.abs() {
            return Err(WeierstrassError::FamilyPreconditionFailed(format!(
                "zero of omega (order {og}) does not match zero/pole of psi (order {op}) at {z}"
            )));
        }
    }
    let psi2 = Expr::div(Expr::constant(Complex64::from_polar(1.0, -2.0 * alpha)), psi.clone());
    let f = Expr::mul(Expr::constant(Complex64::from_polar(1.0, alpha)), g);
    Ok(WData { name: None, psi1: psi, psi2, f, domain })
}

/// Parabolic family: `ψ₂ = ψ + 1`. Requires `f` holomorphic without zeros.
pub fn family_parabolic(psi: Expr, f: Expr, domain: Domain) -> Result<WData, WeierstrassError> {
    nowhere_zero(&f, &domain, "dh")?;
    if let Some(z) = find_poles(&psi, &domain).first() {
        return Err(WeierstrassError::FamilyPreconditionFailed(format!("psi has a pole at {z}")));
    }
    let psi2 = Expr::add(psi.clone(), Expr::one());
    Ok(WData { name: None, psi1: psi, psi2, f, domain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn ex(s: &str) -> Expr {
        s.parse().unwrap()
    }

    fn data(p1: &str, p2: &str, f: &str, domain: Domain) -> WData {
        WData { name: None, psi1: ex(p1), psi2: ex(p2), f: ex(f), domain }
    }

    #[test]
    fn phi_examples() {
        let w = data("0", "0", "1", Domain::plane());
        let phi = phi_from_wdata(&w, c(1.0, 0.0)).unwrap();
        assert_eq!(phi.0, [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);

        let w = family_hyperbolic(ex("1"), ex("1"), 1.0, Domain::plane()).unwrap();
        let phi = phi_from_wdata(&w, c(0.3, 0.2)).unwrap();
        let e2 = E * E;
        let expected = [c(1.0 + e2, 0.0), c(0.0, -(1.0 - e2)), c(1.0 - e2, 0.0), c(1.0 + e2, 0.0)];
        for k in 0..4 {
            assert!((phi.0[k] - expected[k]).norm() < 1e-12);
        }
        assert!(phi.bilinear(&phi).norm() < 1e-12 * phi.norm() * phi.norm());
    }

    #[test]
    fn removable_points_use_series() {
        let w = data("1/z", "0", "z", Domain::plane());
        let phi = phi_from_wdata(&w, c(0.0, 0.0)).unwrap();
        assert!((phi.0[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((phi.0[2] - c(0.0, 0.0)).norm() < 1e-12);
        let w = data("1/z^2", "0", "z", Domain::plane());
        assert_eq!(phi_from_wdata(&w, c(0.0, 0.0)), Err(WeierstrassError::PoleHit(c(0.0, 0.0))));
    }

    #[test]
    fn metric_examples() {
        let w = data("0", "i", "1", Domain::plane());
        assert!((metric_ds2(&w, c(0.5, 0.5)).unwrap() - 2.0).abs() < 1e-15);
        let w = family_parabolic(ex("z"), ex("2"), Domain::plane()).unwrap();
        assert!((metric_ds2(&w, c(0.7, 0.0)).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn curvature_vanishes_for_constant_psi2() {
        let w = data("z^2 + exp(z)", "3 + i", "1 + z^2", Domain::plane());
        assert_eq!(gauss_k(&w, c(0.4, 0.1)).unwrap(), 0.0);
        let w = family_elliptic(ex("1"), ex("1"), PI / 3.0, Domain::plane()).unwrap();
        assert_eq!(gauss_k(&w, c(1.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn curvature_at_pole_of_psi() {
        // ψ₁ = 1/z with dh = z dz: K is continuous through z = 0.
        let w = data("1/z", "z", "z", Domain::plane());
        let k0 = gauss_k(&w, c(0.0, 0.0)).unwrap();
        let k1 = gauss_k(&w, c(1e-5, 0.0)).unwrap();
        assert!((k0 - k1).abs() < 1e-6 * k0.abs().max(1.0), "{k0} {k1}");
    }

    #[test]
    fn gap_zero_located() {
        let w = data("z", "i", "1", Domain::rectangle([-2.0, 2.0], [-2.0, 2.0]));
        let rep = wdata_validate(&w);
        assert!(!rep.ok());
        assert!(rep.gap_zeros.iter().any(|z| (z - c(0.0, -1.0)).norm() < 1e-10));
    }

    #[test]
    fn interior_orders() {
        let w = data("1/z", "0", "z", Domain::plane());
        let rep = wdata_validate(&w);
        assert!(rep.ok(), "{:?}", rep.violations);
        assert!(rep.orders.iter().any(|o| !o.puncture && o.z.norm() < 1e-8 && o.ok));
        let w = data("1/z^2", "0", "z", Domain::plane());
        let rep = wdata_validate(&w);
        assert!(!rep.ok());
    }

    #[test]
    fn family_preconditions() {
        let err = family_hyperbolic(ex("z"), ex("1"), 1.0, Domain::plane()).unwrap_err();
        assert!(matches!(err, WeierstrassError::FamilyPreconditionFailed(_)));
        assert!(family_parabolic(ex("z"), ex("z - 1"), Domain::plane()).is_err());
        assert!(family_elliptic(ex("z^2"), ex("z"), 0.5, Domain::plane()).is_err());
        assert!(family_elliptic(ex("z^2"), ex("z^2"), 0.5, Domain::plane()).is_ok());
    }

    #[test]
    fn parabolic_phi() {
        let w = family_parabolic(ex("z"), ex("1"), Domain::plane()).unwrap();
        let z = c(0.3, -1.2);
        let phi = phi_from_wdata(&w, z).unwrap();
        let i = c(0.0, 1.0);
        let one = c(1.0, 0.0);
        let expected = [z * 2.0 + one, i, one - z - z * z, one + z + z * z];
        for k in 0..4 {
            assert!((phi.0[k] - expected[k]).norm() < 1e-12);
        }
    }
}
