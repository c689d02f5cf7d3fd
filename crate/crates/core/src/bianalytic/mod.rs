//! The fixed-conjugate equation `f(w) = w̄` for rational `f = P/Q`: the
//! bianalytic function `F = P − w̄Q`, winding numbers, certified root
//! localization by exclusion quadtree, local indices and the counting bounds.

mod poly;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conjsim::{e_set, Circline, EFixSet};
use crate::extended::ExtComplex;
use crate::mobius::MobiusMat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BianalyticError {
    #[error("P and Q share a common factor of degree {0}")]
    NonCoprime(usize),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("F vanishes on or too near the contour")]
    ContourThroughZero,
    #[error("root is not isolated: {0}")]
    NotIsolated(String),
    #[error("E_f is the circline {0:?}, not a discrete set")]
    DegenerateNondiscrete(Circline),
    #[error("subdivision budget of {0} cells exceeded")]
    BudgetExceeded(usize),
    #[error("E_f has no finite point to move to infinity")]
    EmptyFixedSet,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Leading coefficients below this fraction of the max-norm are dropped.
const LEAD_TOL: f64 = 1e-12;
/// Euclidean remainders below this fraction of the max-norm count as zero.
const GCD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawRational {
    p: Vec<Complex64>,
    q: Vec<Complex64>,
}

/// `f = P/Q` with coprime `P`, `Q` (ascending coefficients) and degree
/// `m = max(deg P, deg Q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRational", into = "RawRational")]
pub struct RationalFn {
    p: Vec<Complex64>,
    q: Vec<Complex64>,
}

impl TryFrom<RawRational> for RationalFn {
    type Error = BianalyticError;
    fn try_from(r: RawRational) -> Result<Self, Self::Error> {
        RationalFn::new(r.p, r.q)
    }
}

impl From<RationalFn> for RawRational {
    fn from(f: RationalFn) -> Self {
        RawRational { p: f.p, q: f.q }
    }
}

impl RationalFn {
    pub fn new(p: Vec<Complex64>, q: Vec<Complex64>) -> Result<Self, BianalyticError> {
        Self::with_tol(p, q, LEAD_TOL)
    }

    fn with_tol(p: Vec<Complex64>, q: Vec<Complex64>, lead_tol: f64) -> Result<Self, BianalyticError> {
        if !p.iter().chain(&q).all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(BianalyticError::InvalidPolynomial("coefficients must be finite".into()));
        }
        let scale = poly::max_norm(&p).max(poly::max_norm(&q));
        let cut = |v: Vec<Complex64>| {
            let mut v = v;
            while v.last().is_some_and(|z| z.norm() <= lead_tol * scale) {
                v.pop();
            }
            v
        };
        let (p, q) = (cut(p), cut(q));
        if q.is_empty() {
            return Err(BianalyticError::InvalidPolynomial("Q must be nonzero".into()));
        }
        let g = poly::gcd_degree(&p, &q, GCD_TOL);
        if g > 0 {
            return Err(BianalyticError::NonCoprime(g));
        }
        Ok(RationalFn { p, q })
    }

    /// `f = (aw + b)/(cw + d)`.
    pub fn from_mobius(s: &MobiusMat) -> Self {
        RationalFn::new(vec![s.b, s.a], vec![s.d, s.c]).expect("an invertible matrix gives coprime P, Q")
    }

    /// `1/w^m`.
    pub fn inverse_power(m: usize) -> Self {
        let mut q = vec![c(0.0, 0.0); m + 1];
        q[m] = c(1.0, 0.0);
        RationalFn { p: vec![c(1.0, 0.0)], q }
    }

    pub fn p(&self) -> &[Complex64] {
        &self.p
    }

    pub fn q(&self) -> &[Complex64] {
        &self.q
    }

    pub fn deg_p(&self) -> Option<usize> {
        poly::degree(&self.p)
    }

    pub fn deg_q(&self) -> usize {
        self.q.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.deg_p().unwrap_or(0).max(self.deg_q())
    }

    /// Max-norm of all coefficients.
    pub fn coeff_norm(&self) -> f64 {
        poly::max_norm(&self.p).max(poly::max_norm(&self.q))
    }

    pub fn eval(&self, w: &ExtComplex) -> ExtComplex {
        match *w {
            ExtComplex::Finite(w) => {
                let (p, q) = (poly::eval(&self.p, w), poly::eval(&self.q, w));
                if q == c(0.0, 0.0) {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(p / q)
                }
            }
            ExtComplex::Infinity => {
                let (dp, dq) = (self.deg_p(), self.deg_q());
                match dp {
                    Some(dp) if dp > dq => ExtComplex::Infinity,
                    Some(dp) if dp == dq => ExtComplex::Finite(self.p[dp] / self.q[dq]),
                    _ => ExtComplex::zero(),
                }
            }
        }
    }

    /// Whether `f(∞) = ∞`, i.e. `∞ ∈ E_f`.
    pub fn infinity_in_ef(&self) -> bool {
        self.deg_p().is_some_and(|d| d > self.deg_q())
    }

    /// The Möbius matrix of `f` when `m = 1`.
    pub fn to_mobius(&self) -> Option<MobiusMat> {
        if self.degree() != 1 {
            return None;
        }
        let at = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or(c(0.0, 0.0));
        MobiusMat::new(at(&self.p, 1), at(&self.p, 0), at(&self.q, 1), at(&self.q, 0)).ok()
    }

    /// The conjugate-similar transform `M̄ ∘ f ∘ M⁻¹`, whose fixed-conjugate
    /// set is `M(E_f)`.
    pub fn conj_transform(&self, m: &MobiusMat) -> Result<RationalFn, BianalyticError> {
        self.conj_transform_tol(m, LEAD_TOL)
    }

    fn conj_transform_tol(&self, m: &MobiusMat, lead_tol: f64) -> Result<RationalFn, BianalyticError> {
        let inv = m.inverse();
        let num = [inv.b, inv.a];
        let den = [inv.d, inv.c];
        let deg = self.degree();
        // Homogenized composition f(M⁻¹w) = P̃/Q̃ with both of degree ≤ m.
        let compose = |coeffs: &[Complex64]| {
            let mut out = vec![c(0.0, 0.0); deg + 1];
            for (k, ck) in coeffs.iter().enumerate() {
                let term = poly::mul(&poly::powi(&num, k), &poly::powi(&den, deg - k));
                out = poly::add(&out, &poly::scale(&term, *ck));
            }
            out
        };
        let (pt, qt) = (compose(&self.p), compose(&self.q));
        let mc = m.conj();
        let p = poly::add(&poly::scale(&pt, mc.a), &poly::scale(&qt, mc.b));
        let q = poly::add(&poly::scale(&pt, mc.c), &poly::scale(&qt, mc.d));
        let s = c(1.0 / poly::max_norm(&p).max(poly::max_norm(&q)), 0.0);
        RationalFn::with_tol(poly::scale(&p, s), poly::scale(&q, s), lead_tol)
    }
}

/// `F(w) = P(w) − w̄ Q(w)`; its zero set is `E_f ∩ C`.
pub fn bianalytic_f(f: &RationalFn, w: Complex64) -> Complex64 {
    poly::eval(&f.p, w) - w.conj() * poly::eval(&f.q, w)
}

/// An axis-aligned closed rectangle `re × im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl Rect {
    pub fn square(center: Complex64, half: f64) -> Self {
        Rect { re: [center.re - half, center.re + half], im: [center.im - half, center.im + half] }
    }

    pub fn center(&self) -> Complex64 {
        c(0.5 * (self.re[0] + self.re[1]), 0.5 * (self.im[0] + self.im[1]))
    }

    pub fn side(&self) -> f64 {
        (self.re[1] - self.re[0]).max(self.im[1] - self.im[0])
    }

    fn half_diagonal(&self) -> f64 {
        0.5 * (self.re[1] - self.re[0]).hypot(self.im[1] - self.im[0])
    }

    fn quarters(&self) -> [Rect; 4] {
        let m = self.center();
        [
            Rect { re: [self.re[0], m.re], im: [self.im[0], m.im] },
            Rect { re: [m.re, self.re[1]], im: [self.im[0], m.im] },
            Rect { re: [self.re[0], m.re], im: [m.im, self.im[1]] },
            Rect { re: [m.re, self.re[1]], im: [m.im, self.im[1]] },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Contour {
    Circle { center: Complex64, radius: f64 },
    Rect(Rect),
}

impl Contour {
    /// Counterclockwise point at parameter `s ∈ [0, 1)`.
    fn point(&self, s: f64) -> Complex64 {
        match *self {
            Contour::Circle { center, radius } => center + Complex64::from_polar(radius, TAU * s),
            Contour::Rect(r) => {
                let (w, h) = (r.re[1] - r.re[0], r.im[1] - r.im[0]);
                let mut t = s * 2.0 * (w + h);
                if t < w {
                    return c(r.re[0] + t, r.im[0]);
                }
                t -= w;
                if t < h {
                    return c(r.re[1], r.im[0] + t);
                }
                t -= h;
                if t < w {
                    return c(r.re[1] - t, r.im[1]);
                }
                t -= w;
                c(r.re[0], r.im[1] - t)
            }
        }
    }
}

const MAX_WINDING_NODES: usize = 1 << 18;

/// Winding number of `F` around 0 along `contour`, sampling from `nodes`
/// points and doubling until every step turns by less than `π/2`.
pub fn winding(f: impl Fn(Complex64) -> Complex64, contour: &Contour, nodes: usize) -> Result<i32, BianalyticError> {
    let mut n = nodes.max(8);
    while n <= MAX_WINDING_NODES {
        let vals: Vec<Complex64> = (0..n).map(|k| f(contour.point(k as f64 / n as f64))).collect();
        if vals.iter().any(|v| !(v.norm() > 0.0) || !v.norm().is_finite()) {
            return Err(BianalyticError::ContourThroughZero);
        }
        let mut total = 0.0;
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let step = (vals[(k + 1) % n] / vals[k]).arg();
            total += step;
            max_step = max_step.max(step.abs());
        }
        if max_step < PI / 2.0 {
            return Ok((total / TAU).round() as i32);
        }
        n *= 2;
    }
    Err(BianalyticError::ContourThroughZero)
}

/// A certified solution of `f(w) = w̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCertificate {
    /// Isolating box on whose boundary `winding` was measured.
    pub cell: Rect,
    pub root: Complex64,
    /// Local index `ε ∈ {−1, 0, 1}`.
    pub index: i32,
    pub winding: i32,
    /// `|F(root)|`.
    pub residual: f64,
    /// Set for degenerate roots (`ε = 0` or the derivative test inconclusive).
    pub low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfResult {
    pub m: usize,
    /// Finite points of `E_f`.
    pub roots: Vec<RootCertificate>,
    pub infinity_member: bool,
    /// Index of `∞` when it was certified in a normalized frame.
    pub infinity_index: Option<i32>,
    /// `M` with `E_{M̄∘f∘M⁻¹} = M(E_f)` used to move `∞` out of `E_f`.
    pub normalizer: MobiusMat,
    /// Sum of indices over all certified points, including `∞`.
    pub index_sum: i32,
    /// Winding of `F` on the outer circle in the normalized frame.
    pub outer_winding: Option<i32>,
    pub cells: usize,
    pub warnings: Vec<String>,
}

impl EfResult {
    /// `|E_f|` including `∞`.
    pub fn cardinality(&self) -> usize {
        self.roots.len() + usize::from(self.infinity_member)
    }

    pub fn points(&self) -> Vec<ExtComplex> {
        let mut out: Vec<ExtComplex> = self.roots.iter().map(|r| ExtComplex::Finite(r.root)).collect();
        if self.infinity_member {
            out.push(ExtComplex::Infinity);
        }
        out
    }

    pub fn low_confidence(&self) -> bool {
        !self.warnings.is_empty() || self.roots.iter().any(|r| r.low_confidence)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizeGoal {
    InfinityNotInEf,
    InfinityInEf,
}

/// The Möbius map `w ↦ 1/(w − λ)` sending `λ` to `∞`.
fn send_to_infinity(lambda: Complex64) -> MobiusMat {
    MobiusMat::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), -lambda).expect("determinant is -1")
}

/// Moves `f` by a conjugate-similar transform so that `∞` is outside
/// (resp. inside) `E_f`; returns `f` itself and the identity when the goal
/// already holds.
pub fn normalize_at_infinity(
    f: &RationalFn,
    goal: NormalizeGoal,
) -> Result<(RationalFn, MobiusMat), BianalyticError> {
    match goal {
        NormalizeGoal::InfinityNotInEf => {
            if !f.infinity_in_ef() {
                return Ok((f.clone(), MobiusMat::identity()));
            }
            // Deterministic spiral of candidates; keep the one farthest from E_f.
            let m = f.degree() as i32;
            let lambda = (0..24)
                .map(|k| Complex64::from_polar(0.37 * (1.0 + 0.3 * k as f64), 0.91 * k as f64 + 0.2))
                .max_by(|a, b| {
                    let score = |w: &Complex64| bianalytic_f(f, *w).norm() / (1.0 + w.norm()).powi(m + 1);
                    score(a).total_cmp(&score(b))
                })
                .expect("nonempty candidate list");
            let mm = send_to_infinity(lambda);
            Ok((f.conj_transform(&mm)?, mm))
        }
        NormalizeGoal::InfinityInEf => {
            if f.infinity_in_ef() {
                return Ok((f.clone(), MobiusMat::identity()));
            }
            let sol = solve_ef(f)?;
            let lambda = sol.roots.iter().find(|r| !r.low_confidence).or(sol.roots.first());
            let lambda = lambda.ok_or(BianalyticError::EmptyFixedSet)?.root;
            let mm = send_to_infinity(lambda);
            // The leading coefficient of the new Q is F(λ) ≈ 0 up to rounding.
            Ok((f.conj_transform_tol(&mm, 1e-8)?, mm))
        }
    }
}

/// Smallest cell side of the subdivision.
const MIN_SIDE: f64 = 1e-6;
const MAX_CELLS: usize = 4_000_000;
/// Newton stops once `|F| ≤ NEWTON_TOL·scale`.
const NEWTON_TOL: f64 = 1e-12;
/// Certified roots satisfy `|F| ≤ CERT_TOL·scale`.
const CERT_TOL: f64 = 1e-9;
/// Roots closer than this (relative to `1 + |w|`) are merged.
const MERGE_TOL: f64 = 1e-8;

struct Solver<'a> {
    f: &'a RationalFn,
    dp: Vec<Complex64>,
    dq: Vec<Complex64>,
    m: i32,
    norm: f64,
}

impl<'a> Solver<'a> {
    fn new(f: &'a RationalFn) -> Self {
        Solver { f, dp: poly::derivative(&f.p), dq: poly::derivative(&f.q), m: f.degree() as i32, norm: f.coeff_norm() }
    }

    fn value(&self, w: Complex64) -> Complex64 {
        bianalytic_f(self.f, w)
    }

    /// Residual scale `(1 + |w|)^{m+1}·‖coeffs‖`.
    fn scale(&self, w: Complex64) -> f64 {
        (1.0 + w.norm()).powi(self.m + 1) * self.norm
    }

    /// `(F, ∂F/∂w, ∂F/∂w̄)`.
    fn jet(&self, w: Complex64) -> (Complex64, Complex64, Complex64) {
        let q = poly::eval(&self.f.q, w);
        let a = poly::eval(&self.dp, w) - w.conj() * poly::eval(&self.dq, w);
        (poly::eval(&self.f.p, w) - w.conj() * q, a, -q)
    }

    /// `|∂F/∂w| / |∂F/∂w̄|`: the normalized derivative `r` at a root.
    fn derivative_ratio(&self, w: Complex64) -> f64 {
        let (_, a, b) = self.jet(w);
        a.norm() / b.norm()
    }

    /// Certifies `F ≠ 0` on the cell by a Taylor bound about its center.
    fn excluded(&self, cell: &Rect) -> bool {
        let z = cell.center();
        let r = cell.half_diagonal();
        // F(z+h) − F(z) = [G(z+h) − G(z)] − h̄ Q(z+h) with G = P − z̄Q.
        let g = poly::add(&self.f.p, &poly::scale(&self.f.q, -z.conj()));
        let gs = poly::taylor_shift(&g, z);
        let qs = poly::taylor_shift(&self.f.q, z);
        let tail = |s: &[Complex64]| s.iter().skip(1).rev().fold(0.0, |acc, a| (acc + a.norm()) * r);
        let bound = tail(&gs) + r * (qs[0].norm() + tail(&qs));
        gs[0].norm() > bound * (1.0 + 1e-9) + 1e-14 * self.scale(z)
    }

    fn newton(&self, mut w: Complex64, reach: f64) -> Option<Complex64> {
        let start = w;
        for _ in 0..100 {
            let (val, a, b) = self.jet(w);
            if val.norm() <= NEWTON_TOL * self.scale(w) {
                return Some(w);
            }
            let det = a.norm_sqr() - b.norm_sqr();
            let step = if det.abs() > 1e-14 * (a.norm_sqr() + b.norm_sqr()) {
                (-val * a.conj() + b * val.conj()) / det
            } else {
                let s = (a.norm() + b.norm()).powi(2);
                if s == 0.0 {
                    return None;
                }
                -(a.conj() * val + b * val.conj()).conj() / s
            };
            w += step;
            if !(w - start).norm().is_finite() || (w - start).norm() > reach {
                return None;
            }
            if step.norm() <= 1e-16 * (1.0 + w.norm()) {
                break;
            }
        }
        (self.value(w).norm() <= CERT_TOL * self.scale(w)).then_some(w)
    }

    /// Index from windings on shrinking boxes around `w`, cross-checked with
    /// the derivative test. `room` caps the box half-side.
    fn certify(&self, w: Complex64, room: f64) -> Result<RootCertificate, BianalyticError> {
        let residual = self.value(w).norm();
        if residual > CERT_TOL * self.scale(w) {
            return Err(BianalyticError::NotIsolated(format!("|F({w})| = {residual:e} is not small")));
        }
        let r = self.derivative_ratio(w);
        let expected = if r > 1.0 + 1e-6 {
            Some(1)
        } else if r < 1.0 - 1e-6 {
            Some(-1)
        } else {
            None
        };
        let mut half = room.min(0.05 * (1.0 + w.norm()));
        let mut previous = None;
        for _ in 0..6 {
            let cell = Rect::square(w, half);
            if let Ok(k) = winding(|z| self.value(z), &Contour::Rect(cell), 64) {
                let settled = match expected {
                    Some(e) => k == e,
                    None => previous == Some(k),
                };
                if settled {
                    return Ok(RootCertificate {
                        cell,
                        root: w,
                        index: k,
                        winding: k,
                        residual,
                        low_confidence: expected.is_none(),
                    });
                }
                previous = Some(k);
            }
            half *= 0.1;
        }
        Err(BianalyticError::NotIsolated(format!("windings around {w} disagree with the derivative test (r = {r})")))
    }

    /// Radius `R` with `F ≠ 0` for `|w| ≥ R`: the dominant-term bound,
    /// doubled until `|λ_m||w|^{m+1}` beats the rest on the sampled circle.
    fn outer_radius(&self) -> f64 {
        let q = &self.f.q;
        let m = q.len() - 1;
        let lead = q[m].norm();
        let mut r = 2.0 * (1.0 + poly::max_norm(&q[..m]) / lead + poly::max_norm(&self.f.p) / lead);
        let mut rest = q.clone();
        rest[m] = c(0.0, 0.0);
        for _ in 0..30 {
            let dominant = (0..512).all(|k| {
                let w = Complex64::from_polar(r, TAU * k as f64 / 512.0);
                let big = lead * r.powi(m as i32 + 1);
                big > 1.1 * (poly::eval(&self.f.p, w).norm() + r * poly::eval(&rest, w).norm())
            });
            if dominant {
                break;
            }
            r *= 2.0;
        }
        r
    }

    /// All roots of `F` for `f` with `∞ ∉ E_f`.
    fn solve(&self) -> Result<(Vec<RootCertificate>, i32, usize, Vec<String>), BianalyticError> {
        let mut warnings = Vec::new();
        let radius = self.outer_radius();
        let outer = winding(|z| self.value(z), &Contour::Circle { center: c(0.0, 0.0), radius }, 256)?;
        // Offset the grid so that symmetric roots avoid cell edges.
        let top = Rect::square(c(0.0123 * radius, 0.0171 * radius), 1.1 * radius);
        let mut stack = vec![top];
        let mut finals = Vec::new();
        let mut cells = 0;
        while let Some(cell) = stack.pop() {
            cells += 1;
            if cells > MAX_CELLS {
                return Err(BianalyticError::BudgetExceeded(MAX_CELLS));
            }
            if self.excluded(&cell) {
                continue;
            }
            if cell.side() <= MIN_SIDE {
                finals.push(cell);
            } else {
                stack.extend(cell.quarters());
            }
        }
        let mut found: Vec<(Complex64, f64)> = Vec::new();
        let mut unresolved = Vec::new();
        for cell in &finals {
            let side = cell.side();
            // Center first, then a 3×3 grid of interior seeds.
            let seeds = std::iter::once(cell.center()).chain((0..9).map(|k| {
                let (i, j) = ((k % 3) as f64, (k / 3) as f64);
                c(cell.re[0] + side * (2.0 * i + 1.0) / 6.0, cell.im[0] + side * (2.0 * j + 1.0) / 6.0)
            }));
            let mut hit = None;
            for s in seeds {
                if let Some(w) = self.newton(s, 100.0 * side) {
                    hit = Some(w);
                    break;
                }
            }
            match hit {
                Some(w) => {
                    let res = self.value(w).norm();
                    match found.iter_mut().find(|(v, _)| (*v - w).norm() <= MERGE_TOL * (1.0 + w.norm())) {
                        Some(entry) if res < entry.1 => *entry = (w, res),
                        Some(_) => {}
                        None => found.push((w, res)),
                    }
                }
                None => unresolved.push(cell.center()),
            }
        }
        for z in unresolved {
            if !found.iter().any(|(w, _)| (*w - z).norm() <= 1e-4 * (1.0 + w.norm())) {
                warnings.push(format!("no root converged near uncertified cell at {z}"));
            }
        }
        found.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        let mut roots = Vec::new();
        for (k, (w, _)) in found.iter().enumerate() {
            let gap = found
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, (v, _))| (*v - w).norm())
                .fold(f64::INFINITY, f64::min);
            roots.push(self.certify(*w, 0.4 * gap)?);
        }
        let sum: i32 = roots.iter().map(|r| r.index).sum();
        if sum != outer {
            warnings.push(format!("index sum {sum} differs from the outer winding {outer}"));
        }
        Ok((roots, outer, cells, warnings))
    }
}

fn nearest_gap(points: &[Complex64], k: usize) -> f64 {
    points
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, v)| (*v - points[k]).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Degree `m ≤ 1`: the fixed-conjugate set of a Möbius map or a constant.
fn solve_low_degree(f: &RationalFn) -> Result<EfResult, BianalyticError> {
    let points: Vec<ExtComplex> = match f.to_mobius() {
        Some(s) => match e_set(&s) {
            EFixSet::Circline { circline } => return Err(BianalyticError::DegenerateNondiscrete(circline)),
            EFixSet::Finite { points } => points,
        },
        None => vec![ExtComplex::Finite((f.p.first().copied().unwrap_or(c(0.0, 0.0)) / f.q[0]).conj())],
    };
    let finite: Vec<Complex64> = points.iter().filter_map(|p| p.as_finite()).collect();
    let solver = Solver::new(f);
    let mut roots = Vec::new();
    for k in 0..finite.len() {
        let w = solver.newton(finite[k], 1e-6 * (1.0 + finite[k].norm())).unwrap_or(finite[k]);
        roots.push(solver.certify(w, 0.4 * nearest_gap(&finite, k))?);
    }
    Ok(EfResult {
        m: f.degree(),
        index_sum: roots.iter().map(|r| r.index).sum(),
        roots,
        infinity_member: points.iter().any(|p| p.is_infinite()),
        infinity_index: None,
        normalizer: MobiusMat::identity(),
        outer_winding: None,
        cells: 0,
        warnings: Vec::new(),
    })
}

/// Solves `f(w) = w̄` on the Riemann sphere. For `m ≥ 2`, `f` is first moved
/// so that `∞ ∉ E_f`, the roots of `F` are localized by an exclusion quadtree
/// on a disc containing all of them, refined by Newton on `(Re F, Im F)` and
/// certified by windings on isolating boxes, then mapped back.
pub fn solve_ef(f: &RationalFn) -> Result<EfResult, BianalyticError> {
    let m = f.degree();
    if m <= 1 {
        return solve_low_degree(f);
    }
    let (g, mm) = normalize_at_infinity(f, NormalizeGoal::InfinityNotInEf)?;
    let solver = Solver::new(&g);
    let (normalized, outer, cells, mut warnings) = solver.solve()?;
    let index_sum = normalized.iter().map(|r| r.index).sum();
    if mm == MobiusMat::identity() {
        return Ok(EfResult {
            m,
            roots: normalized,
            infinity_member: false,
            infinity_index: None,
            normalizer: mm,
            index_sum,
            outer_winding: Some(outer),
            cells,
            warnings,
        });
    }
    let inv = mm.inverse();
    let mut infinity_index = None;
    let mut mapped = Vec::new();
    for r in &normalized {
        match inv.apply_finite(r.root) {
            ExtComplex::Infinity => infinity_index = Some(r.index),
            ExtComplex::Finite(w) if w.norm() > 1e12 => infinity_index = Some(r.index),
            ExtComplex::Finite(w) => mapped.push((w, r.index, r.low_confidence)),
        }
    }
    let original = Solver::new(f);
    let points: Vec<Complex64> = mapped.iter().map(|m| m.0).collect();
    let mut roots = Vec::new();
    for (k, &(w, index, low)) in mapped.iter().enumerate() {
        let w = original.newton(w, 1e-6 * (1.0 + w.norm())).unwrap_or(w);
        let mut cert = original.certify(w, 0.4 * nearest_gap(&points, k))?;
        if cert.index != index {
            warnings.push(format!("index at {w} is {} after mapping back, {index} before", cert.index));
        }
        // The index is invariant under the transform; keep the normalized one.
        cert.index = index;
        cert.low_confidence |= low;
        roots.push(cert);
    }
    Ok(EfResult {
        m,
        roots,
        infinity_member: infinity_index.is_some(),
        infinity_index,
        normalizer: mm,
        index_sum,
        outer_winding: Some(outer),
        cells,
        warnings,
    })
}

/// Local index of `F` at an isolated root: the winding on shrinking boxes,
/// checked against the normalized derivative `r` (`r > 1 ⇒ +1`, `r < 1 ⇒ −1`).
pub fn local_index(f: &RationalFn, root: Complex64) -> Result<i32, BianalyticError> {
    let s = Solver::new(f);
    let w = s.newton(root, 1e-3 * (1.0 + root.norm())).unwrap_or(root);
    s.certify(w, 0.05 * (1.0 + w.norm())).map(|r| r.index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundFlag {
    /// `m ≥ 6`.
    FlatForcedDegree,
    /// `|E_f| > (m + 3)/2`.
    FlatForcedCount,
    /// `|E_f| < m − 1` or `|E_f| > (m + 1)²`.
    CountAnomaly,
    LowConfidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub m: usize,
    /// `|E_f|` including `∞`.
    pub e_count: usize,
    pub index_sum: i32,
    /// Window `[|E_f|, m − |E_f| + 3]` for the number of ends `q₁`.
    pub q1_window: [i64; 2],
    pub flags: Vec<BoundFlag>,
}

impl BoundsReport {
    pub fn flat_forced(&self) -> bool {
        self.flags.iter().any(|f| matches!(f, BoundFlag::FlatForcedDegree | BoundFlag::FlatForcedCount))
    }
}

/// Bound arithmetic from the degree and the size of `E_f`.
pub fn bounds_from_counts(m: usize, e_count: usize, index_sum: i32) -> BoundsReport {
    let (mi, e) = (m as i64, e_count as i64);
    let mut flags = Vec::new();
    if m >= 6 {
        flags.push(BoundFlag::FlatForcedDegree);
    }
    if 2 * e > mi + 3 {
        flags.push(BoundFlag::FlatForcedCount);
    }
    if e < mi - 1 || e > (mi + 1) * (mi + 1) {
        flags.push(BoundFlag::CountAnomaly);
    }
    BoundsReport { m, e_count, index_sum, q1_window: [e, mi - e + 3], flags }
}

/// Solves `E_f` and reports the counting bounds.
pub fn bounds_report(f: &RationalFn) -> Result<BoundsReport, BianalyticError> {
    let sol = solve_ef(f)?;
    Ok(bounds_of(&sol))
}

pub fn bounds_of(sol: &EfResult) -> BoundsReport {
    let mut rep = bounds_from_counts(sol.m, sol.cardinality(), sol.index_sum);
    if sol.low_confidence() {
        rep.flags.push(BoundFlag::LowConfidence);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(p: &[(f64, f64)], q: &[(f64, f64)]) -> RationalFn {
        RationalFn::new(p.iter().map(|&(a, b)| c(a, b)).collect(), q.iter().map(|&(a, b)| c(a, b)).collect())
            .unwrap()
    }

    #[test]
    fn f_examples() {
        let f = RationalFn::inverse_power(2);
        assert_eq!(bianalytic_f(&f, c(1.0, 0.0)), c(0.0, 0.0));
        let f = rf(&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0)]);
        assert_eq!(bianalytic_f(&f, c(0.0, 1.0)), c(0.0, 2.0));
        let f = rf(&[(1.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0)]);
        for w in [c(0.3, 0.0), c(-1.0, 2.0)] {
            assert_eq!(bianalytic_f(&f, w), c(1.0, 2.0 * w.im));
        }
    }

    #[test]
    fn winding_examples() {
        let unit = Contour::Circle { center: c(0.0, 0.0), radius: 1.0 };
        assert_eq!(winding(|w| w, &unit, 16), Ok(1));
        assert_eq!(winding(|w| w.conj(), &unit, 16), Ok(-1));
        let two = Contour::Circle { center: c(0.0, 0.0), radius: 2.0 };
        assert_eq!(winding(|w| -w * w * w.norm_sqr(), &two, 16), Ok(2));
        let boxed = Contour::Rect(Rect::square(c(0.0, 0.0), 1.0));
        assert_eq!(winding(|w| w * w * w, &boxed, 8), Ok(3));
        assert_eq!(winding(|w| w, &unit, 8), winding(|w| w, &unit, 1024));
        assert_eq!(winding(|w| w - 1.0, &unit, 64), Err(BianalyticError::ContourThroughZero));
    }

    #[test]
    fn coprimality_enforced() {
        let p = vec![c(-1.0, 0.0), c(1.0, 0.0)];
        let q = vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(RationalFn::new(p, q), Err(BianalyticError::NonCoprime(1)));
        assert!(RationalFn::new(vec![c(1.0, 0.0)], vec![]).is_err());
    }

    #[test]
    fn inverse_powers() {
        for m in 2..=5 {
            let sol = solve_ef(&RationalFn::inverse_power(m)).unwrap();
            assert_eq!(sol.roots.len(), m - 1);
            assert_eq!(sol.index_sum, m as i32 - 1);
            assert!(!sol.infinity_member);
            for r in &sol.roots {
                assert!((r.root.powi(m as i32 - 1) - 1.0).norm() < 1e-9);
                assert_eq!(r.index, 1);
            }
        }
    }

    #[test]
    fn square_map_has_five_points() {
        let f = rf(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0)]);
        let sol = solve_ef(&f).unwrap();
        assert!(sol.infinity_member);
        assert_eq!(sol.cardinality(), 5);
        assert_eq!(sol.index_sum, 1);
        assert_eq!(sol.infinity_index, Some(-1));
        let (g, _) = normalize_at_infinity(&f, NormalizeGoal::InfinityNotInEf).unwrap();
        assert!(!g.infinity_in_ef());
        assert_eq!(solve_ef(&g).unwrap().roots.len(), 5);
    }

    #[test]
    fn move_root_to_infinity() {
        let f = RationalFn::inverse_power(2);
        let (g, mm) = normalize_at_infinity(&f, NormalizeGoal::InfinityNotInEf).unwrap();
        assert_eq!(g, f);
        assert_eq!(mm, MobiusMat::identity());
        let (g, mm) = normalize_at_infinity(&f, NormalizeGoal::InfinityInEf).unwrap();
        assert!(g.infinity_in_ef());
        assert!(mm.apply_finite(c(1.0, 0.0)).as_finite().is_none_or(|z| z.norm() > 1e8));
    }

    #[test]
    fn low_degree_delegation() {
        let s = MobiusMat::diag(1.0);
        let sol = solve_ef(&RationalFn::from_mobius(&s)).unwrap();
        assert!(sol.infinity_member);
        assert_eq!(sol.roots.len(), 1);
        assert!(sol.roots[0].root.norm() < 1e-14);
        let f = rf(&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0)]);
        assert!(matches!(solve_ef(&f), Err(BianalyticError::DegenerateNondiscrete(_))));
        let f = rf(&[(2.0, 1.0)], &[(1.0, 0.0)]);
        let sol = solve_ef(&f).unwrap();
        assert!((sol.roots[0].root - c(2.0, -1.0)).norm() < 1e-14);
        assert_eq!(sol.index_sum, -1);
    }

    #[test]
    fn local_index_examples() {
        let f = rf(&[(0.0, 0.0), (2.0, 0.0)], &[(1.0, 0.0)]);
        assert_eq!(local_index(&f, c(0.0, 0.0)), Ok(1));
        let f = rf(&[(0.0, 0.0), (0.5, 0.0)], &[(1.0, 0.0)]);
        assert_eq!(local_index(&f, c(0.0, 0.0)), Ok(-1));
        assert_eq!(local_index(&RationalFn::inverse_power(2), c(1.0, 0.0)), Ok(1));
        assert!(local_index(&RationalFn::inverse_power(2), c(3.0, 0.0)).is_err());
    }

    #[test]
    fn bound_examples() {
        let r = bounds_report(&RationalFn::inverse_power(6)).unwrap();
        assert!(r.flags.contains(&BoundFlag::FlatForcedDegree));
        let r = bounds_report(&RationalFn::inverse_power(3)).unwrap();
        assert_eq!((r.e_count, r.q1_window, r.flags.len()), (2, [2, 4], 0));
        let r = bounds_report(&RationalFn::inverse_power(2)).unwrap();
        assert_eq!((r.e_count, r.q1_window, r.flags.len()), (1, [1, 4], 0));
    }
}
