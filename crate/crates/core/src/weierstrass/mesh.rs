//! Surfaces `x = Re ∫ φ` on parameter grids, the dual immersion and mesh export.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{loop_integrals, Prepared, WData, WeierstrassError};
use crate::extended::ExtComplex;
use crate::minkowski::CVec;
use crate::quadrature::{integrate, Quadrature};

/// Parameter grid: `n × m` vertices of a rectangle, or `n_r × n_theta`
/// vertices of a polar grid whose angular direction is periodic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    Rect { re: [f64; 2], im: [f64; 2], n: usize, m: usize },
    Polar { center: Complex64, radii: [f64; 2], n_r: usize, n_theta: usize },
}

impl GridSpec {
    fn validate(&self) -> Result<(), WeierstrassError> {
        let bad = |m: &str| Err(WeierstrassError::InvalidGrid(m.to_string()));
        match *self {
            GridSpec::Rect { re, im, n, m } => {
                if n < 2 || m < 2 {
                    return bad("rectangular grids need at least 2 x 2 vertices");
                }
                if !(re[0] < re[1] && im[0] < im[1]) {
                    return bad("rectangle bounds must be increasing");
                }
            }
            GridSpec::Polar { radii, n_r, n_theta, .. } => {
                if n_r < 2 || n_theta < 3 {
                    return bad("polar grids need at least 2 radii and 3 angles");
                }
                if !(radii[0] > 0.0 && radii[0] < radii[1]) {
                    return bad("polar radii must satisfy 0 < r_min < r_max");
                }
            }
        }
        Ok(())
    }

    /// Vertex counts along the first and second grid directions.
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            GridSpec::Rect { n, m, .. } => (n, m),
            GridSpec::Polar { n_r, n_theta, .. } => (n_r, n_theta),
        }
    }

    fn periodic(&self) -> bool {
        matches!(self, GridSpec::Polar { .. })
    }

    fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        match *self {
            GridSpec::Rect { re, im, n, m } => (
                re[0] + (re[1] - re[0]) * i as f64 / (n - 1) as f64,
                im[0] + (im[1] - im[0]) * j as f64 / (m - 1) as f64,
            ),
            GridSpec::Polar { radii, n_r, n_theta, .. } => {
                let (l0, l1) = (radii[0].ln(), radii[1].ln());
                ((l0 + (l1 - l0) * i as f64 / (n_r - 1) as f64).exp(), TAU * j as f64 / n_theta as f64)
            }
        }
    }

    fn point_at(&self, a: f64, b: f64) -> Complex64 {
        match *self {
            GridSpec::Rect { .. } => Complex64::new(a, b),
            GridSpec::Polar { center, .. } => center + Complex64::from_polar(a, b),
        }
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let (a, b) = self.coords(i, j);
        self.point_at(a, b)
    }

    fn nearest(&self, z: Complex64) -> (usize, usize) {
        let (n, m) = self.dims();
        let mut best = (0, 0);
        let mut dist = f64::INFINITY;
        for i in 0..n {
            for j in 0..m {
                let d = (self.point(i, j) - z).norm();
                if d < dist {
                    dist = d;
                    best = (i, j);
                }
            }
        }
        best
    }
}

/// Sampled surface. Vertex `(i, j)` has index `j·n + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub grid: GridSpec,
    pub params: Vec<Complex64>,
    pub positions: Vec<[f64; 4]>,
    /// `λ²` in `ds² = λ²|dz|²`.
    pub lambda2: Vec<f64>,
    /// Gauss curvature; NaN where the metric degenerates.
    pub curvature: Vec<f64>,
    pub faces: Vec<[usize; 3]>,
    pub base: usize,
    /// Whether the periodic direction of a polar grid is glued.
    pub seam_closed: bool,
    /// Largest position discrepancy over the alternative integration paths.
    pub path_discrepancy: f64,
    pub diameter: f64,
}

type Form<'a> = dyn Fn(Complex64) -> Result<CVec, WeierstrassError> + 'a;

struct Integrator<'a> {
    grid: GridSpec,
    form: &'a Form<'a>,
}

impl Integrator<'_> {
    /// `∫ form` along one grid edge: a segment in the first direction from
    /// coordinate `a0` to `a1` at fixed `b`, or in the second direction.
    fn edge(&self, first: bool, fixed: f64, from: f64, to: f64) -> Result<[Complex64; 4], WeierstrassError> {
        let mut err = None;
        let grid = self.grid;
        let integrand = |t: f64| -> [Complex64; 4] {
            let s = from + (to - from) * t;
            let (z, dz) = match (grid, first) {
                (GridSpec::Rect { .. }, true) => (Complex64::new(s, fixed), Complex64::new(to - from, 0.0)),
                (GridSpec::Rect { .. }, false) => (Complex64::new(fixed, s), Complex64::new(0.0, to - from)),
                (GridSpec::Polar { center, .. }, true) => {
                    let e = Complex64::from_polar(1.0, fixed);
                    (center + e * s, e * (to - from))
                }
                (GridSpec::Polar { center, .. }, false) => {
                    let e = Complex64::from_polar(fixed, s);
                    (center + e, Complex64::new(0.0, 1.0) * e * (to - from))
                }
            };
            match (self.form)(z) {
                Ok(phi) => phi.0.map(|v| v * dz),
                Err(e) => {
                    err.get_or_insert(e);
                    [Complex64::new(0.0, 0.0); 4]
                }
            }
        };
        let q: Quadrature<[Complex64; 4]> = integrate(integrand, 0.0, 1.0, 1e-13, 1e-12, 200);
        match err {
            Some(e) => Err(e),
            None => Ok(q.value),
        }
    }

    fn first_step(&self, i: usize, j: usize, forward: bool) -> Result<[Complex64; 4], WeierstrassError> {
        let (a0, b) = self.grid.coords(i, j);
        let (a1, _) = self.grid.coords(if forward { i + 1 } else { i - 1 }, j);
        self.edge(true, b, a0, a1)
    }

    /// Step in the second direction from `j` to `j + 1` (wrapping on polar grids).
    fn second_step(&self, i: usize, j: usize, forward: bool) -> Result<[Complex64; 4], WeierstrassError> {
        let (a, b0) = self.grid.coords(i, j);
        let db = match self.grid {
            GridSpec::Rect { im, m, .. } => (im[1] - im[0]) / (m - 1) as f64,
            GridSpec::Polar { n_theta, .. } => TAU / n_theta as f64,
        };
        let b1 = if forward { b0 + db } else { b0 - db };
        self.edge(false, a, b0, b1)
    }

    /// Integral along the first direction from `i0` to `i` at row `j`.
    fn along_first(&self, j: usize, i0: usize, i: usize) -> Result<[Complex64; 4], WeierstrassError> {
        let mut acc = [Complex64::new(0.0, 0.0); 4];
        let mut k = i0;
        while k != i {
            let fwd = i > k;
            let step = self.first_step(k, j, fwd)?;
            add(&mut acc, &step);
            k = if fwd { k + 1 } else { k - 1 };
        }
        Ok(acc)
    }

    /// Integral along the second direction from `j0` to `j` at column `i`;
    /// polar grids always advance in the positive angular direction.
    fn along_second(&self, i: usize, j0: usize, j: usize) -> Result<[Complex64; 4], WeierstrassError> {
        let (_, m) = self.grid.dims();
        let mut acc = [Complex64::new(0.0, 0.0); 4];
        let mut k = j0;
        while k != j {
            let fwd = self.grid.periodic() || j > k;
            let step = self.second_step(i, k, fwd)?;
            add(&mut acc, &step);
            k = if fwd { (k + 1) % m } else { k - 1 };
        }
        Ok(acc)
    }
}

fn add(acc: &mut [Complex64; 4], v: &[Complex64; 4]) {
    for k in 0..4 {
        acc[k] += v[k];
    }
}

struct Integrated {
    values: Vec<[Complex64; 4]>,
    seam_gap: f64,
    path_discrepancy: f64,
    base: usize,
}

/// Accumulates `∫ form` from the base vertex: first along the base row,
/// then along every column. On polar grids the columns run once around in
/// the positive direction, so the seam before the base angle is a cut.
fn integrate_grid(grid: GridSpec, base: Complex64, form: &Form) -> Result<Integrated, WeierstrassError> {
    let (n, m) = grid.dims();
    let integ = Integrator { grid, form };
    let (ib, jb) = grid.nearest(base);
    let mut values = vec![[Complex64::new(0.0, 0.0); 4]; n * m];
    let mut row = vec![[Complex64::new(0.0, 0.0); 4]; n];
    for i in (0..ib).rev() {
        let step = integ.first_step(i + 1, jb, false)?;
        row[i] = row[i + 1];
        add(&mut row[i], &step);
    }
    for i in ib + 1..n {
        let step = integ.first_step(i - 1, jb, true)?;
        row[i] = row[i - 1];
        add(&mut row[i], &step);
    }
    let order: Vec<usize> = if grid.periodic() {
        (0..m).map(|k| (jb + k) % m).collect()
    } else {
        (jb..m).chain((0..jb).rev()).collect()
    };
    let mut seam_gap = 0.0f64;
    for i in 0..n {
        values[jb * n + i] = row[i];
        let mut prev = jb;
        for &j in order.iter().skip(1) {
            let (from, fwd) = if grid.periodic() || j > jb {
                (prev, true)
            } else {
                (j + 1, false)
            };
            let step = integ.second_step(i, from, fwd)?;
            let mut v = values[from * n + i];
            add(&mut v, &step);
            values[j * n + i] = v;
            prev = j;
        }
        if grid.periodic() {
            let step = integ.second_step(i, prev, true)?;
            let mut v = values[prev * n + i];
            add(&mut v, &step);
            let gap = (0..4).fold(0.0f64, |g, k| g.max((v[k] - values[jb * n + i][k]).re.abs()));
            seam_gap = seam_gap.max(gap);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_9a75);
    let mut discrepancy = 0.0f64;
    for _ in 0..10 {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..m);
        let mut alt = integ.along_second(ib, jb, j)?;
        let rest = integ.along_first(j, ib, i)?;
        add(&mut alt, &rest);
        let v = values[j * n + i];
        let d = (0..4).fold(0.0f64, |g, k| g.max((alt[k] - v[k]).re.abs()));
        discrepancy = discrepancy.max(d);
    }
    Ok(Integrated { values, seam_gap, path_discrepancy: discrepancy, base: jb * n + ib })
}

fn faces(n: usize, m: usize, wrap: bool) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    let rows = if wrap { m } else { m - 1 };
    for j in 0..rows {
        let j1 = (j + 1) % m;
        for i in 0..n - 1 {
            let a = j * n + i;
            let b = j * n + i + 1;
            let c = j1 * n + i + 1;
            let d = j1 * n + i;
            out.push([a, b, c]);
            out.push([a, c, d]);
        }
    }
    out
}

fn diameter(positions: &[[f64; 4]]) -> f64 {
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [f64::NEG_INFINITY; 4];
    for p in positions {
        for k in 0..4 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (0..4).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
}

const REAL_PERIOD_TOL: f64 = 1e-6;

/// Integrates `x = Re ∫ φ` over `grid` starting from the grid vertex nearest
/// to `base`, with per-vertex `λ²` and `K`. Real periods above 1e−6 on the
/// domain's test loops or across the seam of a polar grid are an error.
pub fn integrate_surface(w: &WData, grid: GridSpec, base: Complex64) -> Result<SurfaceMesh, WeierstrassError> {
    grid.validate()?;
    for l in &w.domain.loops {
        let rep = loop_integrals(w, l)?;
        let worst = rep.real_periods().iter().fold(0.0f64, |m, p| m.max(p.abs()));
        if worst > REAL_PERIOD_TOL {
            return Err(WeierstrassError::PeriodObstruction {
                period: worst,
                context: format!("loop |z - {}| = {}", l.center, l.radius),
            });
        }
    }
    let p = Prepared::new(w);
    let form = |z: Complex64| p.phi(z);
    let res = integrate_grid(grid, base, &form)?;
    if res.seam_gap > REAL_PERIOD_TOL {
        return Err(WeierstrassError::PeriodObstruction {
            period: res.seam_gap,
            context: "around the polar grid".into(),
        });
    }
    let (n, m) = grid.dims();
    let params: Vec<Complex64> = (0..m).flat_map(|j| (0..n).map(move |i| (i, j))).map(|(i, j)| grid.point(i, j)).collect();
    let positions: Vec<[f64; 4]> = res.values.iter().map(|v| v.map(|c| c.re)).collect();
    let lambda2 = params.iter().map(|&z| p.ds2(z).unwrap_or(0.0)).collect();
    let curvature = params.iter().map(|&z| p.gauss_k(z).unwrap_or(f64::NAN)).collect();
    let diam = diameter(&positions);
    if res.path_discrepancy > REAL_PERIOD_TOL * diam.max(1.0) {
        return Err(WeierstrassError::PeriodObstruction {
            period: res.path_discrepancy,
            context: "integration paths disagree".into(),
        });
    }
    Ok(SurfaceMesh {
        grid,
        params,
        positions,
        lambda2,
        curvature,
        faces: faces(n, m, grid.periodic()),
        base: res.base,
        seam_closed: grid.periodic(),
        path_discrepancy: res.path_discrepancy,
        diameter: diam,
    })
}

/// Pointwise identities checked on the dual immersion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualChecks {
    /// `max |Σ (φₖ*)²| / Σ|φₖ*|²`.
    pub null_residual: f64,
    /// `max |(ds*)² − ds² − 2|φ₄|²| / (ds*)²`.
    pub domination_residual: f64,
    /// `min ((ds*)² − ds²)`; nonnegative when the metric is dominated.
    pub min_domination: f64,
    /// Largest chordal distance between `ψᵢ*` recovered from `φ*` and `ψᵢ`.
    pub wdata_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSurface {
    /// Positions of `x* = Re ∫ φ*` in `R⁴`; `lambda2` holds `(ds*)²` and
    /// `curvature` the Gauss curvature of `x*`.
    pub mesh: SurfaceMesh,
    pub checks: DualChecks,
}

fn ratio(num: Complex64, den: Complex64) -> ExtComplex {
    if den == Complex64::new(0.0, 0.0) {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite(num / den)
    }
}

/// The dual minimal immersion `x* = Re ∫ (φ₁, φ₂, φ₃, iφ₄)` in `R⁴`. It may be
/// multivalued where `φ₄` has imaginary periods; the polar seam is then cut.
pub fn dual_immersion(w: &WData, grid: GridSpec, base: Complex64) -> Result<DualSurface, WeierstrassError> {
    grid.validate()?;
    let p = Prepared::new(w);
    let form = |z: Complex64| {
        let mut phi = p.phi(z)?;
        phi.0[3] *= Complex64::new(0.0, 1.0);
        Ok(phi)
    };
    let res = integrate_grid(grid, base, &form)?;
    let (n, m) = grid.dims();
    let params: Vec<Complex64> = (0..m).flat_map(|j| (0..n).map(move |i| (i, j))).map(|(i, j)| grid.point(i, j)).collect();
    let positions: Vec<[f64; 4]> = res.values.iter().map(|v| v.map(|c| c.re)).collect();
    let mut checks = DualChecks {
        null_residual: 0.0,
        domination_residual: 0.0,
        min_domination: f64::INFINITY,
        wdata_residual: 0.0,
    };
    let mut lambda2 = Vec::with_capacity(params.len());
    let mut curvature = Vec::with_capacity(params.len());
    for &z in &params {
        let phi = p.phi(z)?;
        let i = Complex64::new(0.0, 1.0);
        let star = CVec::new([phi.0[0], phi.0[1], phi.0[2], i * phi.0[3]]);
        let ds_star: f64 = star.0.iter().map(|v| v.norm_sqr()).sum();
        let ds = phi.hermitian(&phi).re;
        let null: Complex64 = star.0.iter().map(|v| v * v).sum();
        if ds_star > 0.0 {
            checks.null_residual = checks.null_residual.max(null.norm() / ds_star);
            let dom = ds_star - ds - 2.0 * phi.0[3].norm_sqr();
            checks.domination_residual = checks.domination_residual.max(dom.abs() / ds_star);
        }
        checks.min_domination = checks.min_domination.min(ds_star - ds);
        let den = star.0[2] - i * star.0[3];
        let r1 = ratio(star.0[0] + i * star.0[1], den);
        let r2 = ratio(star.0[0] - i * star.0[1], den);
        let lim = |e: &super::Expr| match e.series(z).map(|s| s.order()) {
            Ok(Some(k)) if k < 0 => ExtComplex::Infinity,
            _ => e.eval_limit(z).map(ExtComplex::Finite).unwrap_or(ExtComplex::Infinity),
        };
        let d1 = r1.chordal_distance(&lim(&w.psi1));
        let d2 = r2.chordal_distance(&lim(&w.psi2));
        checks.wdata_residual = checks.wdata_residual.max(d1).max(d2);
        lambda2.push(ds_star);
        curvature.push(super::dual_gauss_k(w, z).unwrap_or(f64::NAN));
    }
    let seam_closed = grid.periodic() && res.seam_gap <= REAL_PERIOD_TOL;
    let diam = diameter(&positions);
    Ok(DualSurface {
        mesh: SurfaceMesh {
            grid,
            params,
            positions,
            lambda2,
            curvature,
            faces: faces(n, m, seam_closed),
            base: res.base,
            seam_closed,
            path_discrepancy: res.path_discrepancy,
            diameter: diam,
        },
        checks,
    })
}

impl SurfaceMesh {
    /// Wavefront OBJ: `v x1 x2 x3` per vertex followed by a `# t x4` comment,
    /// then 1-based triangular faces.
    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        for p in &self.positions {
            let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
            let _ = writeln!(s, "# t {}", p[3]);
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        s
    }

    /// CSV with columns `z_re,z_im,x1,x2,x3,x4,lambda2,K`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("z_re,z_im,x1,x2,x3,x4,lambda2,K\n");
        for k in 0..self.params.len() {
            let z = self.params[k];
            let p = self.positions[k];
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                z.re, z.im, p[0], p[1], p[2], p[3], self.lambda2[k], self.curvature[k]
            );
        }
        s
    }
}
