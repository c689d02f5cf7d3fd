//! Total Gauss curvature `∫ K dA` by exhaustion.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Prepared, Region, WData, WeierstrassError};
use crate::hyperplanes::Exhaustion;
use crate::quadrature::integrate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TotalCurvature {
    /// `value` integrates `K dA`, `absolute` integrates `|K| dA`.
    Finite { value: f64, absolute: f64, levels: usize },
    /// Absolute curvature per level.
    Diverges { absolute: Vec<f64> },
    Inconclusive { absolute: Vec<f64> },
}

impl TotalCurvature {
    pub fn value(&self) -> Option<f64> {
        match self {
            TotalCurvature::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }
}

struct Density<'a> {
    p: Prepared<'a>,
    center: Complex64,
    error: Option<WeierstrassError>,
}

impl Density<'_> {
    /// `[K λ² r², |K λ²| r²]` in log-polar coordinates `z = center + e^{t + iθ}`.
    fn log_polar(&mut self, t: f64, th: f64) -> [f64; 2] {
        let r = t.exp();
        let z = self.center + Complex64::from_polar(r, th);
        match self.p.curvature_density(z) {
            Ok(v) if v.is_finite() => [v * r * r, v.abs() * r * r],
            Ok(_) => {
                self.error.get_or_insert(WeierstrassError::PoleHit(z));
                [0.0, 0.0]
            }
            Err(e) => {
                self.error.get_or_insert(e);
                [0.0, 0.0]
            }
        }
    }

    fn cartesian(&mut self, x: f64, y: f64) -> [f64; 2] {
        match self.p.curvature_density(Complex64::new(x, y)) {
            Ok(v) if v.is_finite() => [v, v.abs()],
            Ok(_) => {
                self.error.get_or_insert(WeierstrassError::PoleHit(Complex64::new(x, y)));
                [0.0, 0.0]
            }
            Err(e) => {
                self.error.get_or_insert(e);
                [0.0, 0.0]
            }
        }
    }
}

const INNER: (f64, f64, usize) = (1e-11, 1e-9, 200);
const OUTER: (f64, f64, usize) = (1e-10, 1e-9, 200);

/// Integral over the log-polar shell `t ∈ [t0, t1]`.
fn shell(d: &mut Density, t0: f64, t1: f64) -> [f64; 2] {
    if t1 <= t0 {
        return [0.0, 0.0];
    }
    integrate(
        |t| integrate(|th| d.log_polar(t, th), 0.0, TAU, INNER.0, INNER.1, INNER.2).value,
        t0,
        t1,
        OUTER.0,
        OUTER.1,
        OUTER.2,
    )
    .value
}

/// `∫ K dA = ∫ K λ² dx dy` over the domain. Finite rectangles and annuli are
/// integrated directly; unbounded annuli are exhausted by `1/R_k ≤ r ≤ R_k`
/// with `R_k = first·2^{k−1}`, decided as for hyperplane areas: `Finite` once
/// both the signed and absolute integrals change by less than the tolerance,
/// `Diverges` when the absolute integral at the divergence level exceeds that
/// many times the first level.
pub fn total_curvature(w: &WData, schedule: &Exhaustion) -> Result<TotalCurvature, WeierstrassError> {
    let mut d = Density { p: Prepared::new(w), center: Complex64::new(0.0, 0.0), error: None };
    match w.domain.region {
        Region::Rectangle { re, im } => {
            let v = integrate(
                |x| integrate(|y| d.cartesian(x, y), im[0], im[1], INNER.0, INNER.1, INNER.2).value,
                re[0],
                re[1],
                OUTER.0,
                OUTER.1,
                OUTER.2,
            )
            .value;
            if let Some(e) = d.error {
                return Err(e);
            }
            Ok(TotalCurvature::Finite { value: v[0], absolute: v[1], levels: 1 })
        }
        Region::Annulus { center, inner, outer } => {
            d.center = center;
            let t_in = |rk: f64| if inner > 0.0 { inner.ln() } else { -rk.ln() };
            let t_out = |rk: f64| outer.map_or(rk.ln(), f64::ln);
            if inner > 0.0 && outer.is_some() {
                let v = shell(&mut d, t_in(1.0), t_out(1.0));
                if let Some(e) = d.error {
                    return Err(e);
                }
                return Ok(TotalCurvature::Finite { value: v[0], absolute: v[1], levels: 1 });
            }
            let mut absolute = Vec::new();
            let mut lo = 0.0;
            let mut hi = 0.0;
            let mut acc = [0.0, 0.0];
            for k in 1..=schedule.max_levels {
                let rk = schedule.first * 2f64.powi(k as i32 - 1);
                let (nlo, nhi) = (t_in(rk), t_out(rk));
                let add = if k == 1 {
                    shell(&mut d, nlo, nhi)
                } else {
                    let a = shell(&mut d, nlo, lo);
                    let b = shell(&mut d, hi, nhi);
                    [a[0] + b[0], a[1] + b[1]]
                };
                if let Some(e) = d.error.take() {
                    return match e {
                        WeierstrassError::PoleHit(_) => Ok(TotalCurvature::Inconclusive { absolute }),
                        other => Err(other),
                    };
                }
                lo = nlo;
                hi = nhi;
                acc = [acc[0] + add[0], acc[1] + add[1]];
                absolute.push(acc[1]);
                if k == schedule.divergence_level
                    && acc[1] > schedule.tolerance
                    && acc[1] >= k as f64 * absolute[0]
                {
                    return Ok(TotalCurvature::Diverges { absolute });
                }
                if k >= 2 && add[0].abs() < schedule.tolerance && add[1] < schedule.tolerance {
                    return Ok(TotalCurvature::Finite { value: acc[0], absolute: acc[1], levels: k });
                }
            }
            Ok(TotalCurvature::Inconclusive { absolute })
        }
    }
}
