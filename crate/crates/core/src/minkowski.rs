//! Real and complexified Minkowski space `R^{3,1}` with signature `(+,+,+,-)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extended::ExtComplex;
use crate::scalar::Scalar;

/// Diagonal of the Minkowski metric.
pub const ETA: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

/// Default relative tolerance for null/zero decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinkowskiError {
    #[error("frame is not Minkowski-orthonormal (max deviation {0:e})")]
    NonOrthonormal(f64),
    #[error("frame has negative orientation")]
    WrongOrientation,
    #[error("frame reverses time orientation")]
    TimeReversing,
    #[error("point is not on the unit sphere (|x| = {0})")]
    NotUnitSphere(f64),
}

fn eta<T: Scalar>(i: usize) -> T {
    T::lit(ETA[i])
}

/// A real 4-vector `(x1, x2, x3, x4)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkVec<T = f64>(pub [T; 4]);

impl<T: Scalar> MinkVec<T> {
    pub fn new(x1: T, x2: T, x3: T, x4: T) -> Self {
        MinkVec([x1, x2, x3, x4])
    }

    /// Standard basis vector `ε_{i+1}` (zero-based index).
    pub fn basis(i: usize) -> Self {
        let mut c = [T::zero(); 4];
        c[i] = T::one();
        MinkVec(c)
    }

    pub fn zero() -> Self {
        MinkVec([T::zero(); 4])
    }

    pub fn components(&self) -> [T; 4] {
        self.0
    }

    /// Minkowski inner product `u1v1 + u2v2 + u3v3 - u4v4`.
    pub fn inner(&self, other: &Self) -> T {
        (0..4).fold(T::zero(), |acc, i| acc + eta::<T>(i) * self.0[i] * other.0[i])
    }

    pub fn euclid_norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        MinkVec(self.0.map(|x| x * s))
    }

    pub fn wedge(&self, other: &Self) -> Bivec<T> {
        let mut b = [T::zero(); 6];
        for (k, &(i, j)) in BIVEC_INDEX.iter().enumerate() {
            b[k] = self.0[i] * other.0[j] - self.0[j] * other.0[i];
        }
        Bivec(b)
    }

    pub fn to_complex(&self) -> CVec<T> {
        CVec(self.0.map(|x| Complex::new(x, T::zero())))
    }
}

impl<T: Scalar> Add for MinkVec<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        MinkVec(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl<T: Scalar> Sub for MinkVec<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        MinkVec(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl<T: Scalar> Neg for MinkVec<T> {
    type Output = Self;
    fn neg(self) -> Self {
        MinkVec(self.0.map(|x| -x))
    }
}

/// Minkowski inner product of two real vectors.
pub fn mink_inner<T: Scalar>(u: &MinkVec<T>, v: &MinkVec<T>) -> T {
    u.inner(v)
}

/// A complex 4-vector in `C^{3,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CVec<T = f64>(pub [Complex<T>; 4]);

impl<T: Scalar> CVec<T> {
    pub fn new(z: [Complex<T>; 4]) -> Self {
        CVec(z)
    }

    /// `X + iY` from real and imaginary parts.
    pub fn from_parts(re: &MinkVec<T>, im: &MinkVec<T>) -> Self {
        CVec(std::array::from_fn(|i| Complex::new(re.0[i], im.0[i])))
    }

    pub fn re(&self) -> MinkVec<T> {
        MinkVec(self.0.map(|z| z.re))
    }

    pub fn im(&self) -> MinkVec<T> {
        MinkVec(self.0.map(|z| z.im))
    }

    pub fn conj(&self) -> Self {
        CVec(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        CVec(self.0.map(|z| z * s))
    }

    /// Complex-bilinear extension of the Minkowski form.
    pub fn bilinear(&self, other: &Self) -> Complex<T> {
        (0..4).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self.0[i] * other.0[i] * eta::<T>(i)
        })
    }

    /// Hermitian form `z1w̄1 + z2w̄2 + z3w̄3 - z4w̄4`.
    pub fn hermitian(&self, other: &Self) -> Complex<T> {
        self.bilinear(&other.conj())
    }

    /// Euclidean norm of the underlying `C^4` vector.
    pub fn norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    pub fn max_modulus(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }
}

impl<T: Scalar> Add for CVec<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        CVec(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl<T: Scalar> Sub for CVec<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        CVec(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

pub fn cmink_bilinear<T: Scalar>(z: &CVec<T>, w: &CVec<T>) -> Complex<T> {
    z.bilinear(w)
}

pub fn cmink_hermitian<T: Scalar>(z: &CVec<T>, w: &CVec<T>) -> Complex<T> {
    z.hermitian(w)
}

/// Index pairs of the bivector basis, in storage order (12,13,14,23,24,34).
pub const BIVEC_INDEX: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// A real bivector in `Λ²R^{3,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bivec<T = f64>(pub [T; 6]);

impl<T: Scalar> Bivec<T> {
    /// Inner product induced on `Λ²` by the Minkowski form. The basis
    /// `{e_i ∧ e_j}` is orthogonal with `⟨e_i∧e_j, e_i∧e_j⟩ = η_i η_j`.
    pub fn inner(&self, other: &Self) -> T {
        BIVEC_INDEX
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (k, &(i, j))| {
                acc + eta::<T>(i) * eta::<T>(j) * self.0[k] * other.0[k]
            })
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
    }
}

pub fn bivec_inner<T: Scalar>(b1: &Bivec<T>, b2: &Bivec<T>) -> T {
    b1.inner(b2)
}

/// Causal character of a real vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VectorType {
    Spacelike,
    Timelike,
    Null,
    Zero,
}

/// Classifies `u` with a relative tolerance band around the light cone.
pub fn classify_vector<T: Scalar>(u: &MinkVec<T>, tol: T) -> VectorType {
    let norm = u.euclid_norm();
    if norm <= tol {
        return VectorType::Zero;
    }
    let q = u.inner(u);
    if q.abs() <= tol * norm * norm {
        VectorType::Null
    } else if q > T::zero() {
        VectorType::Spacelike
    } else {
        VectorType::Timelike
    }
}

/// An element of `SO⁺(3,1)`, stored row-major.
///
/// Only built from frames, boosts, rotations and products of these, so the
/// group invariants hold up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzMat<T = f64>(pub [[T; 4]; 4]);

impl<T: Scalar> LorentzMat<T> {
    pub fn identity() -> Self {
        LorentzMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { T::one() } else { T::zero() })
        }))
    }

    /// Boost with rapidity `t` mixing spatial axis `axis` (0, 1 or 2) with time.
    pub fn boost(axis: usize, t: T) -> Self {
        assert!(axis < 3, "boost axis must be spatial");
        let mut m = Self::identity();
        m.0[axis][axis] = t.cosh();
        m.0[3][3] = t.cosh();
        m.0[axis][3] = t.sinh();
        m.0[3][axis] = t.sinh();
        m
    }

    /// Rotation by `angle` in the spatial coordinate plane `(i, j)`.
    pub fn rotation(i: usize, j: usize, angle: T) -> Self {
        assert!(i < 3 && j < 3 && i != j, "rotation plane must be spatial");
        let mut m = Self::identity();
        let (s, c) = angle.sin_cos();
        m.0[i][i] = c;
        m.0[j][j] = c;
        m.0[i][j] = -s;
        m.0[j][i] = s;
        m
    }

    /// Composition from three rotation angles followed by three rapidities.
    pub fn from_params(angles: [T; 3], rapidities: [T; 3]) -> Self {
        let rot = Self::rotation(0, 1, angles[0])
            .compose(&Self::rotation(1, 2, angles[1]))
            .compose(&Self::rotation(0, 2, angles[2]));
        let boost = Self::boost(0, rapidities[0])
            .compose(&Self::boost(1, rapidities[1]))
            .compose(&Self::boost(2, rapidities[2]));
        rot.compose(&boost)
    }

    /// The map sending each frame vector `e_i` to `ε_i`.
    pub fn from_frame(frame: [MinkVec<T>; 4]) -> Result<Self, MinkowskiError> {
        let mut dev = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { eta::<T>(i) } else { T::zero() };
                dev = dev.max((frame[i].inner(&frame[j]) - target).abs());
            }
        }
        let dev64 = dev.to_f64().unwrap_or(f64::INFINITY);
        if dev64 > 1e-8 {
            return Err(MinkowskiError::NonOrthonormal(dev64));
        }
        if frame[3].0[3] <= T::zero() {
            return Err(MinkowskiError::TimeReversing);
        }
        let cols: [[T; 4]; 4] = std::array::from_fn(|r| std::array::from_fn(|c| frame[c].0[r]));
        if det4(&cols) <= T::zero() {
            return Err(MinkowskiError::WrongOrientation);
        }
        // E^{-1} = η Eᵀ η for a Minkowski-orthonormal frame E.
        Ok(LorentzMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| eta::<T>(i) * eta::<T>(j) * frame[i].0[j])
        })))
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        LorentzMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).fold(T::zero(), |acc, k| acc + self.0[i][k] * rhs.0[k][j]))
        }))
    }

    pub fn inverse(&self) -> Self {
        LorentzMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| eta::<T>(i) * eta::<T>(j) * self.0[j][i])
        }))
    }

    pub fn apply(&self, u: &MinkVec<T>) -> MinkVec<T> {
        MinkVec(std::array::from_fn(|i| {
            (0..4).fold(T::zero(), |acc, j| acc + self.0[i][j] * u.0[j])
        }))
    }

    /// Complex-linear extension acting on `C^{3,1}`.
    pub fn apply_complex(&self, z: &CVec<T>) -> CVec<T> {
        CVec(std::array::from_fn(|i| {
            (0..4).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + z.0[j] * self.0[i][j])
        }))
    }

    pub fn det(&self) -> T {
        det4(&self.0)
    }

    /// Largest entry of `σᵀησ - η`.
    pub fn metric_defect(&self) -> T {
        let mut dev = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let v = (0..4).fold(T::zero(), |acc, k| {
                    acc + self.0[k][i] * eta::<T>(k) * self.0[k][j]
                });
                let target = if i == j { eta::<T>(i) } else { T::zero() };
                dev = dev.max((v - target).abs());
            }
        }
        dev
    }
}

impl<T: Scalar> Mul for LorentzMat<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det4<T: Scalar>(m: &[[T; 4]; 4]) -> T {
    let mut a = *m;
    let mut det = T::one();
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det = det * a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] = a[row][k] - f * a[col][k];
            }
        }
    }
    det
}

/// Inverse stereographic projection lifted to the light cone slice `x4 = 1`.
/// `∞` maps to `(0, 0, -1, 1)`.
pub fn stereographic<T: Scalar>(w: &ExtComplex<T>) -> MinkVec<T> {
    match w {
        ExtComplex::Infinity => MinkVec::new(T::zero(), T::zero(), -T::one(), T::one()),
        ExtComplex::Finite(w) => {
            let m = w.norm_sqr();
            let d = T::one() + m;
            let two = T::lit(2.0);
            MinkVec::new(two * w.re / d, two * w.im / d, (T::one() - m) / d, T::one())
        }
    }
}

/// Stereographic projection from `(0, 0, -1)` of a unit 3-vector.
pub fn stereographic_inv<T: Scalar>(x: [T; 3]) -> Result<ExtComplex<T>, MinkowskiError> {
    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if (n - T::one()).abs() > T::lit(1e-10).max(T::epsilon() * T::lit(16.0)) {
        return Err(MinkowskiError::NotUnitSphere(n.to_f64().unwrap_or(f64::NAN)));
    }
    let denom = T::one() + x[2];
    if denom <= T::lit(1e-300).max(T::min_positive_value()) {
        return Ok(ExtComplex::Infinity);
    }
    Ok(ExtComplex::Finite(Complex::new(x[0] / denom, x[1] / denom)))
}
