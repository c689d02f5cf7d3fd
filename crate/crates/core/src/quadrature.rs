//! One-dimensional quadrature rules: adaptive Gauss–Kronrod (7/15), fixed
//! Gauss–Legendre and the periodic trapezoid rule.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be integrated: real or complex scalars and short vectors of them.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

impl<V: QuadValue, const N: usize> QuadValue for [V; N] {
    fn zero() -> Self {
        [V::zero(); N]
    }
    fn add(self, other: Self) -> Self {
        std::array::from_fn(|i| self[i].add(other[i]))
    }
    fn scale(self, s: f64) -> Self {
        self.map(|v| v.scale(s))
    }
    fn magnitude(self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.magnitude()))
    }
}

/// 15-point Kronrod estimate and its difference from the embedded 7-point Gauss rule.
fn gk15<V: QuadValue>(f: &mut impl FnMut(f64) -> V, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc.scale(WGK[7]);
    let mut gauss = fc.scale(WG[3]);
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        let pair = f1.add(f2);
        kronrod = kronrod.add(pair.scale(w));
        if j % 2 == 1 {
            gauss = gauss.add(pair.scale(WG[j / 2]));
        }
    }
    let kronrod = kronrod.scale(h);
    let gauss = gauss.scale(h);
    let err = kronrod.add(gauss.scale(-1.0)).magnitude();
    (kronrod, err)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<V> {
    pub value: V,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod quadrature on `[a, b]`. Bisects the
/// segment with the largest error estimate until the total estimate is
/// below `max(abs_tol, rel_tol·|I|)` or `max_segments` is reached.
pub fn integrate<V: QuadValue>(
    mut f: impl FnMut(f64) -> V,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Quadrature<V> {
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut evaluations = 15;
    loop {
        let (total, err) = heap
            .iter()
            .fold((V::zero(), 0.0), |(v, e), s| (v.add(s.value), e + s.error));
        let converged = err <= abs_tol.max(rel_tol * total.magnitude());
        if converged || heap.len() >= max_segments {
            return Quadrature { value: total, error: err, converged, evaluations };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            let (total, err) = heap
                .iter()
                .fold((V::zero(), 0.0), |(v, e), s| (v.add(s.value), e + s.error));
            return Quadrature { value: total, error: err, converged: false, evaluations };
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&mut f, lo, hi);
            heap.push(Segment { a: lo, b: hi, value, error });
        }
        evaluations += 30;
    }
}

/// Seven-point Gauss–Legendre rule on `[a, b]` (the Gauss nodes of the Kronrod pair).
pub fn gauss_legendre7<V: QuadValue>(mut f: impl FnMut(f64) -> V, a: f64, b: f64) -> V {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = f(c).scale(WG[3]);
    for k in 0..3 {
        let x = XGK[2 * k + 1];
        acc = acc.add(f(c - h * x).add(f(c + h * x)).scale(WG[k]));
    }
    acc.scale(h)
}

/// Trapezoid rule for `∮ g(z) dz` over the circle `|z − center| = radius`,
/// with `nodes` equispaced points.
pub fn circle_trapezoid(
    mut g: impl FnMut(Complex64) -> Complex64,
    center: Complex64,
    radius: f64,
    nodes: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let e = Complex64::from_polar(1.0, TAU * k as f64 / nodes as f64);
        let z = center + e * radius;
        acc += g(z) * (Complex64::i() * e * radius);
    }
    acc * (TAU / nodes as f64)
}

/// Periodic trapezoid rule for `∫₀^{2π} g(θ) dθ`.
pub fn periodic_trapezoid<V: QuadValue>(mut g: impl FnMut(f64) -> V, nodes: usize) -> V {
    let mut acc = V::zero();
    for k in 0..nodes {
        acc = acc.add(g(TAU * k as f64 / nodes as f64));
    }
    acc.scale(TAU / nodes as f64)
}
