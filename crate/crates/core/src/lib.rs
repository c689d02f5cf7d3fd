//! Computational geometry of space-like stationary surfaces in `R^{3,1}`.

mod scalar;

pub mod bianalytic;
pub mod conjsim;
pub mod extended;
pub mod hyperplanes;
pub mod minkowski;
pub mod mobius;
pub mod quadrature;
pub mod quadric;
pub mod weierstrass;

pub use extended::ExtComplex;
pub use minkowski::{Bivec, CVec, LorentzMat, MinkVec};
pub use mobius::MobiusMat;
pub use quadric::{ChartPair, Membership, ProjPoint};
pub use scalar::Scalar;

pub type MinkVec32 = minkowski::MinkVec<f32>;
pub type MinkVec64 = minkowski::MinkVec<f64>;
pub type LorentzMat32 = minkowski::LorentzMat<f32>;
pub type LorentzMat64 = minkowski::LorentzMat<f64>;
pub type ProjPoint32 = quadric::ProjPoint<f32>;
pub type ProjPoint64 = quadric::ProjPoint<f64>;
pub type ChartPair32 = quadric::ChartPair<f32>;
pub type ChartPair64 = quadric::ChartPair<f64>;
