//! Numerics for the Suris integrable standard map and its rigidity estimates.

pub mod action_angle;
pub mod basis;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod linalg;
pub mod numerics;
pub mod orbits;
pub mod potentials;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{kahan_sum, KahanSum, Real};

pub type SurisParams64 = potentials::SurisParams<f64>;
pub type Potential64 = potentials::Potential<f64>;
pub type PhasePoint64 = dynamics::PhasePoint<f64>;
pub type InvariantCurve64 = geometry::InvariantCurve<f64>;
pub type AngleChart64 = action_angle::AngleChart<f64>;
pub type InnerProductContext64 = basis::InnerProductContext<f64>;
pub type PeriodicConfiguration64 = orbits::PeriodicConfiguration<f64>;

pub type SurisParams32 = potentials::SurisParams<f32>;
pub type Potential32 = potentials::Potential<f32>;
