//! Hole probabilities of Ginibre ensembles and the rate constant `R_U`
//! through balayage energies, weighted Fekete points and exact determinants.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod potential;
pub mod balayage;
pub mod closed_forms;
pub mod extrapolate;
pub mod kostlan;
pub mod holeprob;
pub mod fekete;
pub mod io;

pub use closed_forms::{balayage_closed, catalog, r_prime_closed, r_u_closed};
pub use error::{Error, Result};
pub use geometry::{ComponentRole, CustomBoundary, Region};
pub use quadrature::QuadratureRule;
pub use scalar::{Cplx, Real};

pub type Region64 = Region<f64>;
pub type Region32 = Region<f32>;
pub type Complex64 = Cplx<f64>;
pub type Complex32 = Cplx<f32>;
pub type BoundaryMeasure64 = balayage::BoundaryMeasure<f64>;
pub type BalayageSolution64 = balayage::BalayageSolution<f64>;
pub type FeketeReport64 = fekete::FeketeReport<f64>;
pub type HoleMatrix64 = holeprob::HoleMatrix<f64>;
