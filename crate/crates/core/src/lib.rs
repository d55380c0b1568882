//! Directional modulation for crossed-dipole linear arrays carrying two
//! signals with orthogonal polarisation states.
//!
//! Each composite symbol (one constellation point per polarisation channel)
//! gets its own transmit weight vector. The weights reproduce the exact
//! constellation pair toward the mainlobe and match randomly phased,
//! low-magnitude responses across the sidelobe grid, which scrambles the
//! constellation for eavesdroppers in any other direction.
//!
//! The numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the file formats
//! and the CLI use.
//!
//! ```
//! use xpol_dm::{io::DesignDocument, synthesis::synthesize_bank};
//!
//! let spec = DesignDocument::demo().to_spec().unwrap();
//! let bank = synthesize_bank(&spec).unwrap();
//! assert_eq!(bank.len(), 16);
//! assert!(bank.max_constraint_residual() < 1e-8);
//! ```

pub mod error;
pub mod evaluation;
pub mod io;
pub mod linalg;
pub mod modulation;
pub mod num;
pub mod steering;
pub mod synthesis;

pub use error::{Error, Result};
pub use num::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type ArrayGeometry = steering::ArrayGeometry<f64>;
pub type Direction = steering::Direction<f64>;
pub type PolarizationState = steering::PolarizationState<f64>;
pub type SteeringVector = steering::SteeringVector<f64>;
pub type TargetSet = modulation::TargetSet<f64>;
pub type DesignSpec = synthesis::DesignSpec<f64>;
pub type SteeringMatrices = synthesis::SteeringMatrices<f64>;
pub type WeightSet = synthesis::WeightSet<f64>;
pub type Solver = synthesis::Solver<f64>;
pub type PatternSample = evaluation::PatternSample<f64>;
pub type DirectionScrambling = evaluation::DirectionScrambling<f64>;
pub type CMatrix = linalg::CMatrix<f64>;

pub type DesignSpec32 = synthesis::DesignSpec<f32>;
pub type WeightSet32 = synthesis::WeightSet<f32>;
