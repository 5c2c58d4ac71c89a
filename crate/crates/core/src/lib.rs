//! Finite-dimensional dilation theory with checkable outputs.
//!
//! Every construction here returns the dilating object together with the
//! residuals that certify it: feature embeddings of positive definite
//! kernels, Stinespring pairs of completely positive maps, Naimark
//! dilations of POVMs, unitary power dilations of contractions, and
//! finite-horizon towers for unital completely positive maps. Decision
//! procedures (complete positivity, the subnormality inequalities, spectral
//! set and von Neumann checks) report verdicts with witnesses.
//!
//! ```
//! use dilation::cp::{stinespring, MatrixMap};
//! use dilation::linalg::Tolerance;
//!
//! let tol = Tolerance::default();
//! let phi = MatrixMap::depolarizing(2);
//! let pair = stinespring(&phi, &tol).unwrap();
//! assert!(pair.dilation_residual(&phi) < 1e-9);
//! assert!(pair.is_minimal(&tol));
//! ```

pub mod cli;
pub mod contraction;
pub mod cp;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod povm;
pub mod random;
pub mod subnormal;
pub mod tower;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, Tolerance};
