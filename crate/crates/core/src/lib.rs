//! Aluthge transform laboratory.
//!
//! Computes `ΔT = |T|^{1/2} U |T|^{1/2}` for dense complex matrices, iterates
//! it to its normal limit, and measures what the iteration preserves: the
//! spectrum, the spectral radius (as `lim ‖ΔⁿT‖`), block-diagonal structure
//! and norm monotonicity. Finite sections of compact operators on `ℓ²` are
//! modelled by nested truncations.
//!
//! ```
//! use aluthge_core::{aluthge::{iterate, IterationConfig}, generators::jordan_block, C64};
//!
//! let t = jordan_block(C64::new(0.0, 0.0), 4).unwrap();
//! let trace = iterate(&t, &IterationConfig::default()).unwrap();
//! assert!(trace.converged);
//! assert!(aluthge_core::linalg::op_norm(&trace.limit) < 1e-10);
//! ```

pub mod aluthge;
pub mod analysis;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod matrix;
pub mod polar;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
