//! Karlin–McGregor spectral representation of n-step transition
//! probabilities for birth-death chains and block-tridiagonal chains.
//!
//! The crate is organized bottom-up:
//!
//! - [`chain`]: transition matrices, dense corners, and the exact power oracle.
//! - [`poly`]: three-term recursions (scalar and matrix) and truncated hypergeometric sums.
//! - [`quadrature`] and [`measures`]: spectral measures, matrix weights, inner products.
//! - [`families`]: the built-in chains with their polynomials and measures.
//! - [`km`]: the representation formula itself and its verification against powers.
//! - [`analysis`]: generating functions, recurrence and return times.
//! - [`simulate`]: a seeded Monte Carlo oracle.
//! - [`spec_file`]: the JSON chain-spec format.

pub mod analysis;
pub mod chain;
pub mod error;
pub mod families;
pub mod km;
pub mod linalg;
pub mod measures;
pub mod poly;
pub mod quadrature;
pub mod simulate;
pub mod spec_file;

pub use chain::{BlockChain, BlockRow, ChainSize, Transition, TransitionRows, TridiagonalChain};
pub use error::{Error, Result};
pub use families::Family;
pub use km::{BlockKmSystem, KmSystem, VerifyReport};
pub use linalg::DenseMatrix;
pub use measures::{Atom, DiscreteMeasure, MatrixWeight, Measure, SpectralMeasure};
