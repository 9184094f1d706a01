//! Block chain with `B_0 = ½X` (`X` the 2×2 exchange matrix), `B_n = 0`
//! for `n ≥ 1`, `A_n = ¼I` and identity super-diagonal blocks.
//!
//! `P_n(x) = 2^{−n} [[U_n, −U_{n−1}], [−U_{n−1}, U_n]]`, orthogonal against
//! `(1 − x²)^{−1/2} [[1, x], [x, 1]]` on `[−1, 1]` with `(P_j, P_j) = π/4^j · I`.
//! The matrix is not stochastic: its first rows sum to 3/2.

use std::f64::consts::PI;

use crate::chain::{BlockChain, BlockRow};
use crate::error::Result;
use crate::km::BlockKmSystem;
use crate::linalg::DenseMatrix;
use crate::measures::MatrixWeight;
use crate::poly::{chebyshev_u, MatrixSequence};

/// Which `B_0` to use. Only [`B0Reading::Exchange`] reproduces the closed
/// form; [`B0Reading::Identity`] is kept to demonstrate the mismatch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum B0Reading {
    #[default]
    Exchange,
    Identity,
}

#[derive(Clone, Debug)]
pub struct ChebyshevBlockFamily {
    reading: B0Reading,
    chain: BlockChain,
    weight: MatrixWeight,
}

impl ChebyshevBlockFamily {
    pub fn new() -> Result<Self> {
        Self::with_b0(B0Reading::Exchange)
    }

    pub fn with_b0(reading: B0Reading) -> Result<Self> {
        let b0 = match reading {
            B0Reading::Exchange => DenseMatrix::exchange(2).scale(0.5),
            B0Reading::Identity => DenseMatrix::identity(2).scale(0.5),
        };
        let chain = BlockChain::unbounded(2, move |n| {
            Ok(BlockRow {
                lower: if n == 0 {
                    DenseMatrix::zeros(2, 2)
                } else {
                    DenseMatrix::identity(2).scale(0.25)
                },
                diag: if n == 0 { b0.clone() } else { DenseMatrix::zeros(2, 2) },
                upper: DenseMatrix::identity(2),
            })
        })?;
        let weight = MatrixWeight::new(2, -1.0, 1.0, -0.5, -0.5, |x| {
            DenseMatrix::from_rows(&[[1.0, x], [x, 1.0]])
        })?;
        Ok(Self { reading, chain, weight })
    }

    pub fn reading(&self) -> B0Reading {
        self.reading
    }

    pub fn chain(&self) -> &BlockChain {
        &self.chain
    }

    pub fn weight(&self) -> &MatrixWeight {
        &self.weight
    }

    pub fn closed_form(n: usize, x: f64) -> DenseMatrix {
        let s = 0.5f64.powi(n as i32);
        let u = chebyshev_u(n as i64, x);
        let v = chebyshev_u(n as i64 - 1, x);
        DenseMatrix::from_rows(&[[u, -v], [-v, u]]).scale(s)
    }

    /// `P_0(x), …, P_{n_max}(x)` from the recursion.
    pub fn recursion(&self, x: f64, n_max: usize) -> Result<Vec<DenseMatrix>> {
        MatrixSequence::new(self.chain.clone(), n_max)?.eval(x, n_max)
    }

    /// `max_{n ≤ n_max} |P_n(x) − closed form|`.
    pub fn closed_form_deviation(&self, x: f64, n_max: usize) -> Result<f64> {
        Ok(self
            .recursion(x, n_max)?
            .iter()
            .enumerate()
            .map(|(n, p)| p.max_abs_diff(&Self::closed_form(n, x)))
            .fold(0.0, f64::max))
    }

    /// `π/4^j`, the diagonal of `(P_j, P_j)`.
    pub fn norm(j: usize) -> f64 {
        PI / 4f64.powi(j as i32)
    }

    /// `(P_i, P_j) / norm(j)` for `i, j ≤ index_max`, which should be `δ_ij I`.
    pub fn scaled_gram_table(&self, index_max: usize) -> Result<Vec<Vec<DenseMatrix>>> {
        let km = self.km_system(index_max)?;
        let table = km.gram_table(index_max)?;
        Ok(table
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .enumerate()
                    .map(|(j, m)| m.scale(1.0 / Self::norm(j)))
                    .collect()
            })
            .collect())
    }

    pub fn km_system(&self, max_index: usize) -> Result<BlockKmSystem> {
        BlockKmSystem::new(self.chain.clone(), self.weight.clone(), max_index)
    }
}
