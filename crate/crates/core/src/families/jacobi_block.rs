//! 2×2 block chain built from Jacobi-type matrix polynomials on `[0, 1]`.
//!
//! The blocks `A_n`, `B_n`, `C_n` are rational in `(α, β, n)`, with `A_n`
//! upper triangular and `C_n` lower triangular. The polynomials `Φ_n`
//! satisfy `A_nΦ_{n−1} + B_nΦ_n + C_nΦ_{n+1} = xΦ_n` and are orthogonal
//! against `W(x) = Ψ₀(x) diag(x^{α+1}(1−x)^β, x^α(1−x)^β) Ψ₀(x)ᵀ`.
//!
//! They are also eigenfunctions of the second-order operator
//! `𝓕P = x(1−x)P'' + A₁(x)P' + A₀P`, acting on the left of `P = Φ_nᵀ`,
//! with `𝓕Φ_nᵀ = Φ_nᵀΛ_n`.

use crate::chain::{BlockChain, BlockRow, StochasticityReport};
use crate::error::{Error, Result};
use crate::km::BlockKmSystem;
use crate::linalg::DenseMatrix;
use crate::measures::MatrixWeight;
use crate::poly::{MatrixPolynomial, MatrixSequence};

/// Largest degree accepted by [`JacobiBlockFamily::apply_operator_f`].
pub const MAX_OPERATOR_DEGREE: usize = 20;

const DENOMINATOR_TOL: f64 = 1e-14;

/// Residual of `𝓕Φ_nᵀ − Φ_nᵀΛ_n` in the monomial basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorResidual {
    pub degree: usize,
    /// Largest absolute coefficient of the residual.
    pub residual: f64,
    /// Largest absolute coefficient among the terms that were subtracted.
    pub scale: f64,
}

impl OperatorResidual {
    pub fn relative(&self) -> f64 {
        self.residual / self.scale.max(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct JacobiBlockFamily {
    alpha: f64,
    beta: f64,
    chain: BlockChain,
    weight: MatrixWeight,
}

fn frac(entry: &str, n: usize, num: f64, den: f64) -> Result<f64> {
    if den.abs() < DENOMINATOR_TOL {
        return Err(Error::Parameter {
            name: format!("{entry} (n = {n})"),
            reason: "denominator vanishes".into(),
        });
    }
    Ok(num / den)
}

/// `(A_n, B_n, C_n)`. `A_0` is never used and returned as zero.
pub fn coefficient_blocks(alpha: f64, beta: f64, n: usize) -> Result<BlockRow> {
    let (a, b) = (alpha, beta);
    let m = n as f64;
    let lower = if n == 0 {
        DenseMatrix::zeros(2, 2)
    } else {
        let a11 = frac(
            "A^11",
            n,
            m * (a + m) * (b + 2.0 * a + 2.0 * m + 3.0),
            (b + a + 2.0 * m + 1.0) * (b + a + 2.0 * m + 2.0) * (b + 2.0 * a + 2.0 * m + 1.0),
        )?;
        let a12 = frac(
            "A^12",
            n,
            2.0 * m * (b + 1.0),
            (b + 2.0 * m + 1.0) * (b + a + 2.0 * m + 2.0) * (b + 2.0 * a + 2.0 * m + 1.0),
        )?;
        let a22 = frac(
            "A^22",
            n,
            m * (a + m + 1.0) * (b + 2.0 * m + 3.0),
            (b + 2.0 * m + 1.0) * (b + a + 2.0 * m + 2.0) * (b + a + 2.0 * m + 3.0),
        )?;
        DenseMatrix::from_rows(&[[a11, a12], [0.0, a22]])
    };

    // Each B^11 and B^22 term carries its own denominator; the leading factor n
    // kills the first term at n = 0 only when its denominator is nonzero.
    let b11 =
        1.0 + frac(
            "B^11",
            n,
            m * (b + m + 1.0) * (b + 2.0 * m - 1.0),
            (b + 2.0 * m + 1.0) * (b + a + 2.0 * m + 1.0),
        )? - frac(
            "B^11",
            n,
            (m + 1.0) * (b + m + 2.0) * (b + 2.0 * m + 1.0),
            (b + 2.0 * m + 3.0) * (b + a + 2.0 * m + 3.0),
        )? - frac(
            "B^11",
            n,
            2.0 * (b + 1.0) * (b + 1.0),
            (b + 2.0 * m + 1.0) * (b + 2.0 * m + 3.0) * (b + 2.0 * a + 2.0 * m + 3.0),
        )?;
    let b12 = frac(
        "B^12",
        n,
        2.0 * (b + 1.0) * (a + b + m + 2.0),
        (b + 2.0 * m + 3.0) * (b + a + 2.0 * m + 2.0) * (b + 2.0 * a + 2.0 * m + 3.0),
    )?;
    let b21 = frac(
        "B^21",
        n,
        2.0 * (a + m + 1.0) * (b + 1.0),
        (b + 2.0 * m + 1.0) * (b + a + 2.0 * m + 3.0) * (b + 2.0 * a + 2.0 * m + 3.0),
    )?;
    let b22 =
        1.0 + frac(
            "B^22",
            n,
            m * (b + m + 1.0) * (b + 2.0 * m + 3.0),
            (b + 2.0 * m + 1.0) * (b + a + 2.0 * m + 2.0),
        )? - frac(
            "B^22",
            n,
            (m + 1.0) * (b + m + 2.0) * (b + 2.0 * m + 5.0),
            (b + 2.0 * m + 3.0) * (b + a + 2.0 * m + 4.0),
        )? + frac(
            "B^22",
            n,
            2.0 * (b + 1.0) * (b + 1.0),
            (b + 2.0 * m + 1.0) * (b + 2.0 * m + 3.0) * (b + 2.0 * a + 2.0 * m + 3.0),
        )?;
    let diag = DenseMatrix::from_rows(&[[b11, b12], [b21, b22]]);

    let c11 = frac(
        "C^11",
        n,
        (b + m + 2.0) * (b + 2.0 * m + 1.0) * (b + a + m + 2.0),
        (b + 2.0 * m + 3.0) * (b + a + 2.0 * m + 2.0) * (b + a + 2.0 * m + 3.0),
    )?;
    let c21 = frac(
        "C^21",
        n,
        2.0 * (b + 1.0) * (b + m + 2.0),
        (b + 2.0 * m + 3.0) * (b + a + 2.0 * m + 3.0) * (b + 2.0 * a + 2.0 * m + 5.0),
    )?;
    let c22 = frac(
        "C^22",
        n,
        (b + m + 2.0) * (b + a + m + 3.0) * (b + 2.0 * a + 2.0 * m + 3.0),
        (b + a + 2.0 * m + 3.0) * (b + a + 2.0 * m + 4.0) * (b + 2.0 * a + 2.0 * m + 5.0),
    )?;
    let upper = DenseMatrix::from_rows(&[[c11, 0.0], [c21, c22]]);
    Ok(BlockRow { lower, diag, upper })
}

/// `Ψ₀(x) = [[1, 1], [1, (β+2α+3)x/(β+1) − 2(α+1)/(β+1)]]`.
pub fn psi0(alpha: f64, beta: f64, x: f64) -> DenseMatrix {
    let c = (beta + 2.0 * alpha + 3.0) * x / (beta + 1.0) - 2.0 * (alpha + 1.0) / (beta + 1.0);
    DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, c]])
}

impl JacobiBlockFamily {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v > -1.0) || !v.is_finite() {
                return Err(Error::Parameter {
                    name: name.into(),
                    reason: format!("need {name} > −1, got {v}"),
                });
            }
        }
        // Surface a vanishing denominator as a parameter error before the
        // generator is wrapped.
        coefficient_blocks(alpha, beta, 0)?;
        let chain = BlockChain::unbounded(2, move |n| {
            coefficient_blocks(alpha, beta, n).map_err(|e| e.to_string())
        })?;
        let chain = match chain.clone().into_stochastic() {
            Ok(flagged) => flagged,
            Err(_) => chain,
        };
        let weight = MatrixWeight::new(2, 0.0, 1.0, alpha, beta, move |x| {
            let p = psi0(alpha, beta, x);
            &(&p * &DenseMatrix::diagonal(&[x, 1.0])) * &p.transpose()
        })?;
        Ok(Self {
            alpha,
            beta,
            chain,
            weight,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn chain(&self) -> &BlockChain {
        &self.chain
    }

    pub fn weight(&self) -> &MatrixWeight {
        &self.weight
    }

    pub fn blocks(&self, n: usize) -> Result<BlockRow> {
        self.chain.block_row(n)
    }

    pub fn psi0(&self, x: f64) -> DenseMatrix {
        psi0(self.alpha, self.beta, x)
    }

    /// Row sums and signs over the first `scalar_rows` rows (rounded up to
    /// whole blocks).
    pub fn stochasticity(&self, scalar_rows: usize) -> Result<StochasticityReport> {
        self.chain.stochasticity(scalar_rows.div_ceil(2))
    }

    pub fn is_stochastic(&self, scalar_rows: usize) -> Result<bool> {
        Ok(self.stochasticity(scalar_rows)?.holds())
    }

    /// `A₁(x) = A₁⁰ + A₁¹x`, returned as `(A₁⁰, A₁¹)`.
    pub fn first_order_coefficient(&self) -> (DenseMatrix, DenseMatrix) {
        let (a, b) = (self.alpha, self.beta);
        let d = b + 2.0 * a + 3.0;
        let c0 = DenseMatrix::from_rows(&[
            [(a + 1.0) * (b + 2.0 * a + 5.0) / d, (2.0 * a + 2.0) / d],
            [(b + 1.0) / d, ((a + 2.0) * b + 2.0 * a * a + 5.0 * a + 4.0) / d],
        ]);
        let c1 = DenseMatrix::from_rows(&[[-(a + b + 3.0), 1.0], [0.0, -(a + b + 4.0)]]);
        (c0, c1)
    }

    /// `A₀ = diag(α + 1 + (β+1)/2, 0)`.
    pub fn zeroth_order_coefficient(&self) -> DenseMatrix {
        DenseMatrix::diagonal(&[self.alpha + 1.0 + (self.beta + 1.0) / 2.0, 0.0])
    }

    /// `Λ_n = diag(−n² − (α+β+2)n + α + 1 + (β+1)/2, −n² − (α+β+3)n)`.
    pub fn eigenvalue_matrix(&self, n: usize) -> DenseMatrix {
        let (a, b, m) = (self.alpha, self.beta, n as f64);
        DenseMatrix::diagonal(&[
            -m * m - (a + b + 2.0) * m + a + 1.0 + (b + 1.0) / 2.0,
            -m * m - (a + b + 3.0) * m,
        ])
    }

    pub fn polynomials(&self, n_max: usize) -> Result<Vec<MatrixPolynomial>> {
        MatrixSequence::new(self.chain.clone(), n_max)?.polynomials(n_max)
    }

    /// `𝓕Φ_nᵀ − Φ_nᵀΛ_n` computed on coefficient arrays.
    pub fn apply_operator_f(&self, n: usize) -> Result<OperatorResidual> {
        if n > MAX_OPERATOR_DEGREE {
            return Err(Error::Parameter {
                name: "n".into(),
                reason: format!("degree {n} exceeds {MAX_OPERATOR_DEGREE}"),
            });
        }
        let p = self.polynomials(n)?.swap_remove(n).transpose();
        let d1 = p.derivative();
        let d2 = d1.derivative();
        // x(1−x)P''
        let second = d2.shift().sub(&d2.shift().shift());
        let (c0, c1) = self.first_order_coefficient();
        let first = MatrixPolynomial::from_coefficients(vec![c0, c1]).mul(&d1);
        let zeroth = p.left_mul(&self.zeroth_order_coefficient());
        let rhs = p.right_mul(&self.eigenvalue_matrix(n));
        let residual = second.add(&first).add(&zeroth).sub(&rhs).max_abs_coefficient();
        let scale = [&second, &first, &zeroth, &rhs]
            .iter()
            .map(|t| t.max_abs_coefficient())
            .fold(0.0, f64::max);
        Ok(OperatorResidual {
            degree: n,
            residual,
            scale,
        })
    }

    pub fn km_system(&self, max_index: usize) -> Result<BlockKmSystem> {
        BlockKmSystem::new(self.chain.clone(), self.weight.clone(), max_index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::TransitionRows;

    #[test]
    fn triangular_structure() {
        for (a, b) in [(1.0, 2.0), (0.5, 0.5), (-0.5, 0.3), (3.0, -0.9)] {
            for n in 0..15 {
                let r = coefficient_blocks(a, b, n).unwrap();
                assert_eq!(r.lower[(1, 0)], 0.0);
                assert_eq!(r.upper[(0, 1)], 0.0);
            }
        }
    }

    #[test]
    fn vanishing_denominator_named() {
        let err = JacobiBlockFamily::new(-0.5, -0.5).unwrap_err();
        let s = err.to_string();
        assert!(s.contains("B^11"), "{s}");
        assert!(JacobiBlockFamily::new(-1.0, 0.0).is_err());
        assert!(JacobiBlockFamily::new(0.0, f64::NAN).is_err());
    }

    #[test]
    fn rows_sum_to_one() {
        for (a, b) in [(1.0, 2.0), (0.5, 0.5), (0.0, 0.0)] {
            let f = JacobiBlockFamily::new(a, b).unwrap();
            let rep = f.stochasticity(12).unwrap();
            assert_eq!(rep.rows_checked, 12);
            assert!(rep.holds(), "{rep:?}");
            assert!(f.chain().is_stochastic());
        }
    }

    #[test]
    fn eigenvalue_at_zero_matches_a0() {
        let f = JacobiBlockFamily::new(1.0, 2.0).unwrap();
        assert_eq!(f.eigenvalue_matrix(0), f.zeroth_order_coefficient());
        assert_eq!(f.apply_operator_f(0).unwrap().residual, 0.0);
    }

    #[test]
    fn operator_eigenfunctions() {
        for (a, b, n) in [(1.0, 2.0, 1), (0.5, 0.0, 5), (1.0, 2.0, 8)] {
            let f = JacobiBlockFamily::new(a, b).unwrap();
            let r = f.apply_operator_f(n).unwrap();
            assert!(r.relative() < 1e-10, "{r:?}");
        }
        assert!(JacobiBlockFamily::new(1.0, 2.0).unwrap().apply_operator_f(21).is_err());
    }

    #[test]
    fn weight_is_positive_inside() {
        let f = JacobiBlockFamily::new(1.0, 2.0).unwrap();
        let pts: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
        let rep = f.weight().positivity(&pts);
        assert!(rep.min_eigenvalue > 0.0);
        assert!(rep.max_asymmetry < 1e-15);
    }
}
