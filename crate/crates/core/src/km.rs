//! The Karlin–McGregor representation and its check against matrix powers.
//!
//! Scalar chains:
//!
//! ```text
//! (ℙⁿ)ᵢⱼ = π_j ∫ xⁿ Q_i(x) Q_j(x) ψ(dx)
//! ```
//!
//! Block chains, with `d`×`d` matrix polynomials and weight `W`:
//!
//! ```text
//! (ℙⁿ)ᵢⱼ (Q_j, Q_j) = ∫ xⁿ Q_i(x) W(x) Q_j(x)ᵀ dx
//! ```

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::chain::{propagate, BlockChain, TransitionRows, TridiagonalChain};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::measures::{MatrixWeight, Measure};
use crate::poly::{MatrixSequence, ScalarSequence};

/// Orthogonality checked when a system is built, up to this index.
pub const CONSTRUCTION_CHECK_INDEX: usize = 10;
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

pub type PiFn = dyn Fn(usize) -> f64 + Send + Sync;

/// Largest `|km − power|` over a grid, with the worst coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub n_max: usize,
    pub index_max: usize,
    /// Worst error at each step count `n = 0..=n_max`.
    pub per_step: Vec<f64>,
    pub max_error: f64,
    /// `(n, i, j)`; block indices for block systems.
    pub worst: (usize, usize, usize),
    pub worst_km: f64,
    pub worst_power: f64,
}

impl VerifyReport {
    fn new(n_max: usize, index_max: usize) -> Self {
        Self {
            n_max,
            index_max,
            per_step: vec![0.0; n_max + 1],
            max_error: 0.0,
            worst: (0, 0, 0),
            worst_km: 0.0,
            worst_power: 0.0,
        }
    }

    fn record(&mut self, n: usize, i: usize, j: usize, km: f64, power: f64) {
        let e = (km - power).abs();
        if e > self.per_step[n] || e.is_nan() {
            self.per_step[n] = e;
        }
        if e > self.max_error || e.is_nan() {
            self.max_error = e;
            self.worst = (n, i, j);
            self.worst_km = km;
            self.worst_power = power;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.per_step.iter_mut().zip(&other.per_step) {
            *a = a.max(*b);
        }
        if other.max_error > self.max_error || other.max_error.is_nan() {
            self.max_error = other.max_error;
            self.worst = other.worst;
            self.worst_km = other.worst_km;
            self.worst_power = other.worst_power;
        }
        self
    }
}

/// Scalar chain + spectral measure + weights π_j.
#[derive(Clone)]
pub struct KmSystem {
    sequence: ScalarSequence,
    measure: Measure,
    pi: Arc<PiFn>,
    last_state: Option<usize>,
}

impl fmt::Debug for KmSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KmSystem")
            .field("chain", self.sequence.chain())
            .field("measure", &self.measure)
            .finish_non_exhaustive()
    }
}

impl KmSystem {
    /// Builds the system and checks `√(π_i π_j) ∫ Q_i Q_j dψ = δᵢⱼ` up to index 10.
    pub fn new<P>(chain: TridiagonalChain, measure: Measure, pi: P) -> Result<Self>
    where
        P: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        let last_state = chain.size().finite().map(|m| m - 1);
        let sys = Self {
            sequence: ScalarSequence::new(chain),
            measure,
            pi: Arc::new(pi),
            last_state,
        };
        let top = sys.clamp_index(CONSTRUCTION_CHECK_INDEX);
        let defects = sys.orthogonality_defects(top)?;
        for i in 0..=top {
            for j in 0..=top {
                let d = defects[(i, j)].abs();
                if !(d <= ORTHOGONALITY_TOL) {
                    return Err(Error::Orthogonality { i, j, defect: d });
                }
            }
        }
        Ok(sys)
    }

    /// Weights from detailed balance, `π_0 = 1/ψ(ℝ)` and `π_{j+1} = π_j p_j / q_{j+1}`.
    pub fn from_chain_and_measure(chain: TridiagonalChain, measure: Measure) -> Result<Self> {
        let top = chain.size().finite().map_or(4096, |m| m - 1);
        let mut pi = Vec::with_capacity(top + 1);
        pi.push(1.0 / measure.total_mass()?);
        for j in 0..top {
            let a = chain.transition(j)?;
            let b = chain.transition(j + 1)?;
            pi.push(pi[j] * a.up / b.down);
        }
        KmSystem::new(chain, measure, move |j| pi.get(j).copied().unwrap_or(f64::NAN))
    }

    pub fn chain(&self) -> &TridiagonalChain {
        self.sequence.chain()
    }

    pub fn sequence(&self) -> &ScalarSequence {
        &self.sequence
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn pi(&self, j: usize) -> f64 {
        (self.pi)(j)
    }

    /// Last valid state index, if the chain is finite.
    pub fn last_state(&self) -> Option<usize> {
        self.last_state
    }

    pub fn clamp_index(&self, index: usize) -> usize {
        self.last_state.map_or(index, |m| index.min(m))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        match self.last_state {
            Some(m) if i > m => Err(Error::OutOfRange { index: i, size: m + 1 }),
            _ => Ok(()),
        }
    }

    /// `√(π_i π_j) ∫ Q_i Q_j dψ − δᵢⱼ` for `i, j ≤ index_max`.
    pub fn orthogonality_defects(&self, index_max: usize) -> Result<DenseMatrix> {
        self.check_index(index_max)?;
        let k = index_max + 1;
        let seq = &self.sequence;
        let r = self.measure.integrate_vec(
            |x, out| {
                let q = seq.eval(x, index_max).unwrap_or_else(|_| vec![f64::NAN; k]);
                for i in 0..k {
                    for j in 0..k {
                        out[i * k + j] = q[i] * q[j];
                    }
                }
            },
            k * k,
        )?;
        let mut m = DenseMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = (self.pi(i) * self.pi(j)).sqrt() * r.values[i * k + j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        Ok(m)
    }

    /// `π_j ∫ xⁿ Q_i Q_j dψ`.
    pub fn km_entry(&self, n: usize, i: usize, j: usize) -> Result<f64> {
        Ok(*self.km_entries(i, j, n)?.last().expect("n + 1 entries"))
    }

    /// `km_entry(n, i, j)` for all `n = 0..=n_max` in one quadrature pass.
    pub fn km_entries(&self, i: usize, j: usize, n_max: usize) -> Result<Vec<f64>> {
        self.check_index(i.max(j))?;
        let top = i.max(j);
        // Surface recursion failures before integrating.
        self.sequence.eval(0.0, top)?;
        let seq = &self.sequence;
        let r = self.measure.integrate_vec(
            |x, out| {
                let q = seq.eval(x, top).unwrap_or_else(|_| vec![f64::NAN; top + 1]);
                let mut acc = q[i] * q[j];
                for o in out.iter_mut() {
                    *o = acc;
                    acc *= x;
                }
            },
            n_max + 1,
        )?;
        let pj = self.pi(j);
        Ok(r.values.into_iter().map(|v| pj * v).collect())
    }

    /// `max |km − power|` over `n ≤ n_max`, `i, j ≤ index_max`.
    pub fn verify_representation(&self, n_max: usize, index_max: usize) -> Result<VerifyReport> {
        let index_max = self.clamp_index(index_max);
        let chain = self.chain();
        let reports: Vec<VerifyReport> = (0..=index_max)
            .into_par_iter()
            .map(|i| -> Result<VerifyReport> {
                let width = chain.corner_states(i, index_max, n_max);
                let dist = propagate(chain, i, n_max, width)?;
                let mut rep = VerifyReport::new(n_max, index_max);
                for j in 0..=index_max {
                    let km = self.km_entries(i, j, n_max)?;
                    for n in 0..=n_max {
                        rep.record(n, i, j, km[n], dist[n][j]);
                    }
                }
                Ok(rep)
            })
            .collect::<Result<_>>()?;
        Ok(reports
            .into_iter()
            .fold(VerifyReport::new(n_max, index_max), VerifyReport::merge))
    }
}

/// Block chain + matrix weight + cached Gram blocks `(Q_j, Q_j)`.
#[derive(Clone, Debug)]
pub struct BlockKmSystem {
    sequence: MatrixSequence,
    weight: MatrixWeight,
    grams: Vec<DenseMatrix>,
    gram_inverses: Vec<DenseMatrix>,
    conditions: Vec<f64>,
}

impl BlockKmSystem {
    /// Computes Gram blocks for `j ≤ max_index` and checks block orthogonality
    /// up to `min(10, max_index)`.
    pub fn new(chain: BlockChain, weight: MatrixWeight, max_index: usize) -> Result<Self> {
        if weight.dim() != chain.dim() {
            return Err(Error::Parameter {
                name: "weight".into(),
                reason: format!("weight is {0}x{0}, blocks are {1}x{1}", weight.dim(), chain.dim()),
            });
        }
        let sequence = MatrixSequence::new(chain, max_index + 1)?;
        let top = max_index.min(CONSTRUCTION_CHECK_INDEX).max(max_index.min(1));
        let k = max_index + 1;
        let seq = &sequence;
        // Diagonal Gram blocks for all j, plus off-diagonal pairs up to `top`.
        let pairs: Vec<(usize, usize)> = (0..k)
            .map(|j| (j, j))
            .chain((0..=top).flat_map(|i| (0..i).map(move |j| (i, j))))
            .collect();
        let (mats, _) = weight.integrate_matrices(pairs.len(), |x, w| {
            let p = seq
                .eval(x, max_index)
                .unwrap_or_else(|_| vec![DenseMatrix::identity(w.rows()).scale(f64::NAN); k]);
            pairs.iter().map(|&(i, j)| &(&p[i] * w) * &p[j].transpose()).collect()
        })?;
        let grams: Vec<DenseMatrix> = mats[..k].to_vec();
        for (&(i, j), m) in pairs[k..].iter().zip(&mats[k..]) {
            let scale = (grams[i].max_abs() * grams[j].max_abs()).sqrt();
            let defect = m.max_abs() / scale;
            if !(defect <= ORTHOGONALITY_TOL) {
                return Err(Error::Orthogonality { i, j, defect });
            }
        }
        let mut gram_inverses = Vec::with_capacity(k);
        let mut conditions = Vec::with_capacity(k);
        for (j, g) in grams.iter().enumerate() {
            let (inv, cond) = g.inverse_with_condition().ok_or(Error::SingularGram {
                index: j,
                condition: f64::INFINITY,
            })?;
            if cond > 1e12 {
                return Err(Error::SingularGram {
                    index: j,
                    condition: cond,
                });
            }
            gram_inverses.push(inv);
            conditions.push(cond);
        }
        Ok(Self {
            sequence,
            weight,
            grams,
            gram_inverses,
            conditions,
        })
    }

    pub fn chain(&self) -> &BlockChain {
        self.sequence.chain()
    }

    pub fn sequence(&self) -> &MatrixSequence {
        &self.sequence
    }

    pub fn weight(&self) -> &MatrixWeight {
        &self.weight
    }

    pub fn max_index(&self) -> usize {
        self.grams.len() - 1
    }

    pub fn gram(&self, j: usize) -> Option<&DenseMatrix> {
        self.grams.get(j)
    }

    /// 1-norm condition number of `(Q_j, Q_j)`.
    pub fn gram_condition(&self, j: usize) -> Option<f64> {
        self.conditions.get(j).copied()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i > self.max_index() {
            return Err(Error::OutOfRange {
                index: i,
                size: self.max_index() + 1,
            });
        }
        Ok(())
    }

    /// `(Q_i, Q_j)` for `i, j ≤ index_max`, as a grid of blocks.
    pub fn gram_table(&self, index_max: usize) -> Result<Vec<Vec<DenseMatrix>>> {
        self.check_index(index_max)?;
        let k = index_max + 1;
        let seq = &self.sequence;
        let d = self.weight.dim();
        let (mats, _) = self.weight.integrate_matrices(k * k, |x, w| {
            let p = seq
                .eval(x, index_max)
                .unwrap_or_else(|_| vec![DenseMatrix::identity(d).scale(f64::NAN); k]);
            let mut out = Vec::with_capacity(k * k);
            for i in 0..k {
                let pw = &p[i] * w;
                for j in 0..k {
                    out.push(&pw * &p[j].transpose());
                }
            }
            out
        })?;
        Ok(mats.chunks(k).map(|c| c.to_vec()).collect())
    }

    /// `[∫ xⁿ Q_i W Q_jᵀ dx] (Q_j, Q_j)⁻¹` for `n = 0..=n_max`.
    pub fn km_block_entries(&self, i: usize, j: usize, n_max: usize) -> Result<Vec<DenseMatrix>> {
        self.check_index(i.max(j))?;
        let top = i.max(j);
        let seq = &self.sequence;
        let d = self.weight.dim();
        let (mats, _) = self.weight.integrate_matrices(n_max + 1, |x, w| {
            let p = seq
                .eval(x, top)
                .unwrap_or_else(|_| vec![DenseMatrix::identity(d).scale(f64::NAN); top + 1]);
            let base = &(&p[i] * w) * &p[j].transpose();
            let mut out = Vec::with_capacity(n_max + 1);
            let mut xn = 1.0;
            for _ in 0..=n_max {
                out.push(base.scale(xn));
                xn *= x;
            }
            out
        })?;
        Ok(mats.iter().map(|m| m * &self.gram_inverses[j]).collect())
    }

    pub fn km_block_entry(&self, n: usize, i: usize, j: usize) -> Result<DenseMatrix> {
        Ok(self.km_block_entries(i, j, n)?.pop().expect("n_max + 1 entries"))
    }

    /// Entrywise `max |km − power|` over `n ≤ n_max` and blocks `≤ index_max`.
    pub fn verify_representation(&self, n_max: usize, index_max: usize) -> Result<VerifyReport> {
        let index_max = index_max.min(self.max_index());
        let chain = self.chain();
        let d = chain.dim();
        let reports: Vec<VerifyReport> = (0..=index_max)
            .into_par_iter()
            .map(|bi| -> Result<VerifyReport> {
                let width = chain.corner_states(bi * d, index_max * d, n_max);
                let dists: Vec<Vec<Vec<f64>>> = (0..d)
                    .map(|r| propagate(chain, bi * d + r, n_max, width))
                    .collect::<Result<_>>()?;
                let mut rep = VerifyReport::new(n_max, index_max);
                for bj in 0..=index_max {
                    let km = self.km_block_entries(bi, bj, n_max)?;
                    for (n, block) in km.iter().enumerate() {
                        for r in 0..d {
                            for c in 0..d {
                                rep.record(n, bi, bj, block[(r, c)], dists[r][n][bj * d + c]);
                            }
                        }
                    }
                }
                Ok(rep)
            })
            .collect::<Result<_>>()?;
        Ok(reports
            .into_iter()
            .fold(VerifyReport::new(n_max, index_max), VerifyReport::merge))
    }
}
