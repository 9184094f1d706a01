//! Birth-death and block-tridiagonal one-step transition matrices.
//!
//! Semi-infinite chains carry a coefficient generator indexed by state (or
//! block) number; dense corners are materialized on demand. The n-step oracle
//! [`truncated_power`] relies on the banded structure: in `n` steps a chain of
//! bandwidth `w` moves at most `n·w` states, so a finite corner of the right
//! size reproduces `(ℙⁿ)ᵢⱼ` exactly.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Tolerance on `p + r + q = 1` and on block row sums.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Entries of a stochastic block chain may not fall below this.
pub const NEGATIVE_ENTRY_TOL: f64 = -1e-14;
/// Number of leading rows checked when a generator-backed chain is built.
pub const VALIDATION_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainSize {
    Finite(usize),
    Unbounded,
}

impl ChainSize {
    pub fn finite(self) -> Option<usize> {
        match self {
            ChainSize::Finite(n) => Some(n),
            ChainSize::Unbounded => None,
        }
    }

    fn cap(self, n: usize) -> usize {
        match self {
            ChainSize::Finite(m) => n.min(m),
            ChainSize::Unbounded => n,
        }
    }
}

/// One row of a birth-death matrix: `q_j = ℙ_{j,j-1}`, `r_j = ℙ_{j,j}`, `p_j = ℙ_{j,j+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub down: f64,
    pub stay: f64,
    pub up: f64,
}

impl Transition {
    pub fn new(down: f64, stay: f64, up: f64) -> Self {
        Self { down, stay, up }
    }
}

pub type TransitionFn = dyn Fn(usize) -> std::result::Result<Transition, String> + Send + Sync;

#[derive(Clone)]
enum TridiagonalCoefficients {
    Table(Arc<[Transition]>),
    Generator(Arc<TransitionFn>),
}

/// Scalar birth-death chain on `0..size` (or on all nonnegative integers).
#[derive(Clone)]
pub struct TridiagonalChain {
    size: ChainSize,
    coefficients: TridiagonalCoefficients,
}

impl fmt::Debug for TridiagonalChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TridiagonalChain")
            .field("size", &self.size)
            .finish_non_exhaustive()
    }
}

fn check_transition(j: usize, t: Transition, last: Option<usize>) -> Result<Transition> {
    let err = |reason: String| Err(Error::Construction { index: j, reason });
    if !(t.down.is_finite() && t.stay.is_finite() && t.up.is_finite()) {
        return err("non-finite transition probability".into());
    }
    if t.stay < 0.0 || t.up < 0.0 || (j > 0 && t.down < 0.0) {
        return err(format!("negative probability in {t:?}"));
    }
    if last != Some(j) && t.up <= 0.0 {
        return err(format!("p_{j} must be positive, got {}", t.up));
    }
    if last == Some(j) && t.up != 0.0 {
        return err(format!("last state of a finite chain must have p_{j} = 0"));
    }
    if j > 0 && t.down <= 0.0 {
        return err(format!("q_{j} must be positive, got {}", t.down));
    }
    if j == 0 {
        if t.up + t.stay > 1.0 + ROW_SUM_TOL {
            return err(format!("p_0 + r_0 = {} exceeds 1", t.up + t.stay));
        }
    } else {
        let s = t.down + t.stay + t.up;
        if (s - 1.0).abs() > ROW_SUM_TOL {
            return err(format!("row sum {s} differs from 1"));
        }
    }
    Ok(t)
}

impl TridiagonalChain {
    /// Finite chain on `0..transitions.len()`; `q_0` is ignored.
    pub fn finite(transitions: Vec<Transition>) -> Result<Self> {
        if transitions.is_empty() {
            return Err(Error::Construction {
                index: 0,
                reason: "a chain needs at least one state".into(),
            });
        }
        let last = transitions.len() - 1;
        for (j, t) in transitions.iter().enumerate() {
            check_transition(j, *t, Some(last))?;
        }
        Ok(Self {
            size: ChainSize::Finite(transitions.len()),
            coefficients: TridiagonalCoefficients::Table(transitions.into()),
        })
    }

    /// Finite chain from the three coefficient sequences.
    pub fn from_pqr(p: &[f64], q: &[f64], r: &[f64]) -> Result<Self> {
        if p.len() != q.len() || p.len() != r.len() {
            return Err(Error::Construction {
                index: p.len().min(q.len()).min(r.len()),
                reason: format!("p, q, r lengths differ ({}, {}, {})", p.len(), q.len(), r.len()),
            });
        }
        Self::finite((0..p.len()).map(|j| Transition::new(q[j], r[j], p[j])).collect())
    }

    /// Semi-infinite chain whose row `j` comes from `generator(j)`.
    ///
    /// The first [`VALIDATION_DEPTH`] rows are checked now; later rows are
    /// checked as they are requested.
    pub fn unbounded<F>(generator: F) -> Result<Self>
    where
        F: Fn(usize) -> std::result::Result<Transition, String> + Send + Sync + 'static,
    {
        let chain = Self {
            size: ChainSize::Unbounded,
            coefficients: TridiagonalCoefficients::Generator(Arc::new(generator)),
        };
        for j in 0..VALIDATION_DEPTH {
            chain.transition(j)?;
        }
        Ok(chain)
    }

    pub fn size(&self) -> ChainSize {
        self.size
    }

    pub fn transition(&self, j: usize) -> Result<Transition> {
        match &self.coefficients {
            TridiagonalCoefficients::Table(t) => t.get(j).copied().ok_or(Error::OutOfRange {
                index: j,
                size: t.len(),
            }),
            TridiagonalCoefficients::Generator(g) => {
                let t = g(j).map_err(|reason| Error::Construction { index: j, reason })?;
                check_transition(j, t, None)
            }
        }
    }

    /// Top-left `n_states`×`n_states` corner of ℙ.
    pub fn realize(&self, n_states: usize) -> Result<DenseMatrix> {
        realize_rows(self, n_states)
    }

    pub fn truncated_power(&self, n: usize, i: usize, j: usize) -> Result<f64> {
        truncated_power(self, n, i, j)
    }

    /// Eigenvalues (ascending) of a finite chain, via the symmetrized matrix
    /// with off-diagonal entries `√(p_j q_{j+1})`.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let n = self.size.finite().ok_or_else(|| Error::Parameter {
            name: "chain".into(),
            reason: "spectrum requires a finite chain".into(),
        })?;
        let mut sym = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let t = self.transition(j)?;
            sym[(j, j)] = t.stay;
            if j + 1 < n {
                let next = self.transition(j + 1)?;
                let off = (t.up * next.down).sqrt();
                sym[(j, j + 1)] = off;
                sym[(j + 1, j)] = off;
            }
        }
        Ok(sym.symmetric_eigenvalues())
    }
}

/// One block row of a block-tridiagonal matrix: `lower = A_n`, `diag = B_n`,
/// `upper = C_n` at block columns `n-1`, `n`, `n+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockRow {
    pub lower: DenseMatrix,
    pub diag: DenseMatrix,
    pub upper: DenseMatrix,
}

pub type BlockRowFn = dyn Fn(usize) -> std::result::Result<BlockRow, String> + Send + Sync;

#[derive(Clone)]
enum BlockCoefficients {
    Table(Arc<[BlockRow]>),
    Generator(Arc<BlockRowFn>),
}

/// Worst row-sum defect and smallest entry over a block of rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StochasticityReport {
    pub rows_checked: usize,
    pub max_row_sum_defect: f64,
    pub worst_row: usize,
    pub min_entry: f64,
}

impl StochasticityReport {
    pub fn holds(&self) -> bool {
        self.max_row_sum_defect <= ROW_SUM_TOL && self.min_entry >= NEGATIVE_ENTRY_TOL
    }
}

/// Block-tridiagonal chain with `d`×`d` blocks.
#[derive(Clone)]
pub struct BlockChain {
    dim: usize,
    size: ChainSize,
    coefficients: BlockCoefficients,
    stochastic: bool,
}

impl fmt::Debug for BlockChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockChain")
            .field("dim", &self.dim)
            .field("size", &self.size)
            .field("stochastic", &self.stochastic)
            .finish_non_exhaustive()
    }
}

fn check_block_row(dim: usize, n: usize, row: &BlockRow) -> Result<()> {
    for (name, m) in [("A", &row.lower), ("B", &row.diag), ("C", &row.upper)] {
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::Construction {
                index: n,
                reason: format!("block {name}_{n} is {}x{}, expected {dim}x{dim}", m.rows(), m.cols()),
            });
        }
        if m.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Construction {
                index: n,
                reason: format!("block {name}_{n} has a non-finite entry"),
            });
        }
    }
    Ok(())
}

impl BlockChain {
    pub fn finite(dim: usize, rows: Vec<BlockRow>) -> Result<Self> {
        if dim == 0 || rows.is_empty() {
            return Err(Error::Construction {
                index: 0,
                reason: "block chain needs positive block size and at least one block".into(),
            });
        }
        for (n, r) in rows.iter().enumerate() {
            check_block_row(dim, n, r)?;
        }
        Ok(Self {
            dim,
            size: ChainSize::Finite(rows.len()),
            coefficients: BlockCoefficients::Table(rows.into()),
            stochastic: false,
        })
    }

    pub fn unbounded<F>(dim: usize, generator: F) -> Result<Self>
    where
        F: Fn(usize) -> std::result::Result<BlockRow, String> + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::Construction {
                index: 0,
                reason: "block size must be positive".into(),
            });
        }
        let chain = Self {
            dim,
            size: ChainSize::Unbounded,
            coefficients: BlockCoefficients::Generator(Arc::new(generator)),
            stochastic: false,
        };
        for n in 0..VALIDATION_DEPTH {
            chain.block_row(n)?;
        }
        Ok(chain)
    }

    /// Flag the chain as stochastic after checking its leading rows.
    pub fn into_stochastic(mut self) -> Result<Self> {
        let report = self.stochasticity(VALIDATION_DEPTH)?;
        if report.max_row_sum_defect > ROW_SUM_TOL {
            return Err(Error::NotStochastic {
                reason: format!("row {} sums to 1 ± {:e}", report.worst_row, report.max_row_sum_defect),
            });
        }
        if report.min_entry < NEGATIVE_ENTRY_TOL {
            return Err(Error::NotStochastic {
                reason: format!("negative entry {:e}", report.min_entry),
            });
        }
        self.stochastic = true;
        Ok(self)
    }

    /// Row sums and entry signs over the first `n_blocks` block rows, ignoring
    /// columns beyond a finite chain's last block.
    pub fn stochasticity(&self, n_blocks: usize) -> Result<StochasticityReport> {
        let n_blocks = self.size.cap(n_blocks);
        let mut report = StochasticityReport {
            rows_checked: 0,
            max_row_sum_defect: 0.0,
            worst_row: 0,
            min_entry: f64::INFINITY,
        };
        for s in 0..n_blocks * self.dim {
            let entries = self.row_entries(s)?;
            let sum: f64 = entries.iter().map(|(_, v)| v).sum();
            let defect = (sum - 1.0).abs();
            if defect > report.max_row_sum_defect {
                report.max_row_sum_defect = defect;
                report.worst_row = s;
            }
            // row_entries drops exact zeros, so zero entries count as 0.
            let min = entries.iter().map(|(_, v)| *v).fold(0.0, f64::min);
            report.min_entry = report.min_entry.min(min);
            report.rows_checked += 1;
        }
        Ok(report)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Size in blocks.
    pub fn size(&self) -> ChainSize {
        self.size
    }

    pub fn is_flagged_stochastic(&self) -> bool {
        self.stochastic
    }

    pub fn block_row(&self, n: usize) -> Result<BlockRow> {
        match &self.coefficients {
            BlockCoefficients::Table(t) => t.get(n).cloned().ok_or(Error::OutOfRange {
                index: n,
                size: t.len(),
            }),
            BlockCoefficients::Generator(g) => {
                let row = g(n).map_err(|reason| Error::Construction { index: n, reason })?;
                check_block_row(self.dim, n, &row)?;
                Ok(row)
            }
        }
    }

    /// Top-left corner of `n_blocks` blocks, a `(d·n)`×`(d·n)` matrix.
    pub fn realize(&self, n_blocks: usize) -> Result<DenseMatrix> {
        realize_rows(self, n_blocks * self.dim)
    }

    /// The `(bi, bj)` block of ℙⁿ.
    pub fn block_power(&self, n: usize, bi: usize, bj: usize) -> Result<DenseMatrix> {
        let d = self.dim;
        let width = self.corner_states(bi * d, bj * d, n);
        let mut out = DenseMatrix::zeros(d, d);
        for r in 0..d {
            let dist = propagate(self, bi * d + r, n, width)?;
            for c in 0..d {
                out[(r, c)] = dist[n][bj * d + c];
            }
        }
        Ok(out)
    }

    fn entries_in_block_row(&self, s: usize) -> Result<Vec<(usize, f64)>> {
        let d = self.dim;
        let (b, o) = (s / d, s % d);
        if let ChainSize::Finite(m) = self.size {
            if b >= m {
                return Err(Error::OutOfRange { index: s, size: m * d });
            }
        }
        let row = self.block_row(b)?;
        let mut out = Vec::with_capacity(3 * d);
        let mut push = |block: &DenseMatrix, bc: usize| {
            for c in 0..d {
                let v = block[(o, c)];
                if v != 0.0 {
                    out.push((bc * d + c, v));
                }
            }
        };
        if b > 0 {
            push(&row.lower, b - 1);
        }
        push(&row.diag, b);
        let has_next = match self.size {
            ChainSize::Finite(m) => b + 1 < m,
            ChainSize::Unbounded => true,
        };
        if has_next {
            push(&row.upper, b + 1);
        }
        Ok(out)
    }
}

/// Row-wise access shared by scalar and block chains.
pub trait TransitionRows: Send + Sync {
    /// Number of scalar states, `None` when unbounded.
    fn scalar_size(&self) -> Option<usize>;

    /// Largest `|i − j|` with a possibly nonzero entry.
    fn bandwidth(&self) -> usize;

    /// Nonzero entries of scalar row `state`, ascending by column.
    fn row_entries(&self, state: usize) -> Result<Vec<(usize, f64)>>;

    fn is_stochastic(&self) -> bool;

    /// Corner size (scalar states) on which `(ℙⁿ)ᵢⱼ` is exact.
    fn corner_states(&self, i: usize, j: usize, n: usize) -> usize {
        let w = i.max(j) + n * self.bandwidth() + 2;
        self.scalar_size().map_or(w, |m| w.min(m))
    }
}

impl TransitionRows for TridiagonalChain {
    fn scalar_size(&self) -> Option<usize> {
        self.size.finite()
    }

    fn bandwidth(&self) -> usize {
        1
    }

    fn row_entries(&self, state: usize) -> Result<Vec<(usize, f64)>> {
        let t = self.transition(state)?;
        let mut out = Vec::with_capacity(3);
        if state > 0 && t.down != 0.0 {
            out.push((state - 1, t.down));
        }
        if t.stay != 0.0 {
            out.push((state, t.stay));
        }
        if t.up != 0.0 {
            out.push((state + 1, t.up));
        }
        Ok(out)
    }

    fn is_stochastic(&self) -> bool {
        self.transition(0)
            .map(|t| (t.stay + t.up - 1.0).abs() <= ROW_SUM_TOL)
            .unwrap_or(false)
    }
}

impl TransitionRows for BlockChain {
    fn scalar_size(&self) -> Option<usize> {
        self.size.finite().map(|m| m * self.dim)
    }

    fn bandwidth(&self) -> usize {
        2 * self.dim - 1
    }

    fn row_entries(&self, state: usize) -> Result<Vec<(usize, f64)>> {
        self.entries_in_block_row(state)
    }

    fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    fn corner_states(&self, i: usize, j: usize, n: usize) -> usize {
        let d = self.dim;
        let blocks = self.size.cap(i.max(j) / d + n + 2);
        blocks * d
    }
}

/// Dense top-left corner of any banded chain.
pub fn realize_rows<C: TransitionRows + ?Sized>(chain: &C, n_states: usize) -> Result<DenseMatrix> {
    if n_states == 0 {
        return Err(Error::Parameter {
            name: "n_states".into(),
            reason: "must be at least 1".into(),
        });
    }
    if let Some(m) = chain.scalar_size() {
        if n_states > m {
            return Err(Error::OutOfRange {
                index: n_states - 1,
                size: m,
            });
        }
    }
    let mut out = DenseMatrix::zeros(n_states, n_states);
    for s in 0..n_states {
        for (c, v) in chain.row_entries(s)? {
            if c < n_states {
                out[(s, c)] = v;
            }
        }
    }
    Ok(out)
}

/// Distributions `e_start ℙᵗ` for `t = 0..=steps`, restricted to the first
/// `width` states.
pub fn propagate<C: TransitionRows + ?Sized>(
    chain: &C,
    start: usize,
    steps: usize,
    width: usize,
) -> Result<Vec<Vec<f64>>> {
    if start >= width {
        return Err(Error::OutOfRange {
            index: start,
            size: width,
        });
    }
    let rows: Vec<Vec<(usize, f64)>> = (0..width).map(|s| chain.row_entries(s)).collect::<Result<_>>()?;
    let mut current = vec![0.0; width];
    current[start] = 1.0;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(current.clone());
    for _ in 0..steps {
        let mut next = vec![0.0; width];
        for (s, &mass) in current.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for &(c, v) in &rows[s] {
                if c < width {
                    next[c] += mass * v;
                }
            }
        }
        out.push(next.clone());
        current = next;
    }
    Ok(out)
}

/// Exact `(ℙⁿ)ᵢⱼ` on the corner given by [`TransitionRows::corner_states`].
pub fn truncated_power<C: TransitionRows + ?Sized>(chain: &C, n: usize, i: usize, j: usize) -> Result<f64> {
    let width = chain.corner_states(i, j, n);
    truncated_power_on_corner(chain, n, i, j, width)
}

/// `(ℙⁿ)ᵢⱼ` computed on an explicit corner of `width` states.
pub fn truncated_power_on_corner<C: TransitionRows + ?Sized>(
    chain: &C,
    n: usize,
    i: usize,
    j: usize,
    width: usize,
) -> Result<f64> {
    if let Some(m) = chain.scalar_size() {
        for idx in [i, j] {
            if idx >= m {
                return Err(Error::OutOfRange { index: idx, size: m });
            }
        }
    }
    if j >= width {
        return Err(Error::OutOfRange { index: j, size: width });
    }
    let dist = propagate(chain, i, n, width)?;
    Ok(dist[n][j])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ehrenfest_two() -> TridiagonalChain {
        TridiagonalChain::from_pqr(&[1.0, 0.5, 0.0], &[0.0, 0.5, 1.0], &[0.0; 3]).unwrap()
    }

    #[test]
    fn realize_small_ehrenfest() {
        let m = ehrenfest_two().realize(3).unwrap();
        let expected = DenseMatrix::from_rows(&[[0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 1.0, 0.0]]);
        assert_eq!(m, expected);
    }

    #[test]
    fn degenerate_chain_rejected() {
        let err = TridiagonalChain::from_pqr(&[0.0, 0.0], &[0.0, 0.0], &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Construction { index: 0, .. }));
    }

    #[test]
    fn bad_row_sum_names_index() {
        let err = TridiagonalChain::from_pqr(&[1.0, 0.5, 0.0], &[0.0, 0.4, 1.0], &[0.0; 3]).unwrap_err();
        assert!(matches!(err, Error::Construction { index: 1, .. }));
    }

    #[test]
    fn generator_failure_names_index() {
        let chain = TridiagonalChain::unbounded(|j| {
            if j == 100 {
                Err("boom".into())
            } else if j == 0 {
                Ok(Transition::new(0.0, 0.0, 1.0))
            } else {
                Ok(Transition::new(0.5, 0.0, 0.5))
            }
        })
        .unwrap();
        assert!(chain.realize(100).is_ok());
        let err = chain.realize(101).unwrap_err();
        assert!(matches!(err, Error::Construction { index: 100, .. }), "{err:?}");
    }

    #[test]
    fn small_powers() {
        let c = ehrenfest_two();
        assert_eq!(c.truncated_power(2, 0, 0).unwrap(), 0.5);
        assert_eq!(c.truncated_power(0, 1, 1).unwrap(), 1.0);
        assert_eq!(c.truncated_power(0, 1, 2).unwrap(), 0.0);
    }

    #[test]
    fn spectrum_of_small_ehrenfest() {
        let ev = ehrenfest_two().spectrum().unwrap();
        for (a, b) in ev.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn block_chain_rejects_negative_when_stochastic() {
        let row = BlockRow {
            lower: DenseMatrix::zeros(1, 1),
            diag: DenseMatrix::from_rows(&[[-0.5]]),
            upper: DenseMatrix::from_rows(&[[1.5]]),
        };
        let chain = BlockChain::unbounded(1, move |_| Ok(row.clone())).unwrap();
        assert!(matches!(chain.into_stochastic(), Err(Error::NotStochastic { .. })));
    }
}
