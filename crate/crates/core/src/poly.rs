//! Orthogonal polynomial sequences defined by three-term recursions.
//!
//! Scalar sequences come from a birth-death chain in the `ℙQ = xQ`
//! orientation:
//!
//! ```text
//! q_n Q_{n-1} + r_n Q_n + p_n Q_{n+1} = x Q_n,   Q_{-1} = 0, Q_0 = 1
//! ```
//!
//! Matrix sequences come from a block chain, `A_n P_{n-1} + B_n P_n + C_n P_{n+1} = x P_n`.
//! Both are evaluated by plain forward iteration.

use crate::chain::{BlockChain, ChainSize, Transition, TridiagonalChain};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Hypergeometric sums are cut at this many terms at most.
pub const MAX_TRUNCATION: usize = 256;

/// Chebyshev polynomial of the first kind.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev polynomial of the second kind; `U_{-1} = 0`.
pub fn chebyshev_u(n: i64, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Scalar sequence `Q_n` generated by a birth-death chain.
#[derive(Clone, Debug)]
pub struct ScalarSequence {
    chain: TridiagonalChain,
}

fn forward<F>(row: F, x: f64, n_max: usize, degree_offset: usize) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<Transition>,
{
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    let mut prev = 0.0;
    for k in 0..n_max {
        let t = row(k)?;
        if t.up == 0.0 {
            return Err(Error::Recursion {
                degree: k + 1 + degree_offset,
                reason: format!("p_{} = 0", k + degree_offset),
            });
        }
        let cur = out[k];
        let down = if k == 0 { 0.0 } else { t.down };
        let next = ((x - t.stay) * cur - down * prev) / t.up;
        prev = cur;
        out.push(next);
    }
    Ok(out)
}

impl ScalarSequence {
    pub fn new(chain: TridiagonalChain) -> Self {
        Self { chain }
    }

    pub fn chain(&self) -> &TridiagonalChain {
        &self.chain
    }

    /// `Q_0(x), …, Q_{n_max}(x)`.
    pub fn eval(&self, x: f64, n_max: usize) -> Result<Vec<f64>> {
        forward(|k| self.chain.transition(k), x, n_max, 0)
    }

    /// The index-shifted sequence: same recursion on states `1, 2, …`, so
    /// `q_0 = 1` and `q_1 = (x − r_1)/p_1`.
    pub fn eval_shifted(&self, x: f64, n_max: usize) -> Result<Vec<f64>> {
        forward(|k| self.chain.transition(k + 1), x, n_max, 1)
    }

    /// Ratios `q_{n-1}(x)/Q_n(x)` for `n = 1..=n_max`.
    ///
    /// For a finite chain on `0..=M` the recursion is closed with a formal
    /// `p_M = 1`, which cancels in the ratio; the value at `n = M + 1` is then
    /// `p_0 (xI − ℙ)⁻¹₀₀` and is repeated for larger `n`.
    pub fn ratio_sequence(&self, x: f64, n_max: usize) -> Result<Vec<f64>> {
        let last = self.chain.size().finite().map(|m| m - 1);
        let row = |k: usize| -> Result<Transition> {
            let mut t = self.chain.transition(k)?;
            if Some(k) == last {
                t.up = 1.0;
            }
            Ok(t)
        };
        let stop = match last {
            Some(m) => n_max.min(m + 1),
            None => n_max,
        };
        // Q_{n-1}, Q_n and q_{n-2}, q_{n-1}, rescaled together.
        let t0 = row(0)?;
        let (mut big_prev, mut big) = (1.0, (x - t0.stay) / t0.up);
        let (mut small_prev, mut small) = (0.0, 1.0);
        let mut ratios = Vec::with_capacity(n_max);
        ratios.push(small / big);
        for n in 1..stop {
            let t = row(n)?;
            if t.up == 0.0 {
                return Err(Error::Recursion {
                    degree: n + 1,
                    reason: format!("p_{n} = 0"),
                });
            }
            let big_next = ((x - t.stay) * big - t.down * big_prev) / t.up;
            let small_next = if n == 1 {
                (x - t.stay) / t.up
            } else {
                ((x - t.stay) * small - t.down * small_prev) / t.up
            };
            big_prev = big;
            big = big_next;
            small_prev = small;
            small = small_next;
            let scale = big.abs().max(big_prev.abs());
            if scale > 1e100 || (scale < 1e-100 && scale > 0.0) {
                big /= scale;
                big_prev /= scale;
                small /= scale;
                small_prev /= scale;
            }
            ratios.push(small / big);
        }
        let fill = *ratios.last().expect("at least one ratio");
        ratios.resize(n_max, fill);
        Ok(ratios)
    }
}

/// Parameters of a truncated generalized hypergeometric sum.
#[derive(Clone, Debug, PartialEq)]
pub struct HypergeomSpec {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
    pub argument: f64,
    pub truncation: usize,
}

/// `Σ_{n=0}^{trunc} Π(a)_n / (n! Π(b)_n) zⁿ`, accumulated term-by-term.
///
/// A numerator factor hitting zero ends the sum early; a denominator factor
/// hitting zero inside the retained range is an error.
pub fn hypergeom_truncated(spec: &HypergeomSpec) -> Result<f64> {
    if spec.truncation > MAX_TRUNCATION {
        return Err(Error::Parameter {
            name: "truncation".into(),
            reason: format!("{} exceeds {MAX_TRUNCATION}", spec.truncation),
        });
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..spec.truncation {
        let num: f64 = spec.numerator.iter().map(|a| a + n as f64).product();
        if num == 0.0 {
            break;
        }
        let den: f64 = spec.denominator.iter().map(|b| b + n as f64).product();
        if den == 0.0 {
            return Err(Error::ZeroDenominator { term: n + 1 });
        }
        term *= num / den * spec.argument / (n + 1) as f64;
        sum += term;
    }
    Ok(sum)
}

/// `(a)_n = a(a+1)⋯(a+n−1)`.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).map(|k| a + k as f64).product()
}

#[derive(Clone, Debug)]
struct CachedStep {
    lower: DenseMatrix,
    diag: DenseMatrix,
    upper_inv: DenseMatrix,
}

/// Matrix-valued sequence `P_n` generated by a block chain.
#[derive(Clone, Debug)]
pub struct MatrixSequence {
    chain: BlockChain,
    cache: Vec<CachedStep>,
}

impl MatrixSequence {
    /// Precomputes `C_n⁻¹` for `n < capacity`.
    pub fn new(chain: BlockChain, capacity: usize) -> Result<Self> {
        let capacity = match chain.size() {
            ChainSize::Finite(m) => capacity.min(m.saturating_sub(1)),
            ChainSize::Unbounded => capacity,
        };
        let cache = (0..capacity).map(|n| Self::step(&chain, n)).collect::<Result<_>>()?;
        Ok(Self { chain, cache })
    }

    fn step(chain: &BlockChain, n: usize) -> Result<CachedStep> {
        let row = chain.block_row(n)?;
        let upper_inv = row.upper.inverse().ok_or_else(|| Error::Recursion {
            degree: n + 1,
            reason: format!("C_{n} is singular"),
        })?;
        Ok(CachedStep {
            lower: row.lower,
            diag: row.diag,
            upper_inv,
        })
    }

    pub fn dim(&self) -> usize {
        self.chain.dim()
    }

    pub fn chain(&self) -> &BlockChain {
        &self.chain
    }

    fn with_step<T>(&self, n: usize, f: impl FnOnce(&CachedStep) -> T) -> Result<T> {
        match self.cache.get(n) {
            Some(s) => Ok(f(s)),
            None => {
                if let ChainSize::Finite(m) = self.chain.size() {
                    if n + 1 >= m {
                        return Err(Error::Recursion {
                            degree: n + 1,
                            reason: format!("finite chain has {m} blocks"),
                        });
                    }
                }
                Ok(f(&Self::step(&self.chain, n)?))
            }
        }
    }

    /// `P_0(x), …, P_{n_max}(x)`.
    pub fn eval(&self, x: f64, n_max: usize) -> Result<Vec<DenseMatrix>> {
        let d = self.dim();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(DenseMatrix::identity(d));
        let mut prev = DenseMatrix::zeros(d, d);
        for n in 0..n_max {
            let next = self.with_step(n, |s| {
                let cur = &out[n];
                let mut rhs = &cur.scale(x) - &(&s.diag * cur);
                if n > 0 {
                    rhs = &rhs - &(&s.lower * &prev);
                }
                &s.upper_inv * &rhs
            })?;
            prev = out[n].clone();
            out.push(next);
        }
        Ok(out)
    }

    /// Coefficient form of `P_0, …, P_{n_max}`, built by the same recursion.
    pub fn polynomials(&self, n_max: usize) -> Result<Vec<MatrixPolynomial>> {
        let d = self.dim();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(MatrixPolynomial::constant(DenseMatrix::identity(d)));
        for n in 0..n_max {
            let next = self.with_step(n, |s| {
                let cur = &out[n];
                let mut rhs = cur.shift().sub(&cur.left_mul(&s.diag));
                if n > 0 {
                    rhs = rhs.sub(&out[n - 1].left_mul(&s.lower));
                }
                rhs.left_mul(&s.upper_inv)
            })?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Polynomial with `d`×`d` matrix coefficients, `Σ_k M_k x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial {
    coeffs: Vec<DenseMatrix>,
}

impl MatrixPolynomial {
    pub fn constant(m: DenseMatrix) -> Self {
        Self { coeffs: vec![m] }
    }

    pub fn from_coefficients(coeffs: Vec<DenseMatrix>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &[DenseMatrix] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn dims(&self) -> (usize, usize) {
        (self.coeffs[0].rows(), self.coeffs[0].cols())
    }

    pub fn eval(&self, x: f64) -> DenseMatrix {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = &acc.scale(x) + c;
        }
        acc
    }

    /// Multiply by `x`.
    pub fn shift(&self) -> Self {
        let (r, c) = self.dims();
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(DenseMatrix::zeros(r, c));
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        let (r, c) = self.dims();
        if self.coeffs.len() == 1 {
            return Self::constant(DenseMatrix::zeros(r, c));
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, m)| m.scale(k as f64))
                .collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(DenseMatrix::transpose).collect(),
        }
    }

    pub fn left_mul(&self, m: &DenseMatrix) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| m * c).collect(),
        }
    }

    pub fn right_mul(&self, m: &DenseMatrix) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * m).collect(),
        }
    }

    /// Product of two matrix polynomials, `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let (r, _) = self.dims();
        let (_, c) = other.dims();
        let mut coeffs = vec![DenseMatrix::zeros(r, c); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let (r, c) = self.dims();
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = DenseMatrix::zeros(r, c);
        let coeffs = (0..len)
            .map(|k| {
                let a = self.coeffs.get(k).unwrap_or(&zero);
                let b = other.coeffs.get(k).unwrap_or(&zero);
                a + &b.scale(sign)
            })
            .collect();
        Self { coeffs }
    }

    /// Largest absolute coefficient entry.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.iter().map(DenseMatrix::max_abs).fold(0.0, f64::max)
    }
}
