//! Ehrenfest urn: `2N` balls, state = balls in the first urn.
//!
//! Eigenvectors are Krawtchouk polynomials `K_i(x) = ₂F₁(−i, −x; −2N; 2)`,
//! orthogonal against the binomial weights `C(2N, x)/2^{2N}`.

use crate::chain::{Transition, TridiagonalChain};
use crate::error::{Error, Result};
use crate::km::KmSystem;
use crate::measures::{DiscreteMeasure, Measure};
use crate::poly::{hypergeom_truncated, pochhammer, HypergeomSpec, MAX_TRUNCATION};

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Clone, Debug)]
pub struct EhrenfestFamily {
    half: usize,
    chain: TridiagonalChain,
    measure: DiscreteMeasure,
}

impl EhrenfestFamily {
    pub fn new(half: usize) -> Result<Self> {
        if half < 1 || 2 * half > MAX_TRUNCATION {
            return Err(Error::Parameter {
                name: "N".into(),
                reason: format!("need 1 ≤ N ≤ {}, got {half}", MAX_TRUNCATION / 2),
            });
        }
        let balls = 2 * half;
        let total = balls as f64;
        let transitions = (0..=balls)
            .map(|j| Transition::new(j as f64 / total, 0.0, (balls - j) as f64 / total))
            .collect();
        let chain = TridiagonalChain::finite(transitions)?;
        let norm = 2f64.powi(balls as i32);
        let nodes = (0..=balls).map(|x| 1.0 - x as f64 / half as f64).collect();
        let weights = (0..=balls).map(|x| binomial(balls, x) / norm).collect();
        let measure = DiscreteMeasure::new(nodes, weights)?;
        Ok(Self { half, chain, measure })
    }

    /// `N`; the chain lives on `0..=2N`.
    pub fn half(&self) -> usize {
        self.half
    }

    pub fn chain(&self) -> &TridiagonalChain {
        &self.chain
    }

    /// Binomial weights placed at the eigenvalues `1 − x/N`.
    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn eigenvalue(&self, x: usize) -> f64 {
        1.0 - x as f64 / self.half as f64
    }

    pub fn weight(&self, x: usize) -> f64 {
        binomial(2 * self.half, x) / 2f64.powi(2 * self.half as i32)
    }

    pub fn krawtchouk(&self, i: usize, x: usize) -> Result<f64> {
        let balls = 2 * self.half;
        hypergeom_truncated(&HypergeomSpec {
            numerator: vec![-(i as f64), -(x as f64)],
            denominator: vec![-(balls as f64)],
            argument: 2.0,
            truncation: balls,
        })
    }

    /// `π_i` from `π_i⁻¹ = (−1)^i i! / (−2N)_i`, which equals `C(2N, i)`.
    pub fn pi(&self, i: usize) -> f64 {
        pi_formula(self.half, i)
    }

    pub fn km_system(&self) -> Result<KmSystem> {
        let half = self.half;
        KmSystem::new(self.chain.clone(), Measure::Discrete(self.measure.clone()), move |i| {
            pi_formula(half, i)
        })
    }
}

fn pi_formula(half: usize, i: usize) -> f64 {
    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
    let factorial: f64 = (1..=i).map(|k| k as f64).product();
    let inv = sign * factorial / pochhammer(-2.0 * half as f64, i);
    1.0 / inv
}
