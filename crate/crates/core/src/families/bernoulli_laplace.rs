//! Bernoulli–Laplace urns: `W` white balls in urn 1, `B ≥ W` black balls in
//! urn 2, one ball swapped each step. State `w` = white balls in urn 1.
//!
//! Eigenvectors are dual Hahn polynomials
//! `R_n(λ(x)) = ₃F₂(−n, −x, x−W−B−1; −W, −W; 1)` with `λ(x) = x(x−W−B−1)`.
//!
//! The classical normalization `μ(x)`, `π_j` gives `π_j Σ R_i R_j μ = −δᵢⱼ`
//! taken verbatim; [`BernoulliLaplaceFamily::mu`] and
//! [`BernoulliLaplaceFamily::pi`] carry the sign fix that makes both positive.

use crate::chain::{Transition, TridiagonalChain};
use crate::error::{Error, Result};
use crate::km::KmSystem;
use crate::measures::{DiscreteMeasure, Measure};
use crate::poly::{hypergeom_truncated, pochhammer, HypergeomSpec, MAX_TRUNCATION};

#[derive(Clone, Debug)]
pub struct BernoulliLaplaceFamily {
    white: usize,
    black: usize,
    chain: TridiagonalChain,
    measure: DiscreteMeasure,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl BernoulliLaplaceFamily {
    pub fn new(white: usize, black: usize) -> Result<Self> {
        if white < 1 {
            return Err(Error::Parameter {
                name: "W".into(),
                reason: "need W ≥ 1".into(),
            });
        }
        if white > black {
            return Err(Error::Parameter {
                name: "W".into(),
                reason: format!("need W ≤ B, got W = {white}, B = {black}"),
            });
        }
        if white > MAX_TRUNCATION || black > 4096 {
            return Err(Error::Parameter {
                name: "W".into(),
                reason: format!("urn sizes too large (W ≤ {MAX_TRUNCATION}, B ≤ 4096)"),
            });
        }
        let (wf, bf) = (white as f64, black as f64);
        let transitions = (0..=white)
            .map(|w| {
                let w = w as f64;
                let up = (wf - w) / wf * ((wf - w) / bf);
                let down = w / wf * ((bf - wf + w) / bf);
                let stay = w / wf * ((wf - w) / bf) + (wf - w) / wf * ((bf - wf + w) / bf);
                Transition::new(down, stay, up)
            })
            .collect();
        let chain = TridiagonalChain::finite(transitions)?;
        let mut me = Self {
            white,
            black,
            chain,
            measure: DiscreteMeasure::new(vec![0.0], vec![1.0])?,
        };
        let nodes = (0..=white).map(|x| me.eigenvalue(x)).collect();
        let weights = (0..=white).map(|x| me.mu(x)).collect();
        me.measure = DiscreteMeasure::new(nodes, weights)?;
        Ok(me)
    }

    pub fn white(&self) -> usize {
        self.white
    }

    pub fn black(&self) -> usize {
        self.black
    }

    pub fn chain(&self) -> &TridiagonalChain {
        &self.chain
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn lambda(&self, x: usize) -> f64 {
        let x = x as f64;
        x * (x - (self.white + self.black) as f64 - 1.0)
    }

    /// `e(x) = 1 − x(B + W − x + 1)/(BW)`.
    pub fn eigenvalue(&self, x: usize) -> f64 {
        let (w, b, x) = (self.white as f64, self.black as f64, x as f64);
        1.0 - x * (b + w - x + 1.0) / (b * w)
    }

    pub fn dual_hahn(&self, n: usize, x: usize) -> Result<f64> {
        let (w, b) = (self.white as f64, self.black as f64);
        let x = x as f64;
        hypergeom_truncated(&HypergeomSpec {
            numerator: vec![-(n as f64), -x, x - w - b - 1.0],
            denominator: vec![-w, -w],
            argument: 1.0,
            truncation: self.white,
        })
    }

    /// `μ(x)` exactly as classically printed (lowercase `w` read as `W`).
    pub fn mu_printed(&self, x: usize) -> f64 {
        let (w, b) = (self.white as f64, self.black as f64);
        let xf = x as f64;
        let num = factorial(self.white) * pochhammer(-w, x).powi(2) * (2.0 * xf - w - b - 1.0);
        let den = sign(x + 1) * factorial(x) * pochhammer(-b, x) * pochhammer(xf - w - b - 1.0, self.white + 1);
        num / den
    }

    /// `π_j` exactly as classically printed.
    pub fn pi_printed(&self, j: usize) -> f64 {
        let (w, b) = (self.white as f64, self.black as f64);
        pochhammer(-w, j) / factorial(j) * pochhammer(-b, self.white - j) / factorial(self.white - j)
    }

    /// Positive orthogonality weight, `(−1)^{W+1} μ_printed(x)`.
    pub fn mu(&self, x: usize) -> f64 {
        sign(self.white + 1) * self.mu_printed(x)
    }

    /// Positive `π_j = (−1)^W π_printed(j) = C(W, j) C(B, W − j)`.
    pub fn pi(&self, j: usize) -> f64 {
        sign(self.white) * self.pi_printed(j)
    }

    pub fn km_system(&self) -> Result<KmSystem> {
        let me = self.clone();
        KmSystem::new(self.chain.clone(), Measure::Discrete(self.measure.clone()), move |j| {
            me.pi(j)
        })
    }
}
