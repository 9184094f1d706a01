//! Reflecting walk on the nonnegative integers: row 0 is `(0, 1)`, then
//! `q, 0, p` with `q = 1 − p`.
//!
//! The density `√(4pq − x²)/(1 − x²)` lives on `[−√(4pq), √(4pq)]`. For
//! `p < 1/2` the measure also has atoms at ±1, each of mass `(1 − 2p)π`, so
//! the total atomic mass is `(2 − 4p)π`.

use std::f64::consts::PI;

use crate::chain::{Transition, TridiagonalChain};
use crate::error::{Error, Result};
use crate::km::KmSystem;
use crate::measures::{Atom, Density, Measure, SpectralMeasure};
use crate::poly::{chebyshev_t, chebyshev_u};

#[derive(Clone, Debug)]
pub struct ChebyshevWalkFamily {
    p: f64,
    chain: TridiagonalChain,
    measure: SpectralMeasure,
}

impl ChebyshevWalkFamily {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Parameter {
                name: "p".into(),
                reason: format!("need 0 < p < 1, got {p}"),
            });
        }
        let q = 1.0 - p;
        let chain = TridiagonalChain::unbounded(move |j| {
            Ok(if j == 0 {
                Transition::new(0.0, 0.0, 1.0)
            } else {
                Transition::new(q, 0.0, p)
            })
        })?;
        let radius = (4.0 * p * q).sqrt();
        let density = if p == 0.5 {
            // √(1 − x²)/(1 − x²) = (1 − x)^{−1/2}(1 + x)^{−1/2}
            Density::new(-1.0, 1.0, -0.5, -0.5, |_| 1.0)?
        } else {
            Density::new(-radius, radius, 0.5, 0.5, |x| 1.0 / (1.0 - x * x))?
        };
        let atoms = if p < 0.5 {
            let mass = (1.0 - 2.0 * p) * PI;
            vec![Atom { location: -1.0, mass }, Atom { location: 1.0, mass }]
        } else {
            Vec::new()
        };
        let measure = SpectralMeasure::new(Some(density), atoms)?;
        Ok(Self { p, chain, measure })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn chain(&self) -> &TridiagonalChain {
        &self.chain
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }

    pub fn support_radius(&self) -> f64 {
        (4.0 * self.p * (1.0 - self.p)).sqrt()
    }

    /// Combined mass of the atoms at ±1: `(2 − 4p)π` for `p < 1/2`, else 0.
    pub fn total_atom_mass(&self) -> f64 {
        if self.p < 0.5 {
            (2.0 - 4.0 * self.p) * PI
        } else {
            0.0
        }
    }

    /// `Q_j(x) = (q/p)^{j/2} [(2 − 2p) T_j(y) + (2p − 1) U_j(y)]`, `y = x/(2√(pq))`.
    pub fn closed_form(&self, j: usize, x: f64) -> f64 {
        let p = self.p;
        let q = 1.0 - p;
        let y = x / (2.0 * (p * q).sqrt());
        (q / p).powf(j as f64 / 2.0)
            * ((2.0 - 2.0 * p) * chebyshev_t(j, y) + (2.0 * p - 1.0) * chebyshev_u(j as i64, y))
    }

    /// Published normalization: `2(1−p)π` for `n = 0`, `2p(1−p)π` for `n ≥ 1`.
    pub fn orthogonality_constant(&self, n: usize) -> f64 {
        let p = self.p;
        if n == 0 {
            2.0 * (1.0 - p) * PI
        } else {
            2.0 * p * (1.0 - p) * PI
        }
    }

    /// Scale factor `(p/(1−p))ⁿ` applied to the `n`-th inner product.
    pub fn scaling(&self, n: usize) -> f64 {
        (self.p / (1.0 - self.p)).powi(n as i32)
    }

    pub fn pi(&self, j: usize) -> f64 {
        self.scaling(j) / self.orthogonality_constant(j)
    }

    pub fn km_system(&self) -> Result<KmSystem> {
        let me = self.clone();
        KmSystem::new(
            self.chain.clone(),
            Measure::Continuous(self.measure.clone()),
            move |j| me.pi(j),
        )
    }
}
