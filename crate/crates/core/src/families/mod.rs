//! Built-in chains with their polynomials, measures and closed forms.

pub mod bernoulli_laplace;
pub mod chebyshev_block;
pub mod chebyshev_walk;
pub mod ehrenfest;
pub mod jacobi_block;

pub use bernoulli_laplace::BernoulliLaplaceFamily;
pub use chebyshev_block::{B0Reading, ChebyshevBlockFamily};
pub use chebyshev_walk::ChebyshevWalkFamily;
pub use ehrenfest::EhrenfestFamily;
pub use jacobi_block::JacobiBlockFamily;

use crate::chain::{BlockChain, TransitionRows, TridiagonalChain};
use crate::error::Result;
use crate::km::{BlockKmSystem, KmSystem};
use crate::measures::Measure;
use crate::quadrature::QuadConfig;

/// Family name plus parameters, before construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilySpec {
    Ehrenfest { n: usize },
    ChebyshevWalk { p: f64 },
    BernoulliLaplace { white: usize, black: usize },
    JacobiBlock { alpha: f64, beta: f64 },
    ChebyshevBlock,
}

impl FamilySpec {
    pub const NAMES: [&'static str; 5] = [
        "ehrenfest",
        "chebyshev_walk",
        "bernoulli_laplace",
        "jacobi_block",
        "chebyshev_block",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ehrenfest { .. } => "ehrenfest",
            Self::ChebyshevWalk { .. } => "chebyshev_walk",
            Self::BernoulliLaplace { .. } => "bernoulli_laplace",
            Self::JacobiBlock { .. } => "jacobi_block",
            Self::ChebyshevBlock => "chebyshev_block",
        }
    }

    pub fn build(&self) -> Result<Family> {
        Ok(match *self {
            Self::Ehrenfest { n } => Family::Ehrenfest(EhrenfestFamily::new(n)?),
            Self::ChebyshevWalk { p } => Family::ChebyshevWalk(ChebyshevWalkFamily::new(p)?),
            Self::BernoulliLaplace { white, black } => {
                Family::BernoulliLaplace(BernoulliLaplaceFamily::new(white, black)?)
            }
            Self::JacobiBlock { alpha, beta } => Family::JacobiBlock(JacobiBlockFamily::new(alpha, beta)?),
            Self::ChebyshevBlock => Family::ChebyshevBlock(ChebyshevBlockFamily::new()?),
        })
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    Ehrenfest(EhrenfestFamily),
    ChebyshevWalk(ChebyshevWalkFamily),
    BernoulliLaplace(BernoulliLaplaceFamily),
    JacobiBlock(JacobiBlockFamily),
    ChebyshevBlock(ChebyshevBlockFamily),
}

impl Family {
    pub fn spec(&self) -> FamilySpec {
        match self {
            Self::Ehrenfest(f) => FamilySpec::Ehrenfest { n: f.half() },
            Self::ChebyshevWalk(f) => FamilySpec::ChebyshevWalk { p: f.p() },
            Self::BernoulliLaplace(f) => FamilySpec::BernoulliLaplace {
                white: f.white(),
                black: f.black(),
            },
            Self::JacobiBlock(f) => FamilySpec::JacobiBlock {
                alpha: f.alpha(),
                beta: f.beta(),
            },
            Self::ChebyshevBlock(_) => FamilySpec::ChebyshevBlock,
        }
    }

    pub fn name(&self) -> &'static str {
        self.spec().name()
    }

    pub fn scalar_chain(&self) -> Option<&TridiagonalChain> {
        match self {
            Self::Ehrenfest(f) => Some(f.chain()),
            Self::ChebyshevWalk(f) => Some(f.chain()),
            Self::BernoulliLaplace(f) => Some(f.chain()),
            _ => None,
        }
    }

    pub fn block_chain(&self) -> Option<&BlockChain> {
        match self {
            Self::JacobiBlock(f) => Some(f.chain()),
            Self::ChebyshevBlock(f) => Some(f.chain()),
            _ => None,
        }
    }

    pub fn rows(&self) -> &dyn TransitionRows {
        match (self.scalar_chain(), self.block_chain()) {
            (Some(c), _) => c,
            (_, Some(c)) => c,
            _ => unreachable!("every family has a chain"),
        }
    }

    pub fn is_block(&self) -> bool {
        self.block_chain().is_some()
    }

    /// The family's KM system with the given quadrature settings. Discrete
    /// measures ignore `quad`; block systems cache Gram blocks up to
    /// `max_index`.
    pub fn km_system(&self, max_index: usize, quad: QuadConfig) -> Result<FamilySystem> {
        Ok(match self {
            Self::Ehrenfest(f) => FamilySystem::Scalar(f.km_system()?),
            Self::BernoulliLaplace(f) => FamilySystem::Scalar(f.km_system()?),
            Self::ChebyshevWalk(f) => {
                let me = f.clone();
                let measure = Measure::Continuous(f.measure().clone().with_quadrature(quad));
                FamilySystem::Scalar(KmSystem::new(f.chain().clone(), measure, move |j| me.pi(j))?)
            }
            Self::JacobiBlock(f) => FamilySystem::Block(BlockKmSystem::new(
                f.chain().clone(),
                f.weight().clone().with_quadrature(quad),
                max_index,
            )?),
            Self::ChebyshevBlock(f) => FamilySystem::Block(BlockKmSystem::new(
                f.chain().clone(),
                f.weight().clone().with_quadrature(quad),
                max_index,
            )?),
        })
    }
}

#[derive(Clone, Debug)]
pub enum FamilySystem {
    Scalar(KmSystem),
    Block(BlockKmSystem),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trips_through_build() {
        let specs = [
            FamilySpec::Ehrenfest { n: 3 },
            FamilySpec::ChebyshevWalk { p: 0.3 },
            FamilySpec::BernoulliLaplace { white: 2, black: 3 },
            FamilySpec::JacobiBlock { alpha: 1.0, beta: 2.0 },
            FamilySpec::ChebyshevBlock,
        ];
        for (s, name) in specs.iter().zip(FamilySpec::NAMES) {
            let f = s.build().unwrap();
            assert_eq!(f.spec(), *s);
            assert_eq!(f.name(), name);
            assert_eq!(f.is_block(), name.ends_with("_block"));
        }
    }
}
