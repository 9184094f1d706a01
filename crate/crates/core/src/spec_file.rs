//! JSON chain specs.
//!
//! ```json
//! {"family": "ehrenfest", "params": {"N": 3}}
//! {"family": "chebyshev_block"}
//! {"custom_tridiagonal": {"p": [1, 0.5, 0], "q": [0, 0.5, 1], "r": [0, 0, 0]}}
//! ```
//!
//! Families and their parameters: `ehrenfest {N}`, `chebyshev_walk {p}`,
//! `bernoulli_laplace {W, B}`, `jacobi_block {alpha, beta}`,
//! `chebyshev_block {}`. Unknown keys are rejected.

use serde::Deserialize;
use serde_json::Value;

use crate::chain::{TransitionRows, TridiagonalChain};
use crate::error::{Error, Result};
use crate::families::{Family, FamilySpec};

/// Longest accepted `custom_tridiagonal` coefficient list.
pub const MAX_CUSTOM_STATES: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum ChainSpec {
    Family(FamilySpec),
    Custom { p: Vec<f64>, q: Vec<f64>, r: Vec<f64> },
}

#[derive(Clone, Debug)]
pub enum BuiltChain {
    Family(Family),
    Custom(TridiagonalChain),
}

impl BuiltChain {
    pub fn rows(&self) -> &dyn TransitionRows {
        match self {
            Self::Family(f) => f.rows(),
            Self::Custom(c) => c,
        }
    }

    pub fn scalar_chain(&self) -> Option<&TridiagonalChain> {
        match self {
            Self::Family(f) => f.scalar_chain(),
            Self::Custom(c) => Some(c),
        }
    }

    pub fn family(&self) -> Option<&Family> {
        match self {
            Self::Family(f) => Some(f),
            Self::Custom(_) => None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: Option<String>,
    params: Option<Value>,
    custom_tridiagonal: Option<RawCustom>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCustom {
    p: Vec<f64>,
    q: Vec<f64>,
    r: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EhrenfestParams {
    #[serde(rename = "N")]
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WalkParams {
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UrnParams {
    #[serde(rename = "W")]
    white: usize,
    #[serde(rename = "B")]
    black: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JacobiParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

fn params<T: for<'de> Deserialize<'de>>(family: &str, value: Option<Value>) -> Result<T> {
    let value = value.unwrap_or_else(|| Value::Object(Default::default()));
    serde_json::from_value(value).map_err(|e| spec_err(format!("field `params` of `{family}`: {e}")))
}

/// Parses a spec without building the chain.
pub fn parse_chain_spec(text: &str) -> Result<ChainSpec> {
    let raw: RawSpec =
        serde_json::from_str(text).map_err(|e| spec_err(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    match (raw.family, raw.custom_tridiagonal) {
        (Some(_), Some(_)) => Err(spec_err("`family` and `custom_tridiagonal` are mutually exclusive")),
        (None, None) => Err(spec_err("expected a `family` or `custom_tridiagonal` field")),
        (None, Some(c)) => {
            if raw.params.is_some() {
                return Err(spec_err("field `params` is only valid with `family`"));
            }
            let longest = c.p.len().max(c.q.len()).max(c.r.len());
            if longest > MAX_CUSTOM_STATES {
                return Err(spec_err(format!(
                    "field `custom_tridiagonal`: at most {MAX_CUSTOM_STATES} states, got {longest}"
                )));
            }
            Ok(ChainSpec::Custom { p: c.p, q: c.q, r: c.r })
        }
        (Some(name), None) => {
            let spec = match name.as_str() {
                "ehrenfest" => {
                    let p: EhrenfestParams = params(&name, raw.params)?;
                    FamilySpec::Ehrenfest { n: p.n }
                }
                "chebyshev_walk" => {
                    let p: WalkParams = params(&name, raw.params)?;
                    FamilySpec::ChebyshevWalk { p: p.p }
                }
                "bernoulli_laplace" => {
                    let p: UrnParams = params(&name, raw.params)?;
                    FamilySpec::BernoulliLaplace {
                        white: p.white,
                        black: p.black,
                    }
                }
                "jacobi_block" => {
                    let p: JacobiParams = params(&name, raw.params)?;
                    FamilySpec::JacobiBlock {
                        alpha: p.alpha,
                        beta: p.beta,
                    }
                }
                "chebyshev_block" => {
                    let _: NoParams = params(&name, raw.params)?;
                    FamilySpec::ChebyshevBlock
                }
                other => {
                    return Err(spec_err(format!(
                        "field `family`: unknown family `{other}`, expected one of {}",
                        FamilySpec::NAMES.join(", ")
                    )))
                }
            };
            Ok(ChainSpec::Family(spec))
        }
    }
}

impl ChainSpec {
    pub fn build(&self) -> Result<BuiltChain> {
        match self {
            Self::Family(f) => Ok(BuiltChain::Family(f.build()?)),
            Self::Custom { p, q, r } => Ok(BuiltChain::Custom(TridiagonalChain::from_pqr(p, q, r)?)),
        }
    }
}

/// Parses and builds in one step.
pub fn load_chain(text: &str) -> Result<BuiltChain> {
    parse_chain_spec(text)?.build()
}
