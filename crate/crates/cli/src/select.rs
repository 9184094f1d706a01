//! Chain selection from `--family` flags or a `--spec` file.

use std::env;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::builder::PossibleValuesParser;
use clap::Args;
use kmrep::families::FamilySpec;
use kmrep::quadrature::{QuadConfig, DEFAULT_MAX_DEPTH};
use kmrep::spec_file::{parse_chain_spec, BuiltChain, ChainSpec};
use serde_json::{json, Value};

pub const MAX_PANELS_VAR: &str = "KM_MAX_PANELS";

#[derive(Args, Debug, Clone)]
pub struct ChainArgs {
    #[arg(long, value_parser = PossibleValuesParser::new(FamilySpec::NAMES), conflicts_with = "spec", required_unless_present = "spec")]
    pub family: Option<String>,
    /// Half the number of balls (ehrenfest).
    #[arg(long = "N")]
    pub half: Option<usize>,
    /// Up probability (chebyshev_walk).
    #[arg(long)]
    pub p: Option<f64>,
    /// White balls (bernoulli_laplace).
    #[arg(long = "W")]
    pub white: Option<usize>,
    /// Black balls (bernoulli_laplace).
    #[arg(long = "B")]
    pub black: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Chain-spec JSON file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

pub struct Selected {
    pub chain: BuiltChain,
    pub name: String,
    pub params: Value,
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.with_context(|| format!("family `{family}` needs --{flag}"))
}

impl ChainArgs {
    fn given(&self) -> Vec<&'static str> {
        let mut g = Vec::new();
        if self.half.is_some() {
            g.push("N");
        }
        if self.p.is_some() {
            g.push("p");
        }
        if self.white.is_some() {
            g.push("W");
        }
        if self.black.is_some() {
            g.push("B");
        }
        if self.alpha.is_some() {
            g.push("alpha");
        }
        if self.beta.is_some() {
            g.push("beta");
        }
        g
    }

    fn family_spec(&self, name: &str) -> Result<(FamilySpec, &'static [&'static str])> {
        Ok(match name {
            "ehrenfest" => (
                FamilySpec::Ehrenfest {
                    n: need(self.half, "N", name)?,
                },
                &["N"],
            ),
            "chebyshev_walk" => (
                FamilySpec::ChebyshevWalk {
                    p: need(self.p, "p", name)?,
                },
                &["p"],
            ),
            "bernoulli_laplace" => (
                FamilySpec::BernoulliLaplace {
                    white: need(self.white, "W", name)?,
                    black: need(self.black, "B", name)?,
                },
                &["W", "B"],
            ),
            "jacobi_block" => (
                FamilySpec::JacobiBlock {
                    alpha: need(self.alpha, "alpha", name)?,
                    beta: need(self.beta, "beta", name)?,
                },
                &["alpha", "beta"],
            ),
            "chebyshev_block" => (FamilySpec::ChebyshevBlock, &[]),
            other => bail!("unknown family `{other}`"),
        })
    }

    pub fn select(&self) -> Result<Selected> {
        let spec = match (&self.family, &self.spec) {
            (Some(name), None) => {
                let (spec, allowed) = self.family_spec(name)?;
                if let Some(extra) = self.given().into_iter().find(|g| !allowed.contains(g)) {
                    bail!("--{extra} is not a parameter of `{name}`");
                }
                ChainSpec::Family(spec)
            }
            (None, Some(path)) => {
                if let Some(extra) = self.given().first() {
                    bail!("--{extra} cannot be combined with --spec");
                }
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                parse_chain_spec(&text).with_context(|| format!("in {}", path.display()))?
            }
            _ => bail!("give exactly one of --family or --spec"),
        };
        let (name, params) = describe(&spec);
        let chain = spec.build()?;
        Ok(Selected { chain, name, params })
    }
}

fn describe(spec: &ChainSpec) -> (String, Value) {
    match spec {
        ChainSpec::Custom { p, .. } => ("custom_tridiagonal".into(), json!({ "states": p.len() })),
        ChainSpec::Family(f) => {
            let params = match *f {
                FamilySpec::Ehrenfest { n } => json!({ "N": n }),
                FamilySpec::ChebyshevWalk { p } => json!({ "p": p }),
                FamilySpec::BernoulliLaplace { white, black } => json!({ "W": white, "B": black }),
                FamilySpec::JacobiBlock { alpha, beta } => json!({ "alpha": alpha, "beta": beta }),
                FamilySpec::ChebyshevBlock => json!({}),
            };
            (f.name().into(), params)
        }
    }
}

/// Quadrature settings, with `KM_MAX_PANELS` overriding the refinement depth.
pub fn quadrature() -> Result<QuadConfig> {
    let depth = match env::var(MAX_PANELS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .with_context(|| format!("{MAX_PANELS_VAR} must be a positive integer, got `{v}`"))?,
        Err(env::VarError::NotPresent) => DEFAULT_MAX_DEPTH,
        Err(e) => bail!("{MAX_PANELS_VAR}: {e}"),
    };
    Ok(QuadConfig::default().with_max_depth(depth))
}
