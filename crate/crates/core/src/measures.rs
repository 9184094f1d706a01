//! Spectral measures for scalar chains and matrix weights for block chains.
//!
//! A [`SpectralMeasure`] is an absolutely continuous part of the form
//! `(x−a)^α (b−x)^β g(x)` on `[a, b]` plus finitely many atoms. The endpoint
//! exponents are declared rather than detected, so quadrature can remove them
//! by substitution and the analysis code can decide whether `∫ dψ/(1−x)`
//! diverges. Atoms are always summed exactly.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::quadrature::{integrate_jacobi_vec, Integral, QuadConfig};

/// Locations closer than this are treated as the same point.
pub const LOCATION_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

pub type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// `(x − lower)^lower_exp · (upper − x)^upper_exp · factor(x)` on `(lower, upper)`.
#[derive(Clone)]
pub struct Density {
    pub lower: f64,
    pub upper: f64,
    pub lower_exp: f64,
    pub upper_exp: f64,
    factor: Arc<ScalarFn>,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("support", &(self.lower, self.upper))
            .field("exponents", &(self.lower_exp, self.upper_exp))
            .finish_non_exhaustive()
    }
}

impl Density {
    pub fn new<F>(lower: f64, upper: f64, lower_exp: f64, upper_exp: f64, factor: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::Parameter {
                name: "support".into(),
                reason: format!("[{lower}, {upper}] is not a proper interval"),
            });
        }
        if !(lower_exp > -1.0 && upper_exp > -1.0) {
            return Err(Error::Parameter {
                name: "endpoint exponent".into(),
                reason: format!("({lower_exp}, {upper_exp}) not integrable"),
            });
        }
        Ok(Self {
            lower,
            upper,
            lower_exp,
            upper_exp,
            factor: Arc::new(factor),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lower || x >= self.upper {
            return 0.0;
        }
        (x - self.lower).powf(self.lower_exp) * (self.upper - x).powf(self.upper_exp) * (self.factor)(x)
    }

    fn integrate_vec<F>(&self, f: F, dim: usize, upper_exp_shift: f64, cfg: &QuadConfig) -> Result<Integral>
    where
        F: Fn(f64, &mut [f64]),
    {
        let factor = &self.factor;
        integrate_jacobi_vec(
            |x, out| {
                f(x, out);
                let g = factor(x);
                for v in out.iter_mut() {
                    *v *= g;
                }
            },
            dim,
            self.lower,
            self.upper,
            self.lower_exp,
            self.upper_exp + upper_exp_shift,
            cfg,
        )
    }
}

/// Continuous density plus atoms, supported in `[−1, 1]`.
#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    density: Option<Density>,
    atoms: Vec<Atom>,
    quad: QuadConfig,
}

fn check_atoms(atoms: &[Atom]) -> Result<()> {
    for (k, a) in atoms.iter().enumerate() {
        if !(a.location >= -1.0 - LOCATION_TOL && a.location <= 1.0 + LOCATION_TOL) {
            return Err(Error::Parameter {
                name: format!("atoms[{k}].location"),
                reason: format!("{} lies outside [−1, 1]", a.location),
            });
        }
        if !(a.mass > 0.0 && a.mass.is_finite()) {
            return Err(Error::Parameter {
                name: format!("atoms[{k}].mass"),
                reason: format!("mass {} must be positive and finite", a.mass),
            });
        }
        if atoms[..k]
            .iter()
            .any(|b| (b.location - a.location).abs() <= LOCATION_TOL)
        {
            return Err(Error::Parameter {
                name: format!("atoms[{k}].location"),
                reason: "duplicate location".into(),
            });
        }
    }
    Ok(())
}

impl SpectralMeasure {
    pub fn new(density: Option<Density>, atoms: Vec<Atom>) -> Result<Self> {
        if let Some(d) = &density {
            if d.lower < -1.0 - LOCATION_TOL || d.upper > 1.0 + LOCATION_TOL {
                return Err(Error::Parameter {
                    name: "support".into(),
                    reason: format!("[{}, {}] is not inside [−1, 1]", d.lower, d.upper),
                });
            }
        }
        check_atoms(&atoms)?;
        let m = Self {
            density,
            atoms,
            quad: QuadConfig::default(),
        };
        let mass = m.integrate(|_| 1.0)?.0;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Parameter {
                name: "measure".into(),
                reason: format!("total mass {mass} is not finite and positive"),
            });
        }
        Ok(m)
    }

    pub fn with_quadrature(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn quadrature(&self) -> &QuadConfig {
        &self.quad
    }

    /// `∫ f dψ` for a vector-valued integrand, with an absolute error estimate.
    pub fn integrate_vec<F>(&self, f: F, dim: usize) -> Result<Integral>
    where
        F: Fn(f64, &mut [f64]),
    {
        self.integrate_vec_shifted(f, dim, 0.0)
    }

    fn integrate_vec_shifted<F>(&self, f: F, dim: usize, upper_exp_shift: f64) -> Result<Integral>
    where
        F: Fn(f64, &mut [f64]),
    {
        let mut total = match &self.density {
            Some(d) => d.integrate_vec(&f, dim, upper_exp_shift, &self.quad)?,
            None => Integral {
                values: vec![0.0; dim],
                error: 0.0,
                scale: 0.0,
            },
        };
        let mut buf = vec![0.0; dim];
        for a in &self.atoms {
            f(a.location, &mut buf);
            for (t, v) in total.values.iter_mut().zip(&buf) {
                *t += a.mass * v;
            }
            total.scale = total.scale.max(buf.iter().fold(0.0, |m, v| m.max((a.mass * v).abs())));
        }
        Ok(total)
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<(f64, f64)> {
        let r = self.integrate_vec(|x, o| o[0] = f(x), 1)?;
        Ok((r.values[0], r.error))
    }

    /// Smallest interval containing the density support and all atoms.
    pub fn hull(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if let Some(d) = &self.density {
            lo = d.lower;
            hi = d.upper;
        }
        for a in &self.atoms {
            lo = lo.min(a.location);
            hi = hi.max(a.location);
        }
        (lo, hi)
    }

    pub fn atom_mass_at(&self, t: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.location - t).abs() <= LOCATION_TOL)
            .map(|a| a.mass)
            .sum()
    }

    fn outside_support(&self, x: f64) -> Result<()> {
        let inside_density = self
            .density
            .as_ref()
            .is_some_and(|d| x >= d.lower - LOCATION_TOL && x <= d.upper + LOCATION_TOL);
        let on_atom = self.atoms.iter().any(|a| (a.location - x).abs() <= LOCATION_TOL);
        if inside_density || on_atom || !x.is_finite() {
            return Err(Error::Domain {
                value: x,
                reason: "Stieltjes transform needs x off the support".into(),
            });
        }
        Ok(())
    }
}

/// Finitely supported measure: `Σ_k w_k δ(x − x_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::Parameter {
                name: "discrete measure".into(),
                reason: format!("{} nodes vs {} weights", nodes.len(), weights.len()),
            });
        }
        for (k, (&x, &w)) in nodes.iter().zip(&weights).enumerate() {
            if !x.is_finite() {
                return Err(Error::Parameter {
                    name: format!("nodes[{k}]"),
                    reason: "not finite".into(),
                });
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Parameter {
                    name: format!("weights[{k}]"),
                    reason: format!("weight {w} must be positive"),
                });
            }
            if nodes[..k].iter().any(|y| (y - x).abs() <= LOCATION_TOL) {
                return Err(Error::Parameter {
                    name: format!("nodes[{k}]"),
                    reason: "duplicate node".into(),
                });
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Scalar spectral measure of either kind.
#[derive(Clone, Debug)]
pub enum Measure {
    Continuous(SpectralMeasure),
    Discrete(DiscreteMeasure),
}

impl From<SpectralMeasure> for Measure {
    fn from(m: SpectralMeasure) -> Self {
        Measure::Continuous(m)
    }
}

impl From<DiscreteMeasure> for Measure {
    fn from(m: DiscreteMeasure) -> Self {
        Measure::Discrete(m)
    }
}

impl Measure {
    pub fn integrate_vec<F>(&self, f: F, dim: usize) -> Result<Integral>
    where
        F: Fn(f64, &mut [f64]),
    {
        match self {
            Measure::Continuous(m) => m.integrate_vec(f, dim),
            Measure::Discrete(m) => {
                let mut values = vec![0.0; dim];
                let mut buf = vec![0.0; dim];
                let mut scale: f64 = 0.0;
                for (x, w) in m.iter() {
                    f(x, &mut buf);
                    for (t, v) in values.iter_mut().zip(&buf) {
                        *t += w * v;
                        scale = scale.max((w * v).abs());
                    }
                }
                Ok(Integral {
                    values,
                    error: 0.0,
                    scale,
                })
            }
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<(f64, f64)> {
        let r = self.integrate_vec(|x, o| o[0] = f(x), 1)?;
        Ok((r.values[0], r.error))
    }

    /// `∫ f g dψ`.
    pub fn inner_product<F, G>(&self, f: F, g: G) -> Result<f64>
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        Ok(self.integrate(|x| f(x) * g(x))?.0)
    }

    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.integrate(|_| 1.0)?.0)
    }

    /// `∫ dψ(λ)/(x − λ)` for `x` off the support.
    pub fn stieltjes(&self, x: f64) -> Result<f64> {
        match self {
            Measure::Continuous(m) => {
                m.outside_support(x)?;
                Ok(m.integrate(|l| 1.0 / (x - l))?.0)
            }
            Measure::Discrete(m) => {
                if m.nodes.iter().any(|n| (n - x).abs() <= LOCATION_TOL) || !x.is_finite() {
                    return Err(Error::Domain {
                        value: x,
                        reason: "x coincides with a node".into(),
                    });
                }
                Ok(m.iter().map(|(n, w)| w / (x - n)).sum())
            }
        }
    }

    /// Mass carried exactly at `t`.
    pub fn atom_mass_at(&self, t: f64) -> f64 {
        match self {
            Measure::Continuous(m) => m.atom_mass_at(t),
            Measure::Discrete(m) => m
                .iter()
                .filter(|(x, _)| (x - t).abs() <= LOCATION_TOL)
                .map(|(_, w)| w)
                .sum(),
        }
    }

    /// All atoms (every node, for a discrete measure).
    pub fn atoms(&self) -> Vec<Atom> {
        match self {
            Measure::Continuous(m) => m.atoms.clone(),
            Measure::Discrete(m) => m.iter().map(|(location, mass)| Atom { location, mass }).collect(),
        }
    }

    pub fn hull(&self) -> (f64, f64) {
        match self {
            Measure::Continuous(m) => m.hull(),
            Measure::Discrete(m) => m.nodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            }),
        }
    }

    /// Whether `∫ h(x)/(1 − x) dψ` over the non-atomic part diverges for an
    /// `h` that is nonzero at 1: true iff the density reaches 1 with exponent ≤ 0.
    pub fn continuous_part_diverges_at_one(&self) -> bool {
        match self {
            Measure::Continuous(m) => m
                .density
                .as_ref()
                .is_some_and(|d| (d.upper - 1.0).abs() <= LOCATION_TOL && d.upper_exp <= 0.0),
            Measure::Discrete(_) => false,
        }
    }

    /// `∫ f(x)/(1 − x) dψ` with the atom at 1 excluded. Callers must first
    /// rule out divergence with [`Measure::continuous_part_diverges_at_one`].
    pub fn integrate_over_one_minus_x_vec<F>(&self, f: F, dim: usize) -> Result<Integral>
    where
        F: Fn(f64, &mut [f64]),
    {
        match self {
            Measure::Continuous(m) => {
                let mut total = match &m.density {
                    Some(d) if (d.upper - 1.0).abs() <= LOCATION_TOL => {
                        if d.upper_exp <= 0.0 {
                            return Err(Error::Domain {
                                value: 1.0,
                                reason: "integral diverges at x = 1".into(),
                            });
                        }
                        // (1 − x)^{β−1}: fold the pole into the endpoint exponent.
                        d.integrate_vec(&f, dim, -1.0, &m.quad)?
                    }
                    Some(d) => d.integrate_vec(
                        |x, out| {
                            f(x, out);
                            for v in out.iter_mut() {
                                *v /= 1.0 - x;
                            }
                        },
                        dim,
                        0.0,
                        &m.quad,
                    )?,
                    None => Integral {
                        values: vec![0.0; dim],
                        error: 0.0,
                        scale: 0.0,
                    },
                };
                let mut buf = vec![0.0; dim];
                for a in m.atoms.iter().filter(|a| (a.location - 1.0).abs() > LOCATION_TOL) {
                    f(a.location, &mut buf);
                    for (t, v) in total.values.iter_mut().zip(&buf) {
                        *t += a.mass * v / (1.0 - a.location);
                    }
                }
                Ok(total)
            }
            Measure::Discrete(m) => {
                let mut values = vec![0.0; dim];
                let mut buf = vec![0.0; dim];
                for (x, w) in m.iter().filter(|(x, _)| (x - 1.0).abs() > LOCATION_TOL) {
                    f(x, &mut buf);
                    for (t, v) in values.iter_mut().zip(&buf) {
                        *t += w * v / (1.0 - x);
                    }
                }
                Ok(Integral {
                    values,
                    error: 0.0,
                    scale: 0.0,
                })
            }
        }
    }
}

pub type MatrixFn = dyn Fn(f64) -> DenseMatrix + Send + Sync;

/// `W(x) = (x−lower)^lower_exp (upper−x)^upper_exp F(x)` with `F` a smooth
/// `d`×`d` matrix function.
#[derive(Clone)]
pub struct MatrixWeight {
    dim: usize,
    pub lower: f64,
    pub upper: f64,
    pub lower_exp: f64,
    pub upper_exp: f64,
    factor: Arc<MatrixFn>,
    quad: QuadConfig,
}

impl fmt::Debug for MatrixWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixWeight")
            .field("dim", &self.dim)
            .field("support", &(self.lower, self.upper))
            .field("exponents", &(self.lower_exp, self.upper_exp))
            .finish_non_exhaustive()
    }
}

/// Extreme eigenvalues of `W` sampled on a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityReport {
    pub min_eigenvalue: f64,
    pub at: f64,
    pub max_asymmetry: f64,
}

impl MatrixWeight {
    pub fn new<F>(dim: usize, lower: f64, upper: f64, lower_exp: f64, upper_exp: f64, factor: F) -> Result<Self>
    where
        F: Fn(f64) -> DenseMatrix + Send + Sync + 'static,
    {
        if !(lower < upper) || !(lower_exp > -1.0 && upper_exp > -1.0) || dim == 0 {
            return Err(Error::Parameter {
                name: "matrix weight".into(),
                reason: format!("bad support [{lower}, {upper}] or exponents ({lower_exp}, {upper_exp})"),
            });
        }
        let probe = factor(0.5 * (lower + upper));
        if probe.rows() != dim || probe.cols() != dim {
            return Err(Error::Parameter {
                name: "matrix weight".into(),
                reason: format!("factor is {}x{}, expected {dim}x{dim}", probe.rows(), probe.cols()),
            });
        }
        Ok(Self {
            dim,
            lower,
            upper,
            lower_exp,
            upper_exp,
            factor: Arc::new(factor),
            quad: QuadConfig::default(),
        })
    }

    pub fn with_quadrature(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: f64) -> DenseMatrix {
        let k = (x - self.lower).powf(self.lower_exp) * (self.upper - x).powf(self.upper_exp);
        (self.factor)(x).scale(k)
    }

    /// Integrates `count` matrices produced by `f(x, F(x))` against the scalar
    /// endpoint kernel. Returns the integrals and the worst error estimate.
    pub fn integrate_matrices<G>(&self, count: usize, f: G) -> Result<(Vec<DenseMatrix>, f64)>
    where
        G: Fn(f64, &DenseMatrix) -> Vec<DenseMatrix>,
    {
        let d = self.dim;
        let r = integrate_jacobi_vec(
            |x, out| {
                let mats = f(x, &(self.factor)(x));
                for (k, m) in mats.iter().enumerate() {
                    out[k * d * d..(k + 1) * d * d].copy_from_slice(m.as_slice());
                }
            },
            count * d * d,
            self.lower,
            self.upper,
            self.lower_exp,
            self.upper_exp,
            &self.quad,
        )?;
        let mats = r
            .values
            .chunks(d * d)
            .map(|c| DenseMatrix::from_row_major(d, d, c.to_vec()))
            .collect::<Result<_>>()?;
        Ok((mats, r.error))
    }

    /// `(P, Q)_W = ∫ P(x) W(x) Q(x)ᵀ dx`.
    pub fn inner_product<P, Q>(&self, p: P, q: Q) -> Result<(DenseMatrix, f64)>
    where
        P: Fn(f64) -> DenseMatrix,
        Q: Fn(f64) -> DenseMatrix,
    {
        let (mut m, err) = self.integrate_matrices(1, |x, w| vec![&(&p(x) * w) * &q(x).transpose()])?;
        Ok((m.remove(0), err))
    }

    /// Symmetry defect and smallest eigenvalue of `W` at the given points.
    pub fn positivity(&self, points: &[f64]) -> PositivityReport {
        let mut report = PositivityReport {
            min_eigenvalue: f64::INFINITY,
            at: f64::NAN,
            max_asymmetry: 0.0,
        };
        for &x in points {
            let w = self.eval(x);
            let asym = w.max_abs_diff(&w.transpose());
            report.max_asymmetry = report.max_asymmetry.max(asym);
            let sym = (&w + &w.transpose()).scale(0.5);
            let ev = sym.symmetric_eigenvalues()[0];
            if ev < report.min_eigenvalue {
                report.min_eigenvalue = ev;
                report.at = x;
            }
        }
        report
    }
}
