//! Generating functions and recurrence for scalar chains.
//!
//! With `U(z) = Σ zⁿ (ℙⁿ)ᵢᵢ` and `F(z)` the first-return generating function,
//! `U = FU + 1`. Through the spectral measure,
//!
//! ```text
//! U(z) = π_i ∫ Q_i(x)² / (1 − zx) ψ(dx)
//! ```
//!
//! so the state is recurrent iff this diverges at `z = 1`, and the expected
//! return time `F'(1)` is `1 / (π_i m₁ Q_i(1)²)` where `m₁` is the mass of
//! the atom at 1 (infinite when there is none).

use crate::error::{Error, Result};
use crate::km::KmSystem;

/// Coefficients recovered by [`first_return_probabilities`] by default.
pub const DEFAULT_SERIES_ORDER: usize = 64;

/// Point at which `U'/U²` is evaluated as a diagnostic for `F'(1)`.
pub const DIAGNOSTIC_Z: f64 = 1.0 - 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recurrence {
    PositiveRecurrent,
    NullRecurrent,
    Transient,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReturnTime {
    /// `F'(1)`; `+∞` for null-recurrent states.
    pub value: f64,
    pub atom_mass: f64,
    /// `U'(z)/U(z)²` at [`DIAGNOSTIC_Z`], for comparison only.
    pub diagnostic: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub limit_exists: bool,
    /// `lim (ℙⁿ)ᵢⱼ` when it exists.
    pub limit_value: Option<f64>,
    /// Limits along even and odd `n` when the full limit does not exist.
    pub oscillation: Option<(f64, f64)>,
}

fn q_at(sys: &KmSystem, i: usize, x: f64) -> Result<f64> {
    Ok(sys.sequence().eval(x, i)?[i])
}

fn check_state(sys: &KmSystem, i: usize) -> Result<()> {
    if let Some(last) = sys.last_state() {
        if i > last {
            return Err(Error::OutOfRange {
                index: i,
                size: last + 1,
            });
        }
    }
    Ok(())
}

fn check_z(z: f64) -> Result<()> {
    if !(z.abs() < 1.0) {
        return Err(Error::Domain {
            value: z,
            reason: "generating functions need |z| < 1; use return_probability at z = 1".into(),
        });
    }
    Ok(())
}

/// `U(z) = Σ_n zⁿ (ℙⁿ)ᵢᵢ`.
pub fn u_series(sys: &KmSystem, i: usize, z: f64) -> Result<f64> {
    check_state(sys, i)?;
    check_z(z)?;
    let seq = sys.sequence();
    let r = sys.measure().integrate_vec(
        |x, out| {
            let q = seq.eval(x, i).map(|v| v[i]).unwrap_or(f64::NAN);
            out[0] = q * q / (1.0 - z * x);
        },
        1,
    )?;
    Ok(sys.pi(i) * r.values[0])
}

/// `U'(z)`.
pub fn u_series_derivative(sys: &KmSystem, i: usize, z: f64) -> Result<f64> {
    check_state(sys, i)?;
    check_z(z)?;
    let seq = sys.sequence();
    let r = sys.measure().integrate_vec(
        |x, out| {
            let q = seq.eval(x, i).map(|v| v[i]).unwrap_or(f64::NAN);
            let d = 1.0 - z * x;
            out[0] = x * q * q / (d * d);
        },
        1,
    )?;
    Ok(sys.pi(i) * r.values[0])
}

/// `F(z) = 1 − 1/U(z)`.
pub fn f_series(sys: &KmSystem, i: usize, z: f64) -> Result<f64> {
    Ok(1.0 - 1.0 / u_series(sys, i, z)?)
}

pub fn recurrence(sys: &KmSystem, i: usize) -> Result<Recurrence> {
    check_state(sys, i)?;
    let q1 = q_at(sys, i, 1.0)?;
    if q1 != 0.0 && sys.measure().atom_mass_at(1.0) > 0.0 {
        return Ok(Recurrence::PositiveRecurrent);
    }
    if q1 != 0.0 && sys.measure().continuous_part_diverges_at_one() {
        return Ok(Recurrence::NullRecurrent);
    }
    Ok(Recurrence::Transient)
}

/// `F(1)`, the probability of ever returning to `i`.
pub fn return_probability(sys: &KmSystem, i: usize) -> Result<f64> {
    if recurrence(sys, i)? != Recurrence::Transient {
        return Ok(1.0);
    }
    let seq = sys.sequence();
    let r = sys.measure().integrate_over_one_minus_x_vec(
        |x, out| {
            let q = seq.eval(x, i).map(|v| v[i]).unwrap_or(f64::NAN);
            out[0] = q * q;
        },
        1,
    )?;
    let u1 = sys.pi(i) * r.values[0];
    Ok(1.0 - 1.0 / u1)
}

/// `F'(1)` from the atom at 1.
pub fn expected_return_time(sys: &KmSystem, i: usize) -> Result<ReturnTime> {
    let kind = recurrence(sys, i)?;
    if kind == Recurrence::Transient {
        return Err(Error::Transient { state: i });
    }
    let atom_mass = sys.measure().atom_mass_at(1.0);
    let value = match kind {
        Recurrence::PositiveRecurrent => {
            let q1 = q_at(sys, i, 1.0)?;
            1.0 / (sys.pi(i) * atom_mass * q1 * q1)
        }
        _ => f64::INFINITY,
    };
    let u = u_series(sys, i, DIAGNOSTIC_Z)?;
    let du = u_series_derivative(sys, i, DIAGNOSTIC_Z)?;
    Ok(ReturnTime {
        value,
        atom_mass,
        diagnostic: du / (u * u),
    })
}

/// Existence of `lim (ℙⁿ)ᵢⱼ` from the atoms at ±1.
pub fn classify(sys: &KmSystem, i: usize, j: usize) -> Result<Classification> {
    check_state(sys, i)?;
    check_state(sys, j)?;
    let m_plus = sys.measure().atom_mass_at(1.0);
    let m_minus = sys.measure().atom_mass_at(-1.0);
    let plus = sys.pi(j) * m_plus * q_at(sys, i, 1.0)? * q_at(sys, j, 1.0)?;
    if m_minus > 0.0 {
        let minus = sys.pi(j) * m_minus * q_at(sys, i, -1.0)? * q_at(sys, j, -1.0)?;
        if minus != 0.0 {
            return Ok(Classification {
                limit_exists: false,
                limit_value: None,
                oscillation: Some((plus + minus, plus - minus)),
            });
        }
    }
    Ok(Classification {
        limit_exists: true,
        limit_value: Some(plus),
        oscillation: None,
    })
}

/// `f_1, …, f_order`, the first-return probabilities, by dividing out
/// `U = 1/(1 − F)` term by term.
pub fn first_return_probabilities(sys: &KmSystem, i: usize, order: usize) -> Result<Vec<f64>> {
    check_state(sys, i)?;
    let u = sys.km_entries(i, i, order)?;
    let mut f = vec![0.0; order + 1];
    for n in 1..=order {
        let conv: f64 = (1..n).map(|k| f[k] * u[n - k]).sum();
        f[n] = u[n] - conv;
    }
    f.remove(0);
    Ok(f)
}
