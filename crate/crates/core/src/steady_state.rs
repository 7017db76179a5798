//! Closed-form t → ∞ limit of the reduced equations and the drive strength
//! at which level 2 overtakes the ground state.

use crate::error::{Error, Result};
use crate::model::{DensityVector, SystemParams};

/// Long-time limit of the reduced state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub state: DensityVector,
}

impl SteadyState {
    pub fn rho00(&self) -> f64 {
        self.state.rho00
    }

    pub fn rho_b(&self) -> f64 {
        self.state.rho_b
    }

    pub fn rho11(&self) -> f64 {
        self.state.rho11
    }

    pub fn rho22(&self) -> f64 {
        self.state.rho22
    }
}

/// Steady state from setting all time derivatives to zero.
///
/// `rho11` comes from normalisation, then `rho22 = (k21/k02) rho11`,
/// `rhoB = (1/T1 + k21) rho11 / W` and `rho00 = rho11 + 2 rhoB / (W T2)`.
/// At `W = 0` every population relaxes to the ground state.
pub fn steady_state(params: &SystemParams) -> SteadyState {
    let w = params.omega();
    if w == 0.0 {
        return SteadyState {
            state: DensityVector::ground(),
        };
    }
    let w2 = w * w;
    let ratio = params.k21() / params.k02();
    let rho11 = 0.5 * w2
        / (w2 * (1.0 + 0.5 * ratio)
            + 1.0 / (params.t1() * params.t2())
            + params.k21() / params.t2());
    let rho22 = ratio * rho11;
    let rho_b = params.level1_decay_rate() * rho11 / w;
    let rho00 = rho11 + 2.0 * rho_b / (w * params.t2());
    SteadyState {
        state: DensityVector::new(rho00, rho_b, rho11, rho22),
    }
}

/// `W → ∞` limit of `rho11(∞)`: `1 / (2 + k21/k02)`.
pub fn saturated_rho11(params: &SystemParams) -> f64 {
    1.0 / (2.0 + params.k21() / params.k02())
}

/// Where `rho22(∞)` crosses `rho00(∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossover {
    At(f64),
    /// `k21 <= k02`: level 2 never holds more population than the ground state.
    Never,
}

impl Crossover {
    pub fn omega(self) -> Option<f64> {
        match self {
            Crossover::At(w) => Some(w),
            Crossover::Never => None,
        }
    }
}

/// Closed-form crossover drive strength.
///
/// Equating `rho22(∞)` and `rho00(∞)` gives
/// `W*² = 2 (1/T1 + k21) / (T2 (k21/k02 − 1))`. The drive stored in
/// `params` is ignored.
pub fn crossover_omega(params: &SystemParams) -> Crossover {
    let excess = params.k21() / params.k02() - 1.0;
    if excess <= 0.0 {
        return Crossover::Never;
    }
    let w2 = 2.0 * params.level1_decay_rate() / (params.t2() * excess);
    Crossover::At(w2.sqrt())
}

/// Bisection on `rho22(∞) − rho00(∞)` over `[lo, hi]`.
///
/// Independent of the closed form in [`crossover_omega`]; kept as its
/// cross-check.
pub fn crossover_bisection(params: &SystemParams, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let gap = |w: f64| -> Result<f64> {
        let s = steady_state(&params.with_omega(w)?);
        Ok(s.rho22() - s.rho00())
    };
    if !(lo >= 0.0 && hi > lo && tol > 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let fa = gap(a)?;
    let fb = gap(b)?;
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if gap(m)?.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
