//! Decay-constant extraction and drive-strength sweeps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::model::{Component, SystemParams};
use crate::spectrum::{spectrum, Spectrum};
use crate::steady_state::{steady_state, SteadyState};

/// Residuals `|x(t) − x(∞)|` below this carry no usable signal.
pub const SIGNIFICANCE_FLOOR: f64 = 1e-12;

/// Default abscissae of the two-point fit, in ns.
pub const FIT_T1: f64 = 11.0;
pub const FIT_T2: f64 = 14.0;

/// Two-point exponential fit of the approach to steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub tau: f64,
    pub component: Component,
    pub t1: f64,
    pub t2: f64,
    /// `x(t1) − x(∞)` and `x(t2) − x(∞)`.
    pub residuals: [f64; 2],
}

/// `tau = (t2 − t1) / ln(|x(t1) − x∞| / |x(t2) − x∞|)`.
pub fn fit_decay_constant(
    traj: &Trajectory,
    target: &SteadyState,
    component: Component,
    t1: f64,
    t2: f64,
) -> Result<DecayFit> {
    fit_decay_constant_with_floor(traj, target, component, t1, t2, SIGNIFICANCE_FLOOR)
}

pub fn fit_decay_constant_with_floor(
    traj: &Trajectory,
    target: &SteadyState,
    component: Component,
    t1: f64,
    t2: f64,
    floor: f64,
) -> Result<DecayFit> {
    if !(t2 > t1) {
        return Err(Error::InvalidGrid(format!(
            "fit window [{t1}, {t2}] is empty"
        )));
    }
    let x_inf = target.state.get(component);
    let r1 = traj.sample_at(t1)?.get(component) - x_inf;
    let r2 = traj.sample_at(t2)?.get(component) - x_inf;
    for (t, r) in [(t1, r1), (t2, r2)] {
        if !(r.abs() > floor) {
            return Err(Error::InsufficientSignal {
                component,
                t,
                residual: r.abs(),
                floor,
            });
        }
    }
    if r1.signum() != r2.signum() {
        return Err(Error::NumericalFailure(format!(
            "{component} crosses its steady-state value between t = {t1} and t = {t2}"
        )));
    }
    let ratio = r1.abs() / r2.abs();
    if !(ratio > 1.0) {
        return Err(Error::NumericalFailure(format!(
            "{component} is not approaching steady state on [{t1}, {t2}]"
        )));
    }
    Ok(DecayFit {
        tau: (t2 - t1) / ratio.ln(),
        component,
        t1,
        t2,
        residuals: [r1, r2],
    })
}

/// `1 / (1/T1 + k21)`: lifetime of level 1 when the drive is weak.
pub fn effective_initial_decay(params: &SystemParams) -> f64 {
    1.0 / params.level1_decay_rate()
}

/// Least-squares slope of `ln x(t)` over the samples with `t` in
/// `[start, end]`, returned as a decay time `-1/slope`.
pub fn early_decay_time(
    traj: &Trajectory,
    component: Component,
    start: f64,
    end: f64,
) -> Result<f64> {
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.states)
        .filter(|(&t, _)| t >= start - 1e-12 && t <= end + 1e-12)
        .map(|(&t, s)| (t, s.get(component)))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidGrid(format!(
            "fewer than two samples in [{start}, {end}]"
        )));
    }
    if let Some(&(t, x)) = pts.iter().find(|(_, x)| !(*x > 0.0)) {
        return Err(Error::InsufficientSignal {
            component,
            t,
            residual: x,
            floor: 0.0,
        });
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(t, x)| (t, x.ln())).collect();
    let slope = least_squares_slope(&logs);
    if !(slope < 0.0) {
        return Err(Error::NumericalFailure(format!(
            "{component} does not decay on [{start}, {end}]"
        )));
    }
    Ok(-1.0 / slope)
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Exponent of a power law `-gamma3 ∝ W^p`, from a least-squares line in
/// log–log coordinates over `omegas`.
pub fn gamma3_power_law(params: &SystemParams, omegas: &[f64]) -> Result<f64> {
    if omegas.len() < 2 || omegas.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "omegas",
            value: omegas.len() as f64,
            reason: "need at least two positive drive strengths",
        });
    }
    let pts = omegas
        .iter()
        .map(|&w| Ok((w.ln(), (-spectrum(&params.with_omega(w)?)?.gamma3()).ln())))
        .collect::<Result<Vec<_>>>()?;
    Ok(least_squares_slope(&pts))
}

/// One drive strength of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub omega: f64,
    pub steady: SteadyState,
    pub spectrum: Spectrum,
    pub tau3: f64,
}

/// Steady state and spectrum for each drive strength, in input order.
pub fn sweep(params: &SystemParams, omegas: &[f64]) -> Result<Vec<SweepRow>> {
    if omegas.is_empty() {
        return Err(Error::InvalidParameter {
            name: "omegas",
            value: 0.0,
            reason: "sweep needs at least one drive strength",
        });
    }
    omegas
        .par_iter()
        .map(|&omega| {
            let p = params.with_omega(omega)?;
            let spectrum = spectrum(&p)?;
            Ok(SweepRow {
                omega,
                steady: steady_state(&p),
                spectrum,
                tau3: spectrum.tau3(),
            })
        })
        .collect()
}
