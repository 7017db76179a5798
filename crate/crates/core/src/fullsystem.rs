//! The full 3×3 complex density matrix under the resonant RWA drive plus the
//! phenomenological relaxation channels.
//!
//! The drive couples only levels 0 and 1 through `V01 = V10 = ħW/2`. With
//! that convention the populations together with `rhoB = Im(rho01)` obey
//! exactly the reduced four-variable equations, while `Re(rho01)` and the
//! `(rho02, rho12)` / `(rho20, rho21)` pairs evolve in closed sectors of
//! their own. This module exists to check that reduction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::{Sampling, MAX_STEP_NORM};
use crate::model::{DensityVector, SystemParams};
use crate::ode::rk4_step;

const N: usize = 3;

/// Drive matrix element between levels 0 and 1, as a rate `V01 / ħ` in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConvention {
    pub v01: f64,
}

impl CouplingConvention {
    /// `V01 = ħW/2`.
    pub fn resonant_rwa(omega: f64) -> Self {
        Self { v01: 0.5 * omega }
    }

    /// `<j|V|k>/ħ`; only the 0–1 elements are nonzero.
    pub fn element(&self, j: usize, k: usize) -> f64 {
        match (j, k) {
            (0, 1) | (1, 0) => self.v01,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullState {
    pub rho: [[Complex64; N]; N],
}

impl FullState {
    /// Validates Hermiticity, a real diagonal in `[0, 1]` and unit trace.
    pub fn new(rho: [[Complex64; N]; N]) -> Result<Self> {
        let state = Self { rho };
        if rho
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = state.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::InvalidState(format!(
                "not Hermitian (error {herm:e})"
            )));
        }
        for (i, row) in rho.iter().enumerate() {
            let d = row[i].re;
            if !(-1e-8..=1.0 + 1e-8).contains(&d) {
                return Err(Error::InvalidState(format!(
                    "rho{i}{i} = {d} outside [0, 1]"
                )));
            }
        }
        let trace = state.trace();
        if (trace - 1.0).abs() > 1e-5 {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        Ok(state)
    }

    pub fn diagonal(p0: f64, p1: f64, p2: f64) -> Result<Self> {
        let mut rho = [[Complex64::new(0.0, 0.0); N]; N];
        rho[0][0] = p0.into();
        rho[1][1] = p1.into();
        rho[2][2] = p2.into();
        Self::new(rho)
    }

    /// Pure level-1 state.
    pub fn excited() -> Self {
        Self::diagonal(0.0, 1.0, 0.0).expect("valid state")
    }

    /// Lifts a reduced state: `rho01 = i·rhoB`, all other coherences zero.
    pub fn from_reduced(x: &DensityVector) -> Result<Self> {
        let mut rho = [[Complex64::new(0.0, 0.0); N]; N];
        rho[0][0] = x.rho00.into();
        rho[1][1] = x.rho11.into();
        rho[2][2] = x.rho22.into();
        rho[0][1] = Complex64::new(0.0, x.rho_b);
        rho[1][0] = Complex64::new(0.0, -x.rho_b);
        Self::new(rho)
    }

    /// Sets `rho[j][k]` and its Hermitian partner.
    pub fn with_coherence(mut self, j: usize, k: usize, value: Complex64) -> Result<Self> {
        if j == k {
            return Err(Error::InvalidState("coherence indices must differ".into()));
        }
        self.rho[j][k] = value;
        self.rho[k][j] = value.conj();
        Self::new(self.rho)
    }

    pub fn trace(&self) -> f64 {
        (0..N).map(|i| self.rho[i][i].re).sum()
    }

    /// `max |rho_ij − conj(rho_ji)|`, including imaginary parts on the diagonal.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                err = err.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        err
    }

    fn to_flat(self) -> [Complex64; N * N] {
        std::array::from_fn(|k| self.rho[k / N][k % N])
    }

    fn from_flat(x: [Complex64; N * N]) -> Self {
        Self {
            rho: std::array::from_fn(|i| std::array::from_fn(|j| x[i * N + j])),
        }
    }
}

/// Projects onto the reduced variables `(rho00, Im rho01, rho11, rho22)`.
pub fn reduce(full: &FullState) -> DensityVector {
    DensityVector::new(
        full.rho[0][0].re,
        full.rho[0][1].im,
        full.rho[1][1].re,
        full.rho[2][2].re,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FullState>,
    pub params: SystemParams,
}

impl FullTrajectory {
    pub fn reduced(&self) -> Vec<DensityVector> {
        self.states.iter().map(reduce).collect()
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.states
            .iter()
            .map(FullState::hermiticity_error)
            .fold(0.0, f64::max)
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.trace() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Right-hand side: `-i[V, rho]/ħ` plus relaxation.
fn full_rhs(
    params: &SystemParams,
    v: &CouplingConvention,
    x: &[Complex64; N * N],
) -> [Complex64; N * N] {
    let rho = |j: usize, k: usize| x[j * N + k];
    let minus_i = Complex64::new(0.0, -1.0);
    let dephase = 1.0 / params.t2();
    let mut out = [Complex64::new(0.0, 0.0); N * N];
    for j in 0..N {
        for l in 0..N {
            let mut comm = Complex64::new(0.0, 0.0);
            for k in 0..N {
                comm += rho(k, l) * v.element(j, k) - rho(j, k) * v.element(k, l);
            }
            let mut d = minus_i * comm;
            if j != l {
                d -= rho(j, l) * dephase;
            }
            out[j * N + l] = d;
        }
    }
    let (p1, p2) = (rho(1, 1), rho(2, 2));
    out[0] += p1 * params.k01() + p2 * params.k02();
    out[N + 1] -= p1 * params.level1_decay_rate();
    out[2 * N + 2] += p1 * params.k21() - p2 * params.k02();
    out
}

/// RK4 integration of all nine density-matrix elements.
pub fn evolve_full(
    params: &SystemParams,
    init: &FullState,
    t_end: f64,
    dt: f64,
) -> Result<FullTrajectory> {
    evolve_full_sampled(params, init, &Sampling::new(t_end, dt))
}

pub fn evolve_full_sampled(
    params: &SystemParams,
    init: &FullState,
    sampling: &Sampling,
) -> Result<FullTrajectory> {
    let init = FullState::new(init.rho)?;
    let n = sampling.steps()?;
    let dt = sampling.dt;
    let v = CouplingConvention::resonant_rwa(params.omega());
    // Largest row sum of the superoperator, bounded loosely.
    let rate_bound =
        2.0 * v.v01 * 2.0 + 1.0 / params.t2() + params.level1_decay_rate() + params.k02();
    if dt * rate_bound > MAX_STEP_NORM {
        return Err(Error::StepSize {
            dt,
            reason: format!("dt·rate = {:.3} exceeds {MAX_STEP_NORM}", dt * rate_bound),
        });
    }

    let f = |x: &[Complex64; N * N]| full_rhs(params, &v, x);
    let t_at = |i: usize| sampling.t_end * i as f64 / n as f64;
    let mut x = init.to_flat();
    let mut times = vec![0.0];
    let mut states = vec![init];
    for i in 1..=n {
        x = rk4_step(&f, &x, dt);
        if i % sampling.stride == 0 || i == n {
            times.push(t_at(i));
            states.push(FullState::from_flat(x));
        }
    }
    Ok(FullTrajectory {
        times,
        states,
        params: *params,
    })
}

/// Largest magnitude reached by the elements that decouple from the
/// populations: `rho02, rho12, rho20, rho21` and `Re(rho01)`.
pub fn decoupling_residual(traj: &FullTrajectory) -> f64 {
    traj.states
        .iter()
        .map(|s| {
            let r = &s.rho;
            [
                r[0][2].norm(),
                r[1][2].norm(),
                r[2][0].norm(),
                r[2][1].norm(),
                r[0][1].re.abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
