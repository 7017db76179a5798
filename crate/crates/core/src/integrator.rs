//! Time evolution of the reduced state.
//!
//! Two independent propagators: a fixed-step RK4 integration of `dx/dt = Lx`
//! and the modal expansion `x(t) = V exp(Γ t) V⁻¹ x(0)` built from the
//! generator's eigen-decomposition.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{build_generator, DensityVector, GeneratorMatrix, SystemParams, DIM};
use crate::ode::rk4_step;
use crate::spectrum::eigenvalues;

pub const DEFAULT_DT: f64 = 1e-3;

/// Largest tolerated `|rho00 + rho11 + rho22 − 1|` along a trajectory.
pub const CONSERVATION_BUDGET: f64 = 1e-5;

/// Largest `dt · ‖L‖∞` accepted by [`evolve`]. RK4 is stable up to about
/// 2.78 on the negative real axis.
pub const MAX_STEP_NORM: f64 = 2.5;

/// Eigenvector matrices with a 1-norm condition number above this are
/// treated as defective.
pub const MAX_CONDITION: f64 = 1e8;

/// State at `t = 0`. Populations must sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition(DensityVector);

impl InitialCondition {
    pub fn new(state: DensityVector) -> Result<Self> {
        let arr = state.to_array();
        if arr.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite entry in {arr:?}")));
        }
        if (state.population_sum() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "populations sum to {} instead of 1",
                state.population_sum()
            )));
        }
        Ok(Self(state))
    }

    /// Everything in level 1, nothing elsewhere.
    pub fn excited() -> Self {
        Self(DensityVector::excited())
    }

    pub fn state(&self) -> DensityVector {
        self.0
    }
}

impl Default for InitialCondition {
    fn default() -> Self {
        Self::excited()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityVector>,
    pub params: SystemParams,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the sample at `t`, allowing for floating-point grid noise.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * t.abs().max(1.0);
        let i = self.times.partition_point(|&s| s < t - tol);
        (i < self.times.len() && (self.times[i] - t).abs() <= tol).then_some(i)
    }

    pub fn sample_at(&self, t: f64) -> Result<DensityVector> {
        self.index_of(t)
            .map(|i| self.states[i])
            .ok_or(Error::MissingSample(t))
    }

    pub fn last(&self) -> Option<&DensityVector> {
        self.states.last()
    }
}

/// Uniform integration grid with an output stride.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub t_end: f64,
    pub dt: f64,
    /// Internal steps between stored samples.
    pub stride: usize,
}

impl Sampling {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            stride: 1,
        }
    }

    pub fn with_stride(self, stride: usize) -> Self {
        Self { stride, ..self }
    }

    /// Times at which [`evolve_sampled`] stores samples.
    pub fn sample_times(&self) -> Result<Vec<f64>> {
        let n = self.steps()?;
        let mut times: Vec<f64> = (0..=n)
            .filter(|i| i % self.stride == 0 || *i == n)
            .map(|i| self.t_end * i as f64 / n as f64)
            .collect();
        times.dedup();
        Ok(times)
    }

    pub(crate) fn steps(&self) -> Result<usize> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "t_end = {} must be positive",
                self.t_end
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidGrid("stride must be at least 1".into()));
        }
        let n = (self.t_end / self.dt).round();
        if n < 1.0 || (n * self.dt - self.t_end).abs() > 1e-9 * self.t_end {
            return Err(Error::InvalidGrid(format!(
                "t_end = {} is not a whole number of steps dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(n as usize)
    }
}

/// RK4 integration with the default output stride of one sample per step.
pub fn evolve(
    params: &SystemParams,
    init: &InitialCondition,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    evolve_sampled(params, init, &Sampling::new(t_end, dt))
}

/// RK4 integration of the reduced equations on a uniform grid.
///
/// Samples are stored every `stride` steps and always at `t_end`. Sample
/// times are `t_end · i / n` so that grid points such as 11 ns and 14 ns
/// land exactly.
pub fn evolve_sampled(
    params: &SystemParams,
    init: &InitialCondition,
    sampling: &Sampling,
) -> Result<Trajectory> {
    let n = sampling.steps()?;
    let dt = sampling.dt;
    let gen = build_generator(params);
    let step_norm = dt * gen.norm_inf();
    if step_norm > MAX_STEP_NORM {
        return Err(Error::StepSize {
            dt,
            reason: format!(
                "dt·‖L‖ = {step_norm:.3} exceeds the RK4 stability limit {MAX_STEP_NORM}"
            ),
        });
    }

    let f = |x: &[f64; DIM]| gen.apply(x);
    let stride = sampling.stride;
    let capacity = n / stride + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    let t_at = |i: usize| sampling.t_end * i as f64 / n as f64;

    let mut x = init.state().to_array();
    times.push(0.0);
    states.push(DensityVector::from(x));
    for i in 1..=n {
        x = rk4_step(&f, &x, dt);
        if i % stride == 0 || i == n {
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::StepSize {
                    dt,
                    reason: format!("state became non-finite at t = {}", t_at(i)),
                });
            }
            times.push(t_at(i));
            states.push(DensityVector::from(x));
        }
    }

    let traj = Trajectory {
        times,
        states,
        params: *params,
    };
    let residual = conservation_residual(&traj);
    if residual > CONSERVATION_BUDGET {
        return Err(Error::StepSize {
            dt,
            reason: format!("population sum drifted by {residual:.3e}"),
        });
    }
    Ok(traj)
}

/// `max_t |rho00 + rho11 + rho22 − 1|`.
pub fn conservation_residual(traj: &Trajectory) -> f64 {
    traj.states
        .iter()
        .map(|s| (s.population_sum() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Samples where `|rhoB| > 2 sqrt(rho00 rho11) + slack`, a positivity bound
/// of the full density matrix. Diagnostic only.
pub fn coherence_bound_violations(traj: &Trajectory, slack: f64) -> Vec<usize> {
    let violations: Vec<usize> = traj
        .states
        .iter()
        .enumerate()
        .filter(|(_, s)| s.rho_b.abs() > 2.0 * (s.rho00 * s.rho11).max(0.0).sqrt() + slack)
        .map(|(i, _)| i)
        .collect();
    if let Some(&first) = violations.first() {
        log::warn!(
            "coherence bound violated at {} samples (first at t = {}, omega = {})",
            violations.len(),
            traj.times[first],
            traj.params.omega()
        );
    }
    violations
}

/// Solution of the reduced equations written as a sum of exponentials,
/// `x_i(t) = Σ_k c_ik exp(gamma_k t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalExpansion {
    gammas: [Complex64; DIM],
    coefficients: [[Complex64; DIM]; DIM],
    condition: f64,
}

impl ModalExpansion {
    pub fn new(params: &SystemParams, init: &InitialCondition) -> Result<Self> {
        let gen = build_generator(params);
        let gammas = eigenvalues(&gen)?.gammas;
        let ill = |condition: f64| Error::IllConditioned {
            omega: params.omega(),
            condition,
        };

        let mut v = Matrix4::<Complex64>::zeros();
        for (k, &g) in gammas.iter().enumerate() {
            let col = null_vector(&gen, g).ok_or_else(|| ill(f64::INFINITY))?;
            for i in 0..DIM {
                v[(i, k)] = col[i];
            }
        }
        let v_inv = v.try_inverse().ok_or_else(|| ill(f64::INFINITY))?;
        let condition = norm1(&v) * norm1(&v_inv);
        if !(condition <= MAX_CONDITION) {
            return Err(ill(condition));
        }

        let x0 = init.state().to_array();
        let mut weights = [Complex64::new(0.0, 0.0); DIM];
        for (k, w) in weights.iter_mut().enumerate() {
            *w = (0..DIM).map(|j| v_inv[(k, j)] * x0[j]).sum();
        }
        let mut coefficients = [[Complex64::new(0.0, 0.0); DIM]; DIM];
        for (i, row) in coefficients.iter_mut().enumerate() {
            for (k, c) in row.iter_mut().enumerate() {
                *c = v[(i, k)] * weights[k];
            }
        }
        Ok(Self {
            gammas,
            coefficients,
            condition,
        })
    }

    pub fn gammas(&self) -> &[Complex64; DIM] {
        &self.gammas
    }

    /// `coefficients()[i][k]` multiplies `exp(gamma_k t)` in component `i`.
    pub fn coefficients(&self) -> &[[Complex64; DIM]; DIM] {
        &self.coefficients
    }

    /// 1-norm condition number of the eigenvector matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn evaluate(&self, t: f64) -> Result<DensityVector> {
        let phases = self.gammas.map(|g| (g * t).exp());
        let mut out = [0.0; DIM];
        let mut scale = 1.0f64;
        for (i, o) in out.iter_mut().enumerate() {
            let z: Complex64 = (0..DIM).map(|k| self.coefficients[i][k] * phases[k]).sum();
            scale = scale.max(self.coefficients[i].iter().map(|c| c.norm()).sum());
            if z.im.abs() > 1e-10 * scale {
                return Err(Error::NumericalFailure(format!(
                    "modal sum has imaginary residue {:e} at t = {t}",
                    z.im
                )));
            }
            *o = z.re;
        }
        Ok(DensityVector::from(out))
    }
}

fn norm1(m: &Matrix4<Complex64>) -> f64 {
    (0..DIM)
        .map(|j| (0..DIM).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn det3(m: [[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Unit vector spanning the kernel of `L − g I`, from the signed 3×3 minors
/// of the best-conditioned choice of three rows.
fn null_vector(gen: &GeneratorMatrix, g: Complex64) -> Option<[Complex64; DIM]> {
    let e = gen.entries();
    let a: [[Complex64; DIM]; DIM] = std::array::from_fn(|i| {
        std::array::from_fn(|j| Complex64::new(e[i][j], 0.0) - if i == j { g } else { 0.0.into() })
    });
    let scale = gen.norm_inf().max(g.norm()).max(1.0);

    let mut best: Option<([Complex64; DIM], f64)> = None;
    for skip in 0..DIM {
        let rows: Vec<usize> = (0..DIM).filter(|&r| r != skip).collect();
        let v: [Complex64; DIM] = std::array::from_fn(|j| {
            let cols: Vec<usize> = (0..DIM).filter(|&c| c != j).collect();
            let minor = det3(std::array::from_fn(|r| {
                std::array::from_fn(|c| a[rows[r]][cols[c]])
            }));
            if j % 2 == 0 {
                minor
            } else {
                -minor
            }
        });
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(_, n)| norm > *n) {
            best = Some((v, norm));
        }
    }
    let (v, norm) = best?;
    if !(norm > 1e-12 * scale.powi(3)) {
        return None;
    }
    // Fix the phase so the largest entry is real and positive.
    let pivot = v
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
    let phase = pivot / pivot.norm();
    Some(v.map(|z| z / (phase * norm)))
}

/// Modal-expansion solution sampled at `times`.
///
/// `times` must start at 0 and increase strictly.
pub fn exact_solution(
    params: &SystemParams,
    init: &InitialCondition,
    times: &[f64],
) -> Result<Trajectory> {
    match times.first() {
        Some(0.0) => {}
        _ => return Err(Error::InvalidGrid("time grid must start at t = 0".into())),
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("times must increase strictly".into()));
    }
    let modes = ModalExpansion::new(params, init)?;
    let mut states = Vec::with_capacity(times.len());
    states.push(init.state());
    for &t in &times[1..] {
        states.push(modes.evaluate(t)?);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        params: *params,
    })
}

/// `n + 1` evenly spaced times on `[0, t_end]`.
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}
