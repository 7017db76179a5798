//! Physical parameters, the reduced state vector and the 4×4 generator.
//!
//! The reduced state is always ordered `(rho00, rhoB, rho11, rho22)`.
//! Times are in ns, rates in 1/ns and the Rabi frequency in rad/ns
//! (labelled "GHz" in user-facing output).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Number of variables in the reduced description.
pub const DIM: usize = 4;

/// Left null vector of every generator: `rho00 + rho11 + rho22` is conserved.
pub const CONSERVATION: [f64; DIM] = [1.0, 0.0, 1.0, 1.0];

/// Relaxation times, transfer rates and drive strength of the lambda system.
///
/// Level 1 decays to the ground state 0 at `1/t1` and to level 2 at `k21`;
/// level 2 returns to the ground state at `k02`. Coherences dephase with `t2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    t1: f64,
    t2: f64,
    k21: f64,
    k02: f64,
    omega: f64,
}

impl SystemParams {
    pub fn new(t1: f64, t2: f64, k21: f64, k02: f64, omega: f64) -> Result<Self> {
        let params = Self {
            t1,
            t2,
            k21,
            k02,
            omega,
        };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<()> {
        positive("t1", self.t1)?;
        positive("t2", self.t2)?;
        non_negative("k21", self.k21)?;
        positive("k02", self.k02)?;
        non_negative("omega", self.omega)?;
        Ok(())
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn k21(&self) -> f64 {
        self.k21
    }

    pub fn k02(&self) -> f64 {
        self.k02
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Direct 1 → 0 relaxation rate, always `1/t1`.
    pub fn k01(&self) -> f64 {
        1.0 / self.t1
    }

    /// Total depletion rate of level 1 by relaxation, `1/t1 + k21`.
    pub fn level1_decay_rate(&self) -> f64 {
        self.k01() + self.k21
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        Self::new(self.t1, self.t2, self.k21, self.k02, omega)
    }

    pub fn with_k02(self, k02: f64) -> Result<Self> {
        Self::new(self.t1, self.t2, self.k21, k02, self.omega)
    }

    pub fn with_k21(self, k21: f64) -> Result<Self> {
        Self::new(self.t1, self.t2, k21, self.k02, self.omega)
    }

    pub fn with_t1(self, t1: f64) -> Result<Self> {
        Self::new(t1, self.t2, self.k21, self.k02, self.omega)
    }

    pub fn with_t2(self, t2: f64) -> Result<Self> {
        Self::new(self.t1, t2, self.k21, self.k02, self.omega)
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        default_params()
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}

/// The reference parameter set with the drive switched off.
///
/// `t1 = 0.277/3` ns (rounded to 0.0923333), `t2 = 0.132` ns,
/// `k21 = 1/ns`, `k02 = 0.1/ns`.
pub fn default_params() -> SystemParams {
    SystemParams {
        t1: 0.0923333,
        t2: 0.132,
        k21: 1.0,
        k02: 0.1,
        omega: 0.0,
    }
}

/// Rabi frequency `E·mu/hbar`. With E in V/m, mu in C·m and hbar in J·s
/// the result is in rad/s; pick units so that it comes out in rad/ns.
pub fn rabi_frequency(e_field: f64, dipole: f64, hbar: f64) -> Result<f64> {
    positive("e_field", e_field)?;
    positive("dipole", dipole)?;
    positive("hbar", hbar)?;
    Ok(e_field * dipole / hbar)
}

/// Selects one element of the reduced state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Rho00,
    RhoB,
    Rho11,
    Rho22,
}

impl Component {
    pub const ALL: [Component; DIM] = [
        Component::Rho00,
        Component::RhoB,
        Component::Rho11,
        Component::Rho22,
    ];

    pub fn index(self) -> usize {
        match self {
            Component::Rho00 => 0,
            Component::RhoB => 1,
            Component::Rho11 => 2,
            Component::Rho22 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Rho00 => "rho00",
            Component::RhoB => "rhoB",
            Component::Rho11 => "rho11",
            Component::Rho22 => "rho22",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rho00" => Ok(Component::Rho00),
            "rhob" => Ok(Component::RhoB),
            "rho11" => Ok(Component::Rho11),
            "rho22" => Ok(Component::Rho22),
            other => Err(format!(
                "unknown component `{other}` (expected rho00, rhoB, rho11 or rho22)"
            )),
        }
    }
}

/// Reduced state `(rho00, rhoB, rho11, rho22)` at one instant.
///
/// `rho_b` is the imaginary part of the 0–1 coherence; the other three are
/// level occupation probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityVector {
    pub rho00: f64,
    pub rho_b: f64,
    pub rho11: f64,
    pub rho22: f64,
}

impl DensityVector {
    pub const fn new(rho00: f64, rho_b: f64, rho11: f64, rho22: f64) -> Self {
        Self {
            rho00,
            rho_b,
            rho11,
            rho22,
        }
    }

    /// All population in the excited level 1, no coherence.
    pub const fn excited() -> Self {
        Self::new(0.0, 0.0, 1.0, 0.0)
    }

    /// All population in the ground state.
    pub const fn ground() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub fn to_array(self) -> [f64; DIM] {
        [self.rho00, self.rho_b, self.rho11, self.rho22]
    }

    pub fn get(&self, component: Component) -> f64 {
        self.to_array()[component.index()]
    }

    pub fn population_sum(&self) -> f64 {
        self.rho00 + self.rho11 + self.rho22
    }

    pub fn max_abs_diff(&self, other: &DensityVector) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<[f64; DIM]> for DensityVector {
    fn from(x: [f64; DIM]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }
}

impl From<DensityVector> for [f64; DIM] {
    fn from(v: DensityVector) -> Self {
        v.to_array()
    }
}

/// Real 4×4 matrix `L` with `dx/dt = L x` for the reduced state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorMatrix {
    entries: [[f64; DIM]; DIM],
}

impl GeneratorMatrix {
    /// Wraps arbitrary entries. Spectral routines assume a zero mode, so
    /// this is mostly useful for tests.
    pub fn from_rows(entries: [[f64; DIM]; DIM]) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[[f64; DIM]; DIM] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn trace(&self) -> f64 {
        (0..DIM).map(|i| self.entries[i][i]).sum()
    }

    pub fn apply(&self, x: &[f64; DIM]) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        for (o, row) in out.iter_mut().zip(&self.entries) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// `v^T L` for a row vector `v`.
    pub fn left_apply(&self, v: &[f64; DIM]) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..DIM).map(|i| v[i] * self.entries[i][j]).sum();
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.entries
            .iter()
            .map(|row| row.iter().map(|a| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Assembles the generator of the reduced equations of motion.
///
/// ```text
///        rho00    rhoB     rho11          rho22
/// d00 [  0       -W        1/T1           k02  ]
/// dB  [  W/2     -1/T2    -W/2            0    ]
/// d11 [  0        W       -(1/T1 + k21)   0    ]
/// d22 [  0        0        k21           -k02  ]
/// ```
pub fn build_generator(params: &SystemParams) -> GeneratorMatrix {
    let w = params.omega;
    let k01 = params.k01();
    GeneratorMatrix {
        entries: [
            [0.0, -w, k01, params.k02],
            [0.5 * w, -1.0 / params.t2, -0.5 * w, 0.0],
            [0.0, w, -(k01 + params.k21), 0.0],
            [0.0, 0.0, params.k21, -params.k02],
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rabi_frequency_is_field_times_dipole_over_hbar() {
        assert_eq!(rabi_frequency(1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(rabi_frequency(2.0, 3.0, 1.5).unwrap(), 4.0);
        let a = rabi_frequency(0.7, 1.3, 2.9).unwrap();
        let b = rabi_frequency(1.4, 1.3, 2.9).unwrap();
        assert_relative_eq!(b, 2.0 * a);
    }

    #[test]
    fn rabi_frequency_rejects_non_positive_input() {
        assert!(matches!(
            rabi_frequency(0.0, 1.0, 1.0),
            Err(Error::InvalidParameter {
                name: "e_field",
                ..
            })
        ));
        assert!(rabi_frequency(1.0, -1.0, 1.0).is_err());
        assert!(rabi_frequency(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn default_parameter_set() {
        let p = default_params();
        assert_eq!(p.t1(), 0.0923333);
        assert_eq!(p.t2(), 0.132);
        assert_eq!(p.k21(), 1.0);
        assert_eq!(p.k02(), 0.1);
        assert_eq!(p.omega(), 0.0);
        assert!((p.level1_decay_rate() - 11.830).abs() < 5e-4);
    }

    #[test]
    fn invalid_parameters_name_the_field() {
        let err = SystemParams::new(-1.0, 0.1, 1.0, 0.1, 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "t1", .. }));
        let err = default_params().with_k02(0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "k02", .. }));
        assert!(default_params().with_omega(-0.5).is_err());
        assert!(default_params().with_k21(0.0).is_ok());
    }

    #[test]
    fn drive_terms_vanish_without_field() {
        let l = build_generator(&default_params());
        assert_eq!(l.get(0, 1), 0.0);
        assert_eq!(l.get(2, 1), 0.0);
        assert_eq!(l.get(1, 0), 0.0);
        assert_eq!(l.get(1, 2), 0.0);
    }

    #[test]
    fn conservation_vector_annihilates_generator() {
        for w in [0.0, 0.1, 4.5, 10.0, 17.3] {
            let l = build_generator(&default_params().with_omega(w).unwrap());
            for x in l.left_apply(&CONSERVATION) {
                assert!(x.abs() < 1e-12, "{x}");
            }
        }
    }

    #[test]
    fn trace_is_independent_of_drive() {
        for w in [0.0, 1.0, 4.5, 10.0] {
            let l = build_generator(&default_params().with_omega(w).unwrap());
            assert!((l.trace() + 19.50608).abs() < 1e-5, "{}", l.trace());
        }
    }

    #[test]
    fn rho22_row_has_two_nonzeros() {
        let l = build_generator(&default_params().with_omega(3.0).unwrap());
        let row = l.entries()[3];
        assert_eq!(row, [0.0, 0.0, 1.0, -0.1]);
    }

    #[test]
    fn generator_is_linear_in_omega() {
        let p = default_params();
        let l0 = build_generator(&p);
        let l1 = build_generator(&p.with_omega(1.0).unwrap());
        let l = build_generator(&p.with_omega(3.7).unwrap());
        for i in 0..DIM {
            for j in 0..DIM {
                let d = l1.get(i, j) - l0.get(i, j);
                assert!((l.get(i, j) - (l0.get(i, j) + 3.7 * d)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn component_parsing() {
        assert_eq!("rhoB".parse::<Component>().unwrap(), Component::RhoB);
        assert_eq!("RHO22".parse::<Component>().unwrap(), Component::Rho22);
        assert!("rho33".parse::<Component>().is_err());
    }
}
