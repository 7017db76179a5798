//! Eigenvalues of the generator.
//!
//! Probability conservation makes `(1, 0, 1, 1)` a left null vector of every
//! generator, so one eigenvalue is exactly zero. It is factored out of the
//! characteristic polynomial and the remaining three come from a cubic whose
//! discriminant decides between three real decay rates and a damped
//! oscillating pair.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::cubic::{self, CubicRoots};
use crate::error::{Error, Result};
use crate::model::{build_generator, GeneratorMatrix, SystemParams, DIM};

/// Eigenvalues with `|gamma|` below this are treated as the zero mode.
pub const ZERO_TOLERANCE: f64 = 1e-10;

/// Four eigenvalues of the generator, most negative real part first and
/// `gammas[3] == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub gammas: [Complex64; DIM],
    /// Decay times `-1 / Re(gamma_k)` of the three decaying modes, in ns.
    pub taus: [f64; 3],
    /// Discriminant of the reduced cubic; negative means `gammas[0]` and
    /// `gammas[1]` are a conjugate pair.
    pub discriminant: f64,
}

impl Spectrum {
    pub fn has_complex_pair(&self) -> bool {
        self.discriminant < 0.0
    }

    /// The slowest decaying mode, which governs the approach to steady state.
    pub fn gamma3(&self) -> f64 {
        self.gammas[2].re
    }

    pub fn tau3(&self) -> f64 {
        self.taus[2]
    }

    pub fn sum(&self) -> Complex64 {
        self.gammas.iter().sum()
    }
}

/// Coefficients `(a, b, c)` of the monic cubic `g³ + a g² + b g + c` left
/// after dividing `det(g I − L)` by `g`, plus `det L` itself.
fn reduced_cubic(gen: &GeneratorMatrix) -> ([f64; 3], f64) {
    let m = gen.entries();
    let minor2 = |i: usize, j: usize| m[i][i] * m[j][j] - m[i][j] * m[j][i];
    let minor3 = |i: usize, j: usize, k: usize| {
        m[i][i] * (m[j][j] * m[k][k] - m[j][k] * m[k][j])
            - m[i][j] * (m[j][i] * m[k][k] - m[j][k] * m[k][i])
            + m[i][k] * (m[j][i] * m[k][j] - m[j][j] * m[k][i])
    };
    let mut e2 = 0.0;
    for i in 0..DIM {
        for j in i + 1..DIM {
            e2 += minor2(i, j);
        }
    }
    let e3 = minor3(1, 2, 3) + minor3(0, 2, 3) + minor3(0, 1, 3) + minor3(0, 1, 2);
    let det = Matrix4::from_fn(|i, j| m[i][j]).determinant();
    ([-gen.trace(), e2, -e3], det)
}

/// Discriminant of the reduced cubic for `gen`.
pub fn cubic_discriminant(gen: &GeneratorMatrix) -> f64 {
    let ([a, b, c], _) = reduced_cubic(gen);
    cubic::discriminant(a, b, c)
}

/// Spectrum of a generator that has a zero mode.
pub fn eigenvalues(gen: &GeneratorMatrix) -> Result<Spectrum> {
    let ([a, b, c], det) = reduced_cubic(gen);
    let scale = gen.norm_inf().max(1.0);
    if det.abs() > 1e-9 * scale.powi(4) || !det.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "generator has no zero mode (det = {det:e})"
        )));
    }
    let discriminant = cubic::discriminant(a, b, c);
    let decaying: [Complex64; 3] = match cubic::solve_monic(a, b, c) {
        CubicRoots::Real(r) => r.map(|x| Complex64::new(x, 0.0)),
        CubicRoots::Mixed { real, re, im } => {
            let mut g = [
                Complex64::new(re, -im),
                Complex64::new(re, im),
                Complex64::new(real, 0.0),
            ];
            sort_eigenvalues(&mut g);
            g
        }
    };
    if decaying
        .iter()
        .any(|g| !g.re.is_finite() || !g.im.is_finite())
    {
        return Err(Error::NumericalFailure("cubic roots are not finite".into()));
    }
    if decaying.iter().any(|g| g.re >= -ZERO_TOLERANCE) {
        return Err(Error::NumericalFailure(format!(
            "expected exactly one zero eigenvalue, got {decaying:?} besides it"
        )));
    }
    let gammas = [
        decaying[0],
        decaying[1],
        decaying[2],
        Complex64::new(0.0, 0.0),
    ];
    let taus = [0, 1, 2].map(|k| -1.0 / gammas[k].re);
    Ok(Spectrum {
        gammas,
        taus,
        discriminant,
    })
}

/// Spectrum for the generator built from `params`.
pub fn spectrum(params: &SystemParams) -> Result<Spectrum> {
    eigenvalues(&build_generator(params))
}

/// Ascending real part, ties broken by ascending imaginary part.
pub fn sort_eigenvalues(g: &mut [Complex64]) {
    g.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
}

/// General-purpose eigenvalues of the generator (real Schur form), sorted
/// like [`Spectrum::gammas`]. Only used as a cross-check of [`eigenvalues`].
pub fn eigenvalues_dense(gen: &GeneratorMatrix) -> [Complex64; DIM] {
    let m = gen.entries();
    let ev = Matrix4::from_fn(|i, j| m[i][j]).complex_eigenvalues();
    let mut g = [ev[0], ev[1], ev[2], ev[3]];
    sort_eigenvalues(&mut g);
    g
}

/// `Omega → 0` eigenvalues `(-1/T1 - k21, -1/T2, -k02)` in the `(gamma1,
/// gamma2, gamma3)` labelling; the drive in `params` is ignored.
///
/// The labels follow the decoupled modes, so `gamma1` and `gamma2` are not
/// ordered if `1/T2 > 1/T1 + k21`.
pub fn weak_field_limits(params: &SystemParams) -> [f64; 3] {
    [
        -params.level1_decay_rate(),
        -1.0 / params.t2(),
        -params.k02(),
    ]
}

/// Drive strength at which `gamma1` and `gamma2` merge into a conjugate pair.
///
/// Bisects the sign of the cubic discriminant on `[lo, hi]`; the low end
/// must have three real roots and the high end a complex pair.
pub fn complex_onset(params: &SystemParams, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo >= 0.0 && hi > lo && tol > 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    let disc = |w: f64| -> Result<f64> {
        Ok(cubic_discriminant(&build_generator(&params.with_omega(w)?)))
    };
    if !(disc(lo)? > 0.0 && disc(hi)? < 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if disc(m)? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// `|sum of eigenvalues − trace(L)|`.
pub fn trace_residual(gen: &GeneratorMatrix, spec: &Spectrum) -> f64 {
    (spec.sum() - Complex64::new(gen.trace(), 0.0)).norm()
}
