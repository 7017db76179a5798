//! Classical fixed-step fourth-order Runge–Kutta on small fixed-size states.

use std::ops::{Add, Mul};

use num_complex::Complex64;

/// Scalar type a state vector can be built from.
pub trait Scalar: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> {}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// Nominal order of [`rk4_step`].
pub const RK4_ORDER: f64 = 4.0;

#[inline]
fn axpy<T: Scalar, const N: usize>(x: &[T; N], h: f64, k: &[T; N]) -> [T; N] {
    let mut out = *x;
    for (o, ki) in out.iter_mut().zip(k) {
        *o = *o + *ki * h;
    }
    out
}

/// One step of `dx/dt = f(x)`.
pub fn rk4_step<T, F, const N: usize>(f: &F, x: &[T; N], dt: f64) -> [T; N]
where
    T: Scalar,
    F: Fn(&[T; N]) -> [T; N],
{
    let k1 = f(x);
    let k2 = f(&axpy(x, 0.5 * dt, &k1));
    let k3 = f(&axpy(x, 0.5 * dt, &k2));
    let k4 = f(&axpy(x, dt, &k3));
    let mut out = *x;
    for i in 0..N {
        out[i] = out[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
    }
    out
}
