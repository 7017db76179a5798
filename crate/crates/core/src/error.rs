use thiserror::Error;

use crate::model::Component;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("step size dt = {dt} ns is too large ({reason}); use a smaller dt")]
    StepSize { dt: f64, reason: String },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("generator is nearly defective at omega = {omega} (eigenvector condition number {condition:.3e})")]
    IllConditioned { omega: f64, condition: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("bracket [{lo}, {hi}] does not straddle a sign change")]
    Bracket { lo: f64, hi: f64 },

    #[error("insufficient signal for {component}: residual {residual:.3e} at t = {t} is below the floor {floor:.1e}")]
    InsufficientSignal {
        component: Component,
        t: f64,
        residual: f64,
        floor: f64,
    },

    #[error("trajectory has no sample at t = {0} ns")]
    MissingSample(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),
}
