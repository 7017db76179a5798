//! Deterministic text and CSV writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use lambda3_core::analysis::SweepRow;
use lambda3_core::{DensityVector, SteadyState, Trajectory};

pub const TRAJECTORY_HEADER: &str = "t,rho00,rhoB,rho11,rho22,pop_sum";
pub const SWEEP_HEADER: &str =
    "omega,rho00_inf,rhoB_inf,rho11_inf,rho22_inf,gamma1_re,gamma1_im,gamma2_re,gamma2_im,gamma3,tau3";
pub const DEVIATION_HEADER: &str = "t,d_rho00,d_rhoB,d_rho11,d_rho22";

/// 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_line(values: &[f64]) -> String {
    values.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

/// Stdout, or a file when a path is given.
pub fn open_sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_trajectory(out: &mut dyn Write, traj: &Trajectory) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        writeln!(
            out,
            "{}",
            csv_line(&[*t, s.rho00, s.rho_b, s.rho11, s.rho22, s.population_sum()])
        )?;
    }
    Ok(())
}

/// `x(t) − x(∞)` per sample.
pub fn write_deviations(
    out: &mut dyn Write,
    traj: &Trajectory,
    target: &SteadyState,
) -> io::Result<()> {
    writeln!(out, "{DEVIATION_HEADER}")?;
    let inf = target.state;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        writeln!(
            out,
            "{}",
            csv_line(&[
                *t,
                s.rho00 - inf.rho00,
                s.rho_b - inf.rho_b,
                s.rho11 - inf.rho11,
                s.rho22 - inf.rho22
            ])
        )?;
    }
    Ok(())
}

pub fn sweep_values(row: &SweepRow) -> [f64; 11] {
    let s = row.steady.state;
    let g = row.spectrum.gammas;
    [
        row.omega, s.rho00, s.rho_b, s.rho11, s.rho22, g[0].re, g[0].im, g[1].re, g[1].im, g[2].re,
        row.tau3,
    ]
}

pub fn write_sweep(out: &mut dyn Write, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", csv_line(&sweep_values(row)))?;
    }
    Ok(())
}

/// `key = value` pairs, one per line.
pub struct Summary(Vec<(String, String)>);

impl Summary {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn num(&mut self, key: impl Into<String>, x: f64) -> &mut Self {
        self.0.push((key.into(), num(x)));
        self
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    pub fn state(&mut self, suffix: &str, s: &DensityVector) -> &mut Self {
        self.num(format!("rho00{suffix}"), s.rho00)
            .num(format!("rhoB{suffix}"), s.rho_b)
            .num(format!("rho11{suffix}"), s.rho11)
            .num(format!("rho22{suffix}"), s.rho22)
    }

    pub fn write(&self, out: &mut dyn Write) -> io::Result<()> {
        for (k, v) in &self.0 {
            writeln!(out, "{k} = {v}")?;
        }
        Ok(())
    }
}

impl Default for Summary {
    fn default() -> Self {
        Self::new()
    }
}
