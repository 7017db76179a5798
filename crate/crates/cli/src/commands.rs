//! One function per subcommand.

use std::io::Write;

use anyhow::{bail, Context};
use lambda3_core::analysis::fit_decay_constant;
use lambda3_core::fullsystem::evolve_full_sampled;
use lambda3_core::integrator::conservation_residual;
use lambda3_core::spectrum::spectrum as spectrum_of;
use lambda3_core::steady_state::crossover_bisection;
use lambda3_core::{
    build_generator, crossover_omega, decoupling_residual, evolve_sampled, exact_solution, reduce,
    steady_state, sweep as sweep_rows, trace_residual, Component, Crossover, FullState, Sampling,
    SystemParams, Trajectory,
};

use crate::config::{Format, ScenarioConfig};
use crate::output::{self, open_sink, Summary};
use crate::Outcome;

/// Default sweep grid: 0 to 10 GHz in steps of 0.05.
pub const DEFAULT_SWEEP: (f64, f64, usize) = (0.0, 10.0, 201);

/// Tolerances checked by `verify-full`.
pub const FULL_AGREEMENT: f64 = 1e-6;
pub const FULL_DECOUPLING: f64 = 1e-10;
pub const FULL_HERMITICITY: f64 = 1e-10;
pub const FULL_TRACE_DRIFT: f64 = 1e-5;

fn omegas(cfg: &ScenarioConfig) -> Vec<f64> {
    cfg.omegas.clone().unwrap_or_else(|| vec![0.0])
}

fn sampling(cfg: &ScenarioConfig) -> Sampling {
    Sampling::new(cfg.t_end, cfg.dt).with_stride(cfg.stride)
}

fn single_point(cfg: &ScenarioConfig) -> anyhow::Result<SystemParams> {
    Ok(cfg.params.with_omega(cfg.single_omega()?)?)
}

/// Parse `START:STOP:COUNT` into a uniform grid.
pub fn parse_range(s: &str) -> anyhow::Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        bail!("invalid range: expected START:STOP:COUNT, got `{s}`");
    };
    let start: f64 = a
        .trim()
        .parse()
        .with_context(|| format!("invalid range start `{a}`"))?;
    let stop: f64 = b
        .trim()
        .parse()
        .with_context(|| format!("invalid range stop `{b}`"))?;
    let count: usize = n
        .trim()
        .parse()
        .with_context(|| format!("invalid range count `{n}`"))?;
    if count < 2 || stop <= start || start.is_nan() || start < 0.0 || !stop.is_finite() {
        bail!("invalid range: need 0 <= START < STOP and COUNT >= 2");
    }
    Ok((start, stop, count))
}

pub fn grid(range: (f64, f64, usize)) -> Vec<f64> {
    let (a, b, n) = range;
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn steady(cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let ws = omegas(cfg);
    let mut out = open_sink(cfg.output.as_deref())?;
    match cfg.format {
        Format::Csv => output::write_sweep(&mut out, &sweep_rows(&cfg.params, &ws)?)?,
        Format::Text => {
            for (i, &w) in ws.iter().enumerate() {
                let s = steady_state(&cfg.params.with_omega(w)?).state;
                if i > 0 {
                    writeln!(out)?;
                }
                Summary::new()
                    .num("omega", w)
                    .state("_inf", &s)
                    .num("pop_sum", s.population_sum())
                    .write(&mut out)?;
            }
        }
    }
    out.flush()?;
    Ok(Outcome::Success)
}

pub fn spectrum(cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let ws = omegas(cfg);
    let mut out = open_sink(cfg.output.as_deref())?;
    match cfg.format {
        Format::Csv => output::write_sweep(&mut out, &sweep_rows(&cfg.params, &ws)?)?,
        Format::Text => {
            for (i, &w) in ws.iter().enumerate() {
                let p = cfg.params.with_omega(w)?;
                let gen = build_generator(&p);
                let spec = spectrum_of(&p)?;
                if i > 0 {
                    writeln!(out)?;
                }
                let mut s = Summary::new();
                s.num("omega", w);
                for (k, g) in spec.gammas.iter().enumerate() {
                    s.num(format!("gamma{}_re", k + 1), g.re)
                        .num(format!("gamma{}_im", k + 1), g.im);
                }
                for (k, tau) in spec.taus.iter().enumerate() {
                    s.num(format!("tau{}", k + 1), *tau);
                }
                s.text("complex_pair", spec.has_complex_pair())
                    .num("gamma_sum", spec.sum().re)
                    .num("trace", gen.trace())
                    .num("trace_residual", trace_residual(&gen, &spec))
                    .write(&mut out)?;
            }
        }
    }
    out.flush()?;
    Ok(Outcome::Success)
}

fn write_trajectory(cfg: &ScenarioConfig, traj: &Trajectory) -> anyhow::Result<Outcome> {
    let mut out = open_sink(cfg.output.as_deref())?;
    output::write_trajectory(&mut out, traj)?;
    out.flush()?;
    Ok(Outcome::Success)
}

pub fn evolve(cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p = single_point(cfg)?;
    let traj = evolve_sampled(&p, &cfg.initial, &sampling(cfg))?;
    log::info!("population drift {:.3e}", conservation_residual(&traj));
    write_trajectory(cfg, &traj)
}

pub fn exact(cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p = single_point(cfg)?;
    let times = sampling(cfg).sample_times()?;
    let traj = exact_solution(&p, &cfg.initial, &times)?;
    write_trajectory(cfg, &traj)
}

pub fn sweep(cfg: &ScenarioConfig, range: Option<(f64, f64, usize)>) -> anyhow::Result<Outcome> {
    let ws = match (&cfg.omegas, range) {
        (Some(_), Some(_)) => bail!("invalid omega: give either --omega or --range, not both"),
        (Some(ws), None) => ws.clone(),
        (None, r) => grid(r.unwrap_or(DEFAULT_SWEEP)),
    };
    let rows = sweep_rows(&cfg.params, &ws)?;
    let mut out = open_sink(cfg.output.as_deref())?;
    output::write_sweep(&mut out, &rows)?;
    out.flush()?;
    Ok(Outcome::Success)
}

pub fn crossover(cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p = cfg.params;
    let mut s = Summary::new();
    s.num("k21", p.k21()).num("k02", p.k02());
    match crossover_omega(&p) {
        Crossover::At(w) => {
            let check = crossover_bisection(&p, 0.0, 2.0 * w + 1.0, 1e-12)?;
            s.num("omega_star", w).num("omega_star_bisection", check);
        }
        Crossover::Never => {
            s.text("omega_star", "none");
        }
    }
    let mut out = open_sink(cfg.output.as_deref())?;
    s.write(&mut out)?;
    out.flush()?;
    Ok(Outcome::Success)
}

pub fn decay_fit(cfg: &ScenarioConfig, t1: f64, t2: f64) -> anyhow::Result<Outcome> {
    if !(t1 > 0.0 && t2 > t1 && t2.is_finite()) {
        bail!("invalid fit_t1/fit_t2: need 0 < fit_t1 < fit_t2");
    }
    let mut out = open_sink(cfg.output.as_deref())?;
    for (i, &w) in omegas(cfg).iter().enumerate() {
        let p = cfg.params.with_omega(w)?;
        let traj = evolve_sampled(&p, &cfg.initial, &Sampling::new(t2, cfg.dt))?;
        let target = steady_state(&p);
        let spec = spectrum_of(&p)?;
        let mut s = Summary::new();
        s.num("omega", w).num("fit_t1", t1).num("fit_t2", t2);
        for c in Component::ALL {
            let key = format!("tau_{}", c.name());
            match fit_decay_constant(&traj, &target, c, t1, t2) {
                Ok(fit) => s.num(key, fit.tau),
                Err(lambda3_core::Error::InsufficientSignal { .. }) => {
                    s.text(key, "insufficient-signal")
                }
                Err(e) => return Err(e.into()),
            };
        }
        s.num("gamma3", spec.gamma3()).num("tau3", spec.tau3());
        if i > 0 {
            writeln!(out)?;
        }
        s.write(&mut out)?;
    }
    out.flush()?;
    Ok(Outcome::Success)
}

pub fn verify_full(cfg: &ScenarioConfig) -> anyhow::Result<Outcome> {
    let p = single_point(cfg)?;
    let grid = sampling(cfg);
    let reduced = evolve_sampled(&p, &cfg.initial, &grid)?;
    let full = evolve_full_sampled(&p, &FullState::from_reduced(&cfg.initial.state())?, &grid)?;
    let agreement = full
        .reduced()
        .iter()
        .zip(&reduced.states)
        .map(|(a, b)| a.max_abs_diff(b))
        .fold(0.0, f64::max);
    let decoupling = decoupling_residual(&full);
    let hermiticity = full.max_hermiticity_error();
    let drift = full.max_trace_drift();
    let end = reduce(full.states.last().expect("non-empty trajectory"));
    let checks = [
        ("agreement", agreement, FULL_AGREEMENT),
        ("decoupling", decoupling, FULL_DECOUPLING),
        ("hermiticity", hermiticity, FULL_HERMITICITY),
        ("trace_drift", drift, FULL_TRACE_DRIFT),
    ];
    let mut s = Summary::new();
    s.num("omega", p.omega())
        .num("t_end", cfg.t_end)
        .num("dt", cfg.dt);
    let mut ok = true;
    for (name, value, tol) in checks {
        let pass = value <= tol;
        ok &= pass;
        s.num(name, value)
            .num(format!("{name}_tol"), tol)
            .text(format!("{name}_pass"), pass);
    }
    s.state("_end", &end);
    let mut out = open_sink(cfg.output.as_deref())?;
    s.write(&mut out)?;
    out.flush()?;
    if ok {
        Ok(Outcome::Success)
    } else {
        eprintln!("verify-full: at least one check failed");
        Ok(Outcome::ChecksFailed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:10:3").unwrap(), (0.0, 10.0, 3));
        assert_eq!(grid((0.0, 10.0, 3)), vec![0.0, 5.0, 10.0]);
        for bad in ["0:10", "1:0:5", "0:1:1", "a:1:3", "-1:1:3"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
        let g = grid(DEFAULT_SWEEP);
        assert_eq!(g[90], 4.5);
        assert_eq!(*g.last().unwrap(), 10.0);
    }
}
