//! The `survival`, `resonance`, `decay-window` and `uncertainty` commands.

use std::path::Path;

use num_complex::Complex64;
use timeop_core::{
    decay_curve, decay_window, hardy_decompose, hilbert_survival, projected_norm_sqr, survival, time_stats, w_apply,
    UNCERTAINTY_BOUND,
};

use crate::config::{ScenarioConfig, StateSpec};
use crate::error::{CliError, CliResult};
use crate::output::{grid_metadata, write_series, write_summary, Check, Summary};
use crate::scenario::Scenario;

const NORMALIZATION_NOTE: &str = "normalization: the state is rescaled to unit Hilbert-Schmidt norm before evaluation";

fn time_note(config: &ScenarioConfig, scenario: &Scenario) -> String {
    if config.times.snap {
        format!("times: snapped to the time lattice (dtau = {})", scenario.grid.dtau())
    } else {
        "times: as requested".to_string()
    }
}

fn metadata(command: &str, config: &ScenarioConfig, scenario: &Scenario, columns: &str) -> Vec<String> {
    let mut lines = vec![format!("command: {command}")];
    lines.extend(grid_metadata(&scenario.grid, &scenario.state));
    lines.push(format!("state: {}", config.state.describe()));
    lines.push(NORMALIZATION_NOTE.to_string());
    lines.push(time_note(config, scenario));
    lines.push(format!("columns: {columns}"));
    lines
}

/// Largest amount by which a probability leaves `[0, 1]`.
fn probability_excess(values: &[f64]) -> f64 {
    values.iter().map(|&p| (p - 1.0).max(-p)).fold(0.0, f64::max)
}

fn probability_check(values: &[f64], config: &ScenarioConfig) -> Check {
    Check::within(
        "P1",
        "probabilities lie in [0, 1]",
        probability_excess(values),
        config.tolerances.probability,
    )
}

fn exponential(xi: Complex64, times: &[f64]) -> Vec<f64> {
    times.iter().map(|t| (2.0 * xi.im * t).exp()).collect()
}

fn max_relative_error(values: &[f64], reference: &[f64]) -> f64 {
    values.iter().zip(reference).map(|(v, r)| (v - r).abs() / r.abs()).fold(0.0, f64::max)
}

fn finish(summary: Summary, out: &Path) -> CliResult<Summary> {
    write_summary(out, &format!("{}.json", summary.command), &summary)?;
    Ok(summary)
}

pub fn survival_command(config: &ScenarioConfig, out: &Path) -> CliResult<Summary> {
    let scenario = Scenario::build(config)?;
    let times = config.times.samples(&scenario.grid);
    let series = survival(&scenario.state, &times)?;
    let mut summary = Summary::new("survival", &config.echo);
    summary.checks.push(probability_check(series.values(), config));
    summary.checks.push(Check::within(
        "S2",
        "Liouville survival is nonincreasing",
        series.max_increase(),
        config.tolerances.exact,
    ));
    let (reference, columns) = if let Some(psi) = &scenario.pure {
        let hilbert = hilbert_survival(psi, &times)?;
        summary.metrics.insert("hilbert_max_increase".into(), hilbert.max_increase());
        (Some(hilbert.values().to_vec()), "value = ||P_0 U_t rho||^2, reference = |<psi, exp(-itH) psi>|^2")
    } else if let Some(xi) = scenario.xi {
        let reference = exponential(xi, &times);
        summary.checks.push(Check::within(
            "R2",
            "survival matches exp(-2|Im xi| t)",
            max_relative_error(series.values(), &reference),
            config.tolerances.survival,
        ));
        (Some(reference), "value = ||P_0 U_t rho||^2, reference = exp(-2|Im xi| t)")
    } else {
        (None, "value = ||P_0 U_t rho||^2")
    };
    let meta = metadata("survival", config, &scenario, columns);
    write_series(out, "survival.csv", &meta, &series, reference.as_deref())?;
    finish(summary, out)
}

pub fn resonance_command(config: &ScenarioConfig, out: &Path) -> CliResult<Summary> {
    let StateSpec::Resonance { .. } = config.state else {
        return Err(CliError::config("the resonance command needs [state] kind = resonance"));
    };
    let scenario = Scenario::build(config)?;
    let xi = scenario.xi.expect("resonance scenario carries its pole");
    let b = -xi.im;
    let grid = &scenario.grid;
    let rho = &scenario.state;
    let mut summary = Summary::new("resonance", &config.echo);

    let mut residual: f64 = 0.0;
    for f in [0.1, 0.5, 1.0, 2.0] {
        let t = grid.snap_time(f / b);
        let expected = rho.scaled((-Complex64::i() * t * xi).exp());
        let r = (&w_apply(rho, t)? - &expected).norm() / rho.norm();
        summary.metrics.insert(format!("eigen_residual_t{f}"), r);
        residual = residual.max(r);
    }
    summary.checks.push(Check::within(
        "R1",
        "W_t rho = exp(-it xi) rho",
        residual,
        config.tolerances.eigen,
    ));

    let times = config.times.samples(grid);
    let series = survival(rho, &times)?;
    let reference = exponential(xi, &times);
    summary.checks.push(Check::within(
        "R2",
        "survival matches exp(-2|Im xi| t)",
        max_relative_error(series.values(), &reference),
        config.tolerances.survival,
    ));
    let at_one = survival(rho, &[1.0])?.values()[0];
    let exact_one = (-2.0 * b).exp();
    summary.metrics.insert("survival_t1".into(), at_one);
    summary.metrics.insert("reference_t1".into(), exact_one);
    summary.checks.push(Check::within(
        "R3",
        "survival at t = 1 matches exp(-2|Im xi|)",
        (at_one - exact_one).abs() / exact_one,
        config.tolerances.survival,
    ));
    let (_, minus) = hardy_decompose(rho);
    summary.checks.push(Check::within(
        "R4",
        "resonance lies in the Hardy class",
        minus.norm() / rho.norm(),
        config.tolerances.hardy_leak,
    ));
    summary.checks.push(probability_check(series.values(), config));

    let meta = metadata("resonance", config, &scenario, "value = ||P_0 U_t rho||^2, reference = exp(-2|Im xi| t)");
    write_series(out, "resonance.csv", &meta, &series, Some(&reference))?;
    finish(summary, out)
}

pub fn decay_window_command(config: &ScenarioConfig, out: &Path) -> CliResult<Summary> {
    let scenario = Scenario::build(config)?;
    let grid = &scenario.grid;
    let s = &scenario.state;
    let times = config.times.samples(grid);
    let curve = decay_curve(s, &times)?;
    let mut summary = Summary::new("decay-window", &config.echo);
    summary.checks.push(probability_check(curve.values(), config));
    let max_decrease = curve.values().windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    summary.checks.push(Check::within(
        "D1",
        "decay probability is nondecreasing",
        max_decrease,
        config.tolerances.exact,
    ));

    let lattice: Vec<f64> = {
        let mut l: Vec<f64> = times.iter().map(|&t| grid.snap_time(t)).collect();
        l.dedup();
        l
    };
    let stable = projected_norm_sqr(s, 0.0) / s.norm_sqr();
    let p = survival(s, &lattice)?;
    let mut defect: f64 = 0.0;
    for (t, value) in p.iter() {
        let window = if t > 0.0 { decay_window(s, 0.0, t)? } else { 0.0 };
        defect = defect.max((window + value - stable).abs());
    }
    summary.checks.push(Check::within(
        "S4",
        "decay window plus survival equals ||P_0 rho||^2",
        defect,
        config.tolerances.complementarity,
    ));

    let reference = scenario.xi.map(|xi| {
        let stop = times.last().copied().unwrap_or(0.0).max(grid.dtau());
        let negative = decay_window(s, -stop, 0.0).unwrap_or(f64::NAN);
        summary.checks.push(Check::within(
            "S7",
            "no decay before preparation",
            negative.abs(),
            config.tolerances.exact,
        ));
        exponential(xi, &times).iter().map(|e| 1.0 - e).collect::<Vec<f64>>()
    });
    let columns = if reference.is_some() {
        "value = P(]0, t]), reference = 1 - exp(-2|Im xi| t)"
    } else {
        "value = P(]0, t])"
    };
    let meta = metadata("decay-window", config, &scenario, columns);
    write_series(out, "decay-window.csv", &meta, &curve, reference.as_deref())?;
    finish(summary, out)
}

pub fn uncertainty_command(config: &ScenarioConfig, out: &Path) -> CliResult<Summary> {
    if !config.state.is_physical() {
        return Err(CliError::config(
            "the uncertainty command needs a physical state ([state] kind = pure or mixture); \
             a resonance state has no density matrix",
        ));
    }
    let scenario = Scenario::build(config)?;
    let stats = time_stats(&scenario.state, scenario.density.as_ref())?;
    let mut summary = Summary::new("uncertainty", &config.echo);
    for (key, value) in [
        ("mean_t", stats.mean_t),
        ("delta_t", stats.delta_t),
        ("delta_e", stats.delta_e),
        ("product", stats.product),
        ("bound", UNCERTAINTY_BOUND),
        ("bound_margin", stats.bound_margin()),
        ("boundary_mass", scenario.state.boundary_mass().max()),
    ] {
        summary.metrics.insert(key.into(), value);
    }
    summary.checks.push(Check::at_least(
        "U1",
        "Delta E * Delta T >= 1/(2 sqrt 2)",
        stats.product,
        UNCERTAINTY_BOUND - config.tolerances.uncertainty,
    ));
    finish(summary, out)
}

/// Text report of the metrics of a summary.
pub fn format_metrics(summary: &Summary) -> String {
    summary.metrics.iter().map(|(k, v)| format!("{k:<22} {v:.6e}\n")).collect()
}
