//! CSV time series, JSON summaries and the console table.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use timeop_core::{HSState, SpectralGrid, TimeSeries};

use crate::config::ConfigEcho;
use crate::error::{CliError, CliResult};

/// One verified property.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
    #[serde(skip)]
    pub description: String,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    pub fn within(id: &str, description: &str, measured: f64, tolerance: f64) -> Self {
        Self { id: id.into(), pass: measured <= tolerance, measured, tolerance, description: description.into() }
    }

    /// Passes when `measured >= tolerance`.
    pub fn at_least(id: &str, description: &str, measured: f64, tolerance: f64) -> Self {
        Self { id: id.into(), pass: measured >= tolerance, measured, tolerance, description: description.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub config_echo: ConfigEcho,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl Summary {
    pub fn new(command: &str, echo: &ConfigEcho) -> Self {
        Self { command: command.into(), config_echo: echo.clone(), checks: Vec::new(), metrics: BTreeMap::new() }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn write_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.to_path_buf(), source }
}

fn create(dir: &Path, name: &str) -> CliResult<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(dir).map_err(write_error(dir))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(write_error(&path))?;
    Ok((path, BufWriter::new(file)))
}

/// Metadata lines common to every time series.
pub fn grid_metadata(grid: &SpectralGrid, state: &HSState) -> Vec<String> {
    let boundary = state.boundary_mass();
    vec![
        format!(
            "grid: nu_max = {}, n_nu = {}, e_max = {}, n_e = {}, spacing = {}, dtau = {}",
            grid.nu_max(),
            grid.n_nu(),
            grid.e_max(),
            grid.n_e(),
            grid.spacing(),
            grid.dtau()
        ),
        format!("boundary_mass: nu = {:.3e}, energy = {:.3e}", boundary.nu, boundary.energy),
    ]
}

/// Writes `#`-prefixed metadata followed by `t,value[,reference]` rows.
pub fn write_series(
    dir: &Path,
    name: &str,
    metadata: &[String],
    series: &TimeSeries,
    reference: Option<&[f64]>,
) -> CliResult<PathBuf> {
    let (path, mut out) = create(dir, name)?;
    for line in metadata {
        writeln!(out, "# {line}").map_err(write_error(&path))?;
    }
    let mut writer = csv::Writer::from_writer(out);
    let csv_error = |e: csv::Error| CliError::Write { path: path.clone(), source: e.into() };
    match reference {
        Some(_) => writer.write_record(["t", "value", "reference"]),
        None => writer.write_record(["t", "value"]),
    }
    .map_err(csv_error)?;
    for (i, (t, v)) in series.iter().enumerate() {
        match reference {
            Some(r) => writer.serialize((t, v, r[i])),
            None => writer.serialize((t, v)),
        }
        .map_err(csv_error)?;
    }
    writer.flush().map_err(write_error(&path))?;
    Ok(path)
}

pub fn write_summary(dir: &Path, name: &str, summary: &Summary) -> CliResult<PathBuf> {
    let (path, mut out) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, summary).map_err(|e| CliError::Write { path: path.clone(), source: e.into() })?;
    writeln!(out).and_then(|_| out.flush()).map_err(write_error(&path))?;
    Ok(path)
}

/// Renders the checks as an aligned text table.
pub fn format_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.description.len()).max().unwrap_or(0).max("property".len());
    let mut table = format!("{:<4} {:<width$}  {:>11}  {:>11}  result\n", "id", "property", "measured", "tolerance");
    for c in checks {
        table.push_str(&format!(
            "{:<4} {:<width$}  {:>11.3e}  {:>11.3e}  {}\n",
            c.id,
            c.description,
            c.measured,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        ));
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    table.push_str(&format!("{passed} of {} checks passed\n", checks.len()));
    table
}
