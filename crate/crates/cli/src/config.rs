//! Scenario configuration: an INI-style file with `[section]` headers and one
//! `key = value` per line.
//!
//! ```text
//! [grid]
//! nu_max = 200
//! n_nu = 16384
//! n_e = 4
//!
//! [state]
//! kind = resonance
//! re_xi = 0
//! im_xi = -0.5
//! profile = indicator(0, 1)
//!
//! [times]
//! start = 0
//! stop = 5
//! count = 51
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::{Ini, ParseOption};
use num_complex::Complex64;
use timeop_core::{Error as CoreError, Profile, SpectralGrid};

use crate::error::{CliError, CliResult};

const SECTIONS: &[(&str, &[&str])] = &[
    ("grid", &["nu_max", "n_nu", "e_max", "n_e"]),
    ("state", &["kind", "re_xi", "im_xi", "profile", "weights", "profiles"]),
    ("times", &["start", "stop", "count", "snap"]),
    ("physical", &["nu_max", "n_nu", "e_max", "n_e"]),
    ("verify", &["samples", "seed"]),
    ("output", &["dir"]),
    (
        "tolerance",
        &[
            "eigen",
            "survival",
            "exact",
            "semigroup",
            "commutator",
            "complementarity",
            "uncertainty",
            "hardy_leak",
            "expectation",
            "probability",
        ],
    ),
];

/// Section name to key/value pairs, exactly as read.
pub type ConfigEcho = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nu_max: f64,
    pub n_nu: usize,
    pub e_max: Option<f64>,
    pub n_e: usize,
}

impl GridSpec {
    pub fn build(&self) -> CliResult<SpectralGrid> {
        let grid = match self.e_max {
            Some(e_max) => SpectralGrid::new(self.nu_max, self.n_nu, e_max, self.n_e)?,
            None => SpectralGrid::with_energy_samples(self.nu_max, self.n_nu, self.n_e)?,
        };
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Resonance { xi: Complex64, profile: Profile },
    Pure { profile: Profile },
    Mixture { weights: Vec<f64>, profiles: Vec<Profile> },
}

impl StateSpec {
    pub fn is_physical(&self) -> bool {
        !matches!(self, StateSpec::Resonance { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            StateSpec::Resonance { xi, profile } => format!("resonance xi = {}{:+}i, profile {profile}", xi.re, xi.im),
            StateSpec::Pure { profile } => format!("pure, profile {profile}"),
            StateSpec::Mixture { weights, profiles } => {
                let parts: Vec<String> = weights.iter().zip(profiles).map(|(w, p)| format!("{w} x {p}")).collect();
                format!("mixture {}", parts.join(" + "))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub snap: bool,
}

impl TimeSpec {
    /// Evenly spaced times, snapped to the time lattice of `grid` when
    /// requested (duplicates after snapping are dropped).
    pub fn samples(&self, grid: &SpectralGrid) -> Vec<f64> {
        let step = if self.count > 1 { (self.stop - self.start) / (self.count - 1) as f64 } else { 0.0 };
        let mut times: Vec<f64> = (0..self.count)
            .map(|i| self.start + step * i as f64)
            .map(|t| if self.snap { grid.snap_time(t) } else { t })
            .collect();
        times.dedup();
        times
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub eigen: f64,
    pub survival: f64,
    pub exact: f64,
    pub semigroup: f64,
    pub commutator: f64,
    pub complementarity: f64,
    pub uncertainty: f64,
    pub hardy_leak: f64,
    pub expectation: f64,
    pub probability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigen: 1e-2,
            survival: 1e-2,
            exact: 1e-10,
            semigroup: 1e-6,
            commutator: 1e-6,
            complementarity: 1e-6,
            uncertainty: 1e-2,
            hardy_leak: 1e-3,
            expectation: 1e-9,
            probability: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub grid: GridSpec,
    pub state: StateSpec,
    pub times: TimeSpec,
    pub physical: GridSpec,
    pub samples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub tolerances: Tolerances,
    pub echo: ConfigEcho,
}

struct Reader<'a> {
    echo: &'a ConfigEcho,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.echo.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    fn optional<T: FromStr>(&self, section: &str, key: &str) -> CliResult<Option<T>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::config(format!("[{section}] {key} = {v:?} is not a valid value"))),
        }
    }

    fn required<T: FromStr>(&self, section: &str, key: &str) -> CliResult<T> {
        self.optional(section, key)?
            .ok_or_else(|| CliError::config(format!("missing required key [{section}] {key}")))
    }

    fn or<T: FromStr>(&self, section: &str, key: &str, default: T) -> CliResult<T> {
        Ok(self.optional(section, key)?.unwrap_or(default))
    }

    fn profile(&self, section: &str, key: &str) -> CliResult<Profile> {
        let raw: String = self.required(section, key)?;
        raw.parse().map_err(|e: CoreError| CliError::config(format!("[{section}] {key}: {e}")))
    }
}

fn grid_spec(r: &Reader, section: &str, fallback: Option<GridSpec>) -> CliResult<GridSpec> {
    if r.echo.get(section).is_none() {
        return fallback.ok_or_else(|| CliError::config(format!("missing section [{section}]")));
    }
    Ok(GridSpec {
        nu_max: r.required(section, "nu_max")?,
        n_nu: r.required(section, "n_nu")?,
        e_max: r.optional(section, "e_max")?,
        n_e: r.required(section, "n_e")?,
    })
}

fn state_spec(r: &Reader) -> CliResult<StateSpec> {
    let kind: String = r.or("state", "kind", "resonance".to_string())?;
    match kind.as_str() {
        "resonance" => {
            let xi = Complex64::new(r.or("state", "re_xi", 0.0)?, r.required("state", "im_xi")?);
            if !(xi.im < 0.0) {
                return Err(CliError::Scenario(CoreError::PoleNotInLowerHalfPlane { re: xi.re, im: xi.im }));
            }
            let profile = if r.raw("state", "profile").is_some() {
                r.profile("state", "profile")?
            } else {
                Profile::Exponential { rate: 0.0 }
            };
            Ok(StateSpec::Resonance { xi, profile })
        }
        "pure" => Ok(StateSpec::Pure { profile: r.profile("state", "profile")? }),
        "mixture" => {
            let profiles_raw: String = r.required("state", "profiles")?;
            let profiles = profiles_raw
                .split(';')
                .map(|p| p.parse::<Profile>().map_err(|e| CliError::config(format!("[state] profiles: {e}"))))
                .collect::<CliResult<Vec<_>>>()?;
            let weights_raw: String = r.required("state", "weights")?;
            let weights = weights_raw
                .split(',')
                .map(|w| {
                    w.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|w| w.is_finite() && *w > 0.0)
                        .ok_or_else(|| CliError::config(format!("[state] weights: {w:?} is not a positive number")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            if weights.len() != profiles.len() {
                return Err(CliError::config(format!(
                    "[state] has {} weights for {} profiles",
                    weights.len(),
                    profiles.len()
                )));
            }
            let total: f64 = weights.iter().sum();
            Ok(StateSpec::Mixture { weights: weights.iter().map(|w| w / total).collect(), profiles })
        }
        other => Err(CliError::config(format!("[state] kind = {other:?}: expected resonance, pure or mixture"))),
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let options = ParseOption { enabled_escape: false, enabled_quote: false, ..ParseOption::default() };
        let ini = Ini::load_from_str_opt(text, options).map_err(|e| CliError::config(e.to_string()))?;
        let mut echo = ConfigEcho::new();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(CliError::config(format!("key {key:?} appears before any [section] header")));
                }
                continue;
            };
            let known = SECTIONS
                .iter()
                .find(|(name, _)| *name == section)
                .ok_or_else(|| CliError::config(format!("unknown section [{section}]")))?;
            let entry = echo.entry(section.to_string()).or_default();
            for (key, value) in props.iter() {
                if !known.1.contains(&key) {
                    return Err(CliError::config(format!("unknown key {key:?} in [{section}]")));
                }
                entry.insert(key.to_string(), value.trim().to_string());
            }
        }

        let r = Reader { echo: &echo };
        let grid = grid_spec(&r, "grid", None)?;
        let physical = grid_spec(&r, "physical", Some(GridSpec { nu_max: 4.0, n_nu: 1024, e_max: Some(4.0), n_e: 512 }))?;
        let state = state_spec(&r)?;
        let times = TimeSpec {
            start: r.or("times", "start", 0.0)?,
            stop: r.or("times", "stop", 5.0)?,
            count: r.or("times", "count", 51)?,
            snap: r.or("times", "snap", true)?,
        };
        if !(times.start >= 0.0 && times.stop > times.start && times.count >= 2) {
            return Err(CliError::config(format!(
                "[times] needs 0 <= start < stop and count >= 2, got start = {}, stop = {}, count = {}",
                times.start, times.stop, times.count
            )));
        }
        let defaults = Tolerances::default();
        let tolerances = Tolerances {
            eigen: r.or("tolerance", "eigen", defaults.eigen)?,
            survival: r.or("tolerance", "survival", defaults.survival)?,
            exact: r.or("tolerance", "exact", defaults.exact)?,
            semigroup: r.or("tolerance", "semigroup", defaults.semigroup)?,
            commutator: r.or("tolerance", "commutator", defaults.commutator)?,
            complementarity: r.or("tolerance", "complementarity", defaults.complementarity)?,
            uncertainty: r.or("tolerance", "uncertainty", defaults.uncertainty)?,
            hardy_leak: r.or("tolerance", "hardy_leak", defaults.hardy_leak)?,
            expectation: r.or("tolerance", "expectation", defaults.expectation)?,
            probability: r.or("tolerance", "probability", defaults.probability)?,
        };
        let config = Self {
            grid,
            state,
            times,
            physical,
            samples: r.or("verify", "samples", 6)?,
            seed: r.or("verify", "seed", 0)?,
            output_dir: PathBuf::from(r.or("output", "dir", "out".to_string())?),
            tolerances,
            echo,
        };
        config.grid.build()?;
        config.physical.build()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[grid]\nnu_max = 50\nn_nu = 1024\nn_e = 4\n\n[state]\nim_xi = -0.5\n";

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ScenarioConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.grid, GridSpec { nu_max: 50.0, n_nu: 1024, e_max: None, n_e: 4 });
        assert_eq!(
            c.state,
            StateSpec::Resonance { xi: Complex64::new(0.0, -0.5), profile: Profile::Exponential { rate: 0.0 } }
        );
        assert_eq!(c.times, TimeSpec { start: 0.0, stop: 5.0, count: 51, snap: true });
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.output_dir, PathBuf::from("out"));
        assert_eq!(c.echo["state"]["im_xi"], "-0.5");
    }

    #[test]
    fn mixture_weights_are_normalized() {
        let text = "[grid]\nnu_max = 4\nn_nu = 256\ne_max = 4\nn_e = 128\n[state]\nkind = mixture\n\
                    weights = 1, 3\nprofiles = gaussian(1, 0.1); two_bump(1, 2, 0.05)\n";
        let c = ScenarioConfig::parse(text).unwrap();
        match c.state {
            StateSpec::Mixture { weights, profiles } => {
                assert_eq!(weights, vec![0.25, 0.75]);
                assert_eq!(profiles[1], Profile::TwoBump { first: 1.0, second: 2.0, width: 0.05 });
            }
            other => panic!("unexpected state {other:?}"),
        }
    }

    #[test]
    fn upper_half_plane_pole_is_rejected() {
        let err = ScenarioConfig::parse(&MINIMAL.replace("-0.5", "0.5")).unwrap_err();
        assert!(matches!(err, CliError::Scenario(CoreError::PoleNotInLowerHalfPlane { .. })));
        assert!(err.to_string().contains("lower half-plane"));
    }

    #[test]
    fn malformed_configs_are_rejected() {
        for (text, needle) in [
            ("[grid]\nnu_max = 50\nn_nu = 1000\nn_e = 4\n[state]\nim_xi = -1\n", "power of two"),
            ("[grid]\nnu_max = 50\nn_nu = 1024\n[state]\nim_xi = -1\n", "n_e"),
            ("[grid]\nnu_max = abc\nn_nu = 1024\nn_e = 4\n", "nu_max"),
            ("[grid]\nnu_max = 50\nn_nu = 1024\nn_e = 4\n[state]\nim_xi = -1\ncolour = red\n", "colour"),
            ("[grids]\nnu_max = 50\n", "unknown section"),
            ("[grid]\nnu_max = 50\nn_nu = 1024\nn_e = 4\n[state]\nkind = pure\n", "profile"),
            ("[grid]\nnu_max = 50\nn_nu = 1024\nn_e = 4\n[state]\nkind = mixture\nweights = 1\nprofiles = gaussian(1, 0.1); gaussian(2, 0.1)\n", "weights"),
            ("[grid]\nnu_max = 50\nn_nu = 1024\nn_e = 4\n[state]\nim_xi = -1\n[times]\nstart = 2\nstop = 1\n", "[times]"),
        ] {
            let err = ScenarioConfig::parse(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err:?} should mention {needle:?}");
        }
    }

    #[test]
    fn snapped_times_are_increasing() {
        let c = ScenarioConfig::parse(MINIMAL).unwrap();
        let grid = c.grid.build().unwrap();
        let times = c.times.samples(&grid);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert!(times.iter().all(|t| (t / grid.dtau() - (t / grid.dtau()).round()).abs() < 1e-9));
    }
}
