//! Named families of energy profiles `psi(lambda)` used to build states.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpectralGrid;

/// An unnormalized amplitude profile on the energy half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `1` on `[a, b)`, `0` elsewhere.
    Indicator { a: f64, b: f64 },
    /// Gaussian amplitude whose probability density `|psi|^2` has standard
    /// deviation `width`.
    Gaussian { center: f64, width: f64 },
    /// Equal-weight superposition of two Gaussian bumps.
    TwoBump { first: f64, second: f64, width: f64 },
    /// `exp(-rate lambda)`.
    Exponential { rate: f64 },
}

impl Profile {
    pub fn amplitude(&self, lambda: f64) -> f64 {
        let bump = |c: f64, w: f64| (-(lambda - c).powi(2) / (4.0 * w * w)).exp();
        match *self {
            Profile::Indicator { a, b } => {
                if (a..b).contains(&lambda) {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Gaussian { center, width } => bump(center, width),
            Profile::TwoBump { first, second, width } => bump(first, width) + bump(second, width),
            Profile::Exponential { rate } => (-rate * lambda).exp(),
        }
    }

    /// Samples on the energy grid (not normalized).
    pub fn sample(&self, grid: &SpectralGrid) -> Vec<Complex64> {
        grid.energy_samples().iter().map(|&l| Complex64::new(self.amplitude(l), 0.0)).collect()
    }

    fn validate(self) -> Result<Self> {
        let ok = match self {
            Profile::Indicator { a, b } => a.is_finite() && b.is_finite() && a < b,
            Profile::Gaussian { center, width } => center.is_finite() && width > 0.0,
            Profile::TwoBump { first, second, width } => first.is_finite() && second.is_finite() && width > 0.0,
            Profile::Exponential { rate } => rate.is_finite(),
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidProfile(self.to_string()))
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Indicator { a, b } => write!(f, "indicator({a}, {b})"),
            Profile::Gaussian { center, width } => write!(f, "gaussian({center}, {width})"),
            Profile::TwoBump { first, second, width } => write!(f, "two_bump({first}, {second}, {width})"),
            Profile::Exponential { rate } => write!(f, "exponential({rate})"),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    /// Parses `name(arg, ...)`, e.g. `gaussian(1.5, 0.1)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidProfile(s.trim().to_string());
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let name = s[..open].trim();
        let args = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        let profile = match (name, args.as_slice()) {
            ("indicator", [a, b]) => Profile::Indicator { a: *a, b: *b },
            ("gaussian", [center, width]) => Profile::Gaussian { center: *center, width: *width },
            ("two_bump", [first, second, width]) => Profile::TwoBump { first: *first, second: *second, width: *width },
            ("exponential", [rate]) => Profile::Exponential { rate: *rate },
            _ => return Err(bad()),
        };
        profile.validate()
    }
}
