//! The contraction semigroup `W_t = P_0 U_t P_0`, survival and decay
//! probabilities, and the resonance eigenstates of `W_t`.
//!
//! Time is measured from the preparation of the state, so every projection
//! here is `P_0`; a different preparation time `t0` is handled by
//! re-zeroing the clock, since `U_t` conjugation maps `P_0` onto `P_t0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{HSState, SpectralGrid};
use crate::liouville::{check_times, evolve, TimeSeries};
use crate::time_op::{project_p, to_tau, TauCut};

/// Minimum pole width in units of the grid spacing.
const MIN_WIDTH_IN_SPACINGS: f64 = 10.0;
/// Maximum pole width as a fraction of `nu_max`.
const MAX_WIDTH_FRACTION: f64 = 1.0 / 50.0;

/// A resonance `xi` in the open lower half-plane together with its energy
/// profile `psi(E)`, normalized on the grid it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSpec {
    xi: Complex64,
    profile: Vec<Complex64>,
}

impl ResonanceSpec {
    pub fn new(grid: &SpectralGrid, xi: Complex64, profile: Vec<Complex64>) -> Result<Self> {
        if !(xi.im < 0.0) || !xi.re.is_finite() {
            return Err(Error::PoleNotInLowerHalfPlane { re: xi.re, im: xi.im });
        }
        if profile.len() != grid.n_e() {
            return Err(Error::ProfileLength { expected: grid.n_e(), actual: profile.len() });
        }
        let norm = (grid.de() * profile.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        let profile = profile.into_iter().map(|z| z / norm).collect();
        Ok(Self { xi, profile })
    }

    pub fn xi(&self) -> Complex64 {
        self.xi
    }

    /// `|Im xi|`; the survival probability decays as `exp(-2 width t)`.
    pub fn width(&self) -> f64 {
        -self.xi.im
    }

    pub fn profile(&self) -> &[Complex64] {
        &self.profile
    }

    /// Eigenvalue `exp(-i t xi)` of `W_t`.
    pub fn eigenvalue(&self, t: f64) -> Complex64 {
        (Complex64::new(0.0, -t) * self.xi).exp()
    }
}

/// Lattice counterpart of `1/(nu - pole)` along `nu`.
///
/// The continuum function has the one-sided transform
/// `-sqrt(2 pi) i exp(i tau pole)` on `tau < 0` (pole below the axis) or
/// `+sqrt(2 pi) i exp(i tau pole)` on `tau > 0` (pole above). The returned
/// samples are the exact inverse transform of that transform restricted to
/// the time lattice, with the `tau = 0` sample on the lower-pole side; in
/// closed form a truncated geometric series in `exp(+-i dtau (nu - pole))`.
/// As `dtau -> 0` they converge to `1/(nu - pole)`. Unlike raw samples of
/// `1/(nu - pole)`, which leak `O(sqrt(|Im pole| / nu_max))` of their norm
/// across the Hardy split through the truncated `1/nu` tails, these lie
/// exactly in H+ (resp. H-) and are exact eigenvectors of the discrete `W_t`
/// at lattice times.
pub fn lattice_pole(grid: &SpectralGrid, pole: Complex64) -> Result<Vec<Complex64>> {
    if pole.im == 0.0 || !pole.im.is_finite() || !pole.re.is_finite() {
        return Err(Error::PoleNotInLowerHalfPlane { re: pole.re, im: pole.im });
    }
    let dtau = grid.dtau();
    let half = (grid.n_nu() / 2) as f64;
    let i = Complex64::new(0.0, 1.0);
    Ok((0..grid.n_nu())
        .map(|k| {
            let x = grid.nu(k) - pole;
            if pole.im < 0.0 {
                // -i dtau sum_{m=0}^{N/2} q^m, q = exp(i dtau x), |q| < 1
                let q = (i * dtau * x).exp();
                let tail = (i * dtau * (half + 1.0) * x).exp();
                -i * dtau * (1.0 - tail) / (1.0 - q)
            } else {
                // i dtau sum_{m=1}^{N/2-1} p^m, p = exp(-i dtau x), |p| < 1
                let p = (-i * dtau * x).exp();
                let tail = (-i * dtau * (half - 1.0) * x).exp();
                i * dtau * p * (1.0 - tail) / (1.0 - p)
            }
        })
        .collect())
}

/// `psi(E) / (nu - pole)` on the lattice (see [`lattice_pole`]).
pub fn pole_state(grid: &SpectralGrid, pole: Complex64, profile: &[Complex64]) -> Result<HSState> {
    let nu_part = lattice_pole(grid, pole)?;
    HSState::separable(*grid, &nu_part, profile)
}

/// Raw point samples of `psi(E) / (nu - pole)`, for comparison with the
/// lattice construction.
pub fn pointwise_pole_state(grid: &SpectralGrid, pole: Complex64, profile: &[Complex64]) -> Result<HSState> {
    let nu_part: Vec<Complex64> = grid.nu_samples().iter().map(|&nu| 1.0 / (nu - pole)).collect();
    HSState::separable(*grid, &nu_part, profile)
}

/// Resonance eigenstate `rho_xi(nu, E) = psi(E) / (nu - xi)` of `W_t`.
///
/// Requires `10 dnu <= |Im xi| <= nu_max / 50` so that the pole is
/// resolved and its decay fits inside the time lattice.
pub fn resonance_state(spec: &ResonanceSpec, grid: &SpectralGrid) -> Result<HSState> {
    let width = spec.width();
    let spacing = grid.dnu();
    let slack = 1.0 + 1e-12;
    if width * slack < MIN_WIDTH_IN_SPACINGS * spacing || width > MAX_WIDTH_FRACTION * grid.nu_max() * slack {
        return Err(Error::PoleNotResolvable { width, spacing, nu_max: grid.nu_max() });
    }
    pole_state(grid, spec.xi, &spec.profile)
}

/// `W_t s = P_0 U_t P_0 s` for `t >= 0`.
pub fn w_apply(s: &HSState, t: f64) -> Result<HSState> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    Ok(project_p(&evolve(&project_p(s, 0.0), t), 0.0))
}

fn check_survival_times(times: &[f64]) -> Result<()> {
    check_times(times)?;
    match times.first() {
        Some(&t) if t < 0.0 => Err(Error::NegativeTime(t)),
        _ => Ok(()),
    }
}

/// Survival probability `p(t) = ||P_0 U_t s||^2` of the normalized state.
///
/// `s` is rescaled to unit norm first.
pub fn survival(s: &HSState, times: &[f64]) -> Result<TimeSeries> {
    check_survival_times(times)?;
    let s = s.normalized()?;
    let cut = TauCut::snap(s.grid(), 0.0);
    let values = times
        .iter()
        .map(|&t| to_tau(&evolve(&s, t)).tau_density()[..cut.kept_bins()].iter().sum())
        .collect();
    TimeSeries::new(times.to_vec(), values)
}

/// Probability that the decay event falls in `]t1, t2]`:
/// `||P'_{t2} s||^2 - ||P'_{t1} s||^2` for the normalized state.
pub fn decay_window(s: &HSState, t1: f64, t2: f64) -> Result<f64> {
    if !(t1 < t2) {
        return Err(Error::EmptyInterval { t1, t2 });
    }
    let s = s.normalized()?;
    let density = to_tau(&s).tau_density();
    Ok(window_mass(&density, s.grid(), t1, t2))
}

/// `P'_t` keeps the samples above the cut `-t`; the window `]t1, t2]`
/// therefore holds the samples kept by `P_{-t1}` but not by `P_{-t2}`.
fn window_mass(density: &[f64], grid: &SpectralGrid, t1: f64, t2: f64) -> f64 {
    let lo = TauCut::snap(grid, -t2).kept_bins();
    let hi = TauCut::snap(grid, -t1).kept_bins();
    if hi <= lo {
        0.0
    } else {
        density[lo..hi].iter().sum()
    }
}

/// Decay probability `P(]0, t], s)` over a time grid (zero at `t = 0`).
pub fn decay_curve(s: &HSState, times: &[f64]) -> Result<TimeSeries> {
    check_survival_times(times)?;
    let s = s.normalized()?;
    let density = to_tau(&s).tau_density();
    let values = times.iter().map(|&t| window_mass(&density, s.grid(), 0.0, t)).collect();
    TimeSeries::new(times.to_vec(), values)
}
