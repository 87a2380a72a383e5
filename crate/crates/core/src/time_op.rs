//! The time operator `T` and its spectral projections.
//!
//! `T` is `i d/dnu`, diagonalized by the transform
//!
//! ```text
//! rho^(tau, E) = (2 pi)^{-1/2} \int exp(+i tau nu) rho(nu, E) dnu
//! ```
//!
//! in which it acts as multiplication by `tau`. On a grid with `n_nu`
//! samples of spacing `dnu` the dual samples are `tau_n = (n - n_nu/2) dtau`
//! with `dtau = 2 pi / (n_nu dnu)`, and the discrete transform is unitary
//! for the weights `dnu` and `dtau`.
//!
//! With the `+i tau nu` kernel, boundary values of upper-half-plane analytic
//! functions (the Hardy class H+) are exactly the states supported on
//! `tau <= 0`, so `P_0` (multiplication by the indicator of `(-inf, 0]`)
//! projects onto the unstable subspace. The cut sample itself belongs to
//! the `<= tau` side.

use std::cell::RefCell;
use std::f64::consts::{PI, SQRT_2};

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{HSState, LambdaKernel, SpectralGrid};
use crate::liouville::{apply_l, density_expectation};

/// Lower bound on `Delta E . Delta T` for states of the Liouville space.
pub const UNCERTAINTY_BOUND: f64 = 1.0 / (2.0 * SQRT_2);

/// Boundary-mass fraction above which `apply_t` is not trusted.
const T_BOUNDARY_LIMIT: f64 = 1e-6;
const NORMALIZATION_TOLERANCE: f64 = 1e-8;

/// Fourier-conjugate representation `rho^(tau, E)`, shape `(n_e, n_nu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauState {
    grid: SpectralGrid,
    values: Array2<Complex64>,
}

impl TauState {
    pub fn from_fn(grid: SpectralGrid, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let values = Array2::from_shape_fn((grid.n_e(), grid.n_nu()), |(m, n)| {
            f(grid.tau(n), grid.energy(m))
        });
        Self { grid, values }
    }

    pub fn from_values(grid: SpectralGrid, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != (grid.n_e(), grid.n_nu()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.values
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.values[(m, n)]
    }

    /// `dtau dE sum |rho^|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid.dtau() * self.grid.de() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Squared norm per time sample, summed over energy: `|rho^(tau_n)|^2_E dtau`.
    pub fn tau_density(&self) -> Vec<f64> {
        let w = self.grid.dtau() * self.grid.de();
        let mut out = vec![0.0; self.grid.n_nu()];
        for row in self.values.outer_iter() {
            for (acc, z) in out.iter_mut().zip(row.iter()) {
                *acc += z.norm_sqr() * w;
            }
        }
        out
    }

    fn keep_up_to(&mut self, cut: TauCut) {
        let first_dropped = cut.kept_bins();
        for mut row in self.values.outer_iter_mut() {
            row.iter_mut().skip(first_dropped).for_each(|z| *z = Complex64::new(0.0, 0.0));
        }
    }
}

/// A cut `(-inf, tau]` snapped to the time lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauCut {
    kept: usize,
    requested: f64,
    snapped: f64,
}

impl TauCut {
    /// Snaps `tau` to the nearest time sample. Cuts below the lattice keep
    /// nothing; cuts at or above the top sample keep everything.
    pub fn snap(grid: &SpectralGrid, tau: f64) -> Self {
        let n = grid.n_nu();
        let idx = (tau / grid.dtau()).round() + (n / 2) as f64;
        let kept = if idx.is_nan() || idx < 0.0 {
            0
        } else if idx >= (n - 1) as f64 {
            n
        } else {
            idx as usize + 1
        };
        let snapped = match kept {
            0 => f64::NEG_INFINITY,
            k if k == n => f64::INFINITY,
            k => grid.tau(k - 1),
        };
        Self { kept, requested: tau, snapped }
    }

    /// Number of retained samples, counted from the bottom of the lattice.
    pub fn kept_bins(&self) -> usize {
        self.kept
    }

    pub fn requested(&self) -> f64 {
        self.requested
    }

    /// Snapped cut; infinite when the cut lies outside the lattice.
    pub fn snapped(&self) -> f64 {
        self.snapped
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn transform_rows(values: &mut Array2<Complex64>, grid: &SpectralGrid, direction: FftDirection) {
    let n = grid.n_nu();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
    let parity = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = match direction {
        FftDirection::Inverse => parity * grid.dnu() / (2.0 * PI).sqrt(),
        FftDirection::Forward => parity * grid.dtau() / (2.0 * PI).sqrt(),
    };
    let sign = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for mut row in values.outer_iter_mut() {
        let buf = row.as_slice_mut().expect("rows are contiguous");
        buf.iter_mut().enumerate().for_each(|(k, z)| *z *= sign(k));
        fft.process_with_scratch(buf, &mut scratch);
        buf.iter_mut().enumerate().for_each(|(k, z)| *z *= scale * sign(k));
    }
}

/// Forward transform to the time representation (kernel `exp(+i tau nu)`).
pub fn to_tau(s: &HSState) -> TauState {
    let grid = *s.grid();
    let mut values = s.values().to_owned();
    // e^{+2 pi i n k / N} is rustfft's inverse direction
    transform_rows(&mut values, &grid, FftDirection::Inverse);
    TauState { grid, values }
}

/// Exact inverse of [`to_tau`].
pub fn from_tau(ts: &TauState) -> HSState {
    let grid = ts.grid;
    let mut values = ts.values.clone();
    transform_rows(&mut values, &grid, FftDirection::Forward);
    HSState::from_values(grid, values).expect("shape preserved by the transform")
}

/// `T s`: multiplication by `tau` in the time representation.
///
/// Logs a warning when the state has more than `1e-6` of its norm near
/// the edges of the grid, where the periodic transform is not faithful.
pub fn apply_t(s: &HSState) -> HSState {
    let boundary = s.boundary_mass();
    if boundary.max() > T_BOUNDARY_LIMIT {
        log::warn!(
            "apply_t: boundary mass nu={:.2e} E={:.2e} exceeds {T_BOUNDARY_LIMIT:.0e}",
            boundary.nu,
            boundary.energy
        );
    }
    let grid = *s.grid();
    let mut ts = to_tau(s);
    for mut row in ts.values.outer_iter_mut() {
        for (n, z) in row.iter_mut().enumerate() {
            *z *= grid.tau(n);
        }
    }
    from_tau(&ts)
}

/// `L T s - T L s`. For `T = i d/dnu` and `L = nu` this is `-i s`.
pub fn commutator_lt(s: &HSState) -> HSState {
    &apply_l(&apply_t(s)) - &apply_t(&apply_l(s))
}

/// Spectral projection `P_tau`: keeps the time samples `<= tau`.
pub fn project_p(s: &HSState, tau: f64) -> HSState {
    let mut ts = to_tau(s);
    ts.keep_up_to(TauCut::snap(s.grid(), tau));
    from_tau(&ts)
}

/// `||P_tau s||^2` without transforming back.
pub fn projected_norm_sqr(s: &HSState, tau: f64) -> f64 {
    let cut = TauCut::snap(s.grid(), tau);
    to_tau(s).tau_density()[..cut.kept_bins()].iter().sum()
}

/// Projections of the event-time observable `T' = -T`: `P'_tau = 1 - P_{-tau}`.
pub fn project_pprime(s: &HSState, tau: f64) -> HSState {
    s - &project_p(s, -tau)
}

/// Splits `s` into its unstable part `rho+ = P_0 s` (Hardy class H+) and
/// the orthogonal remainder `rho- = s - rho+`.
pub fn hardy_decompose(s: &HSState) -> (HSState, HSState) {
    let plus = project_p(s, 0.0);
    let minus = s - &plus;
    (plus, minus)
}

/// Mean and spread of `T` in a normalized state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMoments {
    pub mean: f64,
    pub delta: f64,
}

/// Time and energy statistics entering the uncertainty relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStats {
    pub mean_t: f64,
    pub delta_t: f64,
    pub delta_e: f64,
    pub product: f64,
}

impl TimeStats {
    /// `Delta E . Delta T - 1/(2 sqrt 2)`.
    pub fn bound_margin(&self) -> f64 {
        self.product - UNCERTAINTY_BOUND
    }
}

fn require_normalized(s: &HSState) -> Result<()> {
    let norm = s.norm();
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `<T>` and `(Delta T)` from the moments of `|rho^(tau)|^2`.
pub fn time_moments(s: &HSState) -> Result<TimeMoments> {
    require_normalized(s)?;
    let grid = *s.grid();
    let density = to_tau(s).tau_density();
    let total: f64 = density.iter().sum();
    let mean = density.iter().enumerate().map(|(n, w)| grid.tau(n) * w).sum::<f64>() / total;
    let var = density
        .iter()
        .enumerate()
        .map(|(n, w)| (grid.tau(n) - mean).powi(2) * w)
        .sum::<f64>()
        / total;
    Ok(TimeMoments { mean, delta: var.max(0.0).sqrt() })
}

/// `Delta E = sqrt(Tr(M H^2) - Tr(M H)^2)` for a density matrix `M`.
pub fn energy_spread(m: &LambdaKernel) -> f64 {
    let first = density_expectation(m, |l| l);
    let second = density_expectation(m, |l| l * l);
    (second - first * first).max(0.0).sqrt()
}

/// Full statistics of a normalized state `s`; `m` is the density matrix
/// the state embeds (for mixtures `s` is the spectral form of `M^{1/2}`).
pub fn time_stats(s: &HSState, m: Option<&LambdaKernel>) -> Result<TimeStats> {
    let m = m.ok_or(Error::MissingDensity)?;
    if m.grid() != s.grid() {
        return Err(Error::GridMismatch);
    }
    let t = time_moments(s)?;
    let delta_e = energy_spread(m);
    Ok(TimeStats { mean_t: t.mean, delta_t: t.delta, delta_e, product: t.delta * delta_e })
}
