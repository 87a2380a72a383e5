//! Discretization of the spectral plane.
//!
//! A [`SpectralGrid`] samples the Liouville frequency `nu = lambda - lambda'`
//! on `[-nu_max, nu_max)` and the energy `E = max(lambda, lambda')` on
//! `[0, e_max)` with one common spacing, so that the energy grid doubles as
//! the grid of the Hamiltonian spectrum `lambda`. Under that constraint the
//! change of variables `(lambda, lambda') -> (nu, E)` is a permutation of
//! samples, and [`lambda_to_nue`] / [`nue_to_lambda`] are exact inverses on
//! kernels whose support fits inside the window.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used when comparing the two grid spacings.
const SPACING_RTOL: f64 = 1e-12;

/// Fraction of each axis counted as "boundary" by [`BoundaryMass`].
const BOUNDARY_FRACTION: f64 = 0.05;

/// Uniform grid over the `(nu, E)` half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    nu_max: f64,
    n_nu: usize,
    e_max: f64,
    n_e: usize,
}

impl SpectralGrid {
    /// Validates and builds a grid.
    ///
    /// `n_nu` must be a power of two (at least 4) and the two spacings
    /// `2 nu_max / n_nu` and `e_max / n_e` must agree.
    pub fn new(nu_max: f64, n_nu: usize, e_max: f64, n_e: usize) -> Result<Self> {
        if !(nu_max.is_finite() && nu_max > 0.0) {
            return Err(Error::InvalidGrid(format!("nu_max must be positive, got {nu_max}")));
        }
        if !(e_max.is_finite() && e_max > 0.0) {
            return Err(Error::InvalidGrid(format!("e_max must be positive, got {e_max}")));
        }
        if n_nu < 4 || !n_nu.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_nu must be a power of two >= 4, got {n_nu}"
            )));
        }
        if n_e == 0 {
            return Err(Error::InvalidGrid("n_e must be positive".into()));
        }
        let dnu = 2.0 * nu_max / n_nu as f64;
        let de = e_max / n_e as f64;
        if (dnu - de).abs() > SPACING_RTOL * dnu.max(de) {
            return Err(Error::InvalidGrid(format!(
                "incommensurate spacings: dnu = {dnu}, dE = {de}"
            )));
        }
        Ok(Self { nu_max, n_nu, e_max, n_e })
    }

    /// Grid with `n_e` energy samples and the spacing fixed by `nu_max / n_nu`.
    pub fn with_energy_samples(nu_max: f64, n_nu: usize, n_e: usize) -> Result<Self> {
        let dnu = 2.0 * nu_max / n_nu as f64;
        Self::new(nu_max, n_nu, dnu * n_e as f64, n_e)
    }

    pub fn nu_max(&self) -> f64 {
        self.nu_max
    }

    pub fn n_nu(&self) -> usize {
        self.n_nu
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    pub fn n_e(&self) -> usize {
        self.n_e
    }

    /// Common spacing of the `nu`, `E` and `lambda` axes.
    pub fn spacing(&self) -> f64 {
        2.0 * self.nu_max / self.n_nu as f64
    }

    pub fn dnu(&self) -> f64 {
        self.spacing()
    }

    pub fn de(&self) -> f64 {
        self.spacing()
    }

    /// Index of the `nu = 0` sample.
    pub fn nu_zero(&self) -> usize {
        self.n_nu / 2
    }

    pub fn nu(&self, k: usize) -> f64 {
        -self.nu_max + k as f64 * self.spacing()
    }

    pub fn energy(&self, m: usize) -> f64 {
        m as f64 * self.spacing()
    }

    /// Spacing of the Fourier-dual time axis, `2 pi / (n_nu dnu)`.
    pub fn dtau(&self) -> f64 {
        2.0 * PI / (self.n_nu as f64 * self.spacing())
    }

    /// Time sample `tau_n = (n - n_nu/2) dtau`; `tau = 0` sits at `n_nu/2`.
    pub fn tau(&self, n: usize) -> f64 {
        (n as f64 - (self.n_nu / 2) as f64) * self.dtau()
    }

    /// Largest representable time sample.
    pub fn tau_max(&self) -> f64 {
        self.tau(self.n_nu - 1)
    }

    pub fn nu_samples(&self) -> Vec<f64> {
        (0..self.n_nu).map(|k| self.nu(k)).collect()
    }

    pub fn energy_samples(&self) -> Vec<f64> {
        (0..self.n_e).map(|m| self.energy(m)).collect()
    }

    pub fn tau_samples(&self) -> Vec<f64> {
        (0..self.n_nu).map(|n| self.tau(n)).collect()
    }

    /// Nearest lattice time, i.e. a shift under which the discrete
    /// evolution is an exact translation of the time representation.
    pub fn snap_time(&self, t: f64) -> f64 {
        (t / self.dtau()).round() * self.dtau()
    }
}

/// Fraction of the squared norm found in the outer 5% of each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMass {
    pub nu: f64,
    pub energy: f64,
}

impl BoundaryMass {
    pub fn max(&self) -> f64 {
        self.nu.max(self.energy)
    }
}

/// Hilbert–Schmidt element in the spectral representation `rho(nu, E)`.
///
/// Values are stored with shape `(n_e, n_nu)`: one contiguous `nu` row per
/// energy sample.
#[derive(Debug, Clone, PartialEq)]
pub struct HSState {
    grid: SpectralGrid,
    values: Array2<Complex64>,
}

impl HSState {
    pub fn zeros(grid: SpectralGrid) -> Self {
        Self { grid, values: Array2::zeros((grid.n_e, grid.n_nu)) }
    }

    /// Samples `f(nu, E)` on every grid point.
    pub fn from_fn(grid: SpectralGrid, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let values = Array2::from_shape_fn((grid.n_e, grid.n_nu), |(m, k)| {
            f(grid.nu(k), grid.energy(m))
        });
        Self { grid, values }
    }

    /// Wraps raw values of shape `(n_e, n_nu)`.
    pub fn from_values(grid: SpectralGrid, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != (grid.n_e, grid.n_nu) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values })
    }

    /// Separable state `g(nu) psi(E)` from a `nu` row and an energy profile.
    pub fn separable(grid: SpectralGrid, nu_part: &[Complex64], profile: &[Complex64]) -> Result<Self> {
        if nu_part.len() != grid.n_nu {
            return Err(Error::GridMismatch);
        }
        if profile.len() != grid.n_e {
            return Err(Error::ProfileLength { expected: grid.n_e, actual: profile.len() });
        }
        let values = Array2::from_shape_fn((grid.n_e, grid.n_nu), |(m, k)| profile[m] * nu_part[k]);
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

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    pub fn get(&self, k: usize, m: usize) -> Complex64 {
        self.values[(m, k)]
    }

    /// `dnu dE sum |rho|^2`.
    pub fn norm_sqr(&self) -> f64 {
        let h = self.grid.spacing();
        h * h * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.mapv(|z| z * factor) }
    }

    /// Copy rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid: self.grid, values: &self.values + &other.values })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid: self.grid, values: &self.values - &other.values })
    }

    /// Norm fractions in the outer 5% of the `nu` and `E` axes.
    pub fn boundary_mass(&self) -> BoundaryMass {
        let total: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return BoundaryMass { nu: 0.0, energy: 0.0 };
        }
        let nu_edge = (1.0 - BOUNDARY_FRACTION) * self.grid.nu_max;
        let e_edge = (1.0 - BOUNDARY_FRACTION) * self.grid.e_max;
        let mut nu_mass = 0.0;
        let mut e_mass = 0.0;
        for ((m, k), z) in self.values.indexed_iter() {
            let w = z.norm_sqr();
            if self.grid.nu(k).abs() >= nu_edge {
                nu_mass += w;
            }
            if self.grid.energy(m) >= e_edge {
                e_mass += w;
            }
        }
        BoundaryMass { nu: nu_mass / total, energy: e_mass / total }
    }

    /// Norm of the part lying in `E < |nu|`, where no kernel preimage exists.
    pub fn unphysical_norm(&self) -> f64 {
        let h = self.grid.spacing();
        let mut acc = 0.0;
        for ((m, k), z) in self.values.indexed_iter() {
            if (m as isize) < (k as isize - self.grid.nu_zero() as isize).abs() {
                acc += z.norm_sqr();
            }
        }
        h * acc.sqrt()
    }
}

impl Add for &HSState {
    type Output = HSState;

    /// Panics when the grids differ; see [`HSState::checked_add`].
    fn add(self, rhs: Self) -> HSState {
        self.checked_add(rhs).expect("grid mismatch")
    }
}

impl Sub for &HSState {
    type Output = HSState;

    /// Panics when the grids differ; see [`HSState::checked_sub`].
    fn sub(self, rhs: Self) -> HSState {
        self.checked_sub(rhs).expect("grid mismatch")
    }
}

impl Mul<Complex64> for &HSState {
    type Output = HSState;

    fn mul(self, rhs: Complex64) -> HSState {
        self.scaled(rhs)
    }
}

/// Kernel `rho(lambda, lambda')` of a Hilbert–Schmidt operator on the
/// half-line, sampled on the energy grid. Also used for density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaKernel {
    grid: SpectralGrid,
    values: Array2<Complex64>,
}

impl LambdaKernel {
    pub fn zeros(grid: SpectralGrid) -> Self {
        Self { grid, values: Array2::zeros((grid.n_e, grid.n_e)) }
    }

    pub fn from_fn(grid: SpectralGrid, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let values = Array2::from_shape_fn((grid.n_e, grid.n_e), |(i, j)| {
            f(grid.energy(i), grid.energy(j))
        });
        Self { grid, values }
    }

    pub fn from_values(grid: SpectralGrid, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != (grid.n_e, grid.n_e) {
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

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    /// `dE^2 sum |k|^2`.
    pub fn norm_sqr(&self) -> f64 {
        let h = self.grid.spacing();
        h * h * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Trace of the discretized operator, `dE sum k(lambda, lambda)`.
    pub fn trace(&self) -> Complex64 {
        self.grid.spacing() * self.values.diag().sum()
    }

    /// Largest `|k - k^*|` relative to the largest entry.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.grid.n_e;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.values[(i, j)] - self.values[(j, i)].conj()).norm());
            }
        }
        worst / scale
    }

    /// Discretized operator product `(a b)(l, l'') = dE sum_l' a(l, l') b(l', l'')`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let h = Complex64::new(self.grid.spacing(), 0.0);
        Ok(Self { grid: self.grid, values: self.values.dot(&other.values).mapv(|z| z * h) })
    }
}

/// Maps a kernel `k(lambda, lambda')` to the spectral representation of `L`.
///
/// `rho(nu, E) = k(E, E - nu)` for `nu >= 0` and `k(E + nu, E)` for
/// `nu < 0`; entries with `E < |nu|` are zero. Kernel samples whose
/// difference `lambda - lambda'` falls outside `[-nu_max, nu_max)` are
/// dropped.
pub fn lambda_to_nue(kernel: &LambdaKernel) -> HSState {
    let grid = kernel.grid;
    let n_e = grid.n_e as isize;
    let zero = grid.nu_zero() as isize;
    let mut out = HSState::zeros(grid);
    for k in 0..grid.n_nu {
        let d = k as isize - zero;
        for m in 0..n_e {
            let (i, j) = if d >= 0 { (m, m - d) } else { (m + d, m) };
            if i >= 0 && j >= 0 {
                out.values[(m as usize, k)] = kernel.values[(i as usize, j as usize)];
            }
        }
    }
    out
}

/// Inverse of [`lambda_to_nue`].
///
/// Fails with [`Error::UnphysicalSupport`] when more than `1e-10` of the
/// norm sits in `E < |nu|`, as happens after a Hardy projection.
pub fn nue_to_lambda(state: &HSState) -> Result<LambdaKernel> {
    let norm = state.norm();
    let off = state.unphysical_norm();
    if norm > 0.0 && off > 1e-10 * norm {
        return Err(Error::UnphysicalSupport { residual: off / norm });
    }
    let grid = state.grid;
    let zero = grid.nu_zero() as isize;
    let n_nu = grid.n_nu as isize;
    let values = Array2::from_shape_fn((grid.n_e, grid.n_e), |(i, j)| {
        let d = i as isize - j as isize;
        let k = d + zero;
        if (0..n_nu).contains(&k) {
            state.values[(i.max(j), k as usize)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(LambdaKernel { grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn desk_grid_spacings() {
        let g = SpectralGrid::new(8.0, 1024, 8.0, 512).unwrap();
        assert_eq!(g.dnu(), 1.0 / 64.0);
        assert_eq!(g.de(), 1.0 / 64.0);
        assert_eq!(g.nu(g.nu_zero()), 0.0);
        assert_eq!(g.tau(g.nu_zero()), 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(SpectralGrid::new(8.0, 1000, 8.0, 512), Err(Error::InvalidGrid(_))));
        assert!(matches!(SpectralGrid::new(8.0, 1024, 10.0, 512), Err(Error::InvalidGrid(_))));
        assert!(SpectralGrid::new(-1.0, 1024, 8.0, 512).is_err());
        assert!(SpectralGrid::new(8.0, 1024, 0.0, 512).is_err());
        assert!(SpectralGrid::new(8.0, 2, 8.0, 1).is_err());
    }

    #[test]
    fn diagonal_kernel_lands_on_nu_zero() {
        let g = SpectralGrid::new(2.0, 64, 2.0, 32).unwrap();
        let k = LambdaKernel::from_fn(g, |l, lp| if l == lp { c(1.0 + l) } else { c(0.0) });
        let s = lambda_to_nue(&k);
        for m in 0..g.n_e() {
            for kk in 0..g.n_nu() {
                let expect = if kk == g.nu_zero() { c(1.0 + g.energy(m)) } else { c(0.0) };
                assert_eq!(s.get(kk, m), expect);
            }
        }
    }

    #[test]
    fn indicator_outer_product_branches() {
        // psi = indicator of [0, 1): both branch formulas give 1 on the
        // image of the unit square and 0 elsewhere.
        let g = SpectralGrid::new(2.0, 128, 2.0, 64).unwrap();
        let ind = |x: f64| if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
        let k = LambdaKernel::from_fn(g, |l, lp| c(ind(l) * ind(lp)));
        let s = lambda_to_nue(&k);
        for m in 0..g.n_e() {
            for kk in 0..g.n_nu() {
                let (nu, e) = (g.nu(kk), g.energy(m));
                let expect = if nu >= 0.0 { ind(e) * ind(e - nu) } else { ind(e + nu) * ind(e) };
                let expect = if e < nu.abs() { 0.0 } else { expect };
                assert_eq!(s.get(kk, m).re, expect, "nu={nu} E={e}");
            }
        }
        assert_eq!(nue_to_lambda(&s).unwrap(), k);
    }

    #[test]
    fn mass_outside_support_is_unphysical() {
        let g = SpectralGrid::new(4.0, 64, 4.0, 32).unwrap();
        let mut s = HSState::zeros(g);
        // nu = 2, E = 1
        let k = g.nu_zero() + (2.0 / g.dnu()) as usize;
        let m = (1.0 / g.de()) as usize;
        s.values_mut()[(m, k)] = c(1.0);
        assert!(matches!(nue_to_lambda(&s), Err(Error::UnphysicalSupport { .. })));
    }

    #[test]
    fn boundary_mass_of_centered_and_edge_states() {
        let g = SpectralGrid::new(4.0, 64, 4.0, 32).unwrap();
        let centered = HSState::from_fn(g, |nu, e| c((-4.0 * (nu * nu) - 4.0 * (e - 2.0).powi(2)).exp()));
        assert!(centered.boundary_mass().max() < 1e-6);
        let mut edge = HSState::zeros(g);
        edge.values_mut()[(0, 0)] = c(1.0);
        assert_eq!(edge.boundary_mass().nu, 1.0);
    }
}
