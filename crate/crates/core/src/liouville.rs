//! Liouville-space states, embeddings and the unitary group `U_t`.
//!
//! In the spectral representation the Liouville operator `L rho = H rho - rho H`
//! is multiplication by `nu`, so `U_t = exp(-i t L)` is multiplication by
//! `exp(-i t nu)`.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{HSState, LambdaKernel, SpectralGrid};

/// Eigenvalues below this are clamped to zero before the square root.
const EIGEN_CLAMP: f64 = 1e-12;
/// Most negative eigenvalue accepted as round-off of a PSD matrix.
const PSD_TOLERANCE: f64 = 1e-10;
const TRACE_TOLERANCE: f64 = 1e-8;
const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Normalized wave function `psi(lambda)` on the energy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    grid: SpectralGrid,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Normalizes `amplitudes` to `dE sum |psi|^2 = 1`.
    pub fn new(grid: SpectralGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_e() {
            return Err(Error::ProfileLength { expected: grid.n_e(), actual: amplitudes.len() });
        }
        let norm = (grid.spacing() * amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self { grid, amplitudes })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<psi, A psi>` for a multiplication observable `A(lambda)`.
    pub fn expectation(&self, observable: impl Fn(f64) -> f64) -> f64 {
        let h = self.grid.spacing();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(j, z)| observable(self.grid.energy(j)) * z.norm_sqr())
            .sum::<f64>()
            * h
    }
}

/// Sampled scalar observable over strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_times(&times)?;
        if times.len() != values.len() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::TimesNotIncreasing);
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Largest `p(t2) - p(t1)` over sample pairs with `t1 < t2`
    /// (0 for a nonincreasing series).
    pub fn max_increase(&self) -> f64 {
        let mut lowest = f64::INFINITY;
        let mut rise: f64 = 0.0;
        for &v in &self.values {
            rise = rise.max(v - lowest);
            lowest = lowest.min(v);
        }
        rise
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::TimesNotIncreasing);
    }
    Ok(())
}

/// Hilbert–Schmidt scalar product `Tr(a^* b)`, conjugate-linear in `a`.
pub fn inner(a: &HSState, b: &HSState) -> Result<Complex64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let h = a.grid().spacing();
    let sum: Complex64 = a.values().iter().zip(b.values().iter()).map(|(x, y)| x.conj() * y).sum();
    Ok(sum * h * h)
}

/// `rho = |psi><psi|`.
pub fn embed_pure(psi: &PureState) -> LambdaKernel {
    let amps = psi.amplitudes();
    LambdaKernel::from_values(
        psi.grid,
        ndarray::Array2::from_shape_fn((amps.len(), amps.len()), |(i, j)| amps[i] * amps[j].conj()),
    )
    .expect("square kernel on the psi grid")
}

/// Embeds a density matrix `M` as its operator square root `rho = M^{1/2}`.
///
/// The square root is taken of the quadrature-weighted matrix `dE M`
/// (the discretized operator), so that `rho.compose(&rho) == M`.
pub fn embed_density(m: &LambdaKernel) -> Result<LambdaKernel> {
    let asymmetry = m.hermitian_defect();
    if asymmetry > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { asymmetry });
    }
    let trace = m.trace();
    if (trace.re - 1.0).abs() > TRACE_TOLERANCE || trace.im.abs() > TRACE_TOLERANCE {
        return Err(Error::TraceNotUnit { trace: trace.re });
    }
    let grid = *m.grid();
    let h = grid.spacing();
    let n = grid.n_e();
    let weighted = Mat::<Complex64>::from_fn(n, n, |i, j| 0.5 * h * (m.values()[(i, j)] + m.values()[(j, i)].conj()));
    let eig = weighted.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let eigenvalues: Vec<f64> = eig.S().column_vector().iter().map(|z| z.re).collect();
    let min_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -PSD_TOLERANCE {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
    }
    let vecs = eig.U();
    let scaled = Mat::<Complex64>::from_fn(n, n, |i, c| {
        let mu = eigenvalues[c];
        let root = if mu < EIGEN_CLAMP { 0.0 } else { mu.sqrt() };
        vecs[(i, c)] * (root / h)
    });
    let root = &scaled * vecs.adjoint();
    let values = ndarray::Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (root[(i, j)] + root[(j, i)].conj()));
    LambdaKernel::from_values(grid, values)
}

/// `<rho, A rho>` for a multiplication observable acting on the left,
/// `(A rho)(lambda, lambda') = A(lambda) rho(lambda, lambda')`.
pub fn kernel_expectation(rho: &LambdaKernel, observable: impl Fn(f64) -> f64) -> f64 {
    let grid = rho.grid();
    let h = grid.spacing();
    rho.values()
        .outer_iter()
        .enumerate()
        .map(|(i, row)| observable(grid.energy(i)) * row.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        * h
        * h
}

/// `Tr(M A)` for a multiplication observable.
pub fn density_expectation(m: &LambdaKernel, observable: impl Fn(f64) -> f64) -> f64 {
    let grid = m.grid();
    let h = grid.spacing();
    m.values()
        .diag()
        .iter()
        .enumerate()
        .map(|(i, z)| observable(grid.energy(i)) * z.re)
        .sum::<f64>()
        * h
}

/// `L rho (nu, E) = nu rho(nu, E)`.
pub fn apply_l(s: &HSState) -> HSState {
    let grid = *s.grid();
    let mut out = s.clone();
    for mut row in out.values_mut().outer_iter_mut() {
        for (k, z) in row.iter_mut().enumerate() {
            *z *= grid.nu(k);
        }
    }
    out
}

/// `U_t rho = exp(-i t nu) rho`.
pub fn evolve(s: &HSState, t: f64) -> HSState {
    let grid = *s.grid();
    let phase: Vec<Complex64> = (0..grid.n_nu()).map(|k| Complex64::from_polar(1.0, -t * grid.nu(k))).collect();
    let mut out = s.clone();
    for mut row in out.values_mut().outer_iter_mut() {
        for (z, p) in row.iter_mut().zip(&phase) {
            *z *= p;
        }
    }
    out
}

/// Survival probability in the Hilbert space for the rank-one projection
/// onto `psi`: `p(t) = |<psi, exp(-i t H) psi>|^2`.
pub fn hilbert_survival(psi: &PureState, times: &[f64]) -> Result<TimeSeries> {
    check_times(times)?;
    let grid = psi.grid();
    let h = grid.spacing();
    let weights: Vec<(f64, f64)> =
        psi.amplitudes().iter().enumerate().map(|(j, z)| (grid.energy(j), z.norm_sqr() * h)).collect();
    let values = times
        .iter()
        .map(|&t| {
            let amp: Complex64 = weights.iter().map(|&(l, w)| Complex64::from_polar(w, -t * l)).sum();
            amp.norm_sqr()
        })
        .collect();
    TimeSeries::new(times.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::lambda_to_nue;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(4.0, 256, 4.0, 128).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bump(grid: SpectralGrid, center: f64, width: f64) -> PureState {
        let amps = grid
            .energy_samples()
            .iter()
            .map(|&l| c((-(l - center).powi(2) / (4.0 * width * width)).exp()))
            .collect();
        PureState::new(grid, amps).unwrap()
    }

    #[test]
    fn spike_embeds_to_unit_norm_spike() {
        let g = grid();
        let mut amps = vec![c(0.0); g.n_e()];
        amps[0] = c(1.0 / g.de().sqrt());
        let psi = PureState::new(g, amps).unwrap();
        let k = embed_pure(&psi);
        assert!((k.values()[(0, 0)].re - 1.0 / g.de()).abs() < 1e-9);
        assert!((k.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indicator_embeds_to_unit_square() {
        let g = grid();
        let amps = g.energy_samples().iter().map(|&l| c(if l < 1.0 { 1.0 } else { 0.0 })).collect();
        let psi = PureState::new(g, amps).unwrap();
        let k = embed_pure(&psi);
        for ((i, j), z) in k.values().indexed_iter() {
            let inside = g.energy(i) < 1.0 && g.energy(j) < 1.0;
            assert!((z.re - if inside { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_embedding_reproduces_expectations() {
        let g = grid();
        let psi = bump(g, 1.5, 0.2);
        let rho = embed_pure(&psi);
        let a = |l: f64| l * l + 0.3 * l;
        let direct = psi.expectation(a);
        let lifted = kernel_expectation(&rho, a);
        assert!((direct - lifted).abs() < 1e-12 * direct.abs());
        let s = lambda_to_nue(&rho);
        assert!((inner(&s, &s).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_is_its_own_square_root() {
        let g = grid();
        let m = embed_pure(&bump(g, 2.0, 0.3));
        let rho = embed_density(&m).unwrap();
        let err = (&rho.values().view() - &m.values().view()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-8 * m.values().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }

    #[test]
    fn equal_mixture_square_root() {
        let g = grid();
        // disjoint indicators are orthogonal
        let ind = |a: f64, b: f64| {
            let amps = g.energy_samples().iter().map(|&l| c(if (a..b).contains(&l) { 1.0 } else { 0.0 })).collect();
            embed_pure(&PureState::new(g, amps).unwrap())
        };
        let p1 = ind(0.5, 1.0);
        let p2 = ind(2.0, 3.0);
        let m = LambdaKernel::from_values(g, (p1.values() + p2.values()).mapv(|z| 0.5 * z)).unwrap();
        let rho = embed_density(&m).unwrap();
        let expect = (p1.values() + p2.values()).mapv(|z| z / 2f64.sqrt());
        let err = (rho.values() - &expect).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "err = {err}");
        let back = rho.compose(&rho).unwrap();
        let err = (back.values() - m.values()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-8);
        let a = |l: f64| l.sin() + 2.0;
        let tr = density_expectation(&m, a);
        assert!((kernel_expectation(&rho, a) - tr).abs() < 1e-10 * tr);
    }

    #[test]
    fn density_validation() {
        let g = grid();
        let m = embed_pure(&bump(g, 2.0, 0.3));
        let doubled = LambdaKernel::from_values(g, m.values().mapv(|z| 2.0 * z)).unwrap();
        assert!(matches!(embed_density(&doubled), Err(Error::TraceNotUnit { .. })));
        let negative = LambdaKernel::from_values(
            g,
            ndarray::Array2::from_shape_fn((g.n_e(), g.n_e()), |(i, j)| {
                if i != j {
                    c(0.0)
                } else if i == 0 {
                    c(-1.0)
                } else if i == 1 {
                    c((1.0 + g.de()) / g.de())
                } else {
                    c(0.0)
                }
            }),
        )
        .unwrap();
        assert!(matches!(embed_density(&negative), Err(Error::NotPositiveSemidefinite { .. })));
        let mut skew = m.values().clone();
        skew[(0, 5)] += Complex64::new(0.0, 1.0);
        let skew = LambdaKernel::from_values(g, skew).unwrap();
        assert!(matches!(embed_density(&skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn evolution_and_generator() {
        let g = grid();
        let s = HSState::from_fn(g, |nu, e| Complex64::new((-nu * nu).exp(), e * (-nu * nu).exp()));
        assert_eq!(evolve(&s, 0.0), s);
        assert!((evolve(&s, 1.7).norm() - s.norm()).abs() < 1e-12);
        let a = evolve(&evolve(&s, 0.4), 1.1);
        let b = evolve(&s, 1.5);
        assert!((&a - &b).norm() < 1e-12);
        let lhs = evolve(&apply_l(&s), 0.9);
        let rhs = apply_l(&evolve(&s, 0.9));
        assert!((&lhs - &rhs).norm() < 1e-12);
        let zero_nu = HSState::from_fn(g, |nu, _| c(if nu == 0.0 { 1.0 } else { 0.0 }));
        assert_eq!(apply_l(&zero_nu).norm(), 0.0);
    }

    #[test]
    fn near_eigenstate_survives() {
        let g = grid();
        let mut amps = vec![c(0.0); g.n_e()];
        amps[40] = c(1.0);
        let psi = PureState::new(g, amps).unwrap();
        let p = hilbert_survival(&psi, &[0.0, 1.0, 10.0, 100.0]).unwrap();
        assert!(p.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn inner_with_zero_and_grid_mismatch() {
        let g = grid();
        let s = HSState::from_fn(g, |nu, _| c(nu));
        assert_eq!(inner(&s, &HSState::zeros(g)).unwrap(), c(0.0));
        let other = SpectralGrid::new(2.0, 128, 2.0, 64).unwrap();
        assert_eq!(inner(&s, &HSState::zeros(other)), Err(Error::GridMismatch));
    }
}
