//! Seeded random states for the verification suite.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use timeop_core::{
    embed_density, embed_pure, lambda_to_nue, pole_state, HSState, LambdaKernel, Profile, PureState, SpectralGrid,
};

use crate::error::{CliError, CliResult};

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| random_complex(rng)).collect()
}

/// Range of pole widths `|Im xi|` the grid resolves.
pub fn admissible_widths(grid: &SpectralGrid) -> CliResult<(f64, f64)> {
    let lo = 10.0 * grid.dnu();
    let hi = grid.nu_max() / 50.0;
    if lo >= hi {
        return Err(CliError::config(format!(
            "grid resolves no resonance: need 10*dnu = {lo} < nu_max/50 = {hi}; increase n_nu"
        )));
    }
    Ok((lo, hi))
}

pub fn random_pole(rng: &mut ChaCha8Rng, grid: &SpectralGrid, lower: bool) -> CliResult<Complex64> {
    let (lo, hi) = admissible_widths(grid)?;
    let b = rng.random_range(lo..hi);
    let a = rng.random_range(-0.2 * grid.nu_max()..0.2 * grid.nu_max());
    Ok(Complex64::new(a, if lower { -b } else { b }))
}

/// Normalized finite sum of resonance states with random poles in the
/// lower half-plane.
pub fn hardy_state(rng: &mut ChaCha8Rng, grid: &SpectralGrid) -> CliResult<HSState> {
    let terms = rng.random_range(1..=4);
    let mut acc = HSState::zeros(*grid);
    for _ in 0..terms {
        let xi = random_pole(rng, grid, true)?;
        let term = pole_state(grid, xi, &random_profile(rng, grid.n_e()))?;
        acc = &acc + &term.scaled(random_complex(rng));
    }
    Ok(acc.normalized()?)
}

/// Normalized sum of modulated Gaussians in `nu`.
pub fn smooth_state(rng: &mut ChaCha8Rng, grid: &SpectralGrid) -> CliResult<HSState> {
    let terms = rng.random_range(1..=3);
    let nu_max = grid.nu_max();
    let mut acc = HSState::zeros(*grid);
    for _ in 0..terms {
        let center = rng.random_range(-0.2 * nu_max..0.2 * nu_max);
        let width = rng.random_range(0.01 * nu_max..0.05 * nu_max);
        let shift = rng.random_range(-5.0..5.0) / width;
        let profile = random_profile(rng, grid.n_e());
        let coeff = random_complex(rng);
        let term = HSState::from_fn(*grid, |nu, e| {
            let m = ((e / grid.de()).round() as usize).min(grid.n_e() - 1);
            let g = (-(nu - center).powi(2) / (2.0 * width * width)).exp();
            coeff * profile[m] * Complex64::from_polar(g, shift * nu)
        });
        acc = &acc + &term;
    }
    Ok(acc.normalized()?)
}

/// Normalized mixture of Hardy, anti-Hardy and smooth components.
pub fn general_state(rng: &mut ChaCha8Rng, grid: &SpectralGrid) -> CliResult<HSState> {
    let mut acc = smooth_state(rng, grid)?.scaled(random_complex(rng));
    acc = &acc + &hardy_state(rng, grid)?.scaled(random_complex(rng));
    let zeta = random_pole(rng, grid, false)?;
    let anti = pole_state(grid, zeta, &random_profile(rng, grid.n_e()))?.normalized()?;
    acc = &acc + &anti.scaled(random_complex(rng));
    Ok(acc.normalized()?)
}

/// Smooth compactly supported bump in `nu` times an energy profile.
pub fn bump_state(grid: &SpectralGrid, center: f64, half_width: f64, profile: &[Complex64]) -> HSState {
    HSState::from_fn(*grid, |nu, e| {
        let m = ((e / grid.de()).round() as usize).min(grid.n_e() - 1);
        let x = (nu - center) / half_width;
        let b = if x.abs() < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 };
        profile[m] * b
    })
}

/// Random member of one of the shipped profile families, placed inside
/// `[0, e_max)`.
pub fn random_family(rng: &mut ChaCha8Rng, e_max: f64) -> Profile {
    let s = e_max / 4.0;
    match rng.random_range(0..4) {
        0 => Profile::Gaussian { center: s * rng.random_range(1.0..2.5), width: s * rng.random_range(0.05..0.3) },
        1 => {
            let first = s * rng.random_range(0.8..1.5);
            Profile::TwoBump {
                first,
                second: first + s * rng.random_range(0.5..1.2),
                width: s * rng.random_range(0.04..0.15),
            }
        }
        2 => Profile::Exponential { rate: rng.random_range(1.0..4.0) / s },
        _ => {
            let a = s * rng.random_range(0.0..1.5);
            Profile::Indicator { a, b: a + s * rng.random_range(0.3..1.5) }
        }
    }
}

/// Spectral form of a random pure or mixed physical state, with its
/// density matrix.
pub fn physical_state(rng: &mut ChaCha8Rng, grid: &SpectralGrid, mixture: bool) -> CliResult<(HSState, LambdaKernel)> {
    if !mixture {
        let psi = PureState::new(*grid, random_family(rng, grid.e_max()).sample(grid))?;
        let m = embed_pure(&psi);
        return Ok((lambda_to_nue(&m).normalized()?, m));
    }
    let parts = rng.random_range(2..=3);
    let weights: Vec<f64> = (0..parts).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ndarray::Array2::<Complex64>::zeros((grid.n_e(), grid.n_e()));
    for w in &weights {
        let psi = PureState::new(*grid, random_family(rng, grid.e_max()).sample(grid))?;
        m = m + embed_pure(&psi).values().mapv(|z| z * (w / total));
    }
    let m = LambdaKernel::from_values(*grid, m)?;
    let rho = embed_density(&m)?;
    Ok((lambda_to_nue(&rho).normalized()?, m))
}
