#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use timeop_core::{
    embed_density, embed_pure, lambda_to_nue, pole_state, HSState, LambdaKernel, Profile, PureState, SpectralGrid,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Acceptance desk grid: n_nu = 2^14, nu_max = 50.
pub fn desk_grid() -> SpectralGrid {
    SpectralGrid::with_energy_samples(50.0, 1 << 14, 4).unwrap()
}

/// Grid for physical embeddings: lambda in [0, 4) with spacing 1/128.
pub fn physical_grid() -> SpectralGrid {
    SpectralGrid::new(4.0, 1024, 4.0, 512).unwrap()
}

/// Resonance grid with nu_max = 400 |Im xi|.
pub fn resonance_grid(width: f64, n_e: usize) -> SpectralGrid {
    SpectralGrid::with_energy_samples(400.0 * width, 1 << 14, n_e).unwrap()
}

pub fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| random_complex(rng)).collect()
}

fn admissible_pole(rng: &mut ChaCha8Rng, grid: &SpectralGrid, lower: bool) -> Complex64 {
    let lo = 10.0 * grid.dnu();
    let hi = grid.nu_max() / 50.0;
    let b = rng.random_range(lo..hi);
    let a = rng.random_range(-0.2 * grid.nu_max()..0.2 * grid.nu_max());
    Complex64::new(a, if lower { -b } else { b })
}

/// Finite sum of lattice resonances with distinct lower-half-plane poles.
pub fn random_hardy_state(rng: &mut ChaCha8Rng, grid: &SpectralGrid) -> HSState {
    let terms = rng.random_range(1..=4);
    let mut acc = HSState::zeros(*grid);
    for _ in 0..terms {
        let xi = admissible_pole(rng, grid, true);
        let profile = random_profile(rng, grid.n_e());
        acc = &acc + &pole_state(grid, xi, &profile).unwrap().scaled(random_complex(rng));
    }
    acc.normalized().unwrap()
}

/// Sum of Gaussians in nu (random centers, widths, modulation) with random
/// energy profiles; generally straddles the Hardy split.
pub fn random_smooth_state(rng: &mut ChaCha8Rng, grid: &SpectralGrid) -> HSState {
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
            let m = (e / grid.de()).round() as usize;
            let g = (-(nu - center).powi(2) / (2.0 * width * width)).exp();
            coeff * profile[m] * Complex64::from_polar(g, shift * nu)
        });
        acc = &acc + &term;
    }
    acc.normalized().unwrap()
}

/// Mixture of Hardy, anti-Hardy and smooth components.
pub fn random_general_state(rng: &mut ChaCha8Rng, grid: &SpectralGrid) -> HSState {
    let mut acc = random_smooth_state(rng, grid).scaled(random_complex(rng));
    acc = &acc + &random_hardy_state(rng, grid).scaled(random_complex(rng));
    let zeta = admissible_pole(rng, grid, false);
    let anti = pole_state(grid, zeta, &random_profile(rng, grid.n_e())).unwrap().normalized().unwrap();
    acc = &acc + &anti.scaled(random_complex(rng));
    acc.normalized().unwrap()
}

pub fn random_profile_family(rng: &mut ChaCha8Rng) -> Profile {
    match rng.random_range(0..4) {
        0 => Profile::Gaussian { center: rng.random_range(1.0..2.5), width: rng.random_range(0.05..0.3) },
        1 => {
            let first = rng.random_range(0.8..1.5);
            Profile::TwoBump { first, second: first + rng.random_range(0.5..1.2), width: rng.random_range(0.04..0.15) }
        }
        2 => Profile::Exponential { rate: rng.random_range(1.0..4.0) },
        _ => {
            let a = rng.random_range(0.0..1.5);
            Profile::Indicator { a, b: a + rng.random_range(0.3..1.5) }
        }
    }
}

/// A physical state: spectral form of |psi><psi| or of M^{1/2}, with M.
pub fn random_physical_state(rng: &mut ChaCha8Rng, grid: &SpectralGrid, mixture: bool) -> (HSState, LambdaKernel) {
    if !mixture {
        let psi = PureState::new(*grid, random_profile_family(rng).sample(grid)).unwrap();
        let m = embed_pure(&psi);
        let s = lambda_to_nue(&m).normalized().unwrap();
        return (s, m);
    }
    let parts = rng.random_range(2..=3);
    let weights: Vec<f64> = (0..parts).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ndarray::Array2::<Complex64>::zeros((grid.n_e(), grid.n_e()));
    for w in &weights {
        let psi = PureState::new(*grid, random_profile_family(rng).sample(grid)).unwrap();
        m = m + embed_pure(&psi).values().mapv(|z| z * (w / total));
    }
    let m = LambdaKernel::from_values(*grid, m).unwrap();
    let rho = embed_density(&m).unwrap();
    (lambda_to_nue(&rho).normalized().unwrap(), m)
}

/// Smooth compactly supported bump in nu times an energy profile.
pub fn bump_state(grid: &SpectralGrid, center: f64, half_width: f64, profile: &[Complex64]) -> HSState {
    HSState::from_fn(*grid, |nu, e| {
        let m = (e / grid.de()).round() as usize;
        let x = (nu - center) / half_width;
        let b = if x.abs() < 1.0 { (-1.0 / (1.0 - x * x)).exp() } else { 0.0 };
        profile[m] * b
    })
}

pub fn rel_diff(a: &HSState, b: &HSState) -> f64 {
    (a - b).norm() / b.norm().max(a.norm())
}
