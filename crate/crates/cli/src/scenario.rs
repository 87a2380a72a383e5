//! Grids and states built from a validated configuration.

use num_complex::Complex64;
use timeop_core::{
    embed_density, embed_pure, lambda_to_nue, resonance_state, HSState, LambdaKernel, PureState, ResonanceSpec,
    SpectralGrid,
};

use crate::config::{ScenarioConfig, StateSpec};
use crate::error::CliResult;

/// A state ready for the Liouville-space operations.
pub struct Scenario {
    pub grid: SpectralGrid,
    /// Spectral form, normalized to unit Hilbert–Schmidt norm.
    pub state: HSState,
    /// Density matrix of a physical state.
    pub density: Option<LambdaKernel>,
    /// Wave function of a pure state.
    pub pure: Option<PureState>,
    /// Pole of a resonance state.
    pub xi: Option<Complex64>,
}

impl Scenario {
    pub fn build(config: &ScenarioConfig) -> CliResult<Self> {
        let grid = config.grid.build()?;
        let scenario = match &config.state {
            StateSpec::Resonance { xi, profile } => {
                let spec = ResonanceSpec::new(&grid, *xi, profile.sample(&grid))?;
                let state = resonance_state(&spec, &grid)?.normalized()?;
                Self { grid, state, density: None, pure: None, xi: Some(*xi) }
            }
            StateSpec::Pure { profile } => {
                let psi = PureState::new(grid, profile.sample(&grid))?;
                let m = embed_pure(&psi);
                let state = lambda_to_nue(&m).normalized()?;
                Self { grid, state, density: Some(m), pure: Some(psi), xi: None }
            }
            StateSpec::Mixture { weights, profiles } => {
                let mut m = ndarray::Array2::<Complex64>::zeros((grid.n_e(), grid.n_e()));
                for (w, profile) in weights.iter().zip(profiles) {
                    let psi = PureState::new(grid, profile.sample(&grid))?;
                    m = m + embed_pure(&psi).values().mapv(|z| z * *w);
                }
                let m = LambdaKernel::from_values(grid, m)?;
                let state = lambda_to_nue(&embed_density(&m)?).normalized()?;
                Self { grid, state, density: Some(m), pure: None, xi: None }
            }
        };
        Ok(scenario)
    }
}
