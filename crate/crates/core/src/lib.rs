//! Time operators and decay semigroups in the Liouville space of a quantum
//! system whose Hamiltonian has a simple absolutely continuous spectrum on
//! `[0, inf)`.
//!
//! Hilbert–Schmidt operators are represented by their kernels
//! `rho(lambda, lambda')` ([`LambdaKernel`]) or, after the change of
//! variables `nu = lambda - lambda'`, `E = max(lambda, lambda')`, by
//! `rho(nu, E)` ([`HSState`]), where the Liouville operator is
//! multiplication by `nu`. The time operator is diagonal in the Fourier
//! conjugate variable `tau` ([`TauState`]); its spectral projection `P_0`
//! selects the unstable subspace, on which `W_t = P_0 U_t P_0` is a
//! contraction semigroup with resonance eigenstates `psi(E) / (nu - xi)`.
//!
//! ```
//! use num_complex::Complex64;
//! use timeop_core::{resonance_state, survival, ResonanceSpec, SpectralGrid};
//!
//! let grid = SpectralGrid::with_energy_samples(200.0, 1 << 14, 4).unwrap();
//! let xi = Complex64::new(0.0, -0.5);
//! let spec = ResonanceSpec::new(&grid, xi, vec![Complex64::new(1.0, 0.0); 4]).unwrap();
//! let rho = resonance_state(&spec, &grid).unwrap();
//! let t = grid.snap_time(1.0);
//! let p = survival(&rho, &[t]).unwrap();
//! assert!((p.values()[0] - (-t).exp()).abs() < 1e-12);
//! ```

pub mod error;
pub mod grid;
pub mod liouville;
pub mod profile;
pub mod semigroup;
pub mod time_op;

pub use error::{Error, Result};
pub use grid::{lambda_to_nue, nue_to_lambda, BoundaryMass, HSState, LambdaKernel, SpectralGrid};
pub use liouville::{
    apply_l, density_expectation, embed_density, embed_pure, evolve, hilbert_survival, inner, kernel_expectation,
    PureState, TimeSeries,
};
pub use profile::Profile;
pub use semigroup::{
    decay_curve, decay_window, lattice_pole, pole_state, pointwise_pole_state, resonance_state, survival, w_apply,
    ResonanceSpec,
};
pub use time_op::{
    apply_t, commutator_lt, energy_spread, from_tau, hardy_decompose, project_p, project_pprime, projected_norm_sqr,
    time_moments, time_stats, to_tau, TauCut, TauState, TimeMoments, TimeStats, UNCERTAINTY_BOUND,
};
