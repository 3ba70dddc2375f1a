//! Elastic diffraction of weakly bound two-atom clusters (helium dimers) by
//! nanostructure transmission gratings.
//!
//! The single-bar amplitude of the cluster is evaluated from the marginal
//! density of its bound state and combined with the N-bar grating function.
//! Lengths are in nm and lateral wavenumbers `K2 = P2 / hbar` in nm^-1.

pub mod amplitude;
pub mod cli;
pub mod density;
pub mod error;
pub mod model;
pub mod pattern;
pub mod quadrature;

pub use amplitude::{
    edge_term, effective_bar_width, fit_effective_width, mol_bar_amplitude, point_bar_amplitude,
    SingleBarResult,
};
pub use cli::{run_scenario, write_csv, write_svg, ScenarioConfig, ScenarioReport};
pub use density::{fourier_density, marginal_density, mean_abs_x2, MarginalDensity};
pub use error::{Error, Result};
pub use model::{
    angle_to_k2, kappa_from_binding_energy, BeamParams, ClusterModel, GratingGeometry,
    ReducedAmplitude, TabulatedDensity,
};
pub use pattern::{
    coherent_intensity, coherent_phase_sum, convolve_beam_spread, find_peaks, grating_function,
    DiffractionPattern, PeakRecord,
};
pub use quadrature::{integrate_adaptive, integrate_fixed, QuadError, QuadratureSpec};
