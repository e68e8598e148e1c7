//! Simulation of degenerate parametric down-conversion in periodically poled
//! nonlinear waveguides: dispersion engineering for symmetric group-velocity
//! matching (SGVM), joint spectral amplitudes, Schmidt/temporal modes,
//! squeezing spectra and parameter sweeps.

pub mod decomposition;
pub mod dispersion;
pub mod error;
pub mod figures;
pub mod jsa;
pub mod material;
pub mod modes;
pub mod numeric;
pub mod phasematching;
pub mod sweep;

pub use error::{Error, Result};

/// Speed of light in vacuum, um/s.
pub const SPEED_OF_LIGHT_UM_PER_S: f64 = 2.997_924_58e14;
