use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{quantity} = {value} outside the validity range [{min}, {max}] of material {material}")]
    OutOfValidityRange {
        material: String,
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("guided mode is cut off at {wavelength_um} um (effective index squared {index_squared})")]
    ModeCutoff {
        wavelength_um: f64,
        index_squared: f64,
    },

    #[error("bare mismatch at the central frequencies is {mismatch:e} rad/um; no poling needed")]
    DegeneratePoling { mismatch: f64 },

    #[error("no sign change of gamma_s + gamma_i on [{lo_um}, {hi_um}] um")]
    NoSignChange { lo_um: f64, hi_um: f64 },

    #[error("frequency grid has {n_points} points per axis, at least {min} required")]
    GridTooCoarse { n_points: usize, min: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("mode profile has {regions} regions above half maximum")]
    NotUnimodal { regions: usize },

    #[error("mode profile has zero norm")]
    ZeroNorm,

    #[error("axis [{lo}, {hi}] does not cover the required support [{need_lo}, {need_hi}]")]
    AxisTooNarrow {
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },

    #[error("objective has no interior minimum on [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error("material file: {0}")]
    MaterialFormat(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by physics or numerics (as opposed to malformed
    /// input files or configuration).
    pub fn is_physics(&self) -> bool {
        matches!(
            self,
            Error::OutOfValidityRange { .. }
                | Error::ModeCutoff { .. }
                | Error::DegeneratePoling { .. }
                | Error::NoSignChange { .. }
                | Error::GridTooCoarse { .. }
                | Error::NumericalFailure(_)
                | Error::NotUnimodal { .. }
                | Error::ZeroNorm
                | Error::AxisTooNarrow { .. }
                | Error::NoInteriorMinimum { .. }
        )
    }

    /// Short machine-readable tag, used in sweep rows.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::OutOfValidityRange { .. } => "out_of_validity_range",
            Error::ModeCutoff { .. } => "mode_cutoff",
            Error::DegeneratePoling { .. } => "degenerate_poling",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::NumericalFailure(_) => "numerical_failure",
            Error::NotUnimodal { .. } => "not_unimodal",
            Error::ZeroNorm => "zero_norm",
            Error::AxisTooNarrow { .. } => "axis_too_narrow",
            Error::NoInteriorMinimum { .. } => "no_interior_minimum",
            Error::MaterialFormat(_) => "material_format",
            Error::Config(_) => "config",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
