//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by scenario validation, field evaluation, and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter that must be strictly positive was zero or negative.
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    /// Array construction with zero elements per side.
    #[error("n_per_side must be at least 1")]
    EmptyArray,

    /// A coordinate was NaN or infinite.
    #[error("non-finite coordinate ({x}, {y}, {h})")]
    NonFinitePoint { x: f64, y: f64, h: f64 },

    /// Evaluation point sits on (or numerically inside) the array surface.
    #[error("evaluation point coincides with a RIS element (min distance {min_distance} m)")]
    CoincidentPoint { min_distance: f64 },

    /// Evaluation point behind the RIS plane; the model covers y > 0 only.
    #[error("evaluation point must lie in front of the RIS plane (y > 0), got y = {y}")]
    BehindPlane { y: f64 },

    /// Beamforming target behind the RIS plane.
    #[error("beamforming target must lie in front of the RIS plane (y > 0), got y = {y}")]
    TargetBehindPlane { y: f64 },

    /// Negative user height.
    #[error("user_height must be non-negative, got {value}")]
    NegativeUserHeight { value: f64 },

    /// A beamforming-only operation was invoked on a reflective-only scenario.
    #[error("operation requires a beamforming scenario with a target")]
    NotBeamforming,

    /// A reflective-only operation was invoked on a beamforming scenario.
    #[error("operation requires a reflective-only scenario")]
    NotReflectiveOnly,

    /// Map resolution incompatible with the requested area.
    #[error("resolution must be positive and at most area_side ({resolution} vs {area_side})")]
    InvalidResolution { resolution: f64, area_side: f64 },

    /// Scan bounds must satisfy 0 < y_min < y_max.
    #[error("invalid scan bounds: require 0 < y_min < y_max, got [{y_min}, {y_max}]")]
    InvalidScanBounds { y_min: f64, y_max: f64 },

    /// Zero samples per decade requested for a logarithmic scan.
    #[error("samples_per_decade must be at least 1")]
    EmptyScan,

    /// Height search range empty or starting below the user height.
    #[error("invalid height range [{low}, {high}] (must be non-empty and low >= user height {user_height})")]
    InvalidHeightRange {
        low: f64,
        high: f64,
        user_height: f64,
    },

    /// The queried frequency falls outside every band of the profile.
    #[error("no E-field limit defined for {authority} at {frequency_hz} Hz")]
    NoLimitDefined {
        authority: String,
        frequency_hz: f64,
    },

    /// Authority name not present in the bundled regulatory table.
    #[error("unknown regulatory authority '{name}'")]
    UnknownAuthority { name: String },

    /// EIRP preset name not recognised.
    #[error("unknown EIRP preset '{name}' (expected fcc, fr1 or fr2)")]
    UnknownPreset { name: String },

    /// The bundled regulatory data file failed validation.
    #[error("regulatory data: {reason}")]
    LimitsData { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}
