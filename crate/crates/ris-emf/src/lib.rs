//! Deterministic E-field simulator and EMF compliance toolkit for
//! RIS-assisted wireless deployments.
//!
//! A reconfigurable intelligent surface (RIS) re-radiates power received from
//! a base station. This crate computes the resulting electric field in
//! reflective-only and beamforming modes, maps it over evaluation areas,
//! locates near-field peaks, and solves deployment constraints (minimum
//! BS-RIS distance, minimum mounting height) against regulatory
//! general-public exposure limits.
//!
//! # Example
//!
//! ```
//! use ris_emf::{
//!     efield_at, GainPattern, LinkBudget, Mode, Point3, RisArray, Scenario,
//! };
//!
//! let link = LinkBudget::new(3.5e9, 50.0, 20.0).unwrap();
//! let array = RisArray::new(8, link.wavelength() / 2.0, 3.0).unwrap();
//! let scenario =
//!     Scenario::new(link, array, GainPattern::default(), Mode::Ro, 1.5).unwrap();
//! let e = efield_at(&scenario, &Point3::new(0.0, 2.0, 1.5).unwrap()).unwrap();
//! assert!(e > 0.0);
//! ```

pub mod compliance;
pub mod efield;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod propagation;

pub use compliance::{
    adb_height, boresight_peaks, builtin_profiles, limit_lookup, min_dbr, min_height, peak_efield,
    profile, Authority, Band, Interpolation, Peak, PeakReport, RegulatoryProfile, ScanKind,
    SolvedParameter, SolverResult,
};
pub use efield::{
    bo_closed_form, boresight_scan, efield_at, field_map, pattern_hpbw, FieldMap, GainPattern,
    Mode, Scenario,
};
pub use error::{Error, Result};
pub use geometry::{GeometryToPoint, Point3, RisArray};
pub use propagation::{
    dbm_to_watts, dbvpm_to_vpm, field_regions, fspl, ris_received_power, vpm_to_dbvpm,
    watts_to_dbm, EirpPreset, FieldRegions, LinkBudget, SPEED_OF_LIGHT,
};
