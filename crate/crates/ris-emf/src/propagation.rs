//! BS-to-RIS link budget and aperture field-region boundaries.
//!
//! Power is carried in watts everywhere; dBm conversions happen only at
//! interface boundaries.

use serde::Serialize;

use crate::error::{require_positive, Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space path loss as a linear power ratio, `(lambda / 4 pi d)^2`.
///
/// Values above 1 are possible for `d < lambda / 4 pi` and are left to the
/// caller to flag.
pub fn fspl(wavelength: f64, distance: f64) -> Result<f64> {
    require_positive("wavelength", wavelength)?;
    require_positive("distance", distance)?;
    let ratio = wavelength / (4.0 * std::f64::consts::PI * distance);
    Ok(ratio * ratio)
}

/// Power delivered to the RIS by a base station radiating `p_max` watts EIRP
/// over a free-space path of `d_br` meters.
pub fn ris_received_power(p_max: f64, wavelength: f64, d_br: f64) -> Result<f64> {
    if !p_max.is_finite() || p_max < 0.0 {
        return Err(Error::NonPositive {
            name: "p_max",
            value: p_max,
        });
    }
    Ok(p_max * fspl(wavelength, d_br)?)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1000.0).log10()
}

/// Field strength in dB relative to 1 V/m.
pub fn vpm_to_dbvpm(e_vpm: f64) -> f64 {
    20.0 * e_vpm.log10()
}

pub fn dbvpm_to_vpm(e_dbvpm: f64) -> f64 {
    10f64.powf(e_dbvpm / 20.0)
}

/// Regulatory EIRP presets for the feeding base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EirpPreset {
    /// FCC limit for 100 MHz channels: 75 dBm.
    Fcc,
    /// 5G NR FR1 base station limit: 47 dBm.
    Fr1,
    /// 5G NR FR2 base station limit: 59 dBm.
    Fr2,
}

impl EirpPreset {
    pub fn dbm(self) -> f64 {
        match self {
            EirpPreset::Fcc => 75.0,
            EirpPreset::Fr1 => 47.0,
            EirpPreset::Fr2 => 59.0,
        }
    }

    /// Preset converted to watts.
    pub fn watts(self) -> f64 {
        dbm_to_watts(self.dbm())
    }
}

impl std::str::FromStr for EirpPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fcc" | "fcc_75dbm" => Ok(EirpPreset::Fcc),
            "fr1" | "fr1_47dbm" => Ok(EirpPreset::Fr1),
            "fr2" | "fr2_59dbm" => Ok(EirpPreset::Fr2),
            other => Err(Error::UnknownPreset {
                name: other.to_string(),
            }),
        }
    }
}

/// Carrier, BS-RIS separation and the resulting power at the RIS.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinkBudget {
    #[serde(rename = "frequency_hz")]
    frequency: f64,
    #[serde(rename = "wavelength_m")]
    wavelength: f64,
    #[serde(rename = "d_br_m")]
    d_br: f64,
    #[serde(rename = "p_max_w")]
    p_max: f64,
    #[serde(rename = "p_ris_w")]
    p_ris: f64,
}

impl LinkBudget {
    /// Link budget from carrier frequency (Hz), BS EIRP (W) and BS-RIS
    /// distance (m).
    pub fn new(frequency: f64, p_max: f64, d_br: f64) -> Result<Self> {
        require_positive("frequency", frequency)?;
        let wavelength = SPEED_OF_LIGHT / frequency;
        let p_ris = ris_received_power(p_max, wavelength, d_br)?;
        Ok(Self {
            frequency,
            wavelength,
            d_br,
            p_max,
            p_ris,
        })
    }

    /// Link budget that delivers exactly `p_ris` watts to the RIS, realised
    /// by placing the BS at the unity-path-loss distance `lambda / 4 pi`.
    pub fn with_ris_power(frequency: f64, p_ris: f64) -> Result<Self> {
        require_positive("frequency", frequency)?;
        let wavelength = SPEED_OF_LIGHT / frequency;
        let d_br = wavelength / (4.0 * std::f64::consts::PI);
        Self::new(frequency, p_ris, d_br)
    }

    /// Same link at a different BS-RIS distance.
    pub fn at_distance(&self, d_br: f64) -> Result<Self> {
        Self::new(self.frequency, self.p_max, d_br)
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn d_br(&self) -> f64 {
        self.d_br
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    /// Power available at the RIS (W).
    pub fn p_ris(&self) -> f64 {
        self.p_ris
    }

    /// True when the BS sits closer than the unity-path-loss distance, so the
    /// nominal path "loss" exceeds one.
    pub fn path_gain_exceeds_unity(&self) -> bool {
        self.d_br < self.wavelength / (4.0 * std::f64::consts::PI)
    }
}

/// Reactive/Fresnel and Fresnel/far-field boundary distances of the array
/// aperture.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FieldRegions {
    /// Largest aperture dimension (the diagonal for a half-wavelength grid).
    #[serde(rename = "aperture_m")]
    pub aperture: f64,
    /// Reactive-to-Fresnel boundary.
    #[serde(rename = "near_bound_m")]
    pub near_bound: f64,
    /// Fresnel-to-far-field boundary.
    #[serde(rename = "far_bound_m")]
    pub far_bound: f64,
}

/// Field-region boundaries for an `n_per_side` square grid at half-wavelength
/// pitch: aperture `N lambda / sqrt 2`, bounds `0.62 sqrt(D^3 / lambda)` and
/// `2 D^2 / lambda`.
pub fn field_regions(n_per_side: usize, wavelength: f64) -> Result<FieldRegions> {
    if n_per_side == 0 {
        return Err(Error::EmptyArray);
    }
    require_positive("wavelength", wavelength)?;
    let aperture = n_per_side as f64 * wavelength / std::f64::consts::SQRT_2;
    Ok(FieldRegions {
        aperture,
        near_bound: 0.62 * (aperture.powi(3) / wavelength).sqrt(),
        far_bound: 2.0 * aperture * aperture / wavelength,
    })
}
