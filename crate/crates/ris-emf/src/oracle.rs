//! Brute-force phasor-summation reference used to validate the field engine.
//!
//! This module deliberately shares no evaluation code with `efield`: element
//! distances, angles, gains and phases are all recomputed here from raw
//! coordinates, and the complex accumulation is error-compensated so the
//! reference is strictly more trustworthy than the engine it checks.

use crate::efield::{Mode, Scenario};
use crate::error::{Error, Result};
use crate::geometry::{Point3, COINCIDENT_EPS};

/// Complex field amplitude accumulated element by element (V/m).
#[derive(Debug, Clone, Copy)]
pub struct PhasorSum {
    pub real_part: f64,
    pub imag_part: f64,
    pub magnitude: f64,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.compensation
    }
}

/// Naive element-by-element complex sum of the scenario's field at `p`.
///
/// Same preconditions as the engine: the point must lie in front of the
/// array and clear of every element.
pub fn oracle_efield(scenario: &Scenario, p: &Point3) -> Result<PhasorSum> {
    if p.y <= 0.0 {
        return Err(Error::BehindPlane { y: p.y });
    }
    let wavelength = scenario.link().wavelength();
    let wave_number = 2.0 * std::f64::consts::PI / wavelength;
    let exponent = scenario.pattern().exponent();
    let include_azimuth = scenario.pattern().include_azimuth();
    let scale = (60.0 * scenario.link().p_ris()).sqrt();
    let target = match scenario.mode() {
        Mode::Ro => None,
        Mode::Bo { target } => Some(target),
    };

    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for e in scenario.array().elements() {
        let dx = e.x - p.x;
        let dy = e.y - p.y;
        let dh = e.h - p.h;
        let horizontal = (dx * dx + dy * dy).sqrt();
        let r = (dx * dx + dy * dy + dh * dh).sqrt();
        if r <= COINCIDENT_EPS {
            return Err(Error::CoincidentPoint { min_distance: r });
        }

        let amplitude = if exponent == 0.0 {
            1.0 / r
        } else {
            let cos_theta = horizontal / r;
            let mut g = cos_theta.powf(exponent);
            if include_azimuth {
                // horizontal >= p.y > 0 in the forward half-space
                let cos_psi = (p.y - e.y) / horizontal;
                g *= cos_psi.powf(exponent);
            }
            g.sqrt() / r
        };

        let phase_offset = match target {
            None => wave_number * r,
            Some(t) => {
                let tx = e.x - t.x;
                let ty = e.y - t.y;
                let th = e.h - t.h;
                let r_target = (tx * tx + ty * ty + th * th).sqrt();
                wave_number * (r - r_target)
            }
        };
        re.add(amplitude * (-phase_offset).cos());
        im.add(amplitude * (-phase_offset).sin());
    }

    let real_part = scale * re.total();
    let imag_part = scale * im.total();
    Ok(PhasorSum {
        real_part,
        imag_part,
        magnitude: real_part.hypot(imag_part),
    })
}
