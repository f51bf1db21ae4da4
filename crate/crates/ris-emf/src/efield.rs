//! Core E-field engine: per-point field strength in both operating modes,
//! 2D field maps and boresight scans.
//!
//! Each element contributes a spherical wave `sqrt(G_n) e^{-j dphi_n} / r_n`;
//! the field is `sqrt(60 P_RIS) |sum_n ...|` in V/m. In reflective-only (RO)
//! mode the phase offset is the raw propagation phase `k r_n`; in beamforming
//! (BO) mode the applied element phases cancel the propagation phase toward a
//! target point, leaving `k (r_n - r_n_target)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::geometry::{Point3, RisArray};
use crate::propagation::LinkBudget;

/// Cosine-power element gain pattern, `G(theta) = cos(theta)^q`, optionally
/// applied in azimuth as well. Exponent 0 models an isotropic element over
/// the front half-space.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GainPattern {
    #[serde(rename = "exponent")]
    exponent: f64,
    #[serde(rename = "include_azimuth")]
    include_azimuth: bool,
}

impl Default for GainPattern {
    fn default() -> Self {
        Self {
            exponent: 3.0,
            include_azimuth: false,
        }
    }
}

impl GainPattern {
    pub fn new(exponent: f64, include_azimuth: bool) -> Result<Self> {
        if !exponent.is_finite() || exponent < 0.0 {
            return Err(Error::NonPositive {
                name: "pattern exponent",
                value: exponent,
            });
        }
        Ok(Self {
            exponent,
            include_azimuth,
        })
    }

    /// Unit gain over the front half-space (ray-tracing comparison setting).
    pub fn isotropic() -> Self {
        Self {
            exponent: 0.0,
            include_azimuth: false,
        }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn include_azimuth(&self) -> bool {
        self.include_azimuth
    }

    /// Power gain toward (theta, psi), clamped to 0 outside the front
    /// half-space.
    pub fn gain(&self, theta: f64, psi: f64) -> f64 {
        if self.exponent == 0.0 {
            return if theta.abs() <= std::f64::consts::FRAC_PI_2
                && psi.abs() <= std::f64::consts::FRAC_PI_2
            {
                1.0
            } else {
                0.0
            };
        }
        let clamped = |angle: f64| -> f64 {
            let c = angle.cos();
            if c <= 0.0 {
                0.0
            } else {
                c.powf(self.exponent)
            }
        };
        let mut g = clamped(theta);
        if self.include_azimuth {
            g *= clamped(psi);
        }
        g
    }

    /// Half-power beamwidth of the pattern in degrees,
    /// `2 arccos(2^(-1/q))`; 180 for the isotropic setting.
    pub fn hpbw_degrees(&self) -> f64 {
        pattern_hpbw(self.exponent)
    }
}

/// Half-power beamwidth in degrees of a `cos^q` power pattern.
pub fn pattern_hpbw(exponent: f64) -> f64 {
    if exponent == 0.0 {
        return 180.0;
    }
    2.0 * (2f64.powf(-1.0 / exponent)).acos().to_degrees()
}

/// Operating mode of the surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    /// Reflective-only: no applied phase shifts.
    Ro,
    /// Beamforming: element phases compensate propagation toward `target`.
    Bo { target: Point3 },
}

/// Full deployment description: link budget, array, element pattern, mode and
/// evaluation height.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    link: LinkBudget,
    array: RisArray,
    pattern: GainPattern,
    #[serde(flatten)]
    mode: Mode,
    #[serde(rename = "user_height_m")]
    user_height: f64,
}

impl Scenario {
    pub fn new(
        link: LinkBudget,
        array: RisArray,
        pattern: GainPattern,
        mode: Mode,
        user_height: f64,
    ) -> Result<Self> {
        if !user_height.is_finite() || user_height < 0.0 {
            return Err(Error::NegativeUserHeight { value: user_height });
        }
        if let Mode::Bo { target } = mode {
            if target.y <= 0.0 {
                return Err(Error::TargetBehindPlane { y: target.y });
            }
        }
        Ok(Self {
            link,
            array,
            pattern,
            mode,
            user_height,
        })
    }

    pub fn link(&self) -> &LinkBudget {
        &self.link
    }

    pub fn array(&self) -> &RisArray {
        &self.array
    }

    pub fn pattern(&self) -> &GainPattern {
        &self.pattern
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn user_height(&self) -> f64 {
        self.user_height
    }

    /// Same scenario with the BS moved to a different distance.
    pub fn at_distance(&self, d_br: f64) -> Result<Self> {
        Ok(Self {
            link: self.link.at_distance(d_br)?,
            ..self.clone()
        })
    }

    /// Same scenario with the array remounted at a different height.
    pub fn at_ris_height(&self, h_ris: f64) -> Result<Self> {
        Ok(Self {
            array: self.array.at_height(h_ris)?,
            ..self.clone()
        })
    }

    /// Non-fatal oddities worth surfacing to the operator.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.link.path_gain_exceeds_unity() {
            w.push(format!(
                "BS-RIS distance {} m is below lambda/4pi; nominal path loss exceeds unity",
                self.link.d_br()
            ));
        }
        w
    }
}

/// Reusable per-scenario evaluation state: element list, wave number, field
/// scale and (for beamforming) the fixed element-to-target distances.
struct Evaluator<'a> {
    elements: &'a [Point3],
    pattern: GainPattern,
    wave_number: f64,
    /// `sqrt(60 P_RIS)`.
    scale: f64,
    target_distances: Option<Vec<f64>>,
}

impl<'a> Evaluator<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self> {
        let target_distances = match scenario.mode() {
            Mode::Ro => None,
            Mode::Bo { target } => Some(scenario.array().geometry_to(&target)?.distances),
        };
        Ok(Self {
            elements: scenario.array().elements(),
            pattern: *scenario.pattern(),
            wave_number: 2.0 * std::f64::consts::PI / scenario.link().wavelength(),
            scale: (60.0 * scenario.link().p_ris()).sqrt(),
            target_distances,
        })
    }

    /// Sequential fixed-order phasor sum; bit-identical across calls.
    fn field_at(&self, p: &Point3) -> Result<f64> {
        if p.y <= 0.0 {
            return Err(Error::BehindPlane { y: p.y });
        }
        let mut re = 0.0;
        let mut im = 0.0;
        let mut min_distance = f64::INFINITY;
        for (idx, e) in self.elements.iter().enumerate() {
            let dx = p.x - e.x;
            let dy = p.y - e.y;
            let dh = e.h - p.h;
            let horizontal = (dx * dx + dy * dy).sqrt();
            let r = (horizontal * horizontal + dh * dh).sqrt();
            min_distance = min_distance.min(r);

            let theta = dh.atan2(horizontal);
            let psi = (e.x - p.x).atan2(p.y - e.y);
            let amplitude = self.pattern.gain(theta, psi).sqrt() / r;
            let dphi = match &self.target_distances {
                None => self.wave_number * r,
                Some(rd) => self.wave_number * (r - rd[idx]),
            };
            re += amplitude * dphi.cos();
            im -= amplitude * dphi.sin();
        }
        if min_distance <= crate::geometry::COINCIDENT_EPS {
            return Err(Error::CoincidentPoint { min_distance });
        }
        Ok(self.scale * (re * re + im * im).sqrt())
    }
}

/// E-field magnitude (V/m) at one evaluation point.
///
/// The per-element sum runs sequentially in element order so repeated calls
/// are bit-identical.
pub fn efield_at(scenario: &Scenario, p: &Point3) -> Result<f64> {
    Evaluator::new(scenario)?.field_at(p)
}

/// Field at the beamforming target via the closed-form route: the phase terms
/// vanish there, so `E = sqrt(60 P_max) (lambda / 4 pi d_BR) sum_n w_n / r_n`
/// with the gain factor evaluated algebraically as `(1 + t^2)^(-q/4)` from
/// coordinate ratios, never through trigonometric calls.
///
/// Errors with [`Error::NotBeamforming`] when called on an RO scenario.
pub fn bo_closed_form(scenario: &Scenario) -> Result<f64> {
    let target = match scenario.mode() {
        Mode::Bo { target } => target,
        Mode::Ro => return Err(Error::NotBeamforming),
    };
    let link = scenario.link();
    let exponent = scenario.pattern().exponent();
    let include_azimuth = scenario.pattern().include_azimuth();

    let mut sum = 0.0;
    for e in scenario.array().elements() {
        let dx = target.x - e.x;
        let dy = target.y - e.y;
        let dh = e.h - target.h;
        let horizontal_sq = dx * dx + dy * dy;
        let r = (horizontal_sq + dh * dh).sqrt();
        // tan(theta) = dh / sqrt(dx^2 + dy^2); cos^(q/2) = (1 + tan^2)^(-q/4)
        let t_el = dh * dh / horizontal_sq;
        let mut w = (1.0 + t_el).powf(-exponent / 4.0);
        if include_azimuth {
            let t_az = (dx * dx) / (dy * dy);
            w *= (1.0 + t_az).powf(-exponent / 4.0);
        }
        sum += w / r;
    }
    let prefactor = (60.0 * link.p_max()).sqrt() * link.wavelength()
        / (4.0 * std::f64::consts::PI * link.d_br());
    Ok(prefactor * sum)
}

/// Sampled E-field magnitudes over a square horizontal grid at the scenario's
/// user height.
///
/// The array projects onto the grid edge y = 0; rows start one resolution
/// step off that wall. Row-major storage, y index outer.
#[derive(Debug, Clone, Serialize)]
pub struct FieldMap {
    #[serde(rename = "area_side_m")]
    pub area_side: f64,
    #[serde(rename = "resolution_m")]
    pub resolution: f64,
    /// First sample location (minimum x, minimum y, evaluation height).
    pub origin: Point3,
    /// Samples per row (x direction).
    pub nx: usize,
    /// Number of rows (y direction).
    pub ny: usize,
    /// E-field magnitudes in V/m, row-major.
    #[serde(rename = "samples_vpm")]
    pub samples: Vec<f64>,
    pub scenario: Scenario,
}

impl FieldMap {
    pub fn x_at(&self, col: usize) -> f64 {
        self.origin.x + col as f64 * self.resolution
    }

    pub fn y_at(&self, row: usize) -> f64 {
        self.origin.y + row as f64 * self.resolution
    }

    pub fn sample(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.nx + col]
    }

    /// Largest sample and its location.
    pub fn max_sample(&self) -> (Point3, f64) {
        let mut best = (0usize, 0usize, f64::NEG_INFINITY);
        for row in 0..self.ny {
            for col in 0..self.nx {
                let v = self.sample(row, col);
                if v > best.2 {
                    best = (row, col, v);
                }
            }
        }
        (
            Point3 {
                x: self.x_at(best.1),
                y: self.y_at(best.0),
                h: self.origin.h,
            },
            best.2,
        )
    }
}

/// Evaluate the field over an `area_side` x `area_side` grid with the given
/// cell size, covering x in [-D/2, D/2] and y from one cell off the wall.
///
/// Rows are evaluated in parallel; the output is identical to sequential
/// evaluation because each point's element sum is an independent sequential
/// reduction.
pub fn field_map(scenario: &Scenario, area_side: f64, resolution: f64) -> Result<FieldMap> {
    require_positive("area_side", area_side)?;
    if !(resolution > 0.0 && resolution <= area_side) {
        return Err(Error::InvalidResolution {
            resolution,
            area_side,
        });
    }
    let n = (area_side / resolution).floor() as usize + 1;
    let h_u = scenario.user_height();
    let x0 = -area_side / 2.0;
    let evaluator = Evaluator::new(scenario)?;

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|row| {
            let y = (row as f64 + 1.0) * resolution;
            (0..n)
                .map(|col| {
                    let p = Point3 {
                        x: x0 + col as f64 * resolution,
                        y,
                        h: h_u,
                    };
                    evaluator.field_at(&p)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let samples: Vec<f64> = rows.into_iter().flatten().collect();

    Ok(FieldMap {
        area_side,
        resolution,
        origin: Point3 {
            x: x0,
            y: resolution,
            h: h_u,
        },
        nx: n,
        ny: n,
        samples,
        scenario: scenario.clone(),
    })
}

/// Log-spaced field samples along the boresight ray (x = 0, h = array center
/// height), returned as `(y, e_vpm)` pairs in increasing y.
pub fn boresight_scan(
    scenario: &Scenario,
    y_min: f64,
    y_max: f64,
    samples_per_decade: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(y_min > 0.0 && y_min < y_max) {
        return Err(Error::InvalidScanBounds { y_min, y_max });
    }
    if samples_per_decade == 0 {
        return Err(Error::EmptyScan);
    }
    let decades = (y_max / y_min).log10();
    let count = (decades * samples_per_decade as f64).ceil() as usize + 1;
    let h = scenario.array().center().h;
    let evaluator = Evaluator::new(scenario)?;

    let ys: Vec<f64> = (0..count)
        .map(|i| y_min * 10f64.powf(i as f64 / samples_per_decade as f64))
        .filter(|&y| y <= y_max * (1.0 + 1e-12))
        .collect();

    ys.par_iter()
        .map(|&y| {
            let p = Point3 { x: 0.0, y, h };
            evaluator.field_at(&p).map(|e| (y, e))
        })
        .collect()
}
