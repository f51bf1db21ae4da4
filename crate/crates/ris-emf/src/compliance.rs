//! Regulatory limit database, peak-field reports, and placement solvers
//! (minimum BS-RIS distance, minimum mounting height).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::efield::{boresight_scan, field_map, Mode, Scenario};
use crate::error::{require_positive, Error, Result};
use crate::geometry::Point3;

/// Fallback evaluation height of the ITU assessment domain boundary (m).
const ADB_FLOOR_M: f64 = 3.5;

/// Bisection tolerance of the height solver (m).
pub const HEIGHT_TOLERANCE_M: f64 = 0.01;

/// Default samples per decade for boresight peak scans.
pub const BORESIGHT_SAMPLES_PER_DECADE: usize = 200;

/// Lower bound of boresight peak scans (m).
pub const BORESIGHT_SCAN_START_M: f64 = 1e-3;

// ---------------------------------------------------------------------------
// Regulatory limits
// ---------------------------------------------------------------------------

/// Issuing authority of an exposure limit profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Authority {
    Itu,
    Who,
    Icnirp,
    Usa,
    Flanders,
    China,
}

impl Authority {
    pub const ALL: [Authority; 6] = [
        Authority::Itu,
        Authority::Who,
        Authority::Icnirp,
        Authority::Usa,
        Authority::Flanders,
        Authority::China,
    ];
}

impl fmt::Display for Authority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Authority::Itu => "itu",
            Authority::Who => "who",
            Authority::Icnirp => "icnirp",
            Authority::Usa => "usa",
            Authority::Flanders => "flanders",
            Authority::China => "china",
        };
        f.write_str(name)
    }
}

impl FromStr for Authority {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "itu" => Ok(Authority::Itu),
            "who" => Ok(Authority::Who),
            "icnirp" => Ok(Authority::Icnirp),
            "usa" | "fcc" => Ok(Authority::Usa),
            "flanders" => Ok(Authority::Flanders),
            "china" => Ok(Authority::China),
            other => Err(Error::UnknownAuthority {
                name: other.to_string(),
            }),
        }
    }
}

/// How a band's limit varies with frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Flat limit across the band.
    Constant,
    /// `limit_low * sqrt(f / f_low)`, anchored at the band's lower edge.
    SqrtF,
    /// Linear in frequency between the band endpoints.
    LinearF,
}

/// One frequency band of a regulatory profile.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Band {
    pub f_low_hz: f64,
    pub f_high_hz: f64,
    pub limit_low_vpm: f64,
    pub limit_high_vpm: f64,
    pub interpolation: Interpolation,
}

impl Band {
    fn contains(&self, frequency: f64) -> bool {
        frequency >= self.f_low_hz && frequency <= self.f_high_hz
    }

    /// Limit at a frequency, evaluated as if it fell in this band.
    pub fn limit_at(&self, frequency: f64) -> f64 {
        match self.interpolation {
            Interpolation::Constant => self.limit_low_vpm,
            Interpolation::SqrtF => self.limit_low_vpm * (frequency / self.f_low_hz).sqrt(),
            Interpolation::LinearF => {
                let span = self.f_high_hz - self.f_low_hz;
                self.limit_low_vpm
                    + (self.limit_high_vpm - self.limit_low_vpm) * (frequency - self.f_low_hz)
                        / span
            }
        }
    }
}

/// Frequency-banded E-field limit function for one authority.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegulatoryProfile {
    pub authority: Authority,
    pub bands: Vec<Band>,
}

impl RegulatoryProfile {
    /// General-public limit (V/m) at the given frequency; bands are matched
    /// in ascending order and a shared edge resolves to the lower band.
    ///
    /// Out-of-band frequencies are an explicit error, never a default.
    pub fn limit_at(&self, frequency: f64) -> Result<f64> {
        require_positive("frequency", frequency)?;
        self.bands
            .iter()
            .find(|b| b.contains(frequency))
            .map(|b| b.limit_at(frequency))
            .ok_or_else(|| Error::NoLimitDefined {
                authority: self.authority.to_string(),
                frequency_hz: frequency,
            })
    }

    fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::LimitsData { reason });
        if self.bands.is_empty() {
            return fail(format!("{}: no bands", self.authority));
        }
        for (i, b) in self.bands.iter().enumerate() {
            if !(b.f_low_hz > 0.0 && b.f_low_hz < b.f_high_hz) {
                return fail(format!(
                    "{}: band {i} has invalid frequency range",
                    self.authority
                ));
            }
            if !(b.limit_low_vpm > 0.0 && b.limit_high_vpm > 0.0) {
                return fail(format!(
                    "{}: band {i} has non-positive limits",
                    self.authority
                ));
            }
            if b.interpolation == Interpolation::Constant && b.limit_low_vpm != b.limit_high_vpm {
                return fail(format!(
                    "{}: constant band {i} with unequal limits",
                    self.authority
                ));
            }
            if i > 0 && self.bands[i - 1].f_high_hz > b.f_low_hz {
                return fail(format!(
                    "{}: bands {} and {i} overlap",
                    self.authority,
                    i - 1
                ));
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct LimitsFile {
    #[allow(dead_code)]
    version: String,
    authorities: Vec<RegulatoryProfile>,
}

static BUILTIN: OnceLock<Vec<RegulatoryProfile>> = OnceLock::new();

/// Profiles from the regulatory table bundled with the crate.
pub fn builtin_profiles() -> &'static [RegulatoryProfile] {
    BUILTIN.get_or_init(|| {
        let file: LimitsFile = serde_json::from_str(include_str!("../data/limits.json"))
            .expect("bundled limits.json is well-formed");
        for p in &file.authorities {
            p.validate().expect("bundled limits.json passes validation");
        }
        file.authorities
    })
}

/// Bundled profile for one authority.
pub fn profile(authority: Authority) -> &'static RegulatoryProfile {
    builtin_profiles()
        .iter()
        .find(|p| p.authority == authority)
        .expect("every authority is present in the bundled table")
}

/// Convenience lookup against the bundled table.
pub fn limit_lookup(authority: Authority, frequency: f64) -> Result<f64> {
    profile(authority).limit_at(frequency)
}

// ---------------------------------------------------------------------------
// Peak reports
// ---------------------------------------------------------------------------

/// A located field maximum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Peak {
    pub location: Point3,
    #[serde(rename = "e_vpm")]
    pub e_vpm: f64,
}

/// What kind of scan produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    Grid,
    Boresight,
}

/// Local field maxima plus the global maximum of a scan.
#[derive(Debug, Clone, Serialize)]
pub struct PeakReport {
    /// Strict local maxima, sorted by distance from the array center.
    pub peaks: Vec<Peak>,
    /// Largest sample anywhere in the scan (ties: smallest y, then x).
    pub global_max: Peak,
    pub scan_kind: ScanKind,
}

/// Field map peak report: the global grid maximum plus every strict local
/// maximum of the 4-neighborhood.
pub fn peak_efield(scenario: &Scenario, area_side: f64, resolution: f64) -> Result<PeakReport> {
    let map = field_map(scenario, area_side, resolution)?;
    let center = scenario.array().center();

    let mut peaks = Vec::new();
    let mut global = Peak {
        location: map.origin,
        e_vpm: f64::NEG_INFINITY,
    };
    for row in 0..map.ny {
        for col in 0..map.nx {
            let v = map.sample(row, col);
            let location = Point3 {
                x: map.x_at(col),
                y: map.y_at(row),
                h: map.origin.h,
            };
            // Strict > keeps the first (smallest y, then smallest x) on ties.
            if v > global.e_vpm {
                global = Peak { location, e_vpm: v };
            }
            let higher_neighbor = (row > 0 && map.sample(row - 1, col) >= v)
                || (row + 1 < map.ny && map.sample(row + 1, col) >= v)
                || (col > 0 && map.sample(row, col - 1) >= v)
                || (col + 1 < map.nx && map.sample(row, col + 1) >= v);
            if !higher_neighbor {
                peaks.push(Peak { location, e_vpm: v });
            }
        }
    }
    sort_by_distance(&mut peaks, &center);
    Ok(PeakReport {
        peaks,
        global_max: global,
        scan_kind: ScanKind::Grid,
    })
}

/// Peaks of the reflective-only boresight scan out to `y_max`.
///
/// The scan is log-spaced from [`BORESIGHT_SCAN_START_M`] at
/// [`BORESIGHT_SAMPLES_PER_DECADE`]; maxima closer than one sample step are
/// merged into the higher one.
pub fn boresight_peaks(scenario: &Scenario, y_max: f64) -> Result<PeakReport> {
    if !matches!(scenario.mode(), Mode::Ro) {
        return Err(Error::NotReflectiveOnly);
    }
    let samples = boresight_scan(
        scenario,
        BORESIGHT_SCAN_START_M,
        y_max,
        BORESIGHT_SAMPLES_PER_DECADE,
    )?;
    let h = scenario.array().center().h;
    let as_peak = |&(y, e): &(f64, f64)| Peak {
        location: Point3 { x: 0.0, y, h },
        e_vpm: e,
    };

    let mut maxima: Vec<usize> = Vec::new();
    for i in 1..samples.len().saturating_sub(1) {
        if samples[i].1 > samples[i - 1].1 && samples[i].1 > samples[i + 1].1 {
            match maxima.last() {
                // Two maxima separated by a single valley sample are one peak.
                Some(&prev) if i - prev <= 2 => {
                    if samples[i].1 > samples[prev].1 {
                        *maxima.last_mut().unwrap() = i;
                    }
                }
                _ => maxima.push(i),
            }
        }
    }

    let peaks: Vec<Peak> = maxima.iter().map(|&i| as_peak(&samples[i])).collect();
    let global = samples
        .iter()
        .fold(None::<&(f64, f64)>, |best, s| match best {
            Some(b) if b.1 >= s.1 => Some(b),
            _ => Some(s),
        })
        .map(as_peak)
        .expect("scan is non-empty");

    Ok(PeakReport {
        peaks,
        global_max: global,
        scan_kind: ScanKind::Boresight,
    })
}

fn sort_by_distance(peaks: &mut [Peak], center: &Point3) {
    peaks.sort_by(|a, b| {
        let da = a.location.distance_to(center);
        let db = b.location.distance_to(center);
        da.partial_cmp(&db)
            .unwrap()
            .then(a.location.y.partial_cmp(&b.location.y).unwrap())
            .then(a.location.x.partial_cmp(&b.location.x).unwrap())
    });
}

// ---------------------------------------------------------------------------
// Placement solvers
// ---------------------------------------------------------------------------

/// Which deployment parameter a solver adjusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolvedParameter {
    DBr,
    HRis,
}

/// Outcome of a placement solve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolverResult {
    pub parameter: SolvedParameter,
    /// Solved parameter value in meters.
    #[serde(rename = "value_m")]
    pub value: f64,
    #[serde(rename = "limit_vpm")]
    pub limit_used: f64,
    /// Grid peak re-evaluated at the solved value.
    #[serde(rename = "peak_at_value_vpm")]
    pub peak_at_value: f64,
    pub converged: bool,
}

fn grid_peak(scenario: &Scenario, area_side: f64, resolution: f64) -> Result<f64> {
    Ok(peak_efield(scenario, area_side, resolution)?
        .global_max
        .e_vpm)
}

/// Minimum BS-RIS distance whose grid peak stays at or below `limit`.
///
/// The field is exactly proportional to `1 / d_BR`, so the answer is the
/// reference peak rescaled; the result is verified by re-evaluating the peak
/// at the solved distance.
pub fn min_dbr(
    scenario: &Scenario,
    limit: f64,
    area_side: f64,
    resolution: f64,
) -> Result<SolverResult> {
    require_positive("limit", limit)?;
    let reference_peak = grid_peak(scenario, area_side, resolution)?;
    let d_min = scenario.link().d_br() * reference_peak / limit;
    let verified = scenario.at_distance(d_min)?;
    let peak_at_value = grid_peak(&verified, area_side, resolution)?;
    Ok(SolverResult {
        parameter: SolvedParameter::DBr,
        value: d_min,
        limit_used: limit,
        peak_at_value,
        converged: peak_at_value <= limit * (1.0 + 1e-9),
    })
}

/// Smallest mounting height in `h_range` whose grid peak stays at or below
/// `limit`, to within [`HEIGHT_TOLERANCE_M`].
///
/// A coarse scan first checks that the peak decreases with height; if it
/// does, the crossing is bisected, otherwise the range is swept linearly at
/// the solver tolerance. Returns `converged = false` when no height in the
/// range complies.
pub fn min_height(
    scenario: &Scenario,
    limit: f64,
    h_range: (f64, f64),
    area_side: f64,
    resolution: f64,
) -> Result<SolverResult> {
    require_positive("limit", limit)?;
    let (low, high) = h_range;
    if !(low > 0.0 && low <= high && low >= scenario.user_height()) {
        return Err(Error::InvalidHeightRange {
            low,
            high,
            user_height: scenario.user_height(),
        });
    }

    let peak_at =
        |h: f64| -> Result<f64> { grid_peak(&scenario.at_ris_height(h)?, area_side, resolution) };
    let result = |value: f64, peak: f64, converged: bool| SolverResult {
        parameter: SolvedParameter::HRis,
        value,
        limit_used: limit,
        peak_at_value: peak,
        converged,
    };

    let peak_low = peak_at(low)?;
    if peak_low <= limit {
        return Ok(result(low, peak_low, true));
    }
    let peak_high = peak_at(high)?;
    if peak_high > limit {
        return Ok(result(high, peak_high, false));
    }

    // Coarse monotonicity probe across the range.
    const COARSE_POINTS: usize = 9;
    let mut heights = vec![low];
    let mut peaks = vec![peak_low];
    for i in 1..COARSE_POINTS - 1 {
        let h = low + (high - low) * i as f64 / (COARSE_POINTS - 1) as f64;
        heights.push(h);
        peaks.push(peak_at(h)?);
    }
    heights.push(high);
    peaks.push(peak_high);

    let monotone = peaks.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));

    if !monotone {
        // Sweep upward at the solver tolerance and take the first compliant
        // height.
        let mut h = low;
        while h < high {
            h = (h + HEIGHT_TOLERANCE_M).min(high);
            let p = peak_at(h)?;
            if p <= limit {
                return Ok(result(h, p, true));
            }
        }
        return Ok(result(high, peak_high, true));
    }

    // First coarse point at or below the limit bounds the crossing.
    let k = peaks
        .iter()
        .position(|&p| p <= limit)
        .expect("high end complies");
    let mut lo = heights[k - 1];
    let mut hi = heights[k];
    let mut peak_hi = peaks[k];
    while hi - lo > HEIGHT_TOLERANCE_M {
        let mid = 0.5 * (lo + hi);
        let p = peak_at(mid)?;
        if p <= limit {
            hi = mid;
            peak_hi = p;
        } else {
            lo = mid;
        }
    }
    Ok(result(hi, peak_hi, true))
}

/// ITU assessment-domain evaluation height for a down-tilted source:
/// `max(D tan(alpha), 3.5 m)`.
pub fn adb_height(area_side: f64, downtilt: f64) -> Result<f64> {
    require_positive("area_side", area_side)?;
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&downtilt) {
        return Err(Error::NonPositive {
            name: "downtilt (radians in [0, pi/2))",
            value: downtilt,
        });
    }
    Ok((area_side * downtilt.tan()).max(ADB_FLOOR_M))
}
