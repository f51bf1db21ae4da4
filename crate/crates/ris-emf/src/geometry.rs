//! RIS element grid construction and per-element geometry to evaluation points.
//!
//! The array lives in the vertical xz-plane at y = 0; x is lateral, y is the
//! depth axis pointing into the coverage area, h is height above ground.

use serde::Serialize;

use crate::error::{require_positive, Error, Result};

/// Minimum distance between an evaluation point and any element before the
/// point counts as coincident with the array surface.
pub const COINCIDENT_EPS: f64 = 1e-9;

/// A point in the deployment coordinate system (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point3 {
    /// Lateral offset along the array face.
    #[serde(rename = "x_m")]
    pub x: f64,
    /// Depth, perpendicular to the array plane (coverage side is y > 0).
    #[serde(rename = "y_m")]
    pub y: f64,
    /// Height above ground.
    #[serde(rename = "h_m")]
    pub h: f64,
}

impl Point3 {
    /// Build a point, rejecting NaN or infinite coordinates.
    pub fn new(x: f64, y: f64, h: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && h.is_finite() {
            Ok(Self { x, y, h })
        } else {
            Err(Error::NonFinitePoint { x, y, h })
        }
    }

    /// Euclidean distance to another point.
    pub fn distance_to(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dh = self.h - other.h;
        (dx * dx + dy * dy + dh * dh).sqrt()
    }
}

/// Square grid of reflecting elements centered on (0, 0, h) in the plane y = 0.
///
/// Elements are stored row-major: height index outer, lateral index inner.
/// The fixed order keeps phasor summation deterministic.
#[derive(Debug, Clone, Serialize)]
pub struct RisArray {
    #[serde(rename = "n_per_side")]
    n_per_side: usize,
    #[serde(rename = "spacing_m")]
    spacing: f64,
    center: Point3,
    #[serde(skip_serializing)]
    elements: Vec<Point3>,
}

impl RisArray {
    /// Build an `n_per_side` x `n_per_side` grid with the given element pitch,
    /// centered at (0, 0, `h_ris`).
    ///
    /// Per-axis offsets from the center are `(i - (n-1)/2) * spacing`: integer
    /// multiples of the pitch for odd sides, odd multiples of half the pitch
    /// for even sides, so the centroid is the center in both cases.
    pub fn new(n_per_side: usize, spacing: f64, h_ris: f64) -> Result<Self> {
        if n_per_side == 0 {
            return Err(Error::EmptyArray);
        }
        require_positive("spacing", spacing)?;
        require_positive("h_ris", h_ris)?;

        let n = n_per_side;
        let half = (n as f64 - 1.0) / 2.0;
        let mut elements = Vec::with_capacity(n * n);
        for hi in 0..n {
            let dh = (hi as f64 - half) * spacing;
            for xi in 0..n {
                let dx = (xi as f64 - half) * spacing;
                elements.push(Point3 {
                    x: dx,
                    y: 0.0,
                    h: h_ris + dh,
                });
            }
        }
        Ok(Self {
            n_per_side,
            spacing,
            center: Point3 {
                x: 0.0,
                y: 0.0,
                h: h_ris,
            },
            elements,
        })
    }

    pub fn n_per_side(&self) -> usize {
        self.n_per_side
    }

    /// Total element count (side squared).
    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Element pitch in meters.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Geometric center (0, 0, h_ris).
    pub fn center(&self) -> Point3 {
        self.center
    }

    /// Element coordinates in summation order.
    pub fn elements(&self) -> &[Point3] {
        &self.elements
    }

    /// Same grid moved to a different mounting height.
    pub fn at_height(&self, h_ris: f64) -> Result<Self> {
        Self::new(self.n_per_side, self.spacing, h_ris)
    }

    /// Distances and angles from every element to an evaluation point.
    ///
    /// Fails if the point lies within [`COINCIDENT_EPS`] of any element.
    pub fn geometry_to(&self, p: &Point3) -> Result<GeometryToPoint> {
        let n = self.elements.len();
        let mut distances = Vec::with_capacity(n);
        let mut elevations = Vec::with_capacity(n);
        let mut azimuths = Vec::with_capacity(n);
        let mut min_distance = f64::INFINITY;

        for e in &self.elements {
            let dx = p.x - e.x;
            let dy = p.y - e.y;
            let dh = e.h - p.h;
            let horizontal = (dx * dx + dy * dy).sqrt();
            let r = (horizontal * horizontal + dh * dh).sqrt();
            min_distance = min_distance.min(r);
            distances.push(r);
            // Restricted to the forward half-space: for points with y > 0 the
            // depth difference is positive, so both angles stay in [-pi/2, pi/2].
            elevations.push(dh.atan2(horizontal));
            azimuths.push((e.x - p.x).atan2(p.y - e.y));
        }

        if min_distance <= COINCIDENT_EPS {
            return Err(Error::CoincidentPoint { min_distance });
        }
        Ok(GeometryToPoint {
            distances,
            elevations,
            azimuths,
        })
    }
}

/// Per-element distance (m), elevation (rad) and azimuth (rad) to one
/// evaluation point, in array element order.
#[derive(Debug, Clone)]
pub struct GeometryToPoint {
    pub distances: Vec<f64>,
    pub elevations: Vec<f64>,
    pub azimuths: Vec<f64>,
}
