//! Array layout, directions, and feed placement.
//!
//! Coordinate convention: the RIS occupies the x-y plane with its normal
//! along +z and its center at the origin. A departure direction is given by
//! an azimuth angle and an elevation angle measured from the array normal,
//! with unit vector
//!
//! ```text
//! u = [sin(el) cos(az), sin(el) sin(az), cos(el)]
//! ```
//!
//! so elevation 0 is broadside. Angles are degrees at every public
//! interface and radians internally.

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Geometry of the N-element planar RIS array.
///
/// Elements sit on a centered `rows x cols` grid with pitch `spacing` in the
/// z = 0 plane, indexed row-major from the (-x, -y) corner.
#[derive(Debug, Clone, PartialEq)]
pub struct RisArray {
    rows: usize,
    cols: usize,
    spacing: f64,
    positions: Vec<Vector3<f64>>,
}

impl RisArray {
    /// Number of grid rows (along y).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of grid columns (along x).
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Physical unit-cell pitch in meters.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of elements.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    /// True for a zero-element array (never constructible via [`build_array`]).
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Element positions in meters, RIS body frame, row-major order.
    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }
}

/// Departure/arrival direction: azimuth in [0, 360) degrees, elevation in
/// [-90, 90] degrees measured from the array normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    azimuth_deg: f64,
    elevation_deg: f64,
}

impl Direction {
    /// Validates the angle ranges and builds a direction.
    pub fn new(azimuth_deg: f64, elevation_deg: f64) -> Result<Self> {
        if !azimuth_deg.is_finite() || !(0.0..360.0).contains(&azimuth_deg) {
            return Err(Error::invalid(format!(
                "azimuth must lie in [0, 360) degrees, got {azimuth_deg}"
            )));
        }
        if !elevation_deg.is_finite() || !(-90.0..=90.0).contains(&elevation_deg) {
            return Err(Error::invalid(format!(
                "elevation must lie in [-90, 90] degrees, got {elevation_deg}"
            )));
        }
        Ok(Self {
            azimuth_deg,
            elevation_deg,
        })
    }

    /// Azimuth angle in degrees.
    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth_deg
    }

    /// Elevation angle from the array normal in degrees.
    pub fn elevation_deg(&self) -> f64 {
        self.elevation_deg
    }

    /// Elevation angle in radians.
    pub fn elevation_rad(&self) -> f64 {
        self.elevation_deg.to_radians()
    }
}

/// Transmit horn placement relative to the array.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedPlacement {
    position: Vector3<f64>,
    boresight: Vector3<f64>,
    distance: f64,
    incident: Direction,
}

impl FeedPlacement {
    /// Horn phase-center position in meters, RIS body frame.
    pub fn position(&self) -> Vector3<f64> {
        self.position
    }

    /// Unit vector the horn points along (toward the array center).
    pub fn boresight(&self) -> Vector3<f64> {
        self.boresight
    }

    /// Horn distance from the array center in meters.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// Incident direction the horn was placed on.
    pub fn incident(&self) -> Direction {
        self.incident
    }
}

/// Builds a centered planar array with row-major element order.
///
/// Element `n = row * cols + col` sits at
/// `[(col - (cols-1)/2) * spacing, (row - (rows-1)/2) * spacing, 0]`.
pub fn build_array(rows: usize, cols: usize, spacing: f64) -> Result<RisArray> {
    if rows < 1 || cols < 1 {
        return Err(Error::invalid(format!(
            "array dimensions must be at least 1x1, got {rows}x{cols}"
        )));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::invalid(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    let x0 = (cols as f64 - 1.0) / 2.0;
    let y0 = (rows as f64 - 1.0) / 2.0;
    let mut positions = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in 0..cols {
            positions.push(Vector3::new(
                (col as f64 - x0) * spacing,
                (row as f64 - y0) * spacing,
                0.0,
            ));
        }
    }
    Ok(RisArray {
        rows,
        cols,
        spacing,
        positions,
    })
}

/// Unit directional vector of a departure direction.
pub fn unit_vector(dir: &Direction) -> Vector3<f64> {
    let az = dir.azimuth_deg.to_radians();
    let el = dir.elevation_deg.to_radians();
    Vector3::new(el.sin() * az.cos(), el.sin() * az.sin(), el.cos())
}

/// Places the feed horn at `distance` along the incident direction, aimed at
/// the array center.
pub fn place_feed(incident: Direction, distance: f64) -> Result<FeedPlacement> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(Error::invalid(format!(
            "feed distance must be positive, got {distance}"
        )));
    }
    let u = unit_vector(&incident);
    let position = distance * u;
    Ok(FeedPlacement {
        position,
        boresight: -u,
        distance,
        incident,
    })
}

/// Elevation angle of the departure from the feed toward an element,
/// expressed in the horn frame: the angle between `p_n - position` and the
/// horn boresight, in [0, pi] radians.
pub fn feed_elevation_to_element(feed: &FeedPlacement, element: &Vector3<f64>) -> Result<f64> {
    let delta = element - feed.position;
    let norm = delta.norm();
    if norm == 0.0 {
        return Err(Error::invalid(
            "element coincides with the feed position".to_string(),
        ));
    }
    let cos = (delta.dot(&feed.boresight) / norm).clamp(-1.0, 1.0);
    Ok(cos.acos())
}
