//! RIS lattice, transceiver placement, per-cell distances and link angles.
//!
//! The surface lies in the `x–y` plane centred at the origin; both
//! transceivers sit on the illuminated side (`z > 0`). Elevation is measured
//! from the surface normal `+z`, azimuth from the `+x` axis in `[0, 2π)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

use crate::numeric::neumaier_sum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("grid dimension {name}={value} must be an even integer >= 2")]
    BadDimension { name: &'static str, value: usize },
    #[error("grid pitch {name}={value} m must be positive and finite")]
    BadPitch { name: &'static str, value: f64 },
    #[error("cell index {axis}={value} outside [{lo}, {hi}]")]
    IndexOutOfRange {
        axis: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("node at ({x}, {y}, {z}) must lie strictly above the surface (z > 0)")]
    BelowSurface { x: f64, y: f64, z: f64 },
    #[error("{name}={value} m must be positive and finite")]
    BadDistance { name: &'static str, value: f64 },
    #[error("{name}={value} rad outside [0, π/2]")]
    BadElevation { name: &'static str, value: f64 },
    #[error("{name}={value} rad is not finite")]
    BadAzimuth { name: &'static str, value: f64 },
}

/// The `N × M` unit-cell lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisGrid {
    rows: usize,
    cols: usize,
    pitch_x: f64,
    pitch_y: f64,
}

/// Index of unit cell `K_{n,m}`; `n` is the row, `m` the column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellIndex {
    pub n: i64,
    pub m: i64,
}

impl CellIndex {
    pub fn new(n: i64, m: i64) -> Self {
        Self { n, m }
    }
}

/// A Cartesian point in meters. Transceiver positions must have `z > 0`;
/// cell centres have `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePosition {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl NodePosition {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// A transceiver position: rejects points not strictly above the surface.
    pub fn transceiver(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        let p = Self { x, y, z };
        p.check_above_surface()?;
        Ok(p)
    }

    pub fn check_above_surface(&self) -> Result<(), GeometryError> {
        if self.z > 0.0 && self.x.is_finite() && self.y.is_finite() && self.z.is_finite() {
            Ok(())
        } else {
            Err(GeometryError::BelowSurface {
                x: self.x,
                y: self.y,
                z: self.z,
            })
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance_to(&self, other: &NodePosition) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Distance from `node` to the centre of cell `(n, m)` of a lattice with the
/// given pitches, written as `sqrt(γ + δ + z²)`.
///
/// No validation: zero pitches are allowed here and collapse every cell
/// onto the origin.
pub fn cell_distance_raw(node: &NodePosition, n: i64, m: i64, pitch_x: f64, pitch_y: f64) -> f64 {
    let gamma = (node.x - (m as f64 - 0.5) * pitch_x).powi(2);
    let delta = (node.y - (n as f64 - 0.5) * pitch_y).powi(2);
    (gamma + delta + node.z * node.z).sqrt()
}

impl RisGrid {
    pub fn new(rows: usize, cols: usize, pitch_x: f64, pitch_y: f64) -> Result<Self, GeometryError> {
        check_dimension("rows", rows)?;
        check_dimension("cols", cols)?;
        check_pitch("pitch_x", pitch_x)?;
        check_pitch("pitch_y", pitch_y)?;
        Ok(Self {
            rows,
            cols,
            pitch_x,
            pitch_y,
        })
    }

    /// `side × side` cells of pitch `pitch` in both directions.
    pub fn square(side: usize, pitch: f64) -> Result<Self, GeometryError> {
        Self::new(side, side, pitch, pitch)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pitch_x(&self) -> f64 {
        self.pitch_x
    }

    pub fn pitch_y(&self) -> f64 {
        self.pitch_y
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Physical extent along `x` (`M·d_x`).
    pub fn width(&self) -> f64 {
        self.cols as f64 * self.pitch_x
    }

    /// Physical extent along `y` (`N·d_y`).
    pub fn height(&self) -> f64 {
        self.rows as f64 * self.pitch_y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Inclusive row index range `[1 − N/2, N/2]`.
    pub fn row_range(&self) -> (i64, i64) {
        half_range(self.rows)
    }

    /// Inclusive column index range `[1 − M/2, M/2]`.
    pub fn col_range(&self) -> (i64, i64) {
        half_range(self.cols)
    }

    /// Whether both pitches lie in the usual design range `[λ/10, λ/2]`.
    /// Informational only.
    pub fn pitch_in_design_range(&self, wavelength: f64) -> bool {
        let lo = wavelength / 10.0 * (1.0 - 1e-9);
        let hi = wavelength / 2.0 * (1.0 + 1e-9);
        (lo..=hi).contains(&self.pitch_x) && (lo..=hi).contains(&self.pitch_y)
    }

    pub fn check_index(&self, idx: CellIndex) -> Result<(), GeometryError> {
        let (nlo, nhi) = self.row_range();
        let (mlo, mhi) = self.col_range();
        if !(nlo..=nhi).contains(&idx.n) {
            return Err(GeometryError::IndexOutOfRange {
                axis: "n",
                value: idx.n,
                lo: nlo,
                hi: nhi,
            });
        }
        if !(mlo..=mhi).contains(&idx.m) {
            return Err(GeometryError::IndexOutOfRange {
                axis: "m",
                value: idx.m,
                lo: mlo,
                hi: mhi,
            });
        }
        Ok(())
    }

    /// All cell indices, row-major (`n` outer, `m` inner).
    pub fn indices(&self) -> impl Iterator<Item = CellIndex> + '_ {
        let (nlo, nhi) = self.row_range();
        let (mlo, mhi) = self.col_range();
        (nlo..=nhi).flat_map(move |n| (mlo..=mhi).map(move |m| CellIndex { n, m }))
    }

    /// Row-major position of `idx` in [`RisGrid::indices`].
    pub fn linear_index(&self, idx: CellIndex) -> Result<usize, GeometryError> {
        self.check_index(idx)?;
        let (nlo, _) = self.row_range();
        let (mlo, _) = self.col_range();
        Ok((idx.n - nlo) as usize * self.cols + (idx.m - mlo) as usize)
    }

    /// Centre of `K_{n,m}`: `((m − ½)·d_x, (n − ½)·d_y, 0)`.
    pub fn cell_center(&self, idx: CellIndex) -> Result<NodePosition, GeometryError> {
        self.check_index(idx)?;
        Ok(self.cell_center_unchecked(idx))
    }

    pub(crate) fn cell_center_unchecked(&self, idx: CellIndex) -> NodePosition {
        NodePosition::new(
            (idx.m as f64 - 0.5) * self.pitch_x,
            (idx.n as f64 - 0.5) * self.pitch_y,
            0.0,
        )
    }

    /// Distance from a transceiver to the centre of `K_{n,m}`.
    pub fn cell_distance(&self, idx: CellIndex, node: &NodePosition) -> Result<f64, GeometryError> {
        self.check_index(idx)?;
        node.check_above_surface()?;
        Ok(cell_distance_raw(node, idx.n, idx.m, self.pitch_x, self.pitch_y))
    }

    /// Mean distance from `node` to every cell centre.
    pub fn mean_cell_distance(&self, node: &NodePosition) -> f64 {
        neumaier_sum(
            self.indices()
                .map(|idx| self.cell_center_unchecked(idx).distance_to(node)),
        ) / self.cell_count() as f64
    }

    /// Fraunhofer distance `2·D²/λ` with `D` the surface diagonal.
    pub fn far_field_boundary(&self, wavelength: f64) -> f64 {
        let d = self.diagonal();
        2.0 * d * d / wavelength
    }
}

fn half_range(count: usize) -> (i64, i64) {
    let half = (count / 2) as i64;
    (1 - half, half)
}

fn check_dimension(name: &'static str, value: usize) -> Result<(), GeometryError> {
    if value >= 2 && value.is_multiple_of(2) {
        Ok(())
    } else {
        Err(GeometryError::BadDimension { name, value })
    }
}

fn check_pitch(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::BadPitch { name, value })
    }
}

/// Distances and angles of both transceivers as seen from the surface centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d1: f64,
    pub d2: f64,
    pub theta_tx: f64,
    pub phi_tx: f64,
    pub theta_rx: f64,
    pub phi_rx: f64,
}

/// Which of the two specular relations a geometry violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecularViolation {
    /// `θ_RX ≠ θ_TX`
    Elevation,
    /// `sin θ_TX cos φ_TX + sin θ_RX cos φ_RX ≠ 0`
    XComponent,
    /// `sin θ_TX sin φ_TX + sin θ_RX sin φ_RX ≠ 0`
    YComponent,
}

impl std::fmt::Display for SpecularViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Elevation => "theta_rx = theta_tx",
            Self::XComponent => "sin(theta_tx)cos(phi_tx) + sin(theta_rx)cos(phi_rx) = 0",
            Self::YComponent => "sin(theta_tx)sin(phi_tx) + sin(theta_rx)sin(phi_rx) = 0",
        })
    }
}

impl LinkGeometry {
    pub fn new(
        d1: f64,
        d2: f64,
        theta_tx: f64,
        phi_tx: f64,
        theta_rx: f64,
        phi_rx: f64,
    ) -> Result<Self, GeometryError> {
        check_distance("d1", d1)?;
        check_distance("d2", d2)?;
        check_elevation("theta_tx", theta_tx)?;
        check_elevation("theta_rx", theta_rx)?;
        check_azimuth("phi_tx", phi_tx)?;
        check_azimuth("phi_rx", phi_rx)?;
        Ok(Self {
            d1,
            d2,
            theta_tx,
            phi_tx: wrap_azimuth(phi_tx),
            theta_rx,
            phi_rx: wrap_azimuth(phi_rx),
        })
    }

    /// Distances and angles of two transceiver positions.
    pub fn from_positions(tx: &NodePosition, rx: &NodePosition) -> Result<Self, GeometryError> {
        tx.check_above_surface()?;
        rx.check_above_surface()?;
        let (d1, theta_tx, phi_tx) = spherical(tx);
        let (d2, theta_rx, phi_rx) = spherical(rx);
        Self::new(d1, d2, theta_tx, phi_tx, theta_rx, phi_rx)
    }

    /// Mirror-symmetric placement: `d1 = d2 = d`, `θ_RX = θ_TX`, `φ_RX = φ_TX + π`.
    pub fn specular(distance: f64, theta: f64, phi: f64) -> Result<Self, GeometryError> {
        Self::specular_asymmetric(distance, distance, theta, phi)
    }

    /// Specular angles with independent leg lengths.
    pub fn specular_asymmetric(d1: f64, d2: f64, theta: f64, phi: f64) -> Result<Self, GeometryError> {
        check_azimuth("phi", phi)?;
        let phi_tx = wrap_azimuth(phi);
        Self::new(d1, d2, theta, phi_tx, theta, phi_tx + PI)
    }

    pub fn tx_position(&self) -> NodePosition {
        cartesian(self.d1, self.theta_tx, self.phi_tx)
    }

    pub fn rx_position(&self) -> NodePosition {
        cartesian(self.d2, self.theta_rx, self.phi_rx)
    }

    /// Sum of the two direction-cosine projections on `x` and `y`; both vanish
    /// under specular reflection.
    pub fn direction_sums(&self) -> (f64, f64) {
        let sx = self.theta_tx.sin() * self.phi_tx.cos() + self.theta_rx.sin() * self.phi_rx.cos();
        let sy = self.theta_tx.sin() * self.phi_tx.sin() + self.theta_rx.sin() * self.phi_rx.sin();
        (sx, sy)
    }

    /// Checks the specular relations to absolute tolerance `tol`.
    pub fn specular_violation(&self, tol: f64) -> Option<SpecularViolation> {
        if (self.theta_tx - self.theta_rx).abs() > tol {
            return Some(SpecularViolation::Elevation);
        }
        let (sx, sy) = self.direction_sums();
        if sx.abs() > tol {
            Some(SpecularViolation::XComponent)
        } else if sy.abs() > tol {
            Some(SpecularViolation::YComponent)
        } else {
            None
        }
    }

    pub fn is_specular(&self, tol: f64) -> bool {
        self.specular_violation(tol).is_none()
    }

    /// True when either leg is shorter than the grid's Fraunhofer distance.
    pub fn inside_far_field(&self, grid: &RisGrid, wavelength: f64) -> bool {
        let boundary = grid.far_field_boundary(wavelength);
        self.d1 < boundary || self.d2 < boundary
    }

    /// Same geometry with transmitter and receiver exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            d1: self.d2,
            d2: self.d1,
            theta_tx: self.theta_rx,
            phi_tx: self.phi_rx,
            theta_rx: self.theta_tx,
            phi_rx: self.phi_tx,
        }
    }
}

fn spherical(p: &NodePosition) -> (f64, f64, f64) {
    let d = p.norm();
    let theta = (p.z / d).clamp(-1.0, 1.0).acos();
    let phi = wrap_azimuth(p.y.atan2(p.x));
    (d, theta, phi)
}

fn cartesian(d: f64, theta: f64, phi: f64) -> NodePosition {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    NodePosition::new(d * st * cp, d * st * sp, d * ct)
}

/// Maps any finite angle into `[0, 2π)`.
pub fn wrap_azimuth(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn check_distance(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::BadDistance { name, value })
    }
}

fn check_elevation(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if (0.0..=FRAC_PI_2).contains(&value) {
        Ok(())
    } else {
        Err(GeometryError::BadElevation { name, value })
    }
}

fn check_azimuth(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::BadAzimuth { name, value })
    }
}
