//! Shoebox rooms, furniture boxes, receiver grids.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack for comparisons on grid coordinates built from repeated additions.
const EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("room dimension {axis} must be positive, got {value}")]
    NonPositiveDimension { axis: char, value: f64 },
    #[error("wall absorption {index} must lie in [0, 1], got {value}")]
    AbsorptionOutOfRange { index: usize, value: f64 },
    #[error("furniture box {index} is not inside the room")]
    FurnitureOutside { index: usize },
    #[error("furniture box {index} has min > max")]
    InvertedBox { index: usize },
    #[error("position {0:?} is outside the room")]
    OutsideRoom([f64; 3]),
    #[error("grid spacing must be positive")]
    BadSpacing,
    #[error("clearance must be non-negative")]
    BadClearance,
    #[error("no valid points")]
    NoValidPoints,
}

/// A point in room coordinates, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointPosition(pub [f64; 3]);

impl PointPosition {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }
}

impl From<[f64; 3]> for PointPosition {
    fn from(v: [f64; 3]) -> Self {
        Self(v)
    }
}

/// Euclidean distance in meters.
pub fn distance(a: PointPosition, b: PointPosition) -> f64 {
    let d: [f64; 3] = std::array::from_fn(|i| a.0[i] - b.0[i]);
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Axis-aligned box, `min` and `max` corners in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FurnitureBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl FurnitureBox {
    /// True when `p` is inside the box grown by `margin` on every side (boundary included).
    pub fn contains(&self, p: PointPosition, margin: f64) -> bool {
        (0..3).all(|i| p.0[i] >= self.min[i] - margin - EPS && p.0[i] <= self.max[i] + margin + EPS)
    }
}

/// A rectangular room with per-wall absorption and box furniture.
///
/// Wall order is −x, +x, −y, +y, −z (floor), +z (ceiling).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShoeboxScene {
    pub label: String,
    pub dims_m: [f64; 3],
    pub wall_absorption: [f64; 6],
    #[serde(default)]
    pub furniture: Vec<FurnitureBox>,
    #[serde(default)]
    pub sources: Vec<PointPosition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receivers: Option<Vec<PointPosition>>,
}

impl ShoeboxScene {
    /// Empty room with uniform absorption.
    pub fn empty(label: impl Into<String>, dims_m: [f64; 3], absorption: f64) -> Self {
        Self {
            label: label.into(),
            dims_m,
            wall_absorption: [absorption; 6],
            furniture: Vec::new(),
            sources: Vec::new(),
            receivers: None,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        for (axis, &value) in ['x', 'y', 'z'].iter().zip(&self.dims_m) {
            if !(value > 0.0) || !value.is_finite() {
                return Err(GeometryError::NonPositiveDimension { axis: *axis, value });
            }
        }
        for (index, &value) in self.wall_absorption.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(GeometryError::AbsorptionOutOfRange { index, value });
            }
        }
        for (index, b) in self.furniture.iter().enumerate() {
            if (0..3).any(|i| b.min[i] > b.max[i]) {
                return Err(GeometryError::InvertedBox { index });
            }
            if (0..3).any(|i| b.min[i] < -EPS || b.max[i] > self.dims_m[i] + EPS) {
                return Err(GeometryError::FurnitureOutside { index });
            }
        }
        for p in self.sources.iter().chain(self.receivers.iter().flatten()) {
            self.check_inside(*p)?;
        }
        Ok(())
    }

    pub fn contains(&self, p: PointPosition) -> bool {
        (0..3).all(|i| p.0[i] >= 0.0 && p.0[i] <= self.dims_m[i])
    }

    pub fn check_inside(&self, p: PointPosition) -> Result<(), GeometryError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeometryError::OutsideRoom(p.0))
        }
    }

    pub fn volume(&self) -> f64 {
        self.dims_m.iter().product()
    }

    pub fn surface_area(&self) -> f64 {
        let [x, y, z] = self.dims_m;
        2.0 * (x * y + x * z + y * z)
    }

    /// Sabine reverberation time `0.161 V / A` with `A` the area-weighted absorption.
    pub fn sabine_t60(&self) -> f64 {
        let [x, y, z] = self.dims_m;
        let areas = [y * z, y * z, x * z, x * z, x * y, x * y];
        let absorption: f64 = areas.iter().zip(&self.wall_absorption).map(|(s, a)| s * a).sum();
        0.161 * self.volume() / absorption
    }
}

/// Receiver-grid layout. Defaults: 0.5 m spacing at 0.5/1.0/1.5 m elevation, 0.25 m wall
/// clearance, furniture treated as solid with no extra margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub spacing_m: f64,
    pub elevations_m: Vec<f64>,
    pub clearance_m: f64,
    #[serde(default)]
    pub furniture_margin_m: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            spacing_m: 0.5,
            elevations_m: vec![0.5, 1.0, 1.5],
            clearance_m: 0.25,
            furniture_margin_m: 0.0,
        }
    }
}

fn axis_positions(extent: f64, spacing: f64, clearance: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let v = clearance + k as f64 * spacing;
        if v > extent - clearance + EPS {
            break;
        }
        out.push(v);
        k += 1;
    }
    out
}

/// Receiver positions on a regular grid, x-major then y then z. Points closer than the
/// clearance to a wall, or touching a furniture box, are left out.
pub fn generate_receiver_grid(
    scene: &ShoeboxScene,
    spec: &GridSpec,
) -> Result<Vec<PointPosition>, GeometryError> {
    if !(spec.spacing_m > 0.0) {
        return Err(GeometryError::BadSpacing);
    }
    if !(spec.clearance_m >= 0.0) || !(spec.furniture_margin_m >= 0.0) {
        return Err(GeometryError::BadClearance);
    }
    let [lx, ly, lz] = scene.dims_m;
    let xs = axis_positions(lx, spec.spacing_m, spec.clearance_m);
    let ys = axis_positions(ly, spec.spacing_m, spec.clearance_m);
    let zs: Vec<f64> = spec
        .elevations_m
        .iter()
        .copied()
        .filter(|&z| z >= spec.clearance_m - EPS && z <= lz - spec.clearance_m + EPS)
        .collect();
    let mut points = Vec::with_capacity(xs.len() * ys.len() * zs.len());
    for &x in &xs {
        for &y in &ys {
            for &z in &zs {
                let p = PointPosition::new(x, y, z);
                if scene
                    .furniture
                    .iter()
                    .any(|b| b.contains(p, spec.furniture_margin_m))
                {
                    continue;
                }
                points.push(p);
            }
        }
    }
    if points.is_empty() {
        return Err(GeometryError::NoValidPoints);
    }
    Ok(points)
}
