//! Axis-aligned set representations.
//!
//! Initial sets, goal regions, unsafe regions and reachtube slices are all
//! boxes described by a center and non-negative half-extents. Predicates use a
//! fixed absolute tolerance of [`TOL`]; boundary contact counts as
//! intersection so that safety verdicts err toward "unsafe".

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used by [`contains`] and [`intersects`].
pub const TOL: f64 = 1e-9;

/// A point or displacement in the world frame (X east, Y north, Z up), meters.
///
/// Serialized as a plain `[x, y, z]` array.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Scales `self` down so its Euclidean norm does not exceed `limit`.
    pub fn clamp_norm(self, limit: f64) -> Vec3 {
        let n = self.norm();
        if n > limit && n > 0.0 {
            self * (limit / n)
        } else {
            self
        }
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn min_each(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max_each(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// An axis-aligned box in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperRect {
    pub center: Vec<f64>,
    pub half_extent: Vec<f64>,
}

impl HyperRect {
    pub fn new(center: Vec<f64>, half_extent: Vec<f64>) -> Result<Self> {
        let r = HyperRect {
            center,
            half_extent,
        };
        r.validate()?;
        Ok(r)
    }

    /// A zero-volume box at `center`.
    pub fn point(center: Vec<f64>) -> Self {
        let n = center.len();
        HyperRect {
            center,
            half_extent: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.center.len() != self.half_extent.len() {
            return Err(Error::DimensionMismatch {
                expected: self.center.len(),
                got: self.half_extent.len(),
            });
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::usage("box center must be finite"));
        }
        if self
            .half_extent
            .iter()
            .any(|h| !h.is_finite() || *h < 0.0)
        {
            return Err(Error::usage("box half-extents must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn lower(&self, d: usize) -> f64 {
        self.center[d] - self.half_extent[d]
    }

    pub fn upper(&self, d: usize) -> f64 {
        self.center[d] + self.half_extent[d]
    }

    /// Whether `p` lies in the box (boundary included, within [`TOL`]).
    pub fn contains_point(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.center.iter().zip(&self.half_extent))
                .all(|(x, (c, h))| (x - c).abs() <= h + TOL)
    }

    /// Smallest box covering both `self` and `other`.
    pub fn hull(&self, other: &HyperRect) -> Result<HyperRect> {
        same_dim(self, other)?;
        let (center, half_extent) = (0..self.dim())
            .map(|d| {
                let lo = self.lower(d).min(other.lower(d));
                let hi = self.upper(d).max(other.upper(d));
                (0.5 * (lo + hi), 0.5 * (hi - lo))
            })
            .unzip();
        Ok(HyperRect {
            center,
            half_extent,
        })
    }
}

/// A three-dimensional [`HyperRect`], used for obstacles, pads and slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aabb {
    pub center: Vec3,
    pub half_extent: Vec3,
}

impl Aabb {
    pub const fn new(center: Vec3, half_extent: Vec3) -> Self {
        Aabb {
            center,
            half_extent,
        }
    }

    pub fn from_bounds(lo: Vec3, hi: Vec3) -> Self {
        Aabb {
            center: (lo + hi) * 0.5,
            half_extent: (hi - lo) * 0.5,
        }
    }

    pub fn min(&self) -> Vec3 {
        self.center - self.half_extent
    }

    pub fn max(&self) -> Vec3 {
        self.center + self.half_extent
    }

    pub fn to_rect(&self) -> HyperRect {
        HyperRect {
            center: self.center.to_array().to_vec(),
            half_extent: self.half_extent.to_array().to_vec(),
        }
    }

    pub fn try_from_rect(r: &HyperRect) -> Result<Self> {
        r.validate()?;
        if r.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: r.dim(),
            });
        }
        Ok(Aabb {
            center: Vec3::new(r.center[0], r.center[1], r.center[2]),
            half_extent: Vec3::new(r.half_extent[0], r.half_extent[1], r.half_extent[2]),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.to_rect().validate()
    }

    pub fn contains_point(&self, p: Vec3) -> bool {
        let d = p - self.center;
        d.x.abs() <= self.half_extent.x + TOL
            && d.y.abs() <= self.half_extent.y + TOL
            && d.z.abs() <= self.half_extent.z + TOL
    }

    /// The eight corners, ordered by the bit pattern (x, y, z) of the index.
    pub fn corners(&self) -> [Vec3; 8] {
        let (lo, hi) = (self.min(), self.max());
        std::array::from_fn(|i| {
            Vec3::new(
                if i & 1 == 0 { lo.x } else { hi.x },
                if i & 2 == 0 { lo.y } else { hi.y },
                if i & 4 == 0 { lo.z } else { hi.z },
            )
        })
    }
}

fn same_dim(a: &HyperRect, b: &HyperRect) -> Result<()> {
    if a.dim() != b.dim() || a.half_extent.len() != b.half_extent.len() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// `true` iff `inner` lies inside `outer`, within [`TOL`] on every axis.
pub fn contains(outer: &HyperRect, inner: &HyperRect) -> Result<bool> {
    same_dim(outer, inner)?;
    Ok((0..outer.dim()).all(|d| {
        (outer.center[d] - inner.center[d]).abs() + inner.half_extent[d]
            <= outer.half_extent[d] + TOL
    }))
}

/// `true` iff the boxes overlap or touch (within [`TOL`]) on every axis.
pub fn intersects(a: &HyperRect, b: &HyperRect) -> Result<bool> {
    same_dim(a, b)?;
    Ok((0..a.dim())
        .all(|d| (a.center[d] - b.center[d]).abs() <= a.half_extent[d] + b.half_extent[d] + TOL))
}

/// `true` iff the open interiors overlap by more than [`TOL`] on every axis.
/// Unlike [`intersects`], boxes that merely touch do not overlap.
pub fn overlaps(a: &HyperRect, b: &HyperRect) -> Result<bool> {
    same_dim(a, b)?;
    Ok((0..a.dim())
        .all(|d| (a.center[d] - b.center[d]).abs() < a.half_extent[d] + b.half_extent[d] - TOL))
}

/// Grows every half-extent of `r` by the matching entry of `radii`.
pub fn bloat(r: &HyperRect, radii: &[f64]) -> Result<HyperRect> {
    if radii.len() != r.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            got: radii.len(),
        });
    }
    if radii.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::usage("bloat radii must be non-negative"));
    }
    Ok(HyperRect {
        center: r.center.clone(),
        half_extent: r.half_extent.iter().zip(radii).map(|(h, s)| h + s).collect(),
    })
}

/// Chebyshev-style separation: `max_d(|Δc_d| − (a_d + b_d))`, clamped at 0
/// when the boxes intersect under [`intersects`].
pub fn gap(a: &HyperRect, b: &HyperRect) -> Result<f64> {
    if intersects(a, b)? {
        return Ok(0.0);
    }
    Ok((0..a.dim())
        .map(|d| (a.center[d] - b.center[d]).abs() - (a.half_extent[d] + b.half_extent[d]))
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0))
}
