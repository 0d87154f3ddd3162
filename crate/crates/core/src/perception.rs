//! Geometric landing-pad detector.
//!
//! A nadir pinhole camera rides on the vehicle. The square pad is projected to
//! the image, occluders are projected conservatively as the bounding
//! rectangle of their eight corners, and the visible part of the pad yields a
//! bounding box. Its midpoint is back-projected onto the known pad plane to
//! give a world-frame landing target.
//!
//! Image axes are aligned with the world: `u` grows with `+X`, `v` with `+Y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};

/// Number of supersamples per image axis used to measure visibility.
pub const SUPERSAMPLE: usize = 64;

/// Default minimum visible fraction for a detection to count.
pub const DEFAULT_MIN_VISIBILITY: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Intrinsics {
    /// Focal length, pixels.
    pub f_px: f64,
    pub width: f64,
    pub height: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Default for Intrinsics {
    fn default() -> Self {
        Intrinsics {
            f_px: 600.0,
            width: 800.0,
            height: 600.0,
            cx: 400.0,
            cy: 300.0,
        }
    }
}

impl Intrinsics {
    pub fn validate(&self) -> Result<()> {
        let ok = self.f_px > 0.0
            && self.width > 0.0
            && self.height > 0.0
            && self.cx > 0.0
            && self.cx < self.width
            && self.cy > 0.0
            && self.cy < self.height
            && [self.f_px, self.width, self.height, self.cx, self.cy]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid camera intrinsics {self:?}")))
        }
    }
}

/// A nadir camera at `position`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub intrinsics: Intrinsics,
    pub position: Vec3,
}

impl CameraModel {
    pub fn new(intrinsics: Intrinsics, position: Vec3) -> Self {
        CameraModel {
            intrinsics,
            position,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PadModel {
    /// Pad center; `center.z` is the known pad height.
    pub center: Vec3,
    /// Half side length of the square pad, m.
    pub half_extent: f64,
}

impl PadModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_extent.is_finite() && self.half_extent > 0.0) || !self.center.is_finite() {
            return Err(Error::Config(format!("invalid pad {self:?}")));
        }
        Ok(())
    }
}

/// Pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub u_min: f64,
    pub v_min: f64,
    pub u_max: f64,
    pub v_max: f64,
}

impl BBox {
    pub fn midpoint(&self) -> (f64, f64) {
        (0.5 * (self.u_min + self.u_max), 0.5 * (self.v_min + self.v_max))
    }

    pub fn shifted(&self, du: f64, dv: f64) -> BBox {
        BBox {
            u_min: self.u_min + du,
            v_min: self.v_min + dv,
            u_max: self.u_max + du,
            v_max: self.v_max + dv,
        }
    }

    fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }

    fn union(a: Option<BBox>, b: BBox) -> BBox {
        match a {
            None => b,
            Some(a) => BBox {
                u_min: a.u_min.min(b.u_min),
                v_min: a.v_min.min(b.v_min),
                u_max: a.u_max.max(b.u_max),
                v_max: a.v_max.max(b.v_max),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// Bounds of the visible pad region; `None` when nothing is visible.
    pub bbox: Option<BBox>,
    pub valid: bool,
    /// Visible fraction of the full projected pad area.
    pub visibility: f64,
}

impl Detection {
    pub fn none() -> Self {
        Detection {
            bbox: None,
            valid: false,
            visibility: 0.0,
        }
    }
}

/// One perception tick, as written to the detection log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub t: f64,
    pub bbox: Option<BBox>,
    pub visibility: f64,
    pub valid: bool,
    pub target: Option<Vec3>,
}

/// Pinhole projection; `None` when the point is level with or above the camera.
pub fn project(cam: &CameraModel, p: Vec3) -> Option<(f64, f64)> {
    let depth = cam.position.z - p.z;
    if depth <= 0.0 {
        return None;
    }
    let k = &cam.intrinsics;
    Some((
        k.cx + k.f_px * (p.x - cam.position.x) / depth,
        k.cy + k.f_px * (p.y - cam.position.y) / depth,
    ))
}

fn silhouette(cam: &CameraModel, occ: &Aabb) -> Option<BBox> {
    let mut out: Option<BBox> = None;
    for c in occ.corners() {
        let (u, v) = project(cam, c)?;
        out = Some(BBox::union(
            out,
            BBox {
                u_min: u,
                v_min: v,
                u_max: u,
                v_max: v,
            },
        ));
    }
    out
}

/// Detects the pad with the default visibility threshold.
pub fn detect(cam: &CameraModel, pad: &PadModel, occluders: &[Aabb]) -> Detection {
    detect_with_threshold(cam, pad, occluders, DEFAULT_MIN_VISIBILITY)
}

pub fn detect_with_threshold(
    cam: &CameraModel,
    pad: &PadModel,
    occluders: &[Aabb],
    min_visibility: f64,
) -> Detection {
    let z_pad = pad.center.z;
    let h = pad.half_extent;
    let (Some(lo), Some(hi)) = (
        project(cam, Vec3::new(pad.center.x - h, pad.center.y - h, z_pad)),
        project(cam, Vec3::new(pad.center.x + h, pad.center.y + h, z_pad)),
    ) else {
        return Detection::none();
    };
    let k = &cam.intrinsics;
    let image = BBox {
        u_min: 0.0,
        v_min: 0.0,
        u_max: k.width,
        v_max: k.height,
    };
    // only occluders wholly between the pad plane and the camera can hide it
    let shadows: Vec<BBox> = occluders
        .iter()
        .filter(|o| o.min().z > z_pad && o.max().z < cam.position.z)
        .filter_map(|o| silhouette(cam, o))
        .collect();

    let du = (hi.0 - lo.0) / SUPERSAMPLE as f64;
    let dv = (hi.1 - lo.1) / SUPERSAMPLE as f64;
    let mut visible = 0usize;
    let mut bbox: Option<BBox> = None;
    for i in 0..SUPERSAMPLE {
        let u0 = lo.0 + du * i as f64;
        let uc = u0 + 0.5 * du;
        for j in 0..SUPERSAMPLE {
            let v0 = lo.1 + dv * j as f64;
            let vc = v0 + 0.5 * dv;
            if !image.contains(uc, vc) || shadows.iter().any(|s| s.contains(uc, vc)) {
                continue;
            }
            visible += 1;
            bbox = Some(BBox::union(
                bbox,
                BBox {
                    u_min: u0,
                    v_min: v0,
                    u_max: u0 + du,
                    v_max: v0 + dv,
                },
            ));
        }
    }
    let bbox = bbox.map(|b| BBox {
        u_min: b.u_min.max(image.u_min),
        v_min: b.v_min.max(image.v_min),
        u_max: b.u_max.min(image.u_max),
        v_max: b.v_max.min(image.v_max),
    });
    let visibility = visible as f64 / (SUPERSAMPLE * SUPERSAMPLE) as f64;
    Detection {
        bbox,
        valid: bbox.is_some() && visibility >= min_visibility,
        visibility,
    }
}

/// Back-projects the bbox midpoint onto the plane `z = z_pad`.
///
/// Returns `Ok(None)` for an invalid detection.
pub fn target_from_detection(
    cam: &CameraModel,
    det: &Detection,
    z_pad: f64,
) -> Result<Option<Vec3>> {
    let depth = cam.position.z - z_pad;
    if !(depth > 0.0) {
        return Err(Error::usage("camera must be above the pad plane"));
    }
    let bbox = match (det.valid, det.bbox) {
        (true, Some(b)) => b,
        _ => return Ok(None),
    };
    let (um, vm) = bbox.midpoint();
    let k = &cam.intrinsics;
    Ok(Some(Vec3::new(
        cam.position.x + (um - k.cx) * depth / k.f_px,
        cam.position.y + (vm - k.cy) * depth / k.f_px,
        z_pad,
    )))
}
