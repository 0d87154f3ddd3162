//! Landing and collision requirements evaluated on reachtubes.
//!
//! A tube satisfies the landing requirement when its slice at `t_f` lies in
//! the goal box, and the collision requirement when no slice up to `t_f`
//! intersects any unsafe box.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{self, HyperRect};
use crate::reach::Reachtube;

const T_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetySpec {
    pub goal: HyperRect,
    #[serde(rename = "unsafe")]
    pub unsafe_set: Vec<HyperRect>,
    pub t_f: f64,
}

impl SafetySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_f.is_finite() && self.t_f > 0.0) {
            return Err(Error::Config("t_f must be positive".into()));
        }
        self.goal.validate()?;
        if self.goal.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: self.goal.dim(),
            });
        }
        for u in &self.unsafe_set {
            u.validate()?;
            if u.dim() != 3 {
                return Err(Error::DimensionMismatch {
                    expected: 3,
                    got: u.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: SafetySpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Landing requirement and collision requirement both hold.
    pub safe: bool,
    pub landing_ok: bool,
    pub collision_free: bool,
    pub first_violation_t: Option<f64>,
    /// Smallest box gap to any unsafe box, m; `null` in JSON when there are none.
    #[serde(serialize_with = "ser_inf", deserialize_with = "de_inf")]
    pub min_clearance: f64,
    /// Per-axis slack of the final slice inside the goal box; negative means outside.
    pub goal_margin: Vec<f64>,
}

fn ser_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_inf<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes") + "\n"
    }
}

/// Checks one tube against `spec`.
pub fn check(tube: &Reachtube, spec: &SafetySpec) -> Result<Verdict> {
    spec.validate()?;
    let last = tube
        .slices
        .last()
        .ok_or_else(|| Error::usage("tube has no slices"))?;
    if last.t < spec.t_f - T_EPS {
        return Err(Error::usage(format!(
            "tube ends at t={} before t_f={}",
            last.t, spec.t_f
        )));
    }
    let horizon: Vec<_> = tube
        .slices
        .iter()
        .take_while(|s| s.t <= spec.t_f + T_EPS)
        .collect();
    let final_rect = horizon
        .last()
        .ok_or_else(|| Error::usage("tube has no slice within the horizon"))?
        .rect
        .to_rect();

    let landing_ok = geometry::contains(&spec.goal, &final_rect)?;
    let goal_margin = (0..spec.goal.dim())
        .map(|d| {
            spec.goal.half_extent[d]
                - ((spec.goal.center[d] - final_rect.center[d]).abs() + final_rect.half_extent[d])
        })
        .collect();

    let mut first_violation_t = None;
    let mut min_clearance = f64::INFINITY;
    for s in &horizon {
        let r = s.rect.to_rect();
        for u in &spec.unsafe_set {
            if geometry::intersects(&r, u)? {
                first_violation_t.get_or_insert(s.t);
                min_clearance = 0.0;
            } else {
                min_clearance = min_clearance.min(geometry::gap(&r, u)?);
            }
        }
    }
    let collision_free = first_violation_t.is_none();
    Ok(Verdict {
        safe: landing_ok && collision_free,
        landing_ok,
        collision_free,
        first_violation_t,
        min_clearance,
        goal_margin,
    })
}

/// Checks every partition tube; the union is safe iff each part is.
pub fn check_union(tubes: &[Reachtube], spec: &SafetySpec) -> Result<Verdict> {
    let mut verdicts = tubes.iter().map(|t| check(t, spec));
    let mut acc = verdicts
        .next()
        .ok_or_else(|| Error::usage("no tubes to check"))??;
    for v in verdicts {
        let v = v?;
        acc.landing_ok &= v.landing_ok;
        acc.collision_free &= v.collision_free;
        acc.first_violation_t = match (acc.first_violation_t, v.first_violation_t) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        acc.min_clearance = acc.min_clearance.min(v.min_clearance);
        for (m, n) in acc.goal_margin.iter_mut().zip(&v.goal_margin) {
            *m = m.min(*n);
        }
    }
    acc.safe = acc.landing_ok && acc.collision_free;
    Ok(acc)
}
