//! Point-mass stand-in for the VTOL flight stack.
//!
//! The vehicle pursues its current waypoint with a saturated proportional
//! velocity command and a first-order velocity lag:
//!
//! ```text
//! v_des = clamp_norm(k_p · (w − pos), v_max)
//! vel'  = vel + (dt / tau) · (v_des − vel)
//! pos'  = pos + dt · vel'
//! ```
//!
//! The waypoint index advances by one when the new position is within the
//! capture radius of the current waypoint and another waypoint follows.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleParams {
    /// Waypoint pursuit gain, 1/s.
    pub k_p: f64,
    /// Velocity response time constant, s.
    pub tau: f64,
    /// Speed limit, m/s.
    pub v_max: f64,
    /// Waypoint capture radius, m.
    pub r_cap: f64,
    /// Integration step, s.
    pub dt: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams {
            k_p: 0.5,
            tau: 1.0,
            v_max: 5.0,
            r_cap: 1.0,
            dt: 0.25,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("k_p", self.k_p),
            ("tau", self.tau),
            ("v_max", self.v_max),
            ("r_cap", self.r_cap),
            ("dt", self.dt),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "vehicle parameter {name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Number of states in a trace over `[0, t_f]`.
    pub fn steps_for(&self, t_f: f64) -> usize {
        (t_f / self.dt + 1e-9).floor() as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub t: f64,
    pub pos: Vec3,
    pub vel: Vec3,
    pub waypoint_index: usize,
}

impl VehicleState {
    pub fn at_rest(pos: Vec3) -> Self {
        VehicleState {
            t: 0.0,
            pos,
            vel: Vec3::ZERO,
            waypoint_index: 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.pos.is_finite() && self.vel.is_finite()
    }
}

/// A uniformly sampled execution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub states: Vec<VehicleState>,
    pub params: VehicleParams,
    pub seed: Option<u64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.states.iter().map(|s| s.pos)
    }

    pub fn final_state(&self) -> Option<&VehicleState> {
        self.states.last()
    }

    /// CSV with header `t,x,y,z,vx,vy,vz,wp_index`, shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,z,vx,vy,vz,wp_index\n");
        for s in &self.states {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                s.t, s.pos.x, s.pos.y, s.pos.z, s.vel.x, s.vel.y, s.vel.z, s.waypoint_index
            );
        }
        out
    }
}

/// Parses the CSV produced by [`Trace::to_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<VehicleState>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "t,x,y,z,vx,vy,vz,wp_index" => {}
        _ => return Err(Error::parse(1, "missing trace CSV header")),
    }
    let mut states = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::parse(i + 1, format!("expected 8 fields, got {}", fields.len())));
        }
        let mut nums = [0.0f64; 7];
        for (slot, f) in nums.iter_mut().zip(&fields) {
            *slot = f
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad number {f:?}")))?;
        }
        let waypoint_index = fields[7]
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("bad waypoint index {:?}", fields[7])))?;
        states.push(VehicleState {
            t: nums[0],
            pos: Vec3::new(nums[1], nums[2], nums[3]),
            vel: Vec3::new(nums[4], nums[5], nums[6]),
            waypoint_index,
        });
    }
    Ok(states)
}

/// Advances the vehicle by one integration step.
pub fn step(s: &VehicleState, waypoints: &[Vec3], p: &VehicleParams) -> Result<VehicleState> {
    if waypoints.is_empty() {
        return Err(Error::usage("waypoint list is empty"));
    }
    if s.waypoint_index >= waypoints.len() {
        return Err(Error::usage(format!(
            "waypoint index {} out of range for {} waypoints",
            s.waypoint_index,
            waypoints.len()
        )));
    }
    if !s.is_finite() {
        return Err(Error::SimulationFault {
            t: s.t,
            reason: "non-finite input state".into(),
        });
    }
    let w = waypoints[s.waypoint_index];
    let v_des = ((w - s.pos) * p.k_p).clamp_norm(p.v_max);
    let vel = s.vel + (v_des - s.vel) * (p.dt / p.tau);
    let pos = s.pos + vel * p.dt;
    let mut waypoint_index = s.waypoint_index;
    if pos.distance(w) <= p.r_cap && waypoint_index + 1 < waypoints.len() {
        waypoint_index += 1;
    }
    let next = VehicleState {
        t: s.t + p.dt,
        pos,
        vel,
        waypoint_index,
    };
    if !next.is_finite() {
        return Err(Error::SimulationFault {
            t: next.t,
            reason: "integrator produced a non-finite state".into(),
        });
    }
    Ok(next)
}

/// Runs the vehicle from rest at `init_pos` over `[0, t_f]`.
pub fn simulate(init_pos: Vec3, waypoints: &[Vec3], p: &VehicleParams, t_f: f64) -> Result<Trace> {
    if !(t_f > 0.0) {
        return Err(Error::usage("time horizon must be positive"));
    }
    if waypoints.is_empty() {
        return Err(Error::usage("waypoint list is empty"));
    }
    p.validate()?;
    let n = p.steps_for(t_f);
    let mut states = Vec::with_capacity(n);
    let mut s = VehicleState::at_rest(init_pos);
    if !s.is_finite() {
        return Err(Error::SimulationFault {
            t: 0.0,
            reason: "non-finite initial position".into(),
        });
    }
    states.push(s);
    for _ in 1..n {
        s = step(&s, waypoints, p)?;
        states.push(s);
    }
    Ok(Trace {
        states,
        params: *p,
        seed: None,
    })
}

/// `true` iff every state is finite and `|vel|∞ ≤ 1.5 · v_max`.
pub fn sanity_filter(tr: &Trace, p: &VehicleParams) -> bool {
    let bound = 1.5 * p.v_max;
    tr.states
        .iter()
        .all(|s| s.is_finite() && s.vel.max_abs() <= bound)
}
