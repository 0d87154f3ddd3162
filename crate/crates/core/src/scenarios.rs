//! Landing scenarios and the closed-loop episode runner.
//!
//! An episode draws an initial position and a landing target, rasterizes the
//! known obstacles, plans a route with A*, and flies it with the vehicle
//! model. For perception-driven targets the camera is sampled at
//! `perception_rate`; a new estimate that differs from the current target by
//! more than the replan threshold triggers a new route.
//!
//! A route is the simplified A* path to the *approach fix* (the first free
//! cell center above the touchdown point) followed by the touchdown point
//! itself. Below the approach fix the vehicle is on final descent and only the
//! touchdown point is moved by later estimates.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, HyperRect, Vec3};
use crate::perception::{self, CameraModel, DetectionRecord, Intrinsics, PadModel};
use crate::planner::{self, OccupancyGrid};
use crate::safety::SafetySpec;
use crate::seed;
use crate::vehicle::{self, Trace, VehicleParams, VehicleState};

/// Rejection-sampling cap for the Gaussian target model.
pub const MAX_TARGET_DRAWS: usize = 1000;

pub const BUILTIN_IDS: [&str; 5] = ["s1", "s2", "s3", "s4", "s5"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitDistribution {
    /// Uniform over the whole initial set.
    Uniform,
    /// Uniform over an initial set deliberately narrowed to one side of an
    /// obstacle. Sampling is identical; the tag records the restriction.
    UniformRestricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerceptionMode {
    Ideal,
    /// Uniform pixel perturbation in `[-b_px, b_px]²` on the bbox midpoint.
    Bounded { b_px: f64 },
}

impl PerceptionMode {
    pub fn bound_px(&self) -> f64 {
        match self {
            PerceptionMode::Ideal => 0.0,
            PerceptionMode::Bounded { b_px } => *b_px,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetModel {
    Fixed { point: Vec3 },
    /// Per-axis normal draw, resampled until it lands on the pad.
    Gaussian { mu: Vec3, sigma: Vec3 },
    Perception { mode: PerceptionMode },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanningConfig {
    /// Region covered by the occupancy grid.
    pub bounds: Aabb,
    pub cell: f64,
    pub inflation: f64,
    /// Minimum target shift, m, that triggers a new route.
    pub replan_threshold: f64,
}

impl Default for PlanningConfig {
    fn default() -> Self {
        // ±20.5 m puts cell centers on integer x, y so the pad center is one
        PlanningConfig {
            bounds: Aabb::new(Vec3::new(0.0, 0.0, 45.0), Vec3::new(20.5, 20.5, 45.0)),
            cell: 1.0,
            inflation: 2.5,
            replan_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub init_set: Aabb,
    pub init_distribution: InitDistribution,
    pub target_model: TargetModel,
    pub pad: PadModel,
    pub intruders: Vec<Aabb>,
    pub env_obstacles: Vec<Aabb>,
    pub spec: SafetySpec,
    pub vehicle: VehicleParams,
    /// Perception update rate, Hz.
    pub perception_rate: f64,
    pub camera: Intrinsics,
    pub min_visibility: f64,
    pub planning: PlanningConfig,
    /// Height of the vehicle reference point above the pad surface at touchdown, m.
    pub touchdown_offset: f64,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes") + "\n"
    }

    pub fn t_f(&self) -> f64 {
        self.spec.t_f
    }

    pub fn uses_perception(&self) -> bool {
        matches!(self.target_model, TargetModel::Perception { .. })
    }

    /// All boxes the planner must avoid.
    pub fn obstacles(&self) -> Vec<Aabb> {
        self.env_obstacles
            .iter()
            .chain(&self.intruders)
            .copied()
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.id.is_empty() {
            return bad("scenario id is empty".into());
        }
        self.init_set.validate()?;
        self.pad.validate()?;
        for b in self.intruders.iter().chain(&self.env_obstacles) {
            b.validate()?;
        }
        self.spec.validate()?;
        self.vehicle.validate()?;
        self.camera.validate()?;
        self.planning.bounds.validate()?;
        if !(self.planning.cell > 0.0 && self.planning.cell.is_finite()) {
            return bad("planning cell must be positive".into());
        }
        if !(self.planning.inflation >= 0.0 && self.planning.inflation.is_finite()) {
            return bad("planning inflation must be non-negative".into());
        }
        if !(self.planning.replan_threshold >= 0.0) {
            return bad("replan threshold must be non-negative".into());
        }
        if !(self.perception_rate > 0.0 && self.perception_rate.is_finite()) {
            return bad("perception rate must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.min_visibility) {
            return bad("min_visibility must lie in [0, 1]".into());
        }
        if !(self.touchdown_offset >= 0.0 && self.touchdown_offset.is_finite()) {
            return bad("touchdown offset must be non-negative".into());
        }
        let z_pad = self.pad.center.z;
        match self.target_model {
            TargetModel::Fixed { point } => {
                if !point.is_finite() || point.z != z_pad {
                    return bad(format!("fixed target z {} differs from pad z {z_pad}", point.z));
                }
            }
            TargetModel::Gaussian { mu, sigma } => {
                if !mu.is_finite() || mu.z != z_pad {
                    return bad(format!("target mean z {} differs from pad z {z_pad}", mu.z));
                }
                if !sigma.is_finite() || sigma.x < 0.0 || sigma.y < 0.0 || sigma.z != 0.0 {
                    return bad("target sigma must be non-negative with zero z".into());
                }
            }
            TargetModel::Perception { mode } => {
                let b = mode.bound_px();
                if !(b >= 0.0 && b.is_finite()) {
                    return bad("pixel bound must be non-negative".into());
                }
            }
        }
        let bounds = self.planning.bounds;
        let lo = bounds.min();
        let hi = bounds.max();
        let (ilo, ihi) = (self.init_set.min(), self.init_set.max());
        if ilo.x < lo.x || ilo.y < lo.y || ilo.z < lo.z || ihi.x > hi.x || ihi.y > hi.y || ihi.z > hi.z
        {
            return bad("initial set extends outside the planning bounds".into());
        }
        Ok(())
    }

    /// The pad-level prior used before the first valid detection.
    pub fn prior_target(&self) -> Vec3 {
        self.pad.center
    }
}

fn building() -> Aabb {
    Aabb::new(Vec3::new(0.0, 0.0, 14.5), Vec3::new(10.0, 10.0, 14.5))
}

fn intruder() -> Aabb {
    // footprint Δx = 6.4 m, Δy = 10.8 m, Δz = 2.2 m
    Aabb::new(Vec3::new(0.0, 0.0, 60.0), Vec3::new(3.2, 5.4, 1.1))
}

fn wide_init() -> Aabb {
    Aabb::new(Vec3::new(0.0, 0.0, 75.0), Vec3::new(5.0, 5.0, 5.0))
}

fn narrow_init() -> Aabb {
    // x ∈ [-5.5, -3.0], y ∈ [-1.5, 1.5], z ∈ [73, 77]
    Aabb::from_bounds(Vec3::new(-5.5, -1.5, 73.0), Vec3::new(-3.0, 1.5, 77.0))
}

const PAD_CENTER: Vec3 = Vec3::new(0.0, 0.0, 29.0);

fn gaussian_target() -> TargetModel {
    TargetModel::Gaussian {
        mu: PAD_CENTER,
        sigma: Vec3::new(1.5, 1.5, 0.0),
    }
}

fn base(id: &str, init_set: Aabb, target_model: TargetModel, intruders: Vec<Aabb>) -> ScenarioConfig {
    let env_obstacles = vec![building()];
    let unsafe_set = env_obstacles
        .iter()
        .chain(&intruders)
        .map(Aabb::to_rect)
        .collect();
    ScenarioConfig {
        id: id.to_string(),
        init_set,
        init_distribution: if intruders.is_empty() {
            InitDistribution::Uniform
        } else {
            InitDistribution::UniformRestricted
        },
        target_model,
        pad: PadModel {
            center: PAD_CENTER,
            half_extent: 5.0,
        },
        intruders,
        env_obstacles,
        spec: SafetySpec {
            goal: HyperRect {
                center: vec![0.0, 0.0, 29.0],
                half_extent: vec![5.0, 5.0, 0.5],
            },
            unsafe_set,
            t_f: 100.0,
        },
        vehicle: VehicleParams {
            k_p: BUILTIN_K_P,
            ..VehicleParams::default()
        },
        perception_rate: 1.0,
        camera: Intrinsics::default(),
        min_visibility: perception::DEFAULT_MIN_VISIBILITY,
        planning: PlanningConfig::default(),
        touchdown_offset: 0.25,
        seed: 0,
    }
}

/// Pursuit gain of the reference scenarios, 1/s. Low enough that the speed
/// clamp stays inactive for most of the descent and the loop is overdamped.
pub const BUILTIN_K_P: f64 = 0.1;

/// One of the five reference scenarios.
pub fn builtin(id: &str) -> Result<ScenarioConfig> {
    let bounded = TargetModel::Perception {
        mode: PerceptionMode::Bounded { b_px: 5.0 },
    };
    let cfg = match id {
        "s1" => base(id, wide_init(), TargetModel::Fixed { point: PAD_CENTER }, vec![]),
        "s2" => base(id, wide_init(), gaussian_target(), vec![]),
        "s3" => base(id, narrow_init(), gaussian_target(), vec![intruder()]),
        "s4" => base(id, wide_init(), bounded, vec![]),
        "s5" => base(id, narrow_init(), bounded, vec![intruder()]),
        other => {
            return Err(Error::Config(format!(
                "unknown scenario {other:?}; expected one of {BUILTIN_IDS:?}"
            )))
        }
    };
    Ok(cfg)
}

/// Id of the wide-initial-set obstacle case used to demonstrate partitioning.
pub const PARTITION_DEMO_ID: &str = "partition-demo";

/// The s3 intruder above a fixed pad target, started from an initial set
/// that straddles the intruder in x. Routes split to both sides of it, so the
/// unpartitioned tube sweeps through the intruder while an x-split does not.
pub fn partition_demo() -> ScenarioConfig {
    let init = Aabb::new(Vec3::new(0.0, 0.0, 75.0), Vec3::new(5.0, 1.5, 2.0));
    base(
        PARTITION_DEMO_ID,
        init,
        TargetModel::Fixed { point: PAD_CENTER },
        vec![intruder()],
    )
}

/// Resolves a builtin id or the partition demo.
pub fn named(id: &str) -> Result<ScenarioConfig> {
    if id == PARTITION_DEMO_ID {
        Ok(partition_demo())
    } else {
        builtin(id)
    }
}

/// How an episode's random inputs are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Draw {
    /// Initial-set center, mean target, no perception noise.
    Nominal,
    /// Random inputs from the given episode seed.
    Seeded(u64),
}

impl Draw {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Draw::Nominal => None,
            Draw::Seeded(s) => Some(*s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanRecord {
    pub t: f64,
    pub target: Vec3,
    pub waypoints: Vec<Vec3>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub draw: Draw,
    pub init: Vec3,
    /// The drawn (or initially perceived) landing target.
    pub target: Vec3,
    /// Gaussian rejection-sampling retries used for `target`.
    pub target_retries: usize,
    pub trace: Trace,
    pub plans: Vec<PlanRecord>,
    pub detections: Vec<DetectionRecord>,
}

pub fn sample_init(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Vec3 {
    let lo = cfg.init_set.min();
    let hi = cfg.init_set.max();
    let mut axis = |a: f64, b: f64| if b > a { rng.random_range(a..=b) } else { a };
    let x = axis(lo.x, hi.x);
    let y = axis(lo.y, hi.y);
    let z = axis(lo.z, hi.z);
    Vec3::new(x, y, z)
}

/// Draws a target for the fixed and Gaussian models; returns the point and
/// the number of rejected draws.
pub fn sample_target(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<(Vec3, usize)> {
    match cfg.target_model {
        TargetModel::Fixed { point } => Ok((point, 0)),
        TargetModel::Gaussian { mu, sigma } => {
            let normal = |m: f64, s: f64| {
                Normal::new(m, s).map_err(|e| Error::Config(format!("bad target sigma: {e}")))
            };
            let (nx, ny) = (normal(mu.x, sigma.x)?, normal(mu.y, sigma.y)?);
            let pad = cfg.pad;
            for retries in 0..MAX_TARGET_DRAWS {
                let p = Vec3::new(nx.sample(rng), ny.sample(rng), mu.z);
                if (p.x - pad.center.x).abs() <= pad.half_extent
                    && (p.y - pad.center.y).abs() <= pad.half_extent
                {
                    return Ok((p, retries));
                }
            }
            Err(Error::Config(format!(
                "target rejection sampling exceeded {MAX_TARGET_DRAWS} draws"
            )))
        }
        TargetModel::Perception { .. } => Ok((cfg.prior_target(), 0)),
    }
}

struct Router<'a> {
    cfg: &'a ScenarioConfig,
    grid: OccupancyGrid,
}

impl Router<'_> {
    fn touchdown(&self, target: Vec3) -> Vec3 {
        target + Vec3::new(0.0, 0.0, self.cfg.touchdown_offset)
    }

    /// Point above the touchdown point at the center height of the first free
    /// cell in its column.
    fn approach_fix(&self, touchdown: Vec3) -> Result<Vec3> {
        let mut c = self.grid.cell_of(touchdown).ok_or_else(|| {
            Error::NoPath(format!("touchdown {:?} outside the grid", touchdown.to_array()))
        })?;
        while self.grid.is_occupied(c) {
            c[2] += 1;
            if c[2] >= self.grid.dims[2] {
                return Err(Error::NoPath("no free cell above the touchdown point".into()));
            }
        }
        Ok(Vec3::new(touchdown.x, touchdown.y, self.grid.cell_center(c).z))
    }

    fn on_final_descent(&self, pos: Vec3) -> bool {
        match self.grid.cell_of(pos) {
            Some(c) => self.grid.is_occupied(c),
            None => false,
        }
    }

    fn route(&self, from: Vec3, target: Vec3) -> Result<Vec<Vec3>> {
        let touchdown = self.touchdown(target);
        if self.on_final_descent(from) {
            return Ok(vec![touchdown]);
        }
        let fix = self.approach_fix(touchdown)?;
        let path = planner::plan(&self.grid, from, fix)?.ok_or_else(|| {
            Error::NoPath(format!(
                "approach fix {:?} unreachable from {:?}",
                fix.to_array(),
                from.to_array()
            ))
        })?;
        let pts = planner::dequantize(&self.grid, &path.cells, from, fix);
        let mut wps = planner::simplify_collinear(&planner::shortcut(&self.grid, &pts));
        if wps.len() > 1 {
            wps.remove(0);
        }
        if wps.last() != Some(&touchdown) {
            wps.push(touchdown);
        }
        Ok(wps)
    }
}

/// The inflated occupancy grid every route of `cfg` is planned on.
pub fn planning_grid(cfg: &ScenarioConfig) -> Result<OccupancyGrid> {
    planner::rasterize(
        &cfg.obstacles(),
        &cfg.planning.bounds,
        cfg.planning.cell,
        cfg.planning.inflation,
    )
}

/// Runs one closed-loop episode; deterministic in `(cfg, draw)`.
pub fn run_episode(cfg: &ScenarioConfig, draw: Draw) -> Result<Episode> {
    cfg.validate()?;
    let (init, (drawn_target, target_retries), mut noise_rng) = match draw {
        Draw::Nominal => {
            let target = match cfg.target_model {
                TargetModel::Fixed { point } => point,
                TargetModel::Gaussian { mu, .. } => mu,
                TargetModel::Perception { .. } => cfg.prior_target(),
            };
            (cfg.init_set.center, (target, 0), None)
        }
        Draw::Seeded(s) => {
            let init = sample_init(cfg, &mut seed::rng(s, seed::INIT));
            let target = sample_target(cfg, &mut seed::rng(s, seed::TARGET))?;
            (init, target, Some(seed::rng(s, seed::PERCEPTION)))
        }
    };

    let router = Router {
        cfg,
        grid: planning_grid(cfg)?,
    };
    let p = cfg.vehicle;
    let z_pad = cfg.pad.center.z;
    let bound_px = match cfg.target_model {
        TargetModel::Perception { mode } => Some(mode.bound_px()),
        _ => None,
    };

    let mut detections = Vec::new();
    let mut perceive = |t: f64, pos: Vec3| -> Result<Option<Vec3>> {
        let Some(b) = bound_px else { return Ok(None) };
        let cam = CameraModel::new(cfg.camera, pos);
        let mut det = perception::detect_with_threshold(&cam, &cfg.pad, &cfg.intruders, cfg.min_visibility);
        // one draw per tick keeps the noise stream aligned across trajectories
        let (du, dv) = match noise_rng.as_mut() {
            Some(r) if b > 0.0 => (r.random_range(-b..=b), r.random_range(-b..=b)),
            _ => (0.0, 0.0),
        };
        det.bbox = det.bbox.map(|bb| bb.shifted(du, dv));
        let target = if cam.position.z > z_pad {
            perception::target_from_detection(&cam, &det, z_pad)?
        } else {
            None
        };
        detections.push(DetectionRecord {
            t,
            bbox: det.bbox,
            visibility: det.visibility,
            valid: det.valid,
            target,
        });
        Ok(target)
    };

    let mut target = match perceive(0.0, init)? {
        Some(est) => est,
        None => drawn_target,
    };
    let first_route = router.route(init, target)?;
    let mut plans = vec![PlanRecord {
        t: 0.0,
        target,
        waypoints: first_route.clone(),
    }];
    let mut waypoints = first_route;

    let n = p.steps_for(cfg.t_f());
    let ticks = ((1.0 / cfg.perception_rate) / p.dt).round().max(1.0) as usize;
    let mut state = VehicleState::at_rest(init);
    let mut states = Vec::with_capacity(n);
    states.push(state);
    for k in 1..n {
        if bound_px.is_some() && (k - 1) % ticks == 0 && k > 1 {
            if let Some(est) = perceive(state.t, state.pos)? {
                if est.distance(target) > cfg.planning.replan_threshold {
                    match router.route(state.pos, est) {
                        Ok(route) => {
                            target = est;
                            plans.push(PlanRecord {
                                t: state.t,
                                target,
                                waypoints: route.clone(),
                            });
                            waypoints.truncate(state.waypoint_index + 1);
                            waypoints.extend(route);
                            state.waypoint_index += 1;
                        }
                        // keep flying the previous route
                        Err(Error::NoPath(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        state = vehicle::step(&state, &waypoints, &p)?;
        states.push(state);
    }

    Ok(Episode {
        draw,
        init,
        target: drawn_target,
        target_retries,
        trace: Trace {
            states,
            params: p,
            seed: draw.seed(),
        },
        plans,
        detections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parameters() {
        let s1 = builtin("s1").unwrap();
        assert_eq!(s1.target_model, TargetModel::Fixed { point: Vec3::new(0.0, 0.0, 29.0) });
        assert_eq!(s1.init_set.half_extent, Vec3::new(5.0, 5.0, 5.0));
        assert_eq!(s1.init_set.center, Vec3::new(0.0, 0.0, 75.0));

        let s3 = builtin("s3").unwrap();
        assert_eq!(s3.intruders[0].half_extent, Vec3::new(3.2, 5.4, 1.1));
        assert_eq!(s3.intruders[0].center, Vec3::new(0.0, 0.0, 60.0));
        assert_eq!(s3.init_set.min(), Vec3::new(-5.5, -1.5, 73.0));
        assert_eq!(s3.init_set.max(), Vec3::new(-3.0, 1.5, 77.0));
        assert_eq!(s3.init_distribution, InitDistribution::UniformRestricted);

        let s2 = builtin("s2").unwrap();
        assert_eq!(
            s2.target_model,
            TargetModel::Gaussian { mu: Vec3::new(0.0, 0.0, 29.0), sigma: Vec3::new(1.5, 1.5, 0.0) }
        );
        assert!(builtin("s4").unwrap().uses_perception());
        let s5 = builtin("s5").unwrap();
        assert!(s5.uses_perception() && s5.intruders.len() == 1);
        assert_eq!(s5.init_set, s3.init_set);
        assert!(matches!(builtin("s9"), Err(Error::Config(_))));
        for id in BUILTIN_IDS {
            builtin(id).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s5 = builtin("s5").unwrap();
        let text = s5.to_json();
        assert_eq!(ScenarioConfig::from_json_str(&text).unwrap(), s5);

        let mut bad = builtin("s2").unwrap();
        bad.target_model = TargetModel::Gaussian {
            mu: Vec3::new(0.0, 0.0, 29.0),
            sigma: Vec3::new(-1.0, 1.5, 0.0),
        };
        assert!(bad.validate().is_err());
        let mut bad = builtin("s1").unwrap();
        bad.target_model = TargetModel::Fixed { point: Vec3::new(0.0, 0.0, 30.0) };
        assert!(bad.validate().is_err());
        let extra = text.replacen("\"seed\"", "\"bogus\": 1, \"seed\"", 1);
        assert!(ScenarioConfig::from_json_str(&extra).is_err());
    }

    #[test]
    fn gaussian_targets_stay_on_pad() {
        let s2 = builtin("s2").unwrap();
        let mut rng = seed::rng(11, seed::TARGET);
        let mut worst = 0;
        for _ in 0..2000 {
            let (p, retries) = sample_target(&s2, &mut rng).unwrap();
            assert!(p.x.abs() <= 5.0 && p.y.abs() <= 5.0 && p.z == 29.0);
            worst = worst.max(retries);
        }
        assert!(worst <= 10, "worst retries {worst}");
    }

    #[test]
    fn init_distribution_conformance() {
        let s1 = builtin("s1").unwrap();
        let mut rng = seed::rng(5, seed::INIT);
        let pts: Vec<Vec3> = (0..1000).map(|_| sample_init(&s1, &mut rng)).collect();
        let c = s1.init_set.center.to_array();
        let h = s1.init_set.half_extent.to_array();
        for d in 0..3 {
            let xs: Vec<f64> = pts.iter().map(|p| p.to_array()[d]).collect();
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(lo >= c[d] - h[d] && hi <= c[d] + h[d]);
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            // uniform on [c-h, c+h]: sd = h/√3
            let se = h[d] / 3f64.sqrt() / (xs.len() as f64).sqrt();
            assert!((mean - c[d]).abs() <= 3.0 * se, "axis {d}: mean {mean}");
        }
    }

    #[test]
    fn s1_episode_lands() {
        let s1 = builtin("s1").unwrap();
        for s in [1u64, 2, 3] {
            let ep = run_episode(&s1, Draw::Seeded(s)).unwrap();
            assert_eq!(ep.trace.len(), 401);
            let last = ep.trace.final_state().unwrap();
            let touchdown = Vec3::new(0.0, 0.0, 29.0 + s1.touchdown_offset);
            assert!(last.pos.distance(touchdown) <= s1.vehicle.r_cap, "{:?}", last.pos);
            assert!(last.pos.distance(Vec3::new(0.0, 0.0, 29.0)) <= s1.vehicle.r_cap);
        }
    }

    #[test]
    fn episodes_are_reproducible() {
        let s4 = builtin("s4").unwrap();
        let a = run_episode(&s4, Draw::Seeded(9)).unwrap();
        let b = run_episode(&s4, Draw::Seeded(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace.to_csv(), b.trace.to_csv());
    }

    #[test]
    fn s3_trace_avoids_intruder() {
        let s3 = builtin("s3").unwrap();
        for s in 0..5u64 {
            let ep = run_episode(&s3, Draw::Seeded(s)).unwrap();
            assert!(ep.trace.positions().all(|p| !s3.intruders[0].contains_point(p)));
        }
    }

    #[test]
    fn s5_sees_occlusion_early() {
        let s5 = builtin("s5").unwrap();
        let ep = run_episode(&s5, Draw::Seeded(3)).unwrap();
        assert!(ep
            .detections
            .iter()
            .take(10)
            .any(|d| d.visibility < 1.0));
    }
}
