//! Simulation-based reachtubes.
//!
//! A nominal trace is simulated from the center of the initial set and `n`
//! traces from random initial states. For every sample the per-axis deviation
//! from the nominal trace, normalized by the sample's initial offset, gives a
//! ratio `ρ(t)`. The horizon is cut into equal segments and, per segment and
//! axis, a line is least-squares fitted to `ln ρ` and then lifted until it
//! dominates every training point. The tube radius at `t` is
//!
//! ```text
//! r_d(t) = max(δ · exp(E_d(t)), max_i |pos_i(t)_d − pos_c(t)_d|)
//! ```
//!
//! where `δ` is the max-norm of the initial set's half-extents. The second
//! term makes every sampled trace lie in the tube by construction.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};
use crate::scenarios::{self, Draw, Episode, ScenarioConfig};
use crate::seed;
use crate::vehicle::{self, Trace};

pub const DEFAULT_SEGMENTS: usize = 10;
pub const DEFAULT_ETA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachOptions {
    pub traces: usize,
    pub segments: usize,
    pub eta: f64,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions {
            traces: 10,
            segments: DEFAULT_SEGMENTS,
            eta: DEFAULT_ETA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeSlice {
    pub t: f64,
    pub rect: Aabb,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TubeMeta {
    pub scenario: String,
    pub traces: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reachtube {
    pub dt: f64,
    pub slices: Vec<TubeSlice>,
    pub meta: TubeMeta,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SliceLine {
    t: f64,
    center: [f64; 3],
    half: [f64; 3],
}

impl Reachtube {
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// One JSON object per slice: `{"t":…,"center":[x,y,z],"half":[hx,hy,hz]}`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for s in &self.slices {
            let line = SliceLine {
                t: s.t,
                center: s.rect.center.to_array(),
                half: s.rect.half_extent.to_array(),
            };
            let _ = writeln!(out, "{}", serde_json::to_string(&line).expect("slice serializes"));
        }
        out
    }

    /// Parses [`Reachtube::to_jsonl`] output. Slices must be uniformly spaced.
    pub fn from_jsonl_str(text: &str) -> Result<Reachtube> {
        let mut slices = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let s: SliceLine =
                serde_json::from_str(line).map_err(|e| Error::parse(i + 1, e.to_string()))?;
            let rect = Aabb::new(Vec3::from(s.center), Vec3::from(s.half));
            if !s.t.is_finite() {
                return Err(Error::parse(i + 1, "non-finite time"));
            }
            rect.validate().map_err(|e| Error::parse(i + 1, e.to_string()))?;
            slices.push(TubeSlice { t: s.t, rect });
        }
        if slices.is_empty() {
            return Err(Error::parse(0, "tube has no slices"));
        }
        let dt = if slices.len() > 1 {
            slices[1].t - slices[0].t
        } else {
            0.0
        };
        if slices.len() > 1 && !(dt > 0.0) {
            return Err(Error::parse(2, "slice times must increase"));
        }
        for (k, s) in slices.iter().enumerate() {
            let want = slices[0].t + dt * k as f64;
            if (s.t - want).abs() > 1e-6 * dt.max(1.0) {
                return Err(Error::parse(k + 1, "slices are not uniformly spaced"));
            }
        }
        Ok(Reachtube {
            dt,
            slices,
            meta: TubeMeta::default(),
        })
    }

    /// Whether every position of `tr` lies in the slice with the same index.
    pub fn contains_trace(&self, tr: &Trace) -> bool {
        tr.len() <= self.len()
            && tr
                .states
                .iter()
                .zip(&self.slices)
                .all(|(s, sl)| sl.rect.contains_point(s.pos))
    }

    /// Radii scaled about the center by `c`.
    pub fn scaled(&self, c: f64) -> Reachtube {
        let mut out = self.clone();
        for s in &mut out.slices {
            s.rect.half_extent = s.rect.half_extent * c;
        }
        out
    }
}

/// `ln ρ ≤ a + b·t` on `[t_start, next t_start)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_start: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyEnvelope {
    pub t_f: f64,
    pub eta: f64,
    /// `segments[d][s]` for position axis `d`.
    pub segments: Vec<Vec<Segment>>,
}

impl DiscrepancyEnvelope {
    pub fn segment_count(&self) -> usize {
        self.segments.first().map_or(0, Vec::len)
    }

    fn segment_index(&self, t: f64) -> usize {
        segment_of(t, self.t_f, self.segment_count())
    }

    /// The log-envelope `E_d(t)`.
    pub fn log_value(&self, d: usize, t: f64) -> f64 {
        let s = self.segments[d][self.segment_index(t)];
        s.a + s.b * t
    }

    pub fn value(&self, d: usize, t: f64) -> f64 {
        self.log_value(d, t).exp()
    }

    /// Envelope pinned at `ln eta` everywhere; used when the initial set is a point.
    pub fn floor(t_f: f64, eta: f64, segments: usize) -> Self {
        let seg_len = t_f / segments as f64;
        let row: Vec<Segment> = (0..segments)
            .map(|s| Segment {
                t_start: s as f64 * seg_len,
                a: eta.ln(),
                b: 0.0,
            })
            .collect();
        DiscrepancyEnvelope {
            t_f,
            eta,
            segments: vec![row; 3],
        }
    }
}

fn segment_of(t: f64, t_f: f64, segments: usize) -> usize {
    if segments <= 1 || t_f <= 0.0 {
        return 0;
    }
    let s = (t / (t_f / segments as f64) + 1e-9).floor();
    (s.max(0.0) as usize).min(segments - 1)
}

fn check_aligned(center: &Trace, samples: &[Trace]) -> Result<()> {
    for (i, s) in samples.iter().enumerate() {
        if s.len() != center.len() {
            return Err(Error::usage(format!(
                "trace {i} has {} states, nominal has {}",
                s.len(),
                center.len()
            )));
        }
        if s.params.dt != center.params.dt {
            return Err(Error::usage(format!("trace {i} uses a different time step")));
        }
    }
    Ok(())
}

/// Learns a per-axis discrepancy envelope from `samples` around `center`.
pub fn learn_envelope(
    center: &Trace,
    samples: &[Trace],
    eta: f64,
    segments: usize,
) -> Result<DiscrepancyEnvelope> {
    if segments == 0 {
        return Err(Error::usage("segment count must be positive"));
    }
    if !(eta > 0.0) {
        return Err(Error::usage("eta must be positive"));
    }
    check_aligned(center, samples)?;
    let c0 = center
        .states
        .first()
        .ok_or_else(|| Error::usage("nominal trace is empty"))?
        .pos;
    let t_f = center.states.last().map_or(0.0, |s| s.t);

    let usable: Vec<(&Trace, f64)> = samples
        .iter()
        .map(|s| (s, (s.states[0].pos - c0).max_abs()))
        .filter(|(_, delta)| *delta >= eta)
        .collect();
    if usable.is_empty() {
        return Err(Error::Degenerate(
            "every sample starts at the nominal initial state".into(),
        ));
    }

    let seg_len = t_f / segments as f64;
    let mut rows: Vec<Vec<Segment>> = (0..3).map(|_| Vec::with_capacity(segments)).collect();
    for (d, row) in rows.iter_mut().enumerate() {
        // (t, ln ρ) points per segment
        let mut pts: Vec<Vec<(f64, f64)>> = vec![Vec::new(); segments];
        for (tr, delta) in &usable {
            for (s, c) in tr.states.iter().zip(&center.states) {
                let dev = (s.pos.to_array()[d] - c.pos.to_array()[d]).abs();
                let rho = (dev / delta).max(eta);
                pts[segment_of(c.t, t_f, segments)].push((c.t, rho.ln()));
            }
        }
        for (k, p) in pts.iter().enumerate() {
            row.push(fit_dominating_line(p, k as f64 * seg_len, eta));
        }
    }
    Ok(DiscrepancyEnvelope {
        t_f,
        eta,
        segments: rows,
    })
}

/// Least-squares line through `pts`, intercept raised to dominate them all.
fn fit_dominating_line(pts: &[(f64, f64)], t_start: f64, eta: f64) -> Segment {
    if pts.is_empty() {
        return Segment {
            t_start,
            a: eta.ln(),
            b: 0.0,
        };
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let var = pts.iter().map(|p| (p.0 - mt).powi(2)).sum::<f64>();
    let cov = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum::<f64>();
    let b = if var > 0.0 { cov / var } else { 0.0 };
    let a = pts
        .iter()
        .map(|(t, y)| y - b * t)
        .fold(f64::NEG_INFINITY, f64::max);
    Segment { t_start, a, b }
}

/// Bloats the nominal trace into a tube that contains every sample. The first
/// slice is clipped to the initial set.
pub fn build_tube(
    center: &Trace,
    env: &DiscrepancyEnvelope,
    init_set: &Aabb,
    samples: &[Trace],
) -> Result<Reachtube> {
    check_aligned(center, samples)?;
    init_set.validate()?;
    let delta = init_set.half_extent.max_abs();
    let slices = center
        .states
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut r = [0.0f64; 3];
            let cp = c.pos.to_array();
            for (d, rd) in r.iter_mut().enumerate() {
                let sampled = samples
                    .iter()
                    .map(|s| (s.states[k].pos.to_array()[d] - cp[d]).abs())
                    .fold(0.0, f64::max);
                let learned = if delta > 0.0 {
                    delta * env.value(d, c.t)
                } else {
                    0.0
                };
                *rd = learned.max(sampled);
            }
            let mut rect = Aabb::new(c.pos, Vec3::from(r));
            if k == 0 {
                // every execution starts in the initial set
                let (lo, hi) = (rect.min().max_each(init_set.min()), rect.max().min_each(init_set.max()));
                if lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z {
                    rect = Aabb::from_bounds(lo, hi);
                }
            }
            TubeSlice { t: c.t, rect }
        })
        .collect();
    Ok(Reachtube {
        dt: center.params.dt,
        slices,
        meta: TubeMeta::default(),
    })
}

/// Sampled traces plus the attempts that were discarded.
#[derive(Debug, Clone)]
pub struct Sampled {
    pub episodes: Vec<Episode>,
    /// `(attempt index, reason)` for each discarded attempt.
    pub rejected: Vec<(usize, String)>,
}

impl Sampled {
    pub fn traces(&self) -> Vec<Trace> {
        self.episodes.iter().map(|e| e.trace.clone()).collect()
    }
}

/// Draws `n` valid traces. Attempt `k` uses the episode seed of stream
/// `trace-<k>`; invalid attempts are replaced by later ones, up to `3n`.
pub fn sample_traces(cfg: &ScenarioConfig, n: usize, root: u64) -> Result<Sampled> {
    if n < 2 {
        return Err(Error::usage("at least 2 traces are needed"));
    }
    let cap = 3 * n;
    let mut episodes = Vec::with_capacity(n);
    let mut rejected = Vec::new();
    let mut next = 0usize;
    while episodes.len() < n {
        if next >= cap {
            return Err(Error::SamplingAborted {
                attempts: next,
                valid: episodes.len(),
                wanted: n,
            });
        }
        let batch: Vec<usize> = (next..(next + n - episodes.len()).min(cap)).collect();
        next += batch.len();
        let results: Vec<(usize, Result<Episode>)> = batch
            .par_iter()
            .map(|k| {
                let s = seed::derive(root, &seed::trace_stream(*k));
                (*k, scenarios::run_episode(cfg, Draw::Seeded(s)))
            })
            .collect();
        for (k, r) in results {
            match r {
                Ok(ep) if vehicle::sanity_filter(&ep.trace, &cfg.vehicle) => episodes.push(ep),
                Ok(_) => rejected.push((k, "failed sanity filter".to_string())),
                Err(e @ (Error::NoPath(_) | Error::SimulationFault { .. })) => {
                    rejected.push((k, e.to_string()))
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(Sampled { episodes, rejected })
}

/// Everything produced for one (sub-)initial set.
#[derive(Debug, Clone)]
pub struct ReachRun {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub center: Episode,
    pub sampled: Sampled,
    pub envelope: DiscrepancyEnvelope,
    pub tube: Reachtube,
}

/// Sample, learn and build for `cfg` with root seed `root`.
pub fn compute_reachtube(cfg: &ScenarioConfig, opts: &ReachOptions, root: u64) -> Result<ReachRun> {
    let center = scenarios::run_episode(cfg, Draw::Nominal)?;
    if !vehicle::sanity_filter(&center.trace, &cfg.vehicle) {
        return Err(Error::SimulationFault {
            t: 0.0,
            reason: "nominal trace failed the sanity filter".into(),
        });
    }
    let sampled = sample_traces(cfg, opts.traces, root)?;
    let traces = sampled.traces();
    let envelope = if cfg.init_set.half_extent.max_abs() > 0.0 {
        learn_envelope(&center.trace, &traces, opts.eta, opts.segments)?
    } else {
        DiscrepancyEnvelope::floor(cfg.t_f(), opts.eta, opts.segments)
    };
    let mut tube = build_tube(&center.trace, &envelope, &cfg.init_set, &traces)?;
    tube.meta = TubeMeta {
        scenario: cfg.id.clone(),
        traces: traces.len(),
        seed: Some(root),
    };
    Ok(ReachRun {
        config: cfg.clone(),
        seed: root,
        center,
        sampled,
        envelope,
        tube,
    })
}

/// Splits `init` into `k[0]·k[1]·k[2]` equal boxes, x-major order.
pub fn partition_init(init: &Aabb, k: [usize; 3]) -> Result<Vec<Aabb>> {
    if k.contains(&0) {
        return Err(Error::usage("partition counts must be at least 1"));
    }
    let lo = init.min().to_array();
    let size = (init.half_extent * 2.0).to_array();
    let mut out = Vec::with_capacity(k[0] * k[1] * k[2]);
    for i in 0..k[0] {
        for j in 0..k[1] {
            for l in 0..k[2] {
                let idx = [i, j, l];
                let mut a = [0.0; 3];
                let mut b = [0.0; 3];
                for d in 0..3 {
                    a[d] = lo[d] + size[d] * idx[d] as f64 / k[d] as f64;
                    b[d] = lo[d] + size[d] * (idx[d] + 1) as f64 / k[d] as f64;
                }
                out.push(Aabb::from_bounds(Vec3::from(a), Vec3::from(b)));
            }
        }
    }
    Ok(out)
}

/// Runs the pipeline once per initial-set cell. Cell `i` uses the seed of
/// stream `partition-<i>`; a single cell reuses `root` unchanged.
pub fn refine_by_partition(
    cfg: &ScenarioConfig,
    k: [usize; 3],
    opts: &ReachOptions,
    root: u64,
) -> Result<Vec<ReachRun>> {
    let cells = partition_init(&cfg.init_set, k)?;
    if cells.len() == 1 {
        return Ok(vec![compute_reachtube(cfg, opts, root)?]);
    }
    cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| {
            let mut sub = cfg.clone();
            sub.init_set = *cell;
            compute_reachtube(&sub, opts, seed::derive(root, &seed::partition_stream(i)))
        })
        .collect()
}

/// Held-out validation summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeldOut {
    pub traces: usize,
    pub contained_traces: usize,
    /// Share of traces that stay inside the tube union at every step.
    pub fraction: f64,
    /// Share of individual positions inside the tube union.
    pub point_fraction: f64,
    pub seed: u64,
}

/// Measures how many `traces` lie inside the union of `tubes`.
pub fn containment(tubes: &[Reachtube], traces: &[Trace], seed: u64) -> HeldOut {
    let mut contained = 0;
    let mut points = 0usize;
    let mut inside = 0usize;
    for tr in traces {
        let mut all = true;
        for (k, s) in tr.states.iter().enumerate() {
            points += 1;
            let hit = tubes
                .iter()
                .any(|tb| tb.slices.get(k).is_some_and(|sl| sl.rect.contains_point(s.pos)));
            inside += hit as usize;
            all &= hit;
        }
        contained += all as usize;
    }
    HeldOut {
        traces: traces.len(),
        contained_traces: contained,
        fraction: if traces.is_empty() {
            1.0
        } else {
            contained as f64 / traces.len() as f64
        },
        point_fraction: if points == 0 {
            1.0
        } else {
            inside as f64 / points as f64
        },
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::builtin;
    use crate::vehicle::{VehicleParams, VehicleState};

    fn synthetic(offsets: &[f64], f: impl Fn(f64, f64) -> f64) -> (Trace, Vec<Trace>) {
        // 1-D toy: x(t) = f(x0, t), y = z = 0
        let p = VehicleParams::default();
        let mk = |x0: f64| Trace {
            states: (0..=40)
                .map(|k| {
                    let t = k as f64 * 0.25;
                    VehicleState {
                        t,
                        pos: Vec3::new(f(x0, t), 0.0, 0.0),
                        vel: Vec3::ZERO,
                        waypoint_index: 0,
                    }
                })
                .collect(),
            params: p,
            seed: None,
        };
        (mk(0.0), offsets.iter().map(|o| mk(*o)).collect())
    }

    #[test]
    fn constant_ratio_gives_unit_envelope() {
        let (c, s) = synthetic(&[1.0], |x0, _| x0);
        let env = learn_envelope(&c, &s, DEFAULT_ETA, 10).unwrap();
        for k in 0..=40 {
            let t = k as f64 * 0.25;
            assert!((env.value(0, t) - 1.0).abs() < 1e-12);
        }
        for seg in &env.segments[0] {
            assert!(seg.a.abs() < 1e-12 && seg.b.abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_normalization_is_scale_free() {
        let f = |x0: f64, t: f64| x0 * (-0.3 * t).exp() * (1.0 + 0.1 * t.sin());
        let (c, a) = synthetic(&[0.5, -1.0, 2.0], f);
        let (_, b) = synthetic(&[1.0, -2.0, 4.0], f);
        let ea = learn_envelope(&c, &a, DEFAULT_ETA, 10).unwrap();
        let eb = learn_envelope(&c, &b, DEFAULT_ETA, 10).unwrap();
        for d in 0..3 {
            for (x, y) in ea.segments[d].iter().zip(&eb.segments[d]) {
                assert!((x.a - y.a).abs() < 1e-9 && (x.b - y.b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn envelope_dominates_training_points() {
        let f = |x0: f64, t: f64| x0 * (0.2 * t).cos() + 0.05 * x0 * x0 * t;
        let (c, s) = synthetic(&[0.3, -0.7, 1.1, 1.9], f);
        let env = learn_envelope(&c, &s, DEFAULT_ETA, 10).unwrap();
        for tr in &s {
            let delta = tr.states[0].pos.x.abs();
            for (st, cs) in tr.states.iter().zip(&c.states) {
                let rho = ((st.pos.x - cs.pos.x).abs() / delta).max(DEFAULT_ETA);
                assert!(env.log_value(0, cs.t) >= rho.ln() - 1e-9);
            }
        }
        // exponential contraction → negative fitted slopes
        let (c, s) = synthetic(&[0.5, 1.0], |x0, t| x0 * (-0.4 * t).exp());
        let env = learn_envelope(&c, &s, DEFAULT_ETA, 5).unwrap();
        assert!(env.segments[0].iter().all(|g| (g.b + 0.4).abs() < 1e-9));
    }

    #[test]
    fn degenerate_samples_rejected() {
        let (c, _) = synthetic(&[], |x0, _| x0);
        let same = vec![c.clone(), c.clone()];
        assert!(matches!(
            learn_envelope(&c, &same, DEFAULT_ETA, 10),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn zero_init_tube_is_the_center_trace() {
        let (c, _) = synthetic(&[], |_, t| t);
        let env = DiscrepancyEnvelope::floor(10.0, DEFAULT_ETA, 10);
        let init = Aabb::new(Vec3::ZERO, Vec3::ZERO);
        let tube = build_tube(&c, &env, &init, std::slice::from_ref(&c)).unwrap();
        assert_eq!(tube.len(), c.len());
        for (sl, st) in tube.slices.iter().zip(&c.states) {
            assert_eq!(sl.rect.center, st.pos);
            assert_eq!(sl.rect.half_extent, Vec3::ZERO);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let (c, mut s) = synthetic(&[1.0], |x0, _| x0);
        s[0].states.pop();
        let env = DiscrepancyEnvelope::floor(10.0, DEFAULT_ETA, 10);
        let init = Aabb::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0));
        assert!(matches!(build_tube(&c, &env, &init, &s), Err(Error::Usage(_))));
    }

    #[test]
    fn tube_jsonl_round_trip() {
        let (c, s) = synthetic(&[1.0, -0.5], |x0, t| x0 * (1.0 + 0.1 * t));
        let env = learn_envelope(&c, &s, DEFAULT_ETA, 10).unwrap();
        let init = Aabb::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0));
        let tube = build_tube(&c, &env, &init, &s).unwrap();
        let text = tube.to_jsonl();
        let back = Reachtube::from_jsonl_str(&text).unwrap();
        assert_eq!(back.slices, tube.slices);
        assert_eq!(back.dt, 0.25);
        assert!(Reachtube::from_jsonl_str("").is_err());
        assert!(Reachtube::from_jsonl_str("{\"t\":0}").is_err());
        let gappy = "{\"t\":0,\"center\":[0,0,0],\"half\":[0,0,0]}\n{\"t\":1,\"center\":[0,0,0],\"half\":[0,0,0]}\n{\"t\":3,\"center\":[0,0,0],\"half\":[0,0,0]}\n";
        assert!(Reachtube::from_jsonl_str(gappy).is_err());
        let negative = "{\"t\":0,\"center\":[0,0,0],\"half\":[-1,0,0]}\n";
        assert!(Reachtube::from_jsonl_str(negative).is_err());
    }

    #[test]
    fn partition_cells_tile_the_box() {
        let init = Aabb::new(Vec3::new(0.0, 0.0, 75.0), Vec3::new(5.0, 5.0, 5.0));
        let cells = partition_init(&init, [2, 1, 3]).unwrap();
        assert_eq!(cells.len(), 6);
        let vol: f64 = cells
            .iter()
            .map(|c| 8.0 * c.half_extent.x * c.half_extent.y * c.half_extent.z)
            .sum();
        assert!((vol - 1000.0).abs() < 1e-9);
        assert_eq!(cells[0].min(), init.min());
        assert_eq!(partition_init(&init, [1, 1, 1]).unwrap(), vec![init]);
        assert!(partition_init(&init, [0, 1, 1]).is_err());
    }

    #[test]
    fn sampling_preconditions_and_degenerate_set() {
        let mut cfg = builtin("s1").unwrap();
        assert!(matches!(sample_traces(&cfg, 1, 0), Err(Error::Usage(_))));
        cfg.init_set.half_extent = Vec3::ZERO;
        let s = sample_traces(&cfg, 3, 4).unwrap();
        let t0 = &s.episodes[0].trace.states;
        assert!(s.episodes.iter().all(|e| &e.trace.states == t0));
        let run = compute_reachtube(&cfg, &ReachOptions { traces: 3, ..Default::default() }, 4)
            .unwrap();
        assert!(run.tube.slices.iter().all(|s| s.rect.half_extent == Vec3::ZERO));
    }

    #[test]
    fn seeds_change_initial_states() {
        let cfg = builtin("s1").unwrap();
        let a = sample_traces(&cfg, 2, 1).unwrap();
        let b = sample_traces(&cfg, 2, 2).unwrap();
        assert!(a
            .episodes
            .iter()
            .zip(&b.episodes)
            .any(|(x, y)| x.init != y.init));
    }
}
