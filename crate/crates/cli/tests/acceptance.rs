//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL ...` line
//! before asserting, so `cargo test --test acceptance -- --nocapture` gives a
//! readable report even when some criteria fail.

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use vtolverify::geometry;
use vtolverify::perception::{self, CameraModel, Intrinsics, PadModel};
use vtolverify::planner::{self, Cell, OccupancyGrid};
use vtolverify::reach::Reachtube;
use vtolverify::safety::Verdict;
use vtolverify::scenarios::{self, builtin, ScenarioConfig};
use vtolverify::vehicle;
use vtolverify::{Aabb, Vec3};
use vtolverify_cli::cmd_run;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const S1_RUNTIME_LIMIT: Duration = Duration::from_secs(10);
const PERCEPTION_TOL: f64 = 1e-6;
const HELDOUT_MIN: f64 = 0.95;
const S4_MIN_RADIUS: f64 = 1e-3;
const S2_MAX_Z_RADIUS: f64 = 0.1;

fn report(n: u32, ok: bool, detail: impl AsRef<str>) {
    println!("criterion {n}: {} {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
}

struct Run {
    _dir: TempDir,
    out: PathBuf,
    verdict: Verdict,
    tubes: Vec<Reachtube>,
}

fn run(id: &str, seed: u64, partition: [usize; 3]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join(format!("{id}-{seed}"));
    let verdict = cmd_run(id, Some(seed), 10, partition, &out).unwrap();
    let tubes = vtolverify_cli::run_tubes(&out).unwrap();
    Run {
        _dir: dir,
        out,
        verdict,
        tubes,
    }
}

fn terminal_half(r: &Run) -> Vec3 {
    r.tubes[0].slices.last().unwrap().rect.half_extent
}

fn read_traces(dir: &Path) -> Vec<vehicle::Trace> {
    let mut out = Vec::new();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    for p in paths {
        if p.extension().is_some_and(|e| e == "csv") {
            let states = vehicle::parse_trace_csv(&fs::read_to_string(&p).unwrap()).unwrap();
            out.push(vehicle::Trace {
                states,
                params: Default::default(),
                seed: None,
            });
        }
    }
    out
}

#[test]
fn criterion_01_s1_verdict() {
    let cfg = builtin("s1").unwrap();
    let t0 = Instant::now();
    let r = run("s1", cfg.seed, [1, 1, 1]);
    let elapsed = t0.elapsed();
    let tube = &r.tubes[0];
    let goal = &cfg.spec.goal;
    let last = tube.slices.last().unwrap();
    let in_goal = geometry::contains(goal, &last.rect.to_rect()).unwrap();
    let clear_env = tube.slices.iter().all(|s| {
        cfg.env_obstacles
            .iter()
            .all(|o| !geometry::intersects(&s.rect.to_rect(), &o.to_rect()).unwrap())
    });
    let shape = tube.len() == 401 && (tube.dt - 0.25).abs() < 1e-12 && (last.t - 100.0).abs() < 1e-9;
    let ok = r.verdict.safe && in_goal && clear_env && shape && elapsed < S1_RUNTIME_LIMIT;
    report(
        1,
        ok,
        format!(
            "s1 seed {}: safe={} final slice in G={} env clear={} slices={} runtime={:.2?} (limit {:?})",
            cfg.seed,
            r.verdict.safe,
            in_goal,
            clear_env,
            tube.len(),
            elapsed,
            S1_RUNTIME_LIMIT
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_02_trace_containment() {
    let mut violations = Vec::new();
    let mut checked = 0;
    for id in scenarios::BUILTIN_IDS {
        for seed in SEEDS {
            let r = run(id, seed, [1, 1, 1]);
            for tr in read_traces(&r.out.join("traces")) {
                checked += 1;
                if !r.tubes[0].contains_trace(&tr) {
                    violations.push(format!("{id}/{seed}"));
                }
            }
        }
    }
    let ok = violations.is_empty();
    report(
        2,
        ok,
        format!("{checked} stored traces over s1-s5 x {} seeds, {} violations {violations:?}", SEEDS.len(), violations.len()),
    );
    assert!(ok);
}

#[test]
fn criterion_03_s2_terminal_growth() {
    let mut rows = Vec::new();
    let mut ok = true;
    for seed in SEEDS {
        let a = terminal_half(&run("s1", seed, [1, 1, 1]));
        let b = terminal_half(&run("s2", seed, [1, 1, 1]));
        ok &= b.x > a.x && b.y > a.y;
        rows.push(format!("seed {seed}: s1 ({:.2e},{:.2e}) s2 ({:.3},{:.3})", a.x, a.y, b.x, b.y));
    }
    report(3, ok, rows.join("; "));
    assert!(ok);
}

#[test]
fn criterion_04_s3_obstacle_avoidance() {
    let s3 = builtin("s3").unwrap();
    let intr = s3.intruders[0];
    let mut rows = Vec::new();
    let (mut clear_ok, mut width_ok) = (true, true);
    for seed in SEEDS {
        let r3 = run("s3", seed, [1, 1, 1]);
        let r1 = run("s1", seed, [1, 1, 1]);
        let v = &r3.verdict;
        // avoidance interval: slices whose z-range overlaps the intruder's
        let (t3, t1) = (&r3.tubes[0], &r1.tubes[0]);
        let mut matched = 0;
        let mut wider = 0;
        for (a, b) in t3.slices.iter().zip(&t1.slices) {
            if a.rect.min().z <= intr.max().z && a.rect.max().z >= intr.min().z {
                matched += 1;
                if a.rect.half_extent.y > b.rect.half_extent.y {
                    wider += 1;
                }
            }
        }
        clear_ok &= v.min_clearance > 0.0;
        width_ok &= matched > 0 && wider == matched;
        let intruder_gap = t3
            .slices
            .iter()
            .map(|s| geometry::gap(&s.rect.to_rect(), &intr.to_rect()).unwrap())
            .fold(f64::INFINITY, f64::min);
        rows.push(format!(
            "seed {seed}: min_clearance={:.3} first_violation={:?} intruder_gap={:.3} y wider at {wider}/{matched} matched slices",
            v.min_clearance, v.first_violation_t, intruder_gap
        ));
    }
    let ok = clear_ok && width_ok;
    report(4, ok, format!("clearance>0 all seeds={clear_ok}, y-width exceeds s1={width_ok}; {}", rows.join("; ")));
    assert!(ok);
}

#[test]
fn criterion_05_s4_terminal_uncertainty() {
    let mut rows = Vec::new();
    let mut ok = true;
    for seed in SEEDS {
        let h4 = terminal_half(&run("s4", seed, [1, 1, 1]));
        let h2 = terminal_half(&run("s2", seed, [1, 1, 1]));
        let s4_ok = h4.x > S4_MIN_RADIUS && h4.y > S4_MIN_RADIUS && h4.z > S4_MIN_RADIUS;
        let s2_ok = h2.z < S2_MAX_Z_RADIUS;
        ok &= s4_ok && s2_ok;
        rows.push(format!(
            "seed {seed}: s4 ({:.3e},{:.3e},{:.3e}) s2 z {:.3e}",
            h4.x, h4.y, h4.z, h2.z
        ));
    }
    report(
        5,
        ok,
        format!("s4 radii > {S4_MIN_RADIUS:e}, s2 z < {S2_MAX_Z_RADIUS}; {}", rows.join("; ")),
    );
    assert!(ok);
}

#[test]
fn criterion_06_s5_safe_under_occlusion() {
    let mut rows = Vec::new();
    let mut ok = true;
    for seed in SEEDS {
        let v = run("s5", seed, [1, 1, 1]).verdict;
        ok &= v.safe;
        rows.push(format!(
            "seed {seed}: safe={} landing_ok={} first_violation={:?}",
            v.safe, v.landing_ok, v.first_violation_t
        ));
    }
    report(6, ok, rows.join("; "));
    assert!(ok);
}

fn dijkstra(grid: &OccupancyGrid, s: Cell, t: Cell) -> Option<usize> {
    let mut dist: HashMap<Cell, usize> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(s, 0);
    heap.push(Reverse((0usize, s)));
    while let Some(Reverse((d, c))) = heap.pop() {
        if c == t {
            return Some(d);
        }
        if dist.get(&c).is_some_and(|best| *best < d) {
            continue;
        }
        for nb in grid.neighbors(c) {
            if grid.is_occupied(nb) {
                continue;
            }
            let nd = d + 1;
            if dist.get(&nb).is_none_or(|best| nd < *best) {
                dist.insert(nb, nd);
                heap.push(Reverse((nd, nb)));
            }
        }
    }
    None
}

#[test]
fn criterion_07_astar_matches_dijkstra() {
    let bounds = Aabb::new(Vec3::new(4.0, 4.0, 4.0), Vec3::new(4.0, 4.0, 4.0));
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut solvable, mut mismatches, mut bad_paths, mut nondet) = (0, 0, 0, 0);
    for _ in 0..200 {
        let mut g = planner::rasterize(&[], &bounds, 1.0, 0.0).unwrap();
        for i in 0..g.len() {
            if rng.random_bool(0.2) {
                let c = g.cell_at(i);
                g.set_occupied(c, true);
            }
        }
        let pick = |rng: &mut ChaCha8Rng| -> Cell {
            [rng.random_range(0..8), rng.random_range(0..8), rng.random_range(0..8)]
        };
        let (s, t) = (pick(&mut rng), pick(&mut rng));
        g.set_occupied(s, false);
        g.set_occupied(t, false);
        let (sp, tp) = (g.cell_center(s), g.cell_center(t));
        let a = planner::plan(&g, sp, tp).unwrap();
        let again = planner::plan(&g, sp, tp).unwrap();
        if a.as_ref().map(|p| &p.cells) != again.as_ref().map(|p| &p.cells) {
            nondet += 1;
        }
        let oracle = dijkstra(&g, s, t);
        match (&a, oracle) {
            (Some(p), Some(d)) => {
                solvable += 1;
                if p.cost() != d {
                    mismatches += 1;
                }
                let adjacent = p.cells.windows(2).all(|w| {
                    (0..3).map(|k| w[0][k].abs_diff(w[1][k])).sum::<usize>() == 1
                });
                if p.cells.iter().any(|c| g.is_occupied(*c))
                    || !adjacent
                    || p.cells.first() != Some(&s)
                    || p.cells.last() != Some(&t)
                {
                    bad_paths += 1;
                }
            }
            (None, None) => {}
            _ => mismatches += 1,
        }
    }
    let ok = mismatches == 0 && bad_paths == 0 && nondet == 0 && solvable > 0;
    report(
        7,
        ok,
        format!("200 grids, {solvable} solvable, {mismatches} cost mismatches, {bad_paths} bad paths, {nondet} nondeterministic"),
    );
    assert!(ok);
}

#[test]
fn criterion_08_perception_round_trip() {
    let intr = Intrinsics::default();
    let z_pad = 29.0;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut invalid = 0;
    for _ in 0..1000 {
        let h = 120.0 - rng.random_range(0.0..90.0);
        let cam_pos = Vec3::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), z_pad + h);
        // keep the whole 10 m pad inside the image
        let half_w = (intr.cx.min(intr.width - intr.cx)) * h / intr.f_px - 5.0;
        let half_h = (intr.cy.min(intr.height - intr.cy)) * h / intr.f_px - 5.0;
        let pad = PadModel {
            center: Vec3::new(
                cam_pos.x + rng.random_range(-half_w..half_w),
                cam_pos.y + rng.random_range(-half_h..half_h),
                z_pad,
            ),
            half_extent: 5.0,
        };
        let cam = CameraModel::new(intr, cam_pos);
        let det = perception::detect(&cam, &pad, &[]);
        match perception::target_from_detection(&cam, &det, z_pad).unwrap() {
            Some(p) => worst = worst.max(p.distance(pad.center)),
            None => invalid += 1,
        }
    }
    let ok = invalid == 0 && worst <= PERCEPTION_TOL;
    report(8, ok, format!("1000 poses, {invalid} invalid, max error {worst:.3e} m (tol {PERCEPTION_TOL:e})"));
    assert!(ok);
}

#[test]
fn criterion_09_heldout_containment() {
    let cfg = builtin("s1").unwrap();
    let r = run("s1", cfg.seed, [1, 1, 1]);
    let h: serde_json::Value = serde_json::from_str(&fs::read_to_string(r.out.join("heldout.json")).unwrap()).unwrap();
    let frac = h["fraction"].as_f64().unwrap();
    let n = h["traces"].as_u64().unwrap();
    let mut others = Vec::new();
    for seed in SEEDS {
        let r = run("s1", seed, [1, 1, 1]);
        let h: serde_json::Value = serde_json::from_str(&fs::read_to_string(r.out.join("heldout.json")).unwrap()).unwrap();
        others.push(format!("{seed}:{}", h["fraction"]));
    }
    let ok = n == 20 && frac >= HELDOUT_MIN;
    report(
        9,
        ok,
        format!("s1 default seed {}: {n} held-out traces, fraction {frac} (min {HELDOUT_MIN}); other seeds {}", cfg.seed, others.join(" ")),
    );
    assert!(ok);
}

#[test]
fn criterion_10_partition_refinement() {
    let cfg: ScenarioConfig = scenarios::partition_demo();
    let whole = run(scenarios::PARTITION_DEMO_ID, cfg.seed, [1, 1, 1]);
    let parts = run(scenarios::PARTITION_DEMO_ID, cfg.seed, [2, 1, 1]);
    let intr = cfg.intruders[0].to_rect();
    let hits_intruder = whole.tubes[0]
        .slices
        .iter()
        .any(|s| geometry::intersects(&s.rect.to_rect(), &intr).unwrap());
    let part_verdicts: Vec<Verdict> = (0..parts.tubes.len())
        .map(|i| {
            let text = fs::read_to_string(parts.out.join(format!("verdict_p{i}.json"))).unwrap();
            serde_json::from_str(&text).unwrap()
        })
        .collect();
    let safe_parts = part_verdicts.iter().filter(|v| v.safe).count();
    let ok = !whole.verdict.safe && hits_intruder && safe_parts >= 1;
    report(
        10,
        ok,
        format!(
            "unpartitioned safe={} (intersects intruder={hits_intruder}); 2x1x1 sub-tubes safe: {:?}",
            whole.verdict.safe,
            part_verdicts.iter().map(|v| v.safe).collect::<Vec<_>>()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_11_determinism_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_vtolverify"))
            .args(["run", "s3", "--seed", "11", "--out", out.to_str().unwrap()])
            .env("VTOLVERIFY_THREADS", threads)
            .output()
            .unwrap()
            .status;
        assert!(matches!(status.code(), Some(0) | Some(2)));
        outs.push(out);
    }
    let same = |f: &str| fs::read(outs[0].join(f)).unwrap() == fs::read(outs[1].join(f)).unwrap();
    let (tube, verdict) = (same("tube.jsonl"), same("verdict.json"));
    let ok = tube && verdict;
    report(11, ok, format!("run s3 --seed 11 with 1 vs 4 workers: tube identical={tube}, verdict identical={verdict}"));
    assert!(ok);
}
