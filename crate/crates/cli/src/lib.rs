//! Front end for the verification pipeline.
//!
//! `run` samples traces, learns the discrepancy envelope, builds the tube (one
//! per initial-set partition) and checks it; `check` re-checks a stored tube;
//! `plotdata` turns a run directory into plot-ready CSV; `export` prints a
//! scenario as JSON so it can be edited and fed back to `run`.
//!
//! Exit codes are 0 for a safe verdict, 2 for an unsafe one and 1 for any
//! error, including bad arguments.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use vtolverify::reach::{self, HeldOut, ReachOptions, ReachRun, Reachtube};
use vtolverify::safety::{self, SafetySpec, Verdict};
use vtolverify::scenarios::{self, ScenarioConfig};
use vtolverify::seed;
use vtolverify::vehicle::{self, Trace};

pub const EXIT_SAFE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNSAFE: i32 = 2;

pub const THREADS_ENV: &str = "VTOLVERIFY_THREADS";
pub const HELDOUT_TRACES: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "vtolverify", version, about = "Reachability verification for VTOL landing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample, build the reachtube and check it.
    Run {
        /// Builtin id (s1..s5, partition-demo) or path to a scenario JSON file.
        scenario: String,
        /// Root seed; defaults to the scenario's own seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10)]
        traces: usize,
        /// Initial-set split per axis, e.g. `2,1,1`.
        #[arg(long, default_value = "1,1,1")]
        partition: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Per-dimension band CSV and tube corners from a run directory.
    Plotdata {
        dir: PathBuf,
        #[arg(long, default_value = "x,y,z")]
        dims: String,
    },
    /// Check a stored tube against a safety spec.
    Check {
        tube: PathBuf,
        spec: PathBuf,
        /// Directory to write verdict.json into.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a scenario definition as JSON.
    Export {
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_SAFE };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let pool = thread_pool()?;
    pool.install(|| match cli.command {
        Command::Run {
            scenario,
            seed,
            traces,
            partition,
            out,
        } => {
            let k = parse_partition(&partition)?;
            let verdict = cmd_run(&scenario, seed, traces, k, &out)?;
            println!(
                "{}: safe={} landing_ok={} collision_free={}",
                out.display(),
                verdict.safe,
                verdict.landing_ok,
                verdict.collision_free
            );
            Ok(exit_code(&verdict))
        }
        Command::Plotdata { dir, dims } => {
            let dims = parse_dims(&dims)?;
            for p in cmd_plotdata(&dir, &dims)? {
                println!("{}", p.display());
            }
            Ok(EXIT_SAFE)
        }
        Command::Check { tube, spec, out } => {
            let v = cmd_check(&tube, &spec, out.as_deref())?;
            print!("{}", v.to_json());
            Ok(exit_code(&v))
        }
        Command::Export { scenario, out } => {
            let (cfg, _) = resolve_scenario(&scenario)?;
            match out {
                Some(p) => write(&p, cfg.to_json())?,
                None => print!("{}", cfg.to_json()),
            }
            Ok(EXIT_SAFE)
        }
    })
}

fn exit_code(v: &Verdict) -> i32 {
    if v.safe {
        EXIT_SAFE
    } else {
        EXIT_UNSAFE
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| anyhow!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

pub fn parse_partition(s: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("partition must be kx,ky,kz, got {s:?}");
    }
    let mut k = [0usize; 3];
    for (slot, p) in k.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| anyhow!("partition counts must be positive integers, got {s:?}"))?;
    }
    Ok(k)
}

pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let mut dims = Vec::new();
    for name in s.split(',').map(str::trim) {
        let d = match name {
            "x" => 0,
            "y" => 1,
            "z" => 2,
            _ => bail!("unknown dimension {name:?}; expected x, y or z"),
        };
        if !dims.contains(&d) {
            dims.push(d);
        }
    }
    Ok(dims)
}

/// A builtin id, or a path to a scenario JSON file when one exists there.
pub fn resolve_scenario(s: &str) -> Result<(ScenarioConfig, Option<PathBuf>)> {
    let path = Path::new(s);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {s}"))?;
        let cfg = ScenarioConfig::from_json_str(&text).with_context(|| format!("parsing {s}"))?;
        return Ok((cfg, Some(path.to_path_buf())));
    }
    Ok((scenarios::named(s)?, None))
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    scenario_id: &'a str,
    scenario_file: Option<String>,
    seed: u64,
    traces: usize,
    heldout_traces: usize,
    partition: [usize; 3],
    out_dir: String,
    /// Derived seed of every top-level stream used by the run.
    streams: Vec<(String, u64)>,
    started_unix_ms: u128,
}

#[derive(Serialize)]
struct Rejection<'a> {
    partition: usize,
    attempt: usize,
    reason: &'a str,
}

#[derive(Serialize)]
struct PlanDump<'a> {
    partition: usize,
    plans: &'a [scenarios::PlanRecord],
}

fn write(path: &Path, text: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn indexed(stem: &str, i: usize, parts: usize, ext: &str) -> String {
    if parts == 1 {
        format!("{stem}.{ext}")
    } else {
        format!("{stem}_p{i}.{ext}")
    }
}

/// Runs the full pipeline into `out` and returns the union verdict.
pub fn cmd_run(
    scenario: &str,
    seed: Option<u64>,
    traces: usize,
    partition: [usize; 3],
    out: &Path,
) -> Result<Verdict> {
    let (cfg, file) = resolve_scenario(scenario)?;
    let root = seed.unwrap_or(cfg.seed);
    if traces < 2 {
        bail!("at least 2 traces are needed to learn a discrepancy envelope, got {traces}");
    }
    fs::create_dir_all(out.join("traces")).with_context(|| format!("creating {}", out.display()))?;

    let cells = partition.iter().product::<usize>();
    let mut streams = vec![(seed::HELDOUT.to_string(), seed::derive(root, seed::HELDOUT))];
    if cells > 1 {
        for i in 0..cells {
            let name = seed::partition_stream(i);
            let v = seed::derive(root, &name);
            streams.push((name, v));
        }
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario_id: &cfg.id,
        scenario_file: file.map(|p| p.display().to_string()),
        seed: root,
        traces,
        heldout_traces: HELDOUT_TRACES,
        partition,
        out_dir: out.display().to_string(),
        streams,
        started_unix_ms: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
    };
    write(&out.join("manifest.json"), json(&manifest))?;

    let opts = ReachOptions {
        traces,
        ..ReachOptions::default()
    };
    let runs = reach::refine_by_partition(&cfg, partition, &opts, root)?;
    let parts = runs.len();
    let tubes: Vec<Reachtube> = runs.iter().map(|r| r.tube.clone()).collect();

    let mut rejected = Vec::new();
    let mut plans = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        write_run_files(out, i, parts, run)?;
        for (attempt, reason) in &run.sampled.rejected {
            eprintln!("partition {i}: excluded sampling attempt {attempt}: {reason}");
            rejected.push(Rejection {
                partition: i,
                attempt: *attempt,
                reason,
            });
        }
        plans.push(PlanDump {
            partition: i,
            plans: &run.center.plans,
        });
    }

    let verdict = safety::check_union(&tubes, &cfg.spec)?;
    if parts > 1 {
        for (i, t) in tubes.iter().enumerate() {
            write(
                &out.join(indexed("verdict", i, parts, "json")),
                safety::check(t, &cfg.spec)?.to_json(),
            )?;
        }
    }
    write(&out.join("verdict.json"), verdict.to_json())?;

    let held = reach::sample_traces(&cfg, HELDOUT_TRACES, seed::derive(root, seed::HELDOUT))?;
    let h: HeldOut = reach::containment(&tubes, &held.traces(), seed::derive(root, seed::HELDOUT));
    write(&out.join("heldout.json"), json(&h))?;

    write(&out.join("scenario.json"), cfg.to_json())?;
    write(&out.join("spec.json"), json(&cfg.spec))?;
    write(&out.join("grid.json"), json(&scenarios::planning_grid(&cfg)?.dump()))?;
    write(&out.join("plan.json"), json(&plans))?;
    write(&out.join("rejected.json"), json(&rejected))?;
    Ok(verdict)
}

fn write_run_files(out: &Path, i: usize, parts: usize, run: &ReachRun) -> Result<()> {
    write(&out.join(indexed("tube", i, parts, "jsonl")), run.tube.to_jsonl())?;
    write(&out.join(indexed("envelope", i, parts, "json")), json(&run.envelope))?;
    let dir = if parts == 1 {
        out.join("traces")
    } else {
        out.join("traces").join(format!("p{i}"))
    };
    fs::create_dir_all(&dir)?;
    write(&dir.join("center.csv"), run.center.trace.to_csv())?;
    for (k, ep) in run.sampled.episodes.iter().enumerate() {
        write(&dir.join(format!("trace_{k:02}.csv")), ep.trace.to_csv())?;
    }
    if run.config.uses_perception() {
        let mut log = String::new();
        for d in &run.center.detections {
            log.push_str(&serde_json::to_string(d)?);
            log.push('\n');
        }
        write(&out.join(indexed("perception", i, parts, "jsonl")), log)?;
    }
    Ok(())
}

/// Checks a stored tube; writes `verdict.json` into `out` when given.
pub fn cmd_check(tube: &Path, spec: &Path, out: Option<&Path>) -> Result<Verdict> {
    let tube_text = fs::read_to_string(tube).with_context(|| format!("reading {}", tube.display()))?;
    let tube = Reachtube::from_jsonl_str(&tube_text).context("parsing tube")?;
    let spec_text = fs::read_to_string(spec).with_context(|| format!("reading {}", spec.display()))?;
    let spec = SafetySpec::from_json_str(&spec_text).context("parsing safety spec")?;
    let v = safety::check(&tube, &spec)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write(&dir.join("verdict.json"), v.to_json())?;
    }
    Ok(v)
}

fn sorted_files(dir: &Path, keep: impl Fn(&str) -> bool) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.file_name().and_then(|n| n.to_str()).is_some_and(&keep))
        .collect();
    files.sort();
    Ok(files)
}

/// Tube files of a run directory in partition order.
pub fn run_tubes(dir: &Path) -> Result<Vec<Reachtube>> {
    let single = dir.join("tube.jsonl");
    let mut paths = if single.is_file() {
        vec![single]
    } else {
        let mut p = sorted_files(dir, |n| n.starts_with("tube_p") && n.ends_with(".jsonl"))?;
        p.sort_by_key(|p| {
            p.file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| s.trim_start_matches("tube_p").parse::<usize>().ok())
        });
        p
    };
    if paths.is_empty() {
        bail!("no tube files in {}", dir.display());
    }
    paths
        .drain(..)
        .map(|p| {
            let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            Reachtube::from_jsonl_str(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}

/// Traces of a run directory as (column name, trace) pairs.
fn run_traces(dir: &Path) -> Result<Vec<(String, Trace)>> {
    let root = dir.join("traces");
    let mut dirs = vec![(String::new(), root.clone())];
    let mut subs: Vec<PathBuf> = fs::read_dir(&root)
        .with_context(|| format!("reading {}", root.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    subs.sort();
    for s in subs {
        let name = s.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        dirs.push((format!("{name}_"), s));
    }
    let mut out = Vec::new();
    for (prefix, d) in dirs {
        for p in sorted_files(&d, |n| n.ends_with(".csv"))? {
            let text = fs::read_to_string(&p)?;
            let states = vehicle::parse_trace_csv(&text).with_context(|| format!("parsing {}", p.display()))?;
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            out.push((
                format!("{prefix}{stem}"),
                Trace {
                    states,
                    params: Default::default(),
                    seed: None,
                },
            ));
        }
    }
    Ok(out)
}

const DIM_NAMES: [&str; 3] = ["x", "y", "z"];

/// Writes `plot/<dim>.csv` for each requested dimension and
/// `plot/tube_corners.csv`; returns the written paths.
pub fn cmd_plotdata(dir: &Path, dims: &[usize]) -> Result<Vec<PathBuf>> {
    let tubes = run_tubes(dir)?;
    let traces = run_traces(dir)?;
    let n = tubes[0].len();
    if tubes.iter().any(|t| t.len() != n) {
        bail!("partition tubes differ in length");
    }
    let plot = dir.join("plot");
    fs::create_dir_all(&plot)?;
    let mut written = Vec::new();

    for &d in dims {
        let mut csv = String::from("t,lower,upper");
        for (name, _) in &traces {
            let _ = write!(csv, ",{name}");
        }
        csv.push('\n');
        for k in 0..n {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for t in &tubes {
                let r = t.slices[k].rect;
                lo = lo.min(r.min().to_array()[d]);
                hi = hi.max(r.max().to_array()[d]);
            }
            let _ = write!(csv, "{},{lo},{hi}", tubes[0].slices[k].t);
            for (_, tr) in &traces {
                match tr.states.get(k) {
                    Some(s) => {
                        let _ = write!(csv, ",{}", s.pos.to_array()[d]);
                    }
                    None => csv.push(','),
                }
            }
            csv.push('\n');
        }
        let p = plot.join(format!("{}.csv", DIM_NAMES[d]));
        write(&p, csv)?;
        written.push(p);
    }

    let mut corners = String::from("t,partition,corner,x,y,z\n");
    for (i, t) in tubes.iter().enumerate() {
        for s in &t.slices {
            let (lo, hi) = (s.rect.min().to_array(), s.rect.max().to_array());
            for c in 0..8 {
                let pick = |d: usize| if c >> d & 1 == 0 { lo[d] } else { hi[d] };
                let _ = writeln!(corners, "{},{i},{c},{},{},{}", s.t, pick(0), pick(1), pick(2));
            }
        }
    }
    let p = plot.join("tube_corners.csv");
    write(&p, corners)?;
    written.push(p);
    Ok(written)
}
