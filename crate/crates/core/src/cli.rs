//! Command layer behind the `hybrid` binary.
//!
//! Every command is turned into a [`Job`] that embeds all of its inputs (instances are
//! inlined), executed, and wrapped in a [`RunReport`]. `hybrid replay REPORT` re-executes
//! the embedded job and compares outcome payloads.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ball::{self, Request, RequestSet};
use crate::coreset::{self, AnchorOptions};
use crate::error::{Error, Result};
use crate::gen::{self, GenKind, GenParams};
use crate::io::{write_atomic, InstanceFile};
use crate::metric::Site;
use crate::oracle;
use crate::solver::{self, scatter_diagnostics, IterationRecord, SolverConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Exit code for a run in which no guess produced a solution.
pub const EXIT_NO_SOLUTION: i32 = 2;
/// Exit code for usage, input and I/O errors.
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "hybrid",
    version,
    about = "Hybrid k-clustering: solver, coresets and exact oracles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded instance file.
    Gen(GenArgs),
    /// Run the bicriteria solver over the guess grid.
    Solve(SolveArgs),
    /// Build an anchor set and a coreset, optionally certifying it exhaustively.
    Coreset(CoresetArgs),
    /// Exact optimum (or k-center radius) by enumeration.
    Oracle(OracleArgs),
    /// Run ball intersection on a request file.
    Ballcheck(BallcheckArgs),
    /// Per-repetition statistics over a set of instances, as CSV.
    Bench(BenchArgs),
    /// Radius-interval diagnostics for a trace file.
    Diag(DiagArgs),
    /// Re-execute the job embedded in a report and compare outcomes.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub z: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instance file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a run report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 50)]
    pub repetitions: usize,
    #[arg(long)]
    pub iteration_cap: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the instance's power.
    #[arg(long)]
    pub z: Option<f64>,
    /// Runs a single guess instead of the grid.
    #[arg(long)]
    pub guess: Option<f64>,
    #[arg(long)]
    pub guess_multiplier: Option<f64>,
    /// Writes the best run's trace here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Includes one record per repetition in the report.
    #[arg(long)]
    pub per_run: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoresetArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Checks every facility subset of size at most k.
    #[arg(long)]
    pub certify: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub z: Option<f64>,
    /// Reports the optimal k-center radius instead.
    #[arg(long)]
    pub kcenter: bool,
    /// Candidate grid spacing for continuous instances.
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BallcheckArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// JSON list of `{"point": i, "radius": d}` objects.
    #[arg(long)]
    pub requests: PathBuf,
    #[arg(long, default_value_t = 0.0125)]
    pub eta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Glob of instance files; matches are processed in sorted order.
    #[arg(long)]
    pub instances: String,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10)]
    pub repetitions: usize,
    #[arg(long)]
    pub iteration_cap: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Adds the exact optimum and cost ratio when enumeration is feasible.
    #[arg(long)]
    pub oracle: bool,
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    /// Trace file written by `solve --trace`.
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub report: PathBuf,
    /// Where to write the replayed report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Trace of one run together with the parameters needed to interpret it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub epsilon: f64,
    pub k: usize,
    pub r: f64,
    pub z: f64,
    pub trace: Vec<IterationRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedInstance {
    pub name: String,
    pub instance: InstanceFile,
}

/// A fully self-contained unit of work.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Job {
    Gen {
        params: GenParams,
    },
    Solve {
        instance: InstanceFile,
        solver: SolverConfig,
    },
    Coreset {
        instance: InstanceFile,
        epsilon: f64,
        certify: bool,
        anchor: AnchorOptions,
    },
    Oracle {
        instance: InstanceFile,
        kcenter: bool,
        #[serde(default)]
        grid_step: Option<f64>,
    },
    Ballcheck {
        instance: InstanceFile,
        requests: Vec<Request>,
        eta: f64,
    },
    Bench {
        instances: Vec<NamedInstance>,
        solver: SolverConfig,
        oracle: bool,
    },
    Diag {
        trace: TraceFile,
    },
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Gen { .. } => "gen",
            Job::Solve { .. } => "solve",
            Job::Coreset { .. } => "coreset",
            Job::Oracle { .. } => "oracle",
            Job::Ballcheck { .. } => "ballcheck",
            Job::Bench { .. } => "bench",
            Job::Diag { .. } => "diag",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    /// Command line that produced the report.
    pub command: Vec<String>,
    pub config: Job,
    /// Wall time per phase in seconds.
    pub timings: BTreeMap<String, f64>,
    pub outcome: Value,
}

/// Result of executing a job: the outcome payload plus side products that callers
/// may write to files.
#[derive(Clone, Debug)]
pub struct Execution {
    pub outcome: Value,
    pub timings: BTreeMap<String, f64>,
    pub exit_code: i32,
    /// Instance JSON for `gen`, CSV for `bench`.
    pub artifact: Option<String>,
    pub trace: Option<TraceFile>,
}

#[derive(Serialize)]
struct SolveOutcome<'a> {
    status: &'static str,
    best_cost: Option<f64>,
    cost_bicriteria: Option<f64>,
    radius_used: f64,
    centers: Option<&'a [Site]>,
    best_guess: Option<f64>,
    best_seed: Option<u64>,
    lower: f64,
    upper: f64,
    iteration_cap: u64,
    traced_runs: usize,
    scatter_violations: usize,
    per_guess: &'a [solver::GuessReport],
}

fn timed<T>(timings: &mut BTreeMap<String, f64>, phase: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.insert(phase.to_string(), start.elapsed().as_secs_f64());
    out
}

fn solve_outcome(report: &solver::SolveReport, epsilon: f64) -> Result<Value> {
    let best = report.best.as_ref();
    Ok(serde_json::to_value(SolveOutcome {
        status: if best.is_some() {
            "solved"
        } else {
            "no_solution"
        },
        best_cost: best.map(|b| b.cost_r_prime),
        cost_bicriteria: best.map(|b| b.cost_bicriteria),
        radius_used: (1.0 + epsilon) * report.r,
        centers: best.map(|b| b.centers.as_slice()),
        best_guess: best.and_then(|b| b.guess),
        best_seed: best.and_then(|b| b.seed),
        lower: report.lower,
        upper: report.upper,
        iteration_cap: report.iteration_cap,
        traced_runs: report.traced_runs,
        scatter_violations: report.scatter_violations,
        per_guess: &report.guesses,
    })?)
}

#[derive(Serialize)]
struct BenchRow<'a> {
    instance: &'a str,
    guess_index: usize,
    guess: f64,
    rep: usize,
    seed: u64,
    outcome: &'a str,
    iterations: u64,
    nearby_steps: u64,
    faraway_steps: u64,
    cost_r_prime: Option<f64>,
    cost_bicriteria: Option<f64>,
    opt_cost: Option<f64>,
    ratio: Option<f64>,
}

const BENCH_HEADER: [&str; 13] = [
    "instance",
    "guess_index",
    "guess",
    "rep",
    "seed",
    "outcome",
    "iterations",
    "nearby_steps",
    "faraway_steps",
    "cost_r_prime",
    "cost_bicriteria",
    "opt_cost",
    "ratio",
];

fn bench(
    instances: &[NamedInstance],
    config: &SolverConfig,
    with_oracle: bool,
) -> Result<(String, usize)> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    writer.write_record(BENCH_HEADER).map_err(csv_error)?;
    let mut rows = 0;
    let mut cfg = config.clone();
    cfg.keep_runs = true;
    for named in instances {
        let inst = named.instance.into_instance()?;
        let opt = if with_oracle && inst.space.is_discrete() {
            match oracle::brute_force(&inst.space, inst.k, inst.r, inst.z) {
                Ok(res) => Some(res.opt_cost),
                Err(Error::TooLarge { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let report = match solver::solve(&inst, &cfg) {
            Ok(r) => r,
            Err(Error::NoSolutionFound(r)) => *r,
            Err(e) => return Err(e),
        };
        for g in &report.guesses {
            for run in &g.runs {
                let ratio = match (run.cost_bicriteria, opt) {
                    (Some(c), Some(o)) if o > 0.0 => Some(c / o),
                    _ => None,
                };
                writer
                    .serialize(BenchRow {
                        instance: &named.name,
                        guess_index: g.index,
                        guess: g.guess,
                        rep: run.rep,
                        seed: run.seed,
                        outcome: &run.outcome,
                        iterations: run.iterations,
                        nearby_steps: run.nearby_steps,
                        faraway_steps: run.faraway_steps,
                        cost_r_prime: run.cost_r_prime,
                        cost_bicriteria: run.cost_bicriteria,
                        opt_cost: opt,
                        ratio,
                    })
                    .map_err(csv_error)?;
                rows += 1;
            }
        }
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok((String::from_utf8(bytes).expect("csv output is utf-8"), rows))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Runs a job. Only `solve` can end in [`EXIT_NO_SOLUTION`]; other failures are errors.
pub fn execute(job: &Job) -> Result<Execution> {
    let mut timings = BTreeMap::new();
    let exec = |outcome: Value, timings| Execution {
        outcome,
        timings,
        exit_code: 0,
        artifact: None,
        trace: None,
    };
    match job {
        Job::Gen { params } => {
            let file = timed(&mut timings, "generate", || gen::generate(params))?;
            let text = file.to_json()?;
            let mut e = exec(
                serde_json::json!({
                    "n": params.n,
                    "m": params.m,
                    "kind": params.kind,
                    "instance": file,
                }),
                timings,
            );
            e.artifact = Some(text);
            Ok(e)
        }
        Job::Solve {
            instance,
            solver: cfg,
        } => {
            let inst = timed(&mut timings, "load", || instance.into_instance())?;
            let result = timed(&mut timings, "solve", || solver::solve(&inst, cfg));
            let (report, code) = match result {
                Ok(r) => (r, 0),
                Err(Error::NoSolutionFound(r)) => (*r, EXIT_NO_SOLUTION),
                Err(e) => return Err(e),
            };
            let mut e = exec(solve_outcome(&report, cfg.epsilon)?, timings);
            e.exit_code = code;
            e.trace = report.best.as_ref().map(|b| TraceFile {
                epsilon: cfg.epsilon,
                k: inst.k,
                r: inst.r,
                z: inst.z,
                trace: b.trace.clone(),
            });
            Ok(e)
        }
        Job::Coreset {
            instance,
            epsilon,
            certify,
            anchor,
        } => {
            let inst = timed(&mut timings, "load", || instance.into_instance())?;
            if inst.z != 1.0 {
                return Err(Error::Unsupported(
                    "coresets are built for z = 1 only".into(),
                ));
            }
            let t = timed(&mut timings, "anchor", || {
                coreset::build_anchor_set(&inst, anchor)
            })?;
            let out = timed(&mut timings, "coreset", || {
                coreset::build_coreset(&inst.space, inst.r, *epsilon, &t)
            })?;
            let mut outcome = serde_json::json!({
                "coreset": out.coreset.members(),
                "size": out.coreset.len(),
                "total_weight": out.coreset.total_weight(),
                "measured_alpha": t.measured_ratio(),
                "alpha_bound": t.alpha_bound,
                "alpha_source": t.alpha_source,
                "anchor_size": t.points.len(),
                "anchor_cost": t.cost,
                "anchor_base": t.base_source,
                "opt_cost": t.opt_cost,
                "unit": out.unit,
                "max_level": out.max_level,
                "uncovered": out.uncovered,
                "exact": out.exact,
            });
            if *certify {
                let cert = timed(&mut timings, "certify", || {
                    coreset::certify(&inst.space, &out.coreset, inst.k, inst.r, *epsilon)
                })?;
                outcome["max_relative_error"] = cert.max_relative_error.into();
                outcome["violations"] = cert.violations.into();
                outcome["solutions_checked"] = cert.solutions_checked.into();
            }
            Ok(exec(outcome, timings))
        }
        Job::Oracle {
            instance,
            kcenter,
            grid_step,
        } => {
            let inst = timed(&mut timings, "load", || instance.into_instance())?;
            let space = match grid_step {
                Some(step) if !inst.space.is_discrete() => {
                    let grid = oracle::candidate_grid(&inst.space, *step)?;
                    inst.space.with_candidate_facilities(&grid)?
                }
                _ => inst.space.clone(),
            };
            let grid_restricted = !inst.space.is_discrete();
            let outcome = if *kcenter {
                let radius = timed(&mut timings, "enumerate", || {
                    oracle::kcenter_radius(&space, inst.k)
                })?;
                serde_json::json!({ "radius": radius, "grid_restricted": grid_restricted })
            } else {
                let res = timed(&mut timings, "enumerate", || {
                    oracle::brute_force(&space, inst.k, inst.r, inst.z)
                })?;
                let centers: Vec<Site> = match res.opt_solution.centers() {
                    c if grid_restricted => c
                        .iter()
                        .map(|s| match s {
                            Site::Facility(f) => Site::Coords(
                                space.facility_coords(*f).expect("grid facility").to_vec(),
                            ),
                            other => other.clone(),
                        })
                        .collect(),
                    c => c.to_vec(),
                };
                serde_json::json!({
                    "opt_cost": res.opt_cost,
                    "centers": centers,
                    "enumerated_count": res.enumerated_count,
                    "grid_restricted": grid_restricted,
                })
            };
            Ok(exec(outcome, timings))
        }
        Job::Ballcheck {
            instance,
            requests,
            eta,
        } => {
            let inst = timed(&mut timings, "load", || instance.into_instance())?;
            let q = RequestSet::from_requests(requests.clone())?;
            let out = timed(&mut timings, "solve", || ball::solve(&inst.space, &q, *eta))?;
            Ok(exec(serde_json::to_value(out)?, timings))
        }
        Job::Bench {
            instances,
            solver: cfg,
            oracle: with_oracle,
        } => {
            let (text, rows) = timed(&mut timings, "bench", || {
                bench(instances, cfg, *with_oracle)
            })?;
            let mut e = exec(
                serde_json::json!({ "instances": instances.len(), "rows": rows, "csv": text }),
                timings,
            );
            e.artifact = Some(text);
            Ok(e)
        }
        Job::Diag { trace } => {
            let rep = scatter_diagnostics(&trace.trace, trace.epsilon, trace.k, trace.r);
            Ok(exec(serde_json::to_value(rep)?, timings))
        }
    }
}

fn load_instance_file(path: &Path, z: Option<f64>) -> Result<InstanceFile> {
    let mut file = InstanceFile::load(path)?;
    if let Some(z) = z {
        file.z = z;
    }
    file.into_instance()?;
    Ok(file)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RequestInput {
    List(Vec<Request>),
    Set(RequestSet),
}

fn build_job(command: &Command) -> Result<Job> {
    Ok(match command {
        Command::Gen(a) => Job::Gen {
            params: GenParams {
                kind: a.kind,
                n: a.n,
                m: a.m,
                dim: a.dim,
                k: a.k,
                r: a.r,
                z: a.z,
                seed: a.seed,
            },
        },
        Command::Solve(a) => {
            let mut cfg = SolverConfig::new(a.epsilon);
            cfg.repetitions = a.repetitions;
            cfg.iteration_cap = a.iteration_cap;
            cfg.seed = a.seed;
            cfg.guess = a.guess;
            cfg.guess_multiplier = a.guess_multiplier;
            cfg.keep_runs = a.per_run;
            cfg.trace = a.trace.is_some();
            Job::Solve {
                instance: load_instance_file(&a.instance, a.z)?,
                solver: cfg,
            }
        }
        Command::Coreset(a) => Job::Coreset {
            instance: load_instance_file(&a.instance, None)?,
            epsilon: a.epsilon,
            certify: a.certify,
            anchor: AnchorOptions {
                seed: a.seed,
                ..AnchorOptions::default()
            },
        },
        Command::Oracle(a) => Job::Oracle {
            instance: load_instance_file(&a.instance, a.z)?,
            kcenter: a.kcenter,
            grid_step: a.grid_step,
        },
        Command::Ballcheck(a) => {
            let text = std::fs::read_to_string(&a.requests)?;
            let requests = match serde_json::from_str::<RequestInput>(&text)? {
                RequestInput::List(l) => l,
                RequestInput::Set(s) => s.requests().to_vec(),
            };
            Job::Ballcheck {
                instance: load_instance_file(&a.instance, None)?,
                requests,
                eta: a.eta,
            }
        }
        Command::Bench(a) => {
            let mut paths: Vec<PathBuf> = glob::glob(&a.instances)
                .map_err(|e| Error::InvalidArgument(format!("bad glob: {e}")))?
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Io(e.into()))?;
            paths.sort();
            let instances = paths
                .iter()
                .map(|p| {
                    Ok(NamedInstance {
                        name: p.display().to_string(),
                        instance: load_instance_file(p, None)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut cfg = SolverConfig::new(a.epsilon);
            cfg.repetitions = a.repetitions;
            cfg.iteration_cap = a.iteration_cap;
            cfg.seed = a.seed;
            Job::Bench {
                instances,
                solver: cfg,
                oracle: a.oracle,
            }
        }
        Command::Diag(a) => Job::Diag {
            trace: serde_json::from_str(&std::fs::read_to_string(&a.trace)?)?,
        },
        Command::Replay(_) => unreachable!("replay is handled separately"),
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Canonical JSON text of an outcome payload (object keys sorted).
pub fn normalized(value: &Value) -> String {
    fn sort(v: &Value) -> Value {
        match v {
            Value::Object(map) => {
                let sorted: BTreeMap<&String, Value> =
                    map.iter().map(|(k, v)| (k, sort(v))).collect();
                serde_json::to_value(sorted).expect("string keys")
            }
            Value::Array(a) => Value::Array(a.iter().map(sort).collect()),
            other => other.clone(),
        }
    }
    serde_json::to_string(&sort(value)).expect("json values serialize")
}

/// Executes a job and wraps it in a report.
pub fn run_job(job: Job, argv: Vec<String>) -> Result<(RunReport, Execution)> {
    let exec = execute(&job)?;
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        command: argv,
        config: job,
        timings: exec.timings.clone(),
        outcome: exec.outcome.clone(),
    };
    Ok((report, exec))
}

/// Re-executes the job embedded in `report`; returns the new report and whether the
/// outcomes agree.
pub fn replay(report: &RunReport) -> Result<(RunReport, bool)> {
    if report.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidArgument(format!(
            "unsupported report schema {}",
            report.schema_version
        )));
    }
    let (fresh, _) = run_job(report.config.clone(), report.command.clone())?;
    let same = normalized(&fresh.outcome) == normalized(&report.outcome);
    Ok((fresh, same))
}

fn dispatch(cli: Cli, argv: Vec<String>) -> Result<i32> {
    if let Command::Replay(a) = &cli.command {
        let original: RunReport = serde_json::from_str(&std::fs::read_to_string(&a.report)?)?;
        let (fresh, same) = replay(&original)?;
        emit(a.out.as_deref(), &serde_json::to_string_pretty(&fresh)?)?;
        if !same {
            eprintln!("replayed outcome differs from the report");
            return Ok(EXIT_ERROR);
        }
        return Ok(0);
    }
    let job = build_job(&cli.command)?;
    let (report, exec) = run_job(job, argv)?;
    let report_text = serde_json::to_string_pretty(&report)?;
    match &cli.command {
        Command::Gen(a) => {
            write_atomic(
                &a.out,
                exec.artifact.as_deref().unwrap_or_default().as_bytes(),
            )?;
            if let Some(p) = &a.report {
                write_atomic(p, report_text.as_bytes())?;
            }
        }
        Command::Bench(a) => {
            let csv = exec.artifact.as_deref().unwrap_or_default();
            match &a.out {
                Some(p) => write_atomic(p, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            if let Some(p) = &a.report {
                write_atomic(p, report_text.as_bytes())?;
            }
        }
        Command::Solve(a) => {
            if let (Some(p), Some(t)) = (&a.trace, &exec.trace) {
                write_atomic(p, serde_json::to_string_pretty(t)?.as_bytes())?;
            }
            emit(a.out.as_deref(), &report_text)?;
        }
        Command::Coreset(a) => emit(a.out.as_deref(), &report_text)?,
        Command::Oracle(a) => emit(a.out.as_deref(), &report_text)?,
        Command::Ballcheck(a) => emit(a.out.as_deref(), &report_text)?,
        Command::Diag(a) => emit(a.out.as_deref(), &report_text)?,
        Command::Replay(_) => unreachable!(),
    }
    Ok(exec.exit_code)
}

fn configure_threads() {
    if let Some(n) = std::env::var("HYBRID_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    configure_threads();
    match dispatch(cli, argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_instance() -> InstanceFile {
        gen::generate(&GenParams {
            kind: GenKind::EuclideanUniform,
            n: 8,
            m: 5,
            dim: 2,
            k: 2,
            r: 1.0,
            z: 1.0,
            seed: 1,
        })
        .unwrap()
    }

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn solve_job_replays() {
        let mut cfg = SolverConfig::new(0.5);
        cfg.repetitions = 4;
        cfg.trace = true;
        let job = Job::Solve {
            instance: small_instance(),
            solver: cfg,
        };
        let (report, exec) = run_job(job, vec!["hybrid".into()]).unwrap();
        assert_eq!(exec.exit_code, 0);
        let text = serde_json::to_string(&report).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        let (_, same) = replay(&back).unwrap();
        assert!(same);
    }

    #[test]
    fn normalization_sorts_keys() {
        let a: Value = serde_json::from_str(r#"{"b":1,"a":{"d":2,"c":[{"y":1,"x":2}]}}"#).unwrap();
        assert_eq!(normalized(&a), r#"{"a":{"c":[{"x":2,"y":1}],"d":2},"b":1}"#);
    }

    #[test]
    fn bench_row_count() {
        let job = Job::Bench {
            instances: vec![NamedInstance {
                name: "a".into(),
                instance: small_instance(),
            }],
            solver: SolverConfig {
                repetitions: 2,
                ..SolverConfig::new(0.5)
            },
            oracle: true,
        };
        let exec = execute(&job).unwrap();
        let csv = exec.artifact.unwrap();
        let rows = csv.lines().count() - 1;
        assert_eq!(rows % 2, 0);
        assert_eq!(exec.outcome["rows"].as_u64().unwrap() as usize, rows);
        let empty = Job::Bench {
            instances: vec![],
            solver: SolverConfig::new(0.5),
            oracle: false,
        };
        let csv = execute(&empty).unwrap().artifact.unwrap();
        assert_eq!(csv.lines().count(), 1);
    }
}
