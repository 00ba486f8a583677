//! Command-line front end.
//!
//! Exit codes: 0 success or passing verdict, 1 failing verdict, 2 usage or
//! configuration error, 3 runtime error.
//!
//! Every flag can also be given in a `key = value` file passed with
//! `--config`; the key is the long flag name without dashes. Command-line
//! flags override the file.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use crate::difftest::{self, SweepGrid, SweepTarget};
use crate::eigen::{OptimizerConfig, OptimizerKind};
use crate::error::{Error, Result};
use crate::pipeline::{self, RunConfig, SegmentSpec, TrajectorySource};
use crate::sim::ReadoutNoiseModel;
use crate::swap::{self, SwapMode, SwapTestConfig};
use crate::util::format_significant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hybridmd",
    version,
    about = "Hybrid quantum-classical collective variables for MD trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the collective-variable series and write it as CSV.
    #[command(args_override_self = true)]
    Run(RunArgs),
    /// Compare a quantum variant with its classical oracle.
    #[command(args_override_self = true)]
    Difftest(DifftestArgs),
    /// Evaluate a grid of configurations and pick the lowest-MSE cell.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Write a synthetic trajectory with uniform coordinates in [0, 1).
    #[command(name = "gen-traj", args_override_self = true)]
    GenTraj(GenTrajArgs),
    /// Run the distance swap test on one atom pair and show the numbers.
    #[command(name = "swap-demo", args_override_self = true)]
    SwapDemo(SwapDemoArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Key-value file supplying defaults for any flag
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base seed [config: seed]
    #[arg(long, env = "HYBRIDMD_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads [config: jobs]
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
}

#[derive(Debug, Args)]
struct TrajectoryArgs {
    /// Trajectory file [config: traj]
    #[arg(long, value_name = "PATH", conflicts_with = "gen_frames")]
    traj: Option<PathBuf>,
    /// Generate a synthetic trajectory with this many frames [config: gen-frames]
    #[arg(long, value_name = "N")]
    gen_frames: Option<usize>,
    /// Atoms per synthetic frame [config: gen-atoms]
    #[arg(long, value_name = "N")]
    gen_atoms: Option<usize>,
    /// Seed for the synthetic trajectory [config: gen-seed]
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    gen_seed: u64,
    /// Atom groups, e.g. "0-3;4-7" or "0-3,4-7" [config: segments]
    #[arg(long, value_name = "SPEC")]
    segments: Option<String>,
    /// Distance variant: classical | quantum [config: distance]
    #[arg(long, default_value = "classical")]
    distance: String,
    /// Eigenvalue variant: classical | quantum [config: eigen]
    #[arg(long, default_value = "classical")]
    eigen: String,
    /// Record task-5 wall time in elapsed_s: on | off [config: timing]
    #[arg(long, default_value = "off", value_parser = parse_switch, action = clap::ArgAction::Set)]
    timing: bool,
}

#[derive(Debug, Args)]
struct SwapArgs {
    /// exact | sampled [config: swap-mode]
    #[arg(long, default_value = "sampled")]
    swap_mode: String,
    /// Shots per swap-test circuit [config: shots]
    #[arg(long, default_value_t = swap::DEFAULT_SHOTS)]
    shots: u64,
    /// Readout flip probability "p" or "p01,p10" [config: noise]
    #[arg(long, value_name = "P", value_parser = parse_noise)]
    noise: Option<ReadoutNoiseModel>,
    /// Calibration-matrix mitigation: on | off [config: mitigate]
    #[arg(long, default_value = "off", value_parser = parse_switch, action = clap::ArgAction::Set)]
    mitigate: bool,
}

#[derive(Debug, Args)]
struct VqeArgs {
    /// Ansatz depth [config: depth]
    #[arg(long, default_value_t = crate::eigen::DEFAULT_DEPTH)]
    depth: usize,
    /// nelder_mead | spsa [config: optimizer]
    #[arg(long, default_value = "nelder_mead")]
    optimizer: String,
    /// Optimizer iteration budget per restart [config: max-iterations]
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    /// Convergence tolerance on the cost [config: tolerance]
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Independent optimizer restarts [config: restarts]
    #[arg(long, default_value_t = 5)]
    restarts: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    trajectory: TrajectoryArgs,
    #[command(flatten)]
    swap: SwapArgs,
    #[command(flatten)]
    vqe: VqeArgs,
    /// CSV output path; stdout when omitted [config: output]
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DifftestArgs {
    /// distance | eigen | e2e
    target: String,
    #[command(flatten)]
    common: CommonArgs,
    /// Random inputs to compare [config: trials]
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// MSE threshold; defaults to 1e-2 (distance) or (1e-2 * mean lev)^2 [config: threshold]
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    trajectory: TrajectoryArgs,
    #[command(flatten)]
    swap: SwapArgs,
    #[command(flatten)]
    vqe: VqeArgs,
    /// JSON report path [config: output]
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// distance | eigen
    target: String,
    #[command(flatten)]
    common: CommonArgs,
    /// Ansatz depths, comma separated [config: depths]
    #[arg(long, value_delimiter = ',', default_value = "2")]
    depths: Vec<String>,
    /// Optimizers, comma separated [config: optimizers]
    #[arg(long, value_delimiter = ',', default_value = "nelder_mead")]
    optimizers: Vec<String>,
    /// Shot counts, comma separated [config: shots]
    #[arg(long, value_delimiter = ',', default_value = "8192")]
    shots: Vec<String>,
    /// Mitigation settings, comma separated on/off [config: mitigate]
    #[arg(long, value_delimiter = ',', default_value = "off")]
    mitigate: Vec<String>,
    /// Readout flip probability "p" or "p01,p10" [config: noise]
    #[arg(long, value_name = "P", value_parser = parse_noise)]
    noise: Option<ReadoutNoiseModel>,
    /// exact | sampled [config: swap-mode]
    #[arg(long, default_value = "sampled")]
    swap_mode: String,
    /// Trials per cell; 50 for distance, 10 for eigen when omitted [config: trials]
    #[arg(long)]
    trials: Option<usize>,
    /// Optimizer restarts [config: restarts]
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    /// Optimizer iteration budget [config: max-iterations]
    #[arg(long, default_value_t = 500)]
    max_iterations: usize,
    /// MSE threshold per cell [config: threshold]
    #[arg(long)]
    threshold: Option<f64>,
    /// JSON result path [config: output]
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenTrajArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of frames [config: frames]
    #[arg(long)]
    frames: usize,
    /// Atoms per frame [config: atoms]
    #[arg(long)]
    atoms: usize,
    /// Output trajectory path [config: output]
    #[arg(short, long, value_name = "PATH")]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SwapDemoArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// First atom, comma-separated coordinates [config: u]
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    /// Second atom, comma-separated coordinates [config: v]
    #[arg(long, allow_hyphen_values = true)]
    v: String,
    /// exact | sampled [config: mode]
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Shots in sampled mode [config: shots]
    #[arg(long, default_value_t = swap::DEFAULT_SHOTS)]
    shots: u64,
    /// Readout flip probability "p" or "p01,p10" [config: noise]
    #[arg(long, value_name = "P", value_parser = parse_noise)]
    noise: Option<ReadoutNoiseModel>,
    /// Calibration-matrix mitigation: on | off [config: mitigate]
    #[arg(long, default_value = "off", value_parser = parse_switch, action = clap::ArgAction::Set)]
    mitigate: bool,
}

fn parse_switch(s: &str) -> std::result::Result<bool, String> {
    match s.trim() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected on or off, found '{other}'")),
    }
}

fn parse_noise(s: &str) -> std::result::Result<ReadoutNoiseModel, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| format!("bad probability '{t}'"))
    };
    let model = match parts.as_slice() {
        [p] => ReadoutNoiseModel::symmetric(num(p)?),
        [p01, p10] => ReadoutNoiseModel::new(num(p01)?, num(p10)?),
        _ => return Err("expected p or p01,p10".into()),
    };
    model.map_err(|e| e.to_string())
}

fn parse_coords(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("bad coordinate '{t}'")))
        })
        .collect()
}

/// Insert `--key value` pairs from the `--config` file directly after the
/// subcommand name, so explicit flags that follow take precedence.
fn expand_config_file(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::config(format!("cannot read config file {path}: {e}")))?;
    let mut injected = Vec::new();
    for (key, value) in pipeline::parse_key_values(&text)? {
        if key == "config" {
            return Err(Error::config(
                "config files cannot include other config files",
            ));
        }
        injected.push(format!("--{}", key.replace('_', "-")));
        injected.push(value);
    }
    let sub = args
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map_or(args.len(), |p| p + 2);
    let mut out = args[..sub.min(args.len())].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[sub.min(args.len())..]);
    Ok(out)
}

/// Parse `args` (including the program name), execute, and return the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run_cli(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = match expand_config_file(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Difftest(a) => cmd_difftest(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::GenTraj(a) => cmd_gen_traj(a, out),
        Command::SwapDemo(a) => cmd_swap_demo(a, out),
    }
}

fn swap_config(a: &SwapArgs, seed: u64) -> Result<SwapTestConfig> {
    Ok(SwapTestConfig {
        shots: a.shots,
        seed,
        noise: a.noise,
        mitigate: a.mitigate,
        mode: a.swap_mode.parse()?,
    })
}

fn optimizer_config(a: &VqeArgs, seed: u64) -> Result<OptimizerConfig> {
    Ok(OptimizerConfig {
        kind: a.optimizer.parse()?,
        max_iterations: a.max_iterations,
        tolerance: a.tolerance,
        seed,
        restarts: a.restarts,
    })
}

fn run_config(
    common: &CommonArgs,
    t: &TrajectoryArgs,
    s: &SwapArgs,
    v: &VqeArgs,
    output: Option<PathBuf>,
) -> Result<RunConfig> {
    let source = match (&t.traj, t.gen_frames, t.gen_atoms) {
        (Some(path), _, _) => {
            if !path.exists() {
                return Err(Error::config(format!(
                    "trajectory file {} does not exist",
                    path.display()
                )));
            }
            TrajectorySource::File(path.clone())
        }
        (None, Some(frames), Some(atoms)) => TrajectorySource::Synthetic {
            frames,
            atoms,
            seed: t.gen_seed,
        },
        _ => {
            return Err(Error::config(
                "give --traj or both --gen-frames and --gen-atoms",
            ))
        }
    };
    let segments = SegmentSpec::parse(
        t.segments
            .as_deref()
            .ok_or_else(|| Error::config("--segments is required"))?,
    )?;
    let mut cfg = RunConfig::new(source, segments);
    cfg.distance_variant = t.distance.parse()?;
    cfg.eigen_variant = t.eigen.parse()?;
    cfg.swap = swap_config(s, common.seed)?;
    cfg.depth = v.depth;
    cfg.optimizer = optimizer_config(v, common.seed)?;
    cfg.output = output;
    cfg.seed = common.seed;
    cfg.jobs = common.jobs as usize;
    cfg.record_timing = t.timing;
    Ok(cfg)
}

fn cmd_run(a: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = run_config(&a.common, &a.trajectory, &a.swap, &a.vqe, a.output.clone())?;
    let start = Instant::now();
    let series = pipeline::compute_cv_series(&cfg)?;
    let csv = series.to_csv();
    let frames = series
        .records
        .iter()
        .map(|r| r.frame)
        .max()
        .map_or(0, |f| f + 1);
    let summary = format!(
        "frames={} pairs={} distance={} eigen={} candidates={} wall_s={:.3}",
        frames,
        cfg.segments.num_pairs(),
        cfg.distance_variant,
        cfg.eigen_variant,
        series
            .plan
            .candidates()
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(","),
        start.elapsed().as_secs_f64()
    );
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, csv)?;
            writeln!(out, "{summary}")?;
            writeln!(out, "wrote {}", path.display())?;
        }
        None => {
            write!(out, "{csv}")?;
            writeln!(err, "{summary}")?;
        }
    }
    Ok(EXIT_OK)
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn cmd_difftest(a: DifftestArgs, out: &mut dyn Write) -> Result<i32> {
    let seed = a.common.seed;
    let jobs = a.common.jobs as usize;
    let report = match a.target.as_str() {
        "distance" => {
            let cfg = swap_config(&a.swap, seed)?;
            let threshold = a.threshold.unwrap_or(difftest::DEFAULT_DISTANCE_THRESHOLD);
            difftest::unit_test_distance(a.trials, &cfg, threshold, seed, jobs)?
        }
        "eigen" => {
            let opt = optimizer_config(&a.vqe, seed)?;
            difftest::unit_test_eigen(a.trials, a.vqe.depth, &opt, a.threshold, seed, jobs)?
        }
        "e2e" | "end-to-end" => {
            let cfg = run_config(&a.common, &a.trajectory, &a.swap, &a.vqe, None)?;
            difftest::end_to_end_diff(&cfg, a.threshold)?
        }
        other => {
            return Err(Error::config(format!(
                "unknown difftest target '{other}' (expected distance, eigen or e2e)"
            )))
        }
    };
    write!(out, "{}", difftest::render_report(&report))?;
    if let Some(path) = &a.output {
        write_json(&report, path)?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn parse_list<T>(
    name: &str,
    items: &[String],
    parse: impl Fn(&str) -> Result<T>,
) -> Result<Vec<T>> {
    let values: Vec<T> = items
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::config(format!("sweep axis --{name} is empty")));
    }
    Ok(values)
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let target: SweepTarget = a.target.parse()?;
    let mut grid = SweepGrid::new(target);
    let number = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| Error::config(format!("bad integer '{s}'")))
    };
    grid.depths = parse_list("depths", &a.depths, |s| number(s).map(|d| d as usize))?;
    grid.optimizers = parse_list("optimizers", &a.optimizers, |s| s.parse::<OptimizerKind>())?;
    grid.shots = parse_list("shots", &a.shots, number)?;
    grid.mitigation = parse_list("mitigate", &a.mitigate, |s| {
        parse_switch(s).map_err(Error::Config)
    })?;
    grid.noise = a.noise;
    grid.swap_mode = a.swap_mode.parse()?;
    if let Some(trials) = a.trials {
        grid.trials = trials;
    }
    grid.restarts = a.restarts;
    grid.max_iterations = a.max_iterations;
    grid.threshold = a.threshold;
    grid.seed = a.common.seed;

    let result = difftest::sweep(&grid, a.common.jobs as usize)?;
    write!(out, "{}", difftest::render_sweep(&result))?;
    let best = result.best_cell();
    writeln!(
        out,
        "best: cell {} depth={} optimizer={} shots={} mitigate={} mse={:e}",
        best.index,
        best.config.depth,
        best.config.optimizer,
        best.config.shots,
        if best.config.mitigate { "on" } else { "off" },
        best.report.mse
    )?;
    if let Some(path) = &a.output {
        write_json(&result, path)?;
    }
    Ok(if best.report.passed() {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn cmd_gen_traj(a: GenTrajArgs, out: &mut dyn Write) -> Result<i32> {
    let t = pipeline::gen_trajectory(a.frames, a.atoms, a.common.seed)?;
    t.write(&a.output)?;
    writeln!(
        out,
        "wrote {} frames x {} atoms to {}",
        a.frames,
        a.atoms,
        a.output.display()
    )?;
    Ok(EXIT_OK)
}

fn cmd_swap_demo(a: SwapDemoArgs, out: &mut dyn Write) -> Result<i32> {
    let u = parse_coords(&a.u)?;
    let v = parse_coords(&a.v)?;
    let cfg = SwapTestConfig {
        shots: a.shots,
        seed: a.common.seed,
        noise: a.noise,
        mitigate: a.mitigate,
        mode: a.mode.parse::<SwapMode>()?,
    };
    let pair = crate::encoding::encode_pair(&u, &v)?;
    let circuit = swap::build_swap_test_circuit(&pair)?;
    let p0 = swap::estimate_p0(&circuit, &cfg)?;
    let rows = [
        ("qubits", circuit.num_qubits().to_string()),
        ("P0", format_significant(p0, 12)),
        ("Z", format_significant(pair.norm, 12)),
        (
            "D2",
            format_significant(swap::distance_from_p0(p0, pair.norm), 12),
        ),
        (
            "D2_classical",
            format_significant(swap::classical_squared_distance(&u, &v), 12),
        ),
    ];
    for (k, val) in rows {
        writeln!(out, "{k:<13}{val}")?;
    }
    Ok(EXIT_OK)
}
