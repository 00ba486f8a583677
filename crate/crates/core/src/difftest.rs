//! Differential testing of quantum variants against classical oracles.
//!
//! Each check runs both variants on identical random inputs and reduces the
//! residuals to a mean squared error compared against a threshold. A sweep
//! repeats a check over a grid of configurations with matched inputs and
//! keeps the configuration with the lowest MSE.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{self, OptimizerConfig, OptimizerKind};
use crate::error::{Error, Result};
use crate::pipeline::{self, compute_cv_series, random_atom, RunConfig};
use crate::sim::ReadoutNoiseModel;
use crate::swap::{self, Provenance, SwapMode, SwapTestConfig};
use crate::util::{derive_seed, ordered_map};

/// Default absolute MSE threshold for unit-box distance checks.
pub const DEFAULT_DISTANCE_THRESHOLD: f64 = 1e-2;
/// Eigenvalue checks default to `(EIGEN_RELATIVE_TOLERANCE · mean lev)²`.
pub const EIGEN_RELATIVE_TOLERANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_mse(mse: f64, threshold: f64) -> Self {
        if mse <= threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    pub task: String,
    pub trials: usize,
    pub mse: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    /// Variant output per trial.
    pub observed: Vec<f64>,
    /// Oracle output per trial.
    pub expected: Vec<f64>,
    /// `observed − expected` per trial.
    pub residuals: Vec<f64>,
    pub config: BTreeMap<String, String>,
}

impl DiffReport {
    pub fn new(
        task: &str,
        observed: Vec<f64>,
        expected: Vec<f64>,
        threshold: f64,
        config: BTreeMap<String, String>,
    ) -> Result<Self> {
        let mse = mse(&observed, &expected)?;
        let residuals = observed.iter().zip(&expected).map(|(o, e)| o - e).collect();
        Ok(Self {
            task: task.to_string(),
            trials: observed.len(),
            mse,
            threshold,
            verdict: Verdict::from_mse(mse, threshold),
            observed,
            expected,
            residuals,
            config,
        })
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Recompute the MSE and verdict from the stored residuals and compare.
    pub fn is_consistent(&self) -> bool {
        if self.residuals.len() != self.trials || self.trials == 0 {
            return false;
        }
        let recomputed =
            self.residuals.iter().map(|r| r * r).sum::<f64>() / self.residuals.len() as f64;
        (recomputed - self.mse).abs() <= 1e-12 * self.mse.max(1.0)
            && Verdict::from_mse(self.mse, self.threshold) == self.verdict
    }
}

/// Mean squared error `(1/n) Σ (observedᵢ − expectedᵢ)²`.
pub fn mse(observed: &[f64], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() {
        return Err(Error::dimension(format!(
            "{} observations against {} expectations",
            observed.len(),
            expected.len()
        )));
    }
    if observed.is_empty() {
        return Err(Error::config("MSE of an empty sample"));
    }
    let sum: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e))
        .sum();
    Ok(sum / observed.len() as f64)
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::config("at least one trial is required"));
    }
    Ok(())
}

fn swap_snapshot(cfg: &SwapTestConfig, out: &mut BTreeMap<String, String>) {
    out.insert("swap_mode".into(), cfg.mode.to_string());
    out.insert("shots".into(), cfg.shots.to_string());
    out.insert("mitigate".into(), cfg.mitigate.to_string());
    out.insert(
        "noise".into(),
        cfg.noise
            .map_or("none".into(), |n| format!("p01={},p10={}", n.p01, n.p10)),
    );
}

fn optimizer_snapshot(depth: usize, opt: &OptimizerConfig, out: &mut BTreeMap<String, String>) {
    out.insert("depth".into(), depth.to_string());
    out.insert("optimizer".into(), opt.kind.to_string());
    out.insert("restarts".into(), opt.restarts.to_string());
    out.insert("max_iterations".into(), opt.max_iterations.to_string());
    out.insert("tolerance".into(), opt.tolerance.to_string());
}

/// Random unit-box atom pair for trial `trial`.
pub fn trial_atoms(seed: u64, trial: usize) -> ([f64; 3], [f64; 3]) {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial as u64));
    (random_atom(&mut rng), random_atom(&mut rng))
}

/// Random pair of segments with `atoms_per_segment` atoms each.
pub fn trial_segments(
    seed: u64,
    trial: usize,
    atoms_per_segment: usize,
) -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial as u64));
    let a = (0..atoms_per_segment)
        .map(|_| random_atom(&mut rng))
        .collect();
    let b = (0..atoms_per_segment)
        .map(|_| random_atom(&mut rng))
        .collect();
    (a, b)
}

/// Swap-test squared distances against the classical squared distance on
/// `trials` random atom pairs. `cfg.seed` is ignored: trial `i` samples with
/// a stream derived from `(seed, i)`.
pub fn unit_test_distance(
    trials: usize,
    cfg: &SwapTestConfig,
    threshold: f64,
    seed: u64,
    jobs: usize,
) -> Result<DiffReport> {
    check_trials(trials)?;
    let indices: Vec<usize> = (0..trials).collect();
    let pairs = ordered_map(&indices, jobs, |_, &i| {
        let (u, v) = trial_atoms(seed, i);
        let trial_cfg = cfg.with_seed(derive_seed(derive_seed(seed, i as u64), 1));
        let quantum = swap::squared_distance(&u, &v, &trial_cfg)?;
        Ok((quantum, swap::classical_squared_distance(&u, &v)))
    })?;
    let (observed, expected): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let mut config = BTreeMap::new();
    swap_snapshot(cfg, &mut config);
    config.insert("seed".into(), seed.to_string());
    DiffReport::new("distance", observed, expected, threshold, config)
}

/// VQE largest eigenvalue against the Jacobi oracle on BPMs of random
/// two-atom segment pairs. With no threshold, uses
/// `(1e-2 · mean classical lev)²`.
pub fn unit_test_eigen(
    trials: usize,
    depth: usize,
    optimizer: &OptimizerConfig,
    threshold: Option<f64>,
    seed: u64,
    jobs: usize,
) -> Result<DiffReport> {
    check_trials(trials)?;
    let indices: Vec<usize> = (0..trials).collect();
    let pairs = ordered_map(&indices, jobs, |_, &i| {
        let (a, b) = trial_segments(seed, i, 2);
        let bpm = pipeline::extract_bpm(&a, &b, swap::classical_distance_matrix)?;
        let classical = eigen::classical_largest_eigenvalue(&bpm)?;
        let opt = OptimizerConfig {
            seed: derive_seed(derive_seed(seed, i as u64), 1),
            ..optimizer.clone()
        };
        let (quantum, _) = eigen::quantum_largest_eigenvalue(&bpm, depth, &opt)?;
        Ok((quantum, classical))
    })?;
    let (observed, expected): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let threshold = threshold.unwrap_or_else(|| relative_threshold(&expected));
    let mut config = BTreeMap::new();
    optimizer_snapshot(depth, optimizer, &mut config);
    config.insert("seed".into(), seed.to_string());
    DiffReport::new("eigen", observed, expected, threshold, config)
}

fn relative_threshold(expected: &[f64]) -> f64 {
    let mean = expected.iter().sum::<f64>() / expected.len() as f64;
    (EIGEN_RELATIVE_TOLERANCE * mean).powi(2)
}

/// Run `config` as configured and with both candidate tasks classical, on
/// the same input and seeds, and compare the full collective-variable
/// series.
pub fn end_to_end_diff(config: &RunConfig, threshold: Option<f64>) -> Result<DiffReport> {
    let oracle =
        compute_cv_series(&config.with_variants(Provenance::Classical, Provenance::Classical))?;
    let variant = compute_cv_series(config)?;
    if oracle.records.len() != variant.records.len() {
        return Err(Error::Internal(format!(
            "series lengths differ: {} classical vs {} configured",
            oracle.records.len(),
            variant.records.len()
        )));
    }
    let expected = oracle.levs();
    let observed = variant.levs();
    let threshold = threshold.unwrap_or_else(|| relative_threshold(&expected));
    let mut snapshot = BTreeMap::new();
    snapshot.insert(
        "distance_variant".into(),
        config.distance_variant.to_string(),
    );
    snapshot.insert("eigen_variant".into(), config.eigen_variant.to_string());
    snapshot.insert("segments".into(), config.segments.to_string());
    snapshot.insert("seed".into(), config.seed.to_string());
    swap_snapshot(&config.swap, &mut snapshot);
    optimizer_snapshot(config.depth, &config.optimizer, &mut snapshot);
    DiffReport::new("end_to_end", observed, expected, threshold, snapshot)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepTarget {
    Distance,
    Eigen,
}

impl std::str::FromStr for SweepTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(SweepTarget::Distance),
            "eigen" => Ok(SweepTarget::Eigen),
            other => Err(Error::config(format!(
                "unknown sweep target '{other}' (expected distance or eigen)"
            ))),
        }
    }
}

/// Configuration grid. Distance sweeps vary shots and mitigation; eigen
/// sweeps vary depth and optimizer. Axes that do not apply still multiply
/// the cell count, so keep them at one value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub target: SweepTarget,
    pub depths: Vec<usize>,
    pub optimizers: Vec<OptimizerKind>,
    pub shots: Vec<u64>,
    pub mitigation: Vec<bool>,
    pub trials: usize,
    pub seed: u64,
    pub swap_mode: SwapMode,
    pub noise: Option<ReadoutNoiseModel>,
    pub restarts: usize,
    pub max_iterations: usize,
    /// `None` selects the target's default threshold.
    pub threshold: Option<f64>,
}

impl SweepGrid {
    pub fn new(target: SweepTarget) -> Self {
        let opt = OptimizerConfig::default();
        Self {
            target,
            depths: vec![eigen::DEFAULT_DEPTH],
            optimizers: vec![OptimizerKind::NelderMead],
            shots: vec![swap::DEFAULT_SHOTS],
            mitigation: vec![false],
            trials: match target {
                SweepTarget::Distance => 50,
                SweepTarget::Eigen => 10,
            },
            seed: 0,
            swap_mode: SwapMode::Sampled,
            noise: None,
            restarts: opt.restarts,
            max_iterations: opt.max_iterations,
            threshold: None,
        }
    }

    pub fn size(&self) -> usize {
        self.depths.len() * self.optimizers.len() * self.shots.len() * self.mitigation.len()
    }

    fn validate(&self) -> Result<()> {
        for (name, len) in [
            ("depths", self.depths.len()),
            ("optimizers", self.optimizers.len()),
            ("shots", self.shots.len()),
            ("mitigation", self.mitigation.len()),
        ] {
            if len == 0 {
                return Err(Error::config(format!("sweep axis '{name}' is empty")));
            }
        }
        check_trials(self.trials)
    }

    fn cells(&self) -> Vec<CellConfig> {
        let mut out = Vec::with_capacity(self.size());
        for &depth in &self.depths {
            for &optimizer in &self.optimizers {
                for &shots in &self.shots {
                    for &mitigate in &self.mitigation {
                        out.push(CellConfig {
                            depth,
                            optimizer,
                            shots,
                            mitigate,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellConfig {
    pub depth: usize,
    pub optimizer: OptimizerKind,
    pub shots: u64,
    pub mitigate: bool,
}

impl CellConfig {
    /// Preference order among equal-MSE cells: fewer shots, shallower
    /// ansatz, mitigation off.
    fn preference(&self) -> (u64, usize, bool) {
        (self.shots, self.depth, self.mitigate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub index: usize,
    pub config: CellConfig,
    pub report: DiffReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieBreak {
    /// Cells sharing the minimum MSE, in grid order.
    pub tied: Vec<usize>,
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub cells: Vec<SweepCell>,
    pub best: usize,
    pub tie_break: TieBreak,
}

impl SweepResult {
    pub fn best_cell(&self) -> &SweepCell {
        &self.cells[self.best]
    }
}

/// Evaluate every cell with matched trial inputs and select the minimum-MSE
/// configuration. Failing cells are reported, not fatal.
pub fn sweep(grid: &SweepGrid, jobs: usize) -> Result<SweepResult> {
    grid.validate()?;
    let cells = grid
        .cells()
        .into_iter()
        .enumerate()
        .map(|(index, config)| {
            let report = run_cell(grid, &config, jobs)?;
            Ok(SweepCell {
                index,
                config,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let min_mse = cells
        .iter()
        .map(|c| c.report.mse)
        .fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = cells
        .iter()
        .filter(|c| c.report.mse == min_mse)
        .map(|c| c.index)
        .collect();
    let best = *tied
        .iter()
        .min_by_key(|&&i| (cells[i].config.preference(), i))
        .ok_or_else(|| Error::Internal("sweep produced no comparable cell".into()))?;
    if cells.iter().any(|c| c.report.mse < cells[best].report.mse) {
        return Err(Error::Internal(
            "selected sweep cell is not the MSE minimum".into(),
        ));
    }
    Ok(SweepResult {
        grid: grid.clone(),
        cells,
        best,
        tie_break: TieBreak {
            tied,
            rule: "min mse, then fewer shots, smaller depth, mitigation off, grid order".into(),
        },
    })
}

fn run_cell(grid: &SweepGrid, cell: &CellConfig, jobs: usize) -> Result<DiffReport> {
    match grid.target {
        SweepTarget::Distance => {
            let cfg = SwapTestConfig {
                shots: cell.shots,
                seed: 0,
                noise: grid.noise,
                mitigate: cell.mitigate,
                mode: grid.swap_mode,
            };
            let threshold = grid.threshold.unwrap_or(DEFAULT_DISTANCE_THRESHOLD);
            unit_test_distance(grid.trials, &cfg, threshold, grid.seed, jobs)
        }
        SweepTarget::Eigen => {
            let opt = OptimizerConfig {
                kind: cell.optimizer,
                max_iterations: grid.max_iterations,
                restarts: grid.restarts,
                ..OptimizerConfig::default()
            };
            unit_test_eigen(
                grid.trials,
                cell.depth,
                &opt,
                grid.threshold,
                grid.seed,
                jobs,
            )
        }
    }
}

/// Aligned plain-text summary of one report.
pub fn render_report(report: &DiffReport) -> String {
    let mut out = String::new();
    let rows = [
        ("task", report.task.clone()),
        ("trials", report.trials.to_string()),
        ("mse", format!("{:.6e}", report.mse)),
        ("threshold", format!("{:.6e}", report.threshold)),
        (
            "verdict",
            match report.verdict {
                Verdict::Pass => "pass".into(),
                Verdict::Fail => "fail".into(),
            },
        ),
    ];
    let width = report
        .config
        .keys()
        .map(String::len)
        .chain(rows.iter().map(|(k, _)| k.len()))
        .max()
        .unwrap_or(0)
        + 2;
    let config = report.config.iter().map(|(k, v)| (k.as_str(), v.clone()));
    for (k, v) in rows.into_iter().chain(config) {
        let _ = writeln!(out, "{k:<width$}{v}");
    }
    out
}

/// One row per sweep cell; the selected cell is marked with `*`.
pub fn render_sweep(result: &SweepResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "  {:>4} {:>5} {:<11} {:>7} {:>8} {:>14} {:>14} {:<7}",
        "cell", "depth", "optimizer", "shots", "mitigate", "mse", "threshold", "verdict"
    );
    for c in &result.cells {
        let mark = if c.index == result.best { '*' } else { ' ' };
        let _ = writeln!(
            out,
            "{mark} {:>4} {:>5} {:<11} {:>7} {:>8} {:>14.6e} {:>14.6e} {:<7}",
            c.index,
            c.config.depth,
            c.config.optimizer.to_string(),
            c.config.shots,
            if c.config.mitigate { "on" } else { "off" },
            c.report.mse,
            c.report.threshold,
            if c.report.passed() { "pass" } else { "fail" }
        );
    }
    out
}
