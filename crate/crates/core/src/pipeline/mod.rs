//! The five-task collective-variable workflow.
//!
//! 1. input (configuration)
//! 2. trajectory reading
//! 3. per-frame segment pairing
//! 4. block distance matrix
//! 5. largest eigenvalue
//!
//! Tasks 4 and 5 dispatch to a classical or quantum variant according to
//! the [`TaskPlan`].

mod plan;
mod trajectory;

pub use plan::{Classification, PlannedTask, Task, TaskPlan};
pub(crate) use trajectory::random_atom;
pub use trajectory::{gen_trajectory, parse_trajectory, read_trajectory, Atom, Frame, Trajectory};

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use nalgebra::DMatrix;

use crate::eigen::{self, OptimizerConfig};
use crate::error::{Error, Result};
use crate::swap::{self, DistanceMatrix, Provenance, SwapTestConfig};
use crate::util::{derive_seed, format_significant, ordered_map};

pub const CSV_HEADER: &str = "frame,pair,lev,variant_distance,variant_eigen,elapsed_s";

/// Disjoint groups of atom indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSpec {
    groups: Vec<Vec<usize>>,
}

impl SegmentSpec {
    pub fn new(groups: Vec<Vec<usize>>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::config("at least two segment groups are required"));
        }
        if let Some(i) = groups.iter().position(|g| g.is_empty()) {
            return Err(Error::config(format!("segment group {i} is empty")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &idx in groups.iter().flatten() {
            if !seen.insert(idx) {
                return Err(Error::config(format!(
                    "atom {idx} appears in more than one segment position"
                )));
            }
        }
        Ok(Self { groups })
    }

    /// Parse `a-b,c;d-e`: groups separated by `;`, each a comma list of
    /// indices or inclusive ranges. Without any `;`, every comma-separated
    /// item is its own group (`0-3,4-7` is two groups).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::config("empty segment specification"));
        }
        let group_texts: Vec<&str> = if text.contains(';') {
            text.split(';').collect()
        } else {
            text.split(',').collect()
        };
        let groups = group_texts
            .iter()
            .enumerate()
            .map(|(i, g)| {
                parse_group(g).map_err(|e| Error::config(format!("segment group {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(groups)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn validate(&self, num_atoms: usize) -> Result<()> {
        if let Some(&bad) = self.groups.iter().flatten().find(|&&i| i >= num_atoms) {
            return Err(Error::config(format!(
                "segment atom index {bad} out of range for {num_atoms} atoms"
            )));
        }
        Ok(())
    }

    pub fn num_pairs(&self) -> usize {
        let n = self.groups.len();
        n * (n - 1) / 2
    }
}

fn parse_group(text: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item.is_empty() {
            return Err("empty item".into());
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad index '{s}'"))
        };
        match item.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(format!("descending range {item}"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(parse(item)?),
        }
    }
    Ok(out)
}

impl std::fmt::Display for SegmentSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let groups: Vec<String> = self
            .groups
            .iter()
            .map(|g| g.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&groups.join(";"))
    }
}

pub type Segment = Vec<Atom>;

/// All unordered group pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_segments(frame: &Frame, spec: &SegmentSpec) -> Result<Vec<(Segment, Segment)>> {
    spec.validate(frame.atoms.len())?;
    let pick = |g: &[usize]| g.iter().map(|&i| frame.atoms[i]).collect::<Segment>();
    let groups = spec.groups();
    let mut pairs = Vec::with_capacity(spec.num_pairs());
    for i in 0..groups.len() {
        for j in (i + 1)..groups.len() {
            pairs.push((pick(&groups[i]), pick(&groups[j])));
        }
    }
    Ok(pairs)
}

/// `[[0, D], [Dᵀ, 0]]` for the distance matrix `D` between two segments.
pub fn extract_bpm<F>(seg_a: &[Atom], seg_b: &[Atom], distance: F) -> Result<DMatrix<f64>>
where
    F: FnOnce(&[Atom], &[Atom]) -> Result<DistanceMatrix>,
{
    let d = distance(seg_a, seg_b)?.entries;
    let (n1, n2) = (seg_a.len(), seg_b.len());
    if d.nrows() != n1 || d.ncols() != n2 {
        return Err(Error::Internal(format!(
            "distance matrix is {}x{}, expected {n1}x{n2}",
            d.nrows(),
            d.ncols()
        )));
    }
    let mut bpm = DMatrix::zeros(n1 + n2, n1 + n2);
    bpm.view_mut((0, n1), (n1, n2)).copy_from(&d);
    bpm.view_mut((n1, 0), (n2, n1)).copy_from(&d.transpose());
    Ok(bpm)
}

/// BPM with the distance variant selected by `variant`.
pub fn bpm_for_variant(
    seg_a: &[Atom],
    seg_b: &[Atom],
    variant: Provenance,
    swap_cfg: &SwapTestConfig,
) -> Result<DMatrix<f64>> {
    match variant {
        Provenance::Classical => extract_bpm(seg_a, seg_b, swap::classical_distance_matrix),
        Provenance::Quantum => extract_bpm(seg_a, seg_b, |a, b| {
            swap::quantum_distance_matrix(a, b, swap_cfg)
        }),
    }
}

/// Symmetric, zero diagonal blocks, zero trace.
pub fn check_bpm_structure(bpm: &DMatrix<f64>, n1: usize) -> Result<()> {
    let n = bpm.nrows();
    if bpm.ncols() != n || n1 > n {
        return Err(Error::Internal("BPM is not square".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if bpm[(i, j)] != bpm[(j, i)] {
                return Err(Error::Internal(format!("BPM asymmetric at ({i}, {j})")));
            }
            if (i < n1) == (j < n1) && bpm[(i, j)] != 0.0 {
                return Err(Error::Internal(format!(
                    "BPM diagonal block entry ({i}, {j}) is non-zero"
                )));
            }
        }
    }
    if bpm.trace() != 0.0 {
        return Err(Error::Internal("BPM trace is non-zero".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectorySource {
    File(PathBuf),
    Synthetic {
        frames: usize,
        atoms: usize,
        seed: u64,
    },
}

impl TrajectorySource {
    pub fn load(&self) -> Result<Trajectory> {
        match self {
            TrajectorySource::File(path) => read_trajectory(path),
            TrajectorySource::Synthetic {
                frames,
                atoms,
                seed,
            } => gen_trajectory(*frames, *atoms, *seed),
        }
    }
}

/// Everything needed to reproduce one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trajectory: TrajectorySource,
    pub segments: SegmentSpec,
    pub distance_variant: Provenance,
    pub eigen_variant: Provenance,
    /// Shots, mode and noise for the quantum distance variant. Its seed is
    /// replaced by one derived from `seed` for every (frame, pair).
    pub swap: SwapTestConfig,
    pub depth: usize,
    /// Its seed is replaced like `swap.seed`.
    pub optimizer: OptimizerConfig,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub jobs: usize,
    /// Write measured task-5 wall time into `elapsed_s`; otherwise the
    /// column is 0 and the CSV is reproducible byte for byte.
    pub record_timing: bool,
}

impl RunConfig {
    pub fn new(trajectory: TrajectorySource, segments: SegmentSpec) -> Self {
        Self {
            trajectory,
            segments,
            distance_variant: Provenance::Classical,
            eigen_variant: Provenance::Classical,
            swap: SwapTestConfig::default(),
            depth: eigen::DEFAULT_DEPTH,
            optimizer: OptimizerConfig::default(),
            output: None,
            seed: 0,
            jobs: 1,
            record_timing: false,
        }
    }

    pub fn with_variants(&self, distance: Provenance, eigen: Provenance) -> Self {
        Self {
            distance_variant: distance,
            eigen_variant: eigen,
            ..self.clone()
        }
    }
}

pub fn plan(config: &RunConfig) -> TaskPlan {
    TaskPlan::new(config.distance_variant, config.eigen_variant)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvRecord {
    pub frame: usize,
    pub pair: usize,
    /// Largest BPM eigenvalue (squared coordinate units).
    pub lev: f64,
    pub distance_variant: Provenance,
    pub eigen_variant: Provenance,
    pub elapsed_s: f64,
}

/// One largest eigenvalue per (frame, segment pair), ordered by frame then
/// pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CvSeries {
    pub records: Vec<CvRecord>,
    pub plan: TaskPlan,
}

impl CvSeries {
    pub fn levs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lev).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.frame,
                r.pair,
                format_significant(r.lev, 12),
                r.distance_variant,
                r.eigen_variant,
                format_significant(r.elapsed_s, 12)
            );
        }
        out
    }
}

/// Work for one (frame, pair) unit.
struct Unit {
    frame: usize,
    pair: usize,
    seg_a: Segment,
    seg_b: Segment,
}

pub fn compute_cv_series(config: &RunConfig) -> Result<CvSeries> {
    let plan = plan(config);
    let trajectory = config.trajectory.load()?;
    config.segments.validate(trajectory.num_atoms())?;

    let mut units = Vec::new();
    for (frame_idx, frame) in trajectory.frames().iter().enumerate() {
        for (pair_idx, (seg_a, seg_b)) in pair_segments(frame, &config.segments)?
            .into_iter()
            .enumerate()
        {
            units.push(Unit {
                frame: frame_idx,
                pair: pair_idx,
                seg_a,
                seg_b,
            });
        }
    }

    let records = ordered_map(&units, config.jobs.max(1), |index, unit| {
        evaluate_unit(config, &plan, index as u64, unit).map_err(|e| Error::Task {
            frame: unit.frame,
            pair: unit.pair,
            source: Box::new(e),
        })
    })?;
    Ok(CvSeries { records, plan })
}

fn evaluate_unit(config: &RunConfig, plan: &TaskPlan, index: u64, unit: &Unit) -> Result<CvRecord> {
    let unit_seed = derive_seed(config.seed, index);
    let swap_cfg = config.swap.with_seed(derive_seed(unit_seed, 0));
    let distance_variant = plan.variant(Task::Distance);
    let eigen_variant = plan.variant(Task::Eigen);

    let bpm = bpm_for_variant(&unit.seg_a, &unit.seg_b, distance_variant, &swap_cfg)?;
    check_bpm_structure(&bpm, unit.seg_a.len())?;

    let start = Instant::now();
    let classical = eigen::classical_largest_eigenvalue(&bpm)?;
    let classical_elapsed = start.elapsed().as_secs_f64();
    let scale = bpm.norm().max(1.0);
    if classical < -1e-9 * scale {
        return Err(Error::Internal(format!(
            "largest eigenvalue {classical} of a trace-zero BPM is negative"
        )));
    }

    let (lev, elapsed) = match eigen_variant {
        Provenance::Classical => (classical, classical_elapsed),
        Provenance::Quantum => {
            let optimizer = OptimizerConfig {
                seed: derive_seed(unit_seed, 1),
                ..config.optimizer.clone()
            };
            eigen::quantum_largest_eigenvalue(&bpm, config.depth, &optimizer)?
        }
    };
    if !lev.is_finite() {
        return Err(Error::Numeric(format!("non-finite eigenvalue {lev}")));
    }
    Ok(CvRecord {
        frame: unit.frame,
        pair: unit.pair,
        lev,
        distance_variant,
        eigen_variant,
        elapsed_s: if config.record_timing { elapsed } else { 0.0 },
    })
}

/// Parse a flat `key = value` file. Blank lines and `#` comments are
/// skipped; keys are returned in file order.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or(Error::Parse {
                line: i + 1,
                message: format!("expected key = value, found '{line}'"),
            })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}
