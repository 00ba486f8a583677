//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use hybridmd::difftest::{self, SweepGrid, SweepTarget};
use hybridmd::eigen::{self, Ansatz, OptimizerConfig, OptimizerKind};
use hybridmd::pipeline::{self, RunConfig, SegmentSpec, TrajectorySource};
use hybridmd::sim::{ReadoutNoiseModel, StateVector};
use hybridmd::swap::{self, Provenance, SwapTestConfig};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(
        elapsed.as_secs_f64() < limit_s,
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64()),
    )
}

fn c1_analytic_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let exact = SwapTestConfig::exact();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let dim = rng.random_range(1..=5);
        let u: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let d2 = swap::squared_distance(&u, &v, &exact).map_err(|e| e.to_string())?;
        worst = worst.max((d2 - common::sq_dist(&u, &v)).abs());
    }
    let elapsed = start.elapsed();
    ensure(worst < 1e-9, format!("max abs error {worst:e} >= 1e-9"))?;
    within(elapsed, 10.0)?;
    Ok(format!(
        "max_err={worst:.2e} in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn c2_swap_semantics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let exact = SwapTestConfig::exact();
    let mut worst_same = 0.0f64;
    let mut worst_ortho = 0.0f64;
    for width in 1..=3 {
        let dim = 1usize << width;
        for _ in 0..10 {
            let a = common::random_state(&mut rng, dim);
            // Gram-Schmidt a second state against the first.
            let mut b = common::random_state(&mut rng, dim);
            let overlap: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
            for (bi, ai) in b.iter_mut().zip(&a) {
                *bi -= overlap * ai;
            }
            let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            b.iter_mut().for_each(|z| *z /= nb);

            let same = swap::build_complete_swap_test(&a, &a).map_err(|e| e.to_string())?;
            let ortho = swap::build_complete_swap_test(&a, &b).map_err(|e| e.to_string())?;
            let p_same = swap::estimate_p0(&same, &exact).map_err(|e| e.to_string())?;
            let p_ortho = swap::estimate_p0(&ortho, &exact).map_err(|e| e.to_string())?;
            worst_same = worst_same.max((p_same - 1.0).abs());
            worst_ortho = worst_ortho.max((p_ortho - 0.5).abs());
        }
    }
    ensure(
        worst_same < 1e-12 && worst_ortho < 1e-12,
        format!("|P0-1|={worst_same:e}, |P0-0.5|={worst_ortho:e}"),
    )?;
    Ok(format!(
        "identical |P0-1|<={worst_same:.1e}, orthogonal |P0-0.5|<={worst_ortho:.1e}"
    ))
}

fn c3_sampled_distance() -> Outcome {
    let start = Instant::now();
    let seed = 2024;
    let r8192 =
        difftest::unit_test_distance(100, &SwapTestConfig::sampled(8192, seed), 1e-2, seed, 1)
            .map_err(|e| e.to_string())?;
    let r1024 =
        difftest::unit_test_distance(100, &SwapTestConfig::sampled(1024, seed), 4e-2, seed, 1)
            .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        r8192.mse < 1e-2,
        format!("8192-shot MSE {:e} >= 1e-2", r8192.mse),
    )?;
    ensure(
        r1024.mse < 4e-2,
        format!("1024-shot MSE {:e} >= 4e-2", r1024.mse),
    )?;
    within(elapsed, 60.0)?;
    Ok(format!(
        "mse@8192={:.2e} mse@1024={:.2e} in {:.2} s",
        r8192.mse,
        r1024.mse,
        elapsed.as_secs_f64()
    ))
}

fn c4_vqe_vs_jacobi() -> Outcome {
    let start = Instant::now();
    let mut within_tol = 0;
    let mut worst_rel = 0.0f64;
    for i in 0..50 {
        let (a, b) = difftest::trial_segments(404, i, 2);
        let bpm = pipeline::extract_bpm(&a, &b, swap::classical_distance_matrix)
            .map_err(|e| e.to_string())?;
        let jacobi = eigen::classical_largest_eigenvalue(&bpm).map_err(|e| e.to_string())?;
        let opt = OptimizerConfig {
            kind: OptimizerKind::NelderMead,
            restarts: 5,
            seed: 404 + i as u64,
            ..OptimizerConfig::default()
        };
        let (vqe, _) =
            eigen::quantum_largest_eigenvalue(&bpm, 2, &opt).map_err(|e| e.to_string())?;
        ensure(
            vqe <= jacobi + 1e-9,
            format!("instance {i}: variational bound violated, {vqe} > {jacobi}"),
        )?;
        let rel = (vqe - jacobi).abs() / jacobi;
        worst_rel = worst_rel.max(rel);
        if rel <= 1e-2 {
            within_tol += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(
        within_tol * 100 >= 95 * 50,
        format!("only {within_tol}/50 within 1% relative"),
    )?;
    within(elapsed, 300.0)?;
    Ok(format!(
        "{within_tol}/50 within 1%, worst rel={worst_rel:.2e} in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn c5_variational_principle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let qubits = rng.random_range(1..=3);
        let depth = rng.random_range(0..=3);
        let ansatz = Ansatz::new(qubits, depth).map_err(|e| e.to_string())?;
        let theta: Vec<f64> = (0..ansatz.num_parameters())
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let h = common::random_hermitian(&mut rng, 1 << qubits);
        let cost = eigen::vqe_cost(&ansatz, &theta, &h).map_err(|e| e.to_string())?;
        let gap = cost - common::hermitian_min_eigenvalue(&h);
        worst = worst.min(gap);
    }
    ensure(
        worst >= -1e-9,
        format!("cost below lambda_min by {:e}", -worst),
    )?;
    Ok(format!("min(cost - lambda_min)={worst:.2e}"))
}

fn c6_mitigation() -> Outcome {
    let seed = 606;
    let noise = ReadoutNoiseModel::symmetric(0.02).map_err(|e| e.to_string())?;
    let mut cfg = SwapTestConfig::sampled(8192, seed);
    cfg.noise = Some(noise);
    let raw = difftest::unit_test_distance(50, &cfg, 1e-2, seed, 1).map_err(|e| e.to_string())?;
    cfg.mitigate = true;
    let mitigated =
        difftest::unit_test_distance(50, &cfg, 1e-2, seed, 1).map_err(|e| e.to_string())?;
    ensure(
        mitigated.mse < raw.mse,
        format!(
            "mitigated MSE {:e} >= unmitigated {:e}",
            mitigated.mse, raw.mse
        ),
    )?;

    let mut grid = SweepGrid::new(SweepTarget::Distance);
    grid.shots = vec![256, 8192];
    grid.mitigation = vec![false, true];
    grid.noise = Some(noise);
    grid.trials = 50;
    grid.seed = seed;
    let result = difftest::sweep(&grid, 1).map_err(|e| e.to_string())?;
    let best = result.best_cell();
    ensure(
        best.config.mitigate,
        format!("sweep argmin is cell {} without mitigation", best.index),
    )?;
    Ok(format!(
        "mse raw={:.2e} mitigated={:.2e}; sweep best cell {} (shots={}, mitigate=on)",
        raw.mse, mitigated.mse, best.index, best.config.shots
    ))
}

fn e2e_config(distance: Provenance, eigen: Provenance) -> RunConfig {
    let source = TrajectorySource::Synthetic {
        frames: 3,
        atoms: 4,
        seed: 707,
    };
    let mut cfg = RunConfig::new(source, SegmentSpec::parse("0-1;2-3").unwrap());
    cfg.swap = SwapTestConfig::exact();
    cfg.seed = 707;
    cfg.with_variants(distance, eigen)
}

fn c7_end_to_end() -> Outcome {
    let start = Instant::now();
    let quantum = e2e_config(Provenance::Quantum, Provenance::Quantum);
    let q = pipeline::compute_cv_series(&quantum).map_err(|e| e.to_string())?;
    let c = pipeline::compute_cv_series(
        &quantum.with_variants(Provenance::Classical, Provenance::Classical),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        q.records.len() == 3,
        format!("{} records, expected 3", q.records.len()),
    )?;
    let mut worst = 0.0f64;
    for (qv, cv) in q.levs().iter().zip(c.levs()) {
        worst = worst.max((qv - cv).abs() / cv.abs());
    }
    ensure(worst <= 1e-2, format!("relative error {worst:e} > 1e-2"))?;

    let report = difftest::end_to_end_diff(&quantum, None).map_err(|e| e.to_string())?;
    ensure(
        report.passed(),
        format!("end-to-end difftest failed, mse {:e}", report.mse),
    )?;
    let classical = e2e_config(Provenance::Classical, Provenance::Classical);
    let self_report = difftest::end_to_end_diff(&classical, None).map_err(|e| e.to_string())?;
    ensure(
        self_report.mse == 0.0,
        format!("classical vs classical mse {:e} != 0", self_report.mse),
    )?;
    let elapsed = start.elapsed();
    within(elapsed, 120.0)?;
    Ok(format!(
        "worst rel={worst:.2e}, classical self-mse=0 in {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn check_bpm(bpm: &DMatrix<f64>, n1: usize) -> Result<(), String> {
    let n = bpm.nrows();
    for i in 0..n {
        for j in 0..n {
            ensure(
                bpm[(i, j)] == bpm[(j, i)],
                format!("asymmetric at ({i},{j})"),
            )?;
            if (i < n1) == (j < n1) {
                ensure(
                    bpm[(i, j)] == 0.0,
                    format!("diagonal block non-zero at ({i},{j})"),
                )?;
            }
        }
    }
    ensure(bpm.trace() == 0.0, "trace non-zero")
}

fn c8_structural_invariants() -> Outcome {
    let source = TrajectorySource::Synthetic {
        frames: 4,
        atoms: 6,
        seed: 808,
    };
    let mut cfg = RunConfig::new(source.clone(), SegmentSpec::parse("0-1;2-3;4-5").unwrap());
    cfg.seed = 808;
    cfg = cfg.with_variants(Provenance::Quantum, Provenance::Quantum);

    let traj = source.load().map_err(|e| e.to_string())?;
    let mut bpms = 0;
    for frame in traj.frames() {
        for (a, b) in pipeline::pair_segments(frame, &cfg.segments).map_err(|e| e.to_string())? {
            for variant in [Provenance::Classical, Provenance::Quantum] {
                let bpm = pipeline::bpm_for_variant(&a, &b, variant, &cfg.swap)
                    .map_err(|e| e.to_string())?;
                check_bpm(&bpm, a.len())?;
                let lmax = bpm.clone().symmetric_eigen().eigenvalues.max();
                ensure(lmax >= 0.0, format!("lambda_max {lmax} < 0"))?;
                bpms += 1;
            }
        }
    }

    let first = pipeline::compute_cv_series(&cfg).map_err(|e| e.to_string())?;
    ensure(
        first.levs().iter().all(|&l| l >= 0.0),
        "negative lev in series",
    )?;
    let again = pipeline::compute_cv_series(&cfg).map_err(|e| e.to_string())?;
    let mut parallel = cfg.clone();
    parallel.jobs = 4;
    let par = pipeline::compute_cv_series(&parallel).map_err(|e| e.to_string())?;
    ensure(
        first.to_csv() == again.to_csv(),
        "CSV differs across repeated runs",
    )?;
    ensure(
        first.to_csv() == par.to_csv(),
        "CSV differs between jobs 1 and 4",
    )?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for jobs in ["1", "4", "1"] {
        let path = dir.path().join(format!("cv_{}_{jobs}.csv", files.len()));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_hybridmd"))
            .args([
                "run",
                "--gen-frames",
                "4",
                "--gen-atoms",
                "6",
                "--gen-seed",
                "808",
                "--segments",
                "0-1;2-3;4-5",
                "--distance",
                "quantum",
                "--eigen",
                "quantum",
                "--seed",
                "808",
                "--jobs",
                jobs,
                "-o",
            ])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(
            status.status.success(),
            format!("cli run failed: {status:?}"),
        )?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(
        files[0] == files[1] && files[0] == files[2],
        "CLI CSV bytes differ across runs or job counts",
    )?;
    Ok(format!(
        "{bpms} BPMs checked, {} CV rows identical across runs and jobs 1/4",
        first.records.len()
    ))
}

fn c9_oracle_cross_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst_eig = 0.0f64;
    for _ in 0..100 {
        let dim = rng.random_range(1..=8);
        let m = common::random_symmetric(&mut rng, dim);
        let ours = eigen::symmetric_eigenvalues(&m).map_err(|e| e.to_string())?;
        let oracle = common::power_deflation_eigenvalues(&m);
        for (a, b) in ours.iter().zip(&oracle) {
            worst_eig = worst_eig.max((a - b).abs());
        }
    }
    ensure(
        worst_eig <= 1e-8,
        format!("Jacobi vs power iteration {worst_eig:e} > 1e-8"),
    )?;

    let mut worst_exp = 0.0f64;
    for _ in 0..100 {
        let qubits = rng.random_range(1..=4);
        let psi = common::random_state(&mut rng, 1 << qubits);
        let h = common::random_hermitian(&mut rng, 1 << qubits);
        let state = StateVector::from_amplitudes(psi.clone()).map_err(|e| e.to_string())?;
        let ours = state.expectation(&h).map_err(|e| e.to_string())?;
        worst_exp = worst_exp.max((ours - common::quadratic_form(&psi, &h)).abs());
    }
    ensure(
        worst_exp <= 1e-10,
        format!("expectation vs quadratic form {worst_exp:e} > 1e-10"),
    )?;
    Ok(format!(
        "eigen max diff={worst_eig:.2e}, expectation max diff={worst_exp:.2e}"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("swap-test analytic identity", c1_analytic_identity),
        ("swap-test semantics", c2_swap_semantics),
        ("sampled distance MSE", c3_sampled_distance),
        ("VQE vs Jacobi", c4_vqe_vs_jacobi),
        ("variational principle", c5_variational_principle),
        ("mitigation efficacy", c6_mitigation),
        ("end-to-end differential", c7_end_to_end),
        ("structural invariants", c8_structural_invariants),
        ("oracle cross-checks", c9_oracle_cross_checks),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("acceptance {}: {name} ... PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {}: {name} ... FAIL ({why})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
