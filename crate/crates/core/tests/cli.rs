use std::path::Path;
use std::process::{Command, Output};

fn hybridmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hybridmd"))
        .args(args)
        .env_remove("HYBRIDMD_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_traj(dir: &Path) -> std::path::PathBuf {
    let traj = dir.join("t.xyz");
    let out = hybridmd(&[
        "gen-traj",
        "--frames",
        "3",
        "--atoms",
        "8",
        "--seed",
        "1",
        "-o",
        p(&traj),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    traj
}

fn lev_column(csv: &str) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn run_classical_then_exact_quantum() {
    let dir = tempfile::tempdir().unwrap();
    let traj = write_traj(dir.path());
    let classical = dir.path().join("c.csv");
    let out = hybridmd(&[
        "run",
        "--traj",
        p(&traj),
        "--segments",
        "0-3,4-7",
        "--distance",
        "classical",
        "--eigen",
        "classical",
        "-o",
        p(&classical),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let c = std::fs::read_to_string(&classical).unwrap();
    assert_eq!(c.lines().count(), 1 + 3);
    assert!(c.starts_with("frame,pair,lev,variant_distance,variant_eigen,elapsed_s\n"));

    let quantum = dir.path().join("q.csv");
    let out = hybridmd(&[
        "run",
        "--traj",
        p(&traj),
        "--segments",
        "0-3,4-7",
        "--distance",
        "quantum",
        "--swap-mode",
        "exact",
        "-o",
        p(&quantum),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let q = std::fs::read_to_string(&quantum).unwrap();
    for (a, b) in lev_column(&c).iter().zip(lev_column(&q)) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn missing_trajectory_names_path() {
    let out = hybridmd(&[
        "run",
        "--traj",
        "/nonexistent/traj.xyz",
        "--segments",
        "0-1,2-3",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/traj.xyz"));
}

#[test]
fn difftest_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = hybridmd(&[
        "difftest",
        "distance",
        "--trials",
        "100",
        "--swap-mode",
        "exact",
        "--seed",
        "7",
        "-o",
        p(&json),
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(report["mse"].as_f64().unwrap() < 1e-15);
    assert_eq!(report["verdict"], "pass");

    let out = hybridmd(&[
        "difftest",
        "eigen",
        "--trials",
        "10",
        "--depth",
        "2",
        "--restarts",
        "5",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    let out = hybridmd(&[
        "difftest",
        "distance",
        "--trials",
        "100",
        "--shots",
        "16",
        "--threshold",
        "1e-6",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn sweeps() {
    let out = hybridmd(&[
        "sweep",
        "eigen",
        "--depths",
        "1,2,3",
        "--optimizers",
        "nelder_mead",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("best: cell"));

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s.json");
    let out = hybridmd(&[
        "sweep",
        "distance",
        "--shots",
        "256,8192",
        "--noise",
        "0.02",
        "--mitigate",
        "off,on",
        "-o",
        p(&json),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("mitigate=on"), "{}", stdout(&out));
    let result: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let best = result["best"].as_u64().unwrap() as usize;
    assert_eq!(result["cells"][best]["config"]["mitigate"], true);

    assert_eq!(code(&hybridmd(&["sweep", "eigen", "--depths", ""])), 2);
}

#[test]
fn swap_demo() {
    let out = hybridmd(&["swap-demo", "--u", "1,0", "--v", "0,1", "--mode", "exact"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let field = |k: &str| -> f64 {
        text.lines()
            .find(|l| l.split_whitespace().next() == Some(k))
            .and_then(|l| l.split_whitespace().nth(1))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((field("P0") - 0.75).abs() < 1e-12);
    assert!((field("D2") - 2.0).abs() < 1e-12);
    assert!((field("D2_classical") - 2.0).abs() < 1e-12);

    assert_eq!(
        code(&hybridmd(&["swap-demo", "--u", "0,0", "--v", "1,0"])),
        2
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&hybridmd(&["run", "--bogus", "1"])), 2);
    assert_eq!(
        code(&hybridmd(&[
            "run",
            "--gen-frames",
            "2",
            "--gen-atoms",
            "4",
            "--segments",
            "0-1;1-2"
        ])),
        2
    );
    assert_eq!(code(&hybridmd(&["difftest", "nothing"])), 2);
    assert_eq!(
        code(&hybridmd(&[
            "gen-traj",
            "--frames",
            "0",
            "--atoms",
            "2",
            "-o",
            "/tmp/x.xyz"
        ])),
        2
    );
}

#[test]
fn config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# synthetic run\ngen-frames = 2\ngen-atoms = 4\nsegments = 0-1;2-3\ndistance = quantum\nseed = 5\n",
    )
    .unwrap();
    let from_file = hybridmd(&["run", "--config", p(&cfg)]);
    assert_eq!(code(&from_file), 0, "{from_file:?}");
    let explicit = hybridmd(&[
        "run",
        "--gen-frames",
        "2",
        "--gen-atoms",
        "4",
        "--segments",
        "0-1;2-3",
        "--distance",
        "quantum",
        "--seed",
        "5",
    ]);
    assert_eq!(stdout(&from_file), stdout(&explicit));
    let overridden = hybridmd(&["run", "--config", p(&cfg), "--seed", "6"]);
    assert_ne!(stdout(&from_file), stdout(&overridden));

    std::fs::write(&cfg, "no-such-flag = 1\n").unwrap();
    assert_eq!(code(&hybridmd(&["run", "--config", p(&cfg)])), 2);
}

#[test]
fn env_seed_is_a_fallback() {
    let base = [
        "run",
        "--gen-frames",
        "2",
        "--gen-atoms",
        "4",
        "--segments",
        "0-1;2-3",
        "--distance",
        "quantum",
    ];
    let with_env = Command::new(env!("CARGO_BIN_EXE_hybridmd"))
        .args(base)
        .env("HYBRIDMD_SEED", "11")
        .output()
        .unwrap();
    let mut explicit = base.to_vec();
    explicit.extend(["--seed", "11"]);
    assert_eq!(with_env.stdout, hybridmd(&explicit).stdout);
}

#[test]
fn identical_flags_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("r{i}.json"));
            let out = hybridmd(&[
                "difftest",
                "distance",
                "--trials",
                "20",
                "--seed",
                "3",
                "-o",
                p(&path),
            ]);
            assert_eq!(code(&out), 0);
            std::fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn help_lists_config_keys() {
    for sub in ["run", "difftest", "sweep", "gen-traj", "swap-demo"] {
        let out = hybridmd(&[sub, "--help"]);
        assert_eq!(code(&out), 0);
        let text = stdout(&out);
        for line in text
            .lines()
            .filter(|l| l.trim_start().starts_with("--") || l.trim_start().starts_with("-o"))
        {
            let flag = line.trim_start();
            if flag.starts_with("--config") || flag.starts_with("--help") || flag.starts_with("-h")
            {
                continue;
            }
            // Long help puts the description on the next line.
            let idx = text.find(line).unwrap();
            let rest = &text[idx..];
            let block: String = rest.lines().take(2).collect::<Vec<_>>().join(" ");
            assert!(block.contains("[config: "), "{sub}: {line}");
        }
    }
}
