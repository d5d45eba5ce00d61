//! End-to-end integration: CLI → files → library and back, plus the
//! cross-file report invariants (byte reproducibility, summary equals a
//! recomputation from the per-trial CSV).

use std::fs;
use std::path::Path;

use lidar_align::{cli, estimate_alignment, load_scan, RunConfig};

fn run_cli(args: &[&str]) -> i32 {
    cli::run(std::iter::once("lidar-align").chain(args.iter().copied()))
}

#[test]
fn simulated_scan_file_estimates_back_to_its_truth() {
    let dir = tempfile::tempdir().unwrap();
    let scan_path = dir.path().join("scan.csv");
    assert_eq!(
        run_cli(&[
            "simulate",
            "--tilt-deg",
            "0.8",
            "--yaw-deg",
            "-1.5",
            "--dx-mm",
            "12",
            "--seed",
            "21",
            "--out",
            scan_path.to_str().unwrap(),
        ]),
        0
    );

    let scan = load_scan(&scan_path).unwrap();
    let truth = scan.truth.expect("simulated scans carry their truth");
    let cfg = RunConfig::default();
    let report = estimate_alignment(&scan, &cfg.target, &cfg.pipeline_config().unwrap()).unwrap();

    assert!(report.converged);
    assert!((report.pose.yaw - truth.yaw).abs() < 0.5f64.to_radians());
    assert!((report.pose.tilt - truth.tilt).abs() < 0.7f64.to_radians());
    assert!((report.pose.dx - truth.dx).abs() < 0.02);
}

fn write_config(path: &Path) {
    fs::write(
        path,
        r#"{"sweep": {"mode": "random", "poses": 3}, "scans_per_pose": 10, "master_seed": 9}"#,
    )
    .unwrap();
}

#[test]
fn reports_are_byte_reproducible_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    write_config(&cfg);
    for out in ["a", "b"] {
        assert_eq!(
            run_cli(&[
                "montecarlo",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                dir.path().join(out).to_str().unwrap(),
            ]),
            0
        );
    }
    for name in ["summary.csv", "pose_stats.csv"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

/// Parses a report CSV into rows of comma-separated fields, skipping the
/// `#` header lines and the column-name line.
fn data_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn pose_stats_equal_a_recomputation_from_the_trial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    write_config(&cfg);
    let out = dir.path().join("reports");
    assert_eq!(
        run_cli(&[
            "montecarlo",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]),
        0
    );

    // trials.csv columns: 0..7 metadata, 7..13 truth, 13..19 estimate,
    // 19..25 error (tilt/yaw/roll in degrees, dx/dy/dz in millimeters).
    let trials = data_rows(&out.join("trials.csv"));
    assert_eq!(trials.len(), 30);
    // pose_stats.csv columns: 0..3 metadata, 3..9 truth, 9..15 mean error,
    // 15..21 error std.
    let stats = data_rows(&out.join("pose_stats.csv"));
    assert_eq!(stats.len(), 3);

    for (pose_index, stat_row) in stats.iter().enumerate() {
        let errors: Vec<Vec<f64>> = trials
            .iter()
            .filter(|t| t[0] == pose_index.to_string())
            .map(|t| t[19..25].iter().map(|v| v.parse().unwrap()).collect())
            .collect();
        let n = errors.len() as f64;
        assert_eq!(n as usize, 10);
        for d in 0..6 {
            let mean = errors.iter().map(|e| e[d]).sum::<f64>() / n;
            let std = (errors.iter().map(|e| (e[d] - mean).powi(2)).sum::<f64>() / (n - 1.0))
                .sqrt();
            let reported_mean: f64 = stat_row[9 + d].parse().unwrap();
            let reported_std: f64 = stat_row[15 + d].parse().unwrap();
            // Both sides are quantized to 1e-6 by the CSV float format.
            assert!(
                (mean - reported_mean).abs() < 5e-6,
                "pose {pose_index} DOF {d}: recomputed mean {mean}, reported {reported_mean}"
            );
            assert!(
                (std - reported_std).abs() < 5e-6,
                "pose {pose_index} DOF {d}: recomputed std {std}, reported {reported_std}"
            );
        }
    }

    // The summary's accuracy row is the mean over poses of the per-pose
    // mean errors (column order there: tilt, roll, yaw, dx).
    let summary = data_rows(&out.join("summary.csv"));
    let accuracy: Vec<f64> = summary[0][1..].iter().map(|v| v.parse().unwrap()).collect();
    let mean_over_poses = |col: usize| -> f64 {
        stats.iter().map(|s| s[col].parse::<f64>().unwrap()).sum::<f64>() / stats.len() as f64
    };
    assert_eq!(summary[0][0], "accuracy");
    assert!((accuracy[0] - mean_over_poses(9)).abs() < 5e-6); // tilt
    assert!((accuracy[1] - mean_over_poses(11)).abs() < 5e-6); // roll
    assert!((accuracy[2] - mean_over_poses(10)).abs() < 5e-6); // yaw
    assert!((accuracy[3] - mean_over_poses(12)).abs() < 5e-6); // dx
}
