//! Command-line surface: scan simulation, single-scan estimation, Monte
//! Carlo sweeps and the latency benchmark, all driven by the same JSON run
//! configuration the library uses.
//!
//! Exit codes: 0 success, 1 pipeline failure (message names the failing
//! stage), 2 usage or configuration error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{RunConfig, SweepSpec};
use crate::error::{Error, Result};
use crate::geometry::PoseVector;
use crate::io::{
    load_scan, save_scan, write_pose_stats_csv, write_summary_csv, write_trials_csv,
};
use crate::montecarlo::{run_bench, run_montecarlo};
use crate::pipeline::estimate_alignment;
use crate::sim::generate_scan;
use crate::solver::EstimateReport;

#[derive(Parser)]
#[command(
    name = "lidar-align",
    version,
    about = "Estimates the 6-DOF mounting misalignment of a spinning LiDAR from scans of a rectangular target board"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMode {
    /// Yaw grid, −3°..3° in 0.5° steps by default.
    YawSweep,
    /// Horizontal displacement grid, −30..30 mm in 5 mm steps by default.
    XSweep,
    /// Random poses within 3° / 30 mm bounds.
    Random,
}

impl SweepMode {
    fn spec(self) -> SweepSpec {
        match self {
            SweepMode::YawSweep => SweepSpec::yaw_sweep(),
            SweepMode::XSweep => SweepSpec::x_sweep(),
            SweepMode::Random => SweepSpec::random(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scan of the target board and write it as a scan CSV.
    #[command(allow_negative_numbers = true)]
    Simulate {
        /// JSON run configuration (defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scan noise seed (defaults to the config's master seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Output scan file.
        #[arg(long, default_value = "scan.csv")]
        out: PathBuf,
        /// True misalignment to bake into the scan.
        #[arg(long, default_value_t = 0.0)]
        tilt_deg: f64,
        #[arg(long, default_value_t = 0.0)]
        yaw_deg: f64,
        #[arg(long, default_value_t = 0.0)]
        roll_deg: f64,
        #[arg(long, default_value_t = 0.0)]
        dx_mm: f64,
        #[arg(long, default_value_t = 0.0)]
        dy_mm: f64,
        #[arg(long, default_value_t = 0.0)]
        dz_mm: f64,
    },
    /// Estimate the misalignment from a scan file.
    Estimate {
        /// Scan CSV to process.
        scan: PathBuf,
        /// JSON run configuration (defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the estimate as a one-row CSV report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep misalignment poses, estimating many noisy scans per pose, and
    /// write summary, per-pose and per-trial CSV reports.
    Montecarlo {
        /// JSON run configuration (defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Sweep mode override (replaces the config's sweep with that
        /// mode's defaults).
        #[arg(long, value_enum)]
        mode: Option<SweepMode>,
        /// Scans per pose override.
        #[arg(long)]
        scans: Option<usize>,
        /// Directory for summary.csv, pose_stats.csv and trials.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Measure end-to-end pipeline latency over repeated scans.
    Bench {
        /// JSON run configuration (defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of scans to time.
        #[arg(long, default_value_t = 100)]
        scans: usize,
        /// Optional CSV of per-scan latencies.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` and runs the selected subcommand, returning the process
/// exit code. Kept in the library so integration tests can drive the CLI
/// without spawning processes.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too; they are not errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.stage());
            match e {
                Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Simulate {
            config,
            seed,
            out,
            tilt_deg,
            yaw_deg,
            roll_deg,
            dx_mm,
            dy_mm,
            dz_mm,
        } => {
            let cfg = load_config(&config)?;
            let truth = PoseVector::new(
                tilt_deg.to_radians(),
                yaw_deg.to_radians(),
                roll_deg.to_radians(),
                dx_mm / 1000.0,
                dy_mm / 1000.0,
                dz_mm / 1000.0,
            );
            let seed = seed.unwrap_or(cfg.master_seed);
            let scan = generate_scan(&cfg.sensor_model()?, &cfg.scene()?, &truth, seed)?;
            save_scan(&scan, &out)?;
            println!("wrote {} beams to {} (seed {seed})", scan.beams.len(), out.display());
            Ok(())
        }
        Command::Estimate { scan, config, out } => {
            let cfg = load_config(&config)?;
            let loaded = load_scan(&scan)?;
            let report =
                estimate_alignment(&loaded, &cfg.target, &cfg.pipeline_config()?)?;
            print_estimate(&scan, &loaded.truth, &report);
            if let Some(out) = out {
                crate::io::write_file(&out, &estimate_csv(&loaded.truth, &report))?;
                println!("report written to {}", out.display());
            }
            Ok(())
        }
        Command::Montecarlo { config, seed, mode, scans, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            if let Some(mode) = mode {
                cfg.sweep = mode.spec();
            }
            if let Some(scans) = scans {
                cfg.scans_per_pose = scans;
            }
            fs::create_dir_all(&out).map_err(|e| crate::io::io_at(&out, e))?;
            let (summary, records) = run_montecarlo(&cfg)?;
            write_summary_csv(&summary, out.join("summary.csv"))?;
            write_pose_stats_csv(&summary, out.join("pose_stats.csv"))?;
            write_trials_csv(&records, out.join("trials.csv"))?;

            println!(
                "{} sweep: {} poses x {} scans, {} trials, failure rate {:.4}",
                cfg.sweep.mode_name(),
                summary.pose_stats.len(),
                cfg.scans_per_pose,
                summary.total_trials,
                summary.failure_rate
            );
            println!("{:<12}{:>12}{:>12}{:>12}{:>12}", "", "tilt_deg", "roll_deg", "yaw_deg", "dx_mm");
            for (name, p) in [("accuracy", &summary.accuracy), ("precision", &summary.precision)]
            {
                println!(
                    "{name:<12}{:>12.4}{:>12.4}{:>12.4}{:>12.3}",
                    p.tilt.to_degrees(),
                    p.roll.to_degrees(),
                    p.yaw.to_degrees(),
                    p.dx * 1000.0
                );
            }
            println!("reports written to {}", out.display());
            Ok(())
        }
        Command::Bench { config, seed, scans, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            let report = run_bench(&cfg, scans)?;
            println!(
                "pipeline latency over {scans} scans (ms): median {:.2}, mean {:.2}, min {:.2}, p95 {:.2}, max {:.2}",
                report.median_ms, report.mean_ms, report.min_ms, report.p95_ms, report.max_ms
            );
            if let Some(out) = out {
                let mut csv = String::from("#lidar-align-bench v1\nscan_index,latency_ms\n");
                for (i, l) in report.latencies_ms.iter().enumerate() {
                    writeln!(csv, "{i},{l:.3}").unwrap();
                }
                crate::io::write_file(&out, &csv)?;
                println!("latencies written to {}", out.display());
            }
            Ok(())
        }
    }
}

fn pose_lines(p: &PoseVector) -> [String; 6] {
    [
        format!("tilt {:+9.4} deg", p.tilt.to_degrees()),
        format!("yaw  {:+9.4} deg", p.yaw.to_degrees()),
        format!("roll {:+9.4} deg", p.roll.to_degrees()),
        format!("dx   {:+9.3} mm", p.dx * 1000.0),
        format!("dy   {:+9.3} mm", p.dy * 1000.0),
        format!("dz   {:+9.3} mm", p.dz * 1000.0),
    ]
}

fn print_estimate(path: &Path, truth: &Option<PoseVector>, report: &EstimateReport) {
    println!("scan: {}", path.display());
    println!("estimated misalignment:");
    let est = pose_lines(&report.pose);
    match truth {
        Some(truth) => {
            let t = pose_lines(truth);
            println!("  {:<24}{:<24}{}", "estimate", "truth", "error");
            let err = pose_lines(&pose_diff(&report.pose, truth));
            for i in 0..6 {
                println!("  {:<24}{:<24}{}", est[i], t[i], err[i]);
            }
        }
        None => {
            for line in &est {
                println!("  {line}");
            }
        }
    }
    println!(
        "converged: {} ({} iterations, cost {:.3e})",
        report.converged, report.iterations, report.cost
    );
    let r = report.per_corner_residuals;
    println!(
        "per-corner residuals (mm): TL {:.2}, TR {:.2}, BL {:.2}, BR {:.2}",
        r[0] * 1000.0,
        r[1] * 1000.0,
        r[2] * 1000.0,
        r[3] * 1000.0
    );
}

fn pose_diff(a: &PoseVector, b: &PoseVector) -> PoseVector {
    let (a, b) = (a.as_array(), b.as_array());
    PoseVector::from_array(std::array::from_fn(|i| a[i] - b[i]))
}

fn estimate_csv(truth: &Option<PoseVector>, report: &EstimateReport) -> String {
    let mut out = String::from("#lidar-align-estimate v1\n");
    out.push_str("converged,iterations,cost");
    for group in ["est", "truth", "err"] {
        for col in ["tilt_deg", "yaw_deg", "roll_deg", "dx_mm", "dy_mm", "dz_mm"] {
            write!(out, ",{group}_{col}").unwrap();
        }
    }
    out.push('\n');
    write!(out, "{},{},{:.6e}", report.converged, report.iterations, report.cost).unwrap();
    let formatted = |p: &PoseVector| -> String {
        let mut s = String::new();
        for v in [
            p.tilt.to_degrees(),
            p.yaw.to_degrees(),
            p.roll.to_degrees(),
            p.dx * 1000.0,
            p.dy * 1000.0,
            p.dz * 1000.0,
        ] {
            write!(s, ",{v:.6}").unwrap();
        }
        s
    };
    out.push_str(&formatted(&report.pose));
    match truth {
        Some(truth) => {
            out.push_str(&formatted(truth));
            out.push_str(&formatted(&pose_diff(&report.pose, truth)));
        }
        None => out.push_str(&",".repeat(12)),
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> i32 {
        run(std::iter::once("lidar-align").chain(args.iter().copied()))
    }

    #[test]
    fn help_and_version_exit_cleanly() {
        assert_eq!(run_cli(&["--help"]), 0);
        assert_eq!(run_cli(&["--version"]), 0);
        assert_eq!(run_cli(&["simulate", "--help"]), 0);
    }

    #[test]
    fn bad_usage_exits_2() {
        assert_eq!(run_cli(&[]), 2);
        assert_eq!(run_cli(&["frobnicate"]), 2);
        assert_eq!(run_cli(&["simulate", "--no-such-flag"]), 2);
        assert_eq!(run_cli(&["montecarlo", "--mode", "spiral"]), 2);
    }

    #[test]
    fn bad_config_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.json");
        fs::write(&cfg, r#"{"sensr": {}}"#).unwrap();
        assert_eq!(run_cli(&["simulate", "--config", cfg.to_str().unwrap()]), 2);
        assert_eq!(run_cli(&["simulate", "--config", "/no/such/file.json"]), 2);
    }

    #[test]
    fn simulate_then_estimate_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let scan = dir.path().join("scan.csv");
        let report = dir.path().join("estimate.csv");
        assert_eq!(
            run_cli(&[
                "simulate",
                "--yaw-deg",
                "1.0",
                "--dx-mm",
                "10",
                "--seed",
                "7",
                "--out",
                scan.to_str().unwrap(),
            ]),
            0
        );
        assert!(scan.exists());
        assert_eq!(
            run_cli(&[
                "estimate",
                scan.to_str().unwrap(),
                "--out",
                report.to_str().unwrap(),
            ]),
            0
        );
        let text = fs::read_to_string(&report).unwrap();
        assert!(text.starts_with("#lidar-align-estimate v1\n"));
        assert_eq!(text.lines().count(), 3);
        // The error columns are populated because the simulated scan
        // carries its truth.
        let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(row.len(), 3 + 18);
        let err_yaw: f64 = row[3 + 12 + 1].parse().unwrap();
        assert!(err_yaw.abs() < 0.5, "yaw error {err_yaw} deg");
    }

    #[test]
    fn estimate_failures_exit_1() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_cli(&["estimate", "/no/such/scan.csv"]), 1);
        let malformed = dir.path().join("scan.csv");
        fs::write(&malformed, "not a scan\n").unwrap();
        assert_eq!(run_cli(&["estimate", malformed.to_str().unwrap()]), 1);
    }

    #[test]
    fn montecarlo_writes_all_three_reports() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.json");
        fs::write(&cfg, r#"{"sweep": {"mode": "random", "poses": 2}, "scans_per_pose": 2}"#)
            .unwrap();
        let out = dir.path().join("reports");
        assert_eq!(
            run_cli(&[
                "montecarlo",
                "--config",
                cfg.to_str().unwrap(),
                "--seed",
                "5",
                "--out",
                out.to_str().unwrap(),
            ]),
            0
        );
        for name in ["summary.csv", "pose_stats.csv", "trials.csv"] {
            assert!(out.join(name).exists(), "{name} missing");
        }
        let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
        assert!(summary.starts_with("#lidar-align-summary v1\n"));
    }

    #[test]
    fn mode_and_scans_flags_override_the_config() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("reports");
        assert_eq!(
            run_cli(&[
                "montecarlo",
                "--mode",
                "yaw-sweep",
                "--scans",
                "1",
                "--out",
                out.to_str().unwrap(),
            ]),
            0
        );
        let trials = fs::read_to_string(out.join("trials.csv")).unwrap();
        // 13 yaw poses x 1 scan + header + column line.
        assert_eq!(trials.lines().count(), 2 + 13);
    }

    #[test]
    fn bench_runs_and_writes_latencies() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("latency.csv");
        assert_eq!(
            run_cli(&["bench", "--scans", "3", "--out", out.to_str().unwrap()]),
            0
        );
        let text = fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("#lidar-align-bench v1\n"));
        assert_eq!(text.lines().count(), 2 + 3);
    }
}
