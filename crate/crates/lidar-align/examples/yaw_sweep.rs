//! Monte Carlo yaw sweep: steps the true yaw misalignment from −3° to 3°,
//! estimates many noisy scans at each pose, and prints the per-pose mean
//! error and spread.
//!
//! ```text
//! cargo run --release --example yaw_sweep [scans_per_pose]
//! ```

use lidar_align::{run_montecarlo, RunConfig, SweepSpec};

fn main() -> lidar_align::Result<()> {
    let scans: usize =
        std::env::args().nth(1).map(|s| s.parse().expect("scans per pose")).unwrap_or(10);

    let mut cfg = RunConfig::default();
    cfg.sweep = SweepSpec::yaw_sweep();
    cfg.scans_per_pose = scans;
    cfg.master_seed = 1;

    let (summary, _records) = run_montecarlo(&cfg)?;

    println!("yaw sweep, {scans} scans per pose:");
    println!("{:>10}{:>16}{:>12}", "truth", "mean error", "std");
    for s in &summary.pose_stats {
        println!(
            "{:>9.1}°{:>15.4}°{:>11.4}°",
            s.truth.yaw.to_degrees(),
            s.mean_error.yaw.to_degrees(),
            s.std_error.yaw.to_degrees()
        );
    }
    println!(
        "\noverall: yaw accuracy {:+.4}°, precision {:.4}° over {} trials ({} failed)",
        summary.accuracy.yaw.to_degrees(),
        summary.precision.yaw.to_degrees(),
        summary.total_trials,
        summary.failed_trials
    );
    Ok(())
}
