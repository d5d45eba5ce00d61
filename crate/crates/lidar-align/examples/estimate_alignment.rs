//! End-to-end demo: simulates a noisy scan of the target board under a
//! known misalignment, runs the full estimation pipeline on it, and
//! compares the estimate with the truth.
//!
//! ```text
//! cargo run --example estimate_alignment [seed]
//! ```

use lidar_align::{
    estimate_alignment, generate_scan, PipelineConfig, PoseVector, Scene, SensorModel,
};

fn main() -> lidar_align::Result<()> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse().expect("seed")).unwrap_or(7);

    let sensor = SensorModel::vlp16();
    let scene = Scene::default();
    let truth = PoseVector::new(
        0.5f64.to_radians(),
        -1.2f64.to_radians(),
        0.8f64.to_radians(),
        0.015,
        0.0,
        0.0,
    );

    let scan = generate_scan(&sensor, &scene, &truth, seed)?;
    println!("scan: {} beams, seed {seed}", scan.beams.len());

    let cfg = PipelineConfig::for_scene(&scene);
    let report = estimate_alignment(&scan, &scene.target, &cfg)?;

    println!("\n{:<8}{:>12}{:>12}{:>12}", "", "estimate", "truth", "error");
    let rows = [
        ("tilt", report.pose.tilt.to_degrees(), truth.tilt.to_degrees(), "deg"),
        ("yaw", report.pose.yaw.to_degrees(), truth.yaw.to_degrees(), "deg"),
        ("roll", report.pose.roll.to_degrees(), truth.roll.to_degrees(), "deg"),
        ("dx", report.pose.dx * 1000.0, truth.dx * 1000.0, "mm"),
        ("dy", report.pose.dy * 1000.0, truth.dy * 1000.0, "mm"),
        ("dz", report.pose.dz * 1000.0, truth.dz * 1000.0, "mm"),
    ];
    for (name, est, tru, unit) in rows {
        println!("{name:<8}{est:>12.4}{tru:>12.4}{:>12.4}  {unit}", est - tru);
    }
    println!(
        "\nconverged: {} after {} iterations, final cost {:.3e}",
        report.converged, report.iterations, report.cost
    );
    Ok(())
}
