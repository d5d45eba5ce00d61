//! Runs the damped least-squares solver on noiseless corner measurements
//! and prints the cost trajectory, showing exact recovery of the
//! misalignment that produced them.
//!
//! ```text
//! cargo run --example solver_convergence
//! ```

use lidar_align::{
    corner_matrix, lm_solve, CornerFeature, CornerFeatures, PoseVector, Scene, SolverConfig,
};

fn main() -> lidar_align::Result<()> {
    let scene = Scene::default();
    let corners = corner_matrix(&scene.target).map(|c| scene.board_pose.apply(c));

    // The misalignment to recover: the sensor sees every corner displaced
    // by the inverse of this pose.
    let truth = PoseVector::new(
        1.5f64.to_radians(),
        -2.0f64.to_radians(),
        1.0f64.to_radians(),
        0.020,
        0.0,
        0.0,
    );
    let sensor_from_nominal = truth.transform().inverse();
    let measured = corners.map(|c| sensor_from_nominal.apply(c));
    let features = CornerFeatures {
        top_left: CornerFeature::at(measured[0], 8),
        top_right: CornerFeature::at(measured[1], 8),
        bottom_left: CornerFeature::at(measured[2], 6),
        bottom_right: CornerFeature::at(measured[3], 6),
    };

    let report = lm_solve(&corners, &features, &SolverConfig::default())?;

    println!("cost trajectory ({} accepted steps):", report.cost_history.len());
    let h = &report.cost_history;
    for i in (0..h.len()).step_by((h.len() / 12).max(1)).chain([h.len() - 1]) {
        println!("  step {i:>5}: {:>12.3e}", h[i]);
    }

    println!("\nrecovered pose vs truth:");
    for (name, got, want) in [
        ("tilt", report.pose.tilt, truth.tilt),
        ("yaw", report.pose.yaw, truth.yaw),
        ("roll", report.pose.roll, truth.roll),
        ("dx", report.pose.dx, truth.dx),
        ("dy", report.pose.dy, truth.dy),
        ("dz", report.pose.dz, truth.dz),
    ] {
        println!("  {name:<6} {got:>14.9} vs {want:>14.9}  (|err| {:.2e})", (got - want).abs());
    }
    println!(
        "\nconverged: {} in {} iterations, final cost {:.3e}",
        report.converged, report.iterations, report.cost
    );
    Ok(())
}
