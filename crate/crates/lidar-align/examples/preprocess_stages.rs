//! Walks a raw scan through the preprocessing stages one at a time:
//! Cartesian conversion → Euclidean clustering → ROI selection → RANSAC
//! plane fit → projection onto the fitted plane.
//!
//! ```text
//! cargo run --example preprocess_stages
//! ```

use lidar_align::{
    euclidean_cluster, generate_scan, project_to_plane, ransac_plane_fit, select_roi,
    spherical_to_cartesian, PoseVector, RansacConfig, RoiCriteria, Scene, SensorModel,
};

fn main() -> lidar_align::Result<()> {
    let scene = Scene::default();
    let truth = PoseVector::new(0.0, 1f64.to_radians(), 0.0, 0.01, 0.0, 0.0);
    let scan = generate_scan(&SensorModel::vlp16(), &scene, &truth, 3)?;
    println!("scan: {} beams", scan.beams.len());

    let points: Vec<_> =
        scan.beams.iter().map(spherical_to_cartesian).collect::<lidar_align::Result<_>>()?;
    let reflectivity: Vec<f64> = scan.beams.iter().map(|b| b.reflectivity).collect();

    let clusters = euclidean_cluster(&points, &reflectivity, 0.1)?;
    // Sparse far-range clutter shatters into many tiny clusters; only the
    // substantial ones are worth tabulating.
    println!("\nclusters (tolerance 0.1 m), {} total, those with ≥ 50 points:", clusters.len());
    println!("{:<8}{:>8}{:>14}{:>18}", "cluster", "points", "mean range", "mean reflectivity");
    for (i, c) in clusters.iter().enumerate().filter(|(_, c)| c.len() >= 50) {
        println!(
            "{i:<8}{:>8}{:>12.2} m{:>18.2}",
            c.indices.len(),
            c.mean_range,
            c.mean_reflectivity
        );
    }

    let roi = select_roi(&clusters, &RoiCriteria::default())?;
    println!(
        "\nROI: {} points at mean range {:.2} m, centroid ({:.2}, {:.2}, {:.2})",
        roi.indices.len(),
        roi.mean_range,
        roi.centroid.x,
        roi.centroid.y,
        roi.centroid.z
    );

    let roi_points: Vec<_> = roi.indices.iter().map(|&i| points[i]).collect();
    let (plane, inliers) = ransac_plane_fit(&roi_points, &RansacConfig::default(), 1)?;
    println!(
        "\nfitted plane: normal ({:+.4}, {:+.4}, {:+.4}), d {:.4} m, {} of {} inliers",
        plane.normal.x,
        plane.normal.y,
        plane.normal.z,
        plane.d,
        inliers.len(),
        roi_points.len()
    );
    let true_normal = scene.board_plane()?.normal;
    let misfit = plane.normal.dot(&true_normal).clamp(-1.0, 1.0).acos().to_degrees();
    println!("angle to the true board normal: {misfit:.4}°");

    let inlier_points: Vec<_> = inliers.iter().map(|&i| roi_points[i]).collect();
    let worst_before = inlier_points
        .iter()
        .map(|p| plane.signed_distance(p).abs())
        .fold(0.0, f64::max);
    let projected = project_to_plane(&inlier_points, &plane);
    let worst_after =
        projected.iter().map(|p| plane.signed_distance(p).abs()).fold(0.0, f64::max);
    println!(
        "\nprojection: worst plane distance {:.1} mm before, {:.1e} mm after",
        worst_before * 1000.0,
        worst_after * 1000.0
    );
    Ok(())
}
