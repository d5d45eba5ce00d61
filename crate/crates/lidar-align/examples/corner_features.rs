//! Shows how the four corner features are picked from a preprocessed scan
//! and how close they land to the true board corners.
//!
//! ```text
//! cargo run --example corner_features
//! ```

use lidar_align::{
    corner_matrix, euclidean_cluster, extract_corner_features, generate_scan, plane_basis,
    project_to_plane, ransac_plane_fit, select_roi, spherical_to_cartesian, PoseVector,
    RansacConfig, RoiCriteria, Scene, SensorModel,
};

fn main() -> lidar_align::Result<()> {
    let scene = Scene::default();
    // Zero-noise sensor so the only corner error is beam discretization.
    let sensor = SensorModel::vlp16().noiseless();
    let truth = PoseVector::ZERO;
    let scan = generate_scan(&sensor, &scene, &truth, 0)?;

    let points: Vec<_> =
        scan.beams.iter().map(spherical_to_cartesian).collect::<lidar_align::Result<_>>()?;
    let reflectivity: Vec<f64> = scan.beams.iter().map(|b| b.reflectivity).collect();
    let clusters = euclidean_cluster(&points, &reflectivity, 0.1)?;
    let roi = select_roi(&clusters, &RoiCriteria::default())?;
    let roi_points: Vec<_> = roi.indices.iter().map(|&i| points[i]).collect();
    let roi_beams: Vec<_> = roi.indices.iter().map(|&i| scan.beams[i]).collect();
    let (plane, inliers) = ransac_plane_fit(&roi_points, &RansacConfig::default(), 1)?;
    let inlier_points: Vec<_> = inliers.iter().map(|&i| roi_points[i]).collect();
    let inlier_beams: Vec<_> = inliers.iter().map(|&i| roi_beams[i]).collect();
    let projected = project_to_plane(&inlier_points, &plane);

    let (u, v) = plane_basis(&plane)?;
    println!("plane basis on the board:");
    println!("  right u = ({:+.4}, {:+.4}, {:+.4})", u.x, u.y, u.z);
    println!("  up    v = ({:+.4}, {:+.4}, {:+.4})", v.x, v.y, v.z);

    let features = extract_corner_features(&projected, &inlier_beams, &plane)?;
    let true_corners = corner_matrix(&scene.target).map(|c| scene.board_pose.apply(c));

    println!("\n{:<14}{:>10}{:>26}{:>16}", "corner", "ring", "feature position (m)", "to corner (mm)");
    for (label, feature, corner) in [
        ("top-left", &features.top_left, &true_corners[0]),
        ("top-right", &features.top_right, &true_corners[1]),
        ("bottom-left", &features.bottom_left, &true_corners[2]),
        ("bottom-right", &features.bottom_right, &true_corners[3]),
    ] {
        let p = feature.point;
        let gap = (p - *corner).norm() * 1000.0;
        println!(
            "{label:<14}{:>10}   ({:+.3}, {:+.3}, {:+.3}){gap:>16.1}",
            feature.beam.ring, p.x, p.y, p.z
        );
    }
    println!("\nfeatures land within one beam-grid cell (~9 mm horizontally,");
    println!("~90 mm vertically at this range) of the physical corners.");
    Ok(())
}
