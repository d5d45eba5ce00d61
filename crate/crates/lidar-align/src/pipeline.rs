//! End-to-end estimation: raw scan in, misalignment estimate out.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::features::extract_corner_features;
use crate::geometry::{corner_matrix, spherical_to_cartesian, Point3, RigidTransform, TargetSpec};
use crate::preprocess::{
    euclidean_cluster, project_to_plane, ransac_plane_fit, select_roi, RansacConfig, RoiCriteria,
};
use crate::sim::Scene;
use crate::solver::{lm_solve, EstimateReport, SolverConfig};

/// Everything [`estimate_alignment`] needs besides the scan and the target
/// dimensions.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    /// Nominal board placement: where the board would appear to a perfectly
    /// mounted sensor. The solver measures misalignment against it.
    pub board_pose: RigidTransform,
    /// Euclidean clustering linkage distance, meters.
    pub cluster_tolerance: f64,
    pub roi: RoiCriteria,
    pub ransac: RansacConfig,
    pub ransac_seed: u64,
    pub solver: SolverConfig,
}

impl PipelineConfig {
    /// Configuration matching a simulated scene's board placement.
    pub fn for_scene(scene: &Scene) -> PipelineConfig {
        PipelineConfig { board_pose: scene.board_pose, ..PipelineConfig::default() }
    }
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            board_pose: Scene::default().board_pose,
            cluster_tolerance: 0.1,
            roi: RoiCriteria::default(),
            ransac: RansacConfig::default(),
            ransac_seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

/// Preprocessing knobs as a serializable bundle (the nominal board pose is
/// configured separately, as part of the scene).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessConfig {
    pub cluster_tolerance: f64,
    pub roi: RoiCriteria,
    pub ransac: RansacConfig,
    pub ransac_seed: u64,
}

impl Default for PreprocessConfig {
    fn default() -> PreprocessConfig {
        let p = PipelineConfig::default();
        PreprocessConfig {
            cluster_tolerance: p.cluster_tolerance,
            roi: p.roi,
            ransac: p.ransac,
            ransac_seed: p.ransac_seed,
        }
    }
}

/// Runs the full chain on one scan: Cartesian conversion → Euclidean
/// clustering → ROI selection → RANSAC plane fit → projection onto the
/// plane → corner feature extraction → Levenberg–Marquardt solve against
/// the nominal board corners. Any stage failure propagates with the stage
/// recorded on the error.
pub fn estimate_alignment(
    scan: &crate::sim::Scan,
    target: &TargetSpec,
    cfg: &PipelineConfig,
) -> Result<EstimateReport> {
    target.validate()?;

    let mut points = Vec::with_capacity(scan.beams.len());
    let mut reflectivity = Vec::with_capacity(scan.beams.len());
    for beam in &scan.beams {
        points.push(spherical_to_cartesian(beam)?);
        reflectivity.push(beam.reflectivity);
    }

    let clusters = euclidean_cluster(&points, &reflectivity, cfg.cluster_tolerance)?;
    let roi = select_roi(&clusters, &cfg.roi)?;

    let roi_points: Vec<Point3> = roi.indices.iter().map(|&i| points[i]).collect();
    let (plane, inliers) = ransac_plane_fit(&roi_points, &cfg.ransac, cfg.ransac_seed)?;

    let inlier_points: Vec<Point3> = inliers.iter().map(|&i| roi_points[i]).collect();
    let inlier_beams: Vec<_> =
        inliers.iter().map(|&i| scan.beams[roi.indices[i]]).collect();
    let projected = project_to_plane(&inlier_points, &plane);

    let features = extract_corner_features(&projected, &inlier_beams, &plane)?;
    let corners = corner_matrix(target).map(|c| cfg.board_pose.apply(c));
    lm_solve(&corners, &features, &cfg.solver)
}
