//! Six-degree-of-freedom alignment inspection for low-resolution LiDAR.
//!
//! A sensor mounted on a vehicle can end up tilted, rotated, or shifted
//! relative to its nominal mounting pose. This crate estimates that
//! misalignment — three angles (tilt, yaw, roll) and three translations —
//! from a single scan of a rectangular reference board placed in front of
//! the sensor:
//!
//! 1. isolate the board returns ([`select_roi`], [`euclidean_cluster`]),
//! 2. fit the board plane robustly and flatten the points onto it
//!    ([`ransac_plane_fit`], [`project_to_plane`]),
//! 3. recover the four board corners from the planar hull
//!    ([`extract_corner_features`]),
//! 4. solve for the rigid transform that maps the nominal corner positions
//!    onto the observed ones ([`lm_solve`]).
//!
//! [`estimate_alignment`] runs the whole chain. A beam-level scan simulator
//! ([`generate_scan`]) produces realistic input for testing, and
//! [`run_montecarlo`] sweeps misalignment poses to measure accuracy and
//! precision envelopes across many noisy trials.
//!
//! Start with the runnable examples — each demonstrates one capability:
//!
//! * `simulate_scan` — synthesize a scan and write it as CSV
//! * `estimate_alignment` — one noisy scan in, estimate vs. truth out
//! * `preprocess_stages` — walk the ROI / cluster / plane-fit stages
//! * `corner_features` — corner recovery from the projected cloud
//! * `solver_convergence` — cost trajectory of the optimizer
//! * `yaw_sweep` — accuracy/precision across a yaw misalignment sweep
//! * `bench_latency` — end-to-end pipeline latency distribution
//!
//! The same capabilities are scriptable through the `lidar-align` binary
//! (`simulate`, `estimate`, `montecarlo`, `bench`).

pub mod cli;
pub mod config;
pub mod error;
pub mod features;
pub mod geometry;
pub mod io;
pub mod montecarlo;
pub mod pipeline;
pub mod preprocess;
pub mod sim;
pub mod solver;

pub use config::{ClutterConfig, RunConfig, SceneConfig, SensorConfig, SweepSpec};
pub use error::{Error, Result};
pub use features::{extract_corner_features, plane_basis, CornerFeature, CornerFeatures};
pub use geometry::{
    corner_matrix, rotation_from_angles, spherical_to_cartesian, wrap_azimuth, Point3,
    PoseEnvelope, PoseVector, RigidTransform, SphericalBeam, TargetSpec,
};
pub use io::{
    load_scan, pose_stats_to_csv, save_scan, scan_from_str, scan_to_string, summary_to_csv,
    trials_to_csv, write_pose_stats_csv, write_summary_csv, write_trials_csv,
};
pub use montecarlo::{
    derive_seed, run_bench, run_montecarlo, sweep_poses, BenchReport, McSummary, PoseStats,
    TrialOutcome, TrialRecord,
};
pub use pipeline::{estimate_alignment, PipelineConfig, PreprocessConfig};
pub use preprocess::{
    euclidean_cluster, project_to_plane, ransac_plane_fit, select_roi, Cluster, PlaneModel,
    RansacConfig, RoiCriteria,
};
pub use sim::{apply_noise, generate_scan, intersect_ray_plane, ClutterPlane, Scan, Scene, SensorModel};
pub use solver::{jacobian, lm_solve, residual, EstimateReport, SolverConfig};
