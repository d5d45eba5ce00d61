//! Run configuration: one JSON document describing the sensor, scene,
//! preprocessing, solver and experiment sweep. Every field has a default,
//! so `{}` is a complete configuration; unknown keys are rejected.
//!
//! Angles and millimeter quantities use a `_deg`/`_mm` suffix at the file
//! boundary for readability; everything else is SI (meters, radians become
//! meters/radians only after [`RunConfig::sensor_model`] etc. convert them).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rotation_from_angles, Point3, PoseVector, RigidTransform, TargetSpec};
use crate::pipeline::{PipelineConfig, PreprocessConfig};
use crate::preprocess::PlaneModel;
use crate::sim::{ClutterPlane, Scene, SensorModel};
use crate::solver::SolverConfig;

/// Sensor description with angles in degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorConfig {
    pub vertical_angles_deg: Vec<f64>,
    pub azimuth_step_deg: f64,
    /// 1σ range noise, meters.
    pub range_noise_sigma: f64,
    /// Systematic range offset, meters.
    pub range_offset: f64,
    pub azimuth_jitter_deg: f64,
    pub max_range: f64,
}

impl Default for SensorConfig {
    fn default() -> SensorConfig {
        let m = SensorModel::vlp16();
        SensorConfig {
            // Degree literals rather than radian→degree conversions, so that
            // building the default config reproduces the stock sensor model
            // bit-for-bit.
            vertical_angles_deg: (0..16).map(|i| -15.0 + 2.0 * i as f64).collect(),
            azimuth_step_deg: 0.2,
            range_noise_sigma: m.range_noise_sigma,
            range_offset: m.range_offset,
            azimuth_jitter_deg: 0.1,
            max_range: m.max_range,
        }
    }
}

impl SensorConfig {
    pub fn build(&self) -> Result<SensorModel> {
        let model = SensorModel {
            vertical_angles: self.vertical_angles_deg.iter().map(|w| w.to_radians()).collect(),
            azimuth_step: self.azimuth_step_deg.to_radians(),
            range_noise_sigma: self.range_noise_sigma,
            range_offset: self.range_offset,
            azimuth_jitter: self.azimuth_jitter_deg.to_radians(),
            max_range: self.max_range,
        };
        model.validate()?;
        Ok(model)
    }
}

/// One background plane `normal·p + d = 0` in the nominal sensor frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClutterConfig {
    pub normal: [f64; 3],
    pub d: f64,
    pub reflectivity: f64,
}

/// Scene layout: board placement in the nominal sensor frame plus clutter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneConfig {
    /// Board center position, meters.
    pub board_center: [f64; 3],
    /// Board orientation as (tilt, yaw, roll) degrees, same convention as
    /// the misalignment angles.
    pub board_rotation_deg: [f64; 3],
    pub board_reflectivity: f64,
    pub clutter: Vec<ClutterConfig>,
}

impl Default for SceneConfig {
    fn default() -> SceneConfig {
        let scene = Scene::default();
        SceneConfig {
            board_center: [
                scene.board_pose.translation.x,
                scene.board_pose.translation.y,
                scene.board_pose.translation.z,
            ],
            board_rotation_deg: [0.0; 3],
            board_reflectivity: scene.board_reflectivity,
            clutter: scene
                .clutter
                .iter()
                .map(|c| ClutterConfig {
                    normal: [c.plane.normal.x, c.plane.normal.y, c.plane.normal.z],
                    d: c.plane.d,
                    reflectivity: c.reflectivity,
                })
                .collect(),
        }
    }
}

impl SceneConfig {
    pub fn build(&self, target: &TargetSpec) -> Result<Scene> {
        let [tilt, yaw, roll] = self.board_rotation_deg;
        let rotation = rotation_from_angles(&PoseVector::new(
            tilt.to_radians(),
            yaw.to_radians(),
            roll.to_radians(),
            0.0,
            0.0,
            0.0,
        ));
        let board_pose = RigidTransform::new(
            rotation.rotation,
            nalgebra::Vector3::new(self.board_center[0], self.board_center[1], self.board_center[2]),
        );
        let mut clutter = Vec::with_capacity(self.clutter.len());
        for c in &self.clutter {
            clutter.push(ClutterPlane {
                plane: PlaneModel::new(Point3::new(c.normal[0], c.normal[1], c.normal[2]), c.d)?,
                reflectivity: c.reflectivity,
            });
        }
        let scene = Scene {
            target: *target,
            board_pose,
            board_reflectivity: self.board_reflectivity,
            clutter,
        };
        scene.validate()?;
        Ok(scene)
    }
}

fn default_yaw_start() -> f64 {
    -3.0
}
fn default_yaw_stop() -> f64 {
    3.0
}
fn default_yaw_step() -> f64 {
    0.5
}
fn default_x_start() -> f64 {
    -30.0
}
fn default_x_stop() -> f64 {
    30.0
}
fn default_x_step() -> f64 {
    5.0
}
fn default_random_poses() -> usize {
    100
}
fn default_angle_bound() -> f64 {
    3.0
}
fn default_translation_bound() -> f64 {
    30.0
}

/// Which poses the Monte Carlo run visits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", deny_unknown_fields)]
pub enum SweepSpec {
    /// Yaw-only misalignments over a fixed grid.
    #[serde(rename = "yaw-sweep")]
    YawSweep {
        #[serde(default = "default_yaw_start")]
        start_deg: f64,
        #[serde(default = "default_yaw_stop")]
        stop_deg: f64,
        #[serde(default = "default_yaw_step")]
        step_deg: f64,
    },
    /// Horizontal-offset-only misalignments over a fixed grid.
    #[serde(rename = "x-sweep")]
    XSweep {
        #[serde(default = "default_x_start")]
        start_mm: f64,
        #[serde(default = "default_x_stop")]
        stop_mm: f64,
        #[serde(default = "default_x_step")]
        step_mm: f64,
    },
    /// Poses drawn uniformly: all three angles within the angle bound,
    /// horizontal displacement within the translation bound.
    #[serde(rename = "random")]
    Random {
        #[serde(default = "default_random_poses")]
        poses: usize,
        #[serde(default = "default_angle_bound")]
        angle_bound_deg: f64,
        #[serde(default = "default_translation_bound")]
        translation_bound_mm: f64,
    },
}

impl SweepSpec {
    pub fn yaw_sweep() -> SweepSpec {
        SweepSpec::YawSweep {
            start_deg: default_yaw_start(),
            stop_deg: default_yaw_stop(),
            step_deg: default_yaw_step(),
        }
    }

    pub fn x_sweep() -> SweepSpec {
        SweepSpec::XSweep {
            start_mm: default_x_start(),
            stop_mm: default_x_stop(),
            step_mm: default_x_step(),
        }
    }

    pub fn random() -> SweepSpec {
        SweepSpec::Random {
            poses: default_random_poses(),
            angle_bound_deg: default_angle_bound(),
            translation_bound_mm: default_translation_bound(),
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self {
            SweepSpec::YawSweep { .. } => "yaw-sweep",
            SweepSpec::XSweep { .. } => "x-sweep",
            SweepSpec::Random { .. } => "random",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SweepSpec::YawSweep { start_deg, stop_deg, step_deg } => {
                grid_ok("yaw-sweep", start_deg, stop_deg, step_deg)
            }
            SweepSpec::XSweep { start_mm, stop_mm, step_mm } => {
                grid_ok("x-sweep", start_mm, stop_mm, step_mm)
            }
            SweepSpec::Random { poses, angle_bound_deg, translation_bound_mm } => {
                if poses == 0 {
                    return Err(Error::Config("random sweep needs at least one pose".into()));
                }
                if !(angle_bound_deg.is_finite() && angle_bound_deg >= 0.0) {
                    return Err(Error::Config("angle_bound_deg must be >= 0".into()));
                }
                if !(translation_bound_mm.is_finite() && translation_bound_mm >= 0.0) {
                    return Err(Error::Config("translation_bound_mm must be >= 0".into()));
                }
                Ok(())
            }
        }
    }
}

fn grid_ok(mode: &str, start: f64, stop: f64, step: f64) -> Result<()> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::Config(format!("{mode} grid values must be finite")));
    }
    if step <= 0.0 {
        return Err(Error::Config(format!("{mode} step must be > 0, got {step}")));
    }
    if stop < start {
        return Err(Error::Config(format!("{mode} stop {stop} is below start {start}")));
    }
    Ok(())
}

fn default_scans_per_pose() -> usize {
    50
}

/// The complete run description. `{}` parses to the defaults; any subset of
/// sections may be overridden.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub sensor: SensorConfig,
    pub target: TargetSpec,
    pub scene: SceneConfig,
    pub preprocess: PreprocessConfig,
    pub solver: SolverConfig,
    pub sweep: SweepSpec,
    pub scans_per_pose: usize,
    pub master_seed: u64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            sensor: SensorConfig::default(),
            target: TargetSpec::default(),
            scene: SceneConfig::default(),
            preprocess: PreprocessConfig::default(),
            solver: SolverConfig::default(),
            sweep: SweepSpec::yaw_sweep(),
            scans_per_pose: default_scans_per_pose(),
            master_seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        self.sensor.build()?;
        self.target.validate()?;
        self.scene.build(&self.target)?;
        self.solver.validate()?;
        self.preprocess.ransac.validate()?;
        self.sweep.validate()?;
        if self.scans_per_pose == 0 {
            return Err(Error::Config("scans_per_pose must be >= 1".into()));
        }
        Ok(())
    }

    pub fn sensor_model(&self) -> Result<SensorModel> {
        self.sensor.build()
    }

    pub fn scene(&self) -> Result<Scene> {
        self.scene.build(&self.target)
    }

    /// Pipeline configuration with the board pose taken from the scene.
    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        let scene = self.scene()?;
        Ok(PipelineConfig {
            board_pose: scene.board_pose,
            cluster_tolerance: self.preprocess.cluster_tolerance,
            roi: self.preprocess.roi,
            ransac: self.preprocess.ransac,
            ransac_seed: self.preprocess.ransac_seed,
            solver: self.solver,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::io::Write;

    #[test]
    fn empty_object_is_the_default_config() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.scans_per_pose, 50);
        assert_eq!(cfg.sweep, SweepSpec::yaw_sweep());
    }

    #[test]
    fn default_config_round_trips_through_json() {
        let cfg = RunConfig::default();
        let text = cfg.to_json_pretty();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        match RunConfig::from_json(r#"{"sensr": {}}"#) {
            Err(Error::Config(msg)) => assert!(msg.contains("sensr"), "message: {msg}"),
            other => panic!("expected Config error, got {other:?}"),
        }
        assert!(RunConfig::from_json(r#"{"sensor": {"rings": 16}}"#).is_err());
    }

    #[test]
    fn partial_override_keeps_other_defaults() {
        let cfg = RunConfig::from_json(
            r#"{"sweep": {"mode": "x-sweep", "step_mm": 10.0}, "master_seed": 42}"#,
        )
        .unwrap();
        assert_eq!(cfg.master_seed, 42);
        assert_eq!(
            cfg.sweep,
            SweepSpec::XSweep { start_mm: -30.0, stop_mm: 30.0, step_mm: 10.0 }
        );
        assert_eq!(cfg.sensor, SensorConfig::default());
        assert_eq!(cfg.scans_per_pose, 50);
    }

    #[test]
    fn sweep_modes_parse_by_tag() {
        let yaw = RunConfig::from_json(r#"{"sweep": {"mode": "yaw-sweep"}}"#).unwrap();
        assert_eq!(yaw.sweep, SweepSpec::yaw_sweep());
        let x = RunConfig::from_json(r#"{"sweep": {"mode": "x-sweep"}}"#).unwrap();
        assert_eq!(x.sweep, SweepSpec::x_sweep());
        let random = RunConfig::from_json(
            r#"{"sweep": {"mode": "random", "poses": 7, "angle_bound_deg": 2.0}}"#,
        )
        .unwrap();
        assert_eq!(
            random.sweep,
            SweepSpec::Random { poses: 7, angle_bound_deg: 2.0, translation_bound_mm: 30.0 }
        );
        assert!(RunConfig::from_json(r#"{"sweep": {"mode": "spiral"}}"#).is_err());
    }

    #[test]
    fn built_sensor_is_in_radians() {
        let sensor = RunConfig::default().sensor_model().unwrap();
        assert_eq!(sensor, SensorModel::vlp16());
        assert_abs_diff_eq!(sensor.azimuth_step, 0.2_f64.to_radians(), epsilon = 1e-15);
        assert_eq!(sensor.vertical_angles.len(), 16);
    }

    #[test]
    fn built_scene_matches_the_standard_layout() {
        let cfg = RunConfig::default();
        let scene = cfg.scene().unwrap();
        let standard = Scene::default();
        assert_eq!(scene.board_pose, standard.board_pose);
        assert_eq!(scene.board_reflectivity, standard.board_reflectivity);
        assert_eq!(scene.clutter, standard.clutter);

        let rotated = RunConfig::from_json(
            r#"{"scene": {"board_rotation_deg": [0.0, 30.0, 0.0]}}"#,
        )
        .unwrap()
        .scene()
        .unwrap();
        // A yawed board still faces the sensor through a rotated normal.
        let n = rotated.board_plane().unwrap().normal;
        assert_abs_diff_eq!(n.norm(), 1.0, epsilon = 1e-12);
        assert!(n.y < -0.8);
    }

    #[test]
    fn invalid_values_fail_validation() {
        assert!(RunConfig::from_json(r#"{"sweep": {"mode": "yaw-sweep", "step_deg": 0.0}}"#)
            .is_err());
        assert!(RunConfig::from_json(r#"{"scans_per_pose": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"sensor": {"azimuth_step_deg": -0.2}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"target": {"width": 0.0}}"#).is_err());
        assert!(
            RunConfig::from_json(r#"{"scene": {"board_center": [0.0, -2.5, 0.0]}}"#).is_err()
        );
    }

    #[test]
    fn config_loads_from_a_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"master_seed": 9, "scans_per_pose": 5}}"#).unwrap();
        let cfg = RunConfig::from_file(file.path()).unwrap();
        assert_eq!(cfg.master_seed, 9);
        assert_eq!(cfg.scans_per_pose, 5);

        match RunConfig::from_file(Path::new("/nonexistent/config.json")) {
            Err(Error::Config(msg)) => assert!(msg.contains("/nonexistent/config.json")),
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn pipeline_config_tracks_the_scene_pose() {
        let cfg = RunConfig::from_json(r#"{"scene": {"board_center": [0.0, 3.0, 0.1]}}"#).unwrap();
        let pipeline = cfg.pipeline_config().unwrap();
        assert_eq!(
            pipeline.board_pose.translation,
            nalgebra::Vector3::new(0.0, 3.0, 0.1)
        );
        assert_eq!(pipeline.solver, cfg.solver);
    }
}
