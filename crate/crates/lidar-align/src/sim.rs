//! Synthetic scan generation: a spinning multi-ring sensor sweeps a scene
//! containing one rectangular target board plus background clutter, under a
//! configurable mounting misalignment and range/azimuth noise model.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{
    wrap_azimuth, Point3, PoseEnvelope, PoseVector, RigidTransform, SphericalBeam, TargetSpec,
};
use crate::preprocess::PlaneModel;

/// Beam geometry and noise parameters of a spinning multi-ring sensor.
#[derive(Clone, Debug, PartialEq)]
pub struct SensorModel {
    /// Elevation angle of each ring in radians, strictly increasing.
    pub vertical_angles: Vec<f64>,
    /// Horizontal angle between consecutive firings, radians.
    pub azimuth_step: f64,
    /// Standard deviation of the range noise, meters.
    pub range_noise_sigma: f64,
    /// Systematic range offset (mean of the range noise), meters.
    pub range_offset: f64,
    /// Half-width of the per-revolution azimuth phase jitter, radians.
    pub azimuth_jitter: f64,
    /// Returns beyond this range are dropped, meters.
    pub max_range: f64,
}

impl SensorModel {
    /// A 16-ring sensor: rings at −15°..+15° in 2° steps, 0.2° azimuth
    /// resolution, 14 mm range noise, 5 mm range offset, 0.1° phase jitter.
    pub fn vlp16() -> SensorModel {
        SensorModel {
            vertical_angles: (0..16).map(|i| (-15.0 + 2.0 * i as f64).to_radians()).collect(),
            azimuth_step: 0.2_f64.to_radians(),
            range_noise_sigma: 0.014,
            range_offset: 0.005,
            azimuth_jitter: 0.1_f64.to_radians(),
            max_range: 100.0,
        }
    }

    /// The same sensor with all noise terms zeroed, for geometric tests.
    pub fn noiseless(&self) -> SensorModel {
        SensorModel {
            range_noise_sigma: 0.0,
            range_offset: 0.0,
            azimuth_jitter: 0.0,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertical_angles.is_empty() {
            return Err(Error::Validation("sensor needs at least one ring".into()));
        }
        if !self.vertical_angles.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Validation(
                "ring vertical angles must be strictly increasing".into(),
            ));
        }
        if self.vertical_angles.iter().any(|w| !w.is_finite() || w.abs() > 89f64.to_radians()) {
            return Err(Error::Validation("ring vertical angles must lie within ±89°".into()));
        }
        if !(self.azimuth_step.is_finite() && self.azimuth_step > 0.0) {
            return Err(Error::Validation("azimuth_step must be > 0".into()));
        }
        if !(self.range_noise_sigma.is_finite() && self.range_noise_sigma >= 0.0) {
            return Err(Error::Validation("range_noise_sigma must be >= 0".into()));
        }
        if !self.range_offset.is_finite() {
            return Err(Error::Validation("range_offset must be finite".into()));
        }
        if !(self.azimuth_jitter.is_finite() && self.azimuth_jitter >= 0.0) {
            return Err(Error::Validation("azimuth_jitter must be >= 0".into()));
        }
        if !(self.max_range.is_finite() && self.max_range > 0.0) {
            return Err(Error::Validation("max_range must be > 0".into()));
        }
        Ok(())
    }
}

impl Default for SensorModel {
    fn default() -> SensorModel {
        SensorModel::vlp16()
    }
}

/// A background plane with its return intensity, expressed in the nominal
/// sensor frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClutterPlane {
    pub plane: PlaneModel,
    pub reflectivity: f64,
}

/// What the sensor would see if it were mounted perfectly: the target board
/// pose, its reflectivity, and any background clutter, all in the nominal
/// sensor frame.
#[derive(Clone, Debug)]
pub struct Scene {
    pub target: TargetSpec,
    /// Pose of the board frame (origin at board center, board in its local
    /// x–z plane) relative to the nominal sensor frame.
    pub board_pose: RigidTransform,
    pub board_reflectivity: f64,
    pub clutter: Vec<ClutterPlane>,
}

impl Scene {
    /// Board center offset 0.7 m right and 2.5 m forward, facing the sensor,
    /// with a floor 0.5 m below and a wall 6 m ahead as clutter.
    pub fn standard(target: TargetSpec) -> Scene {
        Scene {
            target,
            board_pose: RigidTransform::new(
                nalgebra::Matrix3::identity(),
                nalgebra::Vector3::new(0.7, 2.5, 0.0),
            ),
            board_reflectivity: 0.9,
            clutter: vec![
                ClutterPlane {
                    // Floor at z = −0.5.
                    plane: PlaneModel::new(Point3::new(0.0, 0.0, 1.0), 0.5).unwrap(),
                    reflectivity: 0.2,
                },
                ClutterPlane {
                    // Wall at y = 6.
                    plane: PlaneModel::new(Point3::new(0.0, -1.0, 0.0), 6.0).unwrap(),
                    reflectivity: 0.2,
                },
            ],
        }
    }

    /// Same scene with the board centered on the forward axis; used where a
    /// symmetric beam pattern on the board matters.
    pub fn head_on(target: TargetSpec) -> Scene {
        let mut scene = Scene::standard(target);
        scene.board_pose.translation = nalgebra::Vector3::new(0.0, 2.5, 0.0);
        scene
    }

    /// The infinite plane carrying the board, in the nominal sensor frame.
    pub fn board_plane(&self) -> Result<PlaneModel> {
        let normal = self.board_pose.apply_rotation(Point3::new(0.0, 1.0, 0.0));
        let center = self.board_pose.apply(Point3::ZERO);
        PlaneModel::from_point_normal(center, normal)
    }

    pub fn validate(&self) -> Result<()> {
        self.target.validate()?;
        if !self.board_pose.is_rigid(1e-9) {
            return Err(Error::Validation("board_pose rotation is not orthonormal".into()));
        }
        if self.board_pose.translation.y <= 0.0 {
            return Err(Error::Validation(
                "board center must sit at positive y (in front of the sensor)".into(),
            ));
        }
        let plane = self.board_plane()?;
        if plane.d < 0.01 {
            return Err(Error::Validation(
                "board plane passes through the sensor origin".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.board_reflectivity) {
            return Err(Error::Validation("board_reflectivity must lie in [0, 1]".into()));
        }
        for (i, c) in self.clutter.iter().enumerate() {
            if !(0.0..=1.0).contains(&c.reflectivity) {
                return Err(Error::Validation(format!(
                    "clutter plane {i} reflectivity must lie in [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

impl Default for Scene {
    fn default() -> Scene {
        Scene::standard(TargetSpec::default())
    }
}

/// One simulated revolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Scan {
    /// Sorted by (ring, azimuth); no duplicate (ring, azimuth) pairs.
    pub beams: Vec<SphericalBeam>,
    /// Seed the scan was generated with (echoed into saved files).
    pub seed: u64,
    /// Ground-truth misalignment, when known.
    pub truth: Option<PoseVector>,
}

/// Range along `direction` (unit, from the origin) to the plane, or `None`
/// when the ray is parallel to the plane or the intersection lies behind
/// the sensor.
pub fn intersect_ray_plane(direction: &Point3, plane: &PlaneModel) -> Option<f64> {
    let denom = plane.normal.dot(direction);
    if denom.abs() < 1e-12 {
        return None;
    }
    let t = -plane.d / denom;
    if t > 0.0 {
        Some(t)
    } else {
        None
    }
}

/// Draws one range-noise sample: ε ~ N(Δr, σ²), truncated to Δr ± 5σ so a
/// wild tail draw cannot produce a negative range. With σ = 0 the offset is
/// returned exactly and no random number is consumed.
fn sample_range_noise(sensor: &SensorModel, rng: &mut ChaCha8Rng) -> f64 {
    if sensor.range_noise_sigma == 0.0 {
        return sensor.range_offset;
    }
    let normal = Normal::new(sensor.range_offset, sensor.range_noise_sigma)
        .expect("validated sigma is finite and non-negative");
    let eps: f64 = normal.sample(rng);
    eps.clamp(
        sensor.range_offset - 5.0 * sensor.range_noise_sigma,
        sensor.range_offset + 5.0 * sensor.range_noise_sigma,
    )
}

/// Perturbs one beam with the sensor's noise model: range gains a truncated
/// N(Δr, σ²) sample, azimuth gains a uniform draw within the jitter
/// half-width, and the vertical angle stays fixed (diode geometry).
pub fn apply_noise(
    beam: &SphericalBeam,
    sensor: &SensorModel,
    rng: &mut ChaCha8Rng,
) -> SphericalBeam {
    let mut out = *beam;
    out.range += sample_range_noise(sensor, rng);
    if sensor.azimuth_jitter > 0.0 {
        let j = sensor.azimuth_jitter;
        out.azimuth = wrap_azimuth(out.azimuth + rng.random_range(-j..=j));
    }
    out
}

/// Simulates one revolution of the misaligned sensor.
///
/// The `truth` pose maps actual sensor coordinates to nominal ones, so the
/// scene (defined in the nominal frame) is seen by the sensor through the
/// inverse of `truth`. Each ring sweeps a full revolution in `azimuth_step`
/// increments; the whole comb is shifted by one uniform phase draw within
/// the jitter half-width (spin-speed fluctuation moves every firing of a
/// revolution together). Every ray keeps the nearest surface it strikes —
/// the board rectangle or a clutter plane — and the recorded range is the
/// true range plus a truncated N(Δr, σ²) sample.
///
/// Deterministic for fixed inputs: draws one phase sample (when jitter > 0),
/// then one range sample per recorded beam in firing order.
pub fn generate_scan(
    sensor: &SensorModel,
    scene: &Scene,
    truth: &PoseVector,
    seed: u64,
) -> Result<Scan> {
    sensor.validate()?;
    scene.validate()?;
    truth.validate(&PoseEnvelope::default())?;

    let nominal_from_actual = truth.transform();
    let actual_from_nominal = nominal_from_actual.inverse();
    let board_in_sensor = actual_from_nominal.compose(&scene.board_pose);
    let board_from_sensor = board_in_sensor.inverse();
    let board_plane = scene.board_plane()?.transformed(&actual_from_nominal);
    let clutter: Vec<(PlaneModel, f64)> = scene
        .clutter
        .iter()
        .map(|c| (c.plane.transformed(&actual_from_nominal), c.reflectivity))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase = if sensor.azimuth_jitter > 0.0 {
        rng.random_range(-sensor.azimuth_jitter..=sensor.azimuth_jitter)
    } else {
        0.0
    };

    // Number of firings per revolution; the epsilon keeps an exact divisor
    // (e.g. 0.2° into 360°) from losing its last step to float rounding.
    let steps = (TAU / sensor.azimuth_step + 1e-9).floor() as usize;
    let (half_w, half_h) = (scene.target.width / 2.0, scene.target.height / 2.0);

    let mut beams = Vec::new();
    let mut board_hits = 0usize;
    for (ring, &vertical) in sensor.vertical_angles.iter().enumerate() {
        let (sin_w, cos_w) = vertical.sin_cos();
        for k in 0..steps {
            let azimuth = wrap_azimuth(k as f64 * sensor.azimuth_step + phase);
            let (sin_a, cos_a) = azimuth.sin_cos();
            let dir = Point3::new(cos_w * sin_a, cos_w * cos_a, sin_w);

            let mut hit: Option<(f64, f64, bool)> = None; // (range, reflectivity, is_board)
            if let Some(t) = intersect_ray_plane(&dir, &board_plane) {
                let local = board_from_sensor.apply(dir * t);
                if local.x.abs() <= half_w && local.z.abs() <= half_h {
                    hit = Some((t, scene.board_reflectivity, true));
                }
            }
            for (plane, reflectivity) in &clutter {
                if let Some(t) = intersect_ray_plane(&dir, plane) {
                    if hit.is_none_or(|(best, _, _)| t < best) {
                        hit = Some((t, *reflectivity, false));
                    }
                }
            }

            let Some((range, reflectivity, is_board)) = hit else {
                continue;
            };
            if range > sensor.max_range {
                continue;
            }
            board_hits += usize::from(is_board);
            beams.push(SphericalBeam {
                ring: ring as u16,
                azimuth,
                vertical,
                range: range + sample_range_noise(sensor, &mut rng),
                reflectivity,
            });
        }
    }

    if board_hits == 0 {
        return Err(Error::UnusableScene(
            "no ray strikes the target board; it lies outside the field of view".into(),
        ));
    }

    beams.sort_by(|a, b| {
        a.ring.cmp(&b.ring).then(a.azimuth.partial_cmp(&b.azimuth).expect("finite azimuths"))
    });
    Ok(Scan { beams, seed, truth: Some(*truth) })
}
