//! Geometric primitives shared by the simulator and the estimator: points,
//! spherical beams, pose parameters, rigid transforms and the target corner
//! layout.
//!
//! Frame convention used throughout the crate: x points right, y points
//! forward (the distance axis), z points up. The sensor frame L has its
//! origin at the optical center; the board frame O sits at the geometric
//! center of the target with the same axis orientation when perfectly
//! aligned, so the board surface is the plane y = 0 in frame O.
//!
//! All internal units are SI (meters, radians). Degrees and millimeters
//! appear only at file/CLI boundaries.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 3D point or vector in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ZERO: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Point3 {
        Point3 { x, y, z }
    }

    pub fn dot(&self, other: &Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Point3) -> Point3 {
        Point3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a (near-)zero vector.
    pub fn normalized(&self) -> Option<Point3> {
        let n = self.norm();
        if n < 1e-12 {
            None
        } else {
            Some(*self * (1.0 / n))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl std::ops::Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl std::ops::Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl std::ops::Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl std::ops::Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl From<Point3> for Vector3<f64> {
    fn from(p: Point3) -> Vector3<f64> {
        Vector3::new(p.x, p.y, p.z)
    }
}

impl From<Vector3<f64>> for Point3 {
    fn from(v: Vector3<f64>) -> Point3 {
        Point3::new(v.x, v.y, v.z)
    }
}

/// One laser return in the sensor's native spherical coordinates.
///
/// `azimuth` is the horizontal angle within a revolution, clockwise-positive
/// from the +y (forward) axis; `vertical` is the fixed elevation of the
/// emitting channel, upward-positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalBeam {
    /// Channel index, 0-based from the lowest vertical angle.
    pub ring: u16,
    /// Azimuth angle in radians, in [0, 2π).
    pub azimuth: f64,
    /// Vertical (elevation) angle in radians.
    pub vertical: f64,
    /// Measured range in meters.
    pub range: f64,
    /// Normalized return intensity in [0, 1].
    pub reflectivity: f64,
}

impl SphericalBeam {
    pub fn validate(&self) -> Result<()> {
        if !(self.azimuth.is_finite()
            && self.vertical.is_finite()
            && self.range.is_finite()
            && self.reflectivity.is_finite())
        {
            return Err(Error::Validation("beam contains a non-finite value".into()));
        }
        if self.range <= 0.0 {
            return Err(Error::Validation(format!(
                "beam range must be positive, got {}",
                self.range
            )));
        }
        if !(0.0..std::f64::consts::TAU).contains(&self.azimuth) {
            return Err(Error::Validation(format!(
                "beam azimuth must lie in [0, 2pi), got {}",
                self.azimuth
            )));
        }
        if self.vertical.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::Validation(format!(
                "beam vertical angle must lie in [-pi/2, pi/2], got {}",
                self.vertical
            )));
        }
        if !(0.0..=1.0).contains(&self.reflectivity) {
            return Err(Error::Validation(format!(
                "beam reflectivity must lie in [0, 1], got {}",
                self.reflectivity
            )));
        }
        Ok(())
    }
}

/// Wraps an angle into [0, 2π).
pub fn wrap_azimuth(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = a.rem_euclid(tau);
    // rem_euclid can return exactly tau when `a` is a tiny negative number.
    if r >= tau {
        r - tau
    } else {
        r
    }
}

/// Converts a spherical beam into Cartesian sensor-frame coordinates.
///
/// x = r·cos ω·sin α, y = r·cos ω·cos α, z = r·sin ω, so a beam at zero
/// azimuth and zero elevation lands on the +y axis and the norm of the
/// result equals the measured range.
pub fn spherical_to_cartesian(beam: &SphericalBeam) -> Result<Point3> {
    beam.validate()?;
    let (r, a, w) = (beam.range, beam.azimuth, beam.vertical);
    Ok(Point3::new(
        r * w.cos() * a.sin(),
        r * w.cos() * a.cos(),
        r * w.sin(),
    ))
}

/// The six mounting misalignment parameters: three angles in radians and a
/// translation in meters, all relative to the nominal mounting pose.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoseVector {
    /// Up/down pointing offset, rotation about the horizontal x-axis.
    pub tilt: f64,
    /// Pointing error in the horizontal plane, rotation about the vertical z-axis.
    pub yaw: f64,
    /// Rotation about the pointing (y) axis.
    pub roll: f64,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl PoseVector {
    pub const ZERO: PoseVector =
        PoseVector { tilt: 0.0, yaw: 0.0, roll: 0.0, dx: 0.0, dy: 0.0, dz: 0.0 };

    pub fn new(tilt: f64, yaw: f64, roll: f64, dx: f64, dy: f64, dz: f64) -> PoseVector {
        PoseVector { tilt, yaw, roll, dx, dy, dz }
    }

    /// Parameter order used by the solver: [tilt, yaw, roll, dx, dy, dz].
    pub fn as_array(&self) -> [f64; 6] {
        [self.tilt, self.yaw, self.roll, self.dx, self.dy, self.dz]
    }

    pub fn from_array(a: [f64; 6]) -> PoseVector {
        PoseVector::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    /// Full rigid transform for this pose: rotation per
    /// [`rotation_from_angles`] plus the translation part.
    pub fn transform(&self) -> RigidTransform {
        RigidTransform {
            rotation: rotation_matrix(self),
            translation: Vector3::new(self.dx, self.dy, self.dz),
        }
    }

    pub fn validate(&self, envelope: &PoseEnvelope) -> Result<()> {
        let a = self.as_array();
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("pose contains a non-finite value".into()));
        }
        for (name, v) in [("tilt", self.tilt), ("yaw", self.yaw), ("roll", self.roll)] {
            if v.abs() > envelope.max_angle {
                return Err(Error::Validation(format!(
                    "pose {name} = {:.4} rad exceeds the {:.4} rad envelope",
                    v, envelope.max_angle
                )));
            }
        }
        for (name, v) in [("dx", self.dx), ("dy", self.dy), ("dz", self.dz)] {
            if v.abs() > envelope.max_translation {
                return Err(Error::Validation(format!(
                    "pose {name} = {:.4} m exceeds the {:.4} m envelope",
                    v, envelope.max_translation
                )));
            }
        }
        Ok(())
    }
}

/// Validity envelope for pose parameters at API boundaries. The defaults are
/// deliberately generous compared to the ±3° / ±30 mm operating range so
/// that stress tests stay representable while garbage inputs are rejected.
#[derive(Clone, Copy, Debug)]
pub struct PoseEnvelope {
    pub max_angle: f64,
    pub max_translation: f64,
}

impl Default for PoseEnvelope {
    fn default() -> PoseEnvelope {
        PoseEnvelope { max_angle: 15f64.to_radians(), max_translation: 0.2 }
    }
}

/// A rotation plus translation mapping points between frames: `apply(p) = R·p + T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn identity() -> RigidTransform {
        RigidTransform { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> RigidTransform {
        RigidTransform { rotation, translation }
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        Point3::from(self.rotation * Vector3::from(p) + self.translation)
    }

    /// Rotates a direction vector without translating it.
    pub fn apply_rotation(&self, v: Point3) -> Point3 {
        Point3::from(self.rotation * Vector3::from(v))
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform { rotation: rt, translation: -(rt * self.translation) }
    }

    /// Composition `self ∘ inner`: applies `inner` first, then `self`.
    pub fn compose(&self, inner: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * inner.rotation,
            translation: self.rotation * inner.translation + self.translation,
        }
    }

    /// True if the rotation part is orthonormal with determinant +1 within `tol`.
    pub fn is_rigid(&self, tol: f64) -> bool {
        let rtr = self.rotation.transpose() * self.rotation;
        let ortho = (rtr - Matrix3::identity()).abs().max();
        ortho < tol && (self.rotation.determinant() - 1.0).abs() < tol
    }
}

pub(crate) fn rot_x(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub(crate) fn rot_y(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub(crate) fn rot_z(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub(crate) fn rotation_matrix(pose: &PoseVector) -> Matrix3<f64> {
    rot_z(pose.yaw) * rot_x(pose.tilt) * rot_y(pose.roll)
}

/// Rotation-only transform for a pose.
///
/// Angle convention (fixed crate-wide): yaw rotates about the vertical
/// z-axis, tilt about the horizontal x-axis, roll about the pointing y-axis,
/// composed as `R = Rz(yaw)·Rx(tilt)·Ry(roll)`. The simulator and estimator
/// share this convention, so estimates are directly comparable to simulated
/// truth.
pub fn rotation_from_angles(pose: &PoseVector) -> RigidTransform {
    RigidTransform { rotation: rotation_matrix(pose), translation: Vector3::zeros() }
}

/// Physical dimensions of the rectangular target board, in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TargetSpec {
    pub width: f64,
    pub height: f64,
}

impl Default for TargetSpec {
    fn default() -> TargetSpec {
        TargetSpec { width: 0.9, height: 0.54 }
    }
}

impl TargetSpec {
    pub fn new(width: f64, height: f64) -> Result<TargetSpec> {
        let t = TargetSpec { width, height };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.height.is_finite())
            || self.width <= 0.0
            || self.height <= 0.0
        {
            return Err(Error::Validation(format!(
                "target dimensions must be positive, got {} x {}",
                self.width, self.height
            )));
        }
        Ok(())
    }
}

/// The four board corners in the board frame, in fixed order
/// top-left, top-right, bottom-left, bottom-right. The board occupies the
/// plane y = 0 with x spanning the width and z the height.
pub fn corner_matrix(target: &TargetSpec) -> [Point3; 4] {
    let hw = target.width / 2.0;
    let hh = target.height / 2.0;
    [
        Point3::new(-hw, 0.0, hh),
        Point3::new(hw, 0.0, hh),
        Point3::new(-hw, 0.0, -hh),
        Point3::new(hw, 0.0, -hh),
    ]
}
