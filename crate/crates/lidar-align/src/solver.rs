//! Misalignment solver: damped Gauss–Newton (Levenberg–Marquardt) iteration
//! on the corner-correspondence residual, with an analytic Jacobian.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::CornerFeatures;
use crate::geometry::{rot_x, rot_y, rot_z, Point3, PoseVector};

/// Levenberg–Marquardt parameters. The step scale and initial damping
/// defaults are deliberately conservative; with the adaptive damping
/// schedule they converge in a few hundred iterations on corner problems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Step scale η applied to every update.
    pub eta: f64,
    /// Initial damping λ; halved after accepted steps, doubled after
    /// rejected ones.
    pub lambda0: f64,
    pub max_iterations: usize,
    /// Stop when the accepted update's largest component falls below this.
    pub step_tolerance: f64,
    /// Stop when an accepted step's relative cost improvement falls below
    /// this.
    pub cost_tolerance: f64,
    /// Starting estimate; misalignments are small, so zero is inside the
    /// convergence basin.
    pub initial: PoseVector,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            eta: 0.02,
            lambda0: 0.3,
            max_iterations: 2000,
            step_tolerance: 1e-9,
            cost_tolerance: 1e-12,
            initial: PoseVector::ZERO,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::Validation("solver eta must be > 0".into()));
        }
        if !(self.lambda0.is_finite() && self.lambda0 >= 0.0) {
            return Err(Error::Validation("solver lambda0 must be >= 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Validation("solver max_iterations must be >= 1".into()));
        }
        if !(self.step_tolerance.is_finite() && self.step_tolerance > 0.0) {
            return Err(Error::Validation("solver step_tolerance must be > 0".into()));
        }
        if !(self.cost_tolerance.is_finite() && self.cost_tolerance > 0.0) {
            return Err(Error::Validation("solver cost_tolerance must be > 0".into()));
        }
        Ok(())
    }
}

/// Solver output: the estimate plus enough diagnostics to judge it.
#[derive(Clone, Debug)]
pub struct EstimateReport {
    pub pose: PoseVector,
    /// Half the squared residual norm at the estimate, m².
    pub cost: f64,
    pub iterations: usize,
    /// Euclidean norm of each corner's residual at the estimate, meters,
    /// in TL, TR, BL, BR order.
    pub per_corner_residuals: [f64; 4],
    /// True when a step or cost tolerance was met before the iteration cap.
    pub converged: bool,
    /// Cost after each accepted step, starting with the initial cost.
    pub cost_history: Vec<f64>,
}

/// Stacked corner residual: for each corner i (TL, TR, BL, BR),
/// `Fᵢ = cᵢ − (R(β)·pᵢ + T(β))` where `cᵢ` is the reference corner in the
/// nominal frame, `pᵢ` the measured feature point in the sensor frame, and
/// `(R, T)` the candidate pose's transform.
pub fn residual(
    pose: &PoseVector,
    corners: &[Point3; 4],
    features: &CornerFeatures,
) -> SVector<f64, 12> {
    let m = pose.transform();
    let mut out = SVector::<f64, 12>::zeros();
    for (i, (corner, point)) in corners.iter().zip(features.points()).enumerate() {
        let f = *corner - m.apply(point);
        out[3 * i] = f.x;
        out[3 * i + 1] = f.y;
        out[3 * i + 2] = f.z;
    }
    out
}

/// Derivative of each rotation factor with respect to its own angle.
fn rot_x_deriv(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(0.0, 0.0, 0.0, 0.0, -s, -c, 0.0, c, -s)
}

fn rot_y_deriv(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(-s, 0.0, c, 0.0, 0.0, 0.0, -c, 0.0, -s)
}

fn rot_z_deriv(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(-s, -c, 0.0, c, -s, 0.0, 0.0, 0.0, 0.0)
}

/// Analytic 12×6 Jacobian of [`residual`] with respect to
/// (tilt, yaw, roll, Δx, Δy, Δz).
///
/// The reference corners drop out of the derivative, so they are not a
/// parameter. With R = R_z(yaw)·R_x(tilt)·R_y(roll), each angle column is
/// `−(∂R/∂angle)·pᵢ`; the translation block of every corner is exactly
/// −I₃.
pub fn jacobian(pose: &PoseVector, features: &CornerFeatures) -> SMatrix<f64, 12, 6> {
    let rx = rot_x(pose.tilt);
    let ry = rot_y(pose.roll);
    let rz = rot_z(pose.yaw);
    let d_tilt = rz * rot_x_deriv(pose.tilt) * ry;
    let d_yaw = rot_z_deriv(pose.yaw) * rx * ry;
    let d_roll = rz * rx * rot_y_deriv(pose.roll);

    let mut j = SMatrix::<f64, 12, 6>::zeros();
    for (i, point) in features.points().iter().enumerate() {
        let p = Vector3::from(*point);
        let row = 3 * i;
        j.fixed_view_mut::<3, 1>(row, 0).copy_from(&(-(d_tilt * p)));
        j.fixed_view_mut::<3, 1>(row, 1).copy_from(&(-(d_yaw * p)));
        j.fixed_view_mut::<3, 1>(row, 2).copy_from(&(-(d_roll * p)));
        j.fixed_view_mut::<3, 3>(row, 3).copy_from(&(-Matrix3::identity()));
    }
    j
}

fn cost_of(f: &SVector<f64, 12>) -> f64 {
    0.5 * f.norm_squared()
}

/// Iterates `β ← β − η·(JᵀJ + λ·diag(JᵀJ))⁻¹·Jᵀ·F` with adaptive damping:
/// accepted steps (cost did not increase) halve λ, rejected steps double it
/// and revert. Terminates when an accepted update is smaller than the step
/// tolerance, when its relative cost improvement falls below the cost
/// tolerance, or at the iteration cap. The returned pose is the best seen:
/// accepted costs are monotone, so that is the current iterate.
pub fn lm_solve(
    corners: &[Point3; 4],
    features: &CornerFeatures,
    cfg: &SolverConfig,
) -> Result<EstimateReport> {
    cfg.validate()?;

    let mut beta = cfg.initial;
    let mut f = residual(&beta, corners, features);
    let mut cost = cost_of(&f);
    let mut lambda = cfg.lambda0;
    let mut cost_history = vec![cost];
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..cfg.max_iterations {
        iterations += 1;
        let j = jacobian(&beta, features);
        let jtj = j.transpose() * j;
        let gradient = j.transpose() * f;
        let mut damped = jtj;
        for k in 0..6 {
            damped[(k, k)] += lambda * jtj[(k, k)];
        }
        let step = damped
            .cholesky()
            .ok_or(Error::SingularNormalMatrix)?
            .solve(&gradient)
            * cfg.eta;

        let candidate = {
            let b = beta.as_array();
            PoseVector::from_array([
                b[0] - step[0],
                b[1] - step[1],
                b[2] - step[2],
                b[3] - step[3],
                b[4] - step[4],
                b[5] - step[5],
            ])
        };
        let f_new = residual(&candidate, corners, features);
        let cost_new = cost_of(&f_new);

        if cost_new <= cost {
            let improvement = cost - cost_new;
            beta = candidate;
            f = f_new;
            cost = cost_new;
            lambda *= 0.5;
            cost_history.push(cost);
            if step.amax() < cfg.step_tolerance || improvement <= cfg.cost_tolerance * cost {
                converged = true;
                break;
            }
        } else {
            lambda *= 2.0;
        }
    }

    let per_corner_residuals = std::array::from_fn(|i| {
        f.fixed_rows::<3>(3 * i).norm()
    });
    Ok(EstimateReport { pose: beta, cost, iterations, per_corner_residuals, converged, cost_history })
}
