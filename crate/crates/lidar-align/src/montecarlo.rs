//! Monte Carlo experiment runner: sweeps misalignment poses, runs many
//! simulated scans through the full pipeline per pose, and aggregates
//! accuracy (mean error) and precision (error standard deviation) per pose
//! and overall.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{RunConfig, SweepSpec};
use crate::error::Result;
use crate::geometry::PoseVector;
use crate::pipeline::{estimate_alignment, PipelineConfig};
use crate::sim::{generate_scan, Scene, SensorModel};

/// Seed-stream domains, so scan noise, pose draws, RANSAC and the benchmark
/// never share a random stream even under the same master seed.
const DOMAIN_POSE: u64 = 1;
const DOMAIN_SCAN: u64 = 2;
const DOMAIN_RANSAC: u64 = 3;
const DOMAIN_BENCH: u64 = 4;

/// Mixes (master seed, domain, index) into an independent stream seed.
/// SplitMix64-style finalizer: deterministic, and any bit flip in any input
/// avalanches through the output.
pub fn derive_seed(master: u64, domain: u64, index: u64) -> u64 {
    let mut z = master
        ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The misalignment poses a sweep visits, in trial order.
///
/// Grid sweeps enumerate `start..=stop` inclusive; the random mode draws
/// all three angles within the angle bound and a horizontal displacement
/// within the translation bound (Δy = Δz = 0), deterministically from the
/// master seed.
pub fn sweep_poses(sweep: &SweepSpec, master_seed: u64) -> Vec<PoseVector> {
    match *sweep {
        SweepSpec::YawSweep { start_deg, stop_deg, step_deg } => {
            grid(start_deg, stop_deg, step_deg)
                .map(|yaw_deg| {
                    PoseVector::new(0.0, yaw_deg.to_radians(), 0.0, 0.0, 0.0, 0.0)
                })
                .collect()
        }
        SweepSpec::XSweep { start_mm, stop_mm, step_mm } => grid(start_mm, stop_mm, step_mm)
            .map(|dx_mm| PoseVector::new(0.0, 0.0, 0.0, dx_mm / 1000.0, 0.0, 0.0))
            .collect(),
        SweepSpec::Random { poses, angle_bound_deg, translation_bound_mm } => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(master_seed, DOMAIN_POSE, 0));
            let a = angle_bound_deg.to_radians();
            let t = translation_bound_mm / 1000.0;
            (0..poses)
                .map(|_| {
                    PoseVector::new(
                        uniform(&mut rng, a),
                        uniform(&mut rng, a),
                        uniform(&mut rng, a),
                        uniform(&mut rng, t),
                        0.0,
                        0.0,
                    )
                })
                .collect()
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, bound: f64) -> f64 {
    if bound > 0.0 {
        rng.random_range(-bound..=bound)
    } else {
        0.0
    }
}

/// Inclusive float grid; the epsilon keeps `stop` included when the span is
/// an exact multiple of the step.
fn grid(start: f64, stop: f64, step: f64) -> impl Iterator<Item = f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(move |i| start + i as f64 * step)
}

/// What happened to one scan.
#[derive(Clone, Debug)]
pub enum TrialOutcome {
    Success {
        estimate: PoseVector,
        /// estimate − truth, componentwise.
        error: PoseVector,
        cost: f64,
        iterations: usize,
        converged: bool,
    },
    Failure {
        stage: &'static str,
        message: String,
    },
}

/// One scan pushed through the pipeline.
#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub pose_index: usize,
    pub scan_index: usize,
    pub scan_seed: u64,
    pub truth: PoseVector,
    pub outcome: TrialOutcome,
    /// Wall-clock time of the estimation pipeline (excluding scan
    /// generation), milliseconds.
    pub latency_ms: f64,
}

impl TrialRecord {
    pub fn is_success(&self) -> bool {
        matches!(self.outcome, TrialOutcome::Success { .. })
    }
}

/// Per-pose error statistics over the successful trials.
#[derive(Clone, Copy, Debug)]
pub struct PoseStats {
    pub truth: PoseVector,
    /// Signed mean error per DOF.
    pub mean_error: PoseVector,
    /// Sample standard deviation (n−1) per DOF; zero when fewer than two
    /// successful trials.
    pub std_error: PoseVector,
    pub trials: usize,
    pub failures: usize,
}

/// Aggregate over all poses.
#[derive(Clone, Debug)]
pub struct McSummary {
    pub pose_stats: Vec<PoseStats>,
    /// Mean over poses of each pose's signed mean error. Zero when every
    /// pose failed completely (see `failure_rate`).
    pub accuracy: PoseVector,
    /// Mean over poses of each pose's error standard deviation.
    pub precision: PoseVector,
    pub total_trials: usize,
    pub failed_trials: usize,
    pub failure_rate: f64,
}

fn pose_sub(a: &PoseVector, b: &PoseVector) -> PoseVector {
    let (a, b) = (a.as_array(), b.as_array());
    PoseVector::from_array(std::array::from_fn(|i| a[i] - b[i]))
}

fn run_trial(
    sensor: &SensorModel,
    scene: &Scene,
    base_cfg: &PipelineConfig,
    master_seed: u64,
    pose_index: usize,
    scan_index: usize,
    truth: &PoseVector,
    flat_index: u64,
) -> TrialRecord {
    let scan_seed = derive_seed(master_seed, DOMAIN_SCAN, flat_index);
    let mut cfg = base_cfg.clone();
    cfg.ransac_seed = derive_seed(master_seed, DOMAIN_RANSAC, flat_index);

    let generated = generate_scan(sensor, scene, truth, scan_seed);
    let started = Instant::now();
    let outcome = match generated {
        Ok(scan) => match estimate_alignment(&scan, &scene.target, &cfg) {
            Ok(report) => TrialOutcome::Success {
                estimate: report.pose,
                error: pose_sub(&report.pose, truth),
                cost: report.cost,
                iterations: report.iterations,
                converged: report.converged,
            },
            Err(e) => TrialOutcome::Failure { stage: e.stage(), message: e.to_string() },
        },
        Err(e) => TrialOutcome::Failure { stage: e.stage(), message: e.to_string() },
    };
    TrialRecord {
        pose_index,
        scan_index,
        scan_seed,
        truth: *truth,
        outcome,
        latency_ms: started.elapsed().as_secs_f64() * 1000.0,
    }
}

/// Runs the configured sweep: `scans_per_pose` scans at every swept pose,
/// in parallel, with per-trial seed streams derived from the master seed so
/// parallel and serial runs produce identical records (latency aside).
/// Individual trial failures are recorded, not fatal.
pub fn run_montecarlo(cfg: &RunConfig) -> Result<(McSummary, Vec<TrialRecord>)> {
    cfg.validate()?;
    let sensor = cfg.sensor_model()?;
    let scene = cfg.scene()?;
    let pipeline_cfg = cfg.pipeline_config()?;
    let poses = sweep_poses(&cfg.sweep, cfg.master_seed);

    let trials: Vec<(usize, usize)> = (0..poses.len())
        .flat_map(|p| (0..cfg.scans_per_pose).map(move |s| (p, s)))
        .collect();
    let records: Vec<TrialRecord> = trials
        .par_iter()
        .map(|&(pose_index, scan_index)| {
            let flat = (pose_index * cfg.scans_per_pose + scan_index) as u64;
            run_trial(
                &sensor,
                &scene,
                &pipeline_cfg,
                cfg.master_seed,
                pose_index,
                scan_index,
                &poses[pose_index],
                flat,
            )
        })
        .collect();

    Ok((summarize(&poses, &records), records))
}

fn summarize(poses: &[PoseVector], records: &[TrialRecord]) -> McSummary {
    let mut pose_stats = Vec::with_capacity(poses.len());
    for (pose_index, truth) in poses.iter().enumerate() {
        let errors: Vec<[f64; 6]> = records
            .iter()
            .filter(|r| r.pose_index == pose_index)
            .filter_map(|r| match &r.outcome {
                TrialOutcome::Success { error, .. } => Some(error.as_array()),
                TrialOutcome::Failure { .. } => None,
            })
            .collect();
        let trials = records.iter().filter(|r| r.pose_index == pose_index).count();
        let failures = trials - errors.len();

        let n = errors.len();
        let mean: [f64; 6] = std::array::from_fn(|d| {
            if n == 0 {
                0.0
            } else {
                errors.iter().map(|e| e[d]).sum::<f64>() / n as f64
            }
        });
        let std: [f64; 6] = std::array::from_fn(|d| {
            if n < 2 {
                0.0
            } else {
                let var = errors.iter().map(|e| (e[d] - mean[d]).powi(2)).sum::<f64>()
                    / (n - 1) as f64;
                var.sqrt()
            }
        });
        pose_stats.push(PoseStats {
            truth: *truth,
            mean_error: PoseVector::from_array(mean),
            std_error: PoseVector::from_array(std),
            trials,
            failures,
        });
    }

    let valid: Vec<&PoseStats> = pose_stats.iter().filter(|s| s.failures < s.trials).collect();
    let over_valid = |f: &dyn Fn(&PoseStats) -> [f64; 6]| -> PoseVector {
        if valid.is_empty() {
            return PoseVector::ZERO;
        }
        let mut acc = [0.0; 6];
        for s in &valid {
            let v = f(s);
            for d in 0..6 {
                acc[d] += v[d];
            }
        }
        PoseVector::from_array(std::array::from_fn(|d| acc[d] / valid.len() as f64))
    };

    let total_trials = records.len();
    let failed_trials = records.iter().filter(|r| !r.is_success()).count();
    McSummary {
        accuracy: over_valid(&|s| s.mean_error.as_array()),
        precision: over_valid(&|s| s.std_error.as_array()),
        pose_stats,
        total_trials,
        failed_trials,
        failure_rate: if total_trials == 0 {
            0.0
        } else {
            failed_trials as f64 / total_trials as f64
        },
    }
}

/// Latency distribution of the estimation pipeline over repeated scans of
/// an aligned sensor.
#[derive(Clone, Debug)]
pub struct BenchReport {
    /// Per-scan pipeline latency in scan order, milliseconds.
    pub latencies_ms: Vec<f64>,
    pub median_ms: f64,
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub p95_ms: f64,
}

/// Times `scans` end-to-end estimations (scan generation excluded from the
/// measurement) and reports the latency distribution.
pub fn run_bench(cfg: &RunConfig, scans: usize) -> Result<BenchReport> {
    cfg.validate()?;
    if scans == 0 {
        return Err(crate::error::Error::Validation("bench needs at least one scan".into()));
    }
    let sensor = cfg.sensor_model()?;
    let scene = cfg.scene()?;
    let pipeline_cfg = cfg.pipeline_config()?;

    let mut latencies_ms = Vec::with_capacity(scans);
    for i in 0..scans {
        let seed = derive_seed(cfg.master_seed, DOMAIN_BENCH, i as u64);
        let scan = generate_scan(&sensor, &scene, &PoseVector::ZERO, seed)?;
        let started = Instant::now();
        let _ = estimate_alignment(&scan, &scene.target, &pipeline_cfg)?;
        latencies_ms.push(started.elapsed().as_secs_f64() * 1000.0);
    }

    let mut sorted = latencies_ms.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_ms = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let p95_index = ((sorted.len() as f64 * 0.95).ceil() as usize).saturating_sub(1);
    Ok(BenchReport {
        mean_ms: latencies_ms.iter().sum::<f64>() / latencies_ms.len() as f64,
        median_ms,
        min_ms: sorted[0],
        max_ms: *sorted.last().unwrap(),
        p95_ms: sorted[p95_index],
        latencies_ms,
    })
}
