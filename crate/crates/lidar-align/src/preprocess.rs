//! Scan segmentation: Euclidean clustering, ROI selection, seeded RANSAC
//! plane fitting and projection of the board points onto the fitted plane.

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point3, RigidTransform};

/// An infinite plane `n·p + d = 0` with unit normal.
///
/// Planes are stored in a canonical orientation with `d ≥ 0`, i.e. the
/// normal points toward the sensor origin (`n·0 + d > 0` whenever the plane
/// does not pass through it). Both the simulator's board plane and the
/// estimator's fitted plane use this convention, so the in-plane basis
/// derived from the normal is consistent between the two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneModel {
    pub normal: Point3,
    pub d: f64,
}

impl PlaneModel {
    /// Builds a plane from any non-zero normal and offset, normalizing the
    /// normal and flipping the sign so that `d ≥ 0`.
    pub fn new(normal: Point3, d: f64) -> Result<PlaneModel> {
        if !normal.is_finite() || !d.is_finite() {
            return Err(Error::Validation("plane parameters must be finite".into()));
        }
        let n = normal.norm();
        if n < 1e-12 {
            return Err(Error::Validation("plane normal must be non-zero".into()));
        }
        let mut plane = PlaneModel { normal: normal * (1.0 / n), d: d / n };
        if plane.d < 0.0 {
            plane.normal = -plane.normal;
            plane.d = -plane.d;
        }
        Ok(plane)
    }

    /// Plane through `point` with the given normal direction.
    pub fn from_point_normal(point: Point3, normal: Point3) -> Result<PlaneModel> {
        let n = normal
            .normalized()
            .ok_or_else(|| Error::Validation("plane normal must be non-zero".into()))?;
        PlaneModel::new(n, -n.dot(&point))
    }

    /// Signed distance of a point from the plane (positive on the sensor side).
    pub fn signed_distance(&self, p: &Point3) -> f64 {
        self.normal.dot(p) + self.d
    }

    /// Foot of the perpendicular from `p` onto the plane.
    pub fn project(&self, p: Point3) -> Point3 {
        p - self.normal * self.signed_distance(&p)
    }

    /// The plane expressed in new coordinates `p' = t(p)`.
    pub fn transformed(&self, t: &RigidTransform) -> PlaneModel {
        let n = t.apply_rotation(self.normal);
        let d = self.d - n.dot(&Point3::from(t.translation));
        // Renormalize the sign; rigid maps preserve unit length.
        PlaneModel::new(n, d).expect("rigid transform of a valid plane stays valid")
    }
}

/// A group of scan points that are mutually reachable through hops no longer
/// than the clustering tolerance.
#[derive(Clone, Debug)]
pub struct Cluster {
    /// Indices into the point list handed to [`euclidean_cluster`], ascending.
    pub indices: Vec<usize>,
    pub centroid: Point3,
    /// Mean Euclidean distance of member points from the sensor origin.
    pub mean_range: f64,
    pub mean_reflectivity: f64,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Thresholds that single out the target board cluster.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoiCriteria {
    /// Acceptable mean range window in meters.
    pub range_min: f64,
    pub range_max: f64,
    pub min_count: usize,
    pub min_reflectivity: f64,
}

impl Default for RoiCriteria {
    fn default() -> RoiCriteria {
        RoiCriteria { range_min: 1.0, range_max: 5.0, min_count: 60, min_reflectivity: 0.5 }
    }
}

/// RANSAC plane fit parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RansacConfig {
    /// Inlier distance threshold in meters. The default is ~3σ of the
    /// default sensor's range noise: tight enough to reject genuine
    /// clutter, loose enough that inlier selection does not clip the noise
    /// distribution itself (a sub-σ threshold measurably degrades the
    /// fitted plane's orientation stability).
    pub distance_threshold: f64,
    pub max_iterations: usize,
    /// Minimum fraction of input points the best plane must explain.
    pub min_inlier_ratio: f64,
}

impl Default for RansacConfig {
    fn default() -> RansacConfig {
        RansacConfig { distance_threshold: 0.04, max_iterations: 200, min_inlier_ratio: 0.6 }
    }
}

impl RansacConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance_threshold.is_finite() && self.distance_threshold > 0.0) {
            return Err(Error::Validation("ransac distance_threshold must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Validation("ransac max_iterations must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.min_inlier_ratio) {
            return Err(Error::Validation("ransac min_inlier_ratio must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Disjoint-set forest over point indices.
struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Partitions points into single-linkage clusters: two points share a
/// cluster exactly when a chain of hops, each no longer than `tolerance`,
/// connects them.
///
/// `reflectivity` must parallel `points`; it only feeds the per-cluster
/// mean used later by ROI selection. Neighbor search uses a voxel grid with
/// cell size equal to the tolerance, so runtime stays near-linear in the
/// number of points for scan-sized inputs. Clusters are ordered by their
/// smallest member index; an empty input yields an empty list.
pub fn euclidean_cluster(
    points: &[Point3],
    reflectivity: &[f64],
    tolerance: f64,
) -> Result<Vec<Cluster>> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::Validation(format!(
            "clustering tolerance must be > 0, got {tolerance}"
        )));
    }
    if reflectivity.len() != points.len() {
        return Err(Error::Validation(format!(
            "reflectivity length {} does not match point count {}",
            reflectivity.len(),
            points.len()
        )));
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }

    let cell = |p: &Point3| -> (i64, i64, i64) {
        (
            (p.x / tolerance).floor() as i64,
            (p.y / tolerance).floor() as i64,
            (p.z / tolerance).floor() as i64,
        )
    };

    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::Validation(format!("point {i} is not finite")));
        }
        grid.entry(cell(p)).or_default().push(i);
    }

    let tol2 = tolerance * tolerance;
    let mut uf = UnionFind::new(points.len());
    for (i, p) in points.iter().enumerate() {
        let (cx, cy, cz) = cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy, cz + dz)) else {
                        continue;
                    };
                    for &j in bucket {
                        if j <= i {
                            continue;
                        }
                        if (points[j] - *p).norm_squared() <= tol2 {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
    }

    // Gather components in order of their smallest member index.
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..points.len() {
        let root = uf.find(i);
        members.entry(root).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = members.into_values().collect();
    groups.sort_by_key(|g| g[0]);

    Ok(groups
        .into_iter()
        .map(|indices| summarize(indices, points, reflectivity))
        .collect())
}

fn summarize(indices: Vec<usize>, points: &[Point3], reflectivity: &[f64]) -> Cluster {
    let n = indices.len() as f64;
    let mut centroid = Point3::ZERO;
    let mut range = 0.0;
    let mut refl = 0.0;
    for &i in &indices {
        centroid = centroid + points[i];
        range += points[i].norm();
        refl += reflectivity[i];
    }
    Cluster {
        indices,
        centroid: centroid * (1.0 / n),
        mean_range: range / n,
        mean_reflectivity: refl / n,
    }
}

/// Picks the unique cluster that looks like the target board. Zero or
/// multiple qualifying clusters are hard errors: an inspection that cannot
/// identify its target unambiguously must not guess.
pub fn select_roi<'a>(clusters: &'a [Cluster], criteria: &RoiCriteria) -> Result<&'a Cluster> {
    let qualifying: Vec<&Cluster> = clusters
        .iter()
        .filter(|c| {
            c.mean_range >= criteria.range_min
                && c.mean_range <= criteria.range_max
                && c.len() >= criteria.min_count
                && c.mean_reflectivity >= criteria.min_reflectivity
        })
        .collect();
    match qualifying.len() {
        0 => Err(Error::RoiAbsent { clusters: clusters.len() }),
        1 => Ok(qualifying[0]),
        n => Err(Error::RoiAmbiguous { matching: n }),
    }
}

/// Fits a plane by hypothesis-and-verification: `max_iterations` random
/// 3-point hypotheses are scored by inlier count, then the winner is refit
/// by least squares over its inliers (smallest eigenvector of the inlier
/// scatter matrix). Returns the refit plane and the indices of points
/// within the distance threshold of it. Deterministic for a fixed seed.
pub fn ransac_plane_fit(
    points: &[Point3],
    cfg: &RansacConfig,
    seed: u64,
) -> Result<(PlaneModel, Vec<usize>)> {
    cfg.validate()?;
    let n = points.len();
    if n < 3 {
        return Err(Error::PlaneFitDegenerate(format!("need at least 3 points, got {n}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, PlaneModel)> = None;
    for _ in 0..cfg.max_iterations {
        let (i, j, k) = distinct_triple(&mut rng, n);
        let (a, b, c) = (points[i], points[j], points[k]);
        let normal = (b - a).cross(&(c - a));
        if normal.norm() < 1e-12 {
            continue; // collinear sample, try again
        }
        let Ok(plane) = PlaneModel::from_point_normal(a, normal) else {
            continue;
        };
        let count = points
            .iter()
            .filter(|p| plane.signed_distance(p).abs() <= cfg.distance_threshold)
            .count();
        if best.as_ref().is_none_or(|(best_count, _)| count > *best_count) {
            best = Some((count, plane));
        }
    }

    let (_, hypothesis) = best.ok_or_else(|| {
        Error::PlaneFitDegenerate("all sampled hypotheses were collinear".into())
    })?;

    // A 3-point hypothesis tilts by degrees at realistic range noise, so its
    // inlier slab cuts the target diagonally; a single refit on that slab
    // would inherit part of the tilt. Iterating refit and reselection to a
    // fixed point removes the hypothesis from the final model entirely.
    let select = |plane: &PlaneModel| -> Vec<usize> {
        (0..n)
            .filter(|&i| plane.signed_distance(&points[i]).abs() <= cfg.distance_threshold)
            .collect()
    };
    let mut plane = hypothesis;
    let mut inliers = select(&plane);
    for _ in 0..20 {
        let Some(refit) = least_squares_plane(points, &inliers) else {
            break;
        };
        plane = refit;
        let reselected = select(&plane);
        if reselected == inliers {
            break;
        }
        inliers = reselected;
    }

    let ratio = inliers.len() as f64 / n as f64;
    if ratio < cfg.min_inlier_ratio {
        return Err(Error::PlaneFitQuality { inlier_ratio: ratio, required: cfg.min_inlier_ratio });
    }
    Ok((plane, inliers))
}

fn distinct_triple(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize, usize) {
    let i = rng.random_range(0..n);
    let j = loop {
        let j = rng.random_range(0..n);
        if j != i {
            break j;
        }
    };
    let k = loop {
        let k = rng.random_range(0..n);
        if k != i && k != j {
            break k;
        }
    };
    (i, j, k)
}

/// Total least-squares plane over the selected points: centroid plus the
/// eigenvector of the scatter matrix with the smallest eigenvalue. Returns
/// `None` when the selection is degenerate (fewer than 3 points or rank < 2).
fn least_squares_plane(points: &[Point3], indices: &[usize]) -> Option<PlaneModel> {
    if indices.len() < 3 {
        return None;
    }
    let n = indices.len() as f64;
    let centroid = indices.iter().fold(Point3::ZERO, |acc, &i| acc + points[i]) * (1.0 / n);
    let mut scatter = Matrix3::zeros();
    for &i in indices {
        let d = Vector3::from(points[i] - centroid);
        scatter += d * d.transpose();
    }
    let eigen = scatter.symmetric_eigen();
    let (mut min_idx, mut min_val) = (0, eigen.eigenvalues[0]);
    for i in 1..3 {
        if eigen.eigenvalues[i] < min_val {
            min_val = eigen.eigenvalues[i];
            min_idx = i;
        }
    }
    let normal = Point3::from(Vector3::from(eigen.eigenvectors.column(min_idx)));
    PlaneModel::from_point_normal(centroid, normal).ok()
}

/// Projects every point onto the plane along the normal:
/// `p' = p − (n·p + d)·n`.
pub fn project_to_plane(points: &[Point3], plane: &PlaneModel) -> Vec<Point3> {
    points.iter().map(|p| plane.project(*p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense grid blob centered at `center`, spaced well below tolerance.
    fn blob(center: Point3, n_side: usize, spacing: f64) -> Vec<Point3> {
        let mut pts = Vec::new();
        for i in 0..n_side {
            for j in 0..n_side {
                pts.push(Point3::new(
                    center.x + i as f64 * spacing,
                    center.y + j as f64 * spacing,
                    center.z,
                ));
            }
        }
        pts
    }

    #[test]
    fn two_separated_blobs_form_two_clusters() {
        let mut pts = blob(Point3::ZERO, 5, 0.05);
        pts.extend(blob(Point3::new(1.0, 0.0, 0.0), 5, 0.05));
        let refl = vec![1.0; pts.len()];
        let clusters = euclidean_cluster(&pts, &refl, 0.1).unwrap();
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0].len(), 25);
        assert_eq!(clusters[1].len(), 25);
    }

    #[test]
    fn single_point_is_a_singleton_cluster() {
        let pts = vec![Point3::new(0.1, 2.0, -0.3)];
        let clusters = euclidean_cluster(&pts, &[0.7], 0.1).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].indices, vec![0]);
        assert_eq!(clusters[0].centroid, pts[0]);
        assert_abs_diff_eq!(clusters[0].mean_range, pts[0].norm(), epsilon = 1e-15);
        assert_abs_diff_eq!(clusters[0].mean_reflectivity, 0.7, epsilon = 1e-15);
    }

    #[test]
    fn empty_input_yields_empty_output() {
        let clusters = euclidean_cluster(&[], &[], 0.1).unwrap();
        assert!(clusters.is_empty());
    }

    #[test]
    fn clustering_is_a_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pts: Vec<Point3> = (0..500)
            .map(|_| {
                Point3::new(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                )
            })
            .collect();
        let refl = vec![0.5; pts.len()];
        let clusters = euclidean_cluster(&pts, &refl, 0.25).unwrap();
        let mut seen = vec![false; pts.len()];
        for c in &clusters {
            for &i in &c.indices {
                assert!(!seen[i], "index {i} appears in two clusters");
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s), "some index missing from the partition");
    }

    #[test]
    fn raising_tolerance_never_increases_cluster_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let pts: Vec<Point3> = (0..300)
            .map(|_| {
                Point3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            })
            .collect();
        let refl = vec![0.5; pts.len()];
        let mut last = usize::MAX;
        for tol in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let count = euclidean_cluster(&pts, &refl, tol).unwrap().len();
            assert!(count <= last, "tolerance {tol} increased cluster count");
            last = count;
        }
    }

    #[test]
    fn cluster_chains_link_through_hops() {
        // A line of points each 0.09 apart spans far more than the tolerance
        // end to end, but single-linkage keeps it one cluster.
        let pts: Vec<Point3> =
            (0..30).map(|i| Point3::new(i as f64 * 0.09, 2.0, 0.0)).collect();
        let refl = vec![1.0; pts.len()];
        let clusters = euclidean_cluster(&pts, &refl, 0.1).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].len(), 30);
    }

    fn cluster_with(mean_range: f64, count: usize, mean_reflectivity: f64) -> Cluster {
        Cluster {
            indices: (0..count).collect(),
            centroid: Point3::new(0.0, mean_range, 0.0),
            mean_range,
            mean_reflectivity,
        }
    }

    #[test]
    fn roi_selection_picks_the_unique_qualifier() {
        let clusters = vec![
            cluster_with(1.9, 1800, 0.2),  // floor: fails reflectivity
            cluster_with(2.6, 500, 0.9),   // board
            cluster_with(6.1, 700, 0.2),   // wall: fails range and reflectivity
            cluster_with(2.0, 10, 0.9),    // too small
        ];
        let roi = select_roi(&clusters, &RoiCriteria::default()).unwrap();
        assert_eq!(roi.len(), 500);
    }

    #[test]
    fn roi_selection_fails_loudly() {
        let criteria = RoiCriteria::default();
        match select_roi(&[], &criteria) {
            Err(Error::RoiAbsent { clusters: 0 }) => {}
            other => panic!("expected RoiAbsent, got {other:?}"),
        }
        let two_boards = vec![cluster_with(2.5, 400, 0.9), cluster_with(3.5, 400, 0.9)];
        match select_roi(&two_boards, &criteria) {
            Err(Error::RoiAmbiguous { matching: 2 }) => {}
            other => panic!("expected RoiAmbiguous, got {other:?}"),
        }
    }

    /// Regular grid on the plane y = 2.5.
    fn plane_grid(n_side: usize) -> Vec<Point3> {
        let mut pts = Vec::new();
        for i in 0..n_side {
            for j in 0..n_side {
                pts.push(Point3::new(
                    -0.45 + 0.9 * i as f64 / (n_side - 1) as f64,
                    2.5,
                    -0.27 + 0.54 * j as f64 / (n_side - 1) as f64,
                ));
            }
        }
        pts
    }

    #[test]
    fn exact_plane_is_recovered_with_all_inliers() {
        let pts = plane_grid(10);
        let (plane, inliers) = ransac_plane_fit(&pts, &RansacConfig::default(), 1).unwrap();
        assert_eq!(inliers.len(), pts.len());
        assert_abs_diff_eq!(plane.normal.x, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(plane.normal.y, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(plane.normal.z, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(plane.d, 2.5, epsilon = 1e-9);
    }

    #[test]
    fn outliers_do_not_move_the_plane() {
        // 70 exact plane points + 30 uniform outliers, zero noise.
        let mut pts: Vec<Point3> = plane_grid(9).into_iter().take(70).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        while pts.len() < 100 {
            let y: f64 = rng.random_range(0.5..5.0);
            if (y - 2.5).abs() < 0.1 {
                continue; // keep outliers clear of the true plane
            }
            pts.push(Point3::new(
                rng.random_range(-2.0..2.0),
                y,
                rng.random_range(-1.0..1.0),
            ));
        }
        let (plane, _) = ransac_plane_fit(&pts, &RansacConfig::default(), 7).unwrap();
        let angle = plane.normal.dot(&Point3::new(0.0, -1.0, 0.0)).clamp(-1.0, 1.0).acos();
        assert!(
            angle.to_degrees() < 0.1,
            "normal off by {} degrees",
            angle.to_degrees()
        );
    }

    #[test]
    fn three_points_define_their_plane() {
        let pts = vec![
            Point3::new(0.0, 2.0, 0.0),
            Point3::new(1.0, 2.0, 0.0),
            Point3::new(0.0, 2.0, 1.0),
        ];
        let (plane, inliers) = ransac_plane_fit(&pts, &RansacConfig::default(), 0).unwrap();
        assert_eq!(inliers, vec![0, 1, 2]);
        for p in &pts {
            assert_abs_diff_eq!(plane.signed_distance(p), 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(plane.d, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let cfg = RansacConfig::default();
        assert!(matches!(
            ransac_plane_fit(&[Point3::ZERO, Point3::new(1.0, 0.0, 0.0)], &cfg, 0),
            Err(Error::PlaneFitDegenerate(_))
        ));
        // All points on one line: no valid hypothesis exists.
        let line: Vec<Point3> = (0..20).map(|i| Point3::new(i as f64 * 0.1, 2.0, 0.0)).collect();
        assert!(matches!(
            ransac_plane_fit(&line, &cfg, 0),
            Err(Error::PlaneFitDegenerate(_))
        ));
    }

    #[test]
    fn poor_consensus_is_a_quality_error() {
        // Two equally-sized parallel planes far apart: the winner explains
        // only half the points.
        let mut pts = plane_grid(8);
        pts.extend(plane_grid(8).into_iter().map(|p| Point3::new(p.x, p.y + 2.0, p.z)));
        match ransac_plane_fit(&pts, &RansacConfig::default(), 3) {
            Err(Error::PlaneFitQuality { inlier_ratio, .. }) => {
                assert!(inlier_ratio <= 0.55, "ratio {inlier_ratio}");
            }
            other => panic!("expected PlaneFitQuality, got {other:?}"),
        }
    }

    #[test]
    fn ransac_is_deterministic_per_seed() {
        let mut pts = plane_grid(9);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            pts.push(Point3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(0.5..5.0),
                rng.random_range(-1.0..1.0),
            ));
        }
        let cfg = RansacConfig::default();
        let (p1, in1) = ransac_plane_fit(&pts, &cfg, 99).unwrap();
        let (p2, in2) = ransac_plane_fit(&pts, &cfg, 99).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(in1, in2);
    }

    #[test]
    fn projection_foot_of_perpendicular() {
        let plane = PlaneModel::new(Point3::new(0.0, -1.0, 0.0), 2.5).unwrap();
        // Canonical orientation keeps d >= 0.
        assert!(plane.d > 0.0);
        let foot = plane.project(Point3::ZERO);
        assert_abs_diff_eq!((foot - Point3::new(0.0, 2.5, 0.0)).norm(), 0.0, epsilon = 1e-15);

        let on_plane = Point3::new(0.3, 2.5, -0.1);
        assert_eq!(plane.project(on_plane), on_plane);
    }

    #[test]
    fn projection_is_idempotent_and_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let plane = PlaneModel::new(
                Point3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..=-0.1),
                    rng.random_range(-1.0..1.0),
                ),
                rng.random_range(-3.0..3.0),
            )
            .unwrap();
            let p = Point3::new(
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            );
            let once = plane.project(p);
            let twice = plane.project(once);
            assert!(plane.signed_distance(&once).abs() < 1e-12);
            assert!((twice - once).norm() < 1e-12);
        }
    }

    #[test]
    fn projection_is_a_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let plane = PlaneModel::new(Point3::new(0.2, -1.0, 0.1), 2.0).unwrap();
        for _ in 0..500 {
            let p = Point3::new(
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            );
            let q = Point3::new(
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            );
            let (pp, qq) = (plane.project(p), plane.project(q));
            assert!((pp - qq).norm() <= (p - q).norm() + 1e-12);
        }
    }
}
