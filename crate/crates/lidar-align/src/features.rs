//! Corner feature selection: from the board points projected onto the
//! fitted plane, pick the four beams closest to the target corners, in a
//! fixed top-left, top-right, bottom-left, bottom-right order.

use crate::error::{Error, Result};
use crate::geometry::{wrap_azimuth, Point3, SphericalBeam};
use crate::preprocess::PlaneModel;

/// One selected corner beam.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerFeature {
    /// The beam's Cartesian position on the fitted plane.
    pub point: Point3,
    /// Spherical measurement recomputed from the projected point, so it
    /// carries the plane fit's noise reduction; ring and reflectivity are
    /// inherited from the original beam.
    pub beam: SphericalBeam,
    /// Index of the selected point in the input slice.
    pub source_index: usize,
}

impl CornerFeature {
    /// The feature a beam measured exactly at `point` would produce; useful
    /// for feeding externally detected corners straight into the solver.
    pub fn at(point: Point3, ring: u16) -> CornerFeature {
        let beam = SphericalBeam {
            ring,
            azimuth: 0.0,
            vertical: 0.0,
            range: 1.0,
            reflectivity: 1.0,
        };
        CornerFeature { point, beam: respherize(&point, &beam), source_index: 0 }
    }
}

/// The four corner features ordered to match the target corner layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerFeatures {
    pub top_left: CornerFeature,
    pub top_right: CornerFeature,
    pub bottom_left: CornerFeature,
    pub bottom_right: CornerFeature,
}

impl CornerFeatures {
    /// Features in corner order: TL, TR, BL, BR.
    pub fn as_array(&self) -> [&CornerFeature; 4] {
        [&self.top_left, &self.top_right, &self.bottom_left, &self.bottom_right]
    }

    /// Projected corner positions in corner order: TL, TR, BL, BR.
    pub fn points(&self) -> [Point3; 4] {
        [
            self.top_left.point,
            self.top_right.point,
            self.bottom_left.point,
            self.bottom_right.point,
        ]
    }
}

/// In-plane orthonormal directions of a (near-)upright plane: `v` is the
/// board-up direction (world vertical projected into the plane) and
/// `u = v × n` is board-right as seen from the sensor; `(u, v, n)` form a
/// right-handed orthonormal set.
///
/// Fails when the plane normal is within about 10⁻⁶ rad of the world
/// vertical: a face-up board has no meaningful "up" direction.
pub fn plane_basis(plane: &PlaneModel) -> Result<(Point3, Point3)> {
    let n = plane.normal;
    let z = Point3::new(0.0, 0.0, 1.0);
    let residual = z - n * z.dot(&n);
    if residual.norm() < 1e-6 {
        return Err(Error::DegeneratePlaneBasis);
    }
    let v = residual.normalized().expect("norm checked above");
    let u = v.cross(&n);
    Ok((u, v))
}

/// Selects the four points closest to the board corners.
///
/// `points` are the board points already projected onto `plane`; `beams`
/// holds the original measurement for each point (parallel slices). The
/// selection works in centered plane coordinates `(uᵢ, vᵢ)`: the top-left
/// feature maximizes `−u + v`, top-right `u + v`, bottom-left `−u − v`,
/// bottom-right `u − v`. Score ties prefer the larger `|u|`, then the lower
/// index, so the result is independent of input order. For a
/// near-rectangular board cluster this picks exactly the beam nearest each
/// corner without needing a pose estimate first.
pub fn extract_corner_features(
    points: &[Point3],
    beams: &[SphericalBeam],
    plane: &PlaneModel,
) -> Result<CornerFeatures> {
    if points.len() != beams.len() {
        return Err(Error::Validation(format!(
            "point count {} does not match beam count {}",
            points.len(),
            beams.len()
        )));
    }
    if points.len() < 4 {
        return Err(Error::Validation(format!(
            "corner extraction needs at least 4 points, got {}",
            points.len()
        )));
    }
    let first_ring = beams[0].ring;
    if beams.iter().all(|b| b.ring == first_ring) {
        return Err(Error::InsufficientVerticalCoverage(format!(
            "all {} points lie on ring {first_ring}",
            points.len()
        )));
    }
    for (i, p) in points.iter().enumerate() {
        if plane.signed_distance(p).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "point {i} is {} m off the plane; project points before corner extraction",
                plane.signed_distance(p).abs()
            )));
        }
    }

    let (u, v) = plane_basis(plane)?;
    let n = points.len() as f64;
    let centroid = points.iter().fold(Point3::ZERO, |acc, p| acc + *p) * (1.0 / n);
    let coords: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let d = *p - centroid;
            (u.dot(&d), v.dot(&d))
        })
        .collect();

    // Quadrant scores in corner order TL, TR, BL, BR.
    let score = |(cu, cv): (f64, f64)| [-cu + cv, cu + cv, -cu - cv, cu - cv];
    let mut winners = [0usize; 4];
    for (i, &c) in coords.iter().enumerate().skip(1) {
        let s = score(c);
        for corner in 0..4 {
            let best = winners[corner];
            let best_s = score(coords[best])[corner];
            let better = s[corner] > best_s
                || (s[corner] == best_s && c.0.abs() > coords[best].0.abs());
            if better {
                winners[corner] = i;
            }
        }
    }

    for a in 0..4 {
        for b in (a + 1)..4 {
            if winners[a] == winners[b] {
                return Err(Error::InsufficientVerticalCoverage(format!(
                    "corners {a} and {b} resolve to the same point; the cluster is degenerate"
                )));
            }
        }
    }

    let feature = |i: usize| CornerFeature {
        point: points[i],
        beam: respherize(&points[i], &beams[i]),
        source_index: i,
    };
    Ok(CornerFeatures {
        top_left: feature(winners[0]),
        top_right: feature(winners[1]),
        bottom_left: feature(winners[2]),
        bottom_right: feature(winners[3]),
    })
}

/// Spherical coordinates of the projected point, keeping the original
/// beam's ring and reflectivity.
fn respherize(point: &Point3, original: &SphericalBeam) -> SphericalBeam {
    let r = point.norm();
    SphericalBeam {
        ring: original.ring,
        azimuth: wrap_azimuth(point.x.atan2(point.y)),
        vertical: if r > 0.0 { (point.z / r).clamp(-1.0, 1.0).asin() } else { 0.0 },
        range: r,
        reflectivity: original.reflectivity,
    }
}
