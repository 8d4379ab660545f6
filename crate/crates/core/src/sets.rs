//! Compact sets approximated by finite samples with a fill radius:
//! Hausdorff distance, diameter and the two convergence checks built on them.

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::exec::{map_indexed, Execution};
use crate::manifold::{ManifoldModel, ManifoldPoint};

/// Finite sample of a compact set. Every point of the represented set lies
/// within `fill_radius` of some sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<ManifoldPoint>,
    fill_radius: f64,
}

impl PointCloud {
    pub fn new(points: Vec<ManifoldPoint>, fill_radius: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(GeoError::EmptyCloud);
        }
        if !(fill_radius >= 0.0) {
            return Err(GeoError::Precondition(format!("fill radius must be non-negative, got {fill_radius}")));
        }
        Ok(PointCloud { points, fill_radius })
    }

    pub fn singleton(p: ManifoldPoint) -> Self {
        PointCloud { points: vec![p], fill_radius: 0.0 }
    }

    pub fn points(&self) -> &[ManifoldPoint] {
        &self.points
    }

    pub fn fill_radius(&self) -> f64 {
        self.fill_radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn union(&self, other: &PointCloud) -> PointCloud {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        PointCloud { points, fill_radius: self.fill_radius.max(other.fill_radius) }
    }

    pub fn into_points(self) -> Vec<ManifoldPoint> {
        self.points
    }
}

/// Index of the nearest point of `z` to `p` (lowest index on ties) and its distance.
pub(crate) fn nearest(m: &ManifoldModel, p: &ManifoldPoint, z: &[ManifoldPoint]) -> Result<(usize, f64)> {
    let mut best = (0, f64::INFINITY);
    for (j, q) in z.iter().enumerate() {
        let k = m.distance_key(p, q)?;
        if k < best.1 {
            best = (j, k);
        }
    }
    Ok((best.0, m.distance(p, &z[best.0])?))
}

/// `sup_{y in Y} inf_{z in Z} d(y, z)` over the samples.
pub fn directed_hausdorff(m: &ManifoldModel, y: &PointCloud, z: &PointCloud) -> Result<f64> {
    directed_hausdorff_with(m, y, z, Execution::default())
}

pub fn directed_hausdorff_with(m: &ManifoldModel, y: &PointCloud, z: &PointCloud, exec: Execution) -> Result<f64> {
    let rows = map_indexed(exec, y.points.len(), |i| nearest(m, &y.points[i], &z.points).map(|r| r.1));
    let mut worst: f64 = 0.0;
    for r in rows {
        worst = worst.max(r?);
    }
    Ok(worst)
}

/// Hausdorff distance between the samples. The distance between the
/// represented sets differs by at most the sum of the fill radii.
pub fn hausdorff(m: &ManifoldModel, y: &PointCloud, z: &PointCloud) -> Result<f64> {
    hausdorff_with(m, y, z, Execution::default())
}

pub fn hausdorff_with(m: &ManifoldModel, y: &PointCloud, z: &PointCloud, exec: Execution) -> Result<f64> {
    Ok(directed_hausdorff_with(m, y, z, exec)?.max(directed_hausdorff_with(m, z, y, exec)?))
}

/// Largest pairwise sample distance with its witnesses. The diameter of the
/// represented set lies in `[value, value + 2 * fill_radius]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: f64,
    pub a: usize,
    pub b: usize,
}

pub fn diameter(m: &ManifoldModel, y: &PointCloud) -> Result<Diameter> {
    diameter_with(m, y, Execution::default())
}

pub fn diameter_with(m: &ManifoldModel, y: &PointCloud, exec: Execution) -> Result<Diameter> {
    let pts = &y.points;
    let rows = map_indexed(exec, pts.len(), |i| -> Result<(f64, usize)> {
        let mut best = (f64::NEG_INFINITY, i);
        for (j, q) in pts.iter().enumerate().skip(i + 1) {
            let k = m.distance_key(&pts[i], q)?;
            if k > best.0 {
                best = (k, j);
            }
        }
        Ok(best)
    });
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, r) in rows.into_iter().enumerate() {
        let (k, j) = r?;
        if k > best.0 {
            best = (k, i, j);
        }
    }
    if best.0 == f64::NEG_INFINITY {
        return Ok(Diameter { value: 0.0, a: 0, b: 0 });
    }
    let value = m.distance(&pts[best.1], &pts[best.2])?;
    Ok(Diameter { value, a: best.1, b: best.2 })
}

/// Both sides of `|Diam Y - Diam Z| <= 2 d_H(Y, Z)` on the samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Added to `rhs`: twice the sum of the fill radii.
    pub slack: f64,
}

impl LipschitzCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + self.slack + 1e-12
    }

    pub fn margin(&self) -> f64 {
        self.rhs + self.slack - self.lhs
    }
}

pub fn diameter_lipschitz(m: &ManifoldModel, y: &PointCloud, z: &PointCloud) -> Result<LipschitzCheck> {
    let dy = diameter(m, y)?.value;
    let dz = diameter(m, z)?.value;
    let dh = hausdorff(m, y, z)?;
    Ok(LipschitzCheck { lhs: (dy - dz).abs(), rhs: 2.0 * dh, slack: 2.0 * (y.fill_radius + z.fill_radius) })
}

pub fn diameter_lipschitz_check(m: &ManifoldModel, y: &PointCloud, z: &PointCloud) -> Result<bool> {
    Ok(diameter_lipschitz(m, y, z)?.holds())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nesting {
    Decreasing,
    Increasing,
}

/// Checks that consecutive clouds are nested in the given sense (each
/// sample of the smaller set within the fill radius of the larger one, plus
/// `tol`) and returns `d_H(Y_k, limit)` for every `k`.
pub fn monotone_limit_check(
    m: &ManifoldModel,
    sequence: &[PointCloud],
    limit: &PointCloud,
    direction: Nesting,
    tol: f64,
) -> Result<Vec<f64>> {
    if sequence.is_empty() {
        return Err(GeoError::EmptyCloud);
    }
    for (k, pair) in sequence.windows(2).enumerate() {
        let (small, big) = match direction {
            Nesting::Decreasing => (&pair[1], &pair[0]),
            Nesting::Increasing => (&pair[0], &pair[1]),
        };
        let excess = directed_hausdorff(m, small, big)? - big.fill_radius - tol;
        if excess > 0.0 {
            return Err(GeoError::NestingViolated { index: k + 1, excess });
        }
    }
    sequence.iter().map(|y| hausdorff(m, y, limit)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> PointCloud {
        PointCloud::new(xs.iter().map(|x| ManifoldPoint::new(vec![*x, 0.0])).collect(), 0.0).unwrap()
    }

    #[test]
    fn empty_cloud_is_rejected() {
        assert_eq!(PointCloud::new(vec![], 0.0), Err(GeoError::EmptyCloud));
    }

    #[test]
    fn hausdorff_of_point_and_segment_ends() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let y = line(&[0.0]);
        let z = line(&[0.0, 1.0]);
        assert_eq!(hausdorff(&m, &y, &z).unwrap(), 1.0);
        assert_eq!(hausdorff(&m, &z, &z).unwrap(), 0.0);
        assert_eq!(directed_hausdorff(&m, &y, &z).unwrap(), 0.0);
    }

    #[test]
    fn diameter_of_singleton_is_zero() {
        let m = ManifoldModel::euclidean(2).unwrap();
        assert_eq!(diameter(&m, &line(&[3.0])).unwrap().value, 0.0);
        let d = diameter(&m, &line(&[0.0, 2.0, -1.0, 1.0])).unwrap();
        assert_eq!((d.value, d.a, d.b), (3.0, 1, 2));
    }

    #[test]
    fn lipschitz_on_point_and_segment() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let y = line(&[0.0]);
        let z = line(&[0.0, 0.25, 0.5, 0.75, 1.0]);
        let c = diameter_lipschitz(&m, &y, &z).unwrap();
        assert_eq!((c.lhs, c.rhs), (1.0, 2.0));
        assert!(diameter_lipschitz_check(&m, &y, &y).unwrap());
    }

    fn segment(len: f64) -> PointCloud {
        let mut xs: Vec<f64> = (0..).map(|i| i as f64 * 0.05).take_while(|x| *x < len).collect();
        xs.extend([1.0, len]);
        PointCloud::new(xs.into_iter().map(|x| ManifoldPoint::new(vec![x, 0.0])).collect(), 0.025).unwrap()
    }

    #[test]
    fn shrinking_segments_converge() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let seq: Vec<PointCloud> = (1..=4).map(|k| segment(1.0 + 1.0 / k as f64)).collect();
        let d = monotone_limit_check(&m, &seq, &segment(1.0), Nesting::Decreasing, 0.0).unwrap();
        for (k, dk) in d.iter().enumerate() {
            assert!((dk - 1.0 / (k + 1) as f64).abs() < 1e-12);
        }
        let grow: Vec<PointCloud> = seq.iter().rev().cloned().collect();
        assert!(matches!(
            monotone_limit_check(&m, &grow, &segment(1.0), Nesting::Decreasing, 0.0),
            Err(GeoError::NestingViolated { index: 1, .. })
        ));
    }
}
