use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::BallPair;
use crate::error::{GeoError, Result};
use crate::manifold::{ManifoldModel, ManifoldPoint};
use crate::sets::PointCloud;

/// Lattice pitches and seed used to sample lenses.
///
/// Interior samples are one jittered point per cell of the cubic lattice of
/// pitch `pitch` in normal coordinates at the moving centre; the jitter of a
/// cell depends only on the seed and the cell index, so lenses with the same
/// centre and different radii share their common samples. Boundary samples
/// are spaced so that every boundary point is within `boundary_pitch` of one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub pitch: f64,
    pub boundary_pitch: f64,
    pub seed: u64,
}

impl SamplingPlan {
    /// About `budget` interior cells across the small ball of radius `small`.
    pub fn from_budget(m: &ManifoldModel, small: f64, budget: usize, seed: u64) -> Result<Self> {
        if budget == 0 {
            return Err(GeoError::Precondition("sampling budget must be at least 1".into()));
        }
        if !(small > 0.0) {
            return Err(GeoError::Precondition("radius must be positive".into()));
        }
        let n = m.dimension();
        let cells = (budget as f64).powf(1.0 / n as f64).round().max(1.0);
        let pitch = 2.0 * small / cells;
        // 2D boundaries are cheap to sample densely
        let boundary_pitch = if n == 2 { pitch / 4.0 } else { pitch };
        Ok(SamplingPlan { pitch, boundary_pitch, seed })
    }

    pub fn with_boundary_pitch(mut self, p: f64) -> Self {
        self.boundary_pitch = p;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Interior,
    /// On the sphere of radius `r` about `c(t)`.
    SmallSphere,
    /// On the sphere of radius `R` about `c(0)`.
    BigSphere,
    /// On both spheres.
    Corner,
    AxisTip,
}

/// Lens samples with their kinds and a fill radius for the sampled set
/// (the boundary for boundary clouds, the whole lens otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct LensCloud {
    pub points: Vec<ManifoldPoint>,
    pub kinds: Vec<SampleKind>,
    pub fill_radius: f64,
}

impl LensCloud {
    fn single(p: ManifoldPoint) -> Self {
        LensCloud { points: vec![p], kinds: vec![SampleKind::Corner], fill_radius: 0.0 }
    }

    fn push(&mut self, p: ManifoldPoint, kind: SampleKind) {
        self.points.push(p);
        self.kinds.push(kind);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn corners(&self) -> impl Iterator<Item = &ManifoldPoint> {
        self.points.iter().zip(&self.kinds).filter(|(_, k)| **k == SampleKind::Corner).map(|(p, _)| p)
    }

    pub fn to_point_cloud(&self) -> Result<PointCloud> {
        PointCloud::new(self.points.clone(), self.fill_radius)
    }
}

/// Unit vectors in `R^k` whose angular covering radius on the unit sphere
/// is at most `alpha`: evenly spaced angles for `k = 2`, normalized face
/// centres of a subdivided cube otherwise.
pub(crate) fn sphere_lattice(k: usize, alpha: f64) -> Vec<Vec<f64>> {
    let alpha = alpha.clamp(1e-6, 1.0);
    if k == 2 {
        let mut n = (std::f64::consts::PI / alpha).ceil() as usize;
        n = (n + n % 2).max(4);
        return (0..n)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
    }
    let m = (((k - 1) as f64).sqrt() / alpha).ceil().max(1.0) as usize;
    let face_points = m.pow(k as u32 - 1);
    let mut out = Vec::with_capacity(2 * k * face_points);
    for axis in 0..k {
        for sign in [1.0, -1.0] {
            for idx in 0..face_points {
                let mut v = vec![0.0; k];
                let mut rest = idx;
                for (d, slot) in v.iter_mut().enumerate() {
                    if d == axis {
                        *slot = sign;
                    } else {
                        *slot = -1.0 + (2 * (rest % m) + 1) as f64 / m as f64;
                        rest /= m;
                    }
                }
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                v.iter_mut().for_each(|c| *c /= norm);
                out.push(v);
            }
        }
    }
    out
}

/// Polar angle (from `c'(0)`, towards `side * e_axis`) at which the sphere of
/// radius `R` about `c(0)` meets the sphere of radius `r` about `c(t)`, if
/// the two spheres cross on that side.
pub(crate) fn corner_angle(bp: &BallPair, axis: usize, side: f64) -> Result<Option<f64>> {
    let m = bp.manifold();
    let n = m.dimension();
    let g = |phi: f64| -> Result<f64> {
        let mut c = vec![0.0; n];
        c[0] = bp.big_radius() * phi.cos();
        c[axis] = side * bp.big_radius() * phi.sin();
        let x = bp.exp_0(&c)?;
        Ok(m.distance(bp.center_t(), &x)? - bp.small_radius())
    };
    let (mut lo, mut hi) = (0.0_f64, std::f64::consts::PI);
    if g(lo)? > 0.0 || g(hi)? <= 0.0 {
        return Ok(None);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(Some(lo))
}

/// Samples of the boundary of the lens, including both axis tips and (when
/// the spheres cross) the points where they meet.
pub fn sample_boundary(bp: &BallPair, plan: &SamplingPlan) -> Result<LensCloud> {
    if bp.is_tangent() {
        return Ok(LensCloud::single(bp.point_on_gamma(bp.big_radius())?));
    }
    let m = bp.manifold();
    let n = m.dimension();
    let (big, small, t) = (bp.big_radius(), bp.small_radius(), bp.t());
    let tol = bp.membership_tol();
    let p = plan.boundary_pitch;
    let mut cloud = LensCloud { points: Vec::new(), kinds: Vec::new(), fill_radius: 0.0 };

    let arc_r = m.sphere_arc_factor(bp.center_t(), small)?;
    for u in sphere_lattice(n, p / arc_r.max(f64::MIN_POSITIVE)) {
        let c: Vec<f64> = u.iter().map(|x| x * small).collect();
        let x = bp.exp_t(&c)?;
        if big - m.distance(bp.center_0(), &x)? >= -tol {
            cloud.push(x, SampleKind::SmallSphere);
        }
    }

    let arc_big = m.sphere_arc_factor(bp.center_0(), big)?;
    let on_big = |phi: f64, tail: &[f64]| -> Result<ManifoldPoint> {
        let mut c = vec![big * phi.cos()];
        c.extend(tail.iter().map(|x| big * phi.sin() * x));
        bp.exp_0(&c)
    };
    if n == 2 {
        let plus = corner_angle(bp, 1, 1.0)?;
        let minus = corner_angle(bp, 1, -1.0)?;
        if let (Some(a), Some(b)) = (plus, minus) {
            // signed angle runs from -b to a through c'(0)
            let span = a + b;
            let count = ((span * arc_big / (2.0 * p)).ceil() as usize).max(1);
            for j in 0..=count {
                let phi = -b + span * j as f64 / count as f64;
                let x = on_big(phi.abs(), &[phi.signum()])?;
                let kind = if j == 0 || j == count { SampleKind::Corner } else { SampleKind::BigSphere };
                if kind == SampleKind::Corner || small - m.distance(bp.center_t(), &x)? >= -tol {
                    cloud.push(x, kind);
                }
            }
        }
        cloud.fill_radius = p;
    } else {
        if let Some(phi) = corner_angle(bp, 1, 1.0)? {
            for u in sphere_lattice(n, p / arc_big.max(f64::MIN_POSITIVE)) {
                if u[0] < phi.cos() - 1e-12 {
                    continue;
                }
                let c: Vec<f64> = u.iter().map(|x| x * big).collect();
                let x = bp.exp_0(&c)?;
                if small - m.distance(bp.center_t(), &x)? >= -tol {
                    cloud.push(x, SampleKind::BigSphere);
                }
            }
            let ridge = arc_big * phi.sin();
            for u in sphere_lattice(n - 1, p / ridge.max(f64::MIN_POSITIVE)) {
                cloud.push(on_big(phi, &u)?, SampleKind::Corner);
            }
        }
        // a boundary point near the ridge is within p of the ridge and the
        // ridge is within p of a ridge sample
        cloud.fill_radius = 2.0 * p;
    }

    cloud.push(bp.point_on_gamma(t - small)?, SampleKind::AxisTip);
    cloud.push(bp.point_on_gamma(big.min(t + small))?, SampleKind::AxisTip);
    Ok(cloud)
}

fn cell_stream(cell: &[i64]) -> u64 {
    // FNV-1a over the little-endian cell indices
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in cell {
        for b in c.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Interior lattice samples plus the boundary samples. Every point of the
/// lens is within the returned fill radius of a sample.
pub fn sample_intersection(bp: &BallPair, plan: &SamplingPlan) -> Result<LensCloud> {
    let mut cloud = sample_boundary(bp, plan)?;
    if bp.is_tangent() {
        return Ok(cloud);
    }
    let m = bp.manifold();
    let n = m.dimension();
    let (big, small) = (bp.big_radius(), bp.small_radius());
    let tol = bp.membership_tol();
    let h = plan.pitch;
    let kmax = (small / h).ceil() as i64;
    let side = (2 * kmax) as usize;
    let base = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut cell = vec![0_i64; n];
    let mut v = vec![0.0; n];
    for idx in 0..side.pow(n as u32) {
        let mut rest = idx;
        for c in cell.iter_mut() {
            *c = (rest % side) as i64 - kmax;
            rest /= side;
        }
        let mut rng = base.clone();
        rng.set_stream(cell_stream(&cell));
        rng.set_word_pos(0);
        for (vi, ci) in v.iter_mut().zip(&cell) {
            *vi = (*ci as f64 + rng.random::<f64>()) * h;
        }
        if v.iter().map(|x| x * x).sum::<f64>() > small * small {
            continue;
        }
        let x = bp.exp_t(&v)?;
        if big - m.distance(bp.center_0(), &x)? >= -tol {
            cloud.push(x, SampleKind::Interior);
        }
    }
    // a lens point whose cell sample was rejected reaches the boundary
    // within the cell diameter
    let stretch = m.exp_lipschitz(bp.center_t(), small)?;
    cloud.fill_radius += stretch * h * (n as f64).sqrt();
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radii::Radius;

    fn pair(m: &ManifoldModel, big: f64, small: f64) -> BallPair {
        BallPair::new(m, &m.base_direction(), big, small, Radius::Infinite).unwrap()
    }

    #[test]
    fn lattice_covers_the_circle() {
        let dirs = sphere_lattice(2, 0.1);
        assert!(dirs.len().is_multiple_of(2));
        assert!(std::f64::consts::PI / dirs.len() as f64 <= 0.1);
    }

    #[test]
    fn cube_lattice_covers_the_sphere() {
        let dirs = sphere_lattice(3, 0.2);
        // probe a few directions for the angular covering radius
        for probe in [[0.3, -0.5, 0.81], [1.0, 0.0, 0.0], [-0.57, 0.57, 0.59]] {
            let n = (probe.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let best = dirs
                .iter()
                .map(|d| (d.iter().zip(probe).map(|(a, b)| a * b / n).sum::<f64>()).clamp(-1.0, 1.0).acos())
                .fold(f64::INFINITY, f64::min);
            assert!(best <= 0.2, "{best}");
        }
    }

    #[test]
    fn every_sample_is_admissible() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let bp = pair(&m, 2.0, 1.0).at(1.5).unwrap();
        let plan = SamplingPlan::from_budget(&m, 1.0, 1024, 7).unwrap();
        let cloud = sample_intersection(&bp, &plan).unwrap();
        assert!(cloud.len() > 300);
        for x in &cloud.points {
            assert!(bp.margin(x).unwrap() >= -1e-10);
        }
        assert_eq!(cloud.corners().count(), 2);
    }

    #[test]
    fn tangent_lens_is_a_single_point() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let bp = pair(&m, 2.0, 1.0).at(3.0).unwrap();
        let plan = SamplingPlan::from_budget(&m, 1.0, 64, 7).unwrap();
        let cloud = sample_intersection(&bp, &plan).unwrap();
        assert_eq!(cloud.points, vec![ManifoldPoint::new(vec![2.0, 0.0])]);
    }

    #[test]
    fn samples_do_not_depend_on_the_small_radius() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let bp = pair(&m, 2.0, 1.0).at(1.2).unwrap();
        let plan = SamplingPlan::from_budget(&m, 1.0, 256, 3).unwrap();
        let inner = sample_intersection(&bp.with_small_radius(0.8), &plan).unwrap();
        let outer = sample_intersection(&bp, &plan).unwrap();
        let interior = |c: &LensCloud| -> Vec<ManifoldPoint> {
            c.points.iter().zip(&c.kinds).filter(|(_, k)| **k == SampleKind::Interior).map(|(p, _)| p.clone()).collect()
        };
        let outer_pts = interior(&outer);
        for p in interior(&inner) {
            assert!(outer_pts.contains(&p));
        }
    }
}
