use super::sampling::{sample_boundary, sample_intersection, SamplingPlan};
use super::{BallPair, Regime};
use crate::error::Result;
use crate::manifold::{ManifoldModel, ManifoldPoint, TangentVector};
use crate::sets::{diameter, PointCloud};

/// Lens diameter bracketed by a witness pair from below and by the sampled
/// diameter plus fill radii from above.
#[derive(Debug, Clone, PartialEq)]
pub struct LensDiameter {
    /// Distance between the witnesses; a lower bound.
    pub value: f64,
    pub upper: f64,
    /// `upper - value`.
    pub slack: f64,
    pub witness: (ManifoldPoint, ManifoldPoint),
    /// Largest sampled distance.
    pub scan: f64,
    pub fill_radius: f64,
    pub samples: usize,
}

const ASCENT_ITERATIONS: usize = 200;
const PROJECTION_ROUNDS: usize = 100;

/// Alternating geodesic retraction onto both balls; `None` when the point
/// cannot be brought inside within the round limit.
fn project(bp: &BallPair, mut x: ManifoldPoint) -> Result<Option<ManifoldPoint>> {
    let m = bp.manifold();
    // exact models must land inside; numeric distances carry their own error
    let tol = match m {
        ManifoldModel::SpaceForm(_) => 0.0,
        ManifoldModel::Revolution(_) => m.distance_accuracy(),
    };
    let balls = [(bp.center_0().clone(), bp.big_radius()), (bp.center_t().clone(), bp.small_radius())];
    for _ in 0..PROJECTION_ROUNDS {
        let excess: Vec<f64> = balls.iter().map(|(c, rad)| Ok(m.distance(c, &x)? - rad)).collect::<Result<_>>()?;
        let worst = if excess[0] >= excess[1] { 0 } else { 1 };
        if excess[worst] <= tol {
            return Ok(m.check_point(&x).is_ok().then_some(x));
        }
        let (c, rad) = &balls[worst];
        let v = match m.log_map(c, &x) {
            Ok(v) => v,
            Err(_) => return Ok(None),
        };
        let len = m.norm(&v);
        let unit: Vec<f64> = v.components.iter().map(|a| a / len).collect();
        x = m.geodesic_state(c, &unit, *rad * (1.0 - 4.0 * f64::EPSILON))?.0;
    }
    Ok(None)
}

fn away_from(m: &ManifoldModel, a: &ManifoldPoint, b: &ManifoldPoint) -> Option<TangentVector> {
    let v = m.log_map(a, b).ok()?;
    let len = m.norm(&v);
    (len > 0.0).then(|| v.scaled(-1.0 / len))
}

/// Projected geodesic ascent of `d(a, b)`: both endpoints move along the
/// distance gradient (away from each other along the connecting geodesic)
/// and are retracted onto the lens.
fn ascend(bp: &BallPair, mut a: ManifoldPoint, mut b: ManifoldPoint) -> Result<(ManifoldPoint, ManifoldPoint, f64)> {
    let m = bp.manifold();
    let bound = m.diameter_bound();
    let stop = (10.0 * m.distance_accuracy()).max(1e-12);
    let mut d = m.distance(&a, &b)?;
    let mut step = 0.01 * bp.small_radius();
    for _ in 0..ASCENT_ITERATIONS {
        if step < stop || d >= bound * (1.0 - 1e-12) {
            break;
        }
        let (Some(ua), Some(ub)) = (away_from(m, &a, &b), away_from(m, &b, &a)) else { break };
        let na = project(bp, m.exp_map(&ua.scaled(step))?)?;
        let nb = project(bp, m.exp_map(&ub.scaled(step))?)?;
        if let (Some(na), Some(nb)) = (na, nb) {
            let nd = m.distance(&na, &nb)?;
            if nd > d {
                a = na;
                b = nb;
                d = nd;
                // longer moves leave the small ball anyway
                step = (step * 1.5).min(bp.small_radius());
                continue;
            }
        }
        step *= 0.5;
    }
    Ok((a, b, d))
}

/// Largest sampled distance. Space forms compare exact distance keys; on
/// numeric models the pair is chosen by distance between normal
/// coordinates at `c(t)`, and the returned bound scales that by the
/// Lipschitz constant of the exponential map.
fn scan(bp: &BallPair, cloud: &PointCloud) -> Result<(usize, usize, f64, f64)> {
    let m = bp.manifold();
    match m {
        ManifoldModel::SpaceForm(_) => {
            let d = diameter(m, cloud)?;
            Ok((d.a, d.b, d.value, d.value))
        }
        ManifoldModel::Revolution(_) => {
            let c = bp.center_t();
            let coords: Vec<TangentVector> = cloud.points().iter().map(|x| m.log_map(c, x)).collect::<Result<_>>()?;
            let mut best = (0, 0, 0.0);
            for i in 0..coords.len() {
                for j in i + 1..coords.len() {
                    let diff = coords[i].add_scaled(-1.0, &coords[j]);
                    let k = m.norm(&diff);
                    if k > best.2 {
                        best = (i, j, k);
                    }
                }
            }
            let pts = cloud.points();
            let value = m.distance(&pts[best.0], &pts[best.1])?;
            let bound = m.exp_lipschitz(c, bp.small_radius())? * best.2;
            Ok((best.0, best.1, value, bound.max(value)))
        }
    }
}

/// Diameter of the lens at the pair's current separation.
///
/// Convex lenses attain their diameter on the boundary, so only boundary
/// samples are scanned; beyond the convexity radius the whole lens is
/// sampled. Ascent starts from the best sampled pair, the axis tips, the
/// points where the spheres meet, and the chords through `c(t)`
/// perpendicular to the geodesic.
pub fn lens_diameter(bp: &BallPair, plan: &SamplingPlan) -> Result<LensDiameter> {
    let m = bp.manifold();
    if bp.is_tangent() {
        let p = bp.point_on_gamma(bp.big_radius())?;
        return Ok(LensDiameter {
            value: 0.0,
            upper: 0.0,
            slack: 0.0,
            witness: (p.clone(), p),
            scan: 0.0,
            fill_radius: 0.0,
            samples: 1,
        });
    }
    let lens = match bp.regime() {
        Regime::Convex => sample_boundary(bp, plan)?,
        Regime::BeyondConvexity => sample_intersection(bp, plan)?,
    };
    let cloud = lens.to_point_cloud()?;
    let (ia, ib, scan_value, scan_bound) = scan(bp, &cloud)?;
    let pts = cloud.points();

    let mut seeds = vec![(pts[ia].clone(), pts[ib].clone())];
    let (big, small, t) = (bp.big_radius(), bp.small_radius(), bp.t());
    seeds.push((bp.point_on_gamma(t - small)?, bp.point_on_gamma(big.min(t + small))?));
    let corners: Vec<&ManifoldPoint> = lens.corners().collect();
    if let Some(first) = corners.first() {
        let mut far = (*first, -1.0);
        for c in &corners[1..] {
            let k = m.distance_key(first, c)?;
            if k > far.1 {
                far = (c, k);
            }
        }
        if far.1 >= 0.0 {
            seeds.push(((*first).clone(), far.0.clone()));
        }
    }
    let n = m.dimension();
    for i in 1..n {
        let mut c = vec![0.0; n];
        c[i] = small;
        let p = bp.exp_t(&c)?;
        c[i] = -small;
        let q = bp.exp_t(&c)?;
        if bp.margin(&p)? >= -bp.membership_tol() && bp.margin(&q)? >= -bp.membership_tol() {
            seeds.push((p, q));
        }
    }

    let mut best: Option<(ManifoldPoint, ManifoldPoint, f64)> = None;
    for (a, b) in seeds {
        let r = ascend(bp, a, b)?;
        if best.as_ref().is_none_or(|x| r.2 > x.2) {
            best = Some(r);
        }
    }
    let (a, b, d) = best.expect("at least one seed");
    let (a, b, value) = if scan_value > d { (pts[ia].clone(), pts[ib].clone(), scan_value) } else { (a, b, d) };
    let fill = cloud.fill_radius();
    let upper = (scan_bound + 2.0 * fill).min(2.0 * small).min(m.diameter_bound()).max(value);
    Ok(LensDiameter {
        value,
        upper,
        slack: upper - value,
        witness: (a, b),
        scan: scan_value,
        fill_radius: fill,
        samples: cloud.len(),
    })
}
