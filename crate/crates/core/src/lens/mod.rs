//! Intersections of two closed geodesic balls `D_R(c(0)) ∩ D_r(c(t))`
//! ("lenses") whose centres separate along a geodesic `c`.

mod diameter;
mod profile;
mod sampling;

pub use diameter::{lens_diameter, LensDiameter};
pub use profile::{estimate_s, estimate_t, uniform_grid, w_profile, Estimate, TEstimate, WProfile};
pub use sampling::{sample_boundary, sample_intersection, LensCloud, SampleKind, SamplingPlan};

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::geodesic::GeodesicSegment;
use crate::manifold::{ManifoldModel, ManifoldPoint, TangentVector};
use crate::radii::Radius;
use crate::Execution;

/// Whether the radii are below the convexity radius (the setting in which
/// the lens is strongly convex) or deliberately beyond it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Convex,
    BeyondConvexity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    Inside,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub placement: Placement,
    /// `min(R - d(c(0), x), r - d(c(t), x))`.
    pub margin: f64,
}

/// Tolerances shared by the lens computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensOptions {
    /// Distance within which a point counts as on a ball boundary.
    pub membership_tol: f64,
    /// Allowed excess when testing `lens(t) ⊂ D_r(c(s))`.
    pub nesting_tol: f64,
    /// `w >= 2r - full_width_tol` counts as full width.
    pub full_width_tol: f64,
    /// Bisection target for T and S, relative to `R + r`.
    pub refine: f64,
    /// Separations `s + h 2^-k`, `k = 0..=fine_levels`, probed past each `s`.
    pub fine_levels: u32,
    pub exec: Execution,
}

impl Default for LensOptions {
    fn default() -> Self {
        LensOptions {
            membership_tol: 1e-10,
            nesting_tol: 1e-9,
            full_width_tol: 1e-8,
            refine: 1e-4,
            fine_levels: 12,
            exec: Execution::default(),
        }
    }
}

/// Relative round-off tolerated when a separation lands just past `R + r`.
pub(crate) const END_SLOP: f64 = 1e-12;

/// Two balls `D_R(c(0))` and `D_r(c(t))` with `c` a unit-speed geodesic.
#[derive(Debug, Clone)]
pub struct BallPair {
    manifold: ManifoldModel,
    gamma: GeodesicSegment,
    big: f64,
    small: f64,
    t: f64,
    regime: Regime,
    membership_tol: f64,
    center_t: ManifoldPoint,
    frame_t: Vec<TangentVector>,
    frame_0: Vec<TangentVector>,
}

impl BallPair {
    /// Pair at separation `t = 0`; requires `0 < r <= R < conv`.
    pub fn new(m: &ManifoldModel, direction: &TangentVector, big: f64, small: f64, conv: Radius) -> Result<Self> {
        if !(small > 0.0) || !(small <= big) {
            return Err(GeoError::Precondition(format!("radii must satisfy 0 < r <= R, got R = {big}, r = {small}")));
        }
        let bound = conv.value();
        if bound.is_nan() || !(big < bound) {
            return Err(GeoError::Precondition(format!("R = {big} must be below the convexity radius {conv}")));
        }
        Self::build(m, direction, big, small, Regime::Convex)
    }

    /// Pair with radii at or beyond the convexity radius; only `0 < r <= R`
    /// is required. Diameters are then computed from full interior samples.
    pub fn beyond_convexity(m: &ManifoldModel, direction: &TangentVector, big: f64, small: f64) -> Result<Self> {
        if !(small > 0.0) || !(small <= big) {
            return Err(GeoError::Precondition(format!("radii must satisfy 0 < r <= R, got R = {big}, r = {small}")));
        }
        Self::build(m, direction, big, small, Regime::BeyondConvexity)
    }

    fn build(m: &ManifoldModel, direction: &TangentVector, big: f64, small: f64, regime: Regime) -> Result<Self> {
        let unit = m.normalized(direction)?;
        let gamma = GeodesicSegment::new(m, &unit, big + small)?;
        let frame_0 = m.frame(&unit)?;
        let mut bp = BallPair {
            manifold: m.clone(),
            center_t: gamma.base.clone(),
            frame_t: frame_0.clone(),
            frame_0,
            gamma,
            big,
            small,
            t: 0.0,
            regime,
            membership_tol: LensOptions::default().membership_tol,
        };
        bp.set_t(0.0)?;
        Ok(bp)
    }

    pub fn with_membership_tol(mut self, tol: f64) -> Self {
        self.membership_tol = tol;
        self
    }

    fn set_t(&mut self, t: f64) -> Result<()> {
        let v = self.gamma.velocity_at(&self.manifold, t)?;
        self.frame_t = self.manifold.frame(&v)?;
        self.center_t = v.base;
        self.t = t;
        Ok(())
    }

    /// The same pair at separation `t`, `0 <= t <= R + r`.
    /// Separations past `R + r` by a few ulps (from computing `R + r` in
    /// another order) are clamped to it.
    pub fn at(&self, t: f64) -> Result<BallPair> {
        let end = self.big + self.small;
        if !(t >= 0.0 && t <= end * (1.0 + END_SLOP)) {
            return Err(GeoError::Precondition(format!("separation {t} outside [0, {end}]")));
        }
        let mut bp = self.clone();
        bp.set_t(t.min(end))?;
        Ok(bp)
    }

    /// The same centres with a different small radius.
    pub fn with_small_radius(&self, small: f64) -> BallPair {
        let mut bp = self.clone();
        bp.small = small;
        bp
    }

    pub fn manifold(&self) -> &ManifoldModel {
        &self.manifold
    }

    pub fn gamma(&self) -> &GeodesicSegment {
        &self.gamma
    }

    pub fn big_radius(&self) -> f64 {
        self.big
    }

    pub fn small_radius(&self) -> f64 {
        self.small
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn membership_tol(&self) -> f64 {
        self.membership_tol
    }

    pub fn center_0(&self) -> &ManifoldPoint {
        &self.gamma.base
    }

    pub fn center_t(&self) -> &ManifoldPoint {
        &self.center_t
    }

    /// Orthonormal frame at `c(t)` whose first vector is `c'(t)`.
    pub fn frame_t(&self) -> &[TangentVector] {
        &self.frame_t
    }

    pub fn frame_0(&self) -> &[TangentVector] {
        &self.frame_0
    }

    pub fn point_on_gamma(&self, s: f64) -> Result<ManifoldPoint> {
        self.gamma.point_at(&self.manifold, s)
    }

    /// True when `t = R + r` in the convex regime, where the lens is the
    /// single tangency point `c(R)`.
    pub fn is_tangent(&self) -> bool {
        self.regime == Regime::Convex && self.t >= self.big + self.small
    }

    pub fn margin(&self, x: &ManifoldPoint) -> Result<f64> {
        let m = &self.manifold;
        let a = self.big - m.distance(&self.gamma.base, x)?;
        let b = self.small - m.distance(&self.center_t, x)?;
        Ok(a.min(b))
    }

    pub fn membership(&self, x: &ManifoldPoint) -> Result<Membership> {
        let margin = self.margin(x)?;
        let placement = if margin.abs() <= self.membership_tol {
            Placement::Boundary
        } else if margin > 0.0 {
            Placement::Inside
        } else {
            Placement::Outside
        };
        Ok(Membership { placement, margin })
    }

    /// Point `exp_{c(t)}(sum_i coords[i] e_i)` in the frame at `c(t)`.
    pub fn exp_t(&self, coords: &[f64]) -> Result<ManifoldPoint> {
        exp_in_frame(&self.manifold, &self.frame_t, coords)
    }

    pub fn exp_0(&self, coords: &[f64]) -> Result<ManifoldPoint> {
        exp_in_frame(&self.manifold, &self.frame_0, coords)
    }
}

pub(crate) fn exp_in_frame(m: &ManifoldModel, frame: &[TangentVector], coords: &[f64]) -> Result<ManifoldPoint> {
    let mut v = TangentVector::zero(frame[0].base.clone());
    for (e, c) in frame.iter().zip(coords) {
        if *c != 0.0 {
            v = v.add_scaled(*c, e);
        }
    }
    m.exp_map(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_pair(big: f64, small: f64) -> BallPair {
        let m = ManifoldModel::euclidean(2).unwrap();
        BallPair::new(&m, &m.base_direction(), big, small, Radius::Infinite).unwrap()
    }

    #[test]
    fn centre_is_inside_for_small_separation() {
        let bp = plane_pair(2.0, 1.0).at(0.4).unwrap();
        let mb = bp.membership(bp.center_0()).unwrap();
        assert_eq!(mb.placement, Placement::Inside);
        assert!((mb.margin - 0.6).abs() < 1e-15);
    }

    #[test]
    fn tangency_point_is_on_the_boundary() {
        let bp = plane_pair(2.0, 1.0).at(3.0).unwrap();
        let x = bp.point_on_gamma(2.0).unwrap();
        assert_eq!(bp.membership(&x).unwrap().placement, Placement::Boundary);
        assert!(bp.is_tangent());
    }

    #[test]
    fn circle_intersection_corner_is_on_the_boundary() {
        let (big, small, t) = (2.0_f64, 1.0_f64, 1.8_f64);
        let a = (t * t + big * big - small * small) / (2.0 * t);
        let x = ManifoldPoint::new(vec![a, (big * big - a * a).sqrt()]);
        let mb = plane_pair(big, small).at(t).unwrap().membership(&x).unwrap();
        assert_eq!(mb.placement, Placement::Boundary);
        assert!(mb.margin.abs() < 1e-10);
    }

    #[test]
    fn radii_must_be_ordered_and_below_convexity() {
        let m = ManifoldModel::sphere(2, 1.0).unwrap();
        let d = m.base_direction();
        assert!(BallPair::new(&m, &d, 1.0, 1.2, Radius::Finite(1.5)).is_err());
        assert!(BallPair::new(&m, &d, std::f64::consts::FRAC_PI_2, 1.0, Radius::Finite(std::f64::consts::FRAC_PI_2))
            .is_err());
        assert!(BallPair::new(&m, &d, 1.2, 0.6, Radius::Finite(std::f64::consts::FRAC_PI_2)).is_ok());
    }

    #[test]
    fn separation_outside_range_is_rejected() {
        assert!(plane_pair(1.0, 1.0).at(2.5).is_err());
        assert!(plane_pair(1.0, 1.0).at(-0.1).is_err());
    }
}
