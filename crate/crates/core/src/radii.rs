//! Injectivity, conjugate, focal and convexity radii, and the identities
//! tying them together.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::exec::{map_indexed, Execution};
use crate::geodesic::{default_jacobi_step, integrate_jacobi_with_step, GeodesicSegment};
use crate::manifold::{ManifoldModel, ManifoldPoint, ModelKind, TangentVector};

/// A radius that may be infinite or only bounded from below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Radius {
    Finite(f64),
    Infinite,
    /// A search up to this horizon found nothing.
    AtLeast(f64),
    Unknown,
}

impl Radius {
    /// Numeric value; infinite radii map to `+inf`, lower bounds to the bound.
    pub fn value(self) -> f64 {
        match self {
            Radius::Finite(x) | Radius::AtLeast(x) => x,
            Radius::Infinite => f64::INFINITY,
            Radius::Unknown => f64::NAN,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Radius::Finite(_) | Radius::Infinite)
    }

    pub fn scaled(self, s: f64) -> Radius {
        match self {
            Radius::Finite(x) => Radius::Finite(x * s),
            Radius::AtLeast(x) => Radius::AtLeast(x * s),
            other => other,
        }
    }

    pub fn min(self, other: Radius) -> Radius {
        use Radius::*;
        match (self, other) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (Infinite, x) | (x, Infinite) => x,
            (Finite(a), Finite(b)) => Finite(a.min(b)),
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
            (Finite(a), AtLeast(b)) | (AtLeast(b), Finite(a)) => {
                if a <= b {
                    Finite(a)
                } else {
                    AtLeast(b)
                }
            }
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(x) => write!(f, "{x}"),
            Radius::Infinite => f.write_str("inf"),
            Radius::AtLeast(x) => write!(f, ">= {x}"),
            Radius::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    NumericEstimate,
    UserCertified,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::NumericEstimate => "numeric-estimate",
            Provenance::UserCertified => "user-certified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusEntry {
    pub radius: Radius,
    /// Sorted, without duplicates.
    pub provenance: Vec<Provenance>,
}

impl RadiusEntry {
    pub fn new(radius: Radius, provenance: Provenance) -> Self {
        RadiusEntry { radius, provenance: vec![provenance] }
    }

    pub fn provenance_label(&self) -> String {
        self.provenance.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("/")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiiReport {
    pub model: String,
    pub injectivity: RadiusEntry,
    pub conjugate: RadiusEntry,
    pub focal: RadiusEntry,
    pub loop_length: RadiusEntry,
    pub convexity: RadiusEntry,
}

impl RadiiReport {
    pub fn entries(&self) -> [(&'static str, &RadiusEntry); 5] {
        [
            ("injectivity", &self.injectivity),
            ("conjugate", &self.conjugate),
            ("focal", &self.focal),
            ("loop_length", &self.loop_length),
            ("convexity", &self.convexity),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiiOptions {
    pub directions: usize,
    pub base_points: usize,
    pub horizon: f64,
    pub certified_injectivity: Option<f64>,
    pub certified_loop_length: Option<f64>,
    pub exec: Execution,
}

impl Default for RadiiOptions {
    fn default() -> Self {
        RadiiOptions {
            directions: 64,
            base_points: 16,
            horizon: 12.0,
            certified_injectivity: None,
            certified_loop_length: None,
            exec: Execution::default(),
        }
    }
}

/// Unit directions at `x` spread evenly over a full turn in the plane of the
/// first two frame vectors.
fn directions_at(m: &ManifoldModel, x: &ManifoldPoint, count: usize) -> Result<Vec<TangentVector>> {
    if count == 0 {
        return Err(GeoError::Precondition("at least one direction is required".into()));
    }
    let seed = match m {
        ManifoldModel::Revolution(r) => r.heading_vector(x, 0.0),
        ManifoldModel::SpaceForm(s) => tangent_at(m, x, &s.base_direction().components)?,
    };
    let frame = m.frame(&seed)?;
    Ok((0..count)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / count as f64;
            frame[0].scaled(a.cos()).add_scaled(a.sin(), &frame[1])
        })
        .collect())
}

/// Tangent vector at `x` closest to the ambient vector `v`, falling back to
/// other axes when `v` is normal to the manifold at `x`.
fn tangent_at(m: &ManifoldModel, x: &ManifoldPoint, v: &[f64]) -> Result<TangentVector> {
    let ManifoldModel::SpaceForm(s) = m else {
        return Ok(TangentVector::new(x.clone(), v.to_vec()));
    };
    let n = s.coord_len();
    let candidates = std::iter::once(v.to_vec()).chain((0..n).map(|i| {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    }));
    for c in candidates {
        let t = s.project_tangent(&x.coords, &c);
        if s.inner(&t, &t) > 1e-6 {
            return Ok(TangentVector::new(x.clone(), t));
        }
    }
    Err(GeoError::Precondition("no tangent direction found".into()))
}

#[derive(Clone, Copy)]
enum JacobiEvent {
    Zero,
    Critical,
}

fn jacobi_radius(
    m: &ManifoldModel,
    x: &ManifoldPoint,
    directions: usize,
    horizon: f64,
    event: JacobiEvent,
    exec: Execution,
) -> Result<Radius> {
    if !(horizon > 0.0) {
        return Err(GeoError::Precondition("horizon must be positive".into()));
    }
    if m.dimension() != 2 && m.constant_curvature().is_none() {
        return Err(GeoError::UnsupportedModel);
    }
    if let Some(k) = m.constant_curvature() {
        // comparison with sn_k: j > 0 and j' > 0 for all t > 0 when k <= 0
        if k <= 0.0 {
            return Ok(Radius::Infinite);
        }
    }
    let dirs = directions_at(m, x, directions)?;
    let step = default_jacobi_step(m);
    let found = map_indexed(exec, dirs.len(), |i| -> Result<Option<f64>> {
        let g = GeodesicSegment::unsampled(&dirs[i], horizon);
        let sol = integrate_jacobi_with_step(m, &g, step)?;
        Ok(match event {
            JacobiEvent::Zero => sol.first_zero(),
            JacobiEvent::Critical => sol.first_critical(),
        })
    });
    let mut best = Radius::AtLeast(horizon);
    for f in found {
        if let Some(t) = f? {
            best = best.min(Radius::Finite(t));
        }
    }
    Ok(best)
}

/// Minimum over sampled directions at `x` of the first positive zero of the
/// normal Jacobi field with `j(0) = 0`, `j'(0) = 1`.
pub fn conjugate_radius(m: &ManifoldModel, x: &ManifoldPoint, directions: usize, horizon: f64) -> Result<Radius> {
    jacobi_radius(m, x, directions, horizon, JacobiEvent::Zero, Execution::default())
}

/// Minimum over sampled directions at `x` of the first positive zero of `j'`.
pub fn focal_radius(m: &ManifoldModel, x: &ManifoldPoint, directions: usize, horizon: f64) -> Result<Radius> {
    jacobi_radius(m, x, directions, horizon, JacobiEvent::Critical, Execution::default())
}

/// `min{focal, injectivity / 2}`; provenance is the union of both inputs.
pub fn convexity_radius(focal: &RadiusEntry, injectivity: Option<&RadiusEntry>) -> Result<RadiusEntry> {
    let inj = injectivity.ok_or(GeoError::MissingCertifiedInjectivity)?;
    let mut provenance: Vec<Provenance> = focal.provenance.iter().chain(&inj.provenance).copied().collect();
    provenance.sort();
    provenance.dedup();
    Ok(RadiusEntry { radius: focal.radius.min(inj.radius.scaled(0.5)), provenance })
}

/// Exact radii of a space form; `None` for numeric models.
pub fn closed_form_radii(m: &ManifoldModel) -> Option<RadiiReport> {
    let ManifoldModel::SpaceForm(s) = m else { return None };
    let cf = |r| RadiusEntry::new(r, Provenance::ClosedForm);
    let (inj, conj, foc, loop_len) = match s.kind() {
        ModelKind::Sphere => {
            let a = s.scale();
            (Radius::Finite(PI * a), Radius::Finite(PI * a), Radius::Finite(PI * a / 2.0), Radius::Finite(2.0 * PI * a))
        }
        _ => (Radius::Infinite, Radius::Infinite, Radius::Infinite, Radius::Infinite),
    };
    let focal = cf(foc);
    let injectivity = cf(inj);
    let convexity = convexity_radius(&focal, Some(&injectivity)).ok()?;
    Some(RadiiReport {
        model: m.describe(),
        injectivity,
        conjugate: cf(conj),
        focal,
        loop_length: cf(loop_len),
        convexity,
    })
}

/// Points at which numeric radii are sampled. Surfaces of revolution are
/// invariant under rotation, so only the profile parameter varies.
pub fn radii_base_points(m: &ManifoldModel, count: usize) -> Vec<ManifoldPoint> {
    match m {
        ManifoldModel::SpaceForm(_) => vec![m.base_point()],
        ManifoldModel::Revolution(r) => {
            let count = count.max(1);
            let (lo, hi) = r.profile().domain();
            let us: Vec<f64> = if lo.is_finite() && hi.is_finite() {
                (0..count).map(|k| lo + (k as f64 + 0.5) * (hi - lo) / count as f64).collect()
            } else if let Some(p) = r.profile().period() {
                (0..count).map(|k| k as f64 * p / count as f64).collect()
            } else {
                vec![r.base_point().coords[0]]
            };
            us.into_iter().map(|u| ManifoldPoint::new(vec![u, 0.0])).collect()
        }
    }
}

/// Radii from Jacobi integration over sampled base points and directions.
/// Injectivity comes from the closed form for space forms and from the
/// certified value otherwise; the loop length likewise.
pub fn numeric_radii(m: &ManifoldModel, opts: &RadiiOptions) -> Result<RadiiReport> {
    let points = radii_base_points(m, opts.base_points);
    let mut conj = Radius::Infinite;
    let mut foc = Radius::Infinite;
    for x in &points {
        conj = conj.min(jacobi_radius(m, x, opts.directions, opts.horizon, JacobiEvent::Zero, opts.exec)?);
        foc = foc.min(jacobi_radius(m, x, opts.directions, opts.horizon, JacobiEvent::Critical, opts.exec)?);
    }
    let closed = closed_form_radii(m);
    let injectivity = match (opts.certified_injectivity, &closed) {
        (Some(v), _) => Some(RadiusEntry::new(Radius::Finite(v), Provenance::UserCertified)),
        (None, Some(c)) => Some(c.injectivity.clone()),
        (None, None) => None,
    };
    let loop_length = match (opts.certified_loop_length, &closed) {
        (Some(v), _) => RadiusEntry::new(Radius::Finite(v), Provenance::UserCertified),
        (None, Some(c)) => c.loop_length.clone(),
        (None, None) => RadiusEntry::new(Radius::Unknown, Provenance::UserCertified),
    };
    let focal = RadiusEntry::new(foc, Provenance::NumericEstimate);
    let convexity = convexity_radius(&focal, injectivity.as_ref())?;
    Ok(RadiiReport {
        model: m.describe(),
        injectivity: injectivity.expect("checked by convexity_radius"),
        conjugate: RadiusEntry::new(conj, Provenance::NumericEstimate),
        focal,
        loop_length,
        convexity,
    })
}

/// Closed forms where available, numeric estimates otherwise.
pub fn radii_report(m: &ManifoldModel, opts: &RadiiOptions) -> Result<RadiiReport> {
    match closed_form_radii(m) {
        Some(r) => Ok(r),
        None => numeric_radii(m, opts),
    }
}

/// Residuals of the radius identities; `None` where an identity cannot be
/// evaluated because an input is unknown or only bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// `|Conv - min{Foc, Inj/2}|`.
    pub convexity: Option<f64>,
    /// `|Inj/2 - min{Conj/2, L/4}|`, when all terms are finite.
    pub injectivity: Option<f64>,
    /// `Conj/2 - Foc`, expected non-negative.
    pub focal_margin: Option<f64>,
}

fn gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

impl IdentityCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.convexity.is_none_or(|r| r <= tol)
            && self.injectivity.is_none_or(|r| r <= tol)
            && self.focal_margin.is_none_or(|m| m >= -tol)
    }
}

pub fn check_identities(r: &RadiiReport) -> IdentityCheck {
    let exact = |e: &RadiusEntry| e.radius.is_exact().then(|| e.radius.value());
    let (inj, conj, foc, ll, conv) =
        (exact(&r.injectivity), exact(&r.conjugate), exact(&r.focal), exact(&r.loop_length), exact(&r.convexity));
    let convexity = match (conv, foc, inj) {
        (Some(c), Some(f), Some(i)) => Some(gap(c, f.min(i / 2.0))),
        _ => None,
    };
    let injectivity = match (inj, conj, ll) {
        (Some(i), Some(c), Some(l)) if i.is_finite() && c.is_finite() && l.is_finite() => {
            Some(gap(i / 2.0, (c / 2.0).min(l / 4.0)))
        }
        _ => None,
    };
    let focal_margin = match (foc, conj) {
        (Some(f), Some(c)) if f.is_infinite() && c.is_infinite() => Some(0.0),
        (Some(f), Some(c)) => Some(c / 2.0 - f),
        _ => None,
    };
    IdentityCheck { convexity, injectivity, focal_margin }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_min_respects_lower_bounds() {
        assert_eq!(Radius::Finite(1.0).min(Radius::AtLeast(2.0)), Radius::Finite(1.0));
        assert_eq!(Radius::Finite(3.0).min(Radius::AtLeast(2.0)), Radius::AtLeast(2.0));
        assert_eq!(Radius::Infinite.min(Radius::AtLeast(2.0)), Radius::AtLeast(2.0));
        assert_eq!(Radius::Infinite.min(Radius::Infinite), Radius::Infinite);
    }

    #[test]
    fn unit_sphere_closed_form() {
        let m = ManifoldModel::sphere(2, 1.0).unwrap();
        let r = closed_form_radii(&m).unwrap();
        assert_eq!(r.convexity.radius, Radius::Finite(PI / 2.0));
        assert!(check_identities(&r).holds(1e-12));
    }

    #[test]
    fn euclidean_radii_are_infinite() {
        let m = ManifoldModel::euclidean(3).unwrap();
        let r = closed_form_radii(&m).unwrap();
        for (_, e) in r.entries() {
            assert_eq!(e.radius, Radius::Infinite);
        }
        assert_eq!(conjugate_radius(&m, &m.base_point(), 8, 12.0).unwrap(), Radius::Infinite);
        assert_eq!(focal_radius(&m, &m.base_point(), 8, 12.0).unwrap(), Radius::Infinite);
    }

    #[test]
    fn missing_injectivity_is_reported() {
        let f = RadiusEntry::new(Radius::Finite(1.0), Provenance::NumericEstimate);
        assert_eq!(convexity_radius(&f, None), Err(GeoError::MissingCertifiedInjectivity));
    }

    #[test]
    fn numeric_sphere_radii() {
        let m = ManifoldModel::sphere(2, 1.0).unwrap();
        let x = m.base_point();
        assert!((conjugate_radius(&m, &x, 8, 12.0).unwrap().value() - PI).abs() < 1e-6);
        assert!((focal_radius(&m, &x, 8, 12.0).unwrap().value() - PI / 2.0).abs() < 1e-6);
    }
}
