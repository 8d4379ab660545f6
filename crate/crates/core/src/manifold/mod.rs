//! Model manifolds: flat, round and hyperbolic space forms in any dimension
//! (closed-form geometry) and two-dimensional surfaces of revolution
//! (numeric geodesics).

mod profile;
mod revolution;
mod space_form;

pub use profile::{Profile, ProfileKind, ProfileSample, ProfileValue};
pub(crate) use revolution::wrap_angle;
pub use revolution::{RevolutionSettings, RevolutionSurface};
pub use space_form::SpaceForm;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Default tolerance for on-manifold and tangency constraints.
pub const ON_MANIFOLD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldPoint {
    pub coords: Vec<f64>,
}

impl ManifoldPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        ManifoldPoint { coords }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: ManifoldPoint,
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: ManifoldPoint, components: Vec<f64>) -> Self {
        TangentVector { base, components }
    }

    pub fn zero(base: ManifoldPoint) -> Self {
        let n = base.coords.len();
        TangentVector { base, components: vec![0.0; n] }
    }

    pub fn scaled(&self, s: f64) -> TangentVector {
        TangentVector { base: self.base.clone(), components: self.components.iter().map(|c| c * s).collect() }
    }

    /// `self + s * other`; both vectors must share a base point.
    pub fn add_scaled(&self, s: f64, other: &TangentVector) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + s * b).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Euclidean,
    Sphere,
    Hyperbolic,
    SurfaceOfRevolution,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::Euclidean => "euclidean",
            ModelKind::Sphere => "sphere",
            ModelKind::Hyperbolic => "hyperbolic",
            ModelKind::SurfaceOfRevolution => "surface-of-revolution",
        };
        f.write_str(s)
    }
}

/// A complete Riemannian model manifold.
#[derive(Debug, Clone)]
pub enum ManifoldModel {
    SpaceForm(SpaceForm),
    Revolution(RevolutionSurface),
}

impl ManifoldModel {
    pub fn euclidean(dim: usize) -> Result<Self> {
        Ok(ManifoldModel::SpaceForm(SpaceForm::new(dim, 0.0)?))
    }

    /// Round sphere of constant curvature `k > 0` (radius `1/sqrt(k)`).
    pub fn sphere(dim: usize, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(GeoError::InvalidModel(format!("sphere curvature must be positive, got {k}")));
        }
        Ok(ManifoldModel::SpaceForm(SpaceForm::new(dim, k)?))
    }

    pub fn hyperbolic(dim: usize, k: f64) -> Result<Self> {
        if !(k < 0.0) {
            return Err(GeoError::InvalidModel(format!("hyperbolic curvature must be negative, got {k}")));
        }
        Ok(ManifoldModel::SpaceForm(SpaceForm::new(dim, k)?))
    }

    pub fn revolution(surface: RevolutionSurface) -> Self {
        ManifoldModel::Revolution(surface)
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ManifoldModel::SpaceForm(s) => s.kind(),
            ManifoldModel::Revolution(_) => ModelKind::SurfaceOfRevolution,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ManifoldModel::SpaceForm(s) => s.dim(),
            ManifoldModel::Revolution(_) => 2,
        }
    }

    /// Sectional curvature when it is constant.
    pub fn constant_curvature(&self) -> Option<f64> {
        match self {
            ManifoldModel::SpaceForm(s) => Some(s.curvature()),
            ManifoldModel::Revolution(_) => None,
        }
    }

    /// Length of the coordinate vector used for points and tangent vectors.
    pub fn coord_len(&self) -> usize {
        match self {
            ManifoldModel::SpaceForm(s) => s.coord_len(),
            ManifoldModel::Revolution(_) => 2,
        }
    }

    pub fn base_point(&self) -> ManifoldPoint {
        match self {
            ManifoldModel::SpaceForm(s) => s.base_point(),
            ManifoldModel::Revolution(r) => r.base_point(),
        }
    }

    /// Unit tangent vector at the base point used as the default geodesic heading.
    pub fn base_direction(&self) -> TangentVector {
        match self {
            ManifoldModel::SpaceForm(s) => s.base_direction(),
            ManifoldModel::Revolution(r) => r.heading_vector(&r.base_point(), 0.0),
        }
    }

    pub fn check_point(&self, p: &ManifoldPoint) -> Result<()> {
        if p.coords.len() != self.coord_len() {
            return Err(GeoError::DimensionMismatch { expected: self.coord_len(), got: p.coords.len() });
        }
        match self {
            ManifoldModel::SpaceForm(s) => s.check_point(p),
            ManifoldModel::Revolution(r) => r.check_point(p),
        }
    }

    pub fn check_tangent(&self, v: &TangentVector) -> Result<()> {
        self.check_point(&v.base)?;
        if v.components.len() != self.coord_len() {
            return Err(GeoError::DimensionMismatch { expected: self.coord_len(), got: v.components.len() });
        }
        match self {
            ManifoldModel::SpaceForm(s) => s.check_tangent(v),
            ManifoldModel::Revolution(_) => Ok(()),
        }
    }

    /// Riemannian inner product `g_p(a, b)`.
    pub fn metric_inner(&self, a: &TangentVector, b: &TangentVector) -> Result<f64> {
        if !same_point(&a.base, &b.base) {
            return Err(GeoError::BaseMismatch);
        }
        self.check_point(&a.base)?;
        Ok(self.inner_unchecked(&a.base, &a.components, &b.components))
    }

    pub(crate) fn inner_unchecked(&self, p: &ManifoldPoint, a: &[f64], b: &[f64]) -> f64 {
        match self {
            ManifoldModel::SpaceForm(s) => s.inner(a, b),
            ManifoldModel::Revolution(r) => r.inner(p, a, b),
        }
    }

    pub fn norm(&self, v: &TangentVector) -> f64 {
        self.inner_unchecked(&v.base, &v.components, &v.components).max(0.0).sqrt()
    }

    pub fn normalized(&self, v: &TangentVector) -> Result<TangentVector> {
        let n = self.norm(v);
        if !(n > 0.0) {
            return Err(GeoError::Precondition("cannot normalize a zero vector".into()));
        }
        Ok(v.scaled(1.0 / n))
    }

    pub fn exp_map(&self, v: &TangentVector) -> Result<ManifoldPoint> {
        let len = self.norm(v);
        if len == 0.0 {
            return Ok(v.base.clone());
        }
        let unit: Vec<f64> = v.components.iter().map(|c| c / len).collect();
        Ok(self.geodesic_state(&v.base, &unit, len)?.0)
    }

    /// Point and velocity at arclength `s` along the unit-speed geodesic from
    /// `p` with initial direction `unit`; `s` may be negative.
    pub fn geodesic_state(&self, p: &ManifoldPoint, unit: &[f64], s: f64) -> Result<(ManifoldPoint, Vec<f64>)> {
        match self {
            ManifoldModel::SpaceForm(f) => Ok(f.geodesic_state(p, unit, s)),
            ManifoldModel::Revolution(r) => r.geodesic_state(p, unit, s),
        }
    }

    pub fn log_map(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<TangentVector> {
        match self {
            ManifoldModel::SpaceForm(s) => s.log_map(p, q),
            ManifoldModel::Revolution(r) => r.log_map(p, q),
        }
    }

    pub fn distance(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<f64> {
        match self {
            ManifoldModel::SpaceForm(s) => Ok(s.distance(p, q)),
            ManifoldModel::Revolution(r) => {
                let v = r.log_map(p, q)?;
                Ok(self.norm(&v))
            }
        }
    }

    /// A cheap quantity that is strictly increasing in `distance(p, q)`.
    /// Used by brute-force scans that only need to compare distances.
    pub fn distance_key(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<f64> {
        match self {
            ManifoldModel::SpaceForm(s) => Ok(s.distance_key(p, q)),
            ManifoldModel::Revolution(_) => self.distance(p, q),
        }
    }

    /// Orthonormal frame at `first.base` whose first vector is `first` normalized.
    pub fn frame(&self, first: &TangentVector) -> Result<Vec<TangentVector>> {
        let e0 = self.normalized(first)?;
        match self {
            ManifoldModel::SpaceForm(s) => Ok(s.frame(e0)),
            ManifoldModel::Revolution(r) => Ok(r.frame(e0)),
        }
    }

    /// Gaussian (sectional) curvature at `p` for 2D or constant-curvature models.
    pub fn gauss_curvature(&self, p: &ManifoldPoint) -> Result<f64> {
        match self {
            ManifoldModel::SpaceForm(s) => Ok(s.curvature()),
            ManifoldModel::Revolution(r) => r.gauss_curvature(p.coords[0]),
        }
    }

    /// Upper bound on any distance in the manifold (infinite unless compact).
    pub fn diameter_bound(&self) -> f64 {
        match self {
            ManifoldModel::SpaceForm(s) => s.diameter_bound(),
            ManifoldModel::Revolution(_) => f64::INFINITY,
        }
    }

    /// Absolute accuracy of `distance`; exact formulas report round-off scale.
    pub fn distance_accuracy(&self) -> f64 {
        match self {
            ManifoldModel::SpaceForm(_) => 1e-13,
            ManifoldModel::Revolution(r) => r.settings().bvp_tol,
        }
    }

    /// Lipschitz bound for `exp_center` restricted to the tangent ball of radius `rho`.
    pub fn exp_lipschitz(&self, center: &ManifoldPoint, rho: f64) -> Result<f64> {
        match self {
            ManifoldModel::SpaceForm(s) => Ok(s.exp_lipschitz(rho)),
            ManifoldModel::Revolution(r) => Ok(r.jacobi_bounds(center, rho)?.0),
        }
    }

    /// Bound on the length of the image of a unit angular arc on the
    /// geodesic sphere of radius `rho` about `center`.
    pub fn sphere_arc_factor(&self, center: &ManifoldPoint, rho: f64) -> Result<f64> {
        match self {
            ManifoldModel::SpaceForm(s) => Ok(s.sn(rho)),
            ManifoldModel::Revolution(r) => Ok(r.jacobi_bounds(center, rho)?.1),
        }
    }

    /// Short human-readable descriptor.
    pub fn describe(&self) -> String {
        match self {
            ManifoldModel::SpaceForm(s) => {
                format!("{}(dim={}, curvature={})", s.kind(), s.dim(), s.curvature())
            }
            ManifoldModel::Revolution(r) => format!("surface-of-revolution({})", r.profile().describe()),
        }
    }
}

fn same_point(a: &ManifoldPoint, b: &ManifoldPoint) -> bool {
    a.coords.len() == b.coords.len()
        && a.coords.iter().zip(&b.coords).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs())))
}
