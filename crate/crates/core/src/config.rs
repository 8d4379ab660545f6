//! Run configuration, read from and written back to TOML.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::exec::Execution;
use crate::lens::{LensOptions, SamplingPlan};
use crate::manifold::{
    ManifoldModel, ModelKind, Profile, ProfileSample, RevolutionSettings, RevolutionSurface, SpaceForm, TangentVector,
};
use crate::radii::{radii_report, RadiiOptions, Radius};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    /// `offset + amplitude * cos(frequency * u + phase)`.
    Harmonic {
        offset: f64,
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u_min: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u_max: Option<f64>,
    },
    /// Rows `[u, f, f', f'']`.
    Table { rows: Vec<[f64; 4]> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManifoldConfig {
    pub kind: ModelKind,
    pub dimension: usize,
    /// Defaults to 1 for spheres and -1 for hyperbolic space.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_injectivity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_loop_length: Option<f64>,
}

impl Default for ManifoldConfig {
    fn default() -> Self {
        ManifoldConfig {
            kind: ModelKind::Euclidean,
            dimension: 2,
            curvature: None,
            profile: None,
            base_u: None,
            certified_injectivity: None,
            certified_loop_length: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicConfig {
    /// Angle of the initial direction from the model's default direction.
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LensConfig {
    #[serde(rename = "R")]
    pub big: f64,
    #[serde(rename = "r")]
    pub small: f64,
    /// `[R, r]` pairs checked by `verify`; defaults to the single pair above.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[f64; 2]>>,
    pub grid: usize,
    pub budget: usize,
    pub seed: u64,
    /// Bisection target for T and S relative to `R + r`.
    pub refine: f64,
}

impl Default for LensConfig {
    fn default() -> Self {
        LensConfig { big: 2.0, small: 1.0, pairs: None, grid: 200, budget: 4096, seed: 42, refine: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub on_manifold: f64,
    pub bvp: f64,
    pub membership: f64,
    pub nesting: f64,
    pub full_width: f64,
    /// RK4 step for numeric geodesics.
    pub step: f64,
    /// Search horizon for conjugate and focal points.
    pub horizon: f64,
    /// Longest geodesic integrated on numeric models.
    pub geodesic_horizon: f64,
    pub max_newton: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            on_manifold: 1e-10,
            bvp: 1e-8,
            membership: 1e-10,
            nesting: 1e-9,
            full_width: 1e-8,
            step: 5e-3,
            horizon: 12.0,
            geodesic_horizon: 50.0,
            max_newton: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiiConfig {
    pub directions: usize,
    pub base_points: usize,
}

impl Default for RadiiConfig {
    fn default() -> Self {
        RadiiConfig { directions: 64, base_points: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Random grid pairs for the diameter/Hausdorff modulus.
    pub continuity_pairs: usize,
    /// Grid points approached from each side for one-sided continuity.
    pub continuity_points: usize,
    pub nesting_pairs: usize,
    pub nesting_margin: f64,
    /// Sampling budget for clouds compared by Hausdorff distance.
    pub hausdorff_budget: usize,
    pub geodesic_pairs: usize,
    /// `[R, r]` pairs at or beyond the convexity radius of the sphere.
    pub counterexample_radii: Vec<[f64; 2]>,
    pub counterexample_grid: usize,
    pub counterexample_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            continuity_pairs: 50,
            continuity_points: 10,
            nesting_pairs: 20,
            nesting_margin: 1e-6,
            hausdorff_budget: 1024,
            geodesic_pairs: 10,
            counterexample_radii: vec![[FRAC_PI_2, FRAC_PI_2], [2.0, 1.8]],
            counterexample_grid: 9,
            counterexample_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub manifold: ManifoldConfig,
    pub geodesic: GeodesicConfig,
    pub lens: LensConfig,
    pub tolerances: ToleranceConfig,
    pub radii: RadiiConfig,
    pub suite: SuiteConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(GeoError::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| GeoError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| GeoError::Config(e.to_string()))
    }

    /// Checks value ranges; geometric preconditions are checked when the
    /// pairs are built.
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, x) in [
            ("tolerances.on_manifold", t.on_manifold),
            ("tolerances.bvp", t.bvp),
            ("tolerances.membership", t.membership),
            ("tolerances.nesting", t.nesting),
            ("tolerances.full_width", t.full_width),
            ("tolerances.step", t.step),
            ("tolerances.horizon", t.horizon),
            ("tolerances.geodesic_horizon", t.geodesic_horizon),
            ("lens.refine", self.lens.refine),
            ("suite.nesting_margin", self.suite.nesting_margin),
            ("suite.counterexample_tol", self.suite.counterexample_tol),
        ] {
            positive(name, x)?;
        }
        for [big, small] in self.pairs() {
            positive("R", big)?;
            positive("r", small)?;
        }
        if self.lens.grid < 2 {
            return Err(GeoError::Config("lens.grid must be at least 2".into()));
        }
        if self.lens.budget == 0 || self.suite.hausdorff_budget == 0 {
            return Err(GeoError::Config("sampling budgets must be at least 1".into()));
        }
        if self.radii.directions == 0 || self.radii.base_points == 0 {
            return Err(GeoError::Config("radii.directions and radii.base_points must be at least 1".into()));
        }
        if self.suite.counterexample_grid < 2 {
            return Err(GeoError::Config("suite.counterexample_grid must be at least 2".into()));
        }
        if i64::try_from(self.lens.seed).is_err() {
            return Err(GeoError::Config("lens.seed must fit in a signed 64-bit integer".into()));
        }
        Ok(())
    }

    pub fn pairs(&self) -> Vec<[f64; 2]> {
        self.lens.pairs.clone().unwrap_or_else(|| vec![[self.lens.big, self.lens.small]])
    }

    pub fn model(&self) -> Result<ManifoldModel> {
        let c = &self.manifold;
        let tol = self.tolerances.on_manifold;
        let curvature = |default: f64| c.curvature.unwrap_or(default);
        let space_form = |k: f64| -> Result<ManifoldModel> {
            Ok(ManifoldModel::SpaceForm(SpaceForm::new(c.dimension, k)?.with_tolerance(tol)))
        };
        let m = match c.kind {
            ModelKind::Euclidean => {
                if c.curvature.is_some_and(|k| k != 0.0) {
                    return Err(GeoError::Config("euclidean space has curvature 0".into()));
                }
                space_form(0.0)?
            }
            ModelKind::Sphere => {
                ManifoldModel::sphere(c.dimension, curvature(1.0))?;
                space_form(curvature(1.0))?
            }
            ModelKind::Hyperbolic => {
                ManifoldModel::hyperbolic(c.dimension, curvature(-1.0))?;
                space_form(curvature(-1.0))?
            }
            ModelKind::SurfaceOfRevolution => {
                if c.dimension != 2 {
                    return Err(GeoError::Config("surfaces of revolution are two-dimensional".into()));
                }
                let profile = match &c.profile {
                    None => return Err(GeoError::Config("surface of revolution needs [manifold.profile]".into())),
                    Some(ProfileConfig::Harmonic { offset, amplitude, frequency, phase, u_min, u_max }) => {
                        Profile::harmonic_on(
                            *offset,
                            *amplitude,
                            *frequency,
                            *phase,
                            u_min.unwrap_or(f64::NEG_INFINITY),
                            u_max.unwrap_or(f64::INFINITY),
                        )?
                    }
                    Some(ProfileConfig::Table { rows }) => Profile::table(
                        rows.iter().map(|r| ProfileSample { u: r[0], f: r[1], df: r[2], d2f: r[3] }).collect(),
                    )?,
                };
                let settings = RevolutionSettings {
                    step: self.tolerances.step,
                    bvp_tol: self.tolerances.bvp,
                    max_newton: self.tolerances.max_newton,
                    horizon: self.tolerances.geodesic_horizon,
                };
                let mut s = RevolutionSurface::new(profile, settings)?.with_tolerance(tol);
                if let Some(u) = c.base_u {
                    s = s.with_base_u(u)?;
                }
                ManifoldModel::revolution(s)
            }
        };
        Ok(m)
    }

    /// Unit initial direction of the separating geodesic.
    pub fn direction(&self, m: &ManifoldModel) -> Result<TangentVector> {
        let frame = m.frame(&m.base_direction())?;
        let a = self.geodesic.heading;
        Ok(frame[0].scaled(a.cos()).add_scaled(a.sin(), &frame[1]))
    }

    pub fn radii_options(&self, exec: Execution) -> RadiiOptions {
        RadiiOptions {
            directions: self.radii.directions,
            base_points: self.radii.base_points,
            horizon: self.tolerances.horizon,
            certified_injectivity: self.manifold.certified_injectivity,
            certified_loop_length: self.manifold.certified_loop_length,
            exec,
        }
    }

    pub fn convexity(&self, m: &ManifoldModel, exec: Execution) -> Result<Radius> {
        Ok(radii_report(m, &self.radii_options(exec))?.convexity.radius)
    }

    pub fn lens_options(&self, exec: Execution) -> LensOptions {
        LensOptions {
            membership_tol: self.tolerances.membership,
            nesting_tol: self.tolerances.nesting,
            full_width_tol: self.tolerances.full_width,
            refine: self.lens.refine,
            exec,
            ..LensOptions::default()
        }
    }

    pub fn plan(&self, m: &ManifoldModel, small: f64) -> Result<SamplingPlan> {
        SamplingPlan::from_budget(m, small, self.lens.budget, self.lens.seed)
    }
}
