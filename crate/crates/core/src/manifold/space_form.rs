use std::f64::consts::PI;

use super::{ManifoldPoint, ModelKind, TangentVector, ON_MANIFOLD_TOL};
use crate::error::{GeoError, Result};

/// Simply connected space of constant curvature `k`.
///
/// Flat space uses Cartesian coordinates in `R^n`. The sphere of curvature
/// `k > 0` is the set `|x| = a` in `R^{n+1}` with `a = 1/sqrt(k)`; hyperbolic
/// space of curvature `k < 0` is the upper sheet `<x, x>_L = -a^2`, `x_0 > 0`
/// of the hyperboloid in Minkowski space, `<x, y>_L = -x_0 y_0 + sum x_i y_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceForm {
    dim: usize,
    curvature: f64,
    scale: f64,
    tol: f64,
}

impl SpaceForm {
    pub fn new(dim: usize, curvature: f64) -> Result<Self> {
        if dim < 2 {
            return Err(GeoError::InvalidModel(format!("dimension must be at least 2, got {dim}")));
        }
        if !curvature.is_finite() {
            return Err(GeoError::InvalidModel("curvature must be finite".into()));
        }
        let scale = if curvature == 0.0 { 1.0 } else { 1.0 / curvature.abs().sqrt() };
        Ok(SpaceForm { dim, curvature, scale, tol: ON_MANIFOLD_TOL })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn curvature(&self) -> f64 {
        self.curvature
    }

    /// Curvature radius `1/sqrt(|k|)` (1 for flat space).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn kind(&self) -> ModelKind {
        if self.curvature > 0.0 {
            ModelKind::Sphere
        } else if self.curvature < 0.0 {
            ModelKind::Hyperbolic
        } else {
            ModelKind::Euclidean
        }
    }

    pub fn coord_len(&self) -> usize {
        if self.curvature == 0.0 {
            self.dim
        } else {
            self.dim + 1
        }
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let s: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        if self.curvature < 0.0 {
            s - 2.0 * a[0] * b[0]
        } else {
            s
        }
    }

    pub fn base_point(&self) -> ManifoldPoint {
        let mut c = vec![0.0; self.coord_len()];
        if self.curvature != 0.0 {
            c[0] = self.scale;
        }
        ManifoldPoint::new(c)
    }

    pub fn base_direction(&self) -> TangentVector {
        let mut c = vec![0.0; self.coord_len()];
        if self.curvature == 0.0 {
            c[0] = 1.0;
        } else {
            c[1] = 1.0;
        }
        TangentVector::new(self.base_point(), c)
    }

    pub fn check_point(&self, p: &ManifoldPoint) -> Result<()> {
        if p.coords.iter().any(|c| !c.is_finite()) {
            return Err(GeoError::OffManifold { residual: f64::INFINITY });
        }
        if self.curvature == 0.0 {
            return Ok(());
        }
        let a2 = self.scale * self.scale;
        let q = self.inner(&p.coords, &p.coords);
        let residual = if self.curvature > 0.0 { (q - a2).abs() / a2 } else { (q + a2).abs() / a2 };
        if residual > self.tol || (self.curvature < 0.0 && p.coords[0] <= 0.0) {
            return Err(GeoError::OffManifold { residual });
        }
        Ok(())
    }

    pub fn check_tangent(&self, v: &TangentVector) -> Result<()> {
        if self.curvature == 0.0 {
            return Ok(());
        }
        let x = &v.base.coords;
        let len = self.inner(&v.components, &v.components).abs().sqrt();
        let residual = self.inner(x, &v.components).abs() / (self.scale * (1.0 + len));
        if residual > self.tol {
            return Err(GeoError::NotTangent { residual });
        }
        Ok(())
    }

    /// Orthogonal projection of an ambient vector onto `T_p`.
    pub fn project_tangent(&self, p: &[f64], v: &[f64]) -> Vec<f64> {
        self.project(p, v)
    }

    fn project(&self, p: &[f64], v: &[f64]) -> Vec<f64> {
        if self.curvature == 0.0 {
            return v.to_vec();
        }
        let a2 = self.scale * self.scale;
        let c = self.inner(p, v) / a2;
        // sphere: v - <p,v>/a^2 p ; hyperboloid: v + <p,v>_L/a^2 p
        let sign = if self.curvature > 0.0 { -1.0 } else { 1.0 };
        v.iter().zip(p).map(|(vi, pi)| vi + sign * c * pi).collect()
    }

    pub fn geodesic_state(&self, p: &ManifoldPoint, unit: &[f64], s: f64) -> (ManifoldPoint, Vec<f64>) {
        let x = &p.coords;
        let a = self.scale;
        let (cp, sp, dcp, dsp) = if self.curvature > 0.0 {
            let th = s / a;
            (th.cos(), th.sin(), -th.sin() / a, th.cos() / a)
        } else if self.curvature < 0.0 {
            let th = s / a;
            (th.cosh(), th.sinh(), th.sinh() / a, th.cosh() / a)
        } else {
            let point = x.iter().zip(unit).map(|(xi, ui)| xi + s * ui).collect();
            return (ManifoldPoint::new(point), unit.to_vec());
        };
        // point = cp * x + a * sp * u ; velocity = dcp * x + a * dsp * u
        let point = x.iter().zip(unit).map(|(xi, ui)| cp * xi + a * sp * ui).collect();
        let vel = x.iter().zip(unit).map(|(xi, ui)| dcp * xi + a * dsp * ui).collect();
        (ManifoldPoint::new(point), vel)
    }

    pub fn log_map(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<TangentVector> {
        let x = &p.coords;
        let y = &q.coords;
        if self.curvature == 0.0 {
            let v = y.iter().zip(x).map(|(a, b)| a - b).collect();
            return Ok(TangentVector::new(p.clone(), v));
        }
        let d = self.distance(p, q);
        if d == 0.0 {
            return Ok(TangentVector::zero(p.clone()));
        }
        if self.curvature > 0.0 && d >= PI * self.scale * (1.0 - 1e-12) {
            return Err(GeoError::BeyondInjectivity { distance: d, bound: PI * self.scale });
        }
        let w = self.project(x, y);
        let wn = self.inner(&w, &w).max(0.0).sqrt();
        if !(wn > 0.0) {
            // points agree to round-off; fall back to the chord direction
            let chord: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
            let t = self.project(x, &chord);
            let tn = self.inner(&t, &t).max(0.0).sqrt();
            if tn == 0.0 {
                return Ok(TangentVector::zero(p.clone()));
            }
            return Ok(TangentVector::new(p.clone(), t.iter().map(|c| c * d / tn).collect()));
        }
        Ok(TangentVector::new(p.clone(), w.iter().map(|c| c * d / wn).collect()))
    }

    pub fn distance(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> f64 {
        let x = &p.coords;
        let y = &q.coords;
        let a = self.scale;
        if self.curvature > 0.0 {
            let mut dm = 0.0;
            let mut dp = 0.0;
            for (xi, yi) in x.iter().zip(y) {
                dm += (xi - yi) * (xi - yi);
                dp += (xi + yi) * (xi + yi);
            }
            2.0 * a * dm.sqrt().atan2(dp.sqrt())
        } else if self.curvature < 0.0 {
            2.0 * a * (self.distance_key(p, q).sqrt() / (2.0 * a)).asinh()
        } else {
            self.distance_key(p, q).sqrt()
        }
    }

    pub fn distance_key(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> f64 {
        let d: Vec<f64> = p.coords.iter().zip(&q.coords).map(|(a, b)| a - b).collect();
        self.inner(&d, &d).max(0.0)
    }

    pub fn frame(&self, e0: TangentVector) -> Vec<TangentVector> {
        let p = e0.base.clone();
        let mut frame = vec![e0];
        let n = self.coord_len();
        // prefer ambient axes orthogonal to the plane of the base geodesic so
        // frames along the default geodesic vary continuously
        for axis in (0..n).rev() {
            if frame.len() == self.dim {
                break;
            }
            let mut e = vec![0.0; n];
            e[axis] = 1.0;
            let mut v = self.project(&p.coords, &e);
            for f in &frame {
                let c = self.inner(&v, &f.components);
                for (vi, fi) in v.iter_mut().zip(&f.components) {
                    *vi -= c * fi;
                }
            }
            let norm = self.inner(&v, &v).max(0.0).sqrt();
            if norm > 1e-6 {
                frame.push(TangentVector::new(p.clone(), v.iter().map(|c| c / norm).collect()));
            }
        }
        frame
    }

    pub fn diameter_bound(&self) -> f64 {
        if self.curvature > 0.0 {
            PI * self.scale
        } else {
            f64::INFINITY
        }
    }

    /// `sn_k(rho)`: length factor of geodesic spheres, `|J(rho)|` for the
    /// normal Jacobi field with `J(0) = 0`, `|J'(0)| = 1`.
    pub fn sn(&self, rho: f64) -> f64 {
        let a = self.scale;
        if self.curvature > 0.0 {
            a * (rho / a).sin()
        } else if self.curvature < 0.0 {
            a * (rho / a).sinh()
        } else {
            rho
        }
    }

    pub fn exp_lipschitz(&self, rho: f64) -> f64 {
        if self.curvature < 0.0 && rho > 0.0 {
            self.sn(rho) / rho
        } else {
            1.0
        }
    }
}
