use std::f64::consts::PI;

use super::{ManifoldPoint, Profile, TangentVector, ON_MANIFOLD_TOL};
use crate::error::{GeoError, Result};
use crate::ode::{step_count, Rk4};

/// Numeric settings for geodesic integration and shooting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevolutionSettings {
    /// Maximum RK4 step along geodesics.
    pub step: f64,
    /// Required accuracy of boundary-value (log map) solutions.
    pub bvp_tol: f64,
    pub max_newton: usize,
    /// Longest geodesic the integrator will follow.
    pub horizon: f64,
}

impl Default for RevolutionSettings {
    fn default() -> Self {
        RevolutionSettings { step: 5e-3, bvp_tol: 1e-8, max_newton: 40, horizon: 50.0 }
    }
}

/// Surface with metric `du^2 + f(u)^2 dv^2`, `v` an angle mod `2 pi`.
/// Points are `(u, v)`; tangent vectors hold coordinate components `(du, dv)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionSurface {
    profile: Profile,
    settings: RevolutionSettings,
    base_u: f64,
    tol: f64,
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    a - 2.0 * PI * (a / (2.0 * PI)).round()
}

impl RevolutionSurface {
    pub fn new(profile: Profile, settings: RevolutionSettings) -> Result<Self> {
        let (lo, hi) = profile.domain();
        let base_u = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 1.0,
            (false, true) => hi - 1.0,
            (false, false) => 0.0,
        };
        if !(settings.step > 0.0) || !(settings.bvp_tol > 0.0) {
            return Err(GeoError::InvalidModel("integration step and tolerance must be positive".into()));
        }
        Ok(RevolutionSurface { profile, settings, base_u, tol: ON_MANIFOLD_TOL })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_base_u(mut self, u: f64) -> Result<Self> {
        self.profile.eval(u)?;
        self.base_u = u;
        Ok(self)
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn settings(&self) -> &RevolutionSettings {
        &self.settings
    }

    pub fn base_point(&self) -> ManifoldPoint {
        ManifoldPoint::new(vec![self.base_u, 0.0])
    }

    /// Unit vector at `p` making angle `heading` with `d/du`.
    pub fn heading_vector(&self, p: &ManifoldPoint, heading: f64) -> TangentVector {
        let f = self.f(p.coords[0]).unwrap_or(1.0);
        TangentVector::new(p.clone(), vec![heading.cos(), heading.sin() / f])
    }

    fn f(&self, u: f64) -> Result<f64> {
        Ok(self.profile.eval(u)?.f)
    }

    pub fn check_point(&self, p: &ManifoldPoint) -> Result<()> {
        if p.coords.iter().any(|c| !c.is_finite()) {
            return Err(GeoError::OffManifold { residual: f64::INFINITY });
        }
        let (lo, hi) = self.profile.domain();
        let u = p.coords[0];
        if u < lo - self.tol || u > hi + self.tol {
            return Err(GeoError::OffManifold { residual: (lo - u).max(u - hi) });
        }
        Ok(())
    }

    pub fn inner(&self, p: &ManifoldPoint, a: &[f64], b: &[f64]) -> f64 {
        let f = self.f(p.coords[0]).unwrap_or(f64::NAN);
        a[0] * b[0] + f * f * a[1] * b[1]
    }

    pub fn gauss_curvature(&self, u: f64) -> Result<f64> {
        let v = self.profile.eval(u)?;
        Ok(-v.d2f / v.f)
    }

    fn geodesic_rhs(&self, y: &[f64], d: &mut [f64]) -> Result<()> {
        let pv = self.profile.eval(y[0]).map_err(|_| GeoError::ChartExit { u: y[0] })?;
        d[0] = y[2];
        d[1] = y[3];
        d[2] = pv.f * pv.df * y[3] * y[3];
        d[3] = -2.0 * pv.df / pv.f * y[2] * y[3];
        Ok(())
    }

    /// Integrates the geodesic equations for arclength `s` with `steps`
    /// equal steps, calling `visit` after every step.
    pub(crate) fn integrate<V>(
        &self,
        p: &ManifoldPoint,
        unit: &[f64],
        s: f64,
        steps: usize,
        mut visit: V,
    ) -> Result<[f64; 4]>
    where
        V: FnMut(usize, &[f64]),
    {
        if s.abs() > self.settings.horizon {
            return Err(GeoError::HorizonExceeded { length: s.abs(), horizon: self.settings.horizon });
        }
        let mut y = [p.coords[0], p.coords[1], unit[0], unit[1]];
        let h = s / steps as f64;
        let mut rk = Rk4::new(4);
        let mut rhs = |a: &[f64], b: &mut [f64]| self.geodesic_rhs(a, b);
        for k in 0..steps {
            rk.step(&mut y, h, &mut rhs)?;
            visit(k + 1, &y);
        }
        Ok(y)
    }

    pub fn geodesic_state(&self, p: &ManifoldPoint, unit: &[f64], s: f64) -> Result<(ManifoldPoint, Vec<f64>)> {
        if s == 0.0 {
            return Ok((p.clone(), unit.to_vec()));
        }
        let y = self.integrate(p, unit, s, step_count(s, self.settings.step), |_, _| {})?;
        Ok((ManifoldPoint::new(vec![y[0], wrap_angle(y[1])]), vec![y[2], y[3]]))
    }

    fn endpoint(&self, p: &ManifoldPoint, w: &[f64; 2]) -> Result<(f64, f64)> {
        let len = self.inner(p, w, w).max(0.0).sqrt();
        if len == 0.0 {
            return Ok((p.coords[0], p.coords[1]));
        }
        let unit = [w[0] / len, w[1] / len];
        let y = self.integrate(p, &unit, len, step_count(len, self.settings.step), |_, _| {})?;
        Ok((y[0], y[1]))
    }

    /// Inverse of the exponential map by Newton shooting on the initial
    /// velocity, with a forward-difference Jacobian and backtracking.
    pub fn log_map(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<TangentVector> {
        self.check_point(p)?;
        self.check_point(q)?;
        let (uq, vq) = (q.coords[0], q.coords[1]);
        let fq = self.f(uq)?;
        let residual = |w: &[f64; 2]| -> Result<[f64; 2]> {
            let (u, v) = self.endpoint(p, w)?;
            Ok([u - uq, fq * wrap_angle(v - vq)])
        };
        let norm = |r: &[f64; 2]| r[0].hypot(r[1]);

        let mut w = [uq - p.coords[0], wrap_angle(vq - p.coords[1])];
        if w[0] == 0.0 && w[1] == 0.0 {
            return Ok(TangentVector::zero(p.clone()));
        }
        let mut r = residual(&w)?;
        let mut res = norm(&r);
        let target = 1e-3 * self.settings.bvp_tol;
        let mut iterations = 0;
        while res > target && iterations < self.settings.max_newton {
            iterations += 1;
            let scale = (w[0].abs() + w[1].abs()).max(1e-3);
            let eps = 1e-7 * scale;
            let mut jac = [[0.0; 2]; 2];
            for c in 0..2 {
                let mut wp = w;
                wp[c] += eps;
                let rp = residual(&wp)?;
                jac[0][c] = (rp[0] - r[0]) / eps;
                jac[1][c] = (rp[1] - r[1]) / eps;
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let dw = [-(jac[1][1] * r[0] - jac[0][1] * r[1]) / det, -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det];
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial = [w[0] + lambda * dw[0], w[1] + lambda * dw[1]];
                if let Ok(rt) = residual(&trial) {
                    let rn = norm(&rt);
                    if rn < res {
                        w = trial;
                        r = rt;
                        res = rn;
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if res > self.settings.bvp_tol {
            return Err(GeoError::ShootingFailed { iterations, residual: res });
        }
        Ok(TangentVector::new(p.clone(), w.to_vec()))
    }

    pub fn frame(&self, e0: TangentVector) -> Vec<TangentVector> {
        let f = self.f(e0.base.coords[0]).unwrap_or(1.0);
        let (a, b) = (e0.components[0], e0.components[1] * f);
        let rot = TangentVector::new(e0.base.clone(), vec![-b, a / f]);
        vec![e0, rot]
    }

    /// Integrates `j'' + K(c(t)) j = 0`, `j(0) = 0`, `j'(0) = 1` together with
    /// the geodesic, reporting `(t, j, j', K)` at every step.
    pub(crate) fn jacobi_along<V>(
        &self,
        p: &ManifoldPoint,
        unit: &[f64],
        length: f64,
        step: f64,
        mut visit: V,
    ) -> Result<()>
    where
        V: FnMut(f64, f64, f64, f64),
    {
        if length > self.settings.horizon {
            return Err(GeoError::HorizonExceeded { length, horizon: self.settings.horizon });
        }
        let n = step_count(length, step);
        let h = length / n as f64;
        let mut y = [p.coords[0], p.coords[1], unit[0], unit[1], 0.0, 1.0];
        let mut rk = Rk4::new(6);
        let mut rhs = |a: &[f64], d: &mut [f64]| -> Result<()> {
            self.geodesic_rhs(&a[..4], &mut d[..4])?;
            let pv = self.profile.eval(a[0]).map_err(|_| GeoError::ChartExit { u: a[0] })?;
            d[4] = a[5];
            d[5] = pv.d2f / pv.f * a[4];
            Ok(())
        };
        visit(0.0, 0.0, 1.0, self.gauss_curvature(p.coords[0])?);
        for k in 0..n {
            rk.step(&mut y, h, &mut rhs)?;
            let k_here = self.gauss_curvature(y[0]).map_err(|_| GeoError::ChartExit { u: y[0] })?;
            visit((k + 1) as f64 * h, y[4], y[5], k_here);
        }
        Ok(())
    }

    /// `(exp Lipschitz bound, sphere arc factor)` for radius `rho` about
    /// `center`, from Jacobi fields in 16 directions with a 5% margin.
    pub(crate) fn jacobi_bounds(&self, center: &ManifoldPoint, rho: f64) -> Result<(f64, f64)> {
        if rho <= 0.0 {
            return Ok((1.0, 0.0));
        }
        let mut lip: f64 = 1.0;
        let mut arc: f64 = 0.0;
        let step = (rho / 64.0).min(self.settings.step * 4.0);
        for k in 0..16 {
            let dir = self.heading_vector(center, 2.0 * PI * k as f64 / 16.0);
            let mut last = 0.0;
            self.jacobi_along(center, &dir.components, rho, step, |t, j, _, _| {
                if t > 0.0 {
                    lip = lip.max(j.abs() / t);
                }
                last = j.abs();
            })?;
            arc = arc.max(last);
        }
        Ok((lip * 1.05, arc * 1.05))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ManifoldModel;

    fn torus() -> ManifoldModel {
        let profile = Profile::harmonic(2.0, 1.0, 1.0, 0.0).unwrap();
        ManifoldModel::revolution(RevolutionSurface::new(profile, RevolutionSettings::default()).unwrap())
    }

    #[test]
    fn metric_at_outer_equator() {
        let m = torus();
        let p = ManifoldPoint::new(vec![0.0, 0.0]);
        let dv = TangentVector::new(p, vec![0.0, 1.0]);
        assert!((m.metric_inner(&dv, &dv).unwrap() - 9.0).abs() < 1e-15);
    }

    #[test]
    fn outer_equator_is_a_geodesic() {
        let m = torus();
        let p = ManifoldPoint::new(vec![0.0, 0.0]);
        let (q, _) = m.geodesic_state(&p, &[0.0, 1.0 / 3.0], 1.5).unwrap();
        assert!(q.coords[0].abs() < 1e-14);
        assert!((q.coords[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn log_inverts_exp_near_base() {
        let m = torus();
        let p = ManifoldPoint::new(vec![0.3, 0.1]);
        let v = TangentVector::new(p.clone(), vec![0.4, -0.2]);
        let q = m.exp_map(&v).unwrap();
        let back = m.log_map(&p, &q).unwrap();
        assert!((back.components[0] - 0.4).abs() < 1e-8);
        assert!((back.components[1] + 0.2).abs() < 1e-8);
    }

    #[test]
    fn chart_exit_is_reported() {
        let profile = Profile::harmonic_on(2.0, 1.0, 1.0, 0.0, -0.5, 0.5).unwrap();
        let m = ManifoldModel::revolution(RevolutionSurface::new(profile, RevolutionSettings::default()).unwrap());
        let p = ManifoldPoint::new(vec![0.0, 0.0]);
        assert!(matches!(m.geodesic_state(&p, &[1.0, 0.0], 1.0), Err(GeoError::ChartExit { .. })));
    }

    #[test]
    fn horizon_is_enforced() {
        let m = torus();
        let p = ManifoldPoint::new(vec![0.0, 0.0]);
        assert!(matches!(m.geodesic_state(&p, &[0.0, 1.0 / 3.0], 100.0), Err(GeoError::HorizonExceeded { .. })));
    }
}
