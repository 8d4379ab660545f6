//! Geodesic integration, energy and length of sampled curves, the first
//! variation formula and scalar Jacobi fields.

use crate::error::{GeoError, Result};
use crate::manifold::{ManifoldModel, ManifoldPoint, TangentVector};
use crate::ode::{hermite_root, step_count, Rk4};

/// Tolerance on the Richardson error estimate of an integrated geodesic,
/// per unit length.
pub const GEODESIC_TOL: f64 = 1e-9;

/// Unit-speed tolerance for initial directions.
pub const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: ManifoldPoint,
    pub velocity: Vec<f64>,
}

/// Arclength-parameterized geodesic `c(t) = exp_base(t * direction)`, `t` in `[0, length]`.
///
/// Space forms evaluate `c` in closed form and keep no samples. Numeric
/// models store the integrated trajectory at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment {
    pub base: ManifoldPoint,
    pub direction: TangentVector,
    pub length: f64,
    pub step: f64,
    pub samples: Vec<GeodesicSample>,
    /// Richardson estimate of the endpoint error (0 for closed forms).
    pub error_estimate: f64,
}

fn check_unit(m: &ManifoldModel, v: &TangentVector) -> Result<()> {
    m.check_tangent(v)?;
    let n = m.norm(v);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(GeoError::Precondition(format!("direction must have unit length, got {n}")));
    }
    Ok(())
}

impl GeodesicSegment {
    /// Segment in the representation best suited to the model: closed form
    /// for space forms, integrated with the model's step otherwise.
    pub fn new(m: &ManifoldModel, direction: &TangentVector, length: f64) -> Result<Self> {
        match m {
            ManifoldModel::SpaceForm(_) => {
                check_unit(m, direction)?;
                if !(length >= 0.0) {
                    return Err(GeoError::Precondition("length must be non-negative".into()));
                }
                Ok(GeodesicSegment {
                    base: direction.base.clone(),
                    direction: direction.clone(),
                    length,
                    step: length,
                    samples: Vec::new(),
                    error_estimate: 0.0,
                })
            }
            ManifoldModel::Revolution(r) => {
                integrate_geodesic(m, &direction.base, direction, length, r.settings().step)
            }
        }
    }

    /// Segment description without integrating it; consumers that
    /// integrate their own augmented system only need the initial data.
    pub(crate) fn unsampled(direction: &TangentVector, length: f64) -> Self {
        GeodesicSegment {
            base: direction.base.clone(),
            direction: direction.clone(),
            length,
            step: length,
            samples: Vec::new(),
            error_estimate: 0.0,
        }
    }

    pub fn is_sampled(&self) -> bool {
        !self.samples.is_empty()
    }

    /// Point and velocity at parameter `t` (any real `t`; values outside
    /// `[0, length]` extend the geodesic).
    pub fn state_at(&self, m: &ManifoldModel, t: f64) -> Result<(ManifoldPoint, Vec<f64>)> {
        if self.samples.len() < 2 || t < 0.0 || t > self.length {
            return m.geodesic_state(&self.base, &self.direction.components, t);
        }
        let h = self.samples[1].t;
        let k = ((t / h).floor() as usize).min(self.samples.len() - 1);
        let s = &self.samples[k];
        m.geodesic_state(&s.point, &s.velocity, t - s.t)
    }

    pub fn point_at(&self, m: &ManifoldModel, t: f64) -> Result<ManifoldPoint> {
        Ok(self.state_at(m, t)?.0)
    }

    pub fn velocity_at(&self, m: &ManifoldModel, t: f64) -> Result<TangentVector> {
        let (p, v) = self.state_at(m, t)?;
        Ok(TangentVector::new(p, v))
    }

    /// Samples as a curve; closed-form segments are evaluated at `n + 1`
    /// equally spaced parameters.
    pub fn to_curve(&self, m: &ManifoldModel, n: usize) -> Result<SampledCurve> {
        if self.is_sampled() {
            return Ok(SampledCurve {
                t: self.samples.iter().map(|s| s.t).collect(),
                points: self.samples.iter().map(|s| s.point.clone()).collect(),
                velocities: self.samples.iter().map(|s| s.velocity.clone()).collect(),
            });
        }
        let n = n.max(1);
        let mut curve = SampledCurve::default();
        for i in 0..=n {
            let t = self.length * i as f64 / n as f64;
            let (p, v) = self.state_at(m, t)?;
            curve.t.push(t);
            curve.points.push(p);
            curve.velocities.push(v);
        }
        Ok(curve)
    }
}

/// Second-order geodesic equation of a space form in ambient coordinates:
/// `x'' = -k <x', x'> x`.
fn ambient_rhs(k: f64, dim: usize, y: &[f64], d: &mut [f64]) {
    let (x, v) = y.split_at(dim);
    let mut q: f64 = v.iter().map(|c| c * c).sum();
    if k < 0.0 {
        q -= 2.0 * v[0] * v[0];
    }
    for i in 0..dim {
        d[i] = v[i];
        d[dim + i] = -k * q * x[i];
    }
}

/// Integrates `c'' = 0` (covariantly) from `start` with unit initial
/// velocity `v` using fixed-step RK4, sampling every step.
///
/// The endpoint is recomputed with twice the step; if the Richardson
/// estimate exceeds `GEODESIC_TOL * max(1, length)` the step is rejected.
pub fn integrate_geodesic(
    m: &ManifoldModel,
    start: &ManifoldPoint,
    v: &TangentVector,
    length: f64,
    step: f64,
) -> Result<GeodesicSegment> {
    if !(step > 0.0) {
        return Err(GeoError::Precondition("step must be positive".into()));
    }
    if !(length >= 0.0) {
        return Err(GeoError::Precondition("length must be non-negative".into()));
    }
    if v.base != *start {
        return Err(GeoError::BaseMismatch);
    }
    check_unit(m, v)?;
    let n = step_count(length, step).max(2);
    let n = n + n % 2;
    let h = length / n as f64;

    let run = |steps: usize, keep: bool| -> Result<(Vec<f64>, Vec<GeodesicSample>)> {
        let hh = length / steps as f64;
        let mut samples = Vec::new();
        if keep {
            samples.push(GeodesicSample { t: 0.0, point: start.clone(), velocity: v.components.clone() });
        }
        match m {
            ManifoldModel::SpaceForm(s) => {
                let dim = s.coord_len();
                let k = s.curvature();
                let mut y: Vec<f64> = start.coords.iter().chain(&v.components).copied().collect();
                let mut rk = Rk4::new(2 * dim);
                let mut rhs = |a: &[f64], d: &mut [f64]| -> Result<()> {
                    ambient_rhs(k, dim, a, d);
                    Ok(())
                };
                for i in 0..steps {
                    rk.step(&mut y, hh, &mut rhs)?;
                    if keep {
                        samples.push(GeodesicSample {
                            t: (i + 1) as f64 * hh,
                            point: ManifoldPoint::new(y[..dim].to_vec()),
                            velocity: y[dim..].to_vec(),
                        });
                    }
                }
                Ok((y, samples))
            }
            ManifoldModel::Revolution(r) => {
                let y = r.integrate(start, &v.components, length, steps, |i, y| {
                    if keep {
                        samples.push(GeodesicSample {
                            t: i as f64 * hh,
                            point: ManifoldPoint::new(vec![y[0], y[1]]),
                            velocity: vec![y[2], y[3]],
                        });
                    }
                })?;
                Ok((y.to_vec(), samples))
            }
        }
    };

    let (fine, samples) = run(n, true)?;
    let (coarse, _) = run(n / 2, false)?;
    let estimate = fine.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / 15.0;
    let tolerance = GEODESIC_TOL * length.max(1.0);
    if estimate > tolerance {
        return Err(GeoError::StepTooCoarse { step: h, estimate, tolerance });
    }
    Ok(GeodesicSegment {
        base: start.clone(),
        direction: v.clone(),
        length,
        step: h,
        samples,
        error_estimate: estimate,
    })
}

/// A curve given by parameters, points and coordinate velocities.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampledCurve {
    pub t: Vec<f64>,
    pub points: Vec<ManifoldPoint>,
    pub velocities: Vec<Vec<f64>>,
}

impl SampledCurve {
    /// Samples `f` at `n + 1` equally spaced parameters in `[a, b]`.
    pub fn from_fn<F>(a: f64, b: f64, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<(ManifoldPoint, Vec<f64>)>,
    {
        let n = n.max(1);
        let mut c = SampledCurve::default();
        for i in 0..=n {
            let t = a + (b - a) * i as f64 / n as f64;
            let (p, v) = f(t)?;
            c.t.push(t);
            c.points.push(p);
            c.velocities.push(v);
        }
        Ok(c)
    }

    fn integrate<G: Fn(f64) -> f64>(&self, m: &ManifoldModel, g: G) -> Result<f64> {
        if self.t.len() < 2 {
            return Err(GeoError::EmptyCurve);
        }
        let vals: Vec<f64> =
            self.points.iter().zip(&self.velocities).map(|(p, v)| g(m.inner_unchecked(p, v, v).max(0.0))).collect();
        let n = self.t.len() - 1;
        let h0 = self.t[1] - self.t[0];
        let uniform = self.t.windows(2).all(|w| ((w[1] - w[0]) - h0).abs() <= 1e-12 * h0.abs().max(1.0));
        if uniform && n.is_multiple_of(2) {
            let mut s = vals[0] + vals[n];
            for (i, v) in vals.iter().enumerate().take(n).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            return Ok(s * h0 / 3.0);
        }
        Ok(self.t.windows(2).zip(vals.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum())
    }

    /// `E(c) = integral of g(c', c')`.
    pub fn energy(&self, m: &ManifoldModel) -> Result<f64> {
        self.integrate(m, |q| q)
    }

    /// `L(c) = integral of |c'|`.
    pub fn length(&self, m: &ManifoldModel) -> Result<f64> {
        self.integrate(m, f64::sqrt)
    }

    pub fn parameter_span(&self) -> f64 {
        match (self.t.first(), self.t.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Largest deviation of the sampled speed from its mean.
    pub fn speed_variation(&self, m: &ManifoldModel) -> f64 {
        let speeds: Vec<f64> =
            self.points.iter().zip(&self.velocities).map(|(p, v)| m.inner_unchecked(p, v, v).max(0.0).sqrt()).collect();
        if speeds.is_empty() {
            return 0.0;
        }
        let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
        speeds.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max)
    }
}

/// Coordinate difference `b - a`, with angular coordinates of surfaces of
/// revolution wrapped to `(-pi, pi]`.
fn coord_difference(m: &ManifoldModel, a: &ManifoldPoint, b: &ManifoldPoint) -> Vec<f64> {
    let mut d: Vec<f64> = b.coords.iter().zip(&a.coords).map(|(x, y)| x - y).collect();
    if let ManifoldModel::Revolution(_) = m {
        d[1] = crate::manifold::wrap_angle(d[1]);
    }
    d
}

/// Energy of `t -> exp_p(t w)` on `[0, 1]` by quadrature over an integrated geodesic.
fn family_energy(m: &ManifoldModel, w: &TangentVector, step: f64) -> Result<f64> {
    let len = m.norm(w);
    if len == 0.0 {
        return Ok(0.0);
    }
    let unit = w.scaled(1.0 / len);
    let seg = integrate_geodesic(m, &w.base, &unit, len, step)?;
    let mut curve = seg.to_curve(m, 64)?;
    // reparameterize arclength onto [0, 1]
    for (t, v) in curve.t.iter_mut().zip(curve.velocities.iter_mut()) {
        *t /= len;
        v.iter_mut().for_each(|c| *c *= len);
    }
    curve.energy(m)
}

/// Mismatch between a central finite difference of `s -> E(c_s)` at `s = 0`
/// and `2 g(sigma'(0), c'(1))`, where `c_s(t) = exp_p(t V(s))` on `[0, 1]`
/// and `sigma(s) = c_s(1)`.
pub fn first_variation_check<V>(m: &ManifoldModel, field: V, ds: f64) -> Result<f64>
where
    V: Fn(f64) -> TangentVector,
{
    if !(ds > 0.0) {
        return Err(GeoError::Precondition("finite-difference step must be positive".into()));
    }
    let step = match m {
        ManifoldModel::Revolution(r) => r.settings().step,
        ManifoldModel::SpaceForm(_) => 1e-2,
    };
    let (vp, v0, vm) = (field(ds), field(0.0), field(-ds));
    let de = (family_energy(m, &vp, step)? - family_energy(m, &vm, step)?) / (2.0 * ds);

    let sp = m.exp_map(&vp)?;
    let sm = m.exp_map(&vm)?;
    let sigma_dot: Vec<f64> = coord_difference(m, &sm, &sp).iter().map(|c| c / (2.0 * ds)).collect();
    let len = m.norm(&v0);
    if len == 0.0 {
        return Ok(de.abs());
    }
    let unit: Vec<f64> = v0.components.iter().map(|c| c / len).collect();
    let (end, vel) = m.geodesic_state(&v0.base, &unit, len)?;
    let c_dot: Vec<f64> = vel.iter().map(|c| c * len).collect();
    let formula = 2.0 * m.inner_unchecked(&end, &sigma_dot, &c_dot);
    Ok((de - formula).abs())
}

/// Normal Jacobi field `j` along a geodesic, tabulated with its derivative
/// and the curvature seen along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSolution {
    pub geodesic: GeodesicSegment,
    pub t: Vec<f64>,
    pub j: Vec<f64>,
    pub dj: Vec<f64>,
    pub curvature: Vec<f64>,
}

impl JacobiSolution {
    /// First `t > 0` where `j` vanishes.
    pub fn first_zero(&self) -> Option<f64> {
        self.first_sign_change(&self.j, |i| self.dj[i])
    }

    /// First `t > 0` where `j'` vanishes, i.e. where `|J|` is critical.
    pub fn first_critical(&self) -> Option<f64> {
        self.first_sign_change(&self.dj, |i| -self.curvature[i] * self.j[i])
    }

    fn first_sign_change<D: Fn(usize) -> f64>(&self, y: &[f64], dy: D) -> Option<f64> {
        for i in 1..y.len() {
            if y[i] == 0.0 {
                return Some(self.t[i]);
            }
            if y[i - 1] != 0.0 && y[i - 1].signum() != y[i].signum() {
                return Some(hermite_root(self.t[i - 1], y[i - 1], dy(i - 1), self.t[i], y[i], dy(i)));
            }
        }
        None
    }

    /// Largest `|j'' + K j|` with `j''` from central differences of `j'`.
    pub fn residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..self.t.len().saturating_sub(1) {
            let d2 = (self.dj[i + 1] - self.dj[i - 1]) / (self.t[i + 1] - self.t[i - 1]);
            worst = worst.max((d2 + self.curvature[i] * self.j[i]).abs());
        }
        worst
    }
}

/// Solves `j'' + K(c(t)) j = 0`, `j(0) = 0`, `j'(0) = 1` along `g`.
pub fn integrate_jacobi(m: &ManifoldModel, g: &GeodesicSegment) -> Result<JacobiSolution> {
    integrate_jacobi_with_step(m, g, default_jacobi_step(m))
}

pub(crate) fn default_jacobi_step(m: &ManifoldModel) -> f64 {
    match m {
        ManifoldModel::Revolution(r) => r.settings().step,
        ManifoldModel::SpaceForm(_) => 1e-3,
    }
}

pub fn integrate_jacobi_with_step(m: &ManifoldModel, g: &GeodesicSegment, step: f64) -> Result<JacobiSolution> {
    if !(step > 0.0) {
        return Err(GeoError::Precondition("step must be positive".into()));
    }
    let mut sol =
        JacobiSolution { geodesic: g.clone(), t: Vec::new(), j: Vec::new(), dj: Vec::new(), curvature: Vec::new() };
    match m {
        ManifoldModel::SpaceForm(s) => {
            let k = s.curvature();
            let n = step_count(g.length, step);
            let h = g.length / n as f64;
            let mut y = [0.0, 1.0];
            let mut rk = Rk4::new(2);
            let mut rhs = |a: &[f64], d: &mut [f64]| -> Result<()> {
                d[0] = a[1];
                d[1] = -k * a[0];
                Ok(())
            };
            sol.push(0.0, 0.0, 1.0, k);
            for i in 0..n {
                rk.step(&mut y, h, &mut rhs)?;
                sol.push((i + 1) as f64 * h, y[0], y[1], k);
            }
        }
        ManifoldModel::Revolution(r) => {
            r.jacobi_along(&g.base, &g.direction.components, g.length, step, |t, j, dj, k| sol.push(t, j, dj, k))?;
        }
    }
    Ok(sol)
}

impl JacobiSolution {
    fn push(&mut self, t: f64, j: f64, dj: f64, k: f64) {
        self.t.push(t);
        self.j.push(j);
        self.dj.push(dj);
        self.curvature.push(k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{Profile, RevolutionSettings, RevolutionSurface};
    use std::f64::consts::PI;

    fn torus() -> ManifoldModel {
        let p = Profile::harmonic(2.0, 1.0, 1.0, 0.0).unwrap();
        ManifoldModel::revolution(RevolutionSurface::new(p, RevolutionSettings::default()).unwrap())
    }

    #[test]
    fn euclidean_geodesic_is_a_straight_line() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let o = ManifoldPoint::new(vec![1.0, 2.0]);
        let v = TangentVector::new(o.clone(), vec![0.6, 0.8]);
        let g = integrate_geodesic(&m, &o, &v, 5.0, 0.1).unwrap();
        for s in &g.samples {
            assert!((s.point.coords[0] - (1.0 + 0.6 * s.t)).abs() < 1e-13);
            assert!((s.point.coords[1] - (2.0 + 0.8 * s.t)).abs() < 1e-13);
        }
    }

    #[test]
    fn sphere_geodesic_matches_great_circle() {
        let m = ManifoldModel::sphere(2, 1.0).unwrap();
        let v = m.base_direction();
        let g = integrate_geodesic(&m, &v.base, &v, PI / 2.0, 5e-3).unwrap();
        let mut worst: f64 = 0.0;
        for s in &g.samples {
            let exact = [s.t.cos(), s.t.sin(), 0.0];
            for (a, b) in s.point.coords.iter().zip(exact) {
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst < 1e-9, "deviation {worst}");
    }

    #[test]
    fn clairaut_constant_is_conserved() {
        let m = torus();
        let p = ManifoldPoint::new(vec![0.2, 0.0]);
        let ManifoldModel::Revolution(r) = &m else { unreachable!() };
        let v = r.heading_vector(&p, 0.9);
        let g = integrate_geodesic(&m, &p, &v, 8.0, 5e-3).unwrap();
        let clairaut = |s: &GeodesicSample| {
            let f = r.profile().eval(s.point.coords[0]).unwrap().f;
            f * f * s.velocity[1]
        };
        let c0 = clairaut(&g.samples[0]);
        let drift = g.samples.iter().map(|s| (clairaut(s) - c0).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-9, "drift {drift}");
    }

    #[test]
    fn coarse_step_is_rejected() {
        let m = ManifoldModel::sphere(2, 1.0).unwrap();
        let v = m.base_direction();
        let e = integrate_geodesic(&m, &v.base, &v, 3.0, 0.5).unwrap_err();
        assert!(matches!(e, GeoError::StepTooCoarse { .. }));
    }

    #[test]
    fn non_unit_direction_is_rejected() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let o = m.base_point();
        let v = TangentVector::new(o.clone(), vec![2.0, 0.0]);
        assert!(integrate_geodesic(&m, &o, &v, 1.0, 0.1).is_err());
    }

    #[test]
    fn energy_and_length_of_segment() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let c =
            SampledCurve::from_fn(0.0, 1.0, 10, |t| Ok((ManifoldPoint::new(vec![3.0 * t, 4.0 * t]), vec![3.0, 4.0])))
                .unwrap();
        assert!((c.energy(&m).unwrap() - 25.0).abs() < 1e-12);
        assert!((c.length(&m).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn constant_curve_has_zero_energy() {
        let m = ManifoldModel::euclidean(3).unwrap();
        let c = SampledCurve::from_fn(0.0, 2.0, 4, |_| Ok((ManifoldPoint::new(vec![1.0; 3]), vec![0.0; 3]))).unwrap();
        assert_eq!(c.energy(&m).unwrap(), 0.0);
        assert_eq!(c.length(&m).unwrap(), 0.0);
    }

    #[test]
    fn single_sample_curve_is_an_error() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let c = SampledCurve::from_fn(0.0, 0.0, 0, |_| Ok((ManifoldPoint::new(vec![0.0; 2]), vec![0.0; 2]))).unwrap();
        assert!(c.t.len() == 2);
        let empty = SampledCurve::default();
        assert_eq!(empty.energy(&m), Err(GeoError::EmptyCurve));
    }

    #[test]
    fn first_variation_for_stretched_euclidean_family() {
        let m = ManifoldModel::euclidean(2).unwrap();
        let o = m.base_point();
        let err = first_variation_check(&m, |s| TangentVector::new(o.clone(), vec![1.0 + s, 0.0]), 1e-4).unwrap();
        assert!(err < 1e-8, "{err}");
        let err = first_variation_check(&m, |_| TangentVector::new(o.clone(), vec![0.3, 0.1]), 1e-4).unwrap();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    #[allow(clippy::type_complexity)]
    fn jacobi_fields_in_constant_curvature() {
        let cases: [(ManifoldModel, f64, fn(f64) -> f64); 3] = [
            (ManifoldModel::euclidean(2).unwrap(), 4.0, |t| t),
            (ManifoldModel::sphere(2, 1.0).unwrap(), PI, f64::sin),
            (ManifoldModel::hyperbolic(2, -1.0).unwrap(), 3.0, f64::sinh),
        ];
        for (m, len, exact) in cases {
            let g = GeodesicSegment::new(&m, &m.base_direction(), len).unwrap();
            let sol = integrate_jacobi(&m, &g).unwrap();
            let err = sol.t.iter().zip(&sol.j).map(|(t, j)| (j - exact(*t)).abs()).fold(0.0, f64::max);
            assert!(err < 1e-9, "{} error {err}", m.describe());
            assert!(sol.residual() < 1e-5);
        }
    }

    #[test]
    fn sphere_jacobi_zero_and_critical_point() {
        let m = ManifoldModel::sphere(2, 1.0).unwrap();
        let g = GeodesicSegment::new(&m, &m.base_direction(), 4.0).unwrap();
        let sol = integrate_jacobi(&m, &g).unwrap();
        assert!((sol.first_zero().unwrap() - PI).abs() < 1e-9);
        assert!((sol.first_critical().unwrap() - PI / 2.0).abs() < 1e-9);
    }
}
