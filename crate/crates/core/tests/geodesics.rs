use std::f64::consts::PI;

use geolens::geodesic::{first_variation_check, integrate_geodesic, integrate_jacobi, GeodesicSegment, SampledCurve};
use geolens::manifold::{Profile, RevolutionSettings, RevolutionSurface};
use geolens::{ManifoldModel, ManifoldPoint, TangentVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn endpoint_error(m: &ManifoldModel, step: f64) -> f64 {
    let v = m.base_direction();
    let g = integrate_geodesic(m, &v.base, &v, 2.0, step).unwrap();
    let exact = m.geodesic_state(&v.base, &v.components, 2.0).unwrap().0;
    let last = &g.samples.last().unwrap().point;
    last.coords.iter().zip(&exact.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[test]
fn halving_the_step_shrinks_the_error_at_fourth_order() {
    let m = ManifoldModel::sphere(2, 1.0).unwrap();
    let coarse = endpoint_error(&m, 0.01);
    let fine = endpoint_error(&m, 0.005);
    assert!(coarse > 1e-14, "{coarse:e}");
    assert!(coarse / fine >= 8.0, "{coarse:e} / {fine:e}");
}

fn wavy() -> ManifoldModel {
    let s =
        RevolutionSurface::new(Profile::harmonic(1.0, 0.2, 1.0, 0.0).unwrap(), RevolutionSettings::default()).unwrap();
    ManifoldModel::revolution(s)
}

#[test]
fn equator_jacobi_field_matches_constant_curvature() {
    // f = 1 + 0.2 cos u has f' = 0 on u = 0, so the parallel there is a
    // geodesic with K = 0.2 / 1.2 along it.
    let m = wavy();
    let ManifoldModel::Revolution(s) = &m else { unreachable!() };
    let p = s.base_point();
    let v = s.heading_vector(&p, PI / 2.0);
    let g = GeodesicSegment::new(&m, &v, 3.0).unwrap();
    let sol = integrate_jacobi(&m, &g).unwrap();
    let k: f64 = 0.2 / 1.2;
    let worst = sol.t.iter().zip(&sol.j).map(|(t, j)| (j - (k.sqrt() * t).sin() / k.sqrt()).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst:e}");
    assert!(sol.curvature.iter().all(|c| (c - k).abs() < 1e-9));
}

#[test]
fn meridian_jacobi_field_solves_the_jacobi_equation() {
    let m = wavy();
    let g = GeodesicSegment::new(&m, &m.base_direction(), 4.0).unwrap();
    let sol = integrate_jacobi(&m, &g).unwrap();
    assert!(sol.residual() < 1e-3, "{:e}", sol.residual());
    assert_eq!(sol.j[0], 0.0);
}

#[test]
fn first_variation_on_random_sphere_families() {
    let m = ManifoldModel::sphere(2, 1.0).unwrap();
    let frame = m.frame(&m.base_direction()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let field = |s: f64| frame[0].scaled(c[0] + s * c[2]).add_scaled(c[1] + s * c[3], &frame[1]);
        let err = first_variation_check(&m, field, 1e-4).unwrap();
        assert!(err < 1e-5, "{err:e}");
    }
}

#[test]
fn reparameterisation_keeps_length_and_raises_energy() {
    let m = ManifoldModel::sphere(2, 1.0).unwrap();
    let v = m.base_direction();
    let point = |s: f64| -> geolens::Result<(ManifoldPoint, Vec<f64>)> { m.geodesic_state(&v.base, &v.components, s) };
    let uniform =
        SampledCurve::from_fn(0.0, 1.0, 400, |t| point(2.0 * t).map(|(p, d)| (p, d.iter().map(|x| 2.0 * x).collect())))
            .unwrap();
    let warped = SampledCurve::from_fn(0.0, 1.0, 400, |t| {
        point(2.0 * t * t).map(|(p, d)| (p, d.iter().map(|x| 4.0 * t * x).collect()))
    })
    .unwrap();
    let (lu, lw) = (uniform.length(&m).unwrap(), warped.length(&m).unwrap());
    assert!((lu - 2.0).abs() < 1e-9 && (lw - 2.0).abs() < 1e-6, "{lu} {lw}");
    let (eu, ew) = (uniform.energy(&m).unwrap(), warped.energy(&m).unwrap());
    assert!((eu - 4.0).abs() < 1e-9);
    // E >= L^2 on [0, 1] with equality only at constant speed
    assert!(ew > eu + 1.0, "{ew}");
}

#[test]
fn hyperbolic_geodesic_distance_is_arc_length() {
    let m = ManifoldModel::hyperbolic(3, -1.0).unwrap();
    let g = GeodesicSegment::new(&m, &m.base_direction(), 5.0).unwrap();
    for t in [0.5, 2.0, 4.5] {
        let a = g.point_at(&m, t).unwrap();
        let d = m.distance(&g.base, &a).unwrap();
        assert!((d - t).abs() < 1e-9, "{d} vs {t}");
    }
    let z: TangentVector = g.velocity_at(&m, 3.0).unwrap();
    assert!((m.norm(&z) - 1.0).abs() < 1e-9);
}
