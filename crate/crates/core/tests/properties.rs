use geolens::sets::{diameter, diameter_lipschitz, directed_hausdorff, hausdorff, PointCloud};
use geolens::{ManifoldModel, ManifoldPoint, TangentVector};
use proptest::prelude::*;

fn plane() -> ManifoldModel {
    ManifoldModel::euclidean(2).unwrap()
}

fn cloud() -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..24).prop_map(|pts| {
        PointCloud::new(pts.into_iter().map(|(x, y)| ManifoldPoint::new(vec![x, y])).collect(), 0.0).unwrap()
    })
}

fn frame_vector(m: &ManifoldModel, a: f64, b: f64) -> TangentVector {
    let f = m.frame(&m.base_direction()).unwrap();
    f[0].scaled(a).add_scaled(b, &f[1])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_symmetric(y in cloud(), z in cloud()) {
        let m = plane();
        prop_assert_eq!(hausdorff(&m, &y, &z).unwrap(), hausdorff(&m, &z, &y).unwrap());
    }

    #[test]
    fn hausdorff_triangle_inequality(x in cloud(), y in cloud(), z in cloud()) {
        let m = plane();
        let lhs = hausdorff(&m, &x, &z).unwrap();
        let rhs = hausdorff(&m, &x, &y).unwrap() + hausdorff(&m, &y, &z).unwrap();
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn subset_has_zero_directed_distance(y in cloud(), z in cloud()) {
        let m = plane();
        prop_assert_eq!(directed_hausdorff(&m, &y, &y.union(&z)).unwrap(), 0.0);
    }

    #[test]
    fn union_diameter_dominates(y in cloud(), z in cloud()) {
        let m = plane();
        let u = diameter(&m, &y.union(&z)).unwrap().value;
        prop_assert!(u >= diameter(&m, &y).unwrap().value);
        prop_assert!(u >= diameter(&m, &z).unwrap().value);
    }

    #[test]
    fn diameter_moves_at_most_twice_the_hausdorff_distance(y in cloud(), z in cloud()) {
        let check = diameter_lipschitz(&plane(), &y, &z).unwrap();
        prop_assert!(check.holds(), "{:?}", check);
    }

    #[test]
    fn sphere_log_inverts_exp(a in -1.5..1.5f64, b in -1.5..1.5f64) {
        let m = ManifoldModel::sphere(2, 1.0).unwrap();
        let v = frame_vector(&m, a, b);
        let back = m.log_map(&v.base, &m.exp_map(&v).unwrap()).unwrap();
        for (x, y) in back.components.iter().zip(&v.components) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn hyperbolic_log_inverts_exp(a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let m = ManifoldModel::hyperbolic(2, -1.0).unwrap();
        let v = frame_vector(&m, a, b);
        let q = m.exp_map(&v).unwrap();
        prop_assert!(m.check_point(&q).is_ok());
        let back = m.log_map(&v.base, &q).unwrap();
        for (x, y) in back.components.iter().zip(&v.components) {
            prop_assert!((x - y).abs() < 1e-8);
        }
        prop_assert!((m.distance(&v.base, &q).unwrap() - m.norm(&v)).abs() < 1e-9);
    }

    #[test]
    fn sphere_distance_satisfies_triangle_inequality(c in prop::array::uniform6(-1.5..1.5f64)) {
        let m = ManifoldModel::sphere(2, 1.0).unwrap();
        let p: Vec<ManifoldPoint> = c.chunks(2).map(|w| m.exp_map(&frame_vector(&m, w[0], w[1])).unwrap()).collect();
        let d = |i: usize, j: usize| m.distance(&p[i], &p[j]).unwrap();
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
    }
}

#[test]
fn concentric_circles_are_one_apart() {
    let m = plane();
    let circle = |r: f64| {
        let pts = (0..360).map(|k| {
            let a = k as f64 * std::f64::consts::PI / 180.0;
            ManifoldPoint::new(vec![r * a.cos(), r * a.sin()])
        });
        PointCloud::new(pts.collect(), 0.0).unwrap()
    };
    assert!((hausdorff(&m, &circle(1.0), &circle(2.0)).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn closed_hemisphere_has_diameter_pi() {
    let m = ManifoldModel::sphere(2, 1.0).unwrap();
    let mut pts = Vec::new();
    for i in 0..=20 {
        let lat = i as f64 * std::f64::consts::FRAC_PI_2 / 20.0;
        for k in 0..72 {
            let lon = k as f64 * std::f64::consts::PI / 36.0;
            pts.push(ManifoldPoint::new(vec![lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]));
        }
    }
    let d = diameter(&m, &PointCloud::new(pts, 0.0).unwrap()).unwrap();
    assert!((d.value - std::f64::consts::PI).abs() < 1e-12);
}
