//! One test per acceptance criterion; each prints a single PASS/FAIL line.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use geolens::config::RunConfig;
use geolens::io::{cloud_csv, profile_csv};
use geolens::lens::{sample_intersection, uniform_grid, w_profile, BallPair, SamplingPlan, WProfile};
use geolens::radii::{check_identities, closed_form_radii, conjugate_radius, focal_radius, Radius};
use geolens::sets::hausdorff;
use geolens::suite::{run_counterexample, run_speculation_probe, ClaimStatus, PROBE_CONCAVITY, PROBE_S_EQUALS_T};
use geolens::{Execution, ManifoldModel, ModelKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Case {
    label: String,
    cfg: RunConfig,
    bp: BallPair,
    profile: WProfile,
}

impl Case {
    fn end(&self) -> f64 {
        self.bp.big_radius() + self.bp.small_radius()
    }

    /// Grid resolution used by the threshold statements.
    fn h(&self) -> f64 {
        1e-3 * self.end()
    }
}

fn config(kind: ModelKind, big: f64, small: f64) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.manifold.kind = kind;
    cfg.lens.big = big;
    cfg.lens.small = small;
    cfg
}

fn build(cfg: RunConfig, exec: Execution) -> Case {
    let m = cfg.model().unwrap();
    let (big, small) = (cfg.lens.big, cfg.lens.small);
    let bp = BallPair::new(&m, &cfg.direction(&m).unwrap(), big, small, cfg.convexity(&m, exec).unwrap())
        .unwrap()
        .with_membership_tol(cfg.tolerances.membership);
    let plan = cfg.plan(&m, small).unwrap();
    let profile = w_profile(&bp, &uniform_grid(big + small, cfg.lens.grid), &plan, &cfg.lens_options(exec)).unwrap();
    Case { label: format!("{} R={big} r={small}", m.kind()), cfg, bp, profile }
}

/// Every admissible model and radius pair of the test matrix; the sphere
/// drops R = 2, which exceeds its convexity radius.
fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        let mut out = Vec::new();
        for kind in [ModelKind::Euclidean, ModelKind::Sphere, ModelKind::Hyperbolic] {
            for (big, small) in [(1.0, 1.0), (2.0, 1.0), (1.2, 0.6)] {
                if kind == ModelKind::Sphere && big >= FRAC_PI_2 {
                    continue;
                }
                out.push(build(config(kind, big, small), Execution::Parallel));
            }
        }
        out
    })
}

fn report(n: u32, ok: bool, what: &str) {
    println!("{} criterion {n}: {what}", if ok { "PASS" } else { "FAIL" });
}

#[test]
fn criterion_01_full_width_before_gap() {
    let mut worst = f64::INFINITY;
    let mut points = 0;
    for c in cases() {
        let p = &c.profile;
        let gap = c.bp.big_radius() - c.bp.small_radius();
        for i in 0..p.grid.len() {
            if p.grid[i] <= gap {
                let allowed = (2.0 * p.fill[i]).min(0.02);
                worst = worst.min(allowed - (p.w[i] - 2.0 * c.bp.small_radius()).abs());
                points += 1;
            }
        }
    }
    let ok = worst >= 0.0 && cases().len() == 8;
    report(
        1,
        ok,
        &format!(
            "w = 2r on t <= R - r, {} configurations, {points} grid points, worst margin {worst:e}",
            cases().len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_02_threshold_between_gap_and_big_radius() {
    let mut ok = true;
    let mut lines = Vec::new();
    for c in cases() {
        let (big, small, h) = (c.bp.big_radius(), c.bp.small_radius(), c.h());
        let t = c.profile.t_est.value;
        let here = if big == small { t <= h } else { big - small - h <= t && t <= big };
        ok &= here && t <= big;
        lines.push(format!("{}: T = {t:.6}", c.label));
    }
    report(2, ok, &format!("R - r - h <= T <= R, T <= h for R = r [{}]", lines.join("; ")));
    assert!(ok);
}

#[test]
fn criterion_03_width_exceeds_gap() {
    let mut slack_margin = f64::INFINITY;
    let mut strict = f64::INFINITY;
    for c in cases() {
        let p = &c.profile;
        let (gap, end) = (c.bp.big_radius() - c.bp.small_radius(), c.end());
        for i in 0..p.grid.len() {
            let t = p.grid[i];
            if t > gap && t < end {
                let excess = p.w[i] - (end - t);
                slack_margin = slack_margin.min(excess + p.slack[i]);
                if end - t >= 0.1 {
                    strict = strict.min(excess);
                }
            }
        }
    }
    let ok = slack_margin >= 0.0 && strict > 0.0;
    report(3, ok, &format!("w >= R + r - t - slack (margin {slack_margin:e}), strict margin {strict:e}"));
    assert!(ok);
}

fn cloud(c: &Case, plan: &SamplingPlan, t: f64) -> geolens::sets::PointCloud {
    sample_intersection(&c.bp.at(t).unwrap(), plan).unwrap().to_point_cloud().unwrap()
}

#[test]
fn criterion_04_continuous_and_decreasing() {
    let mut ok = true;
    let mut rise = f64::INFINITY;
    let mut drop = f64::INFINITY;
    let mut modulus = f64::INFINITY;
    for (k, c) in cases().iter().enumerate() {
        let p = &c.profile;
        let start = p.t_est.value + c.h();
        let idx: Vec<usize> = (0..p.grid.len()).filter(|&i| p.grid[i] >= start).collect();
        for w in idx.windows(2) {
            rise = rise.min(p.slack[w[0]] - (p.w[w[1]] - p.w[w[0]]));
        }
        let delta = 0.05 * c.end();
        for &i in &idx {
            if let Some(&j) = idx.iter().find(|&&j| p.grid[j] >= p.grid[i] + delta - 1e-12) {
                drop = drop.min(p.w[i] - p.w[j]);
            }
        }

        let m = c.bp.manifold();
        let plan =
            SamplingPlan::from_budget(m, c.bp.small_radius(), c.cfg.suite.hausdorff_budget, c.cfg.lens.seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
        for _ in 0..50 {
            let i = rng.random_range(0..p.grid.len());
            let j = rng.random_range(0..p.grid.len());
            if i == j {
                continue;
            }
            let (a, b) = (cloud(c, &plan, p.grid[i]), cloud(c, &plan, p.grid[j]));
            let d = hausdorff(m, &a, &b).unwrap();
            let slack = p.slack[i] + p.slack[j] + 2.0 * (a.fill_radius() + b.fill_radius());
            modulus = modulus.min(2.0 * d + slack - (p.w[i] - p.w[j]).abs());
        }
    }
    ok &= rise >= 0.0 && drop > 0.0 && modulus >= 0.0;
    report(
        4,
        ok,
        &format!("non-increasing within slack (margin {rise:e}), decrease over 0.05(R+r) {drop:e}, Hausdorff modulus margin {modulus:e}"),
    );
    assert!(ok);
}

/// Dense boundary sampling of the planar lens with the circles centred at
/// 0 and at (t, 0); convex sets attain their diameter on the boundary.
fn planar_oracle(big: f64, small: f64, t: f64, pitch: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let inside_big = |x: f64, y: f64| x * x + y * y <= big * big * (1.0 + 1e-12);
    let inside_small = |x: f64, y: f64| (x - t) * (x - t) + y * y <= small * small * (1.0 + 1e-12);
    let n_big = (2.0 * PI * big / pitch).ceil() as usize;
    for k in 0..n_big {
        let a = 2.0 * PI * k as f64 / n_big as f64;
        let (x, y) = (big * a.cos(), big * a.sin());
        if inside_small(x, y) {
            pts.push((x, y));
        }
    }
    let n_small = (2.0 * PI * small / pitch).ceil() as usize;
    for k in 0..n_small {
        let a = 2.0 * PI * k as f64 / n_small as f64;
        let (x, y) = (t + small * a.cos(), small * a.sin());
        if inside_big(x, y) {
            pts.push((x, y));
        }
    }
    if t > 0.0 && t >= big - small {
        let x = (t * t + big * big - small * small) / (2.0 * t);
        let y = (big * big - x * x).max(0.0).sqrt();
        pts.push((x, y));
        pts.push((x, -y));
    }
    pts.push((t - small, 0.0));
    pts.push((big.min(t + small), 0.0));
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt());
        }
    }
    best
}

fn planar_closed_form(big: f64, small: f64, t: f64) -> f64 {
    if t <= (big * big - small * small).sqrt() {
        2.0 * small
    } else {
        let x = (t * t + big * big - small * small) / (2.0 * t);
        2.0 * (big * big - x * x).max(0.0).sqrt()
    }
}

#[test]
fn criterion_05_planar_oracle() {
    let c = cases().iter().find(|c| c.label == "euclidean R=2 r=1").unwrap();
    let p = &c.profile;
    assert_eq!(p.grid.len(), 200);
    let mut oracle_gap: f64 = 0.0;
    let mut closed_gap: f64 = 0.0;
    let mut confirmed = 0;
    for i in 0..p.grid.len() {
        let t = p.grid[i];
        let oracle = planar_oracle(2.0, 1.0, t, 0.01);
        oracle_gap = oracle_gap.max((p.w[i] - oracle).abs());
        let cf = planar_closed_form(2.0, 1.0, t);
        if (cf - oracle).abs() <= 5e-3 {
            confirmed += 1;
            closed_gap = closed_gap.max((p.w[i] - cf).abs());
        }
    }
    let s = p.s_est.value;
    let ok = oracle_gap <= 5e-3 && closed_gap <= 5e-3 && (s - 3f64.sqrt()).abs() <= 1e-3;
    report(
        5,
        ok,
        &format!("max |w - oracle| = {oracle_gap:e}, max |w - closed form| = {closed_gap:e} on {confirmed}/200 confirmed points, S = {s:.6}"),
    );
    assert!(ok);
}

#[test]
fn criterion_06_counterexample() {
    let mut cfg = config(ModelKind::Sphere, 1.0, 0.5);
    cfg.suite.counterexample_grid = 21;
    let radii = [[FRAC_PI_2, FRAC_PI_2], [2.0, 1.8]];
    let run = run_counterexample(&cfg, &radii, Execution::Parallel).unwrap();
    let worst = run.rows.iter().map(|r| (r.w - PI).abs()).fold(0.0, f64::max);
    let ok = run.rows.len() == 42 && worst <= 0.05;
    report(
        6,
        ok,
        &format!("diameter pi on the unit sphere at {} separations, max |w - pi| = {worst:e}", run.rows.len()),
    );
    assert!(ok);
}

#[test]
fn criterion_07_radii_identities() {
    let mut ok = true;
    for m in [
        ManifoldModel::euclidean(2).unwrap(),
        ManifoldModel::sphere(2, 1.0).unwrap(),
        ManifoldModel::hyperbolic(2, -1.0).unwrap(),
    ] {
        ok &= check_identities(&closed_form_radii(&m).unwrap()).holds(1e-6);
    }
    let sphere = ManifoldModel::sphere(2, 1.0).unwrap();
    let x = sphere.base_point();
    let focal = focal_radius(&sphere, &x, 64, 12.0).unwrap();
    let conj = conjugate_radius(&sphere, &x, 64, 12.0).unwrap();
    let (Radius::Finite(f), Radius::Finite(cj)) = (focal, conj) else { panic!("unit sphere radii must be finite") };
    ok &= (f - FRAC_PI_2).abs() <= 1e-6 && (cj - PI).abs() <= 1e-6;
    report(7, ok, &format!("closed-form identities hold; numeric Foc = {f:.12}, Conj = {cj:.12}"));
    assert!(ok);
}

#[test]
fn criterion_08_nesting_after_threshold() {
    let mut worst = f64::INFINITY;
    for (k, c) in cases().iter().enumerate() {
        let m = c.bp.manifold();
        let plan = c.cfg.plan(m, c.bp.small_radius()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + k as u64);
        let (t_est, end) = (c.profile.t_est.value, c.end());
        for _ in 0..20 {
            let s = t_est + rng.random::<f64>() * (end - t_est);
            let t = s + (1.0 - rng.random::<f64>()) * (end - s);
            if t <= s {
                continue;
            }
            let centre = c.bp.point_on_gamma(s).unwrap();
            for x in sample_intersection(&c.bp.at(t).unwrap(), &plan).unwrap().points {
                worst = worst.min(c.bp.small_radius() - m.distance(&centre, &x).unwrap());
            }
        }
    }
    let ok = worst >= -1e-6;
    report(8, ok, &format!("lens(t) inside D_r(c(s)) for T <= s < t, worst margin {worst:e}"));
    assert!(ok);
}

#[test]
fn criterion_09_determinism() {
    let cfg = config(ModelKind::Sphere, 1.2, 0.6);
    let a = profile_csv(&build(cfg.clone(), Execution::Parallel).profile).unwrap();
    let b = profile_csv(&build(cfg.clone(), Execution::Sequential).profile).unwrap();
    let m = cfg.model().unwrap();
    let bp = BallPair::beyond_convexity(&m, &m.base_direction(), 2.0, 1.8).unwrap().at(1.0).unwrap();
    let plan = SamplingPlan::from_budget(&m, 1.8, 1024, cfg.lens.seed).unwrap();
    let jittered = || cloud_csv(&sample_intersection(&bp, &plan).unwrap().to_point_cloud().unwrap()).unwrap();
    let ok = a == b && jittered() == jittered();
    report(9, ok, &format!("identical profile CSVs ({} bytes) and jittered cloud CSVs", a.len()));
    assert!(ok);
}

#[test]
fn criterion_10_speculation_probe_is_report_only() {
    let mut ok = true;
    let mut lines = Vec::new();
    for (kind, pairs) in [
        (ModelKind::Euclidean, vec![[1.0, 1.0], [2.0, 1.0], [1.2, 0.6]]),
        (ModelKind::Sphere, vec![[1.0, 1.0], [1.2, 0.6]]),
        (ModelKind::Hyperbolic, vec![[1.0, 1.0], [2.0, 1.0], [1.2, 0.6]]),
    ] {
        let mut cfg = config(kind, 1.0, 1.0);
        cfg.lens.pairs = Some(pairs);
        let entries = run_speculation_probe(&cfg, Execution::Parallel).unwrap();
        ok &= entries.len() == 3 && entries.iter().all(|e| e.status == ClaimStatus::ReportOnly);
        for e in &entries {
            if e.id == PROBE_S_EQUALS_T || e.id == PROBE_CONCAVITY {
                ok &= e.margin >= 0.0;
                lines.push(format!("{kind} {} margin {:e}", e.id, e.margin));
            }
        }
    }
    report(
        10,
        ok,
        &format!("|S - T| <= 2h and second differences <= slack, recorded report-only [{}]", lines.join("; ")),
    );
    assert!(ok);
}
