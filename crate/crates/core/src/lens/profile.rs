use serde::Serialize;

use super::diameter::lens_diameter;
use super::sampling::{sample_boundary, LensCloud, SamplingPlan};
use super::{BallPair, LensOptions};
use crate::error::{GeoError, Result};
use crate::exec::map_indexed;
use crate::manifold::ManifoldPoint;

/// `n` equally spaced values from 0 to `end` inclusive.
pub fn uniform_grid(end: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| if i + 1 == n { end } else { end * i as f64 / (n - 1) as f64 }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Width of the final bracket.
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TEstimate {
    pub value: f64,
    pub uncertainty: f64,
    /// Per grid value `s`: every sampled `lens(t)`, `t > s`, lies in `lens(s)`.
    pub nested: Vec<bool>,
}

/// `w(t)` on a grid with per-entry slack and witnesses, plus the estimated
/// nesting threshold T and last full-width separation S.
#[derive(Debug, Clone)]
pub struct WProfile {
    pub pair: BallPair,
    pub plan: SamplingPlan,
    pub options: LensOptions,
    pub grid: Vec<f64>,
    pub w: Vec<f64>,
    pub slack: Vec<f64>,
    pub fill: Vec<f64>,
    pub witnesses: Vec<(ManifoldPoint, ManifoldPoint)>,
    pub t_est: TEstimate,
    pub s_est: Estimate,
}

impl WProfile {
    /// Grid spacing (largest gap).
    pub fn resolution(&self) -> f64 {
        self.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn nested(&self) -> &[bool] {
        &self.t_est.nested
    }
}

fn check_grid(bp: &BallPair, grid: &[f64]) -> Result<()> {
    let end = bp.big_radius() + bp.small_radius();
    if grid.len() < 2 {
        return Err(GeoError::Precondition("grid needs at least two values".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] < 0.0 || grid[grid.len() - 1] > end * (1.0 + super::END_SLOP)
    {
        return Err(GeoError::Precondition(format!("grid must increase within [0, {end}]")));
    }
    Ok(())
}

pub fn w_profile(bp: &BallPair, grid: &[f64], plan: &SamplingPlan, opts: &LensOptions) -> Result<WProfile> {
    check_grid(bp, grid)?;
    let rows = map_indexed(opts.exec, grid.len(), |i| lens_diameter(&bp.at(grid[i])?, plan));
    let rows: Vec<_> = rows.into_iter().collect::<Result<_>>()?;
    let t_est = estimate_t(bp, grid, plan, opts)?;
    let mut profile = WProfile {
        pair: bp.clone(),
        plan: *plan,
        options: *opts,
        grid: grid.to_vec(),
        w: rows.iter().map(|r| r.value).collect(),
        slack: rows.iter().map(|r| r.slack).collect(),
        fill: rows.iter().map(|r| r.fill_radius).collect(),
        witnesses: rows.into_iter().map(|r| r.witness).collect(),
        t_est,
        s_est: Estimate { value: f64::NAN, uncertainty: f64::NAN },
    };
    profile.s_est = estimate_s(&profile, opts.full_width_tol)?;
    Ok(profile)
}

/// Largest excess `d(c(s), x) - r` over the samples, or `-inf` if empty.
fn excess_over(bp: &BallPair, centre_s: &ManifoldPoint, cloud: &LensCloud) -> Result<f64> {
    let m = bp.manifold();
    let mut worst = f64::NEG_INFINITY;
    for x in &cloud.points {
        worst = worst.max(m.distance(centre_s, x)? - bp.small_radius());
    }
    Ok(worst)
}

/// Nesting test of `s` against the cached grid clouds past `s` and fresh
/// clouds at `s + gap 2^-k`.
#[allow(clippy::too_many_arguments)]
fn nested_at(
    bp: &BallPair,
    s: f64,
    gap: f64,
    grid: &[f64],
    clouds: &[LensCloud],
    plan: &SamplingPlan,
    opts: &LensOptions,
    tol: f64,
) -> Result<bool> {
    let centre = bp.point_on_gamma(s)?;
    let end = bp.big_radius() + bp.small_radius();
    for k in 0..=opts.fine_levels {
        let t = s + gap * 0.5f64.powi(k as i32);
        if t <= s || t > end {
            continue;
        }
        if excess_over(bp, &centre, &sample_boundary(&bp.at(t)?, plan)?)? > tol {
            return Ok(false);
        }
    }
    for (t, cloud) in grid.iter().zip(clouds) {
        if *t > s && excess_over(bp, &centre, cloud)? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest separation `s` such that every later lens lies inside
/// `lens(s)`, tested on boundary samples (the lenses are convex, so the
/// boundary decides containment) and refined by bisection.
pub fn estimate_t(bp: &BallPair, grid: &[f64], plan: &SamplingPlan, opts: &LensOptions) -> Result<TEstimate> {
    check_grid(bp, grid)?;
    let m = bp.manifold();
    let tol = opts.nesting_tol.max(10.0 * m.distance_accuracy());
    let clouds: Vec<LensCloud> = map_indexed(opts.exec, grid.len(), |i| sample_boundary(&bp.at(grid[i])?, plan))
        .into_iter()
        .collect::<Result<_>>()?;
    let last = grid.len() - 1;
    let nested: Vec<bool> = map_indexed(opts.exec, grid.len(), |i| {
        if i == last {
            return Ok(true);
        }
        nested_at(bp, grid[i], grid[i + 1] - grid[i], grid, &clouds, plan, opts, tol)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut first = last;
    while first > 0 && nested[first - 1] {
        first -= 1;
    }
    if first == 0 {
        return Ok(TEstimate { value: grid[0], uncertainty: 0.0, nested });
    }
    let (mut lo, mut hi) = (grid[first - 1], grid[first]);
    let target = opts.refine * (bp.big_radius() + bp.small_radius());
    while hi - lo > target {
        let mid = 0.5 * (lo + hi);
        if nested_at(bp, mid, hi - mid, grid, &clouds, plan, opts, tol)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(TEstimate { value: hi, uncertainty: hi - lo, nested })
}

/// Largest separation at which the lens still has width `2r` (witness
/// distance at least `2r - tol`), refined by bisection.
pub fn estimate_s(profile: &WProfile, tol: f64) -> Result<Estimate> {
    let bp = &profile.pair;
    let full = 2.0 * bp.small_radius() - tol.max(10.0 * bp.manifold().distance_accuracy());
    let Some(i) = profile.w.iter().rposition(|w| *w >= full) else {
        return Ok(Estimate { value: profile.grid[0], uncertainty: 0.0 });
    };
    if i + 1 == profile.grid.len() {
        return Ok(Estimate { value: profile.grid[i], uncertainty: 0.0 });
    }
    let (mut lo, mut hi) = (profile.grid[i], profile.grid[i + 1]);
    let target = profile.options.refine * (bp.big_radius() + bp.small_radius());
    while hi - lo > target {
        let mid = 0.5 * (lo + hi);
        if lens_diameter(&bp.at(mid)?, &profile.plan)?.value >= full {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Estimate { value: lo, uncertainty: hi - lo })
}
