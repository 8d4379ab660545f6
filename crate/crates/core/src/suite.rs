//! Verification runs. Every checked property of the lens width is one entry
//! of a fixed claim registry; a run reports each entry exactly once.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{GeoError, Result};
use crate::exec::{map_indexed, Execution};
use crate::lens::{
    lens_diameter, sample_boundary, sample_intersection, uniform_grid, w_profile, BallPair, LensCloud, SamplingPlan,
    WProfile,
};
use crate::manifold::{ManifoldModel, ModelKind};
use crate::radii::{check_identities, radii_report};
use crate::sets::{hausdorff_with, monotone_limit_check, Nesting, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    ReportOnly,
}

impl std::fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClaimStatus::Pass => "pass",
            ClaimStatus::Fail => "fail",
            ClaimStatus::ReportOnly => "report-only",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClaimSpec {
    pub id: &'static str,
    /// Failing gating claims fail the run; the others are reported only.
    pub gating: bool,
    pub description: &'static str,
}

pub const GEODESIC_MINIMIZING: &str = "geodesic-minimizing";
pub const FULL_WIDTH: &str = "full-width-before-gap";
pub const THRESHOLD_ABOVE_GAP: &str = "threshold-above-gap";
pub const THRESHOLD_BELOW_R: &str = "threshold-below-big-radius";
pub const WIDTH_EXCEEDS_GAP: &str = "width-exceeds-gap";
pub const STRICT_DECREASE: &str = "strict-decrease";
pub const CONTINUITY_LEFT: &str = "continuity-left";
pub const CONTINUITY_RIGHT: &str = "continuity-right";
pub const NESTING: &str = "nesting-after-threshold";
pub const DIAMETER_MODULUS: &str = "diameter-hausdorff-modulus";
pub const MONOTONE_LIMIT: &str = "monotone-limit";
pub const CONVEXITY_IDENTITY: &str = "convexity-radius-identity";
pub const COUNTEREXAMPLE: &str = "counterexample-full-diameter";
pub const PROBE_S_EQUALS_T: &str = "probe-s-equals-t";
pub const PROBE_CONCAVITY: &str = "probe-concavity";
pub const PROBE_SMOOTHNESS: &str = "probe-smoothness";

pub const CLAIMS: &[ClaimSpec] = &[
    ClaimSpec { id: GEODESIC_MINIMIZING, gating: true, description: "d(c(a), c(b)) = |a - b| along the separating geodesic" },
    ClaimSpec { id: FULL_WIDTH, gating: true, description: "w(t) = 2r for t <= R - r" },
    ClaimSpec { id: THRESHOLD_ABOVE_GAP, gating: true, description: "R - r <= T, and T = 0 when R = r" },
    ClaimSpec { id: THRESHOLD_BELOW_R, gating: true, description: "T < R" },
    ClaimSpec { id: WIDTH_EXCEEDS_GAP, gating: true, description: "w(t) > R + r - t for R - r < t < R + r" },
    ClaimSpec {
        id: STRICT_DECREASE,
        gating: true,
        description: "w strictly decreasing on [T, R + r]; also covers the strict convexity of small balls and of distance functions that forces it",
    },
    ClaimSpec { id: CONTINUITY_LEFT, gating: true, description: "w continuous from the left on [T, R + r] via the Hausdorff modulus" },
    ClaimSpec { id: CONTINUITY_RIGHT, gating: true, description: "w continuous from the right on [T, R + r] via the Hausdorff modulus" },
    ClaimSpec { id: NESTING, gating: true, description: "lens(t) lies in D_r(c(s)) whenever T <= s < t <= R + r" },
    ClaimSpec { id: DIAMETER_MODULUS, gating: true, description: "|Diam Y - Diam Z| <= 2 d_H(Y, Z) for lenses at grid separations" },
    ClaimSpec { id: MONOTONE_LIMIT, gating: true, description: "D_R ∩ D_(r+1/k)(c(t)) shrinks to D_R ∩ D_r(c(t)) in Hausdorff distance" },
    ClaimSpec { id: CONVEXITY_IDENTITY, gating: true, description: "Conv = min(Foc, Inj/2), Inj/2 = min(Conj/2, L/4), Foc <= Conj/2" },
    ClaimSpec { id: COUNTEREXAMPLE, gating: false, description: "on the unit sphere with radii >= pi/2 the lens has diameter pi" },
    ClaimSpec { id: PROBE_S_EQUALS_T, gating: false, description: "last full-width separation S equals T" },
    ClaimSpec { id: PROBE_CONCAVITY, gating: false, description: "w concave on [T, R + r]" },
    ClaimSpec { id: PROBE_SMOOTHNESS, gating: false, description: "w differentiable across T" },
];

pub fn claim_spec(id: &str) -> Option<&'static ClaimSpec> {
    CLAIMS.iter().find(|c| c.id == id)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimEntry {
    pub id: String,
    pub status: ClaimStatus,
    /// Smallest observed margin; non-negative when the claim holds.
    pub margin: f64,
    pub parameters: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub grid: usize,
    pub budget: usize,
    pub hausdorff_budget: usize,
    pub tolerances: crate::config::ToleranceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub model: String,
    pub pairs: Vec<[f64; 2]>,
    pub claims: Vec<ClaimEntry>,
    pub environment: Environment,
    /// Resolved configuration as TOML.
    pub config: String,
}

impl VerificationReport {
    /// True when no gating claim failed.
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.status != ClaimStatus::Fail)
    }

    pub fn claim(&self, id: &str) -> Option<&ClaimEntry> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model: {}", self.model);
        let pairs: Vec<String> = self.pairs.iter().map(|[a, b]| format!("(R={a}, r={b})")).collect();
        let _ = writeln!(s, "pairs: {}", pairs.join(", "));
        let e = &self.environment;
        let _ =
            writeln!(s, "seed={} grid={} budget={} hausdorff_budget={}", e.seed, e.grid, e.budget, e.hausdorff_budget);
        let _ = writeln!(s, "{:<30} {:<12} {:>14}  detail", "claim", "status", "margin");
        for c in &self.claims {
            let _ = writeln!(s, "{:<30} {:<12} {:>14.6e}  {}", c.id, c.status.to_string(), c.margin, c.detail);
        }
        let _ = writeln!(s, "overall: {}", if self.passed() { "pass" } else { "fail" });
        s
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| GeoError::Io(e.to_string()))
    }

    /// Columns `claim, status, margin, parameters, detail`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["claim", "status", "margin", "parameters", "detail"])?;
        for c in &self.claims {
            w.write_record([
                c.id.clone(),
                c.status.to_string(),
                c.margin.to_string(),
                c.parameters.clone(),
                c.detail.clone(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| GeoError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| GeoError::Io(e.to_string()))
    }
}

/// Per-claim accumulator over the configured pairs.
#[derive(Debug, Clone)]
struct Tally {
    ok: bool,
    margin: f64,
    parts: Vec<String>,
    params: Vec<String>,
}

impl Default for Tally {
    fn default() -> Self {
        Tally { ok: true, margin: f64::INFINITY, parts: Vec::new(), params: Vec::new() }
    }
}

#[derive(Debug, Clone)]
struct Outcome {
    ok: bool,
    margin: f64,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, margin: f64, detail: String) -> Self {
        Outcome { ok, margin, detail }
    }
}

#[derive(Default)]
struct Ledger {
    tallies: BTreeMap<&'static str, Tally>,
}

impl Ledger {
    fn record(&mut self, id: &'static str, params: &str, o: Outcome) {
        let t = self.tallies.entry(id).or_default();
        t.ok &= o.ok;
        t.margin = t.margin.min(o.margin);
        t.parts.push(if params.is_empty() { o.detail } else { format!("[{params}] {}", o.detail) });
        t.params.push(params.to_string());
    }

    fn set_entry(&mut self, id: &'static str, entry: ClaimEntry) {
        let t = self.tallies.entry(id).or_default();
        t.ok = entry.status != ClaimStatus::Fail;
        t.margin = entry.margin;
        t.parts = vec![entry.detail];
        t.params = vec![entry.parameters];
    }

    fn into_claims(mut self, report_only: bool) -> Vec<ClaimEntry> {
        CLAIMS
            .iter()
            .map(|spec| {
                let t = self.tallies.remove(spec.id).unwrap_or_else(|| Tally {
                    ok: true,
                    margin: f64::NAN,
                    parts: vec!["not evaluated".into()],
                    params: Vec::new(),
                });
                let status = if !spec.gating || report_only {
                    ClaimStatus::ReportOnly
                } else if t.ok {
                    ClaimStatus::Pass
                } else {
                    ClaimStatus::Fail
                };
                ClaimEntry {
                    id: spec.id.to_string(),
                    status,
                    margin: t.margin,
                    parameters: t.params.join("; "),
                    detail: t.parts.join("; "),
                }
            })
            .collect()
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn environment(cfg: &RunConfig) -> Environment {
    Environment {
        seed: cfg.lens.seed,
        grid: cfg.lens.grid,
        budget: cfg.lens.budget,
        hausdorff_budget: cfg.suite.hausdorff_budget,
        tolerances: cfg.tolerances.clone(),
    }
}

/// Context shared by the checks of one `(R, r)` pair.
struct PairRun<'a> {
    cfg: &'a RunConfig,
    exec: Execution,
    bp: BallPair,
    profile: WProfile,
    /// Sampling plan for clouds compared by Hausdorff distance.
    hplan: SamplingPlan,
    /// Resolution used for statements about T and S.
    h: f64,
    stream: u64,
}

impl PairRun<'_> {
    fn big(&self) -> f64 {
        self.bp.big_radius()
    }

    fn small(&self) -> f64 {
        self.bp.small_radius()
    }

    fn end(&self) -> f64 {
        self.big() + self.small()
    }

    fn m(&self) -> &ManifoldModel {
        self.bp.manifold()
    }

    fn t_est(&self) -> f64 {
        self.profile.t_est.value
    }

    fn geodesic_minimizing(&self) -> Result<Outcome> {
        let m = self.m();
        let mut rng = rng_for(self.cfg.lens.seed, self.stream);
        let tol = 1e-9 + 10.0 * m.distance_accuracy();
        let mut worst: f64 = 0.0;
        for _ in 0..self.cfg.suite.geodesic_pairs {
            let a = rng.random::<f64>() * self.end();
            let b = rng.random::<f64>() * self.end();
            let d = m.distance(&self.bp.point_on_gamma(a)?, &self.bp.point_on_gamma(b)?)?;
            worst = worst.max((d - (a - b).abs()).abs());
        }
        Ok(Outcome::new(worst <= tol, tol - worst, format!("max |d - |a-b|| = {worst:e}")))
    }

    fn full_width(&self) -> Outcome {
        let p = &self.profile;
        let gap = self.big() - self.small();
        let mut margin = f64::INFINITY;
        let mut count = 0;
        for i in 0..p.grid.len() {
            if p.grid[i] <= gap + 1e-12 {
                let allowed = (2.0 * p.fill[i]).min(0.02);
                margin = margin.min(allowed + 1e-12 - (p.w[i] - 2.0 * self.small()).abs());
                count += 1;
            }
        }
        Outcome::new(margin >= 0.0, margin, format!("{count} grid points with t <= R - r"))
    }

    fn threshold_above_gap(&self) -> Outcome {
        let t = self.t_est();
        let gap = self.big() - self.small();
        let mut margin = t - (gap - self.h);
        let mut detail = format!("T = {t} ± {}, R - r = {gap}", self.profile.t_est.uncertainty);
        if gap == 0.0 {
            margin = margin.min(self.h - t);
            detail.push_str(", equal radii");
        } else {
            let _ = write!(detail, ", T - (R - r) = {}", t - gap);
        }
        Outcome::new(margin >= 0.0, margin, detail)
    }

    fn threshold_below_r(&self) -> Outcome {
        let margin = self.big() - self.t_est();
        Outcome::new(margin > 0.0, margin, format!("R - T = {margin}"))
    }

    fn width_exceeds_gap(&self) -> Outcome {
        let p = &self.profile;
        let (gap, end) = (self.big() - self.small(), self.end());
        let mut slack_margin = f64::INFINITY;
        let mut strict = f64::INFINITY;
        for i in 0..p.grid.len() {
            let t = p.grid[i];
            if t <= gap || t >= end {
                continue;
            }
            let excess = p.w[i] - (end - t);
            slack_margin = slack_margin.min(excess + p.slack[i] + 1e-12);
            if end - t >= 0.1 {
                strict = strict.min(excess);
            }
        }
        Outcome::new(
            slack_margin >= 0.0 && strict > 0.0,
            strict.min(slack_margin),
            format!("min w - (R+r-t) away from R+r = {strict:e}, with slack = {slack_margin:e}"),
        )
    }

    fn strict_decrease(&self) -> Outcome {
        let p = &self.profile;
        let start = self.t_est() + self.h;
        let idx: Vec<usize> = (0..p.grid.len()).filter(|&i| p.grid[i] >= start).collect();
        if idx.len() < 2 {
            return Outcome::new(true, f64::INFINITY, "fewer than two grid points past T".into());
        }
        let mut rise = f64::INFINITY;
        for w in idx.windows(2) {
            rise = rise.min(p.slack[w[0]] + 1e-12 - (p.w[w[1]] - p.w[w[0]]));
        }
        let delta = 0.05 * self.end();
        let mut drop = f64::INFINITY;
        for &i in &idx {
            if let Some(j) = idx.iter().copied().find(|&j| p.grid[j] >= p.grid[i] + delta - 1e-12) {
                drop = drop.min(p.w[i] - p.w[j]);
            }
        }
        Outcome::new(
            rise >= 0.0 && drop > 0.0,
            drop.min(rise),
            format!("min decrease over {delta} = {drop:e}, monotone margin = {rise:e}"),
        )
    }

    fn cloud(&self, t: f64) -> Result<LensCloud> {
        sample_intersection(&self.bp.at(t)?, &self.hplan)
    }

    fn hausdorff(&self, a: &LensCloud, b: &LensCloud) -> Result<f64> {
        hausdorff_with(self.m(), &a.to_point_cloud()?, &b.to_point_cloud()?, self.exec)
    }

    /// Approaches grid points from one side by halving the gap to the
    /// neighbouring grid point, checking the diameter modulus at each step.
    fn continuity(&self, side: f64) -> Result<Outcome> {
        let p = &self.profile;
        let t_est = self.t_est();
        let n = p.grid.len();
        let candidates: Vec<usize> = (0..n)
            .filter(|&i| if side < 0.0 { i >= 1 && p.grid[i - 1] >= t_est } else { i + 1 < n && p.grid[i] >= t_est })
            .collect();
        if candidates.is_empty() {
            return Ok(Outcome::new(true, f64::INFINITY, "no grid points past T".into()));
        }
        let mut rng = rng_for(self.cfg.lens.seed, self.stream + if side < 0.0 { 1 } else { 2 });
        let picks: Vec<usize> =
            (0..self.cfg.suite.continuity_points).map(|_| candidates[rng.random_range(0..candidates.len())]).collect();
        let results = map_indexed(self.exec, picks.len(), |k| -> Result<(f64, f64, f64)> {
            let i = picks[k];
            let gap = if side < 0.0 { p.grid[i] - p.grid[i - 1] } else { p.grid[i + 1] - p.grid[i] };
            let here = self.cloud(p.grid[i])?;
            let mut modulus = f64::INFINITY;
            let mut dists = Vec::new();
            for level in 0..4 {
                let s = p.grid[i] + side * gap * 0.5f64.powi(level);
                let near = self.cloud(s)?;
                let d = self.hausdorff(&near, &here)?;
                let ld = lens_diameter(&self.bp.at(s)?, &p.plan)?;
                let slack = ld.slack + p.slack[i] + 2.0 * (near.fill_radius + here.fill_radius);
                modulus = modulus.min(2.0 * d + slack - (ld.value - p.w[i]).abs());
                dists.push((d, near.fill_radius + here.fill_radius));
            }
            let (first, last) = (dists[0], dists[dists.len() - 1]);
            let shrink = first.0 + 2.0 * (first.1 + last.1) - last.0;
            Ok((modulus, shrink, last.0))
        });
        let mut modulus = f64::INFINITY;
        let mut shrink = f64::INFINITY;
        let mut closest: f64 = 0.0;
        for r in results {
            let (a, b, c) = r?;
            modulus = modulus.min(a);
            shrink = shrink.min(b);
            closest = closest.max(c);
        }
        Ok(Outcome::new(
            modulus >= 0.0 && shrink >= 0.0,
            modulus.min(shrink),
            format!("{} points, modulus margin {modulus:e}, largest final d_H {closest:e}", picks.len()),
        ))
    }

    fn nesting(&self) -> Result<Outcome> {
        let m = self.m();
        let mut rng = rng_for(self.cfg.lens.seed, self.stream + 3);
        let (t_est, end) = (self.t_est(), self.end());
        let pairs: Vec<(f64, f64)> = (0..self.cfg.suite.nesting_pairs)
            .map(|_| {
                let s = t_est + rng.random::<f64>() * (end - t_est);
                let t = s + (1.0 - rng.random::<f64>()) * (end - s);
                (s, t)
            })
            .filter(|(s, t)| t > s)
            .collect();
        let rows = map_indexed(self.exec, pairs.len(), |k| -> Result<(f64, usize)> {
            let (s, t) = pairs[k];
            let centre = self.bp.point_on_gamma(s)?;
            let cloud = sample_intersection(&self.bp.at(t)?, &self.profile.plan)?;
            let mut worst = f64::INFINITY;
            let mut on_sphere = 0;
            for x in &cloud.points {
                let margin = self.small() - m.distance(&centre, x)?;
                worst = worst.min(margin);
                if margin <= 0.0 {
                    on_sphere += 1;
                }
            }
            Ok((worst, on_sphere))
        });
        let mut worst = f64::INFINITY;
        let mut touching = 0;
        for r in rows {
            let (w, c) = r?;
            worst = worst.min(w);
            touching += c;
        }
        let margin = worst + self.cfg.suite.nesting_margin;
        Ok(Outcome::new(
            margin >= 0.0,
            margin,
            format!("{} pairs, min r - d = {worst:e}, samples not strictly inside: {touching}", pairs.len()),
        ))
    }

    fn diameter_modulus(&self) -> Result<Outcome> {
        let p = &self.profile;
        let n = p.grid.len();
        let mut rng = rng_for(self.cfg.lens.seed, self.stream + 4);
        let pairs: Vec<(usize, usize)> = (0..self.cfg.suite.continuity_pairs)
            .map(|_| {
                let i = rng.random_range(0..n);
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                (i.min(j), i.max(j))
            })
            .collect();
        let mut needed: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
        needed.sort_unstable();
        needed.dedup();
        let clouds: Vec<LensCloud> = map_indexed(self.exec, needed.len(), |k| self.cloud(p.grid[needed[k]]))
            .into_iter()
            .collect::<Result<_>>()?;
        let cloud_of = |i: usize| &clouds[needed.binary_search(&i).expect("cloud computed")];
        let mut margin = f64::INFINITY;
        for &(i, j) in &pairs {
            let (a, b) = (cloud_of(i), cloud_of(j));
            let d = self.hausdorff(a, b)?;
            let slack = p.slack[i] + p.slack[j] + 2.0 * (a.fill_radius + b.fill_radius);
            margin = margin.min(2.0 * d + slack - (p.w[i] - p.w[j]).abs());
        }
        Ok(Outcome::new(margin >= 0.0, margin, format!("{} grid pairs", pairs.len())))
    }

    fn monotone_limit(&self) -> Result<Outcome> {
        let ks = [10.0, 20.0, 50.0, 100.0, 200.0];
        let t = self.big();
        // boundary samples dominate the distances; a fine pitch on a
        // 2-sphere or larger would need millions of samples
        let dim = self.m().dimension();
        let p = self.hplan.boundary_pitch.min(if dim == 2 { 2.5e-3 } else { 0.05 });
        let boundary_fill = if dim == 2 { p } else { 2.0 * p };
        let threshold = 1e-2f64.max(2.0 * boundary_fill);
        let plan = SamplingPlan::from_budget(
            self.m(),
            self.small() + 0.1,
            self.cfg.suite.hausdorff_budget,
            self.cfg.lens.seed,
        )?
        .with_boundary_pitch(p);
        let limit_pair = self.bp.at(t)?;
        let limit = sample_intersection(&limit_pair, &plan)?;
        let limit_boundary = sample_boundary(&limit_pair, &plan)?;
        let seq: Vec<PointCloud> = map_indexed(self.exec, ks.len(), |k| -> Result<PointCloud> {
            let bp = self.bp.with_small_radius(self.small() + 1.0 / ks[k]).at(t)?;
            // the limit's boundary samples are points of every larger lens
            let mut pts = sample_intersection(&bp, &plan)?;
            pts.points.extend(limit_boundary.points.iter().cloned());
            pts.to_point_cloud()
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let lim = limit.to_point_cloud()?;
        let dists = match monotone_limit_check(self.m(), &seq, &lim, Nesting::Decreasing, 1e-9) {
            Ok(d) => d,
            Err(e) => return Ok(Outcome::new(false, f64::NEG_INFINITY, e.to_string())),
        };
        let slack = 2.0 * (seq[0].fill_radius() + lim.fill_radius());
        let monotone = dists.windows(2).map(|w| w[0] + slack - w[1]).fold(f64::INFINITY, f64::min);
        let last = dists[dists.len() - 1];
        let margin = monotone.min(threshold - last);
        let list: Vec<String> = dists.iter().map(|d| format!("{d:.4e}")).collect();
        Ok(Outcome::new(
            margin >= 0.0,
            margin,
            format!("t = {t}, d_H for k = 10..200: [{}], limit threshold {threshold}", list.join(", ")),
        ))
    }

    fn probe_s_equals_t(&self) -> Outcome {
        let (s, t) = (self.profile.s_est, &self.profile.t_est);
        let tol = 2.0 * self.h.max(s.uncertainty).max(t.uncertainty);
        let gap = (s.value - t.value).abs();
        Outcome::new(
            gap <= tol,
            tol - gap,
            format!("S = {} ± {}, T = {} ± {}", s.value, s.uncertainty, t.value, t.uncertainty),
        )
    }

    fn probe_concavity(&self) -> Outcome {
        let p = &self.profile;
        let mut worst = f64::NEG_INFINITY;
        let mut count = 0;
        for i in 1..p.grid.len() - 1 {
            if p.grid[i - 1] < self.t_est() {
                continue;
            }
            let d2 = p.w[i + 1] - 2.0 * p.w[i] + p.w[i - 1];
            let slack = p.slack[i - 1].max(p.slack[i]).max(p.slack[i + 1]);
            worst = worst.max(d2 - slack);
            count += 1;
        }
        Outcome::new(worst <= 0.0, -worst, format!("{count} second differences, max excess over slack {worst:e}"))
    }

    fn probe_smoothness(&self) -> Outcome {
        let p = &self.profile;
        let t = self.t_est();
        let Some(k) = p.grid.iter().position(|g| *g >= t) else {
            return Outcome::new(true, f64::NAN, "T at the end of the grid".into());
        };
        if k < 2 || k + 1 >= p.grid.len() {
            return Outcome::new(true, f64::NAN, "too few grid points on one side of T".into());
        }
        let left = (p.w[k - 1] - p.w[k - 2]) / (p.grid[k - 1] - p.grid[k - 2]);
        let right = (p.w[k + 1] - p.w[k]) / (p.grid[k + 1] - p.grid[k]);
        let jump = (right - left).abs();
        Outcome::new(true, -jump, format!("one-sided slopes at T: left {left:e}, right {right:e}"))
    }
}

fn pair_label(big: f64, small: f64) -> String {
    format!("R={big} r={small}")
}

fn build_pairs(cfg: &RunConfig, m: &ManifoldModel, exec: Execution) -> Result<Vec<BallPair>> {
    let conv = cfg.convexity(m, exec)?;
    let dir = cfg.direction(m)?;
    cfg.pairs()
        .iter()
        .map(|&[big, small]| {
            Ok(BallPair::new(m, &dir, big, small, conv)?.with_membership_tol(cfg.tolerances.membership))
        })
        .collect()
}

fn run_pair<'a>(cfg: &'a RunConfig, bp: BallPair, index: usize, exec: Execution) -> Result<PairRun<'a>> {
    let m = bp.manifold().clone();
    let end = bp.big_radius() + bp.small_radius();
    let plan = cfg.plan(&m, bp.small_radius())?;
    let profile = w_profile(&bp, &uniform_grid(end, cfg.lens.grid), &plan, &cfg.lens_options(exec))?;
    let hplan = SamplingPlan::from_budget(&m, bp.small_radius(), cfg.suite.hausdorff_budget, cfg.lens.seed)?;
    let h = (1e-3 * end).max(profile.t_est.uncertainty).max(profile.s_est.uncertainty);
    Ok(PairRun { cfg, exec, bp, profile, hplan, h, stream: 16 * index as u64 + 1 })
}

/// Checks every gating claim on every configured `(R, r)` pair. Pairs that
/// violate `0 < r <= R < Conv` are rejected before any computation.
pub fn run_main_theorem_suite(cfg: &RunConfig, exec: Execution) -> Result<VerificationReport> {
    let m = cfg.model()?;
    let pairs = build_pairs(cfg, &m, exec)?;
    let mut ledger = Ledger::default();

    let radii = radii_report(&m, &cfg.radii_options(exec))?;
    let ids = check_identities(&radii);
    let worst =
        [ids.convexity.unwrap_or(0.0), ids.injectivity.unwrap_or(0.0), (-ids.focal_margin.unwrap_or(0.0)).max(0.0)]
            .into_iter()
            .fold(0.0, f64::max);
    ledger.record(
        CONVEXITY_IDENTITY,
        "",
        Outcome::new(
            ids.holds(1e-6),
            1e-6 - worst,
            format!(
                "Conv = {}, Foc = {}, Inj = {}",
                radii.convexity.radius, radii.focal.radius, radii.injectivity.radius
            ),
        ),
    );

    for (index, bp) in pairs.into_iter().enumerate() {
        let label = pair_label(bp.big_radius(), bp.small_radius());
        let run = run_pair(cfg, bp, index, exec)?;
        ledger.record(GEODESIC_MINIMIZING, &label, run.geodesic_minimizing()?);
        ledger.record(FULL_WIDTH, &label, run.full_width());
        ledger.record(THRESHOLD_ABOVE_GAP, &label, run.threshold_above_gap());
        ledger.record(THRESHOLD_BELOW_R, &label, run.threshold_below_r());
        ledger.record(WIDTH_EXCEEDS_GAP, &label, run.width_exceeds_gap());
        ledger.record(STRICT_DECREASE, &label, run.strict_decrease());
        ledger.record(CONTINUITY_LEFT, &label, run.continuity(-1.0)?);
        ledger.record(CONTINUITY_RIGHT, &label, run.continuity(1.0)?);
        ledger.record(NESTING, &label, run.nesting()?);
        ledger.record(DIAMETER_MODULUS, &label, run.diameter_modulus()?);
        ledger.record(MONOTONE_LIMIT, &label, run.monotone_limit()?);
        ledger.record(PROBE_S_EQUALS_T, &label, run.probe_s_equals_t());
        ledger.record(PROBE_CONCAVITY, &label, run.probe_concavity());
        ledger.record(PROBE_SMOOTHNESS, &label, run.probe_smoothness());
    }

    if m.kind() == ModelKind::Sphere {
        let radii: Vec<[f64; 2]> = cfg.suite.counterexample_radii.clone();
        let ce = run_counterexample(cfg, &radii, exec)?;
        ledger.set_entry(COUNTEREXAMPLE, ce.entry);
    } else {
        ledger.record(COUNTEREXAMPLE, "", Outcome::new(true, f64::NAN, format!("not applicable to {}", m.kind())));
    }

    Ok(VerificationReport {
        model: m.describe(),
        pairs: cfg.pairs(),
        claims: ledger.into_claims(false),
        environment: environment(cfg),
        config: cfg.to_toml_string()?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleRow {
    #[serde(rename = "R")]
    pub big: f64,
    #[serde(rename = "r")]
    pub small: f64,
    pub t: f64,
    pub w: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleRun {
    pub entry: ClaimEntry,
    pub rows: Vec<CounterexampleRow>,
}

/// Lens diameters on a sphere for radii at or beyond its convexity radius,
/// compared with the largest possible distance `pi / sqrt(k)`.
pub fn run_counterexample(cfg: &RunConfig, radii: &[[f64; 2]], exec: Execution) -> Result<CounterexampleRun> {
    let m = cfg.model()?;
    if m.kind() != ModelKind::Sphere {
        return Err(GeoError::Precondition(format!("the counterexample needs a sphere, got {}", m.kind())));
    }
    let bound = m.diameter_bound();
    let conv = cfg.convexity(&m, exec)?.value();
    let dir = cfg.direction(&m)?;
    let tol = cfg.suite.counterexample_tol;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for &[big, small] in radii {
        if !(big >= conv && small >= conv) {
            return Err(GeoError::Precondition(format!(
                "counterexample radii must be at least the convexity radius {conv}, got R = {big}, r = {small}"
            )));
        }
        let bp = BallPair::beyond_convexity(&m, &dir, big, small)?.with_membership_tol(cfg.tolerances.membership);
        let plan = cfg.plan(&m, small)?;
        let grid = uniform_grid(big + small, cfg.suite.counterexample_grid);
        let found = map_indexed(exec, grid.len(), |i| lens_diameter(&bp.at(grid[i])?, &plan));
        let mut ws = Vec::new();
        for (t, d) in grid.iter().zip(found) {
            let d = d?;
            worst = worst.max((d.value - bound).abs());
            ws.push(d.value);
            rows.push(CounterexampleRow { big, small, t: *t, w: d.value, slack: d.slack });
        }
        let drop = ws.first().copied().unwrap_or(0.0) - ws.last().copied().unwrap_or(0.0);
        parts.push(format!(
            "[{}] min w = {}, w(0) - w(R+r) = {drop:e}, not eventually decreasing",
            pair_label(big, small),
            ws.iter().copied().fold(f64::INFINITY, f64::min)
        ));
    }
    let margin = tol - worst;
    let entry = ClaimEntry {
        id: COUNTEREXAMPLE.to_string(),
        status: if margin >= 0.0 { ClaimStatus::Pass } else { ClaimStatus::Fail },
        margin,
        parameters: radii.iter().map(|[a, b]| pair_label(*a, *b)).collect::<Vec<_>>().join("; "),
        detail: format!("max |w - {bound}| = {worst:e}; {}", parts.join("; ")),
    };
    Ok(CounterexampleRun { entry, rows })
}

/// Report for `verify --expect-counterexample`: the counterexample entry
/// gates the run and the theorem's claims, whose hypotheses fail, are
/// reported as skipped.
pub fn counterexample_report(cfg: &RunConfig, exec: Execution) -> Result<VerificationReport> {
    let m = cfg.model()?;
    let run = run_counterexample(cfg, &cfg.pairs(), exec)?;
    let mut ledger = Ledger::default();
    for spec in CLAIMS {
        if spec.id != COUNTEREXAMPLE {
            ledger.record(
                spec.id,
                "",
                Outcome::new(true, f64::NAN, "skipped: radii beyond the convexity radius".into()),
            );
        }
    }
    let mut claims = ledger.into_claims(true);
    let entry = run.entry;
    for c in claims.iter_mut() {
        if c.id == COUNTEREXAMPLE {
            *c = entry.clone();
        }
    }
    Ok(VerificationReport {
        model: m.describe(),
        pairs: cfg.pairs(),
        claims,
        environment: environment(cfg),
        config: cfg.to_toml_string()?,
    })
}

/// Report-only probes on constant-curvature models: `S = T`, concavity of
/// `w` past T and a one-sided slope comparison at T.
pub fn run_speculation_probe(cfg: &RunConfig, exec: Execution) -> Result<Vec<ClaimEntry>> {
    let m = cfg.model()?;
    if m.constant_curvature().is_none() {
        return Err(GeoError::Precondition("the probe runs on constant-curvature models only".into()));
    }
    let mut ledger = Ledger::default();
    for (index, bp) in build_pairs(cfg, &m, exec)?.into_iter().enumerate() {
        let label = pair_label(bp.big_radius(), bp.small_radius());
        let run = run_pair(cfg, bp, index, exec)?;
        ledger.record(PROBE_S_EQUALS_T, &label, run.probe_s_equals_t());
        ledger.record(PROBE_CONCAVITY, &label, run.probe_concavity());
        ledger.record(PROBE_SMOOTHNESS, &label, run.probe_smoothness());
    }
    Ok(ledger.into_claims(true).into_iter().filter(|c| c.id.starts_with("probe-")).collect())
}
