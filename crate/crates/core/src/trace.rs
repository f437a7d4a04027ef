//! Multiscale tracing of one-dimensional sets that are close to lines or
//! propellers at every location and scale.
//!
//! The pipeline measures the flatness numbers `eps_k` on dyadic scales, finds
//! the propeller center (if any) by refitting at halved scales, and marches
//! along the data from the center outward through dyadic annuli
//! `B(z, 2^-k r) \ B(z, 2^-k-3 r)` with steps of one eighth of the annulus
//! width, or uniformly in the line regime.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::CurveKind;
use crate::error::{param, Error, Result};
use crate::fit::{beta_fit, pca_frame, ConeFamily, FitBudget, FittedCone};
use crate::geometry::{LocalWindow, Vec3};
use crate::measure::SampledSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceParams {
    /// Number of dyadic scales `2^-k r`, `k = 0..depth`.
    pub depth: usize,
    /// Probe centers besides the data point nearest the window center.
    pub probes: usize,
    /// Largest `eps_k` accepted by the tracer.
    pub eps_max: f64,
    /// The propeller center must lie within `core * r` of the window
    /// center.
    pub core: f64,
    /// Branches start this many sampling gaps away from the center.
    pub inner_gaps: f64,
    pub budget: FitBudget,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            depth: 6,
            probes: 8,
            eps_max: 0.25,
            core: 0.6,
            inner_gaps: 12.0,
            budget: FitBudget {
                starts: 4,
                random_frames: 16,
                max_evals: 400,
                rms_points: 800,
                sup_points: 3000,
                cone_points: 800,
                ..FitBudget::default()
            },
        }
    }
}

impl TraceParams {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(param("depth", "need at least one scale"));
        }
        if !(self.eps_max > 0.0 && self.core > 0.0 && self.core <= 1.0 && self.inner_gaps >= 2.0) {
            return Err(param("trace", "need eps_max > 0, core in (0, 1] and inner_gaps >= 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonTable {
    /// `2^-k r` for the measured scales.
    pub scales: Vec<f64>,
    /// Largest beta over the probes at each scale.
    pub eps: Vec<f64>,
    /// Probe where the maximum is attained.
    pub worst_probe: Vec<Vec3>,
    pub probes: Vec<Vec3>,
    /// Some requested scales were below three sampling gaps and dropped.
    pub truncated: bool,
}

fn probe_centers(e: &SampledSet, w: &LocalWindow, n: usize, seed: u64) -> Result<Vec<Vec3>> {
    let pts = e.points();
    let mut idx = e.tree().within(&w.center, w.radius);
    if idx.is_empty() {
        return Err(Error::InvalidInput(format!("no data in the window {:?}", w)));
    }
    idx.sort_unstable();
    let (first, _) = e.tree().nearest(&w.center).expect("nonempty");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    let mut out = vec![pts[first]];
    out.extend(idx.into_iter().filter(|&i| i != first).take(n).map(|i| pts[i]));
    Ok(out)
}

/// `eps_k = max_x beta(x, 2^-k r)` over probe centers `x` in `E ∩ window`,
/// against lines and propellers.
pub fn measure_epsilons(
    e: &SampledSet,
    window: &LocalWindow,
    depth: usize,
    params: &TraceParams,
) -> Result<EpsilonTable> {
    params.validate()?;
    if depth == 0 {
        return Err(param("depth", "need at least one scale"));
    }
    let probes = probe_centers(e, window, params.probes, params.budget.seed)?;
    let mut table = EpsilonTable {
        scales: Vec::new(),
        eps: Vec::new(),
        worst_probe: Vec::new(),
        probes: probes.clone(),
        truncated: false,
    };
    for k in 0..depth {
        let s = window.radius * 0.5f64.powi(k as i32);
        if s < 3.0 * e.gap() {
            table.truncated = true;
            break;
        }
        let mut worst = (0.0, probes[0]);
        for x in &probes {
            let rep = beta_fit(
                e,
                &LocalWindow::new(*x, s)?,
                ConeFamily::LinesPropellers,
                &params.budget,
            )?;
            if rep.beta > worst.0 {
                worst = (rep.beta, *x);
            }
        }
        table.scales.push(s);
        table.eps.push(worst.0);
        table.worst_probe.push(worst.1);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterDetection {
    pub center: Option<Vec3>,
    /// Center estimates at the successive scales.
    pub path: Vec<Vec3>,
    pub scales: Vec<f64>,
    pub diagnostic: Option<String>,
}

fn propeller_apex(cone: &FittedCone) -> Option<Vec3> {
    match cone {
        FittedCone::Curve(c) if c.kind == CurveKind::Propeller => Some(c.apex),
        _ => None,
    }
}

/// Locates the propeller center: the best cone at the top scale must be a
/// propeller centered within `core * r` of the window center; its center is
/// then refined by refitting on halved balls around the current estimate
/// until the scale reaches six sampling gaps. `None` means the line regime
/// or a diverging iteration (see `diagnostic`).
pub fn detect_center(e: &SampledSet, window: &LocalWindow, params: &TraceParams) -> Result<CenterDetection> {
    params.validate()?;
    let mut out = CenterDetection {
        center: None,
        path: Vec::new(),
        scales: Vec::new(),
        diagnostic: None,
    };
    let top = beta_fit(e, window, ConeFamily::LinesPropellers, &params.budget)?;
    let Some(mut z) = propeller_apex(&top.cone) else {
        out.diagnostic = Some("best cone at the top scale is a line".into());
        return Ok(out);
    };
    if (z - window.center).norm() > params.core * window.radius {
        out.diagnostic = Some(format!(
            "propeller center {:.3e} away from the window center, outside the core",
            (z - window.center).norm()
        ));
        return Ok(out);
    }
    out.path.push(z);
    out.scales.push(window.radius);
    let mut s = window.radius / 2.0;
    while s >= 6.0 * e.gap() {
        let rep = beta_fit(e, &LocalWindow::new(z, s)?, ConeFamily::LinesPropellers, &params.budget)?;
        let Some(next) = propeller_apex(&rep.cone) else {
            // A line at this scale means the center sits near the edge of
            // the ball; keep the estimate.
            out.path.push(z);
            out.scales.push(s);
            s /= 2.0;
            continue;
        };
        if (next - z).norm() > s || (next - window.center).norm() > window.radius {
            out.diagnostic = Some(format!("center iteration diverged at scale {s:.3e}"));
            return Ok(out);
        }
        z = next;
        out.path.push(z);
        out.scales.push(s);
        s /= 2.0;
    }
    out.center = Some(z);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Line,
    Propeller,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceResult {
    pub structure: Structure,
    pub window: LocalWindow,
    /// Propeller center, shared first vertex of the three branches.
    pub center: Option<Vec3>,
    pub branches: Vec<Vec<Vec3>>,
    /// Unit tangent (up to sign) at every branch vertex.
    pub tangents: Vec<Vec<Vec3>>,
    pub epsilon_scales: Vec<f64>,
    pub epsilon_sequence: Vec<f64>,
    /// Distance from the center where the branches start.
    pub inner_radius: f64,
    /// A branch stopped before the window boundary.
    pub partial: bool,
    pub diagnostics: Vec<String>,
}

impl TraceResult {
    /// CSV with columns `branch,index,x,y,z,tx,ty,tz`.
    pub fn tangent_csv(&self) -> String {
        let mut out = String::from("branch,index,x,y,z,tx,ty,tz\n");
        for (b, (vs, ts)) in self.branches.iter().zip(&self.tangents).enumerate() {
            for (i, (v, t)) in vs.iter().zip(ts).enumerate() {
                let _ = writeln!(out, "{b},{i},{},{},{},{},{},{}", v.x, v.y, v.z, t.x, t.y, t.z);
            }
        }
        out
    }

    /// No two non-adjacent segments of any branch meet.
    pub fn branches_are_simple(&self) -> bool {
        self.branches.iter().all(|b| polyline_is_simple(b))
    }
}

/// Distance between segments `[p0, p1]` and `[q0, q1]`.
pub fn segment_distance(p0: &Vec3, p1: &Vec3, q0: &Vec3, q1: &Vec3) -> f64 {
    let (d1, d2, r) = (p1 - p0, q1 - q0, p0 - q0);
    let (a, e, f) = (d1.norm_squared(), d2.norm_squared(), d2.dot(&r));
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

pub fn polyline_is_simple(v: &[Vec3]) -> bool {
    let n = v.len();
    for i in 0..n.saturating_sub(1) {
        for j in i + 2..n.saturating_sub(1) {
            if segment_distance(&v[i], &v[i + 1], &v[j], &v[j + 1]) <= 1e-12 {
                return false;
            }
        }
    }
    true
}

struct Marcher<'a> {
    e: &'a SampledSet,
    window: LocalWindow,
}

enum Stop {
    Boundary,
    Failed(String),
}

impl Marcher<'_> {
    fn snap(&self, q: &Vec3) -> (Vec3, f64) {
        let (i, d) = self.e.tree().nearest(q).expect("nonempty data");
        (self.e.points()[i], d)
    }

    fn local_dir(&self, p: &Vec3, radius: f64) -> Option<Vec3> {
        let pts = self.e.points();
        let local: Vec<Vec3> = self.e.tree().within(p, radius).into_iter().map(|i| pts[i]).collect();
        if local.len() < 3 {
            return None;
        }
        let (_, frame) = pca_frame(&local);
        Some(frame * Vec3::x())
    }

    /// Marches from `p` along `d` until the window boundary; `step` gives
    /// the step length at a point.
    fn march(&self, p: Vec3, d: Vec3, step: &dyn Fn(&Vec3) -> f64, avoid: &[Vec3]) -> (Vec<Vec3>, Vec<Vec3>, Stop) {
        let gap = self.e.gap();
        let (mut p, mut d) = (p, d);
        let (mut verts, mut tans) = (Vec::new(), Vec::new());
        let w = self.window;
        for _ in 0..100_000 {
            let h = step(&p).max(2.0 * gap);
            let q = p + d * h;
            if (q - w.center).norm() > w.radius {
                // Last vertex on the boundary crossing.
                let m = p - w.center;
                let b = m.dot(&d);
                let t = -b + (b * b - (m.norm_squared() - w.radius * w.radius)).max(0.0).sqrt();
                let (s, _) = self.snap(&(p + d * t));
                if (s - p).dot(&d) > 0.5 * gap && w.contains(&s) {
                    verts.push(s);
                    tans.push(
                        self.local_dir(&s, h.max(3.0 * gap))
                            .map_or(d, |n| if n.dot(&d) < 0.0 { -n } else { n }),
                    );
                }
                return (verts, tans, Stop::Boundary);
            }
            let (s, dist) = self.snap(&q);
            if dist > h / 2.0 {
                return (
                    verts,
                    tans,
                    Stop::Failed(format!("no data within {:.3e} of the predicted vertex", h / 2.0)),
                );
            }
            if (s - p).dot(&d) <= h / 4.0 {
                return (verts, tans, Stop::Failed("march stalled".into()));
            }
            if avoid.iter().any(|a| (a - s).norm() < h / 2.0) {
                return (verts, tans, Stop::Failed("branch collision".into()));
            }
            let nd = self
                .local_dir(&s, h.max(3.0 * gap))
                .map_or(d, |n| if n.dot(&d) < 0.0 { -n } else { n });
            verts.push(s);
            tans.push(nd);
            p = s;
            d = nd;
        }
        (verts, tans, Stop::Failed("step limit reached".into()))
    }
}

/// Three unit directions clustering `dirs` (farthest-point seeds, then
/// spherical k-means).
fn three_directions(dirs: &[Vec3]) -> Option<[Vec3; 3]> {
    if dirs.len() < 3 {
        return None;
    }
    let s0 = dirs[0];
    let s1 = *dirs.iter().min_by(|a, b| a.dot(&s0).total_cmp(&b.dot(&s0)))?;
    let s2 = *dirs
        .iter()
        .min_by(|a, b| a.dot(&s0).max(a.dot(&s1)).total_cmp(&b.dot(&s0).max(b.dot(&s1))))?;
    let mut c = [s0, s1, s2];
    for _ in 0..20 {
        let mut sums = [Vec3::zeros(); 3];
        for d in dirs {
            let j = (0..3).max_by(|&a, &b| d.dot(&c[a]).total_cmp(&d.dot(&c[b])))?;
            sums[j] += d;
        }
        for j in 0..3 {
            c[j] = sums[j].try_normalize(1e-12)?;
        }
    }
    Some(c)
}

/// Traces the branches through the window: three from `center`, or one
/// through the data point nearest the window center when `center` is
/// `None`. When an epsilon table is given, every entry must be at most
/// `eps_max`.
pub fn trace_structure(
    e: &SampledSet,
    window: &LocalWindow,
    center: Option<Vec3>,
    eps: Option<&EpsilonTable>,
    params: &TraceParams,
) -> Result<TraceResult> {
    params.validate()?;
    if let Some(t) = eps {
        if let Some((k, v)) = t.eps.iter().enumerate().find(|(_, v)| **v > params.eps_max) {
            return Err(Error::Precondition(format!(
                "eps at scale {:.3e} is {v:.3e}, above the tracing threshold {}",
                t.scales[k], params.eps_max
            )));
        }
    }
    if e.is_empty() {
        return Err(Error::InvalidInput("empty data".into()));
    }
    let gap = e.gap();
    let r = window.radius;
    let marcher = Marcher { e, window: *window };
    let mut res = TraceResult {
        structure: if center.is_some() {
            Structure::Propeller
        } else {
            Structure::Line
        },
        window: *window,
        center,
        branches: Vec::new(),
        tangents: Vec::new(),
        epsilon_scales: eps.map_or_else(Vec::new, |t| t.scales.clone()),
        epsilon_sequence: eps.map_or_else(Vec::new, |t| t.eps.clone()),
        inner_radius: 0.0,
        partial: false,
        diagnostics: Vec::new(),
    };
    let note = |res: &mut TraceResult, branch: usize, stop: Stop| {
        if let Stop::Failed(why) = stop {
            res.partial = true;
            res.diagnostics.push(format!("branch {branch}: {why}"));
        }
    };

    match center {
        None => {
            let line_step = 7.0 / 256.0 * r;
            let (s0, _) = marcher.snap(&window.center);
            let Some(d0) = marcher.local_dir(&s0, (r / 8.0).max(3.0 * gap)) else {
                return Err(Error::Geometry("too few data points near the window center".into()));
            };
            let step = |_: &Vec3| line_step;
            let (fv, ft, fstop) = marcher.march(s0, d0, &step, &[]);
            let (bv, bt, bstop) = marcher.march(s0, -d0, &step, &[]);
            let mut verts: Vec<Vec3> = bv.into_iter().rev().collect();
            let mut tans: Vec<Vec3> = bt.into_iter().rev().map(|t| -t).collect();
            verts.push(s0);
            tans.push(d0);
            verts.extend(fv);
            tans.extend(ft);
            res.branches.push(verts);
            res.tangents.push(tans);
            note(&mut res, 0, bstop);
            note(&mut res, 0, fstop);
        }
        Some(z) => {
            let rho0 = params.inner_gaps * gap;
            res.inner_radius = rho0;
            let pts = e.points();
            let dirs: Vec<Vec3> = e
                .tree()
                .within(&z, 2.0 * rho0)
                .into_iter()
                .filter_map(|i| {
                    let v = pts[i] - z;
                    (v.norm() >= rho0).then(|| v.normalize())
                })
                .collect();
            let Some(rays) = three_directions(&dirs) else {
                return Err(Error::Geometry(
                    "could not find three branches around the center".into(),
                ));
            };
            let step = move |p: &Vec3| {
                let s = (p - z).norm().max(rho0);
                let k = (r / s).log2().floor().max(0.0);
                7.0 / 64.0 * r * 0.5f64.powf(k)
            };
            let mut done: Vec<Vec3> = Vec::new();
            for (j, u) in rays.iter().enumerate() {
                let (s0, _) = marcher.snap(&(z + u * rho0));
                let d0 =
                    marcher
                        .local_dir(&s0, (rho0 / 2.0).max(3.0 * gap))
                        .map_or(*u, |n| if n.dot(u) < 0.0 { -n } else { n });
                let (v, t, stop) = marcher.march(s0, d0, &step, &done);
                let mut verts = vec![z, s0];
                let mut tans = vec![*u, d0];
                verts.extend(v);
                tans.extend(t);
                done.extend(verts[1..].iter().copied());
                res.branches.push(verts);
                res.tangents.push(tans);
                note(&mut res, j, stop);
            }
        }
    }
    Ok(res)
}

/// Full pipeline: epsilons, center detection and tracing.
pub fn trace(e: &SampledSet, window: &LocalWindow, params: &TraceParams) -> Result<TraceResult> {
    let eps = measure_epsilons(e, window, params.depth, params)?;
    let det = detect_center(e, window, params)?;
    let mut res = trace_structure(e, window, det.center, Some(&eps), params)?;
    if eps.truncated {
        res.diagnostics
            .push("epsilon table truncated at three sampling gaps".into());
    }
    if let Some(d) = det.diagnostic {
        res.diagnostics.push(d);
    }
    Ok(res)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchOscillation {
    /// Largest `min(|t_i - t_j|, |t_i + t_j|)` over vertex pairs.
    pub max_oscillation: f64,
    /// Smallest `C` with oscillation `<= C sum eps_k` over the pairs where
    /// the sum (over scales `<= 16 |x - y|`) is positive.
    pub fitted_c: Option<f64>,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentCertificate {
    pub branches: Vec<BranchOscillation>,
    pub fitted_c: Option<f64>,
    /// Limit directions of the branches at the center (propellers only).
    pub center_tangents: Option<Vec<Vec3>>,
    /// Pairwise angles in degrees between the center tangents.
    pub center_angles_deg: Option<[f64; 3]>,
    /// `|det(t_1, t_2, t_3)|` of the center tangents.
    pub coplanarity_residual: Option<f64>,
}

fn tangent_distance(a: &Vec3, b: &Vec3) -> f64 {
    (a - b).norm().min((a + b).norm())
}

/// Oscillation of the tangent field against the epsilon sums and, for
/// propellers, the angles and coplanarity of the center tangents.
pub fn tangent_certificate(res: &TraceResult) -> TangentCertificate {
    let mut branches = Vec::new();
    for (vs, ts) in res.branches.iter().zip(&res.tangents) {
        let mut b = BranchOscillation {
            max_oscillation: 0.0,
            fitted_c: None,
            pairs: 0,
        };
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let osc = tangent_distance(&ts[i], &ts[j]);
                b.max_oscillation = b.max_oscillation.max(osc);
                b.pairs += 1;
                let reach = 16.0 * (vs[i] - vs[j]).norm();
                let sum: f64 = res
                    .epsilon_scales
                    .iter()
                    .zip(&res.epsilon_sequence)
                    .filter(|(s, _)| **s <= reach)
                    .map(|(_, e)| e)
                    .sum();
                if sum > 0.0 {
                    let c = osc / sum;
                    b.fitted_c = Some(b.fitted_c.map_or(c, |x: f64| x.max(c)));
                }
            }
        }
        branches.push(b);
    }
    let fitted_c = branches.iter().filter_map(|b| b.fitted_c).reduce(f64::max);

    let (mut center_tangents, mut center_angles_deg, mut coplanarity_residual) = (None, None, None);
    if let (Structure::Propeller, Some(z)) = (res.structure, res.center) {
        let reach = 4.0 * res.inner_radius;
        let tans: Vec<Vec3> = res
            .branches
            .iter()
            .map(|vs| {
                let near: Vec<Vec3> = vs[1..]
                    .iter()
                    .filter(|v| (*v - z).norm() <= reach)
                    .map(|v| v - z)
                    .collect();
                let near = if near.is_empty() {
                    vs[1..].iter().take(1).map(|v| v - z).collect()
                } else {
                    near
                };
                let mut m = nalgebra::Matrix3::zeros();
                let mut mean = Vec3::zeros();
                for v in &near {
                    m += v * v.transpose();
                    mean += v;
                }
                let eig = m.symmetric_eigen();
                let i = eig.eigenvalues.imax();
                let t: Vec3 = eig.eigenvectors.column(i).into();
                if t.dot(&mean) < 0.0 {
                    -t
                } else {
                    t
                }
            })
            .collect();
        if tans.len() == 3 {
            let ang = |a: &Vec3, b: &Vec3| a.dot(b).clamp(-1.0, 1.0).acos().to_degrees();
            center_angles_deg = Some([
                ang(&tans[0], &tans[1]),
                ang(&tans[1], &tans[2]),
                ang(&tans[2], &tans[0]),
            ]);
            coplanarity_residual = Some(tans[0].cross(&tans[1]).dot(&tans[2]).abs());
        }
        center_tangents = Some(tans);
    }
    TangentCertificate {
        branches,
        fitted_c,
        center_tangents,
        center_angles_deg,
        coplanarity_residual,
    }
}
