//! Cone-fitting beta numbers, point classification by density and the
//! finite-sample biHölder ball check.

mod certify;
mod classify;
mod nelder_mead;

pub use certify::{biholder_certificate, CertificateParams, CertificateReport, ProbeFit};
pub use classify::{classify_point, ClassifyThresholds, PointLabel, PointType};
pub use nelder_mead::{Minimum, NelderMead};

use std::collections::HashSet;

use nalgebra::{Matrix3, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{construct_reference_cone, ConeKind, CurveCone, CurveKind, MinimalCone};
use crate::error::{param, Result};
use crate::geometry::{
    local_hausdorff_distance, random_rotation, ConeShape, Frame, HausdorffEstimate, LocalWindow, Vec3,
};
use crate::measure::SampledSet;
use crate::spatial::KdTree;
use crate::tolerance::snap;

/// Cone families over which beta numbers are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeFamily {
    Planes,
    /// Planes, Y-sets and T-sets.
    PlanesYT,
    Lines,
    /// Lines and propellers.
    LinesPropellers,
}

/// A member of one of the cone families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShapeKind {
    Surface(ConeKind),
    Curve(CurveKind),
}

impl ShapeKind {
    pub fn label(&self) -> &'static str {
        match self {
            ShapeKind::Surface(ConeKind::Plane) => "P",
            ShapeKind::Surface(ConeKind::Y) => "Y",
            ShapeKind::Surface(ConeKind::T) => "T",
            ShapeKind::Surface(ConeKind::Custom) => "custom",
            ShapeKind::Curve(CurveKind::Line) => "line",
            ShapeKind::Curve(CurveKind::Propeller) => "propeller",
        }
    }

    /// Number of free parameters once trivial symmetries are removed.
    fn dof(&self) -> usize {
        match self {
            ShapeKind::Surface(ConeKind::Plane) => 3,
            ShapeKind::Curve(CurveKind::Line) => 4,
            _ => 6,
        }
    }
}

impl ConeFamily {
    pub fn kinds(&self) -> Vec<ShapeKind> {
        use ShapeKind::*;
        match self {
            ConeFamily::Planes => vec![Surface(ConeKind::Plane)],
            ConeFamily::PlanesYT => vec![Surface(ConeKind::Plane), Surface(ConeKind::Y), Surface(ConeKind::T)],
            ConeFamily::Lines => vec![Curve(CurveKind::Line)],
            ConeFamily::LinesPropellers => vec![Curve(CurveKind::Line), Curve(CurveKind::Propeller)],
        }
    }
}

/// Fitted cone in world coordinates.
#[derive(Debug, Clone)]
pub enum FittedCone {
    Surface(MinimalCone),
    Curve(CurveCone),
}

impl FittedCone {
    fn new(kind: ShapeKind, apex: Vec3, frame: Frame) -> Self {
        match kind {
            ShapeKind::Surface(k) => FittedCone::Surface(construct_reference_cone(k, apex, frame)),
            ShapeKind::Curve(k) => FittedCone::Curve(CurveCone::new(k, apex, frame)),
        }
    }

    pub fn kind(&self) -> ShapeKind {
        match self {
            FittedCone::Surface(c) => ShapeKind::Surface(c.kind),
            FittedCone::Curve(c) => ShapeKind::Curve(c.kind),
        }
    }

    pub fn apex(&self) -> Vec3 {
        match self {
            FittedCone::Surface(c) => c.apex,
            FittedCone::Curve(c) => c.apex,
        }
    }

    pub fn frame(&self) -> Frame {
        match self {
            FittedCone::Surface(c) => c.frame,
            FittedCone::Curve(c) => c.frame,
        }
    }

    pub fn spec(&self) -> ConeSpec {
        let m = self.frame().into_inner();
        ConeSpec {
            kind: self.kind().label().to_string(),
            apex: [self.apex().x, self.apex().y, self.apex().z],
            frame: [
                [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
                [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
                [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
            ],
        }
    }

    /// Distance from `p` to the points where the cone is centered (the whole
    /// plane or line, the Y spine, or the apex).
    pub fn distance_to_center_set(&self, p: &Vec3) -> f64 {
        match self {
            FittedCone::Surface(c) => c.distance_to_center_set(p),
            FittedCone::Curve(c) => match c.kind {
                CurveKind::Line => c.distance(p),
                CurveKind::Propeller => (p - c.apex).norm(),
            },
        }
    }
}

impl ConeShape for FittedCone {
    fn distance(&self, p: &Vec3) -> f64 {
        match self {
            FittedCone::Surface(c) => c.distance(p),
            FittedCone::Curve(c) => c.distance(p),
        }
    }

    fn sample_in_ball(&self, ball: &LocalWindow, spacing: f64) -> Vec<Vec3> {
        match self {
            FittedCone::Surface(c) => c.sample_in_ball(ball, spacing),
            FittedCone::Curve(c) => c.sample_in_ball(ball, spacing),
        }
    }
}

/// Serialized cone: kind label, apex and rotation matrix (rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub kind: String,
    pub apex: [f64; 3],
    pub frame: [[f64; 3]; 3],
}

/// Optimizer configuration for [`beta_fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitBudget {
    /// Local searches per cone kind.
    pub starts: usize,
    /// Random frames added to the PCA-derived candidate pool.
    pub random_frames: usize,
    /// Coarse local-search results refined on denser data.
    pub refine: usize,
    /// Evaluation budget of each local search.
    pub max_evals: usize,
    /// Data points used by the least-squares stage.
    pub rms_points: usize,
    /// Data points used by the sup-norm stage.
    pub sup_points: usize,
    /// Approximate number of cone samples per objective evaluation.
    pub cone_points: usize,
    /// Resolution of the final cone discretization, relative to the window
    /// radius; the sampling gap of the data is used when it is coarser.
    pub final_resolution: f64,
    pub seed: u64,
}

impl Default for FitBudget {
    fn default() -> Self {
        FitBudget {
            starts: 8,
            refine: 2,
            random_frames: 64,
            max_evals: 600,
            rms_points: 1500,
            sup_points: 5000,
            cone_points: 1500,
            final_resolution: 1.0 / 256.0,
            seed: 7,
        }
    }
}

impl FitBudget {
    fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.refine == 0 {
            return Err(param("starts", "starts and refine must be at least 1"));
        }
        if self.max_evals < 10 {
            return Err(param("max_evals", "must be at least 10"));
        }
        if self.rms_points < 10 || self.sup_points < 10 || self.cone_points < 10 {
            return Err(param("budget", "point counts must be at least 10"));
        }
        if !(self.final_resolution > 0.0 && self.final_resolution.is_finite()) {
            return Err(param("final_resolution", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindResult {
    pub kind: String,
    /// `None` when the exact evaluation was skipped because `lower_bound`
    /// already exceeded the winning value.
    pub beta: Option<f64>,
    /// Exact one-sided distance from retained data points to the cone.
    pub lower_bound: f64,
    pub rms: f64,
    pub sup_surrogate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitTrace {
    pub starts: usize,
    pub evaluations: usize,
    pub data_points: usize,
    pub kinds: Vec<KindResult>,
}

/// Result of a beta-number fit.
#[derive(Debug, Clone)]
pub struct BetaReport {
    pub window: LocalWindow,
    pub beta: f64,
    pub estimate: HausdorffEstimate,
    pub cone: FittedCone,
    pub family: ConeFamily,
    /// The winning local search converged within its budget.
    pub certified: bool,
    /// `E ∩ B` was empty, so beta is 0 by convention.
    pub empty_window: bool,
    pub seed: u64,
    pub trace: FitTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaReportJson {
    pub window: LocalWindow,
    pub beta: f64,
    pub error_bound: f64,
    pub cone: ConeSpec,
    pub family: ConeFamily,
    pub certified: bool,
    pub empty_window: bool,
    pub seed: u64,
    pub trace: FitTrace,
}

impl BetaReport {
    pub fn to_json(&self) -> BetaReportJson {
        BetaReportJson {
            window: self.window,
            beta: self.beta,
            error_bound: self.estimate.error_bound,
            cone: self.cone.spec(),
            family: self.family,
            certified: self.certified,
            empty_window: self.empty_window,
            seed: self.seed,
            trace: self.trace.clone(),
        }
    }
}

/// Evenly spread subset: at most one point per cubic voxel, with the voxel
/// size tuned so that about `target` points remain. Input order decides
/// which point represents a voxel.
fn voxel_subsample(pts: &[Vec3], target: usize) -> Vec<Vec3> {
    if pts.len() <= target {
        return pts.to_vec();
    }
    let pass = |pts: &mut dyn Iterator<Item = &Vec3>, h: f64| {
        let mut seen = HashSet::with_capacity(2 * target);
        let mut out = Vec::with_capacity(2 * target);
        for p in pts {
            let key = (
                (p.x / h).floor() as i64,
                (p.y / h).floor() as i64,
                (p.z / h).floor() as i64,
            );
            if seen.insert(key) {
                out.push(*p);
            }
        }
        out
    };
    // tune the voxel size on a thinned copy, then make one full pass
    let stride = (pts.len() / (40 * target)).max(1);
    let mut h = 2.0 / (target as f64).sqrt();
    let mut out = Vec::new();
    for _ in 0..12 {
        out = pass(&mut pts.iter().step_by(stride), h);
        let n = out.len();
        if n > target * 3 / 2 {
            h *= 1.2;
        } else if n < target * 2 / 3 {
            h /= 1.2;
        } else {
            break;
        }
    }
    if stride > 1 {
        out = pass(&mut pts.iter(), h);
    }
    out
}

/// Objective data in normalized coordinates (window = unit ball at 0).
const PROPELLER_APEX_SEEDS: usize = 32;

struct Level {
    inside: Vec<Vec3>,
    tree: KdTree,
    spacing: f64,
}

impl Level {
    fn new(inside: Vec<Vec3>, around: &[Vec3], cone_points: usize, area: f64) -> Level {
        // sample spacing giving about `cone_points` samples on the cone
        let spacing = (1.6 * area.max(1.0) / cone_points as f64).sqrt();
        Level {
            inside,
            tree: KdTree::new(around),
            spacing,
        }
    }

    fn unit() -> LocalWindow {
        LocalWindow {
            center: Vec3::zeros(),
            radius: 1.0,
        }
    }

    fn rms(&self, z: &dyn ConeShape) -> f64 {
        let e = if self.inside.is_empty() {
            0.0
        } else {
            self.inside.iter().map(|p| z.distance(p).powi(2)).sum::<f64>() / self.inside.len() as f64
        };
        let zs = z.sample_in_ball(&Self::unit(), self.spacing);
        let zz = if zs.is_empty() || self.tree.is_empty() {
            0.0
        } else {
            zs.iter().map(|q| self.tree.nearest(q).unwrap().1.powi(2)).sum::<f64>() / zs.len() as f64
        };
        (e + zz).sqrt()
    }

    /// `sup dist(p, Z)` over the retained points of `E ∩ B`: a lower bound
    /// for the one-sided distance over all of `E ∩ B`.
    fn e_sup(&self, z: &dyn ConeShape) -> f64 {
        self.inside.iter().map(|p| z.distance(p)).fold(0.0, f64::max)
    }

    fn sup(&self, z: &dyn ConeShape) -> f64 {
        let e = self.inside.iter().map(|p| z.distance(p)).fold(0.0, f64::max);
        let zs = z.sample_in_ball(&Self::unit(), self.spacing);
        let zz = if self.tree.is_empty() {
            0.0
        } else {
            zs.iter().map(|q| self.tree.nearest(q).unwrap().1).fold(0.0, f64::max)
        };
        e + zz
    }
}

/// Parameterization of one cone kind around a seed placement.
#[derive(Clone, Copy)]
struct Chart {
    kind: ShapeKind,
    frame: Frame,
    apex: Vec3,
}

impl Chart {
    fn place(&self, x: &[f64]) -> (Vec3, Frame) {
        let r0 = self.frame;
        match self.kind.dof() {
            3 => {
                let rot = r0 * Frame::from_scaled_axis(Vec3::new(x[0], x[1], 0.0));
                (self.apex + r0 * Vec3::z() * x[2], rot)
            }
            4 => {
                let rot = r0 * Frame::from_scaled_axis(Vec3::new(0.0, x[0], x[1]));
                (self.apex + r0 * Vec3::y() * x[2] + r0 * Vec3::z() * x[3], rot)
            }
            _ => {
                let rot = r0 * Frame::from_scaled_axis(Vec3::new(x[0], x[1], x[2]));
                (self.apex + Vec3::new(x[3], x[4], x[5]), rot)
            }
        }
    }

    fn cone(&self, x: &[f64]) -> FittedCone {
        let (a, f) = self.place(x);
        FittedCone::new(self.kind, a, f)
    }

    fn steps(&self, rot: f64, shift: f64) -> Vec<f64> {
        match self.kind.dof() {
            3 => vec![rot, rot, shift],
            4 => vec![rot, rot, shift, shift],
            _ => vec![rot, rot, rot, shift, shift, shift],
        }
    }

    fn recentered(&self, x: &[f64]) -> Chart {
        let (apex, frame) = self.place(x);
        Chart {
            kind: self.kind,
            frame,
            apex,
        }
    }
}

pub(crate) fn pca_frame(pts: &[Vec3]) -> (Vec3, Frame) {
    if pts.len() < 3 {
        let c = pts.iter().fold(Vec3::zeros(), |a, p| a + p) / pts.len().max(1) as f64;
        return (c, Frame::identity());
    }
    let c = pts.iter().fold(Vec3::zeros(), |a, p| a + p) / pts.len() as f64;
    let mut cov = Matrix3::zeros();
    for p in pts {
        let d = p - c;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let e1: Vec3 = eig.eigenvectors.column(idx[0]).into();
    let e2: Vec3 = eig.eigenvectors.column(idx[1]).into();
    let e3 = e1.cross(&e2);
    let m = Matrix3::from_columns(&[e1, e2, e3]);
    // Orthonormal up to rounding; the iterative projection of
    // `from_matrix` stalls on half-turns.
    (c, Frame::from_matrix_unchecked(m))
}

fn candidate_frames(pca: &Frame, random: usize, seed: u64) -> Vec<Frame> {
    let axes = [pca * Vec3::x(), pca * Vec3::y(), pca * Vec3::z()];
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            // reference z to axis i, reference x to axis j
            let z = axes[i];
            let x = axes[j];
            let base = Frame::from_matrix_unchecked(Matrix3::from_columns(&[x, z.cross(&x), z]));
            for k in 0..6 {
                let spin = Frame::from_scaled_axis(Vec3::z() * (k as f64 * std::f64::consts::PI / 9.0));
                out.push(base * spin);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        out.push(random_rotation(&mut rng));
    }
    out
}

struct KindFit {
    cone: FittedCone,
    rms: f64,
    sup: f64,
    evaluations: usize,
    converged: bool,
}

fn fit_kind(kind: ShapeKind, levels: &[Level; 3], pca: &(Vec3, Frame), budget: &FitBudget, seed: u64) -> KindFit {
    let [screen, rms_level, sup_level] = levels;
    let frames = candidate_frames(&pca.1, budget.random_frames, seed);
    let mut apexes = vec![match kind {
        ShapeKind::Surface(ConeKind::Plane) | ShapeKind::Curve(CurveKind::Line) => pca.0,
        _ => Vec3::zeros(),
    }];
    if (pca.0 - apexes[0]).norm() > 0.05 {
        apexes.push(pca.0);
    }
    if kind == ShapeKind::Curve(CurveKind::Propeller) {
        // 1D data is cheap to screen; spread apex seeds along it so that a
        // center near the edge of the window is found.
        apexes.extend(voxel_subsample(&screen.inside, PROPELLER_APEX_SEEDS));
    }
    let mut pool: Vec<(f64, Chart)> = Vec::new();
    for a in &apexes {
        for f in &frames {
            let ch = Chart {
                kind,
                frame: *f,
                apex: *a,
            };
            let zero = vec![0.0; kind.dof()];
            pool.push((screen.rms(&ch.cone(&zero)), ch));
        }
    }
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut evaluations = pool.len();
    let nm = NelderMead {
        max_evals: budget.max_evals,
        f_tol: 1e-10,
        x_tol: 1e-6,
    };
    let coarse_nm = NelderMead {
        f_tol: 1e-6,
        x_tol: 1e-4,
        ..nm
    };
    let zero = vec![0.0; kind.dof()];
    // local searches on the coarse level, then refinement of the best few
    let mut coarse: Vec<(f64, Chart, bool)> = pool
        .iter()
        .take(budget.starts)
        .map(|(_, ch)| {
            let m = coarse_nm.minimize(|x| screen.rms(&ch.cone(x)), &zero, &ch.steps(0.15, 0.05));
            evaluations += m.evaluations;
            (m.value, ch.recentered(&m.x), m.converged)
        })
        .collect();
    coarse.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<(f64, Chart, bool)> = None;
    for (_, ch, conv) in coarse.iter().take(budget.refine) {
        let m = nm.minimize(|x| rms_level.rms(&ch.cone(x)), &zero, &ch.steps(0.02, 0.01));
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|b| m.value < b.0) {
            best = Some((m.value, ch.recentered(&m.x), *conv && m.converged));
        }
    }
    let (rms, rms_chart, rms_conv) = best.expect("at least one start");
    let rms_sup = sup_level.sup(&rms_chart.cone(&zero));
    // The sup objective is flat to within the data gap and not smooth;
    // asking for 1e-10 there only burns the budget.
    let sup_nm = NelderMead {
        f_tol: 1e-7,
        x_tol: 1e-5,
        ..nm
    };
    let m = sup_nm.minimize(
        |x| sup_level.sup(&rms_chart.cone(x)),
        &zero,
        &rms_chart.steps(0.01, 0.005),
    );
    evaluations += m.evaluations + 1;
    let (cone, sup, converged) = if m.value < rms_sup {
        (rms_chart.cone(&m.x), m.value, m.converged)
    } else {
        (rms_chart.cone(&zero), rms_sup, rms_conv)
    };
    KindFit {
        cone,
        rms,
        sup,
        evaluations,
        converged,
    }
}

/// `beta(x, r)`: the smallest normalized bilateral distance between `E` and a
/// cone of the family in the window.
///
/// Works in coordinates where the window is the unit ball. Candidate frames
/// come from principal axes of `E ∩ B` (every assignment of the reference
/// axes to principal axes, spun about the reference axis) and seeded random
/// rotations. The best `starts` under a coarse least-squares objective are
/// run through Nelder–Mead on a sparse subsample, the best `refine` of those
/// again on a denser one, and the winner is polished on the sup objective.
/// Each kind's cone is then evaluated with [`local_hausdorff_distance`] on
/// the full data, unless an exact lower bound shows it cannot win. Values
/// within the discretization error bar of the smallest count as ties, which
/// go to the kind listed first in the family.
pub fn beta_fit(e: &SampledSet, w: &LocalWindow, family: ConeFamily, budget: &FitBudget) -> Result<BetaReport> {
    budget.validate()?;
    let x = w.center;
    let r = w.radius;
    let kinds = family.kinds();
    // Snapped to a fixed binary grid so that a dilated copy of the data,
    // which differs here by rounding only, yields bit-identical coordinates
    // and hence the same ball membership, subsamples and search path.
    let norm = |p: &Vec3| ((p - x) / r).map(snap);
    let mut around: Vec<Vec3> = e.points_in(&LocalWindow::new(x, 1.2 * r)?).iter().map(norm).collect();
    around.retain(|p| p.norm_squared() <= 1.21);
    around.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let inside: Vec<Vec3> = around.iter().filter(|p| p.norm_squared() <= 1.0).copied().collect();
    if inside.is_empty() {
        let apex = x + Vec3::z() * (2.0 * r);
        let cone = FittedCone::new(kinds[0], apex, Frame::identity());
        let estimate = local_hausdorff_distance(e, &cone, w, r)?;
        return Ok(BetaReport {
            window: *w,
            beta: estimate.value,
            estimate,
            cone,
            family,
            certified: true,
            empty_window: true,
            seed: budget.seed,
            trace: FitTrace {
                starts: 0,
                evaluations: 0,
                data_points: 0,
                kinds: vec![],
            },
        });
    }
    let curve = matches!(kinds[0], ShapeKind::Curve(_));
    let area = if curve { 2.0 } else { 6.0 };
    let subsets = |n: usize| (voxel_subsample(&inside, n), voxel_subsample(&around, n + n / 4));
    let (i3, a3) = subsets(budget.sup_points);
    let (i2, a2) = (
        voxel_subsample(&i3, budget.rms_points),
        voxel_subsample(&a3, budget.rms_points * 5 / 4),
    );
    let (i1, a1) = (voxel_subsample(&i2, 400), voxel_subsample(&a2, 500));
    let levels = [
        Level::new(i1, &a1, 150, area),
        Level::new(i2, &a2, budget.cone_points / 2, area),
        Level::new(i3, &a3, budget.cone_points, area),
    ];
    let pca = pca_frame(&levels[1].inside);
    let final_gap = e.gap().max(budget.final_resolution * r);

    // seeds depend on the kind only, so enlarging the family never changes
    // the fit of a kind it already had
    let mut fits = Vec::new();
    let mut evaluations = 0;
    for kind in &kinds {
        let kind_seed = budget
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(kind_index(kind));
        let kf = fit_kind(*kind, &levels, &pca, budget, kind_seed);
        evaluations += kf.evaluations;
        let lower = levels[2].e_sup(&kf.cone);
        fits.push((kf, lower));
    }
    // exact evaluation, most promising kind first; a kind whose lower bound
    // already exceeds the best value cannot win and is skipped
    let mut order: Vec<usize> = (0..fits.len()).collect();
    order.sort_by(|&a, &b| fits[a].0.sup.total_cmp(&fits[b].0.sup));
    // values closer than the discretization error bar are not told apart,
    // and the kind listed first in the family wins
    let tie = final_gap / r;
    let mut exact: Vec<Option<(HausdorffEstimate, FittedCone)>> = vec![None; fits.len()];
    let mut low = f64::INFINITY;
    for &i in &order {
        let (kf, lower) = &fits[i];
        if *lower > low + tie {
            continue;
        }
        let world = FittedCone::new(kf.cone.kind(), x + kf.cone.apex() * r, kf.cone.frame());
        let est = local_hausdorff_distance(e, &world, w, final_gap)?;
        low = low.min(est.value);
        exact[i] = Some((est, world));
    }
    let win = (0..fits.len())
        .find(|&i| exact[i].as_ref().is_some_and(|(est, _)| est.value <= low + tie))
        .expect("the best kind was evaluated");
    let (estimate, cone) = exact[win].clone().unwrap();
    let converged = fits[win].0.converged;
    let summaries = fits
        .iter()
        .zip(&exact)
        .map(|((kf, lower), beta)| KindResult {
            kind: kf.cone.kind().label().to_string(),
            beta: beta.as_ref().map(|(est, _)| est.value),
            lower_bound: *lower,
            rms: kf.rms,
            sup_surrogate: kf.sup,
            evaluations: kf.evaluations,
            converged: kf.converged,
        })
        .collect();
    Ok(BetaReport {
        window: *w,
        beta: estimate.value,
        estimate,
        cone,
        family,
        certified: converged,
        empty_window: false,
        seed: budget.seed,
        trace: FitTrace {
            starts: budget.starts,
            evaluations,
            data_points: inside.len(),
            kinds: summaries,
        },
    })
}

fn kind_index(k: &ShapeKind) -> u64 {
    match k {
        ShapeKind::Surface(ConeKind::Plane) => 1,
        ShapeKind::Surface(ConeKind::Y) => 2,
        ShapeKind::Surface(ConeKind::T) => 3,
        ShapeKind::Surface(ConeKind::Custom) => 4,
        ShapeKind::Curve(CurveKind::Line) => 5,
        ShapeKind::Curve(CurveKind::Propeller) => 6,
    }
}
