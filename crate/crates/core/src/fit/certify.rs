use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{beta_fit, ConeFamily, ConeSpec, FitBudget};
use crate::error::{param, Result};
use crate::geometry::{LocalWindow, Vec3};
use crate::measure::SampledSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertificateParams {
    /// Probe centers drawn from `E ∩ B(x, 3r)` besides `x` itself.
    pub probe_points: usize,
    /// The top-scale cone counts as centered at `x` when `x` lies within
    /// `center_tol * t` of its center set (or two sampling gaps, if larger).
    pub center_tol: f64,
    pub budget: FitBudget,
}

impl Default for CertificateParams {
    fn default() -> Self {
        CertificateParams {
            probe_points: 6,
            center_tol: 0.1,
            budget: FitBudget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeFit {
    pub center: Vec3,
    pub scale: f64,
    pub beta: f64,
    pub kind: String,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub center: Vec3,
    pub r: f64,
    pub eps: f64,
    pub passed: bool,
    /// Type of the cone fitted at `x` at the largest scale.
    pub ball_type: String,
    pub top_cone: ConeSpec,
    /// Distance from `x` to the center set of the top-scale cone.
    pub center_offset: f64,
    pub centered: bool,
    pub max_beta: f64,
    /// Every fit converged within its budget.
    pub certified: bool,
    pub fits: Vec<ProbeFit>,
}

impl CertificateReport {
    pub fn failures(&self) -> impl Iterator<Item = &ProbeFit> {
        self.fits.iter().filter(move |f| f.beta > self.eps)
    }
}

/// Finite-sample check that `B(x, r)` looks like a biHölder ball: every
/// probe `y` in `E ∩ B(x, 3r)` (plus `x`) and every scale `t` of
/// `scale_grid` (each in `(0, 3r]`) must have `beta(y, t) <= eps` against
/// planes, Y and T cones, and the cone fitted at `x` at the largest scale
/// must be centered at `x`. Passing does not prove the property.
pub fn biholder_certificate(
    e: &SampledSet,
    x: Vec3,
    r: f64,
    eps: f64,
    scale_grid: &[f64],
    params: &CertificateParams,
) -> Result<CertificateReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(param("eps", format!("must be positive, got {eps}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(param("r", format!("must be positive, got {r}")));
    }
    if scale_grid.is_empty() || scale_grid.iter().any(|t| !(*t > 0.0 && *t <= 3.0 * r * (1.0 + 1e-12))) {
        return Err(param("scale_grid", "scales must lie in (0, 3r]"));
    }
    let top = scale_grid.iter().cloned().fold(0.0, f64::max);

    let mut candidates = e.points_in(&LocalWindow::new(x, 3.0 * r)?);
    let mut rng = ChaCha8Rng::seed_from_u64(params.budget.seed);
    candidates.shuffle(&mut rng);
    let mut probes = vec![x];
    probes.extend(candidates.into_iter().take(params.probe_points));

    let mut fits = Vec::new();
    let mut top_fit = None;
    for (i, y) in probes.iter().enumerate() {
        for &t in scale_grid {
            let rep = beta_fit(e, &LocalWindow::new(*y, t)?, ConeFamily::PlanesYT, &params.budget)?;
            fits.push(ProbeFit {
                center: *y,
                scale: t,
                beta: rep.beta,
                kind: rep.cone.kind().label().to_string(),
                certified: rep.certified,
            });
            if i == 0 && t == top {
                top_fit = Some(rep);
            }
        }
    }
    let top_fit = top_fit.expect("x is probed at the top scale");
    let center_offset = top_fit.cone.distance_to_center_set(&x);
    let centered = center_offset <= (params.center_tol * top).max(2.0 * e.gap());
    let max_beta = fits.iter().map(|f| f.beta).fold(0.0, f64::max);
    Ok(CertificateReport {
        center: x,
        r,
        eps,
        passed: max_beta <= eps && centered,
        ball_type: top_fit.cone.kind().label().to_string(),
        top_cone: top_fit.cone.spec(),
        center_offset,
        centered,
        max_beta,
        certified: fits.iter().all(|f| f.certified),
        fits,
    })
}
