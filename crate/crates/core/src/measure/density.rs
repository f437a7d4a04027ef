use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{h2_in_ball, GaugeFunction, SampleMode, SampledSet};
use crate::error::{param, Result};
use crate::geometry::{LocalWindow, Vec3};
use crate::tolerance::RELIABLE_GAP_FACTOR;

/// `r -> theta(x, r) = r^-2 H^2(E ∩ B(x, r))` on a radius grid, with the
/// gauge integral `A(r)` needed for the corrected density `theta e^{lambda A}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub center: Vec3,
    pub radii: Vec<f64>,
    pub theta: Vec<f64>,
    pub lambda: f64,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    /// `false` for radii below three sampling gaps.
    pub reliable: Vec<bool>,
    pub mode: SampleMode,
    pub gauge: GaugeFunction,
}

impl DensityProfile {
    /// `theta(x, r_i) e^{lambda A(r_i)}`.
    pub fn corrected(&self) -> Vec<f64> {
        self.theta
            .iter()
            .zip(&self.a)
            .map(|(t, a)| t * (self.lambda * a).exp())
            .collect()
    }

    pub fn reliable_indices(&self) -> Vec<usize> {
        (0..self.radii.len()).filter(|&i| self.reliable[i]).collect()
    }

    /// CSV series `r,theta,A`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,theta,A")?;
        for i in 0..self.radii.len() {
            writeln!(out, "{},{},{}", self.radii[i], self.theta[i], self.a[i])?;
        }
        Ok(())
    }
}

/// Density ratios of `E` at `x` on the given radii. Radii below three
/// sampling gaps are computed and flagged, not dropped.
pub fn density_profile(
    e: &SampledSet,
    x: Vec3,
    radii: &[f64],
    gauge: &GaugeFunction,
    lambda: f64,
) -> Result<DensityProfile> {
    if radii.is_empty() {
        return Err(param("radii", "grid is empty"));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(param("radii", "must be positive and strictly increasing"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(param("lambda", format!("must be positive, got {lambda}")));
    }
    gauge.validate()?;
    let mut theta = Vec::with_capacity(radii.len());
    for &r in radii {
        let m = h2_in_ball(e, &LocalWindow::new(x, r)?).value;
        theta.push(m / (r * r));
    }
    Ok(DensityProfile {
        center: x,
        radii: radii.to_vec(),
        theta,
        lambda,
        a: radii.iter().map(|&r| gauge.a_integral(r)).collect(),
        reliable: radii
            .iter()
            .map(|&r| r >= RELIABLE_GAP_FACTOR * e.gap() * (1.0 - 1e-12))
            .collect(),
        mode: e.mode(),
        gauge: gauge.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityViolation {
    pub r_lo: f64,
    pub r_hi: f64,
    /// Corrected density at `r_lo` and `r_hi`.
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityAudit {
    pub slack: f64,
    pub violations: Vec<MonotonicityViolation>,
    /// Consecutive grid pairs not audited because a radius is unreliable.
    pub skipped_pairs: usize,
}

impl MonotonicityAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reports each consecutive pair of reliable radii where the corrected
/// density `theta e^{lambda A}` drops by more than `slack`.
pub fn monotonicity_audit(profile: &DensityProfile, slack: f64) -> Result<MonotonicityAudit> {
    if !(slack >= 0.0 && slack.is_finite()) {
        return Err(param("slack", format!("must be nonnegative, got {slack}")));
    }
    let c = profile.corrected();
    let mut violations = Vec::new();
    let mut skipped = 0;
    for i in 0..profile.radii.len().saturating_sub(1) {
        if !(profile.reliable[i] && profile.reliable[i + 1]) {
            skipped += 1;
            continue;
        }
        if c[i + 1] < c[i] - slack {
            violations.push(MonotonicityViolation {
                r_lo: profile.radii[i],
                r_hi: profile.radii[i + 1],
                before: c[i],
                after: c[i + 1],
            });
        }
    }
    Ok(MonotonicityAudit {
        slack,
        violations,
        skipped_pairs: skipped,
    })
}

pub const CONE_LIKE_NOTE: &str =
    "density nearly constant: E is expected to be close to a minimal cone centered at x on this annulus";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantDensityInterval {
    pub a: f64,
    pub b: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub note: String,
}

/// Runs of reliable radii on which `theta` varies by at most `eps`.
///
/// Scans left to right, extending each run as long as `max - min <= eps`;
/// runs with at least three radii are reported and the scan resumes after
/// the run, otherwise it resumes at the next radius.
pub fn constant_density_detector(profile: &DensityProfile, eps: f64) -> Result<Vec<ConstantDensityInterval>> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(param("eps", format!("must be nonnegative, got {eps}")));
    }
    let idx = profile.reliable_indices();
    let th = &profile.theta;
    let mut out = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let (mut lo, mut hi) = (th[idx[i]], th[idx[i]]);
        let mut j = i + 1;
        while j < idx.len() {
            // reliable indices must be contiguous on the grid
            if idx[j] != idx[j - 1] + 1 {
                break;
            }
            let v = th[idx[j]];
            if v.max(hi) - v.min(lo) > eps {
                break;
            }
            lo = lo.min(v);
            hi = hi.max(v);
            j += 1;
        }
        if j - i >= 3 {
            out.push(ConstantDensityInterval {
                a: profile.radii[idx[i]],
                b: profile.radii[idx[j - 1]],
                theta_min: lo,
                theta_max: hi,
                note: CONE_LIKE_NOTE.to_string(),
            });
            i = j;
        } else {
            i += 1;
        }
    }
    Ok(out)
}
