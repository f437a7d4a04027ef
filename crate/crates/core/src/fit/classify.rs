use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cone::DensityConstants;
use crate::error::{param, Error, Result};
use crate::geometry::Vec3;
use crate::measure::{density_profile, GaugeFunction, SampledSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointType {
    P,
    Y,
    T,
}

impl std::fmt::Display for PointType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PointType::P => "P",
            PointType::Y => "Y",
            PointType::T => "T",
        })
    }
}

/// Density cut points. The defaults sit halfway between the plane and Y
/// densities and halfway between the Y density and `d_T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    pub p_y: f64,
    pub y_t: f64,
}

impl ClassifyThresholds {
    pub fn from_constants(c: &DensityConstants) -> Self {
        ClassifyThresholds {
            p_y: (PI + 1.5 * PI) / 2.0,
            y_t: (1.5 * PI + c.d_t) / 2.0,
        }
    }

    pub fn label(&self, theta: f64) -> PointType {
        if theta < self.p_y {
            PointType::P
        } else if theta < self.y_t {
            PointType::Y
        } else {
            PointType::T
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p_y.is_finite() && self.y_t.is_finite() && self.p_y < self.y_t) {
            return Err(param("thresholds", "need finite p_y < y_t"));
        }
        Ok(())
    }
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        Self::from_constants(&DensityConstants::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointLabel {
    pub label: PointType,
    /// `theta(x, r) e^{lambda A(r)}` at `radius`.
    pub theta_estimate: f64,
    /// Smallest reliable radius of the grid, where the estimate is taken.
    pub radius: f64,
    /// Reliable radii of the grid.
    pub radii_used: Vec<f64>,
    pub thresholds: ClassifyThresholds,
}

/// Labels `x` as a P, Y or T point from its corrected density at the
/// smallest reliable radius of `radii`. The density itself is reported; no
/// claim is made about which cone the blow-ups converge to.
pub fn classify_point(
    e: &SampledSet,
    x: Vec3,
    gauge: &GaugeFunction,
    lambda: f64,
    radii: &[f64],
    thresholds: &ClassifyThresholds,
) -> Result<PointLabel> {
    thresholds.validate()?;
    let profile = density_profile(e, x, radii, gauge, lambda)?;
    let used = profile.reliable_indices();
    let Some(&i) = used.first() else {
        return Err(Error::ClassificationUnavailable(format!(
            "no radius of the grid is at least 3 sampling gaps ({})",
            3.0 * e.gap()
        )));
    };
    let theta = profile.corrected()[i];
    Ok(PointLabel {
        label: thresholds.label(theta),
        theta_estimate: theta,
        radius: profile.radii[i],
        radii_used: used.iter().map(|&j| profile.radii[j]).collect(),
        thresholds: *thresholds,
    })
}
