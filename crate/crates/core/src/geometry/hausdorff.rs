use serde::{Deserialize, Serialize};

use super::{ConeShape, LocalWindow};
use crate::error::{param, Error, Result};
use crate::measure::SampledSet;

/// Normalized bilateral distance `d_{x,r}(E, Z)` with its discretization
/// error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HausdorffEstimate {
    /// `e_side + z_side`.
    pub value: f64,
    /// `(1/r) sup { dist(y, Z) : y in E ∩ B }`, exact over the samples.
    pub e_side: f64,
    /// `(1/r) sup { dist(z, E) : z in Z ∩ B }` over a covering of `Z ∩ B`.
    pub z_side: f64,
    /// The true `z_side` lies in `[z_side, z_side + error_bound]`.
    pub error_bound: f64,
    pub e_samples: usize,
    pub z_samples: usize,
}

/// `d_{x,r}(E, Z)`: the sum of the two normalized one-sided suprema over the
/// window. An empty side contributes 0. `Z ∩ B` is covered at resolution
/// `sampling_gap`, which is also the error bar (after normalization).
pub fn local_hausdorff_distance(
    e: &SampledSet,
    z: &dyn ConeShape,
    w: &LocalWindow,
    sampling_gap: f64,
) -> Result<HausdorffEstimate> {
    if !(sampling_gap > 0.0 && sampling_gap.is_finite()) {
        return Err(param("sampling_gap", format!("must be positive, got {sampling_gap}")));
    }
    let pts = e.points();
    let tree = e.tree();
    let inside = tree.within(&w.center, w.radius);
    let e_sup = inside.iter().map(|&i| z.distance(&pts[i])).fold(0.0f64, f64::max);
    let zs = z.sample_in_ball(w, sampling_gap);
    let mut z_sup = 0.0f64;
    for q in &zs {
        match tree.nearest(q) {
            Some((_, d)) => z_sup = z_sup.max(d),
            None => return Err(Error::InvalidInput("sampled set is empty".into())),
        }
    }
    let r = w.radius;
    Ok(HausdorffEstimate {
        value: (e_sup + z_sup) / r,
        e_side: e_sup / r,
        z_side: z_sup / r,
        error_bound: if zs.is_empty() { 0.0 } else { sampling_gap / r },
        e_samples: inside.len(),
        z_samples: zs.len(),
    })
}
