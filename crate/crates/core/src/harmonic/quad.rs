use std::collections::HashMap;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Composite Gauss-Legendre rule on `[0, T]`: panels of one period of the
/// highest retained mode, split at the curve's breakpoints, with
/// `nodes_per_period` nodes on a full panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadRule {
    pub nodes_per_period: usize,
    /// Gauss-Legendre nodes on each radial panel.
    pub radial_nodes: usize,
}

impl Default for QuadRule {
    fn default() -> Self {
        QuadRule {
            nodes_per_period: 64,
            radial_nodes: 16,
        }
    }
}

const MIN_PANEL_NODES: usize = 8;
const RADIAL_ZERO_LEVELS: usize = 12;

pub(crate) struct Nodes {
    pub t: Vec<f64>,
    pub w: Vec<f64>,
}

#[derive(Default)]
struct Rules(HashMap<usize, Vec<(f64, f64)>>);

impl Rules {
    fn push(&mut self, n: usize, a: f64, b: f64, out: &mut Nodes) {
        let pairs = self.0.entry(n).or_insert_with(|| {
            GaussLegendre::new(NonZeroUsize::new(n).expect("positive node count"))
                .as_node_weight_pairs()
                .to_vec()
        });
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        for &(x, w) in pairs.iter() {
            out.t.push(mid + half * x);
            out.w.push(half * w);
        }
    }
}

impl QuadRule {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_period < MIN_PANEL_NODES {
            return Err(param("nodes_per_period", format!("need at least {MIN_PANEL_NODES}")));
        }
        if self.radial_nodes < 2 {
            return Err(param("radial_nodes", "need at least 2"));
        }
        Ok(())
    }

    /// Nodes on `[0, T]` resolving `modes` sine modes.
    pub(crate) fn nodes(&self, t_max: f64, modes: usize, breaks: &[f64]) -> Result<Nodes> {
        self.validate()?;
        let period = 2.0 * t_max / modes.max(1) as f64;
        let panels = ((t_max / period).ceil() as usize).max(1);
        let mut cuts: Vec<f64> = (0..=panels).map(|i| t_max * i as f64 / panels as f64).collect();
        cuts.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < t_max));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|b, a| *b - *a <= 1e-14 * t_max);
        *cuts.last_mut().unwrap() = t_max;

        let mut rules = Rules::default();
        let mut out = Nodes {
            t: Vec::new(),
            w: Vec::new(),
        };
        for w in cuts.windows(2) {
            let n = ((self.nodes_per_period as f64 * (w[1] - w[0]) / period).ceil() as usize)
                .clamp(MIN_PANEL_NODES, self.nodes_per_period);
            rules.push(n, w[0], w[1], &mut out);
        }
        Ok(out)
    }

    /// Nodes on `[0, 1]` for integrands carrying `rho^(rate - 1)`: dyadic
    /// panels toward `rho = 0` for the fractional power there, and panels
    /// `[1 - 2^-j, 1 - 2^-(j+1)]` toward `rho = 1` until the last one is
    /// shorter than `1 / rate`.
    pub(crate) fn radial_nodes(&self, rate: f64) -> Result<Nodes> {
        self.validate()?;
        let levels = (rate.max(1.0).log2().ceil() as usize + 2).min(40);
        let mut rules = Rules::default();
        let mut out = Nodes {
            t: Vec::new(),
            w: Vec::new(),
        };
        let mut a = 0.0;
        for j in (1..RADIAL_ZERO_LEVELS).rev() {
            let b = 0.5f64.powi(j as i32 + 1);
            rules.push(self.radial_nodes, a, b, &mut out);
            a = b;
        }
        for j in 1..=levels {
            let b = if j == levels { 1.0 } else { 1.0 - 0.5f64.powi(j as i32) };
            rules.push(self.radial_nodes, a, b, &mut out);
            a = b;
        }
        Ok(out)
    }
}
