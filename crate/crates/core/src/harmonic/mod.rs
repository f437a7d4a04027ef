//! Cone versus harmonic extension of a boundary curve over a planar sector.
//!
//! A Lipschitz curve `f: [0, T] -> R^m` with `f(0) = f(T) = 0` is extended to
//! the sector `D_T` of angle `T < pi` either homogeneously, `F(rho, t) = rho
//! f(t)`, or harmonically through its sine series. The harmonic extension
//! lowers the Dirichlet energy by at least the factor `2 lambda / (1 +
//! lambda^2)` with `lambda = T / pi`, and for small `f` the graph area drops
//! accordingly.

mod arc;
mod quad;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

pub use arc::{great_circle_verdict, GreatCircleReport};
pub use quad::QuadRule;

type CurveFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum CurveData {
    /// Piecewise-linear interpolation of samples.
    Samples {
        t: Vec<f64>,
        f: Vec<Vec<f64>>,
    },
    /// `sum_k c_k sin(pi k t / T)`.
    Sines {
        coeffs: Vec<Vec<f64>>,
    },
    ClosedForm {
        f: CurveFn,
        df: CurveFn,
    },
}

/// Boundary data `f: [0, T] -> R^m` with `f(0) = f(T) = 0` and a Lipschitz
/// bound `tau`.
#[derive(Clone)]
pub struct BoundaryCurve {
    t_max: f64,
    m: usize,
    tau: f64,
    data: CurveData,
}

impl fmt::Debug for BoundaryCurve {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.data {
            CurveData::Samples { t, .. } => format!("samples({})", t.len()),
            CurveData::Sines { coeffs } => format!("sines({})", coeffs.len()),
            CurveData::ClosedForm { .. } => "closed-form".to_string(),
        };
        fm.debug_struct("BoundaryCurve")
            .field("t_max", &self.t_max)
            .field("m", &self.m)
            .field("tau", &self.tau)
            .field("data", &kind)
            .finish()
    }
}

/// Serialized form of a boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveSpec {
    Samples {
        #[serde(rename = "T")]
        t_max: Option<f64>,
        t: Vec<f64>,
        f: Vec<Vec<f64>>,
    },
    Sines {
        #[serde(rename = "T")]
        t_max: f64,
        sines: Vec<Vec<f64>>,
    },
}

fn check_angle(t_max: f64) -> Result<()> {
    if !(t_max > 0.0 && t_max < PI) {
        return Err(param("T", format!("arc angle must lie in (0, pi), got {t_max}")));
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn endpoint_tol(scale: f64) -> f64 {
    1e-12 * scale.max(1.0)
}

impl BoundaryCurve {
    /// Piecewise-linear curve through `(t_i, f_i)`. The grid must run from 0
    /// to `T` strictly increasing; the endpoint values must vanish (up to
    /// `1e-12`) and are then set to exactly zero.
    pub fn from_samples(t: Vec<f64>, f: Vec<Vec<f64>>) -> Result<Self> {
        if t.len() < 2 || t.len() != f.len() {
            return Err(Error::InvalidInput(format!(
                "need at least 2 samples with one value each, got {} times and {} values",
                t.len(),
                f.len()
            )));
        }
        let m = f[0].len();
        if m == 0 || f.iter().any(|v| v.len() != m) {
            return Err(Error::InvalidInput(
                "sample values must share a nonzero dimension".into(),
            ));
        }
        if t.iter().chain(f.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        if t[0] != 0.0 {
            return Err(Error::InvalidInput(format!(
                "samples must start at t = 0, got {}",
                t[0]
            )));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("sample times must be strictly increasing".into()));
        }
        let t_max = *t.last().unwrap();
        check_angle(t_max)?;
        let scale = f.iter().map(|v| norm(v)).fold(0.0, f64::max);
        let n = f.len();
        for end in [0, n - 1] {
            if norm(&f[end]) > endpoint_tol(scale) {
                return Err(Error::InvalidInput(format!(
                    "boundary values must vanish at both ends, |f| = {:e} at t = {}",
                    norm(&f[end]),
                    t[end]
                )));
            }
        }
        let mut f = f;
        f[0].iter_mut().for_each(|x| *x = 0.0);
        f[n - 1].iter_mut().for_each(|x| *x = 0.0);
        let tau = (0..n - 1)
            .map(|i| {
                let d: Vec<f64> = (0..m).map(|c| f[i + 1][c] - f[i][c]).collect();
                norm(&d) / (t[i + 1] - t[i])
            })
            .fold(0.0, f64::max);
        Ok(BoundaryCurve {
            t_max,
            m,
            tau,
            data: CurveData::Samples { t, f },
        })
    }

    /// `f(t) = sum_k coeffs[k-1] sin(pi k t / T)`. The Lipschitz bound is the
    /// absolutely convergent majorant `sum_k (pi k / T) |c_k|`.
    pub fn from_sines(t_max: f64, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        check_angle(t_max)?;
        let m = coeffs.first().map_or(0, |c| c.len());
        if m == 0 || coeffs.iter().any(|c| c.len() != m) {
            return Err(Error::InvalidInput(
                "sine coefficients must share a nonzero dimension".into(),
            ));
        }
        if coeffs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite sine coefficient".into()));
        }
        let tau = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| PI * (i + 1) as f64 / t_max * norm(c))
            .sum();
        Ok(BoundaryCurve {
            t_max,
            m,
            tau,
            data: CurveData::Sines { coeffs },
        })
    }

    /// Closed-form curve with derivative `df`. The Lipschitz bound is the
    /// largest `|df|` over a grid of 8193 points.
    pub fn closed_form<F, D>(t_max: f64, m: usize, f: F, df: D) -> Result<Self>
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        D: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        check_angle(t_max)?;
        if m == 0 {
            return Err(param("m", "codomain dimension must be positive"));
        }
        let n = 8192;
        let mut tau: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..=n {
            let t = t_max * i as f64 / n as f64;
            let (v, d) = (f(t), df(t));
            if v.len() != m || d.len() != m || v.iter().chain(&d).any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "curve is not a finite R^{m} value at t = {t}"
                )));
            }
            tau = tau.max(norm(&d));
            scale = scale.max(norm(&v));
        }
        for t in [0.0, t_max] {
            if norm(&f(t)) > endpoint_tol(scale) {
                return Err(Error::InvalidInput(format!("boundary values must vanish at t = {t}")));
            }
        }
        Ok(BoundaryCurve {
            t_max,
            m,
            tau,
            data: CurveData::ClosedForm {
                f: Arc::new(f),
                df: Arc::new(df),
            },
        })
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Self> {
        match spec {
            CurveSpec::Samples { t_max, t, f } => {
                let c = Self::from_samples(t.clone(), f.clone())?;
                if let Some(tm) = t_max {
                    if (tm - c.t_max).abs() > 1e-12 * tm.abs().max(1.0) {
                        return Err(Error::InvalidInput(format!(
                            "T = {tm} disagrees with the last sample time {}",
                            c.t_max
                        )));
                    }
                }
                Ok(c)
            }
            CurveSpec::Sines { t_max, sines } => Self::from_sines(*t_max, sines.clone()),
        }
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn lip_bound(&self) -> f64 {
        self.tau
    }

    /// Interior breakpoints where the curve may fail to be smooth.
    pub fn breakpoints(&self) -> &[f64] {
        match &self.data {
            CurveData::Samples { t, .. } => &t[1..t.len() - 1],
            _ => &[],
        }
    }

    fn segment(t: &[f64], x: f64) -> usize {
        t.partition_point(|&s| s <= x).clamp(1, t.len() - 1) - 1
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        match &self.data {
            CurveData::Samples { t, f } => {
                let i = Self::segment(t, x);
                let s = ((x - t[i]) / (t[i + 1] - t[i])).clamp(0.0, 1.0);
                (0..self.m).map(|c| f[i][c] + s * (f[i + 1][c] - f[i][c])).collect()
            }
            CurveData::Sines { coeffs } => {
                let mut out = vec![0.0; self.m];
                for (k, c) in coeffs.iter().enumerate() {
                    let s = (PI * (k + 1) as f64 * x / self.t_max).sin();
                    out.iter_mut().zip(c).for_each(|(o, ci)| *o += ci * s);
                }
                out
            }
            CurveData::ClosedForm { f, .. } => f(x),
        }
    }

    /// Derivative; on a sample grid, the slope of the segment containing `x`.
    pub fn deriv(&self, x: f64) -> Vec<f64> {
        match &self.data {
            CurveData::Samples { t, f } => {
                let i = Self::segment(t, x);
                let h = t[i + 1] - t[i];
                (0..self.m).map(|c| (f[i + 1][c] - f[i][c]) / h).collect()
            }
            CurveData::Sines { coeffs } => {
                let nu = PI / self.t_max;
                let mut out = vec![0.0; self.m];
                for (k, c) in coeffs.iter().enumerate() {
                    let w = nu * (k + 1) as f64;
                    let s = w * (w * x).cos();
                    out.iter_mut().zip(c).for_each(|(o, ci)| *o += ci * s);
                }
                out
            }
            CurveData::ClosedForm { df, .. } => df(x),
        }
    }

    /// `||f'||_2^2`, exact for samples and sine sums.
    fn f_prime_l2_sq(&self, rule: &quad::Nodes) -> f64 {
        match &self.data {
            CurveData::Samples { t, f } => (0..t.len() - 1)
                .map(|i| {
                    let h = t[i + 1] - t[i];
                    (0..self.m).map(|c| (f[i + 1][c] - f[i][c]).powi(2)).sum::<f64>() / h
                })
                .sum(),
            CurveData::Sines { coeffs } => {
                PI * PI / (2.0 * self.t_max)
                    * coeffs
                        .iter()
                        .enumerate()
                        .map(|(i, c)| ((i + 1) as f64).powi(2) * norm_sq(c))
                        .sum::<f64>()
            }
            CurveData::ClosedForm { df, .. } => rule.t.iter().zip(&rule.w).map(|(&t, &w)| w * norm_sq(&df(t))).sum(),
        }
    }
}

/// Sine coefficients `beta_1..beta_K` of a boundary curve with Parseval
/// diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineExpansion {
    #[serde(rename = "T")]
    pub t_max: f64,
    /// `beta[k-1]` is `beta_k` in `R^m`.
    pub beta: Vec<Vec<f64>>,
    pub f_prime_l2_sq: f64,
    /// `||f'||^2 - (pi^2 / 2T) sum_k k^2 |beta_k|^2`; nonnegative up to
    /// quadrature error.
    pub parseval_residual: f64,
    /// Bound on the energy carried by the modes above `K`; it dominates both
    /// the cone and the harmonic energy tails.
    pub tail_bound: f64,
}

impl SineExpansion {
    pub fn k_max(&self) -> usize {
        self.beta.len()
    }

    /// Partial sum of the series at `t`.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let m = self.beta.first().map_or(0, |b| b.len());
        let mut out = vec![0.0; m];
        for (k, b) in self.beta.iter().enumerate() {
            let s = (PI * (k + 1) as f64 * t / self.t_max).sin();
            out.iter_mut().zip(b).for_each(|(o, bi)| *o += bi * s);
        }
        out
    }

    /// Index of the last mode that is not negligible against the largest.
    fn effective_modes(&self) -> usize {
        let big = self.beta.iter().map(|b| norm(b)).fold(0.0, f64::max);
        if big == 0.0 {
            return 0;
        }
        self.beta
            .iter()
            .rposition(|b| norm(b) > 1e-15 * big)
            .map_or(0, |i| i + 1)
    }
}

/// Fills `out[k]` with `sin((k+1) theta)` and `cos((k+1) theta)` by the
/// three-term recurrence.
fn harmonics(theta: f64, sin_out: &mut [f64], cos_out: Option<&mut [f64]>) {
    let (s1, c1) = theta.sin_cos();
    let (mut sp, mut s) = (0.0, s1);
    for o in sin_out.iter_mut() {
        *o = s;
        let next = 2.0 * c1 * s - sp;
        sp = s;
        s = next;
    }
    if let Some(cos_out) = cos_out {
        let (mut cp, mut c) = (1.0, c1);
        for o in cos_out.iter_mut() {
            *o = c;
            let next = 2.0 * c1 * c - cp;
            cp = c;
            c = next;
        }
    }
}

fn tolerance(scale: f64) -> f64 {
    1e-9 * scale + 1e-14
}

/// `beta_k = (2/T) int_0^T f(t) sin(pi k t / T) dt` for `k = 1..=k_max` by
/// composite Gauss-Legendre quadrature.
pub fn sine_coefficients(curve: &BoundaryCurve, k_max: usize, quad: &QuadRule) -> Result<SineExpansion> {
    if k_max == 0 {
        return Err(param("K", "need at least one mode"));
    }
    let t_max = curve.t_max;
    let rule = quad.nodes(t_max, k_max, curve.breakpoints())?;
    let m = curve.m;
    let mut beta = vec![vec![0.0; m]; k_max];
    let mut sines = vec![0.0; k_max];
    for (&t, &w) in rule.t.iter().zip(&rule.w) {
        let v = curve.eval(t);
        harmonics(PI * t / t_max, &mut sines, None);
        for (b, s) in beta.iter_mut().zip(&sines) {
            let ws = w * s;
            b.iter_mut().zip(&v).for_each(|(bi, vi)| *bi += ws * vi);
        }
    }
    beta.iter_mut().flatten().for_each(|b| *b *= 2.0 / t_max);
    let f_prime_l2_sq = curve.f_prime_l2_sq(&rule);
    if beta.iter().flatten().any(|b| !b.is_finite()) || !f_prime_l2_sq.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite coefficients or derivative norm ({f_prime_l2_sq}) over {} nodes",
            rule.t.len()
        )));
    }
    let partial = parseval_sum(&beta, t_max);
    let residual = f_prime_l2_sq - partial;
    if residual < -tolerance(f_prime_l2_sq) {
        return Err(Error::Quadrature(format!(
            "Parseval sum {partial:e} exceeds ||f'||^2 = {f_prime_l2_sq:e} (residual {residual:e}) with {} nodes",
            rule.t.len()
        )));
    }
    Ok(SineExpansion {
        t_max,
        beta,
        f_prime_l2_sq,
        parseval_residual: residual,
        tail_bound: residual.max(0.0),
    })
}

fn parseval_sum(beta: &[Vec<f64>], t_max: f64) -> f64 {
    PI * PI / (2.0 * t_max)
        * beta
            .iter()
            .enumerate()
            .map(|(i, b)| ((i + 1) as f64).powi(2) * norm_sq(b))
            .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energies {
    /// Dirichlet energy of the homogeneous extension `rho f(t)`.
    pub cone: f64,
    /// Dirichlet energy of the harmonic extension.
    pub harmonic: f64,
    pub lambda: f64,
    /// `2 lambda / (1 + lambda^2)`.
    pub ratio_bound: f64,
}

/// Dirichlet energies of the cone and harmonic extensions from the sine
/// coefficients, checked against `(1/2) ||f'||^2 <= E_cone <= ||f'||^2` and
/// `E_harmonic <= ||f'||^2`. The lower bound is allowed the Parseval
/// residual, which bounds the energy of the omitted modes. `T = pi` is
/// accepted here.
pub fn energies(beta: &[Vec<f64>], t_max: f64, f_prime_l2_sq: f64) -> Result<Energies> {
    if !(t_max > 0.0 && t_max <= PI) {
        return Err(param("T", format!("must lie in (0, pi], got {t_max}")));
    }
    if !f_prime_l2_sq.is_finite() || f_prime_l2_sq < 0.0 {
        return Err(param(
            "f_prime_l2_sq",
            format!("must be finite and nonnegative, got {f_prime_l2_sq}"),
        ));
    }
    if beta.iter().flatten().any(|b| !b.is_finite()) {
        return Err(Error::InvalidInput("non-finite sine coefficient".into()));
    }
    let mut cone = 0.0;
    let mut harmonic = 0.0;
    for (i, b) in beta.iter().enumerate() {
        let k = (i + 1) as f64;
        let b2 = norm_sq(b);
        cone += (k * k * PI * PI + t_max * t_max) / (4.0 * t_max) * b2;
        harmonic += PI / 2.0 * k * b2;
    }
    let tail = (f_prime_l2_sq - parseval_sum(beta, t_max)).max(0.0);
    let tol = tolerance(f_prime_l2_sq.max(cone));
    if 0.5 * f_prime_l2_sq > cone + tail + tol || cone > f_prime_l2_sq + tol {
        return Err(Error::InconsistentEnergies(format!(
            "cone energy {cone:e} outside [{:e}, {f_prime_l2_sq:e}] (tail {tail:e})",
            0.5 * f_prime_l2_sq
        )));
    }
    if harmonic > f_prime_l2_sq + tol {
        return Err(Error::InconsistentEnergies(format!(
            "harmonic energy {harmonic:e} exceeds ||f'||^2 = {f_prime_l2_sq:e}"
        )));
    }
    let lambda = t_max / PI;
    Ok(Energies {
        cone,
        harmonic,
        lambda,
        ratio_bound: 2.0 * lambda / (1.0 + lambda * lambda),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaComparison {
    /// Area of the graph of the cone extension minus the area of the sector.
    pub excess_cone: f64,
    /// Same for the truncated harmonic extension.
    pub excess_harmonic: f64,
    /// `excess_harmonic / excess_cone`, absent when the cone excess vanishes.
    pub eta: Option<f64>,
    /// `ratio_bound / (1 - (1+T)^2 tau^2 / 2)`, the a priori bound on `eta`.
    pub eta_bound: f64,
}

/// `sqrt(1 + u) - 1` without cancellation.
fn area_density(u: f64) -> f64 {
    u / ((1.0 + u).sqrt() + 1.0)
}

/// Graph area excesses of the two extensions over the sector, with the
/// integrand `sqrt(1 + |grad|^2)`. The cone excess reduces to a 1D integral;
/// the harmonic one is a 2D quadrature graded toward the arc.
pub fn area_comparison(curve: &BoundaryCurve, expansion: &SineExpansion, quad: &QuadRule) -> Result<AreaComparison> {
    let t_max = curve.t_max;
    if (expansion.t_max - t_max).abs() > 1e-12 * t_max {
        return Err(Error::InvalidInput(format!(
            "expansion angle {} does not match the curve angle {t_max}",
            expansion.t_max
        )));
    }
    let lower = 1.0 - (1.0 + t_max).powi(2) * curve.tau.powi(2) / 2.0;
    if lower <= 0.0 {
        return Err(Error::Precondition(format!(
            "Lipschitz bound tau = {} is too large: the area lower bound needs (1+T)^2 tau^2 < 2",
            curve.tau
        )));
    }
    let lambda = t_max / PI;
    let ratio_bound = 2.0 * lambda / (1.0 + lambda * lambda);

    // Cone: |grad F|^2 = |f|^2 + |f'|^2 does not depend on rho.
    let rule = quad.nodes(t_max, expansion.k_max(), curve.breakpoints())?;
    let excess_cone = 0.5
        * rule
            .t
            .iter()
            .zip(&rule.w)
            .map(|(&t, &w)| w * area_density(norm_sq(&curve.eval(t)) + norm_sq(&curve.deriv(t))))
            .sum::<f64>();

    let excess_harmonic = harmonic_excess(expansion, quad)?;
    if !(excess_cone.is_finite() && excess_harmonic.is_finite()) {
        return Err(Error::Quadrature(format!(
            "non-finite area excess (cone {excess_cone}, harmonic {excess_harmonic})"
        )));
    }
    Ok(AreaComparison {
        excess_cone,
        excess_harmonic,
        eta: (excess_cone > 0.0).then(|| excess_harmonic / excess_cone),
        eta_bound: ratio_bound / lower,
    })
}

fn harmonic_excess(expansion: &SineExpansion, quad: &QuadRule) -> Result<f64> {
    let k_eff = expansion.effective_modes();
    if k_eff == 0 {
        return Ok(0.0);
    }
    let t_max = expansion.t_max;
    let nu = PI / t_max;
    let m = expansion.beta[0].len();
    let trule = quad.nodes(t_max, k_eff, &[])?;
    let nt = trule.t.len();
    // Mode tables, mode-major.
    let mut sin_tab = vec![0.0; k_eff * nt];
    let mut cos_tab = vec![0.0; k_eff * nt];
    let (mut s, mut c) = (vec![0.0; k_eff], vec![0.0; k_eff]);
    for (j, &t) in trule.t.iter().enumerate() {
        harmonics(nu * t, &mut s, Some(&mut c));
        for k in 0..k_eff {
            sin_tab[k * nt + j] = s[k];
            cos_tab[k * nt + j] = c[k];
        }
    }
    let rrule = quad.radial_nodes(2.0 * nu * k_eff as f64)?;
    let mut total = 0.0;
    let mut grad_sq = vec![0.0; nt];
    let (mut dr, mut dt) = (vec![0.0; nt], vec![0.0; nt]);
    let mut amp = vec![0.0; k_eff];
    for (&rho, &wr) in rrule.t.iter().zip(&rrule.w) {
        grad_sq.iter_mut().for_each(|g| *g = 0.0);
        for comp in 0..m {
            for (k, a) in amp.iter_mut().enumerate() {
                let w = nu * (k + 1) as f64;
                *a = expansion.beta[k][comp] * w * rho.powf(w - 1.0);
            }
            dr.iter_mut().for_each(|x| *x = 0.0);
            dt.iter_mut().for_each(|x| *x = 0.0);
            for (k, &a) in amp.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let (srow, crow) = (&sin_tab[k * nt..(k + 1) * nt], &cos_tab[k * nt..(k + 1) * nt]);
                for j in 0..nt {
                    dr[j] += a * srow[j];
                    dt[j] += a * crow[j];
                }
            }
            for j in 0..nt {
                grad_sq[j] += dr[j] * dr[j] + dt[j] * dt[j];
            }
        }
        let inner: f64 = grad_sq.iter().zip(&trule.w).map(|(&g, &w)| w * area_density(g)).sum();
        total += wr * rho * inner;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The harmonic extension has strictly smaller graph area, so the cone
    /// over the curve is not area minimizing.
    Improvable,
    /// No improvement beyond the tolerance.
    StationaryConsistent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Improvable => "improvable",
            Verdict::StationaryConsistent => "stationary-consistent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarmonicParams {
    /// Number of sine modes `K`.
    pub k_max: usize,
    pub quad: QuadRule,
    /// Area improvement needed for an "improvable" verdict.
    pub tol: f64,
}

impl Default for HarmonicParams {
    fn default() -> Self {
        HarmonicParams {
            k_max: 256,
            quad: QuadRule::default(),
            tol: 1e-10,
        }
    }
}

impl HarmonicParams {
    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(param("k_max", "need at least one mode"));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(param(
                "tol",
                format!("must be finite and nonnegative, got {}", self.tol),
            ));
        }
        self.quad.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTestReport {
    #[serde(rename = "T")]
    pub t_max: f64,
    pub lambda: f64,
    pub ratio_bound: f64,
    pub tau: f64,
    pub betas: Vec<Vec<f64>>,
    pub f_prime_l2_sq: f64,
    pub parseval_residual: f64,
    pub tail_bound: f64,
    pub energies: Energies,
    pub excesses: AreaComparison,
    pub eta: Option<f64>,
    pub verdict: Verdict,
}

impl HarmonicTestReport {
    pub fn energy_cone(&self) -> f64 {
        self.energies.cone
    }

    pub fn energy_harmonic(&self) -> f64 {
        self.energies.harmonic
    }

    pub fn area_excess_cone(&self) -> f64 {
        self.excesses.excess_cone
    }

    pub fn area_excess_harmonic(&self) -> f64 {
        self.excesses.excess_harmonic
    }

    /// Partial sine sum at `t`.
    pub fn reconstruct(&self, t: f64) -> Vec<f64> {
        SineExpansion {
            t_max: self.t_max,
            beta: self.betas.clone(),
            f_prime_l2_sq: self.f_prime_l2_sq,
            parseval_residual: self.parseval_residual,
            tail_bound: self.tail_bound,
        }
        .eval(t)
    }

    /// CSV with columns `t, f_1..f_m, g_1..g_m` over `n + 1` equally spaced
    /// angles, `g` being the truncated sine series.
    pub fn series_csv(&self, curve: &BoundaryCurve, n: usize) -> String {
        let m = curve.dim();
        let mut out = String::from("t");
        (1..=m).for_each(|c| out.push_str(&format!(",f_{c}")));
        (1..=m).for_each(|c| out.push_str(&format!(",g_{c}")));
        out.push('\n');
        let n = n.max(1);
        for i in 0..=n {
            let t = self.t_max * i as f64 / n as f64;
            out.push_str(&format!("{t}"));
            for v in curve.eval(t).into_iter().chain(self.reconstruct(t)) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Sine expansion, energies, area comparison and verdict for one curve.
pub fn harmonic_test(curve: &BoundaryCurve, params: &HarmonicParams) -> Result<HarmonicTestReport> {
    params.validate()?;
    let exp = sine_coefficients(curve, params.k_max, &params.quad)?;
    let en = energies(&exp.beta, exp.t_max, exp.f_prime_l2_sq)?;
    let area = area_comparison(curve, &exp, &params.quad)?;
    let verdict = if area.excess_harmonic < area.excess_cone - params.tol {
        Verdict::Improvable
    } else {
        Verdict::StationaryConsistent
    };
    Ok(HarmonicTestReport {
        t_max: exp.t_max,
        lambda: en.lambda,
        ratio_bound: en.ratio_bound,
        tau: curve.tau,
        f_prime_l2_sq: exp.f_prime_l2_sq,
        parseval_residual: exp.parseval_residual,
        tail_bound: exp.tail_bound,
        betas: exp.beta,
        energies: en,
        eta: area.eta,
        excesses: area,
        verdict,
    })
}
