use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Nondecreasing `h : (0, inf) -> [0, inf)` with `h(0+) = 0`, measuring how
/// far a set may be from exact minimality at each scale.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaugeFunction {
    #[default]
    Zero,
    /// `h(t) = c t^alpha`.
    Power { c: f64, alpha: f64 },
    /// Piecewise linear through `(t_i, h_i)`, linear from `(0, 0)` to the
    /// first node and constant after the last one.
    Tabulated { t: Vec<f64>, h: Vec<f64> },
}

impl GaugeFunction {
    pub fn power(c: f64, alpha: f64) -> Result<Self> {
        let g = GaugeFunction::Power { c, alpha };
        g.validate()?;
        Ok(g)
    }

    pub fn tabulated(t: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        let g = GaugeFunction::Tabulated { t, h };
        g.validate()?;
        Ok(g)
    }

    /// Checks monotonicity, nonnegativity and integrability of `h(t)/t` at 0.
    pub fn validate(&self) -> Result<()> {
        match self {
            GaugeFunction::Zero => Ok(()),
            GaugeFunction::Power { c, alpha } => {
                if !(*c >= 0.0 && c.is_finite()) {
                    return Err(param("gauge.c", format!("must be nonnegative, got {c}")));
                }
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(param(
                        "gauge.alpha",
                        format!("must be positive for h(t)/t to be integrable at 0, got {alpha}"),
                    ));
                }
                Ok(())
            }
            GaugeFunction::Tabulated { t, h } => {
                if t.is_empty() || t.len() != h.len() {
                    return Err(param("gauge.table", "needs matching, nonempty t and h columns"));
                }
                if !(t[0] > 0.0) || t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().any(|x| !x.is_finite()) {
                    return Err(param("gauge.table", "t must be positive and strictly increasing"));
                }
                if !(h[0] >= 0.0) || h.windows(2).any(|w| !(w[1] >= w[0])) || h.iter().any(|x| !x.is_finite()) {
                    return Err(param("gauge.table", "h must be nonnegative and nondecreasing"));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            GaugeFunction::Zero => 0.0,
            GaugeFunction::Power { c, alpha } => c * s.powf(*alpha),
            GaugeFunction::Tabulated { t, h } => {
                if s <= t[0] {
                    return h[0] * s / t[0];
                }
                match t.iter().position(|&x| x >= s) {
                    None => *h.last().unwrap(),
                    Some(i) => {
                        let w = (s - t[i - 1]) / (t[i] - t[i - 1]);
                        h[i - 1] + w * (h[i] - h[i - 1])
                    }
                }
            }
        }
    }

    /// `A(r) = ∫_0^r h(2t) dt / t`, in closed form for each family.
    pub fn a_integral(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self {
            GaugeFunction::Zero => 0.0,
            GaugeFunction::Power { c, alpha } => c * (2.0 * r).powf(*alpha) / alpha,
            GaugeFunction::Tabulated { t, h } => {
                // substitute s = 2t: A(r) = ∫_0^{2r} h(s) ds / s
                let top = 2.0 * r;
                let first = top.min(t[0]);
                // h(s) = h0 s / t0 on the first piece
                let mut total = h[0] * first / t[0];
                let mut lo = t[0];
                for i in 1..t.len() {
                    if lo >= top {
                        break;
                    }
                    let hi = t[i].min(top);
                    let slope = (h[i] - h[i - 1]) / (t[i] - t[i - 1]);
                    let intercept = h[i - 1] - slope * t[i - 1];
                    total += intercept * (hi / lo).ln() + slope * (hi - lo);
                    lo = t[i];
                }
                if top > lo {
                    total += h.last().unwrap() * (top / lo).ln();
                }
                total
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid_a(g: &GaugeFunction, r: f64) -> f64 {
        // oracle: trapezoid in u = ln t on a fine grid
        let n = 200_000;
        let lo = r.ln() - 40.0;
        let hi = r.ln();
        let du = (hi - lo) / n as f64;
        let f = |u: f64| g.eval(2.0 * u.exp());
        let mut s = 0.5 * (f(lo) + f(hi));
        for i in 1..n {
            s += f(lo + i as f64 * du);
        }
        s * du
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let p = GaugeFunction::power(0.3, 0.7).unwrap();
        assert!((p.a_integral(0.8) - trapezoid_a(&p, 0.8)).abs() < 1e-6);
        let t = GaugeFunction::tabulated(vec![0.1, 0.5, 1.0], vec![0.01, 0.02, 0.2]).unwrap();
        for r in [0.02, 0.2, 0.4, 1.3] {
            assert!((t.a_integral(r) - trapezoid_a(&t, r)).abs() < 1e-6, "r = {r}");
        }
        assert_eq!(GaugeFunction::Zero.a_integral(3.0), 0.0);
    }

    #[test]
    fn a_is_nondecreasing() {
        let t = GaugeFunction::tabulated(vec![0.1, 0.5], vec![0.05, 0.3]).unwrap();
        let mut last = 0.0;
        for k in 1..200 {
            let v = t.a_integral(k as f64 * 0.01);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn invalid_gauges() {
        assert!(GaugeFunction::power(1.0, 0.0).is_err());
        assert!(GaugeFunction::power(-1.0, 1.0).is_err());
        assert!(GaugeFunction::tabulated(vec![0.2, 0.1], vec![0.0, 0.1]).is_err());
        assert!(GaugeFunction::tabulated(vec![0.1, 0.2], vec![0.2, 0.1]).is_err());
        assert!(GaugeFunction::tabulated(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn json_shape() {
        let g: GaugeFunction = serde_json::from_str(r#"{"kind":"power","c":0.01,"alpha":1}"#).unwrap();
        assert_eq!(g, GaugeFunction::Power { c: 0.01, alpha: 1.0 });
    }
}
