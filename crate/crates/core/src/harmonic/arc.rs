use serde::{Deserialize, Serialize};

use super::{harmonic_test, BoundaryCurve, HarmonicParams, HarmonicTestReport, Verdict};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreatCircleReport {
    /// First endpoint direction; `t` is measured from it.
    pub e1: Vec3,
    /// Unit vector completing `e1` to a basis of the reference plane.
    pub e2: Vec3,
    pub normal: Vec3,
    /// Angle of the reference great-circle arc.
    #[serde(rename = "T")]
    pub t_max: f64,
    /// Largest `|f|` over the samples.
    pub max_offset: f64,
    pub verdict: Verdict,
    pub harmonic: HarmonicTestReport,
}

/// Writes an ordered sample of a curve on (or near) the unit sphere as a
/// graph over the great-circle arc joining its endpoints and runs the
/// harmonic test on it. The graph function at `p` is the normal component of
/// `p / |p'|`, `p'` being the projection onto the plane of the arc, and the
/// angle is measured from the first endpoint in that plane.
pub fn great_circle_verdict(
    points: &[Vec3],
    tol: f64,
    params: &HarmonicParams,
) -> Result<(GreatCircleReport, BoundaryCurve)> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("need at least the two endpoints".into()));
    }
    if points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
        return Err(Error::InvalidInput("non-finite sample point".into()));
    }
    let (a, b) = (points[0], points[points.len() - 1]);
    let (Some(e1), true) = (a.try_normalize(1e-300), b.norm() > 0.0) else {
        return Err(Error::Geometry("endpoints must be nonzero".into()));
    };
    let bn = b / b.norm();
    let e2 = bn - e1 * bn.dot(&e1);
    let Some(e2) = e2.try_normalize(1e-9) else {
        return Err(Error::Geometry(
            "endpoints are parallel or antipodal; no unique great circle".into(),
        ));
    };
    let normal = e1.cross(&e2);
    let n = points.len();
    let mut t = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for (i, p) in points.iter().enumerate() {
        let (x, y) = (p.dot(&e1), p.dot(&e2));
        let r = x.hypot(y);
        if r <= 1e-12 * p.norm() {
            return Err(Error::Geometry(format!(
                "sample {i} projects to the origin of the arc plane"
            )));
        }
        t.push(if i == 0 { 0.0 } else { y.atan2(x) });
        f.push(vec![if i == 0 || i == n - 1 { 0.0 } else { p.dot(&normal) / r }]);
    }
    if let Some(i) = t.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Geometry(format!(
            "sample is not a graph over the arc: angle stops increasing at sample {}",
            i + 1
        )));
    }
    let max_offset = f.iter().map(|v| v[0].abs()).fold(0.0, f64::max);
    let curve = BoundaryCurve::from_samples(t, f)?;
    let params = HarmonicParams { tol, ..*params };
    let harmonic = harmonic_test(&curve, &params)?;
    let report = GreatCircleReport {
        e1,
        e2,
        normal,
        t_max: curve.t_max(),
        max_offset,
        verdict: harmonic.verdict,
        harmonic,
    };
    Ok((report, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Frame;
    use std::f64::consts::PI;

    fn arc(t_max: f64, n: usize, lift: impl Fn(f64) -> f64) -> Vec<Vec3> {
        let rot = Frame::from_scaled_axis(Vec3::new(0.3, -0.2, 0.9));
        (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                let t = s * t_max;
                rot * Vec3::new(t.cos(), t.sin(), lift(s)).normalize()
            })
            .collect()
    }

    #[test]
    fn exact_great_arc_is_stationary() {
        let (r, _) = great_circle_verdict(&arc(PI / 2.0, 200, |_| 0.0), 1e-10, &HarmonicParams::default()).unwrap();
        assert_eq!(r.verdict, Verdict::StationaryConsistent);
        assert!(r.max_offset < 1e-12);
        assert!((r.t_max - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn lifted_arc_is_improvable() {
        let (r, _) = great_circle_verdict(
            &arc(PI / 2.0, 400, |s| 0.05 * (2.0 * PI * s).sin()),
            1e-10,
            &HarmonicParams::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Improvable);
        assert!(r.harmonic.eta.unwrap() <= 0.81, "{:?}", r.harmonic.eta);
        assert!((r.max_offset - 0.05).abs() < 1e-4);
    }

    #[test]
    fn small_circle_is_improvable() {
        let lat = 10f64.to_radians();
        let pts: Vec<Vec3> = (0..=300)
            .map(|i| {
                let psi = PI / 2.0 * i as f64 / 300.0;
                Vec3::new(lat.cos() * psi.cos(), lat.cos() * psi.sin(), lat.sin())
            })
            .collect();
        let (r, _) = great_circle_verdict(&pts, 1e-10, &HarmonicParams::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Improvable);
        assert!(r.max_offset > 0.01);
    }

    #[test]
    fn backtracking_sample_is_not_a_graph() {
        let mut pts = arc(1.0, 50, |_| 0.0);
        pts.swap(10, 11);
        assert!(matches!(
            great_circle_verdict(&pts, 1e-10, &HarmonicParams::default()),
            Err(Error::Geometry(_))
        ));
        let anti = vec![Vec3::x(), Vec3::y(), -Vec3::x()];
        assert!(matches!(
            great_circle_verdict(&anti, 1e-10, &HarmonicParams::default()),
            Err(Error::Geometry(_))
        ));
    }
}
