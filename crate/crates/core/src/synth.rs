//! Synthetic fixtures: exact and perturbed cones, planes with holes and
//! slits, lines and propellers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cone::{CurveCone, MinimalCone};
use crate::error::{param, Result};
use crate::geometry::Vec3;
use crate::measure::SampledSet;

/// Largest angle of a fan triangle. A fan of radius `R` then contains the
/// cone inside `B(apex, R cos(FAN_ANGLE / 2))`.
pub const FAN_ANGLE: f64 = PI / 16.0;

fn check(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(param(name, format!("must be positive, got {v}")))
    }
}

/// Triangle fan over every face of `cone`, out to distance `radius` from the
/// apex. The sample is exact (the cone itself) inside
/// `B(apex, radius * cos(FAN_ANGLE / 2))`.
pub fn cone_fan(cone: &MinimalCone, radius: f64, gap: f64) -> Result<SampledSet> {
    check("radius", radius)?;
    let mut tris = Vec::new();
    for f in cone.faces() {
        let angle = if f.full { 2.0 * PI } else { f.angle };
        let m = (angle / FAN_ANGLE).ceil().max(1.0) as usize;
        let dir = |phi: f64| f.e1 * phi.cos() + f.e2 * phi.sin();
        for i in 0..m {
            let a = angle * i as f64 / m as f64;
            let b = angle * (i + 1) as f64 / m as f64;
            tris.push([cone.apex, cone.apex + dir(a) * radius, cone.apex + dir(b) * radius]);
        }
    }
    SampledSet::from_triangles(tris, gap)
}

/// Weighted lattice sample of `cone ∩ B(apex, radius)`: a square lattice of
/// step `gap` on each face with weight `gap^2`, plus weight-0 points on the
/// boundary rays.
pub fn cone_points(cone: &MinimalCone, radius: f64, gap: f64) -> Result<SampledSet> {
    check("radius", radius)?;
    check("gap", gap)?;
    let mut pts = Vec::new();
    let mut w = Vec::new();
    let n = (radius / gap).ceil() as i64;
    for f in cone.faces() {
        let (s, c) = f.angle.sin_cos();
        for i in -n..=n {
            for j in -n..=n {
                let (x, y) = ((i as f64 + 0.5) * gap, (j as f64 + 0.5) * gap);
                if x * x + y * y > radius * radius {
                    continue;
                }
                let inside = f.full || (y >= 0.0 && x * s - y * c >= 0.0);
                if inside {
                    pts.push(cone.apex + f.e1 * x + f.e2 * y);
                    w.push(gap * gap);
                }
            }
        }
        if !f.full {
            let k = n as usize;
            for u in [f.e1, f.e_end()] {
                for i in 0..=k {
                    pts.push(cone.apex + u * (radius * i as f64 / k as f64));
                    w.push(0.0);
                }
            }
        }
    }
    SampledSet::from_points(pts, w, gap)
}

fn quad(a: Vec3, b: Vec3, c: Vec3, d: Vec3, out: &mut Vec<[Vec3; 3]>) {
    out.push([a, b, c]);
    out.push([a, c, d]);
}

/// Plane `z = 0` inside `|p| <= outer` with the annulus `inner < |p| < hole_outer`
/// removed, triangulated with `segments` sectors.
pub fn plane_with_annular_hole(
    inner: f64,
    hole_outer: f64,
    outer: f64,
    segments: usize,
    gap: f64,
) -> Result<SampledSet> {
    check("inner", inner)?;
    if !(hole_outer > inner && outer > hole_outer) {
        return Err(param("radii", "need inner < hole_outer < outer"));
    }
    if segments < 3 {
        return Err(param("segments", "need at least 3"));
    }
    let at = |r: f64, k: usize| {
        let t = 2.0 * PI * k as f64 / segments as f64;
        Vec3::new(r * t.cos(), r * t.sin(), 0.0)
    };
    let mut tris = Vec::new();
    for k in 0..segments {
        tris.push([Vec3::zeros(), at(inner, k), at(inner, k + 1)]);
        quad(
            at(hole_outer, k),
            at(outer, k),
            at(outer, k + 1),
            at(hole_outer, k + 1),
            &mut tris,
        );
    }
    SampledSet::from_triangles(tris, gap)
}

/// Square `[-half, half]^2` of the plane `z = 0` with the strip `|x| < width / 2` removed.
pub fn plane_with_slit(half: f64, width: f64, gap: f64) -> Result<SampledSet> {
    check("half", half)?;
    check("width", width)?;
    if width >= 2.0 * half {
        return Err(param("width", "slit is wider than the patch"));
    }
    let w = width / 2.0;
    let p = |x: f64, y: f64| Vec3::new(x, y, 0.0);
    let mut tris = Vec::new();
    quad(p(-half, -half), p(-w, -half), p(-w, half), p(-half, half), &mut tris);
    quad(p(w, -half), p(half, -half), p(half, half), p(w, half), &mut tris);
    SampledSet::from_triangles(tris, gap)
}

/// Square plane patch of half side `half` centered at `center` with the
/// given unit normal.
pub fn plane_patch(center: Vec3, normal: Vec3, half: f64, gap: f64) -> Result<SampledSet> {
    check("half", half)?;
    let n = crate::geometry::unit(normal).ok_or_else(|| param("normal", "must be nonzero"))?;
    let (u, v) = crate::geometry::orthonormal_pair(&n);
    let p = |a: f64, b: f64| center + u * a + v * b;
    let mut tris = Vec::new();
    quad(
        p(-half, -half),
        p(half, -half),
        p(half, half),
        p(-half, half),
        &mut tris,
    );
    SampledSet::from_triangles(tris, gap)
}

/// Square grid of points with spacing `gap` and weight `gap^2` on the plane
/// patch of half side `half` centered at `center`.
pub fn plane_patch_points(center: Vec3, normal: Vec3, half: f64, gap: f64) -> Result<SampledSet> {
    check("half", half)?;
    check("gap", gap)?;
    let n = crate::geometry::unit(normal).ok_or_else(|| param("normal", "must be nonzero"))?;
    let (u, v) = crate::geometry::orthonormal_pair(&n);
    let m = (2.0 * half / gap).round().max(1.0) as usize;
    let h = 2.0 * half / m as f64;
    let mut pts = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let (a, b) = (-half + (i as f64 + 0.5) * h, -half + (j as f64 + 0.5) * h);
            pts.push(center + u * a + v * b);
        }
    }
    let w = vec![h * h; pts.len()];
    SampledSet::from_points(pts, w, h)
}

/// Points every `gap` along the segment `origin ± half_len * dir`, weight `gap`.
pub fn line_points(origin: Vec3, dir: Vec3, half_len: f64, gap: f64) -> Result<SampledSet> {
    check("half_len", half_len)?;
    check("gap", gap)?;
    let d = crate::geometry::unit(dir).ok_or_else(|| param("dir", "must be nonzero"))?;
    let n = (half_len / gap).ceil() as i64;
    let pts: Vec<Vec3> = (-n..=n)
        .map(|i| origin + d.as_ref() * (half_len * i as f64 / n as f64))
        .collect();
    let w = vec![gap; pts.len()];
    SampledSet::from_points(pts, w, gap)
}

/// Normal displacement of a perturbed propeller branch at distance `s`
/// from the center: `amplitude * R * (s/R)^{3/2} * cos(frequency * ln(R/s) + phase)`. Its ratio to `s` is at most `amplitude * (s/R)^{1/2}`; with the
/// default frequency the best line or propeller fit at scale `t = 2^-k R`
/// is off by about `amplitude * 2^{-k/2}`, a faster oscillation adds
/// curvature and raises it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wiggle {
    pub amplitude: f64,
    pub frequency: f64,
}

impl Wiggle {
    pub const DEFAULT_FREQUENCY: f64 = 2.0;

    pub fn new(amplitude: f64) -> Self {
        Wiggle {
            amplitude,
            frequency: Self::DEFAULT_FREQUENCY,
        }
    }

    pub fn offset(&self, s: f64, radius: f64, phase: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let x = s / radius;
        self.amplitude * radius * x.powf(1.5) * (self.frequency * (1.0 / x).ln() + phase).cos()
    }
}

/// Points every `gap` along the branches of `cone` out to `radius`, with an
/// optional in-plane wiggle. Branch `j` uses phase `2 pi j / 3`.
pub fn propeller_points(cone: &CurveCone, radius: f64, gap: f64, wiggle: Option<Wiggle>) -> Result<SampledSet> {
    check("radius", radius)?;
    check("gap", gap)?;
    let normal = cone.frame * Vec3::z();
    let n = (radius / gap).ceil() as usize;
    let mut pts = vec![cone.apex];
    for (j, u) in cone.rays().iter().enumerate() {
        let side = normal.cross(u);
        let phase = 2.0 * PI * j as f64 / 3.0;
        for i in 1..=n {
            let s = radius * i as f64 / n as f64;
            let off = wiggle.map_or(0.0, |w| w.offset(s, radius, phase));
            pts.push(cone.apex + u * s + side * off);
        }
    }
    let w = vec![gap; pts.len()];
    SampledSet::from_points(pts, w, gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{cone_density, construct_reference_cone, ConeKind, CurveKind};
    use crate::geometry::{Frame, LocalWindow};
    use crate::measure::h2_in_ball;

    #[test]
    fn fans_reproduce_cone_densities() {
        for kind in [ConeKind::Plane, ConeKind::Y, ConeKind::T] {
            let c = construct_reference_cone(kind, Vec3::new(0.1, 0.2, 0.3), Frame::identity());
            let e = cone_fan(&c, 1.2, 0.05).unwrap();
            let r = 1.2 * (FAN_ANGLE / 2.0).cos();
            let m = h2_in_ball(&e, &LocalWindow::new(c.apex, r).unwrap()).value;
            assert!((m / (r * r) - cone_density(&c)).abs() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn lattice_points_approximate_density() {
        let c = construct_reference_cone(ConeKind::T, Vec3::zeros(), Frame::identity());
        let e = cone_points(&c, 1.0, 0.005).unwrap();
        let m = h2_in_ball(&e, &LocalWindow::new(Vec3::zeros(), 0.9).unwrap()).value;
        assert!((m / 0.81 - cone_density(&c)).abs() / cone_density(&c) < 0.02);
    }

    #[test]
    fn hole_and_slit_areas() {
        let e = plane_with_annular_hole(1.0, 1.5, 3.0, 512, 0.05).unwrap();
        let want = PI * (9.0 - 2.25 + 1.0);
        assert!((e.total_measure() - want).abs() / want < 1e-3);
        let s = plane_with_slit(1.0, 0.2, 0.05).unwrap();
        assert!((s.total_measure() - 3.6).abs() < 1e-12);
    }

    #[test]
    fn wiggle_scaling() {
        let w = Wiggle::new(0.05);
        assert!((w.offset(1.0, 1.0, 0.0) - 0.05).abs() < 1e-15);
        for k in 0..6 {
            let s = 0.5f64.powi(k);
            assert!(w.offset(s, 1.0, 0.3).abs() / s <= 0.05 * s.sqrt() + 1e-15);
            let phase = -w.frequency * (1.0 / s).ln();
            assert!((w.offset(s, 1.0, phase) / s - 0.05 * s.sqrt()).abs() < 1e-12);
        }
        let p = CurveCone::new(CurveKind::Propeller, Vec3::zeros(), Frame::identity());
        let e = propeller_points(&p, 1.0, 0.01, Some(w)).unwrap();
        assert_eq!(e.len(), 301);
    }
}
