use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{ConeShape, Frame, LocalWindow, Vec3};

/// One-dimensional minimal cones: a line, or a propeller (three coplanar
/// half-lines at 120 degrees).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    Line,
    Propeller,
}

/// A line through `apex` along `frame * e_x`, or the propeller centered at
/// `apex` with branches `frame * (cos(2 pi i/3), sin(2 pi i/3), 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveCone {
    pub kind: CurveKind,
    pub apex: Vec3,
    pub frame: Frame,
    rays: Vec<Vec3>,
}

impl CurveCone {
    pub fn new(kind: CurveKind, apex: Vec3, frame: Frame) -> Self {
        let rays = match kind {
            CurveKind::Line => vec![frame * Vec3::x(), -(frame * Vec3::x())],
            CurveKind::Propeller => (0..3)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / 3.0;
                    frame * Vec3::new(th.cos(), th.sin(), 0.0)
                })
                .collect(),
        };
        CurveCone {
            kind,
            apex,
            frame,
            rays,
        }
    }

    /// Unit directions of the half-lines leaving the apex.
    pub fn rays(&self) -> &[Vec3] {
        &self.rays
    }

    pub fn transformed(&self, rotation: &Frame, translation: &Vec3) -> CurveCone {
        CurveCone::new(self.kind, rotation * self.apex + translation, rotation * self.frame)
    }
}

impl ConeShape for CurveCone {
    fn distance(&self, p: &Vec3) -> f64 {
        let d = p - self.apex;
        let mut best = f64::INFINITY;
        for u in &self.rays {
            let t = d.dot(u).max(0.0);
            best = best.min((d - u * t).norm_squared());
        }
        best.sqrt()
    }

    fn sample_in_ball(&self, ball: &LocalWindow, spacing: f64) -> Vec<Vec3> {
        let mut out = Vec::new();
        let m = ball.center - self.apex;
        let r = ball.radius;
        for u in &self.rays {
            let b = u.dot(&m);
            let disc = b * b - (m.norm_squared() - r * r);
            if disc < 0.0 {
                continue;
            }
            let s = disc.sqrt();
            let t0 = (b - s).max(0.0);
            let t1 = b + s;
            if t1 < t0 {
                continue;
            }
            let k = ((t1 - t0) / spacing).ceil().max(1.0) as usize;
            for i in 0..=k {
                let t = t0 + (t1 - t0) * i as f64 / k as f64;
                out.push(self.apex + u * t);
            }
        }
        out
    }
}
