//! Reference minimal cones (plane, Y, T), cones over arbitrary spherical
//! graphs, their densities and measures in balls, the structure validator for
//! cone links, and the one-dimensional cones (lines and propellers).

mod curve;
mod validate;

pub use curve::{CurveCone, CurveKind};
pub use validate::{validate_cone_structure, ConeValidationReport, Rule, ValidationParams, Violation};

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::geometry::planar::{wedge_disk_area, Vec2};
use crate::geometry::{ConeShape, Frame, GreatCircleArc, LocalWindow, SphericalGraph, Vec3};

/// Density of the tetrahedral cone in R^3, `3 arccos(-1/3)`.
pub fn tetrahedral_density() -> f64 {
    3.0 * (-1.0f64 / 3.0).acos()
}

/// Density thresholds used to tell plane, Y and T points apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityConstants {
    /// Lower bound on the density of cones that are neither planes nor Y-sets.
    /// Only known in R^3, where it is the T density.
    pub d_t: f64,
}

impl Default for DensityConstants {
    fn default() -> Self {
        DensityConstants {
            d_t: tetrahedral_density(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConeKind {
    Plane,
    Y,
    T,
    Custom,
}

impl std::fmt::Display for ConeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConeKind::Plane => "P",
            ConeKind::Y => "Y",
            ConeKind::T => "T",
            ConeKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// A planar sector `apex + {s cos(phi) e1 + s sin(phi) e2 : s >= 0, 0 <= phi <= angle}`,
/// or a whole plane when `full`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub normal: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
    pub angle: f64,
    pub full: bool,
    sin_a: f64,
    cos_a: f64,
}

impl Face {
    fn from_arc(arc: &GreatCircleArc) -> Face {
        let n = arc.normal().into_inner();
        let e1 = arc.a().into_inner();
        let e2 = n.cross(&e1);
        Face {
            normal: n,
            e1,
            e2,
            angle: arc.angle(),
            full: arc.is_full(),
            sin_a: arc.angle().sin(),
            cos_a: arc.angle().cos(),
        }
    }

    /// Second boundary ray direction.
    pub fn e_end(&self) -> Vec3 {
        self.e1 * self.cos_a + self.e2 * self.sin_a
    }

    fn in_sector(&self, x: f64, y: f64) -> bool {
        self.full || (y >= 0.0 && x * self.sin_a - y * self.cos_a >= 0.0)
    }

    /// Distance from `d` (relative to the apex) to the face.
    #[inline]
    pub fn distance(&self, d: &Vec3) -> f64 {
        let h = d.dot(&self.normal);
        if self.full {
            return h.abs();
        }
        let x = d.dot(&self.e1);
        let y = d.dot(&self.e2);
        if self.in_sector(x, y) {
            return h.abs();
        }
        let t1 = x.max(0.0);
        let t2 = (x * self.cos_a + y * self.sin_a).max(0.0);
        (d - self.e1 * t1).norm().min((d - self.e_end() * t2).norm())
    }
}

/// Cone `apex + {t k : t >= 0, k in K}` over a spherical graph `K`.
#[derive(Debug, Clone)]
pub struct MinimalCone {
    pub apex: Vec3,
    pub kind: ConeKind,
    /// Link of the cone, already placed by `frame`.
    pub graph: SphericalGraph,
    pub frame: Frame,
    faces: Vec<Face>,
}

fn tetra_vertices() -> [Vec3; 4] {
    let s = 1.0 / 3f64.sqrt();
    [
        Vec3::new(s, s, s),
        Vec3::new(s, -s, -s),
        Vec3::new(-s, s, -s),
        Vec3::new(-s, -s, s),
    ]
}

fn y_wings() -> [Vec3; 3] {
    let mut w = [Vec3::zeros(); 3];
    for (i, v) in w.iter_mut().enumerate() {
        let th = 2.0 * PI * i as f64 / 3.0;
        *v = Vec3::new(th.cos(), th.sin(), 0.0);
    }
    w
}

/// Link of the reference cone of the given kind in the identity frame.
pub fn reference_graph(kind: ConeKind) -> SphericalGraph {
    let arcs: Vec<GreatCircleArc> = match kind {
        ConeKind::Plane => vec![GreatCircleArc::full(Vec3::z()).expect("unit normal")],
        ConeKind::Y => y_wings()
            .iter()
            .map(|u| GreatCircleArc::with_normal(Vec3::z(), -Vec3::z(), Vec3::z().cross(u)).expect("half circle"))
            .collect(),
        ConeKind::T => {
            let v = tetra_vertices();
            let mut arcs = Vec::with_capacity(6);
            for i in 0..4 {
                for j in (i + 1)..4 {
                    arcs.push(GreatCircleArc::new(v[i], v[j]).expect("tetrahedral edge"));
                }
            }
            arcs
        }
        ConeKind::Custom => Vec::new(),
    };
    if arcs.is_empty() {
        return SphericalGraph::new(arcs, 0.25, 1.0).expect("empty graph");
    }
    SphericalGraph::with_default_parameters(arcs).expect("reference graph")
}

fn cached_reference_graph(kind: ConeKind) -> &'static SphericalGraph {
    static CACHE: [OnceLock<SphericalGraph>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = match kind {
        ConeKind::Plane => 0,
        ConeKind::Y => 1,
        ConeKind::T => 2,
        ConeKind::Custom => 3,
    };
    CACHE[i].get_or_init(|| reference_graph(kind))
}

/// Places the reference plane, Y or T cone at `apex` with orientation `frame`.
pub fn construct_reference_cone(kind: ConeKind, apex: Vec3, frame: Frame) -> MinimalCone {
    let graph = cached_reference_graph(kind).rotated(&frame);
    MinimalCone::from_parts(apex, kind, graph, frame)
}

impl MinimalCone {
    fn from_parts(apex: Vec3, kind: ConeKind, graph: SphericalGraph, frame: Frame) -> Self {
        let faces = graph.arcs().iter().map(Face::from_arc).collect();
        MinimalCone {
            apex,
            kind,
            graph,
            frame,
            faces,
        }
    }

    /// Cone over an arbitrary graph (not necessarily minimal).
    pub fn custom(apex: Vec3, graph: SphericalGraph) -> Self {
        Self::from_parts(apex, ConeKind::Custom, graph, Frame::identity())
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Same cone moved by the rigid motion `p -> rotation * p + translation`.
    pub fn transformed(&self, rotation: &Frame, translation: &Vec3) -> MinimalCone {
        let graph = self.graph.rotated(rotation);
        Self::from_parts(
            rotation * self.apex + translation,
            self.kind,
            graph,
            rotation * self.frame,
        )
    }

    /// Directions that determine the placement of a reference cone: the plane
    /// normal; the Y spine followed by the three wings; the four T vertices.
    pub fn characteristic_directions(&self) -> Vec<Vec3> {
        match self.kind {
            ConeKind::Plane => vec![self.frame * Vec3::z()],
            ConeKind::Y => {
                let mut v = vec![self.frame * Vec3::z()];
                v.extend(y_wings().iter().map(|w| self.frame * w));
                v
            }
            ConeKind::T => tetra_vertices().iter().map(|w| self.frame * w).collect(),
            ConeKind::Custom => self.graph.vertices().iter().map(|v| v.position).collect(),
        }
    }

    /// Largest angle (radians) between corresponding characteristic
    /// directions, up to the symmetries of the kind. `None` when kinds differ.
    pub fn frame_discrepancy(&self, other: &MinimalCone) -> Option<f64> {
        if self.kind != other.kind {
            return None;
        }
        let a = self.characteristic_directions();
        let b = other.characteristic_directions();
        let line_angle = |u: &Vec3, v: &Vec3| {
            let t = crate::geometry::angle_between(u, v);
            t.min(PI - t)
        };
        let set_angle = |xs: &[Vec3], ys: &[Vec3]| {
            xs.iter()
                .map(|x| {
                    ys.iter()
                        .map(|y| crate::geometry::angle_between(x, y))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0f64, f64::max)
        };
        Some(match self.kind {
            ConeKind::Plane => line_angle(&a[0], &b[0]),
            ConeKind::Y => line_angle(&a[0], &b[0]).max(set_angle(&a[1..], &b[1..])),
            _ => set_angle(&a, &b).max(set_angle(&b, &a)),
        })
    }

    /// Distance from `p` to the set of points where the cone is centered: the
    /// plane itself, the spine of a Y, or the apex otherwise.
    pub fn distance_to_center_set(&self, p: &Vec3) -> f64 {
        let d = p - self.apex;
        match self.kind {
            ConeKind::Plane => d.dot(&(self.frame * Vec3::z())).abs(),
            ConeKind::Y => {
                let s = self.frame * Vec3::z();
                (d - s * s.dot(&d)).norm()
            }
            _ => d.norm(),
        }
    }
}

impl ConeShape for MinimalCone {
    fn distance(&self, p: &Vec3) -> f64 {
        let d = p - self.apex;
        let mut best = f64::INFINITY;
        for f in &self.faces {
            best = best.min(f.distance(&d));
        }
        if self.faces.is_empty() {
            d.norm()
        } else {
            best
        }
    }

    fn sample_in_ball(&self, ball: &LocalWindow, spacing: f64) -> Vec<Vec3> {
        let mut out = Vec::new();
        for f in &self.faces {
            sample_face_in_ball(&self.apex, f, ball, spacing, &mut out);
        }
        out
    }
}

/// Covering sample of `face ∩ ball` with covering radius at most `spacing`:
/// a square lattice of step `0.8 spacing` plus samples along the boundary rays
/// and the boundary circle.
fn sample_face_in_ball(apex: &Vec3, f: &Face, ball: &LocalWindow, spacing: f64, out: &mut Vec<Vec3>) {
    let rel = ball.center - apex;
    let h = rel.dot(&f.normal);
    let r = ball.radius;
    if h.abs() > r {
        return;
    }
    let rho = (r * r - h * h).sqrt();
    let mx = rel.dot(&f.e1);
    let my = rel.dot(&f.e2);
    let lift = |x: f64, y: f64| apex + f.e1 * x + f.e2 * y;
    let g = 0.8 * spacing;
    let n = (rho / g).ceil() as i64;
    for i in -n..=n {
        let x = mx + i as f64 * g;
        for j in -n..=n {
            let y = my + j as f64 * g;
            let dx = x - mx;
            let dy = y - my;
            if dx * dx + dy * dy <= rho * rho && f.in_sector(x, y) {
                out.push(lift(x, y));
            }
        }
    }
    if !f.full {
        for (ux, uy) in [(1.0, 0.0), (f.cos_a, f.sin_a)] {
            // |t u - m|^2 <= rho^2
            let b = ux * mx + uy * my;
            let c = mx * mx + my * my - rho * rho;
            let disc = b * b - c;
            if disc < 0.0 {
                continue;
            }
            let s = disc.sqrt();
            let t0 = (b - s).max(0.0);
            let t1 = b + s;
            if t1 < t0 {
                continue;
            }
            let k = ((t1 - t0) / g).ceil().max(1.0) as usize;
            for i in 0..=k {
                let t = t0 + (t1 - t0) * i as f64 / k as f64;
                out.push(lift(t * ux, t * uy));
            }
        }
    }
    if rho > 0.0 {
        let k = ((2.0 * PI * rho) / g).ceil().max(8.0) as usize;
        for i in 0..k {
            let th = 2.0 * PI * i as f64 / k as f64;
            let (x, y) = (mx + rho * th.cos(), my + rho * th.sin());
            if f.in_sector(x, y) {
                out.push(lift(x, y));
            }
        }
    }
}

/// Euclidean distance from `p` to the closed cone.
pub fn dist_point_to_cone(p: &Vec3, cone: &MinimalCone) -> f64 {
    cone.distance(p)
}

/// `H^2(cone ∩ B(apex, 1))`, which equals half the length of the link.
pub fn cone_density(cone: &MinimalCone) -> f64 {
    cone.graph.total_length() / 2.0
}

/// `H^2(cone ∩ ball)`, computed face by face as the exact area of a planar
/// sector intersected with the disk `plane ∩ ball`. `tol` is accepted for
/// interface compatibility with quadrature-based cones; every face handled
/// here is planar, so the result is exact to rounding.
pub fn cone_measure_in_ball(cone: &MinimalCone, ball: &LocalWindow, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(param("tol", format!("must be positive, got {tol}")));
    }
    let mut total = 0.0;
    for f in cone.faces() {
        total += face_measure_in_ball(&cone.apex, f, ball);
    }
    Ok(total)
}

fn face_measure_in_ball(apex: &Vec3, f: &Face, ball: &LocalWindow) -> f64 {
    let rel = ball.center - apex;
    let h = rel.dot(&f.normal);
    let r = ball.radius;
    if h.abs() >= r {
        return 0.0;
    }
    let rho = (r * r - h * h).sqrt();
    if f.full {
        return PI * rho * rho;
    }
    let m = Vec2::new(rel.dot(&f.e1), rel.dot(&f.e2));
    wedge_disk_area(&Vec2::zeros(), 0.0, f.angle, &m, rho)
}
