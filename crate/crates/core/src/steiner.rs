//! Shortest connected sets through at most three points, and the
//! 2-Lipschitz retractions onto a Y-set, a pair of half-lines or a line,
//! each cut by a ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LocalWindow, Vec3};

/// A tree made of segments between `nodes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network1D {
    pub nodes: Vec<Vec3>,
    pub edges: Vec<[usize; 2]>,
    pub total_length: f64,
    /// Index of the node where three edges meet at 120 degrees, if any.
    pub fermat_node: Option<usize>,
}

impl Network1D {
    fn new(nodes: Vec<Vec3>, edges: Vec<[usize; 2]>, fermat_node: Option<usize>) -> Self {
        let total_length = edges.iter().map(|[a, b]| (nodes[*a] - nodes[*b]).norm()).sum();
        Network1D {
            nodes,
            edges,
            total_length,
            fermat_node,
        }
    }

    /// `|sum of unit edge directions|` at the Fermat node (0 without one).
    pub fn stationarity_residual(&self) -> f64 {
        let Some(z) = self.fermat_node else { return 0.0 };
        self.edges
            .iter()
            .filter_map(|&[a, b]| match (a == z, b == z) {
                (true, _) => Some(self.nodes[b]),
                (_, true) => Some(self.nodes[a]),
                _ => None,
            })
            .map(|p| (p - self.nodes[z]).normalize())
            .sum::<Vec3>()
            .norm()
    }

    /// Edges as `(node, direction)` pairs leaving `v`.
    fn directions_at(&self, v: usize) -> Vec<Vec3> {
        self.edges
            .iter()
            .filter_map(|&[a, b]| {
                if a == v {
                    Some(self.nodes[b] - self.nodes[v])
                } else if b == v {
                    Some(self.nodes[a] - self.nodes[v])
                } else {
                    None
                }
            })
            .collect()
    }
}

fn scale_of(pts: &[Vec3]) -> f64 {
    let mut s: f64 = 0.0;
    for a in pts {
        for b in pts {
            s = s.max((a - b).norm());
        }
    }
    s
}

/// Shortest connected set containing `a1, a2, a3`.
///
/// When every angle of the triangle is below 120 degrees this is the star
/// from the Fermat point, where the unit directions to the three points sum
/// to zero. Otherwise it is the two sides at the vertex with the wide angle.
/// Collinear points give the spanning segment, split at the middle point.
pub fn fermat_point(a1: Vec3, a2: Vec3, a3: Vec3) -> Result<Network1D> {
    let a = [a1, a2, a3];
    let scale = scale_of(&a);
    for i in 0..3 {
        for j in i + 1..3 {
            if !((a[i] - a[j]).norm() > 1e-14 * scale.max(f64::MIN_POSITIVE)) {
                return Err(Error::InvalidInput(format!("points {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    if a.iter()
        .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
    {
        return Err(Error::InvalidInput("non-finite coordinates".into()));
    }
    // angle test at each vertex: cos >= -1/2 everywhere means an interior node
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let u = (a[j] - a[i]).normalize();
        let v = (a[k] - a[i]).normalize();
        if u.dot(&v) <= -0.5 {
            // the vertex first, the other two in input order
            let nodes = vec![a[i], a[j.min(k)], a[j.max(k)]];
            return Ok(Network1D::new(nodes, vec![[0, 1], [0, 2]], None));
        }
    }
    let z = solve_fermat(&a);
    Ok(Network1D::new(
        vec![a1, a2, a3, z],
        vec![[3, 0], [3, 1], [3, 2]],
        Some(3),
    ))
}

fn gradient(z: &Vec3, a: &[Vec3; 3]) -> Vec3 {
    a.iter().map(|p| (z - p).normalize()).sum()
}

/// Weiszfeld iterations from the centroid, then Newton steps on the
/// gradient of `sum |z - a_j|`. Only called when all angles are below
/// 120 degrees, so the minimizer is interior and the Hessian is definite.
fn solve_fermat(a: &[Vec3; 3]) -> Vec3 {
    let scale = scale_of(a);
    let mut z = (a[0] + a[1] + a[2]) / 3.0;
    for _ in 0..200 {
        let mut num = Vec3::zeros();
        let mut den = 0.0;
        for p in a {
            let d = (z - p).norm();
            num += p / d;
            den += 1.0 / d;
        }
        let next = num / den;
        let step = (next - z).norm();
        z = next;
        if step < 1e-6 * scale {
            break;
        }
    }
    for _ in 0..50 {
        let g = gradient(&z, a);
        if g.norm() < 1e-14 {
            break;
        }
        let mut h = nalgebra::Matrix3::zeros();
        for p in a {
            let d = z - p;
            let n = d.norm();
            let u = d / n;
            h += (nalgebra::Matrix3::identity() - u * u.transpose()) / n;
        }
        let Some(step) = h.lu().solve(&g) else { break };
        let mut t = 1.0;
        let f = |z: &Vec3| a.iter().map(|p| (z - p).norm()).sum::<f64>();
        let f0 = f(&z);
        // damped step, accepting when the objective or the residual drops
        while t > 1e-8 {
            let cand = z - step * t;
            if f(&cand) <= f0 || gradient(&cand, a).norm() < g.norm() {
                z = cand;
                break;
            }
            t *= 0.5;
        }
        if step.norm() * t < 1e-16 * scale {
            break;
        }
    }
    z
}

/// Shortest connected set through one to three points of the closed ball.
pub fn shortest_network(points: &[Vec3], ball: &LocalWindow) -> Result<Network1D> {
    let tol = 1e-12 * ball.radius;
    for p in points {
        if (p - ball.center).norm() > ball.radius + tol {
            return Err(Error::InvalidInput(format!("point {p:?} lies outside the ball")));
        }
    }
    match points {
        [p] => Ok(Network1D::new(vec![*p], vec![], None)),
        [p, q] => {
            if (p - q).norm() <= 1e-14 * ball.radius {
                return Err(Error::InvalidInput("points 1 and 2 coincide".into()));
            }
            Ok(Network1D::new(vec![*p, *q], vec![[0, 1]], None))
        }
        [p, q, s] => fermat_point(*p, *q, *s),
        _ => Err(Error::InvalidInput(format!("need 1 to 3 points, got {}", points.len()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetShape {
    /// Three coplanar half-lines at 120 degrees.
    Y,
    /// Two half-lines making an angle in `[120, 180)` degrees.
    HalfLines,
    Line,
}

/// `F = (union of rays from center) ∩ ball`, one of the shapes that carry
/// the 2-Lipschitz retraction `h_F = h2 ∘ h1 ∘ pi_P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetractionTarget {
    pub shape: TargetShape,
    pub center: Vec3,
    /// Unit directions of the half-lines.
    pub rays: Vec<Vec3>,
    pub ball: LocalWindow,
}

const RAY_ANGLE_TOL: f64 = 1e-6;

impl RetractionTarget {
    fn check_ball(center: &Vec3, ball: &LocalWindow) -> Result<()> {
        if (center - ball.center).norm() > ball.radius * (1.0 + 1e-12) {
            return Err(Error::UnsupportedShape("the ball must contain the center".into()));
        }
        Ok(())
    }

    /// Y-set from three coplanar directions at 120 degrees (within 1e-6
    /// rad). The directions are snapped to an exact Y in their plane.
    pub fn y_set(center: Vec3, rays: [Vec3; 3], ball: LocalWindow) -> Result<Self> {
        Self::check_ball(&center, &ball)?;
        let u: Vec<Vec3> = rays
            .iter()
            .map(|r| r.try_normalize(0.0))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::UnsupportedShape("zero ray direction".into()))?;
        for i in 0..3 {
            let c = u[i].dot(&u[(i + 1) % 3]).clamp(-1.0, 1.0);
            if (c.acos() - 2.0 * std::f64::consts::PI / 3.0).abs() > RAY_ANGLE_TOL {
                return Err(Error::UnsupportedShape("Y branches must meet at 120 degrees".into()));
            }
        }
        let n = u[0].cross(&u[1]).normalize();
        let e = n.cross(&u[0]);
        let (s, c) = (2.0 * std::f64::consts::PI / 3.0).sin_cos();
        let exact = vec![u[0], u[0] * c + e * s, u[0] * c - e * s];
        Ok(RetractionTarget {
            shape: TargetShape::Y,
            center,
            rays: exact,
            ball,
        })
    }

    /// Two half-lines from `vertex`; an angle of 180 degrees gives a line.
    pub fn half_lines(vertex: Vec3, d1: Vec3, d2: Vec3, ball: LocalWindow) -> Result<Self> {
        Self::check_ball(&vertex, &ball)?;
        let (Some(u1), Some(u2)) = (d1.try_normalize(0.0), d2.try_normalize(0.0)) else {
            return Err(Error::UnsupportedShape("zero ray direction".into()));
        };
        let angle = u1.dot(&u2).clamp(-1.0, 1.0).acos();
        if angle < 2.0 * std::f64::consts::PI / 3.0 - RAY_ANGLE_TOL {
            return Err(Error::UnsupportedShape(format!(
                "half-lines make an angle of {:.4} degrees, below 120",
                angle.to_degrees()
            )));
        }
        if (u1 + u2).norm() < 1e-12 {
            return Self::line(vertex, u1, ball);
        }
        Ok(RetractionTarget {
            shape: TargetShape::HalfLines,
            center: vertex,
            rays: vec![u1, u2],
            ball,
        })
    }

    pub fn line(point: Vec3, dir: Vec3, ball: LocalWindow) -> Result<Self> {
        let u = dir
            .try_normalize(0.0)
            .ok_or_else(|| Error::UnsupportedShape("zero line direction".into()))?;
        // move the base point to the foot of the ball center
        let c = point + u * (ball.center - point).dot(&u);
        Self::check_ball(&c, &ball)?;
        Ok(RetractionTarget {
            shape: TargetShape::Line,
            center: c,
            rays: vec![u, -u],
            ball,
        })
    }

    /// Reads the shape off a network: a segment gives its line, two edges
    /// at one node give half-lines, a Fermat node gives a Y.
    pub fn from_network(net: &Network1D, ball: LocalWindow) -> Result<Self> {
        if let Some(z) = net.fermat_node {
            let d = net.directions_at(z);
            if d.len() == 3 {
                return Self::y_set(net.nodes[z], [d[0], d[1], d[2]], ball);
            }
        }
        match net.edges.len() {
            1 => {
                let [a, b] = net.edges[0];
                Self::line(net.nodes[a], net.nodes[b] - net.nodes[a], ball)
            }
            2 => {
                let [a, b] = net.edges[0];
                let [c, d] = net.edges[1];
                let v = [a, b]
                    .into_iter()
                    .find(|v| *v == c || *v == d)
                    .ok_or_else(|| Error::UnsupportedShape("edges do not share a node".into()))?;
                let dirs = net.directions_at(v);
                Self::half_lines(net.nodes[v], dirs[0], dirs[1], ball)
            }
            n => Err(Error::UnsupportedShape(format!(
                "network with {n} edges and no Fermat node"
            ))),
        }
    }

    fn normal(&self) -> Option<Vec3> {
        match self.shape {
            TargetShape::Line => None,
            _ => Some(self.rays[0].cross(&self.rays[1]).normalize()),
        }
    }

    /// Point of the ray `center + t u` at parameter `t`, clamped to the ball.
    fn clamp(&self, u: &Vec3, t: f64) -> Vec3 {
        let m = self.center - self.ball.center;
        // largest s with |m + s u| <= R
        let b = m.dot(u);
        let disc = (b * b - (m.norm_squared() - self.ball.radius * self.ball.radius)).max(0.0);
        let s_max = -b + disc.sqrt();
        self.center + u * t.min(s_max.max(0.0))
    }

    /// Whether `p` lies on `F` within `tol`.
    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        if (p - self.ball.center).norm() > self.ball.radius + tol {
            return false;
        }
        let d = p - self.center;
        self.rays.iter().any(|u| (d - u * d.dot(u).max(0.0)).norm() <= tol)
    }
}

/// `h_F(p) = h2(h1(pi_P(p)))`: orthogonal projection to the plane of `F`,
/// projection onto the rays along the third branch (Y) or the bisector
/// (half-lines), then clamping to the ball along the branch.
pub fn y_retraction(f: &RetractionTarget, p: &Vec3) -> Vec3 {
    let d = p - f.center;
    if f.shape == TargetShape::Line {
        let u = f.rays[0];
        let t = d.dot(&u);
        return if t >= 0.0 { f.clamp(&u, t) } else { f.clamp(&-u, -t) };
    }
    let n = f.normal().expect("planar target");
    let y = d - n * d.dot(&n);
    // the two rays bounding the sector of y, with y = alpha u + beta v
    let (u, v) = match f.shape {
        TargetShape::Y => {
            let r = &f.rays;
            // y lies in the sector opposite the ray it is least aligned with
            let i = (0..3).min_by(|&a, &b| y.dot(&r[a]).total_cmp(&y.dot(&r[b]))).unwrap();
            (r[(i + 1) % 3], r[(i + 2) % 3])
        }
        _ => (f.rays[0], f.rays[1]),
    };
    let (alpha, beta) = coordinates(&y, &u, &v);
    if alpha >= beta {
        f.clamp(&u, alpha - beta)
    } else {
        f.clamp(&v, beta - alpha)
    }
}

/// `(alpha, beta)` with `y = alpha u + beta v`, for `y` in the span of the
/// independent unit vectors `u`, `v`.
fn coordinates(y: &Vec3, u: &Vec3, v: &Vec3) -> (f64, f64) {
    let c = u.dot(v);
    let (yu, yv) = (y.dot(u), y.dot(v));
    let det = 1.0 - c * c;
    ((yu - c * yv) / det, (yv - c * yu) / det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit_ball() -> LocalWindow {
        LocalWindow::new(Vec3::zeros(), 1.0).unwrap()
    }

    /// Grid search plus pattern refinement of `sum |z - a_j|` in the plane of
    /// the triangle.
    fn brute_fermat(a: &[Vec3; 3]) -> Vec3 {
        let f = |z: &Vec3| a.iter().map(|p| (z - p).norm()).sum::<f64>();
        let e1 = (a[1] - a[0]).normalize();
        let n = e1.cross(&(a[2] - a[0])).normalize();
        let e2 = n.cross(&e1);
        let s = scale_of(a);
        let mut best = a[0];
        for i in -40..=40 {
            for j in -40..=40 {
                let z = a[0] + e1 * (i as f64 * s / 20.0) + e2 * (j as f64 * s / 20.0);
                if f(&z) < f(&best) {
                    best = z;
                }
            }
        }
        let mut h = s / 20.0;
        while h > 1e-13 * s {
            let mut moved = false;
            for d in [
                e1,
                -e1,
                e2,
                -e2,
                (e1 + e2) / 2f64.sqrt(),
                (e1 - e2) / 2f64.sqrt(),
                (-e1 + e2) / 2f64.sqrt(),
                -(e1 + e2) / 2f64.sqrt(),
            ] {
                let z = best + d * h;
                if f(&z) < f(&best) {
                    best = z;
                    moved = true;
                }
            }
            if !moved {
                h /= 2.0;
            }
        }
        best
    }

    #[test]
    fn equilateral_node_is_the_centroid() {
        let a = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
        ];
        let net = fermat_point(a[0], a[1], a[2]).unwrap();
        let z = net.nodes[net.fermat_node.unwrap()];
        assert!((z - (a[0] + a[1] + a[2]) / 3.0).norm() < 1e-12);
        assert!((net.total_length - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn wide_angle_gives_the_vertex_network() {
        let th = 150f64.to_radians();
        let a2 = Vec3::new(0.3, -0.2, 0.1);
        let a1 = a2 + Vec3::new(1.0, 0.0, 0.0);
        let a3 = a2 + Vec3::new(th.cos(), th.sin(), 0.0) * 0.7;
        let net = fermat_point(a1, a2, a3).unwrap();
        assert!(net.fermat_node.is_none());
        assert_eq!(net.nodes[0], a2);
        assert_eq!(net.edges, vec![[0, 1], [0, 2]]);
        assert_eq!(net.total_length, (a1 - a2).norm() + (a3 - a2).norm());
    }

    #[test]
    fn matches_grid_oracle() {
        let a = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.5, 0.9, 0.0),
        ];
        let net = fermat_point(a[0], a[1], a[2]).unwrap();
        let z = net.nodes[3];
        assert!((z - brute_fermat(&a)).norm() < 1e-6);
        assert!(net.stationarity_residual() < 1e-12);
    }

    #[test]
    fn random_acute_triangles_are_stationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 200 {
            let a: [Vec3; 3] = std::array::from_fn(|_| {
                Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            });
            let net = fermat_point(a[0], a[1], a[2]).unwrap();
            if net.fermat_node.is_none() {
                continue;
            }
            assert!(net.stationarity_residual() < 1e-9);
            done += 1;
        }
    }

    #[test]
    fn collinear_points_split_at_the_middle() {
        let net = fermat_point(Vec3::zeros(), Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.5, 0.0, 0.0)).unwrap();
        assert_eq!(net.nodes[0], Vec3::new(0.5, 0.0, 0.0));
        assert!((net.total_length - 2.0).abs() < 1e-15);
    }

    #[test]
    fn coincident_points_are_rejected() {
        assert!(fermat_point(Vec3::zeros(), Vec3::zeros(), Vec3::x()).is_err());
        assert!(shortest_network(&[Vec3::x(), Vec3::x()], &unit_ball()).is_err());
    }

    #[test]
    fn shortest_network_cases() {
        let b = unit_ball();
        assert_eq!(shortest_network(&[Vec3::zeros()], &b).unwrap().total_length, 0.0);
        let p = Vec3::new(0.3, 0.4, 0.0);
        assert!((shortest_network(&[Vec3::zeros(), p], &b).unwrap().total_length - 0.5).abs() < 1e-15);
        assert!(shortest_network(&[Vec3::new(2.0, 0.0, 0.0)], &b).is_err());
        assert!(shortest_network(&[], &b).is_err());
    }

    fn y_target() -> RetractionTarget {
        let r: [Vec3; 3] = std::array::from_fn(|i| {
            let t = 2.0 * PI * i as f64 / 3.0;
            Vec3::new(t.cos(), t.sin(), 0.0)
        });
        RetractionTarget::y_set(Vec3::zeros(), r, unit_ball()).unwrap()
    }

    #[test]
    fn y_retraction_examples() {
        let f = y_target();
        assert!(y_retraction(&f, &Vec3::new(0.0, 0.0, 5.0)).norm() < 1e-15);
        let on = f.rays[1] * 0.4;
        assert!((y_retraction(&f, &on) - on).norm() < 1e-15);
        // far out along a branch clamps to the sphere
        assert!((y_retraction(&f, &(f.rays[2] * 7.0)) - f.rays[2]).norm() < 1e-15);
    }

    #[test]
    fn y_retraction_is_the_oblique_projection() {
        // in V_0, the line through y parallel to L_0 meets L_1 or L_2
        let f = y_target();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let th = rng.gen_range(2.0 * PI / 3.0..4.0 * PI / 3.0);
            let rho = rng.gen_range(0.0..0.9);
            let y = Vec3::new(rho * th.cos(), rho * th.sin(), 0.0);
            let h = y_retraction(&f, &y);
            // h - y is parallel to L_0 and h sits on L_1 or L_2
            assert!((h - y).cross(&f.rays[0]).norm() < 1e-12);
            assert!(f.contains(&h, 1e-12));
            assert!(h.dot(&f.rays[0]) <= 1e-12);
        }
    }

    #[test]
    fn half_lines_and_lines() {
        let th = 140f64.to_radians();
        let b = LocalWindow::new(Vec3::new(0.1, 0.0, 0.0), 1.0).unwrap();
        let f = RetractionTarget::half_lines(Vec3::zeros(), Vec3::x(), Vec3::new(th.cos(), th.sin(), 0.0), b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let p = Vec3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let h = y_retraction(&f, &p);
            assert!(f.contains(&h, 1e-12));
            assert!((y_retraction(&f, &h) - h).norm() < 1e-12);
        }
        assert!(RetractionTarget::half_lines(Vec3::zeros(), Vec3::x(), Vec3::y(), unit_ball()).is_err());
        let l = RetractionTarget::half_lines(Vec3::zeros(), Vec3::x(), -Vec3::x(), unit_ball()).unwrap();
        assert_eq!(l.shape, TargetShape::Line);
        assert!((y_retraction(&l, &Vec3::new(0.5, 3.0, -1.0)) - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn targets_from_networks() {
        let a = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.5, 0.8, 0.0),
        ];
        let net = fermat_point(a[0], a[1], a[2]).unwrap();
        let b = LocalWindow::new(net.nodes[3], 0.3).unwrap();
        assert_eq!(RetractionTarget::from_network(&net, b).unwrap().shape, TargetShape::Y);
        let seg = shortest_network(&[Vec3::zeros(), Vec3::x()], &unit_ball()).unwrap();
        assert_eq!(
            RetractionTarget::from_network(&seg, unit_ball()).unwrap().shape,
            TargetShape::Line
        );
        let pt = shortest_network(&[Vec3::zeros()], &unit_ball()).unwrap();
        assert!(matches!(
            RetractionTarget::from_network(&pt, unit_ball()),
            Err(Error::UnsupportedShape(_))
        ));
    }
}
