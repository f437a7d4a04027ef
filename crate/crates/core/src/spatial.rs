//! Static kd-tree over a point cloud, used for nearest-neighbour and ball
//! queries on sampled sets.

use crate::geometry::Vec3;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone, Copy)]
enum Kind {
    Leaf { start: usize, end: usize },
    Split { left: usize, right: usize },
}

/// Every node keeps the tight bounding box of its points. Samples of
/// surfaces leave most of space empty, and pruning on cell boundaries
/// instead would visit most of the tree for queries far from the set.
#[derive(Debug, Clone, Copy)]
struct Node {
    lo: [f64; 3],
    hi: [f64; 3],
    kind: Kind,
}

impl Node {
    #[allow(clippy::needless_range_loop)]
    fn dist2(&self, q: &[f64; 3]) -> f64 {
        let mut d = 0.0;
        for a in 0..3 {
            let t = (self.lo[a] - q[a]).max(q[a] - self.hi[a]).max(0.0);
            d += t * t;
        }
        d
    }
}

/// Balanced kd-tree built once over a fixed set of points.
///
/// Splits at the median index, so repeated coordinates (lattice samples)
/// are handled without special casing.
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<[f64; 3]>,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(points: &[Vec3]) -> Self {
        let pts: Vec<[f64; 3]> = points.iter().map(|p| [p.x, p.y, p.z]).collect();
        let mut order: Vec<u32> = (0..pts.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * pts.len() / LEAF_SIZE + 1);
        if !pts.is_empty() {
            build(&pts, &mut order, 0, pts.len(), &mut nodes);
        }
        KdTree {
            points: pts,
            order,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index and distance of the nearest point, `None` for an empty tree.
    pub fn nearest(&self, q: &Vec3) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let q = [q.x, q.y, q.z];
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_rec(0, &q, &mut best);
        Some((best.0, best.1.sqrt()))
    }

    fn nearest_rec(&self, node: usize, q: &[f64; 3], best: &mut (usize, f64)) {
        match self.nodes[node].kind {
            Kind::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let p = &self.points[i as usize];
                    let d = sq(p[0] - q[0]) + sq(p[1] - q[1]) + sq(p[2] - q[2]);
                    if d < best.1 {
                        *best = (i as usize, d);
                    }
                }
            }
            Kind::Split { left, right } => {
                let dl = self.nodes[left].dist2(q);
                let dr = self.nodes[right].dist2(q);
                let (a, da, b, db) = if dl <= dr {
                    (left, dl, right, dr)
                } else {
                    (right, dr, left, dl)
                };
                if da < best.1 {
                    self.nearest_rec(a, q, best);
                }
                if db < best.1 {
                    self.nearest_rec(b, q, best);
                }
            }
        }
    }

    /// Indices of all points within the closed ball `B(center, radius)`.
    pub fn within(&self, center: &Vec3, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() || radius < 0.0 {
            return out;
        }
        let q = [center.x, center.y, center.z];
        self.within_rec(0, &q, radius * radius, &mut out);
        out
    }

    fn within_rec(&self, node: usize, q: &[f64; 3], r2: f64, out: &mut Vec<usize>) {
        let n = &self.nodes[node];
        if n.dist2(q) > r2 {
            return;
        }
        match n.kind {
            Kind::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let p = &self.points[i as usize];
                    let d = sq(p[0] - q[0]) + sq(p[1] - q[1]) + sq(p[2] - q[2]);
                    if d <= r2 {
                        out.push(i as usize);
                    }
                }
            }
            Kind::Split { left, right } => {
                self.within_rec(left, q, r2, out);
                self.within_rec(right, q, r2, out);
            }
        }
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

fn build(pts: &[[f64; 3]], order: &mut [u32], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &i in &order[start..end] {
        let p = &pts[i as usize];
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let leaf = Node {
        lo,
        hi,
        kind: Kind::Leaf { start, end },
    };
    nodes.push(leaf);
    if end - start <= LEAF_SIZE {
        return id;
    }
    // split along the widest extent
    let axis = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    if hi[axis] - lo[axis] == 0.0 {
        // all points coincide
        return id;
    }
    let mid = (end - start) / 2;
    order[start..end].select_nth_unstable_by(mid, |&a, &b| pts[a as usize][axis].total_cmp(&pts[b as usize][axis]));
    let left = build(pts, order, start, start + mid, nodes);
    let right = build(pts, order, start + mid, end, nodes);
    nodes[id].kind = Kind::Split { left, right };
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nearest_matches_brute_force_on_lattice() {
        let mut pts = Vec::new();
        for i in -20..=20 {
            for j in -20..=20 {
                pts.push(Vec3::new(i as f64 * 0.05, j as f64 * 0.05, 0.0));
            }
        }
        let tree = KdTree::new(&pts);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let q = Vec3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-0.5..0.5),
            );
            let (_, d) = tree.nearest(&q).unwrap();
            let brute = pts.iter().map(|p| (p - q).norm()).fold(f64::INFINITY, f64::min);
            assert!((d - brute).abs() < 1e-12);
            let r = rng.gen_range(0.0..0.5);
            let mut got = tree.within(&q, r);
            got.sort();
            let want: Vec<usize> = (0..pts.len())
                .filter(|&i| (pts[i] - q).norm_squared() <= r * r)
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn duplicates_and_empty() {
        let pts = vec![Vec3::new(1.0, 1.0, 1.0); 100];
        let tree = KdTree::new(&pts);
        assert_eq!(tree.within(&Vec3::new(1.0, 1.0, 1.0), 0.0).len(), 100);
        assert!(KdTree::new(&[]).nearest(&Vec3::zeros()).is_none());
    }
}
