//! Exact area of a convex planar region intersected with a disk.

use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed area of `triangle(0, a, b) ∩ disk(0, r)`.
fn triangle_disk_signed(a: Vec2, b: Vec2, r: f64) -> f64 {
    let d = b - a;
    let qa = d.dot(&d);
    if qa == 0.0 {
        return 0.0;
    }
    let qb = a.dot(&d);
    let qc = a.dot(&a) - r * r;
    let mut cuts = [0.0f64; 2];
    let mut n = 0;
    let disc = qb * qb - qa * qc;
    if disc > 0.0 {
        let s = disc.sqrt();
        for t in [(-qb - s) / qa, (-qb + s) / qa] {
            if t > 0.0 && t < 1.0 {
                cuts[n] = t;
                n += 1;
            }
        }
    }
    let mut pts = [a; 4];
    let mut m = 1;
    for &t in &cuts[..n] {
        pts[m] = a + d * t;
        m += 1;
    }
    pts[m] = b;
    m += 1;
    let mut area = 0.0;
    for w in pts[..m].windows(2) {
        let (p, q) = (w[0], w[1]);
        let mid = (p + q) * 0.5;
        if mid.norm_squared() <= r * r {
            area += 0.5 * cross(&p, &q);
        } else {
            area += 0.5 * r * r * cross(&p, &q).atan2(p.dot(&q));
        }
    }
    area
}

/// Area of `polygon ∩ disk(center, r)`; the polygon is simple (convex in all
/// uses here) and may be given in either orientation.
pub fn disk_polygon_area(polygon: &[Vec2], center: &Vec2, r: f64) -> f64 {
    if polygon.len() < 3 || r <= 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..polygon.len() {
        let a = polygon[i] - center;
        let b = polygon[(i + 1) % polygon.len()] - center;
        total += triangle_disk_signed(a, b, r);
    }
    total.abs()
}

/// Clips a convex polygon to the half-plane `normal · p >= offset`.
pub fn clip_half_plane(polygon: &[Vec2], normal: &Vec2, offset: f64) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(polygon.len() + 1);
    if polygon.is_empty() {
        return out;
    }
    for i in 0..polygon.len() {
        let p = polygon[i];
        let q = polygon[(i + 1) % polygon.len()];
        let sp = normal.dot(&p) - offset;
        let sq = normal.dot(&q) - offset;
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

/// Area of the wedge `{apex + s u : s >= 0, u between dir0 and dir0 rotated
/// counter-clockwise by angle}` (angle in `(0, pi]`) intersected with the
/// disk `disk(center, r)`.
pub fn wedge_disk_area(apex: &Vec2, dir0_angle: f64, angle: f64, center: &Vec2, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let pad = r * 1.5 + 1.0;
    let square = [
        Vec2::new(center.x - pad, center.y - pad),
        Vec2::new(center.x + pad, center.y - pad),
        Vec2::new(center.x + pad, center.y + pad),
        Vec2::new(center.x - pad, center.y + pad),
    ];
    let u1 = Vec2::new(dir0_angle.cos(), dir0_angle.sin());
    let u2 = Vec2::new((dir0_angle + angle).cos(), (dir0_angle + angle).sin());
    // left of u1: cross(u1, p - apex) >= 0  <=>  n1 · p >= n1 · apex with n1 = (-u1.y, u1.x)
    let n1 = Vec2::new(-u1.y, u1.x);
    let n2 = Vec2::new(u2.y, -u2.x);
    let mut poly = clip_half_plane(&square, &n1, n1.dot(apex));
    poly = clip_half_plane(&poly, &n2, n2.dot(apex));
    disk_polygon_area(&poly, center, r)
}
