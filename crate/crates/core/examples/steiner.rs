//! Fermat points and shortest networks through three points.

use filmgeom::geometry::{LocalWindow, Vec3};
use filmgeom::steiner::{fermat_point, shortest_network};

fn main() -> filmgeom::Result<()> {
    let h = 3f64.sqrt() / 2.0;
    let cases = [
        ("equilateral", [Vec3::zeros(), Vec3::x(), Vec3::new(0.5, h, 0.0)]),
        (
            "skew",
            [
                Vec3::new(0.1, 0.0, 0.3),
                Vec3::new(1.0, 0.2, 0.0),
                Vec3::new(0.3, 0.9, -0.4),
            ],
        ),
        (
            "obtuse",
            [Vec3::zeros(), Vec3::new(-1.0, 0.1, 0.0), Vec3::new(1.0, 0.1, 0.0)],
        ),
    ];
    for (name, [a, b, c]) in cases {
        let net = fermat_point(a, b, c)?;
        println!(
            "{name}: length {:.9}, Steiner point {:?}, residual {:.1e}",
            net.total_length,
            net.fermat_node.map(|i| net.nodes[i].as_slice().to_vec()),
            net.stationarity_residual()
        );
    }
    let ball = LocalWindow::new(Vec3::zeros(), 1.0)?;
    let net = shortest_network(&[Vec3::x(), -Vec3::x(), Vec3::y()], &ball)?;
    println!(
        "three boundary points: {} edges, length {:.6}",
        net.edges.len(),
        net.total_length
    );
    Ok(())
}
