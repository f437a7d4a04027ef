//! The reference cones: densities, face layout, measure in off-center balls
//! and a JSON round trip of the spherical graph.

use filmgeom::cone::{
    cone_density, cone_measure_in_ball, construct_reference_cone, reference_graph, ConeKind, MinimalCone,
};
use filmgeom::geometry::{Frame, LocalWindow, SphericalGraph, Vec3};

fn main() -> filmgeom::Result<()> {
    for kind in [ConeKind::Plane, ConeKind::Y, ConeKind::T] {
        let cone = construct_reference_cone(kind, Vec3::zeros(), Frame::identity());
        let ball = LocalWindow::new(Vec3::new(0.3, 0.2, 0.1), 1.0)?;
        println!(
            "{kind}: density {:.6} ({:.4} pi), {} faces, H2 in B((0.3, 0.2, 0.1), 1) = {:.6}",
            cone_density(&cone),
            cone_density(&cone) / std::f64::consts::PI,
            cone.faces().len(),
            cone_measure_in_ball(&cone, &ball, 1e-12)?
        );
    }
    // a graph survives serialization and rebuilds the same cone
    let json = reference_graph(ConeKind::T).to_json_string();
    let graph = SphericalGraph::from_json_str(&json)?;
    let custom = MinimalCone::custom(Vec3::zeros(), graph);
    println!(
        "T graph: {} bytes of JSON, custom cone density {:.6}",
        json.len(),
        cone_density(&custom)
    );
    Ok(())
}
