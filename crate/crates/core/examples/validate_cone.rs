//! Structural validation of spherical graphs: the T graph passes, a bent
//! Y graph and two crossing great circles do not.

use filmgeom::cone::{reference_graph, validate_cone_structure, ConeKind, ValidationParams};
use filmgeom::geometry::{GreatCircleArc, SphericalGraph, Vec3};

fn y_with_angles(deg: [f64; 3]) -> filmgeom::Result<SphericalGraph> {
    let arcs = deg
        .iter()
        .map(|d| {
            let u = Vec3::new(d.to_radians().cos(), d.to_radians().sin(), 0.0);
            GreatCircleArc::with_normal(Vec3::z(), -Vec3::z(), Vec3::z().cross(&u))
        })
        .collect::<filmgeom::Result<Vec<_>>>()?;
    SphericalGraph::with_default_parameters(arcs)
}

fn main() -> filmgeom::Result<()> {
    let params = ValidationParams::default();
    let crossing = SphericalGraph::new(
        vec![GreatCircleArc::full(Vec3::z())?, GreatCircleArc::full(Vec3::x())?],
        0.1,
        0.1,
    )?;
    for (name, g) in [
        ("T", reference_graph(ConeKind::T)),
        ("Y 0/120/240", y_with_angles([0.0, 120.0, 240.0])?),
        ("Y 0/100/220", y_with_angles([0.0, 100.0, 220.0])?),
        ("crossing circles", crossing),
    ] {
        let rep = validate_cone_structure(&g, &params)?;
        let rules: Vec<String> = rep.violations.iter().map(|v| format!("{:?}", v.rule)).collect();
        println!("{name}: valid {} {rules:?}", rep.is_valid);
    }
    Ok(())
}
