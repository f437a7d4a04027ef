//! P/Y/T labels along a Y cone: on the spine, on a sheet, and at the apex of
//! a T cone.

use filmgeom::cone::{construct_reference_cone, ConeKind};
use filmgeom::fit::{classify_point, ClassifyThresholds};
use filmgeom::geometry::{Frame, Vec3};
use filmgeom::measure::GaugeFunction;
use filmgeom::synth;

fn main() -> filmgeom::Result<()> {
    let radii = [0.02, 0.05, 0.1, 0.2];
    let th = ClassifyThresholds::default();
    let y = construct_reference_cone(ConeKind::Y, Vec3::zeros(), Frame::identity());
    let e = synth::cone_fan(&y, 1.1, 0.005)?;
    let spine = y.characteristic_directions()[0];
    let sheet = y.faces()[0].e2 * 0.5 + spine * 0.1;
    for (name, x) in [("apex", Vec3::zeros()), ("spine", spine * 0.4), ("sheet", sheet)] {
        let l = classify_point(&e, x, &GaugeFunction::Zero, 1.0, &radii, &th)?;
        println!("Y cone, {name}: {} (theta {:.4})", l.label, l.theta_estimate);
    }
    let t = construct_reference_cone(ConeKind::T, Vec3::zeros(), Frame::identity());
    let e = synth::cone_fan(&t, 1.1, 0.005)?;
    let l = classify_point(&e, Vec3::zeros(), &GaugeFunction::Zero, 1.0, &radii, &th)?;
    println!("T cone, apex: {} (theta {:.4})", l.label, l.theta_estimate);
    Ok(())
}
