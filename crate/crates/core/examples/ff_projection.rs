//! Radial projection of a tilted plane patch onto the 2-skeleton (the subcube
//! faces) of a dyadic grid, with the audit of the projection.

use filmgeom::ff::{projection_audit, skeleton_project, DyadicCube, FfParams};
use filmgeom::geometry::Vec3;
use filmgeom::synth;

fn main() -> filmgeom::Result<()> {
    let cube = DyadicCube::new(Vec3::zeros(), 1.0, 2)?;
    let f = synth::plane_patch_points(Vec3::new(0.5, 0.45, 0.52), Vec3::new(0.2, 0.3, 1.0), 0.8, 0.01)?;
    let (map, image) = skeleton_project(&f, &cube, &FfParams::default())?;
    let audit = projection_audit(&map, &f, &image)?;
    println!(
        "identity outside {}, on skeleton {}, subcube containment {}, max inflation {:.3}",
        audit.identity_outside, audit.on_skeleton, audit.subcube_containment, audit.max_inflation
    );
    Ok(())
}
