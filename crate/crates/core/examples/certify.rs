//! Finite-sample biHolder-ball check near the spine of a Y cone.

use filmgeom::cone::{construct_reference_cone, ConeKind};
use filmgeom::fit::{biholder_certificate, CertificateParams};
use filmgeom::geometry::{Frame, Vec3};
use filmgeom::synth;

fn main() -> filmgeom::Result<()> {
    let y = construct_reference_cone(ConeKind::Y, Vec3::zeros(), Frame::identity());
    let e = synth::cone_fan(&y, 2.0, 0.004)?;
    let params = CertificateParams {
        probe_points: 2,
        ..CertificateParams::default()
    };
    let rep = biholder_certificate(&e, Vec3::zeros(), 0.3, 0.05, &[0.15, 0.3], &params)?;
    println!(
        "ball type {}, centered {}, max beta {:.2e}, passed {}",
        rep.ball_type, rep.centered, rep.max_beta, rep.passed
    );
    for f in &rep.fits {
        println!(
            "  y = {:?} t = {:.3}: {} beta {:.2e}",
            f.center.as_slice(),
            f.scale,
            f.kind,
            f.beta
        );
    }
    Ok(())
}
