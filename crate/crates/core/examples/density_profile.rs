//! Density ratios around the apex of a T cone and around the center of a
//! plane with an annular hole, with the monotonicity audit and the
//! constant-density detector.

use filmgeom::cone::{construct_reference_cone, ConeKind};
use filmgeom::geometry::{Frame, Vec3};
use filmgeom::measure::{constant_density_detector, density_profile, monotonicity_audit, GaugeFunction};
use filmgeom::synth;

fn main() -> filmgeom::Result<()> {
    let radii: Vec<f64> = (0..16).map(|i| 0.05 * 1.2f64.powi(i)).collect();
    let t = construct_reference_cone(ConeKind::T, Vec3::zeros(), Frame::identity());
    let e = synth::cone_fan(&t, 1.1, 0.01)?;
    let prof = density_profile(&e, Vec3::zeros(), &radii, &GaugeFunction::Zero, 1.0)?;
    let audit = monotonicity_audit(&prof, 1e-3)?;
    println!(
        "T apex: theta {:.6} .. {:.6}, audit passed {}",
        prof.theta[0],
        prof.theta[15],
        audit.passed()
    );
    for iv in constant_density_detector(&prof, 1e-6)? {
        println!("  constant on [{:.3}, {:.3}] at {:.6}", iv.a, iv.b, iv.theta_min);
    }

    let hole = synth::plane_with_annular_hole(0.3, 0.5, 1.2, 128, 0.01)?;
    let prof = density_profile(
        &hole,
        Vec3::zeros(),
        &radii,
        &GaugeFunction::Power { c: 0.1, alpha: 0.5 },
        1.0,
    )?;
    let audit = monotonicity_audit(&prof, 1e-3)?;
    println!("annular hole: audit passed {}", audit.passed());
    for v in &audit.violations {
        println!("  drop on [{:.3}, {:.3}]", v.r_lo, v.r_hi);
    }
    prof.write_csv(std::io::stdout().lock())?;
    Ok(())
}
