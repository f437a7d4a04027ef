//! Nearest-point retractions onto a Y set, two half-lines and a line in a
//! ball, with a sampled Lipschitz ratio.

use filmgeom::geometry::{LocalWindow, Vec3};
use filmgeom::steiner::{y_retraction, RetractionTarget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> filmgeom::Result<()> {
    let ball = LocalWindow::new(Vec3::zeros(), 1.0)?;
    let dir = |deg: f64| Vec3::new(deg.to_radians().cos(), deg.to_radians().sin(), 0.0);
    let targets = [
        (
            "Y",
            RetractionTarget::y_set(Vec3::zeros(), [dir(0.0), dir(120.0), dir(240.0)], ball)?,
        ),
        (
            "half-lines",
            RetractionTarget::half_lines(Vec3::zeros(), dir(0.0), dir(150.0), ball)?,
        ),
        ("line", RetractionTarget::line(Vec3::zeros(), dir(0.0), ball)?),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, t) in &targets {
        let mut lip: f64 = 0.0;
        for _ in 0..20_000 {
            let p = Vec3::from_fn(|_, _| rng.gen_range(-1.5..1.5));
            let q = Vec3::from_fn(|_, _| rng.gen_range(-1.5..1.5));
            lip = lip.max((y_retraction(t, &p) - y_retraction(t, &q)).norm() / (p - q).norm());
        }
        let p = Vec3::new(0.3, 0.4, 0.5);
        println!(
            "{name}: {:?} -> {:?}, Lipschitz ratio {lip:.4}",
            p.as_slice(),
            y_retraction(t, &p).as_slice()
        );
    }
    Ok(())
}
