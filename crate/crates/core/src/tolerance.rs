//! Global numeric policy.

/// Membership tolerance for "on the unit sphere" and "on the cone" tests.
pub const ON_SET: f64 = 1e-9;

/// Norm tolerance for unit vectors after construction.
pub const UNIT_NORM: f64 = 1e-12;

/// Default tolerance on the 120 degree rule for exactly constructed graphs (radians).
pub const ANGLE: f64 = 1e-6;

/// Radii below this multiple of the sampling gap are flagged unreliable.
pub const RELIABLE_GAP_FACTOR: f64 = 3.0;

/// Rounds `v` to a multiple of `2^-36`. Discrete choices made on snapped
/// values (lattice counts, cell indices, ball membership) agree between a
/// set and its dilated copy, whose normalized coordinates differ only by
/// rounding.
pub fn snap(v: f64) -> f64 {
    const GRID: f64 = (1u64 << 36) as f64;
    (v * GRID).round() / GRID
}
