//! Simulator-free deceptive benchmark.
//!
//! The genome is normalized to the unit cube. A wide shallow basin (the
//! trap) and a narrow deep one (the global target) sit in opposite corners
//! of the plane spanned by the first two coordinates, which is also exactly
//! the behavior plane. Objective-only search slides into the trap it samples
//! first; behavior-space novelty keeps pushing toward the unexplored corner
//! holding the global basin.
//!
//! Basin distance is measured in that same two-coordinate plane (the basin
//! centers hold every remaining coordinate at its midpoint 0.5).

use crate::genome::Genome;
use crate::vec2::Vec2;

pub const TRAP_CENTER: [f64; 6] = [0.1, 0.1, 0.5, 0.5, 0.5, 0.5];
pub const GLOBAL_TARGET: [f64; 6] = [0.9, 0.9, 0.5, 0.5, 0.5, 0.5];
pub const TRAP_RADIUS: f64 = 0.4;
pub const GLOBAL_RADIUS: f64 = 0.15;
pub const TRAP_DEPTH: f64 = 0.6;
pub const GLOBAL_DEPTH: f64 = 1.0;
pub const PSEUDO_RCC_SCALE: f64 = 1400.0;
/// Behavior coordinates are the first two normalized alleles scaled to um.
pub const BEHAVIOR_SCALE: f64 = 1000.0;

fn basin_distance(u: &[f64; 6], center: &[f64; 6]) -> f64 {
    let dx = u[0] - center[0];
    let dy = u[1] - center[1];
    dx.hypot(dy)
}

/// Pseudo remaining-cell count and behavior point for a genome.
pub fn deceptive_benchmark_eval(genome: &Genome) -> (f64, Vec2) {
    genome.assert_in_bounds();
    let u = genome.normalized();
    let cone = |d: f64, radius: f64| (1.0 - d / radius).max(0.0);
    let depth = (TRAP_DEPTH * cone(basin_distance(&u, &TRAP_CENTER), TRAP_RADIUS)
        + GLOBAL_DEPTH * cone(basin_distance(&u, &GLOBAL_TARGET), GLOBAL_RADIUS))
    .clamp(0.0, 1.0);
    (
        PSEUDO_RCC_SCALE * (1.0 - depth),
        Vec2::new(BEHAVIOR_SCALE * u[0], BEHAVIOR_SCALE * u[1]),
    )
}

/// Diagonal of the surrogate behavior box, used as the empty-pool
/// sparseness value.
pub fn behavior_diagonal() -> f64 {
    BEHAVIOR_SCALE * std::f64::consts::SQRT_2
}
