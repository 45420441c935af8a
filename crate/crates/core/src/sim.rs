//! End-to-end simulation runs: tumor growth and treatment evaluation.
//!
//! Operator splitting: oxygen advances with dt_diff, motility + mechanics +
//! attachment with dt_mech, and division/drug/death with dt_pheno. Substep
//! counts are validated as whole numbers at config time.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cell::{Cell, CellKind};
use crate::error::{Error, Result};
use crate::genome::Genome;
use crate::oxygen::OxygenField;
use crate::params::SimParams;
use crate::rng::{stream, tag};
use crate::snapshot::{hex_pack_disc, TumorSnapshot};
use crate::vec2::Vec2;
use crate::world::WorldState;

/// Result of one treatment run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOutcome {
    /// Live tumor cells at the end of the run.
    pub rcc: u64,
    /// Center of gravity of live workers; the domain center when none
    /// survive (see `workers_extinct`).
    pub behavior: Vec2,
    pub elapsed_sim_time: f64,
    pub workers_extinct: bool,
}

/// Arithmetic mean of coordinates; `None` for an empty list.
pub fn center_of_gravity(positions: &[Vec2]) -> Option<Vec2> {
    if positions.is_empty() {
        return None;
    }
    let mut sum = Vec2::ZERO;
    for p in positions {
        sum += *p;
    }
    Some(sum * (1.0 / positions.len() as f64))
}

/// Genome handed to growth-phase steps; no workers exist then, so only the
/// bounds assertion ever reads it.
fn growth_genome() -> Genome {
    Genome::from_array([0.5, 0.5, 1.0, 5.0, 1.0, 10.0]).expect("static genome")
}

fn advance(
    world: &mut WorldState,
    params: &SimParams,
    genome: &Genome,
    rng: &mut ChaCha8Rng,
    pheno_steps: usize,
    division_enabled: bool,
) {
    let w = params.world;
    let mech_per_pheno = (w.dt_pheno / w.dt_mech).round() as usize;
    let diff_per_mech = (w.dt_mech / w.dt_diff).round() as usize;
    let mut ox_scratch = Vec::new();
    for _ in 0..pheno_steps {
        for _ in 0..mech_per_pheno {
            let uptake = world.build_uptake_grid(params);
            for _ in 0..diff_per_mech {
                world
                    .oxygen
                    .step_with_scratch(&uptake, w.dt_diff, &mut ox_scratch);
            }
            world.step_worker_motility(params, genome, w.dt_mech, rng);
            world.step_mechanics(params, genome, w.dt_mech);
            world.step_attachment_and_release(params, genome);
            world.clock_min += w.dt_mech;
        }
        world.step_drug_and_death(params, w.dt_pheno, rng, division_enabled);
    }
}

/// Grow a tumor from a hex-packed disc for `days` simulated days.
/// Deterministic for a fixed seed.
pub fn grow_tumor(params: &SimParams, seed: u64, days: f64) -> Result<TumorSnapshot> {
    params.validate()?;
    if days < 0.0 {
        return Err(Error::Config(format!("growth days must be >= 0, got {days}")));
    }
    let w = params.world;
    let cells: Vec<Cell> = hex_pack_disc(w.initial_tumor_radius, w.cell_radius)
        .into_iter()
        .map(|pos| Cell::new(CellKind::Tumor, pos, w.cell_radius))
        .collect();
    let mut world = WorldState::new(cells, OxygenField::uniform(params)?);
    let pheno_steps = (days * 1440.0 / w.dt_pheno).round() as usize;
    let mut rng = stream(&[seed, tag::GROW]);
    advance(
        &mut world,
        params,
        &growth_genome(),
        &mut rng,
        pheno_steps,
        true,
    );
    Ok(TumorSnapshot::from_world(&world, seed, w.domain_half_width))
}

/// Radius of the smallest origin-centered circle containing all live tumor
/// cells (cell edges included).
pub fn tumor_edge_radius(world: &WorldState) -> f64 {
    world
        .cells
        .iter()
        .filter(|c| c.alive && c.kind == CellKind::Tumor)
        .map(|c| c.pos.norm() + c.radius)
        .fold(0.0, f64::max)
}

/// Insert worker and cargo agents at uniform-random positions in the annulus
/// outside the tumor boundary. Deterministic for a fixed seed.
pub fn inject_treatment(world: &mut WorldState, params: &SimParams, seed: u64) {
    let w = params.world;
    let edge = tumor_edge_radius(world);
    let (r_in, r_out) = (edge + w.injection_band_inner, edge + w.injection_band_outer);
    let mut rng = stream(&[seed, tag::INJECT]);
    let mut place = |rng: &mut ChaCha8Rng| -> Vec2 {
        // uniform over the annulus area, rejecting points outside the domain
        let mut last = Vec2::ZERO;
        for _ in 0..64 {
            let r = (rng.random_range(r_in * r_in..=r_out * r_out)).sqrt();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            last = Vec2::new(r * theta.cos(), r * theta.sin());
            if last.x.abs() <= w.domain_half_width && last.y.abs() <= w.domain_half_width {
                return last;
            }
        }
        last.clamp_to_box(w.domain_half_width)
    };
    for _ in 0..w.n_workers {
        let pos = place(&mut rng);
        world
            .cells
            .push(Cell::new(CellKind::Worker, pos, w.cell_radius));
    }
    for _ in 0..w.n_cargo {
        let pos = place(&mut rng);
        world
            .cells
            .push(Cell::new(CellKind::Cargo, pos, w.cell_radius));
    }
}

/// Load a snapshot, inject the treatment, and simulate `days` days.
pub fn run_treatment(
    params: &SimParams,
    snapshot: &TumorSnapshot,
    genome: &Genome,
    seed: u64,
    days: f64,
) -> Result<SimOutcome> {
    params.validate()?;
    if !(days > 0.0) {
        return Err(Error::Config(format!("treatment days must be > 0, got {days}")));
    }
    if snapshot.cells.is_empty() {
        return Err(Error::Sim("snapshot contains no tumor cells".into()));
    }
    if !genome.in_bounds() {
        return Err(Error::Sim(format!("genome outside bounds: {genome:?}")));
    }
    let w = params.world;
    let mut world = WorldState::new(snapshot.to_cells(), snapshot.oxygen.clone());
    inject_treatment(&mut world, params, seed);
    let pheno_steps = (days * 1440.0 / w.dt_pheno).round() as usize;
    let mut rng = stream(&[seed, tag::TREAT]);
    advance(
        &mut world,
        params,
        genome,
        &mut rng,
        pheno_steps,
        w.division_during_treatment,
    );

    let worker_positions: Vec<Vec2> = world
        .cells
        .iter()
        .filter(|c| c.alive && c.kind == CellKind::Worker)
        .map(|c| c.pos)
        .collect();
    let (behavior, extinct) = match center_of_gravity(&worker_positions) {
        Some(cog) => (cog, false),
        None => (Vec2::ZERO, true),
    };
    debug_assert!(world.ledger_balances());
    debug_assert!(world.attachments_mutual());
    Ok(SimOutcome {
        rcc: world.live_count(CellKind::Tumor) as u64,
        behavior,
        elapsed_sim_time: days * 1440.0,
        workers_extinct: extinct,
    })
}
