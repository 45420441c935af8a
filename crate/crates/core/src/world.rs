//! Simulator state and per-timescale step operators.
//!
//! Update order inside one mechanics interval: oxygen substeps (driven by the
//! caller), worker motility, pairwise mechanics, attachment/release. Division,
//! drug damage, and death run on the slower phenotype clock. All iteration is
//! in agent-index order so a fixed seed replays bit-identically.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cell::{Cell, CellKind};
use crate::genome::Genome;
use crate::oxygen::OxygenField;
use crate::params::SimParams;
use crate::vec2::Vec2;

/// Uniform-grid neighbor index over live agents (linked lists per bin).
pub struct BinGrid {
    bin_size: f64,
    nx: usize,
    half: f64,
    heads: Vec<i32>,
    next: Vec<i32>,
}

impl BinGrid {
    pub fn build(cells: &[Cell], half: f64, bin_size: f64) -> Self {
        let nx = ((2.0 * half / bin_size).ceil() as usize).max(1);
        let mut grid = BinGrid {
            bin_size,
            nx,
            half,
            heads: vec![-1; nx * nx],
            next: vec![-1; cells.len()],
        };
        for (i, c) in cells.iter().enumerate() {
            if !c.alive {
                continue;
            }
            let b = grid.bin_of(c.pos);
            grid.next[i] = grid.heads[b];
            grid.heads[b] = i as i32;
        }
        grid
    }

    fn axis_bin(&self, c: f64) -> usize {
        (((c + self.half) / self.bin_size) as isize).clamp(0, self.nx as isize - 1) as usize
    }

    fn bin_of(&self, pos: Vec2) -> usize {
        self.axis_bin(pos.y) * self.nx + self.axis_bin(pos.x)
    }

    /// Visit live agents in the 3x3 bin block around `pos`. Covers all
    /// neighbors within `bin_size`.
    pub fn for_neighbors(&self, pos: Vec2, mut f: impl FnMut(usize)) {
        let bx = self.axis_bin(pos.x) as isize;
        let by = self.axis_bin(pos.y) as isize;
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (x, y) = (bx + dx, by + dy);
                if x < 0 || y < 0 || x >= self.nx as isize || y >= self.nx as isize {
                    continue;
                }
                let mut cur = self.heads[y as usize * self.nx + x as usize];
                while cur >= 0 {
                    f(cur as usize);
                    cur = self.next[cur as usize];
                }
            }
        }
    }
}

/// Death/birth tallies for the identity-conservation ledger.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Ledger {
    pub initial_tumor: u64,
    pub births: u64,
    pub deaths_drug: u64,
    pub deaths_necrosis: u64,
    pub deaths_apoptosis: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub cells: Vec<Cell>,
    pub oxygen: OxygenField,
    pub clock_min: f64,
    pub ledger: Ledger,
}

impl WorldState {
    pub fn new(cells: Vec<Cell>, oxygen: OxygenField) -> Self {
        let initial_tumor = cells
            .iter()
            .filter(|c| c.kind == CellKind::Tumor && c.alive)
            .count() as u64;
        WorldState {
            cells,
            oxygen,
            clock_min: 0.0,
            ledger: Ledger {
                initial_tumor,
                ..Ledger::default()
            },
        }
    }

    pub fn live_count(&self, kind: CellKind) -> usize {
        self.cells
            .iter()
            .filter(|c| c.alive && c.kind == kind)
            .count()
    }

    /// initial + births == live + recorded deaths, for tumor cells.
    pub fn ledger_balances(&self) -> bool {
        let live = self.live_count(CellKind::Tumor) as u64;
        self.ledger.initial_tumor + self.ledger.births
            == live + self.ledger.deaths_drug + self.ledger.deaths_necrosis
    }

    /// Every attachment link is mutual.
    pub fn attachments_mutual(&self) -> bool {
        self.cells.iter().enumerate().all(|(i, c)| match c.attached_to {
            None => true,
            Some(j) => self
                .cells
                .get(j)
                .is_some_and(|o| o.attached_to == Some(i)),
        })
    }

    fn unlink(&mut self, i: usize) {
        if let Some(j) = self.cells[i].attached_to.take() {
            self.cells[j].attached_to = None;
        }
    }

    /// Per-node relative-uptake grid from all live agents.
    pub fn build_uptake_grid(&self, params: &SimParams) -> Vec<f64> {
        let sources: Vec<(Vec2, f64)> = self
            .cells
            .iter()
            .filter(|c| c.alive)
            .map(|c| {
                let rate = match c.kind {
                    CellKind::Tumor => params.world.tumor_o2_uptake,
                    CellKind::Worker => params.treatment.worker_o2_uptake,
                    CellKind::Cargo => params.treatment.cargo_o2_uptake,
                };
                let volume = std::f64::consts::PI * c.radius * c.radius;
                (c.pos, rate * volume)
            })
            .collect();
        self.oxygen.uptake_grid_from_sources(&sources)
    }

    fn rel_adhesion(&self, params: &SimParams, genome: &Genome, kind: CellKind) -> f64 {
        match kind {
            CellKind::Tumor => params.world.tumor_rel_adhesion,
            CellKind::Worker => genome.worker_rel_adhesion,
            CellKind::Cargo => params.treatment.cargo_rel_adhesion,
        }
    }

    fn rel_repulsion(&self, params: &SimParams, genome: &Genome, kind: CellKind) -> f64 {
        match kind {
            CellKind::Tumor => params.world.tumor_rel_repulsion,
            CellKind::Worker => genome.worker_rel_repulsion,
            CellKind::Cargo => params.treatment.cargo_rel_repulsion,
        }
    }

    /// Overdamped pairwise mechanics plus the worker-cargo spring.
    ///
    /// Repulsion acts on overlap, adhesion out to
    /// `max_rel_adhesion_distance * (r_i + r_j)`, both scaled by the
    /// geometric mean of the agents' relative factors. Links longer than
    /// `max_elastic_displacement` after the move are broken.
    pub fn step_mechanics(&mut self, params: &SimParams, genome: &Genome, dt: f64) {
        genome.assert_in_bounds();
        debug_assert!(dt > 0.0);
        let t = &params.treatment;
        let half = params.world.domain_half_width;
        let max_r = self
            .cells
            .iter()
            .filter(|c| c.alive)
            .map(|c| c.radius)
            .fold(0.0, f64::max);
        if max_r == 0.0 {
            return;
        }
        let range = t.max_rel_adhesion_distance * 2.0 * max_r;
        let grid = BinGrid::build(&self.cells, half, range);

        let n = self.cells.len();
        let mut vel = vec![Vec2::ZERO; n];
        for i in 0..n {
            if !self.cells[i].alive {
                continue;
            }
            let ci = self.cells[i];
            grid.for_neighbors(ci.pos, |j| {
                if j <= i || !self.cells[j].alive {
                    return;
                }
                let cj = self.cells[j];
                let delta = cj.pos - ci.pos;
                let d = delta.norm();
                let r_sum = ci.radius + cj.radius;
                let adh_range = t.max_rel_adhesion_distance * r_sum;
                if d >= adh_range || d == 0.0 {
                    return;
                }
                let dir = delta * (1.0 / d);
                let mut speed = 0.0;
                if d < r_sum {
                    let rr = (self.rel_repulsion(params, genome, ci.kind)
                        * self.rel_repulsion(params, genome, cj.kind))
                    .sqrt();
                    let x = 1.0 - d / r_sum;
                    speed -= params.world.repulsion_coeff * rr * x * x;
                }
                let ra = (self.rel_adhesion(params, genome, ci.kind)
                    * self.rel_adhesion(params, genome, cj.kind))
                .sqrt();
                if ra > 0.0 {
                    speed += params.world.adhesion_coeff * ra * (1.0 - d / adh_range);
                }
                // positive speed pulls the pair together, negative pushes apart
                vel[i] += dir * speed;
                vel[j] += dir * (-speed);
            });
        }

        // worker-cargo elastic link: v = k * displacement, equal and opposite
        for i in 0..n {
            let ci = &self.cells[i];
            if !ci.alive || ci.kind != CellKind::Worker {
                continue;
            }
            if let Some(j) = ci.attached_to {
                let delta = self.cells[j].pos - ci.pos;
                vel[i] += delta * t.elastic_coefficient;
                vel[j] += delta * (-t.elastic_coefficient);
            }
        }

        for i in 0..n {
            if !self.cells[i].alive {
                continue;
            }
            let p = self.cells[i].pos + vel[i] * dt;
            self.cells[i].pos = p.clamp_to_box(half);
        }

        // break overstretched links
        for i in 0..n {
            let c = &self.cells[i];
            if !c.alive || c.kind != CellKind::Worker {
                continue;
            }
            if let Some(j) = c.attached_to {
                if self.cells[i].pos.dist(self.cells[j].pos) > t.max_elastic_displacement {
                    self.unlink(i);
                }
            }
        }
    }

    /// Summed cargo-attractant gradient at `pos`: kernel 1/(1 + d^2/sigma^2)
    /// over live, unattached, receptor-positive cargo.
    pub fn cargo_signal_gradient(&self, params: &SimParams, pos: Vec2) -> Vec2 {
        let sigma2 = params.world.chemo_sigma * params.world.chemo_sigma;
        let thr = params.treatment.attachment_receptor_threshold;
        let mut g = Vec2::ZERO;
        for c in &self.cells {
            if !c.alive
                || c.kind != CellKind::Cargo
                || c.attached_to.is_some()
                || c.receptor < thr
            {
                continue;
            }
            let delta = pos - c.pos;
            let denom = 1.0 + delta.norm_sq() / sigma2;
            // d/dp [1 / denom] = -2 delta / (sigma^2 denom^2)
            g += delta * (-2.0 / (sigma2 * denom * denom));
        }
        g
    }

    /// Worker self-propulsion. When a worker's persistence clock expires it
    /// redraws its direction as the normalized blend b*g + (1-b)*u, where g
    /// follows the cargo attractant upward when unattached and the oxygen
    /// gradient downward when attached, u is a uniform random unit vector,
    /// and b is the genome bias for its attachment state. Below the gradient
    /// shutdown threshold the worker parks until the next redraw.
    pub fn step_worker_motility(
        &mut self,
        params: &SimParams,
        genome: &Genome,
        dt: f64,
        rng: &mut ChaCha8Rng,
    ) {
        genome.assert_in_bounds();
        debug_assert!(dt > 0.0);
        let t = &params.treatment;
        let half = params.world.domain_half_width;
        for i in 0..self.cells.len() {
            let c = self.cells[i];
            if !c.alive || c.kind != CellKind::Worker {
                continue;
            }
            let mut dir = c.velocity_dir;
            let mut clock = c.persistence_clock - dt;
            if clock <= 1e-12 {
                clock = genome.worker_persistence_time;
                let attached = c.attached_to.is_some();
                let raw = if attached {
                    -self.oxygen.gradient_at(c.pos)
                } else {
                    self.cargo_signal_gradient(params, c.pos)
                };
                if raw.norm() < t.motility_shutdown_threshold {
                    dir = Vec2::ZERO;
                } else {
                    let g = raw.normalized(0.0).unwrap_or(Vec2::ZERO);
                    let b = if attached {
                        genome.attached_migration_bias
                    } else {
                        genome.unattached_migration_bias
                    };
                    let theta = rng.random_range(0.0..std::f64::consts::TAU);
                    let u = Vec2::new(theta.cos(), theta.sin());
                    dir = (g * b + u * (1.0 - b)).normalized(1e-12).unwrap_or(dir);
                }
            }
            let cell = &mut self.cells[i];
            cell.persistence_clock = clock;
            cell.velocity_dir = dir;
            cell.pos = (cell.pos + dir * (t.worker_speed * dt)).clamp_to_box(half);
        }
    }

    /// Attachment and release. Release first: an attached worker whose local
    /// oxygen is below the genome threshold drops its cargo, which is marked
    /// released and loses its receptor. Then each unattached worker (index
    /// order) links to the nearest free receptor-positive cargo inside
    /// [min_attach_distance, max_attach_distance]; ties break to the lower
    /// cargo index.
    pub fn step_attachment_and_release(&mut self, params: &SimParams, genome: &Genome) {
        genome.assert_in_bounds();
        let t = params.treatment;
        let half = params.world.domain_half_width;

        for i in 0..self.cells.len() {
            let c = &self.cells[i];
            if !c.alive || c.kind != CellKind::Worker || c.attached_to.is_none() {
                continue;
            }
            if self.oxygen.value_at(c.pos) < genome.cargo_release_o2_threshold {
                let j = self.cells[i].attached_to.unwrap();
                self.unlink(i);
                self.cells[j].released = true;
                self.cells[j].receptor = 0.0;
            }
        }

        let grid = BinGrid::build(&self.cells, half, t.max_attach_distance.max(1.0));
        for i in 0..self.cells.len() {
            let c = &self.cells[i];
            if !c.alive || c.kind != CellKind::Worker || c.attached_to.is_some() {
                continue;
            }
            let pos = c.pos;
            let mut best: Option<(f64, usize)> = None;
            grid.for_neighbors(pos, |j| {
                let cj = &self.cells[j];
                if cj.kind != CellKind::Cargo
                    || !cj.alive
                    || cj.attached_to.is_some()
                    || cj.receptor < t.attachment_receptor_threshold
                {
                    return;
                }
                let d = pos.dist(cj.pos);
                if d < t.min_attach_distance || d > t.max_attach_distance {
                    return;
                }
                let better = match best {
                    None => true,
                    Some((bd, bj)) => d < bd || (d == bd && j < bj),
                };
                if better {
                    best = Some((d, j));
                }
            });
            if let Some((_, j)) = best {
                self.cells[i].attached_to = Some(j);
                self.cells[j].attached_to = Some(i);
            }
        }
    }

    /// Phenotype-clock step: drug damage and kill, cargo/worker apoptosis,
    /// hypoxic necrosis, and (when enabled) oxygen-gated tumor division.
    ///
    /// A tumor cell in contact range of a released cargo integrates
    /// damage' = damage_rate - repair_rate * damage; otherwise damage decays
    /// and is floored at zero. The kill hazard over dt is
    /// 1 - exp(-drug_death_rate * damage * dt).
    pub fn step_drug_and_death(
        &mut self,
        params: &SimParams,
        dt: f64,
        rng: &mut ChaCha8Rng,
        division_enabled: bool,
    ) {
        debug_assert!(dt > 0.0);
        let t = params.treatment;
        let w = params.world;

        // grid over released cargo only
        let released: Vec<usize> = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.alive && c.kind == CellKind::Cargo && c.released)
            .map(|(i, _)| i)
            .collect();
        let max_r = self
            .cells
            .iter()
            .filter(|c| c.alive)
            .map(|c| c.radius)
            .fold(0.0, f64::max);
        let dose_grid = if released.is_empty() {
            None
        } else {
            let mut marked = vec![false; self.cells.len()];
            for &i in &released {
                marked[i] = true;
            }
            let mut only_released = self.cells.clone();
            for (i, c) in only_released.iter_mut().enumerate() {
                if !marked[i] {
                    c.alive = false;
                }
            }
            Some(BinGrid::build(
                &only_released,
                w.domain_half_width,
                (2.0 * max_r + w.drug_radius_slack).max(1.0),
            ))
        };

        let n = self.cells.len();
        let mut daughters: Vec<Vec2> = Vec::new();
        for i in 0..n {
            let c = self.cells[i];
            if !c.alive {
                continue;
            }
            match c.kind {
                CellKind::Tumor => {
                    let mut exposed = false;
                    if let Some(grid) = &dose_grid {
                        grid.for_neighbors(c.pos, |j| {
                            let cj = &self.cells[j];
                            if c.pos.dist(cj.pos) < c.radius + cj.radius + w.drug_radius_slack {
                                exposed = true;
                            }
                        });
                    }
                    let cell = &mut self.cells[i];
                    if exposed {
                        cell.damage += (t.damage_rate - t.repair_rate * cell.damage) * dt;
                    } else {
                        cell.damage = (cell.damage - t.repair_rate * cell.damage * dt).max(0.0);
                    }
                    let hazard = t.drug_death_rate * cell.damage * dt;
                    if hazard > 0.0 && rng.random::<f64>() < 1.0 - (-hazard).exp() {
                        cell.alive = false;
                        self.ledger.deaths_drug += 1;
                        continue;
                    }
                    let o2 = self.oxygen.value_at(c.pos);
                    if o2 < w.necrosis_o2 {
                        let p = 1.0 - (-w.necrosis_rate * dt).exp();
                        if p > 0.0 && rng.random::<f64>() < p {
                            self.cells[i].alive = false;
                            self.ledger.deaths_necrosis += 1;
                            continue;
                        }
                    }
                    if division_enabled && o2 > w.hypoxia_arrest_o2 {
                        let p = 1.0 - (-w.division_rate * dt).exp();
                        if p > 0.0 && rng.random::<f64>() < p {
                            let theta = rng.random_range(0.0..std::f64::consts::TAU);
                            let offset = Vec2::new(theta.cos(), theta.sin()) * c.radius;
                            daughters.push((c.pos + offset).clamp_to_box(w.domain_half_width));
                        }
                    }
                }
                CellKind::Cargo => {
                    let p = 1.0 - (-t.cargo_apoptosis_rate * dt).exp();
                    if p > 0.0 && rng.random::<f64>() < p {
                        self.cells[i].alive = false;
                        self.unlink(i);
                        self.ledger.deaths_apoptosis += 1;
                    }
                }
                CellKind::Worker => {
                    let p = 1.0 - (-t.worker_apoptosis_rate * dt).exp();
                    if p > 0.0 && rng.random::<f64>() < p {
                        self.cells[i].alive = false;
                        self.unlink(i);
                        self.ledger.deaths_apoptosis += 1;
                    }
                }
            }
        }
        for pos in daughters {
            self.cells
                .push(Cell::new(CellKind::Tumor, pos, w.cell_radius));
            self.ledger.births += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn test_params() -> SimParams {
        let mut p = SimParams::fast();
        p.validate().unwrap();
        p
    }

    fn mid_genome() -> Genome {
        Genome::from_array([0.5, 0.5, 1.0, 5.0, 1.0, 10.0]).unwrap()
    }

    fn empty_world(params: &SimParams) -> WorldState {
        WorldState::new(Vec::new(), OxygenField::uniform(params).unwrap())
    }

    #[test]
    fn distant_agents_do_not_move() {
        let p = test_params();
        let mut w = empty_world(&p);
        w.cells.push(Cell::new(CellKind::Tumor, Vec2::new(-100.0, 0.0), 8.4));
        w.cells.push(Cell::new(CellKind::Tumor, Vec2::new(100.0, 0.0), 8.4));
        let before = w.cells.clone();
        w.step_mechanics(&p, &mid_genome(), 0.1);
        assert_eq!(w.cells, before);
    }

    #[test]
    fn overlapping_identical_agents_push_apart_symmetrically() {
        let p = test_params();
        let mut w = empty_world(&p);
        w.cells.push(Cell::new(CellKind::Tumor, Vec2::new(-2.0, 0.0), 8.4));
        w.cells.push(Cell::new(CellKind::Tumor, Vec2::new(2.0, 0.0), 8.4));
        w.step_mechanics(&p, &mid_genome(), 0.1);
        let (a, b) = (w.cells[0].pos, w.cells[1].pos);
        assert!((a.x + b.x).abs() < 1e-12, "displacements not opposite");
        assert!((a.y).abs() < 1e-12 && (b.y).abs() < 1e-12);
        assert!(b.x - a.x > 4.0, "should have separated, got {a:?} {b:?}");
    }

    #[test]
    fn overstretched_link_breaks() {
        let p = test_params();
        let mut w = empty_world(&p);
        w.cells.push(Cell::new(CellKind::Worker, Vec2::new(0.0, 0.0), 8.4));
        w.cells.push(Cell::new(CellKind::Cargo, Vec2::new(60.0, 0.0), 8.4));
        w.cells[0].attached_to = Some(1);
        w.cells[1].attached_to = Some(0);
        w.step_mechanics(&p, &mid_genome(), 0.1);
        assert_eq!(w.cells[0].attached_to, None);
        assert_eq!(w.cells[1].attached_to, None);
    }

    #[test]
    fn attachment_window_is_respected() {
        let p = test_params();
        for (d, expect) in [(16.0, true), (13.0, false), (19.0, false)] {
            let mut w = empty_world(&p);
            w.cells.push(Cell::new(CellKind::Worker, Vec2::ZERO, 8.4));
            w.cells.push(Cell::new(CellKind::Cargo, Vec2::new(d, 0.0), 8.4));
            w.step_attachment_and_release(&p, &mid_genome());
            assert_eq!(w.cells[0].attached_to.is_some(), expect, "at {d} um");
            assert!(w.attachments_mutual());
        }
    }

    #[test]
    fn nearest_cargo_wins_with_low_index_tiebreak() {
        let p = test_params();
        let mut w = empty_world(&p);
        w.cells.push(Cell::new(CellKind::Worker, Vec2::ZERO, 8.4));
        w.cells.push(Cell::new(CellKind::Cargo, Vec2::new(17.0, 0.0), 8.4));
        w.cells.push(Cell::new(CellKind::Cargo, Vec2::new(-15.0, 0.0), 8.4));
        w.step_attachment_and_release(&p, &mid_genome());
        assert_eq!(w.cells[0].attached_to, Some(2));
    }

    #[test]
    fn release_below_threshold_and_no_reattach() {
        let p = test_params();
        let mut w = empty_world(&p);
        w.cells.push(Cell::new(CellKind::Worker, Vec2::ZERO, 8.4));
        w.cells.push(Cell::new(CellKind::Cargo, Vec2::new(16.0, 0.0), 8.4));
        w.cells[0].attached_to = Some(1);
        w.cells[1].attached_to = Some(0);
        let genome = mid_genome(); // release threshold 10 mmHg
        for v in w.oxygen.values.iter_mut() {
            *v = genome.cargo_release_o2_threshold - 1e-9;
        }
        w.step_attachment_and_release(&p, &genome);
        assert_eq!(w.cells[0].attached_to, None);
        assert!(w.cells[1].released);
        // same step would re-attach (distance 16 in window) were the
        // receptor not consumed
        assert_eq!(w.cells[1].attached_to, None);
        w.step_attachment_and_release(&p, &genome);
        assert_eq!(w.cells[0].attached_to, None);
    }

    #[test]
    fn motility_full_bias_follows_gradient_exactly() {
        let p = test_params();
        let mut w = empty_world(&p);
        // oxygen ramp increasing with x; attached worker goes down-gradient (-x)
        let nx = w.oxygen.nx;
        for j in 0..nx {
            for i in 0..nx {
                w.oxygen.values[j * nx + i] = i as f64;
            }
        }
        w.cells.push(Cell::new(CellKind::Worker, Vec2::ZERO, 8.4));
        w.cells.push(Cell::new(CellKind::Cargo, Vec2::new(16.0, 0.0), 8.4));
        w.cells[0].attached_to = Some(1);
        w.cells[1].attached_to = Some(0);
        let genome = Genome::from_array([1.0, 1.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let mut r = rng::stream(&[1]);
        w.step_worker_motility(&p, &genome, 0.1, &mut r);
        let d = w.cells[0].velocity_dir;
        assert!((d.x + 1.0).abs() < 1e-12 && d.y.abs() < 1e-12, "{d:?}");
        // displacement magnitude = speed * dt
        assert!((w.cells[0].pos.norm() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn motility_zero_bias_is_isotropic() {
        let p = test_params();
        let mut w = empty_world(&p);
        let nx = w.oxygen.nx;
        for j in 0..nx {
            for i in 0..nx {
                w.oxygen.values[j * nx + i] = i as f64;
            }
        }
        w.cells.push(Cell::new(CellKind::Worker, Vec2::ZERO, 8.4));
        w.cells.push(Cell::new(CellKind::Cargo, Vec2::new(16.0, 0.0), 8.4));
        w.cells[0].attached_to = Some(1);
        w.cells[1].attached_to = Some(0);
        let genome = Genome::from_array([0.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let mut r = rng::stream(&[2]);
        let n = 10_000;
        let mut mean = Vec2::ZERO;
        for _ in 0..n {
            w.cells[0].pos = Vec2::ZERO;
            w.cells[0].persistence_clock = 0.0;
            w.step_worker_motility(&p, &genome, 0.1, &mut r);
            mean += w.cells[0].velocity_dir;
        }
        mean = mean * (1.0 / n as f64);
        // per-component sd of the mean of unit vectors = sqrt(1/(2n)); 3 sigma
        let bound = 3.0 * (0.5 / n as f64).sqrt();
        assert!(mean.x.abs() < bound && mean.y.abs() < bound, "{mean:?}");
    }

    #[test]
    fn motility_stops_below_gradient_threshold() {
        let p = test_params();
        let mut w = empty_world(&p);
        // perfectly flat field: gradient 0 < threshold
        w.cells.push(Cell::new(CellKind::Worker, Vec2::new(5.0, 5.0), 8.4));
        w.cells.push(Cell::new(CellKind::Cargo, Vec2::new(21.0, 5.0), 8.4));
        w.cells[0].attached_to = Some(1);
        w.cells[1].attached_to = Some(0);
        let genome = Genome::from_array([1.0, 1.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let mut r = rng::stream(&[3]);
        w.step_worker_motility(&p, &genome, 0.1, &mut r);
        assert_eq!(w.cells[0].pos, Vec2::new(5.0, 5.0));
    }

    #[test]
    fn damage_converges_to_rate_ratio() {
        let p = test_params();
        let t = p.treatment;
        let dt = p.world.dt_pheno;
        let eq = t.damage_rate / t.repair_rate;
        // forward-Euler exposure updates, compared against the closed form
        // d(t) = eq * (1 - exp(-repair_rate * t))
        let mut d = 0.0;
        let mut time = 0.0;
        while time < 4320.0 {
            d += (t.damage_rate - t.repair_rate * d) * dt;
            time += dt;
            let closed = eq * (1.0 - (-t.repair_rate * time).exp());
            assert!((d - closed).abs() < 0.02 * eq, "t={time} {d} vs {closed}");
        }
        assert!((d - eq).abs() < 1e-3, "{d} vs {eq}");
        assert!((eq - 8.0).abs() < 0.01, "rate ratio should be ~8, got {eq}");
    }

    #[test]
    fn unexposed_damage_is_absorbing_at_zero() {
        let p = test_params();
        let mut w = empty_world(&p);
        w.cells.push(Cell::new(CellKind::Tumor, Vec2::ZERO, 8.4));
        let mut r = rng::stream(&[4]);
        for _ in 0..50 {
            w.step_drug_and_death(&p, p.world.dt_pheno, &mut r, false);
        }
        assert_eq!(w.cells[0].damage, 0.0);
        assert!(w.cells[0].alive);
    }

    #[test]
    fn zero_drug_death_rate_never_kills() {
        let mut p = test_params();
        p.treatment.drug_death_rate = 0.0;
        let mut w = empty_world(&p);
        w.cells.push(Cell::new(CellKind::Tumor, Vec2::ZERO, 8.4));
        let mut cargo = Cell::new(CellKind::Cargo, Vec2::new(10.0, 0.0), 8.4);
        cargo.released = true;
        cargo.receptor = 0.0;
        w.cells.push(cargo);
        let mut r = rng::stream(&[5]);
        for _ in 0..500 {
            w.step_drug_and_death(&p, p.world.dt_pheno, &mut r, false);
        }
        assert!(w.cells[0].alive);
        assert!(w.cells[0].damage > 7.0, "damage should build up under exposure");
    }

    #[test]
    fn ledger_balances_through_death_and_division() {
        let mut p = test_params();
        p.world.necrosis_rate = 0.05;
        let mut w = empty_world(&p);
        for i in 0..20 {
            w.cells.push(Cell::new(
                CellKind::Tumor,
                Vec2::new(-200.0 + 20.0 * i as f64, 0.0),
                8.4,
            ));
        }
        let mut w = WorldState::new(w.cells, w.oxygen);
        // drive part of the field hypoxic, keep the rest oxygenated
        let nx = w.oxygen.nx;
        for j in 0..nx {
            for i in 0..nx {
                w.oxygen.values[j * nx + i] = if i < nx / 2 { 1.0 } else { 30.0 };
            }
        }
        let mut r = rng::stream(&[6]);
        for _ in 0..200 {
            w.step_drug_and_death(&p, p.world.dt_pheno, &mut r, true);
        }
        assert!(w.ledger.births > 0, "expected divisions");
        assert!(w.ledger.deaths_necrosis > 0, "expected necrosis");
        assert!(w.ledger_balances());
    }
}
