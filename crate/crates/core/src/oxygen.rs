//! Oxygen transport on a node-centered square grid.
//!
//! Forward-Euler diffusion/decay/uptake with a Dirichlet boundary pinned at
//! `boundary_value`. The outermost node ring is the boundary; only interior
//! nodes are updated. Point uptake sources are relative (proportional to the
//! local concentration), deposited onto their containing node as an extra
//! decay rate of `rate * volume / node_area`.

use crate::params::SimParams;
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct OxygenField {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,        // um between nodes
    pub half_width: f64,     // nodes span [-half_width, half_width]
    pub values: Vec<f64>,    // row-major, mmHg
    pub diffusion: f64,      // um^2/min
    pub decay: f64,          // 1/min
    pub boundary_value: f64, // mmHg
}

impl OxygenField {
    /// Uniform field at the boundary value, sized from the params.
    pub fn uniform(params: &SimParams) -> crate::error::Result<Self> {
        let n = params.oxygen_nodes()?;
        let w = &params.world;
        Ok(OxygenField {
            nx: n,
            ny: n,
            spacing: w.oxygen_spacing,
            half_width: w.domain_half_width,
            values: vec![w.oxygen_boundary; n * n],
            diffusion: w.oxygen_diffusion,
            decay: w.oxygen_decay,
            boundary_value: w.oxygen_boundary,
        })
    }

    pub fn stability_limit(&self) -> f64 {
        self.spacing * self.spacing / (4.0 * self.diffusion)
    }

    fn node_coord(&self, c: f64) -> usize {
        let i = ((c + self.half_width) / self.spacing).round();
        (i.max(0.0) as usize).min(self.nx - 1)
    }

    /// Index of the node nearest to a position (clamped to the grid).
    pub fn node_index(&self, pos: Vec2) -> usize {
        self.node_coord(pos.y) * self.nx + self.node_coord(pos.x)
    }

    /// Concentration at the node nearest to `pos`.
    pub fn value_at(&self, pos: Vec2) -> f64 {
        self.values[self.node_index(pos)]
    }

    /// Central-difference gradient at the node nearest to `pos`, one-sided
    /// at the boundary ring. mmHg/um.
    pub fn gradient_at(&self, pos: Vec2) -> Vec2 {
        let i = self.node_coord(pos.x);
        let j = self.node_coord(pos.y);
        let v = |ii: usize, jj: usize| self.values[jj * self.nx + ii];
        let gx = {
            let (i0, i1) = (i.saturating_sub(1), (i + 1).min(self.nx - 1));
            (v(i1, j) - v(i0, j)) / (self.spacing * (i1 - i0).max(1) as f64)
        };
        let gy = {
            let (j0, j1) = (j.saturating_sub(1), (j + 1).min(self.ny - 1));
            (v(i, j1) - v(i, j0)) / (self.spacing * (j1 - j0).max(1) as f64)
        };
        Vec2::new(gx, gy)
    }

    /// Convert point sources of `(position, uptake_rate * volume)` into a
    /// per-node extra-decay grid.
    pub fn uptake_grid_from_sources(&self, sources: &[(Vec2, f64)]) -> Vec<f64> {
        let mut grid = vec![0.0; self.values.len()];
        let node_area = self.spacing * self.spacing;
        for &(pos, rate_volume) in sources {
            grid[self.node_index(pos)] += rate_volume / node_area;
        }
        grid
    }

    /// One forward-Euler step. `uptake` is the per-node extra decay rate
    /// (pass an empty slice for none). Caller guarantees `dt` respects the
    /// stability limit; the config layer rejects violations at startup.
    pub fn step_with_scratch(&mut self, uptake: &[f64], dt: f64, scratch: &mut Vec<f64>) {
        debug_assert!(dt <= self.stability_limit() * (1.0 + 1e-12));
        debug_assert!(uptake.is_empty() || uptake.len() == self.values.len());
        let (nx, ny) = (self.nx, self.ny);
        scratch.clear();
        scratch.extend_from_slice(&self.values);
        let c = dt * self.diffusion / (self.spacing * self.spacing);
        let v = &self.values;
        for j in 1..ny - 1 {
            let row = j * nx;
            for i in 1..nx - 1 {
                let idx = row + i;
                let u = v[idx];
                let lap = v[idx - 1] + v[idx + 1] + v[idx - nx] + v[idx + nx] - 4.0 * u;
                let sink = if uptake.is_empty() {
                    self.decay
                } else {
                    self.decay + uptake[idx]
                };
                let nu = u + c * lap - dt * sink * u;
                scratch[idx] = if nu < 0.0 { 0.0 } else { nu };
            }
        }
        std::mem::swap(&mut self.values, scratch);
    }

    pub fn step(&mut self, uptake: &[f64], dt: f64) {
        let mut scratch = Vec::new();
        self.step_with_scratch(uptake, dt, &mut scratch);
    }

    /// Step repeatedly until the largest per-step change drops below `tol`
    /// or `max_steps` is hit. Returns the number of steps taken.
    pub fn run_to_steady_state(
        &mut self,
        uptake: &[f64],
        dt: f64,
        tol: f64,
        max_steps: usize,
    ) -> usize {
        let mut scratch = Vec::new();
        let mut prev = Vec::new();
        for step in 0..max_steps {
            prev.clear();
            prev.extend_from_slice(&self.values);
            self.step_with_scratch(uptake, dt, &mut scratch);
            let max_delta = self
                .values
                .iter()
                .zip(prev.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if max_delta < tol {
                return step + 1;
            }
        }
        max_steps
    }
}
