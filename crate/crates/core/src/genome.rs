//! The 6-parameter worker-behavior genome and its bounds.

use rand::Rng;

use crate::error::{Error, Result};

pub const GENOME_LEN: usize = 6;

/// Column names used in population CSV files, in genome order.
pub const PARAM_NAMES: [&str; GENOME_LEN] = [
    "attached_migration_bias",
    "unattached_migration_bias",
    "worker_rel_adhesion",
    "worker_persistence_time",
    "worker_rel_repulsion",
    "cargo_release_o2_threshold",
];

/// Closed bounds per allele, in genome order.
pub const BOUNDS: [(f64, f64); GENOME_LEN] = [
    (0.0, 1.0),  // attached migration bias
    (0.0, 1.0),  // unattached migration bias
    (0.0, 10.0), // worker relative adhesion
    (0.0, 10.0), // worker motility persistence time, min
    (0.0, 10.0), // worker relative repulsion
    (0.0, 20.0), // cargo release O2 threshold, mmHg
];

/// Evolved worker/cargo behavior parameters. Every field stays inside its
/// closed bound at all times; construction and mutation clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Genome {
    pub attached_migration_bias: f64,
    pub unattached_migration_bias: f64,
    pub worker_rel_adhesion: f64,
    pub worker_persistence_time: f64,
    pub worker_rel_repulsion: f64,
    pub cargo_release_o2_threshold: f64,
}

impl Genome {
    pub fn from_array(a: [f64; GENOME_LEN]) -> Result<Self> {
        for (i, &v) in a.iter().enumerate() {
            let (lo, hi) = BOUNDS[i];
            if !v.is_finite() || v < lo || v > hi {
                return Err(Error::Config(format!(
                    "genome field {} = {v} outside [{lo}, {hi}]",
                    PARAM_NAMES[i]
                )));
            }
        }
        Ok(Self::from_array_unchecked(a))
    }

    pub(crate) fn from_array_unchecked(a: [f64; GENOME_LEN]) -> Self {
        Genome {
            attached_migration_bias: a[0],
            unattached_migration_bias: a[1],
            worker_rel_adhesion: a[2],
            worker_persistence_time: a[3],
            worker_rel_repulsion: a[4],
            cargo_release_o2_threshold: a[5],
        }
    }

    pub fn to_array(&self) -> [f64; GENOME_LEN] {
        [
            self.attached_migration_bias,
            self.unattached_migration_bias,
            self.worker_rel_adhesion,
            self.worker_persistence_time,
            self.worker_rel_repulsion,
            self.cargo_release_o2_threshold,
        ]
    }

    /// Each allele drawn uniformly within its bound.
    pub fn random(rng: &mut impl Rng) -> Self {
        let mut a = [0.0; GENOME_LEN];
        for (i, slot) in a.iter_mut().enumerate() {
            let (lo, hi) = BOUNDS[i];
            *slot = rng.random_range(lo..=hi);
        }
        Self::from_array_unchecked(a)
    }

    pub fn in_bounds(&self) -> bool {
        self.to_array()
            .iter()
            .zip(BOUNDS.iter())
            .all(|(&v, &(lo, hi))| v.is_finite() && v >= lo && v <= hi)
    }

    /// Panics when an out-of-bounds genome reaches the simulator.
    pub fn assert_in_bounds(&self) {
        assert!(self.in_bounds(), "genome outside bounds: {self:?}");
    }

    /// Genome mapped to the unit cube by its per-allele ranges.
    pub fn normalized(&self) -> [f64; GENOME_LEN] {
        let a = self.to_array();
        let mut u = [0.0; GENOME_LEN];
        for i in 0..GENOME_LEN {
            let (lo, hi) = BOUNDS[i];
            u[i] = (a[i] - lo) / (hi - lo);
        }
        u
    }
}
