//! Fixed simulator parameters: the treatment constants held unaltered during
//! evolution, plus the desk-scale world constants (domain, oxygen transport,
//! growth, injection, timesteps). All are overridable through the config file.

use crate::error::{Error, Result};

/// Treatment-layer constants (never evolved).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreatmentParams {
    pub damage_rate: f64,                   // 1/min
    pub repair_rate: f64,                   // 1/min
    pub drug_death_rate: f64,               // 1/min
    pub elastic_coefficient: f64,           // 1/min
    pub cargo_o2_uptake: f64,               // 1/min
    pub cargo_apoptosis_rate: f64,          // 1/min
    pub cargo_rel_adhesion: f64,            // dimensionless
    pub cargo_rel_repulsion: f64,           // dimensionless
    pub max_rel_adhesion_distance: f64,     // x (r_i + r_j)
    pub max_elastic_displacement: f64,      // um
    pub max_attach_distance: f64,           // um
    pub min_attach_distance: f64,           // um
    pub motility_shutdown_threshold: f64,   // gradient magnitude cutoff
    pub attachment_receptor_threshold: f64, // dimensionless
    pub worker_speed: f64,                  // um/min
    pub worker_apoptosis_rate: f64,         // 1/min
    pub worker_o2_uptake: f64,              // 1/min
}

impl Default for TreatmentParams {
    fn default() -> Self {
        TreatmentParams {
            damage_rate: 0.03333,
            repair_rate: 0.004167,
            drug_death_rate: 0.004167,
            elastic_coefficient: 0.05,
            cargo_o2_uptake: 0.1,
            cargo_apoptosis_rate: 4.065e-5,
            cargo_rel_adhesion: 0.0,
            cargo_rel_repulsion: 5.0,
            max_rel_adhesion_distance: 1.25,
            max_elastic_displacement: 50.0,
            max_attach_distance: 18.0,
            min_attach_distance: 14.0,
            motility_shutdown_threshold: 0.001,
            attachment_receptor_threshold: 0.1,
            worker_speed: 2.0,
            worker_apoptosis_rate: 0.0,
            worker_o2_uptake: 0.1,
        }
    }
}

/// Desk-scale world constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldParams {
    pub domain_half_width: f64, // um; square domain [-h, h]^2
    pub oxygen_spacing: f64,    // um between grid nodes
    pub oxygen_diffusion: f64,  // um^2/min
    pub oxygen_decay: f64,      // 1/min
    pub oxygen_boundary: f64,   // mmHg, Dirichlet value
    pub tumor_o2_uptake: f64,   // 1/min relative uptake
    pub hypoxia_arrest_o2: f64, // mmHg; below this no division
    pub necrosis_o2: f64,       // mmHg; below this necrosis hazard applies
    pub necrosis_rate: f64,     // 1/min
    pub cell_radius: f64,          // um
    pub initial_tumor_radius: f64, // um, seed disc for growth
    pub division_rate: f64,        // 1/min when oxygenated
    pub dt_diff: f64,           // min, oxygen step
    pub dt_mech: f64,           // min, mechanics/motility/attachment step
    pub dt_pheno: f64,          // min, division/death/drug step
    pub n_workers: usize,
    pub n_cargo: usize,
    pub injection_band_inner: f64, // um beyond the tumor edge
    pub injection_band_outer: f64,
    pub drug_radius_slack: f64, // um added to contact distance for dosing
    pub chemo_sigma: f64,       // um, cargo attractant kernel width
    pub repulsion_coeff: f64,   // um/min at full overlap
    pub adhesion_coeff: f64,    // um/min at contact
    pub tumor_rel_adhesion: f64,
    pub tumor_rel_repulsion: f64,
    pub division_during_treatment: bool,
}

impl Default for WorldParams {
    fn default() -> Self {
        WorldParams {
            domain_half_width: 500.0,
            oxygen_spacing: 20.0,
            oxygen_diffusion: 1.0e4,
            oxygen_decay: 0.01,
            oxygen_boundary: 38.0,
            tumor_o2_uptake: 10.0,
            hypoxia_arrest_o2: 15.0,
            necrosis_o2: 5.0,
            necrosis_rate: 5.0e-5,
            cell_radius: 8.4,
            initial_tumor_radius: 200.0,
            division_rate: 0.04 / 60.0,
            dt_diff: 0.005,
            dt_mech: 0.1,
            dt_pheno: 6.0,
            n_workers: 50,
            n_cargo: 100,
            injection_band_inner: 20.0,
            injection_band_outer: 120.0,
            drug_radius_slack: 2.0,
            chemo_sigma: 75.0,
            repulsion_coeff: 10.0,
            adhesion_coeff: 0.4,
            tumor_rel_adhesion: 1.0,
            tumor_rel_repulsion: 1.0,
            division_during_treatment: false,
        }
    }
}

/// Everything the simulator needs besides the genome.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimParams {
    pub world: WorldParams,
    pub treatment: TreatmentParams,
}

impl SimParams {
    /// Reduced-scale profile: 600 um domain with a proportionally smaller
    /// seed tumor so the injection annulus still fits. Replicate count is
    /// reduced at the experiment-config level.
    pub fn fast() -> Self {
        let mut p = SimParams::default();
        p.world.domain_half_width = 300.0;
        p.world.initial_tumor_radius = 120.0;
        p
    }

    /// Explicit-scheme stability limit for the oxygen step.
    pub fn diffusion_dt_limit(&self) -> f64 {
        let h = self.world.oxygen_spacing;
        h * h / (4.0 * self.world.oxygen_diffusion)
    }

    /// Number of grid nodes per axis (node-centered, boundary included).
    pub fn oxygen_nodes(&self) -> Result<usize> {
        let w = &self.world;
        let span = 2.0 * w.domain_half_width / w.oxygen_spacing;
        let n = span.round();
        if (span - n).abs() > 1e-9 || n < 2.0 {
            return Err(Error::Config(format!(
                "oxygen_spacing {} does not tile the {} um domain",
                w.oxygen_spacing,
                2.0 * w.domain_half_width
            )));
        }
        Ok(n as usize + 1)
    }

    /// Rejects inconsistent parameter sets before any simulation starts.
    pub fn validate(&self) -> Result<()> {
        let w = &self.world;
        let t = &self.treatment;

        let nonneg: [(&str, f64); 14] = [
            ("damage_rate", t.damage_rate),
            ("repair_rate", t.repair_rate),
            ("drug_death_rate", t.drug_death_rate),
            ("elastic_coefficient", t.elastic_coefficient),
            ("cargo_o2_uptake", t.cargo_o2_uptake),
            ("cargo_apoptosis_rate", t.cargo_apoptosis_rate),
            ("worker_apoptosis_rate", t.worker_apoptosis_rate),
            ("worker_o2_uptake", t.worker_o2_uptake),
            ("oxygen_decay", w.oxygen_decay),
            ("tumor_o2_uptake", w.tumor_o2_uptake),
            ("necrosis_rate", w.necrosis_rate),
            ("division_rate", w.division_rate),
            ("worker_speed", t.worker_speed),
            ("oxygen_boundary", w.oxygen_boundary),
        ];
        for (name, v) in nonneg {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if t.min_attach_distance >= t.max_attach_distance {
            return Err(Error::Config(format!(
                "min_attach_distance {} must be < max_attach_distance {}",
                t.min_attach_distance, t.max_attach_distance
            )));
        }
        if t.max_elastic_displacement <= t.max_attach_distance {
            return Err(Error::Config(format!(
                "max_elastic_displacement {} must be > max_attach_distance {}",
                t.max_elastic_displacement, t.max_attach_distance
            )));
        }
        if w.domain_half_width <= 0.0 || w.cell_radius <= 0.0 {
            return Err(Error::Config(
                "domain_half_width and cell_radius must be positive".into(),
            ));
        }
        for (name, dt) in [
            ("dt_diff", w.dt_diff),
            ("dt_mech", w.dt_mech),
            ("dt_pheno", w.dt_pheno),
        ] {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {dt}")));
            }
        }
        let limit = self.diffusion_dt_limit();
        if w.dt_diff > limit * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "dt_diff {} exceeds explicit-scheme stability limit {} \
                 (= spacing^2 / (4 * diffusion))",
                w.dt_diff, limit
            )));
        }
        // the split loop needs whole substep counts
        for (outer_name, outer, inner_name, inner) in [
            ("dt_mech", w.dt_mech, "dt_diff", w.dt_diff),
            ("dt_pheno", w.dt_pheno, "dt_mech", w.dt_mech),
        ] {
            let ratio = outer / inner;
            if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
                return Err(Error::Config(format!(
                    "{outer_name} ({outer}) must be a whole multiple of {inner_name} ({inner})"
                )));
            }
        }
        self.oxygen_nodes()?;
        if w.injection_band_inner < 0.0 || w.injection_band_outer <= w.injection_band_inner {
            return Err(Error::Config(
                "injection band must satisfy 0 <= inner < outer".into(),
            ));
        }
        Ok(())
    }

    /// Longest possible distance between two points of the domain; used as
    /// the sparseness value against an empty neighbor pool.
    pub fn domain_diagonal(&self) -> f64 {
        2.0 * self.world.domain_half_width * std::f64::consts::SQRT_2
    }
}
