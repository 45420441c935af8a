//! Experiment configuration: defaults, the flat `key = value` config file
//! (`#` comments, dotted keys, unknown keys are hard errors), and the fast
//! profile.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::evo::GaConfig;
use crate::novelty::{NeighborMode, DEFAULT_RCC_THR, S_THR_SWEEP};
use crate::params::SimParams;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    /// Simulator runs averaged per evaluation.
    pub replicates: usize,
    pub growth_days: f64,
    pub treatment_days: f64,
    pub ga: GaConfig,
    pub rcc_thr: f64,
    pub s_thr_sweep: Vec<f64>,
    pub n_initial_populations: usize,
    pub novelty_k: usize,
    pub rho_min: f64,
    pub neighbor_mode: NeighborMode,
    pub sim: SimParams,
    pub output_dir: PathBuf,
    /// Evaluate on the deceptive surrogate instead of the simulator.
    pub surrogate: bool,
    /// Worker threads for batch evaluation; 1 = sequential.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            master_seed: 42,
            replicates: 5,
            growth_days: 7.0,
            treatment_days: 3.0,
            ga: GaConfig::default(),
            rcc_thr: DEFAULT_RCC_THR,
            s_thr_sweep: S_THR_SWEEP.to_vec(),
            n_initial_populations: 3,
            novelty_k: 5,
            rho_min: 30.0,
            neighbor_mode: NeighborMode::ArchivePlusPop,
            sim: SimParams::default(),
            output_dir: PathBuf::from("out"),
            surrogate: false,
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    /// Shrink the domain (and seed tumor) and drop to 3 replicates.
    pub fn apply_fast_profile(&mut self) {
        let keep_world_overrides = self.sim;
        let fast = SimParams::fast();
        self.sim = keep_world_overrides;
        self.sim.world.domain_half_width = fast.world.domain_half_width;
        self.sim.world.initial_tumor_radius = fast.world.initial_tumor_radius;
        self.replicates = 3;
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        if self.n_initial_populations < 1 {
            return Err(Error::Config("n_initial_populations must be >= 1".into()));
        }
        if self.s_thr_sweep.is_empty() || self.s_thr_sweep.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Config("s_thr_sweep values must be > 0".into()));
        }
        if !(self.rcc_thr > 0.0) {
            return Err(Error::Config("rcc_thr must be > 0".into()));
        }
        if self.novelty_k < 1 {
            return Err(Error::Config("novelty.k must be >= 1".into()));
        }
        if !(self.rho_min >= 0.0) {
            return Err(Error::Config("novelty.rho_min must be >= 0".into()));
        }
        if !(self.growth_days >= 0.0) {
            return Err(Error::Config("growth_days must be >= 0".into()));
        }
        if !(self.treatment_days > 0.0) {
            return Err(Error::Config("treatment_days must be > 0".into()));
        }
        if self.jobs < 1 {
            return Err(Error::Config("jobs must be >= 1".into()));
        }
        self.ga.validate()?;
        self.sim.validate()?;
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str, ctx: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("{ctx}: invalid {what} `{value}`"));
        let f = || value.parse::<f64>().map_err(|_| bad("float"));
        let u = || value.parse::<usize>().map_err(|_| bad("integer"));
        let u64v = || value.parse::<u64>().map_err(|_| bad("integer"));
        let b = || match value {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(bad("bool (true/false)")),
        };

        let w = &mut self.sim.world;
        let t = &mut self.sim.treatment;
        match key {
            "master_seed" => self.master_seed = u64v()?,
            "replicates" => self.replicates = u()?,
            "growth_days" => self.growth_days = f()?,
            "treatment_days" => self.treatment_days = f()?,
            "n_initial_populations" => self.n_initial_populations = u()?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "jobs" => self.jobs = u()?,
            "surrogate" => self.surrogate = b()?,
            "s_thr_sweep" => {
                let mut sweep = Vec::new();
                for tok in value.split(',') {
                    sweep.push(
                        tok.trim()
                            .parse::<f64>()
                            .map_err(|_| bad("comma-separated float list"))?,
                    );
                }
                self.s_thr_sweep = sweep;
            }

            "ga.population_size" => self.ga.population_size = u()?,
            "ga.tournament_size" => self.ga.tournament_size = u()?,
            "ga.crossover_prob" => self.ga.crossover_prob = f()?,
            "ga.mutation_rate" => self.ga.mutation_rate = f()?,
            "ga.mutation_step" => self.ga.mutation_step = f()?,
            "ga.generations" => self.ga.generations = u()?,

            "hybrid.rcc_thr" => self.rcc_thr = f()?,

            "novelty.k" => self.novelty_k = u()?,
            "novelty.rho_min" => self.rho_min = f()?,
            "novelty.neighbors" => {
                self.neighbor_mode = match value {
                    "archive_only" => NeighborMode::ArchiveOnly,
                    "archive_plus_pop" => NeighborMode::ArchivePlusPop,
                    _ => return Err(bad("neighbors (archive_only/archive_plus_pop)")),
                }
            }

            "sim.domain_half_width" => w.domain_half_width = f()?,
            "sim.oxygen_spacing" => w.oxygen_spacing = f()?,
            "sim.oxygen_diffusion" => w.oxygen_diffusion = f()?,
            "sim.oxygen_decay" => w.oxygen_decay = f()?,
            "sim.oxygen_boundary" => w.oxygen_boundary = f()?,
            "sim.tumor_o2_uptake" => w.tumor_o2_uptake = f()?,
            "sim.hypoxia_arrest_o2" => w.hypoxia_arrest_o2 = f()?,
            "sim.necrosis_o2" => w.necrosis_o2 = f()?,
            "sim.necrosis_rate" => w.necrosis_rate = f()?,
            "sim.cell_radius" => w.cell_radius = f()?,
            "sim.initial_tumor_radius" => w.initial_tumor_radius = f()?,
            "sim.division_rate" => w.division_rate = f()?,
            "sim.dt_diff" => w.dt_diff = f()?,
            "sim.dt_mech" => w.dt_mech = f()?,
            "sim.dt_pheno" => w.dt_pheno = f()?,
            "sim.n_workers" => w.n_workers = u()?,
            "sim.n_cargo" => w.n_cargo = u()?,
            "sim.injection_band_inner" => w.injection_band_inner = f()?,
            "sim.injection_band_outer" => w.injection_band_outer = f()?,
            "sim.drug_radius_slack" => w.drug_radius_slack = f()?,
            "sim.chemo_sigma" => w.chemo_sigma = f()?,
            "sim.repulsion_coeff" => w.repulsion_coeff = f()?,
            "sim.adhesion_coeff" => w.adhesion_coeff = f()?,
            "sim.tumor_rel_adhesion" => w.tumor_rel_adhesion = f()?,
            "sim.tumor_rel_repulsion" => w.tumor_rel_repulsion = f()?,
            "sim.division_during_treatment" => w.division_during_treatment = b()?,

            "sim.damage_rate" => t.damage_rate = f()?,
            "sim.repair_rate" => t.repair_rate = f()?,
            "sim.drug_death_rate" => t.drug_death_rate = f()?,
            "sim.elastic_coefficient" => t.elastic_coefficient = f()?,
            "sim.cargo_o2_uptake" => t.cargo_o2_uptake = f()?,
            "sim.cargo_apoptosis_rate" => t.cargo_apoptosis_rate = f()?,
            "sim.cargo_rel_adhesion" => t.cargo_rel_adhesion = f()?,
            "sim.cargo_rel_repulsion" => t.cargo_rel_repulsion = f()?,
            "sim.max_rel_adhesion_distance" => t.max_rel_adhesion_distance = f()?,
            "sim.max_elastic_displacement" => t.max_elastic_displacement = f()?,
            "sim.max_attach_distance" => t.max_attach_distance = f()?,
            "sim.min_attach_distance" => t.min_attach_distance = f()?,
            "sim.motility_shutdown_threshold" => t.motility_shutdown_threshold = f()?,
            "sim.attachment_receptor_threshold" => t.attachment_receptor_threshold = f()?,
            "sim.worker_speed" => t.worker_speed = f()?,
            "sim.worker_apoptosis_rate" => t.worker_apoptosis_rate = f()?,
            "sim.worker_o2_uptake" => t.worker_o2_uptake = f()?,

            _ => return Err(Error::Config(format!("{ctx}: unknown key `{key}`"))),
        }
        Ok(())
    }
}

/// Parse config text over the defaults. `origin` names the source in errors.
pub fn parse_config_text(text: &str, origin: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let ctx = format!("{origin}:{}", idx + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{ctx}: expected `key = value`, got `{line}`")))?;
        cfg.set(key.trim(), value.trim(), &ctx)?;
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_text(&text, &path.display().to_string())
}
