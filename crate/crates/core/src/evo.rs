//! Generational GA over the bounded genome: tournament selection, uniform
//! crossover, per-allele step mutation, and tournament replacement.

use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genome::{Genome, BOUNDS, GENOME_LEN, PARAM_NAMES};
use crate::text::{fmt_f64, parse_finite_f64};
use crate::vec2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub tournament_size: usize,
    pub crossover_prob: f64,
    /// Per-allele mutation probability.
    pub mutation_rate: f64,
    /// Mutation step half-width as a fraction of the allele range.
    pub mutation_step: f64,
    pub generations: usize,
    /// Lower fitness is better; the only mode used here.
    pub minimize: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 20,
            tournament_size: 2,
            crossover_prob: 0.8,
            mutation_rate: 0.2,
            mutation_step: 0.05,
            generations: 10,
            minimize: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(Error::Config(format!(
                "crossover_prob must be in [0,1], got {}",
                self.crossover_prob
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::Config(format!(
                "mutation_rate must be in [0,1], got {}",
                self.mutation_rate
            )));
        }
        if self.mutation_step < 0.0 {
            return Err(Error::Config("mutation_step must be >= 0".into()));
        }
        if self.tournament_size < 1 {
            return Err(Error::Config("tournament_size must be >= 1".into()));
        }
        if self.population_size < self.tournament_size {
            return Err(Error::Config(format!(
                "population_size {} must be >= tournament_size {}",
                self.population_size, self.tournament_size
            )));
        }
        if !self.minimize {
            return Err(Error::Config("only minimization is supported".into()));
        }
        Ok(())
    }
}

/// An evaluated population member. `rcc` and `behavior` are replicate means;
/// `fitness` is whatever the active scoring mode assigned (raw rcc for the
/// plain GA, the hybrid value for novelty runs) and is cached for life.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    pub rcc: f64,
    pub behavior: Vec2,
    pub sparseness: Option<f64>,
    pub fitness: f64,
    pub eval_id: u64,
}

/// Draw `t` distinct indices and return the one with the lowest fitness,
/// ties to the lowest index.
pub fn tournament_select(pop: &[Individual], t: usize, rng: &mut ChaCha8Rng) -> usize {
    assert!(!pop.is_empty() && t >= 1 && t <= pop.len());
    let mut chosen: Vec<usize> = Vec::with_capacity(t);
    while chosen.len() < t {
        let idx = rng.random_range(0..pop.len());
        if !chosen.contains(&idx) {
            chosen.push(idx);
        }
    }
    *chosen
        .iter()
        .min_by(|&&a, &&b| {
            pop[a]
                .fitness
                .partial_cmp(&pop[b].fitness)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        })
        .expect("non-empty tournament")
}

/// With probability 1-X a copy of `a`; otherwise each allele from either
/// parent with equal probability.
pub fn uniform_crossover(a: &Genome, b: &Genome, x_prob: f64, rng: &mut ChaCha8Rng) -> Genome {
    if rng.random::<f64>() >= x_prob {
        return *a;
    }
    let (aa, ba) = (a.to_array(), b.to_array());
    let mut child = [0.0; GENOME_LEN];
    for i in 0..GENOME_LEN {
        child[i] = if rng.random::<f64>() < 0.5 { aa[i] } else { ba[i] };
    }
    Genome::from_array_unchecked(child)
}

/// Each allele independently moves by uniform(-step, +step) x range width
/// with probability `rate`, then clamps to its bound.
pub fn mutate(g: &Genome, rate: f64, step: f64, rng: &mut ChaCha8Rng) -> Genome {
    let mut a = g.to_array();
    for i in 0..GENOME_LEN {
        if rng.random::<f64>() < rate {
            let (lo, hi) = BOUNDS[i];
            let width = hi - lo;
            a[i] = (a[i] + rng.random_range(-step..=step) * width).clamp(lo, hi);
        }
    }
    Genome::from_array_unchecked(a)
}

/// Minimum-rcc individual, ties to the lowest eval_id.
pub fn best_of(pop: &[Individual]) -> &Individual {
    assert!(!pop.is_empty());
    pop.iter()
        .min_by(|a, b| {
            a.rcc
                .partial_cmp(&b.rcc)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.eval_id.cmp(&b.eval_id))
        })
        .expect("non-empty population")
}

/// One generation's outcome: the merged population plus the full evaluated
/// offspring batch (kept for logging whether or not an offspring survived
/// replacement).
#[derive(Debug, Clone)]
pub struct GenerationResult {
    pub population: Vec<Individual>,
    pub offspring: Vec<Individual>,
}

/// Breed, evaluate, and score one offspring batch, then merge it into the
/// population by per-offspring replacement tournaments.
///
/// Each offspring comes from two independently tournament-selected parents
/// via uniform crossover and mutation. For replacement, a fresh tournament
/// of size T is drawn from the current population; its worst member (highest
/// fitness, ties to the lowest index) is replaced when the offspring's
/// fitness is less than or equal to the member's. Under fitness = rcc this
/// makes the population best non-increasing.
///
/// `evaluate` fills (rcc, behavior) for a whole batch; `score` assigns
/// fitness (and sparseness for hybrid runs) to the evaluated batch. Any
/// error aborts the generation; the input population is left untouched.
pub fn next_generation(
    pop: &[Individual],
    cfg: &GaConfig,
    evaluate: &dyn Fn(&[(u64, Genome)]) -> Result<Vec<(f64, Vec2)>>,
    score: &mut dyn FnMut(&mut [Individual]) -> Result<()>,
    rng: &mut ChaCha8Rng,
    next_eval_id: &mut u64,
) -> Result<GenerationResult> {
    let p = cfg.population_size;
    assert_eq!(pop.len(), p, "population size must be exactly P");

    let mut batch: Vec<(u64, Genome)> = Vec::with_capacity(p);
    for _ in 0..p {
        let pa = tournament_select(pop, cfg.tournament_size, rng);
        let pb = tournament_select(pop, cfg.tournament_size, rng);
        let child = uniform_crossover(&pop[pa].genome, &pop[pb].genome, cfg.crossover_prob, rng);
        let child = mutate(&child, cfg.mutation_rate, cfg.mutation_step, rng);
        batch.push((*next_eval_id, child));
        *next_eval_id += 1;
    }

    let outputs = evaluate(&batch)?;
    if outputs.len() != batch.len() {
        return Err(Error::Sim(format!(
            "evaluator returned {} results for {} genomes",
            outputs.len(),
            batch.len()
        )));
    }
    let mut offspring: Vec<Individual> = batch
        .iter()
        .zip(outputs.iter())
        .map(|(&(eval_id, genome), &(rcc, behavior))| Individual {
            genome,
            rcc,
            behavior,
            sparseness: None,
            fitness: f64::NAN,
            eval_id,
        })
        .collect();
    score(&mut offspring)?;
    for o in &offspring {
        if !o.fitness.is_finite() {
            return Err(Error::Sim(format!(
                "non-finite fitness for eval_id {}",
                o.eval_id
            )));
        }
    }

    let mut next: Vec<Individual> = pop.to_vec();
    for o in &offspring {
        let mut chosen: Vec<usize> = Vec::with_capacity(cfg.tournament_size);
        while chosen.len() < cfg.tournament_size {
            let idx = rng.random_range(0..p);
            if !chosen.contains(&idx) {
                chosen.push(idx);
            }
        }
        let worst = *chosen
            .iter()
            .max_by(|&&a, &&b| {
                next[a]
                    .fitness
                    .partial_cmp(&next[b].fitness)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(b.cmp(&a)) // ties to the lowest index
            })
            .expect("non-empty tournament");
        if o.fitness <= next[worst].fitness {
            next[worst] = *o;
        }
    }
    debug_assert_eq!(next.len(), p);
    Ok(GenerationResult {
        population: next,
        offspring,
    })
}

/// Write one genome per row with a header naming the six parameters.
pub fn save_population(path: &Path, genomes: &[Genome]) -> Result<()> {
    let mut s = String::new();
    s.push_str(&PARAM_NAMES.join(","));
    s.push('\n');
    for g in genomes {
        let row: Vec<String> = g.to_array().iter().map(|&v| fmt_f64(v)).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub fn load_population(path: &Path) -> Result<Vec<Genome>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty population file"))?;
    if header != PARAM_NAMES.join(",") {
        return Err(Error::parse(
            path,
            1,
            format!("unexpected header `{header}`"),
        ));
    }
    let mut genomes = Vec::new();
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != GENOME_LEN {
            return Err(Error::parse(
                path,
                ln + 1,
                format!("expected {GENOME_LEN} columns, got {}", toks.len()),
            ));
        }
        let mut a = [0.0; GENOME_LEN];
        for (i, tok) in toks.iter().enumerate() {
            a[i] = parse_finite_f64(tok).map_err(|e| Error::parse(path, ln + 1, e))?;
        }
        genomes.push(Genome::from_array(a).map_err(|e| Error::parse(path, ln + 1, e.to_string()))?);
    }
    Ok(genomes)
}
