//! Behavior archive, k-nearest-neighbor sparseness, and the hybrid
//! objective/novelty fitness that plugs into the GA.
//!
//! Sparseness of a behavior point is its mean Euclidean distance to the k
//! nearest members of a neighbor pool. The pool is the archive plus the
//! current generation's behavior points (the individual itself excluded);
//! `NeighborMode::ArchiveOnly` drops the population part. Points novel
//! enough are appended to the archive, which only ever grows.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::evo::Individual;
use crate::text::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorPoint {
    pub x: f64,
    pub y: f64,
    pub source_eval_id: u64,
    pub generation: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborMode {
    ArchiveOnly,
    ArchivePlusPop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridFitnessParams {
    /// Normalization for the remaining-cancer-cell count.
    pub rcc_thr: f64,
    /// Normalization for sparseness; larger values weaken the novelty term.
    pub s_thr: f64,
}

impl HybridFitnessParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rcc_thr > 0.0) || !(self.s_thr > 0.0) {
            return Err(Error::Config(format!(
                "rcc_thr and s_thr must be > 0, got {} and {}",
                self.rcc_thr, self.s_thr
            )));
        }
        Ok(())
    }
}

pub const DEFAULT_RCC_THR: f64 = 1400.0;
pub const S_THR_SWEEP: [f64; 5] = [200.0, 400.0, 600.0, 800.0, 1000.0];

/// Normalized objective minus normalized novelty; lower is better.
pub fn hybrid_fitness(rcc: f64, sparseness: f64, p: &HybridFitnessParams) -> f64 {
    rcc / p.rcc_thr - sparseness / p.s_thr
}

/// Mean Euclidean distance from `(x, y)` to the k nearest pool members.
/// Pools smaller than k use every member; an empty pool yields
/// `empty_pool_value` (the domain diagonal in the harness). Distance ties
/// order by eval_id, which cannot change the value.
pub fn sparseness(x: f64, y: f64, pool: &[BehaviorPoint], k: usize, empty_pool_value: f64) -> f64 {
    assert!(k >= 1, "k must be >= 1");
    if pool.is_empty() {
        return empty_pool_value;
    }
    let mut dists: Vec<(f64, u64)> = pool
        .iter()
        .map(|p| ((p.x - x).hypot(p.y - y), p.source_eval_id))
        .collect();
    dists.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    let kk = k.min(dists.len());
    dists[..kk].iter().map(|d| d.0).sum::<f64>() / kk as f64
}

/// Append-only archive of behavior points from past generations.
#[derive(Debug, Clone, PartialEq)]
pub struct NoveltyArchive {
    points: Vec<BehaviorPoint>,
    /// Admission threshold on sparseness, um.
    pub rho_min: f64,
    /// Neighbor count for sparseness queries.
    pub k: usize,
}

impl NoveltyArchive {
    pub fn new(rho_min: f64, k: usize) -> Self {
        assert!(k >= 1);
        NoveltyArchive {
            points: Vec::new(),
            rho_min,
            k,
        }
    }

    pub fn points(&self) -> &[BehaviorPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Admit when sparseness exceeds rho_min strictly, or unconditionally
    /// while the archive is still smaller than k+1 (bootstrap). Admission
    /// appends and never reorders.
    pub fn maybe_admit(&mut self, point: BehaviorPoint, sparseness: f64) -> bool {
        let admit = sparseness > self.rho_min || self.points.len() < self.k + 1;
        if admit {
            self.points.push(point);
        }
        admit
    }

    /// CSV rows `generation,eval_id,x,y` for behavior-space plots.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("generation,eval_id,x,y\n");
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                p.generation,
                p.source_eval_id,
                fmt_f64(p.x),
                fmt_f64(p.y)
            );
        }
        s
    }
}

pub fn behavior_point(ind: &Individual, generation: u32) -> BehaviorPoint {
    BehaviorPoint {
        x: ind.behavior.x,
        y: ind.behavior.y,
        source_eval_id: ind.eval_id,
        generation,
    }
}

/// Neighbor pool for one individual: archive points plus (in
/// `ArchivePlusPop` mode) the behavior points of the generation batch,
/// with the query individual itself excluded by eval_id.
pub fn neighbor_pool(
    archive: &NoveltyArchive,
    batch: &[Individual],
    exclude_eval_id: u64,
    mode: NeighborMode,
    generation: u32,
) -> Vec<BehaviorPoint> {
    let mut pool: Vec<BehaviorPoint> = archive.points.clone();
    if mode == NeighborMode::ArchivePlusPop {
        pool.extend(
            batch
                .iter()
                .filter(|i| i.eval_id != exclude_eval_id)
                .map(|i| behavior_point(i, generation)),
        );
    }
    pool
}

/// Score a whole generation batch: compute every sparseness against the
/// frozen pool, assign hybrid fitness, then apply admissions in eval_id
/// order after all sparseness values are known.
pub fn score_generation(
    batch: &mut [Individual],
    archive: &mut NoveltyArchive,
    params: &HybridFitnessParams,
    mode: NeighborMode,
    empty_pool_value: f64,
    generation: u32,
) {
    let sparseness_values: Vec<f64> = batch
        .iter()
        .map(|ind| {
            let pool = neighbor_pool(archive, batch, ind.eval_id, mode, generation);
            sparseness(
                ind.behavior.x,
                ind.behavior.y,
                &pool,
                archive.k,
                empty_pool_value,
            )
        })
        .collect();
    for (ind, &s) in batch.iter_mut().zip(sparseness_values.iter()) {
        ind.sparseness = Some(s);
        ind.fitness = hybrid_fitness(ind.rcc, s, params);
    }
    for (ind, &s) in batch.iter().zip(sparseness_values.iter()) {
        archive.maybe_admit(behavior_point(ind, generation), s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::Genome;
    use crate::vec2::Vec2;
    use rand::Rng;

    fn pt(x: f64, y: f64, id: u64) -> BehaviorPoint {
        BehaviorPoint {
            x,
            y,
            source_eval_id: id,
            generation: 0,
        }
    }

    #[test]
    fn sparseness_of_coincident_points_is_zero() {
        let pool: Vec<BehaviorPoint> = (0..5).map(|i| pt(0.0, 0.0, i)).collect();
        assert_eq!(sparseness(0.0, 0.0, &pool, 5, 999.0), 0.0);
    }

    #[test]
    fn sparseness_uses_whole_pool_when_smaller_than_k() {
        let pool = vec![pt(3.0, 4.0, 0)];
        assert_eq!(sparseness(0.0, 0.0, &pool, 5, 999.0), 5.0);
    }

    #[test]
    fn sparseness_keeps_k_nearest_only() {
        let pool = vec![
            pt(1.0, 0.0, 0),
            pt(0.0, 2.0, 1),
            pt(3.0, 0.0, 2),
            pt(0.0, 4.0, 3),
            pt(5.0, 0.0, 4),
            pt(6.0, 0.0, 5),
        ];
        // brute force over all 6 distances keeps {1,2,3,4,5}: mean 3
        assert_eq!(sparseness(0.0, 0.0, &pool, 5, 999.0), 3.0);
    }

    #[test]
    fn empty_pool_returns_configured_maximum() {
        assert_eq!(sparseness(1.0, 2.0, &[], 5, 1414.0), 1414.0);
    }

    /// Brute-force oracle: sort all distances, average the first k.
    fn sparseness_oracle(x: f64, y: f64, pool: &[BehaviorPoint], k: usize, empty: f64) -> f64 {
        if pool.is_empty() {
            return empty;
        }
        let mut d: Vec<f64> = pool.iter().map(|p| (p.x - x).hypot(p.y - y)).collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let kk = k.min(d.len());
        d[..kk].iter().sum::<f64>() / kk as f64
    }

    #[test]
    fn sparseness_matches_brute_force_oracle() {
        let mut r = crate::rng::stream(&[21]);
        for case in 0..200 {
            let n = r.random_range(0..200);
            let pool: Vec<BehaviorPoint> = (0..n)
                .map(|i| {
                    pt(
                        r.random_range(-500.0..500.0),
                        r.random_range(-500.0..500.0),
                        i,
                    )
                })
                .collect();
            let (x, y) = (r.random_range(-500.0..500.0), r.random_range(-500.0..500.0));
            let k = r.random_range(1..10);
            let got = sparseness(x, y, &pool, k, 1414.0);
            let want = sparseness_oracle(x, y, &pool, k, 1414.0);
            assert!((got - want).abs() < 1e-9, "case {case}: {got} vs {want}");
        }
    }

    #[test]
    fn sparseness_is_rigid_motion_invariant() {
        let mut r = crate::rng::stream(&[22]);
        for _ in 0..100 {
            let n = r.random_range(1..60);
            let pool: Vec<BehaviorPoint> = (0..n)
                .map(|i| {
                    pt(
                        r.random_range(-500.0..500.0),
                        r.random_range(-500.0..500.0),
                        i,
                    )
                })
                .collect();
            let (x, y) = (r.random_range(-500.0..500.0), r.random_range(-500.0..500.0));
            let theta: f64 = r.random_range(0.0..std::f64::consts::TAU);
            let (dx, dy) = (r.random_range(-100.0..100.0), r.random_range(-100.0..100.0));
            let rot = |px: f64, py: f64| {
                (
                    px * theta.cos() - py * theta.sin() + dx,
                    px * theta.sin() + py * theta.cos() + dy,
                )
            };
            let moved: Vec<BehaviorPoint> = pool
                .iter()
                .map(|p| {
                    let (nx, ny) = rot(p.x, p.y);
                    pt(nx, ny, p.source_eval_id)
                })
                .collect();
            let (qx, qy) = rot(x, y);
            let a = sparseness(x, y, &pool, 5, 1414.0);
            let b = sparseness(qx, qy, &moved, 5, 1414.0);
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn hybrid_fitness_pinned_values() {
        let p = |rcc_thr, s_thr| HybridFitnessParams { rcc_thr, s_thr };
        assert_eq!(hybrid_fitness(1400.0, 0.0, &p(1400.0, 200.0)), 1.0);
        assert_eq!(hybrid_fitness(0.0, 200.0, &p(1400.0, 200.0)), -1.0);
        assert_eq!(hybrid_fitness(700.0, 500.0, &p(1400.0, 1000.0)), 0.0);
    }

    #[test]
    fn hybrid_fitness_monotone_in_both_arguments() {
        let mut r = crate::rng::stream(&[23]);
        let p = HybridFitnessParams {
            rcc_thr: 1400.0,
            s_thr: 600.0,
        };
        for _ in 0..10_000 {
            let rcc = r.random_range(0.0..2000.0);
            let s = r.random_range(0.0..1400.0);
            let d_rcc = r.random_range(1e-6..100.0);
            let d_s = r.random_range(1e-6..100.0);
            assert!(hybrid_fitness(rcc + d_rcc, s, &p) > hybrid_fitness(rcc, s, &p));
            assert!(hybrid_fitness(rcc, s + d_s, &p) < hybrid_fitness(rcc, s, &p));
        }
    }

    fn indiv(x: f64, y: f64, rcc: f64, eval_id: u64) -> Individual {
        Individual {
            genome: Genome::from_array([0.5, 0.5, 5.0, 5.0, 5.0, 10.0]).unwrap(),
            rcc,
            behavior: Vec2::new(x, y),
            sparseness: None,
            fitness: f64::NAN,
            eval_id,
        }
    }

    #[test]
    fn neighbor_pool_counts_and_self_exclusion() {
        let mut archive = NoveltyArchive::new(30.0, 5);
        let batch: Vec<Individual> = (0..20).map(|i| indiv(i as f64, 0.0, 1.0, i as u64)).collect();
        // empty archive, population of 1: pool for that one individual is empty
        let solo = vec![batch[0]];
        assert!(neighbor_pool(&archive, &solo, 0, NeighborMode::ArchivePlusPop, 0).is_empty());

        for i in 0..3 {
            archive.maybe_admit(pt(1000.0 + i as f64, 0.0, 100 + i as u64), 1e9);
        }
        let pool = neighbor_pool(&archive, &batch, 7, NeighborMode::ArchivePlusPop, 0);
        assert_eq!(pool.len(), 22);
        assert!(pool.iter().all(|p| p.source_eval_id != 7));

        // duplicates across archive and population are both kept
        let mut archive2 = NoveltyArchive::new(30.0, 5);
        archive2.maybe_admit(pt(5.0, 0.0, 50), 1e9);
        let dup_batch = vec![indiv(5.0, 0.0, 1.0, 60), indiv(9.0, 0.0, 1.0, 61)];
        let pool2 = neighbor_pool(&archive2, &dup_batch, 61, NeighborMode::ArchivePlusPop, 0);
        assert_eq!(pool2.len(), 2, "multiset semantics");
    }

    #[test]
    fn admission_boundary_is_strict() {
        let mut archive = NoveltyArchive::new(30.0, 5);
        // bootstrap: first k+1 always admitted
        for i in 0..6 {
            assert!(archive.maybe_admit(pt(0.0, 0.0, i), 0.0));
        }
        assert_eq!(archive.len(), 6);
        assert!(!archive.maybe_admit(pt(1.0, 1.0, 6), 30.0), "rho_min exactly");
        assert!(archive.maybe_admit(pt(1.0, 1.0, 7), 30.0 + 1e-9));
        assert_eq!(archive.len(), 7);
    }

    #[test]
    fn scoring_with_weak_novelty_preserves_rcc_ranking() {
        let mut batch: Vec<Individual> = (0..10)
            .map(|i| indiv((i * 83 % 10) as f64 * 50.0, 0.0, (i * 37 % 10) as f64, i as u64))
            .collect();
        let mut archive = NoveltyArchive::new(30.0, 5);
        score_generation(
            &mut batch,
            &mut archive,
            &HybridFitnessParams {
                rcc_thr: 1400.0,
                s_thr: 1e15,
            },
            NeighborMode::ArchivePlusPop,
            1414.0,
            0,
        );
        let mut by_fitness: Vec<u64> = batch.iter().map(|i| i.eval_id).collect();
        by_fitness.sort_by(|&a, &b| {
            let fa = batch.iter().find(|i| i.eval_id == a).unwrap().fitness;
            let fb = batch.iter().find(|i| i.eval_id == b).unwrap().fitness;
            fa.partial_cmp(&fb).unwrap()
        });
        let mut by_rcc: Vec<u64> = batch.iter().map(|i| i.eval_id).collect();
        by_rcc.sort_by(|&a, &b| {
            let ra = batch.iter().find(|i| i.eval_id == a).unwrap().rcc;
            let rb = batch.iter().find(|i| i.eval_id == b).unwrap().rcc;
            ra.partial_cmp(&rb).unwrap()
        });
        assert_eq!(by_fitness, by_rcc);
    }

    #[test]
    fn remote_individual_beats_clustered_at_equal_rcc() {
        let mut batch = vec![
            indiv(0.0, 0.0, 700.0, 0),
            indiv(1.0, 0.0, 700.0, 1),
            indiv(2.0, 0.0, 700.0, 2),
            indiv(400.0, 400.0, 700.0, 3), // remote
        ];
        let mut archive = NoveltyArchive::new(30.0, 5);
        score_generation(
            &mut batch,
            &mut archive,
            &HybridFitnessParams {
                rcc_thr: 1400.0,
                s_thr: 600.0,
            },
            NeighborMode::ArchivePlusPop,
            1414.0,
            0,
        );
        let remote = batch[3].fitness;
        for ind in &batch[..3] {
            assert!(remote < ind.fitness);
        }
    }

    #[test]
    fn batch_admission_matches_hand_computation() {
        // three individuals, k = 1, rho_min = 10, bootstrap size k+1 = 2.
        // behaviors: a=(0,0), b=(5,0), c=(100,0).
        // pools exclude self: s(a) = min(5,100) -> 5; s(b) = 5; s(c) = 95.
        // admissions in eval order: a (bootstrap, len 0<2), b (bootstrap,
        // len 1<2), c admitted since 95 > 10. Archive = [a, b, c].
        let mut batch = vec![
            indiv(0.0, 0.0, 1.0, 0),
            indiv(5.0, 0.0, 1.0, 1),
            indiv(100.0, 0.0, 1.0, 2),
        ];
        let mut archive = NoveltyArchive::new(10.0, 1);
        score_generation(
            &mut batch,
            &mut archive,
            &HybridFitnessParams {
                rcc_thr: 1400.0,
                s_thr: 600.0,
            },
            NeighborMode::ArchivePlusPop,
            1414.0,
            3,
        );
        assert_eq!(batch[0].sparseness, Some(5.0));
        assert_eq!(batch[1].sparseness, Some(5.0));
        assert_eq!(batch[2].sparseness, Some(95.0));
        let ids: Vec<u64> = archive.points().iter().map(|p| p.source_eval_id).collect();
        assert_eq!(ids, vec![0, 1, 2]);
        assert!(archive.points().iter().all(|p| p.generation == 3));
    }

    #[test]
    fn archive_csv_shape() {
        let mut archive = NoveltyArchive::new(30.0, 5);
        archive.maybe_admit(pt(1.5, -2.5, 3), 100.0);
        let csv = archive.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("generation,eval_id,x,y"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("0,3,1.5"), "{row}");
    }
}
