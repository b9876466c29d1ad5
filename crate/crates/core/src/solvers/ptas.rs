//! Sampling-based approximation solver for small group counts.
//!
//! The solver works on the merged, normalised point set and searches for a
//! good set of `k` centers by recursive guessing:
//!
//! * **Sample branch.** Draw a multiset of points from the active set,
//!   each draw proportional to weight, and try a short list of candidate
//!   centers built from the sample (the most frequently drawn points
//!   themselves, the centroid of the two heaviest, and the centroid of the
//!   whole sample). Each candidate is pushed as the next center and the
//!   search recurses for the remaining ones.
//! * **Halving branch.** Once at least one center is placed, discard the
//!   half of the active weight closest to the current centers and recurse
//!   on the far remainder. Clusters whose points are drowned out by mass
//!   already covered become visible after a few halvings; since the active
//!   weight at least halves each time, a branch can halve only
//!   logarithmically often.
//!
//! Every complete center set is scored by assigning all points to their
//! nearest center and rescoring that assignment with optimal (weighted
//! centroid) centers; the best assignment over all leaves and all
//! `boost_rounds` independent rounds wins. Accuracy is controlled by
//! `epsilon` through the sample size: smaller `epsilon`, larger samples,
//! more faithful candidates. Instances with at most `k` distinct
//! normalised points short-circuit to an exact zero-cost answer.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::impurity::GiniInstance;
use crate::reduction::{
    cost_with_optimal_centers, dist_sq, merge_identical, normalize, KMeansInstance,
};
use crate::solvers::{derive_seed, prefix_sum_pick, SolveResult};

/// Largest group count the sampling solver accepts; the recursion tree
/// grows too quickly beyond it.
pub const SAMPLING_K_GUARD: usize = 4;

/// Default number of independent boosting rounds.
pub const DEFAULT_BOOST_ROUNDS: usize = 20;

/// Hard per-round cap on candidate evaluations; a safety valve for
/// instances whose recursion tree would otherwise be enormous. Small
/// instances stay far below it.
const EVALUATION_BUDGET: u64 = 100_000;

/// How many of the most-drawn sample points become singleton candidates.
const TOP_SINGLETONS: usize = 4;

/// Knobs of the sampling solver.
#[derive(Debug, Clone, PartialEq)]
pub struct PtasConfig {
    /// Accuracy knob in `(0, 1)`; smaller values draw larger samples.
    pub epsilon: f64,
    /// Number of groups; must match the instance and stay within
    /// [`SAMPLING_K_GUARD`].
    pub k: usize,
    /// Independent repetitions, best result kept (at least 1).
    pub boost_rounds: usize,
    /// Draws per sample; defaults to `4 * ceil(1 / epsilon)`.
    pub sample_size: usize,
    /// Base seed; round `r` derives its own stream from `(rng_seed, r)`.
    pub rng_seed: u64,
}

impl PtasConfig {
    /// Standard configuration for `k` groups at accuracy `epsilon`:
    /// `sample_size = 4 * ceil(1 / epsilon)`, [`DEFAULT_BOOST_ROUNDS`]
    /// rounds, seed 0.
    pub fn new(k: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            k,
            boost_rounds: DEFAULT_BOOST_ROUNDS,
            sample_size: 4 * (1.0 / epsilon).ceil() as usize,
            rng_seed: 0,
        })
    }

    /// Same configuration with a different base seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Same configuration with a different number of rounds.
    pub fn with_boost_rounds(mut self, rounds: usize) -> Self {
        self.boost_rounds = rounds;
        self
    }

    fn validate(&self, instance_k: usize) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        if self.k > SAMPLING_K_GUARD {
            return Err(Error::KTooLarge {
                k: self.k,
                max: SAMPLING_K_GUARD,
            });
        }
        if self.k != instance_k {
            return Err(Error::ConfigMismatch {
                config_k: self.k,
                instance_k,
            });
        }
        Ok(())
    }
}

/// Work counters accumulated over all rounds of one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PtasTrace {
    /// Weighted draws performed while sampling.
    pub weighted_draws: u64,
    /// Binary-search probes spent turning uniform draws into indices
    /// (logarithmic in the active set size per draw).
    pub prefix_search_steps: u64,
    /// Complete center sets scored.
    pub candidate_evaluations: u64,
    /// Times a branch discarded the near half of its active weight.
    pub halvings: u64,
}

impl PtasTrace {
    fn absorb(&mut self, other: &PtasTrace) {
        self.weighted_draws += other.weighted_draws;
        self.prefix_search_steps += other.prefix_search_steps;
        self.candidate_evaluations += other.candidate_evaluations;
        self.halvings += other.halvings;
    }
}

struct RoundState<'a> {
    km: &'a KMeansInstance,
    k: usize,
    sample_size: usize,
    rng: ChaCha8Rng,
    trace: PtasTrace,
    best_cost: f64,
    best_assignment: Vec<usize>,
}

struct RoundOutcome {
    cost: f64,
    assignment: Vec<usize>,
    trace: PtasTrace,
}

/// Solves `instance` with the sampling scheme; see the module docs.
pub fn solve_ptas(instance: &GiniInstance, config: &PtasConfig) -> Result<SolveResult> {
    solve_ptas_traced(instance, config).map(|(result, _)| result)
}

/// Like [`solve_ptas`], additionally returning the work counters.
pub fn solve_ptas_traced(
    instance: &GiniInstance,
    config: &PtasConfig,
) -> Result<(SolveResult, PtasTrace)> {
    let started = Instant::now();
    config.validate(instance.k())?;
    let km = normalize(instance);
    let (merged, members) = merge_identical(&km);

    if merged.points.len() <= config.k {
        // At most k distinct normalised points: giving each its own group
        // costs exactly zero extra impurity, which is optimal.
        let mut expanded = vec![0usize; km.points.len()];
        for (label, group) in members.iter().enumerate() {
            for &original in group {
                expanded[original] = label;
            }
        }
        let result = SolveResult::from_assignment(
            instance,
            expanded,
            "ptas",
            0,
            config.rng_seed,
            started,
        )?;
        return Ok((result, PtasTrace::default()));
    }

    let rounds = config.boost_rounds.max(1) as u64;
    let sample_size = config.sample_size.max(1);
    let outcomes: Vec<RoundOutcome> = (0..rounds)
        .into_par_iter()
        .map(|r| run_round(&merged, config.k, sample_size, derive_seed(config.rng_seed, r)))
        .collect();

    let mut trace = PtasTrace::default();
    for outcome in &outcomes {
        trace.absorb(&outcome.trace);
    }
    let winner = outcomes
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            a.cost
                .partial_cmp(&b.cost)
                .expect("costs are finite")
                .then(i.cmp(j))
        })
        .expect("at least one round")
        .1;

    let mut expanded = vec![0usize; km.points.len()];
    for (merged_index, group) in members.iter().enumerate() {
        for &original in group {
            expanded[original] = winner.assignment[merged_index];
        }
    }
    let result = SolveResult::from_assignment(
        instance,
        expanded,
        "ptas",
        trace.candidate_evaluations,
        config.rng_seed,
        started,
    )?;
    Ok((result, trace))
}

fn run_round(km: &KMeansInstance, k: usize, sample_size: usize, seed: u64) -> RoundOutcome {
    let n = km.points.len();
    let mut state = RoundState {
        km,
        k,
        sample_size,
        rng: ChaCha8Rng::seed_from_u64(seed),
        trace: PtasTrace::default(),
        best_cost: f64::INFINITY,
        best_assignment: vec![0; n],
    };
    let active: Vec<usize> = (0..n).collect();
    let mut centers: Vec<Vec<f64>> = Vec::new();
    recurse(&mut state, &active, &mut centers);
    debug_assert!(state.best_cost.is_finite());
    RoundOutcome {
        cost: state.best_cost,
        assignment: state.best_assignment,
        trace: state.trace,
    }
}

fn recurse(state: &mut RoundState<'_>, active: &[usize], centers: &mut Vec<Vec<f64>>) {
    if state.trace.candidate_evaluations >= EVALUATION_BUDGET {
        return;
    }
    let remaining = state.k - centers.len();
    if remaining == 0 {
        evaluate(state, centers);
        return;
    }
    if active.is_empty() {
        if !centers.is_empty() {
            evaluate(state, centers);
        }
        return;
    }

    // If the remaining centers can cover every distinct active coordinate,
    // place them exactly; sampling could do no better.
    let distinct = distinct_coords(state.km, active);
    if distinct.len() <= remaining {
        let mut extended = centers.clone();
        for &i in &distinct {
            extended.push(state.km.points[i].coords.clone());
        }
        evaluate(state, &extended);
        return;
    }

    // Sample branch: one more center guessed from the active set.
    let counts = draw_sample(state, active);
    for candidate in candidate_centers(state.km, &counts) {
        centers.push(candidate);
        recurse(state, active, centers);
        centers.pop();
    }

    // Halving branch: drop the covered half of the weight and look again.
    if !centers.is_empty() {
        let far = far_half(state.km, active, centers);
        if !far.is_empty() {
            state.trace.halvings += 1;
            recurse(state, &far, centers);
        }
    }
}

/// Lowest-index representative of each distinct coordinate vector among
/// `active`, in index order.
fn distinct_coords(km: &KMeansInstance, active: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    'outer: for &i in active {
        for &j in &seen {
            if km.points[j].coords == km.points[i].coords {
                continue 'outer;
            }
        }
        seen.push(i);
    }
    seen
}

/// Draws `sample_size` points from `active` with probability proportional
/// to weight; returns `(point index, times drawn)` sorted by point index.
fn draw_sample(state: &mut RoundState<'_>, active: &[usize]) -> Vec<(usize, u32)> {
    let mut cumulative = Vec::with_capacity(active.len());
    let mut total = 0.0f64;
    for &i in active {
        total += state.km.points[i].weight as f64;
        cumulative.push(total);
    }
    let mut counts = vec![0u32; active.len()];
    for _ in 0..state.sample_size {
        let r = state.rng.random_range(0.0..total);
        let (slot, steps) = prefix_sum_pick(&cumulative, r);
        counts[slot] += 1;
        state.trace.weighted_draws += 1;
        state.trace.prefix_search_steps += steps;
    }
    active
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c > 0)
        .map(|(&i, &c)| (i, c))
        .collect()
}

/// Candidate centers from a sample: the [`TOP_SINGLETONS`] most-drawn
/// points themselves, the draw-weighted centroid of the top two, and the
/// draw-weighted centroid of the whole sample. Bitwise duplicates are
/// dropped; order is deterministic.
fn candidate_centers(km: &KMeansInstance, counts: &[(usize, u32)]) -> Vec<Vec<f64>> {
    let d = km.d;
    let mut order: Vec<(u32, usize)> = counts.iter().map(|&(i, c)| (c, i)).collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut candidates: Vec<Vec<f64>> = order
        .iter()
        .take(TOP_SINGLETONS)
        .map(|&(_, i)| km.points[i].coords.clone())
        .collect();

    let centroid = |entries: &[(u32, usize)]| -> Vec<f64> {
        let mut sum = vec![0.0f64; d];
        let mut mass = 0.0f64;
        for &(c, i) in entries {
            let cf = c as f64;
            for (s, &x) in sum.iter_mut().zip(&km.points[i].coords) {
                *s += cf * x;
            }
            mass += cf;
        }
        sum.into_iter().map(|s| s / mass).collect()
    };
    if order.len() >= 2 {
        candidates.push(centroid(&order[..2]));
        candidates.push(centroid(&order));
    }

    // Drop exact duplicates while keeping first occurrences.
    let mut unique: Vec<Vec<f64>> = Vec::with_capacity(candidates.len());
    for c in candidates {
        let dup = unique.iter().any(|u| {
            u.iter()
                .zip(&c)
                .all(|(a, b)| a.to_bits() == b.to_bits())
        });
        if !dup {
            unique.push(c);
        }
    }
    unique
}

/// Splits `active` by distance to the nearest center and returns the far
/// part: the points left after greedily taking the closest ones until at
/// least half the active weight is covered. The result is strictly smaller
/// than `active` and carries at most half its weight.
fn far_half(km: &KMeansInstance, active: &[usize], centers: &[Vec<f64>]) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = active
        .iter()
        .map(|&i| {
            let d = centers
                .iter()
                .map(|c| dist_sq(&km.points[i].coords, c))
                .fold(f64::INFINITY, f64::min);
            (d, i)
        })
        .collect();
    scored.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("distances are finite")
            .then(a.1.cmp(&b.1))
    });
    let total: f64 = active.iter().map(|&i| km.points[i].weight as f64).sum();
    let mut covered = 0.0;
    let mut cut = 0;
    for (j, &(_, i)) in scored.iter().enumerate() {
        covered += km.points[i].weight as f64;
        cut = j + 1;
        if 2.0 * covered >= total {
            break;
        }
    }
    let mut far: Vec<usize> = scored[cut..].iter().map(|&(_, i)| i).collect();
    far.sort_unstable();
    far
}

/// Scores one complete center set: assign every point to its nearest
/// center (ties to the lowest center index), then rescore the assignment
/// with optimal centers. Keeps it if it beats the incumbent.
fn evaluate(state: &mut RoundState<'_>, centers: &[Vec<f64>]) {
    state.trace.candidate_evaluations += 1;
    let assignment: Vec<usize> = state
        .km
        .points
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = dist_sq(&p.coords, &centers[0]);
            for (i, c) in centers.iter().enumerate().skip(1) {
                let d = dist_sq(&p.coords, c);
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best
        })
        .collect();
    let cost = cost_with_optimal_centers(state.km, &assignment)
        .expect("labels are within the merged instance's group count");
    if cost < state.best_cost {
        state.best_cost = cost;
        state.best_assignment = assignment;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impurity::CountVector;
    use crate::solvers::solve_brute_force;
    use proptest::prelude::*;

    fn cv(counts: &[u64]) -> CountVector {
        CountVector::from(counts)
    }

    fn three_vector_instance() -> GiniInstance {
        GiniInstance::new(vec![cv(&[4, 0]), cv(&[0, 4]), cv(&[3, 1])], 2).unwrap()
    }

    #[test]
    fn config_defaults_follow_epsilon() {
        let config = PtasConfig::new(2, 0.1).unwrap();
        assert_eq!(config.sample_size, 40);
        assert_eq!(config.boost_rounds, DEFAULT_BOOST_ROUNDS);
        let coarse = PtasConfig::new(2, 0.5).unwrap();
        assert_eq!(coarse.sample_size, 8);
    }

    #[test]
    fn config_rejects_bad_epsilon_and_large_k() {
        assert!(matches!(
            PtasConfig::new(2, 0.0),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            PtasConfig::new(2, 1.0),
            Err(Error::InvalidEpsilon(_))
        ));
        assert!(matches!(
            PtasConfig::new(2, -0.3),
            Err(Error::InvalidEpsilon(_))
        ));
        let config = PtasConfig::new(5, 0.2).unwrap();
        assert!(matches!(
            solve_ptas(
                &GiniInstance::new(
                    (0..6).map(|i| cv(&[i + 1, 1])).collect(),
                    5
                )
                .unwrap(),
                &config
            ),
            Err(Error::KTooLarge { k: 5, max: 4 })
        ));
    }

    #[test]
    fn config_must_match_instance_group_count() {
        let config = PtasConfig::new(3, 0.2).unwrap();
        assert!(matches!(
            solve_ptas(&three_vector_instance(), &config),
            Err(Error::ConfigMismatch {
                config_k: 3,
                instance_k: 2
            })
        ));
    }

    #[test]
    fn finds_optimum_of_worked_instance() {
        let config = PtasConfig::new(2, 0.25).unwrap().with_boost_rounds(6);
        let (result, trace) = solve_ptas_traced(&three_vector_instance(), &config).unwrap();
        assert_eq!(result.assignment, vec![0, 1, 0]);
        assert_eq!(result.objective1, 1.75);
        assert_eq!(result.solver_name, "ptas");
        assert!(trace.weighted_draws > 0);
        assert!(trace.prefix_search_steps > 0);
        assert!(trace.candidate_evaluations > 0);
        assert_eq!(result.iterations, trace.candidate_evaluations);
    }

    #[test]
    fn degenerate_instances_are_exact_without_sampling() {
        // Two distinct normalised coordinates — (1,0) and (1,3)/4 — with
        // k = 2: the merge shortcut answers without any draws.
        let instance = GiniInstance::new(
            vec![cv(&[2, 0]), cv(&[1, 3]), cv(&[5, 0]), cv(&[2, 6])],
            2,
        )
        .unwrap();
        let config = PtasConfig::new(2, 0.4).unwrap();
        let (result, trace) = solve_ptas_traced(&instance, &config).unwrap();
        assert_eq!(result.objective2, 0.0);
        assert_eq!(result.assignment, vec![0, 1, 0, 1]);
        assert_eq!(trace, PtasTrace::default());
        assert_eq!(result.iterations, 0);
    }

    #[test]
    fn is_deterministic_for_fixed_config() {
        let config = PtasConfig::new(2, 0.3).unwrap().with_seed(99);
        let a = solve_ptas(&three_vector_instance(), &config).unwrap();
        let b = solve_ptas(&three_vector_instance(), &config).unwrap();
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.objective1, b.objective1);
        assert_eq!(a.iterations, b.iterations);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// The sampling solver never reports a better objective than the
        /// exact search (that would indicate a scoring bug), and never a
        /// negative gap.
        #[test]
        fn never_beats_the_exact_optimum(
            n in 2usize..=7,
            seed in 0u64..2000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let k = rng.random_range(2..=3.min(n));
            let vectors: Vec<CountVector> = (0..n)
                .map(|_| loop {
                    let counts: Vec<u64> =
                        (0..3).map(|_| rng.random_range(0..=10)).collect();
                    if counts.iter().any(|&c| c > 0) {
                        break CountVector::new(counts).unwrap();
                    }
                })
                .collect();
            let instance = GiniInstance::new(vectors, k).unwrap();
            let exact = solve_brute_force(&instance).unwrap();
            let config = PtasConfig::new(k, 0.3)
                .unwrap()
                .with_boost_rounds(4)
                .with_seed(seed);
            let approx = solve_ptas(&instance, &config).unwrap();
            prop_assert!(approx.objective1 >= exact.objective1 - 1e-9);
            prop_assert!(approx.objective2 >= -1e-9);
        }
    }
}
