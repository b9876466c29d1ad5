//! Seeded generators for test and benchmark corpora.
//!
//! Everything here is a pure function of its seed (ChaCha8 streams), so
//! corpora referenced in tests are stable across runs, platforms, and
//! thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::impurity::{CountVector, GiniInstance};

/// A fresh deterministic RNG for the given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero count vector with `d` components, each uniform in
/// `0..=max_count` (re-drawn in the all-zero case).
pub fn random_count_vector(rng: &mut impl Rng, d: usize, max_count: u64) -> CountVector {
    loop {
        let counts: Vec<u64> = (0..d).map(|_| rng.random_range(0..=max_count)).collect();
        if counts.iter().any(|&c| c > 0) {
            return CountVector::new(counts).expect("nonzero by construction");
        }
    }
}

/// A count vector with exactly `norm` total examples spread over `d`
/// classes uniformly at random (multinomial with equal class odds).
pub fn random_fixed_norm_vector(rng: &mut impl Rng, d: usize, norm: u64) -> CountVector {
    debug_assert!(norm >= 1);
    let mut counts = vec![0u64; d];
    for _ in 0..norm {
        counts[rng.random_range(0..d)] += 1;
    }
    CountVector::new(counts).expect("norm >= 1 makes the vector nonzero")
}

/// A random instance: `k` uniform in `k_min..=k_max`, size uniform in
/// `max(k, 2)..=max_n`, vectors from [`random_count_vector`].
pub fn random_instance(
    rng: &mut impl Rng,
    max_n: usize,
    max_d: usize,
    max_count: u64,
    k_min: usize,
    k_max: usize,
) -> GiniInstance {
    debug_assert!(k_min >= 1 && k_min <= k_max && k_max <= max_n);
    let k = rng.random_range(k_min..=k_max);
    let n = rng.random_range(k.max(2).min(max_n)..=max_n);
    let d = rng.random_range(1..=max_d);
    let vectors = (0..n)
        .map(|_| random_count_vector(rng, d, max_count))
        .collect();
    GiniInstance::new(vectors, k).expect("generated instances are valid")
}

/// A set of vectors sharing one random l1 norm in `1..=max_norm`.
pub fn random_same_norm_set(
    rng: &mut impl Rng,
    max_size: usize,
    max_d: usize,
    max_norm: u64,
) -> Vec<CountVector> {
    let size = rng.random_range(1..=max_size);
    let d = rng.random_range(1..=max_d);
    let norm = rng.random_range(1..=max_norm);
    (0..size)
        .map(|_| random_fixed_norm_vector(rng, d, norm))
        .collect()
}

/// A same-norm instance with `k` drawn from `k_choices`.
pub fn random_same_norm_instance(
    rng: &mut impl Rng,
    min_n: usize,
    max_n: usize,
    max_d: usize,
    max_norm: u64,
    k_choices: &[usize],
) -> GiniInstance {
    let k = k_choices[rng.random_range(0..k_choices.len())];
    let n = rng.random_range(min_n.max(k)..=max_n.max(k));
    let d = rng.random_range(1..=max_d);
    let norm = rng.random_range(1..=max_norm);
    let vectors = (0..n)
        .map(|_| random_fixed_norm_vector(rng, d, norm))
        .collect();
    GiniInstance::new(vectors, k).expect("generated instances are valid")
}

/// A uniformly random (not necessarily canonical) assignment of `n` items
/// to groups `0..k`.
pub fn random_assignment(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = random_instance(&mut rng(5), 8, 4, 20, 2, 3);
        let b = random_instance(&mut rng(5), 8, 4, 20, 2, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_norm_vectors_have_the_requested_norm() {
        let mut r = rng(1);
        for _ in 0..100 {
            let v = random_fixed_norm_vector(&mut r, 4, 12);
            assert_eq!(v.l1(), 12);
        }
    }

    #[test]
    fn same_norm_sets_share_a_norm() {
        let mut r = rng(2);
        for _ in 0..50 {
            let set = random_same_norm_set(&mut r, 9, 5, 30);
            let norm = set[0].l1();
            assert!(set.iter().all(|v| v.l1() == norm));
        }
    }

    #[test]
    fn random_instances_respect_bounds() {
        let mut r = rng(3);
        for _ in 0..100 {
            let instance = random_instance(&mut r, 9, 4, 15, 2, 3);
            assert!(instance.len() <= 9);
            assert!(instance.dim() <= 4);
            assert!((2..=3).contains(&instance.k()));
            assert!(instance.k() <= instance.len());
        }
    }

    #[test]
    fn random_assignments_stay_in_range() {
        let mut r = rng(4);
        let assignment = random_assignment(&mut r, 50, 3);
        assert_eq!(assignment.len(), 50);
        assert!(assignment.iter().all(|&g| g < 3));
    }
}
