//! Class-count vectors, impurity measures, and the two partition objectives.
//!
//! A [`CountVector`] records how many training examples of each class share
//! one attribute value. The Gini impurity of such a vector is the chance
//! that two draws (with replacement) from its empirical class distribution
//! disagree; weighting it by the vector's total count makes impurities of
//! disjoint groups comparable.
//!
//! For a grouping of the vectors into at most `k` parts we score two
//! closely related objectives:
//!
//! * [`partition_cost`] — the sum of the weighted Gini impurities of the
//!   per-group componentwise sums (the quantity a split search minimises);
//! * [`partition_gap`] — the same total minus the impurity the vectors
//!   already carry individually. The gap is what grouping *adds*, it is
//!   zero exactly when every group is pure in proportion, and it is
//!   non-negative because weighted Gini is superadditive.
//!
//! Minimising either objective yields the same optimal groupings; the gap
//! form is the one that transfers to k-means (see [`crate::reduction`]).

use crate::error::{Error, Result};

/// Per-class example counts for one attribute value.
///
/// Invariants: at least one component, all components finite unsigned
/// counts. The all-zero vector is representable (it shows up naturally as
/// the sum over an empty group) but is rejected wherever a probability
/// distribution is required.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountVector {
    counts: Vec<u64>,
}

impl CountVector {
    /// Wraps raw per-class counts. Fails on an empty vector.
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::DimensionMismatch {
                index: 0,
                expected: 1,
                got: 0,
            });
        }
        Ok(Self { counts })
    }

    /// The all-zero vector of dimension `d` (identity for accumulation).
    pub fn zeros(d: usize) -> Self {
        Self {
            counts: vec![0; d],
        }
    }

    /// Raw counts, one entry per class.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of classes.
    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Total number of examples, i.e. the l1 norm.
    pub fn l1(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// True when every component is zero.
    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub(crate) fn add_assign(&mut self, other: &CountVector) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub(crate) fn sub_assign(&mut self, other: &CountVector) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a -= b;
        }
    }
}

impl From<&[u64]> for CountVector {
    /// Convenience for literals; panics on an empty slice.
    fn from(counts: &[u64]) -> Self {
        CountVector::new(counts.to_vec()).expect("count vector literals must be nonempty")
    }
}

/// A full problem instance: the vectors to group and the group budget `k`.
///
/// Invariants enforced on construction: at least one vector, no all-zero
/// vectors, all dimensions equal, and `1 <= k <= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GiniInstance {
    vectors: Vec<CountVector>,
    k: usize,
}

impl GiniInstance {
    /// Validates and wraps an instance.
    pub fn new(vectors: Vec<CountVector>, k: usize) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let d = vectors[0].dim();
        for (index, v) in vectors.iter().enumerate() {
            if v.dim() != d {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: d,
                    got: v.dim(),
                });
            }
            if v.is_zero() {
                return Err(Error::ZeroVector { index });
            }
        }
        let n = vectors.len();
        if k == 0 || k > n {
            return Err(Error::InvalidK { k, n });
        }
        Ok(Self { vectors, k })
    }

    /// The vectors, in input order.
    pub fn vectors(&self) -> &[CountVector] {
        &self.vectors
    }

    /// Number of vectors.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Always false: instances hold at least one vector.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of classes.
    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    /// Maximum number of groups.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Sum of all vector l1 norms (total example count).
    pub fn total_weight(&self) -> u64 {
        self.vectors.iter().map(CountVector::l1).sum()
    }

    /// Componentwise sum of all vectors.
    pub fn total_vector(&self) -> CountVector {
        let mut total = CountVector::zeros(self.dim());
        for v in &self.vectors {
            total.add_assign(v);
        }
        total
    }

    /// The impurity the vectors carry before any grouping:
    /// `sum_v weighted_gini(v)`.
    pub fn baseline_gini(&self) -> f64 {
        self.vectors.iter().map(weighted_gini).sum()
    }
}

/// A scored grouping of an instance's vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Group label per vector, each in `0..k`.
    pub assignment: Vec<usize>,
    /// Componentwise sum per group (length `k`; empty groups sum to zero).
    pub group_sums: Vec<CountVector>,
    /// Total weighted Gini impurity of the group sums.
    pub objective1: f64,
    /// `objective1` minus the instance baseline; non-negative.
    pub objective2: f64,
}

impl Partition {
    /// Scores `assignment` against `instance`.
    pub fn new(instance: &GiniInstance, assignment: Vec<usize>) -> Result<Self> {
        validate_assignment(instance, &assignment)?;
        let group_sums = group_sums(instance, &assignment);
        let objective1: f64 = group_sums.iter().map(weighted_gini).sum();
        let objective2 = objective1 - instance.baseline_gini();
        Ok(Self {
            assignment,
            group_sums,
            objective1,
            objective2,
        })
    }
}

/// Checks that `assignment` labels every vector of `instance` with a group
/// in `0..k`.
pub fn validate_assignment(instance: &GiniInstance, assignment: &[usize]) -> Result<()> {
    if assignment.len() != instance.len() {
        return Err(Error::AssignmentLength {
            expected: instance.len(),
            got: assignment.len(),
        });
    }
    for (index, &label) in assignment.iter().enumerate() {
        if label >= instance.k() {
            return Err(Error::LabelOutOfRange {
                label,
                index,
                k: instance.k(),
            });
        }
    }
    Ok(())
}

/// Componentwise sums per group. The result always has `k` entries; groups
/// with no members sum to the zero vector.
pub fn group_sums(instance: &GiniInstance, assignment: &[usize]) -> Vec<CountVector> {
    debug_assert_eq!(assignment.len(), instance.len());
    let mut sums = vec![CountVector::zeros(instance.dim()); instance.k()];
    for (v, &g) in instance.vectors().iter().zip(assignment) {
        sums[g].add_assign(v);
    }
    sums
}

/// Gini impurity of the class distribution induced by `u`:
/// the probability that two independent draws from it disagree.
///
/// Fails on the all-zero vector, which induces no distribution.
pub fn gini_impurity(u: &CountVector) -> Result<f64> {
    let l = u.l1();
    if l == 0 {
        return Err(Error::ZeroVector { index: 0 });
    }
    let l = l as f64;
    Ok(u.counts()
        .iter()
        .map(|&c| {
            let p = c as f64 / l;
            p * (1.0 - p)
        })
        .sum())
}

/// Shannon entropy (natural log) of the class distribution induced by `u`,
/// with the usual convention that zero-probability classes contribute zero.
///
/// Fails on the all-zero vector.
pub fn entropy_impurity(u: &CountVector) -> Result<f64> {
    let l = u.l1();
    if l == 0 {
        return Err(Error::ZeroVector { index: 0 });
    }
    let l = l as f64;
    Ok(u.counts()
        .iter()
        .map(|&c| {
            if c == 0 {
                0.0
            } else {
                let p = c as f64 / l;
                -p * p.ln()
            }
        })
        .sum())
}

/// Shannon entropy in bits (base-2 log); same conventions as
/// [`entropy_impurity`].
pub fn entropy_impurity_base2(u: &CountVector) -> Result<f64> {
    entropy_impurity(u).map(|h| h / std::f64::consts::LN_2)
}

/// Gini impurity scaled by the vector's total count.
///
/// The all-zero vector contributes zero by continuity (`l * i(u) -> 0` as
/// `l -> 0`), which is exactly what an empty group should cost, so unlike
/// the plain impurities this never fails.
pub fn weighted_gini(v: &CountVector) -> f64 {
    let l = v.l1();
    if l == 0 {
        return 0.0;
    }
    let l = l as f64;
    // l * sum p(1-p) with p = c/l, expanded to avoid the inner division:
    // sum c - (sum c^2)/l.
    let sum_sq: f64 = v.counts().iter().map(|&c| (c as f64) * (c as f64)).sum();
    l - sum_sq / l
}

/// Total weighted Gini impurity of the grouping (the raw objective).
pub fn partition_cost(instance: &GiniInstance, assignment: &[usize]) -> Result<f64> {
    validate_assignment(instance, assignment)?;
    Ok(group_sums(instance, assignment)
        .iter()
        .map(weighted_gini)
        .sum())
}

/// Impurity the grouping adds above the per-vector baseline;
/// `partition_cost - baseline_gini`, non-negative up to rounding.
pub fn partition_gap(instance: &GiniInstance, assignment: &[usize]) -> Result<f64> {
    Ok(partition_cost(instance, assignment)? - instance.baseline_gini())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cv(counts: &[u64]) -> CountVector {
        CountVector::from(counts)
    }

    fn three_vector_instance(k: usize) -> GiniInstance {
        GiniInstance::new(vec![cv(&[4, 0]), cv(&[0, 4]), cv(&[3, 1])], k).unwrap()
    }

    #[test]
    fn gini_of_pure_vector_is_zero() {
        assert_eq!(gini_impurity(&cv(&[4, 0])).unwrap(), 0.0);
        assert_eq!(gini_impurity(&cv(&[0, 0, 7])).unwrap(), 0.0);
    }

    #[test]
    fn gini_of_balanced_pair_is_half() {
        assert_eq!(gini_impurity(&cv(&[1, 1])).unwrap(), 0.5);
        assert_eq!(gini_impurity(&cv(&[5, 5])).unwrap(), 0.5);
    }

    #[test]
    fn gini_matches_hand_computation() {
        // (3,1): p = (3/4, 1/4); 3/4*1/4 + 1/4*3/4 = 0.375.
        assert_eq!(gini_impurity(&cv(&[3, 1])).unwrap(), 0.375);
        // Uniform over four classes: 4 * (1/4)(3/4) = 0.75.
        assert_eq!(gini_impurity(&cv(&[1, 1, 1, 1])).unwrap(), 0.75);
    }

    #[test]
    fn gini_rejects_zero_vector() {
        assert!(matches!(
            gini_impurity(&CountVector::zeros(3)),
            Err(Error::ZeroVector { .. })
        ));
    }

    #[test]
    fn entropy_matches_hand_computation() {
        // (3,1): -(3/4)ln(3/4) - (1/4)ln(1/4).
        let h = entropy_impurity(&cv(&[3, 1])).unwrap();
        assert!((h - 0.562_335_144_618_808_3).abs() < 1e-15);
        let h2 = entropy_impurity_base2(&cv(&[3, 1])).unwrap();
        assert!((h2 - 0.811_278_124_459_132_8).abs() < 1e-15);
    }

    #[test]
    fn entropy_of_balanced_pair() {
        let h = entropy_impurity(&cv(&[1, 1])).unwrap();
        assert!((h - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((entropy_impurity_base2(&cv(&[1, 1])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_ignores_zero_classes() {
        let a = entropy_impurity(&cv(&[3, 0, 1])).unwrap();
        let b = entropy_impurity(&cv(&[3, 1])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn weighted_gini_examples() {
        assert_eq!(weighted_gini(&cv(&[3, 1])), 1.5);
        assert_eq!(weighted_gini(&cv(&[2, 2])), 2.0);
        assert_eq!(weighted_gini(&cv(&[4, 0])), 0.0);
        assert_eq!(weighted_gini(&CountVector::zeros(2)), 0.0);
    }

    #[test]
    fn partition_cost_on_three_vector_instance() {
        let instance = three_vector_instance(2);
        // {v0, v2} + {v1}: group sums (7,1) and (0,4).
        assert_eq!(partition_cost(&instance, &[0, 1, 0]).unwrap(), 1.75);
        // {v0} + {v1, v2}: group sums (4,0) and (3,5).
        assert_eq!(partition_cost(&instance, &[0, 1, 1]).unwrap(), 3.75);
        // {v0, v1} + {v2}: group sums (4,4) and (3,1).
        assert_eq!(partition_cost(&instance, &[0, 0, 1]).unwrap(), 5.5);
        // Everything together (k = 1): sum (7,5).
        let merged = three_vector_instance(1);
        let all = partition_cost(&merged, &[0, 0, 0]).unwrap();
        assert!((all - 70.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn partition_gap_subtracts_baseline() {
        let instance = three_vector_instance(2);
        assert_eq!(instance.baseline_gini(), 1.5);
        assert_eq!(partition_gap(&instance, &[0, 1, 0]).unwrap(), 0.25);
    }

    #[test]
    fn partition_struct_scores_both_objectives() {
        let instance = three_vector_instance(2);
        let p = Partition::new(&instance, vec![0, 1, 0]).unwrap();
        assert_eq!(p.objective1, 1.75);
        assert_eq!(p.objective2, 0.25);
        assert_eq!(p.group_sums[0], cv(&[7, 1]));
        assert_eq!(p.group_sums[1], cv(&[0, 4]));
    }

    #[test]
    fn empty_groups_cost_nothing() {
        // k = 2 but everything in group 0; group 1 sums to zero.
        let instance =
            GiniInstance::new(vec![cv(&[1, 0]), cv(&[0, 1])], 2).unwrap();
        let cost = partition_cost(&instance, &[0, 0]).unwrap();
        assert_eq!(cost, weighted_gini(&cv(&[1, 1])));
    }

    #[test]
    fn instance_construction_rejects_bad_input() {
        assert!(matches!(
            GiniInstance::new(vec![], 1),
            Err(Error::EmptyInstance)
        ));
        assert!(matches!(
            GiniInstance::new(vec![cv(&[1, 2]), CountVector::zeros(2)], 1),
            Err(Error::ZeroVector { index: 1 })
        ));
        assert!(matches!(
            GiniInstance::new(vec![cv(&[1, 2]), cv(&[1, 2, 3])], 1),
            Err(Error::DimensionMismatch { index: 1, .. })
        ));
        assert!(matches!(
            GiniInstance::new(vec![cv(&[1])], 0),
            Err(Error::InvalidK { k: 0, n: 1 })
        ));
        assert!(matches!(
            GiniInstance::new(vec![cv(&[1])], 2),
            Err(Error::InvalidK { k: 2, n: 1 })
        ));
    }

    #[test]
    fn assignment_validation() {
        let instance = three_vector_instance(2);
        assert!(matches!(
            partition_cost(&instance, &[0, 1]),
            Err(Error::AssignmentLength {
                expected: 3,
                got: 2
            })
        ));
        assert!(matches!(
            partition_cost(&instance, &[0, 2, 0]),
            Err(Error::LabelOutOfRange {
                label: 2,
                index: 1,
                k: 2
            })
        ));
    }

    fn arb_count_vector(max_d: usize, max_c: u64) -> impl Strategy<Value = CountVector> {
        proptest::collection::vec(0..=max_c, 1..=max_d)
            .prop_filter("nonzero", |c| c.iter().any(|&x| x > 0))
            .prop_map(|c| CountVector::new(c).unwrap())
    }

    proptest! {
        #[test]
        fn gini_stays_in_range(v in arb_count_vector(6, 50)) {
            let d = v.dim() as f64;
            let g = gini_impurity(&v).unwrap();
            prop_assert!(g >= 0.0);
            prop_assert!(g <= 1.0 - 1.0 / d + 1e-12);
        }

        #[test]
        fn gini_is_scale_invariant(v in arb_count_vector(5, 20), m in 1u64..=9) {
            let scaled = CountVector::new(
                v.counts().iter().map(|&c| c * m).collect(),
            ).unwrap();
            let a = gini_impurity(&v).unwrap();
            let b = gini_impurity(&scaled).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn entropy_base2_is_rescaled_nat(v in arb_count_vector(6, 50)) {
            let nat = entropy_impurity(&v).unwrap();
            let bits = entropy_impurity_base2(&v).unwrap();
            prop_assert!((bits * std::f64::consts::LN_2 - nat).abs() < 1e-12);
        }

        #[test]
        fn weighted_gini_is_superadditive(
            u in arb_count_vector(4, 30),
            w in arb_count_vector(4, 30),
        ) {
            // Merging two vectors never decreases total weighted impurity.
            prop_assume!(u.dim() == w.dim());
            let mut sum = u.clone();
            sum.add_assign(&w);
            let merged = weighted_gini(&sum);
            let split = weighted_gini(&u) + weighted_gini(&w);
            prop_assert!(merged >= split - 1e-9);
        }

        #[test]
        fn gap_is_nonnegative(
            vectors in proptest::collection::vec(arb_count_vector(3, 20), 1..=7),
            k in 1usize..=4,
            label_seed in proptest::collection::vec(0usize..4, 7),
        ) {
            let same_dim: Vec<CountVector> = {
                let d = vectors[0].dim();
                vectors
                    .into_iter()
                    .map(|v| {
                        let mut c = v.counts().to_vec();
                        c.resize(d, 1);
                        if c.iter().all(|&x| x == 0) {
                            c[0] = 1;
                        }
                        CountVector::new(c).unwrap()
                    })
                    .collect()
            };
            let n = same_dim.len();
            let k = k.min(n);
            let instance = GiniInstance::new(same_dim, k).unwrap();
            let assignment: Vec<usize> =
                (0..n).map(|i| label_seed[i] % k).collect();
            let gap = partition_gap(&instance, &assignment).unwrap();
            prop_assert!(gap >= -1e-9);
        }
    }
}
