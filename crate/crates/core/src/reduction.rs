//! From count vectors to weighted k-means, and the identities that justify
//! the trip.
//!
//! Dividing a count vector by its total maps it to a point on the
//! probability simplex; the total becomes the point's weight. Two facts
//! make this more than a convenience:
//!
//! * For a *set* of vectors sharing one l1 norm `L`, the weighted Gini of
//!   the sum exceeds the per-vector total by exactly `1/L` times the sum of
//!   squared distances of the raw vectors to their mean
//!   ([`gini_gap_identity`]).
//! * For a *partition* of arbitrary vectors, the gap objective equals the
//!   weighted k-means cost of the normalised points under the same
//!   grouping, with per-group weighted centroids as centers
//!   ([`objective_equivalence`]).
//!
//! Consequently any k-means machinery — Lloyd iteration, sampling schemes,
//! exhaustive search — can minimise the grouping objectives directly.
//! [`check_same_norm_equivalence`] verifies the special case where all
//! norms agree, in which the raw vectors themselves form a (unit-weight)
//! k-means instance whose cost is an affine function of the Gini cost, so
//! the optimal groupings of the two problems coincide exactly.

use crate::error::{Error, Result};
use crate::impurity::{
    self, weighted_gini, CountVector, GiniInstance,
};

/// A point on the probability simplex together with its multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoint {
    /// Coordinates; for normalised count vectors these sum to 1.
    pub coords: Vec<f64>,
    /// Integer multiplicity (the l1 norm of the originating vector, or a
    /// sum of such norms after merging).
    pub weight: u64,
    /// Index of the first originating vector in the source instance.
    pub origin: usize,
}

/// A weighted k-means instance derived from a [`GiniInstance`].
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansInstance {
    pub points: Vec<WeightedPoint>,
    pub k: usize,
    pub d: usize,
    pub total_weight: u64,
}

/// A set of cluster centers, one per group.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet {
    /// One center per group; centers of empty groups are all-zero
    /// placeholders.
    pub centers: Vec<Vec<f64>>,
    /// Indices of groups that received no points.
    pub empty_groups: Vec<usize>,
}

/// Squared Euclidean distance.
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum()
}

/// Maps every vector to its normalised point with the l1 norm as weight.
///
/// The instance invariant (no zero vectors) guarantees every division is by
/// a positive integer. IEEE division is correctly rounded, so vectors that
/// are integer multiples of one another normalise to bitwise-identical
/// coordinates — which is what lets [`merge_identical`] use exact equality.
pub fn normalize(instance: &GiniInstance) -> KMeansInstance {
    let points = instance
        .vectors()
        .iter()
        .enumerate()
        .map(|(origin, v)| {
            let l = v.l1();
            debug_assert!(l > 0);
            let lf = l as f64;
            WeightedPoint {
                coords: v.counts().iter().map(|&c| c as f64 / lf).collect(),
                weight: l,
                origin,
            }
        })
        .collect();
    KMeansInstance {
        points,
        k: instance.k(),
        d: instance.dim(),
        total_weight: instance.total_weight(),
    }
}

/// Coalesces points with bitwise-identical coordinates, summing weights.
///
/// Returns the smaller instance and, for each merged point, the indices of
/// the original points it absorbed (in input order). Point order follows
/// first appearance, so the mapping — and everything downstream — is
/// deterministic.
pub fn merge_identical(km: &KMeansInstance) -> (KMeansInstance, Vec<Vec<usize>>) {
    let mut merged: Vec<WeightedPoint> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut index_of: std::collections::HashMap<Vec<u64>, usize> =
        std::collections::HashMap::new();
    for (i, p) in km.points.iter().enumerate() {
        let key: Vec<u64> = p.coords.iter().map(|c| c.to_bits()).collect();
        match index_of.get(&key) {
            Some(&j) => {
                merged[j].weight += p.weight;
                members[j].push(i);
            }
            None => {
                index_of.insert(key, merged.len());
                merged.push(p.clone());
                members.push(vec![i]);
            }
        }
    }
    (
        KMeansInstance {
            points: merged,
            k: km.k,
            d: km.d,
            total_weight: km.total_weight,
        },
        members,
    )
}

fn validate_km_assignment(km: &KMeansInstance, assignment: &[usize]) -> Result<()> {
    if assignment.len() != km.points.len() {
        return Err(Error::AssignmentLength {
            expected: km.points.len(),
            got: assignment.len(),
        });
    }
    for (index, &label) in assignment.iter().enumerate() {
        if label >= km.k {
            return Err(Error::LabelOutOfRange {
                label,
                index,
                k: km.k,
            });
        }
    }
    Ok(())
}

/// Weighted sum of squared distances from each point to its group's center.
pub fn kmeans_cost(
    km: &KMeansInstance,
    assignment: &[usize],
    centers: &CentroidSet,
) -> Result<f64> {
    validate_km_assignment(km, assignment)?;
    if centers.centers.len() != km.k {
        return Err(Error::ConfigMismatch {
            config_k: centers.centers.len(),
            instance_k: km.k,
        });
    }
    for (index, c) in centers.centers.iter().enumerate() {
        if c.len() != km.d {
            return Err(Error::DimensionMismatch {
                index,
                expected: km.d,
                got: c.len(),
            });
        }
    }
    Ok(km
        .points
        .iter()
        .zip(assignment)
        .map(|(p, &g)| p.weight as f64 * dist_sq(&p.coords, &centers.centers[g]))
        .sum())
}

/// Weighted centroids per group — the centers minimising
/// [`kmeans_cost`] for a fixed assignment. Empty groups get an all-zero
/// placeholder and are listed in [`CentroidSet::empty_groups`].
pub fn optimal_centers(km: &KMeansInstance, assignment: &[usize]) -> Result<CentroidSet> {
    validate_km_assignment(km, assignment)?;
    let mut sums = vec![vec![0.0; km.d]; km.k];
    let mut weights = vec![0u64; km.k];
    for (p, &g) in km.points.iter().zip(assignment) {
        let w = p.weight as f64;
        for (s, &c) in sums[g].iter_mut().zip(&p.coords) {
            *s += w * c;
        }
        weights[g] += p.weight;
    }
    let mut empty_groups = Vec::new();
    for (g, (center, &w)) in sums.iter_mut().zip(&weights).enumerate() {
        if w == 0 {
            empty_groups.push(g);
            continue;
        }
        let wf = w as f64;
        for s in center.iter_mut() {
            *s /= wf;
        }
    }
    debug_assert!(centers_in_hull(km, assignment, &sums, &weights));
    Ok(CentroidSet {
        centers: sums,
        empty_groups,
    })
}

/// Debug check: every nonempty group's center lies within the componentwise
/// bounding box of its members.
fn centers_in_hull(
    km: &KMeansInstance,
    assignment: &[usize],
    centers: &[Vec<f64>],
    weights: &[u64],
) -> bool {
    const SLACK: f64 = 1e-9;
    let mut lo = vec![vec![f64::INFINITY; km.d]; centers.len()];
    let mut hi = vec![vec![f64::NEG_INFINITY; km.d]; centers.len()];
    for (p, &g) in km.points.iter().zip(assignment) {
        for i in 0..km.d {
            lo[g][i] = lo[g][i].min(p.coords[i]);
            hi[g][i] = hi[g][i].max(p.coords[i]);
        }
    }
    centers.iter().enumerate().all(|(g, c)| {
        weights[g] == 0
            || c.iter()
                .enumerate()
                .all(|(i, &x)| x >= lo[g][i] - SLACK && x <= hi[g][i] + SLACK)
    })
}

/// [`kmeans_cost`] under the best possible centers for `assignment`.
pub fn cost_with_optimal_centers(km: &KMeansInstance, assignment: &[usize]) -> Result<f64> {
    let centers = optimal_centers(km, assignment)?;
    kmeans_cost(km, assignment, &centers)
}

/// Both sides of the merge identity for a same-norm set of vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    /// The shared l1 norm `L`.
    pub l1_norm: u64,
    /// `weighted_gini(sum) - sum of weighted_gini(v)`: the impurity added
    /// by merging the whole set into one group.
    pub gini_gap: f64,
    /// Raw sum of squared distances of the vectors to their mean.
    pub sse: f64,
    /// `sse / L` — the value the gap must equal.
    pub scaled_sse: f64,
}

impl IdentityCheck {
    /// Absolute residual `|gini_gap - scaled_sse|`.
    pub fn residual(&self) -> f64 {
        (self.gini_gap - self.scaled_sse).abs()
    }
}

/// Verifies the merge identity on one set of same-norm vectors: the Gini
/// gap of merging them equals their mean squared spread divided by the
/// shared norm `L`.
///
/// Note the direction of the scaling — the spread is *divided* by `L`, not
/// multiplied. Expanding per coordinate `j`:
///
/// ```text
/// sum_v v_j^2 / L - (sum_v v_j)^2 / (L |X|)
///   = (1/L) * [ sum_v v_j^2 - (sum_v v_j)^2 / |X| ]
///   = (1/L) * sum_v (v_j - mean_j)^2
/// ```
///
/// and summing over coordinates gives `gap = sse / L`. The returned
/// [`IdentityCheck`] carries both sides plus the raw spread so callers can
/// inspect how badly any other scaling would miss.
pub fn gini_gap_identity(x: &[CountVector]) -> Result<IdentityCheck> {
    if x.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let d = x[0].dim();
    let l = x[0].l1();
    for (index, v) in x.iter().enumerate() {
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
        if v.l1() != l {
            return Err(Error::MixedNorms {
                index,
                expected: l,
                found: v.l1(),
            });
        }
    }
    let mut sum = CountVector::zeros(d);
    for v in x {
        sum.add_assign(v);
    }
    let per_vector: f64 = x.iter().map(weighted_gini).sum();
    let gini_gap = weighted_gini(&sum) - per_vector;

    let n = x.len() as f64;
    let mean: Vec<f64> = sum.counts().iter().map(|&c| c as f64 / n).collect();
    let sse: f64 = x
        .iter()
        .map(|v| {
            v.counts()
                .iter()
                .zip(&mean)
                .map(|(&c, &m)| {
                    let t = c as f64 - m;
                    t * t
                })
                .sum::<f64>()
        })
        .sum();
    Ok(IdentityCheck {
        l1_norm: l,
        gini_gap,
        sse,
        scaled_sse: sse / l as f64,
    })
}

/// Both objective values for one grouping: the Gini gap and the weighted
/// k-means cost it must equal.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceCheck {
    pub gini_gap: f64,
    pub kmeans: f64,
}

impl EquivalenceCheck {
    /// Absolute residual `|gini_gap - kmeans|`.
    pub fn residual(&self) -> f64 {
        (self.gini_gap - self.kmeans).abs()
    }
}

/// Scores one assignment both ways: as a Gini gap on the raw vectors and
/// as a weighted k-means cost on the normalised points (with optimal
/// centers). The two agree to rounding error for every assignment, which
/// is the fact the solvers rely on.
pub fn objective_equivalence(
    instance: &GiniInstance,
    assignment: &[usize],
) -> Result<EquivalenceCheck> {
    let gini_gap = impurity::partition_gap(instance, assignment)?;
    let km = normalize(instance);
    let kmeans = cost_with_optimal_centers(&km, assignment)?;
    Ok(EquivalenceCheck { gini_gap, kmeans })
}

/// Exhaustive comparison of the three objectives on a same-norm instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SameNormReport {
    pub n: usize,
    pub k: usize,
    /// The shared l1 norm `L`.
    pub l1_norm: u64,
    /// Number of partitions enumerated.
    pub partitions: u64,
    /// `sum_v weighted_gini(v)`.
    pub baseline: f64,
    /// Minimum total weighted Gini over all groupings.
    pub min_cost: f64,
    /// Minimum gap (`min_cost - baseline`).
    pub min_gap: f64,
    /// Minimum unit-weight k-means cost of the raw vectors.
    pub min_kmeans: f64,
    /// All RGS assignments within tolerance of `min_cost`.
    pub argmin_cost: Vec<Vec<usize>>,
    /// All RGS assignments within tolerance of `min_gap`.
    pub argmin_gap: Vec<Vec<usize>>,
    /// All RGS assignments within tolerance of `min_kmeans`.
    pub argmin_kmeans: Vec<Vec<usize>>,
    /// Whether the three argmin sets are identical.
    pub argmins_coincide: bool,
    /// Largest deviation from `cost = kmeans / L + baseline` over all
    /// enumerated groupings.
    pub max_affine_residual: f64,
}

/// Tolerance used to collect argmin sets and compare optima.
pub const ARGMIN_TOLERANCE: f64 = 1e-9;

/// Instances larger than this are refused by
/// [`check_same_norm_equivalence`] (the enumeration is exhaustive).
pub const SAME_NORM_GUARD: usize = 12;

/// Enumerates every grouping of a same-norm instance and cross-checks that
/// minimising Gini cost, Gini gap, and the raw (unit-weight) k-means cost
/// of the vectors are the same problem: the three argmin sets coincide and
/// the affine relation `cost = kmeans / L + baseline` holds throughout.
///
/// The k-means side here clusters the *raw* count vectors as points with
/// unit weight — no normalisation — which is exactly the regime where the
/// affine relation is available.
pub fn check_same_norm_equivalence(instance: &GiniInstance) -> Result<SameNormReport> {
    let n = instance.len();
    if n > SAME_NORM_GUARD {
        return Err(Error::TooLarge {
            what: "same-norm equivalence check",
            n,
            max: SAME_NORM_GUARD,
        });
    }
    let l = instance.vectors()[0].l1();
    for (index, v) in instance.vectors().iter().enumerate() {
        if v.l1() != l {
            return Err(Error::MixedNorms {
                index,
                expected: l,
                found: v.l1(),
            });
        }
    }
    let k = instance.k();
    let baseline = instance.baseline_gini();
    let raw: Vec<Vec<f64>> = instance
        .vectors()
        .iter()
        .map(|v| v.counts().iter().map(|&c| c as f64).collect())
        .collect();

    let score = |rgs: &[usize]| -> (f64, f64) {
        let cost: f64 = impurity::group_sums(instance, rgs)
            .iter()
            .map(weighted_gini)
            .sum();
        let mut centers = vec![vec![0.0; instance.dim()]; k];
        let mut sizes = vec![0u64; k];
        for (p, &g) in raw.iter().zip(rgs) {
            for (s, &x) in centers[g].iter_mut().zip(p) {
                *s += x;
            }
            sizes[g] += 1;
        }
        for (c, &s) in centers.iter_mut().zip(&sizes) {
            if s > 0 {
                let sf = s as f64;
                for x in c.iter_mut() {
                    *x /= sf;
                }
            }
        }
        let kmeans: f64 = raw
            .iter()
            .zip(rgs)
            .map(|(p, &g)| dist_sq(p, &centers[g]))
            .sum();
        (cost, kmeans)
    };

    // First pass: find the minima and the worst affine residual.
    let mut partitions = 0u64;
    let mut min_cost = f64::INFINITY;
    let mut min_kmeans = f64::INFINITY;
    let mut max_affine_residual: f64 = 0.0;
    let lf = l as f64;
    crate::enumerate::for_each_partition(n, k, &mut |rgs| {
        partitions += 1;
        let (cost, kmeans) = score(rgs);
        min_cost = min_cost.min(cost);
        min_kmeans = min_kmeans.min(kmeans);
        max_affine_residual = max_affine_residual.max((cost - (kmeans / lf + baseline)).abs());
    });

    // Second pass: collect argmin sets within tolerance.
    let mut argmin_cost = Vec::new();
    let mut argmin_gap = Vec::new();
    let mut argmin_kmeans = Vec::new();
    let min_gap = min_cost - baseline;
    crate::enumerate::for_each_partition(n, k, &mut |rgs| {
        let (cost, kmeans) = score(rgs);
        if cost <= min_cost + ARGMIN_TOLERANCE {
            argmin_cost.push(rgs.to_vec());
        }
        if (cost - baseline) <= min_gap + ARGMIN_TOLERANCE {
            argmin_gap.push(rgs.to_vec());
        }
        if kmeans <= min_kmeans + ARGMIN_TOLERANCE {
            argmin_kmeans.push(rgs.to_vec());
        }
    });
    let argmins_coincide = argmin_cost == argmin_gap && argmin_cost == argmin_kmeans;
    Ok(SameNormReport {
        n,
        k,
        l1_norm: l,
        partitions,
        baseline,
        min_cost,
        min_gap,
        min_kmeans,
        argmin_cost,
        argmin_gap,
        argmin_kmeans,
        argmins_coincide,
        max_affine_residual,
    })
}
