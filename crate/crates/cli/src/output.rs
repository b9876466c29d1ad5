//! Serialisable shapes of everything the CLI prints.
//!
//! All outputs are JSON on stdout with a fixed field order, so a command
//! re-run with the same inputs produces byte-identical text. Non-finite
//! ratios serialise as `null` (JSON has no infinity).

use serde::Serialize;

use crate::document::InstanceDocument;

/// Output of `solve`.
#[derive(Debug, Serialize)]
pub struct SolveOutput {
    /// The instance that was solved, echoed for round-tripping.
    pub instance: InstanceDocument,
    pub solver: String,
    pub seed: u64,
    /// Group label per value, canonical restricted-growth form.
    pub assignment: Vec<usize>,
    /// Total weighted Gini impurity of the grouping.
    pub objective1: f64,
    /// Impurity above the per-value baseline.
    pub objective2: f64,
    /// Wall-clock time, floored to whole milliseconds.
    pub wall_time_ms: u64,
}

/// One value's impurity figures in `impurity` output.
#[derive(Debug, Serialize)]
pub struct ImpurityRow {
    pub value: String,
    pub counts: Vec<u64>,
    pub gini: f64,
    pub entropy: f64,
    pub entropy_bits: f64,
    pub weighted_gini: f64,
}

/// Output of `impurity`.
#[derive(Debug, Serialize)]
pub struct ImpurityOutput {
    pub classes: Vec<String>,
    pub per_value: Vec<ImpurityRow>,
    pub total: ImpurityRow,
}

/// One weighted point in `reduce` output.
#[derive(Debug, Serialize)]
pub struct ReducedPoint {
    pub coords: Vec<f64>,
    pub weight: u64,
    /// Index of the (first) source vector this point came from.
    pub origin: usize,
}

/// Output of `reduce`: the weighted k-means form of the instance.
#[derive(Debug, Serialize)]
pub struct ReducedDocument {
    pub d: usize,
    pub k: usize,
    pub points: Vec<ReducedPoint>,
    pub total_weight: u64,
}

/// Output of `verify-identity`. Both candidate scalings of the squared
/// error are printed so they can be told apart at a glance: dividing by
/// the norm matches the impurity gap, multiplying does not (except at
/// norm 1, where the two coincide).
#[derive(Debug, Serialize)]
pub struct IdentityOutput {
    pub n: usize,
    pub d: usize,
    /// The shared l1 norm.
    pub l1_norm: u64,
    /// Impurity added by merging all vectors into one group.
    pub gini_gap: f64,
    /// Sum of squared distances of the raw vectors to their mean.
    pub sse: f64,
    /// `sse / l1_norm`; matches `gini_gap`.
    pub sse_over_norm: f64,
    /// `sse * l1_norm`; the rival scaling, shown for comparison.
    pub sse_times_norm: f64,
    /// `|gini_gap - sse_over_norm|`.
    pub residual: f64,
    /// `|gini_gap - sse_times_norm|`.
    pub product_residual: f64,
    /// Whether `residual` is at most 1e-9.
    pub holds: bool,
    /// Whether `product_residual` is at most 1e-9.
    pub product_holds: bool,
}

/// Output of `hardness check`; vertices are 1-indexed to match the
/// edge-list file format.
#[derive(Debug, Serialize)]
pub struct CoverBoundOutput {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub cover_size: usize,
    pub cover: Vec<usize>,
    pub kmeans_opt: f64,
    pub bound: f64,
    pub bound_holds: bool,
    pub gini_opt: f64,
    pub identity_residual: f64,
    pub identity_holds: bool,
}

/// Per-solver figures in one `bench` row.
#[derive(Debug, Serialize)]
pub struct BenchSolverRow {
    pub solver: String,
    pub objective1: f64,
    pub objective2: f64,
    /// `objective1 / oracle objective1` (null if unbounded).
    pub ratio1: Option<f64>,
    /// `objective2 / oracle objective2` (null if unbounded).
    pub ratio2: Option<f64>,
}

/// One benchmark instance in `bench` output.
#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub id: usize,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub oracle_objective1: f64,
    pub oracle_objective2: f64,
    pub solvers: Vec<BenchSolverRow>,
}

/// Aggregate per-solver quality in `bench` output.
#[derive(Debug, Serialize)]
pub struct BenchSummary {
    pub solver: String,
    pub instances: usize,
    /// Instances solved exactly (gap ratio 1 within tolerance).
    pub exact: usize,
    /// Instances with gap ratio at most 1.1.
    pub within_ten_percent: usize,
    /// Worst finite gap ratio (null when no ratio was finite).
    pub worst_ratio2: Option<f64>,
    /// Instances whose gap ratio was unbounded (optimum gap is zero, the
    /// solver's is not).
    pub unbounded: usize,
}

/// Output of `bench`.
#[derive(Debug, Serialize)]
pub struct BenchOutput {
    pub seed: u64,
    pub count: usize,
    pub epsilon: f64,
    pub restarts: usize,
    pub rounds: usize,
    pub rows: Vec<BenchRow>,
    pub summary: Vec<BenchSummary>,
}

/// Wraps a ratio for JSON: finite stays, infinite becomes `None`/null.
pub fn finite_or_null(ratio: f64) -> Option<f64> {
    ratio.is_finite().then_some(ratio)
}
