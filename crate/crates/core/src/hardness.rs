//! Worst-case instances built from triangle-free graphs.
//!
//! Every edge of a graph becomes a 0/1 count vector over the vertices (a 1
//! at each endpoint), giving an instance where all vectors share l1 norm 2.
//! On triangle-free graphs these instances tie the grouping problem to
//! vertex cover: grouping the edges around a common vertex (a "star") is
//! the only way to make a group cheap, and a grouping into `k` stars
//! exists exactly when `k` vertices cover all edges. Quantitatively, with
//! `k` set to the minimum vertex cover size,
//!
//! * the optimal (unit-weight) k-means cost of the incidence vectors is at
//!   most `|E| - k` — a star of `m` edges costs exactly `m - 1`;
//! * the optimal total weighted Gini equals `|E| + kmeans_opt / 2`.
//!
//! [`check_cover_bound`] verifies both facts on small graphs by computing
//! each optimum independently — the k-means side by exhaustive search over
//! edge groupings with a sum-of-squares objective, the Gini side by
//! exhaustive search with the impurity objective. The module also ships a
//! seeded triangle-free graph generator and an exhaustive enumerator of
//! small connected triangle-free graphs up to isomorphism, which together
//! form the test corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enumerate::{search_min, IncrementalObjective};
use crate::error::{Error, Result};
use crate::impurity::{CountVector, GiniInstance};
use crate::solvers::brute::GiniObjective;

/// Largest vertex count accepted by the exact vertex cover search.
pub const VERTEX_COVER_GUARD: usize = 20;

/// Largest edge count accepted by the exhaustive optimum searches in
/// [`check_cover_bound`].
pub const EDGE_ENUMERATION_GUARD: usize = 16;

/// Largest vertex count accepted by
/// [`enumerate_connected_triangle_free`].
pub const ENUMERATION_MAX_VERTICES: usize = 6;

/// A simple undirected graph. Edges are stored as `(u, v)` with `u < v`,
/// in insertion order, without duplicates or self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Validates and builds a graph. Endpoints are normalised to `u < v`;
    /// self-loops, duplicate edges, and out-of-range endpoints are
    /// rejected.
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::InvalidGraph(
                "graph must have at least one vertex".into(),
            ));
        }
        let mut normalised = Vec::with_capacity(edges.len());
        let mut seen = std::collections::HashSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{num_vertices}"
                )));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.0, e.1
                )));
            }
            normalised.push(e);
        }
        Ok(Self {
            num_vertices,
            edges: normalised,
        })
    }

    /// Path on `n` vertices (`n - 1` edges).
    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    /// Cycle on `n` vertices. `cycle(3)` is a triangle and will be
    /// rejected by the hardness constructors downstream.
    pub fn cycle(n: usize) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 2 {
            edges.push((n - 1, 0));
        }
        Self::new(n, edges)
    }

    /// Star with one hub (vertex 0) and `leaves` leaves.
    pub fn star(leaves: usize) -> Result<Self> {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)).collect())
    }

    /// Complete bipartite graph on parts of size `a` and `b` (vertices
    /// `0..a` and `a..a+b`). Always triangle-free.
    pub fn complete_bipartite(a: usize, b: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(a * b);
        for u in 0..a {
            for v in 0..b {
                edges.push((u, a + v));
            }
        }
        Self::new(a + b, edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in insertion order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn adjacency_bits(&self) -> Vec<Vec<u64>> {
        let words = self.num_vertices.div_ceil(64);
        let mut adj = vec![vec![0u64; words]; self.num_vertices];
        for &(u, v) in &self.edges {
            adj[u][v / 64] |= 1 << (v % 64);
            adj[v][u / 64] |= 1 << (u % 64);
        }
        adj
    }

    /// First triangle in edge-scan order, as an ascending vertex triple.
    pub fn find_triangle(&self) -> Option<(usize, usize, usize)> {
        let adj = self.adjacency_bits();
        for &(u, v) in &self.edges {
            for (word, (a, b)) in adj[u].iter().zip(&adj[v]).enumerate() {
                let common = a & b;
                if common != 0 {
                    let w = word * 64 + common.trailing_zeros() as usize;
                    let mut t = [u, v, w];
                    t.sort_unstable();
                    return Some((t[0], t[1], t[2]));
                }
            }
        }
        None
    }

    pub fn is_triangle_free(&self) -> bool {
        self.find_triangle().is_none()
    }

    /// True when every pair of vertices is joined by some edge path.
    pub fn is_connected(&self) -> bool {
        if self.num_vertices <= 1 {
            return true;
        }
        let adj = self.adjacency_bits();
        let mut seen = vec![false; self.num_vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for (word_index, &word) in adj[u].iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let v = word_index * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Serialises to the plain edge-list text format:
    /// a header `p <vertices> <edges>` followed by one `e <u> <v>` line
    /// per edge, vertices numbered from 1.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("p {} {}\n", self.num_vertices, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }

    /// Parses the edge-list text format produced by [`Graph::to_edge_list`].
    /// Blank lines and lines starting with `c` are ignored.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut num_vertices = None;
        let mut expected_edges = 0usize;
        let mut edges = Vec::new();
        for (line_number, raw) in text.lines().enumerate() {
            let line_number = line_number + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["p", v, e] => {
                    if num_vertices.is_some() {
                        return Err(Error::EdgeList(format!(
                            "line {line_number}: duplicate header"
                        )));
                    }
                    let v: usize = v.parse().map_err(|_| {
                        Error::EdgeList(format!("line {line_number}: bad vertex count '{v}'"))
                    })?;
                    expected_edges = e.parse().map_err(|_| {
                        Error::EdgeList(format!("line {line_number}: bad edge count '{e}'"))
                    })?;
                    num_vertices = Some(v);
                }
                ["e", u, v] => {
                    let n = num_vertices.ok_or_else(|| {
                        Error::EdgeList(format!(
                            "line {line_number}: edge before 'p' header"
                        ))
                    })?;
                    let parse = |s: &str| -> Result<usize> {
                        let x: usize = s.parse().map_err(|_| {
                            Error::EdgeList(format!("line {line_number}: bad vertex '{s}'"))
                        })?;
                        if x == 0 || x > n {
                            return Err(Error::EdgeList(format!(
                                "line {line_number}: vertex {x} outside 1..={n}"
                            )));
                        }
                        Ok(x - 1)
                    };
                    edges.push((parse(u)?, parse(v)?));
                }
                _ => {
                    return Err(Error::EdgeList(format!(
                        "line {line_number}: expected 'p <v> <e>' or 'e <u> <v>', got '{line}'"
                    )));
                }
            }
        }
        let num_vertices = num_vertices
            .ok_or_else(|| Error::EdgeList("missing 'p <vertices> <edges>' header".into()))?;
        if edges.len() != expected_edges {
            return Err(Error::EdgeList(format!(
                "header declares {expected_edges} edges but {} were listed",
                edges.len()
            )));
        }
        Graph::new(num_vertices, edges)
    }
}

/// A grouping instance derived from a triangle-free graph: one count
/// vector per edge (the 0/1 incidence vector over vertices).
#[derive(Debug, Clone, PartialEq)]
pub struct HardnessInstance {
    pub graph: Graph,
    pub instance: GiniInstance,
}

impl HardnessInstance {
    /// The group budget the instance was built with.
    pub fn k(&self) -> usize {
        self.instance.k()
    }
}

/// Builds the edge-incidence instance for a triangle-free graph with at
/// least one edge. Vector order matches edge order; `k` must satisfy
/// `1 <= k <= |E|`.
pub fn build_hardness_instance(graph: &Graph, k: usize) -> Result<HardnessInstance> {
    if graph.num_edges() == 0 {
        return Err(Error::NoEdges);
    }
    if let Some((a, b, c)) = graph.find_triangle() {
        return Err(Error::TriangleFound { a, b, c });
    }
    let d = graph.num_vertices();
    let vectors: Vec<CountVector> = graph
        .edges()
        .iter()
        .map(|&(u, v)| {
            let mut counts = vec![0u64; d];
            counts[u] = 1;
            counts[v] = 1;
            CountVector::new(counts).expect("incidence vectors are nonzero")
        })
        .collect();
    let instance = GiniInstance::new(vectors, k)?;
    Ok(HardnessInstance {
        graph: graph.clone(),
        instance,
    })
}

/// Exact minimum vertex cover by branch and bound, deterministic.
///
/// Branches on the first uncovered edge (either endpoint joins the
/// cover), pruning with a greedy-matching lower bound. Returns the cover
/// size and the lexicographically produced optimal cover. Guarded by
/// [`VERTEX_COVER_GUARD`].
pub fn min_vertex_cover(graph: &Graph) -> Result<(usize, Vec<usize>)> {
    let n = graph.num_vertices();
    if n > VERTEX_COVER_GUARD {
        return Err(Error::TooLarge {
            what: "vertex cover search",
            n,
            max: VERTEX_COVER_GUARD,
        });
    }
    if graph.num_edges() == 0 {
        return Ok((0, Vec::new()));
    }

    struct Search<'a> {
        edges: &'a [(usize, usize)],
        best_size: usize,
        best_mask: u32,
    }

    impl Search<'_> {
        fn first_uncovered(&self, cover: u32) -> Option<(usize, usize)> {
            self.edges
                .iter()
                .find(|&&(u, v)| cover & (1 << u) == 0 && cover & (1 << v) == 0)
                .copied()
        }

        /// Size of a greedy maximal matching among uncovered edges — a
        /// lower bound on how many more vertices the cover needs.
        fn matching_bound(&self, cover: u32) -> usize {
            let mut used = cover;
            let mut matched = 0;
            for &(u, v) in self.edges {
                if used & (1 << u) == 0 && used & (1 << v) == 0 {
                    used |= (1 << u) | (1 << v);
                    matched += 1;
                }
            }
            matched
        }

        fn run(&mut self, cover: u32, size: usize) {
            if size + self.matching_bound(cover) >= self.best_size {
                return;
            }
            match self.first_uncovered(cover) {
                None => {
                    // Strict improvement is guaranteed by the prune above.
                    self.best_size = size;
                    self.best_mask = cover;
                }
                Some((u, v)) => {
                    self.run(cover | (1 << u), size + 1);
                    self.run(cover | (1 << v), size + 1);
                }
            }
        }
    }

    let mut search = Search {
        edges: graph.edges(),
        best_size: n,
        best_mask: (1u32 << n) - 1,
    };
    // The all-vertices mask is only a valid incumbent because any graph is
    // covered by it; the search can only improve or match it.
    search.run(0, 0);
    let cover: Vec<usize> = (0..n).filter(|&v| search.best_mask & (1 << v) != 0).collect();
    Ok((search.best_size, cover))
}

/// Unit-weight sum-of-squares objective over groups of points, maintained
/// incrementally: each group's cost is `sum ||x||^2 - ||sum x||^2 / size`.
struct SseObjective<'a> {
    points: &'a [Vec<f64>],
    sums: Vec<Vec<f64>>,
    sizes: Vec<usize>,
    sq: Vec<f64>,
    group_cost: Vec<f64>,
    total: f64,
}

impl<'a> SseObjective<'a> {
    fn new(points: &'a [Vec<f64>], k: usize) -> Self {
        let d = points[0].len();
        Self {
            points,
            sums: vec![vec![0.0; d]; k],
            sizes: vec![0; k],
            sq: vec![0.0; k],
            group_cost: vec![0.0; k],
            total: 0.0,
        }
    }

    fn refresh_group(&mut self, group: usize) {
        let cost = if self.sizes[group] == 0 {
            0.0
        } else {
            let norm_sq: f64 = self.sums[group].iter().map(|s| s * s).sum();
            self.sq[group] - norm_sq / self.sizes[group] as f64
        };
        self.total += cost - self.group_cost[group];
        self.group_cost[group] = cost;
    }
}

impl IncrementalObjective for SseObjective<'_> {
    fn push(&mut self, item: usize, group: usize) {
        let p = &self.points[item];
        for (s, &x) in self.sums[group].iter_mut().zip(p) {
            *s += x;
        }
        self.sizes[group] += 1;
        self.sq[group] += p.iter().map(|x| x * x).sum::<f64>();
        self.refresh_group(group);
    }

    fn pop(&mut self, item: usize, group: usize) {
        let p = &self.points[item];
        for (s, &x) in self.sums[group].iter_mut().zip(p) {
            *s -= x;
        }
        self.sizes[group] -= 1;
        self.sq[group] -= p.iter().map(|x| x * x).sum::<f64>();
        self.refresh_group(group);
    }

    fn cost(&self) -> f64 {
        self.total
    }
}

/// Everything [`check_cover_bound`] measured on one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverBoundReport {
    pub num_vertices: usize,
    pub num_edges: usize,
    /// Minimum vertex cover size — the `k` the instance is built with.
    pub cover_size: usize,
    /// One minimum cover (0-indexed vertices, ascending).
    pub cover: Vec<usize>,
    /// Exact optimal unit-weight k-means cost of the incidence vectors.
    pub kmeans_opt: f64,
    /// The cover bound `|E| - k`.
    pub bound: f64,
    /// `kmeans_opt <= bound` within tolerance.
    pub bound_holds: bool,
    /// Exact optimal total weighted Gini of the derived instance.
    pub gini_opt: f64,
    /// `|gini_opt - (|E| + kmeans_opt / 2)|`.
    pub identity_residual: f64,
    /// Residual within tolerance.
    pub identity_holds: bool,
}

const REPORT_TOLERANCE: f64 = 1e-9;

/// Computes the minimum vertex cover of a triangle-free graph, builds the
/// edge-incidence instance with `k = cover size`, finds both exact optima
/// independently, and checks the cover bound and the Gini/k-means
/// identity. See the module docs for the statements being verified.
pub fn check_cover_bound(graph: &Graph) -> Result<CoverBoundReport> {
    let m = graph.num_edges();
    if m > EDGE_ENUMERATION_GUARD {
        return Err(Error::TooLarge {
            what: "exhaustive cover-bound check",
            n: m,
            max: EDGE_ENUMERATION_GUARD,
        });
    }
    let (cover_size, cover) = min_vertex_cover(graph)?;
    let hardness = build_hardness_instance(graph, cover_size)?;

    // Route 1: exact k-means over the raw incidence vectors.
    let points: Vec<Vec<f64>> = hardness
        .instance
        .vectors()
        .iter()
        .map(|v| v.counts().iter().map(|&c| c as f64).collect())
        .collect();
    let mut sse = SseObjective::new(&points, cover_size);
    let sse_outcome = search_min(m, cover_size, &mut sse);
    // Rescore the winning grouping from scratch (no incremental drift).
    let kmeans_opt = unit_sse(&points, &sse_outcome.assignment, cover_size);

    // Route 2: exact Gini over the derived instance.
    let mut gini = GiniObjective::new(&hardness.instance);
    let gini_outcome = search_min(m, cover_size, &mut gini);
    let gini_opt =
        crate::impurity::partition_cost(&hardness.instance, &gini_outcome.assignment)?;

    let bound = (m - cover_size) as f64;
    let identity_residual = (gini_opt - (m as f64 + kmeans_opt / 2.0)).abs();
    Ok(CoverBoundReport {
        num_vertices: graph.num_vertices(),
        num_edges: m,
        cover_size,
        cover,
        kmeans_opt,
        bound,
        bound_holds: kmeans_opt <= bound + REPORT_TOLERANCE,
        gini_opt,
        identity_residual,
        identity_holds: identity_residual <= REPORT_TOLERANCE,
    })
}

/// Unit-weight SSE of a grouping, computed directly from centroids.
fn unit_sse(points: &[Vec<f64>], assignment: &[usize], k: usize) -> f64 {
    let d = points[0].len();
    let mut sums = vec![vec![0.0; d]; k];
    let mut sizes = vec![0usize; k];
    for (p, &g) in points.iter().zip(assignment) {
        for (s, &x) in sums[g].iter_mut().zip(p) {
            *s += x;
        }
        sizes[g] += 1;
    }
    let centers: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&sizes)
        .map(|(sum, &size)| {
            if size == 0 {
                sum
            } else {
                sum.into_iter().map(|s| s / size as f64).collect()
            }
        })
        .collect();
    points
        .iter()
        .zip(assignment)
        .map(|(p, &g)| crate::reduction::dist_sq(p, &centers[g]))
        .sum()
}

/// Seeded random triangle-free graph: sample each possible edge with the
/// given probability, then delete one random edge of each remaining
/// triangle (in deterministic scan order) until none are left.
pub fn generate_triangle_free(
    seed: u64,
    num_vertices: usize,
    edge_probability: f64,
) -> Result<Graph> {
    if num_vertices == 0 {
        return Err(Error::InvalidGraph(
            "graph must have at least one vertex".into(),
        ));
    }
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(Error::InvalidGraph(format!(
            "edge probability must lie in [0, 1], got {edge_probability}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..num_vertices {
        for v in (u + 1)..num_vertices {
            if rng.random_bool(edge_probability) {
                edges.push((u, v));
            }
        }
    }
    let mut graph = Graph::new(num_vertices, edges)?;
    while let Some((a, b, c)) = graph.find_triangle() {
        let sides = [(a, b), (a, c), (b, c)];
        let doomed = sides[rng.random_range(0..3)];
        let mut edges = graph.edges().to_vec();
        edges.retain(|&e| e != doomed);
        graph = Graph::new(graph.num_vertices(), edges)?;
    }
    debug_assert!(graph.is_triangle_free());
    Ok(graph)
}

/// All connected triangle-free graphs with 2 to `max_vertices` vertices,
/// one representative per isomorphism class, in deterministic order
/// (vertex count, then bitmask of the representative).
///
/// Exhaustive over labelled graphs with canonical-form deduplication, so
/// it is limited to [`ENUMERATION_MAX_VERTICES`] vertices.
pub fn enumerate_connected_triangle_free(max_vertices: usize) -> Result<Vec<Graph>> {
    if max_vertices > ENUMERATION_MAX_VERTICES {
        return Err(Error::TooLarge {
            what: "triangle-free enumeration",
            n: max_vertices,
            max: ENUMERATION_MAX_VERTICES,
        });
    }
    let mut result = Vec::new();
    for n in 2..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        let mut slot = vec![vec![0usize; n]; n];
        for (s, &(u, v)) in pairs.iter().enumerate() {
            slot[u][v] = s;
            slot[v][u] = s;
        }
        let perms = permutations(n);
        for mask in 0u64..(1u64 << pairs.len()) {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|&(s, _)| mask & (1 << s) != 0)
                .map(|(_, &e)| e)
                .collect();
            let graph = Graph::new(n, edges).expect("enumerated edges are valid");
            if !graph.is_connected() || !graph.is_triangle_free() {
                continue;
            }
            // Keep only the representative: the smallest mask over all
            // relabellings.
            let canonical = perms
                .iter()
                .map(|p| {
                    let mut relabelled = 0u64;
                    for &(u, v) in graph.edges() {
                        relabelled |= 1 << slot[p[u]][p[v]];
                    }
                    relabelled
                })
                .min()
                .expect("at least the identity permutation");
            if canonical == mask {
                result.push(graph);
            }
        }
    }
    Ok(result)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut all);
    all
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}
