//! Enumeration of set partitions in restricted-growth order, plus a pruned
//! minimum search over them for objectives that grow monotonically as items
//! are added to groups.
//!
//! A restricted-growth string (RGS) is the canonical labelling of a set
//! partition: item 0 gets label 0, and every later item's label is at most
//! one larger than the maximum label used so far. Enumerating RGSs visits
//! every partition into at most `max_groups` nonempty-prefix groups exactly
//! once, in lexicographic order.

/// Calls `visit` once per partition of `n` items into at most `max_groups`
/// groups, passing the canonical RGS. Visits in lexicographic RGS order.
pub(crate) fn for_each_partition(n: usize, max_groups: usize, visit: &mut impl FnMut(&[usize])) {
    assert!(n >= 1 && max_groups >= 1);
    let mut rgs = Vec::with_capacity(n);
    descend(n, max_groups, 0, &mut rgs, visit);
}

fn descend(
    n: usize,
    max_groups: usize,
    used: usize,
    rgs: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if rgs.len() == n {
        visit(rgs);
        return;
    }
    let top = used.min(max_groups - 1);
    for label in 0..=top {
        rgs.push(label);
        descend(n, max_groups, used.max(label + 1), rgs, visit);
        rgs.pop();
    }
}

/// Total cost of a partial assignment, maintained incrementally while the
/// search walks the RGS tree.
///
/// Contract: `push`/`pop` must be exact inverses, and `cost` must never
/// decrease as items are pushed (monotonicity is what makes pruning on a
/// partial cost sound).
pub(crate) trait IncrementalObjective {
    fn push(&mut self, item: usize, group: usize);
    fn pop(&mut self, item: usize, group: usize);
    fn cost(&self) -> f64;
}

/// Outcome of a pruned exhaustive search.
pub(crate) struct SearchOutcome {
    /// Cost reported by the incremental objective at the best leaf. Callers
    /// should rescore the assignment from scratch if they need a value free
    /// of incremental rounding drift.
    pub cost: f64,
    /// Lexicographically smallest RGS among assignments attaining the
    /// minimum (up to incremental rounding).
    pub assignment: Vec<usize>,
    /// Number of partial assignments expanded, including pruned ones.
    pub nodes: u64,
}

/// Finds a partition minimising `objective` over all partitions of `n`
/// items into at most `max_groups` groups.
///
/// Branches whose partial cost already exceeds the incumbent are cut; the
/// margin of `1e-12` keeps exact ties alive so that the first — i.e.
/// lexicographically smallest — optimal RGS is the one returned.
pub(crate) fn search_min<O: IncrementalObjective>(
    n: usize,
    max_groups: usize,
    objective: &mut O,
) -> SearchOutcome {
    assert!(n >= 1 && max_groups >= 1);
    let mut outcome = SearchOutcome {
        cost: f64::INFINITY,
        assignment: Vec::new(),
        nodes: 0,
    };
    let mut rgs = Vec::with_capacity(n);
    search(n, max_groups, 0, objective, &mut rgs, &mut outcome);
    outcome
}

const PRUNE_MARGIN: f64 = 1e-12;

fn search<O: IncrementalObjective>(
    n: usize,
    max_groups: usize,
    used: usize,
    objective: &mut O,
    rgs: &mut Vec<usize>,
    outcome: &mut SearchOutcome,
) {
    if rgs.len() == n {
        let cost = objective.cost();
        if cost < outcome.cost {
            outcome.cost = cost;
            outcome.assignment = rgs.clone();
        }
        return;
    }
    let item = rgs.len();
    let top = used.min(max_groups - 1);
    for label in 0..=top {
        objective.push(item, label);
        outcome.nodes += 1;
        if objective.cost() <= outcome.cost + PRUNE_MARGIN {
            rgs.push(label);
            search(n, max_groups, used.max(label + 1), objective, rgs, outcome);
            rgs.pop();
        }
        objective.pop(item, label);
    }
}
