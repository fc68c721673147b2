//! Exhaustive references for desk-scale instances.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom_graph::{Point, UnitDiskGraph};
use crate::primal_dual::NodeWeights;
use crate::tour_cost::{shortest_tour, GatheringTree};

/// Threshold on the average MULE-to-backbone distance below which the
/// estimator is undefined.
pub const AVERAGE_DISTANCE_THRESHOLD: f64 = 1.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_nodes_mwcds: usize,
    pub max_nodes_mule: usize,
    pub time_limit: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_nodes_mwcds: 18, max_nodes_mule: 7, time_limit: None }
    }
}

struct Clock {
    start: Instant,
    limit: Option<Duration>,
    ticks: u64,
}

impl Clock {
    fn new(limit: Option<Duration>) -> Self {
        Clock { start: Instant::now(), limit, ticks: 0 }
    }

    fn tick(&mut self, what: &str) -> Result<()> {
        self.ticks += 1;
        if self.ticks.is_multiple_of(4096) {
            if let Some(limit) = self.limit {
                if self.start.elapsed() > limit {
                    return Err(Error::BudgetExceeded(format!("{what}: time limit {limit:?}")));
                }
            }
        }
        Ok(())
    }
}

fn check_size(g: &UnitDiskGraph, cap: usize, what: &str) -> Result<()> {
    if g.n() > cap {
        return Err(Error::BudgetExceeded(format!("{what}: {} nodes exceeds the cap of {cap}", g.n())));
    }
    if g.n() > 63 {
        return Err(Error::BudgetExceeded(format!("{what}: bitmask limit")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MwcdsOptimum {
    pub set: Vec<usize>,
    pub weight: f64,
}

struct Masks {
    closed: Vec<u64>,
    full: u64,
}

impl Masks {
    fn new(g: &UnitDiskGraph) -> Self {
        let closed = (0..g.n())
            .map(|v| g.neighbors(v).iter().fold(1u64 << v, |m, &u| m | (1 << u)))
            .collect();
        Masks { closed, full: (1u64 << g.n()) - 1 }
    }

    fn dominates(&self, set: u64) -> bool {
        let mut cover = 0;
        let mut s = set;
        while s != 0 {
            cover |= self.closed[s.trailing_zeros() as usize];
            s &= s - 1;
        }
        cover == self.full
    }

    fn connected(&self, set: u64) -> bool {
        if set == 0 {
            return false;
        }
        let mut seen = set & set.wrapping_neg();
        loop {
            let mut grow = seen;
            let mut s = seen;
            while s != 0 {
                grow |= self.closed[s.trailing_zeros() as usize] & set;
                s &= s - 1;
            }
            if grow == seen {
                return seen == set;
            }
            seen = grow;
        }
    }
}

/// Minimum-weight connected dominating set by enumerating subsets in
/// ascending cardinality, pruning partial sums that cannot beat the
/// incumbent.
pub fn brute_mwcds(g: &UnitDiskGraph, w: &NodeWeights, budget: &OracleBudget) -> Result<MwcdsOptimum> {
    check_size(g, budget.max_nodes_mwcds, "mwcds")?;
    if w.len() != g.n() || g.n() == 0 {
        return Err(Error::InvalidInput("weights must match a nonempty graph".into()));
    }
    let masks = Masks::new(g);
    let n = g.n();
    let mut sorted = w.as_slice().to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut clock = Clock::new(budget.time_limit);
    let mut best: Option<(u64, f64)> = None;

    struct Search<'a> {
        w: &'a [f64],
        masks: &'a Masks,
        n: usize,
    }
    impl Search<'_> {
        fn go(
            &self,
            next: usize,
            left: usize,
            set: u64,
            weight: f64,
            best: &mut Option<(u64, f64)>,
            clock: &mut Clock,
        ) -> Result<()> {
            clock.tick("mwcds")?;
            if best.is_some_and(|(_, b)| weight >= b) {
                return Ok(());
            }
            if left == 0 {
                if self.masks.dominates(set) && self.masks.connected(set) {
                    *best = Some((set, weight));
                }
                return Ok(());
            }
            for v in next..=self.n - left {
                self.go(v + 1, left - 1, set | (1 << v), weight + self.w[v], best, clock)?;
            }
            Ok(())
        }
    }

    let search = Search { w: w.as_slice(), masks: &masks, n };
    for k in 1..=n {
        let floor: f64 = sorted[..k].iter().sum();
        if best.is_some_and(|(_, b)| floor >= b) {
            break;
        }
        search.go(0, k, 0, 0.0, &mut best, &mut clock)?;
    }
    let (set, weight) = best.ok_or(Error::Disconnected)?;
    Ok(MwcdsOptimum { set: (0..n).filter(|&v| set & (1 << v) != 0).collect(), weight })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuleOptimum {
    pub tree: GatheringTree,
    pub mule: usize,
    pub cost: f64,
    pub trees_examined: u64,
}

/// Exact optimum of the gathering-tree objective: every spanning tree, every
/// root and every MULE node.
pub fn brute_mule(g: &UnitDiskGraph, budget: &OracleBudget) -> Result<MuleOptimum> {
    check_size(g, budget.max_nodes_mule, "mule")?;
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidInput("at least two nodes are required".into()));
    }
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| g.neighbors(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v))).collect();
    if edges.len() < n - 1 {
        return Err(Error::Disconnected);
    }

    // tour[m][mask]: shortest tour from m through the nodes of mask.
    let tours: Vec<Vec<f64>> = (0..n)
        .map(|m| {
            (0..1usize << n)
                .map(|mask| {
                    let pts: Vec<Point> = (0..n).filter(|&u| mask & (1 << u) != 0).map(|u| g.point(u)).collect();
                    shortest_tour(g.point(m), &pts).length
                })
                .collect()
        })
        .collect();

    let mut clock = Clock::new(budget.time_limit);
    let mut best: Option<(Vec<Option<usize>>, usize, usize, f64)> = None;
    let mut trees = 0u64;
    let mut pick: Vec<usize> = (0..n - 1).collect();
    let mut adj = vec![Vec::new(); n];
    let mut parent = vec![None; n];
    let mut child_mask = vec![0usize; n];
    let mut stack = Vec::with_capacity(n);
    loop {
        clock.tick("mule")?;
        if is_spanning_tree(n, pick.iter().map(|&i| edges[i])) {
            trees += 1;
            for a in adj.iter_mut() {
                a.clear();
            }
            for &i in &pick {
                let (u, v) = edges[i];
                adj[u].push(v);
                adj[v].push(u);
            }
            for root in 0..n {
                parent.iter_mut().for_each(|p| *p = None);
                child_mask.iter_mut().for_each(|c| *c = 0);
                stack.clear();
                stack.push(root);
                let mut seen = 1usize << root;
                while let Some(u) = stack.pop() {
                    for &v in &adj[u] {
                        if seen & (1 << v) == 0 {
                            seen |= 1 << v;
                            parent[v] = Some(u);
                            child_mask[u] |= 1 << v;
                            stack.push(v);
                        }
                    }
                }
                for (m, tour) in tours.iter().enumerate() {
                    let cost: f64 = child_mask.iter().map(|&c| tour[c]).sum();
                    if best.as_ref().is_none_or(|b| cost < b.3) {
                        best = Some((parent.clone(), root, m, cost));
                    }
                }
            }
        }
        if !next_combination(&mut pick, edges.len()) {
            break;
        }
    }
    let (parent, root, mule, cost) = best.ok_or(Error::Disconnected)?;
    Ok(MuleOptimum { tree: GatheringTree::new(parent, root), mule, cost, trees_examined: trees })
}

fn is_spanning_tree(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for (u, v) in edges {
        let (a, b) = (find(&mut uf, u), find(&mut uf, v));
        if a == b {
            return false;
        }
        uf[a] = b;
    }
    true
}

/// Advances `pick` to the next `k`-combination of `0..n` in lexicographic
/// order; false after the last one.
fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let Some(i) = (0..k).rev().find(|&i| pick[i] < n - k + i) else {
        return false;
    };
    pick[i] += 1;
    for j in i + 1..k {
        pick[j] = pick[j - 1] + 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonEstimate {
    /// Average distance from the MULE to the given nodes.
    pub average_distance: f64,
    /// `None` when the average does not exceed the threshold.
    pub epsilon: Option<f64>,
}

/// `ε = ((2/(C + 2.6))·(avg − 1.3))⁻¹` for `avg > 1.3`.
pub fn epsilon_from_average(avg: f64, c: f64) -> Option<f64> {
    (avg > AVERAGE_DISTANCE_THRESHOLD).then(|| 1.0 / (2.0 / (c + 2.6) * (avg - AVERAGE_DISTANCE_THRESHOLD)))
}

pub fn epsilon_estimate(nodes: &[usize], m: usize, g: &UnitDiskGraph, c: f64) -> EpsilonEstimate {
    let avg = if nodes.is_empty() {
        f64::NAN
    } else {
        nodes.iter().map(|&v| g.dist(m, v)).sum::<f64>() / nodes.len() as f64
    };
    EpsilonEstimate { average_distance: avg, epsilon: epsilon_from_average(avg, c) }
}

/// Largest target count accepted by [`permutation_tour_oracle`].
pub const PERMUTATION_ORACLE_MAX: usize = 8;

/// Minimum closed-tour length over every visiting order.
pub fn permutation_tour_oracle(start: Point, targets: &[Point]) -> Result<f64> {
    if targets.len() > PERMUTATION_ORACLE_MAX {
        return Err(Error::BudgetExceeded(format!("{} targets exceeds {PERMUTATION_ORACLE_MAX}", targets.len())));
    }
    fn go(at: Point, start: Point, rest: &mut Vec<Point>, acc: f64, best: &mut f64) {
        if rest.is_empty() {
            *best = best.min(acc + at.dist(&start));
            return;
        }
        for i in 0..rest.len() {
            let p = rest.swap_remove(i);
            go(p, start, rest, acc + at.dist(&p), best);
            rest.push(p);
            let last = rest.len() - 1;
            rest.swap(i, last);
        }
    }
    if targets.is_empty() {
        return Ok(0.0);
    }
    let mut best = f64::INFINITY;
    go(start, start, &mut targets.to_vec(), 0.0, &mut best);
    Ok(best)
}
