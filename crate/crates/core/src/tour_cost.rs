//! The gathering-tree objective: when node `v` fails, the MULE leaves `m`,
//! visits every child of `v` and returns. Tours visit the children's exact
//! positions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom_graph::{Point, UnitDiskGraph};

/// Largest target count solved exactly by the bitmask DP.
pub const EXACT_THRESHOLD: usize = 12;

/// Rooted spanning tree stored as a parent array; edges point to the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatheringTree {
    pub parent: Vec<Option<usize>>,
    pub root: usize,
}

impl GatheringTree {
    pub fn new(parent: Vec<Option<usize>>, root: usize) -> Self {
        GatheringTree { parent, root }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    /// Children lists, ascending.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.n()];
        for (u, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(u);
            }
        }
        ch
    }

    /// Nodes with at least one child.
    pub fn backbone(&self) -> Vec<usize> {
        let mut has_child = vec![false; self.n()];
        for p in self.parent.iter().flatten() {
            has_child[*p] = true;
        }
        (0..self.n()).filter(|&v| has_child[v]).collect()
    }

    /// Checks that the tree spans `g`: one outgoing edge per non-root node,
    /// none at the root, every node reaches the root, and every edge joins
    /// unit-disk neighbors.
    pub fn validate(&self, g: &UnitDiskGraph) -> Result<()> {
        let n = self.n();
        if n != g.n() {
            return Err(Error::InvalidInput(format!("tree has {n} nodes, graph has {}", g.n())));
        }
        if self.root >= n {
            return Err(Error::InvalidInput(format!("root {} out of range", self.root)));
        }
        if self.parent[self.root].is_some() {
            return Err(Error::InvalidInput("root has a parent".into()));
        }
        for (u, p) in self.parent.iter().enumerate() {
            match p {
                None if u != self.root => {
                    return Err(Error::InvalidInput(format!("node {u} has no parent")));
                }
                Some(p) if *p >= n || !g.is_adjacent(u, *p) => {
                    return Err(Error::InvalidInput(format!("edge {u}->{p} is not a graph edge")));
                }
                _ => {}
            }
        }
        // 0 unknown, 1 on the current walk, 2 reaches the root.
        let mut state = vec![0u8; n];
        state[self.root] = 2;
        let mut walk = Vec::new();
        for start in 0..n {
            let mut u = start;
            while state[u] == 0 {
                state[u] = 1;
                walk.push(u);
                u = self.parent[u].expect("non-root nodes have parents");
            }
            if state[u] == 1 {
                return Err(Error::InvalidInput(format!("cycle through node {u}")));
            }
            for v in walk.drain(..) {
                state[v] = 2;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourResult {
    pub length: f64,
    /// Target indices in visit order.
    pub order: Vec<usize>,
    /// False when the tour came from the heuristic.
    pub exact: bool,
}

/// Length of the closed tour `start → targets[order] → start`.
pub fn tour_length(start: Point, targets: &[Point], order: &[usize]) -> f64 {
    let mut len = 0.0;
    let mut at = start;
    for &i in order {
        len += at.dist(&targets[i]);
        at = targets[i];
    }
    len + at.dist(&start)
}

pub fn shortest_tour(start: Point, targets: &[Point]) -> TourResult {
    shortest_tour_with(start, targets, EXACT_THRESHOLD)
}

/// Exact DP up to `exact_threshold` targets, nearest neighbor plus 2-opt
/// beyond.
pub fn shortest_tour_with(start: Point, targets: &[Point], exact_threshold: usize) -> TourResult {
    match targets.len() {
        0 => TourResult { length: 0.0, order: Vec::new(), exact: true },
        1 => TourResult { length: 2.0 * start.dist(&targets[0]), order: vec![0], exact: true },
        k if k <= exact_threshold => held_karp(start, targets),
        _ => {
            let mut order = nearest_neighbor(start, targets);
            two_opt(start, targets, &mut order);
            TourResult { length: tour_length(start, targets, &order), order, exact: false }
        }
    }
}

fn held_karp(start: Point, t: &[Point]) -> TourResult {
    let k = t.len();
    let full = (1usize << k) - 1;
    let mut dp = vec![f64::INFINITY; (1 << k) * k];
    let mut prev = vec![usize::MAX; (1 << k) * k];
    for j in 0..k {
        dp[(1 << j) * k + j] = start.dist(&t[j]);
    }
    for mask in 1..=full {
        for j in 0..k {
            let here = dp[mask * k + j];
            if mask & (1 << j) == 0 || !here.is_finite() {
                continue;
            }
            for next in 0..k {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let m2 = mask | (1 << next);
                let cand = here + t[j].dist(&t[next]);
                if cand < dp[m2 * k + next] {
                    dp[m2 * k + next] = cand;
                    prev[m2 * k + next] = j;
                }
            }
        }
    }
    let (mut last, mut best) = (0, f64::INFINITY);
    for j in 0..k {
        let cand = dp[full * k + j] + t[j].dist(&start);
        if cand < best {
            best = cand;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(k);
    let mut mask = full;
    while last != usize::MAX {
        order.push(last);
        let p = prev[mask * k + last];
        mask &= !(1 << last);
        last = p;
    }
    order.reverse();
    TourResult { length: best, order, exact: true }
}

fn nearest_neighbor(start: Point, t: &[Point]) -> Vec<usize> {
    let mut used = vec![false; t.len()];
    let mut order = Vec::with_capacity(t.len());
    let mut at = start;
    for _ in 0..t.len() {
        let next = (0..t.len())
            .filter(|&i| !used[i])
            .min_by(|&a, &b| at.dist(&t[a]).total_cmp(&at.dist(&t[b])))
            .expect("an unvisited target remains");
        used[next] = true;
        order.push(next);
        at = t[next];
    }
    order
}

/// First-improvement 2-opt on the closed tour with `start` fixed.
fn two_opt(start: Point, t: &[Point], order: &mut [usize]) {
    let pos = |order: &[usize], i: usize| if i == 0 || i > order.len() { start } else { t[order[i - 1]] };
    let k = order.len();
    let mut improved = true;
    while improved {
        improved = false;
        // Tour positions 0 and k+1 are the start; reverse positions i..=j.
        for i in 1..k {
            for j in i + 1..=k {
                let (a, b) = (pos(order, i - 1), pos(order, i));
                let (c, d) = (pos(order, j), pos(order, j + 1));
                let delta = a.dist(&c) + b.dist(&d) - a.dist(&b) - c.dist(&d);
                if delta < -1e-12 {
                    order[i - 1..j].reverse();
                    improved = true;
                }
            }
        }
    }
}

/// First leg, middle path among the targets, and return leg of a tour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TourDecomposition {
    pub lwf: f64,
    pub wac: f64,
    pub lwb: f64,
}

impl TourDecomposition {
    pub fn total(&self) -> f64 {
        self.lwf + self.wac + self.lwb
    }
}

pub fn decompose(start: Point, targets: &[Point], tour: &TourResult) -> Result<TourDecomposition> {
    let (Some(&first), Some(&last)) = (tour.order.first(), tour.order.last()) else {
        return Err(Error::InvalidInput("tour decomposition needs at least one target".into()));
    };
    let wac = tour.order.windows(2).map(|w| targets[w[0]].dist(&targets[w[1]])).sum();
    Ok(TourDecomposition { lwf: start.dist(&targets[first]), wac, lwb: targets[last].dist(&start) })
}

pub fn tour_decomposition(start: Point, targets: &[Point]) -> Result<TourDecomposition> {
    decompose(start, targets, &shortest_tour(start, targets))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTour {
    pub node: usize,
    pub children: Vec<usize>,
    pub length: f64,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decomposition: Option<TourDecomposition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub mule: usize,
    pub total: f64,
    /// True when every per-node tour was solved exactly.
    pub exact: bool,
    pub per_node: Vec<NodeTour>,
}

/// Sum over every possible failed node of the MULE tour through its
/// children. Leaves contribute nothing.
pub fn solution_cost(g: &UnitDiskGraph, tree: &GatheringTree, m: usize) -> Result<CostBreakdown> {
    tree.validate(g)?;
    if m >= g.n() {
        return Err(Error::InvalidInput(format!("MULE node {m} out of range")));
    }
    let start = g.point(m);
    let per_node: Vec<NodeTour> = tree
        .children()
        .into_par_iter()
        .enumerate()
        .map(|(v, children)| {
            let pts: Vec<Point> = children.iter().map(|&u| g.point(u)).collect();
            let tour = shortest_tour(start, &pts);
            let decomposition = decompose(start, &pts, &tour).ok();
            NodeTour { node: v, children, length: tour.length, exact: tour.exact, decomposition }
        })
        .collect();
    Ok(CostBreakdown {
        mule: m,
        total: per_node.iter().map(|t| t.length).sum(),
        exact: per_node.iter().all(|t| t.exact),
        per_node,
    })
}
