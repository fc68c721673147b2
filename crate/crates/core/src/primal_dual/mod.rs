//! Primal-dual construction of an independent dominating set and a
//! connected dominating set, each paired with a dual solution whose value
//! lower-bounds the minimum weighted connected dominating set.
//!
//! Both algorithms raise the dual values `y(S)` of un-restricted active
//! subsets uniformly and repeatedly select the node of minimum potential
//! `ε(v) = (c_v − Σ_{S: v∈N(S)} y(S)) / Σ_{S: v∈N(S)} g(S)`, where `N(S)` is
//! the set of nodes outside `S` adjacent to some member of `S`. The two
//! per-node sums are maintained incrementally, giving `O(n²Δ)` per run.

mod cds;
mod certificate;
mod ids;

pub use cds::{build_cds, build_cds_with};
pub use certificate::{check_dual_feasible, ConstraintFamily, FeasibilityReport, NodeSlack, FEASIBILITY_TOL};
pub use ids::{build_ids, build_ids_with};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom_graph::{is_connected, UnitDiskGraph};

/// Absolute tolerance for packedness checks.
pub const PACKED_TOL: f64 = 1e-9;

/// Relative tolerance under which two potentials are treated as equal.
pub const TIE_TOL: f64 = 1e-12;

/// Capacity fraction of `w(v)` used by the independent-set phase.
pub const IDS_CAPACITY_FRACTION: f64 = 1.0 / 100.0;
/// Capacity fraction of `w(v)` used by the connected-set phase.
pub const CDS_CAPACITY_FRACTION: f64 = 99.0 / 100.0;
/// Initial dual value of `{v}`, `v ∈ ds`, is this factor times `w(v) − 2`.
pub const CDS_INITIAL_DUAL_FACTOR: f64 = 99.0 / 500.0;

/// Strictly positive node weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeWeights(Vec<f64>);

impl NodeWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some(v) = w.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidInput(format!("weight of node {v} must be positive and finite, got {}", w[v])));
        }
        Ok(NodeWeights(w))
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self, nodes: &[usize]) -> f64 {
        nodes.iter().map(|&v| self.0[v]).sum()
    }
}

/// Members of an active subset. Complements `V ∖ {u}` are kept symbolic;
/// their only neighbor is `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetMembers {
    Nodes(Vec<usize>),
    Complement(usize),
}

impl SubsetMembers {
    pub fn singleton(v: usize) -> Self {
        SubsetMembers::Nodes(vec![v])
    }

    /// `N(S)`: nodes outside the subset adjacent to one of its members.
    pub fn neighborhood(&self, g: &UnitDiskGraph) -> Vec<usize> {
        match self {
            SubsetMembers::Complement(u) => vec![*u],
            SubsetMembers::Nodes(members) => {
                let mut inside = vec![false; g.n()];
                for &v in members {
                    inside[v] = true;
                }
                let mut seen = inside.clone();
                let mut out = Vec::new();
                for &v in members {
                    for &u in g.neighbors(v) {
                        if !seen[u] {
                            seen[u] = true;
                            out.push(u);
                        }
                    }
                }
                out.sort_unstable();
                out
            }
        }
    }

    /// `f(S)`: 0 when `S ∪ N(S) = V`, 1 otherwise.
    pub fn indicator(&self, g: &UnitDiskGraph) -> u8 {
        match self {
            // V∖{u} dominates V iff u has a neighbor.
            SubsetMembers::Complement(u) => u8::from(g.degree(*u) == 0),
            SubsetMembers::Nodes(members) => {
                let covered = members.len() + self.neighborhood(g).len();
                u8::from(covered < g.n())
            }
        }
    }
}

/// One component of a dual vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualEntry {
    pub members: SubsetMembers,
    pub y: f64,
}

/// Per-node capacities and the incrementally maintained sums
/// `sum_y(v) = Σ_{S: v∈N(S)} y(S)` and `sum_g(v) = Σ_{S: v∈N(S)} g(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSummaries {
    pub capacity: Vec<f64>,
    pub sum_y: Vec<f64>,
    pub sum_g: Vec<u32>,
}

impl DualSummaries {
    /// Potential `ε(v)`, clamped at zero to absorb rounding; `∞` when no
    /// un-restricted subset is adjacent to `v`.
    pub fn potential(&self, v: usize) -> f64 {
        potential(self.capacity[v], self.sum_y[v], self.sum_g[v])
    }

    /// Node of minimum finite potential. Potentials within [`TIE_TOL`] of
    /// the minimum count as ties and go to the lowest index.
    pub fn argmin(&self) -> Option<(usize, f64)> {
        let min = (0..self.capacity.len())
            .map(|v| self.potential(v))
            .filter(|e| e.is_finite())
            .fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return None;
        }
        let limit = min + TIE_TOL * (1.0 + min.abs());
        (0..self.capacity.len()).map(|v| (v, self.potential(v))).find(|&(_, e)| e <= limit)
    }
}

pub fn potential(capacity: f64, sum_y: f64, sum_g: u32) -> f64 {
    if sum_g == 0 {
        f64::INFINITY
    } else {
        ((capacity - sum_y) / f64::from(sum_g)).max(0.0)
    }
}

/// Optional instrumentation. Tracing recomputes every definitional sum after
/// each step and retains every subset, so it is meant for tests only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PdOptions {
    pub trace: bool,
}

/// Per-step measurements taken in traced runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub selected: usize,
    pub epsilon: f64,
    /// `Σ_{S: v∈N(S)} y(S) − c_v` for the selected node after the update.
    pub packed_residual: f64,
    /// Largest `|sum_y(u) − definitional sum|` over all nodes.
    pub sum_y_drift: f64,
    /// Number of nodes whose `sum_g` disagrees with its definition.
    pub sum_g_mismatches: usize,
    pub active_subsets: usize,
    pub unrestricted_subsets: usize,
    /// Largest number of un-restricted subsets containing a single node.
    pub max_unrestricted_containing: usize,
    /// Largest number of un-restricted subsets adjacent to a single node.
    pub max_unrestricted_adjacent: usize,
    /// Largest dual load `Σ_{S: u∈N(S)} y(S) − c_u` over all nodes.
    pub max_capacity_excess: f64,
    /// Nodes added to the output set during the step.
    pub added: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    /// Every active subset with its final `y(S)`.
    pub final_subsets: Vec<DualEntry>,
}

/// Output of either phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdResult {
    /// Output node set in ascending order.
    pub chosen: Vec<usize>,
    pub lower_bound: f64,
    /// Final `y({v})` per node; zero where `{v}` was never active.
    pub singleton_y: Vec<f64>,
    pub selection_order: Vec<usize>,
    /// The certified dual vector: the singleton subsets whose values sum to
    /// `lower_bound`. Every other component is zero.
    pub dual: Vec<DualEntry>,
    /// False when some weight was at most 2 in the connected-set phase, in
    /// which case the initial duals are negative and the bound is void.
    pub lb_valid: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Trace>,
}

fn check_common_inputs(g: &UnitDiskGraph, w: &NodeWeights) -> Result<()> {
    if g.n() < 2 {
        return Err(Error::InvalidInput("at least two nodes are required".into()));
    }
    if w.len() != g.n() {
        return Err(Error::InvalidInput(format!("{} weights for {} nodes", w.len(), g.n())));
    }
    if !is_connected(g) {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Definitional dual load on every node: `Σ_{S: u∈N(S)} y(S)`.
fn definitional_loads<'a>(g: &UnitDiskGraph, subsets: impl Iterator<Item = (&'a SubsetMembers, f64, bool)>) -> (Vec<f64>, Vec<u32>) {
    let mut load = vec![0.0; g.n()];
    let mut count = vec![0u32; g.n()];
    for (members, y, unrestricted) in subsets {
        for u in members.neighborhood(g) {
            load[u] += y;
            if unrestricted {
                count[u] += 1;
            }
        }
    }
    (load, count)
}
