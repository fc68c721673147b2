use serde::{Deserialize, Serialize};

use super::{DualEntry, NodeWeights, CDS_CAPACITY_FRACTION, IDS_CAPACITY_FRACTION};
use crate::geom_graph::{hop_diameter, UnitDiskGraph};

/// Absolute tolerance on each dual constraint.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintFamily {
    /// `Σ_{S: v∈N(S)} y′(S) ≤ w(v)/100`
    IndependentPhase,
    /// `Σ_{S: v∈N(S)} y″(S) ≤ 99·w(v)/100`
    ConnectedPhase,
    /// `Σ_{S: v∈N(S)} (y′ + y″)(S) ≤ w(v)`
    Combined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSlack {
    pub node: usize,
    /// Capacity minus load for the independent-phase dual.
    pub ids: f64,
    /// Capacity minus load for the connected-phase dual.
    pub cds: f64,
    /// `w(v)` minus the combined load.
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub slacks: Vec<NodeSlack>,
    pub violations: Vec<(ConstraintFamily, usize)>,
    pub min_ids_slack: f64,
    pub min_cds_slack: f64,
    pub min_total_slack: f64,
    /// Whether every singleton has indicator 1. `None` when the graph is
    /// disconnected or a single node dominates it.
    pub singletons_non_dominating: Option<bool>,
    /// `Σ_S f(S)·(y′ + y″)(S)`.
    pub dual_objective: f64,
    /// Negative dual components found in either vector.
    pub negative_entries: usize,
}

fn loads(g: &UnitDiskGraph, duals: &[DualEntry]) -> Vec<f64> {
    let mut load = vec![0.0; g.n()];
    for e in duals {
        for u in e.members.neighborhood(g) {
            load[u] += e.y;
        }
    }
    load
}

/// Checks the dual constraints for both phases and their sum, node by node.
/// Violations are reported rather than raised.
pub fn check_dual_feasible(
    g: &UnitDiskGraph,
    w: &NodeWeights,
    y_prime: &[DualEntry],
    y_double: &[DualEntry],
) -> FeasibilityReport {
    let lp = loads(g, y_prime);
    let ld = loads(g, y_double);
    let mut slacks = Vec::with_capacity(g.n());
    let mut violations = Vec::new();
    for v in 0..g.n() {
        let wv = w.get(v);
        let s = NodeSlack {
            node: v,
            ids: wv * IDS_CAPACITY_FRACTION - lp[v],
            cds: wv * CDS_CAPACITY_FRACTION - ld[v],
            total: wv - lp[v] - ld[v],
        };
        for (family, slack) in [
            (ConstraintFamily::IndependentPhase, s.ids),
            (ConstraintFamily::ConnectedPhase, s.cds),
            (ConstraintFamily::Combined, s.total),
        ] {
            if slack < -FEASIBILITY_TOL {
                violations.push((family, v));
            }
        }
        slacks.push(s);
    }

    let min = |f: fn(&NodeSlack) -> f64| slacks.iter().map(f).fold(f64::INFINITY, f64::min);
    let singletons_non_dominating = match hop_diameter(g) {
        Ok(d) if d >= 3 => Some(true),
        Ok(d) if d >= 2 => Some((0..g.n()).all(|v| g.degree(v) + 1 < g.n())),
        _ => None,
    };
    let all = y_prime.iter().chain(y_double);
    let dual_objective = all.clone().map(|e| f64::from(e.members.indicator(g)) * e.y).sum();
    let negative_entries = all.filter(|e| e.y < 0.0).count();

    FeasibilityReport {
        feasible: violations.is_empty() && negative_entries == 0,
        min_ids_slack: min(|s| s.ids),
        min_cds_slack: min(|s| s.cds),
        min_total_slack: min(|s| s.total),
        slacks,
        violations,
        singletons_non_dominating,
        dual_objective,
        negative_entries,
    }
}
