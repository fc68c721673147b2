//! Reduction from the gathering-tree problem to node-weighted connected
//! domination, and the location sweep that builds the final tree.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom_graph::{bfs_parents, hop_diameter, Point, UnitDiskGraph};
use crate::primal_dual::{build_cds, build_ids, NodeWeights, PdResult};
use crate::tour_cost::GatheringTree;

/// Upper end (exclusive) of the admissible MULE range.
pub const MAX_MULE_RANGE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuleParams {
    pub r_m: f64,
}

impl MuleParams {
    pub const DEFAULT_RANGE: f64 = 0.2;

    pub fn new(r_m: f64) -> Result<Self> {
        if r_m > 0.0 && r_m < MAX_MULE_RANGE {
            Ok(MuleParams { r_m })
        } else {
            Err(Error::RangeOutOfBounds(r_m))
        }
    }
}

impl Default for MuleParams {
    fn default() -> Self {
        MuleParams { r_m: Self::DEFAULT_RANGE }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionConstants {
    pub r_m: f64,
    /// Number of concentric circles the MULE walks among the children.
    pub n_r: u64,
    pub c1: f64,
    pub c: f64,
}

impl ReductionConstants {
    pub fn new(r_m: f64) -> Result<Self> {
        let (n_r, c1) = wac_bound(r_m)?;
        Ok(ReductionConstants { r_m, n_r, c1, c: 2.0 + c1 })
    }
}

/// Returns `(N_R, C₁)` with `N_R = ⌈(1 − R_M)/(2R_M)⌉` and
/// `C₁ = (1 + R_M)(1 + π(1 + N_R))`.
pub fn wac_bound(r_m: f64) -> Result<(u64, f64)> {
    MuleParams::new(r_m)?;
    // Guard against quotients such as 2.0000000000000004 rounding up.
    let n_r = ((1.0 - r_m) / (2.0 * r_m) - 1e-9).ceil() as u64;
    Ok((n_r, (1.0 + r_m) * (1.0 + PI * (1.0 + n_r as f64))))
}

/// `C = 2 + C₁`, the additive term of every reduction weight.
pub fn weight_constant(r_m: f64) -> Result<f64> {
    Ok(2.0 + wac_bound(r_m)?.1)
}

/// `w(v) = 2·dist(m, v) + C`.
pub fn reduction_weights(g: &UnitDiskGraph, m: usize, c: f64) -> Result<NodeWeights> {
    if m >= g.n() {
        return Err(Error::InvalidInput(format!("MULE node {m} out of range")));
    }
    let pm = g.point(m);
    NodeWeights::new(g.points().iter().map(|p| 2.0 * pm.dist(p) + c).collect())
}

/// Which MULE locations to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MulePolicy {
    /// Every node, keeping the lightest connected dominating set.
    #[default]
    FullScan,
    /// Only the node nearest the center of the bounding box.
    CenterNode,
    /// A single given node.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuleSolution {
    pub tree: GatheringTree,
    pub mule: usize,
    pub root: usize,
    pub ds: Vec<usize>,
    pub cds: Vec<usize>,
    pub weights: NodeWeights,
    pub constants: ReductionConstants,
    pub lb1: f64,
    pub lb2: f64,
    pub lower_bound: f64,
    pub weight_cds: f64,
    /// `weight_cds / lower_bound`; infinite if the bound is zero.
    pub alpha: f64,
    /// The ratio certificate needs hop diameter at least 3.
    pub alpha_valid: bool,
    pub lb_valid: bool,
    pub diameter: usize,
    pub locations_evaluated: usize,
    pub ids_run: PdResult,
    pub cds_run: PdResult,
}

struct Candidate {
    m: usize,
    weight: f64,
    weights: NodeWeights,
    ids: PdResult,
    cds: PdResult,
}

fn evaluate(g: &UnitDiskGraph, m: usize, c: f64) -> Result<Candidate> {
    let weights = reduction_weights(g, m, c)?;
    let ids = build_ids(g, &weights)?;
    let cds = build_cds(g, &weights, &ids.chosen)?;
    let weight = weights.total(&cds.chosen);
    Ok(Candidate { m, weight, weights, ids, cds })
}

/// Strictly lighter wins; equal weights go to the lower location index.
fn lighter(a: Candidate, b: Candidate) -> Candidate {
    if b.weight < a.weight || (b.weight == a.weight && b.m < a.m) {
        b
    } else {
        a
    }
}

pub fn build_gathering_tree(g: &UnitDiskGraph, params: &MuleParams) -> Result<MuleSolution> {
    build_gathering_tree_with(g, params, MulePolicy::FullScan)
}

pub fn build_gathering_tree_with(g: &UnitDiskGraph, params: &MuleParams, policy: MulePolicy) -> Result<MuleSolution> {
    let constants = ReductionConstants::new(params.r_m)?;
    if g.n() < 2 {
        return Err(Error::InvalidInput("at least two nodes are required".into()));
    }
    let diameter = hop_diameter(g)?;
    let (best, evaluated) = match policy {
        MulePolicy::FullScan => {
            let best = (0..g.n())
                .into_par_iter()
                .map(|m| evaluate(g, m, constants.c))
                .try_reduce_with(|a, b| Ok(lighter(a, b)))
                .expect("graph has nodes")?;
            (best, g.n())
        }
        MulePolicy::CenterNode => (evaluate(g, g.nearest_node(g.bounding_box_center()), constants.c)?, 1),
        MulePolicy::Fixed(m) => (evaluate(g, m, constants.c)?, 1),
    };
    assemble(g, constants, diameter, evaluated, best)
}

fn assemble(
    g: &UnitDiskGraph,
    constants: ReductionConstants,
    diameter: usize,
    locations_evaluated: usize,
    best: Candidate,
) -> Result<MuleSolution> {
    let Candidate { m, weight, weights, ids, cds } = best;
    let root = *ids
        .selection_order
        .first()
        .ok_or_else(|| Error::Internal("independent-set phase selected nothing".into()))?;
    let mut parent = bfs_parents(g, &cds.chosen, root)?;

    let mut in_cds = vec![false; g.n()];
    for &v in &cds.chosen {
        in_cds[v] = true;
    }
    for u in (0..g.n()).filter(|&u| !in_cds[u]) {
        let pu = g.point(u);
        let nearest = g
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&v| in_cds[v])
            .min_by(|&a, &b| pu.dist(&g.point(a)).total_cmp(&pu.dist(&g.point(b))).then(a.cmp(&b)))
            .ok_or(Error::NotDominating(u))?;
        parent[u] = Some(nearest);
    }

    let lower_bound = ids.lower_bound + cds.lower_bound;
    let alpha = if lower_bound > 0.0 { weight / lower_bound } else { f64::INFINITY };
    Ok(MuleSolution {
        tree: GatheringTree::new(parent, root),
        mule: m,
        root,
        ds: ids.chosen.clone(),
        cds: cds.chosen.clone(),
        weights,
        constants,
        lb1: ids.lower_bound,
        lb2: cds.lower_bound,
        lower_bound,
        weight_cds: weight,
        alpha,
        alpha_valid: diameter >= 3,
        lb_valid: ids.lb_valid && cds.lb_valid,
        diameter,
        locations_evaluated,
        ids_run: ids,
        cds_run: cds,
    })
}

/// Node nearest to `p`, used to pin the MULE for a given square.
pub fn center_node(g: &UnitDiskGraph, p: Point) -> usize {
    g.nearest_node(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom_graph::make_graph;
    use crate::tour_cost::solution_cost;

    #[test]
    fn constants_at_default_range() {
        let (n_r, c1) = wac_bound(0.2).unwrap();
        assert_eq!(n_r, 2);
        assert!((c1 - 1.2 * (1.0 + 3.0 * PI)).abs() < 1e-12);
        assert!((weight_constant(0.2).unwrap() - (3.2 + 3.6 * PI)).abs() < 1e-12);
        let (n_r, c1) = wac_bound(0.25).unwrap();
        assert_eq!(n_r, 2);
        assert!((c1 - 1.25 * (1.0 + 3.0 * PI)).abs() < 1e-12);
        assert!(matches!(wac_bound(0.3), Err(Error::RangeOutOfBounds(_))));
        assert!(wac_bound(0.0).is_err());
        assert!(weight_constant(0.01).unwrap() > weight_constant(0.2).unwrap());
    }

    #[test]
    fn weights_on_path() {
        let g = make_graph((0..4).map(|i| Point::new(i as f64, 0.0)).collect()).unwrap();
        let w = reduction_weights(&g, 0, 14.51).unwrap();
        for (a, b) in w.as_slice().iter().zip([14.51, 16.51, 18.51, 20.51]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn two_node_pipeline() {
        let g = make_graph(vec![Point::new(0.0, 0.0), Point::new(0.5, 0.0)]).unwrap();
        let s = build_gathering_tree(&g, &MuleParams::default()).unwrap();
        assert_eq!(s.cds, vec![0]);
        assert_eq!((s.mule, s.root), (0, 0));
        assert_eq!(s.tree.parent, vec![None, Some(0)]);
        assert!(!s.alpha_valid);
        assert!((solution_cost(&g, &s.tree, s.mule).unwrap().total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_pipeline() {
        let g = make_graph((0..4).map(|i| Point::new(i as f64, 0.0)).collect()).unwrap();
        let s = build_gathering_tree(&g, &MuleParams::default()).unwrap();
        assert!(s.cds.contains(&1) && s.cds.contains(&2));
        assert!(s.mule == 1 || s.mule == 2);
        assert!(s.alpha_valid);
        assert!(s.alpha <= 20.0);
        s.tree.validate(&g).unwrap();
    }

    #[test]
    fn star_pipeline() {
        let mut pts = vec![Point::new(0.0, 0.0)];
        pts.extend([(0.9, 0.0), (0.0, 0.9), (-0.9, 0.0), (0.0, -0.9)].map(|(x, y)| Point::new(x, y)));
        let g = make_graph(pts).unwrap();
        let s = build_gathering_tree(&g, &MuleParams::default()).unwrap();
        assert_eq!(s.cds, vec![0]);
        assert_eq!(s.mule, 0);
        assert_eq!(s.tree.parent, vec![None, Some(0), Some(0), Some(0), Some(0)]);
    }

    #[test]
    fn policies_agree_on_fixed_location() {
        let g = make_graph((0..4).map(|i| Point::new(i as f64, 0.0)).collect()).unwrap();
        let p = MuleParams::default();
        let a = build_gathering_tree_with(&g, &p, MulePolicy::Fixed(1)).unwrap();
        let b = build_gathering_tree_with(&g, &p, MulePolicy::CenterNode).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.locations_evaluated, 1);
    }
}
