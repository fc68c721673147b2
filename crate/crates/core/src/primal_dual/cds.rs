use super::{
    check_common_inputs, definitional_loads, DualEntry, DualSummaries, NodeWeights, PdOptions, PdResult, StepRecord,
    SubsetMembers, Trace, CDS_CAPACITY_FRACTION, CDS_INITIAL_DUAL_FACTOR,
};
use crate::error::{Error, Result};
use crate::geom_graph::UnitDiskGraph;

#[derive(Debug, Clone)]
struct Subset {
    /// Sorted members. Dropped once the subset is restricted unless tracing.
    members: Vec<usize>,
    y: f64,
    unrestricted: bool,
}

/// Checks that `ds` is an independent dominating set of `g`.
pub(crate) fn validate_ids(g: &UnitDiskGraph, ds: &[usize]) -> Result<Vec<bool>> {
    let n = g.n();
    let mut in_ds = vec![false; n];
    for &v in ds {
        if v >= n {
            return Err(Error::InvalidInput(format!("node {v} out of range")));
        }
        in_ds[v] = true;
    }
    for &v in ds {
        if let Some(&u) = g.neighbors(v).iter().find(|&&u| in_ds[u]) {
            return Err(Error::NotIndependent(v.min(u), v.max(u)));
        }
    }
    if let Some(v) = (0..n).find(|&v| !in_ds[v] && !g.neighbors(v).iter().any(|&u| in_ds[u])) {
        return Err(Error::NotDominating(v));
    }
    Ok(in_ds)
}

/// Distinct un-restricted subsets adjacent to `u`, found through the owner
/// map: the subsets owning a neighbor of `u`, excluding the one owning `u`.
fn adjacent_unrestricted(g: &UnitDiskGraph, owner: &[Option<usize>], u: usize, out: &mut Vec<usize>) {
    out.clear();
    for &x in g.neighbors(u) {
        if let Some(s) = owner[x] {
            if owner[u] != Some(s) && !out.contains(&s) {
                out.push(s);
            }
        }
    }
}

/// Extends the independent dominating set `ds` to a connected dominating
/// set, returning `LB2 = Σ_{v∈ds} y({v})` with capacities
/// `c_v = 99·w(v)/100`.
///
/// When some `w(v) ≤ 2` the initial duals `(99/500)(w(v) − 2)` are not
/// nonnegative; the run still completes but `lb_valid` is false.
pub fn build_cds(g: &UnitDiskGraph, w: &NodeWeights, ds: &[usize]) -> Result<PdResult> {
    build_cds_with(g, w, ds, &PdOptions::default())
}

pub fn build_cds_with(g: &UnitDiskGraph, w: &NodeWeights, ds: &[usize], opts: &PdOptions) -> Result<PdResult> {
    check_common_inputs(g, w)?;
    let in_ds = validate_ids(g, ds)?;
    let n = g.n();
    let lb_valid = w.as_slice().iter().all(|&x| x > 2.0);

    let mut ds_sorted = ds.to_vec();
    ds_sorted.sort_unstable();
    ds_sorted.dedup();

    let mut subsets: Vec<Subset> = Vec::with_capacity(2 * ds_sorted.len());
    // The owner map: the unique un-restricted subset containing each node.
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut singleton_of: Vec<Option<usize>> = vec![None; n];
    for &v in &ds_sorted {
        owner[v] = Some(subsets.len());
        singleton_of[v] = Some(subsets.len());
        subsets.push(Subset {
            members: vec![v],
            y: CDS_INITIAL_DUAL_FACTOR * (w.get(v) - 2.0),
            unrestricted: true,
        });
    }
    let mut unrestricted: Vec<usize> = (0..subsets.len()).collect();

    let mut dual = DualSummaries {
        capacity: w.as_slice().iter().map(|x| x * CDS_CAPACITY_FRACTION).collect(),
        sum_y: vec![0.0; n],
        sum_g: vec![0; n],
    };
    for u in 0..n {
        for &x in g.neighbors(u) {
            if let Some(s) = singleton_of[x] {
                dual.sum_y[u] += subsets[s].y;
                dual.sum_g[u] += 1;
            }
        }
    }

    let mut in_cds = in_ds.clone();
    let mut order = Vec::new();
    let mut steps = Vec::new();
    let mut s1: Vec<usize> = Vec::with_capacity(5);
    let mut scratch: Vec<usize> = Vec::with_capacity(5);

    while unrestricted.len() > 1 {
        if order.len() >= n {
            return Err(Error::Internal("connected-set phase did not halt within n steps".into()));
        }
        let (v, eps) = dual
            .argmin()
            .ok_or_else(|| Error::Internal("every potential is infinite with several un-restricted subsets".into()))?;
        if owner[v].is_some() {
            return Err(Error::Internal(format!("selected node {v} already belongs to an active subset")));
        }
        order.push(v);

        // S¹: un-restricted subsets holding a neighbor of v. Since v is in
        // no subset, these are exactly the subsets adjacent to v.
        adjacent_unrestricted(g, &owner, v, &mut s1);
        s1.sort_unstable();
        let mut added = Vec::new();
        if s1.len() > 1 {
            // S²: members of S¹ that already hold a cds neighbor of v.
            let in_s2 = |s: usize| g.neighbors(v).iter().any(|&x| owner[x] == Some(s) && in_cds[x]);
            let bridges: Vec<usize> = s1
                .iter()
                .copied()
                .filter(|&s| !in_s2(s))
                .map(|s| {
                    let candidates = g.neighbors(v).iter().copied().filter(|&x| owner[x] == Some(s));
                    // Prefer a ds member, else the lowest index.
                    candidates
                        .clone()
                        .find(|&x| in_ds[x])
                        .or_else(|| candidates.min())
                        .expect("subset in S¹ holds a neighbor of v")
                })
                .collect();
            in_cds[v] = true;
            added.push(v);
            for u in bridges {
                if !in_cds[u] {
                    in_cds[u] = true;
                    added.push(u);
                }
            }
        }

        // Uniform raise: every node gains ε per adjacent un-restricted subset.
        for &s in &unrestricted {
            subsets[s].y += eps;
        }
        for u in 0..n {
            dual.sum_y[u] += f64::from(dual.sum_g[u]) * eps;
        }

        // Restrict S¹ and merge it with v into a fresh un-restricted subset.
        let mut merged = vec![v];
        for &s in &s1 {
            let subset = &mut subsets[s];
            subset.unrestricted = false;
            if opts.trace {
                merged.extend_from_slice(&subset.members);
            } else {
                merged.append(&mut subset.members);
            }
        }
        merged.sort_unstable();
        unrestricted.retain(|s| !s1.contains(s));
        let new_id = subsets.len();
        for &u in &merged {
            owner[u] = Some(new_id);
        }
        subsets.push(Subset { members: merged, y: 0.0, unrestricted: true });
        unrestricted.push(new_id);

        for u in 0..n {
            adjacent_unrestricted(g, &owner, u, &mut scratch);
            dual.sum_g[u] = scratch.len() as u32;
        }

        if opts.trace {
            steps.push(step_record(g, &subsets, &dual, v, eps, added));
        }
    }

    let mut singleton_y = vec![0.0; n];
    let mut dual_entries = Vec::with_capacity(ds_sorted.len());
    for &v in &ds_sorted {
        let y = subsets[singleton_of[v].expect("ds node has a singleton")].y;
        singleton_y[v] = y;
        dual_entries.push(DualEntry { members: SubsetMembers::singleton(v), y });
    }
    let lower_bound = dual_entries.iter().map(|e| e.y).sum();
    let chosen: Vec<usize> = (0..n).filter(|&v| in_cds[v]).collect();
    let trace = opts.trace.then(|| Trace {
        steps,
        final_subsets: subsets
            .iter()
            .map(|s| DualEntry { members: SubsetMembers::Nodes(s.members.clone()), y: s.y })
            .collect(),
    });

    Ok(PdResult {
        chosen,
        lower_bound,
        singleton_y,
        selection_order: order,
        dual: dual_entries,
        lb_valid,
        trace,
    })
}

fn step_record(
    g: &UnitDiskGraph,
    subsets: &[Subset],
    dual: &DualSummaries,
    v: usize,
    eps: f64,
    added: Vec<usize>,
) -> StepRecord {
    let members: Vec<SubsetMembers> = subsets.iter().map(|s| SubsetMembers::Nodes(s.members.clone())).collect();
    let (load, count) = definitional_loads(
        g,
        members.iter().zip(subsets).map(|(m, s)| (m, s.y, s.unrestricted)),
    );
    let mut containing = vec![0usize; g.n()];
    for s in subsets.iter().filter(|s| s.unrestricted) {
        for &u in &s.members {
            containing[u] += 1;
        }
    }
    StepRecord {
        selected: v,
        epsilon: eps,
        packed_residual: load[v] - dual.capacity[v],
        sum_y_drift: load.iter().zip(&dual.sum_y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        sum_g_mismatches: count.iter().zip(&dual.sum_g).filter(|(a, b)| a != b).count(),
        active_subsets: subsets.len(),
        unrestricted_subsets: subsets.iter().filter(|s| s.unrestricted).count(),
        max_unrestricted_containing: containing.iter().copied().max().unwrap_or(0),
        max_unrestricted_adjacent: count.iter().copied().max().unwrap_or(0) as usize,
        max_capacity_excess: load
            .iter()
            .zip(&dual.capacity)
            .map(|(l, c)| l - c)
            .fold(f64::NEG_INFINITY, f64::max),
        added,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom_graph::{make_graph, Point};

    fn path4() -> UnitDiskGraph {
        make_graph((0..4).map(|i| Point::new(i as f64, 0.0)).collect()).unwrap()
    }

    #[test]
    fn path_of_four_weight_twenty() {
        let r = build_cds(&path4(), &NodeWeights::uniform(4, 20.0).unwrap(), &[1, 3]).unwrap();
        assert_eq!(r.chosen, vec![1, 2, 3]);
        assert_eq!(r.selection_order, vec![2]);
        assert!((r.singleton_y[1] - 9.9).abs() < 1e-12);
        assert!((r.singleton_y[3] - 9.9).abs() < 1e-12);
        assert!((r.lower_bound - 19.8).abs() < 1e-12);
        assert!(r.lb_valid);
    }

    #[test]
    fn single_ds_node_halts_immediately() {
        let g = make_graph(vec![Point::new(0.0, 0.0), Point::new(0.5, 0.0)]).unwrap();
        let w = NodeWeights::new(vec![7.0, 9.0]).unwrap();
        let r = build_cds(&g, &w, &[0]).unwrap();
        assert_eq!(r.chosen, vec![0]);
        assert!(r.selection_order.is_empty());
        assert!((r.lower_bound - 99.0 / 500.0 * 5.0).abs() < 1e-12);
    }

    #[test]
    fn star_keeps_center() {
        let mut pts = vec![Point::new(0.0, 0.0)];
        pts.extend([(0.9, 0.0), (0.0, 0.9), (-0.9, 0.0), (0.0, -0.9)].map(|(x, y)| Point::new(x, y)));
        let g = make_graph(pts).unwrap();
        let r = build_cds(&g, &NodeWeights::uniform(5, 20.0).unwrap(), &[0]).unwrap();
        assert_eq!(r.chosen, vec![0]);
    }

    #[test]
    fn rejects_invalid_ds() {
        let g = path4();
        let w = NodeWeights::uniform(4, 20.0).unwrap();
        assert!(matches!(build_cds(&g, &w, &[1, 2]), Err(Error::NotIndependent(1, 2))));
        assert!(matches!(build_cds(&g, &w, &[1]), Err(Error::NotDominating(3))));
    }

    #[test]
    fn small_weights_are_flagged() {
        let r = build_cds(&path4(), &NodeWeights::uniform(4, 1.5).unwrap(), &[1, 3]).unwrap();
        assert!(!r.lb_valid);
        assert_eq!(r.chosen, vec![1, 2, 3]);
    }

    #[test]
    fn traced_summaries_match_definitions() {
        let r = build_cds_with(&path4(), &NodeWeights::uniform(4, 20.0).unwrap(), &[1, 3], &PdOptions { trace: true })
            .unwrap();
        let trace = r.trace.unwrap();
        assert_eq!(trace.steps.len(), 1);
        let step = &trace.steps[0];
        assert!(step.packed_residual.abs() < 1e-9);
        assert!(step.sum_y_drift < 1e-12);
        assert_eq!(step.sum_g_mismatches, 0);
        assert_eq!(step.max_unrestricted_containing, 1);
        assert_eq!(trace.final_subsets.last().unwrap().members, SubsetMembers::Nodes(vec![1, 2, 3]));
    }
}
