use super::{
    check_common_inputs, definitional_loads, DualEntry, DualSummaries, NodeWeights, PdOptions, PdResult, StepRecord,
    SubsetMembers, Trace, IDS_CAPACITY_FRACTION,
};
use crate::error::{Error, Result};
use crate::geom_graph::UnitDiskGraph;

#[derive(Debug, Clone, Copy)]
enum Kind {
    Singleton(usize),
    Complement(usize),
}

#[derive(Debug, Clone)]
struct Subset {
    kind: Kind,
    y: f64,
    unrestricted: bool,
}

impl Subset {
    fn members(&self) -> SubsetMembers {
        match self.kind {
            Kind::Singleton(v) => SubsetMembers::singleton(v),
            Kind::Complement(u) => SubsetMembers::Complement(u),
        }
    }
}

fn neighborhood<'a>(g: &'a UnitDiskGraph, kind: &'a Kind) -> &'a [usize] {
    match kind {
        Kind::Singleton(v) => g.neighbors(*v),
        Kind::Complement(u) => std::slice::from_ref(u),
    }
}

/// Builds an independent dominating set together with the lower bound
/// `LB1 = Σ_v y({v})`, using capacities `c_v = w(v) / 100`.
pub fn build_ids(g: &UnitDiskGraph, w: &NodeWeights) -> Result<PdResult> {
    build_ids_with(g, w, &PdOptions::default())
}

pub fn build_ids_with(g: &UnitDiskGraph, w: &NodeWeights, opts: &PdOptions) -> Result<PdResult> {
    check_common_inputs(g, w)?;
    let n = g.n();

    let mut subsets: Vec<Subset> = (0..n)
        .map(|v| Subset { kind: Kind::Singleton(v), y: 0.0, unrestricted: true })
        .collect();
    let mut complement_of: Vec<Option<usize>> = vec![None; n];
    let mut dual = DualSummaries {
        capacity: w.as_slice().iter().map(|x| x * IDS_CAPACITY_FRACTION).collect(),
        sum_y: vec![0.0; n],
        sum_g: (0..n).map(|v| g.degree(v) as u32).collect(),
    };

    let mut selected = vec![false; n];
    let mut dominated = vec![false; n];
    let mut undominated = n;
    let mut ds = Vec::new();
    let mut order = Vec::new();
    let mut steps = Vec::new();

    while undominated > 0 {
        let (v, eps) = dual
            .argmin()
            .ok_or_else(|| Error::Internal("every potential is infinite before ds dominates".into()))?;
        if selected[v] {
            return Err(Error::Internal(format!("node {v} selected twice")));
        }
        selected[v] = true;
        order.push(v);

        let mut added = Vec::new();
        if !dominated[v] {
            ds.push(v);
            added.push(v);
            for u in std::iter::once(v).chain(g.neighbors(v).iter().copied()) {
                if !dominated[u] {
                    dominated[u] = true;
                    undominated -= 1;
                }
            }
        }

        // Uniform raise of every un-restricted subset.
        for s in subsets.iter().filter(|s| s.unrestricted) {
            for &u in neighborhood(g, &s.kind) {
                dual.sum_y[u] += eps;
            }
        }
        for s in subsets.iter_mut().filter(|s| s.unrestricted) {
            s.y += eps;
        }

        // v is packed now: restrict every subset adjacent to it.
        let adjacent = g.neighbors(v).iter().copied().chain(complement_of[v]);
        for id in adjacent {
            let s = &mut subsets[id];
            if s.unrestricted {
                s.unrestricted = false;
                for &u in neighborhood(g, &s.kind) {
                    dual.sum_g[u] -= 1;
                }
            }
        }

        // Unselected nodes left without an un-restricted neighbor subset get
        // the complement V∖{u}, whose only neighbor is u.
        for u in 0..n {
            if !selected[u] && dual.sum_g[u] == 0 {
                if complement_of[u].is_some() {
                    return Err(Error::Internal(format!("second complement subset for node {u}")));
                }
                complement_of[u] = Some(subsets.len());
                subsets.push(Subset { kind: Kind::Complement(u), y: 0.0, unrestricted: true });
                dual.sum_g[u] += 1;
            }
        }

        if opts.trace {
            steps.push(step_record(g, &subsets, &dual, v, eps, added));
        }
    }

    ds.sort_unstable();
    let singleton_y: Vec<f64> = subsets[..n].iter().map(|s| s.y).collect();
    let lower_bound = singleton_y.iter().sum();
    let dual_entries = (0..n)
        .map(|v| DualEntry { members: SubsetMembers::singleton(v), y: singleton_y[v] })
        .collect();
    let trace = opts.trace.then(|| Trace {
        steps,
        final_subsets: subsets.iter().map(|s| DualEntry { members: s.members(), y: s.y }).collect(),
    });

    Ok(PdResult {
        chosen: ds,
        lower_bound,
        singleton_y,
        selection_order: order,
        dual: dual_entries,
        lb_valid: true,
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
    let members: Vec<SubsetMembers> = subsets.iter().map(Subset::members).collect();
    let (load, count) = definitional_loads(
        g,
        members.iter().zip(subsets).map(|(m, s)| (m, s.y, s.unrestricted)),
    );
    let sum_y_drift = load
        .iter()
        .zip(&dual.sum_y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let sum_g_mismatches = count.iter().zip(&dual.sum_g).filter(|(a, b)| a != b).count();
    let max_capacity_excess = load
        .iter()
        .zip(&dual.capacity)
        .map(|(l, c)| l - c)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_unrestricted_adjacent = count.iter().copied().max().unwrap_or(0) as usize;
    StepRecord {
        selected: v,
        epsilon: eps,
        packed_residual: load[v] - dual.capacity[v],
        sum_y_drift,
        sum_g_mismatches,
        active_subsets: subsets.len(),
        unrestricted_subsets: subsets.iter().filter(|s| s.unrestricted).count(),
        max_unrestricted_containing: 0,
        max_unrestricted_adjacent,
        max_capacity_excess,
        added,
    }
}
