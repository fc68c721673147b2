//! Test-side references: a naive replay of both primal-dual phases over
//! explicitly materialized subsets, and set predicates written from their
//! definitions.

#![allow(dead_code)]

use mule_gather::geom_graph::{generate_random_udg, GenParams, Point, UnitDiskGraph};

pub fn dominates(g: &UnitDiskGraph, set: &[usize]) -> bool {
    (0..g.n()).all(|v| set.contains(&v) || set.iter().any(|&u| g.dist(u, v) <= 1.0))
}

pub fn independent(g: &UnitDiskGraph, set: &[usize]) -> bool {
    set.iter().all(|&a| set.iter().all(|&b| a == b || g.dist(a, b) > 1.0))
}

pub fn induced_connected(g: &UnitDiskGraph, set: &[usize]) -> bool {
    let Some(&first) = set.first() else { return false };
    let mut reached = vec![first];
    let mut i = 0;
    while i < reached.len() {
        let u = reached[i];
        for &v in set {
            if !reached.contains(&v) && g.dist(u, v) <= 1.0 {
                reached.push(v);
            }
        }
        i += 1;
    }
    reached.len() == set.len()
}

/// Generates a connected graph with `n` nodes at the given density.
pub fn graph(seed: u64, n: usize, density: f64) -> UnitDiskGraph {
    let side = (n as f64 / density).sqrt();
    let g = generate_random_udg(&GenParams::new(side, density, seed)).expect("generator");
    assert_eq!(g.n(), n);
    g
}

#[derive(Clone)]
struct Sub {
    members: Vec<bool>,
    y: f64,
    g: bool,
}

fn neighborhood(g: &UnitDiskGraph, members: &[bool]) -> Vec<bool> {
    (0..g.n())
        .map(|u| !members[u] && (0..g.n()).any(|x| members[x] && g.dist(u, x) <= 1.0))
        .collect()
}

fn sums(g: &UnitDiskGraph, subs: &[Sub]) -> (Vec<f64>, Vec<u32>) {
    let mut y = vec![0.0; g.n()];
    let mut c = vec![0u32; g.n()];
    for s in subs {
        for (u, inn) in neighborhood(g, &s.members).into_iter().enumerate() {
            if inn {
                y[u] += s.y;
                c[u] += u32::from(s.g);
            }
        }
    }
    (y, c)
}

fn pick(cap: &[f64], load: &[f64], cnt: &[u32]) -> (usize, f64) {
    let pot: Vec<f64> = (0..cap.len())
        .map(|v| if cnt[v] == 0 { f64::INFINITY } else { ((cap[v] - load[v]) / cnt[v] as f64).max(0.0) })
        .collect();
    let min = pot.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min.is_finite(), "no finite potential");
    let v = (0..pot.len()).find(|&v| pot[v] <= min + 1e-12 * (1.0 + min.abs())).unwrap();
    (v, pot[v])
}

pub struct NaiveRun {
    pub chosen: Vec<usize>,
    pub order: Vec<usize>,
    pub singleton_y: Vec<f64>,
    pub lower_bound: f64,
    /// Residual `load − c` of each selected node right after its step.
    pub packed_residuals: Vec<f64>,
    pub final_subsets: usize,
}

pub fn naive_ids(g: &UnitDiskGraph, w: &[f64]) -> NaiveRun {
    let n = g.n();
    let cap: Vec<f64> = w.iter().map(|x| x / 100.0).collect();
    let single = |v: usize| (0..n).map(|u| u == v).collect::<Vec<bool>>();
    let mut subs: Vec<Sub> = (0..n).map(|v| Sub { members: single(v), y: 0.0, g: true }).collect();
    let mut ds: Vec<usize> = Vec::new();
    let mut order = Vec::new();
    let mut residuals = Vec::new();
    while !dominates(g, &ds) {
        let (load, cnt) = sums(g, &subs);
        let (v, eps) = pick(&cap, &load, &cnt);
        order.push(v);
        if !dominates_node(g, &ds, v) {
            ds.push(v);
        }
        for s in subs.iter_mut() {
            if s.g {
                s.y += eps;
            }
        }
        for s in subs.iter_mut() {
            if neighborhood(g, &s.members)[v] {
                s.g = false;
            }
        }
        let (load, _) = sums(g, &subs);
        residuals.push(load[v] - cap[v]);
        for u in 0..n {
            if order.contains(&u) {
                continue;
            }
            let (_, cnt) = sums(g, &subs);
            if cnt[u] == 0 {
                subs.push(Sub { members: (0..n).map(|x| x != u).collect(), y: 0.0, g: true });
            }
        }
    }
    ds.sort_unstable();
    let singleton_y: Vec<f64> = subs[..n].iter().map(|s| s.y).collect();
    NaiveRun {
        chosen: ds,
        order,
        lower_bound: singleton_y.iter().sum(),
        singleton_y,
        packed_residuals: residuals,
        final_subsets: subs.len(),
    }
}

fn dominates_node(g: &UnitDiskGraph, set: &[usize], v: usize) -> bool {
    set.iter().any(|&u| u == v || g.dist(u, v) <= 1.0)
}

pub fn naive_cds(g: &UnitDiskGraph, w: &[f64], ds: &[usize]) -> NaiveRun {
    let n = g.n();
    let cap: Vec<f64> = w.iter().map(|x| 0.99 * x).collect();
    let mut ds = ds.to_vec();
    ds.sort_unstable();
    let mut subs: Vec<Sub> = ds
        .iter()
        .map(|&v| Sub { members: (0..n).map(|u| u == v).collect(), y: 99.0 / 500.0 * (w[v] - 2.0), g: true })
        .collect();
    let mut cds = ds.clone();
    let mut order = Vec::new();
    let mut residuals = Vec::new();
    while subs.iter().filter(|s| s.g).count() > 1 {
        let (load, cnt) = sums(g, &subs);
        let (v, eps) = pick(&cap, &load, &cnt);
        order.push(v);
        let s1: Vec<usize> =
            (0..subs.len()).filter(|&i| subs[i].g && neighborhood(g, &subs[i].members)[v]).collect();
        if s1.len() > 1 {
            let nbrs_in_cds: Vec<usize> = g.neighbors(v).iter().copied().filter(|x| cds.contains(x)).collect();
            let s2: Vec<usize> =
                s1.iter().copied().filter(|&i| nbrs_in_cds.iter().any(|&x| subs[i].members[x])).collect();
            let mut add = vec![v];
            for &i in s1.iter().filter(|i| !s2.contains(i)) {
                let cands: Vec<usize> = g.neighbors(v).iter().copied().filter(|&x| subs[i].members[x]).collect();
                add.push(cands.iter().copied().find(|x| ds.contains(x)).unwrap_or(cands[0]));
            }
            for x in add {
                if !cds.contains(&x) {
                    cds.push(x);
                }
            }
        }
        for s in subs.iter_mut().filter(|s| s.g) {
            s.y += eps;
        }
        let mut merged: Vec<bool> = (0..n).map(|u| u == v).collect();
        for &i in &s1 {
            subs[i].g = false;
            for (m, &x) in merged.iter_mut().zip(&subs[i].members) {
                *m |= x;
            }
        }
        subs.push(Sub { members: merged, y: 0.0, g: true });
        let (load, _) = sums(g, &subs);
        residuals.push(load[v] - cap[v]);
        assert!(order.len() <= n, "connected phase did not halt");
    }
    cds.sort_unstable();
    let mut singleton_y = vec![0.0; n];
    for (k, &v) in ds.iter().enumerate() {
        singleton_y[v] = subs[k].y;
    }
    NaiveRun {
        chosen: cds,
        order,
        lower_bound: ds.iter().map(|&v| singleton_y[v]).sum(),
        singleton_y,
        packed_residuals: residuals,
        final_subsets: subs.len(),
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

/// Closed tour from `start` through every target, by trying every order.
pub fn perm_tour(start: Point, targets: &[Point]) -> f64 {
    let d = |a: Point, b: Point| ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
    permutations(targets.len())
        .into_iter()
        .map(|p| {
            let mut at = start;
            let mut len = 0.0;
            for &i in &p {
                len += d(at, targets[i]);
                at = targets[i];
            }
            len + d(at, start)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Minimum weight connected dominating set over all subsets.
pub fn naive_mwcds(g: &UnitDiskGraph, w: &[f64]) -> f64 {
    let n = g.n();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        let weight: f64 = set.iter().map(|&v| w[v]).sum();
        if weight < best && dominates(g, &set) && induced_connected(g, &set) {
            best = weight;
        }
    }
    best
}

pub struct NaiveMule {
    pub cost: f64,
    pub mule: usize,
    pub backbone: Vec<usize>,
}

/// Exact gathering-tree optimum: every parent assignment that forms a tree
/// over unit-disk edges, every MULE node.
pub fn naive_mule(g: &UnitDiskGraph) -> NaiveMule {
    let n = g.n();
    let mut tour = vec![vec![f64::NAN; 1 << n]; n];
    let mut best = NaiveMule { cost: f64::INFINITY, mule: 0, backbone: Vec::new() };
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| (0..n).filter(|&u| u != v && g.dist(u, v) <= 1.0).collect()).collect();
    for root in 0..n {
        let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        let mut choice = vec![0usize; others.len()];
        'outer: loop {
            let mut parent = vec![usize::MAX; n];
            for (k, &v) in others.iter().enumerate() {
                parent[v] = nbrs[v][choice[k]];
            }
            let reaches_root = others.iter().all(|&v| {
                let mut x = v;
                for _ in 0..n {
                    if x == root {
                        return true;
                    }
                    x = parent[x];
                }
                false
            });
            if reaches_root {
                let mut child_mask = vec![0usize; n];
                for &v in &others {
                    child_mask[parent[v]] |= 1 << v;
                }
                for (m, tour) in tour.iter_mut().enumerate() {
                    let cost: f64 = child_mask
                        .iter()
                        .map(|&c| {
                            if tour[c].is_nan() {
                                let pts: Vec<Point> = (0..n).filter(|&u| c & (1 << u) != 0).map(|u| g.point(u)).collect();
                                tour[c] = perm_tour(g.point(m), &pts);
                            }
                            tour[c]
                        })
                        .sum();
                    if cost < best.cost {
                        let backbone = (0..n).filter(|&v| child_mask[v] != 0).collect();
                        best = NaiveMule { cost, mule: m, backbone };
                    }
                }
            }
            for k in 0..choice.len() {
                choice[k] += 1;
                if choice[k] < nbrs[others[k]].len() {
                    continue 'outer;
                }
                choice[k] = 0;
            }
            break;
        }
    }
    best
}
