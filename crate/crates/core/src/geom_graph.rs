//! Planar point sets and unit disk graphs.
//!
//! Two nodes are adjacent iff their Euclidean distance is at most 1 (the
//! sensor transmission range). Graphs are immutable once built and are
//! cheap to share across threads.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transmission range of every sensor.
pub const UNIT_RANGE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A unit disk graph over an indexed list of points.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDiskGraph {
    points: Vec<Point>,
    adj: Vec<Vec<usize>>,
}

impl UnitDiskGraph {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, v: usize) -> Point {
        self.points[v]
    }

    /// Neighbors of `v` in ascending index order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn dist(&self, u: usize, v: usize) -> f64 {
        self.points[u].dist(&self.points[v])
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Node closest to `p`; lowest index wins ties.
    pub fn nearest_node(&self, p: Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, q) in self.points.iter().enumerate() {
            let d = q.dist(&p);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Center of the axis-aligned bounding box of the points.
    pub fn bounding_box_center(&self) -> Point {
        let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
        let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo_x = lo_x.min(p.x);
            lo_y = lo_y.min(p.y);
            hi_x = hi_x.max(p.x);
            hi_y = hi_y.max(p.y);
        }
        Point::new((lo_x + hi_x) / 2.0, (lo_y + hi_y) / 2.0)
    }
}

/// Builds the unit disk graph of `points`.
pub fn make_graph(points: Vec<Point>) -> Result<UnitDiskGraph> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point list".into()));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(format!("point {i} has a non-finite coordinate")));
    }
    let n = points.len();
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in (u + 1)..n {
            if points[u].dist(&points[v]) <= UNIT_RANGE {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    // Pushes happen in increasing order of the partner index, so every list
    // is already sorted.
    Ok(UnitDiskGraph { points, adj })
}

/// Parameters of the uniform random generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    /// Side length of the square `[0, side]²`.
    pub area_side: f64,
    /// Expected nodes per unit area.
    pub density: f64,
    pub seed: u64,
    pub max_rejections: u32,
}

impl GenParams {
    pub const DEFAULT_MAX_REJECTIONS: u32 = 10_000;

    pub fn new(area_side: f64, density: f64, seed: u64) -> Self {
        GenParams {
            area_side,
            density,
            seed,
            max_rejections: Self::DEFAULT_MAX_REJECTIONS,
        }
    }

    /// Parameters for a square of the given area (units²).
    pub fn from_area(area: f64, density: f64, seed: u64) -> Self {
        Self::new(area.sqrt(), density, seed)
    }

    pub fn node_count(&self) -> usize {
        (self.density * self.area_side * self.area_side).round() as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.area_side.is_finite() && self.area_side > 0.0) {
            return Err(Error::InvalidInput(format!("area side must be positive, got {}", self.area_side)));
        }
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(Error::InvalidInput(format!("density must be positive, got {}", self.density)));
        }
        if self.node_count() == 0 {
            return Err(Error::NoNodes { area: self.area_side * self.area_side, density: self.density });
        }
        Ok(())
    }
}

/// Uniform double in `[0, 1)` from the top 53 bits of a 64-bit draw.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `round(density · side²)` uniform points on the square and keeps
/// resampling the whole point set until the unit disk graph is connected.
///
/// The random source is ChaCha8 seeded with `seed` through
/// `SeedableRng::seed_from_u64`, so output is identical on every platform.
pub fn generate_random_udg(params: &GenParams) -> Result<UnitDiskGraph> {
    params.validate()?;
    let n = params.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..params.max_rejections {
        let points: Vec<Point> = (0..n)
            .map(|_| {
                let x = unit_f64(&mut rng) * params.area_side;
                let y = unit_f64(&mut rng) * params.area_side;
                Point::new(x, y)
            })
            .collect();
        let g = make_graph(points)?;
        if is_connected(&g) {
            return Ok(g);
        }
    }
    Err(Error::GenerationFailed { attempts: params.max_rejections })
}

fn bfs_hops(g: &UnitDiskGraph, source: usize) -> Vec<Option<usize>> {
    let mut hops = vec![None; g.n()];
    hops[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let h = hops[u].unwrap_or(0);
        for &v in g.neighbors(u) {
            if hops[v].is_none() {
                hops[v] = Some(h + 1);
                queue.push_back(v);
            }
        }
    }
    hops
}

pub fn is_connected(g: &UnitDiskGraph) -> bool {
    bfs_hops(g, 0).iter().all(Option::is_some)
}

/// Largest BFS hop distance over all node pairs.
pub fn hop_diameter(g: &UnitDiskGraph) -> Result<usize> {
    let mut diameter = 0;
    for s in 0..g.n() {
        for h in bfs_hops(g, s) {
            diameter = diameter.max(h.ok_or(Error::Disconnected)?);
        }
    }
    Ok(diameter)
}

pub fn max_degree(g: &UnitDiskGraph) -> usize {
    (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0)
}

/// BFS predecessor map over the subgraph induced by `subset`, rooted at
/// `root`. Entry `v` is `Some(p)` for every member other than the root and
/// `None` for the root and for non-members. Neighbors are explored in
/// ascending index order.
pub fn bfs_parents(g: &UnitDiskGraph, subset: &[usize], root: usize) -> Result<Vec<Option<usize>>> {
    let n = g.n();
    let mut member = vec![false; n];
    for &v in subset {
        if v >= n {
            return Err(Error::InvalidInput(format!("node {v} out of range")));
        }
        member[v] = true;
    }
    if root >= n || !member[root] {
        return Err(Error::RootNotInSubset(root));
    }
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut reached = 1;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if member[v] && !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    let members = member.iter().filter(|&&m| m).count();
    if reached != members {
        return Err(Error::InducedDisconnected);
    }
    Ok(parent)
}

/// Serializes the point list: `n` on the first line, then `<index> <x> <y>`.
/// Coordinates use the shortest round-trip decimal form.
pub fn to_text(g: &UnitDiskGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", g.n());
    for (i, p) in g.points().iter().enumerate() {
        let _ = writeln!(out, "{i} {:?} {:?}", p.x, p.y);
    }
    out
}

pub fn write_graph<W: Write>(g: &UnitDiskGraph, mut w: W) -> Result<()> {
    w.write_all(to_text(g).as_bytes())?;
    Ok(())
}

/// Parses the text format written by [`write_graph`]. Blank lines are
/// ignored; every index in `0..n` must appear exactly once.
pub fn read_graph<R: BufRead>(r: R) -> Result<UnitDiskGraph> {
    let mut lines = r
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));

    let (line_no, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing node count".into() })?;
    let n: usize = header?
        .trim()
        .parse()
        .map_err(|e| Error::Parse { line: line_no, msg: format!("bad node count: {e}") })?;
    if n == 0 {
        return Err(Error::Parse { line: line_no, msg: "node count must be positive".into() });
    }

    let mut points: Vec<Option<Point>> = vec![None; n];
    for _ in 0..n {
        let (line_no, line) = lines
            .next()
            .ok_or(Error::Parse { line: line_no + 1, msg: format!("expected {n} point lines") })?;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |msg: String| Error::Parse { line: line_no, msg };
        if fields.len() != 3 {
            return Err(parse_err(format!("expected `<index> <x> <y>`, got {} fields", fields.len())));
        }
        let idx: usize = fields[0].parse().map_err(|e| parse_err(format!("bad index: {e}")))?;
        let x: f64 = fields[1].parse().map_err(|e| parse_err(format!("bad x: {e}")))?;
        let y: f64 = fields[2].parse().map_err(|e| parse_err(format!("bad y: {e}")))?;
        if idx >= n {
            return Err(parse_err(format!("index {idx} out of range")));
        }
        if points[idx].is_some() {
            return Err(parse_err(format!("duplicate index {idx}")));
        }
        points[idx] = Some(Point::new(x, y));
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::Parse { line: line_no, msg: "trailing content after point list".into() });
    }
    make_graph(points.into_iter().map(|p| p.expect("all indices filled")).collect())
}
