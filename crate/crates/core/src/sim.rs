//! Experiment sweeps over square areas and node densities, written as CSV.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom_graph::{generate_random_udg, GenParams, Point, UnitDiskGraph};
use crate::oracles::epsilon_estimate;
use crate::tour_cost::solution_cost;
use crate::tree_builder::{build_gathering_tree_with, MuleParams, MulePolicy, MuleSolution};

/// Bumped whenever a column is added, removed or reinterpreted.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Column order of every sweep CSV.
pub const CSV_COLUMNS: [&str; 19] = [
    "area",
    "density",
    "replicate",
    "seed",
    "n",
    "diameter",
    "alpha_valid",
    "lb_valid",
    "mule",
    "cds_size",
    "weight_cds",
    "lb",
    "alpha",
    "avg_cds_distance",
    "epsilon_hat",
    "one_plus_epsilon_hat",
    "solution_cost",
    "cost_exact",
    "runtime_ms",
];

/// Written in place of undefined estimator values.
pub const NA: &str = "NA";

pub const DEFAULT_AREAS: [f64; 3] = [4.0, 16.0, 36.0];
pub const DEFAULT_DENSITIES: [f64; 5] = [2.5, 5.0, 10.0, 20.0, 40.0];
pub const DEFAULT_AREA_SWEEP_AREAS: [f64; 7] = [4.0, 9.0, 16.0, 25.0, 36.0, 49.0, 64.0];
pub const DEFAULT_AREA_SWEEP_DENSITIES: [f64; 3] = [2.5, 10.0, 40.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    DensitySweep,
    AreaSweep,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::DensitySweep => "density-sweep",
            SweepMode::AreaSweep => "area-sweep",
        }
    }
}

/// MULE placement in sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepPolicy {
    FullScan,
    /// The node nearest the center of the square.
    #[default]
    CenterNode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub mode: SweepMode,
    /// Square areas in units².
    pub areas: Vec<f64>,
    /// Expected nodes per unit².
    pub densities: Vec<f64>,
    pub seeds_per_cell: u32,
    pub r_m: f64,
    pub policy: SweepPolicy,
    pub base_seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub max_rejections: u32,
}

impl SweepSpec {
    pub fn density_sweep() -> Self {
        SweepSpec {
            mode: SweepMode::DensitySweep,
            areas: DEFAULT_AREAS.to_vec(),
            densities: DEFAULT_DENSITIES.to_vec(),
            seeds_per_cell: 5,
            r_m: MuleParams::DEFAULT_RANGE,
            policy: SweepPolicy::CenterNode,
            base_seed: 1,
            jobs: 0,
            max_rejections: GenParams::DEFAULT_MAX_REJECTIONS,
        }
    }

    pub fn area_sweep() -> Self {
        SweepSpec {
            mode: SweepMode::AreaSweep,
            areas: DEFAULT_AREA_SWEEP_AREAS.to_vec(),
            densities: DEFAULT_AREA_SWEEP_DENSITIES.to_vec(),
            ..Self::density_sweep()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.areas.is_empty() || self.densities.is_empty() {
            return Err(Error::InvalidInput("area and density lists must be nonempty".into()));
        }
        if self.seeds_per_cell == 0 {
            return Err(Error::InvalidInput("seeds per cell must be positive".into()));
        }
        if let Some(x) = self.areas.iter().chain(&self.densities).find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidInput(format!("areas and densities must be positive, got {x}")));
        }
        MuleParams::new(self.r_m)?;
        Ok(())
    }

    /// Cells in output order: area, then density, then replicate.
    pub fn cells(&self) -> Vec<(f64, f64, u32)> {
        let mut areas = self.areas.clone();
        let mut densities = self.densities.clone();
        areas.sort_by(f64::total_cmp);
        densities.sort_by(f64::total_cmp);
        areas.dedup();
        densities.dedup();
        let mut out = Vec::new();
        for &a in &areas {
            for &d in &densities {
                for k in 0..self.seeds_per_cell {
                    out.push((a, d, k));
                }
            }
        }
        out
    }
}

/// Per-cell seed: a SplitMix64 mix of the base seed, the cell coordinates
/// and the replicate index.
pub fn cell_seed(base_seed: u64, area: f64, density: f64, replicate: u32) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    [area.to_bits(), density.to_bits(), u64::from(replicate)]
        .into_iter()
        .fold(mix(base_seed), |h, x| mix(h ^ x))
}

fn serialize_na<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str(NA),
    }
}

fn deserialize_na<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    let s = String::deserialize(d)?;
    if s == NA {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub area: f64,
    pub density: f64,
    pub replicate: u32,
    pub seed: u64,
    pub n: usize,
    pub diameter: usize,
    pub alpha_valid: bool,
    pub lb_valid: bool,
    pub mule: usize,
    pub cds_size: usize,
    pub weight_cds: f64,
    pub lb: f64,
    pub alpha: f64,
    pub avg_cds_distance: f64,
    #[serde(serialize_with = "serialize_na", deserialize_with = "deserialize_na")]
    pub epsilon_hat: Option<f64>,
    #[serde(serialize_with = "serialize_na", deserialize_with = "deserialize_na")]
    pub one_plus_epsilon_hat: Option<f64>,
    pub solution_cost: f64,
    pub cost_exact: bool,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub area: f64,
    pub density: f64,
    pub replicate: u32,
    pub seed: u64,
    pub message: String,
}

/// Result of one cell, with the graph and solution kept for callers that
/// check further properties.
#[derive(Debug, Clone)]
pub struct CellRun {
    pub record: SweepRecord,
    pub graph: UnitDiskGraph,
    pub solution: MuleSolution,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub runs: Vec<CellRun>,
    pub failures: Vec<CellFailure>,
}

impl SweepOutcome {
    pub fn records(&self) -> Vec<SweepRecord> {
        self.runs.iter().map(|r| r.record.clone()).collect()
    }
}

/// Generates, solves and costs a single cell.
pub fn run_cell(spec: &SweepSpec, area: f64, density: f64, replicate: u32) -> Result<CellRun> {
    let seed = cell_seed(spec.base_seed, area, density, replicate);
    let gen = GenParams { max_rejections: spec.max_rejections, ..GenParams::from_area(area, density, seed) };
    let g = generate_random_udg(&gen)?;
    let params = MuleParams::new(spec.r_m)?;
    let policy = match spec.policy {
        SweepPolicy::FullScan => MulePolicy::FullScan,
        SweepPolicy::CenterNode => {
            let half = gen.area_side / 2.0;
            MulePolicy::Fixed(g.nearest_node(Point::new(half, half)))
        }
    };
    let started = Instant::now();
    let solution = build_gathering_tree_with(&g, &params, policy)?;
    let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    let cost = solution_cost(&g, &solution.tree, solution.mule)?;
    let eps = epsilon_estimate(&solution.cds, solution.mule, &g, solution.constants.c);
    let record = SweepRecord {
        area,
        density,
        replicate,
        seed,
        n: g.n(),
        diameter: solution.diameter,
        alpha_valid: solution.alpha_valid,
        lb_valid: solution.lb_valid,
        mule: solution.mule,
        cds_size: solution.cds.len(),
        weight_cds: solution.weight_cds,
        lb: solution.lower_bound,
        alpha: solution.alpha,
        avg_cds_distance: eps.average_distance,
        epsilon_hat: eps.epsilon,
        one_plus_epsilon_hat: eps.epsilon.map(|e| 1.0 + e),
        solution_cost: cost.total,
        cost_exact: cost.exact,
        runtime_ms,
    };
    Ok(CellRun { record, graph: g, solution })
}

/// Runs every cell, concurrently up to `spec.jobs`, and returns them in
/// cell order. Failed cells are collected and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let cells = spec.cells();
    let results: Vec<_> = pool.install(|| {
        cells.par_iter().map(|&(a, d, k)| ((a, d, k), run_cell(spec, a, d, k))).collect()
    });
    let mut out = SweepOutcome::default();
    for ((area, density, replicate), r) in results {
        match r {
            Ok(run) => out.runs.push(run),
            Err(e) => out.failures.push(CellFailure {
                area,
                density,
                replicate,
                seed: cell_seed(spec.base_seed, area, density, replicate),
                message: e.to_string(),
            }),
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(mode: SweepMode, records: &[SweepRecord], mut out: W) -> Result<()> {
    writeln!(out, "# mule-gather sweep schema v{CSV_SCHEMA_VERSION} mode={}", mode.name())?;
    // The header comes from the record's field names, which equal CSV_COLUMNS.
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a sweep CSV, checking the schema comment and the header.
pub fn read_csv<R: std::io::BufRead>(mut input: R) -> Result<(SweepMode, Vec<SweepRecord>)> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let first = first.trim_end();
    let prefix = format!("# mule-gather sweep schema v{CSV_SCHEMA_VERSION} mode=");
    let mode = match first.strip_prefix(&prefix) {
        Some("density-sweep") => SweepMode::DensitySweep,
        Some("area-sweep") => SweepMode::AreaSweep,
        _ => return Err(Error::Parse { line: 1, msg: format!("unexpected schema line {first:?}") }),
    };
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Parse { line: 2, msg: format!("unexpected header {header:?}") });
    }
    let records = r.deserialize().collect::<std::result::Result<Vec<SweepRecord>, _>>()?;
    Ok((mode, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> SweepSpec {
        SweepSpec { areas: vec![4.0], densities: vec![5.0], seeds_per_cell: 2, ..SweepSpec::density_sweep() }
    }

    #[test]
    fn seeds_are_distinct_per_cell() {
        let a = cell_seed(1, 4.0, 10.0, 0);
        assert_ne!(a, cell_seed(1, 4.0, 10.0, 1));
        assert_ne!(a, cell_seed(1, 16.0, 10.0, 0));
        assert_ne!(a, cell_seed(2, 4.0, 10.0, 0));
        assert_eq!(a, cell_seed(1, 4.0, 10.0, 0));
    }

    #[test]
    fn empty_lists_are_rejected() {
        let spec = SweepSpec { densities: vec![], ..SweepSpec::density_sweep() };
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn csv_round_trip() {
        let out = run_sweep(&tiny_spec()).unwrap();
        assert_eq!(out.runs.len(), 2);
        let mut buf = Vec::new();
        write_csv(SweepMode::DensitySweep, &out.records(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# mule-gather sweep schema v1 mode=density-sweep\narea,density,"));
        let (mode, back) = read_csv(buf.as_slice()).unwrap();
        assert_eq!(mode, SweepMode::DensitySweep);
        assert_eq!(back, out.records());
    }

    #[test]
    fn undefined_estimate_is_marked() {
        let mut out = run_sweep(&tiny_spec()).unwrap().records();
        out[0].epsilon_hat = None;
        out[0].one_plus_epsilon_hat = None;
        let mut buf = Vec::new();
        write_csv(SweepMode::AreaSweep, &out, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(2).unwrap().contains(",NA,NA,"));
        assert_eq!(read_csv(buf.as_slice()).unwrap().1[0].epsilon_hat, None);
    }
}
