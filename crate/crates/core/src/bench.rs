//! Replicated simulation grid: scenarios x estimators x sample sizes.
//!
//! Within a cell every estimator sees the same simulated datasets, and the
//! replication seeds depend only on `(base_seed, scenario, n, replication)`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate, estimate_from_counts, EstimateParams, EstimatorKind, DEFAULT_K};
use crate::knn::{neighbor_counts, SearchStrategy};
use crate::numerics::mean;
use crate::simulators::{generate, truth, Scenario, ScenarioSpec};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub scenarios: Vec<Scenario>,
    pub estimators: Vec<EstimatorKind>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub k: usize,
    pub base_seed: u64,
    pub clamp: bool,
    #[serde(default)]
    pub strategy: SearchStrategy,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            scenarios: Scenario::ALL.to_vec(),
            estimators: vec![
                EstimatorKind::Proposed,
                EstimatorKind::Fp,
                EstimatorKind::Ravk1,
                EstimatorKind::Ravk2,
            ],
            n_grid: (1..=10).map(|i| i * 100).collect(),
            replications: 100,
            k: DEFAULT_K,
            base_seed: 0,
            clamp: false,
            strategy: SearchStrategy::Auto,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Domain("replications must be at least 1".into()));
        }
        if self.scenarios.is_empty() || self.estimators.is_empty() || self.n_grid.is_empty() {
            return Err(Error::Domain("scenarios, estimators and n grid must be nonempty".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n <= self.k) {
            return Err(Error::InvalidK { k: self.k, n });
        }
        Ok(())
    }

    fn params(&self) -> EstimateParams {
        EstimateParams {
            k: self.k,
            clamp: self.clamp,
            strategy: self.strategy,
            ..EstimateParams::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Sample variance (`n - 1` denominator); 0 for a single value.
    pub variance: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self> {
        let m = mean(values)?;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let dev: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
        let variance = if values.len() > 1 {
            mean(&dev)? * values.len() as f64 / (values.len() - 1) as f64
        } else {
            0.0
        };
        let q = |p| quantile_sorted(&sorted, p);
        Ok(Self {
            mean: m,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            variance,
            q05: q(0.05),
            q25: q(0.25),
            q50: q(0.50),
            q75: q(0.75),
            q95: q(0.95),
        })
    }
}

/// Linear interpolation between order statistics at position `p * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        // clamped so rounding never leaves [sorted[lo], sorted[hi]]
        (sorted[lo] + frac * (sorted[hi] - sorted[lo])).clamp(sorted[lo], sorted[hi])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub scenario: Scenario,
    pub estimator: EstimatorKind,
    pub n: usize,
    pub truth: f64,
    pub seeds: Vec<u64>,
    /// One estimate per replication, in seed order; empty when the cell failed.
    pub raw: Vec<f64>,
    pub summary: Option<Summary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub config: BenchConfig,
    pub cells: Vec<CellReport>,
}

impl BenchReport {
    pub fn cell(&self, scenario: Scenario, estimator: EstimatorKind, n: usize) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.estimator == estimator && c.n == n)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Dataset seed for one replication; independent of the estimator.
pub fn replication_seed(base_seed: u64, scenario: Scenario, n: usize, replication: usize) -> u64 {
    [scenario.code(), n as u64, replication as u64]
        .iter()
        .fold(splitmix64(base_seed), |h, &v| splitmix64(h ^ splitmix64(v)))
}

/// Runs every configured estimator on the datasets drawn from `seeds`,
/// returning one cell per estimator in configuration order.
pub fn run_replications(config: &BenchConfig, scenario: Scenario, n: usize, seeds: &[u64]) -> Vec<CellReport> {
    let params = config.params();
    let per_rep: Vec<Vec<Result<f64>>> = seeds
        .par_iter()
        .map(|&seed| {
            let drawn = generate(&ScenarioSpec { id: scenario, n, seed });
            let (ds, roles) = match drawn {
                Ok(d) => d,
                Err(e) => return config.estimators.iter().map(|_| Err(Error::Domain(e.to_string()))).collect(),
            };
            let needs_counts = config.estimators.iter().any(|&e| e != EstimatorKind::KlEntropy);
            let counts = if needs_counts {
                Some(neighbor_counts(&ds, &roles, params.k, params.strategy))
            } else {
                None
            };
            config
                .estimators
                .iter()
                .map(|&kind| match (&counts, kind) {
                    (_, EstimatorKind::KlEntropy) => estimate(kind, &ds, &roles, params).map(|r| r.estimate),
                    (Some(Ok(c)), _) => estimate_from_counts(kind, c, params).map(|r| r.estimate),
                    (Some(Err(e)), _) => Err(Error::Domain(e.to_string())),
                    (None, _) => unreachable!("counts are computed whenever a count-based estimator is configured"),
                })
                .collect()
        })
        .collect();

    let truth_value = truth(scenario).value;
    config
        .estimators
        .iter()
        .enumerate()
        .map(|(e, &estimator)| {
            let mut cell = CellReport {
                scenario,
                estimator,
                n,
                truth: truth_value,
                seeds: seeds.to_vec(),
                raw: Vec::new(),
                summary: None,
                error: None,
            };
            let outcome: Result<Vec<f64>> = per_rep
                .iter()
                .enumerate()
                .map(|(rep, results)| match &results[e] {
                    Ok(v) => Ok(*v),
                    Err(err) => Err(Error::Domain(format!("replication {rep}: {err}"))),
                })
                .collect();
            match outcome.and_then(|raw| Summary::of(&raw).map(|s| (raw, s))) {
                Ok((raw, summary)) => {
                    cell.raw = raw;
                    cell.summary = Some(summary);
                }
                Err(err) => {
                    log::warn!("{scenario} / {estimator} / n = {n}: {err}");
                    cell.error = Some(err.to_string());
                }
            }
            cell
        })
        .collect()
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let mut cells = Vec::new();
    for &scenario in &config.scenarios {
        for &n in &config.n_grid {
            let seeds: Vec<u64> = (0..config.replications)
                .map(|rep| replication_seed(config.base_seed, scenario, n, rep))
                .collect();
            log::info!("{scenario}, n = {n}: {} replications", seeds.len());
            cells.extend(run_replications(config, scenario, n, &seeds));
        }
    }
    Ok(BenchReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: config.clone(),
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Domain(format!("unknown report format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: [&str; 18] = [
    "record",
    "scenario",
    "estimator",
    "n",
    "replication",
    "seed",
    "estimate",
    "truth",
    "mean",
    "min",
    "max",
    "variance",
    "q05",
    "q25",
    "q50",
    "q75",
    "q95",
    "error",
];

/// Writes the report. CSV has one `raw` row per replication and one
/// `summary` row per cell, sharing a single header.
pub fn export_report<W: Write>(report: &BenchReport, format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            out.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for cell in &report.cells {
                let (scenario, estimator, n) = (cell.scenario.to_string(), cell.estimator.to_string(), cell.n.to_string());
                let truth = cell.truth.to_string();
                for (rep, v) in cell.raw.iter().enumerate() {
                    let mut row = vec![String::new(); CSV_HEADER.len()];
                    row[0] = "raw".into();
                    row[1].clone_from(&scenario);
                    row[2].clone_from(&estimator);
                    row[3].clone_from(&n);
                    row[4] = rep.to_string();
                    row[5] = cell.seeds[rep].to_string();
                    row[6] = v.to_string();
                    row[7].clone_from(&truth);
                    w.write_record(&row)?;
                }
                let mut row = vec![String::new(); CSV_HEADER.len()];
                row[0] = "summary".into();
                row[1] = scenario;
                row[2] = estimator;
                row[3] = n;
                row[7] = truth;
                if let Some(s) = &cell.summary {
                    let stats = [s.mean, s.min, s.max, s.variance, s.q05, s.q25, s.q50, s.q75, s.q95];
                    for (slot, v) in row[8..17].iter_mut().zip(stats) {
                        *slot = v.to_string();
                    }
                }
                row[17] = cell.error.clone().unwrap_or_default();
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn report_to_string(report: &BenchReport, format: ReportFormat) -> Result<String> {
    let mut buf = Vec::new();
    export_report(report, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("report output is UTF-8"))
}

pub fn parse_json_report(text: &str) -> Result<BenchReport> {
    Ok(serde_json::from_str(text)?)
}
