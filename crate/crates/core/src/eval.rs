//! F1 scoring against ground truth and batch experiments over a catalog of
//! known communities.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{detect, detect_against_truth, DetectParams, TruncationMode};
use crate::error::{Error, Result};
use crate::graph::{Graph, GroundTruthCatalog, VertexSet};
use crate::seeding::{select_seeds_with, SeedSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision, recall and their harmonic mean for a detected set against a
/// ground-truth set. Disjoint sets score 0.
pub fn f1_score(detected: &VertexSet, truth: &VertexSet) -> Result<ScoreReport> {
    if detected.is_empty() || truth.is_empty() {
        return Err(Error::EmptySet);
    }
    let common = detected.intersection_len(truth) as f64;
    let precision = common / detected.len() as f64;
    let recall = common / truth.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(ScoreReport { f1, precision, recall })
}

/// How each trial turns a seed set into a community.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Sweep-based size and stop rule, no ground truth used.
    Auto,
    /// Sweep-based stop rule, community cut at the true size.
    TruthSize,
    /// Reseed up to the true size and keep the best-F1 iteration.
    #[default]
    BestF1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: usize,
    /// Index of the sampled community in the catalog.
    pub community: usize,
    pub truth_size: usize,
    pub seeds: Vec<u64>,
    pub detected_size: usize,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub conductance: Option<f64>,
    pub iterations: usize,
    pub runtime_ms: f64,
    /// Detection found no feasible iteration; scored as zero.
    pub infeasible: bool,
    pub seed_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub trials: usize,
    pub mean_f1: f64,
    pub std_f1: f64,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_runtime_ms: f64,
    pub max_runtime_ms: f64,
    /// Fewer than two trials; the deviation is reported as 0.
    pub degenerate: bool,
    pub reports: Vec<TrialReport>,
}

/// Sample mean and standard deviation (n − 1 denominator, 0 for n = 1).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl BatchStats {
    pub fn from_reports(reports: Vec<TrialReport>) -> Result<Self> {
        if reports.is_empty() {
            return Err(Error::InvalidParameter("a batch needs at least one trial".into()));
        }
        let col = |f: fn(&TrialReport) -> f64| reports.iter().map(f).collect::<Vec<_>>();
        let (mean_f1, std_f1) = mean_std(&col(|r| r.f1));
        let runtimes = col(|r| r.runtime_ms);
        Ok(BatchStats {
            trials: reports.len(),
            mean_f1,
            std_f1,
            mean_precision: mean_std(&col(|r| r.precision)).0,
            mean_recall: mean_std(&col(|r| r.recall)).0,
            mean_runtime_ms: mean_std(&runtimes).0,
            max_runtime_ms: runtimes.iter().copied().fold(0.0, f64::max),
            degenerate: reports.len() < 2,
            reports,
        })
    }
}

/// Tries per trial to find a community the seeding strategy can handle.
const SEEDING_ATTEMPTS: usize = 100;

/// Runs `trials` independent detections. Trial `t` draws its community
/// (with replacement) and its seeds from an RNG stream keyed by
/// `(rng_seed, t)`, so results do not depend on scheduling. Trials run on
/// the current rayon pool.
pub fn run_batch(
    g: &Graph,
    catalog: &GroundTruthCatalog,
    seeding: &SeedSpec,
    params: &DetectParams,
    protocol: Protocol,
    trials: usize,
    rng_seed: u64,
) -> Result<BatchStats> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    params.validate()?;
    let mut params = params.clone();
    params.avg_community_size.get_or_insert(catalog.avg_size());
    params.truncation = match protocol {
        Protocol::TruthSize => TruncationMode::GroundTruthSize,
        _ => TruncationMode::Auto,
    };
    let reports = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(g, catalog, seeding, &params, protocol, t, rng_seed))
        .collect::<Result<Vec<_>>>()?;
    BatchStats::from_reports(reports)
}

fn run_trial(
    g: &Graph,
    catalog: &GroundTruthCatalog,
    seeding: &SeedSpec,
    params: &DetectParams,
    protocol: Protocol,
    trial: usize,
    rng_seed: u64,
) -> Result<TrialReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(trial as u64);
    let mut last_err = None;
    for _ in 0..SEEDING_ATTEMPTS {
        let community = rng.gen_range(0..catalog.len());
        let truth = &catalog.communities()[community];
        let selection = match select_seeds_with(g, truth, seeding.strategy, seeding.count, &mut rng) {
            Ok(sel) => sel,
            Err(e @ (Error::NoTriangle | Error::NotEnoughMembers { .. })) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let seeds = &selection.seeds;
        let start = Instant::now();
        let result = match protocol {
            Protocol::BestF1 => detect_against_truth(g, seeds, params, truth)?,
            _ => detect(g, seeds, params, Some(truth.len()))?,
        };
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let score = if result.members.is_empty() {
            ScoreReport {
                f1: 0.0,
                precision: 0.0,
                recall: 0.0,
            }
        } else {
            f1_score(&result.members, truth)?
        };
        return Ok(TrialReport {
            trial,
            community,
            truth_size: truth.len(),
            seeds: seeds.iter().map(|v| g.label(v)).collect(),
            detected_size: result.members.len(),
            f1: score.f1,
            precision: score.precision,
            recall: score.recall,
            conductance: result.phi_at_chosen.is_finite().then_some(result.phi_at_chosen),
            iterations: result.iterations,
            runtime_ms,
            infeasible: result.status.infeasible,
            seed_fallback: selection.fallback,
        });
    }
    Err(last_err.expect("at least one seeding attempt"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

pub const CSV_HEADER: [&str; 14] = [
    "kind",
    "trial",
    "community",
    "truth_size",
    "seeds",
    "detected_size",
    "f1",
    "precision",
    "recall",
    "conductance",
    "iterations",
    "runtime_ms",
    "infeasible",
    "seed_fallback",
];

/// Writes the batch as pretty JSON, or as CSV with one row per trial and a
/// trailing `summary` row holding the means. Floats use the shortest
/// representation that parses back to the same value.
pub fn export_report<W: Write>(stats: &BatchStats, format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, stats)?;
            out.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in &stats.reports {
                let seeds: Vec<String> = r.seeds.iter().map(u64::to_string).collect();
                w.write_record([
                    "trial".to_string(),
                    r.trial.to_string(),
                    r.community.to_string(),
                    r.truth_size.to_string(),
                    seeds.join(";"),
                    r.detected_size.to_string(),
                    r.f1.to_string(),
                    r.precision.to_string(),
                    r.recall.to_string(),
                    r.conductance.map(|c| c.to_string()).unwrap_or_default(),
                    r.iterations.to_string(),
                    r.runtime_ms.to_string(),
                    r.infeasible.to_string(),
                    r.seed_fallback.to_string(),
                ])?;
            }
            w.write_record([
                "summary".to_string(),
                stats.trials.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                stats.mean_f1.to_string(),
                stats.mean_precision.to_string(),
                stats.mean_recall.to_string(),
                String::new(),
                String::new(),
                stats.mean_runtime_ms.to_string(),
                String::new(),
                String::new(),
            ])?;
            w.flush()?;
        }
    }
    Ok(())
}
