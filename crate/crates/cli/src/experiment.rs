//! Seeded repeated runs, aggregation and baseline comparisons.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use oltr_core::engine::{run_cmgd, run_mgd, run_sim_mgd, References, TrainTest};
use oltr_core::evaluation::{t_test_two_tailed, ComparisonReport};
use oltr_core::letor::{generate_synthetic, load_dataset, normalize_per_query};
use oltr_core::ranking::ReferenceSet;
use oltr_core::{Dataset64, RunTrace64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, Condition, DatasetSource, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::output::{write_json, write_run_curve};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub condition: String,
    pub repeat: usize,
    /// Zero-based fold index.
    pub fold: usize,
    pub seed: u64,
    pub online_performance: f64,
    pub final_offline_ndcg: f64,
    pub switch_impression: Option<usize>,
    pub zero_ideal_queries: usize,
    pub clamped_grades: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineComparison {
    pub online_performance: ComparisonReport,
    pub final_offline_ndcg: ComparisonReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub name: String,
    pub algorithm: Algorithm,
    pub click_model: String,
    pub runs: usize,
    pub online_mean: f64,
    pub online_std: f64,
    pub offline_mean: f64,
    pub offline_std: f64,
    /// Runs in which the cascade switched to the linear model.
    pub switched_runs: usize,
    /// Two-tailed tests of this condition (sample a) against the baseline.
    pub vs_baseline: Option<BaselineComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub baseline: Option<String>,
    pub impressions: usize,
    pub repeats: usize,
    pub base_seed: u64,
    pub folds: usize,
    pub conditions: Vec<ConditionSummary>,
    pub runs: Vec<RunRecord>,
}

impl ExperimentSummary {
    pub fn condition(&self, name: &str) -> Option<&ConditionSummary> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn runs_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a RunRecord> + 'a {
        self.runs.iter().filter(move |r| r.condition == name)
    }

    /// Sorted-key JSON without timestamps; identical inputs give identical
    /// bytes.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("summaries always serialize");
        serde_json::to_string_pretty(&value).expect("values always serialize") + "\n"
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub record: RunRecord,
    pub trace: RunTrace64,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub summary: ExperimentSummary,
    pub results: Vec<RunResult>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub workers: usize,
    /// Per-run traces and the manifest go here as runs finish.
    pub out_dir: Option<PathBuf>,
    pub dump_models: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: default_workers(),
            out_dir: None,
            dump_models: false,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn load_experiment_dataset(cfg: &ExperimentConfig) -> CliResult<Dataset64> {
    let ds = match &cfg.dataset {
        DatasetSource::Path(p) => load_dataset(p, cfg.split)?,
        DatasetSource::Synthetic(spec) => generate_synthetic(spec)?,
    };
    Ok(if cfg.normalize { normalize_per_query(&ds) } else { ds })
}

/// Fold and seed of repeat `r`: folds are assigned round-robin.
pub fn run_slot(r: usize, folds: usize, base_seed: u64) -> (usize, u64) {
    (r % folds, base_seed.wrapping_add(r as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Pending,
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub run_id: String,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub complete: bool,
    pub runs: Vec<ManifestEntry>,
}

struct Job<'a> {
    condition: &'a Condition,
    refs: Option<References<f64>>,
    repeat: usize,
}

fn run_id(condition: &str, repeat: usize) -> String {
    format!("{condition}-{repeat}")
}

fn references_for(c: &Condition) -> CliResult<Option<References<f64>>> {
    if let Some(vectors) = &c.fixed_references {
        let set = ReferenceSet::new(vectors.clone(), c.selection)
            .map_err(|e| CliError::invalid(&format!("conditions[{}].fixed_references", c.name), e))?;
        return Ok(Some(References::Fixed(Arc::new(set))));
    }
    Ok(c.num_references.map(|count| References::Sample {
        count,
        method: c.selection,
    }))
}

fn execute(job: &Job<'_>, ds: &Dataset64, cfg: &ExperimentConfig) -> CliResult<RunResult> {
    let (fold, seed) = run_slot(job.repeat, ds.folds().len(), cfg.base_seed);
    let data = TrainTest::from_fold(ds, fold)?;
    let engine = job.condition.engine_config(&cfg.engine, cfg.record_every);
    let click = job.condition.click_params()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let missing = || CliError::invalid(&format!("conditions[{}].num_references", job.condition.name), "missing");
    let trace = match job.condition.algorithm {
        Algorithm::Mgd => run_mgd(&data, &engine, &click, cfg.impressions, &mut rng)?,
        Algorithm::SimMgd => {
            let refs = job.refs.as_ref().ok_or_else(missing)?;
            run_sim_mgd(&data, &engine, refs, &click, cfg.impressions, &mut rng)?
        }
        Algorithm::Cmgd => {
            let refs = job.refs.as_ref().ok_or_else(missing)?;
            run_cmgd(&data, &engine, refs, &click, cfg.impressions, &mut rng)?
        }
    };
    let record = RunRecord {
        run_id: run_id(&job.condition.name, job.repeat),
        condition: job.condition.name.clone(),
        repeat: job.repeat,
        fold,
        seed,
        online_performance: trace.online_performance,
        final_offline_ndcg: trace.final_offline_ndcg,
        switch_impression: trace.switch_impression,
        zero_ideal_queries: trace.zero_ideal_queries,
        clamped_grades: trace.clamped_grades,
    };
    Ok(RunResult { record, trace })
}

/// Writes one finished run and updates the manifest.
fn persist(
    dir: &Path,
    manifest: &Mutex<Manifest>,
    index: usize,
    outcome: &CliResult<RunResult>,
    dump: bool,
) -> CliResult<()> {
    let runs_dir = dir.join("runs");
    let mut m = manifest.lock().unwrap_or_else(|p| p.into_inner());
    match outcome {
        Ok(result) => {
            write_run_curve(&runs_dir.join(format!("{}.csv", result.record.run_id)), result)?;
            if dump {
                write_json(
                    &runs_dir.join(format!("{}.model.json", result.record.run_id)),
                    &result.trace.final_model,
                )?;
            }
            m.runs[index].status = RunStatus::Complete;
        }
        Err(e) => {
            m.runs[index].status = RunStatus::Failed;
            m.runs[index].error = Some(e.to_string());
        }
    }
    write_json(&dir.join("manifest.json"), &*m)
}

/// Runs every condition `repeats` times. Repeat r of every condition uses
/// the same fold and seed, so conditions are paired run by run.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> CliResult<Experiment> {
    cfg.validate()?;
    let ds = load_experiment_dataset(cfg)?;
    let mut jobs = Vec::with_capacity(cfg.conditions.len() * cfg.repeats);
    for c in &cfg.conditions {
        let refs = references_for(c)?;
        for repeat in 0..cfg.repeats {
            jobs.push(Job {
                condition: c,
                refs: refs.clone(),
                repeat,
            });
        }
    }

    let manifest = Mutex::new(Manifest {
        complete: false,
        runs: jobs
            .iter()
            .map(|j| ManifestEntry {
                run_id: run_id(&j.condition.name, j.repeat),
                status: RunStatus::Pending,
                error: None,
            })
            .collect(),
    });
    if let Some(dir) = &opts.out_dir {
        fs::create_dir_all(dir.join("runs")).map_err(|e| CliError::io(dir, e))?;
        write_json(&dir.join("manifest.json"), &*manifest.lock().unwrap())?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| CliError::invalid("workers", e))?;
    let outcomes: Vec<CliResult<RunResult>> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(i, job)| {
                let outcome = execute(job, &ds, cfg);
                if let Some(dir) = &opts.out_dir {
                    persist(dir, &manifest, i, &outcome, opts.dump_models)?;
                }
                outcome
            })
            .collect()
    });

    let results = outcomes.into_iter().collect::<CliResult<Vec<_>>>()?;
    if let Some(dir) = &opts.out_dir {
        let mut m = manifest.into_inner().unwrap_or_else(|p| p.into_inner());
        m.complete = true;
        write_json(&dir.join("manifest.json"), &m)?;
    }
    let summary = summarize(cfg, ds.folds().len(), &results)?;
    Ok(Experiment { summary, results })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn summarize(cfg: &ExperimentConfig, folds: usize, results: &[RunResult]) -> CliResult<ExperimentSummary> {
    let column = |name: &str, f: fn(&RunRecord) -> f64| -> Vec<f64> {
        results
            .iter()
            .filter(|r| r.record.condition == name)
            .map(|r| f(&r.record))
            .collect()
    };
    let online = |r: &RunRecord| r.online_performance;
    let offline = |r: &RunRecord| r.final_offline_ndcg;
    let mut conditions = Vec::with_capacity(cfg.conditions.len());
    for c in &cfg.conditions {
        let on = column(&c.name, online);
        let off = column(&c.name, offline);
        let (online_mean, online_std) = mean_std(&on);
        let (offline_mean, offline_std) = mean_std(&off);
        let vs_baseline = match &cfg.baseline {
            Some(b) if *b != c.name && on.len() >= 2 => Some(BaselineComparison {
                online_performance: t_test_two_tailed(&on, &column(b, online))?,
                final_offline_ndcg: t_test_two_tailed(&off, &column(b, offline))?,
            }),
            _ => None,
        };
        conditions.push(ConditionSummary {
            name: c.name.clone(),
            algorithm: c.algorithm,
            click_model: c.click_params()?.name.to_string(),
            runs: on.len(),
            online_mean,
            online_std,
            offline_mean,
            offline_std,
            switched_runs: results
                .iter()
                .filter(|r| r.record.condition == c.name && r.record.switch_impression.is_some())
                .count(),
            vs_baseline,
        });
    }
    Ok(ExperimentSummary {
        baseline: cfg.baseline.clone(),
        impressions: cfg.impressions,
        repeats: cfg.repeats,
        base_seed: cfg.base_seed,
        folds,
        conditions,
        runs: results.iter().map(|r| r.record.clone()).collect(),
    })
}
