//! Multi-seed experiment runs and their aggregation.
//!
//! Every (instance, pipeline, strip height, seed) combination is one
//! independent run, written as one CSV record:
//!
//! ```text
//! instance,pipeline,region,seed,matched,optimal,frame,time_ms
//! gen10,greedy,1x10,0,161,180,0,35
//! ```
//!
//! `matched` is left empty for a run that failed. Records are grouped into
//! [`ResultRow`]s by instance, pipeline and region; the rows can be rebuilt
//! from the CSV alone.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, Read, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Duration;

use edgematch::io::{generate, read_instance, write_solution, GeneratorParams};
use edgematch::pipeline::{run_pipeline, Pipeline, PipelineConfig, PipelineRun};
use edgematch::{Clock, Instance};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Ticks per logical millisecond in deterministic mode.
pub const LOGICAL_TICKS_PER_MS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    /// One instance read from a file, shared by all seeds.
    File(PathBuf),
    /// One generated instance per seed; `None` palettes use the scaled
    /// defaults.
    Generated { n: usize, inner: Option<u32>, border: Option<u32> },
}

impl InstanceSource {
    pub fn label(&self) -> String {
        match self {
            InstanceSource::File(p) => {
                p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into())
            }
            InstanceSource::Generated { n, .. } => format!("gen{n}"),
        }
    }

    pub fn load(&self, seed: u64) -> Result<Instance, String> {
        match self {
            InstanceSource::File(p) => {
                let f = File::open(p).map_err(|e| format!("{}: {e}", p.display()))?;
                read_instance(BufReader::new(f)).map_err(|e| format!("{}: {e}", p.display()))
            }
            InstanceSource::Generated { n, inner, border } => {
                let mut params = GeneratorParams::scaled(*n, seed);
                params.inner_colors = inner.unwrap_or(params.inner_colors);
                params.border_colors = border.unwrap_or(params.border_colors);
                generate(&params).map_err(|e| e.to_string())
            }
        }
    }
}

/// Shared settings for every run of a bench; `None` keeps the pipeline
/// default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub time_limit: Option<Duration>,
    pub region_budget: Option<Duration>,
    pub backtrack_timeout: Option<Duration>,
    pub clique_q: Option<u64>,
    pub clique_time: Option<Duration>,
}

impl Overrides {
    /// The pipeline configuration of one run.
    pub fn config(&self, n: usize, strip_height: usize, seed: u64) -> PipelineConfig {
        let mut cfg = PipelineConfig::new(n, seed);
        cfg.strip_height = strip_height;
        if let Some(t) = self.time_limit {
            cfg.ls.time_limit = t;
        }
        if let Some(t) = self.region_budget {
            cfg.region_budget = t;
        }
        if let Some(t) = self.backtrack_timeout {
            cfg.backtrack_timeout = t;
        }
        if let Some(q) = self.clique_q {
            cfg.clique_q = q;
        }
        if let Some(t) = self.clique_time {
            cfg.clique_time = t;
        }
        cfg
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub instance: InstanceSource,
    pub pipelines: Vec<Pipeline>,
    pub strip_heights: Vec<usize>,
    pub seeds: Vec<u64>,
    pub overrides: Overrides,
    /// Count budgets in solver steps instead of wall time.
    pub deterministic: bool,
    /// Per-run output files (`<instance>-<pipeline>-<region>-s<seed>.sol`
    /// and `.trace.csv`) go here when set.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("no seeds given")]
    NoSeeds,
    #[error("no pipelines given")]
    NoPipelines,
    #[error("strip height must be 1 or 2, got {0}")]
    StripHeight(usize),
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seeds.is_empty() {
            return Err(ConfigError::NoSeeds);
        }
        if self.pipelines.is_empty() {
            return Err(ConfigError::NoPipelines);
        }
        if let Some(&h) = self.strip_heights.iter().find(|&&h| !(1..=2).contains(&h)) {
            return Err(ConfigError::StripHeight(h));
        }
        Ok(())
    }

    /// The (pipeline, strip height) variants: heights only multiply the
    /// pipelines that use strips.
    fn variants(&self) -> Vec<(Pipeline, Option<usize>)> {
        let mut out = Vec::new();
        for &p in &self.pipelines {
            if p.uses_strips() {
                out.extend(self.strip_heights.iter().map(|&h| (p, Some(h))));
            } else {
                out.push((p, None));
            }
        }
        out
    }
}

/// One run, as written to the CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub pipeline: String,
    pub region: String,
    pub seed: u64,
    pub matched: Option<u32>,
    pub optimal: u32,
    pub frame: u32,
    pub time_ms: u64,
}

/// Aggregate over the seeds of one (instance, pipeline, region) group.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub instance: String,
    pub pipeline: String,
    pub region: String,
    pub max: u32,
    pub avg: f64,
    pub min: u32,
    pub avg_time_s: f64,
    pub runs: usize,
    pub failed: usize,
}

impl fmt::Display for ResultRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10} {:<13} {:<6} {:>5} {:>8.2} {:>5} {:>10.2}",
            self.instance, self.pipeline, self.region, self.max, self.avg, self.min, self.avg_time_s
        )?;
        if self.failed > 0 {
            write!(f, "  ({} of {} runs failed)", self.failed, self.runs)?;
        }
        Ok(())
    }
}

pub const TABLE_HEADER: &str = "instance   pipeline      region   MAX      AVG   MIN   time (s)";

/// Groups records by instance, pipeline and region, in first-seen order.
pub fn aggregate(records: &[RunRecord]) -> Vec<ResultRow> {
    let mut order = Vec::new();
    let mut groups: BTreeMap<(String, String, String), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.instance.clone(), r.pipeline.clone(), r.region.clone());
        let group = groups.entry(key.clone()).or_default();
        if group.is_empty() {
            order.push(key);
        }
        group.push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let group = &groups[&key];
            let ok: Vec<u32> = group.iter().filter_map(|r| r.matched).collect();
            let (max, min) = (ok.iter().copied().max().unwrap_or(0), ok.iter().copied().min().unwrap_or(0));
            let avg = if ok.is_empty() { 0.0 } else { ok.iter().map(|&m| m as f64).sum::<f64>() / ok.len() as f64 };
            let avg_time_s = group.iter().map(|r| r.time_ms as f64).sum::<f64>() / group.len() as f64 / 1000.0;
            let (instance, pipeline, region) = key;
            ResultRow {
                instance,
                pipeline,
                region,
                max,
                avg,
                min,
                avg_time_s,
                runs: group.len(),
                failed: group.len() - ok.len(),
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(records: &[RunRecord], sink: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(source: R) -> csv::Result<Vec<RunRecord>> {
    csv::Reader::from_reader(source).deserialize().collect()
}

/// Worker threads: one per core, capped by `EDGEMATCH_THREADS` when set.
pub fn worker_count() -> usize {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("EDGEMATCH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(t) if t > 0 => t.min(cores),
        _ => cores,
    }
}

pub fn make_clock(deterministic: bool) -> Clock {
    if deterministic {
        Clock::logical(LOGICAL_TICKS_PER_MS)
    } else {
        Clock::wall()
    }
}

/// Output of one bench: the run records in a fixed order, the aggregated
/// rows, and the finished pipeline runs (in record order, `None` on
/// failure).
pub struct BenchOutput {
    pub records: Vec<RunRecord>,
    pub rows: Vec<ResultRow>,
    pub runs: Vec<Option<PipelineRun>>,
}

/// Runs every combination of the config, in parallel over
/// [`worker_count`] threads. A failing run is recorded without a score and
/// never stops the others.
pub fn run_bench(config: &RunConfig) -> Result<BenchOutput, ConfigError> {
    config.validate()?;
    let label = config.instance.label();
    let jobs: Vec<(Pipeline, Option<usize>, u64)> =
        config.variants().into_iter().flat_map(|(p, h)| config.seeds.iter().map(move |&s| (p, h, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(worker_count()).build().expect("thread pool");
    let results: Vec<(RunRecord, Option<PipelineRun>)> =
        pool.install(|| jobs.par_iter().map(|&(p, h, seed)| one_run(config, &label, p, h, seed)).collect());
    let (records, runs): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let rows = aggregate(&records);
    Ok(BenchOutput { records, rows, runs })
}

fn one_run(
    config: &RunConfig,
    label: &str,
    pipeline: Pipeline,
    height: Option<usize>,
    seed: u64,
) -> (RunRecord, Option<PipelineRun>) {
    let mut record = RunRecord {
        instance: label.to_string(),
        pipeline: pipeline.name().to_string(),
        region: "-".to_string(),
        seed,
        matched: None,
        optimal: 0,
        frame: 0,
        time_ms: 0,
    };
    let inst = match config.instance.load(seed) {
        Ok(inst) => inst,
        Err(e) => {
            log::error!("{label} seed {seed}: {e}");
            return (record, None);
        }
    };
    let n = inst.n;
    record.optimal = inst.inner_edge_count();
    if let Some(h) = height {
        record.region = format!("{h}x{n}");
    }
    let cfg = config.overrides.config(n, height.unwrap_or(1), seed);
    let clock = make_clock(config.deterministic);
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| run_pipeline(&inst, pipeline, &cfg, &clock)));
    let run = match outcome {
        Ok(Ok(run)) => run,
        Ok(Err(e)) => {
            log::error!("{label} {pipeline} seed {seed}: {e}");
            return (record, None);
        }
        Err(_) => {
            log::error!("{label} {pipeline} seed {seed}: run panicked");
            return (record, None);
        }
    };
    record.matched = Some(run.score.matched_inner);
    record.frame = run.score.frame_violations;
    record.time_ms = (run.construct_time + run.ls_time).as_millis() as u64;
    if let Some(dir) = &config.output_dir {
        if let Err(e) = write_run_files(dir, &record, &run) {
            log::error!("{label} {pipeline} seed {seed}: cannot write outputs: {e}");
        }
    }
    (record, Some(run))
}

/// File stem for the outputs of one run.
pub fn run_stem(r: &RunRecord) -> String {
    format!("{}-{}-{}-s{}", r.instance, r.pipeline.replace('+', "_"), r.region, r.seed)
}

fn write_run_files(dir: &Path, record: &RunRecord, run: &PipelineRun) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let stem = run_stem(record);
    write_solution(&run.board, io::BufWriter::new(File::create(dir.join(format!("{stem}.sol")))?))?;
    if let Some(trace) = &run.trace {
        trace.write_csv(io::BufWriter::new(File::create(dir.join(format!("{stem}.trace.csv")))?))?;
    }
    Ok(())
}
