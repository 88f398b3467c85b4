//! Batch runs of the solver over instances x configurations, with CSV output
//! and a performance profile (instances solved within each tree-size budget).
//!
//! A spec is TOML:
//!
//! ```toml
//! thresholds = [10, 100, 1000]          # optional
//!
//! [[instance]]
//! file = "knap.txt"                     # relative to this TOML file
//!
//! [[instance]]
//! generate = "mkp-weak:n=40,m=5"
//! seeds = [1, 2, 3]                     # one instance per seed
//!
//! [[config]]
//! name = "pc"
//! lifting = "pc"
//! cover-routines = ["contiguous"]
//! ```

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnc::{solve, BncConfig, BncError, NodeSelection};
use crate::instances::{read_instance, GeneratorSpec, InstanceError, IpInstance};

pub const DEFAULT_THRESHOLDS: [usize; 19] = [
    1, 2, 5, 10, 20, 50, 100, 200, 500, 1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000, 200_000, 500_000,
    1_000_000,
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("bench spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{instance} / {config}: {source}")]
    Solve { instance: String, config: String, source: BncError },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceEntry {
    file: Option<PathBuf>,
    generate: Option<String>,
    seeds: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedConfig {
    pub name: String,
    #[serde(flatten)]
    pub config: BncConfig,
}

impl NamedConfig {
    /// Stable textual summary of the settings that affect the search.
    pub fn fingerprint(&self) -> String {
        let c = &self.config;
        let covers: Vec<&str> = c.cover_routines.iter().map(|r| r.name()).collect();
        let opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
        format!(
            "lift={};covers={};l={};total={};sel={};nodes={};time={}",
            c.lifting,
            covers.join("+"),
            c.per_node_cut_limit,
            opt(c.total_cut_limit),
            match c.node_selection {
                NodeSelection::BestBound => "best-bound",
                NodeSelection::Dfs => "dfs",
            },
            opt(c.node_limit),
            c.time_limit.map_or("-".to_string(), |t| t.to_string()),
        )
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    instance: Vec<InstanceEntry>,
    #[serde(default)]
    config: Vec<NamedConfig>,
    thresholds: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub instances: Vec<IpInstance>,
    pub configs: Vec<NamedConfig>,
    pub thresholds: Vec<usize>,
}

impl BenchSpec {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, BenchError> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| BenchError::Spec(e.to_string()))?;
        if raw.config.is_empty() {
            return Err(BenchError::Spec("at least one [[config]] is required".into()));
        }
        let mut instances = Vec::new();
        for entry in raw.instance {
            match (entry.file, entry.generate) {
                (Some(file), None) => {
                    if entry.seeds.is_some() {
                        return Err(BenchError::Spec("'seeds' only applies to generated instances".into()));
                    }
                    instances.push(read_instance(base_dir.join(file))?);
                }
                (None, Some(gen)) => {
                    let spec: GeneratorSpec = gen.parse()?;
                    match entry.seeds {
                        None => instances.push(spec.generate()?),
                        Some(seeds) => {
                            for seed in seeds {
                                instances.push(with_seed(spec, seed).generate()?);
                            }
                        }
                    }
                }
                _ => return Err(BenchError::Spec("each [[instance]] needs exactly one of 'file' or 'generate'".into())),
            }
        }
        let thresholds = raw.thresholds.unwrap_or_else(|| DEFAULT_THRESHOLDS.to_vec());
        Ok(Self { instances, configs: raw.config, thresholds })
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

fn with_seed(spec: GeneratorSpec, seed: u64) -> GeneratorSpec {
    match spec {
        GeneratorSpec::Mkp { kind, n, m, .. } => GeneratorSpec::Mkp { kind, n, m, seed },
        GeneratorSpec::Chvatal { n, .. } => GeneratorSpec::Chvatal { n, seed },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub seed: Option<u64>,
    pub config: String,
    pub fingerprint: String,
    pub tree_size: usize,
    pub wall_time: f64,
    pub cuts_added: usize,
    pub optimum: Option<i64>,
    pub proven_optimal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub config: String,
    pub threshold: usize,
    pub solved: usize,
}

/// Runs every (instance, config) pair on up to `jobs` threads. Records come
/// back in spec order: instance-major, then config.
pub fn run_bench(spec: &BenchSpec, jobs: usize) -> Result<Vec<BenchRecord>, BenchError> {
    let tasks: Vec<(&IpInstance, &NamedConfig)> =
        spec.instances.iter().flat_map(|i| spec.configs.iter().map(move |c| (i, c))).collect();
    let run = |&(inst, cfg): &(&IpInstance, &NamedConfig)| -> Result<BenchRecord, BenchError> {
        let res = solve(inst, &cfg.config).map_err(|source| BenchError::Solve {
            instance: inst.name.clone(),
            config: cfg.name.clone(),
            source,
        })?;
        Ok(BenchRecord {
            instance: inst.name.clone(),
            seed: inst.metadata.seed,
            config: cfg.name.clone(),
            fingerprint: cfg.fingerprint(),
            tree_size: res.stats.tree_size,
            wall_time: res.stats.wall_time,
            cuts_added: res.stats.cuts_added,
            optimum: res.optimum,
            proven_optimal: res.stats.proven_optimal,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Spec(format!("thread pool: {e}")))?;
    pool.install(|| tasks.par_iter().map(run).collect())
}

/// For each config and threshold, how many instances were solved to proven
/// optimality with a tree of at most that many nodes.
pub fn performance_profile(records: &[BenchRecord], configs: &[NamedConfig], thresholds: &[usize]) -> Vec<ProfileRow> {
    let mut grid = thresholds.to_vec();
    grid.sort_unstable();
    grid.dedup();
    configs
        .iter()
        .flat_map(|cfg| {
            grid.iter().map(move |&threshold| ProfileRow {
                config: cfg.name.clone(),
                threshold,
                solved: records
                    .iter()
                    .filter(|r| r.config == cfg.name && r.proven_optimal && r.tree_size <= threshold)
                    .count(),
            })
        })
        .collect()
}

pub fn write_csv<T: Serialize>(rows: &[T], out: impl Write) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `results.csv` -> `results.profile.csv`.
pub fn profile_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "bench".into());
    out.with_file_name(format!("{stem}.profile.csv"))
}
