//! Experiment orchestration: per-sample pipelines run on a worker pool,
//! per-beta aggregation, and result files.

pub mod config;
pub mod output;
pub mod preset;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    self, bootstrap_sigma, efficiency, entanglement_entropy, plain_mean, weighted_mean, SampleRecord,
};
use crate::hamiltonian::HamiltonianTerms;
use crate::imagtime::Propagator;
use crate::state_prep::{sample_haar, sample_rpps, SampleSeed, TrotterCircuit};

pub use config::{InitClass, NRepsRule, RunConfig, THREADS_ENV};
pub use output::emit_results;
pub use preset::{preset, Preset};

/// Per-(L, beta) summary row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub sites: usize,
    pub beta: f64,
    pub init_class: InitClass,
    pub eta: f64,
    pub eta_sigma: f64,
    pub s_ini_mean: f64,
    pub s_ini_sigma: f64,
    pub energy_weighted: f64,
    pub energy_weighted_sigma: f64,
    pub energy_simple: f64,
    pub energy_simple_sigma: f64,
    pub samples: usize,
    pub master_seed: u64,
}

/// Records and aggregates for one system size.
#[derive(Debug, Clone)]
pub struct SizeResult {
    pub sites: usize,
    pub records: Vec<SampleRecord>,
    pub aggregates: Vec<Aggregate>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub config: RunConfig,
    pub sizes: Vec<SizeResult>,
}

/// Worker count: config, then the environment variable, then all cores.
pub fn resolve_threads(cfg: &RunConfig) -> usize {
    cfg.threads
        .or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .filter(|&n: &usize| n > 0)
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Everything a sample needs for one system size; shared read-only by the
/// workers.
struct SizePipeline {
    sites: usize,
    init_class: InitClass,
    hamiltonian: HamiltonianTerms,
    circuit: Option<TrotterCircuit>,
}

impl SizePipeline {
    fn new(cfg: &RunConfig, sites: usize) -> Result<Self> {
        let hamiltonian = cfg.system.with_sites(sites).build()?;
        let circuit = match (cfg.init_class, &cfg.trotter) {
            (InitClass::TrotterRpps, Some(t)) => Some(TrotterCircuit::from_terms(
                &t.with_sites(sites).build()?,
                cfg.tau,
                cfg.n_reps_rule.resolve(sites),
            )?),
            (InitClass::TrotterRpps, None) => {
                return Err(Error::config("trotter", "init_class trotter_rpps needs a trotter model"))
            }
            _ => None,
        };
        Ok(Self {
            sites,
            init_class: cfg.init_class,
            hamiltonian,
            circuit,
        })
    }

    fn run_sample(&self, cfg: &RunConfig, sample_index: u64) -> Result<SampleRecord> {
        let seed = SampleSeed::new(cfg.master_seed, sample_index);
        let state = match self.init_class {
            InitClass::Haar => sample_haar(self.sites, seed)?,
            InitClass::Rpps => sample_rpps(self.sites, seed)?,
            InitClass::TrotterRpps => {
                let mut s = sample_rpps(self.sites, seed)?;
                if let Some(c) = &self.circuit {
                    c.apply(&mut s)?;
                }
                // the circuit is unitary: keep the class unit-normalized
                s.set_log_norm_offset(0.0);
                s
            }
        };
        let init_entropy = entanglement_entropy(&state)?;
        let propagator = Propagator::new(&self.hamiltonian, cfg.propagator)?;
        let checkpoints = propagator.sweep(&state, &cfg.beta_grid, &self.hamiltonian)?;
        Ok(SampleRecord {
            sample_index,
            checkpoints,
            init_entropy,
        })
    }
}

/// Generate all samples for every size in `cfg.l_list` and aggregate them.
/// Records are ordered by sample index, so the output does not depend on
/// the worker count.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let threads = resolve_threads(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {threads} workers: {e}")))?;
    pool.install(|| {
        let sizes = cfg
            .l_list
            .iter()
            .map(|&sites| {
                log::info!(
                    "L = {sites}: {} samples of {} ({threads} threads)",
                    cfg.samples,
                    cfg.init_class
                );
                let records = run_size(cfg, sites)?;
                let aggregates = aggregate(cfg, sites, &records)?;
                Ok(SizeResult {
                    sites,
                    records,
                    aggregates,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExperimentOutput {
            config: cfg.clone(),
            sizes,
        })
    })
}

/// Sample records for one size, in sample-index order.
pub fn run_size(cfg: &RunConfig, sites: usize) -> Result<Vec<SampleRecord>> {
    let pipeline = SizePipeline::new(cfg, sites)?;
    (0..cfg.samples as u64)
        .into_par_iter()
        .map(|m| {
            pipeline.run_sample(cfg, m).map_err(|e| Error::Sample {
                sites,
                sample_index: m,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Seed for one bootstrap statistic, keyed by size, beta index and a
/// statistic tag.
fn bootstrap_seed(master: u64, sites: usize, beta_index: usize, stat: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((sites as u64) << 40) | ((beta_index as u64) << 8) | stat);
    rng.next_u64()
}

/// Per-beta aggregates for one size. A pure function of the records and
/// the config.
pub fn aggregate(cfg: &RunConfig, sites: usize, records: &[SampleRecord]) -> Result<Vec<Aggregate>> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let n_boot = cfg.n_resamples;
    let sigma = |items: &[f64], stat: &(dyn Fn(&[f64]) -> f64 + Sync), seed| -> Result<f64> {
        if n_boot < 2 {
            Ok(0.0)
        } else {
            bootstrap_sigma(items, stat, n_boot, seed)
        }
    };
    let entropies: Vec<f64> = records.iter().map(|r| r.init_entropy).collect();
    let s_ini_mean = plain_mean(&entropies);
    let s_ini_sigma = sigma(&entropies, &plain_mean, bootstrap_seed(cfg.master_seed, sites, 0, 0))?;

    cfg.beta_grid
        .values()
        .iter()
        .enumerate()
        .map(|(k, &beta)| {
            let pairs = estimators::column(records, beta)?;
            let logs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let obs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let weights = estimators::weights_from_log(&logs);
            let eff = efficiency(&weights, n_boot, bootstrap_seed(cfg.master_seed, sites, k, 1))?;
            let energy_weighted_sigma = if n_boot < 2 {
                0.0
            } else {
                bootstrap_sigma(
                    &pairs,
                    weighted_mean,
                    n_boot,
                    bootstrap_seed(cfg.master_seed, sites, k, 2),
                )?
            };
            Ok(Aggregate {
                sites,
                beta,
                init_class: cfg.init_class,
                eta: eff.eta,
                eta_sigma: eff.bootstrap_sigma,
                s_ini_mean,
                s_ini_sigma,
                energy_weighted: weighted_mean(&pairs),
                energy_weighted_sigma,
                energy_simple: plain_mean(&obs),
                energy_simple_sigma: sigma(
                    &obs,
                    &plain_mean,
                    bootstrap_seed(cfg.master_seed, sites, k, 3),
                )?,
                samples: records.len(),
                master_seed: cfg.master_seed,
            })
        })
        .collect()
}
