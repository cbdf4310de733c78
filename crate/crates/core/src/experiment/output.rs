use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::{Aggregate, ExperimentOutput, RunConfig, SizeResult};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const SAMPLES_FILE: &str = "samples.csv";
pub const CONFIG_FILE: &str = "run.json";

pub const SUMMARY_HEADER: [&str; 13] = [
    "L",
    "beta",
    "init_class",
    "eta",
    "eta_sigma",
    "S_ini_mean",
    "S_ini_sigma",
    "energy_weighted",
    "energy_weighted_sigma",
    "energy_simple",
    "energy_simple_sigma",
    "M",
    "master_seed",
];

pub const SAMPLES_HEADER: [&str; 6] = [
    "L",
    "sample_index",
    "beta",
    "log_sq_norm",
    "obs_value",
    "init_entropy",
];

/// 17 significant digits; parses back to the identical double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn summary_row(a: &Aggregate) -> Vec<String> {
    vec![
        a.sites.to_string(),
        fmt_f64(a.beta),
        a.init_class.name().to_string(),
        fmt_f64(a.eta),
        fmt_f64(a.eta_sigma),
        fmt_f64(a.s_ini_mean),
        fmt_f64(a.s_ini_sigma),
        fmt_f64(a.energy_weighted),
        fmt_f64(a.energy_weighted_sigma),
        fmt_f64(a.energy_simple),
        fmt_f64(a.energy_simple_sigma),
        a.samples.to_string(),
        a.master_seed.to_string(),
    ]
}

pub fn write_summary(path: &Path, sizes: &[SizeResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(SUMMARY_HEADER).map_err(|e| csv_err(path, e))?;
    for a in sizes.iter().flat_map(|s| &s.aggregates) {
        w.write_record(summary_row(a)).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per (L, sample, beta), sorted in that order.
pub fn write_samples(path: &Path, sizes: &[SizeResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(SAMPLES_HEADER).map_err(|e| csv_err(path, e))?;
    let mut sorted: Vec<&SizeResult> = sizes.iter().collect();
    sorted.sort_by_key(|s| s.sites);
    for size in sorted {
        let mut records: Vec<_> = size.records.iter().collect();
        records.sort_by_key(|r| r.sample_index);
        for r in records {
            for c in &r.checkpoints {
                w.write_record([
                    size.sites.to_string(),
                    r.sample_index.to_string(),
                    fmt_f64(c.beta),
                    fmt_f64(c.log_sq_norm),
                    fmt_f64(c.obs_value),
                    fmt_f64(r.init_entropy),
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_config(path: &Path, cfg: &RunConfig) -> Result<()> {
    let text = serde_json::to_string_pretty(cfg).expect("config serializes to JSON");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Write `summary.csv`, `samples.csv` and `run.json` into `dir`, creating
/// it if needed.
pub fn emit_results(cfg: &RunConfig, sizes: &[SizeResult], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_summary(&dir.join(SUMMARY_FILE), sizes)?;
    write_samples(&dir.join(SAMPLES_FILE), sizes)?;
    write_config(&dir.join(CONFIG_FILE), cfg)
}

impl ExperimentOutput {
    pub fn emit(&self, dir: &Path) -> Result<()> {
        emit_results(&self.config, &self.sizes, dir)
    }
}
