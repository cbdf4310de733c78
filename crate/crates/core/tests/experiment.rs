use std::fs;

use thermal_sampling::estimators::{self, SampleRecord};
use thermal_sampling::experiment::output::{SAMPLES_FILE, SUMMARY_FILE};
use thermal_sampling::experiment::{aggregate, preset, run_experiment, InitClass, RunConfig};
use thermal_sampling::{BetaGrid, Checkpoint};

fn small(name: &str, sites: &[usize], samples: usize) -> RunConfig {
    let mut cfg = preset(name).unwrap();
    cfg.l_list = sites.to_vec();
    cfg.samples = samples;
    cfg.n_resamples = 50;
    cfg
}

fn read_samples(text: &str) -> Vec<(usize, u64, f64, f64, f64, f64)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|row| {
            let row = row.unwrap();
            (
                row[0].parse().unwrap(),
                row[1].parse().unwrap(),
                row[2].parse().unwrap(),
                row[3].parse().unwrap(),
                row[4].parse().unwrap(),
                row[5].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn single_sample_is_self_consistent() {
    let mut cfg = small("fig3", &[6], 1);
    cfg.n_resamples = 0;
    let out = run_experiment(&cfg).unwrap();
    for a in &out.sizes[0].aggregates {
        assert_eq!(a.eta, 1.0);
        assert_eq!(a.energy_weighted, a.energy_simple);
        assert_eq!(a.eta_sigma, 0.0);
    }
}

#[test]
fn runs_are_reproducible_and_thread_independent() {
    let mut cfg = small("fig1", &[6, 8], 64);
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (k, dir) in dirs.iter().enumerate() {
        cfg.threads = Some(if k == 2 { 2 } else { 1 });
        run_experiment(&cfg).unwrap().emit(dir.path()).unwrap();
    }
    let read = |k: usize, f: &str| fs::read(dirs[k].path().join(f)).unwrap();
    assert_eq!(read(0, SUMMARY_FILE), read(1, SUMMARY_FILE));
    assert_eq!(read(0, SAMPLES_FILE), read(1, SAMPLES_FILE));
    assert_eq!(read(0, SAMPLES_FILE), read(2, SAMPLES_FILE));
    assert_eq!(read(0, SUMMARY_FILE), read(2, SUMMARY_FILE));
}

#[test]
fn summary_rows_cover_sizes_and_grid() {
    let mut cfg = small("fig4", &[4, 6], 8);
    cfg.beta_grid = BetaGrid::uniform(0.5, 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg).unwrap().emit(dir.path()).unwrap();
    let summary = fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 4);
    let samples = fs::read_to_string(dir.path().join(SAMPLES_FILE)).unwrap();
    assert_eq!(samples.lines().count(), 1 + 2 * 8 * 4);
    assert!(summary.lines().skip(1).all(|l| l.contains(",trotter_rpps,")));
}

#[test]
fn aggregates_recompute_from_samples_file() {
    let mut cfg = small("fig4", &[6], 32);
    cfg.beta_grid = BetaGrid::uniform(0.5, 6).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&cfg).unwrap();
    out.emit(dir.path()).unwrap();
    let rows = read_samples(&fs::read_to_string(dir.path().join(SAMPLES_FILE)).unwrap());
    let mut records: Vec<SampleRecord> = Vec::new();
    for (_, index, beta, log_sq_norm, obs_value, init_entropy) in rows {
        if records.last().map(|r| r.sample_index) != Some(index) {
            records.push(SampleRecord {
                sample_index: index,
                checkpoints: Vec::new(),
                init_entropy,
            });
        }
        records.last_mut().unwrap().checkpoints.push(Checkpoint {
            beta,
            log_sq_norm,
            obs_value,
        });
    }
    let again = aggregate(&cfg, 6, &records).unwrap();
    for (a, b) in again.iter().zip(&out.sizes[0].aggregates) {
        assert!((a.eta - b.eta).abs() <= 1e-10);
        assert!((a.energy_weighted - b.energy_weighted).abs() <= 1e-10);
        assert!((a.energy_simple - b.energy_simple).abs() <= 1e-10);
        assert!((a.s_ini_mean - b.s_ini_mean).abs() <= 1e-10);
        let w = estimators::weighted_expectation(&records, a.beta).unwrap();
        assert!((w - a.energy_weighted).abs() <= 1e-10);
    }
}

#[test]
fn haar_and_trotter_classes_differ() {
    let haar = {
        let mut c = small("fig2", &[6], 16);
        c.init_class = InitClass::Haar;
        c.trotter = None;
        run_experiment(&c).unwrap()
    };
    let trotter = run_experiment(&small("fig2", &[6], 16)).unwrap();
    assert_ne!(haar.sizes[0].records, trotter.sizes[0].records);
    assert!(haar.sizes[0].aggregates[0].s_ini_mean > 0.5);
}

#[test]
fn config_round_trips_through_toml() {
    let cfg = small("fig3", &[6, 8], 10);
    let back = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn bad_configs_name_the_field() {
    let mut cfg = small("fig2", &[6], 10);
    cfg.samples = 0;
    assert!(cfg.validate().unwrap_err().to_string().contains("samples"));
    let mut cfg = small("fig2", &[6], 10);
    cfg.trotter = None;
    assert!(cfg.validate().unwrap_err().to_string().contains("trotter"));
    let text = small("fig2", &[6], 10).to_toml_string() + "\nbogus = 1\n";
    assert!(RunConfig::from_toml_str(&text).unwrap_err().to_string().contains("bogus"));
}
