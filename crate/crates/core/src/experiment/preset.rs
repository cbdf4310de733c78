//! Named run presets.
//!
//! Each preset is a list of series (one initial-state class and Trotter
//! model per series). All series share the system model, sizes, grid and
//! seed, so curves from one preset are directly comparable.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hamiltonian::ModelSpec;
use crate::imagtime::{BetaGrid, PropagatorConfig};

use super::config::{InitClass, NRepsRule, RunConfig};

/// XXZ anisotropy of the staggered-field Trotter model.
pub const XXZ_DELTA: f64 = 5.0;
/// Staggered-field strength for the `fig1` runs. An assumption, recorded
/// in every `run.json`.
pub const DEFAULT_H_STAG: f64 = 1.0;
/// Trotter fields used when the system itself is a mixed-field Ising chain
/// and the Trotter model must differ from it.
pub const ISING_SYSTEM_TROTTER_FIELDS: (f64, f64) = (1.5, 0.5);

pub const DEFAULT_SAMPLES: usize = 1024;
pub const DEFAULT_RESAMPLES: usize = 4000;
pub const DEFAULT_TAU: f64 = 10.0;
pub const DEFAULT_SEED: u64 = 20_220_617;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Heisenberg system; Trotter gates from the XXZ chain with and without
    /// a staggered field; Haar baseline. Single beta = 3.
    Fig1,
    /// Heisenberg system; transverse- and mixed-field Ising Trotter gates;
    /// Haar baseline. Single beta = 3.
    Fig2,
    /// Internal energy vs beta on a 0.1 grid, transverse- and mixed-field
    /// Ising Trotter gates on a Heisenberg system.
    Fig3,
    /// Weighted vs norm-free energy estimates across sizes, mixed-field
    /// Ising Trotter gates on a Heisenberg system.
    Fig4,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }

    fn desk_sizes(self) -> Vec<usize> {
        match self {
            Preset::Fig3 => vec![12],
            _ => vec![6, 8, 10, 12],
        }
    }

    /// Sizes used with the full-scale flag.
    pub fn full_scale_sizes(self) -> Vec<usize> {
        match self {
            Preset::Fig1 | Preset::Fig2 => vec![10, 12, 14, 16, 18, 20],
            Preset::Fig3 => vec![20],
            Preset::Fig4 => vec![10, 20],
        }
    }

    fn beta_grid(self) -> BetaGrid {
        match self {
            Preset::Fig1 | Preset::Fig2 => BetaGrid::single(3.0),
            Preset::Fig3 | Preset::Fig4 => BetaGrid::uniform(0.1, 30),
        }
        .expect("preset grids are valid")
    }

    /// All series of the preset as `(label, config)` pairs; the last entry
    /// is the headline (nonintegrable Trotter) series.
    pub fn series(self) -> Vec<(String, RunConfig)> {
        let base = RunConfig {
            // delta is inert for the Heisenberg system; it is carried so the
            // resolved config records the anisotropy used by the Trotter model.
            system: ModelSpec {
                delta: if self == Preset::Fig1 { XXZ_DELTA } else { 1.0 },
                ..ModelSpec::heisenberg(2, 1.0)
            },
            trotter: None,
            init_class: InitClass::Haar,
            tau: DEFAULT_TAU,
            n_reps_rule: NRepsRule::TwoL,
            beta_grid: self.beta_grid(),
            samples: DEFAULT_SAMPLES,
            master_seed: DEFAULT_SEED,
            n_resamples: DEFAULT_RESAMPLES,
            l_list: self.desk_sizes(),
            output_path: PathBuf::from("results").join(self.name()),
            threads: None,
            propagator: PropagatorConfig::default(),
        };
        let trotter = |model: ModelSpec| RunConfig {
            trotter: Some(model),
            init_class: InitClass::TrotterRpps,
            ..base.clone()
        };
        let haar = ("haar".to_string(), base.clone());
        let transverse = (
            "trotter_transverse_ising".to_string(),
            trotter(ModelSpec::transverse_ising(2, 1.0, 1.0)),
        );
        let mixed = (
            "trotter_mixed_ising".to_string(),
            trotter(ModelSpec::mixed_ising(2, 1.0, 1.0, 1.0)),
        );
        let mut series = match self {
            Preset::Fig1 => vec![
                haar,
                (
                    "trotter_xxz".to_string(),
                    trotter(ModelSpec::xxz_staggered(2, 1.0, XXZ_DELTA, 0.0)),
                ),
                (
                    "trotter_xxz_staggered".to_string(),
                    trotter(ModelSpec::xxz_staggered(2, 1.0, XXZ_DELTA, DEFAULT_H_STAG)),
                ),
            ],
            Preset::Fig2 => vec![haar, transverse, mixed],
            Preset::Fig3 => vec![transverse, mixed],
            Preset::Fig4 => vec![mixed],
        };
        for (label, cfg) in &mut series {
            cfg.output_path = base.output_path.join(label.as_str());
        }
        series
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// The headline configuration of a named preset.
pub fn preset(name: &str) -> Result<RunConfig> {
    let p: Preset = name.parse()?;
    Ok(p.series().pop().expect("every preset has a series").1)
}
