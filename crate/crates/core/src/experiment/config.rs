use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hamiltonian::ModelSpec;
use crate::hilbert::MAX_SITES;
use crate::imagtime::{BetaGrid, PropagatorConfig};

/// Environment variable consulted for the worker count when the config
/// does not set `threads`.
pub const THREADS_ENV: &str = "THERMAL_SAMPLING_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitClass {
    /// Haar-random states (the TPQ baseline).
    Haar,
    /// Random-phase product states, unscrambled.
    Rpps,
    /// Random-phase product states scrambled by the Trotter circuit.
    TrotterRpps,
}

impl InitClass {
    pub fn name(self) -> &'static str {
        match self {
            InitClass::Haar => "haar",
            InitClass::Rpps => "rpps",
            InitClass::TrotterRpps => "trotter_rpps",
        }
    }
}

impl fmt::Display for InitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Number of Trotter steps: `2L` or a fixed count. Written as `"2L"` or
/// an integer in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NRepsRule {
    TwoL,
    Explicit(usize),
}

impl NRepsRule {
    pub fn resolve(self, sites: usize) -> usize {
        match self {
            NRepsRule::TwoL => 2 * sites,
            NRepsRule::Explicit(n) => n,
        }
    }
}

impl Serialize for NRepsRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NRepsRule::TwoL => s.serialize_str("2L"),
            NRepsRule::Explicit(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for NRepsRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(usize),
            Rule(String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(n) => Ok(NRepsRule::Explicit(n)),
            Repr::Rule(s) if s == "2L" => Ok(NRepsRule::TwoL),
            Repr::Rule(s) => Err(serde::de::Error::custom(format!(
                "expected \"2L\" or a non-negative integer, got \"{s}\""
            ))),
        }
    }
}

fn default_tau() -> f64 {
    10.0
}

fn default_n_reps() -> NRepsRule {
    NRepsRule::TwoL
}

fn default_resamples() -> usize {
    4000
}

/// A fully resolved experiment. `system.sites` and `trotter.sites` are
/// replaced by each entry of `l_list` at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trotter: Option<ModelSpec>,
    pub init_class: InitClass,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_n_reps")]
    pub n_reps_rule: NRepsRule,
    pub beta_grid: BetaGrid,
    pub samples: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_resamples")]
    pub n_resamples: usize,
    pub l_list: Vec<usize>,
    pub output_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub propagator: PropagatorConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::config("samples", "need at least one sample"));
        }
        if self.l_list.is_empty() {
            return Err(Error::config("l_list", "no system sizes given"));
        }
        if let Some(&l) = self.l_list.iter().find(|&&l| !(2..=MAX_SITES).contains(&l)) {
            return Err(Error::config("l_list", format!("size {l} outside 2..={MAX_SITES}")));
        }
        for &l in &self.l_list {
            self.system
                .with_sites(l)
                .validate()
                .map_err(|e| Error::config("system", e.to_string()))?;
        }
        match (&self.trotter, self.init_class) {
            (None, InitClass::TrotterRpps) => {
                return Err(Error::config("trotter", "init_class trotter_rpps needs a trotter model"));
            }
            (Some(t), InitClass::TrotterRpps) => {
                for &l in &self.l_list {
                    t.with_sites(l)
                        .validate()
                        .map_err(|e| Error::config("trotter", e.to_string()))?;
                }
            }
            _ => {}
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::config("tau", "must be finite and non-negative"));
        }
        if self.n_resamples == 1 {
            return Err(Error::config("n_resamples", "use 0 to disable the bootstrap or at least 2"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        self.propagator
            .validate()
            .map_err(|e| Error::config("propagator", e.to_string()))?;
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<config>"),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load a config file: JSON if the extension is `.json`, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parsed: std::result::Result<Self, String> =
            if path.extension().is_some_and(|ext| ext == "json") {
                serde_json::from_str(&text).map_err(|e| e.to_string())
            } else {
                toml::from_str(&text).map_err(|e| e.to_string())
            };
        let cfg = parsed.map_err(|message| Error::Parse {
            path: path.to_path_buf(),
            message,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config is always representable as TOML")
    }

    pub fn max_sites(&self) -> usize {
        self.l_list.iter().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ModelKind;

    const SAMPLE: &str = r#"
init_class = "trotter_rpps"
tau = 10.0
n_reps_rule = "2L"
beta_grid = [1.0, 3.0]
samples = 32
master_seed = 7
n_resamples = 100
l_list = [6, 8]
output_path = "out"

[system]
kind = "heisenberg"

[trotter]
kind = "mixed_ising"
h_x = 1.0
h_z = 1.0
"#;

    #[test]
    fn parses_toml() {
        let cfg = RunConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.system.kind, ModelKind::Heisenberg);
        assert_eq!(cfg.trotter.as_ref().unwrap().h_z, 1.0);
        assert_eq!(cfg.n_reps_rule, NRepsRule::TwoL);
        assert_eq!(cfg.threads, None);
        assert_eq!(cfg.propagator, PropagatorConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::from_toml_str(SAMPLE).unwrap();
        let again = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn explicit_reps() {
        let text = SAMPLE.replace("\"2L\"", "5");
        let cfg = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.n_reps_rule, NRepsRule::Explicit(5));
        assert_eq!(cfg.n_reps_rule.resolve(12), 5);
        assert_eq!(NRepsRule::TwoL.resolve(12), 24);
        assert!(RunConfig::from_toml_str(&SAMPLE.replace("\"2L\"", "\"3L\"")).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = SAMPLE.replace("samples = 32", "samples = 32\nbogus = 1");
        assert!(RunConfig::from_toml_str(&text).is_err());
        let text = SAMPLE.replace("h_z = 1.0", "h_z = 1.0\nh_y = 2.0");
        assert!(RunConfig::from_toml_str(&text).is_err());
    }

    fn field_of(err: Error) -> String {
        match err {
            Error::Config { field, .. } => field,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn violations_name_the_field() {
        let base = RunConfig::from_toml_str(SAMPLE).unwrap();

        let mut c = base.clone();
        c.samples = 0;
        assert_eq!(field_of(c.validate().unwrap_err()), "samples");

        let mut c = base.clone();
        c.l_list = vec![6, 1];
        assert_eq!(field_of(c.validate().unwrap_err()), "l_list");

        let mut c = base.clone();
        c.trotter = None;
        assert_eq!(field_of(c.validate().unwrap_err()), "trotter");

        let mut c = base.clone();
        c.system.j = 0.0;
        assert_eq!(field_of(c.validate().unwrap_err()), "system");

        let mut c = base.clone();
        c.threads = Some(0);
        assert_eq!(field_of(c.validate().unwrap_err()), "threads");

        let mut c = base;
        c.trotter = None;
        c.init_class = InitClass::Haar;
        assert!(c.validate().is_ok());
    }
}
