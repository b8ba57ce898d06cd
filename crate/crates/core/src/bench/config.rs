use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::choice::{ChoiceModelSpec, NestParams, DEFAULT_MIXED_HALFWIDTH, DEFAULT_NEST_MU};
use crate::error::{Error, Result};
use crate::instance::{
    generate_planar, load_canonical, make_nests, parse_orlib, GeneratorConfig, Instance,
};

pub const DEFAULT_R: [usize; 9] = [2, 3, 4, 5, 6, 7, 8, 9, 10];
pub const DEFAULT_ALPHA: [f64; 3] = [0.01, 0.1, 1.0];
pub const DEFAULT_BETA: [f64; 3] = [1.0, 5.0, 10.0];
/// Grid used for the large city-scale instance.
pub const NYC_ALPHA: [f64; 3] = [0.5, 1.0, 2.0];
pub const NYC_BETA: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
pub enum Method {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "greedy")]
    Greedy,
    #[serde(rename = "bitr")]
    Bitr,
    #[serde(rename = "bitr-ms", alias = "bitr_ms", alias = "bitr_multistart")]
    BitrMultistart,
    #[serde(rename = "bitr-ls", alias = "bitr_ls")]
    BitrLs,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Exact,
        Method::Greedy,
        Method::Bitr,
        Method::BitrMultistart,
        Method::BitrLs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
            Method::Bitr => "bitr",
            Method::BitrMultistart => "bitr-ms",
            Method::BitrLs => "bitr-ls",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "greedy" => Ok(Method::Greedy),
            "bitr" => Ok(Method::Bitr),
            "bitr-ms" | "bitr_ms" | "bitr_multistart" => Ok(Method::BitrMultistart),
            "bitr-ls" | "bitr_ls" => Ok(Method::BitrLs),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Mnl,
    Mmnl,
    Nested,
}

impl FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mnl" => Ok(ModelChoice::Mnl),
            "mmnl" => Ok(ModelChoice::Mmnl),
            "nested" => Ok(ModelChoice::Nested),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceSource {
    /// Canonical instance file.
    File { path: PathBuf, name: Option<String> },
    /// OR-Library file with an explicit competitor set.
    Orlib {
        path: PathBuf,
        competitors: Vec<usize>,
        name: Option<String>,
        #[serde(default = "yes")]
        normalize: bool,
    },
    /// Seeded planar instance.
    Generated {
        name: Option<String>,
        zones: usize,
        candidates: usize,
        #[serde(default = "five")]
        competitors: usize,
        seed: u64,
    },
}

fn yes() -> bool {
    true
}

fn five() -> usize {
    5
}

impl InstanceSource {
    pub fn name(&self) -> String {
        match self {
            InstanceSource::File { path, name } | InstanceSource::Orlib { path, name, .. } => {
                name.clone().unwrap_or_else(|| {
                    path.file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| path.display().to_string())
                })
            }
            InstanceSource::Generated {
                name,
                zones,
                candidates,
                seed,
                ..
            } => name
                .clone()
                .unwrap_or_else(|| format!("planar-{zones}-{candidates}-{seed}")),
        }
    }

    pub fn load(&self) -> Result<Instance> {
        match self {
            InstanceSource::File { path, .. } => load_canonical(&fs::read_to_string(path)?),
            InstanceSource::Orlib {
                path,
                competitors,
                normalize,
                ..
            } => {
                let inst = parse_orlib(fs::File::open(path)?, competitors)?;
                Ok(if *normalize { inst.normalized() } else { inst })
            }
            InstanceSource::Generated {
                zones,
                candidates,
                competitors,
                seed,
                ..
            } => generate_planar(&GeneratorConfig {
                n_zones: *zones,
                n_candidates: *candidates,
                n_competitors: *competitors,
                side: 1.0,
                seed: *seed,
            }),
        }
    }

    fn resolve(&mut self, base: &Path) {
        if let InstanceSource::File { path, .. } | InstanceSource::Orlib { path, .. } = self {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

/// Experiment grid description, read from TOML.
///
/// ```toml
/// model = "mnl"
/// methods = ["exact", "bitr-ls"]
/// r = [2, 3, 4]
/// alpha = [0.01, 0.1, 1.0]
/// beta = [1.0, 5.0, 10.0]
/// budget_seconds = 600
/// seed = 1
///
/// [[instances]]
/// kind = "generated"
/// zones = 50
/// candidates = 25
/// seed = 1
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub instances: Vec<InstanceSource>,
    pub methods: Vec<Method>,
    pub model: ModelChoice,
    pub r: Vec<usize>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub budget_seconds: f64,
    pub tolerance: f64,
    /// Monte-Carlo samples for mixed logit (100 for the synthetic and
    /// OR-Library families, 10 for the city-scale instance).
    pub samples: usize,
    pub halfwidth: f64,
    pub mu: f64,
    pub nests: usize,
    pub nest_coefficient: f64,
    pub starts: usize,
    /// Subset cap for exact enumeration; unbounded when absent, in which case
    /// only the time budget limits it.
    pub exact_cap: Option<u64>,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            instances: Vec::new(),
            methods: vec![Method::BitrLs],
            model: ModelChoice::Mnl,
            r: DEFAULT_R.to_vec(),
            alpha: DEFAULT_ALPHA.to_vec(),
            beta: DEFAULT_BETA.to_vec(),
            budget_seconds: 600.0,
            tolerance: 0.005,
            samples: 100,
            halfwidth: DEFAULT_MIXED_HALFWIDTH,
            mu: DEFAULT_NEST_MU,
            nests: 5,
            nest_coefficient: 1.0,
            starts: 10,
            exact_cap: None,
            seed: 0,
        }
    }
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: BenchConfig = toml::from_str(text).map_err(|e| Error::Schema {
            path: "config".into(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; relative instance paths are resolved against the
    /// file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let mut config = Self::from_toml(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for source in &mut config.instances {
            source.resolve(base);
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: String| {
            Err(Error::Schema {
                path: path.into(),
                message,
            })
        };
        if self.methods.is_empty() {
            return bad("methods", "at least one method is required".into());
        }
        if self.r.is_empty() || self.alpha.is_empty() || self.beta.is_empty() {
            return bad("grid", "r, alpha and beta must be nonempty".into());
        }
        if self.r.contains(&0) {
            return bad("r", "cardinalities must be positive".into());
        }
        if self.alpha.iter().chain(&self.beta).any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("grid", "alpha and beta values must be positive".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad("tolerance", format!("must lie in (0, 1), got {}", self.tolerance));
        }
        if !(self.budget_seconds.is_finite() && self.budget_seconds > 0.0) {
            return bad("budget_seconds", format!("must be positive, got {}", self.budget_seconds));
        }
        if self.samples == 0 {
            return bad("samples", "must be at least 1".into());
        }
        if self.nests == 0 {
            return bad("nests", "must be at least 1".into());
        }
        if self.starts == 0 {
            return bad("starts", "must be at least 1".into());
        }
        Ok(())
    }

    pub fn configurations_per_instance(&self) -> usize {
        self.r.len() * self.alpha.len() * self.beta.len()
    }

    /// Choice model for one grid cell; `sample_seed` seeds mixed-logit draws.
    pub fn model_spec(
        &self,
        instance: &Instance,
        alpha: f64,
        beta: f64,
        sample_seed: u64,
    ) -> Result<ChoiceModelSpec> {
        Ok(match self.model {
            ModelChoice::Mnl => ChoiceModelSpec::mnl(beta, alpha),
            ModelChoice::Mmnl => {
                ChoiceModelSpec::mixed(beta, alpha, self.samples, self.halfwidth, sample_seed)
            }
            ModelChoice::Nested => {
                let nests = make_nests(instance, self.nests)?;
                ChoiceModelSpec::nested(
                    beta,
                    alpha,
                    NestParams::uniform(nests, self.mu, self.nest_coefficient),
                )
            }
        })
    }
}
