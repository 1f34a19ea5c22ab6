use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::converse::{HypothesisInstance, InstanceDoc};
use crate::error::{Error, Result};
use crate::operator::{conjugate, qubit_rotation, Density, MatrixDoc};
use crate::semigroup::{
    davies_qubit_generator, simple_generator, tensor_power, tensor_sum, GeneratorDoc,
    LindbladGenerator,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Norms,
    Entropy,
    Semigroup,
    LsiEstimate,
    LsiVerify,
    Sv,
    Hc,
    Rhc,
    Qht,
    Cq,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Norms => "norms",
            Suite::Entropy => "entropy",
            Suite::Semigroup => "semigroup",
            Suite::LsiEstimate => "lsi-estimate",
            Suite::LsiVerify => "lsi-verify",
            Suite::Sv => "sv",
            Suite::Hc => "hc",
            Suite::Rhc => "rhc",
            Suite::Qht => "qht",
            Suite::Cq => "cq",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    #[default]
    Simple,
    Davies,
}

/// A state given either by its diagonal or as a full matrix document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Diagonal(Vec<f64>),
    Matrix(MatrixDoc),
}

impl StateSpec {
    pub fn density(&self) -> Result<Density> {
        match self {
            StateSpec::Diagonal(v) => Density::from_diagonal(v),
            StateSpec::Matrix(m) => Density::new(m.to_matrix()?),
        }
    }
}

/// Generator section. Either `path` names a generator document, or the
/// generator is built from `sigma` (one factor) or `factors` (a tensor sum),
/// then raised to `copies` tensor copies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    #[serde(default)]
    pub kind: FactorKind,
    pub sigma: Option<StateSpec>,
    #[serde(default)]
    pub factors: Vec<StateSpec>,
    #[serde(default = "one")]
    pub copies: usize,
    #[serde(default = "one_f")]
    pub gamma10: f64,
    #[serde(default)]
    pub dephase: f64,
    pub path: Option<PathBuf>,
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

impl GeneratorSpec {
    fn factor_states(&self) -> Result<Vec<Density>> {
        match (&self.sigma, self.factors.is_empty()) {
            (Some(s), true) => Ok(vec![s.density()?]),
            (None, false) => self.factors.iter().map(StateSpec::density).collect(),
            (Some(_), false) => Err(Error::Document("give either `sigma` or `factors`, not both".into())),
            (None, true) => Err(Error::Document("generator needs `sigma`, `factors` or `path`".into())),
        }
    }

    pub fn build(&self, base: &Path) -> Result<LindbladGenerator> {
        if self.copies == 0 {
            return Err(Error::Document("`copies` must be at least 1".into()));
        }
        let single = if let Some(path) = &self.path {
            GeneratorDoc::parse(&std::fs::read_to_string(base.join(path))?)?
        } else {
            let gens = self
                .factor_states()?
                .iter()
                .map(|s| match self.kind {
                    FactorKind::Simple => simple_generator(s),
                    FactorKind::Davies => davies_qubit_generator(s, self.gamma10, self.dephase),
                })
                .collect::<Result<Vec<_>>>()?;
            tensor_sum(&gens)?
        };
        tensor_power(&single, self.copies)
    }

    /// States of the simple-generator factors, when the generator is a tensor
    /// sum of simple generators.
    pub fn simple_factors(&self) -> Option<Vec<Density>> {
        if self.path.is_some() || self.kind != FactorKind::Simple {
            return None;
        }
        let states = self.factor_states().ok()?;
        Some(states.iter().flat_map(|s| std::iter::repeat_n(s.clone(), self.copies)).collect())
    }
}

/// Hypothesis pair for the `qht` suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub rho: Option<StateSpec>,
    pub sigma: Option<StateSpec>,
    /// Rotates σ by this angle (qubits only) to make the pair non-commuting.
    pub rotation: Option<f64>,
    pub path: Option<PathBuf>,
}

impl InstanceSpec {
    pub fn build(&self, base: &Path) -> Result<HypothesisInstance> {
        if let Some(path) = &self.path {
            return InstanceDoc::parse(&std::fs::read_to_string(base.join(path))?);
        }
        let (Some(rho), Some(sigma)) = (&self.rho, &self.sigma) else {
            return Err(Error::Document("instance needs `rho` and `sigma`, or `path`".into()));
        };
        let rho = rho.density()?;
        let mut sigma = sigma.density()?;
        if let Some(theta) = self.rotation {
            if sigma.dim() != 2 {
                return Err(Error::Document("`rotation` applies to qubit states only".into()));
            }
            sigma = Density::new(conjugate(&qubit_rotation(theta), sigma.matrix()))?;
        }
        HypothesisInstance::new(rho, sigma, 1)
    }
}

/// Experiment document. Seeds are mandatory so every run is reproducible.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub seed: u64,
    pub generator: Option<GeneratorSpec>,
    pub instance: Option<InstanceSpec>,
    #[serde(default)]
    pub p_grid: Vec<f64>,
    #[serde(default)]
    pub q_grid: Vec<f64>,
    /// Absolute times. When empty, `t_factors` multiplies each threshold.
    #[serde(default)]
    pub t_grid: Vec<f64>,
    #[serde(default = "unit_factors")]
    pub t_factors: Vec<f64>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default)]
    pub eps_grid: Vec<f64>,
    #[serde(default)]
    pub messages_grid: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_codes")]
    pub codes_per_cell: usize,
    pub starts: Option<usize>,
    pub max_iter: Option<usize>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    /// Also run the reverse Hölder form in the `rhc` suite.
    #[serde(default)]
    pub reverse_holder: bool,
    pub tolerance: Option<f64>,
    /// Output prefix; `<prefix>.csv` and `<prefix>.json` are written.
    pub output: Option<PathBuf>,
    /// Directory that relative paths resolve against; set by the loader.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn unit_factors() -> Vec<f64> {
    vec![1.0]
}

fn default_samples() -> usize {
    1000
}

fn default_codes() -> usize {
    20
}

impl ExperimentConfig {
    /// Parses TOML, falling back to JSON.
    pub fn parse(text: &str) -> Result<Self> {
        match toml::from_str::<ExperimentConfig>(text) {
            Ok(c) => Ok(c),
            Err(toml_err) => serde_json::from_str(text).map_err(|json_err| {
                Error::Document(format!("config is neither TOML ({toml_err}) nor JSON ({json_err})"))
            }),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn generator(&self) -> Result<LindbladGenerator> {
        self.generator
            .as_ref()
            .ok_or_else(|| Error::Document(format!("suite {} needs a [generator]", self.suite.name())))?
            .build(&self.base_dir)
    }

    pub fn tolerance_or(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Document(format!("suite {} needs a non-empty {what}", self.suite.name())))
            }
        };
        if let Some(t) = self.tolerance {
            if !(t >= f64::EPSILON && t.is_finite()) {
                return Err(Error::Document(format!("tolerance {t} is below machine precision")));
            }
        }
        if self.samples == 0 {
            return Err(Error::Document("`samples` must be positive".into()));
        }
        if self.t_grid.is_empty() {
            need(!self.t_factors.is_empty(), "t_factors")?;
        }
        match self.suite {
            Suite::Norms | Suite::Entropy | Suite::LsiEstimate | Suite::Sv => {
                need(!self.p_grid.is_empty(), "p_grid")?;
                need(self.generator.is_some(), "generator")
            }
            Suite::LsiVerify => {
                need(!self.p_grid.is_empty(), "p_grid")?;
                need(self.beta.is_some(), "beta")?;
                need(self.generator.is_some(), "generator")
            }
            Suite::Semigroup => {
                need(!self.p_grid.is_empty(), "p_grid")?;
                need(!self.t_grid.is_empty(), "t_grid")?;
                need(self.generator.is_some(), "generator")
            }
            Suite::Hc | Suite::Rhc => {
                need(!self.p_grid.is_empty(), "p_grid")?;
                need(!self.q_grid.is_empty(), "q_grid")?;
                need(self.generator.is_some(), "generator")
            }
            Suite::Qht => {
                need(!self.n_grid.is_empty(), "n_grid")?;
                need(!self.eps_grid.is_empty(), "eps_grid")?;
                need(self.instance.is_some(), "instance")
            }
            Suite::Cq => {
                need(!self.n_grid.is_empty(), "n_grid")?;
                need(!self.messages_grid.is_empty(), "messages_grid")
            }
        }
    }
}

