//! Scenario files: the JSON schema, validation with field-level errors, and
//! resolution into a graph, metric, centers and grids.
//!
//! Relative paths inside a scenario resolve against the scenario's directory.

use std::path::{Path, PathBuf};

use hklab::bounds::Rule;
use hklab::geometry::{DimensionParams, Exponent, SobolevBudget, SobolevTargets};
use hklab::graph::io::read_graph;
use hklab::metric::{default_intrinsic_metric, IntrinsicMetric};
use hklab::zoo::GeneratorSpec;
use hklab::{Graph, Metric};
use hklab_lab::statements;
use hklab_lab::suite::RandomBudget;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;
use crate::times::TimeSpec;

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config { field: field.to_string(), message: message.into() }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub graph: GraphSource,
    #[serde(default)]
    pub metric: MetricSpec,
    pub params: ParamBlock,
    /// Per-center replacements of `params`, keyed by vertex id.
    #[serde(default)]
    pub overrides: Vec<CenterParams>,
    pub centers: CenterSpec,
    pub radii: RadiusSpec,
    /// Declared `C_S`, `C_D`; estimates above them leave the centers uncertified.
    #[serde(default)]
    pub targets: SobolevTargets,
    #[serde(default)]
    pub times: Option<TimeSpec>,
    #[serde(default)]
    pub pairs: PairSpec,
    #[serde(default)]
    pub rule: RuleSpec,
    /// Added to every log-rhs of `scan`; nonzero only for negative controls.
    #[serde(default)]
    pub ln_adjust: f64,
    #[serde(default)]
    pub suite: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sobolev: BudgetSpec,
    #[serde(default)]
    pub random: RandomSpec,
    /// Kernel-slice cache budget; the environment variable takes precedence.
    #[serde(default)]
    pub cache_mb: Option<usize>,
    /// Base directory for timestamped run directories.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    Generator(GeneratorSpec),
    File(PathBuf),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    /// Path metric with edge lengths `(1/Deg)^{1/2} ∧ cap`.
    Cap(f64),
    /// CSV of `(u, v, rho)` triples.
    File(PathBuf),
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec::Cap(1.0)
    }
}

/// `p ∈ (1, ∞]`, written as a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PValue(pub Exponent<f64>);

impl Serialize for PValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Exponent::Infinite => s.serialize_str("inf"),
            Exponent::Finite(p) => s.serialize_f64(p),
        }
    }
}

impl<'de> Deserialize<'de> for PValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(PValue(Exponent::Finite(p))),
            Raw::Str(s) if s == "inf" => Ok(PValue(Exponent::Infinite)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("p must be a number or \"inf\", got \"{s}\""))),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParamBlock {
    pub n: f64,
    pub d: f64,
    pub p: PValue,
}

impl ParamBlock {
    pub fn resolve(&self, field: &str) -> Result<DimensionParams<f64>, CliError> {
        if !(self.n > 2.0) || !self.n.is_finite() {
            return Err(invalid(&format!("{field}.n"), format!("must exceed 2, got {}", self.n)));
        }
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(invalid(&format!("{field}.d"), format!("must be positive, got {}", self.d)));
        }
        if let Exponent::Finite(p) = self.p.0 {
            if !(p > 1.0) || !p.is_finite() {
                return Err(invalid(&format!("{field}.p"), format!("must lie in (1, inf], got {p}")));
            }
        }
        Ok(DimensionParams::new(self.n, self.d, self.p.0)?)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CenterParams {
    pub vertex: String,
    #[serde(flatten)]
    pub params: ParamBlock,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CenterSpec {
    /// Explicit vertex ids.
    Vertices(Vec<String>),
    /// Seeded uniform sample of non-Dirichlet vertices, sorted by index.
    Sample(usize),
}

/// `r` and the outer radius `R`, where `R = "inf"` requests `SV(r, ∞)`.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusSpec {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: PValue,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSpec {
    /// All `(i, j)` with `i ≤ j` over the centers.
    #[default]
    All,
    Diagonal,
    List(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleSpec {
    #[default]
    Main,
    Davies,
    Normalized,
    PositiveMeasure {
        inf_m: f64,
    },
    Degenerating {
        growth: f64,
        mu1: f64,
    },
}

impl RuleSpec {
    pub fn resolve(&self) -> Rule<f64> {
        match *self {
            RuleSpec::Main => Rule::Main,
            RuleSpec::Davies => Rule::Davies,
            RuleSpec::Normalized => Rule::Normalized,
            RuleSpec::PositiveMeasure { inf_m } => Rule::PositiveMeasure { inf_m },
            RuleSpec::Degenerating { growth, mu1 } => Rule::Degenerating { growth, mu1 },
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSpec {
    pub starts: usize,
    pub max_iters: usize,
}

impl Default for BudgetSpec {
    fn default() -> Self {
        let b = SobolevBudget::default();
        BudgetSpec { starts: b.starts, max_iters: b.max_iters }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomSpec {
    pub instances: usize,
    pub max_vertices: usize,
    pub elementary_draws: usize,
    pub interpolation_draws: usize,
    pub claim_draws: usize,
}

impl Default for RandomSpec {
    fn default() -> Self {
        let b = RandomBudget::default();
        RandomSpec {
            instances: b.instances,
            max_vertices: b.max_vertices,
            elementary_draws: b.elementary_draws,
            interpolation_draws: b.interpolation_draws,
            claim_draws: b.claim_draws,
        }
    }
}

impl RandomSpec {
    pub fn budget(&self) -> RandomBudget {
        RandomBudget {
            instances: self.instances,
            max_vertices: self.max_vertices,
            elementary_draws: self.elementary_draws,
            interpolation_draws: self.interpolation_draws,
            claim_draws: self.claim_draws,
        }
    }
}

/// A scenario file together with the directory its paths resolve against.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub base: PathBuf,
    pub path: PathBuf,
}

impl LoadedScenario {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid("scenario", format!("cannot read {}: {e}", path.display())))?;
        let scenario: Scenario = serde_json::from_str(&text).map_err(|e| invalid("scenario", format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedScenario { scenario, base, path: path.to_path_buf() })
    }

    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn name(&self) -> String {
        self.scenario.name.clone().unwrap_or_else(|| self.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
    }

    pub fn load_graph(&self) -> Result<Graph, CliError> {
        match &self.scenario.graph {
            GraphSource::Generator(spec) => spec.generate().map_err(|e| invalid("graph.generator", e.to_string())),
            GraphSource::File(p) => {
                let path = self.resolve_path(p);
                if !path.exists() {
                    return Err(invalid("graph.file", format!("{} does not exist", path.display())));
                }
                read_graph(&path).map_err(|e| invalid("graph.file", e.to_string()))
            }
        }
    }

    pub fn load_metric(&self, g: &Graph) -> Result<Metric, CliError> {
        match &self.scenario.metric {
            MetricSpec::Cap(cap) => default_intrinsic_metric(g, *cap).map_err(|e| invalid("metric.cap", e.to_string())),
            MetricSpec::File(p) => {
                let path = self.resolve_path(p);
                if !path.exists() {
                    return Err(invalid("metric.file", format!("{} does not exist", path.display())));
                }
                IntrinsicMetric::from_csv(g, &path).map_err(|e| invalid("metric.file", e.to_string()))
            }
        }
    }

    /// Center vertex indices in scenario order.
    pub fn centers(&self, g: &Graph, seed: u64) -> Result<Vec<usize>, CliError> {
        match &self.scenario.centers {
            CenterSpec::Vertices(ids) => {
                if ids.is_empty() {
                    return Err(invalid("centers.vertices", "must list at least one vertex"));
                }
                ids.iter().map(|id| g.index_of(id).map_err(|_| invalid("centers.vertices", format!("unknown vertex `{id}`")))).collect()
            }
            CenterSpec::Sample(k) => {
                let active: Vec<usize> = (0..g.len()).filter(|&x| !g.is_dirichlet(x)).collect();
                if *k == 0 || *k > active.len() {
                    return Err(invalid("centers.sample", format!("must lie in 1..={}, got {k}", active.len())));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picked: Vec<usize> = sample(&mut rng, active.len(), *k).into_iter().map(|i| active[i]).collect();
                picked.sort_unstable();
                Ok(picked)
            }
        }
    }

    pub fn params_for(&self, g: &Graph, x: usize) -> Result<DimensionParams<f64>, CliError> {
        let id = g.id(x);
        match self.scenario.overrides.iter().position(|o| o.vertex == id) {
            Some(i) => self.scenario.overrides[i].params.resolve(&format!("overrides[{i}]")),
            None => self.scenario.params.resolve("params"),
        }
    }

    pub fn radii(&self) -> Result<(f64, Option<f64>), CliError> {
        let RadiusSpec { r, big_r } = self.scenario.radii;
        if !(r > 0.0) || !r.is_finite() {
            return Err(invalid("radii.r", format!("must be positive, got {r}")));
        }
        match big_r.0 {
            Exponent::Infinite => Ok((r, None)),
            Exponent::Finite(big) if big >= 2.0 * r && big.is_finite() => Ok((r, Some(big))),
            Exponent::Finite(big) => Err(invalid("radii.R", format!("must be at least 2r = {}, got {big}", 2.0 * r))),
        }
    }

    pub fn pairs(&self, centers: usize) -> Result<Vec<(usize, usize)>, CliError> {
        let pairs = match &self.scenario.pairs {
            PairSpec::All => (0..centers).flat_map(|i| (i..centers).map(move |j| (i, j))).collect(),
            PairSpec::Diagonal => (0..centers).map(|i| (i, i)).collect(),
            PairSpec::List(list) => list.clone(),
        };
        if pairs.is_empty() {
            return Err(invalid("pairs", "pair grid is empty"));
        }
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= centers || j >= centers) {
            return Err(invalid("pairs", format!("pair ({i}, {j}) references a missing center (have {centers})")));
        }
        Ok(pairs)
    }

    /// `--times` wins over the scenario grid; the result is nonempty and positive.
    pub fn times(&self, cli: Option<&TimeSpec>) -> Result<Vec<f64>, CliError> {
        let spec = cli.or(self.scenario.times.as_ref()).ok_or_else(|| invalid("times", "no time grid given"))?;
        let times = spec.values().map_err(|m| invalid("times", m))?;
        if times.is_empty() {
            return Err(invalid("times", "time grid is empty"));
        }
        if let Some(t) = times.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
            return Err(invalid("times", format!("times must be positive and finite, got {t}")));
        }
        Ok(times)
    }

    /// `--suite` wins over the scenario list; empty means every statement.
    pub fn suite(&self, cli: Option<&[String]>) -> Result<Vec<String>, CliError> {
        let ids: Vec<String> = match cli {
            Some(ids) => ids.to_vec(),
            None if self.scenario.suite.is_empty() => statements::ALL.iter().map(|s| s.to_string()).collect(),
            None => self.scenario.suite.clone(),
        };
        if let Some(bad) = ids.iter().find(|id| !statements::is_known(id)) {
            return Err(invalid("suite", format!("unknown statement `{bad}`")));
        }
        Ok(ids)
    }

    pub fn sobolev_budget(&self, seed: u64) -> SobolevBudget {
        SobolevBudget { starts: self.scenario.sobolev.starts, max_iters: self.scenario.sobolev.max_iters, seed }
    }

    pub fn cache_bytes(&self) -> Option<usize> {
        if std::env::var(hklab::semigroup::CACHE_ENV).is_ok() {
            return None;
        }
        self.scenario.cache_mb.map(|mb| mb * 1024 * 1024)
    }
}
