use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stocknet::infostats::{DEFAULT_ALPHA, DEFAULT_ESTIMATOR, DEFAULT_TRIALS};
use stocknet::ingest::{SessionConfig, DEFAULT_MAX_EMPTY_FRACTION};
use stocknet::netgraph::DEFAULT_HUB_THRESHOLD;
use stocknet::rmt::HISTOGRAM_BINS;
use stocknet::synth::{MarketSpec, PeriodSpec};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub input: InputConfig,
    #[serde(default)]
    pub session: SessionConfig,
    #[serde(default)]
    pub ingest: IngestParams,
    #[serde(default)]
    pub pairs: PairParams,
    #[serde(default)]
    pub rmt: RmtParams,
    #[serde(default)]
    pub network: NetworkParams,
    #[serde(default)]
    pub synth: Option<SynthParams>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Tick CSV; when absent the synthetic market under `out_dir/synth` is used.
    pub ticks: Option<PathBuf>,
    /// `symbol,sector` CSV.
    pub sectors: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestParams {
    #[serde(default = "default_max_empty")]
    pub max_empty_fraction: f64,
    #[serde(default)]
    pub strict: bool,
}

fn default_max_empty() -> f64 {
    DEFAULT_MAX_EMPTY_FRACTION
}

impl Default for IngestParams {
    fn default() -> Self {
        Self {
            max_empty_fraction: default_max_empty(),
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairParams {
    #[serde(default = "default_estimator")]
    pub estimator: String,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_estimator() -> String {
    DEFAULT_ESTIMATOR.to_string()
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

impl Default for PairParams {
    fn default() -> Self {
        Self {
            estimator: default_estimator(),
            trials: default_trials(),
            alpha: default_alpha(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RmtParams {
    #[serde(default = "default_surrogates")]
    pub surrogate_trials: usize,
    #[serde(default = "default_bins")]
    pub histogram_bins: usize,
    #[serde(default = "default_top")]
    pub top_eigenvectors: usize,
}

fn default_surrogates() -> usize {
    50
}

fn default_bins() -> usize {
    HISTOGRAM_BINS
}

fn default_top() -> usize {
    3
}

impl Default for RmtParams {
    fn default() -> Self {
        Self {
            surrogate_trials: default_surrogates(),
            histogram_bins: default_bins(),
            top_eigenvectors: default_top(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_hub")]
    pub hub_threshold: usize,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_methods() -> Vec<String> {
    vec!["corr".into(), "mi".into()]
}

fn default_hub() -> usize {
    DEFAULT_HUB_THRESHOLD
}

fn default_formats() -> Vec<String> {
    vec!["graphml".into(), "gexf".into()]
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            methods: default_methods(),
            hub_threshold: default_hub(),
            formats: default_formats(),
        }
    }
}

/// Synthetic market. The session layout comes from the top-level `[session]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    #[serde(default = "default_price_scale")]
    pub price_scale: f64,
    #[serde(flatten)]
    pub market: MarketSpec,
}

fn default_price_scale() -> f64 {
    100.0
}

impl Default for SynthParams {
    /// 30 symbols in 6 sectors over two 10-day periods.
    fn default() -> Self {
        let mut market = MarketSpec::blocks(30, 6, 0.4, 0.3);
        market.periods = vec![
            PeriodSpec { name: "first".into(), days: 10 },
            PeriodSpec { name: "second".into(), days: 10 },
        ];
        Self {
            price_scale: default_price_scale(),
            market,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// True when ticks come from the configured synthetic market.
    pub fn uses_synth(&self) -> bool {
        self.input.ticks.is_none()
    }

    /// The market to synthesise, seeded with `seed`, on the configured session.
    pub fn market(&self, seed: u64) -> (MarketSpec, f64) {
        let params = self.synth.clone().unwrap_or_default();
        let mut m = params.market;
        m.session = self.session.clone();
        m.seed = seed;
        (m, params.price_scale)
    }

    /// Session used for ingest: the synthetic calendar when ticks are synthetic.
    pub fn effective_session(&self, seed: u64) -> SessionConfig {
        if self.uses_synth() {
            self.market(seed).0.calendar().1
        } else {
            self.session.clone()
        }
    }

    /// Hash of every analysis setting; paths, output directory and seed excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.seed = 0;
        c.out_dir = None;
        c.input = InputConfig::default();
        let canonical = serde_json::to_vec(&c).expect("config serialises");
        hex::encode(&Sha256::digest(&canonical)[..8])
    }
}
