//! Declarative TOML config mirroring the synth/model/train/bench knobs.
//! Every field is optional; CLI flags override file values, which override
//! built-in defaults. Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    #[serde(default)]
    pub synth: SynthSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub bench: BenchSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub dims: Option<String>,
    pub tracks: Option<u32>,
    pub occupancy: Option<f64>,
    pub intensity_min: Option<u16>,
    pub intensity_max: Option<u16>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: Option<String>,
    pub width: Option<usize>,
    pub depth: Option<usize>,
    pub omega0: Option<f64>,
    pub sigma: Option<f64>,
    pub s0: Option<f64>,
    pub features: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub sampler: Option<String>,
    pub rho: Option<f64>,
    pub epsilon: Option<f64>,
    pub bins: Option<usize>,
    pub seed: Option<u64>,
    pub loss_eval_every: Option<usize>,
    pub target_mse: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    pub widths: Option<Vec<usize>>,
    pub kinds: Option<Vec<String>>,
    pub methods: Option<Vec<String>>,
    pub rhos: Option<Vec<f64>>,
    pub scales: Option<Vec<u32>>,
    pub seeds: Option<Vec<u64>>,
    pub epochs: Option<usize>,
    pub omega0: Option<f64>,
    pub learning_rate: Option<f64>,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<CliConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })
    }
}
