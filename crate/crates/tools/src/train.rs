//! Training loop: binds models, samplers, and Adam; records per-epoch loss
//! and wall-clock time, and packages trained models into artifacts.

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use trackinr_core::codec::{CompressedArtifact, Precision};
use trackinr_core::models::{build_model, ModelError, ModelParams, ModelSpec};
use trackinr_core::nn::{adam_step, AdamHyper, AdamState, NnError};
use trackinr_core::sampling::{
    default_epsilon, entropy_allocate, entropy_histogram, importance_weights, BinAllocation,
    SamplingError, WeightedSampler,
};
use trackinr_core::volume::{grid_coords, normalize_value, Dims, Volume3D, VolumeError};

/// Evaluation chunk size for full-grid MSE passes.
const EVAL_CHUNK: usize = 4096;

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("non-finite loss at epoch {epoch}; try a lower learning rate")]
    NonFinite { epoch: usize },
}

/// How training points are drawn each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerMethod {
    /// Every cell exactly once per epoch, fixed flat order.
    Full,
    /// Weighted by |value| with a floor ε for zeros.
    Importance,
    /// Histogram-flattening quota sampler.
    Entropy,
    /// Uniform with replacement.
    Random,
}

impl SamplerMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerMethod::Full => "full",
            SamplerMethod::Importance => "importance",
            SamplerMethod::Entropy => "entropy",
            SamplerMethod::Random => "random",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "full" => Some(SamplerMethod::Full),
            "importance" => Some(SamplerMethod::Importance),
            "entropy" => Some(SamplerMethod::Entropy),
            "random" => Some(SamplerMethod::Random),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub method: SamplerMethod,
    /// Fraction of the volume's cells touched per epoch.
    pub rho: f64,
    /// Importance floor for zero cells; `None` means 1e-3 x mean nonzero |y|.
    pub epsilon: Option<f64>,
    /// Histogram bins for the entropy method.
    pub bins: usize,
    /// Shuffle the FULL iteration order each epoch (off by default).
    pub shuffle: bool,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            method: SamplerMethod::Full,
            rho: 1.0,
            epsilon: None,
            bins: 256,
            shuffle: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub hyper: AdamHyper,
    pub sampler: SamplerSpec,
    pub seed: u64,
    /// Full-grid MSE is evaluated every this many epochs (and on the last).
    pub loss_eval_every: usize,
    /// Stop as soon as an evaluated full-grid MSE drops below this.
    pub target_full_mse: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 500,
            batch_size: 4096,
            hyper: AdamHyper::default(),
            sampler: SamplerSpec::default(),
            seed: 0,
            loss_eval_every: 10,
            target_full_mse: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.epochs == 0 {
            return Err(TrainError::BadConfig("epochs must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(TrainError::BadConfig("batch_size must be positive".into()));
        }
        if self.loss_eval_every == 0 {
            return Err(TrainError::BadConfig(
                "loss_eval_every must be positive".into(),
            ));
        }
        if !(self.sampler.rho > 0.0 && self.sampler.rho <= 1.0) {
            return Err(TrainError::BadConfig(format!(
                "rho must be in (0,1], got {}",
                self.sampler.rho
            )));
        }
        if self.sampler.bins == 0 {
            return Err(TrainError::BadConfig("bins must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean squared error over the points actually trained on this epoch.
    pub train_loss: f64,
    /// Full-grid normalized MSE when evaluated this epoch.
    pub full_mse: Option<f64>,
    pub wall_ms: f64,
    /// Portion of `wall_ms` spent drawing sample indices.
    pub sample_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub records: Vec<EpochRecord>,
    /// One-off sampler construction cost (weights/CDF or histogram+quotas).
    pub setup_ms: f64,
}

impl TrainLog {
    /// The last evaluated full-grid normalized MSE.
    pub fn final_full_mse(&self) -> Option<f64> {
        self.records.iter().rev().find_map(|r| r.full_mse)
    }

    /// Raw-ADC-scale final MSE (normalized MSE x 1023^2).
    pub fn final_raw_mse(&self) -> Option<f64> {
        self.final_full_mse().map(|m| m * 1023.0 * 1023.0)
    }

    pub fn total_wall_ms(&self) -> f64 {
        self.records.iter().map(|r| r.wall_ms).sum()
    }

    pub fn mean_epoch_wall_ms(&self) -> f64 {
        if self.records.is_empty() {
            0.0
        } else {
            self.total_wall_ms() / self.records.len() as f64
        }
    }

    pub fn mean_sample_ms(&self) -> f64 {
        if self.records.is_empty() {
            0.0
        } else {
            self.records.iter().map(|r| r.sample_ms).sum::<f64>() / self.records.len() as f64
        }
    }

    /// Writes `epoch,train_loss,full_mse,wall_ms`; `full_mse` is blank on
    /// epochs where the full grid was not evaluated.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "epoch,train_loss,full_mse,wall_ms")?;
        for r in &self.records {
            let full = r.full_mse.map(|m| m.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{}", r.epoch, r.train_loss, full, r.wall_ms)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// Per-epoch index source, constructed once so its cost is attributable.
enum Sampler {
    Full { order: Vec<usize>, shuffle: bool },
    Importance { sampler: WeightedSampler },
    Entropy { members: Vec<Vec<u32>>, alloc: BinAllocation },
    Random { n_total: usize },
}

impl Sampler {
    fn build(
        method: SamplerMethod,
        spec: &SamplerSpec,
        targets: &[f64],
    ) -> Result<Self, TrainError> {
        Ok(match method {
            SamplerMethod::Full => Sampler::Full {
                order: (0..targets.len()).collect(),
                shuffle: spec.shuffle,
            },
            SamplerMethod::Importance => {
                let eps = spec.epsilon.unwrap_or_else(|| default_epsilon(targets));
                let w = importance_weights(targets, eps)?;
                Sampler::Importance {
                    sampler: WeightedSampler::new(&w),
                }
            }
            SamplerMethod::Entropy => {
                let hist = entropy_histogram(targets, spec.bins)?;
                let alloc = entropy_allocate(&hist, spec.rho)?;
                let mut members: Vec<Vec<u32>> = vec![Vec::new(); spec.bins];
                for (i, &v) in targets.iter().enumerate() {
                    members[hist.bin_of(v)].push(i as u32);
                }
                Sampler::Entropy { members, alloc }
            }
            SamplerMethod::Random => Sampler::Random {
                n_total: targets.len(),
            },
        })
    }

    fn draw(&mut self, n_points: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        use rand::seq::SliceRandom;
        match self {
            Sampler::Full { order, shuffle } => {
                if *shuffle {
                    order.shuffle(rng);
                }
                order.clone()
            }
            Sampler::Importance { sampler } => sampler.draw(n_points, rng),
            Sampler::Entropy { members, alloc } => {
                use rand::Rng;
                let mut out = Vec::with_capacity(alloc.budget() as usize);
                for (bin, &take) in alloc.take.iter().enumerate() {
                    let m = &members[bin];
                    if m.is_empty() {
                        continue;
                    }
                    for _ in 0..take {
                        out.push(m[rng.gen_range(0..m.len())] as usize);
                    }
                }
                out
            }
            Sampler::Random { n_total } => {
                use rand::Rng;
                (0..n_points).map(|_| rng.gen_range(0..*n_total)).collect()
            }
        }
    }
}

/// Trains `spec` on `volume` per `cfg`. Deterministic given the seed; only
/// the timing fields of the log vary between runs.
pub fn train(
    volume: &Volume3D,
    spec: &ModelSpec,
    cfg: &TrainConfig,
) -> Result<(ModelParams, TrainLog), TrainError> {
    cfg.validate()?;
    let mut model = build_model(spec)?;
    let coords = grid_coords(volume.dims());
    let targets: Vec<f64> = volume.values().iter().map(|&v| normalize_value(v)).collect();
    let n = targets.len();
    if n == 0 {
        return Err(TrainError::BadConfig("empty volume".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let setup_start = Instant::now();
    let mut sampler = Sampler::build(cfg.sampler.method, &cfg.sampler, &targets)?;
    let setup_ms = setup_start.elapsed().as_secs_f64() * 1e3;

    // An epoch touches rho*N points regardless of method (all N under FULL),
    // so time-vs-rho comparisons are like for like.
    let n_points = match cfg.sampler.method {
        SamplerMethod::Full => n,
        _ => (n as f64 * cfg.sampler.rho).round_ties_even().max(1.0) as usize,
    };

    let mut adam = AdamState::new(model.stack.param_count(), cfg.hyper);
    let mut log = TrainLog {
        records: Vec::with_capacity(cfg.epochs),
        setup_ms,
    };

    let mut batch_coords: Vec<[f64; 3]> = Vec::with_capacity(cfg.batch_size);
    let mut batch_targets: Vec<f64> = Vec::with_capacity(cfg.batch_size);
    for epoch in 1..=cfg.epochs {
        let epoch_start = Instant::now();
        let indices = sampler.draw(n_points, &mut rng);
        let sample_ms = epoch_start.elapsed().as_secs_f64() * 1e3;

        let mut sse = 0.0;
        for chunk in indices.chunks(cfg.batch_size) {
            batch_coords.clear();
            batch_targets.clear();
            for &i in chunk {
                batch_coords.push(coords[i]);
                batch_targets.push(targets[i]);
            }
            let (grads, loss) = model.backward(&batch_coords, &batch_targets)?;
            if !loss.is_finite() {
                return Err(TrainError::NonFinite { epoch });
            }
            sse += loss * chunk.len() as f64;
            adam_step(&mut model.stack, &grads, &mut adam);
        }
        let train_loss = sse / indices.len() as f64;

        let full_mse = if epoch % cfg.loss_eval_every == 0 || epoch == cfg.epochs {
            Some(evaluate_full(&model, volume)?)
        } else {
            None
        };
        let wall_ms = (epoch_start.elapsed().as_secs_f64() * 1e3).max(f64::MIN_POSITIVE);
        log.records.push(EpochRecord {
            epoch,
            train_loss,
            full_mse,
            wall_ms,
            sample_ms,
        });
        if let (Some(target), Some(mse)) = (cfg.target_full_mse, full_mse) {
            if mse < target {
                break;
            }
        }
    }
    Ok((model, log))
}

/// Normalized MSE between the model evaluated on the full grid and the
/// volume. Accumulates cell-by-cell in flat order, so the result is
/// independent of the evaluation chunk size.
pub fn evaluate_full(model: &ModelParams, volume: &Volume3D) -> Result<f64, TrainError> {
    let coords = grid_coords(volume.dims());
    let values = volume.values();
    let mut sse = 0.0;
    for (chunk_idx, chunk) in coords.chunks(EVAL_CHUNK).enumerate() {
        let preds = model.eval(chunk)?;
        let base = chunk_idx * EVAL_CHUNK;
        for (off, &p) in preds.iter().enumerate() {
            let d = p - normalize_value(values[base + off]);
            sse += d * d;
        }
    }
    Ok(sse / values.len() as f64)
}

/// Trains and packages the result; the artifact records everything needed
/// to decode without external state.
pub fn compress(
    volume: &Volume3D,
    spec: &ModelSpec,
    cfg: &TrainConfig,
    precision: Precision,
) -> Result<(CompressedArtifact, TrainLog), TrainError> {
    compress_with_source(volume, spec, cfg, precision, volume.dims(), (1, 1, 1))
}

/// As [`compress`], but stamps the artifact with the original (pre
/// downsample) dims and the factors used, for super-resolution workflows.
pub fn compress_with_source(
    volume: &Volume3D,
    spec: &ModelSpec,
    cfg: &TrainConfig,
    precision: Precision,
    source_dims: Dims,
    downsample_factors: (u32, u32, u32),
) -> Result<(CompressedArtifact, TrainLog), TrainError> {
    let (model, log) = train(volume, spec, cfg)?;
    let artifact = CompressedArtifact::from_model(&model, source_dims, downsample_factors, precision);
    Ok((artifact, log))
}
