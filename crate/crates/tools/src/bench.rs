//! Benchmark suites: super-resolution reconstruction, rate-distortion, and
//! sampling efficiency, with CSV tables and an ordering-check summary.

use serde::{Deserialize, Serialize};

use trackinr_core::codec::{error_map, Precision};
use trackinr_core::models::{ModelKind, ModelSpec};
use trackinr_core::volume::Volume3D;

use crate::train::{compress_with_source, train, SamplerMethod, SamplerSpec, TrainConfig, TrainError};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("empty record list")]
    EmptyRecords,
    #[error("sweep spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Volume(#[from] trackinr_core::volume::VolumeError),
    #[error(transparent)]
    Codec(#[from] trackinr_core::codec::CodecError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// A super-resolution scale: S is the product of the per-axis factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub s: u32,
    pub factors: (u32, u32, u32),
}

impl Scale {
    pub const S1: Scale = Scale { s: 1, factors: (1, 1, 1) };
    pub const S4: Scale = Scale { s: 4, factors: (2, 2, 1) };
    pub const S16: Scale = Scale { s: 16, factors: (4, 4, 1) };
    /// Subsamples the r (layer) axis, unlike S16.
    pub const S8: Scale = Scale { s: 8, factors: (2, 2, 2) };
}

/// The sweep grid for one benchmark run.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub volume: Volume3D,
    pub kinds: Vec<ModelKind>,
    pub widths: Vec<usize>,
    pub depth: usize,
    pub methods: Vec<SamplerMethod>,
    pub rhos: Vec<f64>,
    pub scales: Vec<Scale>,
    pub seeds: Vec<u64>,
    pub epochs: usize,
    pub batch_size: usize,
    /// Overrides the SIREN first-layer frequency when set; volumes whose
    /// features are narrow relative to the grid need a higher omega0 than
    /// the default to converge within a bench-scale epoch budget.
    pub siren_omega0: Option<f64>,
    /// Overrides the Adam learning rate when set (higher omega0 needs a
    /// proportionally smaller step to stay stable).
    pub learning_rate: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.kinds.is_empty()
            || self.widths.is_empty()
            || self.methods.is_empty()
            || self.rhos.is_empty()
            || self.scales.is_empty()
            || self.seeds.is_empty()
        {
            return Err(BenchError::BadSpec("all sweep lists must be nonempty".into()));
        }
        if self.depth == 0 || self.epochs == 0 || self.batch_size == 0 {
            return Err(BenchError::BadSpec("counts must be positive".into()));
        }
        Ok(())
    }

    fn train_config(&self, method: SamplerMethod, rho: f64, seed: u64) -> TrainConfig {
        let mut cfg = TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            sampler: SamplerSpec {
                method,
                rho,
                ..SamplerSpec::default()
            },
            seed,
            ..TrainConfig::default()
        };
        if let Some(lr) = self.learning_rate {
            cfg.hyper.lr = lr;
        }
        cfg
    }

    fn model_spec(&self, kind: ModelKind, width: usize, seed: u64) -> ModelSpec {
        let mut spec = ModelSpec::new(kind, vec![width; self.depth], seed);
        if let Some(omega0) = self.siren_omega0 {
            spec.siren_omega0 = omega0;
        }
        spec
    }
}

/// One sweep cell's coordinates and measured metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub suite: String,
    pub kind: String,
    pub width: usize,
    pub method: String,
    pub rho: f64,
    pub scale_s: u32,
    pub seed: u64,
    pub full_mse: f64,
    pub raw_mse: f64,
    pub l1_mean: f64,
    pub psnr: f64,
    pub compression_ratio: f64,
    pub total_wall_ms: f64,
    pub per_epoch_wall_ms: f64,
    pub per_epoch_sample_ms: f64,
    pub setup_ms: f64,
}

/// Downsample-train-decode at full resolution for each scale in the spec
/// (the continuous-reconstruction experiment).
pub fn run_reconstruction_suite(spec: &SweepSpec) -> Result<Vec<BenchRecord>, BenchError> {
    spec.validate()?;
    let kind = spec.kinds[0];
    let width = spec.widths[0];
    let full_dims = spec.volume.dims();
    let mut records = Vec::new();
    for &scale in &spec.scales {
        for &seed in &spec.seeds {
            let training = spec.volume.downsample(scale.factors)?;
            let cfg = spec.train_config(SamplerMethod::Full, 1.0, seed);
            let model_spec = spec.model_spec(kind, width, seed);
            let (artifact, log) = compress_with_source(
                &training,
                &model_spec,
                &cfg,
                Precision::F32,
                full_dims,
                scale.factors,
            )?;
            let decoded = artifact.decompress(full_dims)?;
            let (_, summary) = error_map(&decoded, &spec.volume)?;
            records.push(BenchRecord {
                suite: "reconstruction".into(),
                kind: kind.name().into(),
                width,
                method: "full".into(),
                rho: 1.0,
                scale_s: scale.s,
                seed,
                full_mse: summary.mse / (1023.0 * 1023.0),
                raw_mse: summary.mse,
                l1_mean: summary.l1_mean,
                psnr: summary.psnr,
                compression_ratio: artifact.compression_ratio(),
                total_wall_ms: log.total_wall_ms(),
                per_epoch_wall_ms: log.mean_epoch_wall_ms(),
                per_epoch_sample_ms: log.mean_sample_ms(),
                setup_ms: log.setup_ms,
            });
        }
    }
    Ok(records)
}

/// Compression-ratio vs MSE curve per architecture (the rate-distortion
/// experiment); width is the rate knob.
pub fn run_rate_distortion(spec: &SweepSpec) -> Result<Vec<BenchRecord>, BenchError> {
    spec.validate()?;
    let mut records = Vec::new();
    for &kind in &spec.kinds {
        for &width in &spec.widths {
            for &seed in &spec.seeds {
                let cfg = spec.train_config(SamplerMethod::Full, 1.0, seed);
                let model_spec = spec.model_spec(kind, width, seed);
                let (artifact, log) = compress_with_source(
                    &spec.volume,
                    &model_spec,
                    &cfg,
                    Precision::F32,
                    spec.volume.dims(),
                    (1, 1, 1),
                )?;
                let decoded = artifact.decompress(spec.volume.dims())?;
                let (_, summary) = error_map(&decoded, &spec.volume)?;
                records.push(BenchRecord {
                    suite: "rate_distortion".into(),
                    kind: kind.name().into(),
                    width,
                    method: "full".into(),
                    rho: 1.0,
                    scale_s: 1,
                    seed,
                    full_mse: log.final_full_mse().unwrap_or(f64::NAN),
                    raw_mse: summary.mse,
                    l1_mean: summary.l1_mean,
                    psnr: summary.psnr,
                    compression_ratio: artifact.compression_ratio(),
                    total_wall_ms: log.total_wall_ms(),
                    per_epoch_wall_ms: log.mean_epoch_wall_ms(),
                    per_epoch_sample_ms: log.mean_sample_ms(),
                    setup_ms: log.setup_ms,
                });
            }
        }
    }
    Ok(records)
}

/// MSE-vs-rho and time-vs-rho tables with a fixed SIREN baseline (the
/// sampling-efficiency experiment).
pub fn run_sampling_efficiency(spec: &SweepSpec) -> Result<Vec<BenchRecord>, BenchError> {
    spec.validate()?;
    let width = spec.widths[0];
    let mut records = Vec::new();
    for &method in &spec.methods {
        for &rho in &spec.rhos {
            for &seed in &spec.seeds {
                let cfg = spec.train_config(method, rho, seed);
                let model_spec = spec.model_spec(ModelKind::Siren, width, seed);
                let (_, log) = train(&spec.volume, &model_spec, &cfg)?;
                records.push(BenchRecord {
                    suite: "sampling".into(),
                    kind: "siren".into(),
                    width,
                    method: method.name().into(),
                    rho,
                    scale_s: 1,
                    seed,
                    full_mse: log.final_full_mse().unwrap_or(f64::NAN),
                    raw_mse: log.final_raw_mse().unwrap_or(f64::NAN),
                    l1_mean: f64::NAN,
                    psnr: f64::NAN,
                    compression_ratio: f64::NAN,
                    total_wall_ms: log.total_wall_ms(),
                    per_epoch_wall_ms: log.mean_epoch_wall_ms(),
                    per_epoch_sample_ms: log.mean_sample_ms(),
                    setup_ms: log.setup_ms,
                });
            }
        }
    }
    Ok(records)
}

pub fn records_to_csv(records: &[BenchRecord]) -> Result<String, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyRecords);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().expect("in-memory flush");
    Ok(String::from_utf8(bytes).expect("csv is utf8"))
}

pub fn records_from_csv(text: &str) -> Result<Vec<BenchRecord>, BenchError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Least-squares R^2 of y against x.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    (sxy * sxy) / (sxx * syy)
}

fn median_by<F: Fn(&BenchRecord) -> bool>(
    records: &[BenchRecord],
    pred: F,
    field: impl Fn(&BenchRecord) -> f64,
) -> f64 {
    let mut vals: Vec<f64> = records.iter().filter(|r| pred(r)).map(field).collect();
    median(&mut vals)
}

/// A human-readable summary: seed-median metrics plus pass/fail lines for
/// the ordering properties each suite claims. Pure in the records.
pub fn summarize(records: &[BenchRecord]) -> Result<String, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyRecords);
    }
    let mut out = String::new();
    let suites: Vec<&str> = {
        let mut s: Vec<&str> = records.iter().map(|r| r.suite.as_str()).collect();
        s.dedup();
        s.sort_unstable();
        s.dedup();
        s
    };

    for suite in suites {
        let rows: Vec<&BenchRecord> = records.iter().filter(|r| r.suite == suite).collect();
        out.push_str(&format!("## suite: {suite} ({} records)\n", rows.len()));
        match suite {
            "reconstruction" => summarize_reconstruction(records, &mut out),
            "rate_distortion" => summarize_rate_distortion(records, &mut out),
            "sampling" => summarize_sampling(records, &mut out),
            _ => {}
        }
        out.push('\n');
    }
    Ok(out)
}

fn push_check(out: &mut String, label: &str, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    out.push_str(&format!("[{tag}] {label}: {detail}\n"));
}

fn summarize_reconstruction(records: &[BenchRecord], out: &mut String) {
    let m = |s: u32| {
        median_by(
            records,
            |r| r.suite == "reconstruction" && r.scale_s == s,
            |r| r.raw_mse,
        )
    };
    let (m1, m4, m16, m8) = (m(1), m(4), m(16), m(8));
    for (s, v) in [(1, m1), (4, m4), (16, m16), (8, m8)] {
        if !v.is_nan() {
            out.push_str(&format!("median raw MSE at S={s}: {v:.3}\n"));
        }
    }
    if !(m1.is_nan() || m4.is_nan() || m16.is_nan()) {
        push_check(
            out,
            "MSE monotone over S in {1,4,16}",
            m1 <= m4 && m4 <= m16,
            format!("{m1:.3} <= {m4:.3} <= {m16:.3}"),
        );
    }
    if !(m8.is_nan() || m16.is_nan()) {
        push_check(
            out,
            "layer-axis sensitivity: MSE(S=8) > MSE(S=16)",
            m8 > m16,
            format!("{m8:.3} > {m16:.3}"),
        );
    }
}

fn summarize_rate_distortion(records: &[BenchRecord], out: &mut String) {
    let mut kinds: Vec<String> = records
        .iter()
        .filter(|r| r.suite == "rate_distortion")
        .map(|r| r.kind.clone())
        .collect();
    kinds.sort_unstable();
    kinds.dedup();
    for kind in &kinds {
        let mut widths: Vec<usize> = records
            .iter()
            .filter(|r| r.suite == "rate_distortion" && &r.kind == kind)
            .map(|r| r.width)
            .collect();
        widths.sort_unstable();
        widths.dedup();
        let points: Vec<(usize, f64, f64)> = widths
            .iter()
            .map(|&w| {
                let mse = median_by(
                    records,
                    |r| r.suite == "rate_distortion" && &r.kind == kind && r.width == w,
                    |r| r.full_mse,
                );
                let ratio = median_by(
                    records,
                    |r| r.suite == "rate_distortion" && &r.kind == kind && r.width == w,
                    |r| r.compression_ratio,
                );
                (w, ratio, mse)
            })
            .collect();
        for (w, ratio, mse) in &points {
            out.push_str(&format!(
                "{kind} width {w}: ratio {ratio:.2}, median full MSE {mse:.3e}\n"
            ));
        }
        let ratio_monotone = points.windows(2).all(|p| p[0].1 > p[1].1);
        push_check(
            out,
            &format!("{kind}: ratio strictly decreases as width grows"),
            ratio_monotone,
            format!("{:?}", points.iter().map(|p| p.1).collect::<Vec<_>>()),
        );
        let mse_monotone = points.windows(2).all(|p| p[0].2 >= p[1].2);
        push_check(
            out,
            &format!("{kind}: median MSE non-increasing in model bytes"),
            mse_monotone,
            format!("{:?}", points.iter().map(|p| p.2).collect::<Vec<_>>()),
        );
    }
    if kinds.iter().any(|k| k == "siren") && kinds.iter().any(|k| k == "mlp") {
        let mut widths: Vec<usize> = records
            .iter()
            .filter(|r| r.suite == "rate_distortion")
            .map(|r| r.width)
            .collect();
        widths.sort_unstable();
        widths.dedup();
        let ok = widths.iter().all(|&w| {
            let siren = median_by(
                records,
                |r| r.suite == "rate_distortion" && r.kind == "siren" && r.width == w,
                |r| r.full_mse,
            );
            let mlp = median_by(
                records,
                |r| r.suite == "rate_distortion" && r.kind == "mlp" && r.width == w,
                |r| r.full_mse,
            );
            siren <= mlp
        });
        push_check(
            out,
            "siren median MSE <= mlp at matched width",
            ok,
            format!("widths {widths:?}"),
        );
    }
}

fn summarize_sampling(records: &[BenchRecord], out: &mut String) {
    let mut rhos: Vec<f64> = records
        .iter()
        .filter(|r| r.suite == "sampling")
        .map(|r| r.rho)
        .collect();
    rhos.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rhos.dedup();

    let has = |m: &str| records.iter().any(|r| r.suite == "sampling" && r.method == m);
    if has("importance") && has("random") {
        let mut all_ok = true;
        for &rho in &rhos {
            let imp = median_by(
                records,
                |r| r.suite == "sampling" && r.method == "importance" && r.rho == rho,
                |r| r.full_mse,
            );
            let rnd = median_by(
                records,
                |r| r.suite == "sampling" && r.method == "random" && r.rho == rho,
                |r| r.full_mse,
            );
            if imp.is_nan() || rnd.is_nan() {
                continue;
            }
            let ok = imp <= rnd;
            all_ok &= ok;
            out.push_str(&format!(
                "rho {rho}: median full MSE importance {imp:.3e}, random {rnd:.3e}\n"
            ));
        }
        push_check(
            out,
            "importance median MSE <= random at every rho",
            all_ok,
            format!("rhos {rhos:?}"),
        );
    }

    for method in ["importance", "random"] {
        if !has(method) || rhos.len() < 3 {
            continue;
        }
        let times: Vec<f64> = rhos
            .iter()
            .map(|&rho| {
                median_by(
                    records,
                    |r| r.suite == "sampling" && r.method == method && r.rho == rho,
                    |r| r.per_epoch_wall_ms,
                )
            })
            .collect();
        let r2 = r_squared(&rhos, &times);
        push_check(
            out,
            &format!("{method}: per-epoch time linear in rho (R^2 > 0.95)"),
            r2 > 0.95,
            format!("R^2 = {r2:.4}"),
        );
    }

    if has("entropy") && has("importance") {
        let entropy_setup = median_by(
            records,
            |r| r.suite == "sampling" && r.method == "entropy",
            |r| r.setup_ms,
        );
        let importance_setup = median_by(
            records,
            |r| r.suite == "sampling" && r.method == "importance",
            |r| r.setup_ms,
        );
        push_check(
            out,
            "entropy setup overhead exceeds importance setup",
            entropy_setup > importance_setup,
            format!("{entropy_setup:.3} ms vs {importance_setup:.3} ms"),
        );
    }
}

/// Writes the CSV table and a sibling `.report.txt` summary.
pub fn emit_report(records: &[BenchRecord], csv_path: &std::path::Path) -> Result<(), BenchError> {
    let csv = records_to_csv(records)?;
    let summary = summarize(records)?;
    std::fs::write(csv_path, csv).map_err(|e| {
        BenchError::Csv(csv::Error::from(e))
    })?;
    let report_path = csv_path.with_extension("report.txt");
    std::fs::write(&report_path, summary)
        .map_err(|e| BenchError::Csv(csv::Error::from(e)))?;
    Ok(())
}
