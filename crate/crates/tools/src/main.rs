//! `trackinr` command line: synth, info, compress, decompress, eval, bench.
//!
//! Exit codes: 0 success, 1 usage/validation, 2 I/O, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trackinr::bench::{self, BenchError, Scale, SweepSpec};
use trackinr::config::{CliConfig, ConfigError};
use trackinr::io::{self, IoError};
use trackinr::train::{SamplerMethod, SamplerSpec, TrainConfig, TrainError};
use trackinr_core::codec::{error_map, Precision};
use trackinr_core::models::{ModelKind, ModelSpec};
use trackinr_core::nn::AdamHyper;
use trackinr_core::volume::{synth_tracks, Dims, SynthConfig, Volume3D, ZERO_SUPPRESSION};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Read { .. } => CliError::Io(e.to_string()),
            ConfigError::Parse { .. } => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::BadConfig(_) => CliError::Usage(e.to_string()),
            TrainError::NonFinite { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::BadSpec(_) | BenchError::EmptyRecords => CliError::Usage(e.to_string()),
            BenchError::Train(t) => CliError::from(t),
            BenchError::Csv(c) => CliError::Io(c.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "trackinr",
    about = "Neural compression of sparse detector volumes",
    version
)]
struct Cli {
    /// Optional TOML config; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic track volume and write it as INRV.
    Synth(SynthArgs),
    /// Describe an INRV volume or INRC artifact.
    Info(InfoArgs),
    /// Train a model on a volume and write an INRC artifact plus a train log.
    Compress(CompressArgs),
    /// Decode an INRC artifact to an INRV volume at any resolution.
    Decompress(DecompressArgs),
    /// Compare two volumes: MSE, L1 mean, PSNR, optional error map.
    Eval(EvalArgs),
    /// Run a benchmark suite and emit CSV plus a summary report.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Grid dims as CxZxR, e.g. 48x64x8.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    tracks: Option<u32>,
    /// Target fraction of nonzero cells, in (0,1).
    #[arg(long)]
    occupancy: Option<f64>,
    #[arg(long)]
    intensity_min: Option<u16>,
    #[arg(long)]
    intensity_max: Option<u16>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct InfoArgs {
    file: PathBuf,
}

#[derive(Args)]
struct CompressArgs {
    input: PathBuf,
    /// Architecture: mlp, ffnet, siren, or wire.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    s0: Option<f64>,
    #[arg(long)]
    features: Option<usize>,
    /// Sampler: full, importance, entropy, or random.
    #[arg(long)]
    sampler: Option<String>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    loss_eval_every: Option<usize>,
    /// Stop early once full-grid normalized MSE drops below this.
    #[arg(long)]
    target_mse: Option<f64>,
    /// Store weights as fp16 instead of fp32.
    #[arg(long)]
    fp16: bool,
    #[arg(short, long)]
    output: PathBuf,
    /// Train-log CSV path; defaults to the output path with a .csv extension.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct DecompressArgs {
    input: PathBuf,
    /// Target dims as CxZxR; defaults to the artifact's source dims.
    #[arg(long)]
    dims: Option<String>,
    /// Zero all decoded values below the 64-count suppression floor.
    #[arg(long)]
    resuppress: bool,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    reference: PathBuf,
    candidate: PathBuf,
    /// Write the per-cell |a-b| volume here.
    #[arg(long)]
    error_map: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite: reconstruction, rate, or sampling.
    #[arg(long)]
    suite: String,
    /// Train on this INRV instead of the default synthetic volume.
    #[arg(long)]
    volume: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    /// Print the sweep grid without running it.
    #[arg(long)]
    dry_run: bool,
    /// Upper bound on parallel sweep cells (cells run sequentially today).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn parse_dims(s: &str) -> Result<Dims, CliError> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "dims must be CxZxR (e.g. 96x125x16), got '{s}'"
        )));
    }
    let mut out = [0u32; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .parse::<u32>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| CliError::Usage(format!("bad dim component '{p}' in '{s}'")))?;
    }
    Ok(Dims::new(out[0], out[1], out[2]))
}

fn parse_kind(s: &str) -> Result<ModelKind, CliError> {
    match s {
        "mlp" => Ok(ModelKind::Mlp),
        "ffnet" => Ok(ModelKind::FfNet),
        "siren" => Ok(ModelKind::Siren),
        "wire" => Ok(ModelKind::Wire),
        _ => Err(CliError::Usage(format!(
            "unknown model '{s}' (expected mlp, ffnet, siren, or wire)"
        ))),
    }
}

fn parse_sampler(s: &str) -> Result<SamplerMethod, CliError> {
    SamplerMethod::from_name(s).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown sampler '{s}' (expected full, importance, entropy, or random)"
        ))
    })
}

fn load_config(path: &Option<PathBuf>) -> Result<CliConfig, CliError> {
    match path {
        Some(p) => Ok(CliConfig::load(p)?),
        None => Ok(CliConfig::default()),
    }
}

fn cmd_synth(cfg: &CliConfig, args: &SynthArgs) -> Result<(), CliError> {
    let file = &cfg.synth;
    let dims_str = args
        .dims
        .clone()
        .or_else(|| file.dims.clone())
        .unwrap_or_else(|| "96x125x16".into());
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let synth = SynthConfig {
        dims: parse_dims(&dims_str)?,
        n_tracks: args.tracks.or(file.tracks).unwrap_or(24),
        target_occupancy: args.occupancy.or(file.occupancy).unwrap_or(0.01),
        intensity_range: (
            args.intensity_min.or(file.intensity_min).unwrap_or(64),
            args.intensity_max.or(file.intensity_max).unwrap_or(1023),
        ),
        seed,
    };
    let volume = synth_tracks(&synth).map_err(|e| CliError::Usage(e.to_string()))?;
    io::save_volume(&volume, &args.output)?;
    println!("seed: {seed}");
    println!(
        "wrote {}: dims {}x{}x{}, occupancy {:.6}",
        args.output.display(),
        volume.dims().c,
        volume.dims().z,
        volume.dims().r,
        volume.occupancy()
    );
    Ok(())
}

fn cmd_info(args: &InfoArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.file)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.file.display())))?;
    if bytes.starts_with(b"INRV") {
        let v = Volume3D::decode(&bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", args.file.display())))?;
        let d = v.dims();
        println!("format: INRV");
        println!("dims: {}x{}x{}", d.c, d.z, d.r);
        println!("cells: {}", d.len());
        println!("occupancy: {:.6}", v.occupancy());
        println!(
            "raw_bytes: {}",
            d.len() * 2
        );
        println!(
            "value_range: {}..{}",
            v.values().iter().min().unwrap_or(&0),
            v.values().iter().max().unwrap_or(&0)
        );
    } else if bytes.starts_with(b"INRC") {
        let a = trackinr_core::codec::CompressedArtifact::decode(&bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", args.file.display())))?;
        println!("format: INRC");
        println!("model: {}", a.kind.name());
        println!("hidden_dims: {:?}", a.hidden_dims);
        println!("precision: {:?}", a.precision);
        println!("weights: {}", a.weights.len());
        println!(
            "source_dims: {}x{}x{}",
            a.source_dims.c, a.source_dims.z, a.source_dims.r
        );
        println!("artifact_bytes: {}", a.encoded_len());
        println!("compression_ratio: {:.4}", a.compression_ratio());
    } else {
        return Err(CliError::Io(format!(
            "{}: unrecognized magic (expected INRV or INRC)",
            args.file.display()
        )));
    }
    Ok(())
}

fn cmd_compress(cfg: &CliConfig, args: &CompressArgs) -> Result<(), CliError> {
    let volume = io::load_volume(&args.input)?;
    let m = &cfg.model;
    let t = &cfg.train;

    let kind = parse_kind(
        args.model
            .as_deref()
            .or(m.kind.as_deref())
            .unwrap_or("siren"),
    )?;
    let width = args.width.or(m.width).unwrap_or(128);
    let depth = args.depth.or(m.depth).unwrap_or(3);
    let seed = args.seed.or(t.seed).unwrap_or(0);
    let mut spec = ModelSpec::new(kind, vec![width; depth], seed);
    if let Some(v) = args.omega0.or(m.omega0) {
        spec.siren_omega0 = v;
        spec.wire_omega0 = v;
    }
    if let Some(v) = args.sigma.or(m.sigma) {
        spec.ffnet_sigma = v;
    }
    if let Some(v) = args.s0.or(m.s0) {
        spec.wire_s0 = v;
    }
    if let Some(v) = args.features.or(m.features) {
        spec.ffnet_features = v;
    }
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let method = parse_sampler(
        args.sampler
            .as_deref()
            .or(t.sampler.as_deref())
            .unwrap_or("full"),
    )?;
    let mut hyper = AdamHyper::default();
    if let Some(lr) = args.learning_rate.or(t.learning_rate) {
        hyper.lr = lr;
    }
    let train_cfg = TrainConfig {
        epochs: args.epochs.or(t.epochs).unwrap_or(500),
        batch_size: args.batch_size.or(t.batch_size).unwrap_or(4096),
        hyper,
        sampler: SamplerSpec {
            method,
            rho: args.rho.or(t.rho).unwrap_or(1.0),
            epsilon: args.epsilon.or(t.epsilon),
            bins: args.bins.or(t.bins).unwrap_or(256),
            shuffle: false,
        },
        seed,
        loss_eval_every: args.loss_eval_every.or(t.loss_eval_every).unwrap_or(10),
        target_full_mse: args.target_mse.or(t.target_mse),
    };
    println!("seed: {seed}");

    let precision = if args.fp16 { Precision::F16 } else { Precision::F32 };
    let (artifact, log) = trackinr::compress(&volume, &spec, &train_cfg, precision)?;
    io::save_artifact(&artifact, &args.output)?;

    let log_path = args
        .log
        .clone()
        .unwrap_or_else(|| args.output.with_extension("csv"));
    let file = std::fs::File::create(&log_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", log_path.display())))?;
    log.write_csv(file)
        .map_err(|e| CliError::Io(format!("{}: {e}", log_path.display())))?;

    println!("wrote {} ({} bytes)", args.output.display(), artifact.encoded_len());
    println!("compression_ratio: {:.4}", artifact.compression_ratio());
    if let Some(mse) = log.final_full_mse() {
        println!("full_mse: {mse:e}");
        println!("raw_mse: {:.4}", mse * 1023.0 * 1023.0);
    }
    eprintln!("train_wall_ms: {:.1}", log.total_wall_ms());
    Ok(())
}

fn cmd_decompress(args: &DecompressArgs) -> Result<(), CliError> {
    let artifact = io::load_artifact(&args.input)?;
    let dims = match &args.dims {
        Some(s) => parse_dims(s)?,
        None => artifact.source_dims,
    };
    let mut volume = artifact
        .decompress(dims)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    if args.resuppress {
        let values = volume
            .values()
            .iter()
            .map(|&v| if v < ZERO_SUPPRESSION { 0 } else { v })
            .collect();
        volume = Volume3D::new(dims, values).expect("same length");
    }
    io::save_volume(&volume, &args.output)?;
    println!(
        "wrote {}: dims {}x{}x{}",
        args.output.display(),
        dims.c,
        dims.z,
        dims.r
    );
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let reference = io::load_volume(&args.reference)?;
    let candidate = io::load_volume(&args.candidate)?;
    let (map, summary) =
        error_map(&candidate, &reference).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("mse: {}", summary.mse);
    println!("l1_mean: {}", summary.l1_mean);
    if summary.psnr.is_infinite() {
        println!("psnr: inf");
    } else {
        println!("psnr: {:.4}", summary.psnr);
    }
    if let Some(path) = &args.error_map {
        io::save_volume(&map, path)?;
        println!("wrote error map {}", path.display());
    }
    Ok(())
}

fn bench_spec(cfg: &CliConfig, volume: Volume3D, suite: &str) -> Result<SweepSpec, CliError> {
    let b = &cfg.bench;
    let kinds = match &b.kinds {
        Some(ks) => ks
            .iter()
            .map(|k| parse_kind(k))
            .collect::<Result<Vec<_>, _>>()?,
        None => match suite {
            "rate" => vec![ModelKind::Siren, ModelKind::Mlp],
            _ => vec![ModelKind::Siren],
        },
    };
    let methods = match &b.methods {
        Some(ms) => ms
            .iter()
            .map(|m| parse_sampler(m))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![
            SamplerMethod::Importance,
            SamplerMethod::Random,
            SamplerMethod::Entropy,
        ],
    };
    let scales = match &b.scales {
        Some(ss) => ss
            .iter()
            .map(|&s| match s {
                1 => Ok(Scale::S1),
                4 => Ok(Scale::S4),
                8 => Ok(Scale::S8),
                16 => Ok(Scale::S16),
                other => Err(CliError::Usage(format!(
                    "unknown scale S={other} (expected 1, 4, 8, or 16)"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![Scale::S1, Scale::S4, Scale::S8, Scale::S16],
    };
    Ok(SweepSpec {
        volume,
        kinds,
        widths: b.widths.clone().unwrap_or_else(|| vec![32, 48, 64]),
        depth: 3,
        methods,
        rhos: b.rhos.clone().unwrap_or_else(|| vec![0.05, 0.1, 0.25]),
        scales,
        seeds: b.seeds.clone().unwrap_or_else(|| (0..5).collect()),
        epochs: b.epochs.unwrap_or(200),
        batch_size: 4096,
        siren_omega0: b.omega0,
        learning_rate: b.learning_rate,
    })
}

fn cmd_bench(cfg: &CliConfig, args: &BenchArgs) -> Result<(), CliError> {
    let volume = match &args.volume {
        Some(path) => io::load_volume(path)?,
        None => {
            let synth = SynthConfig {
                dims: Dims::new(96, 125, 16),
                n_tracks: 24,
                target_occupancy: 0.01,
                intensity_range: (64, 1023),
                seed: 17,
            };
            synth_tracks(&synth).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    let spec = bench_spec(cfg, volume, &args.suite)?;
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }

    if args.dry_run {
        println!("suite: {}", args.suite);
        let d = spec.volume.dims();
        println!("volume: {}x{}x{}", d.c, d.z, d.r);
        println!("kinds: {:?}", spec.kinds.iter().map(|k| k.name()).collect::<Vec<_>>());
        println!("widths: {:?}", spec.widths);
        println!(
            "methods: {:?}",
            spec.methods.iter().map(|m| m.name()).collect::<Vec<_>>()
        );
        println!("rhos: {:?}", spec.rhos);
        println!("scales: {:?}", spec.scales.iter().map(|s| s.s).collect::<Vec<_>>());
        println!("seeds: {:?}", spec.seeds);
        println!("epochs: {}", spec.epochs);
        return Ok(());
    }

    let records = match args.suite.as_str() {
        "reconstruction" => bench::run_reconstruction_suite(&spec)?,
        "rate" => bench::run_rate_distortion(&spec)?,
        "sampling" => bench::run_sampling_efficiency(&spec)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown suite '{other}' (expected reconstruction, rate, or sampling)"
            )))
        }
    };
    bench::emit_report(&records, &args.output)?;
    println!("wrote {} ({} records)", args.output.display(), records.len());
    print!("{}", bench::summarize(&records)?);
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli.config)?;
    match &cli.command {
        Command::Synth(args) => cmd_synth(&cfg, args),
        Command::Info(args) => cmd_info(args),
        Command::Compress(args) => cmd_compress(&cfg, args),
        Command::Decompress(args) => cmd_decompress(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(&cfg, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
