use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use styleqgan::datapipe::{synth_dataset, RawDataset, Scale, SyntheticOracleSpec, DEFAULT_BINS};
use styleqgan::evaluation::{evaluate_datasets, write_kl_csv};
use styleqgan::generator::{build_parallel_circuit, LatentTensor, ParamVector, SampleMode, StyleAnsatz};
use styleqgan::harness::{
    builtin_profile, estimate_runtime, generate_physical, noise_sweep, train_pipeline, Checkpoint, DeviceProfile,
    Manifest, RunConfig, RunPlan,
};
use styleqgan::Error;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage: {m}"),
            Self::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Run(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Run(e) => e.exit_code() as u8,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "styleqgan", version, about = "Style-based quantum GAN workflows")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Shots,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a dataset drawn from the synthetic oracle.
    SynthData {
        /// Oracle spec (TOML); the built-in three-column oracle when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        /// Overrides the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the transform, train the generator and write a checkpoint.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Run config (TOML with [ansatz] and [train]); defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Loss history CSV; `<out>.loss.csv` by default.
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Draw physical-space samples from a checkpoint.
    Generate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long)]
        shots: Option<u64>,
        /// Device profile supplying the noise model, or `none`.
        #[arg(long, default_value = "none")]
        device: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare generated samples with a reference dataset.
    Evaluate {
        #[arg(long)]
        generated: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Per-column scale override, `column=linear|log`; repeatable.
        #[arg(long = "scale")]
        scales: Vec<String>,
    },
    /// Noisy generation at one or more shot counts, scored with error bars.
    NoiseSim {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        device: String,
        #[arg(long, value_delimiter = ',', default_values_t = [512u64, 1024])]
        shots: Vec<u64>,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reference dataset; exact-mode samples with the same seed when omitted.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// KL table (CSV); printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the run plan and wall-clock estimate for a device.
    EstimateRuntime {
        #[arg(long)]
        device: String,
        #[arg(long)]
        replicas: usize,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        samples: usize,
        /// Take the circuit shape from a checkpoint instead of the flags below.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        base_qubits: usize,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(long, default_value_t = 5)]
        latent_dim: usize,
    },
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::SynthData { spec, k, seed, out } => synth_data(spec.as_deref(), k, seed, &out),
        Command::Train {
            data,
            config,
            out,
            history,
        } => train(&data, config.as_deref(), &out, history),
        Command::Generate {
            checkpoint,
            samples,
            replicas,
            mode,
            shots,
            device,
            seed,
            out,
        } => generate(&checkpoint, samples, replicas, mode, shots, &device, seed, &out),
        Command::Evaluate {
            generated,
            reference,
            out,
            bins,
            scales,
        } => evaluate(&generated, &reference, &out, bins, &scales),
        Command::NoiseSim {
            checkpoint,
            device,
            shots,
            samples,
            replicas,
            seed,
            reference,
            bins,
            out,
        } => noise_sim(&checkpoint, &device, &shots, samples, replicas, seed, reference.as_deref(), bins, out.as_deref()),
        Command::EstimateRuntime {
            device,
            replicas,
            shots,
            samples,
            checkpoint,
            base_qubits,
            layers,
            latent_dim,
        } => {
            let ansatz = match checkpoint {
                Some(p) => Checkpoint::load(p)?.ansatz,
                None => StyleAnsatz::new(base_qubits, layers, latent_dim),
            };
            estimate(&device, &ansatz, replicas, shots, samples)
        }
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn synth_data(spec: Option<&Path>, k: usize, seed: Option<u64>, out: &Path) -> CliResult {
    let mut oracle = match spec {
        Some(p) => SyntheticOracleSpec::load(p)?,
        None => SyntheticOracleSpec::default(),
    };
    if let Some(s) = seed {
        oracle = oracle.with_seed(s);
    }
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    synth_dataset(&oracle, k)?.save(out)?;
    let mut m = Manifest::new("synth-data");
    m.setting("k", k).setting("oracle", &oracle);
    if let Some(p) = spec {
        m.input(p)?;
    }
    m.output(out)?;
    m.save(manifest_path(out))?;
    Ok(())
}

fn train(data: &Path, config: Option<&Path>, out: &Path, history: Option<PathBuf>) -> CliResult {
    let cfg = match config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let dataset = RawDataset::load(data)?;
    let trained = train_pipeline(&dataset, &cfg, &mut |e| {
        eprintln!("epoch {:>4}  loss_g {:.6}  loss_d {:.6}", e.epoch, e.loss_g, e.loss_d);
    })?;
    trained.checkpoint.save(out)?;
    let history = history.unwrap_or_else(|| {
        let mut s = out.as_os_str().to_owned();
        s.push(".loss.csv");
        PathBuf::from(s)
    });
    trained.outcome.save_history(&history)?;
    let mut m = Manifest::new("train");
    m.setting("config", &cfg)
        .setting("equilibrium_gap", trained.outcome.equilibrium_gap());
    m.input(data)?;
    if let Some(p) = config {
        m.input(p)?;
    }
    m.output(out)?.output(&history)?;
    m.save(manifest_path(out))?;
    Ok(())
}

fn device_profile(name: &str) -> CliResult<Option<DeviceProfile>> {
    match name {
        "none" => Ok(None),
        n => Ok(Some(builtin_profile(n)?)),
    }
}

fn check_width(profile: &DeviceProfile, ansatz: &StyleAnsatz, replicas: usize) -> CliResult {
    let width = ansatz.with_replicas(replicas).width();
    if width > profile.n_qubits_max {
        return Err(Error::Capacity(format!(
            "{replicas} replicas need {width} qubits but {} has {}",
            profile.name, profile.n_qubits_max
        ))
        .into());
    }
    Ok(())
}

fn sample_mode(mode: Mode, shots: Option<u64>, profile: Option<&DeviceProfile>) -> CliResult<SampleMode> {
    match (mode, shots) {
        (Mode::Exact, None) if profile.is_none() => Ok(SampleMode::Exact),
        (Mode::Exact, None) => Err(CliError::Usage("--device needs --mode shots".into())),
        (Mode::Exact, Some(_)) => Err(CliError::Usage("--shots needs --mode shots".into())),
        (Mode::Shots, None) => Err(CliError::Usage("--mode shots needs --shots".into())),
        (Mode::Shots, Some(0)) => Err(CliError::Usage("--shots must be at least 1".into())),
        (Mode::Shots, Some(n)) => Ok(SampleMode::Shots {
            shots: n,
            noise: profile.map(DeviceProfile::noise),
        }),
    }
}

fn positive(name: &str, v: usize) -> CliResult {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn generate(
    checkpoint: &Path,
    samples: usize,
    replicas: usize,
    mode: Mode,
    shots: Option<u64>,
    device: &str,
    seed: u64,
    out: &Path,
) -> CliResult {
    positive("samples", samples)?;
    positive("replicas", replicas)?;
    let profile = device_profile(device)?;
    let mode = sample_mode(mode, shots, profile.as_ref())?;
    let cp = Checkpoint::load(checkpoint)?;
    if let Some(p) = &profile {
        check_width(p, &cp.ansatz, replicas)?;
    }
    let generated = generate_physical(&cp, samples, replicas, &mode, seed)?;
    generated.data.save(out)?;
    if generated.clamped > 0 {
        eprintln!("note: {} entries clamped by the inverse transform", generated.clamped);
    }
    let mut m = Manifest::new("generate");
    m.setting("samples", samples)
        .setting("replicas", replicas)
        .setting("shots", shots)
        .setting("seed", seed)
        .setting("circuits", generated.plan.circuits)
        .setting("clamped", generated.clamped)
        .setting("config", &cp.config);
    if let Some(p) = &profile {
        m.with_profile(p);
    }
    m.input(checkpoint)?.output(out)?;
    m.save(manifest_path(out))?;
    Ok(())
}

fn parse_scales(columns: &[String], specs: &[String]) -> CliResult<Vec<Option<Scale>>> {
    let mut scales = vec![None; columns.len()];
    for s in specs {
        let (name, scale) = s
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--scale expects column=linear|log, got `{s}`")))?;
        let j = columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::Usage(format!("--scale names unknown column `{name}`")))?;
        scales[j] = Some(Scale::parse(scale)?);
    }
    Ok(scales)
}

fn evaluate(generated: &Path, reference: &Path, out: &Path, bins: usize, scales: &[String]) -> CliResult {
    positive("bins", bins)?;
    let gen = RawDataset::load(generated)?;
    let reference_data = RawDataset::load(reference)?;
    let scales = parse_scales(reference_data.columns(), scales)?;
    let report = evaluate_datasets(&reference_data, &gen, bins, &scales)?;
    fs::create_dir_all(out)?;
    report.write_dir(out)?;
    for k in &report.kl {
        println!("{}\t{:.6}", k.dimension, k.nominal);
    }
    let mut m = Manifest::new("evaluate");
    m.setting("bins", bins).setting("scales", &scales);
    m.input(generated)?.input(reference)?;
    m.output(out.join("kl.csv"))?;
    m.save(out.join("manifest.json"))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn noise_sim(
    checkpoint: &Path,
    device: &str,
    shots: &[u64],
    samples: usize,
    replicas: usize,
    seed: u64,
    reference: Option<&Path>,
    bins: usize,
    out: Option<&Path>,
) -> CliResult {
    positive("samples", samples)?;
    positive("replicas", replicas)?;
    positive("bins", bins)?;
    if shots.is_empty() || shots.contains(&0) {
        return Err(CliError::Usage("--shots must list positive shot counts".into()));
    }
    let profile = builtin_profile(device)?;
    let cp = Checkpoint::load(checkpoint)?;
    check_width(&profile, &cp.ansatz, replicas)?;
    let reference_data = match reference {
        Some(p) => RawDataset::load(p)?,
        None => generate_physical(&cp, samples, replicas, &SampleMode::Exact, seed)?.data,
    };
    let modes: Vec<SampleMode> = shots
        .iter()
        .map(|&n| SampleMode::Shots {
            shots: n,
            noise: Some(profile.noise()),
        })
        .collect();
    let rows = noise_sweep(&cp, &modes, samples, replicas, seed, &reference_data, bins, &[])?;

    let mut table = Vec::new();
    for (row, &n) in rows.iter().zip(shots) {
        let mut block = Vec::new();
        write_kl_csv(&row.kl, &mut block)?;
        let text = String::from_utf8(block).expect("csv is utf-8");
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if table.is_empty() {
            writeln!(table, "shots,{header}")?;
        }
        for l in lines {
            writeln!(table, "{n},{l}")?;
        }
    }
    match out {
        Some(p) => {
            fs::write(p, &table)?;
            let mut m = Manifest::new("noise-sim");
            m.setting("shots", shots)
                .setting("samples", samples)
                .setting("replicas", replicas)
                .setting("seed", seed)
                .setting("bins", bins)
                .with_profile(&profile);
            m.input(checkpoint)?;
            if let Some(r) = reference {
                m.input(r)?;
            }
            m.output(p)?;
            m.save(manifest_path(p))?;
        }
        None => std::io::stdout().write_all(&table)?,
    }
    Ok(())
}

fn estimate(device: &str, ansatz: &StyleAnsatz, replicas: usize, shots: u64, samples: usize) -> CliResult {
    positive("replicas", replicas)?;
    positive("samples", samples)?;
    if shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    let profile = builtin_profile(device)?;
    let wide = ansatz.with_replicas(replicas);
    wide.validate()?;
    // Timing depends only on circuit structure, so any parameters will do.
    let circuit = build_parallel_circuit(
        &wide,
        &ParamVector::zeros(wide.param_count()),
        &LatentTensor::zeros(replicas, wide.latent_dim),
    )?;
    let plan = RunPlan::new(samples, replicas, shots, profile.parallel_circuits_per_job)?;
    let est = estimate_runtime(&profile, &circuit.gates, circuit.n_qubits, &plan)?;
    println!("device            {} ({})", profile.name, &profile.checksum()[..16]);
    println!("qubits            {}", circuit.n_qubits);
    println!("circuits_needed   {}", plan.circuits);
    println!("jobs_needed       {}", plan.jobs);
    println!("per_shot_us       {:.3}", est.time_per_shot_us);
    println!("per_circuit_s     {:.3}", est.time_per_circuit_s);
    println!("total_s           {:.3}", est.total_s);
    println!("note              execution and fixed overhead only; compilation and queueing excluded");
    Ok(())
}
