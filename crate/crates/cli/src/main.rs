use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use valuesched_core::harness::{
    default_dz_pairs, reference_scenario, representative_point, run_sweep, trend_study, GeneratorSpec, HarnessError,
    SweepSpec,
};
use valuesched_core::model::load_scenario;
use valuesched_core::{save_scenario, validate_scenario, Chromosome, Instance, MoeadConfig, Scenario, Variant};
use valuesched_service::ServiceConfig;

#[derive(Parser)]
#[command(name = "valuesched", version, about = "Value-driven job allocation and scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one scenario and write the Pareto archive.
    Optimize(OptimizeArgs),
    /// Write synthetic scenarios.
    Generate(GenerateArgs),
    /// Optimize a scenario under a list of (D, Z) curve shapes.
    Sweep(SweepArgs),
    /// Schedule a single genome and print the schedule as JSON.
    Evaluate(EvaluateArgs),
    /// Compare both variants across generated order sizes.
    Trend(TrendArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, default_value_t = 300)]
    pop: usize,
    #[arg(long, default_value_t = 500)]
    gens: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl EngineArgs {
    fn config(&self) -> MoeadConfig {
        MoeadConfig {
            generations: self.gens,
            seed: self.seed,
            ..MoeadConfig::default().with_population(self.pop)
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "standard")]
    variant: Variant,
    #[command(flatten)]
    engine: EngineArgs,
    /// Override every order's plateau end.
    #[arg(long, requires = "z_s")]
    d_s: Option<f64>,
    /// Override every order's zero point.
    #[arg(long, requires = "d_s")]
    z_s: Option<f64>,
    #[arg(long, default_value = "archive.csv")]
    out: PathBuf,
    /// Representative schedule; defaults to the archive path with a
    /// `.schedule.json` extension.
    #[arg(long)]
    schedule_out: Option<PathBuf>,
}

#[derive(Args)]
struct GeneratorArgs {
    /// Comma-separated sizes or an inclusive range such as `7..16`.
    #[arg(long, default_value = "7..16", value_parser = parse_sizes)]
    sizes: Sizes,
    #[arg(long, default_value_t = 10)]
    per_size: usize,
    #[arg(long, default_value_t = 30_000.0)]
    d_s: f64,
    #[arg(long, default_value_t = 40_000.0)]
    z_s: f64,
    /// Put all machines into one mutex group.
    #[arg(long)]
    mutex: bool,
    /// Changeover gap between alternating job classes, seconds.
    #[arg(long)]
    gap_s: Option<f64>,
}

impl GeneratorArgs {
    fn spec(&self, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            element_counts: self.sizes.0.clone(),
            scenarios_per_count: self.per_size,
            d_s: self.d_s,
            z_s: self.z_s,
            mutex_all_machines: self.mutex,
            changeover_gap_s: self.gap_s,
            seed,
            ..GeneratorSpec::default()
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Defaults to the bundled 14-element scenario.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// `default`, or a CSV file of `d_s,z_s` rows.
    #[arg(long, default_value = "default")]
    dz_list: String,
    #[arg(long, default_value_t = 1)]
    seeds_per_cell: usize,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    genome: String,
    /// Needed only when the genome carries no variant tag.
    #[arg(long)]
    variant: Option<Variant>,
}

#[derive(Args)]
struct TrendArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 0)]
    scenario_seed: u64,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, default_value = "trend.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "VALUESCHED_ADDR", default_value = "127.0.0.1:8080")]
    addr: String,
    #[arg(long, default_value_t = ServiceConfig::default().max_jobs)]
    max_jobs: usize,
    #[arg(long, default_value_t = ServiceConfig::default().max_population)]
    max_population: usize,
    #[arg(long, default_value_t = ServiceConfig::default().max_generations)]
    max_generations: usize,
}

#[derive(Clone)]
struct Sizes(Vec<usize>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let bad = |_| format!("invalid size list {s:?}");
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        if a > b {
            return Err(format!("empty size range {s:?}"));
        }
        return Ok(Sizes((a..=b).collect()));
    }
    s.split(',').map(|x| x.trim().parse().map_err(bad)).collect::<Result<_, _>>().map(Sizes)
}

enum Failure {
    Io(String),
    Invalid(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn harness_err(e: HarnessError) -> Failure {
    Failure::Invalid(e.to_string())
}

fn read_scenario(path: &Path) -> Result<Scenario, Failure> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let s = load_scenario(&bytes).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let report = validate_scenario(&s);
    if !report.is_valid() {
        return Err(Failure::Invalid(format!("{}: invalid scenario\n{report}", path.display())));
    }
    Ok(s)
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn optimize(a: OptimizeArgs) -> Outcome {
    let mut scenario = read_scenario(&a.scenario)?;
    if let (Some(d), Some(z)) = (a.d_s, a.z_s) {
        scenario = scenario.with_curve(d, z);
        let report = validate_scenario(&scenario);
        if !report.is_valid() {
            return Err(Failure::Invalid(format!("curve override is invalid\n{report}")));
        }
    }
    let cfg = a.engine.config();
    cfg.validate().map_err(|e| Failure::Invalid(e.to_string()))?;
    let inst = Instance::new(&scenario).map_err(|r| Failure::Invalid(r.to_string()))?;
    let archive = with_threads(a.engine.threads, || valuesched_core::run(&inst, &cfg, a.variant))?
        .map_err(|e| Failure::Invalid(e.to_string()))?;

    let mut csv = Vec::new();
    archive.write_csv(&mut csv).map_err(|e| Failure::Io(e.to_string()))?;
    let rep = representative_point(&archive).map_err(harness_err)?;
    let mut schedule = serde_json::to_vec_pretty(&rep.chromosome.schedule(&inst)).expect("schedule serializes");
    schedule.push(b'\n');

    let schedule_out = a.schedule_out.unwrap_or_else(|| a.out.with_extension("schedule.json"));
    write_file(&a.out, &csv)?;
    write_file(&schedule_out, &schedule)?;
    eprintln!(
        "{} archive points; representative makespan {} s, profit {}, {} elements",
        archive.len(),
        rep.objectives.makespan_s,
        rep.objectives.total_profit,
        rep.elements_produced
    );
    Ok(())
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn generate(a: GenerateArgs) -> Outcome {
    let batch = valuesched_core::harness::generate_batch(&a.generator.spec(a.seed)).map_err(harness_err)?;
    fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;
    for (size, k, s) in &batch {
        write_file(&a.out.join(format!("scenario_{size}_{k}.json")), &save_scenario(s))?;
    }
    eprintln!("wrote {} scenarios to {}", batch.len(), a.out.display());
    Ok(())
}

fn read_dz_list(arg: &str) -> Result<Vec<(f64, f64)>, Failure> {
    if arg == "default" {
        return Ok(default_dz_pairs());
    }
    let path = Path::new(arg);
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("d_s")) {
            continue;
        }
        let parsed = line
            .split_once(',')
            .and_then(|(d, z)| Some((d.trim().parse().ok()?, z.trim().parse().ok()?)));
        match parsed {
            Some(p) => pairs.push(p),
            None => return Err(Failure::Invalid(format!("{}:{}: expected `d_s,z_s`", path.display(), i + 1))),
        }
    }
    if pairs.is_empty() {
        return Err(Failure::Invalid(format!("{}: no curve pairs", path.display())));
    }
    Ok(pairs)
}

fn sweep(a: SweepArgs) -> Outcome {
    let scenario = match &a.scenario {
        Some(p) => read_scenario(p)?,
        None => reference_scenario(),
    };
    let spec = SweepSpec {
        dz_pairs: read_dz_list(&a.dz_list)?,
        optimizer: a.engine.config(),
        seeds_per_cell: a.seeds_per_cell,
        ..SweepSpec::default()
    };
    let report = with_threads(a.engine.threads, || run_sweep(&spec, &scenario))?.map_err(harness_err)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).map_err(|e| Failure::Io(e.to_string()))?;
    write_file(&a.out, &csv)
}

fn evaluate(a: EvaluateArgs) -> Outcome {
    let scenario = read_scenario(&a.scenario)?;
    let inst = Instance::new(&scenario).map_err(|r| Failure::Invalid(r.to_string()))?;
    let c = Chromosome::parse(&a.genome, &inst, a.variant).map_err(|e| Failure::Invalid(format!("genome: {e}")))?;
    let mut out = serde_json::to_vec_pretty(&c.schedule(&inst)).expect("schedule serializes");
    out.push(b'\n');
    std::io::stdout()
        .write_all(&out)
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn trend(a: TrendArgs) -> Outcome {
    let spec = a.generator.spec(a.scenario_seed);
    let cfg = a.engine.config();
    let report = with_threads(a.engine.threads, || trend_study(&spec, &cfg))?.map_err(harness_err)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).map_err(|e| Failure::Io(e.to_string()))?;
    write_file(&a.out, &csv)
}

fn serve(a: ServeArgs) -> Outcome {
    let cfg = ServiceConfig {
        max_jobs: a.max_jobs,
        max_population: a.max_population,
        max_generations: a.max_generations,
        ..ServiceConfig::default()
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(format!("runtime: {e}")))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&a.addr)
            .await
            .map_err(|e| Failure::Io(format!("bind {}: {e}", a.addr)))?;
        let local = listener.local_addr().map_err(|e| Failure::Io(e.to_string()))?;
        println!("listening on {local}");
        let _ = std::io::stdout().flush();
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        valuesched_service::serve(listener, cfg, shutdown)
            .await
            .map_err(|e| Failure::Io(e.to_string()))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Optimize(a) => optimize(a),
        Command::Generate(a) => generate(a),
        Command::Sweep(a) => sweep(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Trend(a) => trend(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Io(m) | Failure::Invalid(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
