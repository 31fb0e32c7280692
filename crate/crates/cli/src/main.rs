use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frugal_cli::report::{default_mechanisms, REPORT_VERSION};
use frugal_cli::{
    benchmark_file, fixture_pack, generate, read_instance, run_experiment, run_records, to_text,
    verify_suite, write_csv, write_instance, CliError, ExperimentConfig, Generator, GeneratorKind,
    Instance, ReportFile, Result,
};
use frugal_core::mechanisms::MechanismKind;
use frugal_core::DEFAULT_ENUMERATION_CAP;
use serde::Serialize;

/// Exit status when `verify` finds a violation or `experiment` a bound violation.
const EXIT_VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(
    name = "frugal",
    version,
    about = "Frugal truthful mechanisms for set-system auctions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run mechanisms on one instance and write a report.
    Run(RunArgs),
    /// Compute the nu and mu benchmarks of one instance.
    Benchmark(BenchmarkArgs),
    /// Sweep generated instances and write a ratio table.
    Experiment(ExperimentArgs),
    /// Generate instance files.
    Gen(GenArgs),
    /// Run the invariant suite on instances, or on the shipped fixtures.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Override the instance's k (k-path).
    #[arg(long)]
    k: Option<usize>,
    /// Override the instance's r (r-out-of-k).
    #[arg(long)]
    r: Option<usize>,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance> {
        let mut file = read_instance(&self.instance)?.file;
        if self.k.is_some() {
            file.k = self.k;
        }
        if self.r.is_some() {
            file.r = self.r;
        }
        file.validate()
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Mechanism to run; every applicable one when absent.
    #[arg(long, value_parser = parse_mechanism)]
    mechanism: Option<MechanismKind>,
    /// Skip the benchmark oracles.
    #[arg(long)]
    no_benchmarks: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Probe resolution: also tabulate payments on x = i / N for every
    /// reference agent.
    #[arg(long)]
    grid: Option<usize>,
    /// Mechanism for the probe table; the system's primary one when absent.
    #[arg(long, value_parser = parse_mechanism)]
    mechanism: Option<MechanismKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
}

#[derive(Args)]
struct GeneratorArgs {
    #[arg(long, value_enum)]
    kind: GeneratorKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Paths to buy (layered-dag).
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Groups to buy (r-out-of-k).
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    layers: usize,
    /// Layer width (layered-dag); k + 2 when absent.
    #[arg(long)]
    width: Option<usize>,
    /// Path lengths (parallel-paths); `1,m` when absent.
    #[arg(long, value_delimiter = ',')]
    lengths: Vec<usize>,
    /// Vertices (random-gnp-cover, clique).
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Edge probability (random-gnp-cover).
    #[arg(long, default_value_t = 0.4)]
    p: f64,
    /// Leaves (star), or the long path length (parallel-paths).
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Part or group sizes (multipartite, r-out-of-k); `2,2,2` when absent.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
}

impl GeneratorArgs {
    fn generator(&self) -> Generator {
        let sizes = if self.sizes.is_empty() {
            vec![2, 2, 2]
        } else {
            self.sizes.clone()
        };
        match self.kind {
            GeneratorKind::LayeredDag => Generator::LayeredDag {
                layers: self.layers,
                width: self.width.unwrap_or(self.k + 2),
                k: self.k,
            },
            GeneratorKind::ParallelPaths => Generator::ParallelPaths {
                lengths: if self.lengths.is_empty() {
                    vec![1, self.m]
                } else {
                    self.lengths.clone()
                },
            },
            GeneratorKind::RandomGnpCover => Generator::RandomGnpCover {
                n: self.n,
                p: self.p,
            },
            GeneratorKind::Star => Generator::Star { m: self.m },
            GeneratorKind::Clique => Generator::Clique { n: self.n },
            GeneratorKind::Multipartite => Generator::Multipartite { sizes },
            GeneratorKind::ROutOfK => Generator::ROutOfK { sizes, r: self.r },
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Mechanisms to run (repeatable); the system's primary one when absent.
    #[arg(long, value_parser = parse_mechanism)]
    mechanism: Vec<MechanismKind>,
    /// CSV output; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Structured report; next to the CSV with a `.json` extension when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Instances to generate; seeds follow the sweep derivation when above 1.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output file, or directory when `--count` is above 1; standard output
    /// when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance files or directories of them (repeatable).
    #[arg(long)]
    instance: Vec<PathBuf>,
    /// JSON report of every check.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
}

fn parse_mechanism(name: &str) -> std::result::Result<MechanismKind, String> {
    MechanismKind::from_name(name).ok_or_else(|| {
        let names: Vec<_> = MechanismKind::ALL.iter().map(|m| m.name()).collect();
        format!(
            "unknown mechanism `{name}` (expected one of {})",
            names.join(", ")
        )
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Serialize(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn run(args: RunArgs) -> Result<u8> {
    let instance = args.instance.load()?;
    let kinds = match args.mechanism {
        Some(kind) => vec![kind],
        None => default_mechanisms(&instance.system),
    };
    let records = run_records(&instance, &kinds, !args.no_benchmarks, args.cap)?;
    let report = ReportFile {
        version: REPORT_VERSION,
        records,
    };
    emit(args.out.as_deref(), &json(&report)?)?;
    Ok(0)
}

fn benchmark(args: BenchmarkArgs) -> Result<u8> {
    let instance = args.instance.load()?;
    let probe = args.grid.map(|grid| {
        let kind = args
            .mechanism
            .unwrap_or_else(|| default_mechanisms(&instance.system)[0]);
        (kind, grid)
    });
    let file = benchmark_file(&instance, probe, args.cap)?;
    emit(args.out.as_deref(), &json(&file)?)?;
    Ok(0)
}

fn experiment(args: ExperimentArgs) -> Result<u8> {
    let config = ExperimentConfig {
        generator: args.generator.generator(),
        count: args.count,
        seed: args.generator.seed,
        mechanisms: (!args.mechanism.is_empty()).then(|| args.mechanism.clone()),
        cap: args.cap,
    };
    let report = run_experiment(&config)?;
    let mut csv = Vec::new();
    write_csv(&report.rows(), &mut csv)?;
    emit(args.out.as_deref(), &String::from_utf8_lossy(&csv))?;
    let report_path = args
        .report
        .clone()
        .or_else(|| args.out.as_ref().map(|p| p.with_extension("json")));
    if let Some(path) = report_path {
        emit(Some(&path), &json(&report)?)?;
    }
    for s in &report.summary {
        log::info!(
            "{}: {} runs, max nu ratio {:?}, max mu ratio {:?}, {} violations",
            s.mechanism,
            s.runs,
            s.max_ratio_nu,
            s.max_ratio_mu,
            s.violations
        );
    }
    if report.violations > 0 {
        eprintln!("experiment: {} bound violations", report.violations);
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

fn gen(args: GenArgs) -> Result<u8> {
    let generator = args.generator.generator();
    if args.count <= 1 {
        let file = generate(&generator, args.generator.seed)?;
        file.clone().validate()?;
        match &args.out {
            Some(path) => write_instance(path, &file)?,
            None => emit(None, &to_text(&file)?)?,
        }
        return Ok(0);
    }
    let dir = args
        .out
        .as_ref()
        .ok_or_else(|| CliError::Params("--out DIR is required with --count above 1".into()))?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    for (i, seed) in frugal_cli::instance_seeds(args.generator.seed, args.count)
        .into_iter()
        .enumerate()
    {
        let file = generate(&generator, seed)?;
        file.clone().validate()?;
        write_instance(
            &dir.join(format!("{}-{i:04}.json", generator.kind().name())),
            &file,
        )?;
    }
    Ok(0)
}

fn collect_instances(paths: &[PathBuf]) -> Result<Vec<(String, Instance)>> {
    if paths.is_empty() {
        return fixture_pack();
    }
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let entries = std::fs::read_dir(path).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    files
        .iter()
        .map(|p| Ok((p.display().to_string(), read_instance(p)?)))
        .collect()
}

fn verify(args: VerifyArgs) -> Result<u8> {
    let instances = collect_instances(&args.instance)?;
    let report = verify_suite(&instances, args.cap);
    if let Some(path) = &args.out {
        emit(Some(path), &json(&report)?)?;
    }
    let mut err = std::io::stderr().lock();
    for (name, check) in report.failures() {
        let _ = writeln!(
            err,
            "FAIL {name}: {} ({})",
            check.check,
            check.detail.as_deref().unwrap_or("")
        );
    }
    let _ = writeln!(
        err,
        "verify: {} instances, {} passed, {} failed, {} skipped",
        report.instances.len(),
        report.passed,
        report.failed,
        report.skipped
    );
    Ok(if report.ok() { 0 } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FRUGAL_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Experiment(a) => experiment(a),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let record = ErrorRecord {
                error: e.code(),
                message: e.to_string(),
            };
            eprintln!(
                "{}",
                serde_json::to_string(&record).unwrap_or_else(|_| e.to_string())
            );
            ExitCode::from(1)
        }
    }
}
