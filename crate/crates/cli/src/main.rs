//! `maxcap` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 budget exhausted
//! without a feasible solution.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use maxcap_core::bench::{
    best_counts, emit_report, read_records_csv, records_csv, report_markdown, run_grid,
    BenchConfig, ReportFormat,
};
use maxcap_core::choice::{
    build_utilities, ChoiceModelSpec, NestParams, DEFAULT_MIXED_HALFWIDTH, DEFAULT_NEST_MU,
};
use maxcap_core::instance::{
    generate_planar, load_canonical, make_nests, parse_orlib, save_canonical, GeneratorConfig,
    Instance,
};
use maxcap_core::solver::{
    bitr, bitr_ls, bitr_multistart, derive_seed, exact_enumerate, greedy, random_solution, Budget,
    TrustRegionConfig, DEFAULT_EXACT_CAP,
};
use maxcap_core::Error;

#[derive(Debug, Parser)]
#[command(name = "maxcap", version, about = "Competitive facility location under logit choice models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded planar instance in the canonical text format.
    Generate {
        /// Number of customer zones.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        zones: u64,
        /// Number of candidate locations.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        candidates: u64,
        /// Number of competitor locations.
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        competitors: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one instance with one method.
    Solve(SolveArgs),
    /// Run an experiment grid described by a TOML config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Directory receiving records.csv and report.md.
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        parallel: u64,
    },
    /// Render a records CSV as CSV or as a markdown comparison table.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        /// Relative gap under which two objectives tie.
        #[arg(long, default_value_t = 0.005)]
        tolerance: f64,
    },
}

#[derive(Debug, clap::Args)]
struct SolveArgs {
    /// Instance file (canonical format unless --orlib is given).
    #[arg(long)]
    instance: PathBuf,
    /// Read the instance as an OR-Library facility file.
    #[arg(long)]
    orlib: bool,
    /// Competitor location ids for OR-Library files, comma separated.
    #[arg(long, value_delimiter = ',')]
    competitor_ids: Vec<usize>,
    /// Keep raw OR-Library costs instead of scaling them into [0, 1].
    #[arg(long)]
    raw_costs: bool,
    #[arg(long, value_enum, default_value_t = Model::Mnl)]
    model: Model,
    #[arg(long, value_enum, default_value_t = MethodArg::BitrLs)]
    method: MethodArg,
    /// Number of facilities to open.
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Mixed-logit sample count.
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Mixed-logit relative distance perturbation half-width.
    #[arg(long, default_value_t = DEFAULT_MIXED_HALFWIDTH)]
    delta: f64,
    /// Nest dissimilarity parameter (all nests).
    #[arg(long, default_value_t = DEFAULT_NEST_MU)]
    mu: f64,
    /// Number of nests.
    #[arg(long, default_value_t = 5)]
    nests: usize,
    /// Nest inclusion coefficient (all locations).
    #[arg(long, default_value_t = 1.0)]
    nest_coefficient: f64,
    /// Random starts for bitr-ms.
    #[arg(long, default_value_t = 10)]
    starts: usize,
    /// Subset cap for exact enumeration.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 600.0)]
    budget: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Model {
    Mnl,
    Mmnl,
    Nested,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Greedy,
    Bitr,
    BitrMs,
    BitrLs,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Exact => "exact",
            MethodArg::Greedy => "greedy",
            MethodArg::Bitr => "bitr",
            MethodArg::BitrMs => "bitr-ms",
            MethodArg::BitrLs => "bitr-ls",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

enum Failure {
    Usage(String),
    Data(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::InvalidModel(_)
            | Error::CapExceeded { .. }
            | Error::Contract(_) => Failure::Usage(e.to_string()),
            Error::BudgetExhausted => Failure::Budget(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

/// Usage line of the named subcommand, or of the whole program.
fn usage_for(subcommand: Option<&str>) -> String {
    let mut cli = Cli::command();
    cli.build();
    match subcommand.and_then(|name| cli.find_subcommand_mut(name)) {
        Some(sub) => sub.render_usage().to_string(),
        None => cli.render_usage().to_string(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{}", usage_for(std::env::args().nth(1).as_deref()));
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Generate {
            zones,
            candidates,
            competitors,
            seed,
            out,
        } => cmd_generate(zones, candidates, competitors, seed, &out),
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench {
            config,
            out_dir,
            parallel,
        } => cmd_bench(&config, &out_dir, parallel as usize),
        Command::Report {
            records,
            format,
            tolerance,
        } => cmd_report(&records, format, tolerance),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `maxcap --help` for usage");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn cmd_generate(zones: u64, candidates: u64, competitors: u64, seed: u64, out: &Path) -> Result<(), Failure> {
    let config = GeneratorConfig {
        n_zones: zones as usize,
        n_candidates: candidates as usize,
        n_competitors: competitors as usize,
        side: 1.0,
        seed,
    };
    let instance = generate_planar(&config)?;
    fs::write(out, save_canonical(&instance)).map_err(|e| io_failure(out, e))?;
    println!(
        "wrote {}: {} zones, {} candidates, {} competitors, seed {}",
        out.display(),
        zones,
        candidates,
        competitors,
        seed
    );
    Ok(())
}

fn load_instance(args: &SolveArgs) -> Result<Instance, Failure> {
    let path = &args.instance;
    if args.orlib {
        if args.competitor_ids.is_empty() {
            return Err(Failure::Usage("--orlib needs --competitor-ids".into()));
        }
        let file = fs::File::open(path).map_err(|e| io_failure(path, e))?;
        let inst = parse_orlib(file, &args.competitor_ids)?;
        Ok(if args.raw_costs { inst } else { inst.normalized() })
    } else {
        let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
        load_canonical(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let instance = load_instance(args)?;
    let spec = match args.model {
        Model::Mnl => ChoiceModelSpec::mnl(args.beta, args.alpha),
        Model::Mmnl => ChoiceModelSpec::mixed(
            args.beta,
            args.alpha,
            args.k,
            args.delta,
            derive_seed(args.seed, u64::MAX),
        ),
        Model::Nested => {
            let nests = make_nests(&instance, args.nests)?;
            ChoiceModelSpec::nested(
                args.beta,
                args.alpha,
                NestParams::uniform(nests, args.mu, args.nest_coefficient),
            )
        }
    };
    let table = build_utilities(&instance, &spec)?;
    let budget = Budget::seconds(args.budget);
    let tr = TrustRegionConfig::default();
    let (solution, report) = match args.method {
        MethodArg::Exact => exact_enumerate(&table, args.r, args.exact_cap, &budget)?,
        MethodArg::Greedy => greedy(&table, args.r, &budget)?,
        MethodArg::Bitr => {
            let start = random_solution(&table, args.r, derive_seed(args.seed, 0))?;
            bitr(&table, &start, &tr, &budget)?
        }
        MethodArg::BitrMs => bitr_multistart(&table, args.r, args.starts, args.seed, &tr, &budget)?,
        MethodArg::BitrLs => bitr_ls(&table, args.r, args.seed, &tr, &budget)?,
    };

    let ids: Vec<String> = solution.iter().map(|id| id.to_string()).collect();
    println!(
        "method={} model={} r={} objective={} seconds={:.6} iterations={} evaluations={} completed={} selected={}",
        args.method.name(),
        spec.name(),
        args.r,
        report.objective,
        report.seconds,
        report.iterations,
        report.evaluations,
        report.completed,
        ids.join(",")
    );
    println!(
        "Opened {} of {} candidates; expected capture {:.4} of {:.4} customers ({:.2}%) in {:.3} s.",
        solution.r(),
        table.n_candidates(),
        report.objective,
        table.total_demand(),
        100.0 * report.objective / table.total_demand(),
        report.seconds
    );
    if !report.completed {
        println!("Time budget reached; reporting the incumbent.");
    }
    Ok(())
}

fn cmd_bench(config_path: &Path, out_dir: &Path, parallel: usize) -> Result<(), Failure> {
    let config = BenchConfig::from_path(config_path)
        .map_err(|e| Failure::Data(format!("{}: {e}", config_path.display())))?;
    let output = run_grid(&config, parallel)?;
    fs::create_dir_all(out_dir).map_err(|e| io_failure(out_dir, e))?;

    let csv_path = out_dir.join("records.csv");
    fs::write(&csv_path, records_csv(&output.records)?).map_err(|e| io_failure(&csv_path, e))?;
    if !output.records.is_empty() {
        let md_path = out_dir.join("report.md");
        let report = best_counts(&output.records, config.tolerance)?;
        fs::write(&md_path, report_markdown(&report)).map_err(|e| io_failure(&md_path, e))?;
    }
    for f in &output.failures {
        match f.cell {
            Some((r, alpha, beta, method)) => eprintln!(
                "failed: {} r={r} alpha={alpha} beta={beta} method={method}: {}",
                f.instance, f.message
            ),
            None => eprintln!("failed: {}: {}", f.instance, f.message),
        }
    }
    println!(
        "{} records, {} failures -> {}",
        output.records.len(),
        output.failures.len(),
        out_dir.display()
    );
    Ok(())
}

fn cmd_report(path: &Path, format: Format, tolerance: f64) -> Result<(), Failure> {
    let file = fs::File::open(path).map_err(|e| io_failure(path, e))?;
    let records = read_records_csv(file).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let format = match format {
        Format::Csv => ReportFormat::Csv,
        Format::Markdown => ReportFormat::Markdown,
    };
    print!("{}", emit_report(&records, format, tolerance)?);
    Ok(())
}
