use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use sheetwave_core::checks::{identity_suite, SuiteConfig};
use sheetwave_core::config::parse_config;
use sheetwave_core::ensemble::BandSpec;
use sheetwave_core::estimates::{commutator_estimate_report, q_norm_bound_report, EnsembleSpec, EstimateRow};
use sheetwave_core::evolution::{Mode, RunConfig};
use sheetwave_core::output::{diagnose_directory, run_to_directory, RunSummary, ENERGY_REPORT_FILE};
use sheetwave_core::quadratic::{kernel_dump, KernelPoint};

/// Output root used when `--out` is not given.
const OUT_ENV: &str = "SHEETWAVE_OUT";

#[derive(Parser)]
#[command(name = "sheetwave", version, about = "Pseudo-spectral solver for a quadratic nonlocal sheet equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write timeseries, snapshots and events.
    Run(RunArgs),
    /// Recompute energies from a run directory and write energy_report.csv.
    Diagnose(DiagnoseArgs),
    /// Print the quadratic kernel on a rectangle of frequency pairs as CSV.
    KernelDump(KernelArgs),
    /// Run the randomized operator identity suite and print a pass/fail table.
    CheckIdentities(CheckArgs),
    /// Empirical commutator and quadratic-term ratio constants as CSV.
    Estimates(EstimateArgs),
    /// Run a grid of (mu, amplitude scale) cells in parallel, one directory each.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `mode` in the config: second, first or linear.
    #[arg(long)]
    mode: Option<Mode>,
    /// Overrides the seed of random-band initial data.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to `$SHEETWAVE_OUT/<config stem>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    dir: PathBuf,
    /// Margin floor for the Riccati window; defaults to the run's delta.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = -8)]
    m_min: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 8)]
    m_max: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -8)]
    l_min: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 8)]
    l_max: i64,
    /// Write to a file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 128)]
    n_points: usize,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 512)]
    kernel_range: i64,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, default_value_t = 128)]
    n_points: usize,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    k_min: i64,
    #[arg(long, default_value_t = 16)]
    k_max: i64,
    #[arg(long, default_value_t = 2.0)]
    decay: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    sigma: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    p: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    r: Vec<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Base configuration; each cell overrides `mu` and scales the initial data.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    mu: Vec<f64>,
    /// Factors applied to the configured initial amplitude.
    #[arg(long, value_delimiter = ',', required = true)]
    amplitude: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sweep root; defaults to `$SHEETWAVE_OUT/sweep`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 picks the number of cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn output_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs"))
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn describe(summary: &RunSummary) -> String {
    let status = match summary.halted {
        Some(h) => format!("halted ({h:?})"),
        None => "completed".to_string(),
    };
    format!(
        "{status}: {} steps, dt = {:.6e}, t = {:.6}, data size^2 = {:.6e}, max H3 = {:.6e}, min margin = {:.6e}",
        summary.steps, summary.dt, summary.final_t, summary.data_size_squared, summary.max_h3_norm, summary.min_margin
    )
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = load_config(&args.config)?;
    if let Some(mode) = args.mode {
        config.mode = mode;
    }
    if let Some(seed) = args.seed {
        config.initial_data = config.initial_data.with_seed(seed);
    }
    let out = args.out.unwrap_or_else(|| {
        let stem = args.config.file_stem().map(|s| s.to_owned()).unwrap_or_else(|| "run".into());
        output_root().join(stem)
    });
    let summary = run_to_directory(&config, &out).with_context(|| format!("run into {}", out.display()))?;
    println!("{}: {}", out.display(), describe(&summary));
    Ok(())
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<()> {
    let summary = diagnose_directory(&args.dir, args.delta).with_context(|| format!("diagnosing {}", args.dir.display()))?;
    println!("{} rows -> {}", summary.rows, args.dir.join(ENERGY_REPORT_FILE).display());
    if let Some(report) = &summary.riccati {
        println!("fitted constant C = {:.6e}, bound holds: {}", report.c_hat, report.holds());
    }
    if let Some(note) = &summary.riccati_note {
        println!("riccati check not applied: {note}");
    }
    if let Some(mismatch) = summary.snapshot_energy_mismatch {
        println!("snapshot energy mismatch (relative): {mismatch:.3e}");
    }
    Ok(())
}

fn cmd_kernel_dump(args: KernelArgs) -> Result<()> {
    if args.m_min > args.m_max || args.l_min > args.l_max {
        bail!("empty range: m in [{}, {}], l in [{}, {}]", args.m_min, args.m_max, args.l_min, args.l_max);
    }
    let points = kernel_dump((args.m_min, args.m_max), (args.l_min, args.l_max))?;
    let mut text = String::with_capacity(points.len() * 24);
    text.push_str(KernelPoint::CSV_HEADER);
    text.push('\n');
    for p in &points {
        text.push_str(&p.csv_row());
        text.push('\n');
    }
    match args.output {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<bool> {
    let config = SuiteConfig {
        n_points: args.n_points,
        trials: args.trials,
        seed: args.seed,
        kernel_range: args.kernel_range,
    };
    let outcomes = identity_suite(&config)?;
    println!("{:<32} {:>8} {:>12} {:>10}  result", "identity", "cases", "worst", "tolerance");
    for o in &outcomes {
        let verdict = if o.passed() { "pass" } else { "FAIL" };
        println!("{:<32} {:>8} {:>12.3e} {:>10.1e}  {verdict}", o.name, o.cases, o.worst, o.tolerance);
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    println!("{} of {} identities passed", outcomes.len() - failed, outcomes.len());
    Ok(failed == 0)
}

fn cmd_estimates(args: EstimateArgs) -> Result<()> {
    let spec = EnsembleSpec {
        n_points: args.n_points,
        trials: args.trials,
        seed: args.seed,
        band: BandSpec::new(args.k_min, args.k_max, args.decay)?,
    };
    let mut rows: Vec<EstimateRow> = commutator_estimate_report(&spec, &args.sigma, &args.p)?;
    for &r in &args.r {
        rows.push(q_norm_bound_report(&spec, r)?);
    }
    println!("{}", EstimateRow::CSV_HEADER);
    for row in rows {
        println!("{}", row.csv_row());
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut base = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        base.initial_data = base.initial_data.with_seed(seed);
    }
    let root = args.out.unwrap_or_else(|| output_root().join("sweep"));
    fs::create_dir_all(&root).with_context(|| format!("creating {}", root.display()))?;
    let cells: Vec<(usize, f64, f64)> = args
        .mu
        .iter()
        .flat_map(|&mu| args.amplitude.iter().map(move |&a| (mu, a)))
        .enumerate()
        .map(|(i, (mu, a))| (i, mu, a))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build()?;
    let results: Vec<String> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, mu, scale)| {
                let name = format!("cell_{i:03}");
                let mut config = base.clone();
                config.mu = mu;
                config.initial_data = base.initial_data.scaled(scale);
                match run_to_directory(&config, &root.join(&name)) {
                    Ok(s) => format!(
                        "{name},{mu},{scale},{},{},{},{},{},{},{}",
                        s.steps,
                        s.dt,
                        s.final_t,
                        s.halted.map(|h| format!("{h:?}")).unwrap_or_else(|| "none".into()),
                        s.data_size_squared,
                        s.max_h3_norm,
                        s.min_margin
                    ),
                    Err(e) => format!("{name},{mu},{scale},,,,error: {},,,", e.to_string().replace(',', ";")),
                }
            })
            .collect()
    });

    let summary_path = root.join("summary.csv");
    let mut text = String::from("cell,mu,amplitude_scale,steps,dt,final_t,halted,data_size_squared,max_h3_norm,min_margin\n");
    for line in &results {
        text.push_str(line);
        text.push('\n');
    }
    fs::write(&summary_path, text).with_context(|| format!("writing {}", summary_path.display()))?;
    let failed = results.iter().filter(|l| l.contains("error:")).count();
    println!("{} cells ({} failed) -> {}", results.len(), failed, summary_path.display());
    Ok(())
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(a) => cmd_run(a)?,
        Command::Diagnose(a) => cmd_diagnose(a)?,
        Command::KernelDump(a) => cmd_kernel_dump(a)?,
        Command::CheckIdentities(a) => {
            if !cmd_check(a)? {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Estimates(a) => cmd_estimates(a)?,
        Command::Sweep(a) => cmd_sweep(a)?,
    }
    Ok(ExitCode::SUCCESS)
}
