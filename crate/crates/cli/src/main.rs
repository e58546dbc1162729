use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dqhc::output::{summary_json, trajectory_plots, write_sweep_csv, write_trajectory_csv};
use dqhc::scenario::{preset_deltas, FIG4_DELTAS, PRESET_NAMES};
use dqhc::sim::{median, monte_carlo, run, sweep_delta_stats};
use dqhc::{ControllerKind, Error, Scenario};
use serde_json::json;

#[derive(Parser)]
#[command(name = "dqhc", version, about = "Hybrid dual quaternion pose stabilization simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trajectory and summary.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Also write SVG plots of η(t), p(t), V(t) and s(t).
        #[arg(long)]
        plots: bool,
    },
    /// Sweep the hysteresis width over seeded noisy runs.
    SweepDelta {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Comma-separated δ values.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 50)]
        runs: usize,
    },
    /// Run the same scenario under several controllers.
    Compare {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "hybrid,discontinuous")]
        controllers: Vec<String>,
        /// Hysteresis width for the hybrid law (defaults to the scenario's).
        #[arg(long)]
        delta: Option<f64>,
        /// Seeded runs per controller for the chattering statistics.
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long)]
        plots: bool,
    },
    /// Check a configuration file.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct Source {
    /// One of the compiled-in presets.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// JSON scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// RNG seed; falls back to DQHC_SEED, then to the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFiniteState { .. } | Error::ZeroPrimaryPart { .. } => Failure::Runtime(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("{}: {e}", path.display()))
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Simulate { source, common, plots } => simulate(&source, &common, plots),
        Command::SweepDelta { source, common, deltas, runs } => sweep(&source, &common, deltas, runs),
        Command::Compare { source, common, controllers, delta, runs, plots } => {
            compare(&source, &common, &controllers, delta, runs, plots)
        }
        Command::Validate { config } => validate(&config),
    }
}

fn resolve_seed(flag: Option<u64>) -> CliResult<Option<u64>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("DQHC_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Config(format!("DQHC_SEED is not an unsigned integer: `{v}`"))),
        Err(_) => Ok(None),
    }
}

/// Loads the scenario and the name reported in summaries.
fn load(source: &Source, common: &Common, default_preset: &str) -> CliResult<(Scenario, String)> {
    let (mut scenario, name) = match (&source.preset, &source.config) {
        (_, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            let s = Scenario::from_json(&text)?;
            let name = s.label.clone();
            (s, name)
        }
        (Some(p), None) => (dqhc::preset(p)?, p.clone()),
        (None, None) => (dqhc::preset(default_preset)?, default_preset.to_string()),
    };
    if let Some(seed) = resolve_seed(common.seed)? {
        scenario = scenario.with_seed(seed);
    }
    Ok((scenario, name))
}

fn prepare_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn write_run(dir: &Path, stem: &str, name: &str, scenario: &Scenario, plots: bool) -> CliResult<serde_json::Value> {
    let out = run(scenario)?;
    log::info!(
        "{stem}: initial pose moved {:e} by projection (desired {:e})",
        out.summary.projection_displacement,
        out.summary.projection_displacement_desired
    );
    let csv_path = dir.join(format!("{stem}.csv"));
    let file = fs::File::create(&csv_path).map_err(|e| io_failure(&csv_path, e))?;
    write_trajectory_csv(&out.records, std::io::BufWriter::new(file)).map_err(|e| io_failure(&csv_path, e))?;

    let summary = summary_json(name, &out.summary);
    let json_path = dir.join(format!("{stem}_summary.json"));
    write_file(&json_path, serde_json::to_string_pretty(&summary).expect("json") + "\n")?;

    if plots {
        for (suffix, svg) in trajectory_plots(stem, &out.records) {
            write_file(&dir.join(format!("{stem}_{suffix}.svg")), svg)?;
        }
    }
    Ok(summary)
}

fn simulate(source: &Source, common: &Common, plots: bool) -> CliResult<()> {
    if source.preset.is_none() && source.config.is_none() {
        return Err(Failure::Config(format!(
            "simulate needs --preset or --config (presets: {})",
            PRESET_NAMES.join(", ")
        )));
    }
    let (scenario, name) = load(source, common, "")?;
    prepare_out(&common.out)?;
    let summary = write_run(&common.out, &scenario.label, &name, &scenario, plots)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(())
}

fn sweep(source: &Source, common: &Common, deltas: Option<Vec<f64>>, runs: usize) -> CliResult<()> {
    let (scenario, name) = load(source, common, "fig4_delta_sweep")?;
    let deltas = deltas
        .or_else(|| preset_deltas(&name).map(<[f64]>::to_vec))
        .unwrap_or_else(|| FIG4_DELTAS.to_vec());
    let stats = sweep_delta_stats(&scenario, &deltas, runs)?;
    prepare_out(&common.out)?;
    let path = common.out.join("sweep_delta.csv");
    let file = fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
    write_sweep_csv(&stats, file).map_err(|e| io_failure(&path, e))?;

    println!("{:>8} {:>6} {:>13} {:>11} {:>10}", "delta", "runs", "median_jumps", "mean_jumps", "max_jumps");
    for r in &stats {
        println!("{:>8} {:>6} {:>13} {:>11.3} {:>10}", r.delta, r.runs, r.median_jumps, r.mean_jumps, r.max_jumps);
    }
    let rows: Vec<_> = stats
        .iter()
        .map(|r| {
            json!({
                "delta": r.delta,
                "runs": r.runs,
                "median_jumps": r.median_jumps,
                "mean_jumps": r.mean_jumps,
                "max_jumps": r.max_jumps,
                "median_sign_flips": r.median_sign_flips,
                "median_convergence_time_s": r.median_convergence_time,
                "converged": r.converged,
            })
        })
        .collect();
    let doc = json!({ "preset": name, "seed": scenario.noise.seed, "rows": rows });
    write_file(&common.out.join("sweep_delta.json"), serde_json::to_string_pretty(&doc).expect("json") + "\n")
}

fn compare(
    source: &Source,
    common: &Common,
    controllers: &[String],
    delta: Option<f64>,
    runs: usize,
    plots: bool,
) -> CliResult<()> {
    let (scenario, name) = load(source, common, "fig3_compare")?;
    let kinds = controllers
        .iter()
        .map(|c| c.parse::<ControllerKind>())
        .collect::<Result<Vec<_>, _>>()?;
    if kinds.is_empty() {
        return Err(Failure::Config("no controllers given".into()));
    }
    if runs == 0 {
        return Err(Failure::Config("runs must be at least 1".into()));
    }
    let delta = delta.or(scenario.delta).unwrap_or(0.3);
    prepare_out(&common.out)?;

    let mut entries = Vec::new();
    for kind in kinds {
        let s = scenario.clone().with_controller(kind, delta);
        s.validate()?;
        let stem = format!("{}_{}", scenario.label, kind.name());
        let mut summary = write_run(&common.out, &stem, &name, &s, plots)?;
        if runs > 1 {
            let batch = monte_carlo(&s, runs)?;
            let flips: Vec<f64> = batch.iter().map(|r| r.sign_flips as f64).collect();
            let jumps: Vec<f64> = batch.iter().map(|r| r.jumps as f64).collect();
            summary["batch"] = json!({
                "runs": runs,
                "median_sign_flips": median(&flips),
                "median_jumps": median(&jumps),
                "converged": batch.iter().filter(|r| r.convergence_time.is_some()).count(),
            });
        }
        println!(
            "{:>14}: jumps {:>5}  sign flips {:>6}  terminal V {:.3e}",
            kind.name(),
            summary["jumps"],
            summary["sign_flips"],
            summary["terminal_V"].as_f64().unwrap_or(f64::NAN)
        );
        entries.push(summary);
    }
    let doc = json!({ "preset": name, "delta": delta, "controllers": entries });
    write_file(&common.out.join("compare.json"), serde_json::to_string_pretty(&doc).expect("json") + "\n")
}

fn validate(path: &Path) -> CliResult<()> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    let scenario = Scenario::from_json(&text)?;
    println!("{}: ok ({} controller, label `{}`)", path.display(), scenario.controller, scenario.label);
    Ok(())
}
