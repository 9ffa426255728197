use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polariton_ll::effective_model::{tagged_document, Status};
use polariton_ll::runner::{
    self, derive_model, emit_plot_data, load_config_file, parse_axis, run_experiment, Format,
    PlotTarget, RunError, SweepOptions, DEFAULT_SWEEP_LIMIT,
};

/// Two-component polariton Lieb-Liniger simulator.
///
/// Exit codes: 0 success, 1 usage or config error, 2 validity failure,
/// 3 numerical failure.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output directory (overrides the config).
    #[arg(long, global = true, env = "POLARITON_LL_OUT")]
    out: Option<PathBuf>,
    /// Integration step (overrides the config).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Proceed even when the validity check fails.
    #[arg(long, global = true)]
    allow_invalid: bool,
    /// Parallel sweep workers.
    #[arg(long, global = true, env = "POLARITON_LL_WORKERS")]
    workers: Option<usize>,
    /// Format of field-state artifacts.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the effective model and validity report only.
    MapParams { config: PathBuf },
    /// Run the full pipeline.
    Simulate { config: PathBuf },
    /// Run a Cartesian parameter sweep.
    Sweep {
        config: PathBuf,
        /// `key=v1,v2,...` with a dotted config key; repeatable.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        /// Largest allowed number of points.
        #[arg(long, default_value_t = DEFAULT_SWEEP_LIMIT)]
        limit: usize,
    },
    /// Write the spectral cut `S(q, ω)` nearest `q` from a finished run.
    Cut {
        manifest: PathBuf,
        #[arg(long)]
        q: f64,
    },
    /// Copy or slice a run artifact for plotting.
    Emit {
        manifest: PathBuf,
        #[arg(long, value_enum)]
        target: PlotTarget,
        #[arg(long)]
        q: Option<f64>,
    },
}

fn load(path: &PathBuf, common: &Common) -> Result<runner::ExperimentConfig, RunError> {
    let mut cfg = load_config_file(path)?;
    if let Some(out) = &common.out {
        cfg.output.dir = out.clone();
    }
    if let Some(dt) = common.dt {
        cfg.integration.dt = dt;
    }
    if let Some(format) = common.format {
        cfg.output.format = format;
    }
    cfg.allow_invalid |= common.allow_invalid;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), RunError> {
    let common = &cli.common;
    match &cli.command {
        Command::MapParams { config } => {
            let cfg = load(config, common)?;
            let derived = derive_model(&cfg)?;
            let doc = serde_json::to_string_pretty(&tagged_document(&derived)).expect("serializes");
            println!("{doc}");
            if let Some(out) = &common.out {
                std::fs::create_dir_all(out).map_err(|e| RunError::Io { path: out.clone(), source: e })?;
                let path = out.join("model.json");
                std::fs::write(&path, doc + "\n").map_err(|e| RunError::Io { path, source: e })?;
            }
            for e in &derived.validity.entries {
                eprintln!("{:<24} {:>12.4e}  {}", e.name, e.ratio, e.status.as_str());
            }
            if derived.validity.overall() == Status::Fail && !cfg.allow_invalid {
                return Err(RunError::Validity {
                    worst: derived.validity.worst_ratio().unwrap_or(f64::NAN),
                });
            }
        }
        Command::Simulate { config } => {
            let cfg = load(config, common)?;
            let m = run_experiment(&cfg)?;
            eprintln!("wrote {} files to {}", m.files.len() + 1, cfg.output.dir.display());
            if let Some(r) = m.summary.velocity_ratio_analytic {
                println!("velocity ratio (analytic): {r:.6}");
            }
            if let Some(f) = m.summary.fronts {
                println!("fronts: charge {:.6}  spin {:.6}  ratio {:.6}", f.charge, f.spin, f.ratio);
            }
            if let Some(s) = &m.summary.spectral {
                println!("spectrum: charge {:.6}  spin {:.6}  ratio {:.6}", s.charge, s.spin, s.charge / s.spin);
            }
            for cut in &m.summary.peaks {
                let w: Vec<String> = cut.peaks.iter().map(|p| format!("{:.6}", p.omega)).collect();
                println!("peaks at q = {:.6}: {}", cut.q, w.join(" "));
            }
        }
        Command::Sweep { config, axes, limit } => {
            let cfg = load(config, common)?;
            let axes = axes.iter().map(|a| parse_axis(a)).collect::<Result<Vec<_>, _>>()?;
            let options = SweepOptions {
                workers: common.workers.unwrap_or(1),
                limit: *limit,
                out_dir: cfg.output.dir.clone(),
            };
            let table = runner::sweep(&cfg, &axes, &options)?;
            let failed = table.rows.iter().filter(|r| r.status != "ok").count();
            eprintln!(
                "{} points, {failed} not ok; table in {}",
                table.rows.len(),
                options.out_dir.join("sweep.csv").display()
            );
        }
        Command::Cut { manifest, q } => {
            let out = cut_path(manifest, common, *q);
            let path = emit_plot_data(manifest, PlotTarget::Cut, Some(*q), &out)?;
            println!("{}", path.display());
        }
        Command::Emit { manifest, target, q } => {
            let name = match target {
                PlotTarget::Densities => "densities_plot.csv".to_string(),
                PlotTarget::Spectrum => "spectrum_plot.csv".to_string(),
                PlotTarget::Cut => format!("cut_q{}.csv", q.unwrap_or(0.0)),
            };
            let out = common.out.clone().unwrap_or_else(|| run_dir(manifest)).join(name);
            let path = emit_plot_data(manifest, *target, *q, &out)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn run_dir(manifest: &PathBuf) -> PathBuf {
    if manifest.is_dir() {
        manifest.clone()
    } else {
        manifest.parent().map(PathBuf::from).unwrap_or_default()
    }
}

fn cut_path(manifest: &PathBuf, common: &Common, q: f64) -> PathBuf {
    common
        .out
        .clone()
        .unwrap_or_else(|| run_dir(manifest))
        .join(format!("cut_q{q}.csv"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
