use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use hypwalk::walker::{sample_trajectories, WalkConfig};
use hypwalk_cli::catalog::{bundled_configs, ExperimentId, CATALOG};
use hypwalk_cli::report::Report;
use hypwalk_cli::{run_config, run_estimates, Config};

#[derive(Parser)]
#[command(name = "hypwalk", version, about = "Random walks on hyperbolic groups: escape rate, entropy, harmonic-measure dimension")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample trajectories and write `trajectories.csv`.
    Walk(Common),
    /// Run the shared estimators on a config, without assertions.
    Estimate(Common),
    /// Run experiments and check their assertions.
    Experiment(Common),
    /// List the bundled experiments.
    List,
    /// Re-render the CSV tables of a stored report.
    Report {
        /// Directory holding `report.json`.
        dir: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Config file; may be repeated. Defaults to the bundled configs.
    #[arg(long)]
    config: Vec<PathBuf>,
    /// Bundled experiment to run (E1..E5).
    #[arg(long)]
    experiment: Option<ExperimentId>,
    /// Overrides the master seed of every config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's `output`, else `hypwalk-out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
        Command::Report { dir } => rerender(&dir),
        Command::Walk(c) => with_configs(&c, |configs, out| walk(configs, out)),
        Command::Estimate(c) => with_configs(&c, |configs, out| finish(configs.iter().map(run_estimates).collect(), out)),
        Command::Experiment(c) => with_configs(&c, |configs, out| {
            finish(
                configs
                    .iter()
                    .map(|cfg| {
                        eprintln!("running {} ({})", cfg.name, cfg.experiment);
                        run_config(cfg)
                    })
                    .collect(),
                out,
            )
        }),
    }
}

fn list() {
    for e in &CATALOG {
        println!("{}  {}  [{}]", e.id, e.title, e.runtime);
        println!("    anchor: {}", e.anchor);
        println!("    {}", e.description);
        let names: Vec<&str> = e.configs.iter().map(|c| c.name).collect();
        println!("    configs: {}", names.join(", "));
    }
}

/// Loads and validates every config before any output is written.
fn with_configs(c: &Common, body: impl FnOnce(&[Config], &Path) -> ExitCode) -> ExitCode {
    let configs = match load(c) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(n) = c.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let out = c
        .out
        .clone()
        .or_else(|| configs.iter().find_map(|cfg| cfg.output.clone()))
        .unwrap_or_else(|| PathBuf::from("hypwalk-out"));
    body(&configs, &out)
}

fn load(c: &Common) -> Result<Vec<Config>, String> {
    let mut configs = Vec::new();
    if c.config.is_empty() {
        for b in bundled_configs() {
            let cfg = Config::parse(b.name, b.name, b.text).map_err(|e| e.to_string())?;
            if c.experiment.is_none_or(|id| id == cfg.experiment) {
                configs.push(cfg);
            }
        }
    } else {
        for p in &c.config {
            let cfg = Config::from_path(p).map_err(|e| e.to_string())?;
            if let Some(id) = c.experiment {
                if id != cfg.experiment {
                    return Err(format!("{}: config is for {}, not {id}", p.display(), cfg.experiment));
                }
            }
            configs.push(cfg);
        }
    }
    if let Some(seed) = c.seed {
        for cfg in &mut configs {
            cfg.seed = seed;
        }
    }
    let mut names: Vec<&str> = configs.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err("two configs share a name; their output tables would collide".into());
    }
    Ok(configs)
}

fn finish(runs: Vec<hypwalk_cli::report::Run>, out: &Path) -> ExitCode {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let report = Report::new(runs, now);
    if let Err(e) = report.write(out) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return ExitCode::from(3);
    }
    summarize(&report);
    println!("report written to {}", out.join("report.json").display());
    ExitCode::from(report.exit_code as u8)
}

fn summarize(report: &Report) {
    for run in &report.runs {
        println!("{} {} [{}]", if run.passed { "PASS" } else { "FAIL" }, run.name, run.experiment);
        for a in &run.assertions {
            println!(
                "  {} {}: {} (lhs {:.6}, rhs {:.6}, margin {:.6}){}",
                if a.passed { "ok  " } else { "FAIL" },
                a.name,
                a.inequality,
                a.lhs,
                a.rhs,
                a.margin,
                if a.detail.is_empty() { String::new() } else { format!("; {}", a.detail) }
            );
        }
        for f in &run.failures {
            println!("  error in {}: {}", f.stage, f.message);
        }
    }
}

fn rerender(dir: &Path) -> ExitCode {
    let report = match Report::read(&dir.join("report.json")) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dir.join("report.json").display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Err(e) = report.write_tables(dir) {
        eprintln!("error: cannot write tables under {}: {e}", dir.display());
        return ExitCode::from(3);
    }
    summarize(&report);
    ExitCode::from(report.exit_code as u8)
}

fn walk(configs: &[Config], out: &Path) -> ExitCode {
    let mut rows = Vec::new();
    for cfg in configs {
        let result = cfg.model().map_err(hypwalk::Error::InvalidArgument).and_then(|model| {
            let m = cfg.measure_on(&model).map_err(hypwalk::Error::InvalidArgument)?;
            let w = &cfg.walk;
            let wc = WalkConfig::new(w.steps, w.trajectories, cfg.seed).with_stride(w.stride);
            sample_trajectories(&m, &model, &wc)
        });
        match result {
            Ok(trajectories) => {
                for t in trajectories {
                    for (n, d) in t.steps.iter().zip(&t.distances) {
                        rows.push((cfg.name.clone(), t.index, *n, *d));
                    }
                }
            }
            Err(e) => {
                eprintln!("error: {}: {e}", cfg.name);
                return ExitCode::from(3);
            }
        }
    }
    let path = out.join("trajectories.csv");
    let written = std::fs::create_dir_all(out).map_err(csv::Error::from).and_then(|_| {
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["config", "traj_index", "n", "distance"])?;
        for (name, i, n, d) in &rows {
            w.write_record([name.clone(), i.to_string(), n.to_string(), d.to_string()])?;
        }
        w.flush()?;
        Ok(())
    });
    match written {
        Ok(()) => {
            println!("{} rows written to {}", rows.len(), path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", path.display());
            ExitCode::from(3)
        }
    }
}
