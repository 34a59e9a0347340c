use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hdamp_cli::commands::{self, num, CliError, GFT_GAP_LIMIT, PROPCHECK_THRESHOLD};
use hdamp_cli::RunConfig;

/// Spectral experiments for the damped wave equation on the Heisenberg group.
///
/// Exit status: 0 checks pass, 1 checks fail, 2 configuration or I/O error,
/// 3 numerical error.
#[derive(Parser)]
#[command(name = "hdamp", version)]
struct Cli {
    /// Print only errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve synthetic data, fit decay rates, write norms.csv and report.csv.
    Scenario {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the closed-form propagator with the ODE oracle on seeded samples.
    Propcheck {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reconstruct the L² norm of a test function through its group Fourier transform.
    Gftcheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the partial sums of Σ μ_k^{-(n+1)} up to trunc.k_max.
    Tailbound {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let say = |line: String| {
        if !cli.quiet {
            println!("{line}");
        }
    };
    match &cli.command {
        Command::Scenario { config, out } => {
            let cfg = RunConfig::load(config)?;
            let out = out.clone().unwrap_or_else(|| cfg.output_dir.clone());
            let res = commands::cmd_scenario(&cfg, &out)?;
            for r in &res.verdict.rows {
                say(format!(
                    "{:<6} slope={} stderr={} expected={} tol={} {}",
                    r.observable.name(),
                    num(r.slope),
                    num(r.stderr),
                    num(r.expected),
                    num(r.tol),
                    if r.pass { "PASS" } else { "FAIL" }
                ));
            }
            say(format!(
                "wrote {} and {}",
                out.join("norms.csv").display(),
                out.join("report.csv").display()
            ));
            Ok(res.verdict.pass())
        }
        Command::Propcheck { samples, seed } => {
            let r = commands::cmd_propcheck(*samples, *seed)?;
            say(format!(
                "samples={} seed={} max_rel_dev={} worst_z={} worst_t={} golden_dev={} threshold={}",
                r.samples,
                r.seed,
                num(r.max_deviation),
                num(r.worst.0),
                num(r.worst.1),
                num(r.golden_deviation),
                num(PROPCHECK_THRESHOLD)
            ));
            Ok(r.pass())
        }
        Command::Gftcheck { config } => {
            let cfg = RunConfig::load(config)?;
            let r = commands::cmd_gftcheck(&cfg)?;
            say(format!("grid_l2_norm={}", num(r.grid_norm)));
            say(format!("plancherel_l2_norm={}", num(r.plancherel_norm)));
            say(format!("relative_gap={} limit={}", num(r.gap), num(GFT_GAP_LIMIT)));
            say(format!(
                "lebesgue_l2_norm={} lebesgue_gap={}",
                num(r.lebesgue_norm),
                num(r.lebesgue_gap)
            ));
            say(format!("rl_margin={} l1_norm={}", num(r.rl_margin), num(r.l1_norm)));
            say(format!(
                "resolution={} nodes={} skipped={} seconds={:.1}",
                num(r.resolution),
                r.nodes,
                r.skipped,
                r.elapsed.as_secs_f64()
            ));
            Ok(r.pass())
        }
        Command::Tailbound { config } => {
            let cfg = match config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::default(),
            };
            let (rows, tb) = commands::cmd_tailbound(&cfg);
            say("m,count,term,partial".into());
            for r in &rows {
                say(format!("{},{},{},{}", r.m, r.count, num(r.term), num(r.partial)));
            }
            say(format!(
                "n={} k_max={} partial={} tail={} full={}",
                tb.n,
                tb.k_max,
                num(tb.partial),
                num(tb.tail),
                num(tb.full())
            ));
            Ok(tb.full().is_finite())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
