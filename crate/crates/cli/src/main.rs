use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mclm_cli::verify::{render_table, run_suite, Suite};
use mclm_cli::{convergence, cross_validation, run, RunConfig, EXIT_ERROR, OUTPUT_ROOT_ENV};
use mclm_core::flows::OrderEstimate;

#[derive(Parser)]
#[command(name = "mclm", version, about = "Spectral solver for the modified CLM family on the circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured run and write manifest.json and series.csv.
    Run { config: PathBuf },
    /// Run a verification suite: symbols, operators, geodesic or all.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Global error against a dt/4 reference for each step size.
    Convergence {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        dts: Vec<f64>,
    },
    /// Compare the Eulerian and Lagrangian integrations of the configured data.
    CrossValidate {
        config: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn execute(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let root = std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from);
            let outcome = run(&cfg, root.as_deref())?;
            let m = &outcome.manifest;
            println!(
                "{}: {} after {} steps, t = {:.6}, rows = {}",
                outcome.output_dir.display(),
                m.cause(),
                m.steps,
                m.summary.t_final,
                m.summary.rows
            );
            Ok(outcome.exit_code())
        }
        Command::Verify { suite, seed } => {
            let suite: Suite = suite.parse()?;
            let checks = run_suite(suite, seed);
            print!("{}", render_table(&checks));
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { EXIT_ERROR })
        }
        Command::Convergence { config, dts } => {
            let cfg = RunConfig::load(&config)?;
            let report = convergence(&cfg, &dts)?;
            println!("reference dt = {:e}", report.reference_dt);
            println!("{:>12} {:>24}", "dt", "max error");
            for (dt, e) in report.dts.iter().zip(&report.errors) {
                println!("{dt:>12e} {e:>24.16e}");
            }
            match &report.order {
                OrderEstimate::Exact => println!("order: exact (all errors vanish)"),
                OrderEstimate::Fitted(p) => println!("order: {p:.4}"),
                OrderEstimate::NotMeasurable(why) => println!("order not measurable: {why}"),
            }
            Ok(0)
        }
        Command::CrossValidate { config, tol } => {
            let cfg = RunConfig::load(&config)?;
            let dev = cross_validation(&cfg)?;
            let verdict = if dev <= tol { "PASS" } else { "FAIL" };
            println!("max |u_E - u_L| = {dev:.6e} (tol {tol:e}) {verdict}");
            Ok(if dev <= tol { 0 } else { EXIT_ERROR })
        }
    }
}
