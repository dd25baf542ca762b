use clap::{Parser, Subcommand};

use tgverify_cli::runner;
use tgverify_cli::scenario::CliOverrides;

/// Certify numerically whether the graph of a vector field is a totally
/// geodesic submanifold of its tangent bundle under a g-natural metric.
#[derive(Parser)]
#[command(name = "tgverify", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario (embedded preset name or JSON file)
    /// and emit a deterministic JSON report.
    Verify {
        /// Preset name or path to a scenario file.
        #[arg(long)]
        scenario: String,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<String>,
        /// Override the analytic tolerance for verdict indicators.
        #[arg(long)]
        tol: Option<f64>,
        /// Override the number of sample points.
        #[arg(long)]
        samples: Option<usize>,
        /// Override the sampling seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the embedded preset scenarios.
    Presets,
    /// Sweep a metric's weight nondegeneracy functions over (0, tmax].
    CheckMetric {
        /// Metric preset name, generator JSON file, or inline
        /// `a1=...,a2=...` assignments.
        #[arg(long)]
        spec: String,
        /// Upper end of the t sweep.
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify {
            scenario,
            report,
            tol,
            samples,
            seed,
        } => runner::run_verify(
            &scenario,
            report.as_deref(),
            &CliOverrides { tol, samples, seed },
        ),
        Command::Presets => runner::run_presets(),
        Command::CheckMetric { spec, tmax } => runner::run_check_metric(&spec, tmax),
    };
    std::process::exit(code);
}
