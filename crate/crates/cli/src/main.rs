use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use smgo_cli::{run_experiment, ExperimentSpec, Optimizer, OutputFormat};

/// Run repeated optimization trials on a benchmark function.
#[derive(Debug, Parser)]
#[command(name = "smgo", version)]
struct Args {
    /// Benchmark name: rosenbrock, styblinski-tang, deb1, deb2, schwefel, salomon, brown.
    #[arg(long)]
    function: String,
    /// Problem dimension.
    #[arg(long)]
    dim: usize,
    /// Function evaluations per trial, including the starting point.
    #[arg(long, default_value_t = 500)]
    budget: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// smgo or random.
    #[arg(long, default_value = "smgo")]
    optimizer: Optimizer,
    /// Required improvement, as a fraction of the Lipschitz estimate, for an exploitation step.
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    /// Inflation factor applied to the Lipschitz estimate inside the bounds.
    #[arg(long, default_value_t = 1.025)]
    mu: f64,
    /// Base seed; trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory. Without it only the final summary line is printed.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compute an optimality-gap certificate per trial (dimension <= 3).
    #[arg(long)]
    gap: bool,
    /// Write an SVG convergence plot.
    #[arg(long)]
    plot: bool,
    /// Use a logarithmic value axis in the plot.
    #[arg(long)]
    log_y: bool,
    /// Summary file format: csv or json.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    /// Add a per-iteration wall-clock column (microseconds) to trial files.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: Args) -> anyhow::Result<()> {
    let spec = ExperimentSpec {
        function: args.function,
        dim: args.dim,
        budget: args.budget,
        trials: args.trials,
        optimizer: args.optimizer,
        alpha: args.alpha,
        mu: args.mu,
        seed: args.seed,
        out: args.out,
        gap: args.gap,
        plot: args.plot,
        log_y: args.log_y,
        format: args.format,
        timing: args.timing,
    };
    let outcome = run_experiment(&spec).context("experiment failed")?;
    let last = outcome.summary.last().context("empty summary")?;
    println!(
        "{} {}D {} trials={} budget={}: mean={:.6e} median={:.6e} q25={:.6e} q75={:.6e} min={:.6e} max={:.6e}",
        outcome.function.name(),
        spec.dim,
        spec.optimizer.as_str(),
        spec.trials,
        spec.budget,
        last.mean,
        last.median,
        last.q25,
        last.q75,
        last.min,
        last.max
    );
    for r in outcome
        .records
        .iter()
        .filter_map(|r| r.gap.as_ref().map(|g| (r.trial, g)))
    {
        let (trial, g) = r;
        println!(
            "trial {trial}: gap <= {:.6e} (+ grid slack {:.3e}, estimated gamma {:.6e})",
            g.delta_bar, g.slack, g.gamma
        );
    }
    for path in &outcome.files {
        println!("wrote {}", path.display());
    }
    Ok(())
}
