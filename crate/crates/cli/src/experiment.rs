//! Multi-trial experiment execution and per-trial CSV output.
//!
//! Trial `t` is seeded with `base_seed + t`, and that seed draws the single
//! uniform starting point. Both optimizers therefore start trial `t` from the
//! same point. Trials run on a worker pool. Each worker writes its own trial
//! file, and the aggregate is built after joining in trial order, so the
//! output bytes do not depend on scheduling.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use smgo::bench::{make_function, BenchmarkFunction};
use smgo::gap::{default_resolution, GammaSource, GapCertificate, GAP_MAX_DIM};
use smgo::{gap_upper_bound, Engine, EngineConfig, Mode, Sample, SearchSpace};

use crate::error::{io_err, CliError, Result};
use crate::fmt_f64;
use crate::plot::{emit_plot, PlotOptions};
use crate::summary::{emit_summary, summarize, OutputFormat, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    Smgo,
    Random,
}

impl Optimizer {
    pub fn as_str(self) -> &'static str {
        match self {
            Optimizer::Smgo => "smgo",
            Optimizer::Random => "random",
        }
    }
}

impl FromStr for Optimizer {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "smgo" => Ok(Optimizer::Smgo),
            "random" => Ok(Optimizer::Random),
            other => Err(CliError::InvalidSpec(format!(
                "unknown optimizer '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub function: String,
    pub dim: usize,
    pub budget: usize,
    pub trials: usize,
    pub optimizer: Optimizer,
    pub alpha: f64,
    pub mu: f64,
    pub seed: u64,
    /// Directory for trial, summary, gap and plot files. Nothing is written
    /// when absent.
    pub out: Option<PathBuf>,
    pub gap: bool,
    pub plot: bool,
    pub log_y: bool,
    pub format: OutputFormat,
    /// Adds a per-iteration wall-clock column to the trial files. Off by
    /// default because timings differ between otherwise identical runs.
    pub timing: bool,
}

impl ExperimentSpec {
    /// A spec with the standard protocol settings for one benchmark.
    pub fn new(function: &str, dim: usize) -> Self {
        ExperimentSpec {
            function: function.to_string(),
            dim,
            budget: 500,
            trials: 100,
            optimizer: Optimizer::Smgo,
            alpha: 0.001,
            mu: 1.025,
            seed: 0,
            out: None,
            gap: false,
            plot: false,
            log_y: false,
            format: OutputFormat::Csv,
            timing: false,
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }

    fn engine_config(&self, trial: usize) -> EngineConfig<f64> {
        EngineConfig {
            alpha: self.alpha,
            mu: self.mu,
            budget: self.budget,
            seed: self.trial_seed(trial),
            ..EngineConfig::default()
        }
    }

    pub fn validate(&self) -> Result<BenchmarkFunction> {
        if self.trials == 0 {
            return Err(CliError::InvalidSpec(
                "at least one trial is required".into(),
            ));
        }
        if self.budget == 0 {
            return Err(CliError::InvalidSpec("budget must be at least 1".into()));
        }
        if self.gap && self.dim > GAP_MAX_DIM {
            return Err(CliError::InvalidSpec(format!(
                "gap certificates need dimension <= {GAP_MAX_DIM}, got {}",
                self.dim
            )));
        }
        if self.gap && self.optimizer != Optimizer::Smgo {
            return Err(CliError::InvalidSpec(
                "gap certificates need the smgo optimizer".into(),
            ));
        }
        self.engine_config(0).validate()?;
        Ok(make_function(&self.function, self.dim)?)
    }

    fn stem(&self, f: &BenchmarkFunction) -> String {
        format!("{}_{}d", f.name(), self.dim)
    }

    pub fn trial_path(&self, dir: &Path, f: &BenchmarkFunction, trial: usize) -> PathBuf {
        dir.join(format!("{}_t{trial}.csv", self.stem(f)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMode {
    Init,
    Theta,
    Psi,
    Random,
}

impl RowMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RowMode::Init => "init",
            RowMode::Theta => "theta",
            RowMode::Psi => "psi",
            RowMode::Random => "random",
        }
    }
}

impl From<Mode> for RowMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Theta => RowMode::Theta,
            Mode::Psi => RowMode::Psi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRow {
    /// Number of evaluations including this one.
    pub n: usize,
    pub mode: RowMode,
    pub x: Vec<f64>,
    pub z: f64,
    pub best_z: f64,
    /// Lipschitz estimate after this evaluation; absent for random search.
    pub gamma: Option<f64>,
    pub micros: u64,
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub rows: Vec<IterationRow>,
    pub gap: Option<GapCertificate<f64>>,
}

impl TrialRecord {
    pub fn final_best(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.best_z)
    }

    pub fn write_csv<W: Write>(&self, w: W, timing: bool) -> Result<()> {
        let dim = self.rows.first().map_or(0, |r| r.x.len());
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["n".to_string(), "mode".to_string()];
        header.extend((0..dim).map(|d| format!("x{d}")));
        header.extend(["z", "best_z", "gamma"].map(String::from));
        if timing {
            header.push("micros".into());
        }
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.n.to_string(), r.mode.as_str().to_string()];
            rec.extend(r.x.iter().map(|&v| fmt_f64(v)));
            rec.push(fmt_f64(r.z));
            rec.push(fmt_f64(r.best_z));
            rec.push(r.gamma.map(fmt_f64).unwrap_or_default());
            if timing {
                rec.push(r.micros.to_string());
            }
            out.write_record(&rec)?;
        }
        out.flush().map_err(CliError::Write)?;
        Ok(())
    }
}

fn initial_point(space: &SearchSpace<f64>, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    space.sample_uniform(&mut rng)
}

fn run_smgo(spec: &ExperimentSpec, f: &BenchmarkFunction, trial: usize) -> Result<TrialRecord> {
    let seed = spec.trial_seed(trial);
    let space = f.bounds.clone();
    let start = Instant::now();
    let x0 = initial_point(&space, seed);
    let z0 = f.evaluate(&x0);
    let mut engine = Engine::new(
        spec.engine_config(trial),
        space.clone(),
        &[Sample::new(x0.clone(), z0)],
    )?;
    let mut rows = Vec::with_capacity(spec.budget);
    rows.push(IterationRow {
        n: 1,
        mode: RowMode::Init,
        x: x0,
        z: z0,
        best_z: z0,
        gamma: Some(engine.gamma()),
        micros: start.elapsed().as_micros() as u64,
    });
    while !engine.is_exhausted() {
        let start = Instant::now();
        let x = engine.ask()?;
        let z = f.evaluate(&x);
        engine.tell(z)?;
        let micros = start.elapsed().as_micros() as u64;
        let mode = engine
            .reports()
            .last()
            .map(|r| r.mode.into())
            .unwrap_or(RowMode::Psi);
        rows.push(IterationRow {
            n: engine.n(),
            mode,
            x,
            z,
            best_z: engine.best().1,
            gamma: Some(engine.gamma()),
            micros,
        });
    }
    let gap = if spec.gap {
        let res = default_resolution(spec.dim);
        Some(gap_upper_bound(engine.history(), &space, spec.mu, res)?)
    } else {
        None
    };
    Ok(TrialRecord {
        trial,
        seed,
        rows,
        gap,
    })
}

fn run_random(spec: &ExperimentSpec, f: &BenchmarkFunction, trial: usize) -> Result<TrialRecord> {
    let seed = spec.trial_seed(trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(spec.budget);
    let mut best = f64::INFINITY;
    for n in 1..=spec.budget {
        let start = Instant::now();
        let x = f.bounds.sample_uniform(&mut rng);
        let z = f.evaluate(&x);
        best = best.min(z);
        rows.push(IterationRow {
            n,
            mode: if n == 1 {
                RowMode::Init
            } else {
                RowMode::Random
            },
            x,
            z,
            best_z: best,
            gamma: None,
            micros: start.elapsed().as_micros() as u64,
        });
    }
    Ok(TrialRecord {
        trial,
        seed,
        rows,
        gap: None,
    })
}

/// Runs one trial of `spec` without writing anything.
pub fn run_trial(
    spec: &ExperimentSpec,
    f: &BenchmarkFunction,
    trial: usize,
) -> Result<TrialRecord> {
    match spec.optimizer {
        Optimizer::Smgo => run_smgo(spec, f, trial),
        Optimizer::Random => run_random(spec, f, trial),
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub function: BenchmarkFunction,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
    /// Every file written, in a fixed order.
    pub files: Vec<PathBuf>,
}

/// Runs every trial of `spec`, writes the requested files and returns the
/// records in trial order. Trial files are written as soon as their trial
/// finishes, so a failure in one trial keeps the others on disk.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let f = spec.validate()?;
    if let Some(dir) = &spec.out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let results: Vec<Result<(TrialRecord, Option<PathBuf>)>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let rec = run_trial(spec, &f, t)?;
            let path = match &spec.out {
                Some(dir) => {
                    let path = spec.trial_path(dir, &f, t);
                    let file = File::create(&path).map_err(io_err(&path))?;
                    rec.write_csv(BufWriter::new(file), spec.timing)?;
                    Some(path)
                }
                None => None,
            };
            Ok((rec, path))
        })
        .collect();

    let mut records = Vec::with_capacity(spec.trials);
    let mut files = Vec::new();
    for r in results {
        let (rec, path) = r?;
        records.push(rec);
        files.extend(path);
    }
    let summary = summarize(&records)?;

    if let Some(dir) = &spec.out {
        let stem = spec.stem(&f);
        let path = dir.join(format!("{stem}_summary.{}", spec.format.extension()));
        emit_summary(&summary, spec.format, &path)?;
        files.push(path);
        if spec.gap {
            let path = dir.join(format!("{stem}_gap.csv"));
            write_gap_file(&records, &path)?;
            files.push(path);
        }
        if spec.plot {
            let path = dir.join(format!("{stem}_convergence.svg"));
            let opts = PlotOptions {
                title: format!("{} {}D, {} trials", f.name(), spec.dim, spec.trials),
                log_y: spec.log_y,
            };
            emit_plot(&summary, &opts, &path)?;
            files.push(path);
        }
    }
    Ok(ExperimentOutcome {
        function: f,
        records,
        summary,
        files,
    })
}

fn write_gap_file(records: &[TrialRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = csv::Writer::from_writer(BufWriter::new(file));
    let dim = records
        .iter()
        .find_map(|r| r.gap.as_ref().map(|g| g.argmin.len()))
        .unwrap_or(0);
    let mut header: Vec<String> = [
        "trial",
        "best_z",
        "min_lower",
        "delta_bar",
        "slack",
        "resolution",
        "gamma",
        "gamma_source",
    ]
    .map(String::from)
    .to_vec();
    header.extend((0..dim).map(|d| format!("argmin_x{d}")));
    out.write_record(&header)?;
    for r in records {
        let Some(g) = &r.gap else { continue };
        let source = match g.gamma_source {
            GammaSource::Estimated => "estimated",
            GammaSource::Supplied => "supplied",
        };
        let mut rec = vec![
            r.trial.to_string(),
            fmt_f64(g.best_z),
            fmt_f64(g.min_lower),
            fmt_f64(g.delta_bar),
            fmt_f64(g.slack),
            g.grid_resolution.to_string(),
            fmt_f64(g.gamma),
            source.to_string(),
        ];
        rec.extend(g.argmin.iter().map(|&v| fmt_f64(v)));
        out.write_record(&rec)?;
    }
    out.flush().map_err(io_err(path))?;
    Ok(())
}
