//! Command-line front end for `reqmine`.
//!
//! Each subcommand reads an optional JSON config, applies command-line
//! flags on top, validates everything, then runs. Output files are CSV
//! with a leading `# reqmine <command> v1` comment and depend only on the
//! config and seed; wall-clock timings go to standard error.

pub mod bench;
pub mod config;
pub mod runs;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use reqmine::acquisition::{AcquisitionConfig, Strategy};
use reqmine::mining::templates;
use reqmine::mining::{falsify, FalsificationOutcome};
use reqmine::stl::{parse_formula, robustness, Formula, Signal, Valuation};
use reqmine::systems::SystemUnderTest;

use bench::{ackley_defaults, run_ackley, AckleySettings, ACKLEY_KERNELS, ACKLEY_STRATEGIES};
pub use config::RunConfig;
use runs::{mean_simulations, run_mining_trials, MiningTrial};

pub const SCALING_FACTORS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 1.0];
const DEFAULT_TRIALS: usize = 100;
const DEFAULT_VALIDATE_SAMPLES: usize = 1000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Run(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }
}

/// What a successful command concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some mining trial ended infeasible or out of budget.
    MiningFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::MiningFailed => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "reqmine",
    version,
    about = "Mine STL requirements from black-box simulators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine a parametric template against a system.
    Mine,
    /// Search for an input violating a concrete formula.
    Falsify,
    /// Evaluate a formula on a trace CSV.
    Robustness,
    /// Compare optimisation strategies on the Ackley function.
    BenchAckley,
    /// Repeat mining across scaling factors.
    ScalingSweep,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// JSON config file; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for independent trials (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    #[arg(long, global = true)]
    pub kernel: Option<String>,
    #[arg(long, global = true)]
    pub xi: Option<f64>,
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[arg(long, global = true)]
    pub system: Option<String>,
    #[arg(long, global = true)]
    pub template: Option<String>,
    #[arg(long, global = true)]
    pub formula: Option<String>,
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
}

impl Flags {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.overlay(RunConfig {
            seed: self.seed,
            jobs: self.jobs,
            out: self.out,
            trials: self.trials,
            strategy: self.strategy,
            kernel: self.kernel,
            xi: self.xi,
            budget: self.budget,
            system: self.system,
            template: self.template,
            formula: self.formula,
            trace: self.trace,
            ..Default::default()
        });
        Ok(cfg)
    }
}

/// Runs a parsed command line, writing human-readable progress to `log`.
pub fn run(cli: Cli, log: &mut (dyn Write + Send)) -> Result<Outcome, CliError> {
    let cfg = cli.flags.into_config()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Mine => cmd_mine(&cfg, log),
        Command::Falsify => cmd_falsify(&cfg, log),
        Command::Robustness => cmd_robustness(&cfg, log),
        Command::BenchAckley => cmd_bench_ackley(&cfg, log),
        Command::ScalingSweep => cmd_scaling_sweep(&cfg, log),
    })
}

fn csv_writer(path: Option<&Path>, tag: &str) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout()),
    };
    writeln!(sink, "# reqmine {tag} v1")?;
    Ok(csv::Writer::from_writer(sink))
}

/// `dir/name.csv` becomes `dir/name_<suffix>.csv`.
pub fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}_{suffix}{ext}"))
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn cmd_robustness(cfg: &RunConfig, log: &mut (dyn Write + Send)) -> Result<Outcome, CliError> {
    let path = cfg
        .trace
        .as_ref()
        .ok_or_else(|| CliError::Config("no trace given".into()))?;
    let text = cfg
        .formula
        .as_ref()
        .ok_or_else(|| CliError::Config("no formula given".into()))?;
    let phi = concrete_formula(text)?;
    let file =
        File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let signal =
        Signal::read_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let r = robustness(&signal, &phi, signal.t0()).map_err(|e| CliError::Config(e.to_string()))?;
    let verdict = if r > 0.0 { "satisfied" } else { "violated" };
    writeln!(log, "robustness {r} ({verdict})")?;
    if cfg.out.is_some() {
        let mut w = csv_writer(cfg.out.as_deref(), "robustness")?;
        w.write_record(["formula", "robustness", "satisfied"])?;
        w.write_record([phi.to_string(), num(r), (r > 0.0).to_string()])?;
        w.flush()?;
    }
    Ok(Outcome::Success)
}

fn concrete_formula(text: &str) -> Result<Formula, CliError> {
    let parsed = parse_formula(text).map_err(|e| CliError::Config(e.to_string()))?;
    parsed
        .to_concrete()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn cmd_falsify(cfg: &RunConfig, log: &mut (dyn Write + Send)) -> Result<Outcome, CliError> {
    let system = cfg.system()?;
    let phi = match (&cfg.formula, &cfg.template) {
        (Some(text), None) => concrete_formula(text)?,
        (None, Some(_)) => {
            let template = cfg.template()?;
            let mut theta = Valuation::new();
            for (k, v) in cfg.valuation.iter().flatten() {
                theta.set(k, *v);
            }
            template
                .formula
                .instantiate(&theta)
                .map_err(|e| CliError::Config(e.to_string()))?
        }
        _ => {
            return Err(CliError::Config(
                "give either `formula` or `template` with `valuation`".into(),
            ))
        }
    };
    let budget = cfg.budget.or(cfg.falsification_budget).unwrap_or(200);
    let acq = cfg.acquisition(AcquisitionConfig {
        xi: 0.5,
        budget,
        seed: cfg.seed(),
        ..Default::default()
    })?;
    let result = falsify(&system, &phi, &acq, budget).map_err(|e| CliError::Run(e.to_string()))?;

    let mut w = csv_writer(cfg.out.as_deref(), "falsify")?;
    let dims = system.x0_bounds().len();
    let mut header = vec!["iteration".to_string()];
    header.extend((1..=dims).map(|i| format!("x{i}")));
    header.push("robustness".into());
    w.write_record(&header)?;
    for r in result.run.records() {
        let mut row = vec![r.iteration.to_string()];
        row.extend(r.x.iter().map(|&v| num(v)));
        row.push(num(r.value));
        w.write_record(&row)?;
    }
    w.flush()?;

    match &result.outcome {
        FalsificationOutcome::Counterexample {
            x0,
            trace,
            robustness,
        } => {
            writeln!(
                log,
                "falsified after {} simulations: x0 = {x0:?}, robustness {robustness}",
                result.simulations
            )?;
            if let Some(path) = &cfg.trace_out {
                trace
                    .write_csv(File::create(path)?)
                    .map_err(|e| CliError::Run(e.to_string()))?;
            }
        }
        FalsificationOutcome::NotFalsified {
            min_robustness,
            argmin,
        } => {
            writeln!(
                log,
                "not falsified in {} simulations: least robust x0 = {argmin:?}, robustness {min_robustness}",
                result.simulations
            )?;
        }
    }
    Ok(Outcome::Success)
}

fn mining_rows(
    w: &mut csv::Writer<Box<dyn Write>>,
    lead: &[String],
    params: &[String],
    trials: &[MiningTrial],
    prefix: &dyn Fn(usize) -> Vec<String>,
) -> Result<(), CliError> {
    let mut header: Vec<String> = lead.to_vec();
    header.extend(["trial", "seed", "status"].map(String::from));
    header.extend(params.iter().cloned());
    header.extend(
        [
            "min_robustness",
            "trace_set_robustness",
            "total_simulations",
            "rounds",
            "validation_min_robustness",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for (i, t) in trials.iter().enumerate() {
        let r = &t.result;
        let mut row = prefix(i);
        row.extend([
            t.trial.to_string(),
            t.seed.to_string(),
            r.status.name().to_string(),
        ]);
        for p in params {
            row.push(
                r.valuation
                    .as_ref()
                    .and_then(|v| v.get(p))
                    .map_or(String::new(), num),
            );
        }
        row.push(num(r.min_robustness_on_samples));
        row.push(t.trace_set_robustness.map_or(String::new(), num));
        row.push(r.total_simulations.to_string());
        row.push(r.rounds.to_string());
        row.push(
            t.validation
                .as_ref()
                .map_or(String::new(), |v| num(v.min_robustness)),
        );
        w.write_record(&row)?;
    }
    Ok(())
}

fn log_timings(
    log: &mut (dyn Write + Send),
    label: &str,
    trials: &[MiningTrial],
) -> io::Result<()> {
    let fals: f64 = trials
        .iter()
        .map(|t| t.result.falsification_time.as_secs_f64())
        .sum();
    let synth: f64 = trials
        .iter()
        .map(|t| t.result.synthesis_time.as_secs_f64())
        .sum();
    let n = trials.len() as f64;
    let mined = trials.iter().filter(|t| t.mined()).count();
    writeln!(
        log,
        "{label}: {mined}/{} mined, mean #sim {:.1}, mean falsification {:.3} s, mean synthesis {:.3} s",
        trials.len(),
        mean_simulations(trials),
        fals / n,
        synth / n
    )
}

fn cmd_mine(cfg: &RunConfig, log: &mut (dyn Write + Send)) -> Result<Outcome, CliError> {
    let system = cfg.system()?;
    let template = cfg.template()?;
    let mining = cfg.mining(&template)?;
    let trials = cfg.trials(1)?;
    let validate_samples = cfg.validate_samples.unwrap_or(DEFAULT_VALIDATE_SAMPLES);
    let results = run_mining_trials(&system, &template, &mining, trials, validate_samples)?;

    let params: Vec<String> = template
        .formula
        .params()
        .iter()
        .map(|p| p.name.clone())
        .collect();
    let mut w = csv_writer(cfg.out.as_deref(), "mine")?;
    mining_rows(&mut w, &[], &params, &results, &|_| Vec::new())?;
    w.flush()?;
    log_timings(
        log,
        &format!("{} with {}", template.name, mining.acquisition.strategy),
        &results,
    )?;
    Ok(if results.iter().all(MiningTrial::mined) {
        Outcome::Success
    } else {
        Outcome::MiningFailed
    })
}

fn cmd_scaling_sweep(cfg: &RunConfig, log: &mut (dyn Write + Send)) -> Result<Outcome, CliError> {
    let system = cfg.system()?;
    let template = match (&cfg.template, &cfg.formula) {
        (None, None) => templates::sp_rpm(),
        _ => cfg.template()?,
    };
    let base = cfg.mining(&template)?;
    let trials = cfg.trials(DEFAULT_TRIALS)?;
    let xis = cfg.xis.clone().unwrap_or_else(|| SCALING_FACTORS.to_vec());
    if let Some(bad) = xis.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(CliError::Config(format!(
            "scaling factor must be positive, got {bad}"
        )));
    }
    let validate_samples = cfg.validate_samples.unwrap_or(0);

    let mut all = Vec::new();
    for &xi in &xis {
        let mut run_cfg = base.clone();
        run_cfg.acquisition.xi = xi;
        let results = run_mining_trials(&system, &template, &run_cfg, trials, validate_samples)?;
        log_timings(log, &format!("xi = {xi}"), &results)?;
        all.push((xi, results));
    }

    let mut w = csv_writer(cfg.out.as_deref(), "scaling-sweep")?;
    w.write_record(["xi", "trials", "mined", "mean_simulations", "mean_rounds"])?;
    for (xi, results) in &all {
        let mined = results.iter().filter(|t| t.mined()).count();
        let rounds =
            results.iter().map(|t| t.result.rounds as f64).sum::<f64>() / results.len() as f64;
        w.write_record([
            num(*xi),
            trials.to_string(),
            mined.to_string(),
            num(mean_simulations(results)),
            num(rounds),
        ])?;
    }
    w.flush()?;
    if let Some(out) = &cfg.out {
        let params: Vec<String> = template
            .formula
            .params()
            .iter()
            .map(|p| p.name.clone())
            .collect();
        let mut w = csv_writer(Some(&sibling_path(out, "trials")), "scaling-sweep-trials")?;
        let flat: Vec<MiningTrial> = all.iter().flat_map(|(_, r)| r.iter().cloned()).collect();
        mining_rows(&mut w, &["xi".to_string()], &params, &flat, &|i| {
            vec![num(xis[i / trials])]
        })?;
        w.flush()?;
    }
    Ok(
        if all.iter().all(|(_, r)| r.iter().all(MiningTrial::mined)) {
            Outcome::Success
        } else {
            Outcome::MiningFailed
        },
    )
}

fn cmd_bench_ackley(cfg: &RunConfig, log: &mut (dyn Write + Send)) -> Result<Outcome, CliError> {
    let settings = AckleySettings {
        strategies: cfg.strategy_list(&ACKLEY_STRATEGIES)?,
        kernels: cfg.kernel_list(&ACKLEY_KERNELS)?,
        trials: cfg.trials(DEFAULT_TRIALS)?,
        base: cfg.acquisition(ackley_defaults())?,
        seed: cfg.seed(),
    };
    if settings.strategies.contains(&Strategy::NelderMead) && settings.strategies.len() == 1 {
        writeln!(log, "note: nelder_mead ignores the kernel")?;
    }
    let report = run_ackley(&settings)?;

    let mut w = csv_writer(cfg.out.as_deref(), "bench-ackley")?;
    w.write_record([
        "strategy",
        "kernel",
        "iteration",
        "mean_simple_regret",
        "mean_instant_regret",
    ])?;
    for s in &report.series {
        let simple = s.mean_simple_regret();
        let instant = s.mean_instant_regret();
        for (t, (a, b)) in simple.iter().zip(&instant).enumerate() {
            w.write_record([
                s.strategy.name(),
                s.kernel_name(),
                &(t + 1).to_string(),
                &num(*a),
                &num(*b),
            ])?;
        }
        writeln!(
            log,
            "{}: mean final regret {:.4}, within 5% after {} iterations",
            s.label(),
            s.mean_final_regret(),
            s.iterations_to_within(0.05)
        )?;
    }
    w.flush()?;

    if let Some(out) = &cfg.out {
        let mut w = csv_writer(Some(&sibling_path(out, "trials")), "bench-ackley-trials")?;
        w.write_record([
            "strategy",
            "kernel",
            "trial",
            "final_regret",
            "iterations_to_5pct",
            "cumulative_regret",
            "information_gain",
            "eta_min",
            "eta_max",
            "beta_final",
            "regret_bound",
            "within_bound",
        ])?;
        for s in &report.series {
            for t in &s.trials {
                let (lo, hi) = t
                    .eta_range
                    .map_or((String::new(), String::new()), |(a, b)| (num(a), num(b)));
                w.write_record([
                    s.strategy.name().to_string(),
                    s.kernel_name().to_string(),
                    t.trial.to_string(),
                    num(t.final_regret()),
                    bench::iterations_to_within(&t.simple_regret, 0.05).to_string(),
                    num(t.cumulative_regret),
                    num(t.information_gain),
                    lo,
                    hi,
                    num(t.beta_final),
                    num(t.regret_bound),
                    t.within_bound().to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    Ok(Outcome::Success)
}
