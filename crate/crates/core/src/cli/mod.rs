//! Command-line front end: `run`, `bound` and `experiment`.
//!
//! Exit codes: 0 on success, 2 for invalid configuration or input, 3 when the
//! sampler degenerates, 1 for I/O failures.

pub mod config;
pub mod experiments;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundConstants, BoundReport};
use crate::error::{Error, Result};
use crate::models::DiscreteToyModel;
use crate::smc::{run_smc, AbcProblem, LadderMode, LadderTrace, SmcOutput};

pub use config::{ConfigError, DataConfig, ModelConfig, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "pacabc", version, about = "Exponential-kernel ABC with adaptive SMC and PAC-Bayes bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Bundled configuration: exp1, exp2, exp3, toy-discrete, toy-quadrature.
    #[arg(long)]
    pub preset: Option<String>,
    /// Patch one config key, e.g. `--override smc.n_particles=500`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ConfigArgs {
    pub fn load(&self, default_preset: Option<&str>) -> std::result::Result<RunConfig, ConfigError> {
        match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::from_path(path, &self.overrides),
            (None, Some(name)) => RunConfig::from_preset(name, &self.overrides),
            (None, None) => match default_preset {
                Some(name) => RunConfig::from_preset(name, &self.overrides),
                None => Err(ConfigError {
                    origin: "arguments".into(),
                    line: None,
                    message: "pass --config <file> or --preset <name>".into(),
                }),
            },
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the sampler once and write trace.csv, snapshots.csv and summary.json.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Master seed (defaults to the config's `seed`).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate bounds from a ladder trace and a constants file.
    Bound {
        /// trace.csv written by `run` (empirical and adaptive modes).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// TOML file with the bound constants.
        #[arg(long)]
        constants: PathBuf,
        #[arg(long, value_enum, default_value = "empirical")]
        mode: BoundMode,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment over several seeds.
    Experiment {
        #[arg(value_enum)]
        name: experiments::ExperimentName,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Comma-separated seeds or a range `a..b` (inclusive).
        #[arg(long, default_value = "1")]
        seeds: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundMode {
    Empirical,
    Adaptive,
    Cor1,
    Nonparam,
}

/// Maps a library error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DegenerateSystem(_) | Error::LadderStall { .. } => 3,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

/// Parses `1,2,5` or `1..10`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidConfig(format!("cannot parse seeds `{text}`; use 1,2,3 or 1..10"));
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct AdaptiveSummary {
    pub lambda_hat: f64,
    pub beta_hat: f64,
    pub bound: f64,
    pub boundary: bool,
    pub theta_mean: Vec<f64>,
    pub theta_sd: Vec<f64>,
    pub statistic_mean: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumeratedSummary {
    pub exact: Vec<f64>,
    pub estimate: Vec<f64>,
    pub total_variation: f64,
    pub exact_log_z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub seed: u64,
    pub n_particles: usize,
    pub steps: usize,
    pub lambda_final: f64,
    pub m_final: usize,
    pub log_z: f64,
    pub param_names: Vec<String>,
    pub theta_mean: Vec<f64>,
    pub theta_sd: Vec<f64>,
    pub observed_stats: Vec<f64>,
    pub statistic_mean: Vec<f64>,
    pub sim_calls: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adaptive: Option<AdaptiveSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerated: Option<EnumeratedSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_log_z: Option<f64>,
    pub wall_time_s: f64,
}

pub struct RunOutcome {
    pub output: SmcOutput,
    pub observations: Vec<f64>,
    pub summary: RunSummary,
}

/// Weighted frequency of each atom in a discrete-parameter system.
pub fn atom_frequencies(system: &crate::smc::ParticleSystem, atoms: usize) -> Result<Vec<f64>> {
    let w = system.normalized_weights()?;
    let mut freq = vec![0.0; atoms];
    for (p, wi) in system.particles.iter().zip(w) {
        freq[p.theta[0] as usize] += wi;
    }
    Ok(freq)
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Samples once with `config` and `seed` and assembles the run summary.
pub fn execute(config: &RunConfig, seed: u64) -> Result<RunOutcome> {
    let start = Instant::now();
    let model = config.model.build();
    let observations = config.data.observations(model.as_ref(), seed)?;
    let problem = AbcProblem::new(model.as_ref(), &config.summary, &config.distance, &observations)?;
    let output = run_smc(&config.smc, seed, &problem)?;
    let system = &output.system;
    let kernel = config.smc.kernel;
    let (theta_mean, theta_sd) = system.theta_moments()?;
    let statistic_mean = system.statistic_mean(kernel)?;

    let constants = config.bound_constants().ok();
    let empirical_bound = match (&constants, system.lambda > 0.0) {
        (Some(c), true) => Some(bounds::empirical_bound(system.log_z, system.lambda, c)?.bound),
        _ => None,
    };

    let adaptive = match (config.smc.mode, &constants) {
        (LadderMode::Adaptive, Some(c)) => {
            let knots = output.trace.log_z_knots();
            let grid = bounds::default_beta_grid(&knots, c.alpha, config.bounds.beta_grid_size);
            let sel = bounds::adaptive_select_lambda(&knots, c, Some(&grid))?;
            let snap = output
                .trace
                .nearest_snapshot(sel.lambda_hat)
                .ok_or_else(|| Error::DegenerateSystem("no snapshot stored".into()))?;
            let at_hat = snap.system.reweighted_to(sel.lambda_hat, kernel)?;
            let (m, s) = at_hat.theta_moments()?;
            Some(AdaptiveSummary {
                lambda_hat: sel.lambda_hat,
                beta_hat: sel.beta_hat,
                bound: sel.report.bound,
                boundary: sel.boundary,
                theta_mean: m,
                theta_sd: s,
                statistic_mean: at_hat.statistic_mean(kernel)?,
            })
        }
        _ => None,
    };

    let enumerated = match &config.model {
        ModelConfig::DiscreteToy(toy) => Some(enumerate_summary(toy, config, &observations, &output)?),
        _ => None,
    };
    let exact_log_z = match (&config.model, &config.summary.features, config.distance) {
        (ModelConfig::GaussianLocation(g), crate::statistics::Features::Moments { orders }, crate::statistics::DistanceSpec::Lp { .. })
            if orders == &[1] && config.summary.clamp.is_none() =>
        {
            Some(g.exact_log_z(problem.observed_stats[0], observations.len(), system.lambda))
        }
        _ => None,
    };

    let summary = RunSummary {
        name: config.name.clone(),
        seed,
        n_particles: config.smc.n_particles,
        steps: output.trace.steps.len(),
        lambda_final: system.lambda,
        m_final: system.m,
        log_z: system.log_z,
        param_names: output.trace.param_names.clone(),
        theta_mean,
        theta_sd,
        observed_stats: problem.observed_stats.clone(),
        statistic_mean,
        sim_calls: output.sim_calls,
        empirical_bound,
        adaptive,
        enumerated,
        exact_log_z,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutcome { output, observations, summary })
}

fn enumerate_summary(
    toy: &DiscreteToyModel,
    config: &RunConfig,
    observations: &[f64],
    output: &SmcOutput,
) -> Result<EnumeratedSummary> {
    let (exact_log_z, exact) =
        toy.enumerate_posterior(observations, &config.summary, &config.distance, output.system.lambda)?;
    let estimate = atom_frequencies(&output.system, toy.atom_count())?;
    Ok(EnumeratedSummary { total_variation: total_variation(&exact, &estimate), exact, estimate, exact_log_z })
}

/// Writes `trace.csv`, `snapshots.csv` and `summary.json` into `dir`.
pub fn write_run(dir: &Path, outcome: &RunOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    outcome.output.trace.write_csv(fs::File::create(dir.join("trace.csv"))?)?;
    outcome.output.trace.write_snapshots_csv(fs::File::create(dir.join("snapshots.csv"))?)?;
    let json = serde_json::to_string_pretty(&outcome.summary)?;
    fs::write(dir.join("summary.json"), json + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, Deserialize)]
struct NonparamConstants {
    n: f64,
    smoothness: f64,
    #[serde(default = "default_eps")]
    epsilon: f64,
}

fn default_eps() -> f64 {
    0.05
}

fn read_constants<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].lines().count().max(1));
        let at = line.map_or(String::new(), |l| format!(":{l}"));
        Error::InvalidConfig(format!("{}{at}: {}", path.display(), e.message()))
    })
}

fn read_trace(path: Option<&Path>) -> Result<LadderTrace> {
    let path = path.ok_or_else(|| Error::InvalidConfig("this mode needs --trace".into()))?;
    LadderTrace::read_csv(fs::File::open(path)?)
}

/// Bound reports for one `bound` invocation, as `(mode label, reports)`.
pub fn bound_reports(mode: BoundMode, trace: Option<&Path>, constants: &Path) -> Result<Vec<(String, Vec<BoundReport>)>> {
    match mode {
        BoundMode::Empirical => {
            let c: BoundConstants = read_constants(constants)?;
            c.validate()?;
            let trace = read_trace(trace)?;
            let reports = trace
                .steps
                .iter()
                .map(|s| bounds::empirical_bound(s.log_z, s.lambda, &c))
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![("empirical".into(), reports)])
        }
        BoundMode::Adaptive => {
            let c: BoundConstants = read_constants(constants)?;
            c.validate()?;
            let trace = read_trace(trace)?;
            let sel = bounds::adaptive_select_lambda(&trace.log_z_knots(), &c, None)?;
            Ok(vec![("adaptive_selected".into(), vec![sel.report]), ("adaptive_grid".into(), sel.grid)])
        }
        BoundMode::Cor1 => {
            let c: BoundConstants = read_constants(constants)?;
            c.validate()?;
            Ok(vec![("cor1".into(), vec![bounds::corollary1_terms(&c).report])])
        }
        BoundMode::Nonparam => unreachable!("nonparametric rates are not bound reports"),
    }
}

fn write_bound(mode: BoundMode, trace: Option<&Path>, constants: &Path, out: &mut dyn std::io::Write) -> Result<()> {
    if mode == BoundMode::Nonparam {
        let c: NonparamConstants = read_constants(constants)?;
        let r = bounds::nonparametric_rate(c.n, c.smoothness, c.epsilon)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["mode", "n", "smoothness", "epsilon", "rate", "lambda_n", "c_n", "confidence", "order_only"])?;
        w.write_record([
            "nonparam".to_string(),
            c.n.to_string(),
            c.smoothness.to_string(),
            c.epsilon.to_string(),
            r.rate.to_string(),
            r.lambda_n.to_string(),
            r.c_n.to_string(),
            r.confidence.to_string(),
            r.order_only.to_string(),
        ])?;
        w.flush()?;
        return Ok(());
    }
    let groups = bound_reports(mode, trace, constants)?;
    // one header for the whole file: the groups share their component names
    let all: Vec<(String, BoundReport)> = groups
        .into_iter()
        .flat_map(|(label, reps)| reps.into_iter().map(move |r| (label.clone(), r)))
        .collect();
    let mut w = csv::Writer::from_writer(out);
    let names: Vec<&str> = all.first().map_or(Vec::new(), |(_, r)| r.components.iter().map(|t| t.name).collect());
    let mut header = vec!["mode", "lambda", "beta", "bound"];
    header.extend(&names);
    w.write_record(&header)?;
    for (label, r) in &all {
        let mut row = vec![label.clone(), r.lambda.to_string(), r.beta.map_or(String::new(), |b| b.to_string()), r.bound.to_string()];
        row.extend(r.components.iter().map(|t| t.value.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs a parsed command line; returns the process exit code.
pub fn dispatch(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Run { cfg, seed, out } => match cfg.load(None) {
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
            Ok(config) => {
                let seed = seed.unwrap_or(config.seed);
                execute(&config, seed).and_then(|o| {
                    write_run(&out, &o)?;
                    eprintln!(
                        "run {}: {} steps, lambda {}, log_z {:.6}, wrote {}",
                        config.name,
                        o.summary.steps,
                        o.summary.lambda_final,
                        o.summary.log_z,
                        out.display()
                    );
                    Ok(())
                })
            }
        },
        Command::Bound { trace, constants, mode, out } => match out {
            Some(path) => fs::File::create(&path)
                .map_err(Error::from)
                .and_then(|mut f| write_bound(mode, trace.as_deref(), &constants, &mut f)),
            None => write_bound(mode, trace.as_deref(), &constants, &mut std::io::stdout()),
        },
        Command::Experiment { name, cfg, seeds, out } => {
            let config = match cfg.load(Some(name.default_preset())) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            parse_seeds(&seeds).and_then(|seeds| {
                let dir = out.join(name.label());
                experiments::run_experiment(name, &config, &seeds, &dir)?;
                eprintln!("experiment {} over {} seeds, wrote {}", name.label(), seeds.len(), dir.display());
                Ok(())
            })
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
