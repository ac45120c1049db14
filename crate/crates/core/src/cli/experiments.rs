//! Multi-seed studies. Each seed writes its own directory
//! `<out>/seed_<s>/<run>/`; aggregate CSVs are merged afterwards in seed order.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use super::{execute, RunOutcome};
use crate::cli::config::{DataConfig, ModelConfig, RunConfig};
use crate::error::{Error, Result};
use crate::madapt::MPolicy;
use crate::models::TruthGenerator;
use crate::rng::{stream, Purpose};
use crate::smc::{KernelKind, LadderMode};
use crate::statistics::SummarySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Exp1,
    Exp2,
    Exp3,
    ToyDiscrete,
    ToyQuadrature,
}

impl ExperimentName {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentName::Exp1 => "exp1",
            ExperimentName::Exp2 => "exp2",
            ExperimentName::Exp3 => "exp3",
            ExperimentName::ToyDiscrete => "toy-discrete",
            ExperimentName::ToyQuadrature => "toy-quadrature",
        }
    }

    /// Preset used when neither `--config` nor `--preset` is given.
    pub fn default_preset(self) -> &'static str {
        self.label()
    }
}

/// Exponential kernel, `M = 1` throughout.
pub fn vanilla(config: &RunConfig) -> RunConfig {
    let mut c = config.clone();
    c.smc.kernel = KernelKind::Exponential;
    c.smc.m_policy = MPolicy::Fixed;
    c.smc.m_initial = 1;
    c
}

/// Uniform-kernel baseline stopped by a simulator-call budget.
pub fn uniform_baseline(config: &RunConfig, budget: u64) -> RunConfig {
    let mut c = vanilla(config);
    c.smc.kernel = KernelKind::Uniform;
    c.smc.mode = LadderMode::Fixed;
    c.smc.lambda_target = config.experiment.uniform_lambda_max;
    c.smc.lambda_max = None;
    c.smc.sim_budget = Some(budget);
    c
}

/// Same sampler with a different `M` policy.
pub fn with_policy(config: &RunConfig, policy: MPolicy) -> RunConfig {
    let mut c = config.clone();
    c.smc.m_policy = policy;
    c
}

fn truth_of(config: &RunConfig) -> Result<&TruthGenerator> {
    match &config.data {
        DataConfig::Truth { truth } => Ok(truth),
        _ => Err(Error::InvalidConfig("data.source must be `truth` for this experiment".into())),
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `trace.csv` and `summary.json` for one run inside a seed directory.
fn save(dir: &Path, label: &str, outcome: &RunOutcome) -> Result<()> {
    let d = dir.join(label);
    fs::create_dir_all(&d)?;
    outcome.output.trace.write_csv(fs::File::create(d.join("trace.csv"))?)?;
    fs::write(d.join("summary.json"), serde_json::to_string_pretty(&outcome.summary)? + "\n")?;
    Ok(())
}

/// `execute` with the run label and seed attached to degeneracy messages.
fn run_labeled(config: &RunConfig, seed: u64, label: &str) -> Result<RunOutcome> {
    execute(config, seed).map_err(|e| match e {
        Error::DegenerateSystem(msg) => Error::DegenerateSystem(format!("{label} run, seed {seed}: {msg}")),
        other => other,
    })
}

fn seed_dir(out: &Path, seed: u64) -> std::path::PathBuf {
    out.join(format!("seed_{seed}"))
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

// ---------------------------------------------------------------- exp1

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRow {
    pub seed: u64,
    pub estimator: String,
    pub parameter: String,
    pub estimate: f64,
    pub reference: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceRow {
    pub seed: u64,
    pub policy: String,
    pub step: usize,
    pub lambda: f64,
    pub accept_rate: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub ess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureRow {
    pub seed: u64,
    pub run: String,
    pub error: String,
}

#[derive(Debug, Clone, Default)]
pub struct Exp1Seed {
    pub errors: Vec<ErrorRow>,
    pub acceptance: Vec<AcceptanceRow>,
    pub failures: Vec<FailureRow>,
}

fn acceptance_rows(seed: u64, policy: &str, outcome: &RunOutcome) -> Vec<AcceptanceRow> {
    outcome
        .output
        .trace
        .steps
        .iter()
        .map(|s| AcceptanceRow {
            seed,
            policy: policy.into(),
            step: s.step,
            lambda: s.lambda,
            accept_rate: s.accept_rate,
            m: s.m,
            ess: s.ess,
        })
        .collect()
}

/// Kernel comparison and `M`-policy acceptance curves for one seed.
pub fn exp1_seed(config: &RunConfig, seed: u64, out: Option<&Path>) -> Result<Exp1Seed> {
    let mut res = Exp1Seed::default();
    let expo = run_labeled(&vanilla(config), seed, "exponential")?;
    let unif = run_labeled(&uniform_baseline(config, expo.output.sim_calls), seed, "uniform")?;
    let mut rcfg = vanilla(config);
    rcfg.smc.n_particles *= config.experiment.reference_factor;
    let reference = run_labeled(&rcfg, seed, "reference")?;
    let gibbs_policy = match &config.smc.m_policy {
        p @ MPolicy::Gibbs { .. } => p.clone(),
        _ => MPolicy::gibbs(),
    };
    let gibbs = run_labeled(&with_policy(config, gibbs_policy), seed, "gibbs")?;
    let is = run_labeled(&with_policy(config, MPolicy::importance_sampling()), seed, "importance_sampling");

    for (name, run) in [("exponential", &expo), ("uniform", &unif)] {
        for (j, p) in reference.summary.param_names.iter().enumerate() {
            let (e, r) = (run.summary.theta_mean[j], reference.summary.theta_mean[j]);
            res.errors.push(ErrorRow {
                seed,
                estimator: name.into(),
                parameter: p.clone(),
                estimate: e,
                reference: r,
                error: e - r,
            });
        }
    }
    res.acceptance.extend(acceptance_rows(seed, "fixed", &expo));
    res.acceptance.extend(acceptance_rows(seed, "gibbs", &gibbs));
    match &is {
        Ok(o) => res.acceptance.extend(acceptance_rows(seed, "importance_sampling", o)),
        Err(e) => res.failures.push(FailureRow { seed, run: "importance_sampling".into(), error: e.to_string() }),
    }

    if let Some(out) = out {
        let dir = seed_dir(out, seed);
        save(&dir, "exponential", &expo)?;
        save(&dir, "uniform", &unif)?;
        save(&dir, "reference", &reference)?;
        save(&dir, "gibbs", &gibbs)?;
        if let Ok(o) = &is {
            save(&dir, "importance_sampling", o)?;
        }
    }
    Ok(res)
}

pub fn exp1(config: &RunConfig, seeds: &[u64], out: &Path) -> Result<Vec<Exp1Seed>> {
    let per: Vec<Exp1Seed> = seeds.par_iter().map(|&s| exp1_seed(config, s, Some(out))).collect::<Result<_>>()?;
    let errors: Vec<_> = per.iter().flat_map(|p| p.errors.clone()).collect();
    let acc: Vec<_> = per.iter().flat_map(|p| p.acceptance.clone()).collect();
    let fail: Vec<_> = per.iter().flat_map(|p| p.failures.clone()).collect();
    write_rows(&out.join("errors.csv"), &errors)?;
    write_rows(&out.join("acceptance.csv"), &acc)?;
    write_failures(&out.join("failures.csv"), &fail)?;
    Ok(per)
}

fn write_failures(path: &Path, rows: &[FailureRow]) -> Result<()> {
    if rows.is_empty() {
        fs::write(path, "seed,run,error\n")?;
        Ok(())
    } else {
        write_rows(path, rows)
    }
}

// ---------------------------------------------------------------- exp2

#[derive(Debug, Clone, Serialize)]
pub struct MseRow {
    pub n: usize,
    pub seed: u64,
    pub estimator: String,
    pub lambda: f64,
    pub sim_calls: u64,
    pub mse: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MseSummaryRow {
    pub n: usize,
    pub estimator: String,
    pub median_mse: f64,
    pub max_mse: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub seed: u64,
    pub lambda: f64,
    pub log_z: f64,
    pub bound: f64,
    pub neg_log_z_over_lambda: f64,
    pub concentration: f64,
    pub confidence: f64,
    pub selected: bool,
}

pub fn mse(estimate: &[f64], target: &[f64]) -> f64 {
    estimate.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / target.len() as f64
}

/// Fixed-λ, adaptive-λ and uniform-kernel estimates of the statistic means at
/// one `(n, seed)`, all at the fixed run's simulator budget.
pub fn exp2_cell(config: &RunConfig, n: usize, seed: u64, out: Option<&Path>) -> Result<(Vec<MseRow>, Vec<BoundRow>)> {
    let mut cfg = config.clone();
    cfg.data.set_n(n)?;
    let target = truth_of(&cfg)?.expected_features(&cfg.summary);

    let mut fixed_cfg = cfg.clone();
    fixed_cfg.smc.mode = LadderMode::Fixed;
    let fixed = run_labeled(&fixed_cfg, seed, "fixed")?;
    let budget = fixed.output.sim_calls;

    let mut ad_cfg = cfg.clone();
    ad_cfg.smc.mode = LadderMode::Adaptive;
    if ad_cfg.smc.lambda_max.is_none() {
        ad_cfg.smc.lambda_max = Some(4.0 * cfg.smc.lambda_target);
    }
    ad_cfg.smc.sim_budget = Some(budget);
    let adaptive = run_labeled(&ad_cfg, seed, "adaptive")?;
    let sel = adaptive
        .summary
        .adaptive
        .clone()
        .ok_or_else(|| Error::InvalidConfig("bound constants unavailable for the adaptive run".into()))?;

    let unif = run_labeled(&uniform_baseline(&cfg, budget), seed, "uniform")?;

    let rows = vec![
        MseRow {
            n,
            seed,
            estimator: "fixed".into(),
            lambda: fixed.summary.lambda_final,
            sim_calls: fixed.output.sim_calls,
            mse: mse(&fixed.summary.statistic_mean, &target),
        },
        MseRow {
            n,
            seed,
            estimator: "adaptive".into(),
            lambda: sel.lambda_hat,
            sim_calls: adaptive.output.sim_calls,
            mse: mse(&sel.statistic_mean, &target),
        },
        MseRow {
            n,
            seed,
            estimator: "uniform".into(),
            lambda: unif.summary.lambda_final,
            sim_calls: unif.output.sim_calls,
            mse: mse(&unif.summary.statistic_mean, &target),
        },
    ];

    let c = cfg.bound_constants()?;
    let mut bounds_rows = Vec::new();
    for s in &adaptive.output.trace.steps {
        let r = crate::bounds::empirical_bound(s.log_z, s.lambda, &c)?;
        bounds_rows.push(BoundRow {
            n,
            seed,
            lambda: s.lambda,
            log_z: s.log_z,
            bound: r.bound,
            neg_log_z_over_lambda: r.components[0].value,
            concentration: r.components[1].value,
            confidence: r.components[2].value,
            selected: false,
        });
    }
    let log_z_hat = crate::bounds::interpolate_log_z(&adaptive.output.trace.log_z_knots(), sel.lambda_hat)?;
    let r = crate::bounds::empirical_bound(log_z_hat, sel.lambda_hat, &c)?;
    bounds_rows.push(BoundRow {
        n,
        seed,
        lambda: sel.lambda_hat,
        log_z: log_z_hat,
        bound: r.bound,
        neg_log_z_over_lambda: r.components[0].value,
        concentration: r.components[1].value,
        confidence: r.components[2].value,
        selected: true,
    });

    if let Some(out) = out {
        let dir = seed_dir(out, seed).join(format!("n_{n}"));
        save(&dir, "fixed", &fixed)?;
        save(&dir, "adaptive", &adaptive)?;
        save(&dir, "uniform", &unif)?;
    }
    Ok((rows, bounds_rows))
}

pub fn summarize_mse(rows: &[MseRow]) -> Vec<MseSummaryRow> {
    let mut keys: Vec<(usize, String)> = Vec::new();
    for r in rows {
        let k = (r.n, r.estimator.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| estimator_rank(&a.1).cmp(&estimator_rank(&b.1))));
    keys.into_iter()
        .map(|(n, est)| {
            let v: Vec<f64> = rows.iter().filter(|r| r.n == n && r.estimator == est).map(|r| r.mse).collect();
            MseSummaryRow { n, median_mse: median(&v), max_mse: v.iter().copied().fold(f64::NEG_INFINITY, f64::max), estimator: est }
        })
        .collect()
}

fn estimator_rank(name: &str) -> usize {
    ["fixed", "adaptive", "uniform"].iter().position(|e| *e == name).unwrap_or(usize::MAX)
}

pub fn exp2(config: &RunConfig, seeds: &[u64], out: &Path) -> Result<Vec<MseSummaryRow>> {
    let cells: Vec<(usize, u64)> =
        config.experiment.n_grid.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(n, s)| exp2_cell(config, n, s, Some(out)))
        .collect::<Result<_>>()?;
    let mse_rows: Vec<MseRow> = results.iter().flat_map(|r| r.0.clone()).collect();
    let bound_rows: Vec<BoundRow> = results.iter().flat_map(|r| r.1.clone()).collect();
    let summary = summarize_mse(&mse_rows);
    write_rows(&out.join("mse.csv"), &mse_rows)?;
    write_rows(&out.join("mse_summary.csv"), &summary)?;
    write_rows(&out.join("bound_vs_lambda.csv"), &bound_rows)?;
    Ok(summary)
}

// ---------------------------------------------------------------- exp3

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub seed: u64,
    pub estimator: String,
    pub threshold: f64,
    pub estimate: f64,
    pub truth: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxErrorRow {
    pub seed: u64,
    pub abc: f64,
    pub uniform: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityRow {
    pub seed: u64,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub abc: f64,
    pub uniform: f64,
    pub truth: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Exp3Seed {
    pub thresholds: Vec<ThresholdRow>,
    pub max_error: Option<MaxErrorRow>,
    pub density: Vec<DensityRow>,
}

/// Posterior-predictive histogram: one dataset per particle, density per unit
/// length over `[lo, hi]` (draws outside the range are dropped).
pub fn predictive_histogram(config: &RunConfig, outcome: &RunOutcome, seed: u64) -> Result<Vec<f64>> {
    let [lo, hi] = config.experiment.histogram_range;
    let bins = config.experiment.histogram_bins;
    let width = (hi - lo) / bins as f64;
    let model = config.model.build();
    let n = config.data.n();
    let w = outcome.output.system.normalized_weights()?;
    let mut hist = vec![0.0; bins];
    let mut total = 0.0;
    for (i, (p, wi)) in outcome.output.system.particles.iter().zip(&w).enumerate() {
        let mut rng = stream(seed, Purpose::Predictive, 0, i as u64);
        for x in model.simulate(&p.theta, n, &mut rng) {
            total += wi;
            if (lo..=hi).contains(&x) {
                let b = (((x - lo) / width) as usize).min(bins - 1);
                hist[b] += wi;
            }
        }
    }
    Ok(hist.into_iter().map(|h| h / (total * width)).collect())
}

/// Truth density averaged over each histogram bin.
pub fn truth_histogram(config: &RunConfig) -> Result<Vec<f64>> {
    let truth = truth_of(config)?;
    let [lo, hi] = config.experiment.histogram_range;
    let bins = config.experiment.histogram_bins;
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
    let cdf = truth.expected_features(&SummarySpec::indicator_grid(edges));
    Ok((0..bins)
        .map(|k| {
            let upper = if k + 1 == bins { 1.0 } else { cdf[k + 1] };
            (upper - cdf[k]) / width
        })
        .collect())
}

pub fn exp3_seed(config: &RunConfig, seed: u64, out: Option<&Path>) -> Result<Exp3Seed> {
    let truth = truth_of(config)?.expected_features(&config.summary);
    let thresholds = match &config.summary.features {
        crate::statistics::Features::IndicatorGrid { thresholds } => thresholds.clone(),
        _ => return Err(Error::InvalidConfig("exp3 needs summary.features.kind = \"indicator_grid\"".into())),
    };
    let abc = run_labeled(config, seed, "abc")?;
    let unif = run_labeled(&uniform_baseline(config, abc.output.sim_calls), seed, "uniform")?;
    let mut res = Exp3Seed::default();
    let mut max_err = [0.0f64; 2];
    for (k, (name, run)) in [("abc", &abc), ("uniform", &unif)].into_iter().enumerate() {
        for ((t, e), p) in thresholds.iter().zip(&run.summary.statistic_mean).zip(&truth) {
            max_err[k] = max_err[k].max((e - p).abs());
            res.thresholds.push(ThresholdRow { seed, estimator: name.into(), threshold: *t, estimate: *e, truth: *p, error: e - p });
        }
    }
    res.max_error = Some(MaxErrorRow { seed, abc: max_err[0], uniform: max_err[1] });

    let h_abc = predictive_histogram(config, &abc, seed)?;
    let h_unif = predictive_histogram(config, &unif, seed)?;
    let h_truth = truth_histogram(config)?;
    let [lo, hi] = config.experiment.histogram_range;
    let width = (hi - lo) / config.experiment.histogram_bins as f64;
    for k in 0..config.experiment.histogram_bins {
        res.density.push(DensityRow {
            seed,
            bin_lo: lo + width * k as f64,
            bin_hi: lo + width * (k + 1) as f64,
            abc: h_abc[k],
            uniform: h_unif[k],
            truth: h_truth[k],
        });
    }
    if let Some(out) = out {
        let dir = seed_dir(out, seed);
        save(&dir, "abc", &abc)?;
        save(&dir, "uniform", &unif)?;
    }
    Ok(res)
}

pub fn exp3(config: &RunConfig, seeds: &[u64], out: &Path) -> Result<Vec<Exp3Seed>> {
    let per: Vec<Exp3Seed> = seeds.par_iter().map(|&s| exp3_seed(config, s, Some(out))).collect::<Result<_>>()?;
    let th: Vec<_> = per.iter().flat_map(|p| p.thresholds.clone()).collect();
    let mx: Vec<_> = per.iter().filter_map(|p| p.max_error.clone()).collect();
    let de: Vec<_> = per.iter().flat_map(|p| p.density.clone()).collect();
    write_rows(&out.join("threshold_errors.csv"), &th)?;
    write_rows(&out.join("max_error.csv"), &mx)?;
    write_rows(&out.join("predictive_density.csv"), &de)?;
    Ok(per)
}

// ---------------------------------------------------------------- toys

#[derive(Debug, Clone, Serialize)]
pub struct DiscreteRow {
    pub seed: u64,
    pub lambda: f64,
    pub log_z: f64,
    pub exact_log_z: f64,
    pub total_variation: f64,
}

pub fn toy_discrete(config: &RunConfig, seeds: &[u64], out: &Path) -> Result<Vec<DiscreteRow>> {
    if !matches!(config.model, ModelConfig::DiscreteToy(_)) {
        return Err(Error::InvalidConfig("toy-discrete needs model.kind = \"discrete_toy\"".into()));
    }
    let rows: Vec<DiscreteRow> = seeds
        .par_iter()
        .map(|&seed| {
            let o = execute(config, seed)?;
            save(&seed_dir(out, seed), "run", &o)?;
            let e = o.summary.enumerated.as_ref().expect("discrete toy summary");
            Ok(DiscreteRow {
                seed,
                lambda: o.summary.lambda_final,
                log_z: o.summary.log_z,
                exact_log_z: e.exact_log_z,
                total_variation: e.total_variation,
            })
        })
        .collect::<Result<_>>()?;
    write_rows(&out.join("toy_discrete.csv"), &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureRow {
    pub seed: u64,
    pub lambda: f64,
    pub log_z: f64,
    pub exact_log_z: f64,
    pub statistic_mean: f64,
    pub exact_statistic_mean: f64,
    pub truth_statistic: f64,
    pub distance: f64,
    pub empirical_bound: f64,
    pub exact_bound: f64,
    pub covered: bool,
}

/// Estimated and closed-form `log Z`, and whether the empirical bound with the
/// exact `log Z` covers `|ρ(S) − ℙ(S)|`.
pub fn toy_quadrature_seed(config: &RunConfig, seed: u64) -> Result<(QuadratureRow, RunOutcome)> {
    let (g, theta0) = match (&config.model, &config.data) {
        (ModelConfig::GaussianLocation(g), DataConfig::Model { theta, .. }) => (g.clone(), theta[0]),
        _ => {
            return Err(Error::InvalidConfig(
                "toy-quadrature needs model.kind = \"gaussian_location\" and data.source = \"model\"".into(),
            ))
        }
    };
    let o = execute(config, seed)?;
    let n = o.observations.len();
    let s_obs = o.summary.observed_stats[0];
    let lambda = o.summary.lambda_final;
    let exact_log_z = g.exact_log_z(s_obs, n, lambda);
    let exact_mean = g.exact_statistic_mean(s_obs, n, lambda);
    let c = config.bound_constants()?;
    let exact_bound = crate::bounds::empirical_bound(exact_log_z, lambda, &c)?.bound;
    let distance = (exact_mean - theta0).abs();
    let row = QuadratureRow {
        seed,
        lambda,
        log_z: o.summary.log_z,
        exact_log_z,
        statistic_mean: o.summary.statistic_mean[0],
        exact_statistic_mean: exact_mean,
        truth_statistic: theta0,
        distance,
        empirical_bound: o.summary.empirical_bound.unwrap_or(f64::NAN),
        exact_bound,
        covered: distance <= exact_bound,
    };
    Ok((row, o))
}

pub fn toy_quadrature(config: &RunConfig, seeds: &[u64], out: &Path) -> Result<Vec<QuadratureRow>> {
    let rows: Vec<QuadratureRow> = seeds
        .par_iter()
        .map(|&seed| {
            let (row, o) = toy_quadrature_seed(config, seed)?;
            save(&seed_dir(out, seed), "run", &o)?;
            Ok(row)
        })
        .collect::<Result<_>>()?;
    write_rows(&out.join("toy_quadrature.csv"), &rows)?;
    Ok(rows)
}

pub fn run_experiment(name: ExperimentName, config: &RunConfig, seeds: &[u64], out: &Path) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one seed is required".into()));
    }
    fs::create_dir_all(out)?;
    match name {
        ExperimentName::Exp1 => exp1(config, seeds, out).map(|_| ()),
        ExperimentName::Exp2 => exp2(config, seeds, out).map(|_| ()),
        ExperimentName::Exp3 => exp3(config, seeds, out).map(|_| ()),
        ExperimentName::ToyDiscrete => toy_discrete(config, seeds, out).map(|_| ()),
        ExperimentName::ToyQuadrature => toy_quadrature(config, seeds, out).map(|_| ()),
    }
}
