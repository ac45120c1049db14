//! Adaptive SMC sampler for the exponential-kernel ABC pseudo-posterior.
//!
//! Each particle carries `M` simulated replicates and targets
//!
//! ```text
//! π_λ^M(θ, X^{1:M}) ∝ (1/M) Σ_k e^{−λ d(S(X^k), S(Y))} Π_k π_θ(X^k) π(θ)
//! ```
//!
//! whose θ-marginal is the pseudo-posterior `ρ_λ`. The temperature ladder
//! `0 = λ_0 < λ_1 < …` is chosen by bisection so the ESS after reweighting
//! hits `τN`; every step then resamples (systematic), moves the particles with
//! the pseudo-marginal kernel from [`crate::mcmc`] and finally lets
//! [`crate::madapt`] change `M`.

use std::io::{Read, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::madapt::{self, MPolicy};
use crate::math::{log_sum_exp, log_sum_exp_iter, normalize_log_weights, weighted_moments};
use crate::mcmc::{self, Proposal};
use crate::models::{GenerativeModel, ParamSpace};
use crate::rng::{stream, Purpose, StreamRng};
use crate::statistics::{DistanceSpec, SummarySpec};

/// ABC kernel applied to the statistic distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `e^{−λd}`.
    #[default]
    Exponential,
    /// `1{d ≤ 1/λ}`: the accept/reject kernel with tolerance `ε = 1/λ`.
    Uniform,
}

impl KernelKind {
    #[inline]
    pub fn log_term(self, dist: f64, lambda: f64) -> f64 {
        match self {
            KernelKind::Exponential => -lambda * dist,
            KernelKind::Uniform => {
                if lambda == 0.0 || dist * lambda <= 1.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// `log Σ_k K_λ(d_k)`.
    pub fn log_sum(self, dists: &[f64], lambda: f64) -> f64 {
        log_sum_exp_iter(dists.iter().map(|&d| self.log_term(d, lambda)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub theta: Vec<f64>,
    /// One statistic vector per replicate.
    pub stats: Vec<Vec<f64>>,
    /// `dists[k] = d(stats[k], observed)`.
    pub dists: Vec<f64>,
    pub log_weight: f64,
}

impl Particle {
    pub fn replicates(&self) -> usize {
        self.dists.len()
    }
}

/// Observed statistics plus everything needed to simulate replicates.
pub struct AbcProblem<'a> {
    pub model: &'a dyn GenerativeModel,
    pub summary: &'a SummarySpec,
    pub distance: &'a DistanceSpec,
    pub observed_stats: Vec<f64>,
    pub n_obs: usize,
    sim_calls: AtomicU64,
}

impl<'a> AbcProblem<'a> {
    pub fn new(
        model: &'a dyn GenerativeModel,
        summary: &'a SummarySpec,
        distance: &'a DistanceSpec,
        observations: &[f64],
    ) -> Result<Self> {
        summary.validate()?;
        distance.validate()?;
        let observed_stats = summary.summarize(observations)?;
        Ok(Self {
            model,
            summary,
            distance,
            observed_stats,
            n_obs: observations.len(),
            sim_calls: AtomicU64::new(0),
        })
    }

    /// Simulates one dataset at `θ` and returns its statistic and distance.
    pub fn replicate(&self, theta: &[f64], rng: &mut StreamRng) -> (Vec<f64>, f64) {
        self.sim_calls.fetch_add(1, Ordering::Relaxed);
        let data = self.model.simulate(theta, self.n_obs, rng);
        let stats = self.summary.summarize(&data).expect("n_obs >= 1");
        let dist = self
            .distance
            .distance(&stats, &self.observed_stats)
            .expect("statistic dimension is fixed");
        (stats, dist)
    }

    pub fn replicates(&self, theta: &[f64], m: usize, rng: &mut StreamRng) -> (Vec<Vec<f64>>, Vec<f64>) {
        (0..m).map(|_| self.replicate(theta, rng)).unzip()
    }

    /// Number of simulated datasets so far.
    pub fn sim_calls(&self) -> u64 {
        self.sim_calls.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    pub particles: Vec<Particle>,
    pub lambda: f64,
    pub m: usize,
    /// Running estimate of `log Z_{λ,π}`.
    pub log_z: f64,
    pub observed_stats: Vec<f64>,
}

impl ParticleSystem {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn log_weights(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.log_weight).collect()
    }

    pub fn normalized_weights(&self) -> Result<Vec<f64>> {
        normalize_log_weights(&self.log_weights())
            .ok_or_else(|| Error::DegenerateSystem("all particle weights are zero".into()))
    }

    /// Rescales log-weights so the weights sum to one.
    pub fn normalize(&mut self) -> Result<()> {
        let lse = log_sum_exp(&self.log_weights());
        if !lse.is_finite() {
            return Err(Error::DegenerateSystem("all particle weights are zero".into()));
        }
        self.particles.iter_mut().for_each(|p| p.log_weight -= lse);
        Ok(())
    }

    pub fn ess(&self) -> Result<f64> {
        ess(&self.log_weights())
    }

    /// Weighted mean and sd of each parameter coordinate.
    pub fn theta_moments(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let w = self.normalized_weights()?;
        let pts: Vec<&[f64]> = self.particles.iter().map(|p| p.theta.as_slice()).collect();
        Ok(weighted_moments(&pts, &w))
    }

    /// Estimate of `ρ_{λ,X}(S)`: particle weights times the within-particle
    /// kernel weights of each replicate.
    pub fn statistic_mean(&self, kernel: KernelKind) -> Result<Vec<f64>> {
        let w = self.normalized_weights()?;
        let dim = self.observed_stats.len();
        let mut out = vec![0.0; dim];
        for (p, wi) in self.particles.iter().zip(&w) {
            if *wi == 0.0 {
                continue;
            }
            let terms: Vec<f64> = p.dists.iter().map(|&d| kernel.log_term(d, self.lambda)).collect();
            let Some(inner) = normalize_log_weights(&terms) else { continue };
            for (s, wk) in p.stats.iter().zip(&inner) {
                for (o, v) in out.iter_mut().zip(s) {
                    *o += wi * wk * v;
                }
            }
        }
        Ok(out)
    }

    /// Copy holding only `θ` and weights (replicates dropped).
    pub fn theta_only(&self) -> ParticleSystem {
        ParticleSystem {
            particles: self
                .particles
                .iter()
                .map(|p| Particle { theta: p.theta.clone(), stats: Vec::new(), dists: Vec::new(), log_weight: p.log_weight })
                .collect(),
            lambda: self.lambda,
            m: self.m,
            log_z: self.log_z,
            observed_stats: self.observed_stats.clone(),
        }
    }

    /// Importance-reweights the system to a different temperature.
    pub fn reweighted_to(&self, lambda: f64, kernel: KernelKind) -> Result<ParticleSystem> {
        let mut out = self.clone();
        for p in &mut out.particles {
            p.log_weight += incremental_log_weight_with(kernel, &p.dists, lambda, self.lambda);
        }
        out.log_z = update_log_z_with(self, kernel, lambda)?;
        out.lambda = lambda;
        out.normalize()?;
        Ok(out)
    }
}

/// Effective sample size `(Σw)² / Σw²`, computed after subtracting the max
/// log-weight.
pub fn ess(log_weights: &[f64]) -> Result<f64> {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::DegenerateSystem("every log-weight is -inf".into()));
    }
    let (s1, s2) = log_weights.iter().fold((0.0, 0.0), |(a, b), lw| {
        let w = (lw - max).exp();
        (a + w, b + w * w)
    });
    Ok(s1 * s1 / s2)
}

/// `log Σ_k e^{−λ_new d_k} − log Σ_k e^{−λ_old d_k}` for one particle.
pub fn incremental_log_weight(particle: &Particle, lambda_new: f64, lambda_old: f64) -> f64 {
    incremental_log_weight_with(KernelKind::Exponential, &particle.dists, lambda_new, lambda_old)
}

/// Kernel-generic incremental weight; a particle already at zero weight stays there.
pub fn incremental_log_weight_with(kernel: KernelKind, dists: &[f64], lambda_new: f64, lambda_old: f64) -> f64 {
    if lambda_new == lambda_old {
        return 0.0;
    }
    let old = kernel.log_sum(dists, lambda_old);
    if old == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    kernel.log_sum(dists, lambda_new) - old
}

/// `log Ẑ_{λ_new} = log Ẑ_{λ_cur} + log Σ_i W_i e^{Δ_i}` with the current
/// normalized weights `W_i` and incremental weights `Δ_i`.
pub fn update_log_z(system: &ParticleSystem, lambda_new: f64) -> Result<f64> {
    update_log_z_with(system, KernelKind::Exponential, lambda_new)
}

pub fn update_log_z_with(system: &ParticleSystem, kernel: KernelKind, lambda_new: f64) -> Result<f64> {
    if lambda_new == system.lambda {
        return Ok(system.log_z);
    }
    let lse_w = log_sum_exp(&system.log_weights());
    if !lse_w.is_finite() {
        return Err(Error::DegenerateSystem("all particle weights are zero".into()));
    }
    let inc = log_sum_exp_iter(system.particles.iter().map(|p| {
        p.log_weight - lse_w + incremental_log_weight_with(kernel, &p.dists, lambda_new, system.lambda)
    }));
    Ok(system.log_z + inc)
}

/// Settings for [`find_next_lambda`].
#[derive(Debug, Clone, Copy)]
pub struct BisectionSettings {
    pub tau: f64,
    /// Upper end of the admissible range.
    pub lambda_max: f64,
    /// Accepted `|ESS − τN|`, as a fraction of `N`.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial upper bracket (from [`predict_next_lambda`]).
    pub bracket_hint: Option<f64>,
}

impl BisectionSettings {
    pub fn new(tau: f64, lambda_max: f64) -> Self {
        Self { tau, lambda_max, tol: 1e-4, max_iter: 100, bracket_hint: None }
    }
}

/// Next inverse temperature: the `λ` whose reweighted ESS equals `τN`, or
/// `lambda_max` when even that keeps the ESS above `τN`.
pub fn find_next_lambda(system: &ParticleSystem, kernel: KernelKind, settings: &BisectionSettings) -> Result<f64> {
    let n = system.len() as f64;
    let target = settings.tau * n;
    let lambda_cur = system.lambda;
    let base: Vec<f64> = system.log_weights();
    let old_sums: Vec<f64> = system.particles.iter().map(|p| kernel.log_sum(&p.dists, lambda_cur)).collect();
    let ess_at = |lambda: f64| -> Result<f64> {
        let lw: Vec<f64> = system
            .particles
            .iter()
            .zip(base.iter().zip(&old_sums))
            .map(|(p, (w, old))| {
                if *old == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    w + kernel.log_sum(&p.dists, lambda) - old
                }
            })
            .collect();
        // every particle dead at this trial point counts as ESS 0
        Ok(ess(&lw).unwrap_or(0.0))
    };

    let ess_cur = ess(&base)?;
    if ess_cur < target {
        return Err(Error::LadderStall { lambda: lambda_cur, ess: ess_cur, target });
    }
    let cap = settings.lambda_max;
    if cap <= lambda_cur {
        return Err(Error::OutOfRange(format!("lambda_max {cap} does not exceed the current lambda {lambda_cur}")));
    }
    if ess_at(cap)? >= target {
        return Ok(cap);
    }

    let mut lo = lambda_cur;
    let mut hi = match settings.bracket_hint {
        Some(h) if h > lo && h < cap => h,
        _ => cap,
    };
    while hi < cap && ess_at(hi)? >= target {
        lo = hi;
        hi = (2.0 * hi).min(cap);
    }
    let tol = settings.tol * n;
    for _ in 0..settings.max_iter {
        let mid = 0.5 * (lo + hi);
        let e = ess_at(mid)?;
        if (e - target).abs() <= tol {
            return Ok(mid);
        }
        if e >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // ESS(λ) can jump (uniform kernel); keep the side that still makes progress
    if lo > lambda_cur {
        return Ok(lo);
    }
    let e = ess_at(hi)?;
    if e > 0.0 {
        Ok(hi)
    } else {
        // every live particle sits on the window edge: no admissible step
        Err(Error::LadderStall { lambda: lambda_cur, ess: 0.0, target })
    }
}

/// One-step-ahead prediction of the ladder from a least-squares fit of
/// `log λ_t` on `t`. Falls back to `2 λ_last` with fewer than two positive
/// points or a degenerate fit.
pub fn predict_next_lambda(history: &[(usize, f64)]) -> Option<f64> {
    let &(t_last, lambda_last) = history.last()?;
    let pts: Vec<(f64, f64)> = history
        .iter()
        .filter(|(_, l)| *l > 0.0)
        .map(|&(t, l)| (t as f64, l.ln()))
        .collect();
    let fallback = Some(2.0 * lambda_last);
    if pts.len() < 2 {
        return fallback;
    }
    let k = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let ml = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx == 0.0 {
        return fallback;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
    let slope = sxy / sxx;
    let pred = (ml + slope * (t_last as f64 + 1.0 - mt)).exp();
    if pred.is_finite() && pred > 0.0 {
        Some(pred)
    } else {
        fallback
    }
}

/// Systematic resampling: one uniform `u ∈ [0,1)` shared by the positions
/// `(u + k)/N`. Returns zero-based ancestor indices.
pub fn systematic_resample(weights: &[f64], u: f64) -> Vec<usize> {
    let n = weights.len();
    let nf = n as f64;
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    let mut cum = weights.first().copied().unwrap_or(0.0) * nf;
    for k in 0..n {
        let pos = u + k as f64;
        while cum <= pos && j + 1 < n {
            j += 1;
            cum += weights[j] * nf;
        }
        out.push(j);
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderMode {
    /// Stop exactly at `lambda_target`.
    #[default]
    Fixed,
    /// Run on to `lambda_max`, keeping snapshots for post-hoc selection.
    Adaptive,
}

fn default_tau() -> f64 {
    0.9
}
fn default_mcmc_steps() -> usize {
    3
}
fn default_one() -> usize {
    1
}
fn default_tol() -> f64 {
    1e-4
}
fn default_max_iter() -> usize {
    100
}
fn default_snapshot_limit() -> usize {
    200
}
fn default_max_steps() -> usize {
    5000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmcConfig {
    pub n_particles: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
    pub lambda_target: f64,
    #[serde(default)]
    pub mode: LadderMode,
    /// Defaults to `10 · lambda_target`; required in adaptive mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(default = "default_mcmc_steps")]
    pub mcmc_steps: usize,
    /// Random-walk scale; defaults to `2.38² / d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rw_scale: Option<f64>,
    #[serde(default)]
    pub kernel: KernelKind,
    #[serde(default = "default_one")]
    pub m_initial: usize,
    #[serde(default)]
    pub m_policy: MPolicy,
    #[serde(default = "default_tol")]
    pub bisection_tol: f64,
    #[serde(default = "default_max_iter")]
    pub bisection_max_iter: usize,
    #[serde(default = "default_snapshot_limit")]
    pub snapshot_limit: usize,
    /// Simulator-call budget: the ladder stops before a step whose MCMC moves
    /// would take the total past it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim_budget: Option<u64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

impl SmcConfig {
    pub fn new(n_particles: usize, lambda_target: f64) -> Self {
        Self {
            n_particles,
            tau: default_tau(),
            lambda_target,
            mode: LadderMode::Fixed,
            lambda_max: None,
            mcmc_steps: default_mcmc_steps(),
            rw_scale: None,
            kernel: KernelKind::Exponential,
            m_initial: 1,
            m_policy: MPolicy::Fixed,
            bisection_tol: default_tol(),
            bisection_max_iter: default_max_iter(),
            snapshot_limit: default_snapshot_limit(),
            sim_budget: None,
            max_steps: default_max_steps(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_particles < 2 {
            return bad(format!("n_particles must be at least 2, got {}", self.n_particles));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad(format!("tau must lie in (0,1), got {}", self.tau));
        }
        if !(self.lambda_target >= 0.0 && self.lambda_target.is_finite()) {
            return bad(format!("lambda_target must be finite and non-negative, got {}", self.lambda_target));
        }
        if self.mode == LadderMode::Adaptive && !self.lambda_max.is_some_and(|l| l > 0.0 && l.is_finite()) {
            return bad("adaptive mode needs a positive lambda_max".into());
        }
        if let Some(l) = self.lambda_max {
            if !(l > 0.0) {
                return bad(format!("lambda_max must be positive, got {l}"));
            }
        }
        if self.m_initial == 0 {
            return bad("m_initial must be at least 1".into());
        }
        if self.rw_scale.is_some_and(|s| !(s > 0.0)) {
            return bad("rw_scale must be positive".into());
        }
        if !(self.bisection_tol > 0.0) || self.bisection_max_iter == 0 {
            return bad("bisection tolerance and iteration cap must be positive".into());
        }
        if self.snapshot_limit < 2 {
            return bad("snapshot_limit must be at least 2".into());
        }
        self.m_policy.validate()
    }

    /// Where the ladder stops.
    pub fn ladder_cap(&self) -> f64 {
        match self.mode {
            LadderMode::Fixed => self.lambda_target,
            LadderMode::Adaptive => self.lambda_max.unwrap_or(10.0 * self.lambda_target),
        }
    }
}

/// One rung of the temperature ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub step: usize,
    pub lambda: f64,
    /// ESS after reweighting to `lambda`, before resampling.
    pub ess: f64,
    pub accept_rate: f64,
    /// Set when the acceptance rate is a convention (no MH steps ran).
    pub accept_flagged: bool,
    /// Replicates per particle during this step's move.
    pub m: usize,
    pub log_z: f64,
    pub theta_mean: Vec<f64>,
    pub theta_sd: Vec<f64>,
    /// The ESS bisection could not be satisfied and a forced step was taken.
    pub forced: bool,
}

/// Weighted particle system right after reweighting at a ladder step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub system: ParticleSystem,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LadderTrace {
    pub param_names: Vec<String>,
    pub steps: Vec<LadderStep>,
    pub snapshots: Vec<Snapshot>,
}

impl LadderTrace {
    /// `(λ_t, log Ẑ_t)` knots, starting at `(0, 0)`.
    pub fn log_z_knots(&self) -> Vec<(f64, f64)> {
        std::iter::once((0.0, 0.0))
            .chain(self.steps.iter().map(|s| (s.lambda, s.log_z)))
            .collect()
    }

    /// Snapshot whose λ is closest to `lambda`.
    pub fn nearest_snapshot(&self, lambda: f64) -> Option<&Snapshot> {
        self.snapshots.iter().min_by(|a, b| {
            (a.system.lambda - lambda)
                .abs()
                .total_cmp(&(b.system.lambda - lambda).abs())
        })
    }

    fn push_snapshot(&mut self, snap: Snapshot, limit: usize) {
        self.snapshots.push(snap);
        if self.snapshots.len() > limit {
            let last = self.snapshots.len() - 1;
            let old = std::mem::take(&mut self.snapshots);
            self.snapshots = old
                .into_iter()
                .enumerate()
                .filter(|(i, _)| i % 2 == 0 || *i == last)
                .map(|(_, s)| s)
                .collect();
        }
    }

    /// `step, lambda, ess, accept_rate, M, log_z, theta_mean_1..d, theta_sd_1..d`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let d = self.param_names.len();
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = ["step", "lambda", "ess", "accept_rate", "M", "log_z"].map(String::from).to_vec();
        header.extend((1..=d).map(|i| format!("theta_mean_{i}")));
        header.extend((1..=d).map(|i| format!("theta_sd_{i}")));
        w.write_record(&header)?;
        for s in &self.steps {
            let mut row = vec![
                s.step.to_string(),
                s.lambda.to_string(),
                s.ess.to_string(),
                s.accept_rate.to_string(),
                s.m.to_string(),
                s.log_z.to_string(),
            ];
            row.extend(s.theta_mean.iter().map(f64::to_string));
            row.extend(s.theta_sd.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a trace written by [`LadderTrace::write_csv`] (snapshots are not
    /// part of the file).
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        let d = header.iter().filter(|h| h.starts_with("theta_mean_")).count();
        if header.len() != 6 + 2 * d || header.get(1) != Some("lambda") || header.get(5) != Some("log_z") {
            return Err(Error::InvalidInput("trace csv header does not match the ladder schema".into()));
        }
        let num = |rec: &csv::StringRecord, i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidInput(format!("bad numeric field {i} in trace row")))
        };
        let mut steps = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            steps.push(LadderStep {
                step: num(&rec, 0)? as usize,
                lambda: num(&rec, 1)?,
                ess: num(&rec, 2)?,
                accept_rate: num(&rec, 3)?,
                accept_flagged: false,
                m: num(&rec, 4)? as usize,
                log_z: num(&rec, 5)?,
                theta_mean: (0..d).map(|i| num(&rec, 6 + i)).collect::<Result<_>>()?,
                theta_sd: (0..d).map(|i| num(&rec, 6 + d + i)).collect::<Result<_>>()?,
                forced: false,
            });
        }
        Ok(Self { param_names: (1..=d).map(|i| format!("theta_{i}")).collect(), steps, snapshots: Vec::new() })
    }

    /// `step, particle, weight, theta_1..d`.
    pub fn write_snapshots_csv<W: Write>(&self, out: W) -> Result<()> {
        let d = self.param_names.len();
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = ["step", "particle", "weight"].map(String::from).to_vec();
        header.extend((1..=d).map(|i| format!("theta_{i}")));
        w.write_record(&header)?;
        for snap in &self.snapshots {
            let weights = snap.system.normalized_weights()?;
            for (i, (p, wt)) in snap.system.particles.iter().zip(weights).enumerate() {
                let mut row = vec![snap.step.to_string(), i.to_string(), wt.to_string()];
                row.extend(p.theta.iter().map(f64::to_string));
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SmcOutput {
    /// Particles after the last move (equal weights).
    pub system: ParticleSystem,
    pub trace: LadderTrace,
    pub sim_calls: u64,
}

/// Runs the sampler without a per-step hook.
pub fn run_smc(config: &SmcConfig, seed: u64, problem: &AbcProblem<'_>) -> Result<SmcOutput> {
    run_smc_with_hook(config, seed, problem, &mut |_, _| {})
}

/// Runs the sampler, calling `hook` after every completed ladder step.
pub fn run_smc_with_hook(
    config: &SmcConfig,
    seed: u64,
    problem: &AbcProblem<'_>,
    hook: &mut dyn FnMut(&LadderStep, &ParticleSystem),
) -> Result<SmcOutput> {
    config.validate()?;
    let model = problem.model;
    let n = config.n_particles;
    let kernel = config.kernel;
    let mut m = config.m_initial;

    let particles: Vec<Particle> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::Init, 0, i as u64);
            let theta = model.sample_prior(&mut rng);
            let (stats, dists) = problem.replicates(&theta, m, &mut rng);
            Particle { theta, stats, dists, log_weight: -(n as f64).ln() }
        })
        .collect();
    let mut system = ParticleSystem {
        particles,
        lambda: 0.0,
        m,
        log_z: 0.0,
        observed_stats: problem.observed_stats.clone(),
    };
    let mut trace = LadderTrace { param_names: model.param_names(), ..LadderTrace::default() };

    let cap = config.ladder_cap();
    if cap <= 0.0 {
        return Ok(SmcOutput { system, trace, sim_calls: problem.sim_calls() });
    }
    let rw_scale = config.rw_scale.unwrap_or(2.38 * 2.38 / model.param_dim() as f64);
    let mut history: Vec<(usize, f64)> = Vec::new();

    for t in 1..=config.max_steps {
        // a. next temperature
        let mut settings = BisectionSettings {
            tau: config.tau,
            lambda_max: cap,
            tol: config.bisection_tol,
            max_iter: config.bisection_max_iter,
            bracket_hint: None,
        };
        if m > 1 && history.len() >= 2 {
            settings.bracket_hint = predict_next_lambda(&history).map(|p| 4.0 * p);
        }
        let (lambda_next, forced) = match find_next_lambda(&system, kernel, &settings) {
            Ok(l) => (l, false),
            Err(Error::LadderStall { .. }) if matches!(config.m_policy, MPolicy::ImportanceSampling { .. }) => {
                // weights left unbalanced by the IS change of M: take the previous increment
                let prev = history.iter().rev().nth(1).map_or(0.0, |h| h.1);
                let step = (system.lambda - prev).max(f64::MIN_POSITIVE);
                ((system.lambda + step).min(cap), true)
            }
            // a collapsed uniform-kernel population cannot shrink its window further
            Err(Error::LadderStall { .. }) if kernel == KernelKind::Uniform && t > 1 => break,
            Err(e) => return Err(e),
        };

        // reweight, log Ẑ, ESS
        system.normalize()?;
        let log_z = update_log_z_with(&system, kernel, lambda_next)?;
        for p in &mut system.particles {
            p.log_weight += incremental_log_weight_with(kernel, &p.dists, lambda_next, system.lambda);
        }
        system.lambda = lambda_next;
        system.log_z = log_z;
        system.normalize()?;
        let ess_now = system.ess()?;
        let (theta_mean, theta_sd) = system.theta_moments()?;
        history.push((t, lambda_next));

        // proposal calibrated on the weighted population
        let proposal = match model.param_space() {
            ParamSpace::Atoms(k) => Proposal::UniformAtoms(k),
            ParamSpace::Continuous => {
                let w = system.normalized_weights()?;
                let thetas: Vec<&[f64]> = system.particles.iter().map(|p| p.theta.as_slice()).collect();
                Proposal::RandomWalk(mcmc::calibrate_default(&thetas, &w, rw_scale))
            }
        };
        // only adaptive runs reweight snapshots later, so fixed runs keep θ and weights
        let snap = match config.mode {
            LadderMode::Adaptive => system.clone(),
            LadderMode::Fixed => system.theta_only(),
        };
        trace.push_snapshot(Snapshot { step: t, system: snap }, config.snapshot_limit);

        // b. resample
        let weights = system.normalized_weights()?;
        let u: f64 = stream(seed, Purpose::Resample, t as u64, 0).random();
        let ancestors = systematic_resample(&weights, u);
        let log_n = -(n as f64).ln();
        system.particles = ancestors
            .iter()
            .map(|&a| {
                let mut p = system.particles[a].clone();
                p.log_weight = log_n;
                p
            })
            .collect();

        // c. move
        let report = mcmc::rejuvenate(&mut system, problem, kernel, &proposal, config.mcmc_steps, seed, t as u64);
        let m_used = m;

        // e. change of M
        let new_m = madapt::apply_policy(&config.m_policy, &mut system, problem, kernel, report.accept_rate, t, seed)?;
        m = new_m;
        system.m = m;

        let step = LadderStep {
            step: t,
            lambda: lambda_next,
            ess: ess_now,
            accept_rate: report.accept_rate,
            accept_flagged: report.flagged,
            m: m_used,
            log_z: system.log_z,
            theta_mean,
            theta_sd,
            forced,
        };
        hook(&step, &system);
        trace.steps.push(step);

        if lambda_next >= cap {
            break;
        }
        // stop before a step whose moves would overrun the budget
        let refresh = if config.m_policy == MPolicy::Fixed { 0 } else { 2 * m };
        let next_cost = (n * (m * config.mcmc_steps.max(1) + refresh)) as u64;
        if config.sim_budget.is_some_and(|b| problem.sim_calls() + next_cost > b) {
            break;
        }
    }
    Ok(SmcOutput { system, trace, sim_calls: problem.sim_calls() })
}
