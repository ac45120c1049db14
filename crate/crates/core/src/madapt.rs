//! Changing the number of replicates `M` between SMC steps.
//!
//! `M` doubles whenever the move acceptance rate falls below a target. The
//! replicates of every particle are then either redrawn from their exact
//! conditional (a Gibbs step, leaving the weights alone) or replaced and
//! importance-corrected, which is known to collapse the ESS.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{log_sum_exp, normalize_log_weights};
use crate::models::sample_categorical;
use crate::rng::{stream, Purpose, StreamRng};
use crate::smc::{AbcProblem, KernelKind, Particle, ParticleSystem};

fn default_target() -> f64 {
    0.10
}
fn default_m_max() -> usize {
    128
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MPolicy {
    /// `M` never changes.
    #[default]
    Fixed,
    /// Double `M` below the target rate, refresh replicates by Gibbs.
    Gibbs {
        #[serde(default = "default_target")]
        target_accept: f64,
        #[serde(default = "default_m_max")]
        m_max: usize,
    },
    /// Double `M` below the target rate, replace replicates with an
    /// importance-sampling weight correction.
    ImportanceSampling {
        #[serde(default = "default_target")]
        target_accept: f64,
        #[serde(default = "default_m_max")]
        m_max: usize,
    },
    /// Set `M` at given steps (pairs `[step, M]`), refreshing by Gibbs.
    Schedule { changes: Vec<[usize; 2]> },
}

impl MPolicy {
    pub fn gibbs() -> Self {
        MPolicy::Gibbs { target_accept: default_target(), m_max: default_m_max() }
    }

    pub fn importance_sampling() -> Self {
        MPolicy::ImportanceSampling { target_accept: default_target(), m_max: default_m_max() }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MPolicy::Fixed => Ok(()),
            MPolicy::Gibbs { target_accept, m_max } | MPolicy::ImportanceSampling { target_accept, m_max } => {
                if !(*target_accept > 0.0 && *target_accept < 1.0) {
                    return Err(Error::InvalidConfig(format!("target_accept must lie in (0,1), got {target_accept}")));
                }
                if *m_max == 0 {
                    return Err(Error::InvalidConfig("m_max must be at least 1".into()));
                }
                Ok(())
            }
            MPolicy::Schedule { changes } => {
                if changes.iter().any(|c| c[1] == 0) {
                    return Err(Error::InvalidConfig("scheduled M must be at least 1".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MAdaptation {
    pub m: usize,
    /// The rate was below target but `M` was already at `m_max`.
    pub saturated: bool,
}

/// Doubling rule: `min(2M, M_max)` when `rate < target`, otherwise `M`.
pub fn adapt_m(rate: f64, m: usize, target: f64, m_max: usize) -> MAdaptation {
    if rate < target {
        if m >= m_max {
            MAdaptation { m, saturated: true }
        } else {
            MAdaptation { m: (2 * m).min(m_max), saturated: false }
        }
    } else {
        MAdaptation { m, saturated: false }
    }
}

/// Gibbs refresh to `m_new` replicates: keep one current replicate chosen with
/// probability `∝ K_λ(d_k)` and simulate the other `m_new − 1` afresh.
pub fn gibbs_refresh(
    particle: &Particle,
    m_new: usize,
    lambda: f64,
    kernel: KernelKind,
    problem: &AbcProblem<'_>,
    rng: &mut StreamRng,
) -> Particle {
    let terms: Vec<f64> = particle.dists.iter().map(|&d| kernel.log_term(d, lambda)).collect();
    let keep = match normalize_log_weights(&terms) {
        Some(p) => sample_categorical(&p, rng),
        None => rng.random_range(0..particle.dists.len()),
    };
    let mut stats = Vec::with_capacity(m_new);
    let mut dists = Vec::with_capacity(m_new);
    stats.push(particle.stats[keep].clone());
    dists.push(particle.dists[keep]);
    for _ in 1..m_new {
        let (s, d) = problem.replicate(&particle.theta, rng);
        stats.push(s);
        dists.push(d);
    }
    Particle { theta: particle.theta.clone(), stats, dists, log_weight: particle.log_weight }
}

/// Log importance weight for replacing `M` old replicates by `M̃` fresh ones:
/// `log{ M Σ_{M̃} K_λ(d̃) / (M̃ Σ_M K_λ(d)) }`.
pub fn is_refresh_weight(old_dists: &[f64], fresh_dists: &[f64], lambda: f64, kernel: KernelKind) -> f64 {
    let old = kernel.log_sum(old_dists, lambda);
    let fresh = kernel.log_sum(fresh_dists, lambda);
    if fresh == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if old == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    (old_dists.len() as f64).ln() + fresh - (fresh_dists.len() as f64).ln() - old
}

/// Applies the policy after step `step`'s move. Returns the new `M`.
pub fn apply_policy(
    policy: &MPolicy,
    system: &mut ParticleSystem,
    problem: &AbcProblem<'_>,
    kernel: KernelKind,
    accept_rate: f64,
    step: usize,
    seed: u64,
) -> Result<usize> {
    let m = system.m;
    let lambda = system.lambda;
    let gibbs_to = |system: &mut ParticleSystem, m_new: usize| {
        system.particles.par_iter_mut().enumerate().for_each(|(i, p)| {
            let mut rng = stream(seed, Purpose::Refresh, step as u64, i as u64);
            *p = gibbs_refresh(p, m_new, lambda, kernel, problem, &mut rng);
        });
        system.m = m_new;
    };
    match policy {
        MPolicy::Fixed => Ok(m),
        MPolicy::Gibbs { target_accept, m_max } => {
            let a = adapt_m(accept_rate, m, *target_accept, *m_max);
            if a.m != m {
                gibbs_to(system, a.m);
            }
            Ok(a.m)
        }
        MPolicy::Schedule { changes } => {
            match changes.iter().find(|c| c[0] == step) {
                Some(c) if c[1] != m => {
                    gibbs_to(system, c[1]);
                    Ok(c[1])
                }
                _ => Ok(m),
            }
        }
        MPolicy::ImportanceSampling { target_accept, m_max } => {
            let a = adapt_m(accept_rate, m, *target_accept, *m_max);
            if a.m == m {
                return Ok(m);
            }
            system.normalize()?;
            let weights: Vec<f64> = system
                .particles
                .par_iter_mut()
                .enumerate()
                .map(|(i, p)| {
                    let mut rng = stream(seed, Purpose::Refresh, step as u64, i as u64);
                    let (stats, dists) = problem.replicates(&p.theta, a.m, &mut rng);
                    let w = is_refresh_weight(&p.dists, &dists, lambda, kernel);
                    let prior = p.log_weight;
                    p.stats = stats;
                    p.dists = dists;
                    p.log_weight += w;
                    prior + w
                })
                .collect();
            let inc = log_sum_exp(&weights);
            if inc == f64::NEG_INFINITY {
                return Err(Error::DegenerateSystem("every importance weight vanished after changing M".into()));
            }
            system.log_z += inc;
            system.m = a.m;
            system.normalize()?;
            Ok(a.m)
        }
    }
}
