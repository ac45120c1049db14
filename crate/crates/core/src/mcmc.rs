//! Pseudo-marginal random-walk Metropolis–Hastings move for SMC particles.
//!
//! A move proposes `θ' = θ + L z` (`L Lᵀ = scale · Σ̂`), simulates `M` fresh
//! replicates at `θ'` and accepts with probability
//! `min(1, Σ_k K_λ(d'_k) π(θ') / Σ_k K_λ(d_k) π(θ))`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::models::GenerativeModel;
use crate::rng::{stream, Purpose, StreamRng};
use crate::smc::{AbcProblem, KernelKind, Particle, ParticleSystem};

/// Random-walk covariance estimated from a weighted particle population.
#[derive(Debug, Clone)]
pub struct ProposalCalibration {
    /// Weighted covariance `Σ̂` (before scaling).
    pub covariance: DMatrix<f64>,
    pub scale: f64,
    /// Diagonal jitter added before factorizing.
    pub ridge: f64,
    /// Lower Cholesky factor of `scale · (Σ̂ + ridge · I)`.
    pub cholesky: DMatrix<f64>,
    /// Set when `Σ̂` was unusable and `ridge · I` was used alone.
    pub fallback: bool,
}

/// Weighted covariance of the particles, factorized for proposals. The ridge is
/// multiplied by 10 until the Cholesky factorization succeeds; a population
/// with a single distinct θ falls back to `ridge_floor · I`.
pub fn calibrate(thetas: &[&[f64]], weights: &[f64], scale: f64, ridge_floor: f64) -> ProposalCalibration {
    let d = thetas.first().map_or(0, |t| t.len());
    let total: f64 = weights.iter().sum();
    let mut mean = DVector::zeros(d);
    for (t, w) in thetas.iter().zip(weights) {
        mean += DVector::from_column_slice(t) * (*w / total);
    }
    let mut cov = DMatrix::zeros(d, d);
    for (t, w) in thetas.iter().zip(weights) {
        let c = DVector::from_column_slice(t) - &mean;
        cov += &c * c.transpose() * (*w / total);
    }
    let distinct = thetas.windows(2).any(|p| p[0] != p[1]);
    let ridge_floor = ridge_floor.max(f64::MIN_POSITIVE);
    if !distinct || !cov.iter().all(|v| v.is_finite()) {
        let ident = DMatrix::identity(d, d);
        return ProposalCalibration {
            cholesky: ident.clone() * (scale * ridge_floor).sqrt(),
            covariance: cov,
            scale,
            ridge: ridge_floor,
            fallback: true,
        };
    }
    let mut ridge = 0.0;
    loop {
        let m = (&cov + DMatrix::identity(d, d) * ridge) * scale;
        if let Some(ch) = m.cholesky() {
            return ProposalCalibration { covariance: cov, scale, ridge, cholesky: ch.l(), fallback: false };
        }
        ridge = if ridge == 0.0 { ridge_floor } else { ridge * 10.0 };
        if !ridge.is_finite() {
            let ident = DMatrix::identity(d, d);
            return ProposalCalibration {
                cholesky: ident.clone() * (scale * ridge_floor).sqrt(),
                covariance: cov,
                scale,
                ridge: ridge_floor,
                fallback: true,
            };
        }
    }
}

/// [`calibrate`] with ridge floor `max(1e−8 · tr(Σ̂)/d, 1e−12)`.
pub fn calibrate_default(thetas: &[&[f64]], weights: &[f64], scale: f64) -> ProposalCalibration {
    let probe = calibrate(thetas, weights, scale, 1e-12);
    let d = probe.covariance.nrows().max(1) as f64;
    let floor = (1e-8 * probe.covariance.trace() / d).max(1e-12);
    if probe.fallback || probe.ridge > 0.0 {
        calibrate(thetas, weights, scale, floor)
    } else {
        probe
    }
}

#[derive(Debug, Clone)]
pub enum Proposal {
    RandomWalk(ProposalCalibration),
    /// Uniform over the atoms of a finite parameter space; symmetric.
    UniformAtoms(usize),
}

impl Proposal {
    pub fn propose(&self, theta: &[f64], rng: &mut StreamRng) -> Vec<f64> {
        match self {
            Proposal::RandomWalk(cal) => {
                let z = DVector::from_fn(theta.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
                let step = &cal.cholesky * z;
                theta.iter().zip(step.iter()).map(|(a, b)| a + b).collect()
            }
            Proposal::UniformAtoms(k) => vec![rng.random_range(0..*k) as f64],
        }
    }
}

/// Log MH ratio for the pseudo-marginal move; `−∞` when the proposal has
/// zero prior or zero kernel mass.
pub fn log_acceptance_ratio(
    current: &Particle,
    proposal_theta: &[f64],
    proposal_dists: &[f64],
    lambda: f64,
    kernel: KernelKind,
    model: &dyn GenerativeModel,
) -> f64 {
    let lp_new = model.log_prior(proposal_theta);
    if lp_new == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let num = kernel.log_sum(proposal_dists, lambda);
    if num == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let den = kernel.log_sum(&current.dists, lambda) + model.log_prior(&current.theta);
    if den == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    num + lp_new - den
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveReport {
    pub accept_rate: f64,
    /// No MH step ran; `accept_rate` is the convention 1.
    pub flagged: bool,
}

/// `k_steps` MH moves per particle at the system's `λ` and `M`.
pub fn move_particle(
    particle: &mut Particle,
    problem: &AbcProblem<'_>,
    kernel: KernelKind,
    lambda: f64,
    proposal: &Proposal,
    k_steps: usize,
    rng: &mut StreamRng,
) -> usize {
    let m = particle.replicates();
    let mut accepted = 0;
    for _ in 0..k_steps {
        let theta_new = proposal.propose(&particle.theta, rng);
        if problem.model.log_prior(&theta_new) == f64::NEG_INFINITY {
            continue;
        }
        let (stats, dists) = problem.replicates(&theta_new, m, rng);
        let ell = log_acceptance_ratio(particle, &theta_new, &dists, lambda, kernel, problem.model);
        let u: f64 = rng.random();
        if u.ln() < ell {
            particle.theta = theta_new;
            particle.stats = stats;
            particle.dists = dists;
            accepted += 1;
        }
    }
    accepted
}

/// Moves every particle; returns the overall acceptance rate.
pub fn rejuvenate(
    system: &mut ParticleSystem,
    problem: &AbcProblem<'_>,
    kernel: KernelKind,
    proposal: &Proposal,
    k_steps: usize,
    seed: u64,
    step: u64,
) -> MoveReport {
    if k_steps == 0 || system.is_empty() {
        return MoveReport { accept_rate: 1.0, flagged: true };
    }
    let lambda = system.lambda;
    let accepted: usize = system
        .particles
        .par_iter_mut()
        .enumerate()
        .map(|(i, p)| {
            let mut rng = stream(seed, Purpose::Mutate, step, i as u64);
            move_particle(p, problem, kernel, lambda, proposal, k_steps, &mut rng)
        })
        .sum();
    MoveReport { accept_rate: accepted as f64 / (k_steps * system.len()) as f64, flagged: false }
}
