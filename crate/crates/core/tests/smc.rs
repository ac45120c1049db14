mod common;

use common::*;
use pacabc::madapt::MPolicy;
use pacabc::models::{DiscreteToyModel, MixtureModel, TruthGenerator};
use pacabc::rng::{stream, Purpose};
use pacabc::smc::{
    ess, find_next_lambda, incremental_log_weight, predict_next_lambda, run_smc, systematic_resample, update_log_z,
    AbcProblem, BisectionSettings, KernelKind, LadderMode, LadderTrace, Particle, ParticleSystem, SmcConfig,
};
use pacabc::statistics::{DistanceSpec, SummarySpec};
use proptest::prelude::*;
use rand::Rng;

fn particle(dists: Vec<f64>, log_weight: f64) -> Particle {
    Particle { theta: vec![0.0], stats: vec![vec![0.0]; dists.len()], dists, log_weight }
}

fn toy_atoms(system: &ParticleSystem, k: usize) -> Vec<f64> {
    let w = system.normalized_weights().unwrap();
    let mut f = vec![0.0; k];
    for (p, wi) in system.particles.iter().zip(w) {
        f[p.theta[0] as usize] += wi;
    }
    f
}

proptest! {
    #[test]
    fn weight_updates_compose(
        dists in prop::collection::vec(0.0..20.0f64, 1..6),
        l0 in 0.0..5.0f64, a in 0.0..5.0f64, b in 0.0..5.0f64,
    ) {
        let p = particle(dists, 0.0);
        let (l1, l2) = (l0 + a, l0 + a + b);
        let two = incremental_log_weight(&p, l1, l0) + incremental_log_weight(&p, l2, l1);
        let one = incremental_log_weight(&p, l2, l0);
        prop_assert!((two - one).abs() <= 1e-10);
    }

    #[test]
    fn ess_lies_between_one_and_n(lw in prop::collection::vec(-30.0..30.0f64, 1..100)) {
        let e = ess(&lw).unwrap();
        prop_assert!(e >= 1.0 - 1e-9 && e <= lw.len() as f64 + 1e-9);
        let raw: Vec<f64> = lw.iter().map(|l| l.exp()).collect();
        prop_assert!((e - naive_ess(&raw)).abs() <= 1e-9 * e);
    }

    #[test]
    fn predictions_of_noisy_geometric_ladders_stay_ahead(
        growth in 1.1..3.0f64, noise in prop::collection::vec(-0.1..0.1f64, 3..12),
    ) {
        let hist: Vec<(usize, f64)> = noise
            .iter()
            .enumerate()
            .scan(0.01, |l, (t, e)| { *l *= growth * (1.0 + e); Some((t + 1, *l)) })
            .collect();
        let last = hist.last().unwrap().1;
        let pred = predict_next_lambda(&hist).unwrap();
        prop_assert!(pred >= last, "{pred} < {last}");
    }

    #[test]
    fn systematic_counts_match_the_cumulative_definition(
        raw in prop::collection::vec(0.0..1.0f64, 1..40), u in 0.0..1.0f64,
    ) {
        let s: f64 = raw.iter().sum();
        prop_assume!(s > 0.0);
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let idx = systematic_resample(&w, u);
        prop_assert_eq!(idx.len(), w.len());
        prop_assert!(idx.windows(2).all(|p| p[0] <= p[1]));
        let mut counts = vec![0usize; w.len()];
        idx.iter().for_each(|&i| counts[i] += 1);
        let naive = naive_systematic_counts(&w, u);
        // boundary ties may shift one copy between neighbours
        let diff: usize = counts.iter().zip(&naive).map(|(a, b)| a.abs_diff(*b)).sum();
        prop_assert!(diff <= 2, "{counts:?} vs {naive:?}");
    }
}

#[test]
fn log_sum_exp_survives_extreme_inputs() {
    for &d in &[0.0, 1.0, 1e3, 1e6] {
        for &l in &[0.0, 1.0, 1e3, 1e6] {
            let p = particle(vec![d, 2.0 * d, 1e6], 0.0);
            let w = incremental_log_weight(&p, l, 0.0);
            assert!(!w.is_nan() && w <= 0.0, "d={d} l={l}: {w}");
        }
    }
    let sys = ParticleSystem {
        particles: vec![particle(vec![1e6], 0.0), particle(vec![1e6 + 1.0], 0.0)],
        lambda: 0.0,
        m: 1,
        log_z: 0.0,
        observed_stats: vec![0.0],
    };
    let lz = update_log_z(&sys, 1e6).unwrap();
    assert!(lz.is_finite() && lz < -1e11);
}

#[test]
fn bisection_lands_on_target_ess() {
    let mut rng = rng(21);
    for _ in 0..50 {
        let n = rng.random_range(5..100);
        let particles: Vec<Particle> =
            (0..n).map(|_| particle(vec![rng.random_range(0.0..3.0), rng.random_range(0.0..3.0)], 0.0)).collect();
        let sys = ParticleSystem { particles, lambda: 0.5, m: 2, log_z: 0.0, observed_stats: vec![0.0] };
        let tau = rng.random_range(0.2..0.95);
        let cap = 200.0;
        let l = find_next_lambda(&sys, KernelKind::Exponential, &BisectionSettings::new(tau, cap)).unwrap();
        let d: Vec<Vec<f64>> = sys.particles.iter().map(|p| p.dists.clone()).collect();
        let e = naive_tilted_ess(&vec![1.0; n], &d, 0.5, l);
        assert!(l == cap || (e - tau * n as f64).abs() <= 1e-4 * n as f64, "ess {e} target {}", tau * n as f64);
    }
}

fn toy_problem_parts() -> (DiscreteToyModel, SummarySpec, DistanceSpec, Vec<f64>) {
    (DiscreteToyModel::default(), SummarySpec::identity(), DistanceSpec::euclidean(), vec![0.0, 2.0, 2.0])
}

#[test]
fn toy_normalizing_constant_within_one_percent() {
    let (toy, summary, distance, obs) = toy_problem_parts();
    let problem = AbcProblem::new(&toy, &summary, &distance, &obs).unwrap();
    let out = run_smc(&SmcConfig::new(100_000, 5.0), 31, &problem).unwrap();
    let (z, post) = discrete_posterior(&toy.prior_weights, &toy.obs_values, &toy.obs_probs, &obs, 5.0);
    let rel = (out.system.log_z.exp() - z).abs() / z;
    assert!(rel < 0.01, "relative error {rel}");
    assert!(total_variation(&toy_atoms(&out.system, 5), &post) < 0.01);
}

#[test]
fn theta_marginal_does_not_depend_on_m() {
    let (toy, summary, distance, obs) = toy_problem_parts();
    let problem = AbcProblem::new(&toy, &summary, &distance, &obs).unwrap();
    let mut one = SmcConfig::new(100_000, 3.0);
    one.m_policy = MPolicy::Fixed;
    let mut eight = one.clone();
    eight.m_initial = 8;
    let a = run_smc(&one, 5, &problem).unwrap();
    let b = run_smc(&eight, 6, &problem).unwrap();
    assert_eq!(b.system.m, 8);
    let tv = total_variation(&toy_atoms(&a.system, 5), &toy_atoms(&b.system, 5));
    assert!(tv < 0.02, "tv {tv}");
}

#[test]
fn zero_target_returns_the_prior_sample() {
    let (toy, summary, distance, obs) = toy_problem_parts();
    let problem = AbcProblem::new(&toy, &summary, &distance, &obs).unwrap();
    let out = run_smc(&SmcConfig::new(500, 0.0), 1, &problem).unwrap();
    assert_eq!(out.system.log_z, 0.0);
    assert_eq!(out.system.lambda, 0.0);
    assert!(out.trace.steps.is_empty());
    assert_eq!(out.system.len(), 500);
}

fn mixture_setup() -> (MixtureModel, SummarySpec, DistanceSpec, Vec<f64>) {
    let truth = TruthGenerator::two_component(0.8, 0.0, 0.6, 1.2, 0.3, 90);
    let obs = truth.generate(&mut stream(2, Purpose::Observations, 0, 0)).unwrap();
    (MixtureModel::default(), SummarySpec::moments_and_tails(), DistanceSpec::euclidean(), obs)
}

#[test]
fn ladder_is_monotone_and_pins_ess() {
    let (model, summary, distance, obs) = mixture_setup();
    let problem = AbcProblem::new(&model, &summary, &distance, &obs).unwrap();
    let mut cfg = SmcConfig::new(400, 30.0);
    cfg.m_policy = MPolicy::gibbs();
    let out = run_smc(&cfg, 3, &problem).unwrap();
    let steps = &out.trace.steps;
    assert!(steps.windows(2).all(|w| w[1].lambda > w[0].lambda));
    assert_eq!(steps.last().unwrap().lambda, 30.0);
    for s in &steps[..steps.len() - 1] {
        assert!((s.ess - 0.9 * 400.0).abs() <= 1e-4 * 400.0, "step {}: {}", s.step, s.ess);
    }
    assert!(out.system.theta_moments().unwrap().0.iter().all(|m| m.is_finite()));
    for p in &out.system.particles {
        assert_eq!(p.dists.len(), out.system.m);
        for (s, d) in p.stats.iter().zip(&p.dists) {
            assert_eq!(*d, distance.distance(s, &problem.observed_stats).unwrap());
        }
    }
}

#[test]
fn reruns_are_bit_identical() {
    let (model, summary, distance, obs) = mixture_setup();
    let problem = AbcProblem::new(&model, &summary, &distance, &obs).unwrap();
    let mut cfg = SmcConfig::new(300, 10.0);
    cfg.mode = LadderMode::Adaptive;
    cfg.lambda_max = Some(10.0);
    let a = run_smc(&cfg, 12, &problem).unwrap();
    let b = run_smc(&cfg, 12, &problem).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.system, b.system);
    let mut buf_a = Vec::new();
    let mut buf_b = Vec::new();
    a.trace.write_csv(&mut buf_a).unwrap();
    b.trace.write_csv(&mut buf_b).unwrap();
    assert_eq!(buf_a, buf_b);
    let back = LadderTrace::read_csv(buf_a.as_slice()).unwrap();
    assert_eq!(back.steps.len(), a.trace.steps.len());
}

#[test]
fn snapshots_are_thinned_but_keep_the_last_step() {
    let (model, summary, distance, obs) = mixture_setup();
    let problem = AbcProblem::new(&model, &summary, &distance, &obs).unwrap();
    let mut cfg = SmcConfig::new(200, 60.0);
    cfg.snapshot_limit = 8;
    let out = run_smc(&cfg, 4, &problem).unwrap();
    assert!(out.trace.snapshots.len() <= 8);
    assert_eq!(out.trace.snapshots.last().unwrap().step, out.trace.steps.len());
}

#[test]
fn budget_stops_the_ladder_early() {
    let (model, summary, distance, obs) = mixture_setup();
    let problem = AbcProblem::new(&model, &summary, &distance, &obs).unwrap();
    let mut cfg = SmcConfig::new(200, 60.0);
    cfg.sim_budget = Some(5_000);
    let out = run_smc(&cfg, 4, &problem).unwrap();
    assert!(out.sim_calls <= 5_000, "{}", out.sim_calls);
    assert!(out.system.lambda < 60.0);
}
