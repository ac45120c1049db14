mod common;

use common::*;
use pacabc::madapt::{adapt_m, gibbs_refresh, is_refresh_weight, MAdaptation, MPolicy};
use pacabc::models::DiscreteToyModel;
use pacabc::rng::{stream, Purpose};
use pacabc::smc::{AbcProblem, KernelKind, Particle};
use pacabc::statistics::{DistanceSpec, SummarySpec};
use rand::Rng;

fn toy() -> (DiscreteToyModel, SummarySpec, DistanceSpec, Vec<f64>) {
    (DiscreteToyModel::default(), SummarySpec::identity(), DistanceSpec::euclidean(), vec![0.0, 2.0, 2.0])
}

fn retention(lambda: f64, draws: usize) -> Vec<f64> {
    let (model, summary, distance, obs) = toy();
    let problem = AbcProblem::new(&model, &summary, &distance, &obs).unwrap();
    let p = Particle {
        theta: vec![1.0],
        stats: vec![vec![0.0; 3], vec![1.0; 3], vec![2.0; 3]],
        dists: vec![0.0, 1.0, 2.0],
        log_weight: -0.7,
    };
    let mut rng = stream(17, Purpose::Refresh, 0, 0);
    let mut freq = vec![0.0; 3];
    for _ in 0..draws {
        let q = gibbs_refresh(&p, 1, lambda, KernelKind::Exponential, &problem, &mut rng);
        assert_eq!(q.log_weight, p.log_weight);
        assert_eq!(q.theta, p.theta);
        let k = q.dists[0] as usize;
        assert_eq!(q.stats[0], p.stats[k]);
        freq[k] += 1.0 / draws as f64;
    }
    freq
}

#[test]
fn gibbs_keeps_replicates_in_proportion_to_the_kernel() {
    let draws = 100_000;
    let freq = retention(1.0, draws);
    let raw = [1.0, (-1.0f64).exp(), (-2.0f64).exp()];
    let s: f64 = raw.iter().sum();
    for (f, r) in freq.iter().zip(raw) {
        let p = r / s;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((f - p).abs() < 4.0 * se, "{f} vs {p}");
    }
    for f in retention(0.0, draws) {
        assert!((f - 1.0 / 3.0).abs() < 4.0 * (2.0 / 9.0 / draws as f64).sqrt(), "{f}");
    }
}

#[test]
fn gibbs_grows_the_replicate_set() {
    let (model, summary, distance, obs) = toy();
    let problem = AbcProblem::new(&model, &summary, &distance, &obs).unwrap();
    let mut rng = stream(3, Purpose::Refresh, 0, 0);
    let (stats, dists) = problem.replicates(&[2.0], 2, &mut rng);
    let p = Particle { theta: vec![2.0], stats, dists, log_weight: 0.0 };
    let before = problem.sim_calls();
    let q = gibbs_refresh(&p, 8, 2.0, KernelKind::Exponential, &problem, &mut rng);
    assert_eq!(q.dists.len(), 8);
    assert_eq!(q.stats.len(), 8);
    assert_eq!(problem.sim_calls() - before, 7);
    assert!(p.dists.contains(&q.dists[0]));
}

#[test]
fn importance_weight_matches_direct_formula() {
    let mut rng = rng(44);
    for _ in 0..500 {
        let m = rng.random_range(1..6);
        let mt = rng.random_range(1..12);
        let old: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..5.0)).collect();
        let fresh: Vec<f64> = (0..mt).map(|_| rng.random_range(0.0..5.0)).collect();
        let lambda = rng.random_range(0.0..4.0);
        let got = is_refresh_weight(&old, &fresh, lambda, KernelKind::Exponential);
        let so: f64 = old.iter().map(|d| (-lambda * d).exp()).sum();
        let sf: f64 = fresh.iter().map(|d| (-lambda * d).exp()).sum();
        let want = (m as f64 * sf / (mt as f64 * so)).ln();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert_eq!(is_refresh_weight(&[0.3], &[0.3], 2.0, KernelKind::Exponential), 0.0);
}

#[test]
fn doubling_rule() {
    assert_eq!(adapt_m(0.05, 4, 0.1, 128), MAdaptation { m: 8, saturated: false });
    assert_eq!(adapt_m(0.1, 4, 0.1, 128), MAdaptation { m: 4, saturated: false });
    assert_eq!(adapt_m(0.3, 1, 0.1, 128), MAdaptation { m: 1, saturated: false });
    assert_eq!(adapt_m(0.0, 100, 0.1, 128), MAdaptation { m: 128, saturated: false });
    assert_eq!(adapt_m(0.0, 128, 0.1, 128), MAdaptation { m: 128, saturated: true });
}

#[test]
fn policy_validation() {
    assert!(MPolicy::gibbs().validate().is_ok());
    assert!(MPolicy::Gibbs { target_accept: 1.5, m_max: 4 }.validate().is_err());
    assert!(MPolicy::ImportanceSampling { target_accept: 0.1, m_max: 0 }.validate().is_err());
    assert!(MPolicy::Schedule { changes: vec![[2, 0]] }.validate().is_err());
    let parsed: MPolicy = toml::from_str("kind = \"gibbs\"").unwrap();
    assert_eq!(parsed, MPolicy::gibbs());
}
