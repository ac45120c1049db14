use pacabc::bounds::*;
use pacabc::cli::config::RunConfig;
use pacabc::error::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

fn constants() -> impl Strategy<Value = BoundConstants> {
    (1.0..1e4f64, 1.0..10.0f64, prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)], 0.01..10.0f64, 1e-4..0.5f64)
        .prop_map(|(n, m, p, k, eps)| {
            let mut c = BoundConstants::new(n.round(), m.round(), p, k);
            c.epsilon = eps;
            c
        })
}

proptest! {
    #[test]
    fn empirical_components_add_up_and_move_the_right_way(
        c in constants(), log_z in -50.0..0.0f64, lambda in 0.01..100.0f64, shift in 0.01..5.0f64,
    ) {
        let r = empirical_bound(log_z, lambda, &c).unwrap();
        let sum: f64 = r.components.iter().map(|t| t.value).sum();
        prop_assert!((sum - r.bound).abs() <= 1e-9 * r.bound.abs().max(1.0));
        let higher = empirical_bound(log_z + shift, lambda, &c).unwrap();
        prop_assert!(higher.bound < r.bound);
        let mut looser = c.clone();
        looser.epsilon = c.epsilon / 2.0;
        prop_assert!(empirical_bound(log_z, lambda, &looser).unwrap().bound > r.bound);
    }

    #[test]
    fn adaptive_components_add_up(c in constants(), beta in 1.0..50.0f64, slope in -5.0..0.0f64) {
        let z = move |l: f64| Ok(slope * l);
        let r = adaptive_objective(beta, &z, &c).unwrap();
        let sum: f64 = r.components.iter().map(|t| t.value).sum();
        prop_assert!((sum - r.bound).abs() <= 1e-9 * r.bound.abs().max(1.0));
        prop_assert!(r.components.iter().find(|t| t.name == "kl").unwrap().value >= 0.0);
        prop_assert_eq!(r.lambda, 1.0 / beta);
    }

    #[test]
    fn kl_vanishes_only_on_the_diagonal(a in 0.01..10.0f64, b in 0.01..10.0f64) {
        prop_assert_eq!(kl_exponential(a, a), 0.0);
        let v = kl_exponential(a, b);
        prop_assert!(v >= -1e-12);
        if (a - b).abs() > 1e-3 {
            prop_assert!(v > 0.0);
        }
    }
}

fn quadratic_knots(a: f64) -> Vec<(f64, f64)> {
    (0..=400).map(|i| i as f64 * 0.05).map(|l| (l, -a * l)).collect()
}

#[test]
fn selection_finds_an_interior_minimum() {
    // log Z_λ = −aλ gives objective a + 2c/β + β·KL + β log(1/ε), which is
    // minimized where 2c/β² = KL'(β)·β + KL + log(1/ε)
    let mut c = BoundConstants::new(100.0, 1.0, 2.0, 1.0);
    c.alpha = 0.05;
    c.epsilon = 0.5;
    let knots = quadratic_knots(1.0);
    let grid = log_grid(0.06, 10.0, 2001);
    let sel = adaptive_select_lambda(&knots, &c, Some(&grid)).unwrap();
    assert!(!sel.boundary);
    let f = |b: f64| {
        1.0 + 2.0 * c.f_coefficient() / b + b * ((b / c.alpha).ln() + (c.alpha - b) / b) + b * 2f64.ln()
    };
    let brute = grid.iter().copied().min_by(|x, y| f(*x).total_cmp(&f(*y))).unwrap();
    assert!((sel.beta_hat - brute).abs() < 1e-12);
    assert!((sel.report.bound - f(brute)).abs() < 1e-9);
    assert_eq!(sel.lambda_hat, 1.0 / sel.beta_hat);
}

#[test]
fn boundary_minimum_is_flagged() {
    // huge concentration coefficient pushes β to the top of the grid
    let c = BoundConstants::new(1.0, 1.0, 2.0, 1e3);
    let sel = adaptive_select_lambda(&quadratic_knots(0.1), &c, Some(&log_grid(1.5, 20.0, 50))).unwrap();
    assert!(sel.boundary);
    assert_eq!(sel.beta_hat, *sel.grid.last().and_then(|r| r.beta.as_ref()).unwrap());
}

#[test]
fn grids_at_or_below_alpha_are_rejected() {
    let c = BoundConstants::new(10.0, 1.0, 2.0, 1.0);
    let knots = quadratic_knots(1.0);
    let e = adaptive_select_lambda(&knots, &c, Some(&[0.2, 0.5, 1.0])).unwrap_err();
    assert!(matches!(e, Error::InvalidConfig(_)));
    assert!(default_beta_grid(&knots, 1.0, 16).iter().all(|b| *b > 1.0));
    assert!(default_beta_grid(&[(0.0, 0.0), (2.0, -1.0)], 1.0, 16).is_empty());
}

#[test]
fn interpolation_rejects_lambdas_outside_the_ladder() {
    let knots = [(0.0, 0.0), (2.0, -1.0)];
    assert!(matches!(interpolate_log_z(&knots, -0.1), Err(Error::OutOfRange(_))));
    assert!(matches!(interpolate_log_z(&knots, 2.5), Err(Error::OutOfRange(_))));
    assert!(matches!(interpolate_log_z(&[], 0.0), Err(Error::OutOfRange(_))));
    assert_eq!(interpolate_log_z(&knots, 0.5).unwrap(), -0.25);
    // 1/β = 0.4 lies below the first knot
    let c = BoundConstants::new(10.0, 1.0, 2.0, 1.0);
    let z = |l: f64| interpolate_log_z(&[(1.0, 0.0), (2.0, -1.0)], l);
    assert!(matches!(adaptive_objective(2.5, &z, &c), Err(Error::OutOfRange(_))));
}

#[test]
fn empirical_bound_example() {
    let mut c = BoundConstants::new(4.0, 1.0, 2.0, 1.0);
    c.epsilon = (-2.0f64).exp();
    let r = empirical_bound(-4.0, 2.0, &c).unwrap();
    assert!((r.bound - 3.5).abs() < 1e-12);
    assert!(matches!(empirical_bound(-1.0, 0.0, &c), Err(Error::OutOfRange(_))));
}

#[test]
fn small_ball_example() {
    let (d, v, delta) = (3.0, 2.0, 0.1);
    let per = delta / (2.0 * (2.0 * PI * v * d).sqrt()) * (-1.0 / v - delta * delta / (v * d)).exp();
    assert!((small_ball_log_lower_bound(d, v, delta) - d * per.ln()).abs() < 1e-12);
}

#[test]
fn corollary_terms_for_the_mixture_preset() {
    let c = RunConfig::from_preset("exp1", &["bounds.k=625".into()]).unwrap().bound_constants().unwrap();
    let cor = corollary1_terms(&c);
    let lambda = (c.d * c.n).sqrt() / (c.k * c.m.powf(1.0 / c.p));
    let delta = (c.prior_var / c.n).sqrt();
    assert!((cor.lambda - lambda).abs() < 1e-12 * lambda);
    assert!((cor.delta - delta).abs() < 1e-15);
    assert_eq!(cor.k_pm, c.m.min(2.0 * std::f64::consts::E * c.m.ln()).min(c.p - 1.0));
    let expected = [
        2.0 * c.c * c.m.powf(1.0 / c.p + 1.0) / c.n.sqrt(),
        c.lipschitz * delta,
        2.0 * lambda * c.k * c.k * c.m.powf(2.0 / c.p) / c.n,
        -2.0 * small_ball_log_lower_bound(c.d, c.prior_var, delta) / lambda,
        2.0 / lambda * (2.0 / c.epsilon).ln(),
    ];
    for (t, e) in cor.report.components.iter().zip(expected) {
        assert!((t.value - e).abs() <= 1e-9 * e.abs(), "{}: {} vs {e}", t.name, t.value);
    }
    let total: f64 = expected.iter().sum();
    assert!((cor.report.bound - total).abs() <= 1e-9 * total);
}

#[test]
fn nonparametric_rate_shrinks_with_n() {
    let mut prev = f64::INFINITY;
    for n in [10.0, 100.0, 1e3, 1e4, 1e5, 1e6] {
        let r = nonparametric_rate(n, 1.5, 0.05).unwrap();
        assert!(r.rate < prev);
        assert!(r.order_only);
        assert!(r.lambda_n > 0.0 && r.c_n > 0.0 && r.confidence > 0.0);
        prev = r.rate;
    }
    assert!(nonparametric_rate(100.0, 0.0, 0.05).is_err());
}

#[test]
fn reports_serialize_to_csv() {
    let c = BoundConstants::new(10.0, 1.0, 2.0, 1.0);
    let reports: Vec<_> = [0.5, 1.0, 2.0].iter().map(|&l| empirical_bound(-l, l, &c).unwrap()).collect();
    let mut buf = Vec::new();
    write_reports_csv(&mut buf, "empirical", &reports).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "mode,lambda,beta,bound,neg_log_z,concentration,confidence");
    assert_eq!(lines.count(), 3);
}
