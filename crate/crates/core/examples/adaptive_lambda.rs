//! Data-driven choice of λ: run the ladder past the nominal target, then
//! minimize the bound objective over β = 1/λ and reweight the nearest
//! snapshot to the selected λ.

use pacabc::bounds::{adaptive_select_lambda, default_beta_grid, BoundConstants};
use pacabc::models::GaussianLocationModel;
use pacabc::smc::{run_smc, AbcProblem, LadderMode, SmcConfig};
use pacabc::statistics::{DistanceSpec, SummarySpec};

fn main() -> pacabc::Result<()> {
    let model = GaussianLocationModel { prior_var: 1.0, noise_sd: 1.0 };
    let n = 100;
    let observed: Vec<f64> = (0..n).map(|i| 0.3 + ((i * 37 % 11) as f64 - 5.0) / 5.0).collect();
    // clamp to [-4, 4] so the statistic is bounded by K = 4
    let summary = SummarySpec::sample_mean().with_clamp(-4.0, 4.0);
    let distance = DistanceSpec::Lp { p: 1.0 };
    let problem = AbcProblem::new(&model, &summary, &distance, &observed)?;

    let mut config = SmcConfig::new(2_000, 10.0);
    config.mode = LadderMode::Adaptive;
    config.lambda_max = Some(40.0);
    let out = run_smc(&config, 11, &problem)?;

    let mut constants = BoundConstants::new(n as f64, 1.0, 1.0, 4.0);
    constants.alpha = 0.01;
    let knots = out.trace.log_z_knots();
    let grid = default_beta_grid(&knots, constants.alpha, 64);
    let sel = adaptive_select_lambda(&knots, &constants, Some(&grid))?;
    println!("ladder reached lambda = {:.2} in {} steps", out.system.lambda, out.trace.steps.len());
    println!("selected lambda = {:.3} (objective {:.4}, boundary: {})", sel.lambda_hat, sel.report.bound, sel.boundary);
    for t in &sel.report.components {
        println!("  {:<14} {:+.4}", t.name, t.value);
    }

    let snap = out.trace.nearest_snapshot(sel.lambda_hat).expect("snapshots are kept in adaptive mode");
    let at_hat = snap.system.reweighted_to(sel.lambda_hat, config.kernel)?;
    let (mean, sd) = at_hat.theta_moments()?;
    println!("posterior at lambda-hat: mu = {:.3} ± {:.3} (snapshot at {:.3})", mean[0], sd[0], snap.system.lambda);
    Ok(())
}
