//! Empirical risk bound evaluated at every rung of the ladder, split into
//! its addends.

use pacabc::bounds::{empirical_bound, BoundConstants};
use pacabc::models::GaussianLocationModel;
use pacabc::smc::{run_smc, AbcProblem, SmcConfig};
use pacabc::statistics::{DistanceSpec, SummarySpec};

fn main() -> pacabc::Result<()> {
    let model = GaussianLocationModel { prior_var: 1.0, noise_sd: 1.0 };
    let n = 200;
    let observed: Vec<f64> = (0..n).map(|i| -0.2 + ((i * 13 % 7) as f64 - 3.0) / 3.0).collect();
    let summary = SummarySpec::sample_mean().with_clamp(-3.0, 3.0);
    let distance = DistanceSpec::Lp { p: 1.0 };
    let problem = AbcProblem::new(&model, &summary, &distance, &observed)?;
    let out = run_smc(&SmcConfig::new(2_000, 30.0), 5, &problem)?;

    let constants = BoundConstants::new(n as f64, 1.0, 1.0, 3.0);
    println!("{:>8} {:>9} {:>10} {:>13} {:>10}", "lambda", "bound", "neg_log_z", "concentration", "confidence");
    for s in &out.trace.steps {
        let r = empirical_bound(s.log_z, s.lambda, &constants)?;
        let c: Vec<f64> = r.components.iter().map(|t| t.value).collect();
        println!("{:>8.3} {:>9.4} {:>10.4} {:>13.4} {:>10.4}", s.lambda, r.bound, c[0], c[1], c[2]);
    }
    Ok(())
}
