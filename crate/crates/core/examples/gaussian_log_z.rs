//! Running log-normalizing-constant estimate along the ladder, against the
//! closed form available for a Gaussian location model with the sample mean.

use pacabc::models::GaussianLocationModel;
use pacabc::smc::{run_smc, AbcProblem, SmcConfig};
use pacabc::statistics::{DistanceSpec, SummarySpec};

fn main() -> pacabc::Result<()> {
    let model = GaussianLocationModel { prior_var: 1.0, noise_sd: 1.0 };
    let n = 25;
    let observed: Vec<f64> = (0..n).map(|i| 0.4 + 0.1 * ((i % 5) as f64 - 2.0)).collect();
    let s_obs = observed.iter().sum::<f64>() / n as f64;
    let summary = SummarySpec::sample_mean();
    let distance = DistanceSpec::Lp { p: 1.0 };

    let problem = AbcProblem::new(&model, &summary, &distance, &observed)?;
    let out = run_smc(&SmcConfig::new(5_000, 20.0), 3, &problem)?;

    println!("{:>9} {:>11} {:>11} {:>9}", "lambda", "log Z smc", "exact", "error");
    for s in &out.trace.steps {
        let exact = model.exact_log_z(s_obs, n, s.lambda);
        println!("{:>9.4} {:>11.5} {:>11.5} {:>9.5}", s.lambda, s.log_z, exact, s.log_z - exact);
    }
    println!("simulator calls: {}", out.sim_calls);
    Ok(())
}
