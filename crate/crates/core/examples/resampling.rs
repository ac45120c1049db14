//! Effective sample size and systematic resampling on a skewed weight vector.

use pacabc::smc::{ess, systematic_resample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> pacabc::Result<()> {
    let log_w: Vec<f64> = (0..10).map(|i| -0.5 * i as f64).collect();
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    println!("ESS = {:.3} of {}", ess(&log_w)?, w.len());

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u: f64 = rng.random();
    let idx = systematic_resample(&w, u);
    let mut counts = vec![0; w.len()];
    idx.iter().for_each(|&i| counts[i] += 1);
    println!("u = {u:.3}");
    for (i, (wi, c)) in w.iter().zip(&counts).enumerate() {
        println!("{i:>2}: N·w = {:.2}, copies = {c}", wi * w.len() as f64);
    }
    Ok(())
}
