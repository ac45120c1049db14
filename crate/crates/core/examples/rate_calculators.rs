//! Closed-form rate calculators: the Gaussian-prior oracle inequality at its
//! prescribed λ, and order-only nonparametric rates.

use pacabc::bounds::{corollary1_terms, nonparametric_rate, BoundConstants};

fn main() -> pacabc::Result<()> {
    for n in [90.0, 900.0, 9_000.0, 90_000.0] {
        let mut c = BoundConstants::new(n, 6.0, 2.0, 1.0);
        c.d = 4.0;
        c.prior_var = 1.0;
        let cor = corollary1_terms(&c);
        let parts: Vec<String> = cor.report.components.iter().map(|t| format!("{}={:.3}", t.name, t.value)).collect();
        println!("n={n:>6}: lambda={:.2} delta={:.4} total={:.3}  {}", cor.lambda, cor.delta, cor.report.bound, parts.join(" "));
    }
    println!();
    for smoothness in [0.5, 1.0, 2.0] {
        for n in [1e2, 1e4, 1e6] {
            let r = nonparametric_rate(n, smoothness, 0.05)?;
            println!(
                "smoothness {smoothness}: n={n:>8} rate={:.4} lambda_n={:.1} c_n={:.4}",
                r.rate, r.lambda_n, r.c_n
            );
        }
    }
    Ok(())
}
