//! Indicator-grid statistics: the empirical CDF on a threshold grid, its
//! population counterpart, and distances between datasets.

use pacabc::models::TruthGenerator;
use pacabc::rng::{stream, Purpose};
use pacabc::statistics::{equispaced_thresholds, DistanceSpec, SummarySpec};

fn main() -> pacabc::Result<()> {
    let truth = TruthGenerator::three_component(200);
    let summary = SummarySpec::indicator_grid(equispaced_thresholds(-3.0, 3.0, 13));
    let population = truth.expected_features(&summary);

    let a = summary.summarize(&truth.generate(&mut stream(1, Purpose::Observations, 0, 0))?)?;
    let b = summary.summarize(&truth.generate(&mut stream(2, Purpose::Observations, 0, 0))?)?;

    println!("threshold  sample A  sample B  population");
    if let pacabc::statistics::Features::IndicatorGrid { thresholds } = &summary.features {
        for (i, t) in thresholds.iter().enumerate() {
            println!("{t:>9.2}  {:>8.3}  {:>8.3}  {:>10.3}", a[i], b[i], population[i]);
        }
    }
    for (name, d) in [("l2", DistanceSpec::euclidean()), ("l1", DistanceSpec::Lp { p: 1.0 }), ("sup", DistanceSpec::Sup)] {
        println!("{name:>3}: d(A, B) = {:.4}, d(A, population) = {:.4}", d.distance(&a, &b)?, d.distance(&a, &population)?);
    }
    println!("feature bound K = {:?}", summary.feature_bound());
    Ok(())
}
