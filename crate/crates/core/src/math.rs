//! Small numerical helpers shared across the sampler.

/// `log(sum(exp(x)))`, shifted by the maximum. Returns `-inf` for an empty
/// slice or when every entry is `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Same as [`log_sum_exp`] over an iterator, without allocating.
pub fn log_sum_exp_iter<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64> + Clone,
{
    let max = values.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.into_iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Normalized weights from log-weights. `None` when all are `-inf`.
pub fn normalize_log_weights(log_weights: &[f64]) -> Option<Vec<f64>> {
    let lse = log_sum_exp(log_weights);
    if !lse.is_finite() {
        return None;
    }
    Some(log_weights.iter().map(|w| (w - lse).exp()).collect())
}

/// Weighted mean and standard deviation of each coordinate.
pub fn weighted_moments(points: &[&[f64]], weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let dim = points.first().map_or(0, |p| p.len());
    let total: f64 = weights.iter().sum();
    let mut mean = vec![0.0; dim];
    for (p, w) in points.iter().zip(weights) {
        for (m, x) in mean.iter_mut().zip(p.iter()) {
            *m += w * x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= total);
    let mut var = vec![0.0; dim];
    for (p, w) in points.iter().zip(weights) {
        for ((v, x), m) in var.iter_mut().zip(p.iter()).zip(&mean) {
            *v += w * (x - m) * (x - m);
        }
    }
    let sd = var.iter().map(|v| (v / total).max(0.0).sqrt()).collect();
    (mean, sd)
}

/// `log Φ(x)` for the standard normal cdf, accurate far into the left tail.
pub fn ln_normal_cdf(x: f64) -> f64 {
    if x > -30.0 {
        (0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)).ln()
    } else {
        // asymptotic series of the Mills ratio
        let x2 = x * x;
        let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
        -0.5 * x2 - 0.5 * (2.0 * std::f64::consts::PI).ln() - (-x).ln() + series.ln()
    }
}

/// `log φ(x)` for the standard normal density.
pub fn ln_normal_pdf(x: f64) -> f64 {
    -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln()
}
