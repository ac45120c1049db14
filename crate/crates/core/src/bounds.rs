//! PAC-Bayes bounds that can be evaluated from an SMC run, plus calculators
//! for the theoretical rates.
//!
//! The empirical bound at `λ` is
//!
//! ```text
//! −log Ẑ_λ / λ + f(n, λ) / λ + log(1/ε) / λ
//! ```
//!
//! and the adaptive (AdABC) choice of `λ` minimizes its analogue over an
//! exponential family `ξ_β(dλ) = β e^{−βλ} dλ` with an `Exp(α)` prior on `λ`.

use std::f64::consts::{E, PI};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which concentration inequality bounds the statistic distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concentration {
    /// `f(n, λ) = λ² K² m^{2/p} / n` for `ℓ_p` distances of bounded statistics.
    #[default]
    Lp,
    /// `f(n, λ) = λ² K / (2n)` for the scaled empirical L2 distance.
    ScaledL2,
}

fn default_epsilon() -> f64 {
    0.05
}
fn default_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// Sample size.
    pub n: f64,
    /// Statistic dimension.
    pub m: f64,
    /// Norm order (`inf` for the sup norm).
    pub p: f64,
    /// Bound on the statistics, `sup |h_i|`.
    pub k: f64,
    /// Parameter dimension.
    #[serde(default = "default_one")]
    pub d: f64,
    /// Prior variance `ϑ`.
    #[serde(default = "default_one")]
    pub prior_var: f64,
    /// Local Lipschitz constant `L`.
    #[serde(default = "default_one")]
    pub lipschitz: f64,
    /// Variance-proxy constant `C`.
    #[serde(default = "default_one")]
    pub c: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Rate of the exponential prior on `λ`.
    #[serde(default = "default_one")]
    pub alpha: f64,
    #[serde(default)]
    pub concentration: Concentration,
}

impl BoundConstants {
    pub fn new(n: f64, m: f64, p: f64, k: f64) -> Self {
        Self {
            n,
            m,
            p,
            k,
            d: 1.0,
            prior_var: 1.0,
            lipschitz: 1.0,
            c: 1.0,
            epsilon: default_epsilon(),
            alpha: 1.0,
            concentration: Concentration::Lp,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("n", self.n),
            ("m", self.m),
            ("p", self.p),
            ("k", self.k),
            ("d", self.d),
            ("prior_var", self.prior_var),
            ("lipschitz", self.lipschitz),
            ("c", self.c),
            ("alpha", self.alpha),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || v.is_nan() {
                return Err(Error::InvalidConfig(format!("bound constant {name} must be positive, got {v}")));
            }
            if name != "p" && !v.is_finite() {
                return Err(Error::InvalidConfig(format!("bound constant {name} must be finite, got {v}")));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!("epsilon must lie in (0,1), got {}", self.epsilon)));
        }
        Ok(())
    }

    /// `m^{1/p}` (1 for the sup norm).
    pub fn m_root(&self) -> f64 {
        self.m.powf(1.0 / self.p)
    }

    /// Coefficient `c` with `f(n, λ) = c λ²`.
    pub fn f_coefficient(&self) -> f64 {
        match self.concentration {
            Concentration::Lp => self.k * self.k * self.m_root().powi(2) / self.n,
            Concentration::ScaledL2 => self.k / (2.0 * self.n),
        }
    }
}

/// A named addend of a bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
    /// Formula or input the value came from.
    pub source: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub lambda: f64,
    /// Set for adaptive evaluations; `lambda = 1/beta`.
    pub beta: Option<f64>,
    pub bound: f64,
    pub components: Vec<Term>,
}

impl BoundReport {
    fn from_terms(lambda: f64, beta: Option<f64>, components: Vec<Term>) -> Self {
        let bound = components.iter().map(|t| t.value).sum();
        Self { lambda, beta, bound, components }
    }
}

/// `f(n, λ)` from the bounded-differences inequality.
pub fn mcdiarmid_f(constants: &BoundConstants, lambda: f64) -> f64 {
    constants.f_coefficient() * lambda * lambda
}

/// Empirical bound at `λ > 0` from an estimate of `log Z_λ`.
pub fn empirical_bound(log_z_hat: f64, lambda: f64, constants: &BoundConstants) -> Result<BoundReport> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::OutOfRange(format!("the empirical bound needs a finite lambda > 0, got {lambda}")));
    }
    let terms = vec![
        Term { name: "neg_log_z", value: -log_z_hat / lambda, source: "smc log_z" },
        Term { name: "concentration", value: mcdiarmid_f(constants, lambda) / lambda, source: "mcdiarmid_f" },
        Term { name: "confidence", value: (1.0 / constants.epsilon).ln() / lambda, source: "log(1/epsilon)" },
    ];
    Ok(BoundReport::from_terms(lambda, None, terms))
}

/// Linear interpolation of `log Ẑ` through the ladder knots `(λ_t, log Ẑ_t)`
/// (sorted by λ, first knot usually `(0, 0)`).
pub fn interpolate_log_z(knots: &[(f64, f64)], lambda: f64) -> Result<f64> {
    let (Some(first), Some(last)) = (knots.first(), knots.last()) else {
        return Err(Error::OutOfRange("empty ladder".into()));
    };
    if !(lambda >= first.0 && lambda <= last.0) {
        return Err(Error::OutOfRange(format!(
            "lambda {lambda} lies outside the computed ladder [{}, {}]",
            first.0, last.0
        )));
    }
    let j = knots.partition_point(|k| k.0 < lambda);
    if j == 0 {
        return Ok(first.1);
    }
    let (l0, z0) = knots[j - 1];
    let (l1, z1) = knots[j];
    if l1 == l0 {
        return Ok(z1);
    }
    Ok(z0 + (z1 - z0) * (lambda - l0) / (l1 - l0))
}

/// `KL(Exp(β) ‖ Exp(α)) = log(β/α) + (α − β)/β`.
pub fn kl_exponential(alpha: f64, beta: f64) -> f64 {
    if alpha == beta {
        return 0.0;
    }
    (beta / alpha).ln() + (alpha - beta) / beta
}

/// AdABC objective at `β`:
/// `β · { −log Ẑ_{1/β} + ξ(λ²) c_f + KL(ξ_β ‖ ν_α) + log(1/ε) }` with
/// `ξ(λ²) = 2/β²` and `c_f` the coefficient of `f(n, λ) = c_f λ²`.
pub fn adaptive_objective(
    beta: f64,
    log_z_at: &dyn Fn(f64) -> Result<f64>,
    constants: &BoundConstants,
) -> Result<BoundReport> {
    if !(beta >= constants.alpha) || !beta.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "beta = {beta} must be at least alpha = {}; the KL term is infinite otherwise",
            constants.alpha
        )));
    }
    let lambda = 1.0 / beta;
    let log_z = log_z_at(lambda)?;
    let terms = vec![
        Term { name: "neg_log_z", value: -beta * log_z, source: "interpolated smc log_z at 1/beta" },
        Term {
            name: "concentration",
            value: beta * 2.0 / (beta * beta) * constants.f_coefficient(),
            source: "xi(lambda^2) = 2/beta^2",
        },
        Term { name: "kl", value: beta * kl_exponential(constants.alpha, beta), source: "KL(Exp(beta), Exp(alpha))" },
        Term { name: "confidence", value: beta * (1.0 / constants.epsilon).ln(), source: "log(1/epsilon)" },
    ];
    Ok(BoundReport::from_terms(lambda, Some(beta), terms))
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 || lo == hi {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptiveSelection {
    pub lambda_hat: f64,
    pub beta_hat: f64,
    pub report: BoundReport,
    /// Objective at every feasible grid point, in grid order.
    pub grid: Vec<BoundReport>,
    /// The minimizer sits at an end of the grid.
    pub boundary: bool,
}

/// Default β grid: `count` log-spaced points over `(α, ∞) ∩ [1/λ_T, 1/λ_1]`.
pub fn default_beta_grid(knots: &[(f64, f64)], alpha: f64, count: usize) -> Vec<f64> {
    let positive: Vec<f64> = knots.iter().map(|k| k.0).filter(|l| *l > 0.0).collect();
    let (Some(&l1), Some(&lt)) = (positive.first(), positive.last()) else {
        return Vec::new();
    };
    let hi = 1.0 / l1;
    let lo = (1.0 / lt).max(alpha * (1.0 + 1e-9));
    if lo > hi {
        return Vec::new();
    }
    log_grid(lo, hi, count)
}

/// AdABC: minimizes [`adaptive_objective`] over the feasible part of
/// `beta_grid` (default [`default_beta_grid`]).
pub fn adaptive_select_lambda(
    knots: &[(f64, f64)],
    constants: &BoundConstants,
    beta_grid: Option<&[f64]>,
) -> Result<AdaptiveSelection> {
    let lambda_max = knots.last().map_or(0.0, |k| k.0);
    let grid: Vec<f64> = match beta_grid {
        Some(g) => g.iter().copied().filter(|&b| b > constants.alpha && 1.0 / b <= lambda_max).collect(),
        None => default_beta_grid(knots, constants.alpha, 64),
    };
    if grid.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no beta in the grid exceeds alpha = {} with 1/beta inside the ladder (max lambda {lambda_max})",
            constants.alpha
        )));
    }
    let log_z_at = |l: f64| interpolate_log_z(knots, l);
    let reports = grid
        .iter()
        .map(|&b| adaptive_objective(b, &log_z_at, constants))
        .collect::<Result<Vec<_>>>()?;
    let best = reports
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.bound.total_cmp(&b.1.bound))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    let report = reports[best].clone();
    let beta_hat = report.beta.expect("adaptive report");
    Ok(AdaptiveSelection {
        lambda_hat: 1.0 / beta_hat,
        beta_hat,
        report,
        boundary: best == 0 || best + 1 == reports.len(),
        grid: reports,
    })
}

/// `K(p, m) = min(m, 2e log m, p − 1)`.
pub fn k_pm(p: f64, m: f64) -> f64 {
    m.min(2.0 * E * m.ln()).min(p - 1.0)
}

/// Lower bound on `log π(‖θ − θ*‖ < δ)` for an isotropic Gaussian prior and
/// `‖θ*‖ ≤ 1`: `d log{ δ/(2√(2πϑd)) exp(−1/ϑ − δ²/(ϑd)) }`.
pub fn small_ball_log_lower_bound(d: f64, prior_var: f64, delta: f64) -> f64 {
    d * ((delta / (2.0 * (2.0 * PI * prior_var * d).sqrt())).ln() - 1.0 / prior_var - delta * delta / (prior_var * d))
}

/// Excess-risk addends of the Gaussian-prior oracle inequality at its
/// prescribed `λ = √(dn/(K² m^{2/p}))` and `δ = √(ϑ/n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary1 {
    pub lambda: f64,
    pub delta: f64,
    pub k_pm: f64,
    pub small_ball: f64,
    pub report: BoundReport,
}

pub fn corollary1_terms(c: &BoundConstants) -> Corollary1 {
    let km = c.k * c.m_root();
    let lambda = (c.d * c.n).sqrt() / km;
    let delta = (c.prior_var / c.n).sqrt();
    let small_ball = small_ball_log_lower_bound(c.d, c.prior_var, delta);
    let terms = vec![
        Term {
            name: "variance",
            value: 2.0 * c.c * c.m.powf(1.0 / c.p + 1.0) / c.n.sqrt(),
            source: "2 C m^(1/p+1) / sqrt(n)",
        },
        Term { name: "lipschitz", value: c.lipschitz * delta, source: "L delta" },
        Term {
            name: "concentration",
            value: 2.0 * lambda * km * km / c.n,
            source: "2 lambda K^2 m^(2/p) / n",
        },
        Term { name: "prior_mass", value: -2.0 * small_ball / lambda, source: "-(2/lambda) small-ball bound" },
        Term { name: "confidence", value: 2.0 / lambda * (2.0 / c.epsilon).ln(), source: "(2/lambda) log(2/epsilon)" },
    ];
    Corollary1 {
        lambda,
        delta,
        k_pm: k_pm(c.p, c.m),
        small_ball,
        report: BoundReport::from_terms(lambda, None, terms),
    }
}

/// Order-only sequences of the Gaussian-process regression rate (unit
/// constants).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonparametricRate {
    pub rate: f64,
    pub lambda_n: f64,
    pub c_n: f64,
    /// `n^{−(β+1)/(2β+1)} (log n)^{β/(2β+1)} log(2/ε)`.
    pub confidence: f64,
    pub order_only: bool,
}

pub fn nonparametric_rate(n: f64, smoothness: f64, epsilon: f64) -> Result<NonparametricRate> {
    if !(n >= 2.0) {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    if !(smoothness > 0.0) {
        return Err(Error::OutOfRange(format!("smoothness must be positive, got {smoothness}")));
    }
    let b = smoothness;
    let ln = n.ln();
    let denom = 2.0 * b + 1.0;
    let log_factor = ln.powf(b / denom);
    Ok(NonparametricRate {
        rate: n.powf(-b / denom) * log_factor,
        lambda_n: n.powf((b + 1.0) / denom) * log_factor,
        c_n: (ln * ln / n).powf(1.0 / denom),
        confidence: n.powf(-(b + 1.0) / denom) * log_factor * (2.0 / epsilon).ln(),
        order_only: true,
    })
}

/// One CSV row per report: `mode, lambda, beta, bound, <component names>`.
pub fn write_reports_csv<W: Write>(out: W, mode: &str, reports: &[BoundReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let names: Vec<&str> = reports.first().map_or(Vec::new(), |r| r.components.iter().map(|t| t.name).collect());
    let mut header = vec!["mode", "lambda", "beta", "bound"];
    header.extend(&names);
    w.write_record(&header)?;
    for r in reports {
        let mut row = vec![
            mode.to_string(),
            r.lambda.to_string(),
            r.beta.map_or(String::new(), |b| b.to_string()),
            r.bound.to_string(),
        ];
        row.extend(r.components.iter().map(|t| t.value.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mcdiarmid_examples() {
        let c = BoundConstants::new(100.0, 1.0, 2.0, 1.0);
        assert_eq!(mcdiarmid_f(&c, 0.0), 0.0);
        assert!((mcdiarmid_f(&c, 10.0) - 1.0).abs() < 1e-15);
        let c = BoundConstants::new(90.0, 6.0, 2.0, 625.0);
        assert!((mcdiarmid_f(&c, 60.0) - 9.375e7).abs() < 1e-5);
        let mut s = BoundConstants::new(50.0, 1.0, 2.0, 4.0);
        s.concentration = Concentration::ScaledL2;
        assert!((mcdiarmid_f(&s, 5.0) - 25.0 * 4.0 / 100.0).abs() < 1e-15);
    }

    #[test]
    fn empirical_examples() {
        let mut c = BoundConstants::new(1.0, 1.0, 2.0, 1e-300);
        c.epsilon = 1.0;
        assert_eq!(empirical_bound(0.0, 1.0, &c).unwrap().bound, 0.0);
        // f(n, 2) = 1 with K = 1, m = 1, n = 4
        let mut c = BoundConstants::new(4.0, 1.0, 2.0, 1.0);
        c.epsilon = (-2.0f64).exp();
        let r = empirical_bound(-4.0, 2.0, &c).unwrap();
        assert!((r.bound - 3.5).abs() < 1e-12);
        let sum: f64 = r.components.iter().map(|t| t.value).sum();
        assert!((sum - r.bound).abs() < 1e-12);
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_exponential(1.0, 1.0), 0.0);
        assert!((kl_exponential(1.0, 2.0) - (2f64.ln() - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn beta_below_alpha_is_rejected() {
        let c = BoundConstants::new(10.0, 1.0, 2.0, 1.0);
        let z = |_: f64| Ok(0.0);
        assert!(matches!(adaptive_objective(0.5, &z, &c), Err(Error::InvalidConfig(_))));
        let at_alpha = adaptive_objective(1.0, &z, &c).unwrap();
        assert_eq!(at_alpha.components[2].value, 0.0);
        let knots = [(0.0, 0.0), (0.5, -0.1)];
        assert!(matches!(
            adaptive_select_lambda(&knots, &c, Some(&[0.1, 0.9])),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn interpolation() {
        let knots = [(0.0, 0.0), (1.0, -1.0), (3.0, -2.0)];
        assert_eq!(interpolate_log_z(&knots, 2.0).unwrap(), -1.5);
        assert_eq!(interpolate_log_z(&knots, 1.0).unwrap(), -1.0);
        assert!(matches!(interpolate_log_z(&knots, 4.0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn k_pm_and_small_ball() {
        assert_eq!(k_pm(2.0, 6.0), 1.0);
        let expect = (1.0 / (2.0 * (2.0 * PI).sqrt()) * (-2.0f64).exp()).ln();
        assert!((small_ball_log_lower_bound(1.0, 1.0, 1.0) - expect).abs() < 1e-14);
    }

    #[test]
    fn nonparametric_examples() {
        let r = nonparametric_rate(E, 2.0, 0.05).unwrap();
        assert!((r.rate - E.powf(-0.4)).abs() < 1e-14);
        assert!(nonparametric_rate(1.0, 1.0, 0.05).is_err());
    }
}
