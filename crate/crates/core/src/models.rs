//! Generative models: a prior over parameters plus a simulator of datasets.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{ln_normal_cdf, ln_normal_pdf, log_sum_exp};
use crate::statistics::{DistanceSpec, SummarySpec};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Shape of the parameter space, which decides the MCMC proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSpace {
    /// `ℝ^d`, explored with a Gaussian random walk.
    Continuous,
    /// A finite set of atoms `0..count`, stored as `θ = [index]`.
    Atoms(usize),
}

/// Prior `π(dθ)` and simulator `π_θ(dX^n)`.
///
/// Implementations are immutable and shared across worker threads; all
/// randomness comes from the caller's stream.
pub trait GenerativeModel: Send + Sync {
    fn param_dim(&self) -> usize;

    fn param_space(&self) -> ParamSpace {
        ParamSpace::Continuous
    }

    fn param_names(&self) -> Vec<String> {
        (1..=self.param_dim()).map(|i| format!("theta_{i}")).collect()
    }

    fn sample_prior(&self, rng: &mut dyn RngCore) -> Vec<f64>;

    /// Log prior density; `-inf` outside the support. `θ` is assumed finite.
    fn log_prior(&self, theta: &[f64]) -> f64;

    /// `n` i.i.d. draws from `π_θ`. `θ` is assumed valid.
    fn simulate(&self, theta: &[f64], n: usize, rng: &mut dyn RngCore) -> Vec<f64>;
}

fn check_theta(model: &dyn GenerativeModel, theta: &[f64]) -> Result<()> {
    if theta.len() != model.param_dim() {
        return Err(Error::InvalidParameter(format!(
            "expected {} parameters, got {}",
            model.param_dim(),
            theta.len()
        )));
    }
    if let Some(bad) = theta.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite parameter component {bad}")));
    }
    Ok(())
}

/// Simulates one dataset of size `n` at `θ`.
pub fn simulate_dataset(
    model: &dyn GenerativeModel,
    theta: &[f64],
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("dataset size must be at least 1".into()));
    }
    check_theta(model, theta)?;
    Ok(model.simulate(theta, n, rng))
}

/// Log prior density of `θ`, rejecting non-finite components.
pub fn prior_logpdf(model: &dyn GenerativeModel, theta: &[f64]) -> Result<f64> {
    check_theta(model, theta)?;
    Ok(model.log_prior(theta))
}

/// Independent zero-mean Gaussian prior with per-coordinate variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPrior {
    pub variances: Vec<f64>,
}

impl GaussianPrior {
    pub fn isotropic(dim: usize, variance: f64) -> Self {
        Self { variances: vec![variance; dim] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variances.is_empty() || self.variances.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidConfig("prior variances must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn log_density(&self, theta: &[f64]) -> f64 {
        self.variances
            .iter()
            .zip(theta)
            .map(|(v, x)| -0.5 * (LN_2PI + v.ln() + x * x / v))
            .sum()
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.variances
            .iter()
            .map(|v| v.sqrt() * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }
}

/// Two-component Gaussian mixture with known weight `p`.
///
/// `θ = (μ1, log σ1, μ2, log σ2)`; the scales live on the log axis so the
/// random-walk proposal never leaves the parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    pub p: f64,
    pub prior: GaussianPrior,
}

impl Default for MixtureModel {
    fn default() -> Self {
        Self { p: 0.8, prior: GaussianPrior { variances: vec![100.0, 1.0, 100.0, 1.0] } }
    }
}

impl MixtureModel {
    pub fn new(p: f64) -> Self {
        Self { p, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidConfig(format!("mixture weight p must lie in (0,1), got {}", self.p)));
        }
        self.prior.validate()?;
        if self.prior.variances.len() != 4 {
            return Err(Error::InvalidConfig("mixture prior needs 4 variances".into()));
        }
        Ok(())
    }

    /// `(μ1, σ1, μ2, σ2)` on the natural scale.
    pub fn decode(theta: &[f64]) -> [f64; 4] {
        [theta[0], theta[1].exp(), theta[2], theta[3].exp()]
    }

    pub fn encode(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> Vec<f64> {
        vec![mu1, sigma1.ln(), mu2, sigma2.ln()]
    }
}

impl GenerativeModel for MixtureModel {
    fn param_dim(&self) -> usize {
        4
    }

    fn param_names(&self) -> Vec<String> {
        ["mu1", "log_sigma1", "mu2", "log_sigma2"].map(String::from).to_vec()
    }

    fn sample_prior(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.prior.sample(rng)
    }

    fn log_prior(&self, theta: &[f64]) -> f64 {
        self.prior.log_density(theta)
    }

    fn simulate(&self, theta: &[f64], n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        let [m1, s1, m2, s2] = Self::decode(theta);
        (0..n)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                if rng.random::<f64>() < self.p {
                    m1 + s1 * z
                } else {
                    m2 + s2 * z
                }
            })
            .collect()
    }
}

/// `θ ~ N(0, prior_var)`, observations `N(θ, noise_sd²)`.
///
/// With the sample-mean statistic the ABC normalizing constant reduces to a
/// low-dimensional integral, which makes this the quadrature test bed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianLocationModel {
    pub prior_var: f64,
    pub noise_sd: f64,
}

impl GenerativeModel for GaussianLocationModel {
    fn param_dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<String> {
        vec!["mu".into()]
    }

    fn sample_prior(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![self.prior_var.sqrt() * rng.sample::<f64, _>(StandardNormal)]
    }

    fn log_prior(&self, theta: &[f64]) -> f64 {
        -0.5 * (LN_2PI + self.prior_var.ln() + theta[0] * theta[0] / self.prior_var)
    }

    fn simulate(&self, theta: &[f64], n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..n)
            .map(|_| theta[0] + self.noise_sd * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }
}

impl GaussianLocationModel {
    /// With the sample-mean statistic and `d = |Δ|`, `S(X^n)` is marginally
    /// `N(0, v)` with `v = prior_var + noise_sd²/n`, so
    /// `Z_λ = E e^{−λ|S − s_obs|}` splits into two Gaussian tail integrals.
    /// Returns their log-masses and tilted means.
    fn tilted_halves(&self, s_obs: f64, n: usize, lambda: f64) -> [(f64, f64); 2] {
        let v = self.prior_var + self.noise_sd * self.noise_sd / n as f64;
        let sd = v.sqrt();
        let base = 0.5 * lambda * lambda * v;
        // S > s_obs: weight e^{−λ(S − s_obs)} shifts the mean to −λv
        let mu_hi = -lambda * v;
        let z_hi = (s_obs - mu_hi) / sd;
        let log_q = ln_normal_cdf(-z_hi);
        let hi = (lambda * s_obs + base + log_q, mu_hi + sd * (ln_normal_pdf(z_hi) - log_q).exp());
        // S < s_obs: weight e^{−λ(s_obs − S)} shifts the mean to +λv
        let mu_lo = lambda * v;
        let z_lo = (s_obs - mu_lo) / sd;
        let log_p = ln_normal_cdf(z_lo);
        let lo = (-lambda * s_obs + base + log_p, mu_lo - sd * (ln_normal_pdf(z_lo) - log_p).exp());
        [hi, lo]
    }

    /// Exact `log Z_λ` for the sample-mean statistic with `d = |Δ|`.
    pub fn exact_log_z(&self, s_obs: f64, n: usize, lambda: f64) -> f64 {
        let [hi, lo] = self.tilted_halves(s_obs, n, lambda);
        log_sum_exp(&[hi.0, lo.0])
    }

    /// Exact `ρ_{λ,X}(S)`: the mean of the sample-mean statistic under the
    /// pseudo-posterior's data marginal.
    pub fn exact_statistic_mean(&self, s_obs: f64, n: usize, lambda: f64) -> f64 {
        let [hi, lo] = self.tilted_halves(s_obs, n, lambda);
        let z = log_sum_exp(&[hi.0, lo.0]);
        (hi.0 - z).exp() * hi.1 + (lo.0 - z).exp() * lo.1
    }
}

/// Finite model: a handful of parameter atoms, each with an i.i.d.
/// distribution over a finite outcome alphabet. Small enough to enumerate
/// every dataset exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteToyModel {
    pub prior_weights: Vec<f64>,
    pub obs_values: Vec<f64>,
    /// `obs_probs[j][k]`: probability of outcome `k` under atom `j`.
    pub obs_probs: Vec<Vec<f64>>,
}

impl Default for DiscreteToyModel {
    /// Five atoms over the alphabet `{0, 1, 2}`.
    fn default() -> Self {
        Self {
            prior_weights: vec![0.3, 0.25, 0.2, 0.15, 0.1],
            obs_values: vec![0.0, 1.0, 2.0],
            obs_probs: vec![
                vec![0.7, 0.2, 0.1],
                vec![0.5, 0.3, 0.2],
                vec![0.3, 0.4, 0.3],
                vec![0.2, 0.3, 0.5],
                vec![0.1, 0.2, 0.7],
            ],
        }
    }
}

impl DiscreteToyModel {
    pub fn validate(&self) -> Result<()> {
        let sums_to_one = |w: &[f64]| w.iter().all(|p| *p >= 0.0) && (w.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
        if self.prior_weights.is_empty() || !sums_to_one(&self.prior_weights) {
            return Err(Error::InvalidConfig("toy prior weights must be non-negative and sum to 1".into()));
        }
        if self.obs_probs.len() != self.prior_weights.len() {
            return Err(Error::InvalidConfig("one outcome distribution per atom required".into()));
        }
        for row in &self.obs_probs {
            if row.len() != self.obs_values.len() || !sums_to_one(row) {
                return Err(Error::InvalidConfig("each toy likelihood row must cover the alphabet and sum to 1".into()));
            }
        }
        Ok(())
    }

    pub fn atom_count(&self) -> usize {
        self.prior_weights.len()
    }

    fn atom_of(&self, theta: &[f64]) -> Option<usize> {
        let v = theta[0];
        let idx = v.round();
        (idx == v && idx >= 0.0 && (idx as usize) < self.atom_count()).then_some(idx as usize)
    }

    /// Visits every dataset of size `n` with its probability under each atom.
    pub fn for_each_dataset(&self, n: usize, mut visit: impl FnMut(&[f64], &[f64])) {
        let k = self.obs_values.len();
        let mut idx = vec![0usize; n];
        let mut data = vec![0.0; n];
        let mut probs = vec![0.0; self.atom_count()];
        loop {
            for (d, &i) in data.iter_mut().zip(&idx) {
                *d = self.obs_values[i];
            }
            for (p, row) in probs.iter_mut().zip(&self.obs_probs) {
                *p = idx.iter().map(|&i| row[i]).product();
            }
            visit(&data, &probs);
            let mut pos = 0;
            loop {
                if pos == n {
                    return;
                }
                idx[pos] += 1;
                if idx[pos] < k {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Exact `(log Z_λ, ρ_λ(θ))` by enumerating every dataset.
    pub fn enumerate_posterior(
        &self,
        observed: &[f64],
        summary: &SummarySpec,
        distance: &DistanceSpec,
        lambda: f64,
    ) -> Result<(f64, Vec<f64>)> {
        let obs_stats = summary.summarize(observed)?;
        let mut mass = vec![0.0; self.atom_count()];
        let mut err = None;
        self.for_each_dataset(observed.len(), |data, probs| {
            let kernel = match summary.summarize(data).and_then(|s| distance.distance(&s, &obs_stats)) {
                Ok(d) => (-lambda * d).exp(),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            };
            for ((m, p), w) in mass.iter_mut().zip(probs).zip(&self.prior_weights) {
                *m += w * p * kernel;
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let z: f64 = mass.iter().sum();
        Ok((z.ln(), mass.iter().map(|m| m / z).collect()))
    }
}

impl GenerativeModel for DiscreteToyModel {
    fn param_dim(&self) -> usize {
        1
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::Atoms(self.atom_count())
    }

    fn param_names(&self) -> Vec<String> {
        vec!["atom".into()]
    }

    fn sample_prior(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![sample_categorical(&self.prior_weights, rng) as f64]
    }

    fn log_prior(&self, theta: &[f64]) -> f64 {
        self.atom_of(theta)
            .map_or(f64::NEG_INFINITY, |j| self.prior_weights[j].ln())
    }

    fn simulate(&self, theta: &[f64], n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        let row = &self.obs_probs[self.atom_of(theta).expect("theta is not an atom")];
        (0..n)
            .map(|_| self.obs_values[sample_categorical(row, rng)])
            .collect()
    }
}

pub(crate) fn sample_categorical(weights: &[f64], rng: &mut dyn RngCore) -> usize {
    let u: f64 = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthKind {
    TwoComponent,
    ThreeComponent,
}

/// Data-generating distribution `ℙ`: a Gaussian mixture, optionally clamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthGenerator {
    pub kind: TruthKind,
    pub components: Vec<Component>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<[f64; 2]>,
}

impl TruthGenerator {
    /// Draw from the two-component model itself (well-specified setting).
    pub fn two_component(p: f64, mu1: f64, sigma1: f64, mu2: f64, sigma2: f64, n: usize) -> Self {
        Self {
            kind: TruthKind::TwoComponent,
            components: vec![
                Component { weight: p, mean: mu1, sd: sigma1 },
                Component { weight: 1.0 - p, mean: mu2, sd: sigma2 },
            ],
            n,
            truncation: None,
        }
    }

    /// Default misspecified truth: weights (0.5, 0.3, 0.2), means (−2, 0, 3),
    /// sds (0.5, 1, 0.5).
    pub fn three_component(n: usize) -> Self {
        Self {
            kind: TruthKind::ThreeComponent,
            components: vec![
                Component { weight: 0.5, mean: -2.0, sd: 0.5 },
                Component { weight: 0.3, mean: 0.0, sd: 1.0 },
                Component { weight: 0.2, mean: 3.0, sd: 0.5 },
            ],
            n,
            truncation: None,
        }
    }

    pub fn with_truncation(mut self, lo: f64, hi: f64) -> Self {
        self.truncation = Some([lo, hi]);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let expected = match self.kind {
            TruthKind::TwoComponent => 2,
            TruthKind::ThreeComponent => 3,
        };
        if self.components.len() != expected {
            return Err(Error::InvalidConfig(format!(
                "{:?} truth needs {expected} components, got {}",
                self.kind,
                self.components.len()
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidConfig("truth sample size must be at least 1".into()));
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 || self.components.iter().any(|c| c.weight < 0.0) {
            return Err(Error::InvalidConfig(format!("truth weights must be non-negative and sum to 1, got {total}")));
        }
        if self.components.iter().any(|c| !(c.sd > 0.0 && c.sd.is_finite() && c.mean.is_finite())) {
            return Err(Error::InvalidConfig("truth components need finite means and positive sds".into()));
        }
        if let Some([a, b]) = self.truncation {
            if !(a < b) {
                return Err(Error::InvalidConfig("truncation interval must satisfy a < b".into()));
            }
        }
        Ok(())
    }

    /// `n` observations from `ℙ`, clamped into the truncation interval if set.
    pub fn generate(&self, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        self.validate()?;
        let weights: Vec<f64> = self.components.iter().map(|c| c.weight).collect();
        let draws = (0..self.n)
            .map(|_| {
                let c = &self.components[sample_categorical(&weights, rng)];
                let x = Normal::new(c.mean, c.sd).expect("validated sd").sample(rng);
                match self.truncation {
                    Some([a, b]) => x.clamp(a, b),
                    None => x,
                }
            })
            .collect();
        Ok(draws)
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.components
            .iter()
            .map(|c| c.weight * (c.sd * c.sd + c.mean * c.mean))
            .sum::<f64>()
            - m * m
    }

    /// `ℙ(H)`: expected per-observation features under the truth (after the
    /// truncation and the statistic's own clamp), by piecewise Simpson
    /// quadrature split at every discontinuity of the feature map.
    pub fn expected_features(&self, summary: &SummarySpec) -> Vec<f64> {
        use statrs::distribution::{Continuous, ContinuousCDF, Normal as SNormal};
        let m = summary.dim(1);
        let mut out = vec![0.0; m];
        let mut buf = vec![0.0; m];
        let clamp_all = |x: f64| {
            let x = match self.truncation {
                Some([a, b]) => x.clamp(a, b),
                None => x,
            };
            summary.clamp_value(x)
        };
        // effective clamp interval of the composed maps
        let lo_edge = clamp_all(f64::NEG_INFINITY);
        let hi_edge = clamp_all(f64::INFINITY);
        for c in &self.components {
            let dist = SNormal::new(c.mean, c.sd).expect("validated sd");
            let mut lo = c.mean - 12.0 * c.sd;
            let mut hi = c.mean + 12.0 * c.sd;
            if lo_edge.is_finite() {
                summary.features_of(lo_edge, &mut buf);
                let mass = dist.cdf(lo_edge);
                out.iter_mut().zip(&buf).for_each(|(o, f)| *o += c.weight * mass * f);
                lo = lo.max(lo_edge);
            }
            if hi_edge.is_finite() {
                summary.features_of(hi_edge, &mut buf);
                let mass = 1.0 - dist.cdf(hi_edge);
                out.iter_mut().zip(&buf).for_each(|(o, f)| *o += c.weight * mass * f);
                hi = hi.min(hi_edge);
            }
            if lo >= hi {
                continue;
            }
            let mut knots = vec![lo];
            knots.extend(summary.breakpoints().into_iter().filter(|b| *b > lo && *b < hi));
            knots.push(hi);
            for w in knots.windows(2) {
                let (a, b) = (w[0], w[1]);
                let steps = 2000;
                let h = (b - a) / steps as f64;
                for i in 0..=steps {
                    // nudge endpoints inside so indicator values match the open piece
                    let x = (a + h * i as f64).clamp(a + 1e-12 * h, b - 1e-12 * h);
                    let coef = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    summary.features_of(x, &mut buf);
                    let wgt = c.weight * coef * h / 3.0 * dist.pdf(x);
                    out.iter_mut().zip(&buf).for_each(|(o, f)| *o += wgt * f);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn degenerate_mixture_is_reproducible_normal() {
        let model = MixtureModel::new(0.8);
        let theta = MixtureModel::encode(0.0, 1.0, 0.0, 1.0);
        let a = simulate_dataset(&model, &theta, 4, &mut stream(1, Purpose::Auxiliary, 0, 0)).unwrap();
        let b = simulate_dataset(&model, &theta, 4, &mut stream(1, Purpose::Auxiliary, 0, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|x| x.is_finite() && x.abs() < 10.0));
    }

    #[test]
    fn mixture_weight_controls_component_frequency() {
        // P(X < 5) = 0.8·Φ(5) + 0.2·Φ(−5) ≈ 0.8; binomial sd at 1e5 is 0.00126
        let model = MixtureModel::new(0.8);
        let theta = MixtureModel::encode(0.0, 1.0, 10.0, 1.0);
        let x = model.simulate(&theta, 100_000, &mut stream(3, Purpose::Auxiliary, 0, 0));
        let frac = x.iter().filter(|v| **v < 5.0).count() as f64 / x.len() as f64;
        assert!((frac - 0.8).abs() < 0.004, "{frac}");
    }

    #[test]
    fn non_finite_theta_rejected() {
        let model = MixtureModel::default();
        let mut rng = stream(0, Purpose::Auxiliary, 0, 0);
        assert!(matches!(
            simulate_dataset(&model, &[0.0, f64::NAN, 0.0, 0.0], 3, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
        assert!(prior_logpdf(&model, &[0.0, 0.0, f64::INFINITY, 0.0]).is_err());
        assert!(simulate_dataset(&model, &[0.0; 4], 0, &mut rng).is_err());
    }

    #[test]
    fn gaussian_prior_at_mode() {
        let prior = GaussianPrior::isotropic(4, 1.0);
        let expected = -2.0 * (2.0 * std::f64::consts::PI).ln();
        assert!((prior.log_density(&[0.0; 4]) - expected).abs() < 1e-14);
    }

    #[test]
    fn gaussian_prior_matches_reference_density() {
        use statrs::distribution::{Continuous, Normal as SNormal};
        let prior = GaussianPrior::isotropic(4, 100.0);
        let reference: f64 = (0..4).map(|_| SNormal::new(0.0, 10.0).unwrap().ln_pdf(1.0)).sum();
        assert!((prior.log_density(&[1.0; 4]) - reference).abs() < 1e-12);
    }

    #[test]
    fn single_atom_point_mass_toy() {
        let toy = DiscreteToyModel {
            prior_weights: vec![1.0],
            obs_values: vec![4.0, 9.0],
            obs_probs: vec![vec![0.0, 1.0]],
        };
        toy.validate().unwrap();
        let x = toy.simulate(&[0.0], 5, &mut stream(0, Purpose::Auxiliary, 0, 0));
        assert_eq!(x, vec![9.0; 5]);
        assert_eq!(toy.log_prior(&[0.5]), f64::NEG_INFINITY);
        assert_eq!(toy.log_prior(&[1.0]), f64::NEG_INFINITY);
    }

    #[test]
    fn toy_enumeration_rows_sum_to_one() {
        let toy = DiscreteToyModel::default();
        toy.validate().unwrap();
        let mut totals = vec![0.0; toy.atom_count()];
        let mut count = 0;
        toy.for_each_dataset(3, |_, probs| {
            count += 1;
            totals.iter_mut().zip(probs).for_each(|(t, p)| *t += p);
        });
        assert_eq!(count, 27);
        assert!(totals.iter().all(|t| (t - 1.0).abs() < 1e-12));
    }

    #[test]
    fn truncated_truth_stays_in_interval() {
        let gen = TruthGenerator::three_component(5000).with_truncation(-5.0, 5.0);
        let mut spread = gen.clone();
        spread.components[2].sd = 4.0;
        for g in [gen, spread] {
            let x = g.generate(&mut stream(9, Purpose::Observations, 0, 0)).unwrap();
            assert!(x.iter().all(|v| (-5.0..=5.0).contains(v)));
        }
    }

    #[test]
    fn two_component_truth_is_reproducible() {
        let gen = TruthGenerator::two_component(0.8, 0.0, 1.0, 2.0, 0.5, 90);
        let a = gen.generate(&mut stream(4, Purpose::Observations, 0, 0)).unwrap();
        let b = gen.generate(&mut stream(4, Purpose::Observations, 0, 0)).unwrap();
        assert_eq!(a.len(), 90);
        assert_eq!(a, b);
        assert!(a.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn invalid_truth_weights() {
        let mut gen = TruthGenerator::three_component(10);
        gen.components[0].weight = 0.6;
        assert!(gen.validate().is_err());
        gen.kind = TruthKind::TwoComponent;
        assert!(gen.validate().is_err());
    }

    #[test]
    fn expected_features_match_analytic_moments() {
        let gen = TruthGenerator::three_component(10);
        let spec = SummarySpec { features: crate::statistics::Features::Moments { orders: vec![1, 2] }, clamp: None };
        let e = gen.expected_features(&spec);
        assert!((e[0] - gen.mean()).abs() < 1e-9);
        assert!((e[1] - (gen.variance() + gen.mean().powi(2))).abs() < 1e-9);
        // indicator expectation equals the mixture cdf
        use statrs::distribution::{ContinuousCDF, Normal as SNormal};
        let ind = gen.expected_features(&SummarySpec::indicator_grid(vec![0.5]));
        let cdf: f64 = gen.components.iter().map(|c| c.weight * SNormal::new(c.mean, c.sd).unwrap().cdf(0.5)).sum();
        assert!((ind[0] - cdf).abs() < 1e-9);
    }
}
