//! Summary statistics and distances between statistic vectors.
//!
//! Every statistic except `identity` is an empirical mean of a per-observation
//! feature map `H(x)`, so `S(Y^n) = (1/n) Σ H(Y_i)`. Distances always act on
//! statistic space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature family averaged over a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Features {
    /// `(x, x², x³, x⁴, 1{x<−1}, 1{x>2})`. With `scale = s` the powers use `x/s`,
    /// which brings the feature bound to 1 when `s` covers the clamp interval.
    MomentsAndTails {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    /// `(1{x<t_1}, …, 1{x<t_m})` for increasing thresholds.
    IndicatorGrid { thresholds: Vec<f64> },
    /// Raw empirical moments `x^k` for the listed orders.
    Moments { orders: Vec<i32> },
    /// The (clamped) dataset itself.
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummarySpec {
    pub features: Features,
    /// Observations are clamped into `[a, b]` before the feature map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clamp: Option<[f64; 2]>,
}

/// `count` equally spaced thresholds covering `[lo, hi]`.
pub fn equispaced_thresholds(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

impl SummarySpec {
    pub fn moments_and_tails() -> Self {
        Self { features: Features::MomentsAndTails { scale: None }, clamp: None }
    }

    pub fn indicator_grid(thresholds: Vec<f64>) -> Self {
        Self { features: Features::IndicatorGrid { thresholds }, clamp: None }
    }

    pub fn sample_mean() -> Self {
        Self { features: Features::Moments { orders: vec![1] }, clamp: None }
    }

    pub fn identity() -> Self {
        Self { features: Features::Identity, clamp: None }
    }

    pub fn with_clamp(mut self, lo: f64, hi: f64) -> Self {
        self.clamp = Some([lo, hi]);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some([a, b]) = self.clamp {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidConfig(format!("clamp interval [{a}, {b}] is not a proper interval")));
            }
        }
        match &self.features {
            Features::MomentsAndTails { scale: Some(s) } if !(s.is_finite() && *s > 0.0) => {
                Err(Error::InvalidConfig(format!("moment scale must be positive, got {s}")))
            }
            Features::IndicatorGrid { thresholds } => {
                if thresholds.is_empty() {
                    return Err(Error::InvalidConfig("indicator grid needs at least one threshold".into()));
                }
                if thresholds.windows(2).any(|w| !(w[0] < w[1])) || thresholds.iter().any(|t| !t.is_finite()) {
                    return Err(Error::InvalidConfig("indicator thresholds must be finite and strictly increasing".into()));
                }
                Ok(())
            }
            Features::Moments { orders } if orders.is_empty() => {
                Err(Error::InvalidConfig("moment statistic needs at least one order".into()))
            }
            _ => Ok(()),
        }
    }

    /// Length of the statistic vector for datasets of size `n`.
    pub fn dim(&self, n: usize) -> usize {
        match &self.features {
            Features::MomentsAndTails { .. } => 6,
            Features::IndicatorGrid { thresholds } => thresholds.len(),
            Features::Moments { orders } => orders.len(),
            Features::Identity => n,
        }
    }

    #[inline]
    pub fn clamp_value(&self, x: f64) -> f64 {
        match self.clamp {
            Some([a, b]) => x.clamp(a, b),
            None => x,
        }
    }

    /// Per-observation feature map `H(x)`, written into `out` (length `dim`).
    /// Not defined for `identity`.
    pub fn features_of(&self, x: f64, out: &mut [f64]) {
        let x = self.clamp_value(x);
        match &self.features {
            Features::MomentsAndTails { scale } => {
                let y = scale.map_or(x, |s| x / s);
                let y2 = y * y;
                out[0] = y;
                out[1] = y2;
                out[2] = y2 * y;
                out[3] = y2 * y2;
                out[4] = if x < -1.0 { 1.0 } else { 0.0 };
                out[5] = if x > 2.0 { 1.0 } else { 0.0 };
            }
            Features::IndicatorGrid { thresholds } => {
                for (o, t) in out.iter_mut().zip(thresholds) {
                    *o = if x < *t { 1.0 } else { 0.0 };
                }
            }
            Features::Moments { orders } => {
                for (o, k) in out.iter_mut().zip(orders) {
                    *o = x.powi(*k);
                }
            }
            Features::Identity => panic!("identity statistic has no per-observation feature map"),
        }
    }

    /// Points where the feature map is discontinuous (clamp edges included).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match &self.features {
            Features::MomentsAndTails { .. } => vec![-1.0, 2.0],
            Features::IndicatorGrid { thresholds } => thresholds.clone(),
            _ => Vec::new(),
        };
        if let Some([a, b]) = self.clamp {
            pts.push(a);
            pts.push(b);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Certified bound `K` on `|h_i(x)|`, when the features are bounded.
    pub fn feature_bound(&self) -> Option<f64> {
        let reach = self.clamp.map(|[a, b]| a.abs().max(b.abs()));
        match &self.features {
            Features::IndicatorGrid { .. } => Some(1.0),
            Features::MomentsAndTails { scale } => {
                let r = reach? / scale.unwrap_or(1.0);
                Some((1..=4).map(|k| r.powi(k)).fold(1.0, f64::max))
            }
            Features::Moments { orders } => {
                let r = reach?;
                Some(orders.iter().map(|&k| r.powi(k)).fold(0.0, f64::max))
            }
            Features::Identity => reach,
        }
    }

    /// Summary statistic of a dataset.
    pub fn summarize(&self, data: &[f64]) -> Result<Vec<f64>> {
        if data.is_empty() {
            return Err(Error::InvalidInput("cannot summarize an empty dataset".into()));
        }
        if let Features::Identity = self.features {
            return Ok(data.iter().map(|&x| self.clamp_value(x)).collect());
        }
        let m = self.dim(data.len());
        let mut acc = vec![0.0; m];
        let mut buf = vec![0.0; m];
        for &x in data {
            self.features_of(x, &mut buf);
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b;
            }
        }
        let n = data.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Ok(acc)
    }
}

/// Metric on statistic space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistanceSpec {
    /// `‖s1 − s2‖_p`, `p ≥ 1`.
    Lp { p: f64 },
    /// Max-norm.
    Sup,
    /// `‖s1 − s2‖₂ / len`; for the identity statistic this is `1/√n` times
    /// the empirical L2 distance.
    ScaledEmpiricalL2,
}

impl DistanceSpec {
    pub fn euclidean() -> Self {
        DistanceSpec::Lp { p: 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DistanceSpec::Lp { p } if !(p.is_finite() && *p >= 1.0) => {
                Err(Error::InvalidConfig(format!("lp distance needs p >= 1, got {p}")))
            }
            _ => Ok(()),
        }
    }

    pub fn distance(&self, s1: &[f64], s2: &[f64]) -> Result<f64> {
        if s1.len() != s2.len() {
            return Err(Error::InvalidInput(format!(
                "statistic lengths differ: {} vs {}",
                s1.len(),
                s2.len()
            )));
        }
        let diffs = s1.iter().zip(s2).map(|(a, b)| (a - b).abs());
        Ok(match *self {
            DistanceSpec::Lp { p: 2.0 } => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            DistanceSpec::Lp { p: 1.0 } => diffs.sum(),
            DistanceSpec::Lp { p } => {
                // scale by the max entry so large p does not overflow
                let max = s1.iter().zip(s2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if max == 0.0 {
                    0.0
                } else {
                    max * diffs.map(|d| (d / max).powf(p)).sum::<f64>().powf(1.0 / p)
                }
            }
            DistanceSpec::Sup => diffs.fold(0.0, f64::max),
            DistanceSpec::ScaledEmpiricalL2 => {
                if s1.is_empty() {
                    0.0
                } else {
                    diffs.map(|d| d * d).sum::<f64>().sqrt() / s1.len() as f64
                }
            }
        })
    }

    /// Exponent `p` of the norm (`inf` for the max-norm).
    pub fn norm_order(&self) -> f64 {
        match *self {
            DistanceSpec::Lp { p } => p,
            DistanceSpec::Sup => f64::INFINITY,
            DistanceSpec::ScaledEmpiricalL2 => 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_and_tails_by_hand() {
        let s = SummarySpec::moments_and_tails().summarize(&[1.0, -2.0]).unwrap();
        assert_eq!(s, vec![-0.5, 2.5, -3.5, 8.5, 0.5, 0.0]);
    }

    #[test]
    fn indicator_grid_single_threshold() {
        let s = SummarySpec::indicator_grid(vec![0.0]).summarize(&[-1.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(s, vec![0.5]);
    }

    #[test]
    fn clamp_applies_before_features() {
        let spec = SummarySpec::moments_and_tails().with_clamp(-5.0, 5.0);
        assert_eq!(spec.summarize(&[7.0]).unwrap(), spec.summarize(&[5.0]).unwrap());
        assert_eq!(spec.feature_bound(), Some(625.0));
        let scaled = SummarySpec { features: Features::MomentsAndTails { scale: Some(5.0) }, clamp: Some([-5.0, 5.0]) };
        assert_eq!(scaled.feature_bound(), Some(1.0));
        assert_eq!(scaled.summarize(&[5.0]).unwrap(), vec![1.0, 1.0, 1.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(matches!(SummarySpec::moments_and_tails().summarize(&[]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(DistanceSpec::euclidean().distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(DistanceSpec::Sup.distance(&[1.0, -2.0, 0.0], &[1.0, 1.0, 0.0]).unwrap(), 3.0);
        let d = DistanceSpec::ScaledEmpiricalL2.distance(&[0.0; 4], &[2.0; 4]).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!(DistanceSpec::Sup.distance(&[0.0], &[0.0, 1.0]).is_err());
        let d3 = DistanceSpec::Lp { p: 3.0 }.distance(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert!((d3 - 9f64.powf(1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn thresholds_cover_interval() {
        let t = equispaced_thresholds(-5.0, 5.0, 21);
        assert_eq!(t.len(), 21);
        assert_eq!(t[0], -5.0);
        assert_eq!(t[20], 5.0);
        assert!((t[10]).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(SummarySpec::indicator_grid(vec![1.0, 0.0]).validate().is_err());
        assert!(SummarySpec::moments_and_tails().with_clamp(1.0, -1.0).validate().is_err());
        assert!(DistanceSpec::Lp { p: 0.5 }.validate().is_err());
    }
}
