//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Simpson over consecutive pieces `[p_0, p_1], [p_1, p_2], …`.
pub fn simpson_pieces(f: &dyn Fn(f64) -> f64, points: &[f64], tol: f64) -> f64 {
    points.windows(2).map(|w| simpson(f, w[0], w[1], tol / points.len() as f64)).sum()
}

fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
}

/// Gaussian location toy (`θ ~ N(0, ϑ)`, `X_i ~ N(θ, σ²)`, `S` = sample mean,
/// `d = |Δ|`): `(Z_λ, ρ_{λ,X}(S))` by nested quadrature over `(θ, s)`, using
/// `S | θ ~ N(θ, σ²/n)`.
pub fn gaussian_toy_quadrature(prior_var: f64, noise_sd: f64, n: usize, s_obs: f64, lambda: f64) -> (f64, f64) {
    let tau = noise_sd / (n as f64).sqrt();
    let sp = prior_var.sqrt();
    let inner = |theta: f64, moment: u32| {
        let lo = theta - 12.0 * tau;
        let hi = theta + 12.0 * tau;
        let g = |s: f64| normal_pdf(s, theta, tau) * (-lambda * (s - s_obs).abs()).exp() * s.powi(moment as i32);
        if s_obs > lo && s_obs < hi {
            simpson_pieces(&g, &[lo, s_obs, hi], 1e-13)
        } else {
            simpson(&g, lo, hi, 1e-13)
        }
    };
    let outer = |moment: u32| {
        let h = |theta: f64| normal_pdf(theta, 0.0, sp) * inner(theta, moment);
        simpson_pieces(&h, &[-12.0 * sp, s_obs - 6.0 * tau, s_obs + 6.0 * tau, 12.0 * sp], 1e-12)
    };
    let z = outer(0);
    (z, outer(1) / z)
}

/// Exact pseudo-posterior over the atoms of a finite model with the identity
/// statistic and Euclidean distance, by looping over every dataset.
/// Returns `(Z_λ, ρ_λ(atom))`.
pub fn discrete_posterior(
    prior: &[f64],
    values: &[f64],
    probs: &[Vec<f64>],
    observed: &[f64],
    lambda: f64,
) -> (f64, Vec<f64>) {
    let n = observed.len();
    let k = values.len();
    let mut mass = vec![0.0; prior.len()];
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut idx = Vec::with_capacity(n);
        for _ in 0..n {
            idx.push(c % k);
            c /= k;
        }
        let d2: f64 = idx.iter().zip(observed).map(|(&i, y)| (values[i] - y).powi(2)).sum();
        let kern = (-lambda * d2.sqrt()).exp();
        for (j, m) in mass.iter_mut().enumerate() {
            let p: f64 = idx.iter().map(|&i| probs[j][i]).product();
            *m += prior[j] * p * kern;
        }
    }
    let z: f64 = mass.iter().sum();
    (z, mass.into_iter().map(|m| m / z).collect())
}

/// `(Σw)² / Σw²` on raw weights.
pub fn naive_ess(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    s * s / s2
}

/// ESS after tilting each particle from `lambda_old` to `lambda_new`, by
/// direct exponentiation.
pub fn naive_tilted_ess(weights: &[f64], dists: &[Vec<f64>], lambda_old: f64, lambda_new: f64) -> f64 {
    let w: Vec<f64> = weights
        .iter()
        .zip(dists)
        .map(|(w, d)| {
            let new: f64 = d.iter().map(|x| (-lambda_new * x).exp()).sum();
            let old: f64 = d.iter().map(|x| (-lambda_old * x).exp()).sum();
            w * new / old
        })
        .collect();
    naive_ess(&w)
}

/// Log pseudo-marginal MH ratio by plain summation.
pub fn naive_log_ratio(prior_new: f64, dists_new: &[f64], prior_old: f64, dists_old: &[f64], lambda: f64) -> f64 {
    let num: f64 = dists_new.iter().map(|d| (-lambda * d).exp()).sum::<f64>() * prior_new;
    let den: f64 = dists_old.iter().map(|d| (-lambda * d).exp()).sum::<f64>() * prior_old;
    (num / den).ln()
}

/// Systematic resampling copy counts computed from the cumulative-sum
/// definition: index `j` receives `#{k : C_{j-1} ≤ (u + k)/N < C_j}`.
pub fn naive_systematic_counts(weights: &[f64], u: f64) -> Vec<usize> {
    let n = weights.len();
    let mut counts = vec![0; n];
    for k in 0..n {
        let pos = (u + k as f64) / n as f64;
        let mut cum = 0.0;
        for (j, w) in weights.iter().enumerate() {
            cum += w;
            if pos < cum || j + 1 == n {
                counts[j] += 1;
                break;
            }
        }
    }
    counts
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
