//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the crate's closed forms: likelihoods are formed
//! with explicit dense matrices and minimized numerically.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twogroup::TwoGroupSample;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sample with group sizes drawn from `n_range` and unit-scale values.
pub fn random_sample<R: Rng>(rng: &mut R, n_range: std::ops::RangeInclusive<usize>) -> TwoGroupSample {
    let n0 = rng.random_range(n_range.clone());
    let n1 = rng.random_range(n_range);
    let shift: f64 = rng.random_range(-1.0..1.0);
    let s0: f64 = rng.random_range(0.3..2.0);
    let s1: f64 = rng.random_range(0.3..2.0);
    let y0 = (0..n0).map(|_| s0 * rng.random_range(-1.0..1.0)).collect();
    let y1 = (0..n1)
        .map(|_| shift + s1 * rng.random_range(-1.0..1.0))
        .collect();
    TwoGroupSample::new(y0, y1)
}

/// Cholesky factor of a symmetric positive-definite matrix (row-major).
fn cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                assert!(s > 0.0, "matrix not positive definite");
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    l
}

/// `ln|Σ| + rᵀΣ⁻¹r` by Cholesky.
pub fn dense_logdet_quad(sigma: &[Vec<f64>], r: &[f64]) -> f64 {
    let l = cholesky(sigma);
    let n = r.len();
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut s = r[i];
        for k in 0..i {
            s -= l[i][k] * z[k];
        }
        z[i] = s / l[i][i];
    }
    let logdet: f64 = (0..n).map(|i| 2.0 * l[i][i].ln()).sum();
    logdet + z.iter().map(|v| v * v).sum::<f64>()
}

/// Negative log-likelihood (without 2π constants) with `Σ1 = τ11ᵀ + v1 I`
/// built explicitly.
pub fn dense_negloglik(sample: &TwoGroupSample, mu: f64, v0: f64, v1: f64, tau: f64) -> f64 {
    let n0 = sample.y0.len() as f64;
    let q0: f64 = sample.y0.iter().map(|y| (y - mu) * (y - mu)).sum();
    let n1 = sample.y1.len();
    let sigma: Vec<Vec<f64>> = (0..n1)
        .map(|i| (0..n1).map(|j| tau + if i == j { v1 } else { 0.0 }).collect())
        .collect();
    let r: Vec<f64> = sample.y1.iter().map(|y| y - mu).collect();
    n0 * v0.ln() + q0 / v0 + dense_logdet_quad(&sigma, &r)
}

/// Golden-section minimum of a unimodal function on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Numeric minimum over `(v0, v1, ρ ≥ 0)` of the dense likelihood at fixed
/// `μ`. Variances are searched on a log scale around the data scale and `ρ`
/// on `ln ρ ∈ [−40, 40]`, which reaches the `ρ = 0` boundary to within
/// `e⁻⁴⁰`.
pub fn numeric_profile_min(sample: &TwoGroupSample, mu: f64) -> f64 {
    let n0 = sample.y0.len() as f64;
    let q0: f64 = sample.y0.iter().map(|y| (y - mu) * (y - mu)).sum();
    let scale0 = (q0 / n0).ln();
    let (_, part0) = golden_min(
        |lv| {
            let v = lv.exp();
            n0 * v.ln() + q0 / v
        },
        scale0 - 30.0,
        scale0 + 30.0,
        1e-11,
    );

    let q1: f64 = sample.y1.iter().map(|y| (y - mu) * (y - mu)).sum::<f64>() / sample.y1.len() as f64;
    let scale1 = q1.ln();
    let inner = |rho: f64| {
        golden_min(
            |lv| {
                let v1 = lv.exp();
                let one = TwoGroupSample::new(vec![], sample.y1.clone());
                dense_negloglik(&one, mu, 1.0, v1, rho * v1)
            },
            scale1 - 30.0,
            scale1 + 30.0,
            1e-11,
        )
        .1
    };
    let (_, part1) = golden_min(|lr| inner(lr.exp()), -40.0, 40.0, 1e-9);
    part0 + part1
}

/// `(E[δ|y1], Var[δ|y1])` for `δ ~ N(0, τ)`, `y1 ~ N(μ + δ, v1 I)`, by
/// composite Simpson integration over a wide `δ` grid.
pub fn posterior_moments_quadrature(y1: &[f64], mu: f64, v1: f64, tau: f64) -> (f64, f64) {
    let log_post = |d: f64| -> f64 {
        let ll: f64 = y1.iter().map(|y| -(y - mu - d) * (y - mu - d) / (2.0 * v1)).sum();
        ll - d * d / (2.0 * tau)
    };
    // centre the grid on the mode, found numerically
    let sd_guess = tau.sqrt().min((v1 / y1.len() as f64).sqrt());
    let (mode, _) = golden_min(|d| -log_post(d), -50.0, 50.0, 1e-12);
    let half = 40.0 * sd_guess;
    let m = 20_000;
    let h = 2.0 * half / m as f64;
    let peak = log_post(mode);
    let (mut z, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for i in 0..=m {
        let d = mode - half + i as f64 * h;
        let w = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let p = w * (log_post(d) - peak).exp();
        z += p;
        s1 += p * d;
        s2 += p * d * d;
    }
    let mean = s1 / z;
    (mean, s2 / z - mean * mean)
}

/// Global minimum of `f` on a dense uniform grid.
pub fn brute_force_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let mut best = (lo, f64::INFINITY);
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}
