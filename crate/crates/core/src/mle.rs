//! Marginal maximum-likelihood fit of the nuisance parameters.
//!
//! With the effect integrated out, the test group is Gaussian with
//! covariance `τ·11ᵀ + v1·I`. For fixed `μ` the optimal `v0`, `ρ` and `v1`
//! have closed forms, so the fit reduces to minimizing a one-dimensional
//! concentrated cost `f(μ)`. That cost is only piecewise smooth (the `ρ`
//! estimate switches branch where `β = α`), so the search scans a dense grid
//! over a data-driven bracket and then refines with golden-section search.

use crate::error::{Error, Group, Result};
use crate::optimize::{golden_section, grid_argmin};
use crate::types::{summarize, validate, ConcentratedStats, GroupSummary, NuisanceParams, TwoGroupSample};

/// Controls for the one-dimensional search over `μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Number of evenly spaced grid evaluations over the bracket.
    pub grid_points: usize,
    /// Bracket half-extension, in units of the combined spread scale.
    pub bracket_expansion: f64,
    /// Golden-section stopping width, relative to the bracket width.
    pub refine_rel_tol: f64,
    /// Relative floor applied to variance estimates.
    pub variance_floor: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            grid_points: 4097,
            bracket_expansion: 3.0,
            refine_rel_tol: 1e-12,
            variance_floor: 1e-12,
        }
    }
}

impl FitConfig {
    pub fn check(&self) -> Result<()> {
        if self.grid_points < 3 {
            return Err(Error::InvalidParams(format!(
                "grid_points must be at least 3, got {}",
                self.grid_points
            )));
        }
        for (name, v) in [
            ("bracket_expansion", self.bracket_expansion),
            ("refine_rel_tol", self.refine_rel_tol),
            ("variance_floor", self.variance_floor),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `α`, `β`, `γ` of the test group at mean `μ`.
///
/// `α` is evaluated as `m2 + n·(ȳ − μ)²` and `γ` as `n·m2`; both are exact
/// rewrites of `yᵀy − μn(2ȳ − μ)` and `α·n − β`, and the second makes
/// `γ ≥ 0` hold without any clamping.
pub fn abc_stats(s1: &GroupSummary, mu: f64) -> ConcentratedStats {
    let n = s1.n as f64;
    let d = s1.mean - mu;
    let alpha = s1.sq_dev_from(mu);
    let beta = n * n * d * d;
    let gamma = n * s1.m2;
    ConcentratedStats {
        alpha,
        beta,
        gamma,
        n: s1.n,
    }
}

/// Control-group noise variance `‖y0 − μ1‖² / n0`, floored at
/// `floor · (mean square of y0)`.
pub fn v0_hat(s0: &GroupSummary, mu: f64, floor: f64) -> f64 {
    let n = s0.n as f64;
    let v = s0.sq_dev_from(mu) / n;
    v.max(floor * s0.sumsq / n + f64::MIN_POSITIVE)
}

/// Signal-to-noise estimate: `(β − α)/γ` when `β ≥ α`, else `0`.
///
/// Fails with `DegenerateGroup` when `β ≥ α` but `γ` is zero relative to
/// `n·α`, which only happens for a (numerically) constant test group.
pub fn rho_hat(stats: &ConcentratedStats, floor: f64) -> Result<f64> {
    let excess = stats.beta - stats.alpha;
    if excess < 0.0 {
        return Ok(0.0);
    }
    if stats.gamma <= floor * stats.n as f64 * stats.alpha {
        return Err(Error::DegenerateGroup { group: Group::Test });
    }
    Ok(excess / stats.gamma)
}

/// Test-group noise variance `(α + ργ) / (n1·(1 + ρ·n1))`.
pub fn v1_hat(stats: &ConcentratedStats, rho: f64, floor: f64) -> f64 {
    let n = stats.n as f64;
    let v = if rho.is_infinite() {
        stats.gamma / (n * n)
    } else {
        (stats.alpha + rho * stats.gamma) / (n * (1.0 + rho * n))
    };
    v.max(floor * stats.alpha / n + f64::MIN_POSITIVE)
}

/// Concentrated cost from precomputed group summaries.
pub fn concentrated_cost_summaries(s0: &GroupSummary, s1: &GroupSummary, mu: f64, floor: f64) -> Result<f64> {
    let n0 = s0.n as f64;
    let n1 = s1.n as f64;
    let v0 = v0_hat(s0, mu, floor);
    let stats = abc_stats(s1, mu);
    let rho = rho_hat(&stats, floor)?;
    let spread = (stats.alpha + rho * stats.gamma).max(floor * s1.sumsq + f64::MIN_POSITIVE);
    Ok(n0 * v0.ln() + n1 * spread.ln() - (n1 - 1.0) * (rho * n1).ln_1p())
}

/// `f(μ) − f(reference)` evaluated without subtracting two large costs.
///
/// Each log term is rewritten as `ln_1p` of an increment that is formed
/// exactly from `reference − μ`: `v̂0` and `α` are quadratic in `μ`, and on
/// the `ρ̂ > 0` branch the test-group term reduces to
/// `ln β + (n1 − 1) ln(γ/(n1 − 1))` with `γ` independent of `μ`. The
/// refinement minimizes this difference so that the located `μ̂` is not
/// limited by rounding noise of order `ε·|f|`.
pub(crate) fn cost_difference(
    s0: &GroupSummary,
    s1: &GroupSummary,
    mu: f64,
    reference: f64,
    floor: f64,
) -> f64 {
    let absolute = || {
        let a = concentrated_cost_summaries(s0, s1, mu, floor).unwrap_or(f64::INFINITY);
        let b = concentrated_cost_summaries(s0, s1, reference, floor).unwrap_or(f64::INFINITY);
        a - b
    };
    if mu == reference {
        return 0.0;
    }
    let n0 = s0.n as f64;
    let n1 = s1.n as f64;
    let step = reference - mu;

    let e_ref = s0.mean - reference;
    let e = s0.mean - mu;
    let v_ref = s0.m2 / n0 + e_ref * e_ref;
    let v0_floor = floor * s0.sumsq / n0 + f64::MIN_POSITIVE;
    let dv = step * (e + e_ref);
    if v_ref <= v0_floor || v_ref + dv <= v0_floor {
        return absolute();
    }
    let control = n0 * (dv / v_ref).ln_1p();

    let st = abc_stats(s1, mu);
    let st_ref = abc_stats(s1, reference);
    let (rho, rho_ref) = match (rho_hat(&st, floor), rho_hat(&st_ref, floor)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return absolute(),
    };
    let d_ref = s1.mean - reference;
    let d = s1.mean - mu;
    let test = match (rho > 0.0, rho_ref > 0.0) {
        (true, true) => {
            let ratio = step / d_ref;
            if ratio > -1.0 {
                2.0 * ratio.ln_1p()
            } else {
                2.0 * (d.abs() / d_ref.abs()).ln()
            }
        }
        (false, false) => {
            if !(st_ref.alpha > 0.0) {
                return absolute();
            }
            n1 * (n1 * step * (d + d_ref) / st_ref.alpha).ln_1p()
        }
        _ => {
            let term = |s: &ConcentratedStats, r: f64| {
                n1 * (s.alpha + r * s.gamma).ln() - (n1 - 1.0) * (r * n1).ln_1p()
            };
            term(&st, rho) - term(&st_ref, rho_ref)
        }
    };
    control + test
}

/// `f(μ) = n0 ln v̂0 + n1 ln(α + ρ̂γ) − (n1 − 1) ln(1 + ρ̂ n1)`.
///
/// This differs from the minimum of [`full_negloglik`] over `(v0, v1, ρ)`
/// at the same `μ` by the constant [`concentration_offset`].
pub fn concentrated_cost(sample: &TwoGroupSample, mu: f64) -> Result<f64> {
    let s0 = summarize(&sample.y0)?;
    let s1 = summarize(&sample.y1)?;
    concentrated_cost_summaries(&s0, &s1, mu, FitConfig::default().variance_floor)
}

/// `min over (v0, v1, ρ) of full_negloglik(μ) − concentrated_cost(μ)`,
/// which is `n0 + n1 − n1·ln n1` for every `μ`.
pub fn concentration_offset(n0: usize, n1: usize) -> f64 {
    let n1f = n1 as f64;
    (n0 + n1) as f64 - n1f * n1f.ln()
}

/// Marginal negative log-likelihood (up to the `2π` constant):
/// `n0 ln v0 + ‖y0 − μ1‖²/v0 + ln|Σ1| + ‖y1 − μ1‖²_{Σ1⁻¹}` with
/// `Σ1 = τ11ᵀ + v1 I`.
///
/// The determinant and quadratic form use the rank-one identities
/// `ln|Σ1| = ln(1 + ρn1) + n1 ln v1` and
/// `‖r‖²_{Σ1⁻¹} = (‖r‖² − ρ|1ᵀr|²/(1 + ρn1)) / v1`.
pub fn full_negloglik(sample: &TwoGroupSample, params: &NuisanceParams) -> Result<f64> {
    let s0 = summarize(&sample.y0)?;
    let s1 = summarize(&sample.y1)?;
    full_negloglik_summaries(&s0, &s1, params)
}

pub fn full_negloglik_summaries(
    s0: &GroupSummary,
    s1: &GroupSummary,
    params: &NuisanceParams,
) -> Result<f64> {
    if !(params.v0 > 0.0 && params.v1 > 0.0 && params.rho >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "need v0 > 0, v1 > 0, rho >= 0 (got v0={}, v1={}, rho={})",
            params.v0, params.v1, params.rho
        )));
    }
    let n0 = s0.n as f64;
    let n1 = s1.n as f64;
    let NuisanceParams { mu, v0, v1, rho, .. } = *params;
    let f0 = n0 * v0.ln() + s0.sq_dev_from(mu) / v0;
    let stats = abc_stats(s1, mu);
    let shrink = 1.0 + rho * n1;
    let f1 = shrink.ln() + n1 * v1.ln() + (stats.alpha - rho * stats.beta / shrink) / v1;
    Ok(f0 + f1)
}

/// Outcome of the `μ` search, with the intermediate grid result kept for
/// diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuisanceFit {
    pub params: NuisanceParams,
    /// Concentrated cost at the returned `μ̂`.
    pub cost: f64,
    pub grid_mu: f64,
    pub grid_cost: f64,
    pub bracket: (f64, f64),
}

/// Search bracket `[min(ȳ0, ȳ1) − E·S, max(ȳ0, ȳ1) + E·S]` with
/// `S = s0 + s1 + |ȳ1 − ȳ0|`.
pub fn search_bracket(s0: &GroupSummary, s1: &GroupSummary, expansion: f64) -> (f64, f64) {
    let spread = s0.sample_sd() + s1.sample_sd() + (s1.mean - s0.mean).abs();
    let lo = s0.mean.min(s1.mean) - expansion * spread;
    let hi = s0.mean.max(s1.mean) + expansion * spread;
    (lo, hi)
}

/// Maximum marginal-likelihood estimate of `(μ, τ, v0, v1)`.
pub fn fit_nuisance(sample: &TwoGroupSample, config: &FitConfig) -> Result<NuisanceParams> {
    fit_nuisance_detailed(sample, config).map(|fit| fit.params)
}

pub fn fit_nuisance_detailed(sample: &TwoGroupSample, config: &FitConfig) -> Result<NuisanceFit> {
    config.check()?;
    validate(sample)?;
    let s0 = summarize(&sample.y0)?;
    let s1 = summarize(&sample.y1)?;
    fit_from_summaries(&s0, &s1, config)
}

pub(crate) fn fit_from_summaries(
    s0: &GroupSummary,
    s1: &GroupSummary,
    config: &FitConfig,
) -> Result<NuisanceFit> {
    let floor = config.variance_floor;
    let (lo, hi) = search_bracket(s0, s1, config.bracket_expansion);

    // Degeneracy surfaces as an error at any μ; probe once so the grid can
    // treat the cost as infallible.
    concentrated_cost_summaries(s0, s1, s1.mean, floor)?;
    let cost = |mu: f64| concentrated_cost_summaries(s0, s1, mu, floor).unwrap_or(f64::INFINITY);

    let (idx, grid_mu, grid_cost) = grid_argmin(cost, lo, hi, config.grid_points);
    let step = (hi - lo) / (config.grid_points - 1) as f64;
    let a = if idx == 0 {
        lo
    } else {
        lo + step * (idx - 1) as f64
    };
    let b = (lo + step * (idx + 1) as f64).min(hi);
    let tol = config.refine_rel_tol * (hi - lo);
    let mut mu = grid_mu;
    let mut best_cost = grid_cost;
    // The second pass re-anchors the difference at the first-pass optimum,
    // where the ln_1p increments are small enough to resolve `tol`.
    let half = 1e-8 * (hi - lo);
    for pass in 0..2 {
        let (a, b) = if pass == 0 {
            (a, b)
        } else {
            ((mu - half).max(lo), (mu + half).min(hi))
        };
        let (cand, diff) = golden_section(|x| cost_difference(s0, s1, x, mu, floor), a, b, tol);
        if diff < 0.0 {
            mu = cand;
            best_cost += diff;
        }
    }

    let v0 = v0_hat(s0, mu, floor);
    let stats = abc_stats(s1, mu);
    let rho = rho_hat(&stats, floor)?;
    let v1 = v1_hat(&stats, rho, floor);
    Ok(NuisanceFit {
        params: NuisanceParams::new(mu, v0, v1, rho)?,
        cost: best_cost,
        grid_mu,
        grid_cost,
        bracket: (lo, hi),
    })
}
