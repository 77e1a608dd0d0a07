//! Empirical-Bayes effect estimate, its Cramér–Rao bound and the resulting
//! confidence interval.

use crate::error::{Error, Result};
use crate::mle::{fit_from_summaries, FitConfig};
use crate::types::{
    summarize, validate, ConfidenceInterval, GroupSummary, InferenceResult, Method, NuisanceParams,
    TwoGroupSample,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceConfig {
    /// Miscoverage level; the interval targets coverage `1 − alpha`.
    pub alpha: f64,
    pub fit: FitConfig,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            fit: FitConfig::default(),
        }
    }
}

impl InferenceConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        self.fit.check()
    }
}

/// Posterior mean of the effect, `ρn1/(ρn1 + 1)·(ȳ1 − μ)`.
pub fn effect_estimate(s1: &GroupSummary, params: &NuisanceParams) -> f64 {
    let diff = s1.mean - params.mu;
    if params.rho.is_infinite() {
        return diff;
    }
    let k = params.rho * s1.n as f64;
    k / (k + 1.0) * diff
}

/// Squared RMSE bound
/// `ρv1/(ρn1 + 1) + (ρn1/(ρn1 + 1))²·(n0/v0 + n1/(v1(ρn1 + 1)))⁻¹`.
///
/// The first term is the posterior variance of the effect; the second is
/// the price of not knowing `μ`. It is zero at `ρ = 0` and increases to
/// `v0/n0 + v1/n1` as `ρ → ∞`.
pub fn crb(params: &NuisanceParams, n0: usize, n1: usize) -> f64 {
    let NuisanceParams { v0, v1, rho, .. } = *params;
    let n0 = n0 as f64;
    let n1 = n1 as f64;
    if rho == 0.0 {
        return 0.0;
    }
    if rho.is_infinite() {
        return v1 / n1 + v0 / n0;
    }
    let k = rho * n1 + 1.0;
    let gain = rho * n1 / k;
    let info_mu = n0 / v0 + n1 / (v1 * k);
    rho * v1 / k + gain * gain / info_mu
}

/// `{δ′ : |δ′ − δ̂| < r/√alpha}`; empty when `r² = 0`.
///
/// # Panics
///
/// If `alpha` is not in `(0, 1]` or `rmse2` is negative or NaN.
pub fn confidence_interval(delta_hat: f64, rmse2: f64, alpha: f64) -> ConfidenceInterval {
    assert!(
        alpha > 0.0 && alpha <= 1.0,
        "alpha must lie in (0, 1], got {alpha}"
    );
    assert!(rmse2 >= 0.0, "squared rmse must be nonnegative, got {rmse2}");
    if rmse2 == 0.0 {
        return ConfidenceInterval::Empty;
    }
    ConfidenceInterval::Open {
        center: delta_hat,
        half_width: (rmse2 / alpha).sqrt(),
    }
}

/// Full proposed pipeline: fit `ψ̂`, then estimate, bound and interval at
/// `ψ̂`.
pub fn infer(sample: &TwoGroupSample, config: &InferenceConfig) -> Result<InferenceResult> {
    config.check()?;
    validate(sample)?;
    let s0 = summarize(&sample.y0)?;
    let s1 = summarize(&sample.y1)?;
    infer_summaries(&s0, &s1, config)
}

pub(crate) fn infer_summaries(
    s0: &GroupSummary,
    s1: &GroupSummary,
    config: &InferenceConfig,
) -> Result<InferenceResult> {
    let params = fit_from_summaries(s0, s1, &config.fit)?.params;
    let r2 = crb(&params, s0.n, s1.n);
    // ρ̂ = 0 collapses both the estimate and the bound.
    let delta_hat = if params.rho == 0.0 {
        0.0
    } else {
        effect_estimate(s1, &params)
    };
    let interval = confidence_interval(delta_hat, r2, config.alpha);
    Ok(InferenceResult {
        delta_hat,
        rmse: r2.sqrt(),
        interval,
        significant: interval.is_significant(),
        params,
        method: Method::Proposed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(rho: f64, v0: f64, v1: f64) -> NuisanceParams {
        NuisanceParams::new(1.0, v0, v1, rho).unwrap()
    }

    #[test]
    fn estimate_examples() {
        let s1 = summarize(&[2.0, 4.0]).unwrap();
        assert!((effect_estimate(&s1, &params(1.5, 1.0, 1.0)) - 1.5).abs() < 1e-15);
        assert_eq!(effect_estimate(&s1, &params(0.0, 1.0, 1.0)), 0.0);
        let inf = NuisanceParams {
            rho: f64::INFINITY,
            ..params(1.0, 1.0, 1.0)
        };
        assert_eq!(effect_estimate(&s1, &inf), 2.0);
        assert!((effect_estimate(&s1, &params(1e12, 1.0, 1.0)) - 2.0).abs() < 1e-11);
    }

    #[test]
    fn crb_examples() {
        assert_eq!(crb(&params(0.0, 1.0, 2.0), 2, 2), 0.0);
        assert!((crb(&params(1.5, 1.0, 2.0), 2, 2) - 1.0).abs() < 1e-12);
        let big = crb(&params(1e9, 0.7, 1.3), 5, 3);
        let limit = 0.7 / 5.0 + 1.3 / 3.0;
        assert!((big - limit).abs() < 1e-6 * limit);
    }

    #[test]
    fn interval_examples() {
        let ci = confidence_interval(1.5, 1.0, 0.05);
        assert!((ci.half_width() - 20f64.sqrt()).abs() < 1e-14);
        assert!((ci.half_width() - 4.4721).abs() < 1e-4);
        assert_eq!(ci.center(), 1.5);
        assert_eq!(confidence_interval(1.5, 0.0, 0.05), ConfidenceInterval::Empty);
        assert_eq!(confidence_interval(0.0, 1.0, 1.0).bounds(), Some((-1.0, 1.0)));
    }

    #[test]
    fn halving_alpha_scales_width_by_sqrt2() {
        for &r2 in &[0.01, 0.3, 4.0] {
            let w1 = confidence_interval(0.0, r2, 0.1).half_width();
            let w2 = confidence_interval(0.0, r2, 0.05).half_width();
            assert!((w2 / w1 - 2f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn collapse_gives_empty_interval() {
        // group means coincide, so no μ gives β ≥ α with a better cost
        let s = TwoGroupSample::new(vec![-1.0, 1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]);
        let r = infer(&s, &InferenceConfig::default()).unwrap();
        assert_eq!(r.params.rho, 0.0);
        assert_eq!(r.delta_hat, 0.0);
        assert!(r.interval.is_empty());
        assert!(!r.significant);
    }

    #[test]
    fn infer_rejects_bad_alpha() {
        let s = TwoGroupSample::new(vec![0.0, 2.0], vec![1.0, 3.0]);
        assert!(infer(&s, &InferenceConfig::with_alpha(1.0)).is_err());
        assert!(infer(&s, &InferenceConfig::with_alpha(0.0)).is_err());
    }
}
