//! Difference of sample means with Welch's unequal-variance t-interval.

use crate::error::{Error, Group, Result};
use crate::special::t_quantile;
use crate::types::{summarize, validate, ConfidenceInterval, GroupSummary, TwoGroupSample};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    /// `ȳ1 − ȳ0`.
    pub delta_hat_std: f64,
    pub std_err: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub dof: f64,
    pub interval: ConfidenceInterval,
    pub significant: bool,
}

pub fn welch_infer(sample: &TwoGroupSample, alpha: f64) -> Result<WelchResult> {
    validate(sample)?;
    let s0 = summarize(&sample.y0)?;
    let s1 = summarize(&sample.y1)?;
    welch_summaries(&s0, &s1, alpha)
}

pub(crate) fn welch_summaries(s0: &GroupSummary, s1: &GroupSummary, alpha: f64) -> Result<WelchResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let w0 = s0.sample_variance() / s0.n as f64;
    let w1 = s1.sample_variance() / s1.n as f64;
    if !(w0 > 0.0) {
        return Err(Error::DegenerateGroup {
            group: Group::Control,
        });
    }
    if !(w1 > 0.0) {
        return Err(Error::DegenerateGroup { group: Group::Test });
    }
    let se2 = w0 + w1;
    let dof = se2 * se2 / (w0 * w0 / (s0.n - 1) as f64 + w1 * w1 / (s1.n - 1) as f64);
    let std_err = se2.sqrt();
    let delta = s1.mean - s0.mean;
    let half_width = t_quantile(1.0 - 0.5 * alpha, dof)? * std_err;
    let interval = ConfidenceInterval::Open {
        center: delta,
        half_width,
    };
    Ok(WelchResult {
        delta_hat_std: delta,
        std_err,
        dof,
        interval,
        significant: interval.is_significant(),
    })
}
