//! Bias-resilient effect inference for two-group data.
//!
//! The effect `δ` (difference between test-group and control-group means) is
//! modeled as `N(0, τ)`, the nuisance parameters `(μ, τ, v0, v1)` are fitted
//! by maximizing the marginal likelihood, and the effect is estimated by its
//! posterior mean at the fitted parameters. A Cramér–Rao bound on the
//! estimator's RMSE scales a Chebyshev-type interval that targets coverage
//! `1 − α`; the interval is empty when the data cannot separate an effect
//! from noise.
//!
//! ```
//! use twogroup::{infer, welch_infer, InferenceConfig, TwoGroupSample};
//!
//! let sample = TwoGroupSample::new(
//!     vec![0.9, 1.2, 0.8, 1.1, 1.0, 0.95],
//!     vec![2.1, 1.9, 2.3, 2.0, 2.2],
//! );
//! let proposed = infer(&sample, &InferenceConfig::default())?;
//! let welch = welch_infer(&sample, 0.05)?;
//! assert!(proposed.delta_hat.abs() <= welch.delta_hat_std.abs() + 1.0);
//! # Ok::<(), twogroup::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod error;
pub mod format;
pub mod inference;
pub mod mle;
pub mod optimize;
pub mod sim;
pub mod special;
pub mod types;
pub mod welch;

pub use batch::{analyze_all, parse_matrix, BatchReport, BatchSummary, MarkerDataset, MarkerResult};
pub use error::{Error, Group, Result};
pub use inference::{confidence_interval, crb, effect_estimate, infer, InferenceConfig};
pub use mle::{
    abc_stats, concentrated_cost, concentration_offset, fit_nuisance, full_negloglik, rho_hat, v0_hat,
    v1_hat, FitConfig,
};
pub use sim::{run_replications, sweep_bias, sweep_n0, ErrorRateRow, Preset, SimScenario};
pub use special::{student_t_cdf, t_quantile};
pub use types::{
    summarize, validate, ConcentratedStats, ConfidenceInterval, GroupSummary, InferenceResult, Method,
    NuisanceParams, TwoGroupSample,
};
pub use welch::{welch_infer, WelchResult};
