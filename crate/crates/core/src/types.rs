//! Domain types shared by every inference route, plus sufficient statistics
//! and sample validation.

use crate::error::{Error, Group, Result};

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Raw observations of the control group (`y0`) and the test group (`y1`).
///
/// Construction does not check anything; call [`validate`] before fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoGroupSample {
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
}

impl TwoGroupSample {
    pub fn new(y0: Vec<f64>, y1: Vec<f64>) -> Self {
        Self { y0, y1 }
    }

    pub fn n0(&self) -> usize {
        self.y0.len()
    }

    pub fn n1(&self) -> usize {
        self.y1.len()
    }

    /// The sample with the two groups exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            y0: self.y1.clone(),
            y1: self.y0.clone(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            y0: self.y0.iter().copied().map(&f).collect(),
            y1: self.y1.iter().copied().map(&f).collect(),
        }
    }
}

/// Sufficient statistics of one group.
///
/// `m2` is the centered sum of squares `Σ(y − mean)²`, computed in a second
/// pass. Everything downstream that needs `‖y − μ1‖²` uses
/// `m2 + n·(mean − μ)²`, which equals `sumsq − μ·n·(2·mean − μ)` exactly in
/// real arithmetic but does not cancel catastrophically when the data sit
/// far from zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupSummary {
    pub n: usize,
    pub sum: f64,
    pub sumsq: f64,
    pub mean: f64,
    pub m2: f64,
}

impl GroupSummary {
    /// `‖y − μ1‖²`.
    pub fn sq_dev_from(&self, mu: f64) -> f64 {
        let d = self.mean - mu;
        self.m2 + self.n as f64 * d * d
    }

    /// Unbiased variance (divisor `n − 1`).
    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n - 1) as f64
    }

    pub fn sample_sd(&self) -> f64 {
        self.sample_variance().sqrt()
    }
}

/// One-pass compensated sums, then a compensated centered pass for `m2`.
pub fn summarize(y: &[f64]) -> Result<GroupSummary> {
    if y.is_empty() {
        return Err(Error::InvalidSample("empty group".into()));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidSample(format!("non-finite value at position {i}")));
    }
    let mut sum = CompensatedSum::default();
    let mut sumsq = CompensatedSum::default();
    for &v in y {
        sum.add(v);
        sumsq.add(v * v);
    }
    let n = y.len();
    let sum = sum.value();
    let mean = sum / n as f64;
    let m2: CompensatedSum = y.iter().map(|&v| (v - mean) * (v - mean)).collect();
    Ok(GroupSummary {
        n,
        sum,
        sumsq: sumsq.value(),
        mean,
        m2: m2.value(),
    })
}

/// Checks that both groups have at least two finite observations and a
/// nonzero spread.
pub fn validate(sample: &TwoGroupSample) -> Result<()> {
    for (group, y) in [(Group::Control, &sample.y0), (Group::Test, &sample.y1)] {
        if y.len() < 2 {
            return Err(Error::TooFewSamples { group, n: y.len() });
        }
        if let Some(index) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { group, index });
        }
    }
    for (group, y) in [(Group::Control, &sample.y0), (Group::Test, &sample.y1)] {
        if y.iter().all(|&v| v == y[0]) {
            return Err(Error::DegenerateGroup { group });
        }
    }
    Ok(())
}

/// Nuisance parameters `(μ, τ, v0, v1)` and the signal-to-noise ratio
/// `ρ = τ / v1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuisanceParams {
    pub mu: f64,
    pub v0: f64,
    pub v1: f64,
    pub rho: f64,
    pub tau: f64,
}

impl NuisanceParams {
    /// Builds the parameter set from `ρ`; `τ` is derived as `ρ·v1`.
    pub fn new(mu: f64, v0: f64, v1: f64, rho: f64) -> Result<Self> {
        if !(mu.is_finite() && v0.is_finite() && v1.is_finite() && rho.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if v0 < 0.0 || v1 <= 0.0 || rho < 0.0 {
            return Err(Error::InvalidParams(format!(
                "need v0 >= 0, v1 > 0, rho >= 0 (got v0={v0}, v1={v1}, rho={rho})"
            )));
        }
        Ok(Self {
            mu,
            v0,
            v1,
            rho,
            tau: rho * v1,
        })
    }

    /// Builds the parameter set from the effect prior variance `τ`.
    pub fn from_tau(mu: f64, v0: f64, v1: f64, tau: f64) -> Result<Self> {
        if v1 <= 0.0 || !v1.is_finite() {
            return Err(Error::InvalidParams(format!("v1 must be positive, got {v1}")));
        }
        let mut p = Self::new(mu, v0, v1, tau / v1)?;
        p.tau = tau;
        Ok(p)
    }
}

/// The `μ`-dependent scalars of the concentrated likelihood for the test
/// group: `α = ‖y1 − μ1‖²`, `β = |1ᵀ(y1 − μ1)|²`, `γ = α·n1 − β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentratedStats {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Group size `n1` the scalars were computed for.
    pub n: usize,
}

/// A two-sided interval `{δ′ : |δ′ − center| < half_width}`, or the empty
/// set when the fitted model cannot separate an effect from noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfidenceInterval {
    Empty,
    Open { center: f64, half_width: f64 },
}

impl ConfidenceInterval {
    pub fn is_empty(&self) -> bool {
        matches!(self, ConfidenceInterval::Empty)
    }

    pub fn center(&self) -> f64 {
        match *self {
            ConfidenceInterval::Empty => 0.0,
            ConfidenceInterval::Open { center, .. } => center,
        }
    }

    pub fn half_width(&self) -> f64 {
        match *self {
            ConfidenceInterval::Empty => 0.0,
            ConfidenceInterval::Open { half_width, .. } => half_width,
        }
    }

    /// Lower and upper endpoints; `None` for the empty set.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            ConfidenceInterval::Empty => None,
            ConfidenceInterval::Open { center, half_width } => {
                Some((center - half_width, center + half_width))
            }
        }
    }

    pub fn lo(&self) -> Option<f64> {
        self.bounds().map(|b| b.0)
    }

    pub fn hi(&self) -> Option<f64> {
        self.bounds().map(|b| b.1)
    }

    /// Open-interval membership: endpoints are excluded.
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            ConfidenceInterval::Empty => false,
            ConfidenceInterval::Open { center, half_width } => (x - center).abs() < half_width,
        }
    }

    /// Nonempty and excludes zero.
    pub fn is_significant(&self) -> bool {
        !self.is_empty() && !self.contains(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Proposed,
    Welch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceResult {
    pub delta_hat: f64,
    /// Square root of the Cramér–Rao bound evaluated at the fitted parameters.
    pub rmse: f64,
    pub interval: ConfidenceInterval,
    pub significant: bool,
    pub params: NuisanceParams,
    pub method: Method,
}
