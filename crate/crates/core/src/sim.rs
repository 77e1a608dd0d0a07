//! Monte Carlo error-rate harness.
//!
//! Each replication draws a fresh two-group sample from the Gaussian model
//! with an additive bias on the test group, runs both the proposed method
//! and Welch's interval, and records significance, emptiness, coverage and
//! the point estimates. Replication `r` uses its own ChaCha8 stream
//! (`seed`, stream id `r`), so results do not depend on thread scheduling.

use std::io::{self, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::{fmt_num, fmt_opt};
use crate::inference::{infer_summaries, InferenceConfig};
use crate::types::{summarize, TwoGroupSample};
use crate::welch::welch_summaries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimScenario {
    pub n0: usize,
    pub n1: usize,
    pub mu: f64,
    pub v0: f64,
    pub v1: f64,
    /// Effect added to the test-group mean.
    pub delta_true: f64,
    /// Sampling bias added to every test-group observation.
    pub bias: f64,
    pub alpha: f64,
    pub replications: usize,
    pub seed: u64,
    /// When positive, each replication draws its effect as
    /// `delta_true + N(0, delta_prior_var)` instead of using `delta_true`.
    pub delta_prior_var: f64,
}

impl Default for SimScenario {
    /// Two-group setup with `n0 = 40`, `n1 = 20`, `v0 = 0.3²`, `v1 = 0.15²`,
    /// `μ = 1`, no effect and no bias.
    fn default() -> Self {
        Self {
            n0: 40,
            n1: 20,
            mu: 1.0,
            v0: 0.09,
            v1: 0.0225,
            delta_true: 0.0,
            bias: 0.0,
            alpha: 0.05,
            replications: 5000,
            seed: 0,
            delta_prior_var: 0.0,
        }
    }
}

impl SimScenario {
    /// Standard deviation of the control-group mean, `√(v0/n0)`; the unit
    /// in which biases are expressed.
    pub fn control_mean_sd(&self) -> f64 {
        (self.v0 / self.n0 as f64).sqrt()
    }

    pub fn check(&self) -> Result<()> {
        if self.n0 < 2 || self.n1 < 2 {
            return Err(Error::InvalidScenario(format!(
                "group sizes must be at least 2 (n0={}, n1={})",
                self.n0, self.n1
            )));
        }
        if !(self.v0 > 0.0 && self.v1 > 0.0) {
            return Err(Error::InvalidScenario("variances must be positive".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidScenario("replications must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidScenario(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.delta_prior_var >= 0.0) {
            return Err(Error::InvalidScenario(
                "delta_prior_var must be nonnegative".into(),
            ));
        }
        for (name, v) in [
            ("mu", self.mu),
            ("delta_true", self.delta_true),
            ("bias", self.bias),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidScenario(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    fn effect_is_random(&self) -> bool {
        self.delta_prior_var > 0.0
    }
}

/// Independent random stream for replication `r`.
pub fn replication_rng(seed: u64, r: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    rng
}

/// `y0 ~ N(μ, v0)`, `y1 ~ N(μ + δ + b, v1)`, i.i.d., with `δ = delta_true`.
pub fn draw_sample<R: Rng + ?Sized>(scenario: &SimScenario, rng: &mut R) -> TwoGroupSample {
    draw_with_effect(scenario, scenario.delta_true, rng)
}

fn draw_with_effect<R: Rng + ?Sized>(scenario: &SimScenario, delta: f64, rng: &mut R) -> TwoGroupSample {
    let sd0 = scenario.v0.sqrt();
    let sd1 = scenario.v1.sqrt();
    let y0 = (0..scenario.n0)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            scenario.mu + sd0 * z
        })
        .collect();
    let shift = scenario.mu + delta + scenario.bias;
    let y1 = (0..scenario.n1)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            shift + sd1 * z
        })
        .collect();
    TwoGroupSample::new(y0, y1)
}

/// The effect and sample of replication `r`.
pub fn draw_replication(scenario: &SimScenario, r: u64) -> (f64, TwoGroupSample) {
    let mut rng = replication_rng(scenario.seed, r);
    let delta = if scenario.effect_is_random() {
        let z: f64 = StandardNormal.sample(&mut rng);
        scenario.delta_true + scenario.delta_prior_var.sqrt() * z
    } else {
        scenario.delta_true
    };
    let sample = draw_with_effect(scenario, delta, &mut rng);
    (delta, sample)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct MethodOutcome {
    estimate: f64,
    significant: bool,
    empty: bool,
    covered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Outcome {
    proposed: Option<MethodOutcome>,
    welch: Option<MethodOutcome>,
}

fn run_one(scenario: &SimScenario, config: &InferenceConfig, r: u64) -> Outcome {
    let (delta, sample) = draw_replication(scenario, r);
    let (s0, s1) = match (summarize(&sample.y0), summarize(&sample.y1)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            return Outcome {
                proposed: None,
                welch: None,
            }
        }
    };
    let proposed = infer_summaries(&s0, &s1, config).ok().map(|res| MethodOutcome {
        estimate: res.delta_hat,
        significant: res.significant,
        empty: res.interval.is_empty(),
        covered: res.interval.contains(delta),
    });
    let welch = welch_summaries(&s0, &s1, config.alpha)
        .ok()
        .map(|res| MethodOutcome {
            estimate: res.delta_hat_std,
            significant: res.significant,
            empty: false,
            covered: res.interval.contains(delta),
        });
    Outcome { proposed, welch }
}

/// Counters for one inference method over all replications.
///
/// Failed fits (which need a sample with a constant group, a probability
/// zero event under the model) are counted as nonsignificant.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MethodTally {
    pub significant: usize,
    pub nonsignificant: usize,
    pub empty: usize,
    pub covered: usize,
    pub failed: usize,
    /// Point estimates in replication order (failed fits omitted).
    pub estimates: Vec<f64>,
}

impl MethodTally {
    fn record(&mut self, outcome: Option<MethodOutcome>) {
        match outcome {
            Some(o) => {
                if o.significant {
                    self.significant += 1;
                } else {
                    self.nonsignificant += 1;
                }
                self.empty += o.empty as usize;
                self.covered += o.covered as usize;
                self.estimates.push(o.estimate);
            }
            None => {
                self.nonsignificant += 1;
                self.failed += 1;
            }
        }
    }

    fn total(&self) -> usize {
        self.significant + self.nonsignificant
    }

    pub fn significant_rate(&self) -> f64 {
        self.significant as f64 / self.total() as f64
    }

    pub fn empty_rate(&self) -> f64 {
        self.empty as f64 / self.total() as f64
    }

    pub fn coverage(&self) -> f64 {
        self.covered as f64 / self.total() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    pub scenario: SimScenario,
    pub proposed: MethodTally,
    pub welch: MethodTally,
}

impl ReplicationSummary {
    fn zero_effect(&self) -> bool {
        !self.scenario.effect_is_random() && self.scenario.delta_true == 0.0
    }

    fn nonzero_effect(&self) -> bool {
        !self.scenario.effect_is_random() && self.scenario.delta_true != 0.0
    }

    /// Rate of significant findings when the true effect is zero.
    pub fn fp_proposed(&self) -> Option<f64> {
        self.zero_effect().then(|| self.proposed.significant_rate())
    }

    pub fn fp_welch(&self) -> Option<f64> {
        self.zero_effect().then(|| self.welch.significant_rate())
    }

    /// Rate of nonsignificant findings when the true effect is nonzero.
    pub fn fn_proposed(&self) -> Option<f64> {
        self.nonzero_effect()
            .then(|| 1.0 - self.proposed.significant_rate())
    }

    pub fn fn_welch(&self) -> Option<f64> {
        self.nonzero_effect().then(|| 1.0 - self.welch.significant_rate())
    }

    pub fn empty_rate(&self) -> f64 {
        self.proposed.empty_rate()
    }

    /// Histograms of both methods' estimates over a shared range.
    pub fn histograms(&self, bins: usize) -> (Histogram, Histogram) {
        let all = self.proposed.estimates.iter().chain(&self.welch.estimates);
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
        let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
        (
            Histogram::build(&self.proposed.estimates, lo, hi, bins),
            Histogram::build(&self.welch.estimates, lo, hi, bins),
        )
    }
}

/// Equal-width histogram over `[lo, hi]`; the last bin is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn build(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins >= 1);
        let mut counts = vec![0; bins];
        for &x in values {
            if let Some(i) = Self::bin_of(lo, hi, bins, x) {
                counts[i] += 1;
            }
        }
        Self { lo, hi, counts }
    }

    fn bin_of(lo: f64, hi: f64, bins: usize, x: f64) -> Option<usize> {
        if !(x >= lo && x <= hi) {
            return None;
        }
        if hi == lo {
            return Some(0);
        }
        let i = ((x - lo) / (hi - lo) * bins as f64) as usize;
        Some(i.min(bins - 1))
    }

    pub fn bin_index(&self, x: f64) -> Option<usize> {
        Self::bin_of(self.lo, self.hi, self.counts.len(), x)
    }

    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let w = (self.hi - self.lo) / self.counts.len() as f64;
        (self.lo + w * i as f64, self.lo + w * (i + 1) as f64)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn run_replications(scenario: &SimScenario) -> Result<ReplicationSummary> {
    scenario.check()?;
    let config = InferenceConfig::with_alpha(scenario.alpha);
    let outcomes: Vec<Outcome> = (0..scenario.replications as u64)
        .into_par_iter()
        .map(|r| run_one(scenario, &config, r))
        .collect();
    let mut proposed = MethodTally::default();
    let mut welch = MethodTally::default();
    for o in outcomes {
        proposed.record(o.proposed);
        welch.record(o.welch);
    }
    Ok(ReplicationSummary {
        scenario: *scenario,
        proposed,
        welch,
    })
}

/// One point of an error-rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRateRow {
    /// Bias in units of `√(v0/n0)`, or `n0`, depending on the sweep.
    pub sweep_value: f64,
    pub fp_rate_proposed: Option<f64>,
    pub fp_rate_welch: Option<f64>,
    pub fn_rate_proposed: Option<f64>,
    pub fn_rate_welch: Option<f64>,
    pub empty_rate_proposed: f64,
}

/// False-positive rates along a bias grid given in units of `√(v0/n0)`.
pub fn sweep_bias(base: &SimScenario, bias_grid: &[f64]) -> Result<Vec<ErrorRateRow>> {
    if base.delta_true != 0.0 || base.delta_prior_var != 0.0 {
        return Err(Error::InvalidScenario(
            "bias sweep measures false positives and needs a zero effect".into(),
        ));
    }
    let unit = base.control_mean_sd();
    bias_grid
        .iter()
        .map(|&u| {
            let scenario = SimScenario {
                bias: u * unit,
                ..*base
            };
            let s = run_replications(&scenario)?;
            Ok(ErrorRateRow {
                sweep_value: u,
                fp_rate_proposed: s.fp_proposed(),
                fp_rate_welch: s.fp_welch(),
                fn_rate_proposed: None,
                fn_rate_welch: None,
                empty_rate_proposed: s.empty_rate(),
            })
        })
        .collect()
}

/// Error rates versus `n0` with `n1 = n0/2` and bias `−√(v0/n0)`.
///
/// Every grid point is run twice: with zero effect for the false-positive
/// columns and with effect `√v0` for the false-negative columns. The empty
/// rate reported is the zero-effect one.
pub fn sweep_n0(base: &SimScenario, n0_grid: &[usize]) -> Result<Vec<ErrorRateRow>> {
    if let Some(&bad) = n0_grid.iter().find(|&&n| n % 2 != 0 || n < 4) {
        return Err(Error::InvalidScenario(format!(
            "n0 must be even and at least 4 (so that n1 = n0/2 >= 2), got {bad}"
        )));
    }
    n0_grid
        .iter()
        .map(|&n0| {
            let null = SimScenario {
                n0,
                n1: n0 / 2,
                bias: -(base.v0 / n0 as f64).sqrt(),
                delta_true: 0.0,
                delta_prior_var: 0.0,
                ..*base
            };
            let alt = SimScenario {
                delta_true: base.v0.sqrt(),
                ..null
            };
            let s0 = run_replications(&null)?;
            let s1 = run_replications(&alt)?;
            Ok(ErrorRateRow {
                sweep_value: n0 as f64,
                fp_rate_proposed: s0.fp_proposed(),
                fp_rate_welch: s0.fp_welch(),
                fn_rate_proposed: s1.fn_proposed(),
                fn_rate_welch: s1.fn_welch(),
                empty_rate_proposed: s0.empty_rate(),
            })
        })
        .collect()
}

pub const ROW_HEADER: &str =
    "sweep_value,fp_rate_proposed,fp_rate_welch,fn_rate_proposed,fn_rate_welch,empty_rate_proposed";

pub fn write_rows<W: Write>(mut out: W, rows: &[ErrorRateRow]) -> io::Result<()> {
    writeln!(out, "{ROW_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(r.sweep_value),
            fmt_opt(r.fp_rate_proposed),
            fmt_opt(r.fp_rate_welch),
            fmt_opt(r.fn_rate_proposed),
            fmt_opt(r.fn_rate_welch),
            fmt_num(r.empty_rate_proposed),
        )?;
    }
    Ok(())
}

pub const HISTOGRAM_HEADER: &str = "bin_lo,bin_hi,count_proposed,count_welch";

pub fn write_histograms<W: Write>(mut out: W, proposed: &Histogram, welch: &Histogram) -> io::Result<()> {
    writeln!(out, "{HISTOGRAM_HEADER}")?;
    for (i, (cp, cw)) in proposed.counts.iter().zip(&welch.counts).enumerate() {
        let (lo, hi) = proposed.bin_edges(i);
        writeln!(out, "{},{},{cp},{cw}", fmt_num(lo), fmt_num(hi))?;
    }
    Ok(())
}

/// Named experiment setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// False-positive rate versus bias, zero effect.
    Fig1,
    /// Estimate histograms, zero effect, bias `−√(v0/n0)`.
    Fig2a,
    /// Estimate histograms, effect `√v0`, bias `−√(v0/n0)`.
    Fig2b,
    /// False-positive rate versus `n0`.
    Fig3a,
    /// False-negative rate versus `n0`.
    Fig3b,
}

/// What a preset runs.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    BiasSweep { base: SimScenario, grid: Vec<f64> },
    N0Sweep { base: SimScenario, grid: Vec<usize> },
    Histogram { scenario: SimScenario, bins: usize },
}

pub const DEFAULT_N0_GRID: [usize; 6] = [10, 20, 40, 80, 160, 320];
pub const DEFAULT_HISTOGRAM_BINS: usize = 50;

/// 21 evenly spaced bias multiples from 0 to 2 (units of `√(v0/n0)`).
///
/// Negating every observation flips the sign of the bias and leaves both
/// methods' significance decisions unchanged, so the error rates depend on
/// `|b|` only.
pub fn default_bias_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.1).collect()
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fig1,
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig3a,
        Preset::Fig3b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
        }
    }

    pub fn experiment(self, replications: usize, seed: u64) -> Experiment {
        let base = SimScenario {
            replications,
            seed,
            ..SimScenario::default()
        };
        let biased = SimScenario {
            bias: -base.control_mean_sd(),
            ..base
        };
        match self {
            Preset::Fig1 => Experiment::BiasSweep {
                base,
                grid: default_bias_grid(),
            },
            Preset::Fig2a => Experiment::Histogram {
                scenario: biased,
                bins: DEFAULT_HISTOGRAM_BINS,
            },
            Preset::Fig2b => Experiment::Histogram {
                scenario: SimScenario {
                    delta_true: base.v0.sqrt(),
                    ..biased
                },
                bins: DEFAULT_HISTOGRAM_BINS,
            },
            Preset::Fig3a | Preset::Fig3b => Experiment::N0Sweep {
                base,
                grid: DEFAULT_N0_GRID.to_vec(),
            },
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidScenario(format!("unknown preset {s:?}")))
    }
}
