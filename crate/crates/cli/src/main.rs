use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use twogroup::batch::{write_result_row, write_results, MarkerResult, RESULT_HEADER};
use twogroup::sim::{write_histograms, write_rows, Experiment};
use twogroup::{
    analyze_all, infer, parse_matrix, run_replications, sweep_bias, sweep_n0, welch_infer, Error,
    ErrorRateRow, InferenceConfig, Preset, SimScenario, TwoGroupSample,
};

mod gnuplot;

/// Bias-resilient two-group effect inference.
#[derive(Debug, Parser)]
#[command(name = "twogroup", version, about)]
struct Cli {
    /// Worker threads for simulations and batch runs (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare two groups given as files with one number per line.
    Infer {
        #[arg(long)]
        group0: PathBuf,
        #[arg(long)]
        group1: PathBuf,
        #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
        alpha: f64,
    },
    /// Monte Carlo error rates or estimate histograms.
    ///
    /// Presets: fig1 (false positives versus bias, 21 points over 0..2 in
    /// units of sqrt(v0/n0)); fig2a and fig2b (estimate histograms with bias
    /// -sqrt(v0/n0) and effect 0 or sqrt(v0)); fig3a and fig3b (error rates
    /// versus n0 in {10,20,40,80,160,320} with n1 = n0/2 and bias
    /// -sqrt(v0/n0)). All use n0=40, n1=20, mu=1, v0=0.09, v1=0.0225 as the
    /// base scenario.
    Simulate(SimulateArgs),
    /// Run both methods on every row of a marker matrix.
    Batch {
        /// Comma-separated matrix: header `id,<label>,...` with labels 0/1.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
        alpha: f64,
        /// Per-marker results; written to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// fig1, fig2a, fig2b, fig3a or fig3b.
    #[arg(long, value_parser = parse_preset, conflicts_with_all = ["n0", "n1", "mu", "v0", "v1", "delta", "bias", "sweep", "histogram"])]
    preset: Option<Preset>,

    #[arg(long, default_value_t = 40)]
    n0: usize,
    #[arg(long, default_value_t = 20)]
    n1: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.09)]
    v0: f64,
    #[arg(long, default_value_t = 0.0225)]
    v1: f64,
    /// True effect added to the test-group mean.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    /// Bias added to every test-group observation, in units of sqrt(v0/n0).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    bias: f64,

    /// `bias:<b1>,<b2>,...` (units of sqrt(v0/n0)) or `n0:<n1>,<n2>,...`.
    #[arg(long, value_parser = parse_sweep, allow_hyphen_values = true)]
    sweep: Option<Sweep>,
    /// Emit estimate histograms with this many bins instead of error rates.
    #[arg(long, conflicts_with = "sweep")]
    histogram: Option<usize>,

    #[arg(long, default_value_t = 5000)]
    replications: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    alpha: f64,
    /// Output table; written to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script that plots the output table.
    #[arg(long, requires = "out")]
    gnuplot_script: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
enum Sweep {
    Bias(Vec<f64>),
    N0(Vec<usize>),
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in (0, 1), got {s}"))
    }
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse::<Preset>().map_err(|e| e.to_string())
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let (kind, values) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `bias:<list>` or `n0:<list>`, got {s:?}"))?;
    let items = values.split(',').map(str::trim);
    match kind.trim() {
        "bias" => items
            .map(|t| t.parse::<f64>().map_err(|_| format!("bad bias value {t:?}")))
            .collect::<Result<_, _>>()
            .map(Sweep::Bias),
        "n0" => items
            .map(|t| t.parse::<usize>().map_err(|_| format!("bad n0 value {t:?}")))
            .collect::<Result<_, _>>()
            .map(Sweep::N0),
        other => Err(format!("unknown sweep kind {other:?}; use bias or n0")),
    }
}

/// Usage errors exit with 1, data errors with 2.
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Infer {
            group0,
            group1,
            alpha,
        } => infer_cmd(&group0, &group1, alpha),
        Command::Simulate(args) => simulate_cmd(args),
        Command::Batch { input, alpha, out } => batch_cmd(&input, alpha, out.as_deref()),
    }
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Reads one number per line; blank lines and lines starting with `#` are
/// skipped.
fn read_column(path: &Path) -> anyhow::Result<Vec<f64>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("{}: line {}", path.display(), i + 1))?;
        let token = line.trim().trim_start_matches('\u{feff}');
        if token.is_empty() || token.starts_with('#') {
            continue;
        }
        let v: f64 = token.parse().map_err(|_| {
            anyhow!(
                "{}: line {}: cannot parse {token:?} as a number",
                path.display(),
                i + 1
            )
        })?;
        values.push(v);
    }
    Ok(values)
}

fn infer_cmd(group0: &Path, group1: &Path, alpha: f64) -> Result<(), Failure> {
    let sample = TwoGroupSample::new(read_column(group0)?, read_column(group1)?);
    let outcome = (|| {
        let config = InferenceConfig::with_alpha(alpha);
        Ok(twogroup::batch::MarkerFit {
            proposed: infer(&sample, &config)?,
            welch: welch_infer(&sample, alpha)?,
        })
    })();
    let outcome = outcome.map_err(|e: Error| anyhow!(e))?;
    let result = MarkerResult {
        id: "sample".into(),
        outcome: Ok(outcome),
    };
    let mut out = open_output(None)?;
    writeln!(out, "{RESULT_HEADER}")?;
    write_result_row(&mut out, &result)?;
    out.flush()?;
    Ok(())
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

/// What the simulate command runs.
enum Job {
    Bias {
        base: SimScenario,
        grid: Vec<f64>,
    },
    N0 {
        base: SimScenario,
        grid: Vec<usize>,
        false_negatives: bool,
    },
    Histogram {
        scenario: SimScenario,
        bins: usize,
    },
    Single(SimScenario),
}

fn plan(args: &SimulateArgs) -> Result<Job, Failure> {
    if let Some(preset) = args.preset {
        return Ok(match preset.experiment(args.replications, args.seed) {
            Experiment::BiasSweep { base, grid } => Job::Bias {
                base: SimScenario {
                    alpha: args.alpha,
                    ..base
                },
                grid,
            },
            Experiment::N0Sweep { base, grid } => Job::N0 {
                base: SimScenario {
                    alpha: args.alpha,
                    ..base
                },
                grid,
                false_negatives: preset == Preset::Fig3b,
            },
            Experiment::Histogram { scenario, bins } => Job::Histogram {
                scenario: SimScenario {
                    alpha: args.alpha,
                    ..scenario
                },
                bins,
            },
        });
    }
    let base = SimScenario {
        n0: args.n0,
        n1: args.n1,
        mu: args.mu,
        v0: args.v0,
        v1: args.v1,
        delta_true: args.delta,
        bias: 0.0,
        alpha: args.alpha,
        replications: args.replications,
        seed: args.seed,
        delta_prior_var: 0.0,
    };
    base.check().map_err(usage)?;
    let biased = SimScenario {
        bias: args.bias * base.control_mean_sd(),
        ..base
    };
    Ok(match (&args.sweep, args.histogram) {
        (Some(Sweep::Bias(grid)), _) => {
            if args.delta != 0.0 {
                return Err(usage(anyhow!(
                    "a bias sweep measures false positives; drop --delta"
                )));
            }
            Job::Bias {
                base,
                grid: grid.clone(),
            }
        }
        (Some(Sweep::N0(grid)), _) => Job::N0 {
            base,
            grid: grid.clone(),
            false_negatives: false,
        },
        (None, Some(0)) => return Err(usage(anyhow!("--histogram needs at least one bin"))),
        (None, Some(bins)) => Job::Histogram {
            scenario: biased,
            bins,
        },
        (None, None) => Job::Single(biased),
    })
}

fn simulate_cmd(args: SimulateArgs) -> Result<(), Failure> {
    let job = plan(&args)?;
    let mut out = open_output(args.out.as_deref())?;
    let kind = match job {
        Job::Bias { base, grid } => {
            write_rows(&mut out, &sweep_bias(&base, &grid).map_err(usage)?)?;
            gnuplot::Kind::Bias
        }
        Job::N0 {
            base,
            grid,
            false_negatives,
        } => {
            write_rows(&mut out, &sweep_n0(&base, &grid).map_err(usage)?)?;
            gnuplot::Kind::N0 { false_negatives }
        }
        Job::Histogram { scenario, bins } => {
            let (p, w) = run_replications(&scenario).map_err(usage)?.histograms(bins);
            write_histograms(&mut out, &p, &w)?;
            gnuplot::Kind::Histogram
        }
        Job::Single(scenario) => {
            let s = run_replications(&scenario).map_err(usage)?;
            let row = ErrorRateRow {
                sweep_value: args.bias,
                fp_rate_proposed: s.fp_proposed(),
                fp_rate_welch: s.fp_welch(),
                fn_rate_proposed: s.fn_proposed(),
                fn_rate_welch: s.fn_welch(),
                empty_rate_proposed: s.empty_rate(),
            };
            write_rows(&mut out, &[row])?;
            gnuplot::Kind::Bias
        }
    };
    out.flush()?;
    if let (Some(script), Some(data)) = (&args.gnuplot_script, &args.out) {
        std::fs::write(script, gnuplot::script(kind, data))
            .with_context(|| format!("cannot write {}", script.display()))?;
    }
    Ok(())
}

fn batch_cmd(input: &Path, alpha: f64, out_path: Option<&Path>) -> Result<(), Failure> {
    let file = File::open(input).with_context(|| format!("cannot open {}", input.display()))?;
    let dataset = parse_matrix(BufReader::new(file)).with_context(|| input.display().to_string())?;
    let report = analyze_all(&dataset, alpha).map_err(usage)?;
    let mut out = open_output(out_path)?;
    write_results(&mut out, &report.results)?;
    out.flush()?;
    drop(out);
    for (id, err) in report.failures() {
        eprintln!("warning: marker {id:?} skipped: {err}");
    }
    if out_path.is_some() {
        println!("{}", report.summary);
    } else {
        eprintln!("{}", report.summary);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_specs() {
        assert_eq!(
            parse_sweep("bias:0, -0.5,1").unwrap(),
            Sweep::Bias(vec![0.0, -0.5, 1.0])
        );
        assert_eq!(parse_sweep("n0:20,40").unwrap(), Sweep::N0(vec![20, 40]));
        assert!(parse_sweep("n0:20,x").unwrap_err().contains("\"x\""));
        assert!(parse_sweep("20,40").is_err());
        assert!(parse_sweep("v1:1").is_err());
    }

    #[test]
    fn alpha_range() {
        assert_eq!(parse_alpha("0.1").unwrap(), 0.1);
        for bad in ["0", "1", "-0.1", "nan", "five"] {
            assert!(parse_alpha(bad).is_err(), "{bad}");
        }
    }
}
