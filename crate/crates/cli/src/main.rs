//! Command-line front end: closed-form counts, single-network decisions and the
//! Monte Carlo experiments.
//!
//! Exit codes: 0 ok, 1 internal failure, 2 usage, 3 marginal verdict,
//! 4 non-generic arrangement, 5 I/O.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deadneuron::arrangement::{
    enumerate_regions_with_facets, facet_statistics, region_counts, ArrangementConfig,
    ArrangementError,
};
use deadneuron::experiments::{
    check_c0_relation, conjecture_sweep, detector_agreement, estimate_deltas, estimate_prob_stable,
    facet_report, fmt_sig, sweep_svg, write_csv, write_json, write_rows_csv, EstimateOptions,
    ExperimentError, Mode,
};
use deadneuron::network::{
    first_layer_arrangement, sample_nondegenerate, Architecture, DegeneracyCheck, Distribution,
    NetworkError, NetworkParams,
};
use deadneuron::stability::{
    is_stably_unactivated_exact, DetectorConfig, NeuronRef, StabilityConfig, StabilityError,
};

#[derive(Parser)]
#[command(
    name = "deadneuron",
    version,
    about = "Stably unactivated second-layer ReLU neurons: exact checks and Monte Carlo estimates"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Base seed for every random draw.
    #[arg(long, global = true, env = "DEADNEURON_SEED", default_value_t = 0)]
    seed: u64,
    /// Margins within this distance of zero are reported as marginal.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form region, bounded-region and facet counts for m generic hyperplanes in R^n.
    Counts {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Skip the enumeration cross-check on a sampled arrangement.
        #[arg(long)]
        no_check: bool,
    },
    /// Exact verdict for one second-layer neuron of a network read from JSON.
    Decide {
        /// File with {"arch": [...], "layers": [{"W": [[...]], "b": [...]}, ...]}.
        params: PathBuf,
        /// 0-based index of the second-layer neuron.
        #[arg(default_value_t = 0)]
        neuron: usize,
    },
    /// Probability that the neuron of an (n0, n1, 1) network is stably unactivated.
    Estimate {
        #[arg(long)]
        n0: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Per-configuration decomposition for n1 = n0 + 1.
    Deltas {
        #[arg(long, default_value_t = 2)]
        n0: usize,
        #[arg(long, default_value_t = 400_000)]
        samples: u64,
        /// Also compare configuration 0 against the intercept-partition frequency.
        #[arg(long)]
        check_c0: bool,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Estimates over a range of n1 at fixed n0.
    Sweep {
        #[arg(long)]
        n0: usize,
        #[arg(long)]
        n1_min: usize,
        #[arg(long)]
        n1_max: usize,
        #[arg(long, default_value_t = 50_000)]
        samples: u64,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        output: Output,
    },
    /// Facet statistics with an enumeration cross-check on small instances.
    Facets {
        #[arg(long)]
        n0: usize,
        #[arg(long)]
        m_min: usize,
        #[arg(long)]
        m_max: usize,
        /// Sampled arrangements per m for the cross-check.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value = "normal")]
        dist: Distribution,
        #[command(flatten)]
        output: Output,
    },
    /// Sampling detector against the exact verdict on the same networks.
    Compare {
        #[arg(long)]
        n0: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value = "he")]
        dist: Distribution,
        #[arg(long)]
        domain_samples: Option<usize>,
        #[arg(long)]
        domain_radius: Option<f64>,
        #[arg(long)]
        perturbation_count: Option<usize>,
        #[arg(long)]
        perturbation_radius: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Sampling {
    /// uniform[:half_width], normal[:std_dev] or he.
    #[arg(long, default_value = "uniform")]
    dist: Distribution,
    /// Defaults to exact up to 20 hidden neurons and the detector above.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Args)]
struct Output {
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Detector,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Detector => Mode::Detector,
        }
    }
}

enum Failure {
    Internal(String),
    Usage(String),
    Marginal,
    NotGeneric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Marginal => 3,
            Failure::NotGeneric(_) => 4,
            Failure::Io(_) => 5,
        }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let msg = e.to_string();
        match e {
            ExperimentError::Network(NetworkError::NotGeneric)
            | ExperimentError::Stability(StabilityError::NotGeneric)
            | ExperimentError::Arrangement(ArrangementError::NotGeneric) => {
                Failure::NotGeneric(msg)
            }
            ExperimentError::Output(_) => Failure::Io(msg),
            ExperimentError::NoSamples
            | ExperimentError::OutOfTheoremRange { .. }
            | ExperimentError::InvalidRange
            | ExperimentError::Network(NetworkError::InvalidArchitecture)
            | ExperimentError::Arrangement(
                ArrangementError::Overflow | ArrangementError::SizeLimitExceeded { .. },
            ) => Failure::Usage(msg),
            _ => Failure::Internal(msg),
        }
    }
}

impl From<ArrangementError> for Failure {
    fn from(e: ArrangementError) -> Self {
        ExperimentError::from(e).into()
    }
}

impl From<NetworkError> for Failure {
    fn from(e: NetworkError) -> Self {
        ExperimentError::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => return fail(&Failure::Internal(e.to_string())),
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(&f),
    }
}

fn fail(f: &Failure) -> ExitCode {
    match f {
        Failure::Internal(m) | Failure::Usage(m) | Failure::NotGeneric(m) | Failure::Io(m) => {
            eprintln!("error: {m}")
        }
        Failure::Marginal => eprintln!("error: verdict is marginal"),
    }
    ExitCode::from(f.code())
}

fn options(common: &Common, mode: Option<ModeArg>) -> EstimateOptions {
    EstimateOptions {
        mode: mode.map(Mode::from),
        eps: common.tolerance,
        ..EstimateOptions::default()
    }
}

/// Sends the report to `--out` (summary on stdout) or to stdout (summary on stderr).
fn emit(
    output: &Output,
    summary: &str,
    write: impl FnOnce(&mut dyn Write) -> Result<(), ExperimentError>,
) -> Result<(), Failure> {
    match &output.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush().map_err(|e| Failure::Io(e.to_string()))?;
            println!("{summary}");
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush().map_err(|e| Failure::Io(e.to_string()))?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn no_svg(output: &Output) -> Result<(), Failure> {
    if output.format == Format::Svg {
        return Err(Failure::Usage(
            "svg output is only available for sweep".into(),
        ));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let common = &cli.common;
    match &cli.command {
        Command::Counts { m, n, no_check } => counts(*m, *n, !no_check, common.seed),
        Command::Decide { params, neuron } => decide(params, *neuron, common.tolerance),
        Command::Estimate {
            n0,
            n1,
            samples,
            sampling,
            output,
        } => {
            no_svg(output)?;
            let r = estimate_prob_stable(
                *n0,
                *n1,
                &sampling.dist,
                *samples,
                common.seed,
                &options(common, sampling.mode),
            )?;
            let theory = r.theory.map_or_else(|| "none".to_string(), fmt_sig);
            let summary = format!(
                "n0={} n1={} mode={} p_hat={} ci=[{}, {}] theory={theory} marginal={}",
                r.n0,
                r.n1,
                r.mode,
                fmt_sig(r.p_hat),
                fmt_sig(r.ci_low),
                fmt_sig(r.ci_high),
                r.marginal_discards
            );
            let reports = [r];
            emit(output, &summary, |w| match output.format {
                Format::Json => write_json(w, &reports[..]),
                _ => write_csv(w, &reports),
            })
        }
        Command::Deltas {
            n0,
            samples,
            check_c0,
            sampling,
            output,
        } => {
            no_svg(output)?;
            let opts = options(common, sampling.mode);
            let deltas = estimate_deltas(*n0, &sampling.dist, *samples, common.seed, &opts)?;
            let c0 = if *check_c0 {
                Some(check_c0_relation(
                    *n0,
                    &sampling.dist,
                    *samples,
                    common.seed,
                    &opts,
                )?)
            } else {
                None
            };
            let mut summary = format!(
                "total={} (+/- {}) facet_sum={} (+/- {}) residual_hits={}",
                fmt_sig(deltas.total),
                fmt_sig(deltas.total_std_err),
                fmt_sig(deltas.facet_sum),
                fmt_sig(deltas.facet_sum_std_err),
                deltas.residual_hits
            );
            if let Some(c) = &c0 {
                summary.push_str(&format!(
                    " delta0={} half_h1={} agree={}",
                    fmt_sig(c.delta0_hat),
                    fmt_sig(c.half_h1_hat),
                    c.agree
                ));
            }
            emit(output, &summary, |w| match output.format {
                Format::Json => write_json(w, &serde_json::json!({ "deltas": deltas, "c0": c0 })),
                _ => write_rows_csv(w, &deltas.entries),
            })
        }
        Command::Sweep {
            n0,
            n1_min,
            n1_max,
            samples,
            sampling,
            output,
        } => {
            let cells = conjecture_sweep(
                *n0,
                *n1_min..=*n1_max,
                &sampling.dist,
                *samples,
                common.seed,
                &options(common, sampling.mode),
            )?;
            let summary = cells
                .iter()
                .map(|c| format!("n1={} p_hat={}", c.n1, fmt_sig(c.p_hat)))
                .collect::<Vec<_>>()
                .join(" ");
            emit(output, &summary, |w| match output.format {
                Format::Json => write_json(w, &cells),
                Format::Csv => write_csv(w, &cells),
                Format::Svg => w
                    .write_all(sweep_svg(&cells).as_bytes())
                    .map_err(|e| ExperimentError::Output(e.to_string())),
            })
        }
        Command::Facets {
            n0,
            m_min,
            m_max,
            trials,
            dist,
            output,
        } => {
            no_svg(output)?;
            let rows = facet_report(*n0, *m_min..=*m_max, dist, *trials, common.seed)?;
            let mismatches = rows
                .iter()
                .filter(|r| r.empirical_match == Some(false))
                .count();
            let summary = format!("rows={} enumeration_mismatches={mismatches}", rows.len());
            emit(output, &summary, |w| match output.format {
                Format::Json => write_json(w, &rows),
                _ => write_rows_csv(w, &rows),
            })?;
            if mismatches > 0 {
                return Err(Failure::Internal(format!(
                    "{mismatches} rows disagree with enumeration"
                )));
            }
            Ok(())
        }
        Command::Compare {
            n0,
            n1,
            trials,
            dist,
            domain_samples,
            domain_radius,
            perturbation_count,
            perturbation_radius,
            output,
        } => {
            no_svg(output)?;
            let d = DetectorConfig::for_input_dim(*n0);
            let cfg = DetectorConfig {
                domain_samples: domain_samples.unwrap_or(d.domain_samples),
                domain_radius: domain_radius.unwrap_or(d.domain_radius),
                perturbation_count: perturbation_count.unwrap_or(d.perturbation_count),
                perturbation_radius: perturbation_radius.unwrap_or(d.perturbation_radius),
            };
            if !cfg.is_valid() {
                return Err(Failure::Usage(
                    "detector settings must be positive and finite".into(),
                ));
            }
            let r = detector_agreement(
                *n0,
                *n1,
                dist,
                *trials,
                common.seed,
                &cfg,
                &options(common, None),
            )?;
            let summary = format!(
                "agreement={} false_positives={} false_negatives={} marginal={}",
                fmt_sig(r.agreement_rate()),
                r.false_positives,
                r.false_negatives,
                r.marginal_discards
            );
            let rows = [r];
            emit(output, &summary, |w| match output.format {
                Format::Json => write_json(w, &rows[..]),
                _ => write_rows_csv(w, &rows),
            })
        }
    }
}

/// Largest instance cross-checked by enumeration in `counts`.
const CHECK_LIMIT: (u64, u64) = (10, 4);

fn counts(m: u64, n: u64, check: bool, seed: u64) -> Result<(), Failure> {
    let c = region_counts(m, n)?;
    let f = facet_statistics(m, n)?;
    println!("regions={} bounded={}", c.total, c.bounded);
    println!("facets={} avg_facets={}", f.total_facets, f.avg_facets);
    if check && m <= CHECK_LIMIT.0 && n <= CHECK_LIMIT.1 {
        let arch = Architecture::new(vec![n as usize, m as usize, 1])?;
        let dist = Distribution::Normal { std_dev: 1.0 };
        let params = sample_nondegenerate(&arch, &dist, seed, &DegeneracyCheck::default())?.params;
        let regions = enumerate_regions_with_facets(
            &first_layer_arrangement(&params)?,
            &ArrangementConfig::default(),
        )?;
        let bounded = regions.iter().filter(|r| r.bounded).count();
        let facet_sum: usize = regions.iter().filter_map(|r| r.facet_count).sum();
        let ok = regions.len() as u128 == c.total
            && bounded as u128 == c.bounded
            && facet_sum as u128 == 2 * f.total_facets;
        println!(
            "enumerated regions={} bounded={bounded} facet_sum={facet_sum} {}",
            regions.len(),
            if ok { "match" } else { "MISMATCH" }
        );
        if !ok {
            return Err(Failure::Internal(
                "enumeration disagrees with the closed forms".into(),
            ));
        }
    }
    Ok(())
}

fn decide(path: &PathBuf, neuron: usize, eps: f64) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let params: NetworkParams = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let cfg = StabilityConfig {
        eps,
        ..StabilityConfig::default()
    };
    let print = |v: &deadneuron::stability::StabilityVerdict| {
        println!("{}", serde_json::to_string(v).expect("verdict serializes"));
    };
    match is_stably_unactivated_exact(&params, NeuronRef::second_layer(neuron), &cfg) {
        Ok(v) => {
            print(&v);
            Ok(())
        }
        Err(StabilityError::Marginal(v)) => {
            print(&v);
            Err(Failure::Marginal)
        }
        Err(
            e @ (StabilityError::NotGeneric | StabilityError::Network(NetworkError::NotGeneric)),
        ) => Err(Failure::NotGeneric(e.to_string())),
        Err(e @ (StabilityError::NeuronOutOfRange { .. } | StabilityError::Network(_))) => {
            Err(Failure::Usage(e.to_string()))
        }
        Err(e) => Err(Failure::Internal(e.to_string())),
    }
}
