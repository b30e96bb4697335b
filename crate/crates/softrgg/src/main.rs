use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use softrgg::config::RegimeShape;
use softrgg::harness::summary_json;
use softrgg::{io, ExperimentConfig, ExperimentSummary, HarnessError};
use softrgg_core::analysis::component_summary;
use softrgg_core::points::{sample_binomial, sample_poisson};
use softrgg_core::quadrature::{boundary_decomposition, expected_isolated_with, Kernel, QuadratureOptions};
use softrgg_core::regimes::{classify_regime, solve_r, Regime, RegimeSpec};
use softrgg_core::softgraph::{sample_graph, SamplerMode, DEFAULT_TAIL_EPS};
use softrgg_core::stats::poisson_pmf;
use softrgg_core::{SeedSpec, ShapeDescriptor};

#[derive(Parser)]
#[command(name = "softrgg", version, about = "Soft random geometric graphs: simulation, quadrature and regime solving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampler {
    Exact,
    CellList,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Poisson,
    Binomial,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one graph and print its component summary.
    Simulate {
        /// Connection function JSON file.
        #[arg(long)]
        connection: PathBuf,
        /// `binomial:N` or `poisson:LAMBDA`.
        #[arg(long)]
        points: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long, value_enum, default_value_t = Sampler::CellList)]
        sampler: Sampler,
        #[arg(long, default_value_t = DEFAULT_TAIL_EPS)]
        tail_eps: f64,
        /// Write the points as CSV.
        #[arg(long)]
        points_out: Option<PathBuf>,
        /// Write the edge list as CSV.
        #[arg(long)]
        edges_out: Option<PathBuf>,
    },
    /// Run an experiment described by a JSON config and print its summary.
    Experiment {
        config: PathBuf,
        /// Directory for records.csv and summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config's thread count.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Expected number of isolated vertices by quadrature.
    Integrate {
        #[arg(long)]
        connection: PathBuf,
        /// `n` (binomial kernel) or `λ` (Poisson kernel).
        #[arg(long, allow_negative_numbers = true)]
        intensity: f64,
        #[arg(long, value_enum, default_value_t = KernelArg::Poisson)]
        kernel: KernelArg,
        #[arg(long, default_value_t = 1e-8)]
        rel_tol: f64,
        /// Print the interior/side/corner asymptotic terms instead.
        #[arg(long)]
        decomposition: bool,
    },
    /// Radius achieving the limit `alpha` in a regime (d = 2).
    Solve {
        #[arg(long)]
        regime: String,
        #[arg(long, allow_negative_numbers = true)]
        n: f64,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// `step`, `rayleigh:BETA,GAMMA`, or a connection function JSON file.
        #[arg(long, default_value = "step")]
        shape: String,
    },
    /// N0 histogram of a summary against the Poisson pmf, as CSV.
    Report {
        summary: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Errors split by exit code: 1 for bad input, 2 for failures while running.
enum Failure {
    Invalid(anyhow::Error),
    Runtime(anyhow::Error),
}

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Invalid(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn classify(e: HarnessError) -> Failure {
    match &e {
        HarnessError::Config(_) => invalid(e),
        HarnessError::Core(softrgg_core::Error::ToleranceNotReached { .. }) => runtime(e),
        HarnessError::Core(_) => invalid(e),
        _ => runtime(e),
    }
}

fn core_failure(e: softrgg_core::Error) -> Failure {
    classify(HarnessError::Core(e))
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(runtime)?;
    println!("{text}");
    Ok(())
}

fn parse_points(spec: &str) -> anyhow::Result<(&str, f64)> {
    let (kind, value) = spec.split_once(':').ok_or_else(|| anyhow!("expected binomial:N or poisson:LAMBDA"))?;
    let value: f64 = value.parse().with_context(|| format!("bad number in {spec:?}"))?;
    match kind {
        "binomial" if value >= 0.0 && value.fract() == 0.0 => Ok((kind, value)),
        "poisson" if value >= 0.0 && value.is_finite() => Ok((kind, value)),
        _ => bail!("expected binomial:N or poisson:LAMBDA, got {spec:?}"),
    }
}

/// Shape pair `(J1, J2)` from `step`, `rayleigh:BETA,GAMMA` or a connection file.
fn parse_shape(spec: &str) -> anyhow::Result<ShapeDescriptor> {
    if spec == "step" {
        return Ok(RegimeShape::Step.descriptor()?);
    }
    if let Some(params) = spec.strip_prefix("rayleigh:") {
        let (b, g) = params.split_once(',').ok_or_else(|| anyhow!("expected rayleigh:BETA,GAMMA"))?;
        let shape = RegimeShape::Rayleigh { beta: b.trim().parse()?, gamma: g.trim().parse()?, eta: None };
        return Ok(shape.descriptor()?);
    }
    let f = io::read_connection(Path::new(spec))?;
    if f.dimension() != 2 {
        bail!("regime shapes are two-dimensional");
    }
    Ok(f.shape()?)
}

fn simulate(
    connection: &Path,
    points: &str,
    seed: SeedSpec,
    mode: SamplerMode,
    points_out: Option<&Path>,
    edges_out: Option<&Path>,
) -> Result<(), Failure> {
    let f = io::read_connection(connection).map_err(invalid)?;
    let (kind, value) = parse_points(points).map_err(invalid)?;
    let d = f.dimension();
    let pts = if kind == "binomial" {
        sample_binomial(value as usize, d, seed.child(0))
    } else {
        sample_poisson(value, d, seed.child(0))
    }
    .map_err(core_failure)?;
    let graph = sample_graph(&pts, &f, seed.child(1), mode).map_err(core_failure)?;
    if let Some(path) = points_out {
        io::write_points(path, &pts).map_err(runtime)?;
    }
    if let Some(path) = edges_out {
        io::write_edges(path, &graph).map_err(runtime)?;
    }
    print_json(&json!({
        "seed": seed,
        "sampler": mode,
        "n_points": pts.len(),
        "n_edges": graph.n_edges(),
        "components": component_summary(&graph),
    }))
}

fn experiment(config: &Path, out: Option<&Path>, threads: Option<usize>) -> Result<(), Failure> {
    let mut cfg: ExperimentConfig = io::read_json(config).map_err(invalid)?;
    if threads.is_some() {
        cfg.threads = threads;
    }
    let start = Instant::now();
    let output = softrgg::run_experiment(&cfg).map_err(classify)?;
    eprintln!("{} trials in {:.2?}", cfg.trials, start.elapsed());
    if let Some(dir) = out {
        softrgg::persist(&output, dir).map_err(runtime)?;
    }
    println!("{}", summary_json(&output.summary));
    Ok(())
}

fn integrate(
    connection: &Path,
    intensity: f64,
    kernel: Kernel,
    rel_tol: f64,
    decomposition: bool,
) -> Result<(), Failure> {
    let f = io::read_connection(connection).map_err(invalid)?;
    if decomposition {
        let b = boundary_decomposition(intensity, &f).map_err(core_failure)?;
        return print_json(&json!({
            "interior": b.interior,
            "side": b.side,
            "corner": b.corner,
            "a_n": b.a_n,
        }));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(invalid(anyhow!("rel-tol {rel_tol} not in (0, 1)")));
    }
    let opts = QuadratureOptions { rel_tol, ..QuadratureOptions::default() };
    let r = expected_isolated_with(intensity, &f, kernel, &opts).map_err(core_failure)?;
    print_json(&serde_json::to_value(r).map_err(runtime)?)
}

fn solve(regime: &str, n: f64, p: f64, alpha: f64, shape: &str) -> Result<(), Failure> {
    let regime: Regime = regime.parse().map_err(invalid)?;
    let descriptor = parse_shape(shape).map_err(invalid)?;
    let spec = RegimeSpec::new(regime, n, p, alpha, &descriptor);
    let sol = solve_r(&spec).map_err(core_failure)?;
    let class = classify_regime(n, p);
    print_json(&json!({
        "r": sol.r,
        "nI_target": sol.n_i_target,
        "aux_root": sol.aux_root,
        "regime": regime,
        "ratios": class.ratios,
        "classified_regime": class.regime,
        "rationale": class.rationale,
    }))
}

fn report(summary: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let s: ExperimentSummary = io::read_json(summary).map_err(invalid)?;
    let hist = s.n0_histogram.ok_or_else(|| invalid(anyhow!("summary has no N0 histogram")))?;
    let mean = s.quadrature_reference.map(|q| q.value).unwrap_or(s.mean_n0);
    // extend past the histogram until the Poisson tail is negligible
    let mut top = hist.keys().next_back().copied().unwrap_or(0);
    let mut covered: f64 = (0..=top).map(|k| poisson_pmf(k, mean)).sum();
    while covered < 1.0 - 1e-9 && top < 100_000 {
        top += 1;
        covered += poisson_pmf(top, mean);
    }
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(std::fs::File::create(path).with_context(|| path.display().to_string()).map_err(runtime)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["k", "empirical", "poisson"]).map_err(runtime)?;
    for k in 0..=top {
        let e = hist.get(&k).copied().unwrap_or(0.0);
        w.write_record([k.to_string(), e.to_string(), poisson_pmf(k, mean).to_string()]).map_err(runtime)?;
    }
    w.flush().map_err(runtime)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { connection, points, seed, stream, sampler, tail_eps, points_out, edges_out } => {
            let mode = match sampler {
                Sampler::Exact => SamplerMode::Exact,
                Sampler::CellList => SamplerMode::CellList { tail_eps },
            };
            simulate(
                &connection,
                &points,
                SeedSpec::new(seed, stream),
                mode,
                points_out.as_deref(),
                edges_out.as_deref(),
            )
        }
        Command::Experiment { config, out, threads } => experiment(&config, out.as_deref(), threads),
        Command::Integrate { connection, intensity, kernel, rel_tol, decomposition } => {
            let kernel = match kernel {
                KernelArg::Poisson => Kernel::Poisson,
                KernelArg::Binomial => Kernel::Binomial,
            };
            integrate(&connection, intensity, kernel, rel_tol, decomposition)
        }
        Command::Solve { regime, n, p, alpha, shape } => solve(&regime, n, p, alpha, &shape),
        Command::Report { summary, out } => report(&summary, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
