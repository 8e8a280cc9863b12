use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use tcm_core::dataio::{self, load_pings};
use tcm_core::epidemics::{
    analytic_r0, analytic_r_star, h1_tilde_derivative, pgf_derivatives, simulate_sir, transmission_probability,
    EpidemicParams, Pgf, Seeding, SirConfig,
};
use tcm_core::estimate::estimate_report;
use tcm_core::experiment::{self, DriftStudy, EstimatorTable, Scale, WeeklyPipeline};
use tcm_core::metrics::Metric;
use tcm_core::netcore::{configuration_model_with, degree_distribution, DegreeLaw, MatchPolicy};
use tcm_core::tcm::evolve_with;
use tcm_core::{rng_from_seed, BetaParams, ErrorKind, ModelKind, PersistenceModel, Window};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

const CITATION: &str = "Sapiezynski, P., Stopczynski, A., Lassen, D. D., Lehmann, S. (2019). \
Interaction data from the Copenhagen Networks Study. Scientific Data 6, 315. \
https://doi.org/10.1038/s41597-019-0325-x";

/// Temporal configuration model networks and epidemics.
#[derive(Parser, Debug)]
#[command(name = "tcm", version, args_override_self = true)]
struct Cli {
    /// TOML file whose keys mirror the subcommand's flags; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a configuration-model graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Evolve an edge list under a persistence model.
    Evolve(EvolveArgs),
    /// Estimate persistence moments from a temporal edge list.
    Estimate(EstimateArgs),
    /// Simulate SIR on an evolving network.
    Sir(SirArgs),
    /// Analytic transmission probability and reproduction numbers.
    Rstar(RstarArgs),
    /// Distance between two degree distributions.
    Distance(DistanceArgs),
    /// Fit a persistence model to the first graphs of a temporal edge list.
    Fit(FitArgs),
    /// Degree distribution of an edge list as CSV.
    Degrees(DegreesArgs),
    /// Build weekly contact networks from a ping CSV.
    Ingest(IngestArgs),
    /// Rerun a published experiment and write its table as CSV.
    Reproduce(ReproduceArgs),
    /// Print where to obtain the proximity dataset.
    FetchData,
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Output {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.output {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    /// `poisson:<mean>` or `const:<k>`.
    #[arg(long, default_value = "poisson:6")]
    degree: DegreeLaw,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Retries for rejected stub pairs.
    #[arg(long, default_value_t = 0)]
    max_retries: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug, Clone, Copy)]
struct ModelArgs {
    /// m0, m1, m2 or m3.
    #[arg(long, default_value = "m1")]
    model: ModelKind,
    /// Constant persistence for m1.
    #[arg(long)]
    p: Option<f64>,
    /// Beta shape alpha of the persistence law for m2/m3.
    #[arg(long)]
    w_alpha: Option<f64>,
    /// Beta shape beta of the persistence law for m2/m3.
    #[arg(long)]
    w_beta: Option<f64>,
    /// Redraw period for m2/m3, or `forever`.
    #[arg(long, default_value = "forever")]
    window: Window,
}

impl ModelArgs {
    fn build(&self) -> anyhow::Result<PersistenceModel> {
        let dist = || -> anyhow::Result<BetaParams<f64>> {
            match (self.w_alpha, self.w_beta) {
                (Some(a), Some(b)) => Ok(BetaParams::new(a, b)?),
                _ => Err(usage("--w-alpha and --w-beta are required for m2/m3")),
            }
        };
        let m = match self.model {
            ModelKind::Model0 => PersistenceModel::Model0,
            ModelKind::Model1 => {
                PersistenceModel::model1(self.p.ok_or_else(|| usage("--p is required for m1"))?)?
            }
            ModelKind::Model2 => PersistenceModel::Model2 {
                dist: dist()?,
                window: self.window,
            },
            ModelKind::Model3 => PersistenceModel::Model3 {
                dist: dist()?,
                window: self.window,
            },
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Args, Debug)]
struct EvolveArgs {
    /// Initial edge list.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    max_retries: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Temporal edge list.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "m1")]
    model: ModelKind,
    /// Window length for the averaged estimators.
    #[arg(long, default_value_t = 1)]
    window: usize,
    /// Emit a CSV row with header instead of key=value lines.
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct SirArgs {
    /// Initial edge list.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Per-step transmission probability.
    #[arg(long)]
    beta: f64,
    /// Per-step recovery probability.
    #[arg(long)]
    gamma: f64,
    /// Number of uniformly chosen seeds.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
    /// Early stage lasts while cumulative infections are below this fraction of N.
    #[arg(long, default_value_t = 0.01)]
    early_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for `counts.csv` and `nodes.csv`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RstarArgs {
    /// Degree law (`poisson:<mean>`, `const:<k>`) when --degree-csv is absent.
    #[arg(long, default_value = "poisson:6")]
    degree: DegreeLaw,
    /// Degree distribution CSV or edge list.
    #[arg(long)]
    degree_csv: Option<PathBuf>,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    gamma: f64,
    /// Constant edge persistence.
    #[arg(long)]
    p: f64,
}

#[derive(Args, Debug)]
struct DistanceArgs {
    /// Degree CSV or edge list.
    #[arg(long)]
    a: PathBuf,
    /// Degree CSV or edge list.
    #[arg(long)]
    b: PathBuf,
    /// `tv` or `hellinger`.
    #[arg(long, default_value = "tv")]
    metric: Metric,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Temporal edge list; graphs 0..2 are used.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    model: ModelKind,
}

#[derive(Args, Debug)]
struct DegreesArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    /// Minimum RSSI in dBm (inclusive).
    #[arg(long, default_value_t = -75, allow_negative_numbers = true)]
    rssi: i64,
    /// Period length in seconds.
    #[arg(long, default_value_t = 86_400)]
    period: i64,
    /// Number of periods kept from the start of the data.
    #[arg(long, default_value_t = 28)]
    periods: usize,
    /// Periods unioned per output graph.
    #[arg(long, default_value_t = 7)]
    group: usize,
}

impl PipelineArgs {
    fn pipeline(&self) -> WeeklyPipeline {
        WeeklyPipeline {
            rssi_threshold: self.rssi,
            period_seconds: self.period,
            periods: self.periods,
            group: self.group,
        }
    }
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Ping CSV `timestamp,user_a,user_b,rssi`.
    #[arg(long)]
    pings: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Where to write the dense-index to user-id map.
    #[arg(long)]
    node_map: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Experiment {
    Table1,
    Table2,
    Table3,
    Table4,
    Figure1,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    /// `full` or `quick`.
    #[arg(long, default_value = "full")]
    scale: Scale,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Ping CSV, required for table4.
    #[arg(long)]
    pings: Option<PathBuf>,
    /// Prediction runs for table4.
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: &str) -> anyhow::Error {
    anyhow!(UsageError(msg.to_string()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<tcm_core::Error>() {
            return match e.kind() {
                ErrorKind::Usage => EXIT_USAGE,
                ErrorKind::Data => EXIT_DATA,
                ErrorKind::InfeasibleFit => EXIT_INFEASIBLE,
            };
        }
        if cause.downcast_ref::<UsageError>().is_some() {
            return EXIT_USAGE;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_DATA;
        }
    }
    EXIT_USAGE
}

/// Turns config-file entries into flags inserted right after the subcommand
/// so that explicit flags, which come later, override them.
fn config_args(path: &Path) -> anyhow::Result<Vec<OsString>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| anyhow!(tcm_core::Error::Parse {
            path: path.display().to_string(),
            msg: format!("{e}"),
        }))?;
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => out.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => {
                out.push(flag.into());
                out.push(s.into());
            }
            toml::Value::Integer(i) => out.push(format!("{flag}={i}").into()),
            toml::Value::Float(x) => out.push(format!("{flag}={x}").into()),
            other => bail!(UsageError(format!("config key '{key}' has unsupported value {other}"))),
        }
    }
    Ok(out)
}

fn expand_config(args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let pos = args.iter().position(|a| a == "--config");
    let path = match pos {
        Some(i) => args.get(i + 1).map(PathBuf::from),
        None => args
            .iter()
            .find_map(|a| a.to_str().and_then(|s| s.strip_prefix("--config=")).map(PathBuf::from)),
    };
    let Some(path) = path else { return Ok(args) };
    let extra = config_args(&path)?;
    let subcommands: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let Some(sub) = args.iter().position(|a| a.to_str().is_some_and(|s| subcommands.iter().any(|c| c == s))) else {
        return Ok(args);
    };
    // reproduce takes its experiment name positionally; keep it first.
    let insert_at = if args[sub] == "reproduce" { sub + 2 } else { sub + 1 };
    let mut out = args;
    let at = insert_at.min(out.len());
    out.splice(at..at, extra);
    Ok(out)
}

fn main() -> ExitCode {
    let raw: Vec<OsString> = std::env::args_os().collect();
    let args = match expand_config(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let cli = match Cli::command().try_get_matches_from(args).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Evolve(a) => evolve(a),
        Command::Estimate(a) => estimate(a),
        Command::Sir(a) => sir(a),
        Command::Rstar(a) => rstar(a),
        Command::Distance(a) => distance(a),
        Command::Fit(a) => fit(a),
        Command::Degrees(a) => {
            let g = dataio::load_edge_list(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
            a.out.emit(&dataio::write_degree_csv(&degree_distribution(&g)))
        }
        Command::Ingest(a) => ingest(a),
        Command::Reproduce(a) => reproduce(a),
        Command::FetchData => {
            println!("The proximity dataset is not bundled. Download it from the public release:");
            println!("  {CITATION}");
            println!("Then pass the Bluetooth ping CSV with --pings to `tcm ingest` or `tcm reproduce table4`.");
            Ok(())
        }
    }
}

fn generate(a: GenerateArgs) -> anyhow::Result<()> {
    let mut rng = rng_from_seed(a.seed);
    let (seq, repaired) = a.degree.sample(a.n, &mut rng)?;
    if repaired {
        eprintln!("warning: odd degree sum repaired by adding one stub to a random node");
    }
    let m = configuration_model_with(&seq, MatchPolicy { max_retries: a.max_retries }, &mut rng)?;
    eprintln!("edges={} discarded_pairs={}", m.graph.edge_count(), m.discards);
    a.out.emit(&dataio::write_edge_list(&m.graph))
}

fn evolve(a: EvolveArgs) -> anyhow::Result<()> {
    let g = dataio::load_edge_list(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let model = a.model.build()?;
    let mut rng = rng_from_seed(a.seed);
    let tn = evolve_with(g, model, a.steps, MatchPolicy { max_retries: a.max_retries }, &mut rng)?;
    let discards: usize = tn.all_step_stats().iter().map(|s| s.discards).sum();
    eprintln!("steps={} discarded_pairs={discards}", a.steps);
    a.out.emit(&dataio::write_temporal_edge_list(tn.snapshots())?)
}

fn estimate(a: EstimateArgs) -> anyhow::Result<()> {
    let snaps = dataio::load_temporal_edge_list(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let r = estimate_report(&snaps, a.model, a.window)?;
    if a.csv {
        println!("{}", dataio::ESTIMATE_CSV_HEADER);
        println!("{}", dataio::estimate_csv_row(&r));
    } else {
        print!("{}", dataio::estimate_key_values(&r));
    }
    Ok(())
}

fn sir(a: SirArgs) -> anyhow::Result<()> {
    let g = dataio::load_edge_list(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let model = a.model.build()?;
    let params = EpidemicParams::new(a.beta, a.gamma, Seeding::Count(a.seeds))?;
    let config = SirConfig {
        max_steps: a.max_steps,
        early_fraction: a.early_fraction,
        stop_after_early_stage: false,
    };
    let mut rng = rng_from_seed(a.seed);
    let trace = simulate_sir(g, model, &params, &config, &mut rng)?;
    let fmt_opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_else(|| "NA".into());
    println!("steps={}", trace.counts.len() - 1);
    println!("final_size={}", trace.final_size());
    println!("r0={}", fmt_opt(trace.measured_r0()));
    println!("early_stage_infectees={}", trace.early_stage.infectees);
    println!("r_star={}", fmt_opt(trace.measured_r_star()));
    if let Some(dir) = a.out_dir {
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("counts.csv"), dataio::write_counts_csv(&trace))?;
        fs::write(dir.join("nodes.csv"), dataio::write_nodes_csv(&trace))?;
    }
    Ok(())
}

fn rstar(a: RstarArgs) -> anyhow::Result<()> {
    let pgf = match &a.degree_csv {
        Some(p) => Pgf::finite(dataio::load_degree_source(p).with_context(|| format!("reading {}", p.display()))?),
        None => match a.degree {
            DegreeLaw::Poisson(l) => Pgf::poisson(l)?,
            DegreeLaw::Constant(k) => Pgf::regular(k),
        },
    };
    let d = pgf_derivatives(&pgf);
    println!("tau={}", transmission_probability(a.beta, a.gamma, a.p)?);
    println!("g1={}", d.first);
    println!("g2={}", d.second);
    println!("h1_prime={}", h1_tilde_derivative(&pgf, a.gamma, a.p)?);
    println!("r0={}", analytic_r0(&pgf, a.beta, a.gamma, a.p)?);
    println!("r_star={}", analytic_r_star(&pgf, a.beta, a.gamma, a.p)?);
    Ok(())
}

fn distance(a: DistanceArgs) -> anyhow::Result<()> {
    let p = dataio::load_degree_source(&a.a).with_context(|| format!("reading {}", a.a.display()))?;
    let q = dataio::load_degree_source(&a.b).with_context(|| format!("reading {}", a.b.display()))?;
    println!("{}={}", a.metric, a.metric.distance(&p, &q));
    Ok(())
}

fn fit(a: FitArgs) -> anyhow::Result<()> {
    let snaps = dataio::load_temporal_edge_list(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let seq = dataio::NetworkSequence::from_graphs(snaps)?;
    let model = dataio::fit_from_sequence(&seq, a.model)?;
    match model {
        PersistenceModel::Model0 => println!("model=m0"),
        PersistenceModel::Model1 { p } => println!("model=m1\np={p}"),
        PersistenceModel::Model2 { dist, .. } | PersistenceModel::Model3 { dist, .. } => {
            println!("model={}\nalpha={}\nbeta={}", a.model.tag(), dist.alpha, dist.beta)
        }
    }
    Ok(())
}

fn load_weekly(path: &Path, pipeline: &WeeklyPipeline) -> anyhow::Result<dataio::NetworkSequence> {
    let load = load_pings(path, pipeline.rssi_threshold).with_context(|| format!("reading {}", path.display()))?;
    eprintln!(
        "pings kept={} weak={} non_contact={} malformed={}",
        load.records.len(),
        load.weak,
        load.non_contact,
        load.malformed
    );
    Ok(pipeline.weekly(&load.records)?)
}

fn ingest(a: IngestArgs) -> anyhow::Result<()> {
    let weekly = load_weekly(&a.pings, &a.pipeline.pipeline())?;
    if let Some(p) = &a.node_map {
        fs::write(p, dataio::write_node_map_csv(weekly.node_ids()))?;
    }
    a.out.emit(&dataio::write_temporal_edge_list(weekly.graphs())?)
}

fn reproduce(a: ReproduceArgs) -> anyhow::Result<()> {
    let text = match a.experiment {
        Experiment::Table1 | Experiment::Table2 | Experiment::Table3 => {
            let table = match a.experiment {
                Experiment::Table1 => EstimatorTable::Table1,
                Experiment::Table2 => EstimatorTable::Table2,
                _ => EstimatorTable::Table3,
            };
            let results = experiment::run_estimator_table(table, a.scale, a.seed)?;
            experiment::estimator_table_csv(table, a.scale, a.seed, &results)
        }
        Experiment::Figure1 => {
            let study = DriftStudy::default();
            let report = experiment::drift_report(&study, &mut rng_from_seed(a.seed))?;
            experiment::drift_csv(&study, a.seed, &report)
        }
        Experiment::Table4 => {
            let Some(path) = &a.pings else {
                bail!(UsageError(
                    "table4 needs the proximity ping CSV via --pings; run `tcm fetch-data` for the source".into()
                ));
            };
            let pipeline = a.pipeline.pipeline();
            let weekly = load_weekly(path, &pipeline)?;
            let results = experiment::compare_models(&weekly, &ModelKind::ALL, a.runs, a.seed)?;
            let header = format!(
                "table4: degree-distribution fit of predicted weekly networks, runs={}, seed={}, nodes={}, \
                 rssi>={} dBm\nprediction starts from the first weekly graph; m2/m3 probabilities held fixed",
                a.runs,
                a.seed,
                weekly.node_count(),
                pipeline.rssi_threshold
            );
            experiment::model_fit_csv(&header, &results)
        }
    };
    a.out.emit(&text)
}
