//! `torus-bp` drives the simulation, certificate, and Monte Carlo layers
//! from the command line.
//!
//! Every invocation emits self-describing result records (JSON lines by
//! default, CSV with `--out csv`) whose parameter echo is sufficient to
//! reproduce the run bit-for-bit.
//!
//! Exit codes: 0 success; 1 usage error; 2 validation/assertion failure;
//! 3 completed but truncated (some runs hit the round cap).

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use torus_bp::dynamics::{default_max_rounds, evolve, step, UpdateRule};
use torus_bp::experiments::{
    estimate_threshold, fit_exponent, random_config, run_sweep, Event, ProbeSet, SweepSpec,
    DEFAULT_TOLERANCE, DEFAULT_TRIALS,
};
use torus_bp::io::{encode_config, ConfigFile};
use torus_bp::scaling::{occupation_experiment, NeighborPick, Sign};
use torus_bp::structures::{
    cluster_black_nodes, default_window_radius, find_w_robust_witnesses, max_extinction_time,
    min_eternal_size, NodeSet,
};
use torus_bp::{Configuration, Error, TorusShape};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "torus-bp",
    version,
    about = "Bootstrap-percolation-style dynamics on d-dimensional tori"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for result records.
    #[arg(long, global = true, value_enum, default_value_t = OutFmt::Json)]
    out: OutFmt,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFmt {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum EventArg {
    BlackSurvives,
    FullyBlack,
    FullyWhite,
    Coexist,
}

impl From<EventArg> for Event {
    fn from(e: EventArg) -> Event {
        match e {
            EventArg::BlackSurvives => Event::BlackSurvives,
            EventArg::FullyBlack => Event::FullyBlack,
            EventArg::FullyWhite => Event::FullyWhite,
            EventArg::Coexist => Event::Coexist,
        }
    }
}

/// Flags shared by every lattice-bound subcommand.
#[derive(Args, Clone)]
struct ShapeArgs {
    /// Torus dimension.
    #[arg(long)]
    d: usize,

    /// Torus side length.
    #[arg(long = "L")]
    side: usize,
}

impl ShapeArgs {
    fn shape(&self) -> Result<TorusShape, CliError> {
        TorusShape::new(self.d, self.side).map_err(CliError::Domain)
    }
}

#[derive(Args, Clone)]
struct RuleArgs {
    /// Update rule: bp | two-way | recovery | modified | majority |
    /// general:R,R'
    #[arg(long)]
    rule: String,

    /// Threshold parameter r (required by bp, two-way, recovery, modified).
    #[arg(long)]
    r: Option<u32>,
}

impl RuleArgs {
    fn parse(&self) -> Result<UpdateRule, CliError> {
        parse_rule(&self.rule, self.r)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Apply one synchronous round (or --rounds of them) to a configuration.
    Step(StepCmd),
    /// Run to the limit cycle and report period, consensus time, and phase.
    Run(RunCmd),
    /// Event frequencies over an explicit probability grid.
    Sweep(SweepCmd),
    /// Bisection estimate of the p where the event frequency crosses 1/2.
    Threshold(ThresholdCmd),
    /// Fit the threshold-vs-size exponent (from measurements or given points).
    ScalingFit(ScalingFitCmd),
    /// Exhaustive minimum eternal-set size search.
    MinEternal(MinEternalCmd),
    /// Exhaustive worst-case extinction time for sparse starts.
    Extinction(ExtinctionCmd),
    /// Rectangle-merging cluster report with the phase-1 certificate.
    Cluster(ClusterCmd),
    /// White-robust witness family for a black-robust node set.
    Witnesses(WitnessesCmd),
    /// Occupation experiment: rounds until a square with chosen occupied
    /// neighbors becomes occupied.
    Lemma5(Lemma5Cmd),
}

#[derive(Args)]
struct StepCmd {
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    rule: RuleArgs,
    /// Input configuration file (JSON; sparse or dense form).
    #[arg(long)]
    config: Option<String>,
    /// Random initial density (used when --config is absent).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of rounds to apply.
    #[arg(long, default_value_t = 1)]
    rounds: usize,
}

#[derive(Args)]
struct RunCmd {
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    rule: RuleArgs,
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Include the limit-cycle configurations in the payload.
    #[arg(long, default_value_t = false)]
    emit_cycle: bool,
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    rule: RuleArgs,
    /// Comma-separated probe probabilities.
    #[arg(long, value_delimiter = ',')]
    p_grid: Vec<f64>,
    #[arg(long, value_enum)]
    event: EventArg,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_rounds: Option<usize>,
}

#[derive(Args)]
struct ThresholdCmd {
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    rule: RuleArgs,
    #[arg(long)]
    p_lo: f64,
    #[arg(long)]
    p_hi: f64,
    #[arg(long, value_enum)]
    event: EventArg,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Relative bracket width at which bisection stops.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct ScalingFitCmd {
    /// Fit pre-measured points "L:p50,L:p50,..." without running anything.
    #[arg(long, value_delimiter = ',')]
    points: Vec<String>,
    /// Sizes to measure survival thresholds at (ignored with --points).
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value = "two-way")]
    rule: String,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long, value_enum, default_value_t = EventArg::BlackSurvives)]
    event: EventArg,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Per-size bracket: lo = lo-coeff / L.
    #[arg(long, default_value_t = 0.02)]
    lo_coeff: f64,
    /// Per-size bracket: hi = min(hi-coeff / L, 0.45).
    #[arg(long, default_value_t = 6.0)]
    hi_coeff: f64,
    /// Exponent the fit is compared against.
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    predicted: f64,
}

#[derive(Args)]
struct MinEternalCmd {
    #[arg(long)]
    d: usize,
    /// Accepted for interface symmetry; the search torus is sized from the
    /// window automatically.
    #[arg(long = "L")]
    side: Option<usize>,
    #[command(flatten)]
    rule: RuleArgs,
    #[arg(long, default_value_t = 4)]
    bound: usize,
    #[arg(long)]
    window_radius: Option<usize>,
}

#[derive(Args)]
struct ExtinctionCmd {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: u32,
    /// Number of black nodes to place.
    #[arg(long)]
    k: usize,
    #[arg(long)]
    window_radius: Option<usize>,
    #[arg(long, default_value_t = 5000)]
    cap: usize,
}

#[derive(Args)]
struct ClusterCmd {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    config: String,
}

#[derive(Args)]
struct WitnessesCmd {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long)]
    r: u32,
    /// Configuration file whose black nodes form the (r,b)-robust set.
    #[arg(long)]
    config: String,
}

#[derive(Args)]
struct Lemma5Cmd {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: usize,
    #[arg(long = "L")]
    side: usize,
    /// Occupied-neighbor picks "dim:+,dim:-"; at most r distinct dimensions.
    #[arg(long, value_delimiter = ',')]
    dims: Vec<String>,
    #[arg(long)]
    budget: Option<usize>,
}

// ---------------------------------------------------------------------------

enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

#[derive(Serialize)]
struct ResultRecord {
    schema_version: u32,
    command: String,
    params: serde_json::Value,
    payload: serde_json::Value,
    wall_time_ms: f64,
    truncated_trials: u64,
    generator: &'static str,
}

struct Emitter {
    format: OutFmt,
    records: Vec<ResultRecord>,
    /// `TORUS_BP_OUT_DIR` redirects the record stream into
    /// `<dir>/records.json` / `records.csv` instead of stdout. This is the
    /// only environment-variable configuration besides `CI`.
    out_dir: Option<PathBuf>,
    stream: Option<std::fs::File>,
}

impl Emitter {
    fn new(format: OutFmt) -> Result<Self, CliError> {
        let out_dir = std::env::var_os("TORUS_BP_OUT_DIR").map(PathBuf::from);
        let stream = match (&out_dir, format) {
            (Some(dir), OutFmt::Json) => {
                std::fs::create_dir_all(dir)
                    .map_err(|e| CliError::Usage(format!("cannot create {dir:?}: {e}")))?;
                Some(
                    std::fs::File::create(dir.join("records.json"))
                        .map_err(|e| CliError::Usage(format!("cannot write in {dir:?}: {e}")))?,
                )
            }
            _ => None,
        };
        Ok(Emitter {
            format,
            records: Vec::new(),
            out_dir,
            stream,
        })
    }

    fn push(&mut self, record: ResultRecord) {
        if self.format == OutFmt::Json {
            let line = serde_json::to_string(&record).expect("record serialization");
            match &mut self.stream {
                Some(f) => {
                    use std::io::Write;
                    writeln!(f, "{line}").expect("record write");
                }
                None => println!("{line}"),
            }
        }
        self.records.push(record);
    }

    /// CSV is emitted at the end: one flattened row per record under a
    /// shared header.
    fn finish(self) {
        if self.format != OutFmt::Csv || self.records.is_empty() {
            return;
        }
        let flats: Vec<Vec<(String, String)>> = self
            .records
            .iter()
            .map(|r| flatten(&serde_json::to_value(r).expect("record serialization")))
            .collect();
        let mut header: Vec<String> = Vec::new();
        for flat in &flats {
            for (k, _) in flat {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let sink: Box<dyn std::io::Write> = match &self.out_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).expect("create output directory");
                Box::new(std::fs::File::create(dir.join("records.csv")).expect("create csv"))
            }
            None => Box::new(std::io::stdout()),
        };
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(&header).expect("csv header");
        for flat in &flats {
            let row: Vec<String> = header
                .iter()
                .map(|k| {
                    flat.iter()
                        .find(|(fk, _)| fk == k)
                        .map(|(_, v)| v.clone())
                        .unwrap_or_default()
                })
                .collect();
            w.write_record(&row).expect("csv row");
        }
        w.flush().expect("csv flush");
    }
}

/// Depth-first flatten with dotted keys; arrays use numeric segments.
fn flatten(value: &serde_json::Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, v, out);
                }
            }
            serde_json::Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), v, out);
                }
            }
            serde_json::Value::Null => out.push((prefix.to_string(), String::new())),
            serde_json::Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}

/// Accepts both the flag form (`two-way` plus `--r`) and the echoed display
/// form (`two-way(2)`), so a record's parameter echo is directly re-runnable.
fn parse_rule(spec: &str, r: Option<u32>) -> Result<UpdateRule, CliError> {
    let bad = |what: &str| CliError::Usage(format!("bad threshold in {what:?}"));
    // Display form: name(args).
    if let Some((name, rest)) = spec.split_once('(') {
        let args = rest
            .strip_suffix(')')
            .ok_or_else(|| CliError::Usage(format!("unbalanced parentheses in {spec:?}")))?;
        if name == "general" {
            let (a, b) = args
                .split_once(',')
                .ok_or_else(|| CliError::Usage(format!("expected general(R,R') in {spec:?}")))?;
            return Ok(UpdateRule::GeneralBp {
                activation: a.trim().parse().map_err(|_| bad(spec))?,
                retention: b.trim().parse().map_err(|_| bad(spec))?,
            });
        }
        let embedded: u32 = args.trim().parse().map_err(|_| bad(spec))?;
        return parse_rule(name, Some(embedded));
    }
    let need_r = || r.ok_or_else(|| CliError::Usage(format!("--rule {spec} requires --r")));
    match spec {
        "bp" => Ok(UpdateRule::bootstrap(need_r()?)),
        "two-way" => Ok(UpdateRule::two_way(need_r()?)),
        "recovery" => Ok(UpdateRule::recovery(need_r()?)),
        "modified" => Ok(UpdateRule::modified(need_r()?)),
        "majority" => Ok(UpdateRule::Majority),
        other => {
            if let Some(args) = other.strip_prefix("general:") {
                let parts: Vec<&str> = args.split(',').collect();
                if parts.len() != 2 {
                    return Err(CliError::Usage(format!(
                        "bad rule {other:?}: expected general:R,R'"
                    )));
                }
                let activation = parts[0].parse().map_err(|_| bad(other))?;
                let retention = parts[1].parse().map_err(|_| bad(other))?;
                Ok(UpdateRule::GeneralBp {
                    activation,
                    retention,
                })
            } else {
                Err(CliError::Usage(format!(
                    "unknown rule {other:?}: expected bp | two-way | recovery | modified | majority | general:R,R'"
                )))
            }
        }
    }
}

/// Resolve the seed: explicit flag wins; in CI (env `CI` set) the flag is
/// mandatory; interactively a seed is drawn from the clock and echoed.
fn resolve_seed(seed: Option<u64>) -> Result<u64, CliError> {
    match seed {
        Some(s) => Ok(s),
        None => {
            if std::env::var_os("CI").is_some() {
                return Err(CliError::Usage("--seed is required when CI is set".into()));
            }
            let nanos = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0);
            Ok(torus_bp::rng::mix2(nanos, std::process::id() as u64))
        }
    }
}

fn load_config(path: &str, shape: TorusShape) -> Result<Configuration, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    let c = torus_bp::io::config_from_json(&text)?;
    if c.shape() != shape {
        return Err(CliError::Usage(format!(
            "config file {path} has shape T_{}^{}, command line says T_{}^{}",
            c.shape().side(),
            c.shape().dim(),
            shape.side(),
            shape.dim()
        )));
    }
    Ok(c)
}

fn initial_config(
    shape: TorusShape,
    config: &Option<String>,
    p: Option<f64>,
    seed: Option<u64>,
) -> Result<(Configuration, serde_json::Value), CliError> {
    if let Some(path) = config {
        let c = load_config(path, shape)?;
        Ok((c, serde_json::json!({ "config": path })))
    } else if let Some(p) = p {
        let seed = resolve_seed(seed)?;
        Ok((
            random_config(shape, p, seed),
            serde_json::json!({ "p": p, "seed": seed }),
        ))
    } else {
        Err(CliError::Usage(
            "need either --config or --p (with optional --seed)".into(),
        ))
    }
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("payload serialization")
}

fn parse_picks(specs: &[String], d: usize) -> Result<Vec<NeighborPick>, CliError> {
    specs
        .iter()
        .map(|s| {
            let (dim, sign) = s.split_once(':').ok_or_else(|| {
                CliError::Usage(format!("bad pick {s:?}: expected dim:+ or dim:-"))
            })?;
            let dim: usize = dim
                .parse()
                .map_err(|_| CliError::Usage(format!("bad dimension in pick {s:?}")))?;
            if dim >= d {
                return Err(CliError::Usage(format!("pick dimension {dim} >= d")));
            }
            let sign = match sign {
                "+" => Sign::Plus,
                "-" => Sign::Minus,
                _ => return Err(CliError::Usage(format!("bad sign in pick {s:?}"))),
            };
            Ok(NeighborPick { dim, sign })
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let mut emitter = match Emitter::new(cli.out) {
        Ok(e) => e,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            return ExitCode::from(1);
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let started = Instant::now();
    let result = dispatch(cli.command, &mut emitter, started);
    emitter.finish();
    match result {
        Ok(truncated) => {
            if truncated > 0 {
                eprintln!("warning: {truncated} run(s) hit the round cap before cycling");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Runs the command, pushing records into the emitter, and returns the
/// total number of truncated runs.
fn dispatch(cmd: Command, emitter: &mut Emitter, started: Instant) -> Result<u64, CliError> {
    let record = |command: &str,
                  params: serde_json::Value,
                  payload: serde_json::Value,
                  truncated: u64,
                  emitter: &mut Emitter| {
        emitter.push(ResultRecord {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            params,
            payload,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            truncated_trials: truncated,
            generator: torus_bp::rng::GENERATOR_ID,
        });
    };

    match cmd {
        Command::Step(args) => {
            let shape = args.shape.shape()?;
            let rule = args.rule.parse()?;
            let (mut c, source) = initial_config(shape, &args.config, args.p, args.seed)?;
            for _ in 0..args.rounds {
                c = step(&c, &rule)?;
            }
            let params = serde_json::json!({
                "d": shape.dim(), "L": shape.side(), "rule": rule.to_string(),
                "rounds": args.rounds, "source": source,
            });
            record(
                "step",
                params,
                serde_json::json!({ "config": json(&encode_config(&c)) }),
                0,
                emitter,
            );
            Ok(0)
        }
        Command::Run(args) => {
            let shape = args.shape.shape()?;
            let rule = args.rule.parse()?;
            let max_rounds = args
                .max_rounds
                .unwrap_or_else(|| default_max_rounds(&shape));
            let (c, source) = initial_config(shape, &args.config, args.p, args.seed)?;
            let out = evolve(&c, &rule, max_rounds)?;
            let cycle: Vec<ConfigFile> = if args.emit_cycle {
                out.cycle.iter().map(encode_config).collect()
            } else {
                Vec::new()
            };
            let params = serde_json::json!({
                "d": shape.dim(), "L": shape.side(), "rule": rule.to_string(),
                "max_rounds": max_rounds, "source": source, "emit_cycle": args.emit_cycle,
            });
            let truncated = u64::from(out.truncated);
            record(
                "run",
                params,
                serde_json::json!({
                    "classification": json(&out.classification),
                    "period": out.period,
                    "consensus_time": out.consensus_time,
                    "truncated": out.truncated,
                    "cycle": json(&cycle),
                }),
                truncated,
                emitter,
            );
            Ok(truncated)
        }
        Command::Sweep(args) => {
            let shape = args.shape.shape()?;
            let rule = args.rule.parse()?;
            if args.p_grid.is_empty() {
                return Err(CliError::Usage("--p-grid needs at least one probe".into()));
            }
            let seed = resolve_seed(args.seed)?;
            let max_rounds = args
                .max_rounds
                .unwrap_or_else(|| default_max_rounds(&shape));
            let mut spec = SweepSpec::new(shape, rule, args.event.into());
            spec.probes = ProbeSet::Grid(args.p_grid.clone());
            spec.trials = args.trials;
            spec.master_seed = seed;
            spec.max_rounds = max_rounds;
            let stats = run_sweep(&spec)?;
            let mut truncated = 0u64;
            for s in &stats {
                truncated += s.truncated as u64;
                let params = serde_json::json!({
                    "d": shape.dim(), "L": shape.side(), "rule": rule.to_string(),
                    "event": spec.event.to_string(), "trials": args.trials,
                    "seed": seed, "max_rounds": max_rounds, "p_grid": args.p_grid,
                });
                record("sweep", params, json(s), s.truncated as u64, emitter);
            }
            Ok(truncated)
        }
        Command::Threshold(args) => {
            let shape = args.shape.shape()?;
            let rule = args.rule.parse()?;
            let seed = resolve_seed(args.seed)?;
            let max_rounds = args
                .max_rounds
                .unwrap_or_else(|| default_max_rounds(&shape));
            let mut spec = SweepSpec::new(shape, rule, args.event.into());
            spec.probes = ProbeSet::Bracket {
                lo: args.p_lo,
                hi: args.p_hi,
            };
            spec.trials = args.trials;
            spec.master_seed = seed;
            spec.max_rounds = max_rounds;
            let est = estimate_threshold(&spec, args.tolerance)?;
            let truncated: u64 = est.trace.iter().map(|s| s.truncated as u64).sum();
            let params = serde_json::json!({
                "d": shape.dim(), "L": shape.side(), "rule": rule.to_string(),
                "event": spec.event.to_string(), "trials": args.trials, "seed": seed,
                "max_rounds": max_rounds, "p_lo": args.p_lo, "p_hi": args.p_hi,
                "tolerance": args.tolerance,
            });
            record("threshold", params, json(&est), truncated, emitter);
            Ok(truncated)
        }
        Command::ScalingFit(args) => {
            let (points, params) = if !args.points.is_empty() {
                let mut pts = Vec::new();
                for s in &args.points {
                    let (l, p) = s.split_once(':').ok_or_else(|| {
                        CliError::Usage(format!("bad point {s:?}: expected L:p50"))
                    })?;
                    let l: f64 = l
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad size in {s:?}")))?;
                    let p: f64 = p
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad p50 in {s:?}")))?;
                    pts.push((l, p));
                }
                (
                    pts,
                    serde_json::json!({ "points": args.points, "predicted": args.predicted }),
                )
            } else {
                if args.sizes.len() < 3 {
                    return Err(CliError::Usage(
                        "need --points or at least 3 --sizes".into(),
                    ));
                }
                let rule = parse_rule(&args.rule, args.r.or(Some(2)))?;
                let seed = resolve_seed(args.seed)?;
                let mut pts = Vec::new();
                for &side in &args.sizes {
                    let shape = TorusShape::new(args.d, side).map_err(CliError::Domain)?;
                    let mut spec = SweepSpec::new(shape, rule, args.event.into());
                    spec.probes = ProbeSet::Bracket {
                        lo: args.lo_coeff / side as f64,
                        hi: (args.hi_coeff / side as f64).min(0.45),
                    };
                    spec.trials = args.trials;
                    spec.master_seed = torus_bp::rng::mix2(seed, side as u64);
                    let est = estimate_threshold(&spec, DEFAULT_TOLERANCE)?;
                    pts.push((side as f64, est.p50));
                }
                (
                    pts,
                    serde_json::json!({
                        "d": args.d, "rule": rule.to_string(), "event": Event::from(args.event).to_string(),
                        "trials": args.trials, "seed": seed, "sizes": args.sizes,
                        "lo_coeff": args.lo_coeff, "hi_coeff": args.hi_coeff,
                        "predicted": args.predicted,
                    }),
                )
            };
            let fit = fit_exponent(&points, args.predicted)?;
            record("scaling-fit", params, json(&fit), 0, emitter);
            Ok(0)
        }
        Command::MinEternal(args) => {
            let rule = args.rule.parse()?;
            let radius = args
                .window_radius
                .unwrap_or_else(|| default_window_radius(rule_threshold(&rule)));
            let got = min_eternal_size(&rule, args.d, args.bound, radius)?;
            let params = serde_json::json!({
                "d": args.d, "L": args.side, "rule": rule.to_string(), "bound": args.bound,
                "window_radius": radius,
            });
            record(
                "min-eternal",
                params,
                serde_json::json!({ "min_size": got }),
                0,
                emitter,
            );
            Ok(0)
        }
        Command::Extinction(args) => {
            let radius = args
                .window_radius
                .unwrap_or_else(|| default_window_radius(args.r));
            let rep = max_extinction_time(args.d, args.r, args.k, radius, args.cap)?;
            let params = serde_json::json!({
                "d": args.d, "r": args.r, "k": args.k,
                "window_radius": radius, "cap": args.cap,
            });
            let capped = rep.capped as u64;
            record("extinction", params, json(&rep), capped, emitter);
            Ok(capped)
        }
        Command::Cluster(args) => {
            let shape = args.shape.shape()?;
            let c = load_config(&args.config, shape)?;
            let rep = cluster_black_nodes(&c, args.r)?;
            let params = serde_json::json!({
                "d": shape.dim(), "L": shape.side(), "r": args.r, "config": args.config,
            });
            record("cluster", params, json(&rep), 0, emitter);
            Ok(0)
        }
        Command::Witnesses(args) => {
            let shape = args.shape.shape()?;
            let c = load_config(&args.config, shape)?;
            let set = NodeSet::from_coords(shape, &c.black_coords())?;
            let fam = find_w_robust_witnesses(&set, args.r)?;
            let witnesses: Vec<Vec<Vec<usize>>> = fam
                .witnesses
                .iter()
                .map(|w| w.coords().iter().map(|c| c.components().to_vec()).collect())
                .collect();
            let params = serde_json::json!({
                "d": shape.dim(), "L": shape.side(), "r": args.r, "config": args.config,
            });
            record(
                "witnesses",
                params,
                serde_json::json!({
                    "count": witnesses.len(),
                    "validated": true,
                    "branches": fam.branches,
                    "witnesses": witnesses,
                }),
                0,
                emitter,
            );
            Ok(0)
        }
        Command::Lemma5(args) => {
            let picks = parse_picks(&args.dims, args.d)?;
            let params = serde_json::json!({
                "d": args.d, "r": args.r, "L": args.side,
                "dims": args.dims, "budget": args.budget,
            });
            match occupation_experiment(args.d, args.r, args.side, &picks, args.budget) {
                Ok(out) => {
                    record(
                        "lemma5",
                        params,
                        serde_json::json!({
                            "occupied": true,
                            "rounds": out.rounds,
                            "odd_round": out.odd_round,
                        }),
                        0,
                        emitter,
                    );
                    Ok(0)
                }
                Err(Error::OccupationBudget { budget }) => {
                    record(
                        "lemma5",
                        params,
                        serde_json::json!({
                            "occupied": false,
                            "rounds": serde_json::Value::Null,
                            "budget": budget,
                        }),
                        1,
                        emitter,
                    );
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn rule_threshold(rule: &UpdateRule) -> u32 {
    match *rule {
        UpdateRule::GeneralBp { activation, .. } => activation,
        UpdateRule::ModifiedBp { activation_dims } => activation_dims,
        UpdateRule::Majority => 2,
    }
}
