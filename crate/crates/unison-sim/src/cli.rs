//! Command-line front end: JSON run configurations, a JSON-lines trace
//! format, and the `simulate` / `verify` / `compute` / `stats` subcommands.
//!
//! Exit codes: `0` success, `2` a checked property failed (verification or
//! oracle mismatch), `3` the protocol deadlocked, `4` configuration, usage,
//! or resource-limit error.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{
    expected_values, run_computation, AggregationError, InfimumOp, RFunction, RSystem, TaskHandler,
    TaskKind, TaskSpec,
};
use crate::causality::{
    cut_at, lift, segment_events, verify_strong_wave, verify_wave, verify_wavelet, CausalDag,
    CausalityError, EventId, DEFAULT_MAX_WORK,
};
use crate::protocol::{
    Configuration, CsHandler, ProtocolError, ProtocolParams, Registers, Value,
};
use crate::scheduler::{replay, run, Daemon, DaemonKind, Execution, SchedulerError};
use crate::topology::{families, Graph, TopologyError, DEFAULT_EXHAUSTIVE_NODE_LIMIT};

pub const DEFAULT_MAX_STEPS: usize = 100_000;
pub const EXHAUSTIVE_LIMIT_ENV: &str = "UNISON_EXHAUSTIVE_LIMIT";
pub const TRACE_VERSION: u32 = 1;

/// Node cap for the exponential oracles; overridable through
/// `UNISON_EXHAUSTIVE_LIMIT`.
pub fn exhaustive_limit() -> usize {
    std::env::var(EXHAUSTIVE_LIMIT_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_EXHAUSTIVE_NODE_LIMIT)
}

// ---------------------------------------------------------------- config

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub graph: GraphConfig,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default = "default_daemon")]
    pub daemon: DaemonKind,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default)]
    pub task: Option<TaskConfig>,
}

fn default_daemon() -> DaemonKind {
    DaemonKind::Synchronous
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphConfig {
    Ring { n: usize },
    Path { n: usize },
    Star { leaves: usize },
    Complete { n: usize },
    Grid { rows: usize, cols: usize },
    Random { n: usize, seed: u64 },
    Edges { n: usize, edges: Vec<(usize, usize)> },
    /// Edge-list file: first line the process count, then one `u v` pair per
    /// line.
    File { path: String },
}

impl GraphConfig {
    pub fn build(&self) -> Result<Graph, CliError> {
        Ok(match self {
            GraphConfig::Ring { n } => families::ring(*n),
            GraphConfig::Path { n } => families::path(*n),
            GraphConfig::Star { leaves } => families::star(*leaves),
            GraphConfig::Complete { n } => families::complete(*n),
            GraphConfig::Grid { rows, cols } => families::grid(*rows, *cols),
            GraphConfig::Random { n, seed } => families::random_connected(*n, *seed),
            GraphConfig::Edges { n, edges } => Graph::from_edges(*n, edges)?,
            GraphConfig::File { path } => Graph::parse_edge_list(&fs::read_to_string(path)?)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub k_phase: Option<i64>,
    pub alpha: Option<i64>,
    pub delta: i64,
    pub rho: i64,
    /// Skip the `delta * k_phase > cyclomatic bound` safety check. Runs with
    /// unsafe parameters may deadlock (exit code 3).
    #[serde(default)]
    pub allow_unsafe: bool,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig { k_phase: None, alpha: None, delta: 1, rho: 1, allow_unsafe: false }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitConfig {
    /// Every clock at the same in-unison value.
    Uniform { clock: i64 },
    Clocks { clocks: Vec<i64> },
    /// Clocks drawn uniformly from the whole domain using the run seed.
    Random,
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig::Uniform { clock: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskConfig {
    GlobalInfimum {
        op: InfimumOp,
        inputs: Vec<Value>,
    },
    BallInfimum {
        op: InfimumOp,
        rho: usize,
        inputs: Vec<Value>,
    },
    /// Per-edge transfer functions; directed edges not listed use the
    /// identity.
    ROperator {
        op: InfimumOp,
        #[serde(default)]
        edges: Vec<EdgeFunction>,
        inputs: Vec<Value>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeFunction {
    pub from: usize,
    pub to: usize,
    #[serde(flatten)]
    pub function: RFunction,
}

impl TaskConfig {
    pub fn to_task(&self) -> TaskSpec {
        match self {
            TaskConfig::GlobalInfimum { op, inputs } => TaskSpec {
                kind: TaskKind::GlobalInfimum { op: op.clone() },
                inputs: inputs.clone(),
            },
            TaskConfig::BallInfimum { op, rho, inputs } => TaskSpec {
                kind: TaskKind::BallInfimum { op: op.clone(), rho: *rho },
                inputs: inputs.clone(),
            },
            TaskConfig::ROperator { op, edges, inputs } => {
                let mut system = RSystem::new(op.clone());
                for e in edges {
                    system.set_edge(e.from, e.to, e.function.clone());
                }
                TaskSpec { kind: TaskKind::ROperator { system }, inputs: inputs.clone() }
            }
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn build_params(&self, g: &Graph) -> Result<ProtocolParams, CliError> {
        if self.params.allow_unsafe {
            let k_phase = self.params.k_phase.ok_or_else(|| {
                CliError::Config("allow_unsafe requires an explicit k_phase".into())
            })?;
            let alpha = self.params.alpha.unwrap_or(g.n() as i64);
            return Ok(ProtocolParams::unchecked(
                k_phase,
                alpha,
                self.params.delta,
                self.params.rho,
            )?);
        }
        Ok(ProtocolParams::new(
            g,
            self.params.k_phase,
            self.params.alpha,
            self.params.delta,
            self.params.rho,
        )?)
    }

    pub fn initial_clocks(
        &self,
        g: &Graph,
        params: &ProtocolParams,
        seed: u64,
    ) -> Result<Vec<i64>, CliError> {
        use rand::{Rng, SeedableRng};
        match &self.init {
            InitConfig::Uniform { clock } => Ok(vec![*clock; g.n()]),
            InitConfig::Clocks { clocks } => {
                if clocks.len() != g.n() {
                    return Err(CliError::Config(format!(
                        "expected {} clocks, got {}",
                        g.n(),
                        clocks.len()
                    )));
                }
                Ok(clocks.clone())
            }
            InitConfig::Random => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let sys = params.sys();
                Ok((0..g.n())
                    .map(|_| rng.gen_range(-sys.alpha()..sys.period()))
                    .collect())
            }
        }
    }

    pub fn initial_configuration(
        &self,
        g: &Graph,
        params: &ProtocolParams,
        seed: u64,
    ) -> Result<Configuration, CliError> {
        let clocks = self.initial_clocks(g, params, seed)?;
        Ok(match &self.task {
            Some(t) => t.to_task().initial_configuration(&clocks),
            None => Configuration::from_clocks(&clocks),
        })
    }
}

// ---------------------------------------------------------------- errors

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Causality(#[from] CausalityError),
    #[error(transparent)]
    Aggregation(#[from] AggregationError),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("computed values disagree with the oracle: {0}")]
    OracleMismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) | CliError::OracleMismatch(_) => 2,
            CliError::Scheduler(SchedulerError::Deadlock { .. })
            | CliError::Aggregation(AggregationError::Scheduler(SchedulerError::Deadlock {
                ..
            })) => 3,
            _ => 4,
        }
    }
}

// ---------------------------------------------------------------- args

#[derive(Debug, Parser)]
#[command(name = "unison-sim", version, about = "Self-stabilizing unison simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the protocol and write a JSON-lines trace.
    Simulate(SimulateArgs),
    /// Check a segment of a stabilized execution for wave structure.
    Verify(VerifyArgs),
    /// Run a distributed computation and compare it with the oracle.
    Compute(ComputeArgs),
    /// Sweep graph families and daemons; write convergence stats as CSV.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Trace destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Verify a recorded trace instead of running fresh.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Segment bounds `k1:k2` as offsets from the lifting base.
    #[arg(long)]
    pub segment: String,
    #[arg(long, value_enum)]
    pub kind: WaveKindArg,
    /// Ball radius for wavelet checks; defaults to the segment length.
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WaveKindArg {
    Wavelet,
    Wave,
    StrongWave,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 3)]
    pub phases: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
}

/// Parses arguments, dispatches, and maps the outcome to an exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Compute(a) => cmd_compute(&a),
        Command::Stats(a) => cmd_stats(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn out_writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout()),
    })
}

/// Either critical-section handler, so commands don't need to be generic.
enum AnyHandler {
    Noop,
    Task(TaskSpec),
}

impl CsHandler for AnyHandler {
    fn cs1(&self, g: &Graph, params: &ProtocolParams, conf: &Configuration, p: usize) -> Registers {
        match self {
            AnyHandler::Noop => Registers::of(&conf.states[p]),
            AnyHandler::Task(t) => TaskHandler::new(t).cs1(g, params, conf, p),
        }
    }

    fn cs2(&self, g: &Graph, params: &ProtocolParams, conf: &Configuration, p: usize) -> Registers {
        match self {
            AnyHandler::Noop => Registers::of(&conf.states[p]),
            AnyHandler::Task(t) => TaskHandler::new(t).cs2(g, params, conf, p),
        }
    }
}

fn handler_for(cfg: &RunConfig) -> AnyHandler {
    match &cfg.task {
        Some(t) => AnyHandler::Task(t.to_task()),
        None => AnyHandler::Noop,
    }
}

// ---------------------------------------------------------------- simulate

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let g = cfg.graph.build()?;
    let params = cfg.build_params(&g)?;
    let conf0 = cfg.initial_configuration(&g, &params, args.seed)?;
    let mut daemon = Daemon::new(cfg.daemon.clone(), args.seed);
    let handler = handler_for(&cfg);

    let (execution, deadlock) =
        match run(&g, &params, conf0, &mut daemon, &handler, args.max_steps, |_| false) {
            Ok(e) => (e, false),
            Err(SchedulerError::Deadlock { execution, .. }) => (*execution, true),
            Err(e) => return Err(e.into()),
        };

    let mut w = out_writer(&args.out)?;
    write_trace(&mut w, &g, &params, &cfg.daemon, args.seed, &execution, deadlock)?;
    if deadlock {
        let steps = execution.len();
        return Err(SchedulerError::Deadlock { steps, execution: Box::new(execution) }.into());
    }
    Ok(())
}

fn write_trace<W: Write>(
    w: &mut W,
    g: &Graph,
    params: &ProtocolParams,
    daemon: &DaemonKind,
    seed: u64,
    execution: &Execution,
    deadlock: bool,
) -> Result<(), CliError> {
    let header = serde_json::json!({
        "record": "header",
        "version": TRACE_VERSION,
        "n": g.n(),
        "edges": g.edges(),
        "k_phase": params.k_phase(),
        "alpha": params.sys().alpha(),
        "delta": params.delta(),
        "rho": params.rho(),
        "daemon": daemon,
        "seed": seed,
        "initial_clocks": execution.initial.clocks(),
    });
    writeln!(w, "{header}")?;
    for (i, s) in execution.steps.iter().enumerate() {
        let line = serde_json::json!({
            "record": "step",
            "step": i,
            "chosen": s.chosen,
            "events": s.events,
            "clocks_after": s.after.clocks(),
        });
        writeln!(w, "{line}")?;
    }
    let first = |pred: &dyn Fn(&Configuration) -> bool| {
        (0..=execution.len()).find(|&t| pred(execution.config_at(t)))
    };
    let summary = serde_json::json!({
        "record": "summary",
        "steps": execution.len(),
        "rounds": execution.round_ends.len(),
        "first_wu": first(&|c| c.is_wu(g, params)),
        "first_wu0": first(&|c| c.is_wu0(g, params)),
        "deadlock": deadlock,
    });
    writeln!(w, "{summary}")?;
    Ok(())
}

/// Trace contents needed to rebuild an execution.
pub struct LoadedTrace {
    pub graph: Graph,
    pub params: ProtocolParams,
    pub initial_clocks: Vec<i64>,
    pub schedule: Vec<Vec<usize>>,
}

pub fn load_trace(path: &Path) -> Result<LoadedTrace, CliError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: serde_json::Value =
        serde_json::from_str(lines.next().ok_or_else(|| CliError::Config("empty trace".into()))?)?;
    if header["record"] != "header" || header["version"] != TRACE_VERSION {
        return Err(CliError::Config("not a version-1 trace".into()));
    }
    let n = header["n"].as_u64().unwrap_or(0) as usize;
    let edges: Vec<(usize, usize)> = serde_json::from_value(header["edges"].clone())?;
    let graph = Graph::from_edges(n, &edges)?;
    let params = ProtocolParams::unchecked(
        header["k_phase"].as_i64().unwrap_or(0),
        header["alpha"].as_i64().unwrap_or(0),
        header["delta"].as_i64().unwrap_or(0),
        header["rho"].as_i64().unwrap_or(0),
    )?;
    params.validate_against(&graph)?;
    let initial_clocks: Vec<i64> = serde_json::from_value(header["initial_clocks"].clone())?;
    let mut schedule = Vec::new();
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line)?;
        if v["record"] == "step" {
            schedule.push(serde_json::from_value(v["chosen"].clone())?);
        }
    }
    Ok(LoadedTrace { graph, params, initial_clocks, schedule })
}

// ---------------------------------------------------------------- verify

fn parse_segment(s: &str) -> Result<(i64, i64), CliError> {
    let err = || CliError::Config(format!("bad segment '{s}', expected k1:k2 with 0 <= k1 < k2"));
    let (a, b) = s.split_once(':').ok_or_else(err)?;
    let (k1, k2) = (a.parse().map_err(|_| err())?, b.parse().map_err(|_| err())?);
    if k1 < 0 || k1 >= k2 {
        return Err(err());
    }
    Ok((k1, k2))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let g = cfg.graph.build()?;
    let params = cfg.build_params(&g)?;
    let (k1, k2) = parse_segment(&args.segment)?;
    let handler = handler_for(&cfg);

    // Obtain a stabilized execution: either the tail of a recorded trace or
    // a fresh run that is first driven into WU0.
    let execution = match &args.trace {
        Some(path) => {
            let t = load_trace(path)?;
            if t.graph.edges() != g.edges() {
                return Err(CliError::Config("trace was recorded on a different graph".into()));
            }
            let full = replay(&g, &params, Configuration::from_clocks(&t.initial_clocks), &t.schedule, &handler)?;
            let t0 = (0..=full.len())
                .find(|&t| full.config_at(t).is_wu0(&g, &params))
                .ok_or_else(|| CliError::Config("trace never reaches WU0".into()))?;
            replay(&g, &params, full.config_at(t0).clone(), &full.schedule()[t0..], &handler)?
        }
        None => {
            let conf0 = cfg.initial_configuration(&g, &params, args.seed)?;
            let mut daemon = Daemon::new(cfg.daemon.clone(), args.seed);
            let stabilized = if conf0.is_wu0(&g, &params) {
                conf0
            } else {
                let e = run(&g, &params, conf0, &mut daemon, &handler, args.max_steps, |e| {
                    e.final_config().is_wu0(&g, &params)
                })?;
                if !e.final_config().is_wu0(&g, &params) {
                    return Err(AggregationError::StabilizationTimeout(e.len()).into());
                }
                e.final_config().clone()
            };
            let need = k2 as usize + g.diameter() + 1;
            run(&g, &params, stabilized, &mut daemon, &handler, args.max_steps, |e| {
                let mut counts = vec![0usize; g.n()];
                for s in &e.steps {
                    for ev in &s.events {
                        counts[ev.process] += 1;
                    }
                }
                counts.iter().all(|&c| c >= need)
            })?
        }
    };

    let dag = CausalDag::build(&g, &execution);
    let lifted = lift(&g, &params, &execution, &dag)?;
    let (k1, k2) = (lifted.base + k1, lifted.base + k2);
    let c1 = cut_at(&dag, &lifted, k1)?;
    let c2 = cut_at(&dag, &lifted, k2)?;
    let segment: HashSet<EventId> = segment_events(&dag, &c1, &c2)?.into_iter().collect();
    let decide: HashSet<EventId> = c2.events.iter().copied().collect();

    let (label, ok) = match args.kind {
        WaveKindArg::Wavelet => {
            let radius = args.radius.unwrap_or((k2 - k1) as usize);
            (format!("wavelet(radius {radius})"), verify_wavelet(&g, &dag, &segment, &decide, radius))
        }
        WaveKindArg::Wave => ("wave".to_string(), verify_wave(&g, &dag, &segment, &decide)),
        WaveKindArg::StrongWave => (
            "strong wave".to_string(),
            verify_strong_wave(&g, &dag, &segment, &decide, DEFAULT_MAX_WORK)?,
        ),
    };
    let span = (k1 - lifted.base, k2 - lifted.base);
    if ok {
        println!("{label} over segment {}:{}: VERIFIED", span.0, span.1);
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "{label} over segment {}:{}",
            span.0, span.1
        )))
    }
}

// ---------------------------------------------------------------- compute

pub fn cmd_compute(args: &ComputeArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let task = cfg
        .task
        .as_ref()
        .ok_or_else(|| CliError::Config("compute needs a task in the config".into()))?
        .to_task();
    let g = cfg.graph.build()?;
    let params = cfg.build_params(&g)?;
    let clocks = cfg.initial_clocks(&g, &params, args.seed)?;
    let mut daemon = Daemon::new(cfg.daemon.clone(), args.seed);
    let limit = exhaustive_limit();

    let run = run_computation(
        &g,
        &params,
        &task,
        &clocks,
        &mut daemon,
        args.phases,
        args.max_steps,
        limit,
    )?;
    let want = expected_values(&g, &task, limit)?;

    let mut w = out_writer(&args.out)?;
    writeln!(w, "phase\tvalues\texpected\tna_events\tneighbor_reads")?;
    let mut bad = Vec::new();
    for p in &run.phases {
        writeln!(
            w,
            "{}\t{:?}\t{:?}\t{}\t{}",
            p.phase, p.values, want, p.na_events, p.neighbor_reads
        )?;
        if p.values != want {
            bad.push(p.phase);
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::OracleMismatch(format!("phases {bad:?}")))
    }
}

// ---------------------------------------------------------------- stats

pub fn cmd_stats(args: &StatsArgs) -> Result<(), CliError> {
    let corpus: Vec<(&str, Graph)> = vec![
        ("ring5", families::ring(5)),
        ("ring8", families::ring(8)),
        ("path6", families::path(6)),
        ("star5", families::star(5)),
        ("grid3x3", families::grid(3, 3)),
        ("complete5", families::complete(5)),
        ("random8", families::random_connected(8, args.seed)),
    ];
    let daemons = [
        ("synchronous", DaemonKind::Synchronous),
        ("random-subset", DaemonKind::RandomSubset { bias: 0.5 }),
        ("single-random", DaemonKind::SingleRandom),
    ];
    let mut w = out_writer(&args.out)?;
    writeln!(
        w,
        "family,n,k_phase,alpha,delta,daemon,seed,rounds_to_wu,rounds_to_wu0,na_per_phase,reads_per_phase"
    )?;
    for (name, g) in &corpus {
        let delta = g.diameter() as i64 + 1;
        let params = ProtocolParams::new(g, None, None, delta, 1)?;
        for (dname, dkind) in &daemons {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
            let sys = params.sys();
            let clocks: Vec<i64> =
                (0..g.n()).map(|_| rng.gen_range(-sys.alpha()..sys.period())).collect();

            let mut daemon = Daemon::new(dkind.clone(), args.seed);
            let exec = run(
                g,
                &params,
                Configuration::from_clocks(&clocks),
                &mut daemon,
                &crate::protocol::NoopCs,
                args.max_steps,
                |e| e.final_config().is_wu0(g, &params),
            )?;
            let first = |pred: &dyn Fn(&Configuration) -> bool| {
                (0..=exec.len()).find(|&t| pred(exec.config_at(t)))
            };
            let rounds_until = |step: Option<usize>| match step {
                Some(s) => exec.round_ends.iter().filter(|&&r| r <= s).count().to_string(),
                None => String::from(""),
            };
            let rounds_wu = rounds_until(first(&|c| c.is_wu(g, &params)));
            let rounds_wu0 = rounds_until(first(&|c| c.is_wu0(g, &params)));

            // Phase costs, measured on a minimum computation from the
            // stabilized configuration.
            let task = TaskSpec {
                kind: TaskKind::GlobalInfimum { op: InfimumOp::Min },
                inputs: vec![0; g.n()],
            };
            let mut d2 = Daemon::new(dkind.clone(), args.seed + 1);
            let comp = run_computation(
                g,
                &params,
                &task,
                &exec.final_config().clocks(),
                &mut d2,
                1,
                args.max_steps,
                usize::MAX,
            )?;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{}",
                name,
                g.n(),
                params.k_phase(),
                params.sys().alpha(),
                delta,
                dname,
                args.seed,
                rounds_wu,
                rounds_wu0,
                comp.phases[0].na_events,
                comp.phases[0].neighbor_reads,
            )?;
        }
    }
    Ok(())
}
