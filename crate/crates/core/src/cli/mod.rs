//! The `pbp` command-line front end.
//!
//! Exit statuses: 0 success, 1 invalid input, 2 verification or comparison
//! failure, 3 enumeration budget exceeded. Failures also print a JSON
//! diagnostic on stderr.

pub mod compare;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::filters::{pi_tree, private_belief_tree, theta_tree, QUANTUM, ZERO_MASS};
use crate::info::{InfoStructure, StrategyTuple};
use crate::model::{random_problem, validate_problem, Dims, ProblemSpec, ValidatedProblem, ValidationError};
use crate::solver::{
    best_response_dp, pbp_solve, verify_pbp, PbpOptions, SolverError, ValueTable, DEFAULT_BUDGET, DEFAULT_EPSILON,
    DEFAULT_MAX_ITERS,
};
use crate::TOLERANCE;

pub const TIE_BREAK: &str = "lowest action index";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Solve,
    BestResponse,
    Verify,
    Filters,
    OracleCompare,
    RandomGen,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Solve => "solve",
            Command::BestResponse => "best-response",
            Command::Verify => "verify",
            Command::Filters => "filters",
            Command::OracleCompare => "oracle-compare",
            Command::RandomGen => "random-gen",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "pbp", version, about = "Person-by-person optimal control with delayed sharing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Check a problem file and print its sizes
    Validate,
    /// Iterate best responses to a person-by-person optimal tuple
    Solve,
    /// Best response of one controller against a strategy file
    BestResponse,
    /// Check a strategy file for profitable unilateral deviations
    Verify,
    /// Dump the information states along every reachable history
    Filters,
    /// Compare filters and solvers against the enumeration oracles
    OracleCompare,
    /// Write a random problem instance
    RandomGen,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Problem file (JSON)
    #[arg(long, global = true)]
    pub problem: Option<PathBuf>,
    /// Strategy tuple file (JSON)
    #[arg(long, global = true)]
    pub strategies: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Minimum improvement for accepting a best response
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    /// Largest strategy count enumerated by brute force
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Controller index (0-based) for best-response
    #[arg(long, global = true)]
    pub controller: Option<usize>,
    /// Start solve from random strategies drawn with --seed
    #[arg(long, global = true)]
    pub random_init: bool,
    #[arg(long, global = true, default_value_t = 3)]
    pub horizon: usize,
    #[arg(long, global = true, default_value_t = 2)]
    pub controllers: usize,
    #[arg(long, global = true, default_value_t = 1)]
    pub delay: usize,
    #[arg(long, global = true, default_value_t = 2)]
    pub states: usize,
    #[arg(long, global = true, default_value_t = 2)]
    pub observations: usize,
    #[arg(long, global = true, default_value_t = 2)]
    pub actions: usize,
}

/// Everything one invocation needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub problem_path: Option<PathBuf>,
    pub strategies_path: Option<PathBuf>,
    pub seed: u64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub budget: u128,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub controller: Option<usize>,
    pub random_init: bool,
    pub dims: Dims,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let command = match cli.command {
            CliCommand::Validate => Command::Validate,
            CliCommand::Solve => Command::Solve,
            CliCommand::BestResponse => Command::BestResponse,
            CliCommand::Verify => Command::Verify,
            CliCommand::Filters => Command::Filters,
            CliCommand::OracleCompare => Command::OracleCompare,
            CliCommand::RandomGen => Command::RandomGen,
        };
        let o = cli.options;
        RunConfig {
            command,
            problem_path: o.problem,
            strategies_path: o.strategies,
            seed: o.seed,
            epsilon: o.epsilon,
            max_iters: o.max_iters,
            budget: o.budget,
            output_path: o.out,
            format: o.format,
            controller: o.controller,
            random_init: o.random_init,
            dims: Dims::uniform(o.horizon, o.controllers, o.delay, o.states, o.observations, o.actions),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Input { kind: &'static str, message: String },
    Failed { kind: &'static str, message: String, detail: serde_json::Value },
    Budget(SolverError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 1,
            CliError::Failed { .. } => 2,
            CliError::Budget(_) => 3,
        }
    }

    pub fn diagnostic(&self) -> serde_json::Value {
        let (kind, message, detail) = match self {
            CliError::Input { kind, message } => (*kind, message.clone(), serde_json::Value::Null),
            CliError::Failed { kind, message, detail } => (*kind, message.clone(), detail.clone()),
            CliError::Budget(e) => ("budget-exceeded", e.to_string(), serde_json::Value::Null),
        };
        json!({
            "status": "error",
            "exit_code": self.exit_code(),
            "kind": kind,
            "message": message,
            "detail": detail,
        })
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        CliError::Input {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::BudgetExceeded { .. } => CliError::Budget(e),
            SolverError::Info(e) => CliError::Input {
                kind: "strategy",
                message: e.to_string(),
            },
            other => CliError::Failed {
                kind: "separation",
                message: other.to_string(),
                detail: serde_json::Value::Null,
            },
        }
    }
}

fn input_error(kind: &'static str, message: impl Into<String>) -> CliError {
    CliError::Input {
        kind,
        message: message.into(),
    }
}

#[derive(Debug, Serialize)]
struct Settings {
    quantum: f64,
    tolerance: f64,
    zero_mass: f64,
    tie_break: &'static str,
    epsilon: f64,
    max_iters: usize,
    budget: u128,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct Report<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    instance_hash: Option<&'a str>,
    settings: Settings,
    result: T,
}

/// Parses arguments, runs, reports; returns the exit status.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&RunConfig::from(cli)),
        Err(e) if !e.use_stderr() => {
            let _ = write_stdout(&e.to_string());
            0
        }
        Err(e) => {
            let err = input_error("arguments", e.to_string());
            eprintln!("{}", err.diagnostic());
            err.exit_code()
        }
    }
}

pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            e.exit_code()
        }
    }
}

fn execute(config: &RunConfig) -> Result<(), CliError> {
    // NaN fails too
    if config.epsilon.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(input_error("config", "--epsilon must be positive"));
    }
    if config.budget < 1 {
        return Err(input_error("config", "--budget must be at least 1"));
    }
    match config.command {
        Command::RandomGen => {
            let spec = random_problem(config.seed, &config.dims)?;
            let text = serde_json::to_string_pretty(&spec).expect("problem serializes");
            emit(config, text + "\n")
        }
        Command::OracleCompare => compare::run(config),
        _ => {
            let problem = load_problem(config)?;
            let info = InfoStructure::new(&problem);
            match config.command {
                Command::Validate => validate(config, &problem, &info),
                Command::Solve => solve(config, &problem, &info),
                Command::BestResponse => best_response(config, &problem, &info),
                Command::Verify => verify(config, &problem, &info),
                Command::Filters => filters(config, &problem, &info),
                Command::RandomGen | Command::OracleCompare => unreachable!(),
            }
        }
    }
}

pub(crate) fn load_problem(config: &RunConfig) -> Result<ValidatedProblem, CliError> {
    let path = config
        .problem_path
        .as_deref()
        .ok_or_else(|| input_error("config", "--problem is required"))?;
    Ok(validate_problem(ProblemSpec::from_json_file(path)?)?)
}

fn load_strategies(path: &Path, info: &InfoStructure) -> Result<StrategyTuple, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error("io", format!("{}: {e}", path.display())))?;
    let tuple: StrategyTuple = serde_json::from_str(&text).map_err(|e| input_error("parse", e.to_string()))?;
    tuple.check(info).map_err(|e| input_error("strategy", e.to_string()))?;
    Ok(tuple)
}

fn strategies_or_zeros(config: &RunConfig, info: &InfoStructure) -> Result<StrategyTuple, CliError> {
    match &config.strategies_path {
        Some(path) => load_strategies(path, info),
        None => Ok(StrategyTuple::zeros(info)),
    }
}

fn settings(config: &RunConfig) -> Settings {
    Settings {
        quantum: QUANTUM,
        tolerance: TOLERANCE,
        zero_mass: ZERO_MASS,
        tie_break: TIE_BREAK,
        epsilon: config.epsilon,
        max_iters: config.max_iters,
        budget: config.budget,
        seed: config.seed,
    }
}

pub(crate) fn report_json<T: Serialize>(config: &RunConfig, hash: Option<&str>, result: T) -> String {
    let report = Report {
        tool: "pbp",
        version: env!("CARGO_PKG_VERSION"),
        command: config.command.name(),
        instance_hash: hash,
        settings: settings(config),
        result,
    };
    serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
}

pub(crate) fn emit(config: &RunConfig, text: String) -> Result<(), CliError> {
    match &config.output_path {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| input_error("io", format!("{}: {e}", path.display())))
        }
        None => write_stdout(&text),
    }
}

/// A closed pipe (`pbp ... | head`) is not an error.
fn write_stdout(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(input_error("io", format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

pub(crate) fn csv_text(write: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> String {
    let mut buf = Vec::new();
    write(&mut buf).expect("writing csv to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn validate(config: &RunConfig, problem: &ValidatedProblem, info: &InfoStructure) -> Result<(), CliError> {
    let hash = problem.instance_hash();
    let sizes: Vec<_> = (1..=info.horizon)
        .flat_map(|t| {
            (0..info.num_controllers).map(move |k| {
                json!({
                    "t": t,
                    "controller": k,
                    "common": info.num_common(t),
                    "private": info.num_private(t, k),
                    "infosets": info.num_infosets(t, k),
                })
            })
        })
        .collect();
    match config.format {
        Format::Json => {
            let result = json!({
                "valid": true,
                "horizon": problem.horizon,
                "num_controllers": problem.num_controllers,
                "delay": problem.delay,
                "state_size": problem.state_size,
                "obs_sizes": problem.obs_sizes,
                "action_sizes": problem.action_sizes,
                "information_sets": sizes,
            });
            emit(config, report_json(config, Some(&hash), result))
        }
        Format::Csv => emit(
            config,
            csv_text(|buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["t", "controller", "common", "private", "infosets"])?;
                for s in &sizes {
                    w.write_record(
                        ["t", "controller", "common", "private", "infosets"].map(|f| s[f].to_string()),
                    )?;
                }
                w.flush()?;
                Ok(())
            }),
        ),
    }
}

fn tables_csv(tables: &[ValueTable]) -> String {
    let mut text = String::from("controller,t,code,reachable,value,action\n");
    for table in tables {
        let body = csv_text(|buf| table.write_csv(buf));
        for line in body.lines().skip(1) {
            text.push_str(&format!("{},{line}\n", table.k));
        }
    }
    text
}

fn solve(config: &RunConfig, problem: &ValidatedProblem, info: &InfoStructure) -> Result<(), CliError> {
    let initial = if config.random_init {
        StrategyTuple::seeded(info, config.seed)
    } else {
        strategies_or_zeros(config, info)?
    };
    let options = PbpOptions {
        epsilon: config.epsilon,
        max_iters: config.max_iters,
    };
    let result = pbp_solve(problem, info, &initial, options)?;
    let tables: Vec<ValueTable> = (0..info.num_controllers)
        .map(|k| best_response_dp(problem, info, &result.strategies, k).table)
        .collect();
    let verification = match verify_pbp(problem, info, &result.strategies, config.budget) {
        Ok(v) => serde_json::to_value(&v).expect("verification serializes"),
        Err(SolverError::BudgetExceeded { k, count, budget }) => json!({
            "skipped": "budget",
            "controller": k,
            "count": count,
            "budget": budget,
        }),
        Err(e) => return Err(e.into()),
    };
    let failed = verification.get("holds") == Some(&serde_json::Value::Bool(false));
    let text = match config.format {
        Format::Json => report_json(
            config,
            Some(&problem.instance_hash()),
            json!({
                "pbp": result,
                "value_tables": tables,
                "verification": verification,
            }),
        ),
        Format::Csv => tables_csv(&tables),
    };
    emit(config, text)?;
    if failed {
        return Err(CliError::Failed {
            kind: "verification",
            message: "the returned tuple admits a profitable deviation".into(),
            detail: verification,
        });
    }
    Ok(())
}

fn best_response(config: &RunConfig, problem: &ValidatedProblem, info: &InfoStructure) -> Result<(), CliError> {
    let k = config
        .controller
        .ok_or_else(|| input_error("config", "--controller is required"))?;
    if k >= info.num_controllers {
        return Err(input_error("config", format!("controller {k} out of range")));
    }
    let tuple = strategies_or_zeros(config, info)?;
    let br = best_response_dp(problem, info, &tuple, k);
    let text = match config.format {
        Format::Json => report_json(
            config,
            Some(&problem.instance_hash()),
            json!({
                "controller": k,
                "payoff": br.payoff,
                "strategy": br.strategy,
                "value_table": br.table,
            }),
        ),
        Format::Csv => tables_csv(std::slice::from_ref(&br.table)),
    };
    emit(config, text)
}

fn verify(config: &RunConfig, problem: &ValidatedProblem, info: &InfoStructure) -> Result<(), CliError> {
    let path = config
        .strategies_path
        .as_deref()
        .ok_or_else(|| input_error("config", "--strategies is required"))?;
    let tuple = load_strategies(path, info)?;
    let v = verify_pbp(problem, info, &tuple, config.budget)?;
    let text = match config.format {
        Format::Json => report_json(config, Some(&problem.instance_hash()), &v),
        Format::Csv => {
            let mut text = String::from("controller,gap,holds\n");
            for (k, gap) in v.gaps.iter().enumerate() {
                text.push_str(&format!("{k},{gap:e},{}\n", *gap <= TOLERANCE));
            }
            text
        }
    };
    emit(config, text)?;
    if !v.holds {
        return Err(CliError::Failed {
            kind: "verification",
            message: format!("profitable deviation found, worst gap {:e}", v.worst_gap),
            detail: serde_json::to_value(&v.witness).expect("witness serializes"),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct BeliefRow {
    kind: &'static str,
    t: usize,
    controller: Option<usize>,
    code: usize,
    probs: Vec<f64>,
}

fn filters(config: &RunConfig, problem: &ValidatedProblem, info: &InfoStructure) -> Result<(), CliError> {
    let tuple = strategies_or_zeros(config, info)?;
    let mut rows = Vec::new();
    for k in 0..info.num_controllers {
        let tree = private_belief_tree(problem, info, &tuple, k);
        for t in 1..=info.horizon {
            for code in tree.reachable(t) {
                rows.push(BeliefRow {
                    kind: "xi",
                    t,
                    controller: Some(k),
                    code,
                    probs: tree.belief(t, code).expect("reachable").probs.clone(),
                });
            }
        }
    }
    let pis = pi_tree(problem, info);
    for t in info.delay + 1..=info.horizon {
        for (code, pi) in pis.pis[t - 1].iter().enumerate() {
            if let Some(pi) = pi {
                rows.push(BeliefRow {
                    kind: "pi",
                    t,
                    controller: None,
                    code,
                    probs: pi.probs.clone(),
                });
            }
        }
    }
    for (t0, thetas) in theta_tree(problem, info, &tuple).into_iter().enumerate() {
        for (code, theta) in thetas.into_iter().enumerate() {
            if let Some(theta) = theta {
                rows.push(BeliefRow {
                    kind: "theta",
                    t: t0 + 1,
                    controller: None,
                    code,
                    probs: theta.probs,
                });
            }
        }
    }
    let text = match config.format {
        Format::Json => report_json(config, Some(&problem.instance_hash()), &rows),
        Format::Csv => csv_text(|buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["kind", "t", "controller", "code", "index", "probability"])?;
            for row in &rows {
                let controller = row.controller.map(|k| k.to_string()).unwrap_or_default();
                for (i, p) in row.probs.iter().enumerate() {
                    w.write_record([
                        row.kind.to_string(),
                        row.t.to_string(),
                        controller.clone(),
                        row.code.to_string(),
                        i.to_string(),
                        format!("{p:e}"),
                    ])?;
                }
            }
            w.flush()?;
            Ok(())
        }),
    };
    emit(config, text)
}
