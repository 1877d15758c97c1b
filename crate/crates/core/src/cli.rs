//! The `mapmerge` command line: exploration, scenario regression, trace
//! checking and graph export.
//!
//! Each subcommand has a `cmd_*` function returning a [`RunReport`] (or the
//! exported text), so everything the binary does can be driven from tests.
//! Exit codes: 0 pass, 1 violation or failed scenario, 2 usage or parse
//! error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::explorer::{
    check_inevitable, explore, export_graph, find_deadlocks, find_hidden_divergence, has_trace, internal_events, Check,
    ExploreOptions, GraphFormat, Inevitability, StateGraph, TraceQuery, Witness,
};
use crate::protocol::{EventLabel, Mutations, MAX_AGENTS};
use crate::scenarios::{builtin_scenarios, check_scenario_with, load_scenario_file, Scenario};
use crate::world::{Model, ModelOptions, MIN_AGENTS};

pub const WORKERS_ENV: &str = "MAPMERGE_WORKERS";

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "mapmerge", version, about = "Explore and check the map-merge protocol model")]
pub struct Cli {
    /// Print the report as JSON instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,

    /// Include wall-clock durations in JSON output (makes it non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Explore the full state space and run every check.
    Explore(ExploreArgs),
    /// Run the built-in (or file-supplied) scenarios.
    Scenarios(ScenarioArgs),
    /// Check whether a trace file is a trace of the model.
    TraceCheck(TraceArgs),
    /// Explore, then write the state graph as DOT or JSON.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mutant {
    /// Let lower-priority leaders confirm merges.
    NoPriorityGuard,
    /// Let inactive leaders confirm merges.
    NoActiveGuard,
}

#[derive(Clone, Debug, Args)]
pub struct ModelArgs {
    /// Number of agents.
    #[arg(long, default_value_t = 3, value_parser = parse_agents)]
    pub agents: usize,

    /// Leave out the done/terminate harness.
    #[arg(long)]
    pub no_harness: bool,

    /// Largest merge set an agent may request.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub merge_set_max: u64,

    /// Run a deliberately broken protocol variant.
    #[arg(long, value_enum, hide = true)]
    pub mutant: Option<Mutant>,
}

impl Default for ModelArgs {
    fn default() -> Self {
        ModelArgs { agents: 3, no_harness: false, merge_set_max: 1, mutant: None }
    }
}

impl ModelArgs {
    pub fn options(&self) -> ModelOptions {
        let mutations = match self.mutant {
            None => Mutations::default(),
            Some(Mutant::NoPriorityGuard) => Mutations { skip_priority_guard: true, ..Default::default() },
            Some(Mutant::NoActiveGuard) => Mutations { skip_active_guard: true, ..Default::default() },
        };
        ModelOptions { harness: !self.no_harness, merge_set_max: self.merge_set_max as usize, mutations }
    }

    pub fn model(&self) -> Result<Model> {
        Model::new(self.agents, self.options())
    }
}

#[derive(Clone, Debug, Default, Args)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Stop after this many states.
    #[arg(long)]
    pub max_states: Option<usize>,

    /// Do not expand states at this depth.
    #[arg(long)]
    pub max_depth: Option<usize>,

    /// Worker threads (default: $MAPMERGE_WORKERS, else all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,

    /// Also write the explored graph as DOT to this path.
    #[arg(long, value_name = "PATH")]
    pub dot: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Run only this scenario.
    #[arg(long)]
    pub name: Option<String>,

    /// Read scenarios from a JSON file instead of the built-in set.
    #[arg(long, value_name = "PATH")]
    pub scenario_file: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// One JSON event per line. `"forbid": true` makes an event visible
    /// without adding it to the trace.
    pub trace_file: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub explore: ExploreArgs,

    #[arg(long, default_value = "dot", value_parser = parse_format)]
    pub format: GraphFormat,

    /// Write here instead of stdout.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

fn parse_agents(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (MIN_AGENTS..=MAX_AGENTS).contains(&n) {
        Ok(n)
    } else {
        Err(format!("must be between {MIN_AGENTS} and {MAX_AGENTS}"))
    }
}

fn parse_format(s: &str) -> std::result::Result<GraphFormat, String> {
    s.parse().map_err(|e: ModelError| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The state space was cut off, so the check could not decide.
    Inconclusive,
}

impl Status {
    fn of(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportedViolation {
    pub check: String,
    pub detail: String,
    /// Events leading to the offending state.
    pub trace: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub agents: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transitions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    pub checks: Vec<CheckOutcome>,
    pub violations: Vec<ReportedViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub durations_ms: Option<BTreeMap<String, f64>>,
    pub verdict: Verdict,
}

impl RunReport {
    fn new(command: String, agents: usize) -> Self {
        RunReport {
            command,
            agents,
            states: None,
            transitions: None,
            max_depth: None,
            complete: None,
            checks: Vec::new(),
            violations: Vec::new(),
            witness: None,
            durations_ms: Some(BTreeMap::new()),
            verdict: Verdict::Pass,
        }
    }

    fn time(&mut self, name: &str, start: Instant) {
        if let Some(d) = self.durations_ms.as_mut() {
            d.insert(name.to_owned(), start.elapsed().as_secs_f64() * 1000.0);
        }
    }

    fn check(&mut self, name: impl Into<String>, status: Status, detail: Option<String>) {
        self.checks.push(CheckOutcome { name: name.into(), status, detail });
    }

    fn violation(&mut self, check: impl Into<String>, detail: impl Into<String>, events: &[EventLabel]) {
        self.violations.push(ReportedViolation {
            check: check.into(),
            detail: detail.into(),
            trace: events.iter().map(ToString::to_string).collect(),
        });
    }

    fn finish(mut self) -> Self {
        let failed = self.checks.iter().any(|c| c.status == Status::Fail);
        self.verdict = if failed || !self.violations.is_empty() { Verdict::Fail } else { Verdict::Pass };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    /// Pretty JSON. Durations are dropped unless `timings` is set, so the
    /// output depends only on the inputs.
    pub fn to_json(&self, timings: bool) -> String {
        let mut s = if timings {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string_pretty(&RunReport { durations_ms: None, ..self.clone() })
        }
        .expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        let _ = writeln!(out, "  agents       {}", self.agents);
        if let Some(s) = self.states {
            let _ = writeln!(out, "  states       {s}");
        }
        if let Some(t) = self.transitions {
            let _ = writeln!(out, "  transitions  {t}");
        }
        if let Some(d) = self.max_depth {
            let _ = writeln!(out, "  max depth    {d}");
        }
        if let Some(c) = self.complete {
            let _ = writeln!(out, "  complete     {}", if c { "yes" } else { "no (bounded)" });
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let durations = self.durations_ms.clone().unwrap_or_default();
        for c in &self.checks {
            let _ = write!(out, "  {:<width$}  {:<12}", c.name, c.status.as_str());
            if let Some(ms) = durations.get(&c.name) {
                let _ = write!(out, "  {ms:>9.1} ms");
            }
            if let Some(d) = &c.detail {
                let _ = write!(out, "  {d}");
            }
            out.push('\n');
        }
        for v in &self.violations {
            let _ = writeln!(out, "  violation [{}]: {}", v.check, v.detail);
            for e in &v.trace {
                let _ = writeln!(out, "      {e}");
            }
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "  witness:");
            for e in w {
                let _ = writeln!(out, "      {e}");
            }
        }
        if let Some(ms) = durations.get("explore") {
            let _ = writeln!(out, "  explore      {ms:.1} ms");
        }
        if let Some(ms) = durations.get("total") {
            let _ = writeln!(out, "  total        {ms:.1} ms");
        }
        let _ = writeln!(out, "verdict: {}", if self.passed() { "pass" } else { "FAIL" });
        out
    }
}

/// `--workers`, else `MAPMERGE_WORKERS`, else the number of cores.
pub fn resolve_workers(flag: Option<u64>) -> Result<usize> {
    if let Some(w) = flag {
        return Ok(w as usize);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(ModelError::Config(format!("{WORKERS_ENV}=`{v}` is not a positive integer"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn model_echo(m: &ModelArgs) -> String {
    let mut s = format!("--agents {}", m.agents);
    if m.no_harness {
        s.push_str(" --no-harness");
    }
    if m.merge_set_max != 1 {
        let _ = write!(s, " --merge-set-max {}", m.merge_set_max);
    }
    if let Some(mutant) = m.mutant {
        let name = mutant.to_possible_value().expect("not skipped");
        let _ = write!(s, " --mutant {}", name.get_name());
    }
    s
}

fn explore_echo(a: &ExploreArgs) -> String {
    let mut s = model_echo(&a.model);
    if let Some(k) = a.max_states {
        let _ = write!(s, " --max-states {k}");
    }
    if let Some(d) = a.max_depth {
        let _ = write!(s, " --max-depth {d}");
    }
    s
}

fn build_graph(args: &ExploreArgs) -> Result<StateGraph> {
    let model = args.model.model()?;
    let opts = ExploreOptions {
        max_states: args.max_states,
        max_depth: args.max_depth,
        workers: resolve_workers(args.workers)?,
        ..Default::default()
    };
    Ok(explore(&model, &model.initial_config(), &opts))
}

pub fn cmd_explore(args: &ExploreArgs) -> Result<RunReport> {
    let total = Instant::now();
    let mut report = RunReport::new(format!("explore {}", explore_echo(args)), args.model.agents);

    let start = Instant::now();
    let g = build_graph(args)?;
    report.time("explore", start);
    report.states = Some(g.state_count());
    report.transitions = Some(g.transition_count());
    report.max_depth = Some(g.max_depth());
    report.complete = Some(g.complete);

    for check in Check::ALL {
        let count = g.violations_of(check);
        let detail = (count > 0).then(|| format!("{count} violation(s)"));
        report.check(check.name(), Status::of(count == 0), detail);
    }
    for v in &g.violations {
        report.violation(v.check, v.detail.clone(), &v.witness.events);
    }

    let start = Instant::now();
    let deadlocks = find_deadlocks(&g);
    report.time("deadlock", start);
    let detail = (!deadlocks.is_empty()).then(|| format!("{} deadlocked state(s)", deadlocks.len()));
    report.check("deadlock", Status::of(deadlocks.is_empty()), detail);
    if let Some(w) = deadlocks.first() {
        report.violation("deadlock", format!("no event enabled in {}", w.last().partition_label()), &w.events);
    }

    let start = Instant::now();
    let internal = internal_events();
    let divergence = find_hidden_divergence(&g, |e| internal.contains(&e.kind()));
    report.time("hidden_divergence", start);
    report.check("hidden_divergence", Status::of(divergence.is_none()), None);
    if let Some(d) = divergence {
        let cycle: Vec<String> = d.cycle.iter().map(ToString::to_string).collect();
        report.violation("hidden_divergence", format!("internal cycle: {}", cycle.join(" -> ")), &d.prefix.events);
    }

    let start = Instant::now();
    let model = g.model();
    let inevitable = check_inevitable(&g, |c| model.is_terminal(c));
    report.time("ag_ef_done", start);
    match inevitable {
        Inevitability::Holds => report.check("ag_ef_done", Status::Pass, None),
        Inevitability::Indeterminate => {
            report.check("ag_ef_done", Status::Inconclusive, Some("state space not fully explored".into()))
        }
        Inevitability::Fails { counterexample } => {
            report.check("ag_ef_done", Status::Fail, None);
            report.violation("ag_ef_done", "termination unreachable from this state", &counterexample.events);
        }
    }

    if let Some(path) = &args.dot {
        fs::write(path, export_graph(&g, GraphFormat::Dot))?;
    }
    report.time("total", total);
    Ok(report.finish())
}

fn select_scenarios(args: &ScenarioArgs) -> Result<Vec<Scenario>> {
    let all = match &args.scenario_file {
        Some(path) => load_scenario_file(path)?,
        None => builtin_scenarios(),
    };
    match &args.name {
        None => Ok(all),
        Some(name) => {
            let picked: Vec<_> = all.into_iter().filter(|s| &s.name == name).collect();
            if picked.is_empty() {
                Err(ModelError::Config(format!("unknown scenario `{name}`")))
            } else {
                Ok(picked)
            }
        }
    }
}

pub fn cmd_scenarios(args: &ScenarioArgs) -> Result<RunReport> {
    let total = Instant::now();
    let mut echo = format!("scenarios {}", model_echo(&args.model));
    if let Some(name) = &args.name {
        let _ = write!(echo, " --name {name}");
    }
    if let Some(path) = &args.scenario_file {
        let _ = write!(echo, " --scenario-file {}", path.display());
    }
    let mut report = RunReport::new(echo, args.model.agents);
    for s in select_scenarios(args)? {
        let r = check_scenario_with(&s, args.model.agents, args.model.options())?;
        if let Some(d) = report.durations_ms.as_mut() {
            d.insert(s.name.clone(), r.duration_ms);
        }
        let tag = serde_json::to_value(s.requirement_tag).expect("tag serialises");
        let outcome = if r.found { "trace found" } else { "no such trace" };
        report.check(&s.name, Status::of(r.pass), Some(format!("{} {outcome}", tag.as_str().unwrap_or("?"))));
        if !r.pass {
            let expected = if s.expected { "expected a trace" } else { "expected no trace" };
            report.violation(&s.name, format!("{expected}; {outcome}"), &r.witness.unwrap_or_default());
        }
    }
    report.time("total", total);
    Ok(report.finish())
}

/// Parses a JSON-lines trace. Blank lines are skipped; an object with
/// `"forbid": true` adds its event to the visible alphabet only.
pub fn parse_trace(text: &str) -> Result<TraceQuery> {
    let mut trace = Vec::new();
    let mut forbidden = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| ModelError::Parse { line: line_no, message };
        let mut value: serde_json::Value = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
        let forbid = match value.as_object_mut().and_then(|o| o.remove("forbid")) {
            None => false,
            Some(serde_json::Value::Bool(b)) => b,
            Some(other) => return Err(parse_err(format!("`forbid` must be a boolean, got {other}"))),
        };
        let event: EventLabel = serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))?;
        if forbid {
            forbidden.insert(event);
        } else {
            trace.push(event);
        }
    }
    Ok(TraceQuery::new(trace).forbidding(forbidden))
}

pub fn cmd_trace_check(args: &TraceArgs) -> Result<RunReport> {
    let total = Instant::now();
    let query = parse_trace(&fs::read_to_string(&args.trace_file)?)?;
    let model = args.model.model()?;
    query.validate(&model)?;
    let echo = format!("trace-check {} {}", model_echo(&args.model), args.trace_file.display());
    let mut report = RunReport::new(echo, args.model.agents);

    let start = Instant::now();
    let result = has_trace(&model, &model.initial_config(), &query);
    report.time("has_trace", start);
    report.states = Some(result.explored);
    let detail = format!("{} visible event(s)", query.trace.len());
    report.check("has_trace", Status::of(result.found), Some(detail));
    match result.witness {
        Some(Witness { events, .. }) => report.witness = Some(events.iter().map(ToString::to_string).collect()),
        None => report.violation("has_trace", "the model cannot perform this trace", &[]),
    }
    report.time("total", total);
    Ok(report.finish())
}

pub fn cmd_export(args: &ExportArgs) -> Result<String> {
    Ok(export_graph(&build_graph(&args.explore)?, args.format))
}

fn emit(report: &RunReport, cli: &Cli, out: &mut dyn Write) -> Result<u8> {
    let text = if cli.json { report.to_json(cli.timings) } else { report.to_text() };
    out.write_all(text.as_bytes())?;
    Ok(report.exit_code())
}

/// Runs a parsed command line, writing to `out`. Returns the exit code;
/// errors map to [`EXIT_USAGE`].
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Explore(a) => emit(&cmd_explore(a)?, cli, out),
        Command::Scenarios(a) => emit(&cmd_scenarios(a)?, cli, out),
        Command::TraceCheck(a) => emit(&cmd_trace_check(a)?, cli, out),
        Command::Export(a) => {
            let text = cmd_export(a)?;
            match &a.output {
                Some(path) => fs::write(path, &text)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_PASS)
        }
    }
}

/// Parses `argv` and runs it, printing errors to `err`. Usage errors exit 2.
pub fn main_with(argv: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_PASS
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
