//! Job parsing, dispatch and deterministic JSON reports for the `garnet` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use garnet::ambient::{Ambient, Backdrop, BaseAmbient, PshAmbient, SetAmbient};
use garnet::arrows::ArrowObj;
use garnet::awfs::{
    replay, verify_trace, CartesianFactor, GeneratedAwfs, IdentityFunctor, SearchMode, SupportFunctor,
};
use garnet::density::{subobject_diagram, subobject_diagram_sets, ArrowDiagram};
use garnet::fincat::FinCategory;
use garnet::{Error, DEFAULT_CAP};

/// Version of every report and trace this binary writes.
pub const REPORT_FORMAT: u64 = 1;

pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 1;
    pub const ITERATION_LIMIT: i32 = 2;
    pub const NO_STRUCTURE: i32 = 3;
    pub const CAP: i32 = 4;
    pub const INTERNAL: i32 = 5;
}

#[derive(Parser, Debug, Clone)]
#[command(name = "garnet", version, about = "Algebraic small object argument over finite ambients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Parse and validate the base category, generator diagram and maps.
    Validate(Job),
    /// Factorize each map and emit its construction trace.
    Factorize(Job),
    /// Search for coherent lifting structures on each map.
    Lift(Job),
    /// Solve one lifting problem with the first lifting structure found.
    Solve {
        #[command(flatten)]
        job: Job,
        /// Generator (object of the index category) the problem is posed against.
        #[arg(long)]
        generator: String,
        /// Position of the problem among the squares from that generator.
        #[arg(long, default_value_t = 0)]
        problem: usize,
    },
    /// Run the factorization, comonad and monad law suite on each map.
    Laws(Job),
    /// Re-verify a trace produced by `factorize`.
    TraceVerify {
        #[command(flatten)]
        job: Job,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Replay a trace under a functor on finite sets.
    Replay {
        #[command(flatten)]
        job: Job,
        #[arg(long)]
        trace: PathBuf,
        /// `identity`, `product:K` or `support`.
        #[arg(long, default_value = "identity")]
        functor: String,
    },
    /// Quillen's argument for discrete generators.
    Quillen(Job),
    /// Property-level right lifting check, ignoring coherence.
    Rlp(Job),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AmbientKind {
    Finset,
    Presheaf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackdropKind {
    All,
    Mono,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    First,
    Count,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct Job {
    #[arg(long, value_enum, default_value = "finset")]
    pub ambient: AmbientKind,
    /// Base category file; required for the presheaf ambient.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Generator diagram file, or `subobject_classifier`.
    #[arg(long)]
    pub generators: Option<String>,
    /// Map file; repeatable.
    #[arg(long = "map")]
    pub maps: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    pub backdrop: BackdropKind,
    /// Machine report destination; the summary always goes to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = garnet::freemonad::DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    #[arg(long, env = "GARNET_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, value_enum, default_value = "all")]
    pub mode: ModeArg,
    /// Maps processed in parallel, each in its own session.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// What a run produced: the exit code, the machine report and a human summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub summary: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IterationLimit { .. } => exit::ITERATION_LIMIT,
        Error::EnumerationCap { .. } => exit::CAP,
        Error::Internal(_) | Error::NoIsoFound(_) => exit::INTERNAL,
        _ => exit::VALIDATION,
    }
}

fn error_json(e: &Error) -> Value {
    let kind = format!("{e:?}");
    let kind = kind.split(['(', ' ', '{']).next().unwrap_or("").to_string();
    let mut v = json!({"kind": kind, "message": e.to_string()});
    if let Error::IterationLimit { partial_trace, .. } = e {
        v["partial_trace"] = (**partial_trace).clone();
    }
    v
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))
}

fn file_label(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Inputs read once up front; everything here is `Send`, sessions are built per worker.
#[derive(Clone)]
struct Inputs {
    base: Option<Arc<FinCategory>>,
    generators: GeneratorSpec,
    maps: Vec<(String, Value)>,
    backdrop: Backdrop,
}

#[derive(Clone)]
enum GeneratorSpec {
    Empty,
    SubobjectClassifier,
    File(String, Value),
}

impl GeneratorSpec {
    fn label(&self) -> String {
        match self {
            GeneratorSpec::Empty => "empty".into(),
            GeneratorSpec::SubobjectClassifier => "subobject_classifier".into(),
            GeneratorSpec::File(name, _) => name.clone(),
        }
    }
}

fn read_inputs(job: &Job) -> Result<Inputs, Error> {
    let base = match (&job.ambient, &job.base) {
        (AmbientKind::Presheaf, None) => {
            return Err(Error::MalformedInput("the presheaf ambient needs --base".into()))
        }
        (_, Some(p)) => {
            let c: FinCategory =
                serde_json::from_value(read_json(p)?).map_err(|e| Error::MalformedInput(format!("{}: {e}", p.display())))?;
            let report = c.validate();
            if !report.is_valid() {
                return Err(Error::MalformedInput(format!(
                    "{} is not a category: {}",
                    p.display(),
                    serde_json::to_string(&report).expect("report")
                )));
            }
            Some(Arc::new(c))
        }
        (AmbientKind::Finset, None) => None,
    };
    let generators = match job.generators.as_deref() {
        None => GeneratorSpec::Empty,
        Some("subobject_classifier") => GeneratorSpec::SubobjectClassifier,
        Some(p) => {
            let path = Path::new(p);
            GeneratorSpec::File(file_label(path), read_json(path)?)
        }
    };
    let maps = job
        .maps
        .iter()
        .map(|p| Ok((file_label(p), read_json(p)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let backdrop = match job.backdrop {
        BackdropKind::All => Backdrop::All,
        BackdropKind::Mono => Backdrop::Mono,
    };
    Ok(Inputs {
        base,
        generators,
        maps,
        backdrop,
    })
}

/// One ambient's worth of parsing: generator diagrams and maps.
trait Setting: BaseAmbient + Send + Sync + 'static {
    fn generators(&self, spec: &GeneratorSpec) -> Result<ArrowDiagram<Self>, Error>;
    fn check_map(&self, m: &Self::Mor) -> Result<(), Error>;
}

impl Setting for SetAmbient {
    fn generators(&self, spec: &GeneratorSpec) -> Result<ArrowDiagram<Self>, Error> {
        match spec {
            GeneratorSpec::Empty => Ok(ArrowDiagram::empty()),
            GeneratorSpec::SubobjectClassifier => subobject_diagram_sets(),
            GeneratorSpec::File(_, v) => ArrowDiagram::from_json(self, v),
        }
    }

    fn check_map(&self, _: &Self::Mor) -> Result<(), Error> {
        Ok(())
    }
}

impl Setting for PshAmbient {
    fn generators(&self, spec: &GeneratorSpec) -> Result<ArrowDiagram<Self>, Error> {
        match spec {
            GeneratorSpec::Empty => Ok(ArrowDiagram::empty()),
            GeneratorSpec::SubobjectClassifier => Ok(subobject_diagram(&self.base)?.diagram),
            GeneratorSpec::File(_, v) => {
                let d = ArrowDiagram::from_json(self, v)?;
                for a in &d.arrows {
                    self.check_map(&a.map)?;
                }
                Ok(d)
            }
        }
    }

    fn check_map(&self, m: &Self::Mor) -> Result<(), Error> {
        if **m.source().base() != *self.base {
            return Err(Error::MalformedInput("map lives over a different base category".into()));
        }
        Ok(())
    }
}

fn parse_map<E: Setting>(amb: &E, name: &str, v: &Value) -> Result<ArrowObj<E>, Error> {
    let m: E::Mor = serde_json::from_value(v.clone()).map_err(|e| Error::MalformedInput(format!("{name}: {e}")))?;
    amb.check_map(&m)?;
    Ok(ArrowObj::new(m))
}

fn session<E: Setting>(amb: &E, inputs: &Inputs, job: &Job) -> Result<GeneratedAwfs<E>, Error> {
    let gens = amb.generators(&inputs.generators)?;
    Ok(GeneratedAwfs::with_limits(
        amb.clone(),
        gens,
        inputs.backdrop.clone(),
        job.cap,
        job.max_steps,
    ))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

/// Per-map work for the map-driven subcommands; returns the result entry and its exit code.
fn per_map<E: Setting>(
    amb: &E,
    awfs: &GeneratedAwfs<E>,
    cmd: &Command,
    job: &Job,
    name: &str,
    v: &Value,
) -> Result<(Value, i32), Error> {
    let f = parse_map(amb, name, v)?;
    let arr = awfs.arr();
    let mut entry = json!({"map": name, "sizes": arr.sizes(&f)});
    let mut code = exit::OK;
    match cmd {
        Command::Validate(_) => {
            entry["valid"] = json!(true);
        }
        Command::Factorize(_) => {
            let fact = awfs.factorize_arrow(&f)?;
            let trace = awfs.trace(&fact)?;
            entry["converged_stage"] = json!(fact.converged_stage());
            entry["stage_sizes"] = json!(fact.stage_arrows().iter().map(|a| arr.sizes(a)).collect::<Vec<_>>());
            entry["midpoint_sizes"] = json!(amb.sizes(&fact.midpoint));
            entry["lf"] = to_value(&fact.lf);
            entry["rf"] = to_value(&fact.rf);
            entry["trace"] = trace.to_json();
        }
        Command::Lift(_) => {
            let mode = match job.mode {
                ModeArg::First => SearchMode::First,
                ModeArg::Count => SearchMode::Count,
                ModeArg::All => SearchMode::All,
            };
            let search = awfs.find_lifting_structures(&f, mode)?;
            entry["mode"] = to_value(&mode);
            entry["count"] = json!(search.count as u64);
            if mode != SearchMode::Count {
                entry["structures"] = json!(search.structures.iter().map(|s| to_value(&s.fillers)).collect::<Vec<_>>());
            }
            if mode == SearchMode::First && search.count == 0 {
                code = exit::NO_STRUCTURE;
            }
        }
        Command::Solve { generator, problem, .. } => {
            let u = awfs.generators();
            let i = u
                .index
                .object_index(generator)
                .ok_or_else(|| Error::UnknownObject(generator.clone()))?;
            let problems = garnet::density::lifting_problems(arr, u, i, &f, job.cap)?;
            let alpha = problems.get(*problem).ok_or_else(|| {
                Error::MalformedInput(format!("{generator} poses {} problems, not {}", problems.len(), problem + 1))
            })?;
            let search = awfs.find_lifting_structures(&f, SearchMode::First)?;
            entry["problem"] = to_value(alpha);
            match search.structures.first() {
                Some(s) => entry["filler"] = to_value(&awfs.solve(s, i, alpha)?),
                None => {
                    entry["filler"] = Value::Null;
                    code = exit::NO_STRUCTURE;
                }
            }
        }
        Command::Laws(_) => {
            let laws = awfs.law_suite(&f)?;
            entry["laws"] = to_value(&laws);
            entry["passed"] = json!(laws.passed());
            if !laws.passed() {
                code = exit::INTERNAL;
            }
        }
        Command::Quillen(_) => {
            let q = awfs.quillen_factorize(&f, job.max_steps)?;
            entry["stage_count"] = json!(q.stage_count());
            entry["lf"] = to_value(&q.lf);
            entry["rf"] = to_value(&q.rf);
        }
        Command::Rlp(_) => {
            entry["rlp"] = json!(awfs.has_rlp(&f)?);
        }
        Command::TraceVerify { .. } | Command::Replay { .. } => unreachable!("trace commands take no maps"),
    }
    Ok((entry, code))
}

fn run_maps<E: Setting>(amb: E, cmd: &Command, job: &Job, inputs: &Inputs) -> Result<(Vec<Value>, i32), Error> {
    let process = |chunk: &[(String, Value)]| -> Result<Vec<(Value, i32)>, Error> {
        let awfs = session(&amb, inputs, job)?;
        Ok(chunk
            .iter()
            .map(|(name, v)| match per_map(&amb, &awfs, cmd, job, name, v) {
                Ok(r) => r,
                Err(e) => (json!({"map": name, "error": error_json(&e)}), exit_code(&e)),
            })
            .collect())
    };
    let workers = job.jobs.max(1).min(inputs.maps.len().max(1));
    let per = inputs.maps.len().div_ceil(workers).max(1);
    let chunks: Vec<&[(String, Value)]> = inputs.maps.chunks(per).collect();
    let results: Vec<Result<Vec<(Value, i32)>, Error>> = if chunks.len() <= 1 {
        chunks.iter().map(|c| process(c)).collect()
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = chunks.iter().map(|c| s.spawn(|| process(c))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut entries = Vec::new();
    let mut code = exit::OK;
    for r in results {
        for (v, c) in r? {
            if code == exit::OK {
                code = c;
            }
            entries.push(v);
        }
    }
    Ok((entries, code))
}

fn run_trace_command<E: Setting>(amb: E, cmd: &Command, job: &Job, inputs: &Inputs) -> Result<(Value, i32), Error>
where
    E: Setting,
{
    let awfs = session(&amb, inputs, job)?;
    let (path, functor) = match cmd {
        Command::TraceVerify { trace, .. } => (trace, None),
        Command::Replay { trace, functor, .. } => (trace, Some(functor.as_str())),
        _ => unreachable!("not a trace command"),
    };
    let t = extract_trace(read_json(path)?)?;
    let report = verify_trace(&awfs, &t);
    let Some(functor) = functor else {
        let code = if report.passed { exit::OK } else { exit::VALIDATION };
        return Ok((to_value(&report), code));
    };
    let out = replay_with(&awfs, &t, functor)?;
    Ok((out, exit::OK))
}

/// Replay is defined for functors on finite sets only.
fn replay_with<E: Setting>(awfs: &GeneratedAwfs<E>, t: &Value, functor: &str) -> Result<Value, Error> {
    let witness = |_: usize, g: &ArrowObj<E>| awfs.first_section(g);
    if functor == "identity" {
        return Ok(to_value(&replay(awfs, t, &IdentityFunctor, &witness)?));
    }
    let any: &dyn std::any::Any = awfs;
    let Some(sets) = any.downcast_ref::<GeneratedAwfs<SetAmbient>>() else {
        return Err(Error::MalformedInput(format!("functor `{functor}` needs the finset ambient")));
    };
    let witness = |_: usize, g: &ArrowObj<SetAmbient>| sets.first_section(g);
    let report = if functor == "support" {
        replay(sets, t, &SupportFunctor, &witness)?
    } else if let Some(k) = functor.strip_prefix("product:") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::MalformedInput(format!("bad factor in `{functor}`")))?;
        replay(sets, t, &CartesianFactor { k }, &witness)?
    } else {
        return Err(Error::MalformedInput(format!("unknown functor `{functor}`")));
    };
    Ok(to_value(&report))
}

/// Accepts a bare trace or a `factorize` report holding exactly one trace.
fn extract_trace(v: Value) -> Result<Value, Error> {
    if v.get("stages").is_some() {
        return Ok(v);
    }
    match v.get("results").and_then(Value::as_array).map(Vec::as_slice) {
        Some([one]) => one
            .get("trace")
            .cloned()
            .ok_or_else(|| Error::MalformedInput("report entry carries no trace".into())),
        _ => Err(Error::MalformedInput("expected a trace or a single-map factorize report".into())),
    }
}

fn dispatch<E: Setting>(amb: E, cmd: &Command, job: &Job, inputs: &Inputs) -> Result<(Value, i32), Error> {
    match cmd {
        Command::TraceVerify { .. } | Command::Replay { .. } => run_trace_command(amb, cmd, job, inputs),
        _ => {
            if let Command::Validate(_) = cmd {
                let gens = amb.generators(&inputs.generators)?;
                let report = gens.validate(&amb);
                if !report.is_valid() {
                    return Ok((json!({"generators": to_value(&report)}), exit::VALIDATION));
                }
            }
            let (entries, code) = run_maps(amb, cmd, job, inputs)?;
            Ok((json!({"results": entries}), code))
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Factorize(_) => "factorize",
            Command::Lift(_) => "lift",
            Command::Solve { .. } => "solve",
            Command::Laws(_) => "laws",
            Command::TraceVerify { .. } => "trace-verify",
            Command::Replay { .. } => "replay",
            Command::Quillen(_) => "quillen",
            Command::Rlp(_) => "rlp",
        }
    }

    pub fn job(&self) -> &Job {
        match self {
            Command::Validate(j)
            | Command::Factorize(j)
            | Command::Lift(j)
            | Command::Laws(j)
            | Command::Quillen(j)
            | Command::Rlp(j) => j,
            Command::Solve { job, .. } | Command::TraceVerify { job, .. } | Command::Replay { job, .. } => job,
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let cmd = &cli.command;
    let job = cmd.job();
    let mut report = json!({
        "format": REPORT_FORMAT,
        "command": cmd.name(),
        "ambient": match job.ambient { AmbientKind::Finset => "finset", AmbientKind::Presheaf => "presheaf" },
        "backdrop": match job.backdrop { BackdropKind::All => "all", BackdropKind::Mono => "mono" },
    });
    let result = read_inputs(job).and_then(|inputs| {
        report["generators"] = json!(inputs.generators.label());
        match (&job.ambient, &inputs.base) {
            (AmbientKind::Presheaf, Some(b)) => dispatch(PshAmbient::new(b.clone()), cmd, job, &inputs),
            _ => dispatch(SetAmbient, cmd, job, &inputs),
        }
    });
    let code = match result {
        Ok((body, code)) => {
            if let (Value::Object(r), Value::Object(b)) = (&mut report, body) {
                r.extend(b);
            }
            code
        }
        Err(e) => {
            report["error"] = error_json(&e);
            exit_code(&e)
        }
    };
    let summary = summarize(&report, code);
    Outcome { code, report, summary }
}

fn summarize(report: &Value, code: i32) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "garnet {}: exit {code}", report["command"].as_str().unwrap_or(""));
    if let Some(e) = report.get("error") {
        let _ = writeln!(s, "  error: {}", e["message"].as_str().unwrap_or(""));
    }
    for r in report.get("results").and_then(Value::as_array).into_iter().flatten() {
        let mut line = format!("  {}", r["map"].as_str().unwrap_or("?"));
        for key in ["converged_stage", "midpoint_sizes", "count", "passed", "rlp", "stage_count"] {
            if let Some(v) = r.get(key) {
                let _ = write!(line, " {key}={v}");
            }
        }
        if let Some(e) = r.get("error") {
            let _ = write!(line, " error={}", e["message"].as_str().unwrap_or(""));
        }
        let _ = writeln!(s, "{line}");
    }
    if let Some(passed) = report.get("passed") {
        let _ = writeln!(s, "  passed={passed}");
    }
    s
}

/// Pretty JSON with a trailing newline; the byte form golden tests compare.
pub fn render_report(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
