//! Command-line front end for `monoprob`.
//!
//! Every command writes one JSON document to standard output with sorted keys
//! and rationals as strings. Exit codes: `0` success, `1` invalid input,
//! `2` a failed check or consistency guard.

mod input;
mod suites;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use monoprob::clt::{clt_limit, clt_oracle, CltQuery};
use monoprob::cumulants::{cumulant, cumulants_from_moments, moment_system, universal_dot_moment};
use monoprob::oracle::{dot_moment, DotMethod};
use monoprob::partitions::{enumerate, q_map, OrderedPartition, PartitionKind};
use monoprob::random::centered;
use monoprob::series::{from_cumulants, from_moments, muraki_oracle, muraki_sum, EqualityMode, Series};
use monoprob::{BMatrix, CumulantSystem, Error, MomentSystem, Multilinear};
use serde_json::{json, Value};

use crate::input::Table;

/// The result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "monoprob", version, about = "Exact operator-valued monotone probability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate a partition family.
    Partitions {
        /// all, nc, interval, ordered, monotone or monotone-pair.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Map an ordered partition to its non-crossing partition.
    Qmap {
        /// JSON list of blocks, e.g. "[[1,3,4],[5,7],[2,6]]".
        #[arg(long)]
        ordered: String,
    },
    /// Joint moments of a model, as a table or one entry.
    Moments {
        #[arg(long, required_unless_present = "cumulants", conflicts_with = "cumulants")]
        model: Option<PathBuf>,
        /// A cumulant table written by `cumulants`; moments are rebuilt from it.
        #[arg(long)]
        cumulants: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[command(flatten)]
        word: Word,
    },
    /// Monotone cumulants of a model, as a table or one entry.
    Cumulants {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = CumulantMethod::Interpolation)]
        method: CumulantMethod,
        #[command(flatten)]
        word: Word,
    },
    /// Compare the composition of two moment series with the word expansion.
    Muraki {
        /// The lower variable.
        #[arg(long)]
        model_x: PathBuf,
        /// The upper variable.
        #[arg(long)]
        model_y: PathBuf,
        #[arg(long, default_value_t = 4)]
        degree: usize,
    },
    /// One moment of the sum of N monotone i.i.d. copies.
    Dot {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, short = 'N')]
        copies: usize,
        #[arg(long, value_enum, default_value_t = Method::Reduction)]
        method: Method,
        #[command(flatten)]
        word: Word,
    },
    /// Central limit moments for one centered variable, all arguments `1`.
    Clt {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Variable name when the model has several.
        #[arg(long)]
        variable: Option<String>,
        /// Subtract the mean before taking limits.
        #[arg(long)]
        center: bool,
    },
    /// Run invariant suites on seeded random models.
    Check {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args, Debug)]
struct Word {
    /// 1-based component indices, e.g. "[1,2,1]".
    #[arg(long)]
    indices: Option<String>,
    /// JSON list of argument matrices; identities when absent.
    #[arg(long, requires = "indices")]
    args: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CumulantMethod {
    Interpolation,
    Inversion,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Reduction,
    Qmap,
    Universal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    All,
    Partitions,
    Oracle,
    Cumulants,
    Series,
    Clt,
}

enum Failure {
    Invalid(String),
    Check(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Consistency(_) => Failure::Check(json!({ "error": e.to_string() })),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type Run = Result<Value, Failure>;

fn table(series: &Series<BMatrix>, r: usize, d: usize, degree: usize) -> Value {
    let mut v = series.export_json(degree);
    v["r"] = json!(r);
    v["d"] = json!(d);
    v["degree"] = json!(degree);
    v
}

fn entry(indices: &[usize], value: BMatrix) -> Value {
    json!({ "indices": indices.iter().map(|i| i + 1).collect::<Vec<_>>(), "value": value })
}

/// Either one entry of `system` or its whole table.
fn report<M: Multilinear + ?Sized>(system: &M, series: impl Fn() -> Series<BMatrix>, degree: usize, word: &Word) -> Run {
    match &word.indices {
        Some(text) => {
            let i = input::indices(text, system.r())?;
            let b = input::args(word.args.as_deref(), i.len(), system.d())?;
            system.validate(&i, &b)?;
            Ok(entry(&i, system.apply(&i, &b)))
        }
        None => Ok(table(&series(), system.r(), system.d(), degree)),
    }
}

fn partitions(kind: &str, n: usize, count_only: bool) -> Run {
    let kind: PartitionKind = kind.parse()?;
    let list = enumerate(kind, n)?;
    if count_only {
        return Ok(json!({ "count": list.len() }));
    }
    let name = match kind {
        PartitionKind::All => "all",
        PartitionKind::NonCrossing => "non-crossing",
        PartitionKind::IntervalBlocks => "interval-blocks",
        PartitionKind::Ordered => "ordered",
        PartitionKind::Monotone => "monotone",
        PartitionKind::MonotonePair => "monotone-pair",
    };
    Ok(json!({ "kind": name, "n": n, "count": list.len(), "partitions": list }))
}

fn qmap(ordered: &str) -> Run {
    let blocks: Vec<Vec<usize>> = serde_json::from_str(ordered).map_err(|e| Failure::Invalid(format!("--ordered: {e}")))?;
    let pi = OrderedPartition::from_blocks(blocks)?;
    Ok(json!(q_map(&pi).to_vecs()))
}

fn moments(model: Option<PathBuf>, cumulants: Option<PathBuf>, degree: usize, word: &Word) -> Run {
    let degree = input::degree(degree)?;
    let system = match (model, cumulants) {
        (Some(path), _) => MomentSystem::from_model(input::load_model(&path)?, degree),
        (None, Some(path)) => {
            let t = Table::parse(&input::read(&path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
            if t.degree < degree {
                return Err(Failure::Invalid(format!("cumulant table has degree {}, need {degree}", t.degree)));
            }
            if !t.constant.is_zero() {
                return Err(Failure::Invalid("cumulant table must have a zero constant".into()));
            }
            moment_system(&t.cumulants().with_cap(degree))
        }
        (None, None) => return Err(Failure::Invalid("either --model or --cumulants is required".into())),
    };
    report(&system, || from_moments(&system), degree, word)
}

fn cumulants(model: PathBuf, degree: usize, method: CumulantMethod, word: &Word) -> Run {
    let degree = input::degree(degree)?;
    let x = MomentSystem::from_model(input::load_model(&model)?, degree);
    let kappa: CumulantSystem = match method {
        CumulantMethod::Interpolation => {
            if let Some(text) = &word.indices {
                let i = input::indices(text, x.r())?;
                let b = input::args(word.args.as_deref(), i.len(), x.d())?;
                return Ok(entry(&i, monoprob::cumulants::cumulant_eval(&x, &i, &b)?));
            }
            cumulant(&x)
        }
        CumulantMethod::Inversion => cumulants_from_moments(&x),
    };
    report(&kappa, || from_cumulants(&kappa), degree, word)
}

fn muraki(model_x: PathBuf, model_y: PathBuf, degree: usize) -> Run {
    let degree = input::degree(degree)?;
    let x = MomentSystem::from_model(input::load_model(&model_x)?, degree);
    let y = MomentSystem::from_model(input::load_model(&model_y)?, degree);
    let mismatch = muraki_sum(&x, &y)?.difference(&muraki_oracle(&x, &y)?, EqualityMode::Exhaustive { degree })?;
    let mismatch = mismatch.map(|m| {
        json!({
            "indices": m.indices.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "args": m.args,
            "composition": m.left,
            "expansion": m.right,
        })
    });
    Ok(json!({ "degree": degree, "equal": mismatch.is_none(), "mismatch": mismatch }))
}

fn dot(model: PathBuf, copies: usize, method: Method, word: &Word) -> Run {
    let model = input::load_model(&model)?;
    let text = word.indices.as_deref().ok_or_else(|| Failure::Invalid("--indices is required".into()))?;
    let i = input::indices(text, model.r())?;
    let x = MomentSystem::from_model(model, i.len().max(1));
    let b = input::args(word.args.as_deref(), i.len(), x.d())?;
    let value = match method {
        Method::Reduction => dot_moment(&x, copies, &i, &b, DotMethod::Reduction)?,
        Method::Qmap => dot_moment(&x, copies, &i, &b, DotMethod::Qmap)?,
        Method::Universal => universal_dot_moment(&x, copies, &i, &b)?,
    };
    let mut out = entry(&i, value);
    out["copies"] = json!(copies);
    Ok(out)
}

fn clt(model: PathBuf, degree: usize, variable: Option<String>, center: bool) -> Run {
    let degree = input::degree(degree)?;
    let mut model = input::single_variable(&input::load_model(&model)?, variable.as_deref())?;
    if center {
        model = centered(&model);
    }
    let x = MomentSystem::from_model(model, degree);
    let mut rows = Vec::new();
    let mut agrees = true;
    for n in 1..=degree {
        let q = CltQuery::new(&x, vec![BMatrix::identity(x.d()); n])?;
        let limit = clt_limit(&q)?;
        agrees &= clt_oracle(&q)? == limit;
        rows.push(json!({ "n": n, "value": limit }));
    }
    if !agrees {
        return Err(Failure::Check(json!({ "error": "limit and oracle differ", "moments": rows })));
    }
    Ok(json!({ "degree": degree, "moments": rows }))
}

fn check(suite: Suite, seed: u64) -> Run {
    let names: Vec<&str> = match suite {
        Suite::All => suites::SUITES.to_vec(),
        Suite::Partitions => vec!["partitions"],
        Suite::Oracle => vec!["oracle"],
        Suite::Cumulants => vec!["cumulants"],
        Suite::Series => vec!["series"],
        Suite::Clt => vec!["clt"],
    };
    let (report, passed) = suites::run(&names, seed);
    if passed {
        Ok(report)
    } else {
        Err(Failure::Check(report))
    }
}

fn dispatch(command: Command) -> Run {
    match command {
        Command::Partitions { kind, n, count_only } => partitions(&kind, n, count_only),
        Command::Qmap { ordered } => qmap(&ordered),
        Command::Moments { model, cumulants, degree, word } => moments(model, cumulants, degree, &word),
        Command::Cumulants { model, degree, method, word } => cumulants(model, degree, method, &word),
        Command::Muraki { model_x, model_y, degree } => muraki(model_x, model_y, degree),
        Command::Dot { model, copies, method, word } => dot(model, copies, method, &word),
        Command::Clt { model, degree, variable, center } => clt(model, degree, variable, center),
        Command::Check { suite, seed } => check(suite, seed),
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<S: AsRef<str>>(argv: &[S]) -> Outcome {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: shown, stderr: String::new() }
                }
                _ => Outcome { code: 1, stdout: String::new(), stderr: shown },
            };
        }
    };
    let caught = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli.command)));
    match caught {
        Ok(Ok(value)) => Outcome { code: 0, stdout: format!("{value}\n"), stderr: String::new() },
        Ok(Err(Failure::Invalid(msg))) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Ok(Err(Failure::Check(value))) => Outcome { code: 2, stdout: format!("{value}\n"), stderr: "error: check failed\n".into() },
        Err(p) => {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
    }
}
