//! The `symbreak` command line.
//!
//! Exit codes: 0 success, 1 unreadable input or parse/type errors, 2 search
//! budget exceeded, 3 other runtime failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::action::transform;
use crate::engine::solve::solve_space;
use crate::engine::{budget_from_env, flatten, orbit_oracle, EngineError, Filter, OrbitReport, SolveOptions};
use crate::modellang::{check_model, parse_model, CheckedModel};
use crate::perm::{parse_cycles, GeneratorFlag};
use crate::symbreak::{compile_lex_leader, dump_constraints, BreakConfig, BreakMode};
use crate::values::literal::{format_value, parse_value, LiteralContext, Shape};
use crate::values::{Assignment, Tag, Value};

#[derive(Debug, Parser)]
#[command(name = "symbreak", version, about = "Lex-leader symmetry breaking for unnamed types")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate the solutions of a model under a symmetry-breaking configuration.
    Solve(SolveArgs),
    /// Apply a permutation of an unnamed type to a value literal.
    Transform(TransformArgs),
    /// Count orbits of the solutions under all unnamed-type permutations.
    Orbits(OrbitsArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    model: PathBuf,
    /// independently, altogether or none
    #[arg(long, default_value = "altogether")]
    mode: BreakMode,
    /// consecutive, allpairs or allpermutations
    #[arg(long, default_value = "allpermutations")]
    gens: GeneratorFlag,
    /// Print counts only.
    #[arg(long)]
    count: bool,
    /// Also run the orbit oracle and report soundness and completeness.
    #[arg(long)]
    oracle: bool,
    /// Print the flattened cells and the lex-leader constraints.
    #[arg(long)]
    emit_constraints: bool,
    /// One JSON record per line.
    #[arg(long)]
    json: bool,
    /// syntactic (compiled constraints) or semantic (value predicate)
    #[arg(long, default_value = "syntactic")]
    filter: Filter,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Report elapsed time on stderr.
    #[arg(long)]
    time: bool,
}

#[derive(Debug, Args)]
struct TransformArgs {
    /// Cycle notation, e.g. "(1 2)(3 4)".
    perm: String,
    /// The unnamed type the permutation acts on.
    tag: String,
    /// Value literal, e.g. "function{1_T-->4, 2_T-->5}".
    value: String,
    /// Model declaring the type and any enumerated types.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Size of the type when no model is given.
    #[arg(long)]
    size: Option<u32>,
}

#[derive(Debug, Args)]
struct OrbitsArgs {
    model: PathBuf,
    #[arg(long)]
    json: bool,
    /// Print only the orbit count.
    #[arg(long)]
    count: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::Budget { .. } | EngineError::Universe { .. } => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 3,
            message: e.to_string(),
        }
    }
}

/// Run the command line; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Transform(a) => cmd_transform(&a, out),
        Command::Orbits(a) => cmd_orbits(&a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_model(path: &Path) -> Result<CheckedModel, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let model = parse_model(&text).map_err(|e| Failure::input(format!("{}:{e}", path.display())))?;
    check_model(&model).map_err(|diags| {
        let lines: Vec<String> = diags
            .iter()
            .map(|d| format!("{}: {d}", path.display()))
            .collect();
        Failure::input(lines.join("\n"))
    })
}

fn budget() -> Result<u128, Failure> {
    budget_from_env().map_err(Failure::input)
}

#[derive(Serialize)]
struct NamedValue<'a> {
    name: &'a str,
    value: String,
}

#[derive(Serialize)]
struct SolutionRecord<'a> {
    kind: &'static str,
    index: usize,
    values: Vec<NamedValue<'a>>,
}

#[derive(Serialize)]
struct ConfigRecord {
    mode: &'static str,
    gens: &'static str,
}

#[derive(Serialize)]
struct ConstraintsRecord {
    kind: &'static str,
    cells: Vec<String>,
    constraints: Vec<String>,
}

#[derive(Serialize)]
struct SummaryRecord {
    kind: &'static str,
    config: ConfigRecord,
    filter: &'static str,
    solutions: usize,
    constraints: usize,
    orbits: Option<usize>,
    sound: Option<bool>,
    complete: Option<bool>,
}

#[derive(Serialize)]
struct OrbitRecord<'a> {
    kind: &'static str,
    index: usize,
    size: usize,
    representative: Vec<NamedValue<'a>>,
}

#[derive(Serialize)]
struct OrbitSummaryRecord {
    kind: &'static str,
    solutions: usize,
    orbits: usize,
}

fn named_values<'a>(a: &Assignment, vars: &'a [(String, Shape)]) -> Vec<NamedValue<'a>> {
    vars.iter()
        .zip(&a.values)
        .map(|((name, shape), v)| NamedValue {
            name,
            value: format_value(v, shape),
        })
        .collect()
}

fn json_line(out: &mut dyn Write, record: &impl Serialize) -> Result<(), Failure> {
    let line = serde_json::to_string(record).map_err(|e| Failure {
        code: 3,
        message: e.to_string(),
    })?;
    writeln!(out, "{line}")?;
    Ok(())
}

fn filter_name(f: Filter) -> &'static str {
    match f {
        Filter::Syntactic => "syntactic",
        Filter::Semantic => "semantic",
    }
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let model = load_model(&a.model)?;
    let budget = budget()?;
    let config = BreakConfig::new(a.mode, a.gens);
    let opts = SolveOptions {
        config,
        filter: a.filter,
        threads: a.threads.max(1),
        budget,
    };
    let space = flatten(&model, budget)?;

    if a.emit_constraints {
        let constraints = compile_lex_leader(&space, config);
        if a.json {
            json_line(
                out,
                &ConstraintsRecord {
                    kind: "constraints",
                    cells: space
                        .cells
                        .iter()
                        .map(|c| format!("{} : {}", c.label, c.domain))
                        .collect(),
                    constraints: constraints.iter().map(|c| c.render(&space)).collect(),
                },
            )?;
        } else {
            out.write_all(dump_constraints(&space, config, &constraints).as_bytes())?;
        }
    }

    let result = solve_space(&model, &space, &opts)?;
    let report = if a.oracle {
        Some(orbit_oracle(&model, budget, opts.threads)?)
    } else {
        None
    };

    if !a.count {
        for (i, s) in result.solutions.iter().enumerate() {
            if a.json {
                json_line(
                    out,
                    &SolutionRecord {
                        kind: "solution",
                        index: i + 1,
                        values: named_values(s, &result.vars),
                    },
                )?;
            } else {
                writeln!(out, "solution {}", i + 1)?;
                for nv in named_values(s, &result.vars) {
                    writeln!(out, "  {} = {}", nv.name, nv.value)?;
                }
            }
        }
    }

    let sound = report.as_ref().map(|r| r.is_sound(&result.solutions));
    let complete = report.as_ref().map(|r| r.is_complete(&result.solutions));
    if a.json {
        json_line(
            out,
            &SummaryRecord {
                kind: "summary",
                config: ConfigRecord {
                    mode: config.mode.name(),
                    gens: config.gens.name(),
                },
                filter: filter_name(opts.filter),
                solutions: result.solutions.len(),
                constraints: result.constraints,
                orbits: report.as_ref().map(OrbitReport::count),
                sound,
                complete,
            },
        )?;
    } else {
        writeln!(out, "config: {config}")?;
        writeln!(out, "filter: {}", filter_name(opts.filter))?;
        writeln!(out, "constraints: {}", result.constraints)?;
        writeln!(out, "solutions: {}", result.solutions.len())?;
        if let Some(r) = &report {
            let yes_no = |b: Option<bool>| if b == Some(true) { "yes" } else { "no" };
            writeln!(out, "orbits: {}", r.count())?;
            writeln!(out, "sound: {}", yes_no(sound))?;
            writeln!(out, "complete: {}", yes_no(complete))?;
        }
    }
    if a.time {
        writeln!(err, "elapsed: {:.3} s", result.elapsed.as_secs_f64())?;
    }
    Ok(())
}

fn cmd_orbits(a: &OrbitsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let model = load_model(&a.model)?;
    let budget = budget()?;
    let report = orbit_oracle(&model, budget, a.threads.max(1))?;
    let space = flatten(&model, budget)?;
    let vars: Vec<(String, Shape)> = space
        .vars
        .iter()
        .map(|v| (v.name.clone(), v.shape.clone()))
        .collect();
    let mut sizes = vec![0usize; report.count()];
    for &o in &report.orbit_of {
        sizes[o] += 1;
    }
    if !a.count {
        for (i, rep) in report.representatives.iter().enumerate() {
            if a.json {
                json_line(
                    out,
                    &OrbitRecord {
                        kind: "orbit",
                        index: i + 1,
                        size: sizes[i],
                        representative: named_values(rep, &vars),
                    },
                )?;
            } else {
                writeln!(out, "orbit {} (size {})", i + 1, sizes[i])?;
                for nv in named_values(rep, &vars) {
                    writeln!(out, "  {} = {}", nv.name, nv.value)?;
                }
            }
        }
    }
    if a.json {
        json_line(
            out,
            &OrbitSummaryRecord {
                kind: "orbit_summary",
                solutions: report.solutions.len(),
                orbits: report.count(),
            },
        )?;
    } else {
        writeln!(out, "solutions: {}", report.solutions.len())?;
        writeln!(out, "orbits: {}", report.count())?;
    }
    Ok(())
}

fn cmd_transform(a: &TransformArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (ctx, declared) = match &a.model {
        Some(path) => {
            let m = load_model(path)?;
            let size = m.tag_size(&Tag::new(&a.tag));
            if size.is_none() {
                return Err(Failure::input(format!(
                    "{} declares no unnamed type `{}`",
                    path.display(),
                    a.tag
                )));
            }
            (m.literal_context(), size)
        }
        None => (LiteralContext::new(), None),
    };
    let (value, shape) =
        parse_value(&a.value, &ctx).map_err(|e| Failure::input(format!("value: {e}")))?;
    let tag = Tag::new(&a.tag);
    let size = match a.size.or(declared) {
        Some(n) => n,
        None => match max_index(&value, &tag) {
            0 => {
                return Err(Failure::input(format!(
                    "cannot infer the size of `{}`; pass --size or --model",
                    a.tag
                )))
            }
            n => n,
        },
    };
    let p = parse_cycles(&a.perm, &tag, size).map_err(|e| Failure::input(format!("permutation: {e}")))?;
    writeln!(out, "{}", format_value(&transform(&p, &value), &shape))?;
    Ok(())
}

/// Largest index of an atom of `tag` occurring in `v`.
fn max_index(v: &Value, tag: &Tag) -> u32 {
    match v {
        Value::Unnamed(a) if a.tag == *tag => a.index,
        Value::Tuple(items) | Value::MSet(items) => items.iter().map(|x| max_index(x, tag)).max().unwrap_or(0),
        Value::Matrix(m) => m
            .indices
            .iter()
            .flatten()
            .chain(&m.entries)
            .map(|x| max_index(x, tag))
            .max()
            .unwrap_or(0),
        _ => 0,
    }
}
