//! Depth-first enumeration over flat cells.
//!
//! Cells are assigned in declaration order with codes ascending. Each check
//! runs at the deepest cell it reads: structural conditions and lex
//! constraints at their largest cell, model constraints once every decision
//! variable they mention is complete, and the semantic filter at the leaves.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::flatten::{flatten, FlatSpace, SlotRepr};
use super::{EngineError, BUDGET_ENV, DEFAULT_BUDGET};
use crate::action::transform_dp;
use crate::modellang::eval::eval_bool;
use crate::modellang::{CheckedModel, Env, Expr};
use crate::order::total_cmp;
use crate::perm::DirectProductElem;
use crate::symbreak::{compile_lex_leader, group_elements, AtomicTerm, BreakConfig, LexConstraint};
use crate::values::literal::Shape;
use crate::values::{Assignment, Value};

/// How the symmetry-breaking condition is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Filter {
    /// Compiled lex constraints over cells.
    #[default]
    Syntactic,
    /// `X <= transform(e, X)` on decoded values.
    Semantic,
}

impl std::str::FromStr for Filter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "syntactic" => Ok(Filter::Syntactic),
            "semantic" => Ok(Filter::Semantic),
            _ => Err(format!("unknown filter `{s}` (expected syntactic or semantic)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub config: BreakConfig,
    pub filter: Filter,
    /// 1 for a single-threaded search.
    pub threads: usize,
    pub budget: u128,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            config: BreakConfig::COMPLETE,
            filter: Filter::Syntactic,
            threads: 1,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl SolveOptions {
    pub fn new(config: BreakConfig) -> Self {
        SolveOptions {
            config,
            ..Self::default()
        }
    }
}

/// Budget from the environment, or the default when unset.
pub fn budget_from_env() -> Result<u128, String> {
    match std::env::var(BUDGET_ENV) {
        Ok(s) => s
            .trim()
            .replace('_', "")
            .parse()
            .map_err(|_| format!("{BUDGET_ENV}={s} is not a non-negative integer")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub config: BreakConfig,
    pub filter: Filter,
    /// Variable names and print shapes in declaration order.
    pub vars: Vec<(String, Shape)>,
    /// Ascending by the tuple of variable values.
    pub solutions: Vec<Assignment>,
    /// Lex constraints generated (after simplification).
    pub constraints: usize,
    pub elapsed: Duration,
}

pub fn enumerate_solutions(model: &CheckedModel, opts: &SolveOptions) -> Result<SolveResult, EngineError> {
    let space = flatten(model, opts.budget)?;
    solve_space(model, &space, opts)
}

pub fn solve_space(
    model: &CheckedModel,
    space: &FlatSpace,
    opts: &SolveOptions,
) -> Result<SolveResult, EngineError> {
    let start = Instant::now();
    let lex = compile_lex_leader(space, opts.config);
    let plan = Plan::new(model, space, opts, &lex);
    let mut found = plan.run(opts.threads)?;

    let names = space.names();
    let mut keyed: Vec<(Value, Vec<Value>)> = found
        .drain(..)
        .map(|codes| {
            let a = space.decode(&codes);
            (a.tuple(), a.values)
        })
        .collect();
    keyed.sort_by(|a, b| total_cmp(&a.0, &b.0));
    let solutions = keyed
        .into_iter()
        .map(|(_, values)| Assignment::new(names.clone(), values))
        .collect();

    Ok(SolveResult {
        config: opts.config,
        filter: opts.filter,
        vars: space.vars.iter().map(|v| (v.name.clone(), v.shape.clone())).collect(),
        solutions,
        constraints: lex.len(),
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone)]
enum Term {
    Code(usize),
    Mapped { cell: usize, map: Vec<u32> },
    Const(i64),
    NegCount(usize),
    NegIndicator { defined: Option<usize>, cells: Vec<(usize, u32)> },
}

impl Term {
    fn value(&self, codes: &[u32]) -> i64 {
        match self {
            Term::Code(c) => codes[*c] as i64,
            Term::Mapped { cell, map } => map[codes[*cell] as usize] as i64,
            Term::Const(n) => *n,
            Term::NegCount(c) => -(codes[*c] as i64),
            Term::NegIndicator { defined, cells } => {
                let present = defined.is_none_or(|d| codes[d] == 1)
                    && cells.iter().all(|(c, code)| codes[*c] == *code);
                -(present as i64)
            }
        }
    }

    fn cells(&self, out: &mut Vec<usize>) {
        match self {
            Term::Code(c) | Term::NegCount(c) | Term::Mapped { cell: c, .. } => out.push(*c),
            Term::Const(_) => {}
            Term::NegIndicator { defined, cells } => {
                out.extend(defined);
                out.extend(cells.iter().map(|(c, _)| *c));
            }
        }
    }
}

/// A lex constraint ready for evaluation on cell codes.
#[derive(Debug, Clone)]
pub struct CompiledLex {
    lhs: Vec<Term>,
    rhs: Vec<Term>,
    strict: bool,
    support_max: Option<usize>,
}

impl CompiledLex {
    pub fn compile(space: &FlatSpace, c: &LexConstraint) -> Self {
        let lhs: Vec<Term> = c.lhs.iter().map(|t| compile_term(space, t)).collect();
        let rhs: Vec<Term> = c.rhs.iter().map(|t| compile_term(space, t)).collect();
        let mut cells = Vec::new();
        lhs.iter().chain(&rhs).for_each(|t| t.cells(&mut cells));
        CompiledLex {
            lhs,
            rhs,
            strict: c.strict,
            support_max: cells.into_iter().max(),
        }
    }

    pub fn holds(&self, codes: &[u32]) -> bool {
        for (a, b) in self.lhs.iter().zip(&self.rhs) {
            let (x, y) = (a.value(codes), b.value(codes));
            if x != y {
                return x < y;
            }
        }
        !self.strict
    }

    /// Deepest cell read, if any.
    pub fn support_max(&self) -> Option<usize> {
        self.support_max
    }
}

fn compile_term(space: &FlatSpace, t: &AtomicTerm) -> Term {
    match t {
        AtomicTerm::Var(c) => Term::Code(*c),
        AtomicTerm::Const(n) => Term::Const(*n),
        AtomicTerm::Image { perm, cell } => Term::Mapped {
            cell: *cell,
            map: perm.images().iter().map(|i| i - 1).collect(),
        },
        AtomicTerm::NegFreq { slot, elem } => {
            let slot = &space.slots[*slot];
            match &slot.repr {
                SlotRepr::Occurrence { counts } => {
                    match slot.universe.binary_search_by(|u| total_cmp(u, elem)) {
                        Ok(k) => Term::NegCount(counts[k]),
                        Err(_) => Term::Const(0),
                    }
                }
                SlotRepr::Table {
                    args,
                    defined,
                    results,
                } => {
                    let Value::Tuple(kv) = elem else {
                        return Term::Const(0);
                    };
                    let Some(k) = args.iter().position(|a| *a == kv[0]) else {
                        return Term::Const(0);
                    };
                    match space.encode_layout(&results[k], &kv[1]) {
                        Some(cells) => Term::NegIndicator {
                            defined: defined.as_ref().map(|d| d[k]),
                            cells,
                        },
                        None => Term::Const(0),
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Check {
    Decode(usize),
    Structural(usize),
    Lex(usize),
    Model(usize),
    Semantic,
}

struct Plan<'a> {
    model: &'a CheckedModel,
    space: &'a FlatSpace,
    lex: Vec<CompiledLex>,
    elems: Vec<DirectProductElem>,
    /// Checks to run after assigning each cell.
    at: Vec<Vec<Check>>,
    /// Checks that read no cells.
    initial: Vec<Check>,
}

impl<'a> Plan<'a> {
    fn new(
        model: &'a CheckedModel,
        space: &'a FlatSpace,
        opts: &SolveOptions,
        lex: &[LexConstraint],
    ) -> Self {
        let n = space.cells.len();
        let mut at: Vec<Vec<Check>> = vec![Vec::new(); n];
        let mut initial = Vec::new();
        let mut place = |level: Option<usize>, check: Check| match level {
            Some(l) => at[l].push(check),
            None => initial.push(check),
        };
        let var_level = |v: usize| space.vars[v].cells.clone().last();

        for v in 0..space.vars.len() {
            place(var_level(v), Check::Decode(v));
        }
        for (i, s) in space.structural.iter().enumerate() {
            place(Some(s.support_max()), Check::Structural(i));
        }
        let (compiled, elems) = match opts.filter {
            Filter::Syntactic => (
                lex.iter().map(|c| CompiledLex::compile(space, c)).collect::<Vec<_>>(),
                Vec::new(),
            ),
            Filter::Semantic => (Vec::new(), group_elements(opts.config, &space.tags)),
        };
        for (i, c) in compiled.iter().enumerate() {
            place(c.support_max(), Check::Lex(i));
        }
        for (i, c) in model.model.constraints.iter().enumerate() {
            let level = support_vars(c, space)
                .into_iter()
                .filter_map(var_level)
                .max();
            place(level, Check::Model(i));
        }
        if !elems.is_empty() {
            place(n.checked_sub(1), Check::Semantic);
        }
        // decoding must precede model constraints at the same level
        let rank = |c: &Check| match c {
            Check::Decode(_) => 0,
            Check::Structural(_) => 1,
            Check::Lex(_) => 2,
            Check::Model(_) => 3,
            Check::Semantic => 4,
        };
        for checks in at.iter_mut() {
            checks.sort_by_key(rank);
        }
        initial.sort_by_key(rank);

        Plan {
            model,
            space,
            lex: compiled,
            elems,
            at,
            initial,
        }
    }

    fn run(&self, threads: usize) -> Result<Vec<Vec<u32>>, EngineError> {
        let n = self.space.cells.len();
        let mut env = self.model.env();
        let mut codes = vec![0u32; n];
        if !self.run_checks(&self.initial, &codes, &mut env)? {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        if n == 0 {
            out.push(codes);
            return Ok(out);
        }
        if threads <= 1 {
            self.dfs(0, &mut codes, &mut env, &mut out)?;
            return Ok(out);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        let parts: Vec<Result<Vec<Vec<u32>>, EngineError>> = pool.install(|| {
            (0..self.space.cells[0].size())
                .into_par_iter()
                .map(|code| {
                    let mut env = env.clone();
                    let mut codes = codes.clone();
                    let mut out = Vec::new();
                    codes[0] = code;
                    if self.run_checks(&self.at[0], &codes, &mut env)? {
                        self.dfs(1, &mut codes, &mut env, &mut out)?;
                    }
                    Ok(out)
                })
                .collect()
        });
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }

    fn dfs(
        &self,
        level: usize,
        codes: &mut Vec<u32>,
        env: &mut Env,
        out: &mut Vec<Vec<u32>>,
    ) -> Result<(), EngineError> {
        if level == codes.len() {
            out.push(codes.clone());
            return Ok(());
        }
        for code in 0..self.space.cells[level].size() {
            codes[level] = code;
            if self.run_checks(&self.at[level], codes, env)? {
                self.dfs(level + 1, codes, env, out)?;
            }
        }
        codes[level] = 0;
        Ok(())
    }

    fn run_checks(&self, checks: &[Check], codes: &[u32], env: &mut Env) -> Result<bool, EngineError> {
        for check in checks {
            let ok = match *check {
                Check::Decode(v) => {
                    env.set(&self.space.vars[v].name, self.space.decode_var(v, codes));
                    true
                }
                Check::Structural(i) => self.space.structural[i].holds(codes),
                Check::Lex(i) => self.lex[i].holds(codes),
                Check::Model(i) => {
                    let c = &self.model.model.constraints[i];
                    match eval_bool(c, env) {
                        Ok(b) => b,
                        Err(e) if e.is_undefinedness() => false,
                        Err(source) => return Err(EngineError::Eval { index: i + 1, source }),
                    }
                }
                Check::Semantic => {
                    let x = self.space.decode(codes).tuple();
                    self.elems
                        .iter()
                        .all(|e| total_cmp(&x, &transform_dp(e, &x)).is_le())
                }
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Decision variables a constraint mentions.
fn support_vars(c: &Expr, space: &FlatSpace) -> Vec<usize> {
    c.free_names()
        .iter()
        .filter_map(|n| space.vars.iter().position(|v| &v.name == n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modellang::{check_model, parse_model};
    use crate::perm::GeneratorFlag;
    use crate::symbreak::BreakMode;

    fn model(src: &str) -> CheckedModel {
        check_model(&parse_model(src).unwrap()).unwrap()
    }

    fn count(src: &str, cfg: BreakConfig) -> usize {
        enumerate_solutions(&model(src), &SolveOptions::new(cfg)).unwrap().solutions.len()
    }

    const BOOL3: &str = "letting T be new type of size 3\nfind X : matrix indexed by [T] of bool";

    #[test]
    fn bool_vector_counts() {
        assert_eq!(count(BOOL3, BreakConfig::COMPLETE), 4);
        assert_eq!(count(BOOL3, BreakConfig::NONE), 8);
    }

    #[test]
    fn solutions_are_sorted() {
        let r = enumerate_solutions(&model(BOOL3), &SolveOptions::new(BreakConfig::NONE)).unwrap();
        for w in r.solutions.windows(2) {
            assert!(total_cmp(&w[0].tuple(), &w[1].tuple()).is_lt());
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let m = model(
            "letting T be new type of size 3\nfind M : matrix indexed by [T, T] of bool\n\
             such that forAll i : T . M[i, i] = false",
        );
        let serial = enumerate_solutions(&m, &SolveOptions::new(BreakConfig::COMPLETE)).unwrap();
        let mut opts = SolveOptions::new(BreakConfig::COMPLETE);
        opts.threads = 4;
        let par = enumerate_solutions(&m, &opts).unwrap();
        assert_eq!(serial.solutions, par.solutions);
        assert_eq!(serial.solutions.len(), 16);
    }

    #[test]
    fn semantic_filter_agrees() {
        let m = model(
            "letting T be new type of size 3\nfind f : function T --> int(4..5)\nsuch that |f| >= 2",
        );
        for cfg in BreakConfig::all() {
            let a = enumerate_solutions(&m, &SolveOptions::new(cfg)).unwrap();
            let mut opts = SolveOptions::new(cfg);
            opts.filter = Filter::Semantic;
            let b = enumerate_solutions(&m, &opts).unwrap();
            assert_eq!(a.solutions, b.solutions, "{cfg}");
        }
    }

    #[test]
    fn partial_functions_respect_relational_semantics() {
        let m = model(
            "letting T be new type of size 2\nfind f : function T --> bool\n\
             such that forAll i : T . f(i) = true",
        );
        assert_eq!(
            enumerate_solutions(&m, &SolveOptions::new(BreakConfig::NONE)).unwrap().solutions.len(),
            1
        );
    }

    #[test]
    fn constant_constraints() {
        let src = "letting T be new type of size 2\nfind x : T\nsuch that 1 = 2";
        assert_eq!(count(src, BreakConfig::NONE), 0);
        let cfg = BreakConfig::new(BreakMode::Independently, GeneratorFlag::Consecutive);
        assert_eq!(count("letting T be new type of size 2\nfind x : T", cfg), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let mut opts = SolveOptions::new(BreakConfig::NONE);
        opts.budget = 4;
        assert!(matches!(
            enumerate_solutions(&model(BOOL3), &opts),
            Err(EngineError::Budget { needed: 8, budget: 4 })
        ));
    }
}
