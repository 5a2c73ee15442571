#![allow(dead_code)]

use std::path::PathBuf;

use lexleader::engine::DEFAULT_BUDGET;
use lexleader::modellang::{check_model, parse_model, CheckedModel};
use lexleader::values::{Domain, Value};
use proptest::prelude::*;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(format!("{name}.um"))).unwrap()
}

pub fn load_text(text: &str) -> CheckedModel {
    let m = parse_model(text).unwrap_or_else(|e| panic!("{e}"));
    check_model(&m).unwrap_or_else(|d| panic!("{d:?}"))
}

pub fn load(name: &str) -> CheckedModel {
    load_text(&corpus_text(name))
}

/// Every corpus model, by file stem, sorted.
pub fn corpus() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "um").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

/// Corpus models whose unnamed types all have size at most `n`.
pub fn corpus_small(n: u32) -> Vec<String> {
    corpus()
        .into_iter()
        .filter(|m| load(m).tags.iter().all(|(_, s)| *s <= n))
        .collect()
}

pub const BUDGET: u128 = DEFAULT_BUDGET;

pub fn colour() -> Domain {
    Domain::enumerated("Colour", &["red", "green"])
}

/// Atomic domains over `T` (size `nt`) and `U` (size `nu`).
pub fn atomic_domain(nt: u32, nu: u32) -> impl Strategy<Value = Domain> + Clone {
    prop_oneof![
        Just(Domain::Bool),
        Just(Domain::int(0, 2)),
        Just(colour()),
        Just(Domain::unnamed("T", nt)),
        Just(Domain::unnamed("U", nu)),
    ]
}

/// Nested domains, kept small enough that random values stay cheap.
pub fn nested_domain(nt: u32, nu: u32) -> impl Strategy<Value = Domain> {
    let leaf = atomic_domain(nt, nu);
    leaf.prop_recursive(3, 12, 3, move |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Domain::Tuple),
            (prop::collection::vec(atomic_domain(nt, nu), 1..=2), inner.clone())
                .prop_map(|(idx, e)| Domain::matrix(idx, e)),
            (inner.clone(), 1u32..=2).prop_map(|(e, k)| Domain::mset(e, Some(k))),
            inner.clone().prop_map(Domain::set),
            (atomic_domain(nt, nu), inner.clone(), any::<bool>()).prop_map(|(a, b, t)| Domain::function(a, b, t)),
            prop::collection::vec(atomic_domain(nt, nu), 2..=2).prop_map(Domain::Relation),
        ]
    })
}

/// A random member of `d`.
pub fn value_of(d: &Domain) -> BoxedStrategy<Value> {
    match d {
        Domain::Bool | Domain::Int { .. } | Domain::Enum { .. } | Domain::Unnamed { .. } => {
            prop::sample::select(d.atoms().unwrap()).boxed()
        }
        Domain::Tuple(items) => items
            .iter()
            .map(value_of)
            .collect::<Vec<_>>()
            .prop_map(Value::Tuple)
            .boxed(),
        Domain::Matrix { indices, elem } => {
            let idx: Vec<Vec<Value>> = indices.iter().map(|i| i.atoms().unwrap()).collect();
            let n: usize = idx.iter().map(Vec::len).product();
            prop::collection::vec(value_of(elem), n)
                .prop_map(move |entries| {
                    Value::Matrix(lexleader::values::Matrix {
                        indices: idx.clone(),
                        entries,
                    })
                })
                .boxed()
        }
        Domain::MSet { elem, max_occur, .. } => {
            let bound = max_occur.unwrap_or(2) as usize;
            prop::collection::vec(value_of(elem), 0..=3)
                .prop_map(move |items| cap(items, bound))
                .boxed()
        }
        Domain::Set(elem) => prop::collection::vec(value_of(elem), 0..=3)
            .prop_map(Value::set)
            .boxed(),
        Domain::Relation(parts) => {
            let tuple = Domain::Tuple(parts.clone());
            prop::collection::vec(value_of(&tuple), 0..=3)
                .prop_map(Value::set)
                .boxed()
        }
        Domain::Function { from, to, total } => {
            let args = from.atoms().unwrap();
            let n = args.len();
            let total = *total;
            (
                prop::collection::vec(value_of(to), n),
                prop::collection::vec(any::<bool>(), n),
            )
                .prop_map(move |(results, keep)| {
                    Value::set(
                        args.iter()
                            .zip(results)
                            .zip(keep)
                            .filter(|(_, k)| total || *k)
                            .map(|((a, r), _)| Value::Tuple(vec![a.clone(), r]))
                            .collect(),
                    )
                })
                .boxed()
        }
        Domain::Unsupported(_) => unreachable!("generated domains are supported"),
    }
}

/// Multiset of `items` with each multiplicity capped at `bound`.
fn cap(items: Vec<Value>, bound: usize) -> Value {
    let Value::MSet(sorted) = Value::mset(items) else {
        unreachable!()
    };
    let mut out: Vec<Value> = Vec::new();
    let mut run = 0;
    for v in sorted {
        run = if out.last() == Some(&v) { run + 1 } else { 1 };
        if run <= bound {
            out.push(v);
        }
    }
    Value::MSet(out)
}

/// Domain together with a member of it.
pub fn domain_and_value(max_t: u32) -> impl Strategy<Value = (u32, u32, Domain, Value)> {
    (1..=max_t, 1u32..=3)
        .prop_flat_map(|(nt, nu)| (Just(nt), Just(nu), nested_domain(nt, nu)))
        .prop_flat_map(|(nt, nu, d)| {
            let v = value_of(&d);
            (Just(nt), Just(nu), Just(d), v)
        })
}

/// Emitted lex constraints of `space` under `cfg`, checked to be exactly the
/// adjacent row swaps and adjacent column swaps of its single 2-d matrix.
pub fn check_double_lex(
    space: &lexleader::engine::FlatSpace,
    cfg: lexleader::symbreak::BreakConfig,
) -> Result<usize, String> {
    use lexleader::symbreak::{compile_lex_leader, AtomicTerm};

    let var = space.vars.first().ok_or("no variables")?;
    let Value::Matrix(shape) = space.decode_var(0, &vec![0; space.cells.len()]) else {
        return Err(format!("{} is not a matrix", var.name));
    };
    let (rows, cols) = match shape.indices.as_slice() {
        [r, c] => (r.len(), c.len()),
        _ => return Err("matrix is not two-dimensional".into()),
    };
    let pos = |cell: usize| (cell / cols, cell % cols);
    let mut expected: Vec<(bool, usize)> = (0..rows - 1)
        .map(|i| (true, i))
        .chain((0..cols - 1).map(|j| (false, j)))
        .collect();
    let constraints = compile_lex_leader(space, cfg);
    for c in &constraints {
        let cells = |ts: &[AtomicTerm]| -> Result<Vec<usize>, String> {
            ts.iter()
                .map(|t| match t {
                    AtomicTerm::Var(i) => Ok(*i),
                    other => Err(format!("non-variable term {other:?}")),
                })
                .collect()
        };
        let (lhs, rhs) = (cells(&c.lhs)?, cells(&c.rhs)?);
        if c.strict {
            return Err("strict constraint".into());
        }
        let found = expected.iter().position(|&(is_row, k)| {
            let swap = |(r, col): (usize, usize)| {
                if is_row {
                    (if r == k { k + 1 } else if r == k + 1 { k } else { r }, col)
                } else {
                    (r, if col == k { k + 1 } else if col == k + 1 { k } else { col })
                }
            };
            let moved: Vec<usize> = (0..rows * cols).filter(|&x| swap(pos(x)) != pos(x)).collect();
            lhs == moved && lhs.iter().zip(&rhs).all(|(&l, &r)| pos(r) == swap(pos(l)))
        });
        match found {
            Some(i) => {
                expected.remove(i);
            }
            None => return Err(format!("not an adjacent swap: {}", c.render(space))),
        }
    }
    if !expected.is_empty() {
        return Err(format!("missing swaps {expected:?}"));
    }
    Ok(constraints.len())
}

pub fn unnamed(n: u32) -> Domain {
    Domain::unnamed("T", n)
}

/// Small domains, each with at most 200 values, several of them multisets.
pub fn order_domains() -> Vec<(&'static str, Domain)> {
    let t = unnamed;
    vec![
        ("mset (maxOccur 2) of T3", Domain::mset(t(3), Some(2))),
        ("mset (maxOccur 3) of bool", Domain::mset(Domain::Bool, Some(3))),
        ("set of T4", Domain::set(t(4))),
        ("matrix [T2] of int(0..2)", Domain::matrix(vec![t(2)], Domain::int(0, 2))),
        ("tuple(T3, set of T2, colour)", Domain::Tuple(vec![t(3), Domain::set(t(2)), colour()])),
        ("function T2 --> int(4..5)", Domain::function(t(2), Domain::int(4, 5), false)),
        ("relation (T2 * bool)", Domain::Relation(vec![t(2), Domain::Bool])),
        ("set of set of T2", Domain::set(Domain::set(t(2)))),
        ("mset (maxOccur 2) of tuple(bool, T2)", Domain::mset(Domain::Tuple(vec![Domain::Bool, t(2)]), Some(2))),
        ("set of T7", Domain::set(t(7))),
        ("mset (maxOccur 4) of T3", Domain::mset(t(3), Some(4))),
        ("function T3 --> int(0..2)", Domain::function(t(3), Domain::int(0, 2), false)),
        ("matrix [T2, T3] of bool", Domain::matrix(vec![t(2), unnamed_u(3)], Domain::Bool)),
    ]
}

/// Exhaustive totality, antisymmetry and transitivity of `cmp` on `d`, and
/// agreement with enumeration order. Returns the number of values.
pub fn check_order_laws(d: &Domain) -> Result<usize, String> {
    use lexleader::order::cmp;
    use std::cmp::Ordering;

    let values = lexleader::values::enumerate_values(d).map_err(|e| e.to_string())?;
    if values.len() > 200 {
        return Err(format!("{} values", values.len()));
    }
    let n = values.len();
    let mut table = vec![Ordering::Equal; n * n];
    for (i, a) in values.iter().enumerate() {
        for (j, b) in values.iter().enumerate() {
            let o = cmp(a, b).map_err(|e| format!("{a} vs {b}: {e}"))?;
            if o != i.cmp(&j) {
                return Err(format!("enumeration order disagrees on {a} vs {b}"));
            }
            table[i * n + j] = o;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let o = table[i * n + j];
            if o != table[j * n + i].reverse() {
                return Err(format!("antisymmetry: {} vs {}", values[i], values[j]));
            }
            if (o == Ordering::Equal) != (i == j) {
                return Err(format!("totality: {} vs {}", values[i], values[j]));
            }
            if o == Ordering::Greater {
                continue;
            }
            for k in 0..n {
                if table[j * n + k] != Ordering::Greater && table[i * n + k] == Ordering::Greater {
                    return Err(format!("transitivity: {} {} {}", values[i], values[j], values[k]));
                }
            }
        }
    }
    Ok(n)
}

/// Multiset domains with their element domains.
pub fn mset_domains() -> Vec<(Domain, Domain)> {
    let t = unnamed;
    vec![
        (Domain::mset(t(3), Some(2)), t(3)),
        (Domain::mset(Domain::Bool, Some(3)), Domain::Bool),
        (Domain::set(t(4)), t(4)),
        (Domain::mset(Domain::int(0, 3), Some(1)), Domain::int(0, 3)),
        (Domain::mset(t(3), Some(4)), t(3)),
        (Domain::set(t(7)), t(7)),
        (Domain::mset(Domain::Tuple(vec![Domain::Bool, t(2)]), Some(2)), Domain::Tuple(vec![Domain::Bool, t(2)])),
    ]
}

/// Multiset order equals lex order of occurrence vectors on every pair.
/// Returns the number of pairs compared.
pub fn check_occurrence_order(d: &Domain, elem: &Domain) -> Result<usize, String> {
    use lexleader::order::{cmp, lex_cmp, occurrence_vector};
    use lexleader::values::enumerate_values;

    let universe = enumerate_values(elem).map_err(|e| e.to_string())?;
    let values = enumerate_values(d).map_err(|e| e.to_string())?;
    let vectors = values
        .iter()
        .map(|m| {
            occurrence_vector(m, &universe)
                .map(|o| o.entries.into_iter().map(Value::Int).collect::<Vec<_>>())
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (a, va) in values.iter().zip(&vectors) {
        for (b, vb) in values.iter().zip(&vectors) {
            if cmp(a, b).map_err(|e| e.to_string())? != lex_cmp(va, vb).map_err(|e| e.to_string())? {
                return Err(format!("{a} vs {b}"));
            }
        }
    }
    Ok(values.len() * values.len())
}

/// Assignments (over all configurations) on which the compiled lex
/// constraints and the semantic lex-leader predicate disagree.
pub fn filter_mismatches(model: &CheckedModel) -> Result<(u64, Vec<String>), String> {
    use lexleader::engine::{flatten, CompiledLex};
    use lexleader::symbreak::{compile_lex_leader, semantic_lex_leader, BreakConfig};

    let space = flatten(model, BUDGET).map_err(|e| e.to_string())?;
    let mut checked = 0;
    let mut bad = Vec::new();
    for cfg in BreakConfig::all() {
        let checks: Vec<CompiledLex> = compile_lex_leader(&space, cfg)
            .iter()
            .map(|c| CompiledLex::compile(&space, c))
            .collect();
        for codes in space.all_assignments() {
            let syntactic = checks.iter().all(|c| c.holds(&codes));
            let x = space.decode(&codes).tuple();
            if syntactic != semantic_lex_leader(cfg, &space.tags, &x) {
                bad.push(format!("{cfg}: {x}"));
            }
            checked += 1;
        }
    }
    Ok((checked, bad))
}

pub fn unnamed_u(n: u32) -> Domain {
    Domain::unnamed("U", n)
}
