mod common;

use common::{corpus, corpus_text, load, load_text, BUDGET};
use lexleader::action::transform_dp;
use lexleader::engine::{enumerate_solutions, flatten, SolveOptions};
use lexleader::modellang::{eval_bool, parse_model, CheckedModel, Env, EvalError};
use lexleader::perm::{generator_set, DirectProductElem, GeneratorFlag};
use lexleader::symbreak::BreakConfig;
use lexleader::values::{Assignment, Value};

#[test]
fn printing_then_parsing_gives_the_same_model() {
    for name in corpus() {
        let m = parse_model(&corpus_text(&name)).unwrap();
        let printed = m.to_string();
        let back = parse_model(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(back, m, "{name}");
        assert_eq!(back.to_string(), printed, "{name}");
    }
}

fn truth(model: &CheckedModel, a: &Assignment) -> Vec<Result<bool, String>> {
    let mut env: Env = model.env();
    for (name, v) in a.names.iter().zip(&a.values) {
        env.set(name, v.clone());
    }
    model
        .model
        .constraints
        .iter()
        .map(|c| match eval_bool(c, &mut env) {
            Err(e) if e.is_undefinedness() => Ok(false),
            other => other.map_err(|e: EvalError| e.to_string()),
        })
        .collect()
}

#[test]
fn relabelling_never_changes_a_constraint() {
    for name in corpus() {
        let model = load(&name);
        let space = flatten(&model, BUDGET).unwrap();
        let gens: Vec<DirectProductElem> = model
            .tags
            .iter()
            .flat_map(|(t, n)| generator_set(GeneratorFlag::AllPairs, t, *n))
            .map(DirectProductElem::single)
            .collect();
        // every assignment of small spaces, a regular sample of larger ones
        let step = (space.search_size() / 5000).max(1) as usize;
        for codes in space.all_assignments().step_by(step) {
            let a = space.decode(&codes);
            let before = truth(&model, &a);
            for g in &gens {
                let Value::Tuple(values) = transform_dp(g, &a.tuple()) else {
                    unreachable!()
                };
                let b = Assignment::new(a.names.clone(), values);
                assert_eq!(truth(&model, &b), before, "{name}: {g} on {}", a.tuple());
            }
        }
    }
}

#[test]
fn evaluation_is_deterministic() {
    for name in ["golfers", "template_design", "vellino"] {
        let model = load(name);
        let space = flatten(&model, BUDGET).unwrap();
        for codes in space.all_assignments().step_by(97).take(200) {
            let a = space.decode(&codes);
            assert_eq!(truth(&model, &a), truth(&model, &a));
        }
    }
}

fn counts(text: &str) -> (usize, usize) {
    let r = enumerate_solutions(&load_text(text), &SolveOptions::new(BreakConfig::COMPLETE)).unwrap();
    (r.solutions.len(), r.constraints)
}

#[test]
fn renaming_types_and_variables_changes_nothing() {
    let cases: [(&str, &[(&str, &str)]); 4] = [
        ("yang_baxter_3", &[("X", "Elem"), ("M", "phi")]),
        ("semigroups_3", &[("T", "Carrier"), ("f", "times")]),
        ("golfers", &[("Golfers", "People"), ("sched", "plan")]),
        ("set_mset", &[("T", "Item"), ("s", "chosen")]),
    ];
    for (name, renames) in cases {
        let original = corpus_text(name);
        let mut renamed = original.clone();
        for (from, to) in renames {
            renamed = rename(&renamed, from, to);
        }
        assert_ne!(renamed, original);
        assert_eq!(counts(&renamed), counts(&original), "{name}");
    }
}

/// Replace whole-word occurrences of `from`.
fn rename(text: &str, from: &str, to: &str) -> String {
    let is_word = |c: char| c.is_alphanumeric() || c == '_';
    let mut out = String::new();
    let mut rest = text;
    while let Some(i) = rest.find(from) {
        let before = rest[..i].chars().next_back();
        let after = rest[i + from.len()..].chars().next();
        out.push_str(&rest[..i]);
        if !before.is_some_and(is_word) && !after.is_some_and(is_word) {
            out.push_str(to);
        } else {
            out.push_str(from);
        }
        rest = &rest[i + from.len()..];
    }
    out.push_str(rest);
    out
}
