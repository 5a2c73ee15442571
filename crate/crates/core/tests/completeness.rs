mod common;

use std::collections::HashSet;

use common::{corpus, load, BUDGET};
use lexleader::engine::{enumerate_solutions, flatten, orbit_oracle, Filter, SolveOptions};
use lexleader::symbreak::BreakConfig;
use lexleader::values::Value;

fn solve(name: &str, cfg: BreakConfig, filter: Filter) -> Vec<Value> {
    let opts = SolveOptions {
        filter,
        ..SolveOptions::new(cfg)
    };
    enumerate_solutions(&load(name), &opts)
        .unwrap()
        .solutions
        .iter()
        .map(|a| a.tuple())
        .collect()
}

#[test]
fn complete_breaking_keeps_exactly_the_orbit_minima() {
    for name in corpus() {
        let model = load(&name);
        let report = orbit_oracle(&model, BUDGET, 2).unwrap();
        let found = enumerate_solutions(&model, &SolveOptions::new(BreakConfig::COMPLETE)).unwrap();
        assert_eq!(found.solutions.len(), report.count(), "{name}");
        assert!(report.is_complete(&found.solutions), "{name}");
    }
}

#[test]
fn known_orbit_counts() {
    let cases = [
        ("bool_pair", 3),
        ("bool_vector", 4),
        ("bool_square", 104),
        ("double_lex", 36),
        ("relation", 16),
        ("yang_baxter_2", 2),
        ("yang_baxter_3", 5),
        ("semigroups_2", 5),
        ("semigroups_3", 24),
    ];
    for (name, orbits) in cases {
        let report = orbit_oracle(&load(name), BUDGET, 1).unwrap();
        assert_eq!(report.count(), orbits, "{name}");
    }
}

#[test]
fn every_configuration_is_sound_and_nested() {
    for name in corpus() {
        let model = load(&name);
        let report = orbit_oracle(&model, BUDGET, 2).unwrap();
        let none: HashSet<Value> = solve(&name, BreakConfig::NONE, Filter::Syntactic).into_iter().collect();
        assert_eq!(none.len(), report.solutions.len(), "{name}");
        let complete: HashSet<Value> = solve(&name, BreakConfig::COMPLETE, Filter::Syntactic).into_iter().collect();
        for cfg in BreakConfig::all() {
            let found = enumerate_solutions(&model, &SolveOptions::new(cfg)).unwrap();
            assert!(report.is_sound(&found.solutions), "{name} under {cfg}");
            let set: HashSet<Value> = found.solutions.iter().map(|a| a.tuple()).collect();
            assert!(complete.is_subset(&set), "{name}: complete not within {cfg}");
            assert!(set.is_subset(&none), "{name}: {cfg} not within none");
        }
    }
}

#[test]
fn semantic_filter_gives_the_same_solutions() {
    for name in corpus() {
        for cfg in BreakConfig::all() {
            assert_eq!(
                solve(&name, cfg, Filter::Syntactic),
                solve(&name, cfg, Filter::Semantic),
                "{name} under {cfg}"
            );
        }
    }
}

#[test]
fn solutions_ascend_strictly() {
    for name in corpus() {
        let sols = solve(&name, BreakConfig::NONE, Filter::Syntactic);
        for w in sols.windows(2) {
            assert_eq!(lexleader::order::cmp(&w[0], &w[1]).unwrap(), std::cmp::Ordering::Less, "{name}");
        }
    }
}

#[test]
fn parallel_search_matches_serial() {
    for name in corpus() {
        let model = load(&name);
        let serial = enumerate_solutions(&model, &SolveOptions::new(BreakConfig::COMPLETE)).unwrap();
        let parallel = enumerate_solutions(
            &model,
            &SolveOptions {
                threads: 4,
                ..SolveOptions::new(BreakConfig::COMPLETE)
            },
        )
        .unwrap();
        assert_eq!(serial.solutions, parallel.solutions, "{name}");
    }
}

#[test]
fn decode_inverts_encode_on_small_models() {
    for name in corpus() {
        let space = flatten(&load(&name), BUDGET).unwrap();
        if space.search_size() > 20_000 {
            continue;
        }
        for codes in space.all_assignments() {
            let a = space.decode(&codes);
            assert_eq!(space.encode(&a).as_deref(), Some(&codes[..]), "{name}");
        }
    }
}
