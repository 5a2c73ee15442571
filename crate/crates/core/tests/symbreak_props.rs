mod common;

use common::{corpus, corpus_small, load, load_text, BUDGET};
use lexleader::engine::{flatten, CompiledLex, FlatSpace};
use lexleader::perm::GeneratorFlag;
use lexleader::symbreak::{
    compile_lex_leader, group_elements, lex_leader_terms, simplify_lex, AtomicTerm, BreakConfig,
    BreakMode, LexConstraint,
};
use proptest::prelude::*;

#[test]
fn syntactic_and_semantic_filters_agree_on_every_assignment() {
    let models = corpus_small(3);
    assert!(models.len() >= 10, "{models:?}");
    for name in models {
        let (checked, bad) = common::filter_mismatches(&load(&name)).unwrap();
        assert!(checked > 0);
        assert!(bad.is_empty(), "{name}: {:?}", &bad[..bad.len().min(5)]);
    }
}

#[test]
fn simplification_preserves_every_assignment() {
    for name in corpus_small(3) {
        let model = load(&name);
        let space = flatten(&model, BUDGET).unwrap();
        for cfg in [BreakConfig::COMPLETE, BreakConfig::new(BreakMode::Independently, GeneratorFlag::AllPairs)] {
            for e in group_elements(cfg, &space.tags) {
                let raw = lex_leader_terms(&space, &e);
                let simple = simplify_lex(&raw);
                assert!(simple.lhs.len() <= raw.lhs.len());
                let (a, b) = (CompiledLex::compile(&space, &raw), CompiledLex::compile(&space, &simple));
                for codes in space.all_assignments() {
                    assert_eq!(a.holds(&codes), b.holds(&codes), "{name}: {e}");
                }
            }
        }
    }
}

#[test]
fn constraint_counts() {
    // (model, independently/consecutive, altogether/allpermutations)
    let cases = [
        ("double_lex", 4, 35),
        ("golfers", 1 + 1 + 3, 2 * 2 * 24 - 1),
        ("bool_vector", 2, 5),
        ("yang_baxter_3", 2, 5),
    ];
    for (name, consecutive, complete) in cases {
        let space = flatten(&load(name), BUDGET).unwrap();
        let ic = BreakConfig::new(BreakMode::Independently, GeneratorFlag::Consecutive);
        assert_eq!(compile_lex_leader(&space, ic).len(), consecutive, "{name}");
        assert_eq!(compile_lex_leader(&space, BreakConfig::COMPLETE).len(), complete, "{name}");
        assert!(compile_lex_leader(&space, BreakConfig::NONE).is_empty());
    }
}

#[test]
fn every_configuration_compiles_on_the_whole_corpus() {
    for name in corpus() {
        let space = flatten(&load(&name), BUDGET).unwrap();
        for cfg in BreakConfig::all() {
            for c in compile_lex_leader(&space, cfg) {
                assert_eq!(c.lhs.len(), c.rhs.len());
                assert!(!c.is_trivial());
            }
        }
    }
}

fn small_space() -> FlatSpace {
    let model = load_text("letting T be new type of size 6\nfind X : matrix indexed by [T] of int(0..2)");
    flatten(&model, BUDGET).unwrap()
}

fn arb_term() -> impl Strategy<Value = AtomicTerm> {
    prop_oneof![4 => (0usize..6).prop_map(AtomicTerm::Var), 1 => (0i64..3).prop_map(AtomicTerm::Const)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn simplify_lex_keeps_truth(
        pairs in prop::collection::vec((arb_term(), arb_term()), 0..8),
        strict in any::<bool>(),
        codes in prop::collection::vec(0u32..3, 6),
    ) {
        let space = small_space();
        let (lhs, rhs) = pairs.into_iter().unzip();
        let c = LexConstraint { lhs, rhs, strict };
        let s = simplify_lex(&c);
        prop_assert_eq!(
            CompiledLex::compile(&space, &c).holds(&codes),
            CompiledLex::compile(&space, &s).holds(&codes)
        );
        prop_assert_eq!(simplify_lex(&s), s);
    }
}
