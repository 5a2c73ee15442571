mod common;

use common::{check_occurrence_order, check_order_laws, mset_domains, order_domains};

#[test]
fn order_laws_hold_exhaustively() {
    for (name, d) in order_domains() {
        let n = check_order_laws(&d).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(n > 1, "{name}");
    }
}

#[test]
fn multiset_order_is_occurrence_lex() {
    for (d, elem) in mset_domains() {
        check_occurrence_order(&d, &elem).unwrap_or_else(|e| panic!("{d}: {e}"));
    }
}
