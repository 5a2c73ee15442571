//! Induced action of unnamed-type permutations on values.
//!
//! Atoms of the permuted type map through the permutation, other atoms are
//! fixed, tuples and multisets map elementwise, and a matrix entry at index
//! `i` of the image is the image of the entry at the preimage of `i`.

use crate::perm::{DirectProductElem, Permutation};
use crate::values::{Matrix, Tag, Value};

pub fn transform(p: &Permutation, v: &Value) -> Value {
    apply(v, &|tag: &Tag| (tag == p.tag()).then_some(p))
}

/// Apply every component of `e`. Components act on disjoint atom sets, so
/// one pass applying each atom's own component equals applying them in turn.
pub fn transform_dp(e: &DirectProductElem, v: &Value) -> Value {
    if e.is_identity() {
        return v.clone();
    }
    apply(v, &|tag: &Tag| e.get(tag))
}

fn apply<'a>(v: &Value, perm_for: &impl Fn(&Tag) -> Option<&'a Permutation>) -> Value {
    match v {
        Value::Unnamed(a) => match perm_for(&a.tag) {
            Some(p) => Value::unnamed(a.tag.clone(), p.image(a.index)),
            None => v.clone(),
        },
        Value::Bool(_) | Value::Int(_) | Value::Enum(_) => v.clone(),
        Value::Tuple(items) => Value::Tuple(items.iter().map(|x| apply(x, perm_for)).collect()),
        Value::MSet(items) => Value::mset(items.iter().map(|x| apply(x, perm_for)).collect()),
        Value::Matrix(m) => {
            let sources = source_positions(&m.indices, perm_for);
            let entries = row_major_sources(&m.indices, &sources)
                .into_iter()
                .map(|src| apply(&m.entries[src], perm_for))
                .collect();
            Value::Matrix(Matrix {
                indices: m.indices.clone(),
                entries,
            })
        }
    }
}

/// For each dimension, the position whose entry moves to position `k`.
pub(crate) fn source_positions<'a>(
    indices: &[Vec<Value>],
    perm_for: &impl Fn(&Tag) -> Option<&'a Permutation>,
) -> Vec<Vec<usize>> {
    indices
        .iter()
        .map(|list| {
            list.iter()
                .enumerate()
                .map(|(k, atom)| match atom {
                    Value::Unnamed(a) => match perm_for(&a.tag) {
                        Some(p) => {
                            let pre = p.preimage(a.index);
                            list.iter()
                                .position(|x| matches!(x, Value::Unnamed(b) if b.index == pre))
                                .expect("index list covers the whole type")
                        }
                        None => k,
                    },
                    _ => k,
                })
                .collect()
        })
        .collect()
}

/// Row-major list of source offsets given per-dimension source positions.
pub(crate) fn row_major_sources(indices: &[Vec<Value>], sources: &[Vec<usize>]) -> Vec<usize> {
    let mut out = vec![0usize];
    for (list, src) in indices.iter().zip(sources) {
        let n = list.len();
        let mut next = Vec::with_capacity(out.len() * n);
        for base in &out {
            for &s in src {
                next.push(base * n + s);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_cycles;
    use crate::values::literal::{format_value, parse_value, LiteralContext, Shape};
    use crate::values::Domain;

    fn lit(s: &str) -> (Value, Shape) {
        parse_value(s, &LiteralContext::new()).unwrap()
    }

    fn perm(text: &str, tag: &str, size: u32) -> Permutation {
        parse_cycles(text, &Tag::new(tag), size).unwrap()
    }

    #[test]
    fn function_image_swaps_arguments() {
        let (f, shape) = lit("function{1_T-->4, 2_T-->5, 3_T-->4}");
        let img = transform(&perm("(1 2)", "T", 3), &f);
        assert_eq!(format_value(&img, &shape), "function{1_T-->5, 2_T-->4, 3_T-->4}");
        let (expected, _) = lit("function{2_T-->4, 1_T-->5, 3_T-->4}");
        assert_eq!(img, expected);
    }

    #[test]
    fn matrix_entries_come_from_preimages() {
        let t3 = Domain::unnamed("T", 3);
        let abc = Value::vector(&t3, vec![Value::Int(1), Value::Int(2), Value::Int(3)]);
        let img = transform(&perm("(1 2 3)", "T", 3), &abc);
        let cab = Value::vector(&t3, vec![Value::Int(3), Value::Int(1), Value::Int(2)]);
        assert_eq!(img, cab);
    }

    #[test]
    fn identity_fixes_everything() {
        let (v, _) = lit("(function{1_T-->4}, [2_T, 1_T; index:T], mset{1_T, 1_T})");
        assert_eq!(transform(&Permutation::identity(Tag::new("T"), 2), &v), v);
        assert_eq!(transform_dp(&DirectProductElem::new(), &v), v);
    }

    #[test]
    fn direct_product_example() {
        let (m, _) = lit("[[1_U, 2_U, 3_U], [2_U, 3_U, 4_U]; index:T, int(1..3)]");
        let g = perm("(1 2)", "T", 2);
        let h = perm("(1 3)(2 4)", "U", 4);
        let mut e = DirectProductElem::single(g.clone());
        e.insert(h.clone());
        let (expected, _) = lit("[[4_U, 1_U, 2_U], [3_U, 4_U, 1_U]; index:T, int(1..3)]");
        assert_eq!(transform_dp(&e, &m), expected);
        assert_eq!(transform(&h, &transform(&g, &m)), expected);
        assert_eq!(transform(&g, &transform(&h, &m)), expected);
    }

    #[test]
    fn composition_counterexample_guard() {
        let t3 = Domain::unnamed("T", 3);
        let (a, b, c) = (Value::Int(1), Value::Int(2), Value::Int(3));
        let m = Value::vector(&t3, vec![a.clone(), b.clone(), c.clone()]);
        let g = perm("(1 2 3)", "T", 3);
        let h = perm("(1 2)", "T", 3);
        let twice = transform(&h, &transform(&g, &m));
        assert_eq!(twice, Value::vector(&t3, vec![a.clone(), c.clone(), b.clone()]));
        assert_ne!(twice, Value::vector(&t3, vec![c, b, a]));
        assert_eq!(transform(&g.compose(&h).unwrap(), &m), twice);
    }

    #[test]
    fn other_tags_are_fixed() {
        let (v, _) = lit("(1_U, [1_U, 2_U; index:U])");
        assert_eq!(transform(&perm("(1 2)", "T", 2), &v), v);
    }
}
