//! The fixed total order on values.
//!
//! Atoms: integers by `<=`, `false` before `true`, enum atoms by declaration
//! position, unnamed atoms by index. Tuples and matrices compare
//! lexicographically (matrices row-major). Multisets compare by repeatedly
//! removing minima, with the empty multiset as the largest value; this is
//! the same as comparing negated occurrence vectors lexicographically.

use std::cmp::Ordering;

use thiserror::Error;

use crate::values::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("cannot compare {0} with {1}: values from different domains")]
    Incomparable(String, String),
    #[error("lex comparison of sequences of length {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("{0} is not in the occurrence universe")]
    OutsideUniverse(String),
    #[error("occurrence universe is not strictly ascending at position {0}")]
    UniverseNotAscending(usize),
    #[error("occurrence vectors need a multiset, found {0}")]
    NotMultiset(String),
}

/// Compare two values of the same domain.
pub fn cmp(a: &Value, b: &Value) -> Result<Ordering, OrderError> {
    if comparable(a, b) {
        Ok(total_cmp(a, b))
    } else {
        Err(OrderError::Incomparable(a.to_string(), b.to_string()))
    }
}

/// Structural compatibility: same kind, same tag, same shape.
fn comparable(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Bool(_), Value::Bool(_)) | (Value::Int(_), Value::Int(_)) => true,
        (Value::Enum(x), Value::Enum(y)) => x.ty == y.ty,
        (Value::Unnamed(x), Value::Unnamed(y)) => x.tag == y.tag,
        (Value::Tuple(xs), Value::Tuple(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| comparable(x, y))
        }
        (Value::Matrix(x), Value::Matrix(y)) => {
            x.indices == y.indices
                && x.entries.len() == y.entries.len()
                && x.entries.iter().zip(&y.entries).all(|(p, q)| comparable(p, q))
        }
        (Value::MSet(xs), Value::MSet(ys)) => {
            // every pair of elements across both multisets must be comparable
            let probe = xs.first().or(ys.first());
            match probe {
                None => true,
                Some(p) => xs.iter().chain(ys).all(|v| comparable(p, v)),
            }
        }
        _ => false,
    }
}

/// Total order on all values. Agrees with [`cmp`] on comparable values and
/// falls back to an arbitrary but fixed ranking of value kinds otherwise.
pub fn total_cmp(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => x.cmp(y),
        (Value::Int(x), Value::Int(y)) => x.cmp(y),
        (Value::Enum(x), Value::Enum(y)) => x.ty.cmp(&y.ty).then(x.pos.cmp(&y.pos)),
        (Value::Unnamed(x), Value::Unnamed(y)) => x.tag.cmp(&y.tag).then(x.index.cmp(&y.index)),
        (Value::Tuple(xs), Value::Tuple(ys)) => lex(xs, ys),
        (Value::Matrix(x), Value::Matrix(y)) => lex(&x.entries, &y.entries),
        (Value::MSet(xs), Value::MSet(ys)) => multiset_cmp(xs, ys),
        _ => kind_rank(a).cmp(&kind_rank(b)),
    }
}

fn kind_rank(v: &Value) -> u8 {
    match v {
        Value::Bool(_) => 0,
        Value::Int(_) => 1,
        Value::Enum(_) => 2,
        Value::Unnamed(_) => 3,
        Value::Tuple(_) => 4,
        Value::Matrix(_) => 5,
        Value::MSet(_) => 6,
    }
}

fn lex(xs: &[Value], ys: &[Value]) -> Ordering {
    for (x, y) in xs.iter().zip(ys) {
        match total_cmp(x, y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    xs.len().cmp(&ys.len())
}

/// `m1 <= m2` iff `m2` is empty, or both are nonempty and `min m1 < min m2`,
/// or the minima agree and the rests compare `<=`. Items are sorted, so the
/// minimum is the head.
fn multiset_cmp(xs: &[Value], ys: &[Value]) -> Ordering {
    let mut i = 0;
    loop {
        match (xs.get(i), ys.get(i)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Less,
            (None, Some(_)) => return Ordering::Greater,
            (Some(x), Some(y)) => match total_cmp(x, y) {
                Ordering::Equal => i += 1,
                other => return other,
            },
        }
    }
}

/// Negated multiplicities of a multiset over an ascending universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceVector {
    pub universe: Vec<Value>,
    pub entries: Vec<i64>,
}

pub fn occurrence_vector(m: &Value, universe: &[Value]) -> Result<OccurrenceVector, OrderError> {
    let Value::MSet(items) = m else {
        return Err(OrderError::NotMultiset(m.to_string()));
    };
    for (k, w) in universe.windows(2).enumerate() {
        if cmp(&w[0], &w[1])? != Ordering::Less {
            return Err(OrderError::UniverseNotAscending(k + 1));
        }
    }
    let mut entries = vec![0i64; universe.len()];
    for item in items {
        let k = universe
            .binary_search_by(|u| total_cmp(u, item))
            .map_err(|_| OrderError::OutsideUniverse(item.to_string()))?;
        entries[k] -= 1;
    }
    Ok(OccurrenceVector {
        universe: universe.to_vec(),
        entries,
    })
}

/// Lexicographic comparison of equal-length sequences under [`cmp`].
pub fn lex_cmp(xs: &[Value], ys: &[Value]) -> Result<Ordering, OrderError> {
    if xs.len() != ys.len() {
        return Err(OrderError::LengthMismatch(xs.len(), ys.len()));
    }
    for (x, y) in xs.iter().zip(ys) {
        match cmp(x, y)? {
            Ordering::Equal => continue,
            other => return Ok(other),
        }
    }
    Ok(Ordering::Equal)
}
