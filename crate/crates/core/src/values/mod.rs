//! Values and domains.
//!
//! Every supported domain lowers to a core form built only from atoms,
//! tuples, matrices and bounded multisets. Sets, functions and relations
//! are multisets of multiplicity one; functions additionally carry the
//! side-condition that no two pairs share a first component.

pub mod literal;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::order;

/// Default cap on the number of values [`enumerate_values`] will produce.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 10_000_000;

/// Name of an unnamed type or an enumerated type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag(Arc<str>);

impl Tag {
    pub fn new(name: &str) -> Self {
        Tag(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Tag {
    fn from(s: &str) -> Self {
        Tag::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("{0} domains are out of scope")]
    OutOfScope(UnsupportedKind),
    #[error("integer domain int({lo}..{hi}) is empty")]
    EmptyIntRange { lo: i64, hi: i64 },
    #[error("unnamed type {0} must have positive size")]
    EmptyUnnamed(Tag),
    #[error("matrix index domain must be atomic, found {0}")]
    NonAtomicIndex(String),
    #[error("multiset of {0} has no occurrence bound, so its values cannot be enumerated")]
    Unbounded(String),
    #[error("domain {domain} has more than {limit} values")]
    TooLarge { domain: String, limit: u128 },
}

/// Domain kinds recognised by name but not supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnsupportedKind {
    Partition,
    Sequence,
    Record,
    Variant,
}

impl fmt::Display for UnsupportedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnsupportedKind::Partition => "partition",
            UnsupportedKind::Sequence => "sequence",
            UnsupportedKind::Record => "record",
            UnsupportedKind::Variant => "variant",
        })
    }
}

/// Extra condition attached to a lowered multiset of pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SideCondition {
    None,
    /// No two elements share a first component.
    Functional,
    /// Functional, and every value of the first component occurs.
    TotalFunctional,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    Bool,
    Int {
        lo: i64,
        hi: i64,
    },
    Enum {
        name: Tag,
        atoms: Arc<[Arc<str>]>,
    },
    Unnamed {
        tag: Tag,
        size: u32,
    },
    Tuple(Vec<Domain>),
    Matrix {
        indices: Vec<Domain>,
        elem: Box<Domain>,
    },
    /// Multiset with an optional bound on the multiplicity of each element.
    MSet {
        elem: Box<Domain>,
        max_occur: Option<u32>,
        side: SideCondition,
    },
    Set(Box<Domain>),
    Function {
        from: Box<Domain>,
        to: Box<Domain>,
        total: bool,
    },
    Relation(Vec<Domain>),
    Unsupported(UnsupportedKind),
}

impl Domain {
    pub fn int(lo: i64, hi: i64) -> Self {
        Domain::Int { lo, hi }
    }

    pub fn unnamed(tag: &str, size: u32) -> Self {
        Domain::Unnamed {
            tag: Tag::new(tag),
            size,
        }
    }

    pub fn enumerated(name: &str, atoms: &[&str]) -> Self {
        Domain::Enum {
            name: Tag::new(name),
            atoms: atoms.iter().map(|a| Arc::from(*a)).collect(),
        }
    }

    pub fn matrix(indices: Vec<Domain>, elem: Domain) -> Self {
        Domain::Matrix {
            indices,
            elem: Box::new(elem),
        }
    }

    pub fn mset(elem: Domain, max_occur: Option<u32>) -> Self {
        Domain::MSet {
            elem: Box::new(elem),
            max_occur,
            side: SideCondition::None,
        }
    }

    pub fn set(elem: Domain) -> Self {
        Domain::Set(Box::new(elem))
    }

    pub fn function(from: Domain, to: Domain, total: bool) -> Self {
        Domain::Function {
            from: Box::new(from),
            to: Box::new(to),
            total,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Domain::Bool | Domain::Int { .. } | Domain::Enum { .. } | Domain::Unnamed { .. }
        )
    }

    /// Values of an atomic domain in ascending order; `None` for compound domains.
    pub fn atoms(&self) -> Option<Vec<Value>> {
        match self {
            Domain::Bool => Some(vec![Value::Bool(false), Value::Bool(true)]),
            Domain::Int { lo, hi } => Some((*lo..=*hi).map(Value::Int).collect()),
            Domain::Enum { name, atoms } => Some(
                atoms
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        Value::Enum(EnumAtom {
                            ty: name.clone(),
                            pos: i as u32 + 1,
                            name: a.clone(),
                        })
                    })
                    .collect(),
            ),
            Domain::Unnamed { tag, size } => {
                Some((1..=*size).map(|i| Value::unnamed(tag.clone(), i)).collect())
            }
            _ => None,
        }
    }

    /// Number of values of an atomic domain.
    pub fn atom_count(&self) -> Option<u64> {
        match self {
            Domain::Bool => Some(2),
            Domain::Int { lo, hi } if lo <= hi => Some((hi - lo) as u64 + 1),
            Domain::Int { .. } => Some(0),
            Domain::Enum { atoms, .. } => Some(atoms.len() as u64),
            Domain::Unnamed { size, .. } => Some(*size as u64),
            _ => None,
        }
    }

    /// 0-based rank of an atom in this atomic domain.
    pub fn rank_of(&self, v: &Value) -> Option<u32> {
        match (self, v) {
            (Domain::Bool, Value::Bool(b)) => Some(*b as u32),
            (Domain::Int { lo, hi }, Value::Int(n)) if lo <= n && n <= hi => Some((n - lo) as u32),
            (Domain::Enum { name, atoms }, Value::Enum(e))
                if *name == e.ty && e.pos >= 1 && (e.pos as usize) <= atoms.len() =>
            {
                Some(e.pos - 1)
            }
            (Domain::Unnamed { tag, size }, Value::Unnamed(u))
                if *tag == u.tag && u.index >= 1 && u.index <= *size =>
            {
                Some(u.index - 1)
            }
            _ => None,
        }
    }

    /// Inverse of [`Domain::rank_of`].
    pub fn atom_at(&self, rank: u32) -> Option<Value> {
        match self {
            Domain::Bool if rank < 2 => Some(Value::Bool(rank == 1)),
            Domain::Int { lo, hi } if (rank as i64) <= hi - lo => Some(Value::Int(lo + rank as i64)),
            Domain::Enum { name, atoms } if (rank as usize) < atoms.len() => {
                Some(Value::Enum(EnumAtom {
                    ty: name.clone(),
                    pos: rank + 1,
                    name: atoms[rank as usize].clone(),
                }))
            }
            Domain::Unnamed { tag, size } if rank < *size => {
                Some(Value::unnamed(tag.clone(), rank + 1))
            }
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), ValueError> {
        match self {
            Domain::Int { lo, hi } if lo > hi => Err(ValueError::EmptyIntRange { lo: *lo, hi: *hi }),
            Domain::Unnamed { tag, size: 0 } => Err(ValueError::EmptyUnnamed(tag.clone())),
            Domain::Unsupported(kind) => Err(ValueError::OutOfScope(*kind)),
            Domain::Matrix { indices, elem } => {
                for idx in indices {
                    if !idx.is_atomic() {
                        return Err(ValueError::NonAtomicIndex(idx.to_string()));
                    }
                    idx.validate()?;
                }
                elem.validate()
            }
            Domain::Tuple(items) | Domain::Relation(items) => {
                items.iter().try_for_each(Domain::validate)
            }
            Domain::MSet { elem, .. } | Domain::Set(elem) => elem.validate(),
            Domain::Function { from, to, .. } => {
                from.validate()?;
                to.validate()
            }
            _ => Ok(()),
        }
    }
}

/// Rewrite a domain into its core form: atoms, tuples, matrices and multisets.
pub fn lower_domain(d: &Domain) -> Result<Domain, ValueError> {
    d.validate()?;
    Ok(lower_unchecked(d))
}

fn lower_unchecked(d: &Domain) -> Domain {
    match d {
        Domain::Bool | Domain::Int { .. } | Domain::Enum { .. } | Domain::Unnamed { .. } => d.clone(),
        Domain::Tuple(items) => Domain::Tuple(items.iter().map(lower_unchecked).collect()),
        Domain::Matrix { indices, elem } => Domain::Matrix {
            indices: indices.clone(),
            elem: Box::new(lower_unchecked(elem)),
        },
        Domain::MSet {
            elem,
            max_occur,
            side,
        } => Domain::MSet {
            elem: Box::new(lower_unchecked(elem)),
            max_occur: *max_occur,
            side: *side,
        },
        Domain::Set(elem) => Domain::MSet {
            elem: Box::new(lower_unchecked(elem)),
            max_occur: Some(1),
            side: SideCondition::None,
        },
        Domain::Function { from, to, total } => Domain::MSet {
            elem: Box::new(Domain::Tuple(vec![
                lower_unchecked(from),
                lower_unchecked(to),
            ])),
            max_occur: Some(1),
            side: if *total {
                SideCondition::TotalFunctional
            } else {
                SideCondition::Functional
            },
        },
        Domain::Relation(items) => Domain::MSet {
            elem: Box::new(Domain::Tuple(items.iter().map(lower_unchecked).collect())),
            max_occur: Some(1),
            side: SideCondition::None,
        },
        Domain::Unsupported(_) => unreachable!("validated before lowering"),
    }
}

/// Number of values in a domain, saturating at `u128::MAX`.
pub fn value_count(d: &Domain) -> Result<u128, ValueError> {
    let d = lower_domain(d)?;
    count_lowered(&d)
}

fn count_lowered(d: &Domain) -> Result<u128, ValueError> {
    Ok(match d {
        Domain::Tuple(items) => {
            let mut n: u128 = 1;
            for item in items {
                n = n.saturating_mul(count_lowered(item)?);
            }
            n
        }
        Domain::Matrix { indices, elem } => {
            let cells: u128 = indices
                .iter()
                .map(|i| i.atom_count().unwrap_or(0) as u128)
                .product();
            let per = count_lowered(elem)?;
            saturating_pow(per, cells)
        }
        Domain::MSet {
            elem,
            max_occur,
            side,
        } => match side {
            SideCondition::None => {
                let bound = max_occur.ok_or_else(|| ValueError::Unbounded(elem.to_string()))?;
                let universe = count_lowered(elem)?;
                saturating_pow(bound as u128 + 1, universe)
            }
            SideCondition::Functional | SideCondition::TotalFunctional => {
                let Domain::Tuple(parts) = elem.as_ref() else {
                    unreachable!("functional multisets hold pairs")
                };
                let args = count_lowered(&parts[0])?;
                let results = count_lowered(&parts[1])?;
                let choices = if *side == SideCondition::Functional {
                    results.saturating_add(1)
                } else {
                    results
                };
                saturating_pow(choices, args)
            }
        },
        other => other.atom_count().expect("atomic after lowering") as u128,
    })
}

fn saturating_pow(base: u128, exp: u128) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc == u128::MAX || acc == 0 {
            break;
        }
    }
    acc
}

/// Every value of `d` exactly once, ascending under [`order::cmp`].
pub fn enumerate_values(d: &Domain) -> Result<Vec<Value>, ValueError> {
    enumerate_values_bounded(d, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_values_bounded(d: &Domain, limit: u128) -> Result<Vec<Value>, ValueError> {
    let lowered = lower_domain(d)?;
    let n = count_lowered(&lowered)?;
    if n > limit {
        return Err(ValueError::TooLarge {
            domain: d.to_string(),
            limit,
        });
    }
    let mut out = enumerate_lowered(&lowered)?;
    out.sort_by(order::total_cmp);
    Ok(out)
}

fn enumerate_lowered(d: &Domain) -> Result<Vec<Value>, ValueError> {
    if let Some(atoms) = d.atoms() {
        return Ok(atoms);
    }
    match d {
        Domain::Tuple(items) => {
            let parts = items
                .iter()
                .map(|i| {
                    let mut v = enumerate_lowered(i)?;
                    v.sort_by(order::total_cmp);
                    Ok(v)
                })
                .collect::<Result<Vec<_>, ValueError>>()?;
            Ok(cartesian(&parts).into_iter().map(Value::Tuple).collect())
        }
        Domain::Matrix { indices, elem } => {
            let index_lists: Vec<Vec<Value>> =
                indices.iter().map(|i| i.atoms().expect("atomic index")).collect();
            let cells: usize = index_lists.iter().map(Vec::len).product();
            let mut elems = enumerate_lowered(elem)?;
            elems.sort_by(order::total_cmp);
            let parts = vec![elems; cells];
            Ok(cartesian(&parts)
                .into_iter()
                .map(|entries| {
                    Value::Matrix(Matrix {
                        indices: index_lists.clone(),
                        entries,
                    })
                })
                .collect())
        }
        Domain::MSet {
            elem,
            max_occur,
            side: SideCondition::None,
        } => {
            let bound = max_occur.ok_or_else(|| ValueError::Unbounded(elem.to_string()))?;
            let mut universe = enumerate_lowered(elem)?;
            universe.sort_by(order::total_cmp);
            let counts: Vec<Vec<u32>> = vec![(0..=bound).collect(); universe.len()];
            Ok(cartesian(&counts)
                .into_iter()
                .map(|mult| {
                    let items = universe
                        .iter()
                        .zip(&mult)
                        .flat_map(|(u, &k)| std::iter::repeat_n(u.clone(), k as usize))
                        .collect();
                    Value::MSet(items)
                })
                .collect())
        }
        Domain::MSet { elem, side, .. } => {
            let Domain::Tuple(parts) = elem.as_ref() else {
                unreachable!("functional multisets hold pairs")
            };
            let mut args = enumerate_lowered(&parts[0])?;
            args.sort_by(order::total_cmp);
            let mut results = enumerate_lowered(&parts[1])?.into_iter().map(Some).collect::<Vec<_>>();
            if *side == SideCondition::Functional {
                results.push(None);
            }
            let choices = vec![results; args.len()];
            Ok(cartesian(&choices)
                .into_iter()
                .map(|picks| {
                    let mut pairs: Vec<Value> = args
                        .iter()
                        .zip(picks)
                        .filter_map(|(a, r)| r.map(|r| Value::Tuple(vec![a.clone(), r])))
                        .collect();
                    pairs.sort_by(order::total_cmp);
                    Value::MSet(pairs)
                })
                .collect())
        }
        _ => unreachable!("lowered domain"),
    }
}

fn cartesian<T: Clone>(parts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for part in parts {
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for prefix in &acc {
            for item in part {
                let mut v = prefix.clone();
                v.push(item.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// True iff `v` inhabits the lowered form of `d`, side-conditions included.
pub fn check_value(d: &Domain, v: &Value) -> bool {
    match lower_domain(d) {
        Ok(lowered) => check_lowered(&lowered, v),
        Err(_) => false,
    }
}

fn check_lowered(d: &Domain, v: &Value) -> bool {
    if d.is_atomic() {
        return d.rank_of(v).is_some();
    }
    match (d, v) {
        (Domain::Tuple(items), Value::Tuple(vs)) => {
            items.len() == vs.len() && items.iter().zip(vs).all(|(d, v)| check_lowered(d, v))
        }
        (Domain::Matrix { indices, elem }, Value::Matrix(m)) => {
            if indices.len() != m.indices.len() {
                return false;
            }
            for (dom, list) in indices.iter().zip(&m.indices) {
                if dom.atoms().as_deref() != Some(list.as_slice()) {
                    return false;
                }
            }
            m.entries.len() == m.cell_count() && m.entries.iter().all(|e| check_lowered(elem, e))
        }
        (
            Domain::MSet {
                elem,
                max_occur,
                side,
            },
            Value::MSet(items),
        ) => {
            if !items.iter().all(|i| check_lowered(elem, i)) {
                return false;
            }
            if !items.windows(2).all(|w| order::total_cmp(&w[0], &w[1]).is_le()) {
                return false;
            }
            if let Some(bound) = max_occur {
                let mut run = 0u32;
                for (i, item) in items.iter().enumerate() {
                    run = if i > 0 && items[i - 1] == *item { run + 1 } else { 1 };
                    if run > *bound {
                        return false;
                    }
                }
            }
            match side {
                SideCondition::None => true,
                SideCondition::Functional | SideCondition::TotalFunctional => {
                    let firsts: Vec<&Value> = items
                        .iter()
                        .map(|p| match p {
                            Value::Tuple(parts) => &parts[0],
                            _ => unreachable!("checked as pair"),
                        })
                        .collect();
                    let distinct = firsts.windows(2).all(|w| w[0] != w[1]);
                    if !distinct {
                        return false;
                    }
                    if *side == SideCondition::TotalFunctional {
                        let Domain::Tuple(parts) = elem.as_ref() else {
                            return false;
                        };
                        match count_lowered(&parts[0]) {
                            Ok(n) => n == firsts.len() as u128,
                            Err(_) => false,
                        }
                    } else {
                        true
                    }
                }
            }
        }
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumAtom {
    pub ty: Tag,
    /// 1-based declaration position.
    pub pos: u32,
    pub name: Arc<str>,
}

/// An atom `i_T` of an unnamed type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnnamedAtom {
    pub tag: Tag,
    /// 1-based.
    pub index: u32,
}

/// A total matrix; entries are stored row-major over the index lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub indices: Vec<Vec<Value>>,
    pub entries: Vec<Value>,
}

impl Matrix {
    pub fn cell_count(&self) -> usize {
        self.indices.iter().map(Vec::len).product()
    }

    /// Row-major offset of an index tuple.
    pub fn offset(&self, index: &[Value]) -> Option<usize> {
        if index.len() != self.indices.len() {
            return None;
        }
        let mut off = 0;
        for (list, i) in self.indices.iter().zip(index) {
            let pos = list.iter().position(|x| x == i)?;
            off = off * list.len() + pos;
        }
        Some(off)
    }

    pub fn get(&self, index: &[Value]) -> Option<&Value> {
        self.offset(index).and_then(|o| self.entries.get(o))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Enum(EnumAtom),
    Unnamed(UnnamedAtom),
    Tuple(Vec<Value>),
    Matrix(Matrix),
    /// Items sorted ascending; build through [`Value::mset`] to keep that invariant.
    MSet(Vec<Value>),
}

impl Value {
    pub fn unnamed(tag: impl Into<Tag>, index: u32) -> Self {
        Value::Unnamed(UnnamedAtom {
            tag: tag.into(),
            index,
        })
    }

    pub fn mset(mut items: Vec<Value>) -> Self {
        items.sort_by(order::total_cmp);
        Value::MSet(items)
    }

    /// Multiset with duplicates removed.
    pub fn set(mut items: Vec<Value>) -> Self {
        items.sort_by(order::total_cmp);
        items.dedup();
        Value::MSet(items)
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Value::Bool(_) | Value::Int(_) | Value::Enum(_) | Value::Unnamed(_)
        )
    }

    /// A one-dimensional matrix indexed by the atoms of `index`.
    pub fn vector(index: &Domain, entries: Vec<Value>) -> Self {
        Value::Matrix(Matrix {
            indices: vec![index.atoms().expect("atomic index")],
            entries,
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&literal::format_value(self, &literal::Shape::Plain))
    }
}

impl From<Tag> for Arc<str> {
    fn from(t: Tag) -> Self {
        t.0
    }
}

/// A value per decision variable, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub names: Arc<[String]>,
    pub values: Vec<Value>,
}

impl Assignment {
    pub fn new(names: Arc<[String]>, values: Vec<Value>) -> Self {
        debug_assert_eq!(names.len(), values.len());
        Assignment { names, values }
    }

    /// The single tuple `(V1, ..., Vd)` standing for the whole assignment.
    pub fn tuple(&self) -> Value {
        Value::Tuple(self.values.clone())
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.values[i])
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Bool => f.write_str("bool"),
            Domain::Int { lo, hi } => write!(f, "int({lo}..{hi})"),
            Domain::Enum { name, .. } => write!(f, "{name}"),
            Domain::Unnamed { tag, .. } => write!(f, "{tag}"),
            Domain::Tuple(items) => {
                f.write_str("tuple (")?;
                write_joined(f, items, ", ")?;
                f.write_str(")")
            }
            Domain::Matrix { indices, elem } => {
                f.write_str("matrix indexed by [")?;
                write_joined(f, indices, ", ")?;
                write!(f, "] of {elem}")
            }
            Domain::MSet {
                elem,
                max_occur,
                side,
            } => {
                f.write_str("mset ")?;
                let mut attrs = Vec::new();
                if let Some(k) = max_occur {
                    attrs.push(format!("maxOccur {k}"));
                }
                match side {
                    SideCondition::None => {}
                    SideCondition::Functional => attrs.push("functional".into()),
                    SideCondition::TotalFunctional => attrs.push("functional, total".into()),
                }
                if !attrs.is_empty() {
                    write!(f, "({}) ", attrs.join(", "))?;
                }
                write!(f, "of {elem}")
            }
            Domain::Set(elem) => write!(f, "set of {elem}"),
            Domain::Function { from, to, total } => {
                f.write_str("function ")?;
                if *total {
                    f.write_str("(total) ")?;
                }
                write!(f, "{from} --> {to}")
            }
            Domain::Relation(items) => {
                f.write_str("relation of (")?;
                write_joined(f, items, " * ")?;
                f.write_str(")")
            }
            Domain::Unsupported(kind) => write!(f, "{kind}"),
        }
    }
}

fn write_joined<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}
