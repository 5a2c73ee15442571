//! Lex-leader constraints for unnamed-type symmetry.
//!
//! For a group element `e` the constraint is `X <= transform(e, X)` under the
//! total order, where `X` is the tuple of all decision variables in
//! declaration order. The syntactic compiler pushes `transform` through the
//! flattened layout: a matrix entry of the image is read from the preimage
//! position, an unnamed-valued cell becomes the image of its value, and a
//! multiset becomes its negated occurrence vector, whose image entry at `u`
//! is the negated count of `transform(e^-1, u)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::action::{row_major_sources, source_positions, transform_dp};
use crate::engine::flatten::{FlatSpace, Layout};
use crate::order::total_cmp;
use crate::perm::{dp_elements, generator_set, DirectProductElem, GeneratorFlag, Permutation, ProductMode};
use crate::values::{Tag, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BreakMode {
    Independently,
    Altogether,
    NoBreaking,
}

impl BreakMode {
    pub fn name(self) -> &'static str {
        match self {
            BreakMode::Independently => "independently",
            BreakMode::Altogether => "altogether",
            BreakMode::NoBreaking => "none",
        }
    }
}

impl FromStr for BreakMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "independently" => Ok(BreakMode::Independently),
            "altogether" => Ok(BreakMode::Altogether),
            "none" | "nobreaking" => Ok(BreakMode::NoBreaking),
            _ => Err(format!("unknown mode `{s}` (expected independently, altogether or none)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BreakConfig {
    pub mode: BreakMode,
    pub gens: GeneratorFlag,
}

impl BreakConfig {
    pub const COMPLETE: BreakConfig = BreakConfig {
        mode: BreakMode::Altogether,
        gens: GeneratorFlag::AllPermutations,
    };

    pub const NONE: BreakConfig = BreakConfig {
        mode: BreakMode::NoBreaking,
        gens: GeneratorFlag::AllPermutations,
    };

    pub fn new(mode: BreakMode, gens: GeneratorFlag) -> Self {
        BreakConfig { mode, gens }
    }

    /// The six breaking configurations followed by no breaking.
    pub fn all() -> Vec<BreakConfig> {
        let mut out = Vec::new();
        for mode in [BreakMode::Independently, BreakMode::Altogether] {
            for gens in GeneratorFlag::ALL {
                out.push(BreakConfig { mode, gens });
            }
        }
        out.push(BreakConfig::NONE);
        out
    }
}

impl fmt::Display for BreakConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            BreakMode::NoBreaking => f.write_str("none"),
            mode => write!(f, "{}/{}", mode.name(), self.gens),
        }
    }
}

/// Group elements whose lex-leader constraints `cfg` asks for.
pub fn group_elements(cfg: BreakConfig, tags: &[(Tag, u32)]) -> Vec<DirectProductElem> {
    let mode = match cfg.mode {
        BreakMode::NoBreaking => return Vec::new(),
        BreakMode::Independently => ProductMode::Independently,
        BreakMode::Altogether => ProductMode::Altogether,
    };
    let gens: Vec<(Tag, Vec<Permutation>)> = tags
        .iter()
        .map(|(t, n)| (t.clone(), generator_set(cfg.gens, t, *n)))
        .collect();
    dp_elements(mode, &gens)
}

/// `x <= transform_dp(e, x)` for every group element of `cfg`.
pub fn semantic_lex_leader(cfg: BreakConfig, tags: &[(Tag, u32)], x: &Value) -> bool {
    group_elements(cfg, tags)
        .iter()
        .all(|e| total_cmp(x, &transform_dp(e, x)) != Ordering::Greater)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomicTerm {
    /// A cell's code.
    Var(usize),
    /// A constant compared directly with cell codes.
    Const(i64),
    /// The image of an unnamed-valued cell under a permutation of its type.
    Image { perm: Permutation, cell: usize },
    /// Minus the multiplicity of `elem` in multiset slot `slot`.
    NegFreq { slot: usize, elem: Value },
}

/// `lhs <=lex rhs` (or `<lex` when strict).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexConstraint {
    pub lhs: Vec<AtomicTerm>,
    pub rhs: Vec<AtomicTerm>,
    pub strict: bool,
}

impl LexConstraint {
    pub fn is_trivial(&self) -> bool {
        !self.strict && self.lhs.is_empty()
    }

    pub fn render(&self, space: &FlatSpace) -> String {
        let side = |terms: &[AtomicTerm]| {
            let parts: Vec<String> = terms.iter().map(|t| render_term(t, space)).collect();
            format!("[{}]", parts.join(", "))
        };
        let op = if self.strict { "<lex" } else { "<=lex" };
        format!("{} {op} {}", side(&self.lhs), side(&self.rhs))
    }
}

fn render_term(t: &AtomicTerm, space: &FlatSpace) -> String {
    match t {
        AtomicTerm::Var(c) => space.cells[*c].label.clone(),
        AtomicTerm::Const(n) => n.to_string(),
        AtomicTerm::Image { perm, cell } => {
            format!("image({}, {})", perm.tagged(), space.cells[*cell].label)
        }
        AtomicTerm::NegFreq { slot, elem } => {
            format!("-freq({}, {elem})", space.slots[*slot].label)
        }
    }
}

/// The unsimplified constraint `X <=lex transform(e, X)` over flat terms.
pub fn lex_leader_terms(space: &FlatSpace, e: &DirectProductElem) -> LexConstraint {
    let id = DirectProductElem::new();
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for v in &space.vars {
        image_terms(space, &v.layout, &id, &id, &mut lhs);
        image_terms(space, &v.layout, e, &e.inverse(), &mut rhs);
    }
    LexConstraint {
        lhs,
        rhs,
        strict: false,
    }
}

fn image_terms(
    space: &FlatSpace,
    layout: &Layout,
    e: &DirectProductElem,
    e_inv: &DirectProductElem,
    out: &mut Vec<AtomicTerm>,
) {
    match layout {
        Layout::Cell(c) => {
            let perm = match &space.cells[*c].domain {
                crate::values::Domain::Unnamed { tag, .. } => e.get(tag),
                _ => None,
            };
            out.push(match perm {
                Some(p) => AtomicTerm::Image {
                    perm: p.clone(),
                    cell: *c,
                },
                None => AtomicTerm::Var(*c),
            });
        }
        Layout::Tuple(items) => {
            for l in items {
                image_terms(space, l, e, e_inv, out);
            }
        }
        Layout::Matrix { indices, entries } => {
            let sources = source_positions(indices, &|t: &Tag| e.get(t));
            for src in row_major_sources(indices, &sources) {
                image_terms(space, &entries[src], e, e_inv, out);
            }
        }
        Layout::MSet(s) => {
            for u in &space.slots[*s].universe {
                out.push(AtomicTerm::NegFreq {
                    slot: *s,
                    elem: transform_dp(e_inv, u),
                });
            }
        }
    }
}

/// Drop positions whose two sides are the same term.
pub fn simplify_lex(c: &LexConstraint) -> LexConstraint {
    let (lhs, rhs) = c
        .lhs
        .iter()
        .zip(&c.rhs)
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.clone(), b.clone()))
        .unzip();
    LexConstraint {
        lhs,
        rhs,
        strict: c.strict,
    }
}

/// Simplified, non-trivial lex-leader constraints in group-element order.
pub fn compile_lex_leader(space: &FlatSpace, cfg: BreakConfig) -> Vec<LexConstraint> {
    group_elements(cfg, &space.tags)
        .iter()
        .map(|e| simplify_lex(&lex_leader_terms(space, e)))
        .filter(|c| !c.is_trivial())
        .collect()
}

/// Text listing of the flat cells and the constraints.
pub fn dump_constraints(space: &FlatSpace, cfg: BreakConfig, constraints: &[LexConstraint]) -> String {
    let mut s = String::new();
    s.push_str("$ cells\n");
    s.push_str(&space.describe());
    s.push_str(&format!("$ lex-leader constraints ({cfg}): {}\n", constraints.len()));
    for c in constraints {
        s.push_str(&c.render(space));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::flatten::flatten;
    use crate::modellang::{check_model, parse_model};
    use crate::values::Domain;

    fn space(src: &str) -> FlatSpace {
        let m = check_model(&parse_model(src).unwrap()).unwrap();
        flatten(&m, 10_000_000).unwrap()
    }

    fn v(c: usize) -> AtomicTerm {
        AtomicTerm::Var(c)
    }

    #[test]
    fn simplification_examples() {
        let (a, b, c, d) = (v(0), v(1), v(2), v(3));
        let x = LexConstraint {
            lhs: vec![a.clone(), b.clone(), c.clone(), d.clone()],
            rhs: vec![a.clone(), d.clone(), b.clone(), d.clone()],
            strict: false,
        };
        let y = simplify_lex(&x);
        assert_eq!(y.lhs, vec![b.clone(), c]);
        assert_eq!(y.rhs, vec![d, b.clone()]);

        let same = LexConstraint {
            lhs: vec![a.clone(), b.clone()],
            rhs: vec![a.clone(), b.clone()],
            strict: false,
        };
        assert!(simplify_lex(&same).is_trivial());

        let swapped = LexConstraint {
            lhs: vec![a.clone(), b.clone()],
            rhs: vec![b, a],
            strict: false,
        };
        assert_eq!(simplify_lex(&swapped), swapped);
    }

    #[test]
    fn two_entry_matrix() {
        let s = space("letting T be new type of size 2\nfind X : matrix indexed by [T] of bool");
        let cs = compile_lex_leader(&s, BreakConfig::COMPLETE);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].lhs, vec![v(0), v(1)]);
        assert_eq!(cs[0].rhs, vec![v(1), v(0)]);
        assert_eq!(cs[0].render(&s), "[X[1_T], X[2_T]] <=lex [X[2_T], X[1_T]]");
    }

    #[test]
    fn semantic_two_entry_matrix() {
        let t = Domain::unnamed("T", 2);
        let tags = [(Tag::new("T"), 2)];
        let tf = Value::vector(&t, vec![Value::Bool(true), Value::Bool(false)]);
        let ft = Value::vector(&t, vec![Value::Bool(false), Value::Bool(true)]);
        let x = |m: &Value| Value::Tuple(vec![m.clone()]);
        assert!(!semantic_lex_leader(BreakConfig::COMPLETE, &tags, &x(&tf)));
        assert!(semantic_lex_leader(BreakConfig::COMPLETE, &tags, &x(&ft)));
        assert!(semantic_lex_leader(BreakConfig::NONE, &tags, &x(&tf)));
    }

    #[test]
    fn double_lex_shape() {
        let s = space(
            "letting R be new type of size 2\nletting C be new type of size 3\n\
             find M : matrix indexed by [R, C] of int(0..3)",
        );
        let cfg = BreakConfig::new(BreakMode::Independently, GeneratorFlag::Consecutive);
        let cs = compile_lex_leader(&s, cfg);
        assert_eq!(cs.len(), 1 + 2);
        // rows 1 and 2 swapped
        assert_eq!(cs[0].lhs, (0..6).map(v).collect::<Vec<_>>());
        assert_eq!(cs[0].rhs, [3, 4, 5, 0, 1, 2].map(v).to_vec());
    }

    #[test]
    fn constraint_counts() {
        let s = space(
            "letting T be new type of size 3\nletting U be new type of size 2\n\
             find M : matrix indexed by [T, U] of bool",
        );
        let count = |mode, gens| compile_lex_leader(&s, BreakConfig::new(mode, gens)).len();
        assert_eq!(count(BreakMode::Independently, GeneratorFlag::Consecutive), 2 + 1);
        assert_eq!(count(BreakMode::Independently, GeneratorFlag::AllPairs), 3 + 1);
        assert_eq!(count(BreakMode::Altogether, GeneratorFlag::AllPermutations), 6 * 2 - 1);
        assert_eq!(count(BreakMode::NoBreaking, GeneratorFlag::AllPermutations), 0);
    }

    #[test]
    fn unnamed_values_use_images() {
        let s = space("letting T be new type of size 2\nfind x : T");
        let cs = compile_lex_leader(&s, BreakConfig::COMPLETE);
        assert_eq!(cs.len(), 1);
        assert!(matches!(cs[0].rhs[0], AtomicTerm::Image { cell: 0, .. }));
        assert_eq!(cs[0].render(&s), "[x] <=lex [image((1_T, 2_T), x)]");
    }

    #[test]
    fn sets_use_occurrence_images() {
        let s = space("letting T be new type of size 2\nfind s : set of T");
        let cs = compile_lex_leader(&s, BreakConfig::COMPLETE);
        assert_eq!(cs[0].render(&s), "[-freq(s, 1_T), -freq(s, 2_T)] <=lex [-freq(s, 2_T), -freq(s, 1_T)]");
    }

    #[test]
    fn all_configs() {
        let all = BreakConfig::all();
        assert_eq!(all.len(), 7);
        assert_eq!(all[6], BreakConfig::NONE);
    }
}
