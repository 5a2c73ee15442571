//! Permutations of the atoms of one unnamed type, and elements of direct
//! products of symmetric groups.
//!
//! Composition is left to right: `p.compose(q)` applies `p` first, then `q`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::values::Tag;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("point {point} appears twice in cycle notation")]
    RepeatedPoint { point: u32 },
    #[error("point {point} is outside 1..{size}")]
    OutOfRange { point: u32, size: u32 },
    #[error("point {0} belongs to type {1}, not {2}")]
    WrongTag(u32, String, Tag),
    #[error("malformed cycle notation at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("cannot compose permutations of {0} and {1}")]
    TagMismatch(Tag, Tag),
    #[error("not a bijection on 1..{0}")]
    NotBijection(u32),
}

/// A bijection on `1..=size` of one unnamed type, stored together with its inverse.
#[derive(Clone)]
pub struct Permutation {
    tag: Tag,
    forward: Arc<[u32]>,
    inverse: Arc<[u32]>,
}

impl PartialEq for Permutation {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag && self.forward == other.forward
    }
}

impl Eq for Permutation {}

impl std::hash::Hash for Permutation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.tag.hash(state);
        self.forward.hash(state);
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation<{}>{}", self.tag, self)
    }
}

impl Permutation {
    pub fn identity(tag: Tag, size: u32) -> Self {
        let id: Arc<[u32]> = (1..=size).collect();
        Permutation {
            tag,
            forward: id.clone(),
            inverse: id,
        }
    }

    /// Build from the array of 1-based images.
    pub fn from_images(tag: Tag, images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len() as u32;
        let mut inverse = vec![0u32; images.len()];
        for (i, &img) in images.iter().enumerate() {
            if img == 0 || img > n || inverse[img as usize - 1] != 0 {
                return Err(PermError::NotBijection(n));
            }
            inverse[img as usize - 1] = i as u32 + 1;
        }
        Ok(Permutation {
            tag,
            forward: images.into(),
            inverse: inverse.into(),
        })
    }

    pub fn from_cycles(tag: Tag, size: u32, cycles: &[Vec<u32>]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (1..=size).collect();
        let mut seen = vec![false; size as usize];
        for cycle in cycles {
            for &p in cycle {
                if p == 0 || p > size {
                    return Err(PermError::OutOfRange { point: p, size });
                }
                if std::mem::replace(&mut seen[p as usize - 1], true) {
                    return Err(PermError::RepeatedPoint { point: p });
                }
            }
            for (k, &p) in cycle.iter().enumerate() {
                images[p as usize - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::from_images(tag, images)
    }

    pub fn transposition(tag: Tag, size: u32, a: u32, b: u32) -> Result<Self, PermError> {
        Permutation::from_cycles(tag, size, &[vec![a, b]])
    }

    pub fn tag(&self) -> &Tag {
        &self.tag
    }

    pub fn size(&self) -> u32 {
        self.forward.len() as u32
    }

    pub fn images(&self) -> &[u32] {
        &self.forward
    }

    /// Image of a 1-based point.
    pub fn image(&self, point: u32) -> u32 {
        self.forward[point as usize - 1]
    }

    /// Preimage of a 1-based point, read from the cached inverse.
    pub fn preimage(&self, point: u32) -> u32 {
        self.inverse[point as usize - 1]
    }

    /// `x -> q(p(x))`.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation, PermError> {
        if self.tag != q.tag {
            return Err(PermError::TagMismatch(self.tag.clone(), q.tag.clone()));
        }
        if self.size() != q.size() {
            return Err(PermError::NotBijection(self.size()));
        }
        let images = self.forward.iter().map(|&x| q.image(x)).collect();
        Permutation::from_images(self.tag.clone(), images)
    }

    /// Swaps the cached arrays; never recomputes.
    pub fn inverse(&self) -> Permutation {
        Permutation {
            tag: self.tag.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn moved_points(&self) -> usize {
        self.forward
            .iter()
            .enumerate()
            .filter(|(i, &img)| img != *i as u32 + 1)
            .count()
    }

    pub fn is_identity(&self) -> bool {
        self.moved_points() == 0
    }

    /// Nontrivial cycles, each starting at its least point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.forward.len()];
        let mut out = Vec::new();
        for start in 1..=self.size() {
            if seen[start as usize - 1] || self.image(start) == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start as usize - 1] = true;
            let mut x = self.image(start);
            while x != start {
                seen[x as usize - 1] = true;
                cycle.push(x);
                x = self.image(x);
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle notation with tagged points, e.g. `(1_T, 2_T)`.
    pub fn tagged(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".into();
        }
        cycles
            .iter()
            .map(|c| {
                let pts: Vec<String> = c.iter().map(|p| format!("{p}_{}", self.tag)).collect();
                format!("({})", pts.join(", "))
            })
            .collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(u32::to_string).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

/// Parse cycle notation such as `(1 2)(3 4)`, `(1_T, 2_T)` or `()`.
pub fn parse_cycles(text: &str, tag: &Tag, size: u32) -> Result<Permutation, PermError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut cycles: Vec<Vec<u32>> = Vec::new();
    let skip_ws = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    let syntax = |pos: usize, msg: &str| PermError::Syntax {
        pos,
        msg: msg.to_string(),
    };

    skip_ws(&mut i);
    if i == bytes.len() {
        return Err(syntax(i, "empty input"));
    }
    while i < bytes.len() {
        if bytes[i] != b'(' {
            return Err(syntax(i, "expected `(`"));
        }
        i += 1;
        let mut cycle = Vec::new();
        loop {
            skip_ws(&mut i);
            if i < bytes.len() && bytes[i] == b')' {
                i += 1;
                break;
            }
            if !cycle.is_empty() && i < bytes.len() && bytes[i] == b',' {
                i += 1;
                skip_ws(&mut i);
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(syntax(i, "expected a point"));
            }
            let point: u32 = text[start..i]
                .parse()
                .map_err(|_| syntax(start, "point out of range"))?;
            if i < bytes.len() && bytes[i] == b'_' {
                let t0 = i + 1;
                i = t0;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let point_tag = &text[t0..i];
                if point_tag != tag.as_str() {
                    return Err(PermError::WrongTag(point, point_tag.to_string(), tag.clone()));
                }
            }
            cycle.push(point);
        }
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        skip_ws(&mut i);
    }
    Permutation::from_cycles(tag.clone(), size, &cycles)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorFlag {
    Consecutive,
    AllPairs,
    AllPermutations,
}

impl GeneratorFlag {
    pub const ALL: [GeneratorFlag; 3] = [
        GeneratorFlag::Consecutive,
        GeneratorFlag::AllPairs,
        GeneratorFlag::AllPermutations,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorFlag::Consecutive => "consecutive",
            GeneratorFlag::AllPairs => "allpairs",
            GeneratorFlag::AllPermutations => "allpermutations",
        }
    }
}

impl fmt::Display for GeneratorFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorFlag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "consecutive" => Ok(GeneratorFlag::Consecutive),
            "allpairs" => Ok(GeneratorFlag::AllPairs),
            "allpermutations" => Ok(GeneratorFlag::AllPermutations),
            other => Err(format!("unknown generator set `{other}`")),
        }
    }
}

/// The subset of `Sym(tag)` selected by `flag`, identity excluded, in a fixed order.
pub fn generator_set(flag: GeneratorFlag, tag: &Tag, size: u32) -> Vec<Permutation> {
    let swap = |a, b| Permutation::transposition(tag.clone(), size, a, b).expect("valid transposition");
    match flag {
        GeneratorFlag::Consecutive => (1..size).map(|j| swap(j, j + 1)).collect(),
        GeneratorFlag::AllPairs => (1..=size)
            .flat_map(|t| (t + 1..=size).map(move |u| (t, u)))
            .map(|(t, u)| swap(t, u))
            .collect(),
        GeneratorFlag::AllPermutations => {
            let mut images: Vec<u32> = (1..=size).collect();
            let mut out = Vec::new();
            while next_permutation(&mut images) {
                out.push(Permutation::from_images(tag.clone(), images.clone()).expect("bijection"));
            }
            out
        }
    }
}

/// Advance to the lexicographically next arrangement; false after the last one.
fn next_permutation(xs: &mut [u32]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).expect("pivot exists");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// One permutation per unnamed type; absent types are fixed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DirectProductElem {
    components: BTreeMap<Tag, Permutation>,
}

impl DirectProductElem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(p: Permutation) -> Self {
        let mut e = Self::new();
        e.insert(p);
        e
    }

    /// Identity components are dropped.
    pub fn insert(&mut self, p: Permutation) {
        if p.is_identity() {
            self.components.remove(p.tag());
        } else {
            self.components.insert(p.tag().clone(), p);
        }
    }

    pub fn get(&self, tag: &Tag) -> Option<&Permutation> {
        self.components.get(tag)
    }

    pub fn components(&self) -> impl Iterator<Item = &Permutation> {
        self.components.values()
    }

    pub fn is_identity(&self) -> bool {
        self.components.is_empty()
    }

    pub fn inverse(&self) -> DirectProductElem {
        DirectProductElem {
            components: self
                .components
                .iter()
                .map(|(t, p)| (t.clone(), p.inverse()))
                .collect(),
        }
    }
}

impl fmt::Display for DirectProductElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("id");
        }
        let parts: Vec<String> = self
            .components
            .values()
            .map(|p| format!("{}:{}", p.tag(), p))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProductMode {
    /// Each generator of each type on its own.
    Independently,
    /// Every combination of one generator (or identity) per type.
    Altogether,
}

/// Direct-product elements built from per-type generator sets.
///
/// `gens` is in type declaration order; the first type varies slowest.
pub fn dp_elements(mode: ProductMode, gens: &[(Tag, Vec<Permutation>)]) -> Vec<DirectProductElem> {
    match mode {
        ProductMode::Independently => gens
            .iter()
            .flat_map(|(_, ps)| ps.iter().cloned().map(DirectProductElem::single))
            .collect(),
        ProductMode::Altogether => {
            let mut acc = vec![DirectProductElem::new()];
            for (_, ps) in gens {
                let mut next = Vec::with_capacity(acc.len() * (ps.len() + 1));
                for prefix in &acc {
                    next.push(prefix.clone());
                    for p in ps {
                        let mut e = prefix.clone();
                        e.insert(p.clone());
                        next.push(e);
                    }
                }
                acc = next;
            }
            acc.remove(0);
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t() -> Tag {
        Tag::new("T")
    }

    fn cyc(text: &str, size: u32) -> Permutation {
        parse_cycles(text, &t(), size).unwrap()
    }

    #[test]
    fn parse_three_cycle() {
        assert_eq!(cyc("(1 2 3)", 3).images(), &[2, 3, 1]);
        assert!(cyc("()", 4).is_identity());
        assert_eq!(cyc("(1_T, 2_T)(3_T 4_T)", 4).images(), &[2, 1, 4, 3]);
        assert_eq!(cyc("  ( 1 , 3 ) ", 3).images(), &[3, 2, 1]);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_cycles("(1 2)(3 1)", &t(), 3),
            Err(PermError::RepeatedPoint { point: 1 })
        );
        assert_eq!(
            parse_cycles("(1 4)", &t(), 3),
            Err(PermError::OutOfRange { point: 4, size: 3 })
        );
        assert!(matches!(parse_cycles("(1 2", &t(), 3), Err(PermError::Syntax { .. })));
        assert!(matches!(parse_cycles("1 2", &t(), 3), Err(PermError::Syntax { .. })));
        assert!(matches!(parse_cycles("(1_U 2_U)", &t(), 3), Err(PermError::WrongTag(..))));
    }

    #[test]
    fn compose_applies_left_first() {
        let g = cyc("(1 2 3)", 3);
        let h = cyc("(1 2)", 3);
        assert_eq!(g.compose(&h).unwrap(), cyc("(2 3)", 3));
        assert_eq!(g.compose(&Permutation::identity(t(), 3)).unwrap(), g);
        assert!(g.compose(&g.inverse()).unwrap().is_identity());
        let u = parse_cycles("(1 2)", &Tag::new("U"), 3).unwrap();
        assert!(matches!(g.compose(&u), Err(PermError::TagMismatch(..))));
    }

    #[test]
    fn inverse_is_cached() {
        let g = cyc("(1 2 3)", 3);
        assert_eq!(g.inverse(), cyc("(1 3 2)", 3));
        assert!(Arc::ptr_eq(&g.inverse().inverse().forward, &g.forward));
        let id = Permutation::identity(t(), 3);
        assert_eq!(id.inverse(), id);
        let s = cyc("(1 2)", 3);
        assert_eq!(s.inverse(), s);
    }

    #[test]
    fn moved_points_counts() {
        assert_eq!(cyc("(1 2 3)", 5).moved_points(), 3);
        assert_eq!(Permutation::identity(t(), 5).moved_points(), 0);
        assert_eq!(cyc("(1 2)(3 4)", 4).moved_points(), 4);
    }

    #[test]
    fn generator_sets() {
        let show = |ps: Vec<Permutation>| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>();
        assert_eq!(show(generator_set(GeneratorFlag::Consecutive, &t(), 3)), ["(1 2)", "(2 3)"]);
        assert_eq!(
            show(generator_set(GeneratorFlag::AllPairs, &t(), 3)),
            ["(1 2)", "(1 3)", "(2 3)"]
        );
        let all = generator_set(GeneratorFlag::AllPermutations, &t(), 3);
        assert_eq!(all.len(), 5);
        assert_eq!(all[0].images(), &[1, 3, 2]);
        assert_eq!(all[4].images(), &[3, 2, 1]);
        assert!(generator_set(GeneratorFlag::AllPermutations, &t(), 1).is_empty());
    }

    #[test]
    fn product_elements() {
        let tt = Tag::new("T");
        let uu = Tag::new("U");
        let gens = vec![
            (tt.clone(), generator_set(GeneratorFlag::Consecutive, &tt, 3)),
            (uu.clone(), generator_set(GeneratorFlag::Consecutive, &uu, 2)),
        ];
        assert_eq!(dp_elements(ProductMode::Independently, &gens).len(), 3);
        let alt = dp_elements(ProductMode::Altogether, &gens);
        assert_eq!(alt.len(), 5);
        assert!(alt.iter().all(|e| !e.is_identity()));

        let single = &gens[..1];
        assert_eq!(
            dp_elements(ProductMode::Independently, single),
            dp_elements(ProductMode::Altogether, single)
        );
    }

    #[test]
    fn altogether_all_permutations_is_whole_group() {
        let sizes = [(Tag::new("A"), 3u32), (Tag::new("B"), 2), (Tag::new("C"), 3)];
        let gens: Vec<_> = sizes
            .iter()
            .map(|(t, n)| (t.clone(), generator_set(GeneratorFlag::AllPermutations, t, *n)))
            .collect();
        let elems = dp_elements(ProductMode::Altogether, &gens);
        assert_eq!(elems.len(), 6 * 2 * 6 - 1);
        let distinct: std::collections::HashSet<_> = elems.iter().collect();
        assert_eq!(distinct.len(), elems.len());
    }

    fn arb_perm(size: u32) -> impl Strategy<Value = Permutation> {
        Just((1..=size).collect::<Vec<u32>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(Tag::new("T"), v).unwrap())
    }

    proptest! {
        #[test]
        fn cycle_notation_round_trips(p in (1u32..8).prop_flat_map(arb_perm)) {
            let back = parse_cycles(&p.to_string(), p.tag(), p.size()).unwrap();
            prop_assert_eq!(&back, &p);
            let tagged = parse_cycles(&p.tagged(), p.tag(), p.size()).unwrap();
            prop_assert_eq!(tagged, p);
        }

        #[test]
        fn group_laws((p, q, r) in (1u32..7).prop_flat_map(|n| (arb_perm(n), arb_perm(n), arb_perm(n)))) {
            let left = p.compose(&q).unwrap().compose(&r).unwrap();
            let right = p.compose(&q.compose(&r).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            let id = Permutation::identity(Tag::new("T"), p.size());
            prop_assert_eq!(&p.compose(&id).unwrap(), &p);
            prop_assert_eq!(&id.compose(&p).unwrap(), &p);
            prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        }
    }
}
