//! Decomposition of decision variables into atomic cells.
//!
//! Every cell holds the 0-based rank of an atom of its domain. Sets,
//! multisets and relations become one occurrence-count cell per value of the
//! element domain; functions become one result block per argument, guarded
//! by a `defined` flag when the function is partial.

use std::fmt::Write as _;

use crate::modellang::CheckedModel;
use crate::values::literal::Shape;
use crate::values::{
    enumerate_values_bounded, lower_domain, Assignment, Domain, Matrix, SideCondition, Tag, Value,
};

use super::EngineError;

#[derive(Debug, Clone)]
pub struct Cell {
    pub domain: Domain,
    pub var: usize,
    pub label: String,
}

impl Cell {
    pub fn size(&self) -> u32 {
        self.domain.atom_count().unwrap_or(0) as u32
    }
}

/// Where the parts of a value live among the cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Layout {
    Cell(usize),
    Tuple(Vec<Layout>),
    Matrix {
        indices: Vec<Vec<Value>>,
        entries: Vec<Layout>,
    },
    MSet(usize),
}

#[derive(Debug, Clone)]
pub enum SlotRepr {
    /// One multiplicity cell per universe value.
    Occurrence { counts: Vec<usize> },
    /// One result block per argument; `defined` flags for partial functions.
    Table {
        args: Vec<Value>,
        defined: Option<Vec<usize>>,
        results: Vec<Layout>,
    },
}

#[derive(Debug, Clone)]
pub struct Slot {
    pub label: String,
    /// Every possible element, ascending.
    pub universe: Vec<Value>,
    pub repr: SlotRepr,
}

/// Condition every flat assignment must meet to decode to a valid value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structural {
    /// An undefined argument keeps its result cells at code 0.
    UndefinedIsZero { defined: usize, cells: Vec<usize> },
}

impl Structural {
    pub fn holds(&self, codes: &[u32]) -> bool {
        match self {
            Structural::UndefinedIsZero { defined, cells } => {
                codes[*defined] == 1 || cells.iter().all(|c| codes[*c] == 0)
            }
        }
    }

    pub fn support_max(&self) -> usize {
        match self {
            Structural::UndefinedIsZero { defined, cells } => {
                cells.iter().copied().chain([*defined]).max().unwrap()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlatVar {
    pub name: String,
    pub domain: Domain,
    pub shape: Shape,
    pub layout: Layout,
    pub cells: std::ops::Range<usize>,
}

#[derive(Debug, Clone)]
pub struct FlatSpace {
    pub tags: Vec<(Tag, u32)>,
    pub cells: Vec<Cell>,
    pub slots: Vec<Slot>,
    pub vars: Vec<FlatVar>,
    pub structural: Vec<Structural>,
}

/// Flatten every decision variable of a checked model.
pub fn flatten(model: &CheckedModel, budget: u128) -> Result<FlatSpace, EngineError> {
    let mut b = Builder {
        cells: Vec::new(),
        slots: Vec::new(),
        structural: Vec::new(),
        budget,
        var: 0,
    };
    let mut vars = Vec::new();
    for (i, (name, domain)) in model.vars.iter().enumerate() {
        b.var = i;
        let start = b.cells.len();
        let lowered = lower_domain(domain)?;
        let layout = b.layout(&lowered, name.clone())?;
        vars.push(FlatVar {
            name: name.clone(),
            domain: domain.clone(),
            shape: Shape::of_domain(domain),
            layout,
            cells: start..b.cells.len(),
        });
    }
    let space = FlatSpace {
        tags: model.tags.clone(),
        cells: b.cells,
        slots: b.slots,
        vars,
        structural: b.structural,
    };
    let size = space.search_size();
    if size > budget {
        return Err(EngineError::Budget {
            needed: size,
            budget,
        });
    }
    Ok(space)
}

struct Builder {
    cells: Vec<Cell>,
    slots: Vec<Slot>,
    structural: Vec<Structural>,
    budget: u128,
    var: usize,
}

impl Builder {
    fn cell(&mut self, domain: Domain, label: String) -> usize {
        self.cells.push(Cell {
            domain,
            var: self.var,
            label,
        });
        self.cells.len() - 1
    }

    fn values(&self, d: &Domain) -> Result<Vec<Value>, EngineError> {
        enumerate_values_bounded(d, self.budget).map_err(|err| match err {
            crate::values::ValueError::TooLarge { domain, limit } => EngineError::Universe { domain, limit },
            other => other.into(),
        })
    }

    fn layout(&mut self, d: &Domain, path: String) -> Result<Layout, EngineError> {
        Ok(match d {
            Domain::Bool | Domain::Int { .. } | Domain::Enum { .. } | Domain::Unnamed { .. } => {
                Layout::Cell(self.cell(d.clone(), path))
            }
            Domain::Tuple(items) => Layout::Tuple(
                items
                    .iter()
                    .enumerate()
                    .map(|(k, item)| self.layout(item, format!("{path}[{}]", k + 1)))
                    .collect::<Result<_, _>>()?,
            ),
            Domain::Matrix { indices, elem } => {
                let lists: Vec<Vec<Value>> = indices
                    .iter()
                    .map(|i| i.atoms().expect("matrix indices are atomic"))
                    .collect();
                let mut entries = Vec::new();
                for index in cartesian(&lists) {
                    let label = format!("{path}[{}]", join(&index));
                    entries.push(self.layout(elem, label)?);
                }
                Layout::Matrix {
                    indices: lists,
                    entries,
                }
            }
            Domain::MSet {
                elem,
                max_occur,
                side,
            } => {
                let slot = match (side, elem.as_ref()) {
                    (SideCondition::Functional | SideCondition::TotalFunctional, Domain::Tuple(parts)) => {
                        self.table(&path, &parts[0], &parts[1], *side == SideCondition::TotalFunctional)?
                    }
                    _ => {
                        let bound = max_occur.ok_or_else(|| crate::values::ValueError::Unbounded(elem.to_string()))?;
                        let universe = self.values(elem)?;
                        let count_domain = if bound == 1 {
                            Domain::Bool
                        } else {
                            Domain::int(0, bound as i64)
                        };
                        let counts = universe
                            .iter()
                            .map(|u| self.cell(count_domain.clone(), format!("{path}#{u}")))
                            .collect();
                        Slot {
                            label: path,
                            universe,
                            repr: SlotRepr::Occurrence { counts },
                        }
                    }
                };
                self.slots.push(slot);
                Layout::MSet(self.slots.len() - 1)
            }
            _ => unreachable!("lowered domains are atoms, tuples, matrices and multisets"),
        })
    }

    fn table(&mut self, path: &str, from: &Domain, to: &Domain, total: bool) -> Result<Slot, EngineError> {
        let args = self.values(from)?;
        let to_values = self.values(to)?;
        let mut universe = Vec::with_capacity(args.len() * to_values.len());
        for a in &args {
            for b in &to_values {
                universe.push(Value::Tuple(vec![a.clone(), b.clone()]));
            }
        }
        let mut defined = Vec::new();
        let mut results = Vec::new();
        for a in &args {
            let flag = (!total).then(|| self.cell(Domain::Bool, format!("defined({path}, {a})")));
            let start = self.cells.len();
            let layout = self.layout(to, format!("{path}({a})"))?;
            if let Some(flag) = flag {
                defined.push(flag);
                self.structural.push(Structural::UndefinedIsZero {
                    defined: flag,
                    cells: (start..self.cells.len()).collect(),
                });
            }
            results.push(layout);
        }
        Ok(Slot {
            label: path.to_string(),
            universe,
            repr: SlotRepr::Table {
                args,
                defined: (!total).then_some(defined),
                results,
            },
        })
    }
}

/// Index tuples in row-major order.
pub(crate) fn cartesian(lists: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for x in list {
                let mut t = prefix.clone();
                t.push(x.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn join(vals: &[Value]) -> String {
    let mut s = String::new();
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{v}");
    }
    s
}

impl FlatSpace {
    /// Number of flat assignments a plain depth-first search visits at most.
    pub fn search_size(&self) -> u128 {
        self.cells
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.size() as u128))
    }

    pub fn names(&self) -> std::sync::Arc<[String]> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    pub fn decode(&self, codes: &[u32]) -> Assignment {
        Assignment::new(
            self.names(),
            self.vars.iter().map(|v| self.decode_layout(&v.layout, codes)).collect(),
        )
    }

    pub fn decode_var(&self, var: usize, codes: &[u32]) -> Value {
        self.decode_layout(&self.vars[var].layout, codes)
    }

    pub fn decode_layout(&self, layout: &Layout, codes: &[u32]) -> Value {
        match layout {
            Layout::Cell(c) => self.cells[*c]
                .domain
                .atom_at(codes[*c])
                .expect("cell code within its domain"),
            Layout::Tuple(items) => {
                Value::Tuple(items.iter().map(|l| self.decode_layout(l, codes)).collect())
            }
            Layout::Matrix { indices, entries } => Value::Matrix(Matrix {
                indices: indices.clone(),
                entries: entries.iter().map(|l| self.decode_layout(l, codes)).collect(),
            }),
            Layout::MSet(s) => {
                let slot = &self.slots[*s];
                let mut items = Vec::new();
                match &slot.repr {
                    SlotRepr::Occurrence { counts } => {
                        for (u, c) in slot.universe.iter().zip(counts) {
                            for _ in 0..codes[*c] {
                                items.push(u.clone());
                            }
                        }
                    }
                    SlotRepr::Table {
                        args,
                        defined,
                        results,
                    } => {
                        for (k, (a, r)) in args.iter().zip(results).enumerate() {
                            if defined.as_ref().is_none_or(|d| codes[d[k]] == 1) {
                                items.push(Value::Tuple(vec![a.clone(), self.decode_layout(r, codes)]));
                            }
                        }
                    }
                }
                Value::mset(items)
            }
        }
    }

    /// Cell codes for an assignment, or `None` if some value does not fit.
    pub fn encode(&self, a: &Assignment) -> Option<Vec<u32>> {
        if a.values.len() != self.vars.len() {
            return None;
        }
        let mut codes = vec![0u32; self.cells.len()];
        for (v, value) in self.vars.iter().zip(&a.values) {
            for (c, code) in self.encode_layout(&v.layout, value)? {
                codes[c] = code;
            }
        }
        Some(codes)
    }

    /// `(cell, code)` pairs that spell `value` in `layout`.
    pub fn encode_layout(&self, layout: &Layout, value: &Value) -> Option<Vec<(usize, u32)>> {
        let mut out = Vec::new();
        self.encode_into(layout, value, &mut out).then_some(out)
    }

    fn encode_into(&self, layout: &Layout, value: &Value, out: &mut Vec<(usize, u32)>) -> bool {
        match (layout, value) {
            (Layout::Cell(c), v) => match self.cells[*c].domain.rank_of(v) {
                Some(r) => {
                    out.push((*c, r));
                    true
                }
                None => false,
            },
            (Layout::Tuple(ls), Value::Tuple(vs)) if ls.len() == vs.len() => {
                ls.iter().zip(vs).all(|(l, v)| self.encode_into(l, v, out))
            }
            (Layout::Matrix { indices, entries }, Value::Matrix(m))
                if *indices == m.indices && entries.len() == m.entries.len() =>
            {
                entries.iter().zip(&m.entries).all(|(l, v)| self.encode_into(l, v, out))
            }
            (Layout::MSet(s), Value::MSet(items)) => {
                let slot = &self.slots[*s];
                match &slot.repr {
                    SlotRepr::Occurrence { counts } => {
                        let mut mult = vec![0u32; counts.len()];
                        for item in items {
                            match slot.universe.iter().position(|u| u == item) {
                                Some(k) => mult[k] += 1,
                                None => return false,
                            }
                        }
                        for (c, m) in counts.iter().zip(mult) {
                            if m >= self.cells[*c].size() {
                                return false;
                            }
                            out.push((*c, m));
                        }
                        true
                    }
                    SlotRepr::Table {
                        args,
                        defined,
                        results,
                    } => {
                        let mut seen = vec![false; args.len()];
                        for item in items {
                            let Value::Tuple(kv) = item else { return false };
                            let Some(k) = args.iter().position(|a| *a == kv[0]) else {
                                return false;
                            };
                            if seen[k] {
                                return false;
                            }
                            seen[k] = true;
                            if !self.encode_into(&results[k], &kv[1], out) {
                                return false;
                            }
                        }
                        for (k, was) in seen.iter().enumerate() {
                            match defined {
                                Some(d) => {
                                    out.push((d[k], *was as u32));
                                    if !was {
                                        self.zero_fill(&results[k], out);
                                    }
                                }
                                None if !was => return false,
                                None => {}
                            }
                        }
                        true
                    }
                }
            }
            _ => false,
        }
    }

    fn zero_fill(&self, layout: &Layout, out: &mut Vec<(usize, u32)>) {
        for c in self.layout_cells(layout) {
            out.push((c, 0));
        }
    }

    /// All cells under a layout.
    pub fn layout_cells(&self, layout: &Layout) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_cells(layout, &mut out);
        out
    }

    fn collect_cells(&self, layout: &Layout, out: &mut Vec<usize>) {
        match layout {
            Layout::Cell(c) => out.push(*c),
            Layout::Tuple(items) => items.iter().for_each(|l| self.collect_cells(l, out)),
            Layout::Matrix { entries, .. } => entries.iter().for_each(|l| self.collect_cells(l, out)),
            Layout::MSet(s) => match &self.slots[*s].repr {
                SlotRepr::Occurrence { counts } => out.extend(counts),
                SlotRepr::Table { defined, results, .. } => {
                    for (k, r) in results.iter().enumerate() {
                        if let Some(d) = defined {
                            out.push(d[k]);
                        }
                        self.collect_cells(r, out);
                    }
                }
            },
        }
    }

    /// Whether every structural condition holds.
    pub fn well_formed(&self, codes: &[u32]) -> bool {
        self.structural.iter().all(|s| s.holds(codes))
    }

    /// Every well-formed flat assignment, in depth-first order.
    pub fn all_assignments(&self) -> AllAssignments<'_> {
        AllAssignments {
            space: self,
            codes: vec![0; self.cells.len()],
            started: false,
            done: self.cells.iter().any(|c| c.size() == 0),
        }
    }

    /// Human-readable listing of the cells.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (i, c) in self.cells.iter().enumerate() {
            let _ = writeln!(s, "{i:>4}  {} : {}", c.label, c.domain);
        }
        s
    }
}

/// Odometer over cell codes, skipping ill-formed assignments.
pub struct AllAssignments<'a> {
    space: &'a FlatSpace,
    codes: Vec<u32>,
    started: bool,
    done: bool,
}

impl Iterator for AllAssignments<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        loop {
            if self.done {
                return None;
            }
            if self.started {
                let mut k = self.codes.len();
                loop {
                    if k == 0 {
                        self.done = true;
                        return None;
                    }
                    k -= 1;
                    self.codes[k] += 1;
                    if self.codes[k] < self.space.cells[k].size() {
                        break;
                    }
                    self.codes[k] = 0;
                }
            }
            self.started = true;
            if self.space.well_formed(&self.codes) {
                return Some(self.codes.clone());
            }
        }
    }
}
