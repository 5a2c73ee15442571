//! Orbit counting by closure, independent of the lex-leader machinery.
//!
//! All solutions are enumerated without symmetry breaking and partitioned
//! into orbits by breadth-first closure under the adjacent transpositions of
//! every unnamed type, which generate the full direct product.

use std::collections::{HashMap, VecDeque};

use super::flatten::flatten;
use super::solve::{solve_space, SolveOptions};
use super::EngineError;
use crate::action::transform_dp;
use crate::modellang::CheckedModel;
use crate::perm::{generator_set, DirectProductElem, GeneratorFlag};
use crate::symbreak::BreakConfig;
use crate::values::{Assignment, Value};

#[derive(Debug, Clone)]
pub struct OrbitReport {
    /// Every solution, ascending.
    pub solutions: Vec<Assignment>,
    /// Orbit id of each solution; ids follow the order of first appearance.
    pub orbit_of: Vec<usize>,
    /// Minimal member of each orbit, ascending.
    pub representatives: Vec<Assignment>,
}

impl OrbitReport {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    /// Position of an assignment among the solutions.
    pub fn index_of(&self, a: &Assignment) -> Option<usize> {
        self.solutions
            .binary_search_by(|s| crate::order::total_cmp(&s.tuple(), &a.tuple()))
            .ok()
    }

    /// Orbit ids of `found`, or `None` if some member is not a solution.
    pub fn orbits_hit(&self, found: &[Assignment]) -> Option<Vec<usize>> {
        found
            .iter()
            .map(|a| self.index_of(a).map(|i| self.orbit_of[i]))
            .collect()
    }

    /// Every orbit keeps at least one member among `found`.
    pub fn is_sound(&self, found: &[Assignment]) -> bool {
        let Some(ids) = self.orbits_hit(found) else {
            return false;
        };
        let mut seen = vec![false; self.count()];
        for id in ids {
            seen[id] = true;
        }
        seen.into_iter().all(|b| b)
    }

    /// `found` holds exactly one member per orbit, its minimum.
    pub fn is_complete(&self, found: &[Assignment]) -> bool {
        found.len() == self.representatives.len()
            && found
                .iter()
                .zip(&self.representatives)
                .all(|(a, r)| a.tuple() == r.tuple())
    }
}

pub fn orbit_oracle(model: &CheckedModel, budget: u128, threads: usize) -> Result<OrbitReport, EngineError> {
    let space = flatten(model, budget)?;
    let opts = SolveOptions {
        config: BreakConfig::NONE,
        threads,
        budget,
        ..SolveOptions::default()
    };
    let solutions = solve_space(model, &space, &opts)?.solutions;

    let gens: Vec<DirectProductElem> = model
        .tags
        .iter()
        .flat_map(|(t, n)| generator_set(GeneratorFlag::Consecutive, t, *n))
        .map(DirectProductElem::single)
        .collect();

    let index: HashMap<Value, usize> = solutions
        .iter()
        .enumerate()
        .map(|(i, s)| (s.tuple(), i))
        .collect();
    let mut orbit_of = vec![usize::MAX; solutions.len()];
    let mut representatives = Vec::new();
    let mut queue = VecDeque::new();

    // solutions ascend, so the first unvisited one is its orbit's minimum
    for start in 0..solutions.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = representatives.len();
        representatives.push(solutions[start].clone());
        orbit_of[start] = id;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let x = solutions[i].tuple();
            for g in &gens {
                let y = transform_dp(g, &x);
                let Some(&j) = index.get(&y) else {
                    return Err(EngineError::NotSymmetric {
                        perm: g.to_string(),
                        solution: x.to_string(),
                    });
                };
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    queue.push_back(j);
                }
            }
        }
    }

    Ok(OrbitReport {
        solutions,
        orbit_of,
        representatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::DEFAULT_BUDGET;
    use crate::modellang::{check_model, parse_model};

    fn oracle(src: &str) -> OrbitReport {
        orbit_oracle(&check_model(&parse_model(src).unwrap()).unwrap(), DEFAULT_BUDGET, 1).unwrap()
    }

    #[test]
    fn two_booleans() {
        let r = oracle("letting T be new type of size 2\nfind X : matrix indexed by [T] of bool");
        assert_eq!(r.count(), 3);
        let reps: Vec<String> = r.representatives.iter().map(|a| a.values[0].to_string()).collect();
        assert_eq!(reps.len(), 3);
        assert_eq!(r.orbit_of, vec![0, 1, 1, 2]);
    }

    #[test]
    fn boolean_square_matrices() {
        let r = oracle("letting T be new type of size 3\nfind M : matrix indexed by [T, T] of bool");
        assert_eq!(r.solutions.len(), 512);
        // Burnside over S3 acting on both indices: (512 + 3 * 32 + 2 * 8) / 6
        assert_eq!(r.count(), 104);
    }
}
