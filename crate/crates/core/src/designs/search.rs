//! Exhaustive backtracking over block multisets.
//!
//! Candidate blocks are the `w`-subsets of `n` points in increasing mask
//! order; a design is a non-decreasing sequence of candidate indices, so every
//! block multiset is visited once. Partial designs are cut as soon as a point
//! exceeds `rho = m w / n` or a pair exceeds `lambda = rho (w - 1) / (n - 1)`.

use rayon::prelude::*;

use super::{check_qec_constraints, derive_parameters, BlockDesign};

/// Largest point count the search accepts.
pub const MAX_SEARCH_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Keep only designs with even block size.
    pub constraint1: bool,
    /// Keep only designs whose CSS doubling commutes.
    pub constraint2: bool,
    /// Stop after this many designs.
    pub limit: usize,
    /// Maximum number of search nodes.
    pub budget: u64,
    /// Split the first block choice across threads. Output is unchanged.
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            constraint1: false,
            constraint2: false,
            limit: usize::MAX,
            budget: 50_000_000,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub designs: Vec<BlockDesign>,
    /// The node budget ran out before the space was exhausted.
    pub truncated: bool,
    pub nodes: u64,
}

struct Problem {
    n: usize,
    m: usize,
    rho: u32,
    lambda: u32,
    candidates: Vec<u64>,
    opts: SearchOptions,
}

/// Result of one first-block subtree: designs tagged with the node index at
/// which they were completed, total nodes visited, and whether it stopped
/// because of the budget.
struct Subtree {
    found: Vec<(u64, Vec<u64>)>,
    nodes: u64,
    exhausted_budget: bool,
}

struct Walker<'a> {
    p: &'a Problem,
    point_count: Vec<u32>,
    pair_count: Vec<u32>,
    chosen: Vec<u64>,
    nodes: u64,
    budget: u64,
    found: Vec<(u64, Vec<u64>)>,
    out_of_budget: bool,
}

impl<'a> Walker<'a> {
    fn new(p: &'a Problem, budget: u64) -> Self {
        Self {
            p,
            point_count: vec![0; p.n],
            pair_count: vec![0; p.n * p.n],
            chosen: Vec::with_capacity(p.m),
            nodes: 0,
            budget,
            found: Vec::new(),
            out_of_budget: false,
        }
    }

    fn fits(&self, block: u64) -> bool {
        let n = self.p.n;
        for j in 0..n {
            if block >> j & 1 == 0 {
                continue;
            }
            if self.point_count[j] + 1 > self.p.rho {
                return false;
            }
            for k in (j + 1)..n {
                if block >> k & 1 == 1 && self.pair_count[j * n + k] + 1 > self.p.lambda {
                    return false;
                }
            }
        }
        true
    }

    fn apply(&mut self, block: u64, delta: i32) {
        let n = self.p.n;
        for j in 0..n {
            if block >> j & 1 == 0 {
                continue;
            }
            self.point_count[j] = (self.point_count[j] as i32 + delta) as u32;
            for k in (j + 1)..n {
                if block >> k & 1 == 1 {
                    let c = &mut self.pair_count[j * n + k];
                    *c = (*c as i32 + delta) as u32;
                }
            }
        }
    }

    fn accept(&self) -> bool {
        let Ok(d) = BlockDesign::new(self.p.n, self.chosen.clone()) else {
            return false;
        };
        if !derive_parameters(&d).is_2design {
            return false;
        }
        if !(self.p.opts.constraint1 || self.p.opts.constraint2) {
            return true;
        }
        match check_qec_constraints(&d, self.p.opts.constraint2) {
            Ok(v) => {
                (!self.p.opts.constraint1 || v.constraint1_ok)
                    && (!self.p.opts.constraint2 || v.constraint2_ok == Some(true))
            }
            Err(_) => false,
        }
    }

    /// Returns false to stop the walk.
    fn descend(&mut self, start: usize) -> bool {
        if self.nodes >= self.budget {
            self.out_of_budget = true;
            return false;
        }
        self.nodes += 1;
        if self.chosen.len() == self.p.m {
            if self.accept() {
                self.found.push((self.nodes, self.chosen.clone()));
                if self.found.len() >= self.p.opts.limit {
                    return false;
                }
            }
            return true;
        }
        for idx in start..self.p.candidates.len() {
            let block = self.p.candidates[idx];
            if !self.fits(block) {
                continue;
            }
            self.apply(block, 1);
            self.chosen.push(block);
            let go_on = self.descend(idx);
            self.chosen.pop();
            self.apply(block, -1);
            if !go_on {
                return false;
            }
        }
        true
    }

    fn run_from(mut self, first: usize) -> Subtree {
        let block = self.p.candidates[first];
        if self.fits(block) {
            self.apply(block, 1);
            self.chosen.push(block);
            self.descend(first);
        }
        Subtree {
            found: self.found,
            nodes: self.nodes,
            exhausted_budget: self.out_of_budget,
        }
    }
}

fn w_subsets(n: usize, w: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|b| b.count_ones() as usize == w).collect()
}

/// Searches for labeled 2-designs with the given `(n, w, m)` that pass the
/// requested QEC filters. Designs are deduplicated by block multiset only, not
/// by isomorphism.
pub fn search_2designs(n: usize, w: usize, m: usize, opts: SearchOptions) -> SearchOutcome {
    let empty = SearchOutcome {
        designs: Vec::new(),
        truncated: false,
        nodes: 0,
    };
    if !(2..=MAX_SEARCH_POINTS).contains(&n) || w == 0 || w > n || m == 0 || opts.limit == 0 {
        return empty;
    }
    // Replication and pair counts are forced by the counting identities.
    if !(m * w).is_multiple_of(n) {
        return empty;
    }
    let rho = m * w / n;
    if !(rho * (w - 1)).is_multiple_of(n - 1) {
        return empty;
    }
    let lambda = rho * (w - 1) / (n - 1);
    if lambda == 0 {
        return empty;
    }
    let problem = Problem {
        n,
        m,
        rho: rho as u32,
        lambda: lambda as u32,
        candidates: w_subsets(n, w),
        opts,
    };
    let firsts: Vec<usize> = (0..problem.candidates.len()).collect();
    let subtrees: Vec<Subtree> = if opts.parallel {
        firsts
            .par_iter()
            .map(|&first| Walker::new(&problem, opts.budget).run_from(first))
            .collect()
    } else {
        let mut out = Vec::new();
        let mut used = 0u64;
        let mut found = 0usize;
        for &first in &firsts {
            let sub = Walker::new(&problem, opts.budget - used).run_from(first);
            used += sub.nodes;
            found += sub.found.len();
            let stop = sub.exhausted_budget || found >= opts.limit;
            out.push(sub);
            if stop {
                break;
            }
        }
        out
    };
    merge(n, subtrees, opts)
}

/// Concatenates subtrees in first-block order, replaying the global node
/// budget so parallel and sequential runs report the same designs.
fn merge(n: usize, subtrees: Vec<Subtree>, opts: SearchOptions) -> SearchOutcome {
    let mut designs = Vec::new();
    let mut used = 0u64;
    let mut truncated = false;
    for sub in subtrees {
        let remaining = opts.budget - used;
        for (node, blocks) in sub.found {
            if node > remaining {
                break;
            }
            designs.push(BlockDesign { n_points: n, blocks });
            if designs.len() >= opts.limit {
                return SearchOutcome {
                    designs,
                    truncated: false,
                    nodes: used + node,
                };
            }
        }
        if sub.exhausted_budget || sub.nodes > remaining {
            truncated = true;
            used = opts.budget;
            break;
        }
        used += sub.nodes;
    }
    SearchOutcome {
        designs,
        truncated,
        nodes: used,
    }
}
