//! Independent exact-cover oracle: all STS(v) whose blocks lie inside a
//! given triple system, found by exact cover over the pair universe.
//!
//! This module deliberately depends only on `designs` — it knows nothing
//! about codes, partitions, or recipes.

use crate::designs::TripleSystem;
use crate::error::{Error, Result};

/// Block-count cap for oracle runs.
pub const ORACLE_BLOCK_CAP: usize = 200;

/// Stream every sub-collection of D's blocks covering each point pair
/// exactly once, in lex order of the chosen block index sets. Returns the
/// solution count.
pub fn exact_cover_sts<F>(d: &TripleSystem, f: F) -> Result<u64>
where
    F: FnMut(&TripleSystem),
{
    exact_cover_sts_with_cap(d, ORACLE_BLOCK_CAP, f)
}

/// Same search with an explicit block-count cap.
pub fn exact_cover_sts_with_cap<F>(d: &TripleSystem, cap: usize, mut f: F) -> Result<u64>
where
    F: FnMut(&TripleSystem),
{
    if d.blocks().len() > cap {
        return Err(Error::ResourceCap(format!(
            "{} blocks exceeds the {cap}-block oracle cap",
            d.blocks().len()
        )));
    }
    let v = d.v();
    let n_pairs = v * (v - 1) / 2;
    let pair_id = |x: usize, y: usize| -> usize { x * (2 * v - x - 1) / 2 + (y - x - 1) };

    // candidate blocks per pair
    let mut cands: Vec<Vec<usize>> = vec![Vec::new(); n_pairs];
    let mut block_pairs: Vec<[usize; 3]> = Vec::with_capacity(d.blocks().len());
    for (bi, b) in d.blocks().iter().enumerate() {
        let ps = [pair_id(b[0], b[1]), pair_id(b[0], b[2]), pair_id(b[1], b[2])];
        for &p in &ps {
            cands[p].push(bi);
        }
        block_pairs.push(ps);
    }

    let mut state = Search {
        cands,
        block_pairs,
        block_active: vec![true; d.blocks().len()],
        pair_covered: vec![false; n_pairs],
        active_count: vec![0; n_pairs],
        chosen: Vec::new(),
        solutions: Vec::new(),
    };
    for p in 0..n_pairs {
        state.active_count[p] = state.cands[p].len();
    }
    state.search();

    state.solutions.sort_unstable();
    let count = state.solutions.len() as u64;
    for sol in &state.solutions {
        let blocks: Vec<[usize; 3]> = sol.iter().map(|&bi| d.blocks()[bi]).collect();
        let sys = TripleSystem::new(v, blocks).expect("chosen blocks stay sorted");
        f(&sys);
    }
    Ok(count)
}

struct Search {
    cands: Vec<Vec<usize>>,
    block_pairs: Vec<[usize; 3]>,
    block_active: Vec<bool>,
    pair_covered: Vec<bool>,
    active_count: Vec<usize>,
    chosen: Vec<usize>,
    solutions: Vec<Vec<usize>>,
}

impl Search {
    fn search(&mut self) {
        // most-constrained uncovered pair, lowest id on ties
        let mut best: Option<(usize, usize)> = None;
        for p in 0..self.pair_covered.len() {
            if !self.pair_covered[p] {
                let c = self.active_count[p];
                if c == 0 {
                    return;
                }
                if best.map_or(true, |(_, bc)| c < bc) {
                    best = Some((p, c));
                    if c == 1 {
                        break;
                    }
                }
            }
        }
        let Some((p, _)) = best else {
            let mut sol = self.chosen.clone();
            sol.sort_unstable();
            self.solutions.push(sol);
            return;
        };
        let options: Vec<usize> =
            self.cands[p].iter().copied().filter(|&b| self.block_active[b]).collect();
        for b in options {
            let removed = self.choose(b);
            self.chosen.push(b);
            self.search();
            self.chosen.pop();
            self.unchoose(b, removed);
        }
    }

    /// Cover the three pairs of block b and deactivate conflicting blocks;
    /// returns the deactivated blocks for undo.
    fn choose(&mut self, b: usize) -> Vec<usize> {
        let mut removed = Vec::new();
        for &p in &self.block_pairs[b] {
            self.pair_covered[p] = true;
            for i in 0..self.cands[p].len() {
                let other = self.cands[p][i];
                if self.block_active[other] {
                    self.block_active[other] = false;
                    removed.push(other);
                    for &q in &self.block_pairs[other] {
                        self.active_count[q] -= 1;
                    }
                }
            }
        }
        removed
    }

    fn unchoose(&mut self, b: usize, removed: Vec<usize>) {
        for other in removed.into_iter().rev() {
            self.block_active[other] = true;
            for &q in &self.block_pairs[other] {
                self.active_count[q] += 1;
            }
        }
        for &p in &self.block_pairs[b] {
            self.pair_covered[p] = false;
        }
    }
}
