//! Partial matchings of a cell set (rook numbers) and inclusion–exclusion.
//!
//! `r_j` is the number of ways to choose `j` cells, no two sharing a row or a
//! column. The number of permutations avoiding every cell is
//! `Σ_j (-1)^j r_j (n-j)!`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::model::{cells_disjoint, Cell};
use crate::rational::factorial;

/// Matching counts split by the index of the last (in cell order) included cell.
///
/// `by_last[t][j]` counts the `j`-matchings whose highest cell index is `t`.
/// The empty matching is not stored. Summing `by_last[..c]` gives the rook
/// numbers of the prefix of the first `c` cells.
pub(crate) struct MatchingProfile {
    pub by_last: Vec<Vec<u64>>,
}

impl MatchingProfile {
    /// Rook numbers `r_0..=r_m` of the first `prefix` cells.
    pub fn rook_numbers(&self, prefix: usize) -> Vec<u64> {
        let m = self.by_last.len();
        let mut r = vec![0u64; m + 1];
        r[0] = 1;
        for row in &self.by_last[..prefix] {
            for (j, &count) in row.iter().enumerate() {
                r[j] += count;
            }
        }
        r
    }
}

fn compress(cells: &[Cell]) -> Vec<(u64, u64)> {
    let mut rows = HashMap::new();
    let mut cols = HashMap::new();
    cells
        .iter()
        .map(|&(a, b)| {
            let next_row = rows.len();
            let r = *rows.entry(a).or_insert(next_row);
            let next_col = cols.len();
            let c = *cols.entry(b).or_insert(next_col);
            (1u64 << r, 1u64 << c)
        })
        .collect()
}

/// Enumerates every partial matching once by include/exclude backtracking.
///
/// Callers cap `cells.len()` at 64 so row/column masks fit in a `u64`.
pub(crate) fn matching_profile(cells: &[Cell]) -> MatchingProfile {
    assert!(cells.len() <= 64, "matching_profile supports at most 64 cells");
    let masks = compress(cells);
    let m = cells.len();
    let mut by_last = vec![vec![0u64; m + 1]; m];

    // Depth-first over "next cell to add" so that the last added cell is known
    // at every node.
    fn extend(
        masks: &[(u64, u64)],
        start: usize,
        rows: u64,
        cols: u64,
        size: usize,
        by_last: &mut [Vec<u64>],
    ) {
        for (idx, &(r, c)) in masks.iter().enumerate().skip(start) {
            if rows & r == 0 && cols & c == 0 {
                by_last[idx][size + 1] += 1;
                extend(masks, idx + 1, rows | r, cols | c, size + 1, by_last);
            }
        }
    }
    extend(&masks, 0, 0, 0, 0, &mut by_last);
    MatchingProfile { by_last }
}

/// Rook numbers `r_0..=r_max` for matchings of at most `max_size` cells.
/// No cap on the number of cells.
pub(crate) fn small_rook_numbers(cells: &[Cell], max_size: usize) -> Vec<u64> {
    let mut r = vec![0u64; max_size + 1];
    let mut chosen: Vec<Cell> = Vec::with_capacity(max_size);

    fn extend(cells: &[Cell], start: usize, chosen: &mut Vec<Cell>, max: usize, r: &mut [u64]) {
        r[chosen.len()] += 1;
        if chosen.len() == max {
            return;
        }
        for idx in start..cells.len() {
            let cell = cells[idx];
            if chosen.iter().all(|&c| cells_disjoint(c, cell)) {
                chosen.push(cell);
                extend(cells, idx + 1, chosen, max, r);
                chosen.pop();
            }
        }
    }
    extend(cells, 0, &mut chosen, max_size, &mut r);
    r
}

/// `Σ_j (-1)^j r_j (n-j)!`.
pub(crate) fn avoiding_count(rook: &[u64], n: usize) -> BigUint {
    let mut total = BigInt::zero();
    for (j, &r) in rook.iter().enumerate() {
        if r == 0 || j > n {
            continue;
        }
        let term = BigInt::from(r) * BigInt::from(factorial(n - j));
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
        .to_biguint()
        .expect("inclusion-exclusion count is non-negative")
}
