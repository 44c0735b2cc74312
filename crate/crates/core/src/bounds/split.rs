//! Splitting a dense low-degree bipartite edge set into two mutually disjoint
//! edge sets of linear size.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{cells_disjoint, Cell, PairSet};

/// Output of [`split_disjoint_edges`]. Vertices and edges are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteSplit {
    pub n: usize,
    pub left_heavy: Vec<usize>,
    pub left_light: Vec<usize>,
    pub right_heavy: Vec<usize>,
    pub right_light: Vec<usize>,
    pub first: Vec<(usize, usize)>,
    pub second: Vec<(usize, usize)>,
    /// Total degree of `left_heavy`, `left_light`, `right_heavy`, `right_light`.
    pub degrees: [usize; 4],
}

impl BipartiteSplit {
    /// Checks the output guarantees and the degree bounds used along the way:
    /// both edge sets have at least `n/8` edges, every edge of one shares no
    /// endpoint with any edge of the other, the heavy side has degree above
    /// `n/3` and the light side at least `n/4`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let fail = |what: String| Err(Error::InvariantViolation(what));
        if 8 * self.first.len() < n || 8 * self.second.len() < n {
            return fail(format!(
                "edge sets of sizes {} and {} below n/8",
                self.first.len(),
                self.second.len()
            ));
        }
        for &e in &self.first {
            for &f in &self.second {
                if !cells_disjoint(e, f) {
                    return fail(format!("edges {e:?} and {f:?} share an endpoint"));
                }
            }
        }
        let [lh, ll, rh, rl] = self.degrees;
        for (side, heavy, light) in [("left", lh, ll), ("right", rh, rl)] {
            if 3 * heavy <= n {
                return fail(format!("{side} heavy degree {heavy} not above n/3"));
            }
            if 4 * light < n {
                return fail(format!("{side} light degree {light} below n/4"));
            }
        }
        Ok(())
    }
}

fn degrees(cells: &[Cell], n: usize, side: impl Fn(&Cell) -> usize) -> Vec<usize> {
    let mut deg = vec![0; n];
    for c in cells {
        deg[side(c)] += 1;
    }
    deg
}

/// Sorts vertices by non-increasing degree (ties by index) and returns the
/// membership mask of the longest prefix of total degree at most `2n/3`.
fn heavy_prefix(deg: &[usize]) -> (Vec<bool>, usize, usize) {
    let n = deg.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| deg[y].cmp(&deg[x]).then(x.cmp(&y)));
    let mut heavy = vec![false; n];
    let mut total = 0;
    for &v in &order {
        if 3 * (total + deg[v]) > 2 * n {
            break;
        }
        total += deg[v];
        heavy[v] = true;
    }
    let all: usize = deg.iter().sum();
    (heavy, total, all - total)
}

/// Requires `11n/12 ≤ |E| ≤ n` and every degree at most `2n/3`.
pub fn split_disjoint_edges(edges: &PairSet) -> Result<BipartiteSplit> {
    let n = edges.n();
    let m = edges.len();
    if 12 * m < 11 * n {
        return Err(Error::Precondition(format!("{m} edges is fewer than 11n/12 for n={n}")));
    }
    if m > n {
        return Err(Error::Precondition(format!("{m} edges is more than n={n}")));
    }
    let cells = edges.cells();
    let left = degrees(cells, n, |c| c.0);
    let right = degrees(cells, n, |c| c.1);
    let max = left.iter().chain(&right).copied().max().unwrap_or(0);
    if 3 * max > 2 * n {
        return Err(Error::Precondition(format!("vertex degree {max} exceeds 2n/3 for n={n}")));
    }
    let (lh, lh_deg, ll_deg) = heavy_prefix(&left);
    let (rh, rh_deg, rl_deg) = heavy_prefix(&right);

    // classes[s][t]: edges from left part s to right part t (0 = heavy).
    let mut classes: [[Vec<Cell>; 2]; 2] = Default::default();
    for &c in cells {
        classes[usize::from(!lh[c.0])][usize::from(!rh[c.1])].push(c);
    }
    let big = |v: &Vec<Cell>| 8 * v.len() >= n;
    let (first, second) = if big(&classes[0][0]) && big(&classes[1][1]) {
        (&classes[0][0], &classes[1][1])
    } else {
        (&classes[0][1], &classes[1][0])
    };
    let one_based = |v: &Vec<Cell>| -> Vec<(usize, usize)> {
        let mut out: Vec<_> = v.iter().map(|&(a, b)| (a + 1, b + 1)).collect();
        out.sort_unstable();
        out
    };
    let members = |mask: &[bool], want: bool| -> Vec<usize> {
        (0..n).filter(|&v| mask[v] == want).map(|v| v + 1).collect()
    };
    let split = BipartiteSplit {
        n,
        left_heavy: members(&lh, true),
        left_light: members(&lh, false),
        right_heavy: members(&rh, true),
        right_light: members(&rh, false),
        first: one_based(first),
        second: one_based(second),
        degrees: [lh_deg, ll_deg, rh_deg, rl_deg],
    };
    split.validate()?;
    Ok(split)
}

/// A random edge set meeting the preconditions of [`split_disjoint_edges`].
///
/// Half of the instances concentrate edges on a few hub vertices so that the
/// degree cap is actually approached.
pub fn random_split_instance<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PairSet> {
    if n < 2 {
        return Err(Error::TooFewLocations(n));
    }
    let lo = (11 * n).div_ceil(12);
    let m = rng.random_range(lo..=n);
    let cap = 2 * n / 3;
    let hubs = if rng.random_bool(0.5) { rng.random_range(1..=3) } else { 0 };
    let mut left = vec![0; n];
    let mut right = vec![0; n];
    let mut seen = HashSet::with_capacity(m);
    let mut cells = Vec::with_capacity(m);
    while cells.len() < m {
        let pick = |rng: &mut R| {
            if hubs > 0 && rng.random_bool(0.6) {
                rng.random_range(0..hubs)
            } else {
                rng.random_range(0..n)
            }
        };
        let a = pick(rng);
        let b = pick(rng);
        if left[a] == cap || right[b] == cap || !seen.insert((a, b)) {
            continue;
        }
        left[a] += 1;
        right[b] += 1;
        cells.push((a + 1, b + 1));
    }
    PairSet::from_cells(n, &cells)
}
