//! Exhaustive enumeration of all `n!` bindings.
//!
//! A depth-first walk assigns `π(0), π(1), …` in turn and carries the running
//! meeting round and hit count, so each of the `≈ e·n!` tree nodes costs O(1)
//! amortised.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::model::{cells_with_first_round, Tactic};
use crate::rational::{factorial, Q};

use super::{MomentReport, SurvivalCurve};

/// Joint tallies of the waiting time `Z` and hit count `X` over all bindings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BindingDistribution {
    pub n: usize,
    pub m: usize,
    /// `z_counts[z]` for `z` in `1..=n+1`; index 0 unused.
    pub z_counts: Vec<u64>,
    /// `x_counts[x]` for `x` in `0..=m`.
    pub x_counts: Vec<u64>,
}

const NONE: usize = usize::MAX;

pub(crate) fn enumerate(a: &Tactic, b: &Tactic) -> BindingDistribution {
    let n = a.n();
    let cells = cells_with_first_round(a, b);
    let m = cells.len();
    // first[a * n + b] = first round hitting cell (a, b), or NONE.
    let mut first = vec![NONE; n * n];
    for &((ca, cb), round) in &cells {
        first[ca * n + cb] = round;
    }

    struct Walk<'a> {
        n: usize,
        first: &'a [usize],
        z_counts: Vec<u64>,
        x_counts: Vec<u64>,
    }

    impl Walk<'_> {
        fn descend(&mut self, row: usize, used: u32, zmin: usize, hits: usize) {
            if row == self.n {
                let z = if zmin == NONE { self.n + 1 } else { zmin + 1 };
                self.z_counts[z] += 1;
                self.x_counts[hits] += 1;
                return;
            }
            let base = row * self.n;
            let mut free = !used & ((1u32 << self.n) - 1);
            while free != 0 {
                let col = free.trailing_zeros() as usize;
                free &= free - 1;
                let round = self.first[base + col];
                if round == NONE {
                    self.descend(row + 1, used | (1 << col), zmin, hits);
                } else {
                    self.descend(row + 1, used | (1 << col), zmin.min(round), hits + 1);
                }
            }
        }
    }

    let mut walk = Walk {
        n,
        first: &first,
        z_counts: vec![0; n + 2],
        x_counts: vec![0; m + 1],
    };
    walk.descend(0, 0, NONE, 0);
    BindingDistribution {
        n,
        m,
        z_counts: walk.z_counts,
        x_counts: walk.x_counts,
    }
}

impl BindingDistribution {
    fn total(&self) -> BigInt {
        BigInt::from(factorial(self.n))
    }

    pub fn survival_curve(&self) -> SurvivalCurve {
        let total = self.total();
        // P(Z > k) = #{Z >= k+1} / n!
        let mut tail = 0u64;
        let mut values = vec![Q::zero(); self.n + 1];
        for k in (0..=self.n).rev() {
            tail += self.z_counts[k + 1];
            values[k] = Q::new(BigInt::from(tail), total.clone());
        }
        SurvivalCurve { n: self.n, values }
    }

    pub fn expected_waiting_time(&self) -> Q {
        let sum: u64 = self
            .z_counts
            .iter()
            .enumerate()
            .map(|(z, &c)| z as u64 * c)
            .sum();
        Q::new(BigInt::from(sum), self.total())
    }

    pub fn prob_no_rendezvous(&self) -> Q {
        Q::new(BigInt::from(self.x_counts[0]), self.total())
    }

    pub fn x_distribution(&self) -> Vec<Q> {
        let total = self.total();
        self.x_counts
            .iter()
            .map(|&c| Q::new(BigInt::from(c), total.clone()))
            .collect()
    }

    /// Moments straight from the tallied distribution of `X`.
    pub fn moments(&self) -> MomentReport {
        let total = self.total();
        let raw = |k: u32| -> Q {
            let s: BigInt = self
                .x_counts
                .iter()
                .enumerate()
                .map(|(x, &c)| BigInt::from(x).pow(k) * BigInt::from(c))
                .sum();
            Q::new(s, total.clone())
        };
        MomentReport::from_raw(self.n, self.m, [Q::one(), raw(1), raw(2), raw(3), raw(4)])
    }
}
