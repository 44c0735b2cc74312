//! Game semantics on the complete graph with `n` locations.
//!
//! Locations are 1-based at every external boundary (constructors taking
//! itineraries, text formats, JSON) and 0-based inside this crate.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewLocations(n));
    }
    Ok(())
}

/// A deterministic itinerary: the location a player visits in each of the `n` rounds,
/// in that player's private numbering.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tactic {
    rounds: Vec<usize>,
}

impl Tactic {
    /// Validates a 1-based itinerary of length `n`.
    pub fn new(n: usize, itinerary: &[usize]) -> Result<Self> {
        check_n(n)?;
        if itinerary.len() != n {
            return Err(Error::WrongLength {
                expected: n,
                got: itinerary.len(),
            });
        }
        let rounds = itinerary
            .iter()
            .map(|&loc| {
                if loc == 0 || loc > n {
                    Err(Error::LocationOutOfRange { location: loc, n })
                } else {
                    Ok(loc - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Tactic { rounds })
    }

    /// Builds from 0-based locations. Callers guarantee `n >= 2` and range.
    pub(crate) fn from_zero_based(rounds: Vec<usize>) -> Self {
        debug_assert!(rounds.len() >= 2);
        debug_assert!(rounds.iter().all(|&l| l < rounds.len()));
        Tactic { rounds }
    }

    /// The tactic that stays at location `loc` (1-based) every round.
    pub fn constant(n: usize, loc: usize) -> Result<Self> {
        Tactic::new(n, &vec![loc; n])
    }

    /// Round `i` visits location `i`.
    pub fn identity(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Tactic::from_zero_based((0..n).collect()))
    }

    pub fn n(&self) -> usize {
        self.rounds.len()
    }

    /// 0-based locations, one per round.
    pub fn rounds(&self) -> &[usize] {
        &self.rounds
    }

    /// 1-based itinerary, as written in external formats.
    pub fn itinerary(&self) -> Vec<usize> {
        self.rounds.iter().map(|l| l + 1).collect()
    }

    /// Number of distinct locations visited, `|τ([n])|`.
    pub fn image_size(&self) -> usize {
        self.rounds.iter().collect::<BTreeSet<_>>().len()
    }

    /// Relabels locations in order of first visit. Waiting-time statistics over a
    /// uniform binding depend only on this form.
    pub fn canonical(&self) -> Tactic {
        let mut label = vec![usize::MAX; self.n()];
        let mut next = 0;
        let rounds = self
            .rounds
            .iter()
            .map(|&loc| {
                if label[loc] == usize::MAX {
                    label[loc] = next;
                    next += 1;
                }
                label[loc]
            })
            .collect();
        Tactic { rounds }
    }

    /// `ρ ∘ τ` for a relabelling `ρ` of locations.
    pub fn relabel(&self, relabeling: &Binding) -> Result<Tactic> {
        same_n(self.n(), relabeling.n())?;
        Ok(Tactic {
            rounds: self.rounds.iter().map(|&l| relabeling.map[l]).collect(),
        })
    }

    /// Every tactic on `n` locations in lexicographic order (`n^n` of them).
    pub fn all(n: usize) -> Result<Vec<Tactic>> {
        check_n(n)?;
        let total = n.checked_pow(n as u32).filter(|&t| t <= 1 << 24).ok_or(
            Error::CapExceeded {
                what: "n^n tactics",
                value: n,
                cap: 8,
            },
        )?;
        Ok((0..total)
            .map(|mut code| {
                let mut rounds = vec![0; n];
                for slot in rounds.iter_mut().rev() {
                    *slot = code % n;
                    code /= n;
                }
                Tactic { rounds }
            })
            .collect())
    }

    /// Uniformly random tactic.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tactic {
        Tactic {
            rounds: (0..n).map(|_| rng.random_range(0..n)).collect(),
        }
    }

    /// A random tactic whose image has exactly `image` locations.
    pub fn random_with_image<R: Rng + ?Sized>(n: usize, image: usize, rng: &mut R) -> Tactic {
        assert!((1..=n).contains(&image));
        let mut locations: Vec<usize> = (0..n).collect();
        locations.shuffle(rng);
        locations.truncate(image);
        let mut rounds: Vec<usize> = (0..n)
            .map(|i| {
                if i < image {
                    locations[i]
                } else {
                    locations[rng.random_range(0..image)]
                }
            })
            .collect();
        rounds.shuffle(rng);
        Tactic { rounds }
    }
}

impl fmt::Debug for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tactic{:?}", self.itinerary())
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.itinerary().iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for Tactic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.itinerary().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tactic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let itinerary = Vec::<usize>::deserialize(d)?;
        Tactic::new(itinerary.len(), &itinerary).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TacticKind {
    Passive,
    Active,
}

/// Passive iff the tactic visits at most `n/2` distinct locations.
pub fn classify(tactic: &Tactic) -> TacticKind {
    // |image| <= n/2  <=>  2|image| <= n, no rounding involved.
    if 2 * tactic.image_size() <= tactic.n() {
        TacticKind::Passive
    } else {
        TacticKind::Active
    }
}

/// The permutation matching A's location numbering to B's.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Binding {
    map: Vec<usize>,
}

impl Binding {
    /// From a 1-based mapping: `mapping[a-1]` is B's label for A's location `a`.
    pub fn new(mapping: &[usize]) -> Result<Self> {
        let n = mapping.len();
        check_n(n)?;
        let mut seen = vec![false; n];
        let mut map = Vec::with_capacity(n);
        for &b in mapping {
            if b == 0 || b > n || seen[b - 1] {
                return Err(Error::NotAPermutation(n));
            }
            seen[b - 1] = true;
            map.push(b - 1);
        }
        Ok(Binding { map })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Binding {
            map: (0..n).collect(),
        })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Binding {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Binding { map }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// 0-based image of a 0-based location.
    pub fn apply(&self, loc: usize) -> usize {
        self.map[loc]
    }

    pub fn mapping(&self) -> Vec<usize> {
        self.map.iter().map(|b| b + 1).collect()
    }

    pub fn inverse(&self) -> Binding {
        let mut inv = vec![0; self.n()];
        for (a, &b) in self.map.iter().enumerate() {
            inv[b] = a;
        }
        Binding { map: inv }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Binding) -> Binding {
        Binding {
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        }
    }
}

impl fmt::Debug for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Binding{:?}", self.mapping())
    }
}

pub(crate) fn same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::MismatchedN(a, b));
    }
    Ok(())
}

/// First round (1-based) in which the players meet, or `n + 1`.
pub fn play(a: &Tactic, b: &Tactic, binding: &Binding) -> Result<usize> {
    same_n(a.n(), b.n())?;
    same_n(a.n(), binding.n())?;
    Ok(a
        .rounds
        .iter()
        .zip(&b.rounds)
        .position(|(&la, &lb)| binding.map[la] == lb)
        .map_or(a.n() + 1, |i| i + 1))
}

/// A cell `(a, b)`: A's location `a` is bound to B's location `b`. 0-based.
pub type Cell = (usize, usize);

/// The deduplicated set of constraint cells `{(τ_A(i), τ_B(i))}`.
///
/// Cells are kept in order of first appearance, which the exact engine uses to
/// build round prefixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSet {
    n: usize,
    cells: Vec<Cell>,
}

impl PairSet {
    /// Builds a cell set (e.g. a bipartite edge set) from 1-based cells, dropping duplicates.
    pub fn from_cells(n: usize, cells: &[(usize, usize)]) -> Result<Self> {
        check_n(n)?;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &(a, b) in cells {
            for loc in [a, b] {
                if loc == 0 || loc > n {
                    return Err(Error::LocationOutOfRange { location: loc, n });
                }
            }
            if seen.insert((a - 1, b - 1)) {
                out.push((a - 1, b - 1));
            }
        }
        Ok(PairSet { n, cells: out })
    }

    pub(crate) fn from_zero_based(n: usize, cells: Vec<Cell>) -> Self {
        PairSet { n, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `m = |F|`.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// 0-based cells in order of first appearance.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// 1-based cells, sorted.
    pub fn cells_one_based(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.cells.iter().map(|&(a, b)| (a + 1, b + 1)).collect();
        out.sort_unstable();
        out
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.cells.contains(&(a, b))
    }
}

/// Round-ordered cells of a tactic pair, together with the round (0-based) in
/// which each distinct cell first appears.
pub(crate) fn cells_with_first_round(a: &Tactic, b: &Tactic) -> Vec<(Cell, usize)> {
    let mut seen = BTreeSet::new();
    a.rounds
        .iter()
        .zip(&b.rounds)
        .enumerate()
        .filter_map(|(i, (&la, &lb))| seen.insert((la, lb)).then_some(((la, lb), i)))
        .collect()
}

pub fn pair_set(a: &Tactic, b: &Tactic) -> Result<PairSet> {
    same_n(a.n(), b.n())?;
    Ok(PairSet {
        n: a.n(),
        cells: cells_with_first_round(a, b)
            .into_iter()
            .map(|(c, _)| c)
            .collect(),
    })
}

/// Two cells are disjoint when they share neither row nor column.
pub fn cells_disjoint(e: Cell, f: Cell) -> bool {
    e.0 != f.0 && e.1 != f.1
}
