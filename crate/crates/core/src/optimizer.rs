//! Searching for good strategies: the Anderson–Weber stay probability, and
//! local minima of the symmetric objective `a ↦ Φ(a, a)` on tiny `n`.

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::bounds::epsilon;
use crate::error::{Error, Result};
use crate::exact::{ExactEngine, WaitingTimeCache};
use crate::model::{check_n, Tactic};
use crate::montecarlo::estimate_expected_waiting;
use crate::par::map_indexed;
use crate::rational::{fraction_string, from_f64, nearby_rational, qi, to_decimal, to_f64, Q};
use crate::strategy::Strategy;
use crate::zoo::{anderson_weber, AwConfig, AW_TABLE_MAX_N};

/// Largest `n` for the symmetric search (`n^n ≤ 256` tactics).
pub const SYMMETRIC_MAX_N: usize = 4;

const GOLDEN_ITERATIONS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaMode {
    Exact,
    Mc,
}

/// Simulation settings for [`ThetaMode::Mc`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McSettings {
    pub horizon: usize,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaOptimum {
    pub n: usize,
    pub mode: ThetaMode,
    pub theta: f64,
    /// Objective at `theta`: exact `p/q` in exact mode, absent in MC mode.
    pub value_exact: Option<String>,
    pub value: f64,
    pub value_over_n: f64,
    /// Coarse grid as `(θ, objective)`.
    pub grid: Vec<(f64, f64)>,
    pub seed: Option<u64>,
}

/// `Φ(θ)` for the truncated Anderson–Weber table. The table is affine in `θ`,
/// so `Φ(θ) = θ² S + 2θ(1-θ) M + (1-θ)² P` with `S`, `P` the pure stay/sweep
/// values and `M` the cross term.
struct AwQuadratic {
    stay: Q,
    cross: Q,
    sweep: Q,
}

impl AwQuadratic {
    fn new(engine: &ExactEngine, n: usize) -> Result<Self> {
        let table = |theta: Q| -> Result<Vec<(Tactic, Q)>> {
            Ok(anderson_weber(&AwConfig::truncated(n, theta))?.require_support()?.to_vec())
        };
        let (s, p) = (table(Q::one())?, table(Q::zero())?);
        let mut cache = WaitingTimeCache::new(*engine);
        Ok(AwQuadratic {
            stay: cache.phi(&s, &s)?,
            cross: cache.phi(&s, &p)?,
            sweep: cache.phi(&p, &p)?,
        })
    }

    fn at(&self, theta: &Q) -> Q {
        let rest = Q::one() - theta;
        theta * theta * &self.stay + qi(2) * theta * &rest * &self.cross + &rest * &rest * &self.sweep
    }
}

/// Golden-section minimisation on `[lo, hi]`.
fn golden_section(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Best `θ` for symmetric Anderson–Weber play.
///
/// Evaluates `resolution` evenly spaced values on `[0, 1]`, then refines by
/// golden-section search between the neighbours of the best grid point. With
/// fewer than three grid points there is nothing to bracket and the best grid
/// point is returned.
pub fn optimize_theta(
    engine: &ExactEngine,
    n: usize,
    mode: ThetaMode,
    resolution: usize,
    mc: Option<McSettings>,
) -> Result<ThetaOptimum> {
    check_n(n)?;
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    let quadratic = match mode {
        ThetaMode::Exact => {
            if n > AW_TABLE_MAX_N {
                return Err(Error::CapExceeded {
                    what: "n for exact theta search",
                    value: n,
                    cap: AW_TABLE_MAX_N,
                });
            }
            Some(AwQuadratic::new(engine, n)?)
        }
        ThetaMode::Mc => None,
    };
    let settings = match (mode, mc) {
        (ThetaMode::Mc, None) => return Err(Error::InvalidArgument("mc mode needs simulation settings".into())),
        (_, s) => s,
    };
    let objective = |theta: f64| -> Result<f64> {
        match &quadratic {
            Some(quad) => Ok(to_f64(&quad.at(&from_f64(theta)))),
            None => {
                let s = settings.expect("checked above");
                let aw = anderson_weber(&AwConfig::multi_block(n, from_f64(theta), s.horizon))?;
                Ok(estimate_expected_waiting(&aw, &aw, s.horizon, s.trials, s.seed)?.mean)
            }
        }
    };
    let step = 1.0 / (resolution - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..resolution)
        .map(|i| {
            let theta = if i + 1 == resolution { 1.0 } else { i as f64 * step };
            objective(theta).map(|v| (theta, v))
        })
        .collect::<Result<_>>()?;
    let best = (0..grid.len())
        .reduce(|b, i| if grid[i].1 < grid[b].1 { i } else { b })
        .expect("non-empty grid");
    let (mut theta, mut value) = grid[best];
    if resolution >= 3 {
        let lo = grid[best.saturating_sub(1)].0;
        let hi = grid[(best + 1).min(grid.len() - 1)].0;
        let (t, v) = golden_section(lo, hi, objective)?;
        if v < value {
            theta = t;
            value = v;
        }
    }
    let value_exact = quadratic.as_ref().map(|quad| {
        let exact = quad.at(&from_f64(theta));
        value = to_f64(&exact);
        crate::rational::to_fraction(&exact)
    });
    Ok(ThetaOptimum {
        n,
        mode,
        theta,
        value_exact,
        value,
        value_over_n: value / n as f64,
        grid,
        seed: settings.filter(|_| mode == ThetaMode::Mc).map(|s| s.seed),
    })
}

/// The symmetric objective restricted to canonical tactic classes.
///
/// `w` depends on each tactic only through its relabelling class, so
/// `Φ(a, a)` only sees the total weight per class; optimising over one
/// representative per class loses nothing.
#[derive(Clone, Debug)]
pub struct SymmetricProblem {
    pub n: usize,
    pub tactics: Vec<Tactic>,
    pub exact: Vec<Vec<Q>>,
    pub matrix: Vec<Vec<f64>>,
}

impl SymmetricProblem {
    pub fn new(engine: &ExactEngine, n: usize) -> Result<Self> {
        check_n(n)?;
        if n > SYMMETRIC_MAX_N {
            return Err(Error::CapExceeded {
                what: "n for the symmetric search",
                value: n,
                cap: SYMMETRIC_MAX_N,
            });
        }
        let mut tactics: Vec<Tactic> = Tactic::all(n)?.into_iter().filter(|t| t.canonical() == *t).collect();
        tactics.dedup();
        let mut cache = WaitingTimeCache::new(*engine);
        let exact = tactics
            .iter()
            .map(|a| tactics.iter().map(|b| cache.w(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let matrix = exact.iter().map(|row| row.iter().map(to_f64).collect()).collect();
        Ok(SymmetricProblem {
            n,
            tactics,
            exact,
            matrix,
        })
    }

    pub fn len(&self) -> usize {
        self.tactics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tactics.is_empty()
    }

    pub fn index_of(&self, tactic: &Tactic) -> Option<usize> {
        let c = tactic.canonical();
        self.tactics.iter().position(|t| *t == c)
    }

    pub fn value(&self, point: &[f64]) -> f64 {
        let mut total = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            if point[i] == 0.0 {
                continue;
            }
            total += point[i] * row.iter().zip(point).map(|(w, x)| w * x).sum::<f64>();
        }
        total
    }

    /// Exact `Φ(a, a)` of a rational point.
    pub fn exact_value(&self, point: &[Q]) -> Q {
        let mut total = Q::zero();
        for (i, row) in self.exact.iter().enumerate() {
            if point[i].is_zero() {
                continue;
            }
            for (j, w) in row.iter().enumerate() {
                if !point[j].is_zero() {
                    total += &point[i] * &point[j] * w;
                }
            }
        }
        total
    }

    /// The float point snapped to nearby small-denominator rationals and
    /// renormalised to sum to exactly 1.
    pub fn rationalise(&self, point: &[f64]) -> Vec<Q> {
        let raw: Vec<Q> = point
            .iter()
            .map(|&x| if x > 0.0 { nearby_rational(x, 1e-12) } else { Q::zero() })
            .collect();
        let total = raw.iter().fold(Q::zero(), |acc, x| acc + x);
        raw.into_iter().map(|x| x / &total).collect()
    }

    /// Exact stationary points on faces of the simplex spanned by the large
    /// coordinates of `point`: `W_S x = ν·1`, `Σ x = 1`. Frank–Wolfe only
    /// approaches a face-interior optimum sublinearly; this lands on it. Returns
    /// the best feasible candidate, if any.
    pub fn polish(&self, point: &[f64]) -> Option<Vec<Q>> {
        let mut best: Option<(Q, Vec<Q>)> = None;
        let mut last: Vec<usize> = Vec::new();
        for threshold in [1e-9, 1e-6, 1e-4, 1e-2, 1e-1] {
            let support: Vec<usize> = (0..self.len()).filter(|&i| point[i] > threshold).collect();
            if support.is_empty() || support == last {
                continue;
            }
            last = support.clone();
            let Some(x) = self.face_stationary(&support) else {
                continue;
            };
            let value = self.exact_value(&x);
            if best.as_ref().is_none_or(|(v, _)| value < *v) {
                best = Some((value, x));
            }
        }
        best.map(|(_, x)| x)
    }

    fn face_stationary(&self, support: &[usize]) -> Option<Vec<Q>> {
        let k = support.len();
        let mut rows: Vec<Vec<Q>> = support
            .iter()
            .map(|&i| {
                let mut row: Vec<Q> = support.iter().map(|&j| self.exact[i][j].clone()).collect();
                row.push(-Q::one());
                row.push(Q::zero());
                row
            })
            .collect();
        let mut last = vec![Q::one(); k];
        last.push(Q::zero());
        last.push(Q::one());
        rows.push(last);
        let solution = solve_exact(rows)?;
        if solution[..k].iter().any(|x| *x < Q::zero()) {
            return None;
        }
        let mut x = vec![Q::zero(); self.len()];
        for (slot, &i) in support.iter().enumerate() {
            x[i] = solution[slot].clone();
        }
        Some(x)
    }
}

/// Gauss–Jordan elimination on an augmented square system; `None` if singular.
fn solve_exact(mut rows: Vec<Vec<Q>>) -> Option<Vec<Q>> {
    let n = rows.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        let inv = Q::one() / &rows[col][col];
        for v in rows[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                let pivot_row = rows[col].clone();
                for (v, p) in rows[r].iter_mut().zip(&pivot_row) {
                    *v -= &factor * p;
                }
            }
        }
    }
    Some(rows.into_iter().map(|row| row[n].clone()).collect())
}

/// One Frank–Wolfe descent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FwRun {
    pub point: Vec<f64>,
    pub value: f64,
    pub start_value: f64,
    pub iterations: usize,
    pub gap: f64,
    /// The objective never increased between accepted iterates.
    pub monotone: bool,
}

/// Frank–Wolfe on `x ↦ xᵀWx` over the simplex, with exact line search along
/// each direction (the objective is quadratic along any line). Stops once
/// the duality gap is below `tolerance`.
pub fn frank_wolfe(matrix: &[Vec<f64>], start: &[f64], tolerance: f64, max_iterations: usize) -> FwRun {
    let k = matrix.len();
    let mut x = start.to_vec();
    let mut wx: Vec<f64> = (0..k).map(|i| (0..k).map(|j| matrix[i][j] * x[j]).sum()).collect();
    let mut value: f64 = x.iter().zip(&wx).map(|(a, b)| a * b).sum();
    let start_value = value;
    let mut monotone = true;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iterations {
        // Gradient is 2Wx; the linear minimiser is the vertex with smallest (Wx)_s.
        let s = (0..k)
            .reduce(|b, i| if wx[i] < wx[b] { i } else { b })
            .expect("non-empty simplex");
        // Along d = e_s - x: f(x + γd) = f + 2γ·slope + γ²·curv.
        let slope = wx[s] - value;
        let curv = matrix[s][s] - 2.0 * wx[s] + value;
        gap = -2.0 * slope;
        if gap < tolerance {
            break;
        }
        let gamma = if curv > 0.0 {
            (-slope / curv).clamp(0.0, 1.0)
        } else if 2.0 * slope + curv < 0.0 {
            1.0
        } else {
            0.0
        };
        if gamma == 0.0 {
            break;
        }
        for (i, xi) in x.iter_mut().enumerate() {
            *xi *= 1.0 - gamma;
            if i == s {
                *xi += gamma;
            }
        }
        for (i, wi) in wx.iter_mut().enumerate() {
            *wi = (1.0 - gamma) * *wi + gamma * matrix[i][s];
        }
        let next: f64 = x.iter().zip(&wx).map(|(a, b)| a * b).sum();
        if next > value + 1e-12 * value.abs().max(1.0) {
            monotone = false;
        }
        value = next;
        iterations += 1;
    }
    FwRun {
        point: x,
        value,
        start_value,
        iterations,
        gap,
        monotone,
    }
}

/// A uniformly random point of the simplex (Dirichlet(1, …, 1)).
pub fn dirichlet_start(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetricOptimum {
    pub n: usize,
    pub restarts: usize,
    pub seed: u64,
    pub best_restart: usize,
    /// Support of the returned point: `(tactic, weight)` with weight `p/q`.
    pub support: Vec<(Tactic, String)>,
    pub value: f64,
    #[serde(with = "fraction_string")]
    pub value_exact: Q,
    pub value_decimal: String,
    #[serde(with = "fraction_string")]
    pub floor: Q,
    /// `value_exact ≥ (n+1)/2 + 2^-36 n`.
    pub certified: bool,
    pub iterations: usize,
    pub monotone: bool,
    #[serde(skip)]
    pub point: Vec<Q>,
}

impl SymmetricOptimum {
    pub fn strategy(&self, problem: &SymmetricProblem) -> Result<Strategy> {
        let table = problem
            .tactics
            .iter()
            .zip(&self.point)
            .filter(|(_, w)| !w.is_zero())
            .map(|(t, w)| (t.clone(), w.clone()))
            .collect();
        Strategy::from_table(self.n, "symmetric-optimum", table)
    }
}

pub const FW_TOLERANCE: f64 = 1e-10;
pub const FW_MAX_ITERATIONS: usize = 100_000;

/// Multistart Frank–Wolfe; the best local minimum is re-evaluated exactly.
pub fn optimize_symmetric_strategy(
    engine: &ExactEngine,
    n: usize,
    restarts: usize,
    seed: u64,
) -> Result<SymmetricOptimum> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let problem = SymmetricProblem::new(engine, n)?;
    let runs = map_indexed(restarts, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let start = dirichlet_start(problem.len(), &mut rng);
        frank_wolfe(&problem.matrix, &start, FW_TOLERANCE, FW_MAX_ITERATIONS)
    });
    let best = (0..runs.len())
        .reduce(|b, i| if runs[i].value < runs[b].value { i } else { b })
        .expect("at least one restart");
    Ok(certify(&problem, &runs[best], restarts, seed, best, runs.iter().all(|r| r.monotone)))
}

/// Exact re-evaluation of a Frank–Wolfe result.
pub fn certify(
    problem: &SymmetricProblem,
    run: &FwRun,
    restarts: usize,
    seed: u64,
    best_restart: usize,
    monotone: bool,
) -> SymmetricOptimum {
    let n = problem.n;
    let mut point = problem.rationalise(&run.point);
    let mut value_exact = problem.exact_value(&point);
    if let Some(polished) = problem.polish(&run.point) {
        let value = problem.exact_value(&polished);
        if value < value_exact {
            point = polished;
            value_exact = value;
        }
    }
    let floor = (qi(n as i64) + qi(1)) / qi(2) + epsilon() * qi(n as i64);
    SymmetricOptimum {
        n,
        restarts,
        seed,
        best_restart,
        support: problem
            .tactics
            .iter()
            .zip(&point)
            .filter(|(_, w)| !w.is_zero())
            .map(|(t, w)| (t.clone(), crate::rational::to_fraction(w)))
            .collect(),
        value: to_f64(&value_exact),
        value_decimal: to_decimal(&value_exact),
        certified: value_exact >= floor,
        value_exact,
        floor,
        iterations: run.iterations,
        monotone,
        point,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn n2_problem_and_optimum() {
        let e = ExactEngine::default();
        let p = SymmetricProblem::new(&e, 2).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.exact, vec![vec![qi(2), q(3, 2)], vec![q(3, 2), qi(2)]]);
        let opt = optimize_symmetric_strategy(&e, 2, 8, 1).unwrap();
        assert!((opt.value - 1.75).abs() < 1e-9);
        assert_eq!(opt.value_exact, q(7, 4));
        assert!(opt.certified && opt.monotone);
    }

    #[test]
    fn mommy_start_descends() {
        let e = ExactEngine::default();
        for n in 3..=4 {
            let p = SymmetricProblem::new(&e, n).unwrap();
            let mut start = vec![0.0; p.len()];
            start[p.index_of(&Tactic::identity(n).unwrap()).unwrap()] = 1.0;
            let run = frank_wolfe(&p.matrix, &start, FW_TOLERANCE, FW_MAX_ITERATIONS);
            assert!(run.monotone);
            assert!(run.value < run.start_value - 1e-6);
            assert!(run.point.iter().filter(|&&x| x > 0.0).count() > 1);
        }
    }

    #[test]
    fn exact_theta_n2_is_flat() {
        let r = optimize_theta(&ExactEngine::default(), 2, ThetaMode::Exact, 11, None).unwrap();
        assert_eq!(r.value_exact.as_deref(), Some("7/4"));
        assert!(r.grid.iter().all(|&(_, v)| (v - 1.75).abs() < 1e-15));
    }

    #[test]
    fn resolution_two_picks_an_endpoint() {
        let r = optimize_theta(&ExactEngine::default(), 4, ThetaMode::Exact, 2, None).unwrap();
        assert!(r.theta == 0.0 || r.theta == 1.0);
        let other = r.grid.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
        assert_eq!(r.value, other);
    }

    #[test]
    fn exact_theta_matches_direct_phi() {
        let e = ExactEngine::default();
        let quad = AwQuadratic::new(&e, 4).unwrap();
        for theta in [q(0, 1), q(1, 4), q(2, 3), q(1, 1)] {
            let s = anderson_weber(&AwConfig::truncated(4, theta.clone())).unwrap();
            assert_eq!(quad.at(&theta), e.bilinear_phi(&s, &s).unwrap());
        }
    }

    #[test]
    fn polished_optima_are_stationary() {
        let e = ExactEngine::default();
        for (n, value) in [(3, q(7, 3)), (4, q(77, 26))] {
            let p = SymmetricProblem::new(&e, n).unwrap();
            let opt = optimize_symmetric_strategy(&e, n, 8, 5).unwrap();
            assert_eq!(opt.value_exact, value);
            // No vertex is a descent direction: (W x)_i >= x'Wx for every i.
            for row in &p.exact {
                let grad = row.iter().zip(&opt.point).fold(Q::zero(), |acc, (w, x)| acc + w * x);
                assert!(grad >= opt.value_exact);
            }
        }
    }

    #[test]
    fn face_solve_rejects_infeasible_supports() {
        let e = ExactEngine::default();
        let p = SymmetricProblem::new(&e, 2).unwrap();
        assert_eq!(p.polish(&[0.5, 0.5]).unwrap(), vec![q(1, 2), q(1, 2)]);
        assert_eq!(solve_exact(vec![vec![qi(1), qi(1), qi(1)], vec![qi(2), qi(2), qi(2)]]), None);
    }

    #[test]
    fn symmetric_is_deterministic() {
        let e = ExactEngine::default();
        let a = optimize_symmetric_strategy(&e, 3, 6, 42).unwrap();
        let b = optimize_symmetric_strategy(&e, 3, 6, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.certified);
    }
}
