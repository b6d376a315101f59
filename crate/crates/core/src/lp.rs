//! Minimum one-norm vector in the span of a local basis.
//!
//! Given a column-orthonormal `V` (n × d) and seeds `S`, find
//!
//! ```text
//! min  eᵀy   s.t.  y = V x,  y ≥ 0,  y(S) ≥ 1
//! ```
//!
//! In `x` alone this is `min cᵀx` with `c = Vᵀe`, subject to `V_i x ≥ b_i`
//! for every row (`b_i = 1` on seeds, 0 elsewhere). With only `d ≤ 6`
//! unknowns but thousands of rows, the solver works on the dual
//!
//! ```text
//! max  bᵀλ   s.t.  Vᵀλ = c,  λ ≥ 0
//! ```
//!
//! which has just `d` equality rows. A revised primal simplex with Bland's
//! rule solves it, refactoring the `d × d` basis at every pivot. The primal
//! `x` is read off the optimal simplex multipliers. The dual is always
//! feasible (`λ = e`), so an unbounded dual means the primal is infeasible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::spectra::SpectralBasis;

pub const PIVOT_TOLERANCE: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;

/// Slack allowed when re-checking a returned solution.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseIndicatorSolution {
    /// Per-vertex score `V x`, aligned with the basis rows.
    pub y: Vec<f64>,
    /// Coefficients in basis coordinates.
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
}

impl SparseIndicatorSolution {
    fn infeasible() -> Self {
        SparseIndicatorSolution {
            y: Vec::new(),
            x: Vec::new(),
            objective: f64::INFINITY,
            status: LpStatus::Infeasible,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves the seed-constrained minimum one-norm problem.
pub fn solve_min_one_norm(basis: &SpectralBasis, seeds: &VertexSet) -> Result<SparseIndicatorSolution> {
    solve_with_floor(basis, seeds, 1.0)
}

/// Same as [`solve_min_one_norm`] with `y(S) ≥ floor`.
pub fn solve_with_floor(basis: &SpectralBasis, seeds: &VertexSet, floor: f64) -> Result<SparseIndicatorSolution> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    if !(floor > 0.0) {
        return Err(Error::InvalidParameter("seed floor must be positive".into()));
    }
    seeds.check_bounds(basis.rows())?;

    let n = basis.rows();
    let d = basis.dim();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| basis.row(i)).collect();
    let rhs: Vec<f64> = (0..n).map(|i| if seeds.contains(i) { floor } else { 0.0 }).collect();
    let c: Vec<f64> = (0..d).map(|k| basis.column(k).iter().sum()).collect();

    let mut lp = DualSimplex::new(&rows, &c);
    let cost_scale = 1.0 + c.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // phase 1: minimize the artificial total
    let phase1: Vec<f64> = (0..n + d).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    match lp.optimize(&phase1, true, cost_scale)? {
        Outcome::Optimal => {}
        // cannot happen: the phase-1 objective is bounded below by zero
        Outcome::Unbounded => return Err(Error::Numerical("phase 1 reported unbounded".into())),
    }
    let residual: f64 = lp
        .basic_values()
        .iter()
        .zip(&lp.basis)
        .filter(|(_, &j)| j >= n)
        .map(|(v, _)| v)
        .sum();
    if residual > 1e-9 * cost_scale {
        return Err(Error::Numerical(format!("dual phase 1 residual {residual:e}")));
    }
    lp.drive_out_artificials();

    // phase 2: maximize bᵀλ, i.e. minimize -bᵀλ, artificials barred
    let phase2: Vec<f64> = (0..n + d).map(|j| if j < n { -rhs[j] } else { 0.0 }).collect();
    if lp.optimize(&phase2, false, 1.0 + floor)? == Outcome::Unbounded {
        return Ok(SparseIndicatorSolution::infeasible());
    }

    let pi = lp.multipliers(&phase2);
    let x: Vec<f64> = (0..d).map(|k| -lp.sign[k] * pi[k]).collect();
    let y = basis.combine(&x);
    let objective = y.iter().sum();
    let sol = SparseIndicatorSolution {
        y,
        x,
        objective,
        status: LpStatus::Optimal,
    };
    if !is_feasible(&sol, seeds, floor) {
        return Err(Error::Numerical("recovered solution violates the constraints".into()));
    }
    Ok(sol)
}

/// Checks `y ≥ 0` and `y(S) ≥ floor` within [`FEASIBILITY_TOLERANCE`].
pub fn is_feasible(sol: &SparseIndicatorSolution, seeds: &VertexSet, floor: f64) -> bool {
    sol.y.iter().all(|&v| v >= -FEASIBILITY_TOLERANCE)
        && seeds.iter().all(|s| sol.y[s] >= floor - FEASIBILITY_TOLERANCE)
}

/// Scores within this fraction of the largest score count as zero when
/// ranking, so round-off around the zero level does not reorder vertices.
pub const ZERO_SCORE_TOLERANCE: f64 = 1e-9;

/// Vertex ids by descending score, ties by ascending id.
pub fn rank_vertices(sol: &SparseIndicatorSolution) -> Vec<usize> {
    let top = sol.y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let key: Vec<f64> = sol
        .y
        .iter()
        .map(|&v| if v.abs() <= ZERO_SCORE_TOLERANCE * top { 0.0 } else { v })
        .collect();
    let mut order: Vec<usize> = (0..key.len()).collect();
    order.sort_by(|&a, &b| key[b].total_cmp(&key[a]).then(a.cmp(&b)));
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Unbounded,
}

/// Revised simplex state for `min costᵀλ  s.t.  A λ = c,  λ ≥ 0` where the
/// columns of `A` are the basis rows (sign-adjusted so `c ≥ 0`) followed by
/// `d` artificial unit columns.
struct DualSimplex<'a> {
    rows: &'a [Vec<f64>],
    rhs: Vec<f64>,
    sign: Vec<f64>,
    d: usize,
    basis: Vec<usize>,
}

impl<'a> DualSimplex<'a> {
    fn new(rows: &'a [Vec<f64>], c: &[f64]) -> Self {
        let d = c.len();
        let sign: Vec<f64> = c.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let rhs = c.iter().zip(&sign).map(|(v, s)| v * s).collect();
        let n = rows.len();
        DualSimplex {
            rows,
            rhs,
            sign,
            d,
            basis: (n..n + d).collect(),
        }
    }

    fn n(&self) -> usize {
        self.rows.len()
    }

    fn column(&self, j: usize) -> Vec<f64> {
        if j < self.n() {
            self.rows[j].iter().zip(&self.sign).map(|(a, s)| a * s).collect()
        } else {
            let mut e = vec![0.0; self.d];
            e[j - self.n()] = 1.0;
            e
        }
    }

    fn basis_matrix(&self) -> Vec<Vec<f64>> {
        // row-major B, columns are the basic columns
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&j| self.column(j)).collect();
        (0..self.d).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
    }

    fn basic_values(&self) -> Vec<f64> {
        let b = self.basis_matrix();
        solve_dense(&b, &self.rhs).unwrap_or_else(|| vec![f64::NAN; self.d])
    }

    fn multipliers(&self, cost: &[f64]) -> Vec<f64> {
        let b = self.basis_matrix();
        let bt: Vec<Vec<f64>> = (0..self.d).map(|r| (0..self.d).map(|c| b[c][r]).collect()).collect();
        let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
        solve_dense(&bt, &cb).unwrap_or_else(|| vec![f64::NAN; self.d])
    }

    fn optimize(&mut self, cost: &[f64], allow_artificial: bool, cost_scale: f64) -> Result<Outcome> {
        let n = self.n();
        let limit = if allow_artificial { n + self.d } else { n };
        let tol = PIVOT_TOLERANCE * cost_scale;
        for _ in 0..MAX_PIVOTS {
            let b = self.basis_matrix();
            let pi = self.multipliers(cost);
            if pi.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical("singular simplex basis".into()));
            }
            // Bland: lowest-index improving column
            let entering = (0..limit).find(|&j| {
                !self.basis.contains(&j) && {
                    let col = self.column(j);
                    cost[j] - dot(&pi, &col) < -tol
                }
            });
            let Some(q) = entering else {
                return Ok(Outcome::Optimal);
            };
            let u =
                solve_dense(&b, &self.column(q)).ok_or_else(|| Error::Numerical("singular simplex basis".into()))?;
            let xb = solve_dense(&b, &self.rhs).ok_or_else(|| Error::Numerical("singular simplex basis".into()))?;
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.d {
                if u[r] > PIVOT_TOLERANCE {
                    let ratio = xb[r].max(0.0) / u[r];
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => ratio < best || (ratio == best && self.basis[r] < self.basis[lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.basis[r] = q,
                None => return Ok(Outcome::Unbounded),
            }
        }
        Err(Error::Numerical("simplex pivot limit reached".into()))
    }

    /// Swaps zero-level artificials out of the basis for real columns.
    fn drive_out_artificials(&mut self) {
        let n = self.n();
        for r in 0..self.d {
            if self.basis[r] < n {
                continue;
            }
            let b = self.basis_matrix();
            let replacement = (0..n)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| solve_dense(&b, &self.column(j)).is_some_and(|u| u[r].abs() > PIVOT_TOLERANCE));
            if let Some(j) = replacement {
                self.basis[r] = j;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub(crate) fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &v)| {
            let mut r = row.clone();
            r.push(v);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for k in col..=n {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (m[r][n] - tail) / m[r][r];
    }
    Some(x)
}
