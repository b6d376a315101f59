//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use lemon::spectra::SpectralBasis;
use lemon::{Graph, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Connected sparse graph: a random spanning tree plus random extra edges.
pub fn connected(n: usize, extra: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (r.gen_range(0..v), v)).collect();
    for _ in 0..extra {
        let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
        edges.push((u, v));
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Conductance by enumerating every edge once.
pub fn brute_conductance(g: &Graph, s: &[bool]) -> Option<f64> {
    let (mut cut, mut vol_in, mut vol_out) = (0u64, 0u64, 0u64);
    for u in 0..g.n() {
        for &v in g.neighbors(u) {
            if s[u] {
                vol_in += 1;
            } else {
                vol_out += 1;
            }
            if u < v && s[u] != s[v] {
                cut += 1;
            }
        }
    }
    let inside = s.iter().filter(|&&b| b).count();
    let denom = vol_in.min(vol_out);
    if inside == 0 || inside == g.n() || denom == 0 {
        None
    } else {
        Some(cut as f64 / denom as f64)
    }
}

/// Dense symmetric walk matrix `D̂^{-1/2}(A+I)D̂^{-1/2}` built from scratch.
pub fn dense_symmetric_walk(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut a = vec![vec![0.0; n]; n];
    for u in 0..n {
        a[u][u] = 1.0;
        for &v in g.neighbors(u) {
            a[u][v] = 1.0;
        }
    }
    let dhat: Vec<f64> = (0..n).map(|u| a[u].iter().sum()).collect();
    for u in 0..n {
        for v in 0..n {
            a[u][v] /= (dhat[u] * dhat[v]).sqrt();
        }
    }
    a
}

pub fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// Residual norm of `x` after projecting onto the columns of `basis`.
pub fn projection_residual(basis: &SpectralBasis, x: &[f64]) -> f64 {
    let mut r = x.to_vec();
    for c in basis.columns() {
        let coef: f64 = c.iter().zip(x).map(|(a, b)| a * b).sum();
        for (ri, ci) in r.iter_mut().zip(c) {
            *ri -= coef * ci;
        }
    }
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Random orthonormal `n × d` basis through the library's own
/// Gram-Schmidt; only used to produce LP inputs. Like a walk basis, the
/// first column is strictly positive, so the LP is always feasible.
pub fn random_basis(n: usize, d: usize, seed: u64) -> SpectralBasis {
    basis_with_floor(n, d, seed, 0.05)
}

/// Same, but every column has mixed signs; these LPs are often infeasible.
pub fn signed_basis(n: usize, d: usize, seed: u64) -> SpectralBasis {
    basis_with_floor(n, d, seed, -1.0)
}

fn basis_with_floor(n: usize, d: usize, seed: u64, first_lo: f64) -> SpectralBasis {
    let mut r = rng(seed);
    let cols = (0..d)
        .map(|j| {
            let lo = if j == 0 { first_lo } else { -1.0 };
            (0..n).map(|_| r.gen_range(lo..1.0)).collect()
        })
        .collect();
    lemon::spectra::orthonormalize(cols).unwrap()
}

/// Minimum of `Σ V x` over `V x ≥ b` by enumerating every vertex of the
/// feasible polyhedron: each `d`-subset of rows made tight, solved with
/// Cramer-free elimination, then checked against all rows. `None` when no
/// vertex is feasible.
pub fn brute_force_lp(basis: &SpectralBasis, seeds: &VertexSet) -> Option<(f64, Vec<f64>)> {
    let n = basis.rows();
    let d = basis.dim();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| basis.row(i)).collect();
    let b: Vec<f64> = (0..n).map(|i| if seeds.contains(i) { 1.0 } else { 0.0 }).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for subset in combinations(n, d) {
        let a: Vec<Vec<f64>> = subset.iter().map(|&i| rows[i].clone()).collect();
        let rhs: Vec<f64> = subset.iter().map(|&i| b[i]).collect();
        let Some(x) = gauss(a, rhs) else { continue };
        let y: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().zip(&x).map(|(p, q)| p * q).sum())
            .collect();
        if y.iter().zip(&b).all(|(yi, bi)| *yi >= bi - 1e-9) {
            let obj: f64 = y.iter().sum();
            if best.as_ref().map_or(true, |(o, _)| obj < *o) {
                best = Some((obj, y));
            }
        }
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}
