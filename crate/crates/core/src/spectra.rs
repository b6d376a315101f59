//! Local spectra: an orthonormal basis for the span of a few successive
//! random-walk vectors started at the seeds, pushed forward by further walk
//! steps with re-orthonormalization after each one.

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::walk::{initial_vector, InitMode, Normalization, WalkOperator};

/// Residual norms below this fraction of the largest input column norm are
/// treated as linear dependence.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Column-orthonormal dense matrix; row `i` belongs to vertex `i` of the
/// graph the basis was built on.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    rows: usize,
    columns: Vec<Vec<f64>>,
}

impl SpectralBasis {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// `V x`.
    pub fn combine(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        let mut y = vec![0.0; self.rows];
        for (c, &coef) in self.columns.iter().zip(x) {
            for (yi, ci) in y.iter_mut().zip(c) {
                *yi += coef * ci;
            }
        }
        y
    }

    /// Largest entry of `|VᵀV − I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.columns.iter().enumerate() {
            for (j, b) in self.columns.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn require_symmetric(op: &WalkOperator<'_>) -> Result<()> {
    if op.mode() != Normalization::Symmetric {
        return Err(Error::InvalidParameter(
            "local spectra need the symmetric walk operator".into(),
        ));
    }
    Ok(())
}

/// The `l + 1` columns `p0, Ā p0, …, Ā^l p0`.
pub fn build_span(op: &WalkOperator<'_>, p0: &[f64], l: usize) -> Result<Vec<Vec<f64>>> {
    require_symmetric(op)?;
    if l == 0 {
        return Err(Error::InvalidParameter("span dimension l must be at least 1".into()));
    }
    let mut cols = Vec::with_capacity(l + 1);
    cols.push(p0.to_vec());
    for j in 0..l {
        let next = op.apply(&cols[j]);
        cols.push(next);
    }
    Ok(cols)
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
/// residual falls under [`RANK_TOLERANCE`] (relative to the largest input
/// norm) are dropped.
pub fn orthonormalize(columns: Vec<Vec<f64>>) -> Result<SpectralBasis> {
    let rows = columns.first().map_or(0, Vec::len);
    assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
    let scale = columns.iter().map(|c| norm(c)).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::ZeroSpan);
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
    for mut v in columns {
        for _pass in 0..2 {
            for q in &basis {
                let r = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= r * qi;
                }
            }
        }
        let len = norm(&v);
        if len > RANK_TOLERANCE * scale {
            v.iter_mut().for_each(|x| *x /= len);
            basis.push(v);
        }
    }
    if basis.is_empty() {
        return Err(Error::ZeroSpan);
    }
    Ok(SpectralBasis { rows, columns: basis })
}

/// Applies `V ← orth(Ā V)` `steps` times.
pub fn advance_basis(op: &WalkOperator<'_>, basis: SpectralBasis, steps: usize) -> Result<SpectralBasis> {
    require_symmetric(op)?;
    let mut v = basis;
    for _ in 0..steps {
        let pushed = v.columns.iter().map(|c| op.apply(c)).collect();
        v = orthonormalize(pushed)?;
    }
    Ok(v)
}

/// Local spectra around `seeds` after `walk_steps` walk steps with an
/// `l + 1` column span. `walk_steps = 1` is the orthonormalized span itself.
pub fn local_spectra(
    op: &WalkOperator<'_>,
    seeds: &VertexSet,
    walk_steps: usize,
    l: usize,
    init: InitMode,
) -> Result<SpectralBasis> {
    if walk_steps == 0 {
        return Err(Error::InvalidParameter("walk steps k must be at least 1".into()));
    }
    let g = op.graph();
    let p0 = initial_vector(g, seeds, init)?.to_dense(g.n());
    let span = build_span(op, &p0, l)?;
    advance_basis(op, orthonormalize(span)?, walk_steps - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::k3;
    use crate::graph::Graph;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn span_on_triangle() {
        let g = k3();
        let op = WalkOperator::symmetric(&g);
        let cols = build_span(&op, &[1.0, 0.0, 0.0], 1).unwrap();
        assert_eq!(cols[0], vec![1.0, 0.0, 0.0]);
        for x in &cols[1] {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(build_span(&op, &[1.0, 0.0, 0.0], 0).is_err());
        assert!(build_span(&WalkOperator::stochastic(&g), &[1.0, 0.0, 0.0], 1).is_err());
    }

    #[test]
    fn orthonormalize_small_cases() {
        let b = orthonormalize(vec![vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(b.columns(), &[vec![1.0, 0.0], vec![0.0, 1.0]]);

        let b = orthonormalize(vec![vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.column(0), &[1.0, 0.0]);

        let b = orthonormalize(vec![vec![H, H], vec![1.0, 0.0]]).unwrap();
        assert!(b.orthogonality_error() < 1e-10);
        let expected = [[H, H], [H, -H]];
        for (col, want) in b.columns().iter().zip(expected) {
            for (x, w) in col.iter().zip(want) {
                assert!((x - w).abs() < 1e-12);
            }
        }

        assert!(matches!(
            orthonormalize(vec![vec![0.0; 3], vec![0.0; 3]]),
            Err(Error::ZeroSpan)
        ));
    }

    #[test]
    fn advance_zero_steps_is_identity() {
        let g = k3();
        let op = WalkOperator::symmetric(&g);
        let b = orthonormalize(vec![vec![1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(advance_basis(&op, b.clone(), 0).unwrap(), b);
    }

    #[test]
    fn advance_one_step_is_normalized_product() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let op = WalkOperator::symmetric(&g);
        let start = vec![0.5, -0.5, 0.5, 0.5];
        let b = orthonormalize(vec![start.clone()]).unwrap();
        let advanced = advance_basis(&op, b, 1).unwrap();
        let pushed = op.apply(&start);
        let len = norm(&pushed);
        for (x, p) in advanced.column(0).iter().zip(&pushed) {
            assert!((x - p / len).abs() < 1e-14);
        }
    }

    #[test]
    fn k1_is_the_orthonormalized_span() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)]).unwrap();
        let op = WalkOperator::symmetric(&g);
        let seeds = VertexSet::new([0]);
        let v = local_spectra(&op, &seeds, 1, 3, InitMode::Uniform).unwrap();
        let span = build_span(&op, &[1.0, 0.0, 0.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(v, orthonormalize(span).unwrap());
        assert!(v.dim() <= 4);
    }

    #[test]
    fn unreachable_rows_are_exactly_zero() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let op = WalkOperator::symmetric(&g);
        let v = local_spectra(&op, &VertexSet::new([0, 1]), 3, 3, InitMode::Uniform).unwrap();
        for c in v.columns() {
            assert_eq!(&c[3..], &[0.0, 0.0, 0.0]);
        }
        assert!(v.orthogonality_error() < 1e-10);
    }
}
