//! Random-walk propagation with the self-loop augmented adjacency `A + I`,
//! seed distributions, and the random-walk subgraph sampler.
//!
//! Both operators use `D̂ = diag(deg + 1)`:
//!
//! * symmetric: `D̂^{-1/2} (A + I) D̂^{-1/2}`, used to build local spectra;
//! * stochastic: `(A + I) D̂^{-1}`, column-stochastic, used by the sampler
//!   so that the walk conserves probability mass.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Relabeling, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Symmetric,
    Stochastic,
}

/// How the initial probability is split among the seeds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// `1 / |S|` on every seed.
    #[default]
    Uniform,
    /// `deg(v) / vol(S)` on every seed.
    DegreeWeighted,
}

/// Sparse non-negative vector over vertex ids, kept sorted by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProbabilityVector {
    entries: Vec<(usize, f64)>,
}

impl ProbabilityVector {
    /// Collects entries, summing repeated ids. Panics on negative weights.
    pub fn from_entries<I: IntoIterator<Item = (usize, f64)>>(entries: I) -> Self {
        let mut entries: Vec<(usize, f64)> = entries.into_iter().collect();
        assert!(
            entries.iter().all(|&(_, w)| w >= 0.0),
            "probability weights must be non-negative"
        );
        entries.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (v, w) in entries {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += w,
                _ => merged.push((v, w)),
            }
        }
        ProbabilityVector { entries: merged }
    }

    pub fn get(&self, v: usize) -> f64 {
        self.entries
            .binary_search_by_key(&v, |&(u, _)| u)
            .map_or(0.0, |i| self.entries[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    /// Number of vertices with weight strictly above `epsilon`.
    pub fn support(&self, epsilon: f64) -> usize {
        self.entries.iter().filter(|&&(_, w)| w > epsilon).count()
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(v, w) in &self.entries {
            out[v] = w;
        }
        out
    }
}

/// Initial walk distribution concentrated on the seeds.
pub fn initial_vector(g: &Graph, seeds: &VertexSet, mode: InitMode) -> Result<ProbabilityVector> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    seeds.check_bounds(g.n())?;
    let vol: usize = seeds.iter().map(|v| g.degree(v)).sum();
    let uniform = 1.0 / seeds.len() as f64;
    let entries = seeds.iter().map(|v| {
        let w = match mode {
            // isolated seeds carry no degree; split evenly instead
            InitMode::DegreeWeighted if vol > 0 => g.degree(v) as f64 / vol as f64,
            _ => uniform,
        };
        (v, w)
    });
    Ok(ProbabilityVector::from_entries(entries))
}

/// Read-only walk operator over a graph.
#[derive(Debug, Clone)]
pub struct WalkOperator<'g> {
    graph: &'g Graph,
    mode: Normalization,
    // 1/sqrt(deg+1) for symmetric mode, 1/(deg+1) for stochastic mode
    scale: Vec<f64>,
}

impl<'g> WalkOperator<'g> {
    pub fn new(graph: &'g Graph, mode: Normalization) -> Self {
        let scale = (0..graph.n())
            .map(|v| {
                let d = (graph.degree(v) + 1) as f64;
                match mode {
                    Normalization::Symmetric => 1.0 / d.sqrt(),
                    Normalization::Stochastic => 1.0 / d,
                }
            })
            .collect();
        WalkOperator { graph, mode, scale }
    }

    pub fn symmetric(graph: &'g Graph) -> Self {
        Self::new(graph, Normalization::Symmetric)
    }

    pub fn stochastic(graph: &'g Graph) -> Self {
        Self::new(graph, Normalization::Stochastic)
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn mode(&self) -> Normalization {
        self.mode
    }

    /// Matrix entry `(u, v)`; zero unless `u == v` or `u ~ v`.
    pub fn entry(&self, u: usize, v: usize) -> f64 {
        if u != v && !self.graph.has_edge(u, v) {
            return 0.0;
        }
        match self.mode {
            Normalization::Symmetric => self.scale[u] * self.scale[v],
            Normalization::Stochastic => self.scale[v],
        }
    }

    /// Dense matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.graph.n());
        let z: Vec<f64> = x.iter().zip(&self.scale).map(|(a, s)| a * s).collect();
        (0..self.graph.n())
            .map(|u| {
                let total = z[u] + self.graph.neighbors(u).iter().map(|&w| z[w]).sum::<f64>();
                match self.mode {
                    Normalization::Symmetric => self.scale[u] * total,
                    Normalization::Stochastic => total,
                }
            })
            .collect()
    }

    /// Sparse matrix-vector product touching only the support of `p` and
    /// its neighborhood.
    pub fn propagate(&self, p: &ProbabilityVector) -> ProbabilityVector {
        let mut acc: HashMap<usize, f64> = HashMap::with_capacity(p.entries.len() * 4);
        for (v, x) in p.iter() {
            let out = x * self.scale[v];
            let weight = |w: usize| match self.mode {
                Normalization::Symmetric => out * self.scale[w],
                Normalization::Stochastic => out,
            };
            *acc.entry(v).or_insert(0.0) += weight(v);
            for &w in self.graph.neighbors(v) {
                *acc.entry(w).or_insert(0.0) += weight(w);
            }
        }
        let mut entries: Vec<(usize, f64)> = acc.into_iter().collect();
        entries.sort_unstable_by_key(|&(v, _)| v);
        ProbabilityVector { entries }
    }
}

/// Knobs for [`sample_subgraph`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSettings {
    /// A vertex counts as reached once its probability exceeds this.
    pub support_epsilon: f64,
    pub max_steps: usize,
    /// The subgraph keeps at most `hard_cap_factor * target_size` vertices.
    pub hard_cap_factor: usize,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        SamplerSettings {
            support_epsilon: 1e-12,
            max_steps: 30,
            hard_cap_factor: 5,
        }
    }
}

/// A subgraph grown around a seed set.
#[derive(Debug, Clone)]
pub struct Sample {
    pub graph: Graph,
    pub relabel: Relabeling,
    /// Parent ids of the sampled vertices.
    pub members: VertexSet,
    pub steps: usize,
    /// The walk stopped spreading before reaching the target size; the
    /// sample is the whole reachable component.
    pub exhausted: bool,
}

/// Runs the stochastic walk from the uniform seed distribution until mass
/// has spread to `target_size` vertices (or the step cap), then induces the
/// subgraph on the most probable reached vertices plus all seeds.
pub fn sample_subgraph(g: &Graph, seeds: &VertexSet, target_size: usize, settings: &SamplerSettings) -> Result<Sample> {
    if target_size < seeds.len() {
        return Err(Error::InvalidParameter(format!(
            "target size {target_size} is smaller than the seed set ({})",
            seeds.len()
        )));
    }
    let op = WalkOperator::stochastic(g);
    let mut p = initial_vector(g, seeds, InitMode::Uniform)?;
    let mut steps = 0;
    let mut exhausted = false;
    while p.support(settings.support_epsilon) < target_size && steps < settings.max_steps {
        let next = op.propagate(&p);
        steps += 1;
        // with the self loop, the nonzero support can only stall once the
        // whole component is covered
        let stalled = next.entries.len() == p.entries.len();
        p = next;
        if stalled {
            exhausted = true;
            break;
        }
    }

    let mut reached: Vec<(usize, f64)> = p.iter().filter(|&(_, w)| w > settings.support_epsilon).collect();
    reached.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let cap = settings.hard_cap_factor.max(1) * target_size.max(1);
    reached.truncate(cap);
    let members = VertexSet::new(reached.into_iter().map(|(v, _)| v).chain(seeds.iter()));
    let (graph, relabel) = g.induced_subgraph(&members)?;
    if exhausted {
        log::info!(
            "walk from {} seeds covers only {} vertices (target {target_size})",
            seeds.len(),
            members.len()
        );
    }
    Ok(Sample {
        graph,
        relabel,
        members,
        steps,
        exhausted,
    })
}
