//! Planted-partition graphs: equal-size disjoint blocks with independent
//! edges, denser inside blocks than between them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GroundTruthCatalog, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub num_communities: usize,
    pub community_size: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub rng_seed: u64,
}

impl PlantedSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_communities == 0 {
            return Err(Error::InvalidParameter("need at least one community".into()));
        }
        if self.community_size < 3 {
            return Err(Error::InvalidParameter("communities need at least 3 vertices".into()));
        }
        if !(0.0 <= self.p_out && self.p_out < self.p_in && self.p_in <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= p_out < p_in <= 1, got p_in={} p_out={}",
                self.p_in, self.p_out
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PlantedGraph {
    pub graph: Graph,
    pub catalog: GroundTruthCatalog,
    /// Vertices that came out isolated and were tied to a block mate.
    pub reconnected: usize,
}

/// Block `b` holds vertices `b * size .. (b + 1) * size`.
pub fn generate(spec: &PlantedSpec) -> Result<PlantedGraph> {
    spec.validate()?;
    let size = spec.community_size;
    let n = spec.num_communities * size;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if u / size == v / size { spec.p_in } else { spec.p_out };
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let mut degree = vec![0usize; n];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut reconnected = 0;
    for v in 0..n {
        if degree[v] == 0 {
            let block = v / size * size;
            let mut mate = block + rng.gen_range(0..size - 1);
            if mate >= v {
                mate += 1;
            }
            edges.push((v.min(mate), v.max(mate)));
            degree[v] += 1;
            degree[mate] += 1;
            reconnected += 1;
        }
    }
    if reconnected > 0 {
        log::warn!("reconnected {reconnected} isolated vertices");
    }
    let graph = Graph::from_edges(n, edges)?;
    let communities = (0..spec.num_communities)
        .map(|b| VertexSet::new(b * size..(b + 1) * size))
        .collect();
    Ok(PlantedGraph {
        graph,
        catalog: GroundTruthCatalog::new(communities)?,
        reconnected,
    })
}
