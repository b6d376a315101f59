//! Seed selection from a known community, for benchmark runs.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Triangles enumerated per community before sampling one.
pub const TRIANGLE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedStrategy {
    /// From the top third of the community by degree.
    HighDegree,
    /// From the bottom third by degree.
    LowDegree,
    /// Three mutually adjacent members.
    Triangle,
    Random,
    /// From the top third by share of edges staying inside the community.
    HighInwardRatio,
}

impl SeedStrategy {
    pub const ALL: [SeedStrategy; 5] = [
        SeedStrategy::HighDegree,
        SeedStrategy::LowDegree,
        SeedStrategy::Triangle,
        SeedStrategy::Random,
        SeedStrategy::HighInwardRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeedStrategy::HighDegree => "high_degree",
            SeedStrategy::LowDegree => "low_degree",
            SeedStrategy::Triangle => "triangle",
            SeedStrategy::Random => "random",
            SeedStrategy::HighInwardRatio => "high_inward_ratio",
        }
    }
}

impl fmt::Display for SeedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeedStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        SeedStrategy::ALL
            .into_iter()
            .find(|st| st.name() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown seed strategy {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedCount {
    Fixed(usize),
    /// Fraction of the community, rounded to the nearest integer (at least 1).
    Ratio(f64),
}

impl SeedCount {
    pub fn resolve(self, community_size: usize) -> Result<usize> {
        match self {
            SeedCount::Fixed(0) => Err(Error::InvalidParameter("seed count must be positive".into())),
            SeedCount::Fixed(n) => Ok(n),
            SeedCount::Ratio(r) if r > 0.0 && r <= 1.0 => Ok(((r * community_size as f64).round() as usize).max(1)),
            SeedCount::Ratio(r) => Err(Error::InvalidParameter(format!("seed ratio {r} not in (0, 1]"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub strategy: SeedStrategy,
    pub count: SeedCount,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSelection {
    pub seeds: VertexSet,
    /// The strategy's tier was too small and the whole community was used.
    pub fallback: bool,
}

/// Share of `v`'s edges that land inside `community`; 0 for isolated `v`.
pub fn inward_ratio(g: &Graph, community: &VertexSet, v: usize) -> f64 {
    let deg = g.degree(v);
    if deg == 0 {
        return 0.0;
    }
    let inside = g.neighbors(v).iter().filter(|&&w| community.contains(w)).count();
    inside as f64 / deg as f64
}

/// Selects seeds with an RNG derived from `spec.rng_seed`.
pub fn select_seeds(g: &Graph, truth: &VertexSet, spec: &SeedSpec) -> Result<SeedSelection> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    select_seeds_with(g, truth, spec.strategy, spec.count, &mut rng)
}

pub fn select_seeds_with<R: Rng + ?Sized>(
    g: &Graph,
    truth: &VertexSet,
    strategy: SeedStrategy,
    count: SeedCount,
    rng: &mut R,
) -> Result<SeedSelection> {
    truth.check_bounds(g.n())?;
    let members = truth.as_slice();
    if strategy == SeedStrategy::Triangle {
        let triangles = triangles_within(g, truth, TRIANGLE_CAP);
        let &(a, b, c) = triangles.choose(rng).ok_or(Error::NoTriangle)?;
        return Ok(SeedSelection {
            seeds: VertexSet::new([a, b, c]),
            fallback: false,
        });
    }

    let count = count.resolve(truth.len())?;
    if count > truth.len() {
        return Err(Error::NotEnoughMembers {
            requested: count,
            available: truth.len(),
        });
    }
    let tier_len = truth.len().div_ceil(3);
    let tier: Vec<usize> = match strategy {
        SeedStrategy::Random => members.to_vec(),
        SeedStrategy::HighDegree | SeedStrategy::LowDegree => {
            let mut ranked = members.to_vec();
            ranked.sort_by_key(|&v| (g.degree(v), v));
            if strategy == SeedStrategy::HighDegree {
                ranked.reverse();
            }
            ranked.truncate(tier_len);
            ranked
        }
        SeedStrategy::HighInwardRatio => {
            let mut ranked: Vec<(f64, usize)> = members.iter().map(|&v| (inward_ratio(g, truth, v), v)).collect();
            ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
            ranked.into_iter().take(tier_len).map(|(_, v)| v).collect()
        }
        SeedStrategy::Triangle => unreachable!(),
    };
    let (pool, fallback) = if tier.len() < count {
        log::warn!(
            "{strategy} tier has {} members, sampling from the whole community",
            tier.len()
        );
        (members.to_vec(), true)
    } else {
        (tier, false)
    };
    let seeds = index::sample(rng, pool.len(), count).into_iter().map(|i| pool[i]);
    Ok(SeedSelection {
        seeds: VertexSet::new(seeds),
        fallback,
    })
}

/// Triangles `(a, b, c)` with `a < b < c`, all inside `community`, stopping
/// after `cap`.
pub fn triangles_within(g: &Graph, community: &VertexSet, cap: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for a in community.iter() {
        let na: Vec<usize> = g
            .neighbors(a)
            .iter()
            .copied()
            .filter(|&w| w > a && community.contains(w))
            .collect();
        for (i, &b) in na.iter().enumerate() {
            for &c in &na[i + 1..] {
                if g.has_edge(b, c) {
                    out.push((a, b, c));
                    if out.len() >= cap {
                        return out;
                    }
                }
            }
        }
    }
    out
}
