//! The seed expansion loop: local spectra → sparse indicator → ranking →
//! conductance sweep, repeated with a growing seed set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::f1_score;
use crate::graph::{conductance, Graph, VertexSet};
use crate::lp::{rank_vertices, solve_min_one_norm, SparseIndicatorSolution};
use crate::spectra::local_spectra;
use crate::walk::{sample_subgraph, InitMode, Sample, SamplerSettings, WalkOperator};

/// How the ranked list is cut into a community.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationMode {
    /// At the first relative minimum of the conductance sweep.
    #[default]
    Auto,
    /// At a caller-supplied community size.
    GroundTruthSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectParams {
    /// Random walk steps `k`.
    pub walk_steps: usize,
    /// Span dimension `l`; the span has `l + 1` columns.
    pub dim: usize,
    /// Seed expansion step `s`.
    pub expand_step: usize,
    /// Sampling multiplier applied to the average community size.
    pub alpha: f64,
    /// Average community size, when known; the sampler then targets
    /// `alpha * avg_community_size` vertices.
    pub avg_community_size: Option<f64>,
    /// Sampler target when no average community size is known.
    pub sample_size: usize,
    /// Smallest swept community size; `None` means `max(|S| + 1, 10)`.
    pub size_min: Option<usize>,
    pub size_max: usize,
    pub max_reseed_iters: usize,
    pub sweep_window: usize,
    pub init_mode: InitMode,
    pub truncation: TruncationMode,
    pub sampler: SamplerSettings,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams {
            walk_steps: 3,
            dim: 3,
            expand_step: 6,
            alpha: 10.0,
            avg_community_size: None,
            sample_size: 3000,
            size_min: None,
            size_max: 100,
            max_reseed_iters: 20,
            sweep_window: 2,
            init_mode: InitMode::Uniform,
            truncation: TruncationMode::Auto,
            sampler: SamplerSettings::default(),
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.walk_steps == 0 {
            return bad("walk steps must be at least 1");
        }
        if self.dim == 0 {
            return bad("span dimension must be at least 1");
        }
        if self.expand_step == 0 {
            return bad("seed expansion step must be at least 1");
        }
        if !(self.alpha > 0.0) {
            return bad("alpha must be positive");
        }
        if self.max_reseed_iters == 0 {
            return bad("at least one iteration is required");
        }
        if let Some(min) = self.size_min {
            if min == 0 || min >= self.size_max {
                return bad("need 1 <= size_min < size_max");
            }
        }
        Ok(())
    }

    pub fn effective_size_min(&self, seed_count: usize) -> usize {
        self.size_min.unwrap_or_else(|| (seed_count + 1).max(10))
    }

    /// Number of vertices the sampler tries to reach.
    pub fn target_size(&self, seed_count: usize) -> usize {
        let target = match self.avg_community_size {
            Some(avg) => (self.alpha * avg).ceil() as usize,
            None => self.sample_size,
        };
        target.max(seed_count)
    }
}

/// Conductance of the ranked prefixes `size_min..=size_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub size_min: usize,
    /// `phi[i]` belongs to the prefix of size `size_min + i`.
    pub phi: Vec<f64>,
    /// Prefix size at the first relative minimum.
    pub argmin_first: Option<usize>,
}

impl SweepCurve {
    pub fn size_max(&self) -> usize {
        self.size_min + self.phi.len() - 1
    }

    pub fn phi_at(&self, size: usize) -> Option<f64> {
        size.checked_sub(self.size_min).and_then(|i| self.phi.get(i).copied())
    }

    /// The first relative minimum, or the global minimum (first occurrence)
    /// when the curve has none.
    pub fn best(&self) -> (usize, f64) {
        if let Some(size) = self.argmin_first {
            return (size, self.phi[size - self.size_min]);
        }
        let (i, phi) = self
            .phi
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        (self.size_min + i, phi)
    }
}

/// First `size` ranked vertices. Clamps (and reports `true`) when the list
/// is shorter than `size`.
pub fn truncate_by_size(ranked: &[usize], size: usize) -> Result<(VertexSet, bool)> {
    if size == 0 {
        return Err(Error::EmptySet);
    }
    let clamped = size > ranked.len();
    let take = size.min(ranked.len());
    Ok((VertexSet::new(ranked[..take].iter().copied()), clamped))
}

/// Sweeps prefix conductance over `[size_min, size_max]`, updating cut and
/// volume incrementally as each vertex joins.
///
/// The range is clipped to the ranked length and to `n - 1`. Prefixes with
/// a zero-volume side get conductance 1. A prefix size `i` is the first
/// relative minimum when `phi(i) < phi(i - 1)` and `phi(i) <= phi(j)` for the
/// next `window` sizes (at least one of which must lie in range).
pub fn sweep_conductance(
    g: &Graph,
    ranked: &[usize],
    size_min: usize,
    size_max: usize,
    window: usize,
) -> Result<SweepCurve> {
    let hi = size_max.min(ranked.len()).min(g.n().saturating_sub(1));
    if hi == 0 || size_min == 0 {
        return Err(Error::InvalidParameter(format!(
            "empty sweep range [{size_min}, {size_max}] over {} ranked vertices",
            ranked.len()
        )));
    }
    let lo = size_min.min(hi);
    let total = 2 * g.m();
    let mut inside = vec![false; g.n()];
    let (mut cut, mut vol) = (0usize, 0usize);
    let mut before_lo = None;
    let mut phi = Vec::with_capacity(hi - lo + 1);
    for (i, &v) in ranked[..hi].iter().enumerate() {
        let internal = g.neighbors(v).iter().filter(|&&w| inside[w]).count();
        inside[v] = true;
        cut = cut + g.degree(v) - 2 * internal;
        vol += g.degree(v);
        let size = i + 1;
        if size + 1 < lo {
            continue;
        }
        let denom = vol.min(total - vol);
        let value = if denom == 0 { 1.0 } else { cut as f64 / denom as f64 };
        if size + 1 == lo {
            before_lo = Some(value);
        } else {
            phi.push(value);
        }
    }

    let argmin_first = first_relative_minimum(before_lo, &phi, window).map(|i| lo + i);
    Ok(SweepCurve {
        size_min: lo,
        phi,
        argmin_first,
    })
}

/// Index `i` with `phi[i] < phi[i - 1]` (`before` standing in for
/// `phi[-1]`) and `phi[i] <= phi[j]` for `j` in `i+1..=i+window`, clipped to
/// the curve; the clipped window must not be empty.
pub fn first_relative_minimum(before: Option<f64>, phi: &[f64], window: usize) -> Option<usize> {
    (0..phi.len().saturating_sub(1)).find(|&i| {
        let prev = if i == 0 { before } else { Some(phi[i - 1]) };
        let end = (i + window.max(1)).min(phi.len() - 1);
        prev.is_some_and(|p| phi[i] < p) && phi[i + 1..=end].iter().all(|&q| q >= phi[i])
    })
}

/// One pass of spectra, sparse indicator, ranking and sweep on a sample.
#[derive(Debug, Clone)]
pub struct LemonStep {
    /// Sample-local ids by descending score.
    pub ranked_local: Vec<usize>,
    /// The same order in parent graph ids.
    pub ranked: Vec<usize>,
    pub curve: SweepCurve,
    pub solution: SparseIndicatorSolution,
}

/// Runs one expansion step with `seeds` given in sample-local ids; the sweep
/// is measured on the parent graph `g`. `Ok(None)` means the sparse
/// indicator problem is infeasible for these seeds.
pub fn lemon_step(
    g: &Graph,
    sample: &Sample,
    seeds: &VertexSet,
    size_min: usize,
    params: &DetectParams,
) -> Result<Option<LemonStep>> {
    let op = WalkOperator::symmetric(&sample.graph);
    let basis = local_spectra(&op, seeds, params.walk_steps, params.dim, params.init_mode)?;
    let solution = match solve_min_one_norm(&basis, seeds) {
        Ok(sol) if sol.is_optimal() => sol,
        Ok(_) => return Ok(None),
        Err(Error::Numerical(msg)) => {
            log::warn!("sparse indicator solve failed: {msg}");
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let ranked_local = rank_vertices(&solution);
    let ranked: Vec<usize> = ranked_local.iter().map(|&v| sample.relabel.to_parent(v)).collect();
    let curve = sweep_conductance(g, &ranked, size_min, params.size_max, params.sweep_window)?;
    Ok(Some(LemonStep {
        ranked_local,
        ranked,
        curve,
        solution,
    }))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectStatus {
    /// No iteration produced a feasible sparse indicator.
    pub infeasible: bool,
    pub infeasible_iterations: usize,
    /// The sampler ran out of reachable vertices before its target.
    pub sampler_exhausted: bool,
    /// A requested truncation size exceeded the ranked list.
    pub size_clamped: bool,
    /// Some original seed did not make the returned prefix.
    pub seeds_outside: bool,
}

impl DetectStatus {
    pub fn is_clean(&self) -> bool {
        !self.infeasible && !self.sampler_exhausted && !self.size_clamped && !self.seeds_outside
    }
}

/// Summary of one reseeding iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub seed_count: usize,
    pub curve: SweepCurve,
    /// Best sweep point `(size, phi)` of this iteration.
    pub phi_min: f64,
    pub size_at_min: usize,
    /// F1 against the ground truth, in ground-truth runs only.
    pub f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityResult {
    /// Internal ids of the detected community.
    pub members: VertexSet,
    /// External labels of the members, in rank order.
    pub labels: Vec<u64>,
    /// Final scores of the members, in rank order.
    pub scores: Vec<f64>,
    pub iterations: usize,
    /// Iteration the community was taken from.
    pub chosen_iteration: usize,
    pub chosen_size: usize,
    pub phi_at_chosen: f64,
    pub sample_size: usize,
    pub trace: Vec<IterationTrace>,
    pub status: DetectStatus,
}

impl CommunityResult {
    fn empty(sample_size: usize, status: DetectStatus, trace: Vec<IterationTrace>) -> Self {
        CommunityResult {
            members: VertexSet::empty(),
            labels: Vec::new(),
            scores: Vec::new(),
            iterations: trace.len(),
            chosen_iteration: 0,
            chosen_size: 0,
            phi_at_chosen: f64::NAN,
            sample_size,
            trace,
            status,
        }
    }
}

/// Detects the community around `seeds`.
///
/// `truth_size` is required with [`TruncationMode::GroundTruthSize`] and
/// ignored otherwise.
pub fn detect(
    g: &Graph,
    seeds: &VertexSet,
    params: &DetectParams,
    truth_size: Option<usize>,
) -> Result<CommunityResult> {
    let cut = match params.truncation {
        TruncationMode::Auto => Cut::Sweep,
        TruncationMode::GroundTruthSize => Cut::Size(
            truth_size
                .ok_or_else(|| Error::InvalidParameter("ground-truth truncation needs a community size".into()))?,
        ),
    };
    expand(g, seeds, params, Policy::Conductance(cut))
}

/// Benchmark protocol with known ground truth: keep reseeding while the seed
/// set is no larger than `truth`, cut every iteration at `|truth|`, and
/// return the iteration with the highest F1.
pub fn detect_against_truth(
    g: &Graph,
    seeds: &VertexSet,
    params: &DetectParams,
    truth: &VertexSet,
) -> Result<CommunityResult> {
    if truth.is_empty() {
        return Err(Error::EmptySet);
    }
    expand(g, seeds, params, Policy::BestF1(truth))
}

#[derive(Clone, Copy)]
enum Cut {
    Sweep,
    Size(usize),
}

#[derive(Clone, Copy)]
enum Policy<'a> {
    Conductance(Cut),
    BestF1(&'a VertexSet),
}

struct Candidate {
    ranked: Vec<usize>,
    scores: Vec<f64>,
    size: usize,
}

fn expand(g: &Graph, seeds: &VertexSet, params: &DetectParams, policy: Policy<'_>) -> Result<CommunityResult> {
    params.validate()?;
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    seeds.check_bounds(g.n())?;
    if let Policy::Conductance(Cut::Size(0)) = policy {
        return Err(Error::EmptySet);
    }

    let sample = sample_subgraph(g, seeds, params.target_size(seeds.len()), &params.sampler)?;
    let local_seeds: VertexSet = seeds
        .iter()
        .map(|v| sample.relabel.to_local(v).expect("sampler keeps every seed"))
        .collect();
    let size_min = params.effective_size_min(seeds.len());
    let seed_bound = match policy {
        Policy::Conductance(Cut::Size(n)) => n.min(params.size_max),
        Policy::Conductance(Cut::Sweep) => params.size_max,
        Policy::BestF1(truth) => truth.len(),
    };

    let mut status = DetectStatus {
        sampler_exhausted: sample.exhausted,
        ..DetectStatus::default()
    };
    let mut trace: Vec<IterationTrace> = Vec::new();
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut current = local_seeds.clone();

    for j in 0..params.max_reseed_iters {
        let Some(step) = lemon_step(g, &sample, &current, size_min, params)? else {
            status.infeasible_iterations += 1;
            break;
        };
        let (size_at_min, phi_min) = step.curve.best();
        let (size, f1) = match policy {
            Policy::Conductance(Cut::Sweep) => (size_at_min, None),
            Policy::Conductance(Cut::Size(n)) => (n, None),
            Policy::BestF1(truth) => {
                let take = truth.len().min(step.ranked.len());
                let found = VertexSet::new(step.ranked[..take].iter().copied());
                (truth.len(), Some(f1_score(&found, truth)?.f1))
            }
        };
        let upturn = trace.last().is_some_and(|prev| phi_min > prev.phi_min);
        trace.push(IterationTrace {
            seed_count: current.len(),
            curve: step.curve,
            phi_min,
            size_at_min,
            f1,
        });
        candidates.push(Candidate {
            scores: step.ranked_local.iter().map(|&v| step.solution.y[v]).collect(),
            ranked: step.ranked,
            size,
        });
        if upturn && matches!(policy, Policy::Conductance(_)) {
            break;
        }

        let wanted = params.expand_step * (j + 1);
        let next: VertexSet = step
            .ranked_local
            .iter()
            .copied()
            .filter(|v| !local_seeds.contains(*v))
            .take(wanted)
            .chain(local_seeds.iter())
            .collect();
        let stop = match policy {
            Policy::BestF1(_) => next.len() > seed_bound,
            Policy::Conductance(_) => next.len() >= seed_bound,
        };
        if stop || next.len() <= current.len() {
            break;
        }
        current = next;
    }

    if candidates.is_empty() {
        status.infeasible = true;
        return Ok(CommunityResult::empty(sample.members.len(), status, trace));
    }

    let chosen = match policy {
        Policy::Conductance(_) => argbest(trace.iter().map(|t| -t.phi_min)),
        Policy::BestF1(_) => argbest(trace.iter().map(|t| t.f1.unwrap_or(0.0))),
    };
    let cand = &candidates[chosen];
    let (members, clamped) = truncate_by_size(&cand.ranked, cand.size)?;
    status.size_clamped = clamped;
    status.seeds_outside = !seeds.iter().all(|s| members.contains(s));
    let take = members.len();
    let phi_at_chosen = conductance(g, &members).unwrap_or(f64::NAN);
    Ok(CommunityResult {
        labels: cand.ranked[..take].iter().map(|&v| g.label(v)).collect(),
        scores: cand.scores[..take].to_vec(),
        chosen_size: members.len(),
        members,
        iterations: trace.len(),
        chosen_iteration: chosen,
        phi_at_chosen,
        sample_size: sample.members.len(),
        trace,
        status,
    })
}

/// Index of the largest value; earliest wins ties.
fn argbest<I: Iterator<Item = f64>>(values: I) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}
