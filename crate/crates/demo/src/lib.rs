//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The page plants a few communities, lets the user click seed vertices and
//! runs detection on them. Everything crosses the boundary as JSON strings.

use std::f64::consts::TAU;

use lemon::{
    conductance, detect, f1_score, generate, DetectParams, PlantedGraph, PlantedSpec, TruncationMode, VertexSet,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest graph the page will build; keeps the canvas readable.
pub const MAX_VERTICES: usize = 600;

#[wasm_bindgen]
pub struct Demo {
    planted: PlantedGraph,
    positions: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct Scene {
    pub n: usize,
    pub m: usize,
    /// `[x, y]` in the unit square.
    pub positions: Vec<[f64; 2]>,
    pub blocks: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize)]
pub struct Curve {
    pub seed_count: usize,
    pub size_min: usize,
    pub phi: Vec<f64>,
    pub size_at_min: usize,
    pub phi_min: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub members: Vec<usize>,
    pub size: usize,
    pub conductance: Option<f64>,
    pub iterations: usize,
    pub chosen_iteration: usize,
    /// Planted block overlapping the result most, with its F1 score.
    pub best_block: Option<usize>,
    pub f1: f64,
    pub curves: Vec<Curve>,
}

/// Blocks sit on a ring, members on a small ring around each block centre.
pub fn layout(num_blocks: usize, block_size: usize) -> Vec<[f64; 2]> {
    let outer = if num_blocks == 1 { 0.0 } else { 0.34 };
    let inner = if num_blocks == 1 {
        0.4
    } else {
        (0.8 * outer * (TAU / (2.0 * num_blocks as f64)).sin()).min(0.14)
    };
    let mut out = Vec::with_capacity(num_blocks * block_size);
    for b in 0..num_blocks {
        let a = TAU * b as f64 / num_blocks as f64;
        let (cx, cy) = (0.5 + outer * a.cos(), 0.5 + outer * a.sin());
        for i in 0..block_size {
            let t = TAU * i as f64 / block_size as f64;
            // alternate radii so neighbours on the ring do not overlap
            let r = if i % 2 == 0 { inner } else { 0.7 * inner };
            out.push([cx + r * t.cos(), cy + r * t.sin()]);
        }
    }
    out
}

impl Demo {
    pub fn build(spec: &PlantedSpec) -> lemon::Result<Demo> {
        if spec.num_communities * spec.community_size > MAX_VERTICES {
            return Err(lemon::Error::InvalidParameter(format!(
                "the demo draws at most {MAX_VERTICES} vertices"
            )));
        }
        let planted = generate(spec)?;
        let positions = layout(spec.num_communities, spec.community_size);
        Ok(Demo { planted, positions })
    }

    pub fn planted(&self) -> &PlantedGraph {
        &self.planted
    }

    pub fn scene_data(&self) -> Scene {
        let g = &self.planted.graph;
        let size = self.planted.catalog.communities()[0].len();
        Scene {
            n: g.n(),
            m: g.m(),
            positions: self.positions.clone(),
            blocks: (0..g.n()).map(|v| v / size).collect(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn run(&self, seeds: &[u32], truth_size: Option<u32>) -> lemon::Result<Report> {
        let g = &self.planted.graph;
        let seeds = VertexSet::new(seeds.iter().map(|&s| s as usize));
        let mut params = DetectParams {
            avg_community_size: Some(self.planted.catalog.avg_size()),
            ..DetectParams::default()
        };
        if truth_size.is_some() {
            params.truncation = TruncationMode::GroundTruthSize;
        }
        let result = detect(g, &seeds, &params, truth_size.map(|t| t as usize))?;
        let (best_block, f1) = if result.members.is_empty() {
            (None, 0.0)
        } else {
            self.planted
                .catalog
                .communities()
                .iter()
                .enumerate()
                .map(|(i, c)| f1_score(&result.members, c).map(|s| (Some(i), s.f1)))
                .collect::<lemon::Result<Vec<_>>>()?
                .into_iter()
                .fold((None, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
        };
        Ok(Report {
            members: result.members.iter().collect(),
            size: result.members.len(),
            conductance: conductance(g, &result.members).ok(),
            iterations: result.iterations,
            chosen_iteration: result.chosen_iteration,
            best_block,
            f1: f1.max(0.0),
            curves: result
                .trace
                .iter()
                .map(|t| Curve {
                    seed_count: t.seed_count,
                    size_min: t.curve.size_min,
                    phi: t.curve.phi.clone(),
                    size_at_min: t.size_at_min,
                    phi_min: t.phi_min,
                })
                .collect(),
        })
    }
}

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
impl Demo {
    /// Plants `num_communities` blocks of `community_size` vertices.
    #[wasm_bindgen(constructor)]
    pub fn new(
        num_communities: usize,
        community_size: usize,
        p_in: f64,
        p_out: f64,
        seed: u32,
    ) -> Result<Demo, JsError> {
        Demo::build(&PlantedSpec {
            num_communities,
            community_size,
            p_in,
            p_out,
            rng_seed: seed as u64,
        })
        .map_err(js_err)
    }

    /// Vertex positions, block ids and edges as JSON.
    pub fn scene(&self) -> Result<String, JsError> {
        serde_json::to_string(&self.scene_data()).map_err(js_err)
    }

    /// Detects a community around `seeds`. Passing `truth_size` cuts the
    /// result at that size instead of at the first conductance minimum.
    pub fn detect(&self, seeds: Vec<u32>, truth_size: Option<u32>) -> Result<String, JsError> {
        let report = self.run(&seeds, truth_size).map_err(js_err)?;
        serde_json::to_string(&report).map_err(js_err)
    }
}
