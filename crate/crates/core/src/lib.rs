//! Local community detection by seed set expansion.
//!
//! A short random walk from a few seed vertices spans a small subspace (the
//! local spectra). The sparsest non-negative vector in that subspace that
//! covers the seeds, found as a minimum one-norm linear program, ranks the
//! vertices around the seeds; a conductance sweep over the ranking decides
//! where the community ends. The seed set then grows with the top-ranked
//! vertices and the process repeats until the best sweep conductance starts
//! to rise.
//!
//! ```
//! use lemon::{detect, generate, DetectParams, PlantedSpec, VertexSet};
//!
//! let planted = generate(&PlantedSpec {
//!     num_communities: 4,
//!     community_size: 20,
//!     p_in: 1.0,
//!     p_out: 0.0,
//!     rng_seed: 7,
//! })
//! .unwrap();
//! let seeds = VertexSet::new([0, 5, 11]);
//! let found = detect(&planted.graph, &seeds, &DetectParams::default(), None).unwrap();
//! assert_eq!(found.members, planted.catalog.communities()[0]);
//! ```

pub mod detect;
pub mod error;
pub mod eval;
pub mod graph;
pub mod lp;
pub mod seeding;
pub mod spectra;
pub mod synth;
pub mod walk;

pub use detect::{detect, detect_against_truth, CommunityResult, DetectParams, SweepCurve, TruncationMode};
pub use error::{Error, Result};
pub use eval::{export_report, f1_score, run_batch, BatchStats, Protocol, ReportFormat, ScoreReport};
pub use graph::{
    conductance, cut_size, load_communities, load_edge_list, volume, write_communities, write_edge_list, Graph,
    GroundTruthCatalog, VertexSet,
};
pub use seeding::{select_seeds, SeedCount, SeedSpec, SeedStrategy};
pub use synth::{generate, PlantedGraph, PlantedSpec};
pub use walk::{InitMode, SamplerSettings};
