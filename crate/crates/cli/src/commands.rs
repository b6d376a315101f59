use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use lemon::graph::LoadedGraph;
use lemon::walk::sample_subgraph;
use lemon::{
    conductance, detect, export_report, generate, load_communities, load_edge_list, run_batch, write_communities,
    write_edge_list, Graph, PlantedSpec, SamplerSettings, TruncationMode, VertexSet,
};
use serde::Serialize;

use crate::args::{BenchmarkCmd, Command, DetectCmd, GenerateCmd, SampleCmd};
use crate::output::write_atomically;
use crate::CliError;

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Detect(cmd) => run_detect(cmd),
        Command::Benchmark(cmd) => run_benchmark(cmd),
        Command::Sample(cmd) => run_sample(cmd),
        Command::Generate(cmd) => run_generate(cmd),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: lemon::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let LoadedGraph { graph, stats } = with_path(path, load_edge_list(open(path)?))?;
    log::info!(
        "{}: {} vertices, {} edges ({} self-loops and {} duplicates dropped)",
        path.display(),
        graph.n(),
        graph.m(),
        stats.self_loops,
        stats.duplicate_edges
    );
    Ok(graph)
}

fn seed_ids(g: &Graph, labels: &[u64]) -> Result<VertexSet, CliError> {
    labels
        .iter()
        .map(|&l| {
            g.id_of(l)
                .ok_or_else(|| CliError::usage(format!("seed {l} is not a vertex of the graph")))
        })
        .collect()
}

#[derive(Serialize)]
struct DetectOutput {
    members: Vec<u64>,
    conductance: Option<f64>,
    size: usize,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<f64>,
}

fn run_detect(cmd: DetectCmd) -> Result<(), CliError> {
    let g = load_graph(&cmd.graph)?;
    let seeds = seed_ids(&g, &cmd.seeds)?;
    let mut params = cmd.detection.params();
    if cmd.truth_size.is_some() {
        params.truncation = TruncationMode::GroundTruthSize;
    }
    let start = Instant::now();
    let result = detect(&g, &seeds, &params, cmd.truth_size)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    let status = &result.status;
    if status.sampler_exhausted {
        log::warn!(
            "the walk ran out of reachable vertices at {} (target {})",
            result.sample_size,
            params.target_size(seeds.len())
        );
    }
    if status.size_clamped {
        log::warn!("requested size exceeds the ranked vertices; community was clamped");
    }
    if status.seeds_outside {
        log::warn!("some seeds are not in the detected community");
    }
    if status.infeasible_iterations > 0 {
        log::warn!(
            "{} reseeding rounds had an infeasible program",
            status.infeasible_iterations
        );
    }

    let out = DetectOutput {
        members: result.labels.clone(),
        conductance: conductance(&g, &result.members).ok(),
        size: result.members.len(),
        iterations: result.iterations,
        runtime_ms: (!cmd.no_timing).then_some(runtime_ms),
    };
    write_atomically(cmd.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &out)?;
        w.write_all(b"\n")?;
        Ok(())
    })?;
    log::info!(
        "community of {} after {} rounds, conductance {:?}",
        out.size,
        out.iterations,
        out.conductance
    );
    if status.infeasible {
        return Err(CliError::infeasible("no feasible sparse vector in any round"));
    }
    Ok(())
}

fn run_benchmark(cmd: BenchmarkCmd) -> Result<(), CliError> {
    let g = load_graph(&cmd.graph)?;
    let loaded = with_path(&cmd.communities, load_communities(open(&cmd.communities)?, &g))?;
    log::info!(
        "{}: {} communities, average size {:.1}",
        cmd.communities.display(),
        loaded.catalog.len(),
        loaded.catalog.avg_size()
    );
    let seeding = cmd.seeding.spec();
    let params = cmd.detection.params();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cmd.jobs.unwrap_or(0) as usize)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
    log::info!(
        "running {} trials on {} threads",
        cmd.trials,
        pool.current_num_threads()
    );
    let mut stats = pool.install(|| {
        run_batch(
            &g,
            &loaded.catalog,
            &seeding,
            &params,
            cmd.protocol.into(),
            cmd.trials as usize,
            cmd.seeding.rng_seed,
        )
    })?;
    if cmd.no_timing {
        stats.mean_runtime_ms = 0.0;
        stats.max_runtime_ms = 0.0;
        for r in &mut stats.reports {
            r.runtime_ms = 0.0;
        }
    }
    let fallbacks = stats.reports.iter().filter(|r| r.seed_fallback).count();
    if fallbacks > 0 {
        log::warn!("{fallbacks} trials drew seeds from the whole community");
    }
    write_atomically(cmd.out.as_deref(), |w| export_report(&stats, cmd.format.into(), w))?;
    log::info!(
        "mean F1 {:.4} (sd {:.4}) over {} trials",
        stats.mean_f1,
        stats.std_f1,
        stats.trials
    );
    Ok(())
}

fn run_sample(cmd: SampleCmd) -> Result<(), CliError> {
    let g = load_graph(&cmd.graph)?;
    let seeds = seed_ids(&g, &cmd.seeds)?;
    let sample = sample_subgraph(&g, &seeds, cmd.size, &SamplerSettings::default())?;
    if sample.exhausted {
        log::warn!(
            "the walk exhausted the seeds' component at {} vertices",
            sample.members.len()
        );
    }
    write_atomically(cmd.out.as_deref(), |w| {
        for (u, v) in sample.graph.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    })?;
    write_atomically(Some(&cmd.relabel), |w| {
        for (local, &parent) in sample.relabel.parent_ids().iter().enumerate() {
            writeln!(w, "{local} {}", g.label(parent))?;
        }
        Ok(())
    })?;
    log::info!(
        "sampled {} vertices and {} edges in {} steps",
        sample.graph.n(),
        sample.graph.m(),
        sample.steps
    );
    Ok(())
}

fn run_generate(cmd: GenerateCmd) -> Result<(), CliError> {
    let planted = generate(&PlantedSpec {
        num_communities: cmd.num_communities,
        community_size: cmd.community_size,
        p_in: cmd.p_in,
        p_out: cmd.p_out,
        rng_seed: cmd.rng_seed,
    })?;
    if planted.reconnected > 0 {
        log::info!("tied {} isolated vertices to a block mate", planted.reconnected);
    }
    write_atomically(cmd.out.as_deref(), |w| write_edge_list(&planted.graph, w))?;
    write_atomically(Some(&cmd.communities), |w| {
        write_communities(&planted.catalog, &planted.graph, w)
    })?;
    Ok(())
}
