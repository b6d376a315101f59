//! Undirected simple graphs in compressed adjacency form, SNAP-style file
//! loaders, and the cut/volume/conductance primitives.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sorted, duplicate-free set of internal vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.iter().chain(other.iter()))
    }

    /// Errors if any member is not a vertex of a graph with `n` vertices.
    pub fn check_bounds(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&v) if v >= n => Err(Error::VertexOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

/// Mapping between external vertex labels and dense internal ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    labels: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl IdMap {
    pub fn from_labels(labels: Vec<u64>) -> Self {
        let index = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        IdMap { labels, index }
    }

    pub fn label(&self, id: usize) -> u64 {
        self.labels[id]
    }

    pub fn id(&self, label: u64) -> Option<usize> {
        self.index.get(&label).copied()
    }
}

/// Immutable undirected graph without self-loops or parallel edges.
///
/// Neighbor lists are stored back to back in `targets`; the neighbors of `v`
/// are `targets[offsets[v]..offsets[v + 1]]`, strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    id_map: Option<IdMap>,
}

/// Counts of input records dropped while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeStats {
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

impl Graph {
    /// Builds a graph over `n` vertices, symmetrizing the edges and dropping
    /// self-loops and repeats.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::build(n, edges).map(|(g, _)| g)
    }

    pub(crate) fn build<I>(n: usize, edges: I) -> Result<(Graph, EdgeStats)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut stats = EdgeStats::default();
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut raw = 0usize;
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            raw += 1;
            lists[u].push(v);
            lists[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(2 * raw);
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        stats.duplicate_edges = raw - targets.len() / 2;
        Ok((
            Graph {
                offsets,
                targets,
                id_map: None,
            },
            stats,
        ))
    }

    pub fn with_id_map(mut self, id_map: IdMap) -> Self {
        assert_eq!(id_map.labels.len(), self.n(), "id map size mismatch");
        self.id_map = Some(id_map);
        self
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// External label of an internal id; the id itself when no map is attached.
    pub fn label(&self, v: usize) -> u64 {
        match &self.id_map {
            Some(map) => map.label(v),
            None => v as u64,
        }
    }

    pub fn id_of(&self, label: u64) -> Option<usize> {
        match &self.id_map {
            Some(map) => map.id(label),
            None => {
                let v = usize::try_from(label).ok()?;
                (v < self.n()).then_some(v)
            }
        }
    }

    pub fn id_map(&self) -> Option<&IdMap> {
        self.id_map.as_ref()
    }

    /// Subgraph induced by `s`. Vertex `i` of the result is the `i`-th
    /// smallest member of `s`; labels carry over from the parent.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<(Graph, Relabeling)> {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        s.check_bounds(self.n())?;
        let relabel = Relabeling {
            to_parent: s.as_slice().to_vec(),
        };
        let mut offsets = Vec::with_capacity(s.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for &u in s.as_slice() {
            // parent ids ascend, so local ids ascend too
            targets.extend(self.neighbors(u).iter().filter_map(|&w| relabel.to_local(w)));
            offsets.push(targets.len());
        }
        let labels = s.iter().map(|v| self.label(v)).collect();
        let sub = Graph {
            offsets,
            targets,
            id_map: Some(IdMap::from_labels(labels)),
        };
        Ok((sub, relabel))
    }
}

/// Maps vertex ids of an induced subgraph back to its parent graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    to_parent: Vec<usize>,
}

impl Relabeling {
    pub fn to_parent(&self, local: usize) -> usize {
        self.to_parent[local]
    }

    pub fn to_local(&self, parent: usize) -> Option<usize> {
        self.to_parent.binary_search(&parent).ok()
    }

    pub fn len(&self) -> usize {
        self.to_parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_parent.is_empty()
    }

    pub fn parent_ids(&self) -> &[usize] {
        &self.to_parent
    }
}

/// Sum of degrees over `s`.
pub fn volume(g: &Graph, s: &VertexSet) -> usize {
    s.iter().map(|v| g.degree(v)).sum()
}

/// Number of edges with exactly one endpoint in `s`.
pub fn cut_size(g: &Graph, s: &VertexSet) -> usize {
    s.iter()
        .map(|v| g.neighbors(v).iter().filter(|&&w| !s.contains(w)).count())
        .sum()
}

/// `cut(s) / min(vol(s), vol(V \ s))`.
pub fn conductance(g: &Graph, s: &VertexSet) -> Result<f64> {
    s.check_bounds(g.n())?;
    if s.is_empty() || s.len() == g.n() {
        return Err(Error::UndefinedConductance);
    }
    let vol = volume(g, s);
    let denom = vol.min(2 * g.m() - vol);
    if denom == 0 {
        return Err(Error::UndefinedConductance);
    }
    Ok(cut_size(g, s) as f64 / denom as f64)
}

/// Result of [`load_edge_list`].
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub stats: EdgeStats,
}

/// Reads a SNAP-style edge list: one `u v` pair per line, `#` comments.
/// Extra columns after the first two are ignored.
///
/// Labels are assigned dense ids in ascending label order, so the result does
/// not depend on line order or endpoint order.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<LoadedGraph> {
    let mut pairs = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mut next = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: "expected two vertex labels".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("invalid vertex label {tok:?}"),
            })
        };
        let u = next()?;
        let v = next()?;
        pairs.push((u, v));
    }
    let mut labels: Vec<u64> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
    labels.sort_unstable();
    labels.dedup();
    let map = IdMap::from_labels(labels);
    let edges = pairs.iter().map(|&(u, v)| (map.index[&u], map.index[&v]));
    let (graph, stats) = Graph::build(map.labels.len(), edges)?;
    if graph.m() == 0 {
        return Err(Error::EmptyGraph);
    }
    if stats.self_loops + stats.duplicate_edges > 0 {
        log::warn!(
            "dropped {} self-loops and {} duplicate edges",
            stats.self_loops,
            stats.duplicate_edges
        );
    }
    Ok(LoadedGraph {
        graph: graph.with_id_map(map),
        stats,
    })
}

/// Known communities of a graph, in internal ids.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthCatalog {
    communities: Vec<VertexSet>,
    avg_size: f64,
}

impl GroundTruthCatalog {
    pub fn new(communities: Vec<VertexSet>) -> Result<Self> {
        if communities.is_empty() {
            return Err(Error::NoCommunities);
        }
        if communities.iter().any(VertexSet::is_empty) {
            return Err(Error::EmptySet);
        }
        let total: usize = communities.iter().map(VertexSet::len).sum();
        let avg_size = total as f64 / communities.len() as f64;
        Ok(GroundTruthCatalog { communities, avg_size })
    }

    pub fn communities(&self) -> &[VertexSet] {
        &self.communities
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn avg_size(&self) -> f64 {
        self.avg_size
    }
}

#[derive(Debug, Clone)]
pub struct LoadedCatalog {
    pub catalog: GroundTruthCatalog,
    /// Member labels that are not vertices of the graph.
    pub unknown_labels: usize,
    /// Communities with no known member left.
    pub empty_communities: usize,
}

/// Reads one community per line of whitespace-separated labels, translating
/// through the graph's labels.
pub fn load_communities<R: BufRead>(source: R, g: &Graph) -> Result<LoadedCatalog> {
    let mut communities = Vec::new();
    let (mut unknown_labels, mut empty_communities) = (0, 0);
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut members = Vec::new();
        for tok in line.split_whitespace() {
            let label: u64 = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("invalid vertex label {tok:?}"),
            })?;
            match g.id_of(label) {
                Some(v) => members.push(v),
                None => unknown_labels += 1,
            }
        }
        if members.is_empty() {
            empty_communities += 1;
        } else {
            communities.push(VertexSet::new(members));
        }
    }
    if unknown_labels + empty_communities > 0 {
        log::warn!("skipped {unknown_labels} unknown member labels and {empty_communities} empty communities");
    }
    Ok(LoadedCatalog {
        catalog: GroundTruthCatalog::new(communities)?,
        unknown_labels,
        empty_communities,
    })
}

/// Writes every edge once as `u v` in external labels. Isolated vertices
/// cannot be represented and are dropped.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", g.label(u), g.label(v))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes one community per line, members as external labels of `g`.
pub fn write_communities<W: Write>(catalog: &GroundTruthCatalog, g: &Graph, mut out: W) -> Result<()> {
    for c in catalog.communities() {
        let line: Vec<String> = c.iter().map(|v| g.label(v).to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn path4() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    pub(crate) fn k3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    /// Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
    pub(crate) fn barbell() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    fn load(text: &str) -> LoadedGraph {
        load_edge_list(text.as_bytes()).unwrap()
    }

    #[test]
    fn loads_a_path() {
        let g = load("1 2\n2 3\n").graph;
        assert_eq!((g.n(), g.m()), (3, 2));
        let degs: Vec<_> = (0..3).map(|v| g.degree(v)).collect();
        assert_eq!(degs, [1, 2, 1]);
        assert_eq!(g.label(0), 1);
        assert_eq!(g.id_of(3), Some(2));
    }

    #[test]
    fn dedupes_symmetric_repeats() {
        let loaded = load("1 2\n2 1\n1 2\n");
        assert_eq!(loaded.graph.m(), 1);
        assert_eq!(loaded.stats.duplicate_edges, 2);
    }

    #[test]
    fn drops_self_loops() {
        let loaded = load("# comment\n1 1\n1 2\n");
        assert_eq!(loaded.graph.m(), 1);
        assert_eq!(loaded.stats.self_loops, 1);
    }

    #[test]
    fn rejects_bad_tokens_with_line_number() {
        let err = load_edge_list("1 2\n# c\n3 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = load_edge_list("1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_empty_graph() {
        assert!(matches!(
            load_edge_list("# nothing\n".as_bytes()),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn loads_communities() {
        let g = load("1 2\n2 3\n3 4\n").graph;
        let cat = load_communities("1 2 3\n3 4\n".as_bytes(), &g).unwrap();
        assert_eq!(cat.catalog.len(), 2);
        assert_eq!(cat.catalog.avg_size(), 2.5);

        let cat = load_communities("1 2 99\n".as_bytes(), &g).unwrap();
        assert_eq!(cat.unknown_labels, 1);
        assert_eq!(cat.catalog.communities()[0].len(), 2);

        let cat = load_communities("77 88\n1 2\n".as_bytes(), &g).unwrap();
        assert_eq!(cat.empty_communities, 1);
        assert_eq!(cat.catalog.len(), 1);

        assert!(matches!(load_communities("".as_bytes(), &g), Err(Error::NoCommunities)));
    }

    #[test]
    fn volume_and_cut() {
        let p = path4();
        let s = VertexSet::new([0, 1]);
        assert_eq!(volume(&p, &s), 3);
        assert_eq!(volume(&p, &VertexSet::empty()), 0);
        assert_eq!(volume(&k3(), &VertexSet::new(0..3)), 6);

        assert_eq!(cut_size(&p, &s), 1);
        assert_eq!(cut_size(&p, &VertexSet::empty()), 0);
        assert_eq!(cut_size(&p, &VertexSet::new(0..4)), 0);
        assert_eq!(cut_size(&k3(), &VertexSet::new([1])), 2);
    }

    #[test]
    fn conductance_values() {
        assert_eq!(conductance(&path4(), &VertexSet::new([0, 1])).unwrap(), 1.0 / 3.0);
        assert_eq!(conductance(&k3(), &VertexSet::new([2])).unwrap(), 1.0);
        assert_eq!(conductance(&barbell(), &VertexSet::new([0, 1, 2])).unwrap(), 1.0 / 7.0);
        assert!(matches!(
            conductance(&k3(), &VertexSet::empty()),
            Err(Error::UndefinedConductance)
        ));
        assert!(matches!(
            conductance(&k3(), &VertexSet::new(0..3)),
            Err(Error::UndefinedConductance)
        ));
    }

    #[test]
    fn induced_subgraphs() {
        let p = path4();
        let (sub, relabel) = p.induced_subgraph(&VertexSet::new([0, 1, 2])).unwrap();
        assert_eq!((sub.n(), sub.m()), (3, 2));
        assert_eq!(relabel.to_parent(2), 2);

        let (single, _) = p.induced_subgraph(&VertexSet::new([3])).unwrap();
        assert_eq!((single.n(), single.m()), (1, 0));

        let b = barbell();
        let (whole, _) = b.induced_subgraph(&VertexSet::new(0..6)).unwrap();
        assert_eq!(whole.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());

        let (sub, relabel) = b.induced_subgraph(&VertexSet::new([2, 3, 5])).unwrap();
        assert_eq!(sub.m(), 2);
        assert_eq!(relabel.to_local(5), Some(2));
        assert_eq!(relabel.to_local(4), None);
        assert_eq!(sub.label(1), 3);
    }

    #[test]
    fn writers_round_trip() {
        let loaded = load("# labels are sparse\n10 40\n40 7\n7 10\n7 99\n");
        let g = loaded.graph;
        let mut text = Vec::new();
        write_edge_list(&g, &mut text).unwrap();
        assert_eq!(load(std::str::from_utf8(&text).unwrap()).graph, g);

        let catalog = load_communities("7 10 40\n99 7\n".as_bytes(), &g).unwrap().catalog;
        let mut text = Vec::new();
        write_communities(&catalog, &g, &mut text).unwrap();
        assert_eq!(std::str::from_utf8(&text).unwrap(), "7 10 40\n7 99\n");
        assert_eq!(load_communities(&text[..], &g).unwrap().catalog, catalog);
    }
}
