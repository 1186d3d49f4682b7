//! Simple undirected graphs with 1-based vertex identifiers, the two
//! instance file formats (PACE `.gr` and TSPLIB `.hcp` edge lists), and
//! structural statistics used in benchmark reports.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex count must be positive")]
    EmptyGraph,
    #[error("vertex id {0} out of range 1..={1}")]
    VertexOutOfRange(u32, u32),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("edge {{{0}, {1}}} not present")]
    MissingEdge(u32, u32),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {msg}")]
    MalformedLine { line: usize, msg: String },
    #[error("edge count mismatch: header declares {declared}, found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
}

/// A simple undirected graph. Vertices are `1..=n`; the edge list stores
/// each edge once as `(u, v)` with `u < v` and the adjacency lists are
/// sorted. Values are immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges are normalized to `(min, max)`
    /// and deduplicated; self-loops and out-of-range endpoints are rejected.
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(GraphError::VertexOutOfRange(v, n));
                }
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        let mut adj = vec![Vec::new(); n as usize + 1];
        for &(u, v) in &normalized {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: normalized,
            adj,
        })
    }

    pub fn vertex_count(&self) -> u32 {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` pairs with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        (1..=self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        1..=self.n
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 1 {
            return true;
        }
        self.component_of(1).len() == self.n as usize
    }

    fn component_of(&self, start: u32) -> Vec<u32> {
        let mut seen = vec![false; self.n as usize + 1];
        let mut queue = VecDeque::from([start]);
        let mut out = Vec::new();
        seen[start as usize] = true;
        while let Some(u) = queue.pop_front() {
            out.push(u);
            for &w in self.neighbors(u) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// Returns a new graph with the given edges removed; the input edges
    /// must all be present. The original graph is untouched.
    pub fn delete_edges(&self, removed: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let mut gone = Vec::with_capacity(removed.len());
        for &(a, b) in removed {
            let e = (a.min(b), a.max(b));
            if self.edges.binary_search(&e).is_err() {
                return Err(GraphError::MissingEdge(e.0, e.1));
            }
            gone.push(e);
        }
        gone.sort_unstable();
        gone.dedup();
        let kept = self
            .edges
            .iter()
            .copied()
            .filter(|e| gone.binary_search(e).is_err());
        Graph::new(self.n, kept)
    }

    /// Structural statistics: degree extremes, exact girth, and the exact
    /// diameter of the largest connected component.
    pub fn stats(&self) -> GraphStats {
        let degrees: Vec<usize> = (1..=self.n).map(|v| self.degree(v)).collect();
        let min_deg = degrees.iter().copied().min().unwrap_or(0);
        let max_deg = degrees.iter().copied().max().unwrap_or(0);
        let avg_deg = 2.0 * self.edges.len() as f64 / self.n as f64;
        GraphStats {
            n: self.n,
            m: self.edges.len(),
            min_deg,
            avg_deg,
            max_deg,
            girth: self.girth(),
            diameter: self.diameter_largest_component(),
        }
    }

    /// Length of a shortest cycle, or 0 if the graph is acyclic.
    ///
    /// One breadth-first search per start vertex; an edge between two
    /// already-labelled vertices closes a cycle of length
    /// `dist[u] + dist[w] + 1` through the root. The minimum over all roots
    /// is exact because every vertex of a shortest cycle serves as a root.
    pub fn girth(&self) -> u32 {
        let mut best: u32 = 0;
        let mut dist = vec![u32::MAX; self.n as usize + 1];
        let mut parent = vec![0u32; self.n as usize + 1];
        for root in 1..=self.n {
            if best == 3 {
                break;
            }
            for d in dist.iter_mut() {
                *d = u32::MAX;
            }
            dist[root as usize] = 0;
            parent[root as usize] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                if best != 0 && 2 * dist[u as usize] >= best {
                    // Candidates from layer d have length at least 2d.
                    break;
                }
                for &w in self.neighbors(u) {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[u as usize] + 1;
                        parent[w as usize] = u;
                        queue.push_back(w);
                    } else if parent[w as usize] != u && parent[u as usize] != w {
                        let len = dist[u as usize] + dist[w as usize] + 1;
                        if best == 0 || len < best {
                            best = len;
                        }
                    }
                }
            }
        }
        best
    }

    /// Exact diameter of the largest connected component (0 for a single
    /// vertex). Components are compared by vertex count.
    pub fn diameter_largest_component(&self) -> u32 {
        let mut seen = vec![false; self.n as usize + 1];
        let mut largest: Vec<u32> = Vec::new();
        for v in 1..=self.n {
            if !seen[v as usize] {
                let comp = self.component_of(v);
                for &u in &comp {
                    seen[u as usize] = true;
                }
                if comp.len() > largest.len() {
                    largest = comp;
                }
            }
        }
        let mut diameter = 0;
        let mut dist = vec![u32::MAX; self.n as usize + 1];
        for &root in &largest {
            for d in dist.iter_mut() {
                *d = u32::MAX;
            }
            dist[root as usize] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                diameter = diameter.max(dist[u as usize]);
                for &w in self.neighbors(u) {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[u as usize] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        diameter
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub n: u32,
    pub m: usize,
    pub min_deg: usize,
    pub avg_deg: f64,
    pub max_deg: usize,
    /// Shortest cycle length; 0 when the graph is acyclic.
    pub girth: u32,
    /// Max eccentricity over the largest connected component.
    pub diameter: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// PACE-style `.gr`: `p tw <n> <m>` header, one `<u> <v>` line per edge.
    PaceGr,
    /// TSPLIB `.hcp` restricted to the `EDGE_LIST` edge-data dialect.
    TsplibHcp,
}

/// Result of parsing an instance file: the graph plus non-fatal warnings
/// (currently only duplicate edge declarations).
#[derive(Debug)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub warnings: Vec<String>,
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<ParsedGraph, GraphError> {
    match format {
        GraphFormat::PaceGr => parse_pace_gr(text),
        GraphFormat::TsplibHcp => parse_tsplib_hcp(text),
    }
}

pub fn write_graph(g: &Graph, format: GraphFormat) -> String {
    match format {
        GraphFormat::PaceGr => {
            let mut out = format!("p tw {} {}\n", g.vertex_count(), g.edge_count());
            for &(u, v) in g.edges() {
                let _ = writeln!(out, "{} {}", u, v);
            }
            out
        }
        GraphFormat::TsplibHcp => {
            let mut out = String::new();
            let _ = writeln!(out, "NAME : hamtw");
            let _ = writeln!(out, "TYPE : HCP");
            let _ = writeln!(out, "DIMENSION : {}", g.vertex_count());
            let _ = writeln!(out, "EDGE_DATA_FORMAT : EDGE_LIST");
            let _ = writeln!(out, "EDGE_DATA_SECTION");
            for &(u, v) in g.edges() {
                let _ = writeln!(out, "{} {}", u, v);
            }
            let _ = writeln!(out, "-1");
            let _ = writeln!(out, "EOF");
            out
        }
    }
}

fn parse_edge_pair(tokens: &[&str], line: usize) -> Result<(u32, u32), GraphError> {
    if tokens.len() != 2 {
        return Err(GraphError::MalformedLine {
            line,
            msg: format!("expected two vertex ids, got {} tokens", tokens.len()),
        });
    }
    let parse = |t: &str| {
        t.parse::<u32>().map_err(|_| GraphError::MalformedLine {
            line,
            msg: format!("invalid vertex id `{t}`"),
        })
    };
    Ok((parse(tokens[0])?, parse(tokens[1])?))
}

fn collect_edges(
    n: u32,
    raw: Vec<(u32, u32, usize)>,
    warnings: &mut Vec<String>,
) -> Result<Vec<(u32, u32)>, GraphError> {
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(raw.len());
    for (a, b, line) in raw {
        if a == b {
            return Err(GraphError::MalformedLine {
                line,
                msg: format!("self-loop at vertex {a}"),
            });
        }
        for v in [a, b] {
            if v == 0 || v > n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
        }
        let e = (a.min(b), a.max(b));
        if !seen.insert(e) {
            warnings.push(format!(
                "line {line}: duplicate edge {} {} (deduplicated)",
                e.0, e.1
            ));
        } else {
            edges.push(e);
        }
    }
    Ok(edges)
}

fn parse_pace_gr(text: &str) -> Result<ParsedGraph, GraphError> {
    let mut header: Option<(u32, usize)> = None;
    let mut raw = Vec::new();
    let mut declared_lines = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "p" {
            if header.is_some() {
                return Err(GraphError::MalformedHeader("duplicate header".into()));
            }
            if tokens.len() != 4 || tokens[1] != "tw" {
                return Err(GraphError::MalformedHeader(format!(
                    "expected `p tw <n> <m>`, got `{trimmed}`"
                )));
            }
            let n: u32 = tokens[2]
                .parse()
                .map_err(|_| GraphError::MalformedHeader(format!("bad vertex count `{}`", tokens[2])))?;
            let m: usize = tokens[3]
                .parse()
                .map_err(|_| GraphError::MalformedHeader(format!("bad edge count `{}`", tokens[3])))?;
            header = Some((n, m));
            continue;
        }
        if header.is_none() {
            return Err(GraphError::MalformedHeader(
                "edge line before `p tw` header".into(),
            ));
        }
        let (a, b) = parse_edge_pair(&tokens, line_no)?;
        declared_lines += 1;
        raw.push((a, b, line_no));
    }
    let (n, m) = header.ok_or_else(|| GraphError::MalformedHeader("missing `p tw` header".into()))?;
    if declared_lines != m {
        return Err(GraphError::EdgeCountMismatch {
            declared: m,
            found: declared_lines,
        });
    }
    let mut warnings = Vec::new();
    let edges = collect_edges(n, raw, &mut warnings)?;
    Ok(ParsedGraph {
        graph: Graph::new(n, edges)?,
        warnings,
    })
}

fn parse_tsplib_hcp(text: &str) -> Result<ParsedGraph, GraphError> {
    let mut dimension: Option<u32> = None;
    let mut in_edges = false;
    let mut edges_done = false;
    let mut raw = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if in_edges {
            if trimmed == "-1" {
                in_edges = false;
                edges_done = true;
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            // Flinders instances list one pair per line, but tolerate several.
            if !tokens.len().is_multiple_of(2) {
                return Err(GraphError::MalformedLine {
                    line: line_no,
                    msg: "odd number of vertex ids in edge data".into(),
                });
            }
            for pair in tokens.chunks(2) {
                let (a, b) = parse_edge_pair(pair, line_no)?;
                raw.push((a, b, line_no));
            }
            continue;
        }
        let upper = trimmed.to_ascii_uppercase();
        if upper == "EOF" {
            break;
        }
        if upper.starts_with("EDGE_DATA_SECTION") {
            if edges_done {
                return Err(GraphError::MalformedLine {
                    line: line_no,
                    msg: "duplicate EDGE_DATA_SECTION".into(),
                });
            }
            in_edges = true;
            continue;
        }
        if let Some((key, value)) = upper.split_once(':') {
            let key = key.trim();
            let value = value.trim();
            match key {
                "DIMENSION" => {
                    dimension = Some(value.parse().map_err(|_| GraphError::MalformedHeader(
                        format!("bad DIMENSION `{value}`"),
                    ))?);
                }
                "EDGE_DATA_FORMAT"
                    if value != "EDGE_LIST" => {
                        return Err(GraphError::MalformedHeader(format!(
                            "unsupported EDGE_DATA_FORMAT `{value}` (only EDGE_LIST)"
                        )));
                    }
                // NAME, TYPE, COMMENT, DISPLAY_DATA_TYPE, ... are ignored.
                _ => {}
            }
        }
        // Non key-value sections (e.g. DISPLAY_DATA_SECTION content) are skipped.
    }
    let n = dimension.ok_or_else(|| GraphError::MalformedHeader("missing DIMENSION".into()))?;
    let mut warnings = Vec::new();
    let edges = collect_edges(n, raw, &mut warnings)?;
    Ok(ParsedGraph {
        graph: Graph::new(n, edges)?,
        warnings,
    })
}

/// The Petersen graph on 10 vertices; handy as a known non-Hamiltonian,
/// 3-regular test instance.
pub fn petersen() -> Graph {
    Graph::new(
        10,
        [
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (5, 1),
            (1, 6),
            (2, 7),
            (3, 8),
            (4, 9),
            (5, 10),
            (6, 8),
            (8, 10),
            (10, 7),
            (7, 9),
            (9, 6),
        ],
    )
    .unwrap()
}

/// Cycle graph on `n >= 3` vertices.
pub fn cycle_graph(n: u32) -> Graph {
    assert!(n >= 3);
    Graph::new(n, (1..=n).map(|v| (v, v % n + 1))).unwrap()
}

/// Path graph on `n >= 1` vertices.
pub fn path_graph(n: u32) -> Graph {
    Graph::new(n, (1..n).map(|v| (v, v + 1))).unwrap()
}

/// Complete graph on `n >= 1` vertices.
pub fn complete_graph(n: u32) -> Graph {
    Graph::new(
        n,
        (1..=n).flat_map(move |u| (u + 1..=n).map(move |v| (u, v))),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pace_triangle_parses() {
        let parsed = parse_graph("p tw 3 3\n1 2\n2 3\n1 3\n", GraphFormat::PaceGr).unwrap();
        assert_eq!(parsed.graph.vertex_count(), 3);
        assert_eq!(parsed.graph.edges(), &[(1, 2), (1, 3), (2, 3)]);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn pace_comments_and_duplicates() {
        let text = "c comment\n# another\np tw 3 4\n1 2\n2 3\n1 3\n2 1\n";
        let parsed = parse_graph(text, GraphFormat::PaceGr).unwrap();
        assert_eq!(parsed.graph.edge_count(), 3);
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn pace_single_vertex_no_edges() {
        let parsed = parse_graph("p tw 1 0\n", GraphFormat::PaceGr).unwrap();
        assert_eq!(parsed.graph.vertex_count(), 1);
        assert_eq!(parsed.graph.edge_count(), 0);
    }

    #[test]
    fn pace_errors() {
        assert!(matches!(
            parse_graph("p tw 2 1\n1 3\n", GraphFormat::PaceGr),
            Err(GraphError::VertexOutOfRange(3, 2))
        ));
        assert!(matches!(
            parse_graph("1 2\n", GraphFormat::PaceGr),
            Err(GraphError::MalformedHeader(_))
        ));
        assert!(matches!(
            parse_graph("p tw 3 2\n1 2\n", GraphFormat::PaceGr),
            Err(GraphError::EdgeCountMismatch { .. })
        ));
    }

    #[test]
    fn hcp_petersen_round_trip() {
        let g = petersen();
        for format in [GraphFormat::PaceGr, GraphFormat::TsplibHcp] {
            let text = write_graph(&g, format);
            let back = parse_graph(&text, format).unwrap().graph;
            assert_eq!(back, g);
        }
        assert_eq!(g.vertex_count(), 10);
        assert_eq!(g.edge_count(), 15);
        assert!(g.vertices().all(|v| g.degree(v) == 3));
    }

    #[test]
    fn hcp_skips_unknown_sections() {
        let text = "NAME : x\nTYPE : HCP\nCOMMENT : generated\nDIMENSION : 3\n\
                    EDGE_DATA_FORMAT : EDGE_LIST\nEDGE_DATA_SECTION\n1 2\n2 3\n-1\nEOF\n";
        let g = parse_graph(text, GraphFormat::TsplibHcp).unwrap().graph;
        assert_eq!(g.edges(), &[(1, 2), (2, 3)]);
    }

    #[test]
    fn empty_graph_write() {
        let g = Graph::new(5, []).unwrap();
        assert_eq!(write_graph(&g, GraphFormat::PaceGr), "p tw 5 0\n");
    }

    #[test]
    fn stats_petersen() {
        let s = petersen().stats();
        assert_eq!((s.min_deg, s.max_deg), (3, 3));
        assert!((s.avg_deg - 3.0).abs() < 1e-12);
        assert_eq!(s.girth, 5);
        assert_eq!(s.diameter, 2);
    }

    #[test]
    fn stats_small_cases() {
        let k3 = complete_graph(3).stats();
        assert_eq!((k3.girth, k3.diameter), (3, 1));
        let p4 = path_graph(4).stats();
        assert_eq!((p4.girth, p4.diameter), (0, 3));
        // Disconnected: triangle plus isolated vertex; diameter of largest component.
        let g = Graph::new(4, [(1, 2), (2, 3), (1, 3)]).unwrap();
        let s = g.stats();
        assert_eq!(s.girth, 3);
        assert_eq!(s.diameter, 1);
        assert_eq!(s.min_deg, 0);
    }

    #[test]
    fn girth_matches_exhaustive_search_on_random_graphs() {
        // Exhaustive oracle: shortest cycle via DFS over all simple cycles.
        fn girth_brute(g: &Graph) -> u32 {
            let n = g.vertex_count();
            let mut best = 0u32;
            // For every start vertex, DFS extending simple paths; a back edge
            // to the start closes a cycle.
            fn dfs(g: &Graph, start: u32, last: u32, visited: &mut Vec<u32>, best: &mut u32) {
                for &w in g.neighbors(last) {
                    if w == start && visited.len() >= 3 {
                        let len = visited.len() as u32;
                        if *best == 0 || len < *best {
                            *best = len;
                        }
                    } else if w > start && !visited.contains(&w) {
                        visited.push(w);
                        dfs(g, start, w, visited, best);
                        visited.pop();
                    }
                }
            }
            for start in 1..=n {
                let mut visited = vec![start];
                dfs(g, start, start, &mut visited, &mut best);
            }
            best
        }

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
        for _ in 0..60 {
            let n = rng.random_range(3..=9);
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in u + 1..=n {
                    if rng.random_bool(0.3) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, edges).unwrap();
            assert_eq!(g.girth(), girth_brute(&g), "graph: {:?}", g.edges());
        }
    }

    #[test]
    fn delete_edges_cases() {
        let k3 = complete_graph(3);
        let p3 = k3.delete_edges(&[(1, 3)]).unwrap();
        assert_eq!(p3.edges(), &[(1, 2), (2, 3)]);
        assert_eq!(k3.delete_edges(&[]).unwrap(), k3);
        // K4 minus a perfect matching is a 4-cycle.
        let k4 = complete_graph(4);
        let c4 = k4.delete_edges(&[(1, 2), (3, 4)]).unwrap();
        assert_eq!(c4.edges(), &[(1, 3), (1, 4), (2, 3), (2, 4)]);
        assert!(c4.vertices().all(|v| c4.degree(v) == 2));
        assert!(matches!(
            k3.delete_edges(&[(1, 2), (1, 2)]),
            Ok(g) if g.edge_count() == 2
        ));
        assert!(k3.delete_edges(&[(1, 4)]).is_err());
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        let g = petersen();
        let sum: usize = g.vertices().map(|v| g.degree(v)).sum();
        assert_eq!(sum, 2 * g.edge_count());
    }
}
