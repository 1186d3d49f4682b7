//! Tree decompositions: validation, width, the minimum fill-in ordering
//! heuristic, elimination-order-to-decomposition construction, and PACE
//! `.td` file I/O.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {msg}")]
    MalformedLine { line: usize, msg: String },
    #[error("bag id {0} out of range 1..={1}")]
    BagIdOutOfRange(u32, u32),
    #[error("vertex id {0} out of range 1..={1}")]
    VertexOutOfRange(u32, u32),
    #[error("elimination order is not a permutation of the vertices")]
    NotAPermutation,
    #[error("invalid tree decomposition: {0}")]
    Invalid(String),
}

/// A tree decomposition: bags indexed `1..=k` plus tree edges between bag
/// ids. `n` is the vertex count of the decomposed graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<u32>>,
    tree_edges: Vec<(u32, u32)>,
    n: u32,
}

/// Outcome of validating a decomposition against a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TdCheck {
    Valid { width: u32 },
    Violation(String),
}

impl TdCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, TdCheck::Valid { .. })
    }
}

impl TreeDecomposition {
    /// Builds a decomposition from bags (listed for ids `1..=bags.len()`)
    /// and tree edges. Bags are sorted and deduplicated; structural
    /// validity against a graph is checked separately by [`validate_td`].
    pub fn new(
        bags: Vec<Vec<u32>>,
        tree_edges: Vec<(u32, u32)>,
        n: u32,
    ) -> Result<Self, DecompError> {
        let k = bags.len() as u32;
        let mut sorted_bags = Vec::with_capacity(bags.len() + 1);
        sorted_bags.push(Vec::new()); // id 0 unused
        for mut bag in bags {
            bag.sort_unstable();
            bag.dedup();
            for &v in &bag {
                if v == 0 || v > n {
                    return Err(DecompError::VertexOutOfRange(v, n));
                }
            }
            sorted_bags.push(bag);
        }
        for &(a, b) in &tree_edges {
            for id in [a, b] {
                if id == 0 || id > k {
                    return Err(DecompError::BagIdOutOfRange(id, k));
                }
            }
        }
        Ok(TreeDecomposition {
            bags: sorted_bags,
            tree_edges,
            n,
        })
    }

    pub fn bag_count(&self) -> u32 {
        self.bags.len() as u32 - 1
    }

    pub fn bag(&self, id: u32) -> &[u32] {
        &self.bags[id as usize]
    }

    pub fn tree_edges(&self) -> &[(u32, u32)] {
        &self.tree_edges
    }

    pub fn graph_vertex_count(&self) -> u32 {
        self.n
    }

    /// Max bag size minus one; 0 for an all-empty decomposition.
    pub fn width(&self) -> u32 {
        self.bags
            .iter()
            .skip(1)
            .map(|b| b.len() as u32)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    fn node_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        adj
    }
}

/// Checks both decomposition conditions (every vertex's occurrence set is
/// nonempty and connected in the tree; every edge is inside some bag) plus
/// tree-ness of the node graph. Violations are reported as values.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> TdCheck {
    let k = td.bag_count();
    if k == 0 {
        return TdCheck::Violation("decomposition has no bags".into());
    }
    if td.n != g.vertex_count() {
        return TdCheck::Violation(format!(
            "decomposition is for {} vertices, graph has {}",
            td.n,
            g.vertex_count()
        ));
    }
    // Tree-ness: k nodes, k-1 distinct edges, connected.
    let mut seen_edges = std::collections::HashSet::new();
    for &(a, b) in &td.tree_edges {
        if a == b {
            return TdCheck::Violation(format!("self-loop on decomposition node {a}"));
        }
        if !seen_edges.insert((a.min(b), a.max(b))) {
            return TdCheck::Violation(format!("duplicate tree edge {a} {b}"));
        }
    }
    if td.tree_edges.len() != k as usize - 1 {
        return TdCheck::Violation(format!(
            "tree must have {} edges, found {}",
            k - 1,
            td.tree_edges.len()
        ));
    }
    let adj = td.node_adjacency();
    let mut seen = vec![false; k as usize + 1];
    let mut queue = VecDeque::from([1u32]);
    seen[1] = true;
    let mut reached = 0;
    while let Some(t) = queue.pop_front() {
        reached += 1;
        for &s in &adj[t as usize] {
            if !seen[s as usize] {
                seen[s as usize] = true;
                queue.push_back(s);
            }
        }
    }
    if reached != k {
        return TdCheck::Violation("decomposition tree is disconnected".into());
    }
    // Condition (i): occurrences nonempty and connected.
    let mut occurrences = vec![Vec::new(); g.vertex_count() as usize + 1];
    for id in 1..=k {
        for &v in td.bag(id) {
            occurrences[v as usize].push(id);
        }
    }
    for v in g.vertices() {
        let occ = &occurrences[v as usize];
        if occ.is_empty() {
            return TdCheck::Violation(format!("vertex {v} occurs in no bag"));
        }
        // BFS within the occurrence-induced subtree.
        let inside: std::collections::HashSet<u32> = occ.iter().copied().collect();
        let mut reached = 1usize;
        let mut seen = std::collections::HashSet::from([occ[0]]);
        let mut queue = VecDeque::from([occ[0]]);
        while let Some(t) = queue.pop_front() {
            for &s in &adj[t as usize] {
                if inside.contains(&s) && seen.insert(s) {
                    reached += 1;
                    queue.push_back(s);
                }
            }
        }
        if reached != occ.len() {
            return TdCheck::Violation(format!("occurrences of vertex {v} are disconnected"));
        }
    }
    // Condition (ii): every edge inside some bag.
    'edges: for &(u, v) in g.edges() {
        for id in &occurrences[u as usize] {
            if td.bag(*id).binary_search(&v).is_ok() {
                continue 'edges;
            }
        }
        return TdCheck::Violation(format!("edge {{{u}, {v}}} is in no bag"));
    }
    TdCheck::Valid { width: td.width() }
}

/// Greedy elimination ordering: repeatedly remove a vertex whose elimination
/// adds the fewest fill edges (its remaining neighbors are completed into a
/// clique). Ties break to minimum remaining degree, then smallest vertex id.
/// A nonzero `tie_break_seed` instead picks uniformly at random among the
/// minimum-fill vertices, for randomized restarts.
pub fn min_fill_order(g: &Graph, tie_break_seed: u64) -> Vec<u32> {
    let n = g.vertex_count() as usize;
    let words = n.div_ceil(64);
    // Bitset adjacency over 0-based vertex indices.
    let mut adj = vec![vec![0u64; words]; n];
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize - 1, v as usize - 1);
        adj[u][v / 64] |= 1 << (v % 64);
        adj[v][u / 64] |= 1 << (u % 64);
    }
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = (0..n)
        .map(|v| adj[v].iter().map(|w| w.count_ones() as usize).sum())
        .collect();

    let fill_of = |adj: &Vec<Vec<u64>>, degree: &[usize], v: usize| -> usize {
        // Pairs of neighbors of v that are not adjacent to each other.
        let deg = degree[v];
        if deg < 2 {
            return 0;
        }
        let mut non_adjacent = 0usize;
        let row = &adj[v];
        for w in bits(row) {
            // |N(v) \ (N(w) ∪ {w})|, counting v itself which is always there.
            let mut missing = 0usize;
            for i in 0..row.len() {
                missing += (row[i] & !adj[w][i]).count_ones() as usize;
            }
            non_adjacent += missing - 1; // drop v itself (v ∈ N(w), v ∉ N(v))
        }
        non_adjacent / 2
    };

    let mut fill: Vec<usize> = (0..n).map(|v| fill_of(&adj, &degree, v)).collect();
    let mut rng = (tie_break_seed != 0).then(|| ChaCha8Rng::seed_from_u64(tie_break_seed));
    let mut order = Vec::with_capacity(n);

    for _ in 0..n {
        let best_fill = (0..n)
            .filter(|&v| alive[v])
            .map(|v| fill[v])
            .min()
            .unwrap();
        let chosen = if let Some(rng) = rng.as_mut() {
            let mut ties: Vec<usize> =
                (0..n).filter(|&v| alive[v] && fill[v] == best_fill).collect();
            ties.shuffle(rng);
            ties[0]
        } else {
            (0..n)
                .filter(|&v| alive[v] && fill[v] == best_fill)
                .min_by_key(|&v| (degree[v], v))
                .unwrap()
        };
        order.push(chosen as u32 + 1);
        // Eliminate: complete the neighborhood into a clique, drop the vertex.
        let neighbors: Vec<usize> = bits(&adj[chosen]).collect();
        let mut dirty: Vec<usize> = neighbors.clone();
        for (i, &a) in neighbors.iter().enumerate() {
            for &b in &neighbors[i + 1..] {
                if adj[a][b / 64] & (1 << (b % 64)) == 0 {
                    adj[a][b / 64] |= 1 << (b % 64);
                    adj[b][a / 64] |= 1 << (a % 64);
                    degree[a] += 1;
                    degree[b] += 1;
                    // The new edge changes the fill count of common neighbors.
                    for (c, (&wa, &wb)) in adj[a].iter().zip(&adj[b]).enumerate() {
                        for off in bits(&[wa & wb]) {
                            dirty.push(c * 64 + off);
                        }
                    }
                }
            }
        }
        for &w in &neighbors {
            adj[w][chosen / 64] &= !(1 << (chosen % 64));
            degree[w] -= 1;
        }
        alive[chosen] = false;
        dirty.sort_unstable();
        dirty.dedup();
        for w in dirty {
            if alive[w] {
                fill[w] = fill_of(&adj, &degree, w);
            }
        }
    }
    order
}

fn bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            }
        })
    })
}

/// Standard elimination-order-to-decomposition construction: the bag of the
/// i-th eliminated vertex is the vertex plus its remaining neighborhood in
/// the fill graph; each bag connects to the bag of its earliest-eliminated
/// remaining neighbor.
pub fn order_to_td(g: &Graph, order: &[u32]) -> Result<TreeDecomposition, DecompError> {
    let n = g.vertex_count();
    if order.len() != n as usize {
        return Err(DecompError::NotAPermutation);
    }
    let mut position = vec![usize::MAX; n as usize + 1];
    for (i, &v) in order.iter().enumerate() {
        if v == 0 || v > n || position[v as usize] != usize::MAX {
            return Err(DecompError::NotAPermutation);
        }
        position[v as usize] = i;
    }
    // Fill-graph neighborhoods among later-eliminated vertices.
    let mut later: Vec<std::collections::BTreeSet<u32>> = vec![Default::default(); n as usize + 1];
    for &(u, v) in g.edges() {
        if position[u as usize] < position[v as usize] {
            later[u as usize].insert(v);
        } else {
            later[v as usize].insert(u);
        }
    }
    let mut bags = Vec::with_capacity(n as usize);
    let mut parent_edges = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let neighborhood: Vec<u32> = later[v as usize].iter().copied().collect();
        let mut bag = neighborhood.clone();
        bag.push(v);
        bags.push(bag);
        // Complete the remaining neighborhood into a clique.
        for (a_idx, &a) in neighborhood.iter().enumerate() {
            for &b in &neighborhood[a_idx + 1..] {
                if position[a as usize] < position[b as usize] {
                    later[a as usize].insert(b);
                } else {
                    later[b as usize].insert(a);
                }
            }
        }
        // Attach to the earliest-eliminated remaining neighbor, or, lacking
        // one, to the next vertex in the order to keep the tree connected.
        let node_id = i as u32 + 1;
        if let Some(&p) = neighborhood
            .iter()
            .min_by_key(|&&w| position[w as usize])
        {
            parent_edges.push((node_id, position[p as usize] as u32 + 1));
        } else if i + 1 < order.len() {
            parent_edges.push((node_id, node_id + 1));
        }
    }
    TreeDecomposition::new(bags, parent_edges, n)
}

/// Runs the minimum fill-in heuristic and converts the order to a
/// decomposition.
pub fn min_fill_td(g: &Graph, tie_break_seed: u64) -> TreeDecomposition {
    let order = min_fill_order(g, tie_break_seed);
    order_to_td(g, &order).expect("min_fill_order returns a permutation")
}

/// Parses PACE `.td`: `s td <#bags> <max bag size> <n>` header, `b <id>
/// <v...>` bag lines, then tree edge lines; `c`-prefixed comments ignored.
pub fn parse_td(text: &str) -> Result<TreeDecomposition, DecompError> {
    let mut header: Option<(u32, u32)> = None; // (#bags, n)
    let mut bags: Vec<Option<Vec<u32>>> = Vec::new();
    let mut tree_edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens[0] {
            "s" => {
                if header.is_some() {
                    return Err(DecompError::MalformedHeader("duplicate header".into()));
                }
                if tokens.len() != 5 || tokens[1] != "td" {
                    return Err(DecompError::MalformedHeader(format!(
                        "expected `s td <#bags> <max bag size> <n>`, got `{trimmed}`"
                    )));
                }
                let parse = |t: &str| {
                    t.parse::<u32>()
                        .map_err(|_| DecompError::MalformedHeader(format!("bad number `{t}`")))
                };
                let k = parse(tokens[2])?;
                let _max_bag = parse(tokens[3])?;
                let n = parse(tokens[4])?;
                header = Some((k, n));
                bags = vec![None; k as usize];
            }
            "b" => {
                let (k, n) = header.ok_or_else(|| {
                    DecompError::MalformedHeader("bag line before header".into())
                })?;
                if tokens.len() < 2 {
                    return Err(DecompError::MalformedLine {
                        line: line_no,
                        msg: "bag line without id".into(),
                    });
                }
                let id: u32 = tokens[1].parse().map_err(|_| DecompError::MalformedLine {
                    line: line_no,
                    msg: format!("bad bag id `{}`", tokens[1]),
                })?;
                if id == 0 || id > k {
                    return Err(DecompError::BagIdOutOfRange(id, k));
                }
                let mut bag = Vec::with_capacity(tokens.len() - 2);
                for t in &tokens[2..] {
                    let v: u32 = t.parse().map_err(|_| DecompError::MalformedLine {
                        line: line_no,
                        msg: format!("bad vertex id `{t}`"),
                    })?;
                    if v == 0 || v > n {
                        return Err(DecompError::VertexOutOfRange(v, n));
                    }
                    bag.push(v);
                }
                if bags[id as usize - 1].replace(bag).is_some() {
                    return Err(DecompError::MalformedLine {
                        line: line_no,
                        msg: format!("duplicate bag id {id}"),
                    });
                }
            }
            _ => {
                let (k, _) = header.ok_or_else(|| {
                    DecompError::MalformedHeader("edge line before header".into())
                })?;
                if tokens.len() != 2 {
                    return Err(DecompError::MalformedLine {
                        line: line_no,
                        msg: format!("expected two bag ids, got {} tokens", tokens.len()),
                    });
                }
                let parse = |t: &str| {
                    t.parse::<u32>().map_err(|_| DecompError::MalformedLine {
                        line: line_no,
                        msg: format!("bad bag id `{t}`"),
                    })
                };
                let a = parse(tokens[0])?;
                let b = parse(tokens[1])?;
                for id in [a, b] {
                    if id == 0 || id > k {
                        return Err(DecompError::BagIdOutOfRange(id, k));
                    }
                }
                tree_edges.push((a, b));
            }
        }
    }
    let (_, n) = header.ok_or_else(|| DecompError::MalformedHeader("missing header".into()))?;
    let bags: Vec<Vec<u32>> = bags.into_iter().map(|b| b.unwrap_or_default()).collect();
    TreeDecomposition::new(bags, tree_edges, n)
}

pub fn write_td(td: &TreeDecomposition) -> String {
    let max_bag = td
        .bags
        .iter()
        .skip(1)
        .map(|b| b.len())
        .max()
        .unwrap_or(0);
    let mut out = format!(
        "s td {} {} {}\n",
        td.bag_count(),
        max_bag,
        td.graph_vertex_count()
    );
    for id in 1..=td.bag_count() {
        let _ = write!(out, "b {id}");
        for v in td.bag(id) {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    for &(a, b) in &td.tree_edges {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, path_graph, petersen, Graph};

    #[test]
    fn single_bag_is_valid() {
        let g = complete_graph(3);
        let td = TreeDecomposition::new(vec![vec![1, 2, 3]], vec![], 3).unwrap();
        assert_eq!(validate_td(&g, &td), TdCheck::Valid { width: 2 });
    }

    #[test]
    fn disconnected_occurrence_is_violation() {
        // Vertex 1 occurs in bags 1 and 3 but not in the middle bag.
        let g = path_graph(3);
        let td = TreeDecomposition::new(
            vec![vec![1, 2], vec![2, 3], vec![1, 3]],
            vec![(1, 2), (2, 3)],
            3,
        )
        .unwrap();
        assert!(matches!(validate_td(&g, &td), TdCheck::Violation(_)));
    }

    #[test]
    fn missing_edge_is_violation() {
        let g = complete_graph(3);
        let td = TreeDecomposition::new(vec![vec![1, 2], vec![2, 3]], vec![(1, 2)], 3).unwrap();
        match validate_td(&g, &td) {
            TdCheck::Violation(msg) => assert!(msg.contains("edge")),
            v => panic!("expected violation, got {v:?}"),
        }
    }

    #[test]
    fn path_decomposition_of_c6() {
        // Bags {i, i+1, 1} along the cycle: width 2.
        let g = cycle_graph(6);
        let bags: Vec<Vec<u32>> = (1..=5).map(|i| vec![i, i + 1, 1]).collect();
        let edges = (1..5).map(|i| (i, i + 1)).collect();
        let td = TreeDecomposition::new(bags, edges, 6).unwrap();
        assert_eq!(validate_td(&g, &td), TdCheck::Valid { width: 2 });
    }

    #[test]
    fn min_fill_on_tree_has_zero_fill() {
        // A star plus pendant paths is chordal; min-fill eliminates leaves
        // first and the resulting decomposition has width 1.
        let g = Graph::new(7, [(1, 2), (1, 3), (1, 4), (4, 5), (5, 6), (6, 7)]).unwrap();
        let order = min_fill_order(&g, 0);
        let td = order_to_td(&g, &order).unwrap();
        assert_eq!(validate_td(&g, &td), TdCheck::Valid { width: 1 });
    }

    #[test]
    fn min_fill_on_c5_yields_width_2() {
        let g = cycle_graph(5);
        let order = min_fill_order(&g, 0);
        let td = order_to_td(&g, &order).unwrap();
        assert_eq!(validate_td(&g, &td), TdCheck::Valid { width: 2 });
        // Brute force: every elimination order of C5 gives width exactly 2.
        let mut perm: Vec<u32> = (1..=5).collect();
        let mut widths = std::collections::HashSet::new();
        permute(&mut perm, 0, &mut |p| {
            let td = order_to_td(&g, p).unwrap();
            assert!(validate_td(&g, &td).is_valid());
            widths.insert(td.width());
        });
        assert_eq!(widths, std::collections::HashSet::from([2]));
    }

    fn permute(items: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, f);
            items.swap(k, i);
        }
    }

    #[test]
    fn clique_elimination_has_full_width() {
        let g = complete_graph(4);
        let td = order_to_td(&g, &[1, 2, 3, 4]).unwrap();
        assert_eq!(validate_td(&g, &td), TdCheck::Valid { width: 3 });
        // Path in natural order: width 1.
        let p4 = path_graph(4);
        let td = order_to_td(&p4, &[1, 2, 3, 4]).unwrap();
        assert_eq!(validate_td(&p4, &td), TdCheck::Valid { width: 1 });
    }

    #[test]
    fn order_must_be_permutation() {
        let g = path_graph(3);
        assert!(matches!(
            order_to_td(&g, &[1, 2]),
            Err(DecompError::NotAPermutation)
        ));
        assert!(matches!(
            order_to_td(&g, &[1, 2, 2]),
            Err(DecompError::NotAPermutation)
        ));
    }

    #[test]
    fn min_fill_handles_petersen_and_disconnected_input() {
        let g = petersen();
        let td = min_fill_td(&g, 0);
        assert!(validate_td(&g, &td).is_valid());
        let disconnected = Graph::new(5, [(1, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let td = min_fill_td(&disconnected, 0);
        assert!(validate_td(&disconnected, &td).is_valid());
    }

    #[test]
    fn randomized_tie_break_is_deterministic_per_seed() {
        let g = petersen();
        assert_eq!(min_fill_order(&g, 7), min_fill_order(&g, 7));
    }

    #[test]
    fn td_format_round_trip() {
        let text = "s td 1 3 3\nb 1 1 2 3\n";
        let td = parse_td(text).unwrap();
        assert_eq!(td.bag_count(), 1);
        assert_eq!(td.bag(1), &[1, 2, 3]);
        assert_eq!(parse_td(&write_td(&td)).unwrap(), td);
    }

    #[test]
    fn td_empty_bag_and_comments() {
        let text = "c solver output\ns td 2 2 2\nb 1 1 2\nb 2\n1 2\n";
        let td = parse_td(text).unwrap();
        assert_eq!(td.bag(2), &[] as &[u32]);
        assert_eq!(td.width(), 1);
    }

    #[test]
    fn td_parse_errors() {
        assert!(matches!(
            parse_td("s td 1 3 3\nb 2 1\n"),
            Err(DecompError::BagIdOutOfRange(2, 1))
        ));
        assert!(matches!(
            parse_td("s td 1 3 3\nb 1 5\n"),
            Err(DecompError::VertexOutOfRange(5, 3))
        ));
        assert!(matches!(
            parse_td("b 1 1\n"),
            Err(DecompError::MalformedHeader(_))
        ));
    }

    #[test]
    fn min_fill_achieves_width_two_on_series_parallel_graphs() {
        // Ladders (series-parallel, treewidth 2): min-fill must reach width <= 2.
        for rungs in 2..8u32 {
            let n = 2 * rungs;
            let mut edges = Vec::new();
            for i in 0..rungs {
                edges.push((2 * i + 1, 2 * i + 2));
                if i + 1 < rungs {
                    edges.push((2 * i + 1, 2 * i + 3));
                    edges.push((2 * i + 2, 2 * i + 4));
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let td = min_fill_td(&g, 0);
            match validate_td(&g, &td) {
                TdCheck::Valid { width } => assert!(width <= 2, "rungs={rungs} width={width}"),
                v => panic!("{v:?}"),
            }
        }
        // Random series-parallel compositions (treewidth <= 2) as well.
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let mut next = 2u32;
            let mut edges = std::collections::BTreeSet::new();
            compose_sp(1, 2, 4, &mut next, &mut edges, &mut rng);
            let n = next;
            let g = Graph::new(n, edges.into_iter().collect::<Vec<_>>()).unwrap();
            let td = min_fill_td(&g, 0);
            match validate_td(&g, &td) {
                TdCheck::Valid { width } => {
                    assert!(width <= 2, "n={n} width={width} on {:?}", g.edges())
                }
                v => panic!("{v:?}"),
            }
        }
    }

    /// Expands the terminal pair (s, t) into a random series-parallel
    /// subgraph; `next` tracks the highest vertex id handed out.
    fn compose_sp(
        s: u32,
        t: u32,
        depth: u32,
        next: &mut u32,
        edges: &mut std::collections::BTreeSet<(u32, u32)>,
        rng: &mut ChaCha8Rng,
    ) {
        use rand::Rng;
        if depth == 0 || rng.random_bool(0.25) {
            edges.insert((s.min(t), s.max(t)));
            return;
        }
        if rng.random_bool(0.5) {
            // Series: s - w - t.
            *next += 1;
            let w = *next;
            compose_sp(s, w, depth - 1, next, edges, rng);
            compose_sp(w, t, depth - 1, next, edges, rng);
        } else {
            // Parallel: two branches over the same terminals.
            compose_sp(s, t, depth - 1, next, edges, rng);
            compose_sp(s, t, depth - 1, next, edges, rng);
        }
    }
}
