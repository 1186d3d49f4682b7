//! Nice tree decompositions with introduce-edge nodes.
//!
//! A nice decomposition is rooted, has an empty root bag, and every node is
//! a leaf, introduce-vertex, introduce-edge, forget-vertex, or join node.
//! Every graph edge appears in exactly one introduce-edge node: the chain of
//! introduce-edge nodes for the edges between a vertex and its current bag
//! sits directly below the forget node of that vertex, so the dynamic
//! programs see each edge exactly once, at a point where both endpoints are
//! still in the bag.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::decomp::{validate_td, TdCheck, TreeDecomposition};
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum NiceError {
    #[error("input decomposition invalid: {0}")]
    InvalidInput(String),
    #[error("nice decomposition inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    IntroduceVertex(u32),
    IntroduceEdge(u32, u32),
    ForgetVertex(u32),
    Join,
}

#[derive(Debug, Clone)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted bag contents.
    pub bag: Vec<u32>,
    /// Child indices into the node sequence; empty for leaves, two for joins.
    pub children: Vec<usize>,
    /// Number of distinct vertices occurring in the subtree rooted here.
    pub subtree_vertices: u32,
}

/// Rooted nice decomposition stored in post-order (children precede their
/// parent; the root is the last node). Immutable once built.
#[derive(Debug, Clone)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
    width: u32,
    n: u32,
}

impl NiceDecomposition {
    /// Nodes in post-order; the last entry is the root (empty bag).
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn graph_vertex_count(&self) -> u32 {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

struct Builder {
    nodes: Vec<NiceNode>,
    introduced: HashSet<(u32, u32)>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, bag: Vec<u32>, children: Vec<usize>, count: u32) -> usize {
        self.nodes.push(NiceNode {
            kind,
            bag,
            children,
            subtree_vertices: count,
        });
        self.nodes.len() - 1
    }

    /// Extends the chain at `tip` from bag `from` to bag `to`: vertices in
    /// `from \ to` are forgotten in ascending order, each preceded by
    /// introduce-edge nodes for its not-yet-introduced edges into the current
    /// bag (ordered by the other endpoint), then vertices of `to \ from` are
    /// introduced in ascending order.
    fn morph(&mut self, g: &Graph, mut tip: usize, from: &[u32], to: &[u32]) -> usize {
        let to_set: HashSet<u32> = to.iter().copied().collect();
        let from_set: HashSet<u32> = from.iter().copied().collect();
        let mut bag: Vec<u32> = from.to_vec();
        let mut count = self.nodes[tip].subtree_vertices;
        for &v in from.iter().filter(|v| !to_set.contains(v)) {
            for &u in bag.iter().filter(|&&u| u != v) {
                let e = (u.min(v), u.max(v));
                if g.has_edge(u, v) && !self.introduced.contains(&e) {
                    self.introduced.insert(e);
                    tip = self.push(
                        NodeKind::IntroduceEdge(e.0, e.1),
                        bag.clone(),
                        vec![tip],
                        count,
                    );
                }
            }
            bag.retain(|&u| u != v);
            tip = self.push(NodeKind::ForgetVertex(v), bag.clone(), vec![tip], count);
        }
        for &v in to.iter().filter(|v| !from_set.contains(v)) {
            let pos = bag.binary_search(&v).unwrap_err();
            bag.insert(pos, v);
            count += 1;
            tip = self.push(NodeKind::IntroduceVertex(v), bag.clone(), vec![tip], count);
        }
        debug_assert_eq!(bag.as_slice(), to);
        tip
    }

    /// Builds a leaf-rooted chain introducing all of `bag`.
    fn grow_from_leaf(&mut self, bag: &[u32]) -> usize {
        let mut tip = self.push(NodeKind::Leaf, Vec::new(), Vec::new(), 0);
        let mut cur: Vec<u32> = Vec::new();
        for (i, &v) in bag.iter().enumerate() {
            cur.push(v);
            tip = self.push(
                NodeKind::IntroduceVertex(v),
                cur.clone(),
                vec![tip],
                i as u32 + 1,
            );
        }
        tip
    }
}

/// Transforms a valid tree decomposition into a nice one with introduce-edge
/// nodes. The root is placed at the node with the largest bag (smallest id
/// on ties) and padded with forgets down to an empty root bag. Width is
/// unchanged.
pub fn make_nice(g: &Graph, td: &TreeDecomposition) -> Result<NiceDecomposition, NiceError> {
    match validate_td(g, td) {
        TdCheck::Valid { .. } => {}
        TdCheck::Violation(msg) => return Err(NiceError::InvalidInput(msg)),
    }
    let k = td.bag_count();
    let root = (1..=k)
        .max_by_key(|&id| (td.bag(id).len(), std::cmp::Reverse(id)))
        .expect("validated decomposition has at least one bag");

    // Orient the tree away from the root.
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); k as usize + 1];
    for &(a, b) in td.tree_edges() {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); k as usize + 1];
    let mut parent = vec![0u32; k as usize + 1];
    let mut visited = vec![false; k as usize + 1];
    let mut order = Vec::with_capacity(k as usize);
    let mut queue = VecDeque::from([root]);
    visited[root as usize] = true;
    while let Some(t) = queue.pop_front() {
        order.push(t);
        for &s in &adj[t as usize] {
            if !visited[s as usize] {
                visited[s as usize] = true;
                parent[s as usize] = t;
                children[t as usize].push(s);
                queue.push_back(s);
            }
        }
    }

    let mut builder = Builder {
        nodes: Vec::new(),
        introduced: HashSet::new(),
    };
    // Process original nodes in reverse BFS order (children before parents).
    let mut tips: HashMap<u32, usize> = HashMap::new();
    for &t in order.iter().rev() {
        let bag = td.bag(t).to_vec();
        let kids = &children[t as usize];
        let tip = if kids.is_empty() {
            builder.grow_from_leaf(&bag)
        } else {
            let mut morphed: Vec<usize> = Vec::with_capacity(kids.len());
            for &c in kids {
                let child_tip = tips.remove(&c).expect("child processed before parent");
                morphed.push(builder.morph(g, child_tip, td.bag(c), &bag));
            }
            let mut acc = morphed[0];
            for &other in &morphed[1..] {
                let count = builder.nodes[acc].subtree_vertices
                    + builder.nodes[other].subtree_vertices
                    - bag.len() as u32;
                acc = builder.push(NodeKind::Join, bag.clone(), vec![acc, other], count);
            }
            acc
        };
        tips.insert(t, tip);
    }
    let root_tip = tips.remove(&root).expect("root processed");
    let final_tip = builder.morph(g, root_tip, td.bag(root), &[]);

    if builder.introduced.len() != g.edge_count() {
        return Err(NiceError::Inconsistent(format!(
            "introduced {} of {} edges",
            builder.introduced.len(),
            g.edge_count()
        )));
    }
    let nodes = into_post_order(builder.nodes, final_tip);
    let width = nodes
        .iter()
        .map(|node| node.bag.len() as u32)
        .max()
        .unwrap_or(0)
        .saturating_sub(1);
    let nice = NiceDecomposition {
        nodes,
        width,
        n: g.vertex_count(),
    };
    if nice.nodes.last().unwrap().subtree_vertices != g.vertex_count() {
        return Err(NiceError::Inconsistent(
            "root subtree does not cover all vertices".into(),
        ));
    }
    Ok(nice)
}

/// Renumbers nodes into strict post-order (each node directly preceded by
/// its right-to-left child subtrees), which lets the dynamic programs walk
/// the sequence with a plain table stack. Iterative to cope with the long
/// chains of path-like decompositions.
fn into_post_order(nodes: Vec<NiceNode>, root: usize) -> Vec<NiceNode> {
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![(root, 0usize)];
    while let Some((idx, cursor)) = stack.pop() {
        if cursor < nodes[idx].children.len() {
            stack.push((idx, cursor + 1));
            stack.push((nodes[idx].children[cursor], 0));
        } else {
            order.push(idx);
        }
    }
    debug_assert_eq!(order.len(), nodes.len());
    let mut remap = vec![usize::MAX; nodes.len()];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        remap[old_idx] = new_idx;
    }
    let mut slots: Vec<Option<NiceNode>> = nodes.into_iter().map(Some).collect();
    order
        .iter()
        .map(|&old_idx| {
            let mut node = slots[old_idx].take().expect("each node emitted once");
            for c in &mut node.children {
                *c = remap[*c];
            }
            node
        })
        .collect()
}

/// Checks every structural invariant of a nice decomposition against its
/// graph. Intended for tests and debugging; linear passes plus one
/// set-union sweep over the node sequence.
pub fn validate_nice(g: &Graph, nd: &NiceDecomposition) -> Result<(), String> {
    let nodes = nd.nodes();
    if nodes.is_empty() {
        return Err("no nodes".into());
    }
    if !nodes.last().unwrap().bag.is_empty() {
        return Err("root bag not empty".into());
    }
    let mut edge_intro_count: HashMap<(u32, u32), usize> = HashMap::new();
    let mut parent = vec![usize::MAX; nodes.len()];
    for (idx, node) in nodes.iter().enumerate() {
        for &c in &node.children {
            if c >= idx {
                return Err(format!("node {idx}: child {c} does not precede it"));
            }
            if parent[c] != usize::MAX {
                return Err(format!("node {c}: multiple parents"));
            }
            parent[c] = idx;
        }
    }
    // Post-order stack simulation carrying the subtree vertex sets.
    let mut stack: Vec<(usize, HashSet<u32>)> = Vec::new();
    for (idx, node) in nodes.iter().enumerate() {
        let mut sorted = node.bag.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != node.bag {
            return Err(format!("node {idx}: bag not sorted/unique"));
        }
        match node.kind {
            NodeKind::Leaf => {
                if !node.children.is_empty() || !node.bag.is_empty() {
                    return Err(format!("node {idx}: malformed leaf"));
                }
                stack.push((idx, HashSet::new()));
            }
            NodeKind::IntroduceVertex(v) => {
                let (cidx, mut set) = stack.pop().ok_or(format!("node {idx}: missing child"))?;
                if node.children != vec![cidx] {
                    return Err(format!("node {idx}: child link mismatch"));
                }
                let child = &nodes[cidx];
                let mut expected = child.bag.clone();
                if expected.binary_search(&v).is_ok() {
                    return Err(format!("node {idx}: vertex {v} already in child bag"));
                }
                if set.contains(&v) {
                    return Err(format!("node {idx}: vertex {v} reappears after forget"));
                }
                expected.insert(expected.binary_search(&v).unwrap_err(), v);
                if expected != node.bag {
                    return Err(format!("node {idx}: bag is not child bag plus {v}"));
                }
                set.insert(v);
                stack.push((idx, set));
            }
            NodeKind::ForgetVertex(v) => {
                let (cidx, set) = stack.pop().ok_or(format!("node {idx}: missing child"))?;
                if node.children != vec![cidx] {
                    return Err(format!("node {idx}: child link mismatch"));
                }
                let child = &nodes[cidx];
                let mut expected = child.bag.clone();
                match expected.binary_search(&v) {
                    Ok(pos) => {
                        expected.remove(pos);
                    }
                    Err(_) => return Err(format!("node {idx}: vertex {v} not in child bag")),
                }
                if expected != node.bag {
                    return Err(format!("node {idx}: bag is not child bag minus {v}"));
                }
                stack.push((idx, set));
            }
            NodeKind::IntroduceEdge(u, v) => {
                let (cidx, set) = stack.pop().ok_or(format!("node {idx}: missing child"))?;
                if node.children != vec![cidx] {
                    return Err(format!("node {idx}: child link mismatch"));
                }
                if nodes[cidx].bag != node.bag {
                    return Err(format!("node {idx}: introduce-edge changes the bag"));
                }
                if node.bag.binary_search(&u).is_err() || node.bag.binary_search(&v).is_err() {
                    return Err(format!("node {idx}: endpoints of {{{u}, {v}}} not in bag"));
                }
                if !g.has_edge(u, v) {
                    return Err(format!("node {idx}: {{{u}, {v}}} is not a graph edge"));
                }
                *edge_intro_count.entry((u.min(v), u.max(v))).or_default() += 1;
                // The chain above an introduce-edge node must lead to the
                // forget of one of its endpoints.
                let mut j = idx;
                loop {
                    if parent[j] == usize::MAX {
                        return Err(format!("node {idx}: introduce-edge chain reaches the root"));
                    }
                    j = parent[j];
                    match nodes[j].kind {
                        NodeKind::IntroduceEdge(_, _) => continue,
                        NodeKind::ForgetVertex(w) => {
                            if w != u && w != v {
                                return Err(format!(
                                    "node {idx}: edge chain ends at forget of unrelated {w}"
                                ));
                            }
                            break;
                        }
                        _ => {
                            return Err(format!(
                                "node {idx}: edge chain interrupted by non-forget node"
                            ))
                        }
                    }
                }
                stack.push((idx, set));
            }
            NodeKind::Join => {
                let (ridx, rset) = stack.pop().ok_or(format!("node {idx}: missing child"))?;
                let (lidx, lset) = stack.pop().ok_or(format!("node {idx}: missing child"))?;
                if node.children != vec![lidx, ridx] {
                    return Err(format!("node {idx}: child link mismatch"));
                }
                if nodes[lidx].bag != node.bag || nodes[ridx].bag != node.bag {
                    return Err(format!("node {idx}: join children bags differ"));
                }
                let mut set = lset;
                set.extend(rset);
                stack.push((idx, set));
            }
        }
        let (_, set) = stack.last().unwrap();
        let covered = set.len() + node.bag.len()
            - node.bag.iter().filter(|v| set.contains(v)).count();
        if covered as u32 != node.subtree_vertices {
            return Err(format!(
                "node {idx}: subtree_vertices={} but {} vertices occur",
                node.subtree_vertices, covered
            ));
        }
        // Bag vertices are part of the occurrence set going up.
        let (_, set) = stack.last_mut().unwrap();
        set.extend(node.bag.iter().copied());
    }
    if stack.len() != 1 {
        return Err(format!("{} dangling subtrees", stack.len()));
    }
    let (_, all) = stack.pop().unwrap();
    if all.len() != g.vertex_count() as usize {
        return Err(format!(
            "{} of {} vertices occur",
            all.len(),
            g.vertex_count()
        ));
    }
    for &(u, v) in g.edges() {
        match edge_intro_count.get(&(u, v)) {
            Some(1) => {}
            Some(c) => return Err(format!("edge {{{u}, {v}}} introduced {c} times")),
            None => return Err(format!("edge {{{u}, {v}}} never introduced")),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{min_fill_td, TreeDecomposition};
    use crate::graph::{complete_graph, cycle_graph, petersen, Graph};

    fn nice_of(g: &Graph) -> NiceDecomposition {
        let td = min_fill_td(g, 0);
        make_nice(g, &td).unwrap()
    }

    #[test]
    fn k3_single_bag_structure() {
        let g = complete_graph(3);
        let td = TreeDecomposition::new(vec![vec![1, 2, 3]], vec![], 3).unwrap();
        let nd = make_nice(&g, &td).unwrap();
        validate_nice(&g, &nd).unwrap();
        assert_eq!(nd.width(), 2);
        let kinds: Vec<_> = nd.nodes().iter().map(|n| n.kind).collect();
        let introduces = kinds
            .iter()
            .filter(|k| matches!(k, NodeKind::IntroduceVertex(_)))
            .count();
        let edges = kinds
            .iter()
            .filter(|k| matches!(k, NodeKind::IntroduceEdge(_, _)))
            .count();
        let forgets = kinds
            .iter()
            .filter(|k| matches!(k, NodeKind::ForgetVertex(_)))
            .count();
        assert_eq!((introduces, edges, forgets), (3, 3, 3));
        assert!(nd.nodes().last().unwrap().bag.is_empty());
    }

    #[test]
    fn edgeless_graph_has_no_introduce_edge_nodes() {
        let g = Graph::new(4, []).unwrap();
        let td = TreeDecomposition::new(
            vec![vec![1], vec![2], vec![3], vec![4]],
            vec![(1, 2), (2, 3), (3, 4)],
            4,
        )
        .unwrap();
        let nd = make_nice(&g, &td).unwrap();
        validate_nice(&g, &nd).unwrap();
        assert!(nd
            .nodes()
            .iter()
            .all(|n| !matches!(n.kind, NodeKind::IntroduceEdge(_, _))));
    }

    #[test]
    fn invalid_input_rejected() {
        let g = complete_graph(3);
        let td = TreeDecomposition::new(vec![vec![1, 2]], vec![], 3).unwrap();
        assert!(matches!(make_nice(&g, &td), Err(NiceError::InvalidInput(_))));
    }

    #[test]
    fn join_heavy_decomposition_validates() {
        // A star of bags around a center forces joins.
        let g = Graph::new(7, [(1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)]).unwrap();
        let bags = vec![
            vec![1],
            vec![1, 2],
            vec![1, 3],
            vec![1, 4],
            vec![1, 5],
            vec![1, 6],
            vec![1, 7],
        ];
        let edges = (2..=7).map(|i| (1, i)).collect();
        let td = TreeDecomposition::new(bags, edges, 7).unwrap();
        let nd = make_nice(&g, &td).unwrap();
        validate_nice(&g, &nd).unwrap();
        assert!(nd
            .nodes()
            .iter()
            .any(|n| matches!(n.kind, NodeKind::Join)));
        assert_eq!(nd.width(), 1);
    }

    #[test]
    fn petersen_and_cycles_validate() {
        for g in [petersen(), cycle_graph(6), complete_graph(5)] {
            let nd = nice_of(&g);
            validate_nice(&g, &nd).unwrap();
            assert_eq!(
                nd.nodes().last().unwrap().subtree_vertices,
                g.vertex_count()
            );
        }
    }

    #[test]
    fn every_edge_introduced_once_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.random_range(2..=10);
            let mut edges = Vec::new();
            for u in 1..=n {
                for v in u + 1..=n {
                    if rng.random_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let nd = nice_of(&g);
            validate_nice(&g, &nd).unwrap();
            let node_bound = nd.width() as usize * 4 * g.vertex_count() as usize
                + 2 * g.vertex_count() as usize
                + g.edge_count()
                + 2;
            assert!(nd.node_count() <= node_bound);
        }
    }
}
