//! Turning decision procedures into cycle finders.
//!
//! Witness-mode solvers hand back the cycle's edge set directly
//! ([`cycle_from_edges`]). Decision-mode solvers are driven through
//! self-reducibility: the cycle is discovered edge by edge, keeping a
//! growing path `P` and testing restricted graphs in which the internal
//! vertices of `P` keep only their path edges. The next edge at a path
//! endpoint is located by binary search over the candidate edges, so a
//! cycle costs O(n log Δ) decision calls overall.

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("edge set is not a single spanning cycle: {0}")]
    NotASpanningCycle(String),
    #[error("sequence is not a path in the graph: {0}")]
    NotAPath(String),
    #[error("decision procedure inconsistent (possible randomized false negative)")]
    InconsistentDecider,
    #[error(transparent)]
    Solve(#[from] crate::dp::SolveError),
}

/// An ordered vertex sequence: an open simple path while extraction is in
/// progress, a closed cycle at the end (the closing edge back to the first
/// vertex is implicit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePath {
    verts: Vec<u32>,
    closed: bool,
}

impl CyclePath {
    pub fn path(verts: Vec<u32>) -> Self {
        CyclePath {
            verts,
            closed: false,
        }
    }

    pub fn cycle(verts: Vec<u32>) -> Self {
        CyclePath {
            verts,
            closed: true,
        }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Edges of the path, including the closing edge when closed.
    pub fn edge_set(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .verts
            .windows(2)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect();
        if self.closed && self.verts.len() > 2 {
            let (a, b) = (self.verts[0], *self.verts.last().unwrap());
            out.push((a.min(b), a.max(b)));
        }
        out
    }
}

/// True iff `c` is a closed tour visiting every vertex of `g` exactly once
/// with every consecutive pair (cyclically) adjacent in `g`.
pub fn verify_cycle(g: &Graph, c: &CyclePath) -> bool {
    let n = g.vertex_count() as usize;
    if !c.is_closed() || c.len() != n || n < 3 {
        return false;
    }
    let mut seen = vec![false; n + 1];
    for &v in c.vertices() {
        if v == 0 || v > n as u32 || seen[v as usize] {
            return false;
        }
        seen[v as usize] = true;
    }
    c.vertices()
        .windows(2)
        .all(|w| g.has_edge(w[0], w[1]))
        && g.has_edge(c.vertices()[0], *c.vertices().last().unwrap())
}

/// Orders a found cycle's edge set into a vertex sequence, verifying that
/// the edges form exactly one cycle spanning `1..=n`.
pub fn cycle_from_edges(n: u32, edges: &[(u32, u32)]) -> Result<CyclePath, ExtractError> {
    if edges.len() != n as usize || n < 3 {
        return Err(ExtractError::NotASpanningCycle(format!(
            "{} edges for {} vertices",
            edges.len(),
            n
        )));
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
    for &(u, v) in edges {
        for x in [u, v] {
            if x == 0 || x > n {
                return Err(ExtractError::NotASpanningCycle(format!(
                    "vertex {x} out of range"
                )));
            }
        }
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    if adj[1..].iter().any(|l| l.len() != 2) {
        return Err(ExtractError::NotASpanningCycle(
            "some vertex does not have degree 2".into(),
        ));
    }
    let mut verts = Vec::with_capacity(n as usize);
    let (mut prev, mut cur) = (1u32, adj[1][0]);
    verts.push(1);
    while cur != 1 {
        verts.push(cur);
        let next = if adj[cur as usize][0] == prev {
            adj[cur as usize][1]
        } else {
            adj[cur as usize][0]
        };
        prev = cur;
        cur = next;
    }
    if verts.len() != n as usize {
        return Err(ExtractError::NotASpanningCycle(
            "edges form more than one cycle".into(),
        ));
    }
    Ok(CyclePath::cycle(verts))
}

/// Deletes every edge incident to an internal vertex of `p` except the path
/// edges themselves. Endpoints and off-path vertices keep all their edges;
/// a Hamiltonian cycle containing `p` survives the restriction.
pub fn restrict_for_path(g: &Graph, p: &CyclePath) -> Result<Graph, ExtractError> {
    if p.len() < 3 {
        return Err(ExtractError::NotAPath("need at least two edges".into()));
    }
    let mut on_path = vec![false; g.vertex_count() as usize + 1];
    for &v in p.vertices() {
        if v == 0 || v > g.vertex_count() || on_path[v as usize] {
            return Err(ExtractError::NotAPath(format!("bad vertex {v}")));
        }
        on_path[v as usize] = true;
    }
    for w in p.vertices().windows(2) {
        if !g.has_edge(w[0], w[1]) {
            return Err(ExtractError::NotAPath(format!(
                "missing edge {{{}, {}}}",
                w[0], w[1]
            )));
        }
    }
    let mut internal = vec![false; g.vertex_count() as usize + 1];
    for &v in &p.vertices()[1..p.len() - 1] {
        internal[v as usize] = true;
    }
    let path_edges: std::collections::HashSet<(u32, u32)> = p.edge_set().into_iter().collect();
    let kept = g.edges().iter().copied().filter(|&(u, v)| {
        (!internal[u as usize] && !internal[v as usize]) || path_edges.contains(&(u, v))
    });
    Ok(Graph::new(g.vertex_count(), kept).expect("subgraph of a valid graph"))
}

/// Extraction result: the cycle plus the number of decision calls spent.
#[derive(Debug)]
pub struct Extraction {
    pub cycle: CyclePath,
    pub decision_calls: u32,
}

/// Recovers a Hamiltonian cycle of `g` using only an opaque decision
/// procedure, which is called on edge-deleted subgraphs of `g` (any tree
/// decomposition of `g` stays valid for them).
///
/// A contradiction (the decider answering "no" where an earlier answer
/// implied "yes", or a final cycle that fails verification) aborts the
/// attempt; one full retry is made to absorb a randomized decider's false
/// negative before reporting failure.
pub fn extract_self_reduce<D>(g: &Graph, mut decide: D) -> Result<Extraction, ExtractError>
where
    D: FnMut(&Graph) -> Result<bool, crate::dp::SolveError>,
{
    let mut calls = 0u32;
    for attempt in 0..2 {
        match extract_attempt(g, &mut decide, &mut calls) {
            Ok(cycle) => {
                return Ok(Extraction {
                    cycle,
                    decision_calls: calls,
                })
            }
            Err(ExtractError::InconsistentDecider) if attempt == 0 => continue,
            Err(e) => return Err(e),
        }
    }
    Err(ExtractError::InconsistentDecider)
}

fn extract_attempt<D>(
    g: &Graph,
    decide: &mut D,
    calls: &mut u32,
) -> Result<CyclePath, ExtractError>
where
    D: FnMut(&Graph) -> Result<bool, crate::dp::SolveError>,
{
    let n = g.vertex_count();
    let mut ask = |graph: &Graph| -> Result<bool, ExtractError> {
        *calls += 1;
        Ok(decide(graph)?)
    };
    if n < 3 || !ask(g)? {
        return Err(ExtractError::InconsistentDecider);
    }

    // Bootstrap: fix vertex 1 and find the two cycle edges at it.
    let mut work = g.clone();
    let start = 1u32;
    let (u1, u2) = find_cycle_neighbors(&work, start, &mut ask)?;
    // Drop the other edges at `start`; a surviving cycle uses exactly these.
    let others: Vec<(u32, u32)> = work
        .neighbors(start)
        .iter()
        .copied()
        .filter(|&w| w != u1 && w != u2)
        .map(|w| (start, w))
        .collect();
    work = work.delete_edges(&others).expect("incident edges exist");
    let mut path: Vec<u32> = vec![u1, start, u2];

    while (path.len() as u32) < n {
        let restricted = restrict_for_path(&work, &CyclePath::path(path.clone()))?;
        work = restricted;
        let back = *path.last().unwrap();
        let before_back = path[path.len() - 2];
        let front = path[0];
        let mut cands: Vec<u32> = work
            .neighbors(back)
            .iter()
            .copied()
            .filter(|&w| w != before_back && w != front && !path.contains(&w))
            .collect();
        if cands.is_empty() {
            return Err(ExtractError::InconsistentDecider);
        }
        // Binary search for the next cycle edge at `back`: delete half of
        // the candidates and ask whether a Hamiltonian cycle survives.
        while cands.len() > 1 {
            let (keep, drop) = cands.split_at(cands.len() / 2);
            let (keep, drop) = (keep.to_vec(), drop.to_vec());
            let drop_edges: Vec<(u32, u32)> = drop.iter().map(|&w| (back, w)).collect();
            let trial = work.delete_edges(&drop_edges).expect("candidates exist");
            if ask(&trial)? {
                work = trial;
                cands = keep;
            } else {
                let keep_edges: Vec<(u32, u32)> = keep.iter().map(|&w| (back, w)).collect();
                work = work.delete_edges(&keep_edges).expect("candidates exist");
                cands = drop;
            }
        }
        path.push(cands[0]);
    }

    let cycle = CyclePath::cycle(path);
    if !verify_cycle(g, &cycle) {
        return Err(ExtractError::InconsistentDecider);
    }
    Ok(cycle)
}

/// Finds two edges at `v` that belong to a common Hamiltonian cycle, by
/// binary search over `v`'s incident edges. `q(S)` below asks whether some
/// Hamiltonian cycle uses only candidates from `S` at `v`.
fn find_cycle_neighbors<A>(
    g: &Graph,
    v: u32,
    ask: &mut A,
) -> Result<(u32, u32), ExtractError>
where
    A: FnMut(&Graph) -> Result<bool, ExtractError>,
{
    let all: Vec<u32> = g.neighbors(v).to_vec();
    if all.len() < 2 {
        return Err(ExtractError::InconsistentDecider);
    }
    if all.len() == 2 {
        return Ok((all[0], all[1]));
    }
    let q = |subset: &[u32], ask: &mut A| -> Result<bool, ExtractError> {
        let removed: Vec<(u32, u32)> = all
            .iter()
            .filter(|w| !subset.contains(w))
            .map(|&w| (v, w))
            .collect();
        ask(&g.delete_edges(&removed).expect("incident edges exist"))
    };
    let mut cands = all.clone();
    loop {
        if cands.len() == 2 {
            return Ok((cands[0], cands[1]));
        }
        let (h1, h2) = cands.split_at(cands.len() / 2);
        let (h1, h2) = (h1.to_vec(), h2.to_vec());
        if q(&h1, ask)? {
            cands = h1;
        } else if q(&h2, ask)? {
            cands = h2;
        } else {
            // The cycle straddles both halves: pin down one edge per half.
            let e1 = narrow_single(&h1, &h2, &q, ask)?;
            let e2 = narrow_single(&h2, &[e1], &q, ask)?;
            return Ok((e1, e2));
        }
    }
}

/// Narrows `pool` to a single neighbor `w` such that some Hamiltonian cycle
/// uses `{v, w}` together with one edge into `fixed`.
fn narrow_single<A, Q>(
    pool: &[u32],
    fixed: &[u32],
    q: &Q,
    ask: &mut A,
) -> Result<u32, ExtractError>
where
    A: FnMut(&Graph) -> Result<bool, ExtractError>,
    Q: Fn(&[u32], &mut A) -> Result<bool, ExtractError>,
{
    let mut pool = pool.to_vec();
    while pool.len() > 1 {
        let (h1, h2) = pool.split_at(pool.len() / 2);
        let (h1, h2) = (h1.to_vec(), h2.to_vec());
        let mut with_fixed = h1.clone();
        with_fixed.extend_from_slice(fixed);
        if q(&with_fixed, ask)? {
            pool = h1;
        } else {
            pool = h2;
        }
    }
    Ok(pool[0])
}
