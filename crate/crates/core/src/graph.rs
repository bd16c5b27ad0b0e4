//! Immutable undirected simple graphs, generators, bipartiteness with
//! certificates, the hypercube embedding, and edge-list I/O.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Dimension guard for [`hypercube`]: 2^20 vertices is the largest graph the
/// generator will materialize.
pub const MAX_HYPERCUBE_DIM: u32 = 20;

/// Which side of a bipartition a vertex belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => write!(f, "A"),
            Side::B => write!(f, "B"),
        }
    }
}

/// Undirected simple graph on vertices `0..num_vertices`.
///
/// Immutable after construction: no self-loops, no duplicate edges, all
/// endpoints in range. Edges are stored canonically as `(u, v)` with `u < v`,
/// sorted lexicographically; adjacency lists are sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list, canonicalizing edge order.
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut canonical: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for {num_vertices} vertices"
                )));
            }
            canonical.push((u.min(v), u.max(v)));
        }
        canonical.sort_unstable();
        if let Some(w) = canonical.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in &canonical {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            num_vertices,
            edges: canonical,
            adjacency,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.num_vertices && v < self.num_vertices
            && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }
}

/// Complete bipartite graph K_{m,n}.
///
/// Canonical vertex numbering: `0..m` is side A, `m..m+n` is side B. The
/// labeling construction relies on this ordering.
pub fn complete_bipartite(m: usize, n: usize) -> Result<Graph> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("K_{m,n} requires m >= 1 and n >= 1"));
    }
    let mut edges = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            edges.push((i, m + j));
        }
    }
    Graph::new(m + n, edges)
}

/// Hypercube graph Q_n: vertices are n-bit strings, edges join strings that
/// differ in exactly one bit.
pub fn hypercube(n: u32) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("hypercube dimension must be >= 1"));
    }
    if n > MAX_HYPERCUBE_DIM {
        return Err(Error::invalid(format!(
            "hypercube dimension {n} exceeds guard {MAX_HYPERCUBE_DIM}"
        )));
    }
    let verts = 1usize << n;
    let mut edges = Vec::with_capacity(n as usize * (verts >> 1));
    for v in 0..verts {
        for b in 0..n {
            let w = v | (1 << b);
            if w != v {
                edges.push((v, w));
            }
        }
    }
    Graph::new(verts, edges)
}

/// Outcome of [`bipartition`]: either a valid 2-coloring or an explicit
/// odd cycle witnessing non-bipartiteness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BipartitionResult {
    /// `sides[v]` is the side of vertex v; every edge crosses sides.
    Coloring(Vec<Side>),
    /// Odd-length cycle: consecutive vertices (cyclically) are adjacent,
    /// all distinct.
    OddCycle(Vec<usize>),
}

impl BipartitionResult {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, BipartitionResult::Coloring(_))
    }
}

/// 2-colors the graph by BFS, one component at a time. On a coloring
/// conflict the odd cycle is reconstructed from BFS parent pointers.
pub fn bipartition(g: &Graph) -> BipartitionResult {
    let n = g.num_vertices();
    let mut side: Vec<Option<Side>> = vec![None; n];
    let mut parent: Vec<usize> = vec![usize::MAX; n];
    let mut depth: Vec<usize> = vec![0; n];
    let mut queue = std::collections::VecDeque::new();

    for root in 0..n {
        if side[root].is_some() {
            continue;
        }
        side[root] = Some(Side::A);
        depth[root] = 0;
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            let sx = side[x].unwrap();
            for &w in g.neighbors(x) {
                match side[w] {
                    None => {
                        side[w] = Some(sx.other());
                        parent[w] = x;
                        depth[w] = depth[x] + 1;
                        queue.push_back(w);
                    }
                    Some(sw) if sw == sx => {
                        return BipartitionResult::OddCycle(odd_cycle_via(
                            x, w, &parent, &depth,
                        ));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    BipartitionResult::Coloring(side.into_iter().map(|s| s.unwrap()).collect())
}

/// Builds the odd cycle through conflict edge (u, v): both endpoints have the
/// same color, so their tree paths to the lowest common ancestor plus the
/// conflict edge close a cycle of odd length.
fn odd_cycle_via(u: usize, v: usize, parent: &[usize], depth: &[usize]) -> Vec<usize> {
    let (mut a, mut b) = (u, v);
    let mut path_a = vec![a];
    let mut path_b = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        path_a.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        path_b.push(b);
    }
    while a != b {
        a = parent[a];
        path_a.push(a);
        b = parent[b];
        path_b.push(b);
    }
    // path_a ends at the LCA; path_b's copy of it is dropped.
    path_b.pop();
    path_b.reverse();
    path_a.extend(path_b);
    path_a
}

/// Independent validity check for a coloring certificate.
pub fn check_coloring(g: &Graph, sides: &[Side]) -> bool {
    sides.len() == g.num_vertices()
        && g.edges().iter().all(|&(u, v)| sides[u] != sides[v])
}

/// Independent validity check for an odd-cycle certificate.
pub fn check_odd_cycle(g: &Graph, cycle: &[usize]) -> bool {
    let k = cycle.len();
    if k < 3 || k % 2 == 0 {
        return false;
    }
    let distinct: HashSet<usize> = cycle.iter().copied().collect();
    if distinct.len() != k {
        return false;
    }
    (0..k).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % k]))
}

/// The popcount-parity embedding of Q_n into K_{2^{n-1}, 2^{n-1}}.
///
/// Vertices with even popcount form side A, odd popcount side B; within a
/// side vertices are ranked by increasing id.
#[derive(Clone, Debug)]
pub struct HypercubeEmbedding {
    n: u32,
    side_of: Vec<Side>,
    index_within_side: Vec<usize>,
}

impl HypercubeEmbedding {
    pub fn dimension(&self) -> u32 {
        self.n
    }

    /// Vertices per side: 2^{n-1}.
    pub fn side_size(&self) -> usize {
        1usize << (self.n - 1)
    }

    pub fn side_of(&self, v: usize) -> Side {
        self.side_of[v]
    }

    pub fn index_within_side(&self, v: usize) -> usize {
        self.index_within_side[v]
    }

    /// Image of hypercube vertex `v` in the canonical K_{M,M} numbering
    /// (side A first).
    pub fn kmn_vertex(&self, v: usize) -> usize {
        match self.side_of[v] {
            Side::A => self.index_within_side[v],
            Side::B => self.side_size() + self.index_within_side[v],
        }
    }
}

/// Computes the popcount-parity embedding for Q_n.
pub fn embed_hypercube(n: u32) -> Result<HypercubeEmbedding> {
    if n == 0 {
        return Err(Error::invalid("hypercube dimension must be >= 1"));
    }
    if n > MAX_HYPERCUBE_DIM {
        return Err(Error::invalid(format!(
            "hypercube dimension {n} exceeds guard {MAX_HYPERCUBE_DIM}"
        )));
    }
    let verts = 1usize << n;
    let mut side_of = Vec::with_capacity(verts);
    let mut index_within_side = Vec::with_capacity(verts);
    let mut seen = [0usize; 2];
    for v in 0..verts {
        let parity = (v.count_ones() & 1) as usize;
        side_of.push(if parity == 0 { Side::A } else { Side::B });
        index_within_side.push(seen[parity]);
        seen[parity] += 1;
    }
    Ok(HypercubeEmbedding {
        n,
        side_of,
        index_within_side,
    })
}

/// Parses the edge-list text format: a header line `V E`, then `E` lines
/// `u v` with `0 <= u < v < V`. Blank lines are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header line"))?;
    let mut it = header.split_whitespace();
    let num_vertices = parse_count(header_line, it.next(), "vertex count")?;
    let num_edges = parse_count(header_line, it.next(), "edge count")?;
    if it.next().is_some() {
        return Err(Error::parse(header_line, "header has trailing tokens"));
    }

    let mut edges = Vec::with_capacity(num_edges);
    let mut seen = HashSet::with_capacity(num_edges);
    let mut last_line = header_line;
    for (line_no, line) in lines {
        last_line = line_no;
        if edges.len() == num_edges {
            return Err(Error::parse(
                line_no,
                format!("expected {num_edges} edges, found extra line"),
            ));
        }
        let mut it = line.split_whitespace();
        let u = parse_count(line_no, it.next(), "edge endpoint")?;
        let v = parse_count(line_no, it.next(), "edge endpoint")?;
        if it.next().is_some() {
            return Err(Error::parse(line_no, "edge line has trailing tokens"));
        }
        if u >= v {
            return Err(Error::parse(
                line_no,
                format!("edge ({u}, {v}) must satisfy u < v"),
            ));
        }
        if v >= num_vertices {
            return Err(Error::parse(
                line_no,
                format!("vertex {v} out of range (V = {num_vertices})"),
            ));
        }
        if !seen.insert((u, v)) {
            return Err(Error::parse(line_no, format!("duplicate edge ({u}, {v})")));
        }
        edges.push((u, v));
    }
    if edges.len() != num_edges {
        return Err(Error::parse(
            last_line,
            format!("expected {} edges, found {}", num_edges, edges.len()),
        ));
    }
    Graph::new(num_vertices, edges)
}

fn parse_count(line: usize, token: Option<&str>, what: &str) -> Result<usize> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    token
        .parse::<usize>()
        .map_err(|_| Error::parse(line, format!("invalid {what}: {token:?}")))
}

/// Serializes a graph in the edge-list format. Round-trips with
/// [`parse_edge_list`] on canonicalized graphs.
pub fn serialize_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", g.num_vertices(), g.num_edges()));
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Cycle graph C_k, used by tests and oracles.
pub fn cycle_graph(k: usize) -> Result<Graph> {
    if k < 3 {
        return Err(Error::invalid("cycle needs at least 3 vertices"));
    }
    Graph::new(k, (0..k).map(|i| (i, (i + 1) % k)))
}

/// Complete graph K_k.
pub fn complete_graph(k: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            edges.push((u, v));
        }
    }
    Graph::new(k, edges)
}
