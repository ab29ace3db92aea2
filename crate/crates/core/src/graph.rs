//! Simple undirected graphs, block decomposition and class recognition.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

/// Vertex id. Vertices are dense `0..n`.
pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
}

/// A finite simple undirected graph with sorted adjacency lists.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges())
    }
}

impl Graph {
    /// Builds a graph on `n` vertices. Duplicate edges (in either orientation) collapse.
    pub fn new(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        Ok(Self { adj, m: m / 2 })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least three vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::new(n, &edges).expect("clique edges are valid")
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::new(leaves + 1, &edges).expect("star edges are valid")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..a {
            for v in 0..b {
                edges.push((u, a + v));
            }
        }
        Self::new(a + b, &edges).expect("bipartite edges are valid")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::new(10, &edges).expect("petersen edges are valid")
    }

    /// The `d`-dimensional hypercube.
    pub fn hypercube(d: u32) -> Self {
        let n = 1usize << d;
        let mut edges = Vec::new();
        for u in 0..n {
            for b in 0..d {
                let v = u ^ (1 << b);
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        Self::new(n, &edges).expect("hypercube edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.m);
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    /// `N[v]` as a bitmask. Only valid for graphs with at most 64 vertices.
    pub fn closed_masks(&self) -> Vec<u64> {
        assert!(self.n() <= 64, "bitmask view needs n <= 64");
        self.adj
            .iter()
            .enumerate()
            .map(|(v, list)| list.iter().fold(1u64 << v, |acc, &w| acc | (1u64 << w)))
            .collect()
    }

    /// `N(X)`: vertices adjacent to at least one vertex of `set`.
    pub fn open_neighborhood(&self, set: &[Vertex]) -> BTreeSet<Vertex> {
        set.iter()
            .flat_map(|&v| self.adj[v].iter().copied())
            .collect()
    }

    pub fn isolated_vertices(&self) -> Vec<Vertex> {
        (0..self.n()).filter(|&v| self.adj[v].is_empty()).collect()
    }

    /// Component label per vertex, labels dense in discovery order.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        self.component_labels_avoiding(None)
    }

    /// Component labels of `G - skip`; the skipped vertex gets `usize::MAX`.
    pub fn component_labels_avoiding(&self, skip: Option<Vertex>) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX || Some(s) == skip {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if label[w] == usize::MAX && Some(w) != skip {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Vertex sets of the connected components, each sorted.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let (label, count) = self.component_labels();
        let mut out = vec![Vec::new(); count];
        for (v, &l) in label.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().1 <= 1
    }

    /// Subgraph induced by `vertices`. The returned table maps new ids back to
    /// ids of `self`; new ids follow the order of `vertices`.
    pub fn induced_subgraph(&self, vertices: &[Vertex]) -> (Graph, Vec<Vertex>) {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::new(vertices.len(), &edges).expect("induced edges are valid");
        (g, vertices.to_vec())
    }

    /// Copy of the graph with the given edges removed (missing edges are ignored).
    pub fn without_edges(&self, removed: &[(Vertex, Vertex)]) -> Graph {
        let drop: HashSet<(Vertex, Vertex)> =
            removed.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        let kept: Vec<_> = self
            .edges()
            .into_iter()
            .filter(|e| !drop.contains(e))
            .collect();
        Graph::new(self.n(), &kept).expect("subset of valid edges")
    }

    /// Whether `set` dominates the graph.
    pub fn is_dominating(&self, set: &[Vertex]) -> bool {
        let mut dominated = vec![false; self.n()];
        for &v in set {
            dominated[v] = true;
            for &w in &self.adj[v] {
                dominated[w] = true;
            }
        }
        dominated.into_iter().all(|d| d)
    }

    pub fn is_bipartite(&self) -> bool {
        let n = self.n();
        let mut color = vec![u8::MAX; n];
        let mut stack = Vec::new();
        for s in 0..n {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[v];
                        stack.push(w);
                    } else if color[w] == color[v] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Biconnected components and articulation points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    /// Sorted articulation points.
    pub cut_vertices: Vec<Vertex>,
    /// Vertex set of every block, each sorted. Isolated vertices form singleton blocks.
    pub blocks: Vec<Vec<Vertex>>,
    /// Edges of every block, parallel to `blocks`.
    pub block_edges: Vec<Vec<(Vertex, Vertex)>>,
    /// For each vertex, the blocks containing it.
    pub vertex_blocks: Vec<Vec<usize>>,
}

impl BlockDecomposition {
    pub fn is_cut_vertex(&self, v: Vertex) -> bool {
        self.cut_vertices.binary_search(&v).is_ok()
    }
}

/// Hopcroft-Tarjan biconnected components with an explicit edge stack.
pub fn block_decomposition(g: &Graph) -> BlockDecomposition {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut timer = 0;
    let mut edge_stack: Vec<(Vertex, Vertex)> = Vec::new();
    let mut block_edges: Vec<Vec<(Vertex, Vertex)>> = Vec::new();
    let mut blocks: Vec<Vec<Vertex>> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        if g.degree(root) == 0 {
            blocks.push(vec![root]);
            block_edges.push(Vec::new());
            continue;
        }
        let mut root_children = 0;
        // (vertex, parent, next neighbor index)
        let mut stack: Vec<(Vertex, Vertex, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, parent) = (top.0, top.1);
            if top.2 < g.degree(v) {
                let w = g.neighbors(v)[top.2];
                top.2 += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent == usize::MAX {
                    continue;
                }
                low[parent] = low[parent].min(low[v]);
                if low[v] >= disc[parent] {
                    if parent != root {
                        is_cut[parent] = true;
                    }
                    let mut edges = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        edges.push((e.0.min(e.1), e.0.max(e.1)));
                        if e == (parent, v) {
                            break;
                        }
                    }
                    edges.sort_unstable();
                    let verts: BTreeSet<Vertex> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
                    blocks.push(verts.into_iter().collect());
                    block_edges.push(edges);
                }
            }
        }
        if root_children >= 2 {
            is_cut[root] = true;
        }
    }

    let mut vertex_blocks = vec![Vec::new(); n];
    for (b, verts) in blocks.iter().enumerate() {
        for &v in verts {
            vertex_blocks[v].push(b);
        }
    }
    BlockDecomposition {
        cut_vertices: (0..n).filter(|&v| is_cut[v]).collect(),
        blocks,
        block_edges,
        vertex_blocks,
    }
}

/// Structural classes relevant to the deciders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct ClassFlags {
    pub regular_degree: Option<usize>,
    pub is_tree: bool,
    pub is_bipartite: bool,
    pub is_block_graph: bool,
    pub is_outerplanar: bool,
    pub has_isolated_vertex: bool,
}

pub fn classify_graph(g: &Graph) -> ClassFlags {
    let n = g.n();
    let regular_degree = if n > 0 && g.degree(0) >= 1 && (0..n).all(|v| g.degree(v) == g.degree(0))
    {
        Some(g.degree(0))
    } else {
        None
    };
    let blocks = block_decomposition(g);
    ClassFlags {
        regular_degree,
        is_tree: n > 0 && g.m() + 1 == n && g.is_connected(),
        is_bipartite: g.is_bipartite(),
        is_block_graph: is_block_graph_with(g, &blocks),
        is_outerplanar: is_outerplanar_with(&blocks),
        has_isolated_vertex: (0..n).any(|v| g.degree(v) == 0),
    }
}

fn is_block_graph_with(g: &Graph, blocks: &BlockDecomposition) -> bool {
    blocks
        .blocks
        .iter()
        .zip(&blocks.block_edges)
        .all(|(verts, edges)| {
            let k = verts.len();
            k <= 1 || (edges.len() == k * (k - 1) / 2 && verts.iter().all(|&v| v < g.n()))
        })
}

pub fn is_block_graph(g: &Graph) -> bool {
    is_block_graph_with(g, &block_decomposition(g))
}

pub fn is_outerplanar(g: &Graph) -> bool {
    is_outerplanar_with(&block_decomposition(g))
}

fn is_outerplanar_with(blocks: &BlockDecomposition) -> bool {
    blocks
        .blocks
        .iter()
        .zip(&blocks.block_edges)
        .all(|(verts, edges)| verts.len() <= 2 || biconnected_block_is_outerplanar(verts, edges))
}

/// Ear reduction on a biconnected block with at least three vertices.
///
/// A degree-2 vertex `v` with neighbors `a, b` lies between them on the outer
/// cycle, so it can be replaced by the edge `ab`, which must then be an outer
/// edge. Reusing an edge that is already required to be outer is only possible
/// when the remaining graph is a triangle.
fn biconnected_block_is_outerplanar(verts: &[Vertex], edges: &[(Vertex, Vertex)]) -> bool {
    let k = verts.len();
    if edges.len() > 2 * k - 3 {
        return false;
    }
    let index = |v: Vertex| verts.binary_search(&v).expect("edge endpoint in block");
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); k];
    for &(u, v) in edges {
        let (a, b) = (index(u), index(v));
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut outer: HashSet<(usize, usize)> = HashSet::new();
    let mut alive = k;
    let mut edge_count = edges.len();
    let mut removed = vec![false; k];
    let mut queue: Vec<usize> = (0..k).filter(|&v| adj[v].len() == 2).collect();

    while alive > 3 {
        if edge_count > 2 * alive - 3 {
            return false;
        }
        let v = loop {
            match queue.pop() {
                Some(v) if !removed[v] && adj[v].len() == 2 => break Some(v),
                Some(_) => continue,
                None => break None,
            }
        };
        let Some(v) = v else {
            return false;
        };
        let mut it = adj[v].iter().copied();
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        if adj[a].contains(&b) && outer.contains(&key(a, b)) {
            return false;
        }
        removed[v] = true;
        alive -= 1;
        adj[a].remove(&v);
        adj[b].remove(&v);
        adj[v].clear();
        edge_count -= 2;
        outer.remove(&key(a, v));
        outer.remove(&key(b, v));
        if adj[a].insert(b) {
            adj[b].insert(a);
            edge_count += 1;
        }
        outer.insert(key(a, b));
        for w in [a, b] {
            if adj[w].len() == 2 {
                queue.push(w);
            }
        }
    }
    // Three vertices left: outerplanar iff they form a triangle.
    alive == 3 && edge_count == 3
}
