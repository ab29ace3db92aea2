//! Seeded instance generators and the small-graph corpus.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::interval::{IntegerRep, IntervalRep};
use crate::io::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenKind {
    Regular {
        n: usize,
        r: usize,
    },
    Tree {
        n: usize,
    },
    /// Cliques of size 2..=`max_clique` glued at cut vertices.
    Block {
        n: usize,
        max_clique: usize,
    },
    /// Random polygon triangulation with each edge dropped with probability `drop`.
    Outerplanar {
        n: usize,
        drop: f64,
    },
    /// Union of `k` proper chains.
    Interval {
        n: usize,
        k: usize,
    },
    ProperInterval {
        n: usize,
    },
    Gnp {
        n: usize,
        p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("infeasible generator parameters: {0}")]
pub struct GenError(pub String);

pub fn generate_instance(kind: GenKind, seed: u64) -> Result<Instance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bad = |m: &str| Err(GenError(m.to_string()));
    match kind {
        GenKind::Regular { n, r } => {
            if r >= n || (n * r) % 2 == 1 || n > 64 {
                return bad("regular needs r < n <= 64 and n*r even");
            }
            Ok(Instance::from_graph(random_regular(n, r, &mut rng)))
        }
        GenKind::Tree { n } => {
            if n == 0 {
                return bad("tree needs n >= 1");
            }
            Ok(Instance::from_graph(random_tree(n, &mut rng)))
        }
        GenKind::Block { n, max_clique } => {
            if n == 0 || max_clique < 2 {
                return bad("block needs n >= 1 and max_clique >= 2");
            }
            Ok(Instance::from_graph(random_block(n, max_clique, &mut rng)))
        }
        GenKind::Outerplanar { n, drop } => {
            if n == 0 || !(0.0..=1.0).contains(&drop) {
                return bad("outerplanar needs n >= 1 and drop in [0, 1]");
            }
            Ok(Instance::from_graph(random_outerplanar(n, drop, &mut rng)))
        }
        GenKind::Interval { n, k } => {
            if n == 0 || k == 0 || k > n {
                return bad("interval needs 1 <= k <= n");
            }
            Ok(Instance::from_rep(&random_interval_rep(n, k, &mut rng)))
        }
        GenKind::ProperInterval { n } => {
            if n == 0 {
                return bad("proper_interval needs n >= 1");
            }
            Ok(Instance::from_rep(&random_interval_rep(n, 1, &mut rng)))
        }
        GenKind::Gnp { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return bad("gnp needs p in [0, 1]");
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            Ok(Instance::from_graph(
                Graph::new(n, &edges).expect("valid edges"),
            ))
        }
    }
}

fn relabel(n: usize, edges: &[(Vertex, Vertex)], rng: &mut ChaCha8Rng) -> Graph {
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(rng);
    let edges: Vec<_> = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    Graph::new(n, &edges).expect("valid edges")
}

/// Circulant start, then degree-preserving double-edge swaps.
fn random_regular(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut set: HashSet<(Vertex, Vertex)> = HashSet::new();
    let key = |a: Vertex, b: Vertex| (a.min(b), a.max(b));
    for i in 0..n {
        for d in 1..=r / 2 {
            set.insert(key(i, (i + d) % n));
        }
        if r % 2 == 1 {
            set.insert(key(i, (i + n / 2) % n));
        }
    }
    let mut edges: Vec<_> = set.iter().copied().collect();
    edges.sort_unstable();
    if edges.len() >= 2 {
        for _ in 0..10 * edges.len() {
            let i = rng.gen_range(0..edges.len());
            let j = rng.gen_range(0..edges.len());
            let ((a, b), (c, d)) = (edges[i], edges[j]);
            let (c, d) = if rng.gen_bool(0.5) { (c, d) } else { (d, c) };
            if a == c || a == d || b == c || b == d {
                continue;
            }
            let (e1, e2) = (key(a, c), key(b, d));
            if set.contains(&e1) || set.contains(&e2) {
                continue;
            }
            set.remove(&edges[i]);
            set.remove(&edges[j]);
            set.insert(e1);
            set.insert(e2);
            edges[i] = e1;
            edges[j] = e2;
        }
    }
    Graph::new(n, &edges).expect("valid edges")
}

fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    relabel(n, &edges, rng)
}

fn random_block(n: usize, max_clique: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    let mut count = 1;
    while count < n {
        let anchor = rng.gen_range(0..count);
        let size = rng.gen_range(2..=max_clique).min(n - count + 1);
        let mut members = vec![anchor];
        members.extend(count..count + size - 1);
        count += size - 1;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    relabel(n, &edges, rng)
}

fn random_outerplanar(n: usize, drop: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    if n >= 2 {
        edges.extend((0..n - 1).map(|i| (i, i + 1)));
    }
    if n >= 3 {
        edges.push((0, n - 1));
        // Triangulate the polygon on the hull edge (0, n-1) recursively.
        let mut stack = vec![(0, n - 1)];
        while let Some((a, b)) = stack.pop() {
            if b - a < 2 {
                continue;
            }
            let apex = rng.gen_range(a + 1..b);
            for (x, y) in [(a, apex), (apex, b)] {
                if y - x >= 2 {
                    edges.push((x, y));
                }
                stack.push((x, y));
            }
        }
    }
    edges.retain(|_| !rng.gen_bool(drop));
    relabel(n, &edges, rng)
}

/// `k` proper chains with lengths growing by chain so that chains nest.
fn random_interval_rep(n: usize, k: usize, rng: &mut ChaCha8Rng) -> IntegerRep {
    let mut sizes = vec![n / k; k];
    for s in sizes.iter_mut().take(n % k) {
        *s += 1;
    }
    let span = (2 * n + 2) as i64;
    let mut intervals = Vec::with_capacity(n);
    for (c, &size) in sizes.iter().enumerate() {
        let len_lo = 2 + 3 * c as i64;
        let mut starts: Vec<i64> = rand::seq::index::sample(rng, span as usize, size)
            .into_iter()
            .map(|s| s as i64)
            .collect();
        starts.sort_unstable();
        let mut last_end = i64::MIN;
        for s in starts {
            let end = (s + rng.gen_range(len_lo..=len_lo + 2)).max(last_end + 1);
            last_end = end;
            intervals.push((s, end));
        }
    }
    intervals.shuffle(rng);
    IntervalRep::new(intervals).expect("start precedes end")
}

fn edge_bits(n: usize) -> Vec<(Vertex, Vertex)> {
    let mut out = Vec::new();
    for v in 1..n {
        for u in 0..v {
            out.push((u, v));
        }
    }
    out
}

/// Adjacency code under `perm`, used as an isomorphism-class key.
fn code(adj: &[u32], perm: &[usize]) -> u64 {
    let n = adj.len();
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let mut c = 0u64;
    let mut bit = 0;
    for v in 1..n {
        for u in 0..v {
            if adj[inv[u]] >> inv[v] & 1 == 1 {
                c |= 1 << bit;
            }
            bit += 1;
        }
    }
    c
}

/// Minimum code over labelings that respect a degree-based vertex ranking.
fn canonical_code(adj: &[u32]) -> u64 {
    let n = adj.len();
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let invariant = |v: usize| {
        let mut nd: Vec<u32> = (0..n)
            .filter(|&w| adj[v] >> w & 1 == 1)
            .map(|w| deg[w])
            .collect();
        nd.sort_unstable();
        (deg[v], nd)
    };
    let mut order: Vec<usize> = (0..n).collect();
    let inv: Vec<_> = (0..n).map(invariant).collect();
    order.sort_by(|&a, &b| inv[a].cmp(&inv[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        if i > 0 && inv[order[i - 1]] == inv[v] {
            groups.last_mut().unwrap().push(v);
        } else {
            groups.push(vec![v]);
        }
    }
    let mut best = u64::MAX;
    let mut perm = vec![0; n];
    permute_groups(adj, &groups, 0, 0, &mut perm, &mut best);
    best
}

fn permute_groups(
    adj: &[u32],
    groups: &[Vec<usize>],
    gi: usize,
    pos: usize,
    perm: &mut Vec<usize>,
    best: &mut u64,
) {
    if gi == groups.len() {
        *best = (*best).min(code(adj, perm));
        return;
    }
    let mut g = groups[gi].clone();
    heap_permutations(&mut g, &mut |p| {
        for (i, &v) in p.iter().enumerate() {
            perm[v] = pos + i;
        }
        permute_groups(adj, groups, gi + 1, pos + p.len(), perm, best);
    });
}

fn heap_permutations(a: &mut [usize], f: &mut dyn FnMut(&[usize])) {
    let n = a.len();
    let mut c = vec![0; n];
    f(a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// All graphs on `n <= 8` vertices, one per isomorphism class.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 8, "corpus enumeration is limited to n <= 8");
    let mut level: Vec<Vec<u32>> = vec![vec![]];
    for k in 1..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for adj in &level {
            for mask in 0u32..1 << (k - 1) {
                let mut a = adj.clone();
                for (v, row) in a.iter_mut().enumerate() {
                    if mask >> v & 1 == 1 {
                        *row |= 1 << (k - 1);
                    }
                }
                a.push(mask);
                if seen.insert(canonical_code(&a)) {
                    next.push(a);
                }
            }
        }
        level = next;
    }
    level
        .iter()
        .map(|adj| {
            let edges: Vec<_> = edge_bits(n)
                .into_iter()
                .filter(|&(u, v)| adj[u] >> v & 1 == 1)
                .collect();
            Graph::new(n, &edges).expect("valid edges")
        })
        .collect()
}

/// Connected graphs on `n` vertices up to isomorphism.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    all_graphs(n)
        .into_iter()
        .filter(|g| g.is_connected())
        .collect()
}

/// Every graph with `1 <= n <= max_n` up to isomorphism.
pub fn corpus(max_n: usize) -> Vec<Graph> {
    (1..=max_n).flat_map(all_graphs).collect()
}
