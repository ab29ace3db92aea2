//! Bipartite matching: Hopcroft-Karp for cardinality, successive shortest
//! augmenting paths for minimum-cost perfect matching.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub left_to_right: Vec<Option<usize>>,
    pub right_to_left: Vec<Option<usize>>,
    pub size: usize,
}

impl Matching {
    pub fn is_perfect(&self) -> bool {
        self.size == self.left_to_right.len() && self.size == self.right_to_left.len()
    }
}

/// Maximum cardinality matching. `adj[l]` lists the right neighbors of left vertex `l`.
pub fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Matching {
    let n_left = adj.len();
    let mut mate_l = vec![NONE; n_left];
    let mut mate_r = vec![NONE; n_right];
    let mut dist = vec![0u32; n_left];
    let mut size = 0;

    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for l in 0..n_left {
            if mate_l[l] == NONE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = mate_r[r];
                if next == NONE {
                    found = true;
                } else if dist[next] == u32::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        // Layered DFS, iterative to stay safe on long paths.
        let mut it = vec![0usize; n_left];
        for root in 0..n_left {
            if mate_l[root] != NONE {
                continue;
            }
            let mut path: Vec<usize> = vec![root];
            while let Some(&l) = path.last() {
                if it[l] == adj[l].len() {
                    dist[l] = u32::MAX;
                    path.pop();
                    continue;
                }
                let r = adj[l][it[l]];
                it[l] += 1;
                let next = mate_r[r];
                if next == NONE {
                    // Augment along the path; each left vertex takes the right
                    // vertex its iterator last advanced over.
                    for &pl in path.iter().rev() {
                        let pr = adj[pl][it[pl] - 1];
                        mate_r[pr] = pl;
                        mate_l[pl] = pr;
                    }
                    size += 1;
                    break;
                } else if dist[next] == dist[l] + 1 {
                    path.push(next);
                }
            }
        }
    }

    Matching {
        left_to_right: mate_l
            .into_iter()
            .map(|r| (r != NONE).then_some(r))
            .collect(),
        right_to_left: mate_r
            .into_iter()
            .map(|l| (l != NONE).then_some(l))
            .collect(),
        size,
    }
}

/// Left vertices reachable by alternating paths from unmatched left vertices.
///
/// For a maximum matching that is not left-perfect, this set `X` satisfies
/// `|N(X)| < |X|` (König).
pub fn hall_violator(adj: &[Vec<usize>], matching: &Matching) -> Vec<usize> {
    let n_left = adj.len();
    let mut seen = vec![false; n_left];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (l, mate) in matching.left_to_right.iter().enumerate() {
        if mate.is_none() {
            seen[l] = true;
            queue.push_back(l);
        }
    }
    while let Some(l) = queue.pop_front() {
        for &r in &adj[l] {
            if let Some(next) = matching.right_to_left[r] {
                if !seen[next] {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    (0..n_left).filter(|&l| seen[l]).collect()
}

/// Minimum-cost perfect matching on a square bipartite graph with
/// non-negative integer costs. `adj[l]` lists `(right, cost)`.
///
/// Returns `None` when no perfect matching exists.
pub fn min_cost_perfect_matching(adj: &[Vec<(usize, i64)>]) -> Option<(i64, Vec<usize>)> {
    let n = adj.len();
    debug_assert!(adj.iter().flatten().all(|&(r, c)| r < n && c >= 0));
    let mut mate_l = vec![NONE; n];
    let mut mate_r = vec![NONE; n];
    // Potentials keep reduced costs non-negative so Dijkstra applies.
    let mut pot_l = vec![0i64; n];
    let mut pot_r = vec![0i64; n];
    let mut dist = vec![i64::MAX; n];
    let mut prev = vec![NONE; n];
    let mut done = vec![false; n];

    for root in 0..n {
        dist.iter_mut().for_each(|d| *d = i64::MAX);
        prev.iter_mut().for_each(|p| *p = NONE);
        done.iter_mut().for_each(|d| *d = false);
        let mut heap = BinaryHeap::new();
        // dist is indexed by right vertex; prev[r] is the left vertex we came from.
        for &(r, c) in &adj[root] {
            let rc = c + pot_l[root] - pot_r[r];
            if rc < dist[r] {
                dist[r] = rc;
                prev[r] = root;
                heap.push(Reverse((rc, r)));
            }
        }
        let mut target = NONE;
        while let Some(Reverse((d, r))) = heap.pop() {
            if done[r] || d > dist[r] {
                continue;
            }
            done[r] = true;
            let l = mate_r[r];
            if l == NONE {
                target = r;
                break;
            }
            for &(r2, c) in &adj[l] {
                if done[r2] {
                    continue;
                }
                let nd = d + c + pot_l[l] - pot_r[r2];
                if nd < dist[r2] {
                    dist[r2] = nd;
                    prev[r2] = l;
                    heap.push(Reverse((nd, r2)));
                }
            }
        }
        if target == NONE {
            return None;
        }
        let limit = dist[target];
        // Potential update: left vertices on the tree get distance of their mate.
        for r in 0..n {
            if done[r] && dist[r] <= limit {
                let delta = limit - dist[r];
                pot_r[r] -= delta;
                let l = mate_r[r];
                if l != NONE {
                    pot_l[l] -= delta;
                }
            }
        }
        pot_l[root] -= limit;
        let mut r = target;
        while r != NONE {
            let l = prev[r];
            let next = mate_l[l];
            mate_l[l] = r;
            mate_r[r] = l;
            r = if l == root { NONE } else { next };
        }
    }

    let cost = (0..n)
        .map(|l| {
            adj[l]
                .iter()
                .filter(|&&(r, _)| r == mate_l[l])
                .map(|&(_, c)| c)
                .min()
                .expect("matched edge exists")
        })
        .sum();
    Some((cost, mate_l))
}
