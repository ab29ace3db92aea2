//! Interval representations, nestedness, the unit-interval decider and the
//! profile dynamic program for pairing dominating sets.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Debug;

use num_traits::Num;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factor::{FactorCertificate, FactorComponent};
use crate::graph::{Graph, Vertex};
use crate::oracle::{combine_outcomes, Outcome};

/// Endpoint scalar for interval representations.
pub trait Scalar: Num + Copy + PartialOrd + Debug {}

impl<T: Num + Copy + PartialOrd + Debug> Scalar for T {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("interval {id}: min exceeds max")]
    Reversed { id: usize },
    #[error("interval {id}: endpoints are not comparable")]
    Incomparable { id: usize },
    #[error("interval ids must be exactly 0..{n}, found {id}")]
    IdGap { id: usize, n: usize },
    #[error("representation is not proper (nestedness {k})")]
    NotProper { k: usize },
    #[error("invalid pairing dominating set: {0}")]
    InvalidPds(#[from] PdsError),
    #[error("representation has {rep} intervals but the graph has {graph} vertices")]
    SizeMismatch { rep: usize, graph: usize },
}

/// Closed intervals indexed by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRep<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Scalar> IntervalRep<T> {
    /// Intervals given in id order.
    pub fn new(intervals: Vec<(T, T)>) -> Result<Self, IntervalError> {
        for (id, (lo, hi)) in intervals.iter().enumerate() {
            match lo.partial_cmp(hi) {
                None => return Err(IntervalError::Incomparable { id }),
                Some(Ordering::Greater) => return Err(IntervalError::Reversed { id }),
                _ => {}
            }
            if lo.partial_cmp(lo).is_none() || hi.partial_cmp(hi).is_none() {
                return Err(IntervalError::Incomparable { id });
            }
        }
        Ok(IntervalRep { intervals })
    }

    /// Intervals given as `(id, min, max)` in any order; ids must be `0..n`.
    pub fn from_triples(triples: Vec<(usize, T, T)>) -> Result<Self, IntervalError> {
        let n = triples.len();
        let mut slots: Vec<Option<(T, T)>> = vec![None; n];
        for (id, lo, hi) in triples {
            if id >= n || slots[id].is_some() {
                return Err(IntervalError::IdGap { id, n });
            }
            slots[id] = Some((lo, hi));
        }
        IntervalRep::new(
            slots
                .into_iter()
                .map(|s| s.expect("all ids filled"))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self, id: usize) -> T {
        self.intervals[id].0
    }

    pub fn max(&self, id: usize) -> T {
        self.intervals[id].1
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn intersects(&self, a: usize, b: usize) -> bool {
        let (la, ha) = self.intervals[a];
        let (lb, hb) = self.intervals[b];
        la <= hb && lb <= ha
    }
}

pub type FloatRep = IntervalRep<f64>;
pub type IntegerRep = IntervalRep<i64>;
pub type RationalRep = IntervalRep<num_rational::Rational64>;

/// A representation whose `2n` endpoints are exactly `1..=2n`.
pub type NormalizedRep = IntervalRep<i64>;

impl NormalizedRep {
    pub fn is_normalized(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; 2 * n + 1];
        for &(lo, hi) in &self.intervals {
            for p in [lo, hi] {
                if p < 1 || p as usize > 2 * n || seen[p as usize] {
                    return false;
                }
                seen[p as usize] = true;
            }
            if lo >= hi {
                return false;
            }
        }
        true
    }

    fn start(&self, id: usize) -> usize {
        self.intervals[id].0 as usize
    }

    fn end(&self, id: usize) -> usize {
        self.intervals[id].1 as usize
    }
}

/// Remaps endpoints to `1..=2n`. At equal coordinates starts precede ends,
/// and equal starts (or ends) are ordered by id.
pub fn normalize<T: Scalar>(rep: &IntervalRep<T>) -> NormalizedRep {
    let mut events: Vec<(T, u8, usize)> = Vec::with_capacity(2 * rep.len());
    for (id, &(lo, hi)) in rep.intervals.iter().enumerate() {
        events.push((lo, 0, id));
        events.push((hi, 1, id));
    }
    events.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("endpoints validated as comparable")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut out = vec![(0i64, 0i64); rep.len()];
    for (pos, &(_, kind, id)) in events.iter().enumerate() {
        if kind == 0 {
            out[id].0 = pos as i64 + 1;
        } else {
            out[id].1 = pos as i64 + 1;
        }
    }
    IntervalRep { intervals: out }
}

pub fn intersection_graph<T: Scalar>(rep: &IntervalRep<T>) -> Graph {
    let n = rep.len();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rep.intersects(a, b) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, &edges).expect("intersection edges are in range")
}

/// Maximum number of intervals sharing a point (the clique number).
pub fn max_overlap<T: Scalar>(rep: &IntervalRep<T>) -> usize {
    let norm = normalize(rep);
    let mut events = vec![0i32; 2 * rep.len() + 2];
    for &(lo, hi) in &norm.intervals {
        events[lo as usize] = 1;
        events[hi as usize] = -1;
    }
    let mut best = 0;
    let mut cur = 0;
    for e in events {
        cur += e;
        best = best.max(cur);
    }
    best as usize
}

/// Partition into proper chains; chain `i` lists interval ids in start order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProperChainPartition {
    pub chains: Vec<Vec<usize>>,
}

impl ProperChainPartition {
    pub fn k(&self) -> usize {
        self.chains.len()
    }

    /// `(chain, 1-based position)` of every interval.
    pub fn positions(&self, n: usize) -> Vec<(usize, usize)> {
        let mut out = vec![(usize::MAX, 0); n];
        for (i, chain) in self.chains.iter().enumerate() {
            for (s, &id) in chain.iter().enumerate() {
                out[id] = (i, s + 1);
            }
        }
        out
    }
}

/// Nestedness `k` and a partition into `k` proper chains.
///
/// Sorted by start, a nested chain is a strictly decreasing run of ends; each
/// interval joins the chain whose last end is the largest one below its own.
pub fn nestedness_and_chains<T: Scalar>(rep: &IntervalRep<T>) -> (usize, ProperChainPartition) {
    let norm = normalize(rep);
    let mut order: Vec<usize> = (0..rep.len()).collect();
    order.sort_by_key(|&id| norm.start(id));
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut last_end: Vec<usize> = Vec::new();
    for id in order {
        let end = norm.end(id);
        let best = (0..chains.len())
            .filter(|&i| last_end[i] < end)
            .max_by_key(|&i| last_end[i]);
        match best {
            Some(i) => {
                chains[i].push(id);
                last_end[i] = end;
            }
            None => {
                chains.push(vec![id]);
                last_end.push(end);
            }
        }
    }
    (chains.len(), ProperChainPartition { chains })
}

/// Disjoint vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingDominatingSet {
    pub pairs: Vec<(Vertex, Vertex)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdsError {
    #[error("vertex {0} out of range")]
    OutOfRange(Vertex),
    #[error("vertex {0} appears in two pairs")]
    Overlap(Vertex),
    #[error("vertex {0} is not pair-covered")]
    Uncovered(Vertex),
    #[error("pair ({0}, {1}) is not adjacent")]
    NonAdjacent(Vertex, Vertex),
}

impl PairingDominatingSet {
    pub fn new(pairs: Vec<(Vertex, Vertex)>) -> Self {
        PairingDominatingSet { pairs }
    }

    pub fn adjacent_flags(&self, g: &Graph) -> Vec<bool> {
        self.pairs.iter().map(|&(u, v)| g.has_edge(u, v)).collect()
    }

    pub fn is_adjacent(&self, g: &Graph) -> bool {
        self.adjacent_flags(g).into_iter().all(|f| f)
    }

    /// Whether `x` lies in `N[u] ∩ N[v]` for pair `i`.
    pub fn pair_covers(g: &Graph, (u, v): (Vertex, Vertex), x: Vertex) -> bool {
        (x == u || g.has_edge(x, u)) && (x == v || g.has_edge(x, v))
    }

    /// Disjointness and coverage.
    pub fn validate(&self, g: &Graph) -> Result<(), PdsError> {
        let mut used = vec![false; g.n()];
        for &(u, v) in &self.pairs {
            for x in [u, v] {
                if x >= g.n() {
                    return Err(PdsError::OutOfRange(x));
                }
                if used[x] {
                    return Err(PdsError::Overlap(x));
                }
                used[x] = true;
            }
        }
        for x in 0..g.n() {
            if !self.pairs.iter().any(|&p| Self::pair_covers(g, p, x)) {
                return Err(PdsError::Uncovered(x));
            }
        }
        Ok(())
    }

    pub fn validate_apds(&self, g: &Graph) -> Result<(), PdsError> {
        self.validate(g)?;
        if let Some(&(u, v)) = self.pairs.iter().find(|&&(u, v)| !g.has_edge(u, v)) {
            return Err(PdsError::NonAdjacent(u, v));
        }
        Ok(())
    }

    /// Pairs whose removal keeps the set a PDS.
    pub fn redundant_pairs(&self, g: &Graph) -> Vec<usize> {
        (0..self.pairs.len())
            .filter(|&i| {
                (0..g.n()).all(|x| {
                    self.pairs
                        .iter()
                        .enumerate()
                        .any(|(j, &p)| j != i && Self::pair_covers(g, p, x))
                })
            })
            .collect()
    }

    /// Assigns every vertex to the lowest-index pair covering it.
    pub fn attachment(&self, g: &Graph) -> Result<Vec<Vec<Vertex>>, PdsError> {
        self.validate(g)?;
        let mut groups = vec![Vec::new(); self.pairs.len()];
        let mut paired = vec![false; g.n()];
        for (i, &(u, v)) in self.pairs.iter().enumerate() {
            paired[u] = true;
            paired[v] = true;
            groups[i].extend([u, v]);
        }
        for x in (0..g.n()).filter(|&x| !paired[x]) {
            let i = self
                .pairs
                .iter()
                .position(|&p| Self::pair_covers(g, p, x))
                .expect("validated coverage");
            groups[i].push(x);
        }
        Ok(groups)
    }
}

/// APDS to `{K_2, K^+_{2,l}}`-factor via [`PairingDominatingSet::attachment`].
pub fn apds_to_factor(
    g: &Graph,
    apds: &PairingDominatingSet,
) -> Result<FactorCertificate, PdsError> {
    apds.validate_apds(g)?;
    let groups = apds.attachment(g)?;
    let components = groups
        .into_iter()
        .map(|grp| {
            if grp.len() == 2 {
                FactorComponent::Edge {
                    u: grp[0],
                    v: grp[1],
                }
            } else {
                FactorComponent::TwoUniversal {
                    u: grp[0],
                    v: grp[1],
                    leaves: grp[2..].to_vec(),
                }
            }
        })
        .collect();
    Ok(FactorCertificate { components })
}

/// Factor of `K_2`, `K_3` and `K^+_{2,l}` components to an APDS of universal pairs.
pub fn factor_to_apds(
    g: &Graph,
    factor: &FactorCertificate,
) -> Result<PairingDominatingSet, String> {
    factor.validate(g).map_err(|e| e.to_string())?;
    let mut pairs = Vec::with_capacity(factor.components.len());
    for c in &factor.components {
        match c {
            FactorComponent::Edge { u, v } | FactorComponent::TwoUniversal { u, v, .. } => {
                pairs.push((*u, *v))
            }
            FactorComponent::Cycle { vertices } if vertices.len() == 3 => {
                pairs.push((vertices[0], vertices[1]))
            }
            FactorComponent::Cycle { vertices } => {
                return Err(format!(
                    "cycle of length {} has no universal pair",
                    vertices.len()
                ))
            }
        }
    }
    Ok(PairingDominatingSet { pairs })
}

/// Verdict of the unit-interval decider.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitIntervalDecision {
    pub outcome_d: bool,
    pub outcome: Outcome,
    /// A `{K_2, K_3}`-factor when `outcome_d`.
    pub factor: Option<FactorCertificate>,
    /// Per component: vertices in start order and its outcome.
    pub components: Vec<(Vec<Vertex>, Outcome)>,
}

/// Decides a proper representation component by component.
pub fn unit_interval_decide<T: Scalar>(
    rep: &IntervalRep<T>,
) -> Result<UnitIntervalDecision, IntervalError> {
    let (k, _) = nestedness_and_chains(rep);
    if k > 1 {
        return Err(IntervalError::NotProper { k });
    }
    let norm = normalize(rep);
    let g = intersection_graph(&norm);
    let mut order: Vec<usize> = (0..rep.len()).collect();
    order.sort_by_key(|&id| norm.start(id));

    let mut runs: Vec<Vec<Vertex>> = Vec::new();
    let mut reach = 0;
    for id in order {
        if runs.is_empty() || norm.start(id) > reach {
            runs.push(Vec::new());
        }
        runs.last_mut().expect("run pushed").push(id);
        reach = reach.max(norm.end(id));
    }

    let mut components = Vec::with_capacity(runs.len());
    let mut parts = Vec::new();
    let mut all_d = true;
    for run in runs {
        let pieces = unit_component_factor(&g, &run);
        let outcome = if pieces.is_some() {
            Outcome::D
        } else {
            Outcome::N
        };
        match pieces {
            Some(p) => parts.extend(p),
            None => all_d = false,
        }
        components.push((run, outcome));
    }
    let outcome = combine_outcomes(components.iter().map(|c| c.1));
    let factor = all_d.then_some(FactorCertificate { components: parts });
    if let Some(f) = &factor {
        debug_assert!(f.validate(&g).is_ok());
    }
    Ok(UnitIntervalDecision {
        outcome_d: all_d,
        outcome,
        factor,
        components,
    })
}

fn unit_component_factor(g: &Graph, v: &[Vertex]) -> Option<Vec<FactorComponent>> {
    let n = v.len();
    if n == 1 {
        return None;
    }
    let edges = |range: std::ops::Range<usize>| -> Vec<FactorComponent> {
        range
            .step_by(2)
            .map(|i| FactorComponent::Edge {
                u: v[i],
                v: v[i + 1],
            })
            .collect()
    };
    if n.is_multiple_of(2) {
        return Some(edges(0..n));
    }
    let p = (0..n - 2)
        .step_by(2)
        .find(|&p| g.has_edge(v[p], v[p + 2]))?;
    let mut out = edges(0..p);
    out.push(FactorComponent::Cycle {
        vertices: vec![v[p], v[p + 1], v[p + 2]],
    });
    out.extend(edges(p + 3..n));
    Some(out)
}

/// A DP state: date index `j`, per-chain `s_i` (1-based, `n_i + 1` meaning
/// none) and `t` as an endpoint position (`1` meaning no pairs yet).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    pub date: usize,
    pub s: Vec<usize>,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpStats {
    pub n: usize,
    pub k: usize,
    /// Number of distinct profiles at each date `d_0..d_2n`.
    pub layer_counts: Vec<usize>,
}

impl DpStats {
    /// `n^(k+1)`.
    pub fn profile_bound(&self) -> u128 {
        (self.n as u128).pow(self.k as u32 + 1)
    }

    pub fn max_layer(&self) -> usize {
        self.layer_counts.iter().copied().max().unwrap_or(0)
    }

    pub fn within_bound(&self) -> bool {
        self.max_layer() as u128 <= self.profile_bound()
    }
}

#[derive(Debug, Clone)]
pub struct DpResult {
    pub pds: Option<PairingDominatingSet>,
    pub stats: DpStats,
    pub chains: ProperChainPartition,
}

struct Node {
    s: Vec<usize>,
    t: usize,
    parent: usize,
    pair: Option<(usize, usize)>,
}

/// Existence of a pairing dominating set by profile propagation; the witness
/// returned is adjacent.
pub fn pds_dp<T: Scalar>(rep: &IntervalRep<T>) -> Option<PairingDominatingSet> {
    pds_dp_with_stats(rep).pds
}

pub fn pds_dp_with_stats<T: Scalar>(rep: &IntervalRep<T>) -> DpResult {
    let norm = normalize(rep);
    let n = norm.len();
    let (k, chains) = nestedness_and_chains(&norm);
    let pos = chains.positions(n);
    let len: Vec<usize> = chains.chains.iter().map(Vec::len).collect();
    let member = |i: usize, s: usize| chains.chains[i][s - 1];

    let mut event = vec![(0usize, true); 2 * n + 1];
    for id in 0..n {
        event[norm.start(id)] = (id, true);
        event[norm.end(id)] = (id, false);
    }

    let mut layers: Vec<Vec<Node>> = Vec::with_capacity(2 * n + 1);
    layers.push(vec![Node {
        s: len.iter().map(|&l| l + 1).collect(),
        t: 1,
        parent: usize::MAX,
        pair: None,
    }]);

    for j in 0..2 * n {
        // Interval x contains d_j when start(x) <= j < end(x).
        let contains = |x: usize| norm.start(x) <= j && norm.end(x) > j;
        let (u, is_start) = event[j + 1];
        let (i0, su) = pos[u];
        let mut next: Vec<Node> = Vec::new();
        let mut index: HashMap<(Vec<usize>, usize), usize> = HashMap::new();
        let mut push = |s: Vec<usize>, t: usize, parent: usize, pair: Option<(usize, usize)>| {
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry((s.clone(), t)) {
                e.insert(next.len());
                next.push(Node { s, t, parent, pair });
            }
        };
        for (pi, node) in layers[j].iter().enumerate() {
            debug_assert!((0..k).all(|i| node.s[i] == len[i] + 1 || contains(member(i, node.s[i]))));
            if is_start {
                let free = node.s[i0] == len[i0] + 1;
                // A1: u awaits a later partner.
                let mut s1 = node.s.clone();
                if free {
                    s1[i0] = su;
                }
                push(s1, node.t, pi, None);
                // A2: u stays unpaired.
                if free {
                    push(node.s.clone(), node.t, pi, None);
                }
                // A3: pair u with the first member of X to end.
                let mut best: Option<(usize, usize)> = None;
                let mut chain_members = vec![0usize; k];
                for i in 0..k {
                    for s in node.s[i]..=len[i] {
                        let x = member(i, s);
                        if contains(x) {
                            chain_members[i] += 1;
                            if best.is_none_or(|(b, _)| norm.end(x) < norm.end(b)) {
                                best = Some((x, i));
                            }
                        }
                    }
                }
                if let Some((v, i1)) = best {
                    debug_assert_eq!(member(i1, node.s[i1]), v);
                    let t2 = node.t.max(norm.end(u).min(norm.end(v)));
                    let mut s3 = node.s.clone();
                    s3[i1] = if chain_members[i1] == 1 {
                        len[i1] + 1
                    } else {
                        node.s[i1] + 1
                    };
                    s3[i0] = len[i0] + 1;
                    push(s3, t2, pi, Some((v, u)));
                }
            } else {
                // R1: u is not awaiting a partner; R4: u is already pair-covered.
                let in_x = su >= node.s[i0];
                if !in_x && norm.start(u) < node.t {
                    push(node.s.clone(), node.t, pi, None);
                }
            }
        }
        layers.push(next);
    }

    let stats = DpStats {
        n,
        k,
        layer_counts: layers.iter().map(Vec::len).collect(),
    };
    let pds = layers[2 * n].first().map(|_| {
        let mut pairs = Vec::new();
        let mut idx = 0;
        for j in (1..=2 * n).rev() {
            let node = &layers[j][idx];
            if let Some(p) = node.pair {
                pairs.push(p);
            }
            idx = node.parent;
        }
        pairs.reverse();
        PairingDominatingSet { pairs }
    });
    if let Some(p) = &pds {
        let g = intersection_graph(&norm);
        if let Err(e) = p.validate_apds(&g) {
            panic!("profile reconstruction produced an invalid APDS: {e}");
        }
    }
    DpResult { pds, stats, chains }
}

/// Repairs a PDS into an APDS by the exchange on the earliest-ending
/// non-adjacent pair.
///
/// A redundant non-adjacent pair is replaced by an adjacent pair of unpaired
/// vertices when one exists and is dropped otherwise, so the pair count can
/// shrink only in that case.
pub fn pds_to_apds<T: Scalar>(
    rep: &IntervalRep<T>,
    pds: &PairingDominatingSet,
) -> Result<PairingDominatingSet, IntervalError> {
    let norm = normalize(rep);
    let g = intersection_graph(&norm);
    pds.validate(&g)?;
    let mut pairs = pds.pairs.clone();
    loop {
        // Orient non-adjacent pairs so the first interval ends first.
        let bad = pairs
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| !g.has_edge(a, b))
            .map(|(i, &(a, b))| {
                if norm.end(a) < norm.end(b) {
                    (i, a, b)
                } else {
                    (i, b, a)
                }
            })
            .min_by_key(|&(_, u, _)| norm.end(u));
        let Some((i, u, v)) = bad else {
            break;
        };
        let only_here: Vec<Vertex> = (0..g.n())
            .filter(|&x| {
                pairs
                    .iter()
                    .enumerate()
                    .all(|(j, &p)| (j == i) == PairingDominatingSet::pair_covers(&g, p, x))
            })
            .collect();
        let Some(&w) = only_here.first() else {
            let mut paired = vec![false; g.n()];
            for &(a, b) in &pairs {
                paired[a] = true;
                paired[b] = true;
            }
            let spare = g
                .edges()
                .into_iter()
                .find(|&(a, b)| !paired[a] && !paired[b]);
            match spare {
                Some(e) => pairs[i] = e,
                None => {
                    pairs.remove(i);
                }
            }
            continue;
        };
        debug_assert!(w != u && w != v);
        match pairs.iter().position(|&(a, b)| a == w || b == w) {
            None => pairs[i] = (u, w),
            Some(jw) => {
                let (a, b) = pairs[jw];
                let t = if a == w { b } else { a };
                pairs[i] = (u, w);
                pairs[jw] = (v, t);
            }
        }
    }
    let out = PairingDominatingSet { pairs };
    debug_assert!(out.validate_apds(&g).is_ok());
    Ok(out)
}
