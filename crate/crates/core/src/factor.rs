//! Perfect and partial [1,2]-factors through matchings of the incidence
//! bipartite graph, cut-factor search and component refactoring.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{block_decomposition, is_block_graph, Graph, Vertex};
use crate::matching::{hall_violator, hopcroft_karp, min_cost_perfect_matching};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("invalid factor: {0}")]
    Invalid(String),
    #[error("forced constraints cannot be satisfied: {0}")]
    Infeasible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// One component of a factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FactorComponent {
    Edge {
        u: Vertex,
        v: Vertex,
    },
    /// Vertices in cyclic order; consecutive vertices (and last, first) are adjacent.
    Cycle {
        vertices: Vec<Vertex>,
    },
    /// `K^+_{2,l}`: adjacent universal vertices `u`, `v` plus leaves adjacent to both.
    TwoUniversal {
        u: Vertex,
        v: Vertex,
        leaves: Vec<Vertex>,
    },
}

impl FactorComponent {
    pub fn vertices(&self) -> Vec<Vertex> {
        match self {
            FactorComponent::Edge { u, v } => vec![*u, *v],
            FactorComponent::Cycle { vertices } => vertices.clone(),
            FactorComponent::TwoUniversal { u, v, leaves } => {
                let mut out = vec![*u, *v];
                out.extend_from_slice(leaves);
                out
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FactorComponent::Edge { .. } => 2,
            FactorComponent::Cycle { vertices } => vertices.len(),
            FactorComponent::TwoUniversal { leaves, .. } => 2 + leaves.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Checks the component shape against `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), FactorError> {
        let in_range = self.vertices().iter().all(|&v| v < g.n());
        if !in_range {
            return Err(FactorError::Invalid(format!(
                "{self:?} has a vertex out of range"
            )));
        }
        match self {
            FactorComponent::Edge { u, v } => {
                if !g.has_edge(*u, *v) {
                    return Err(FactorError::Invalid(format!("edge {u}-{v} not in graph")));
                }
            }
            FactorComponent::Cycle { vertices } => {
                if vertices.len() < 3 {
                    return Err(FactorError::Invalid("cycle shorter than 3".into()));
                }
                for i in 0..vertices.len() {
                    let (a, b) = (vertices[i], vertices[(i + 1) % vertices.len()]);
                    if !g.has_edge(a, b) {
                        return Err(FactorError::Invalid(format!(
                            "cycle edge {a}-{b} not in graph"
                        )));
                    }
                }
            }
            FactorComponent::TwoUniversal { u, v, leaves } => {
                if !g.has_edge(*u, *v) {
                    return Err(FactorError::Invalid(format!(
                        "universal pair {u}-{v} not adjacent"
                    )));
                }
                for &x in leaves {
                    if !g.has_edge(*u, x) || !g.has_edge(*v, x) {
                        return Err(FactorError::Invalid(format!(
                            "leaf {x} not adjacent to both {u} and {v}"
                        )));
                    }
                }
            }
        }
        let verts = self.vertices();
        let distinct: BTreeSet<_> = verts.iter().collect();
        if distinct.len() != verts.len() {
            return Err(FactorError::Invalid(format!("{self:?} repeats a vertex")));
        }
        Ok(())
    }
}

/// A spanning factor: components partition `V(G)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCertificate {
    pub components: Vec<FactorComponent>,
}

impl FactorCertificate {
    /// Validates components and that they partition `0..g.n()`.
    pub fn validate(&self, g: &Graph) -> Result<(), FactorError> {
        let covered = validate_components(g, &self.components)?;
        if covered.len() != g.n() {
            return Err(FactorError::Invalid(format!(
                "factor covers {} of {} vertices",
                covered.len(),
                g.n()
            )));
        }
        Ok(())
    }

    /// Whether every component is an edge or a cycle.
    pub fn is_perfect_12(&self) -> bool {
        self.components
            .iter()
            .all(|c| !matches!(c, FactorComponent::TwoUniversal { .. }))
    }

    /// Component index of every vertex.
    pub fn component_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (i, c) in self.components.iter().enumerate() {
            for v in c.vertices() {
                out[v] = i;
            }
        }
        out
    }
}

/// A {K_2, cycle} packing covering `covered`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFactorCertificate {
    pub covered: Vec<Vertex>,
    pub components: Vec<FactorComponent>,
}

impl PartialFactorCertificate {
    pub fn coverage(&self) -> usize {
        self.covered.len()
    }

    pub fn covers(&self, v: Vertex) -> bool {
        self.covered.binary_search(&v).is_ok()
    }

    /// Neighbors of `v` inside its factor component.
    pub fn factor_neighbors(&self, v: Vertex) -> Vec<Vertex> {
        for c in &self.components {
            match c {
                FactorComponent::Edge { u, v: w } => {
                    if *u == v {
                        return vec![*w];
                    }
                    if *w == v {
                        return vec![*u];
                    }
                }
                FactorComponent::Cycle { vertices } => {
                    if let Some(i) = vertices.iter().position(|&x| x == v) {
                        let k = vertices.len();
                        return vec![vertices[(i + k - 1) % k], vertices[(i + 1) % k]];
                    }
                }
                FactorComponent::TwoUniversal { .. } => {}
            }
        }
        Vec::new()
    }

    pub fn validate(&self, g: &Graph) -> Result<(), FactorError> {
        if self
            .components
            .iter()
            .any(|c| matches!(c, FactorComponent::TwoUniversal { .. }))
        {
            return Err(FactorError::Invalid(
                "partial factors hold only edges and cycles".into(),
            ));
        }
        let covered = validate_components(g, &self.components)?;
        let listed: BTreeSet<Vertex> = self.covered.iter().copied().collect();
        if covered != listed || listed.len() != self.covered.len() {
            return Err(FactorError::Invalid(
                "covered set disagrees with components".into(),
            ));
        }
        Ok(())
    }
}

fn validate_components(
    g: &Graph,
    comps: &[FactorComponent],
) -> Result<BTreeSet<Vertex>, FactorError> {
    let mut seen = BTreeSet::new();
    for c in comps {
        c.validate(g)?;
        for v in c.vertices() {
            if !seen.insert(v) {
                return Err(FactorError::Invalid(format!(
                    "vertex {v} in two components"
                )));
            }
        }
    }
    Ok(seen)
}

/// The incidence bipartite graph `B(G)` (and `B+(G)` with auxiliary edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceBipartite {
    pub n: usize,
    /// `real[u]` lists `v` such that `u_1 v_2` is an edge, i.e. `uv` in `E(G)`.
    pub real: Vec<Vec<Vertex>>,
    /// Whether each `u_1 u_2` auxiliary edge is present.
    pub with_aux: bool,
}

impl IncidenceBipartite {
    pub fn real_edge_count(&self) -> usize {
        self.real.iter().map(Vec::len).sum()
    }
}

pub fn incidence_bipartite(g: &Graph, with_aux: bool) -> IncidenceBipartite {
    IncidenceBipartite {
        n: g.n(),
        real: (0..g.n()).map(|u| g.neighbors(u).to_vec()).collect(),
        with_aux,
    }
}

/// Outcome of the perfect [1,2]-factor test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum FactorResult {
    Factor(FactorCertificate),
    /// `X` with `|N(X)| < |X|`.
    NoFactor {
        hall_violator: Vec<Vertex>,
    },
}

impl FactorResult {
    pub fn factor(&self) -> Option<&FactorCertificate> {
        match self {
            FactorResult::Factor(f) => Some(f),
            FactorResult::NoFactor { .. } => None,
        }
    }
}

/// Decomposes a fixed-point-free permutation into components: 2-cycles become
/// edges, longer cycles become graph cycles.
fn components_from_successor(succ: &[Option<Vertex>]) -> Vec<FactorComponent> {
    let n = succ.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] || succ[start].is_none() {
            continue;
        }
        let mut cyc = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cyc.push(v);
            v = succ[v].expect("successor map is a permutation on covered vertices");
        }
        debug_assert_eq!(v, start);
        if cyc.len() == 2 {
            out.push(FactorComponent::Edge {
                u: cyc[0],
                v: cyc[1],
            });
        } else {
            out.push(FactorComponent::Cycle { vertices: cyc });
        }
    }
    out
}

/// Perfect [1,2]-factor via a perfect matching of `B(G)`, or a Hall violator.
pub fn perfect_12_factor(g: &Graph) -> FactorResult {
    let b = incidence_bipartite(g, false);
    let m = hopcroft_karp(&b.real, g.n());
    if m.is_perfect() {
        let comps = components_from_successor(&m.left_to_right);
        FactorResult::Factor(FactorCertificate { components: comps })
    } else {
        FactorResult::NoFactor {
            hall_violator: hall_violator(&b.real, &m),
        }
    }
}

/// Constraints for [`max_partial_12_factor_with`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactorConstraints {
    /// Vertices that must stay outside the factor.
    pub forced_uncovered: Vec<Vertex>,
    /// Vertices that must be covered.
    pub forced_covered: Vec<Vertex>,
    /// Arcs `(u, w)` that must appear in the factor's successor map; each
    /// places `w` among the factor neighbors of `u`.
    pub forced_arcs: Vec<(Vertex, Vertex)>,
}

/// Maximum-coverage partial perfect [1,2]-factor without constraints.
pub fn max_partial_12_factor(g: &Graph) -> PartialFactorCertificate {
    max_partial_12_factor_with(g, &FactorConstraints::default())
        .expect("unconstrained problem is always feasible")
}

/// Maximum-coverage partial perfect [1,2]-factor under constraints.
///
/// Perfect matchings of `B+(G)` that use `k` auxiliary edges `u_1 u_2` are
/// exactly the partial factors leaving `k` vertices uncovered, so a
/// minimum-cost perfect matching with cost 1 on auxiliary edges maximizes
/// coverage.
pub fn max_partial_12_factor_with(
    g: &Graph,
    constraints: &FactorConstraints,
) -> Result<PartialFactorCertificate, FactorError> {
    let n = g.n();
    let mut uncovered = vec![false; n];
    let mut must_cover = vec![false; n];
    let mut arc_from = vec![None; n];
    let mut arc_into = vec![None; n];
    for &v in &constraints.forced_uncovered {
        if v >= n {
            return Err(FactorError::Infeasible(format!("vertex {v} out of range")));
        }
        uncovered[v] = true;
    }
    for &v in &constraints.forced_covered {
        if v >= n {
            return Err(FactorError::Infeasible(format!("vertex {v} out of range")));
        }
        if uncovered[v] {
            return Err(FactorError::Infeasible(format!(
                "vertex {v} forced both ways"
            )));
        }
        must_cover[v] = true;
    }
    for &(u, w) in &constraints.forced_arcs {
        if !g.has_edge(u, w) {
            return Err(FactorError::Infeasible(format!(
                "forced arc {u}->{w} is not an edge"
            )));
        }
        if uncovered[u] || uncovered[w] {
            return Err(FactorError::Infeasible(format!(
                "forced arc {u}->{w} touches a forced-uncovered vertex"
            )));
        }
        if arc_from[u].is_some_and(|x| x != w) || arc_into[w].is_some_and(|x| x != u) {
            return Err(FactorError::Infeasible(format!(
                "forced arc {u}->{w} conflicts"
            )));
        }
        arc_from[u] = Some(w);
        arc_into[w] = Some(u);
    }

    let aux_cost = 1;
    let adj: Vec<Vec<(usize, i64)>> = (0..n)
        .map(|u| {
            if let Some(w) = arc_from[u] {
                return vec![(w, 0)];
            }
            let mut row = Vec::new();
            if !uncovered[u] {
                for &v in g.neighbors(u) {
                    if !uncovered[v] && arc_into[v].is_none() {
                        row.push((v, 0));
                    }
                }
            }
            if !must_cover[u] && arc_into[u].is_none() {
                row.push((u, aux_cost));
            }
            row
        })
        .collect();

    let (_, mate) = min_cost_perfect_matching(&adj)
        .ok_or_else(|| FactorError::Infeasible("no completion satisfies the constraints".into()))?;
    let succ: Vec<Option<Vertex>> = mate
        .iter()
        .enumerate()
        .map(|(u, &v)| (u != v).then_some(v))
        .collect();
    let covered: Vec<Vertex> = (0..n).filter(|&u| succ[u].is_some()).collect();
    Ok(PartialFactorCertificate {
        covered,
        components: components_from_successor(&succ),
    })
}

/// A cut-factor together with its cut-factor vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutFactorWitness {
    pub factor: PartialFactorCertificate,
    /// The cut-factor vertex.
    pub u: Vertex,
    /// A factor neighbor of `u`.
    pub w: Vertex,
    /// A neighbor of `u` outside the factor.
    pub v: Vertex,
    /// Component labels of `v` and `w` in `G - u`.
    pub component_v: usize,
    pub component_w: usize,
}

impl CutFactorWitness {
    /// Checks the witness against `g`, including maximality of the factor.
    pub fn validate(&self, g: &Graph) -> Result<(), FactorError> {
        self.factor.validate(g)?;
        let best = max_partial_12_factor(g).coverage();
        if self.factor.coverage() != best {
            return Err(FactorError::Invalid(format!(
                "factor covers {} but the maximum is {best}",
                self.factor.coverage()
            )));
        }
        if best == g.n() {
            return Err(FactorError::Invalid("factor is perfect".into()));
        }
        if !self.factor.covers(self.u) || self.factor.covers(self.v) {
            return Err(FactorError::Invalid(
                "u must be covered and v uncovered".into(),
            ));
        }
        if !g.has_edge(self.u, self.v) || !self.factor.factor_neighbors(self.u).contains(&self.w) {
            return Err(FactorError::Invalid(
                "v must neighbor u and w be a factor neighbor".into(),
            ));
        }
        let (labels, _) = g.component_labels_avoiding(Some(self.u));
        if labels[self.v] == labels[self.w] {
            return Err(FactorError::Invalid(
                "v and w share a component of G-u".into(),
            ));
        }
        Ok(())
    }
}

/// Searches for a cut-factor by probing cut vertices `u` with neighbor pairs
/// `v`, `w` separated by `u`: `v` forced uncovered, `w` forced onto `u`.
pub fn find_cut_factor(g: &Graph) -> Result<Option<CutFactorWitness>, FactorError> {
    if !g.isolated_vertices().is_empty() {
        return Err(FactorError::Precondition(
            "graph has an isolated vertex".into(),
        ));
    }
    if !g.is_connected() {
        return Err(FactorError::Precondition("graph is not connected".into()));
    }
    if perfect_12_factor(g).factor().is_some() {
        return Err(FactorError::Precondition(
            "graph has a perfect [1,2]-factor".into(),
        ));
    }
    let best = max_partial_12_factor(g).coverage();
    let blocks = block_decomposition(g);
    for &u in &blocks.cut_vertices {
        let (labels, _) = g.component_labels_avoiding(Some(u));
        for &v in g.neighbors(u) {
            for &w in g.neighbors(u) {
                if labels[v] == labels[w] {
                    continue;
                }
                for arc in [(u, w), (w, u)] {
                    let constraints = FactorConstraints {
                        forced_uncovered: vec![v],
                        forced_arcs: vec![arc],
                        ..Default::default()
                    };
                    let Ok(factor) = max_partial_12_factor_with(g, &constraints) else {
                        continue;
                    };
                    if factor.coverage() == best {
                        return Ok(Some(CutFactorWitness {
                            factor,
                            u,
                            w,
                            v,
                            component_v: labels[v],
                            component_w: labels[w],
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefactorMode {
    /// Replace every even cycle by alternating edges.
    EvenSplit,
    /// Block graphs: leave only `K_2` and `K_3` components.
    BlockK2K3,
}

pub fn refactor_components(
    g: &Graph,
    factor: &FactorCertificate,
    mode: RefactorMode,
) -> Result<FactorCertificate, FactorError> {
    factor.validate(g)?;
    if mode == RefactorMode::BlockK2K3 && !is_block_graph(g) {
        return Err(FactorError::Precondition(
            "K2/K3 refactoring needs a block graph".into(),
        ));
    }
    let mut out = Vec::with_capacity(factor.components.len());
    for c in &factor.components {
        match c {
            FactorComponent::Cycle { vertices } if vertices.len() % 2 == 0 => {
                out.extend(
                    vertices
                        .chunks(2)
                        .map(|p| FactorComponent::Edge { u: p[0], v: p[1] }),
                );
            }
            FactorComponent::Cycle { vertices }
                if mode == RefactorMode::BlockK2K3 && vertices.len() > 3 =>
            {
                // The cycle lies in one clique block, so the chord v0-v2 exists.
                out.push(FactorComponent::Cycle {
                    vertices: vertices[..3].to_vec(),
                });
                out.extend(
                    vertices[3..]
                        .chunks(2)
                        .map(|p| FactorComponent::Edge { u: p[0], v: p[1] }),
                );
            }
            other => out.push(other.clone()),
        }
    }
    let refactored = FactorCertificate { components: out };
    refactored.validate(g)?;
    Ok(refactored)
}
