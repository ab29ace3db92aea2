//! Exact small-instance ground truth: memoized minimax for the game and
//! exhaustive searches for pairing dominating sets and factors.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factor::{FactorCertificate, FactorComponent, PartialFactorCertificate};
use crate::graph::{Graph, Vertex};
use crate::interval::PairingDominatingSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    Dominator,
    Staller,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Dominator => Player::Staller,
            Player::Staller => Player::Dominator,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Dominator => "Dominator",
            Player::Staller => "Staller",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    /// Dominator wins whoever starts.
    D,
    /// Staller wins whoever starts.
    S,
    /// The first player wins.
    N,
    /// Proven not `D`, with `S` versus `N` left open.
    #[serde(rename = "NotD_unresolved")]
    NotDUnresolved,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::D => "D",
            Outcome::S => "S",
            Outcome::N => "N",
            Outcome::NotDUnresolved => "NotD_unresolved",
            Outcome::Unknown => "Unknown",
        })
    }
}

impl Outcome {
    pub fn is_d(self) -> bool {
        self == Outcome::D
    }

    /// Whether the outcome is known to differ from `D`.
    pub fn is_not_d(self) -> bool {
        matches!(self, Outcome::S | Outcome::N | Outcome::NotDUnresolved)
    }
}

/// Outcome of a disjoint union from the outcomes of its parts.
///
/// All `D` gives `D`; a single non-`D` part that is `N` gives `N`; an `S`
/// part or two non-`D` parts give `S`.
pub fn combine_outcomes(parts: impl IntoIterator<Item = Outcome>) -> Outcome {
    let mut non_d = Vec::new();
    for o in parts {
        match o {
            Outcome::D => {}
            Outcome::S => return Outcome::S,
            other => non_d.push(other),
        }
    }
    match non_d.len() {
        0 => Outcome::D,
        1 => non_d[0],
        _ if non_d.iter().all(|o| o.is_not_d()) => Outcome::S,
        _ => Outcome::Unknown,
    }
}

/// A game position `(G, D, S)` with the player to move; sets are bitmasks.
#[derive(Debug, Clone, Copy)]
pub struct GamePosition<'a> {
    pub graph: &'a Graph,
    pub dominator: u64,
    pub staller: u64,
    pub to_move: Player,
}

impl<'a> GamePosition<'a> {
    pub fn start(graph: &'a Graph, first: Player) -> Self {
        GamePosition {
            graph,
            dominator: 0,
            staller: 0,
            to_move: first,
        }
    }

    pub fn with_sets(
        graph: &'a Graph,
        dominator: &[Vertex],
        staller: &[Vertex],
        to_move: Player,
    ) -> Self {
        let mask = |s: &[Vertex]| s.iter().fold(0u64, |m, &v| m | 1 << v);
        GamePosition {
            graph,
            dominator: mask(dominator),
            staller: mask(staller),
            to_move,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {n} vertices, above the oracle bound {bound}")]
    TooLarge { n: usize, bound: usize },
    #[error("memo table exceeded its cap of {cap} entries")]
    MemoCap { cap: usize },
    #[error("invalid position: {0}")]
    InvalidPosition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_game_n: usize,
    pub max_pds_n: usize,
    pub max_factor_n: usize,
    pub memo_cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_game_n: 13,
            max_pds_n: 12,
            max_factor_n: 10,
            memo_cap: 40_000_000,
        }
    }
}

impl OracleConfig {
    pub fn with_max_game_n(mut self, n: usize) -> Self {
        self.max_game_n = n.min(63);
        self
    }
}

struct Solver<'a> {
    closed: Vec<u64>,
    full: u64,
    memo: HashMap<u128, bool>,
    cap: usize,
    _graph: &'a Graph,
}

impl Solver<'_> {
    fn staller_won(&self, s: u64) -> bool {
        self.closed.iter().any(|&c| c & !s == 0)
    }

    fn dominator_won(&self, d: u64) -> bool {
        self.closed.iter().all(|&c| c & d != 0)
    }

    /// Whether Dominator wins from `(d, s)` with `mover` to play.
    fn solve(&mut self, d: u64, s: u64, mover: Player) -> Result<bool, OracleError> {
        if self.staller_won(s) {
            return Ok(false);
        }
        if self.dominator_won(d) {
            return Ok(true);
        }
        let free = self.full & !(d | s);
        if free == 0 {
            return Ok(self.dominator_won(d));
        }
        let key = d as u128 | (s as u128) << 64 | ((mover == Player::Staller) as u128) << 63;
        if let Some(&w) = self.memo.get(&key) {
            return Ok(w);
        }
        let mut bits = free;
        let result = match mover {
            Player::Dominator => {
                let mut win = false;
                while bits != 0 {
                    let b = bits & bits.wrapping_neg();
                    bits ^= b;
                    if self.solve(d | b, s, Player::Staller)? {
                        win = true;
                        break;
                    }
                }
                win
            }
            Player::Staller => {
                let mut win = true;
                while bits != 0 {
                    let b = bits & bits.wrapping_neg();
                    bits ^= b;
                    if !self.solve(d, s | b, Player::Dominator)? {
                        win = false;
                        break;
                    }
                }
                win
            }
        };
        if self.memo.len() >= self.cap {
            return Err(OracleError::MemoCap { cap: self.cap });
        }
        self.memo.insert(key, result);
        Ok(result)
    }
}

/// Exact game solver with configurable size bounds.
#[derive(Debug, Clone, Copy, Default)]
pub struct Oracle {
    pub config: OracleConfig,
}

impl Oracle {
    pub fn new(config: OracleConfig) -> Self {
        Oracle { config }
    }

    fn check(&self, n: usize, bound: usize) -> Result<(), OracleError> {
        if n > bound || n > 63 {
            return Err(OracleError::TooLarge { n, bound });
        }
        Ok(())
    }

    fn solver<'a>(&self, g: &'a Graph) -> Solver<'a> {
        Solver {
            closed: g.closed_masks(),
            full: if g.n() == 64 {
                u64::MAX
            } else {
                (1u64 << g.n()) - 1
            },
            memo: HashMap::new(),
            cap: self.config.memo_cap,
            _graph: g,
        }
    }

    /// Winner of `pos` under optimal play.
    pub fn solve_position(&self, pos: &GamePosition<'_>) -> Result<Player, OracleError> {
        let g = pos.graph;
        self.check(g.n(), self.config.max_game_n)?;
        if pos.dominator & pos.staller != 0 {
            return Err(OracleError::InvalidPosition("claimed sets overlap".into()));
        }
        let mut solver = self.solver(g);
        if (pos.dominator | pos.staller) & !solver.full != 0 {
            return Err(OracleError::InvalidPosition(
                "claimed vertex out of range".into(),
            ));
        }
        let dom = solver.solve(pos.dominator, pos.staller, pos.to_move)?;
        Ok(if dom {
            Player::Dominator
        } else {
            Player::Staller
        })
    }

    /// Outcome class from both starting players; `Unknown` above the bound.
    pub fn outcome(&self, g: &Graph) -> Outcome {
        self.try_outcome(g).unwrap_or(Outcome::Unknown)
    }

    pub fn try_outcome(&self, g: &Graph) -> Result<Outcome, OracleError> {
        self.check(g.n(), self.config.max_game_n)?;
        let mut solver = self.solver(g);
        let dom_first = solver.solve(0, 0, Player::Dominator)?;
        let stall_first = solver.solve(0, 0, Player::Staller)?;
        Ok(match (dom_first, stall_first) {
            (true, true) => Outcome::D,
            (false, false) => Outcome::S,
            (true, false) => Outcome::N,
            (false, true) => panic!("second player wins both ways on a {}-vertex graph", g.n()),
        })
    }

    /// A pairing dominating set (adjacent pairs only when asked) with no
    /// redundant pair, or `None`.
    pub fn brute_force_pds(
        &self,
        g: &Graph,
        adjacent_only: bool,
    ) -> Result<Option<PairingDominatingSet>, OracleError> {
        Ok(self.enumerate_pds(g, adjacent_only, 1)?.into_iter().next())
    }

    /// Up to `limit` distinct irredundant pairing dominating sets.
    pub fn enumerate_pds(
        &self,
        g: &Graph,
        adjacent_only: bool,
        limit: usize,
    ) -> Result<Vec<PairingDominatingSet>, OracleError> {
        self.check(g.n(), self.config.max_pds_n)?;
        let closed = g.closed_masks();
        let full = (1u64 << g.n()) - 1;
        let mut search = PdsSearch {
            g,
            closed: &closed,
            full,
            adjacent_only,
            failed: HashSet::new(),
            found: Vec::new(),
            seen: HashSet::new(),
            limit,
        };
        let mut pairs = Vec::new();
        search.go(0, 0, &mut pairs);
        Ok(search.found)
    }

    /// A perfect `{K_2, cycle}` packing by exhaustive search.
    pub fn brute_force_perfect_factor(
        &self,
        g: &Graph,
    ) -> Result<Option<FactorCertificate>, OracleError> {
        self.check(g.n(), self.config.max_factor_n)?;
        let mut search = FactorSearch::new(g, false);
        let full = (1u64 << g.n()) - 1;
        let cover = search.best(0);
        Ok((cover == g.n()).then(|| FactorCertificate {
            components: search.rebuild(0, full),
        }))
    }

    /// A maximum-coverage `{K_2, cycle}` packing by exhaustive search.
    pub fn brute_force_max_partial_factor(
        &self,
        g: &Graph,
    ) -> Result<PartialFactorCertificate, OracleError> {
        self.check(g.n(), self.config.max_factor_n)?;
        let mut search = FactorSearch::new(g, true);
        let full = (1u64 << g.n()) - 1;
        search.best(0);
        let components = search.rebuild(0, full);
        let mut covered: Vec<Vertex> = components
            .iter()
            .flat_map(FactorComponent::vertices)
            .collect();
        covered.sort_unstable();
        Ok(PartialFactorCertificate {
            covered,
            components,
        })
    }
}

struct PdsSearch<'a> {
    g: &'a Graph,
    closed: &'a [u64],
    full: u64,
    adjacent_only: bool,
    failed: HashSet<(u64, u64)>,
    found: Vec<PairingDominatingSet>,
    seen: HashSet<Vec<(Vertex, Vertex)>>,
    limit: usize,
}

impl PdsSearch<'_> {
    fn go(&mut self, covered: u64, used: u64, pairs: &mut Vec<(Vertex, Vertex)>) {
        if self.found.len() >= self.limit {
            return;
        }
        if covered == self.full {
            let pds = prune_redundant(self.g, pairs);
            let mut key = pds.pairs.clone();
            key.sort_unstable();
            if self.seen.insert(key) {
                self.found.push(pds);
            }
            return;
        }
        if self.failed.contains(&(covered, used)) {
            return;
        }
        let before = self.found.len();
        let x = (!covered & self.full).trailing_zeros() as usize;
        let cand: Vec<Vertex> = (0..self.g.n())
            .filter(|&u| self.closed[x] >> u & 1 == 1 && used >> u & 1 == 0)
            .collect();
        for (i, &u) in cand.iter().enumerate() {
            for &v in &cand[i + 1..] {
                if self.adjacent_only && !self.g.has_edge(u, v) {
                    continue;
                }
                pairs.push((u, v));
                self.go(
                    covered | (self.closed[u] & self.closed[v]),
                    used | 1 << u | 1 << v,
                    pairs,
                );
                pairs.pop();
                if self.found.len() >= self.limit {
                    return;
                }
            }
        }
        if self.found.len() == before {
            self.failed.insert((covered, used));
        }
    }
}

fn prune_redundant(g: &Graph, pairs: &[(Vertex, Vertex)]) -> PairingDominatingSet {
    let mut pds = PairingDominatingSet::new(pairs.to_vec());
    while let Some(&i) = pds.redundant_pairs(g).first() {
        pds.pairs.remove(i);
    }
    pds
}

struct FactorSearch<'a> {
    g: &'a Graph,
    allow_skip: bool,
    memo: HashMap<u64, (usize, Vec<Vertex>)>,
}

impl<'a> FactorSearch<'a> {
    fn new(g: &'a Graph, allow_skip: bool) -> Self {
        FactorSearch {
            g,
            allow_skip,
            memo: HashMap::new(),
        }
    }

    /// Best coverage of the undecided vertices; the chosen component through
    /// the least undecided vertex is memoized (empty means skipped).
    fn best(&mut self, decided: u64) -> usize {
        let n = self.g.n();
        let full = (1u64 << n) - 1;
        if decided == full {
            return 0;
        }
        if let Some(&(c, _)) = self.memo.get(&decided) {
            return c;
        }
        let x = (!decided & full).trailing_zeros() as usize;
        let mut best: Option<(usize, Vec<Vertex>)> = None;
        if self.allow_skip {
            let c = self.best(decided | 1 << x);
            best = Some((c, Vec::new()));
        }
        for comp in self.components_through(x, decided) {
            let mask = comp.iter().fold(0u64, |m, &v| m | 1 << v);
            let rest = self.best(decided | mask);
            // Without skipping, an infeasible remainder is marked by usize::MAX.
            if rest == usize::MAX {
                continue;
            }
            let c = rest + comp.len();
            if best.as_ref().is_none_or(|b| b.0 == usize::MAX || c > b.0) {
                best = Some((c, comp));
            }
        }
        let entry = best.unwrap_or((usize::MAX, Vec::new()));
        let c = entry.0;
        self.memo.insert(decided, entry);
        c
    }

    /// Edges `xy` and cycles with `x` as their minimum over undecided vertices.
    fn components_through(&self, x: Vertex, decided: u64) -> Vec<Vec<Vertex>> {
        let g = self.g;
        let mut out = Vec::new();
        for &y in g.neighbors(x) {
            if decided >> y & 1 == 0 {
                out.push(vec![x, y]);
            }
        }
        let mut path = vec![x];
        let mut on_path = decided | 1 << x;
        fn extend(
            g: &Graph,
            x: Vertex,
            path: &mut Vec<Vertex>,
            on_path: &mut u64,
            out: &mut Vec<Vec<Vertex>>,
        ) {
            let last = *path.last().expect("path starts at x");
            for &y in g.neighbors(last) {
                if y < x || *on_path >> y & 1 == 1 {
                    continue;
                }
                path.push(y);
                *on_path |= 1 << y;
                if path.len() >= 3 && g.has_edge(y, x) && path[1] < y {
                    out.push(path.clone());
                }
                extend(g, x, path, on_path, out);
                path.pop();
                *on_path &= !(1 << y);
            }
        }
        extend(g, x, &mut path, &mut on_path, &mut out);
        out
    }

    fn rebuild(&mut self, mut decided: u64, full: u64) -> Vec<FactorComponent> {
        let mut out = Vec::new();
        while decided != full {
            let x = (!decided & full).trailing_zeros() as usize;
            let comp = self.memo.get(&decided).expect("state was solved").1.clone();
            if comp.is_empty() {
                decided |= 1 << x;
                continue;
            }
            decided |= comp.iter().fold(0u64, |m, &v| m | 1 << v);
            out.push(if comp.len() == 2 {
                FactorComponent::Edge {
                    u: comp[0],
                    v: comp[1],
                }
            } else {
                FactorComponent::Cycle { vertices: comp }
            });
        }
        out
    }
}
