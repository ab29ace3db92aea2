//! Executable strategies and the match harness.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factor::{
    find_cut_factor, perfect_12_factor, refactor_components, FactorCertificate, FactorComponent,
    FactorError, RefactorMode,
};
use crate::graph::{Graph, Vertex};
use crate::interval::{apds_to_factor, PairingDominatingSet};
use crate::oracle::{GamePosition, Oracle, OracleError, Player};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{player} made an illegal move {vertex}")]
    IllegalMove {
        player: Player,
        vertex: Vertex,
        transcript: PlayTranscript,
    },
    #[error("{0} has no move")]
    NoMove(Player),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl From<FactorError> for StrategyError {
    fn from(e: FactorError) -> Self {
        StrategyError::InvalidCertificate(e.to_string())
    }
}

/// Claim state of every vertex.
pub type Board = [Option<Player>];

fn is_free(board: &Board, v: Vertex) -> bool {
    board[v].is_none()
}

fn owned_by_dominator(board: &Board, v: Vertex) -> bool {
    board[v] == Some(Player::Dominator)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
enum Responder {
    /// Owning any one listed vertex settles the component.
    AnyOf(Vec<Vertex>),
    /// Odd cycle of length at least five, before Staller's first move in it.
    OddCycle(Vec<Vertex>),
    /// Odd cycle after the opening reply: pairs still to hold.
    Pairs(Vec<(Vertex, Vertex)>),
    /// A `K^+_{2,l}`; the universal vertices are tracked for free moves.
    Universal { u: Vertex, v: Vertex },
}

/// Dominator's second-player strategy composed from a factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominatorStrategy {
    comp_of: Vec<Option<usize>>,
    comps: Vec<Responder>,
}

impl DominatorStrategy {
    /// Composes per-component responders; even cycles are split first.
    pub fn from_factor(g: &Graph, cert: &FactorCertificate) -> Result<Self, StrategyError> {
        let split = refactor_components(g, cert, RefactorMode::EvenSplit)?;
        Ok(Self::from_components(g.n(), &split.components))
    }

    pub fn from_apds(g: &Graph, apds: &PairingDominatingSet) -> Result<Self, StrategyError> {
        let factor = apds_to_factor(g, apds)
            .map_err(|e| StrategyError::InvalidCertificate(e.to_string()))?;
        Self::from_factor(g, &factor)
    }

    /// Responders for components that need not cover every vertex; vertices
    /// outside all components are assumed dominated already.
    pub fn from_components(n: usize, components: &[FactorComponent]) -> Self {
        let mut comp_of = vec![None; n];
        let mut comps = Vec::with_capacity(components.len());
        for c in components {
            let id = comps.len();
            for v in c.vertices() {
                comp_of[v] = Some(id);
            }
            comps.push(match c {
                FactorComponent::Edge { u, v } => Responder::AnyOf(vec![*u, *v]),
                FactorComponent::TwoUniversal { u, v, .. } => Responder::Universal { u: *u, v: *v },
                FactorComponent::Cycle { vertices } if vertices.len() == 3 => {
                    Responder::AnyOf(vertices.clone())
                }
                FactorComponent::Cycle { vertices } if vertices.len() % 2 == 0 => {
                    Responder::Pairs(vertices.chunks(2).map(|p| (p[0], p[1])).collect())
                }
                FactorComponent::Cycle { vertices } => Responder::OddCycle(vertices.clone()),
            });
        }
        DominatorStrategy { comp_of, comps }
    }

    fn unsettled(&self, board: &Board) -> Option<Vertex> {
        for r in &self.comps {
            let groups: Vec<Vec<Vertex>> = match r {
                Responder::AnyOf(vs) => vec![vs.clone()],
                Responder::Universal { u, v } => vec![vec![*u, *v]],
                Responder::Pairs(ps) => ps.iter().map(|&(a, b)| vec![a, b]).collect(),
                Responder::OddCycle(_) => Vec::new(),
            };
            for grp in groups {
                if !grp.iter().any(|&x| owned_by_dominator(board, x)) {
                    if let Some(&x) = grp.iter().find(|&&x| is_free(board, x)) {
                        return Some(x);
                    }
                }
            }
        }
        None
    }

    /// A move that never hurts: an unsettled obligation, then an untouched
    /// universal vertex, then any free vertex.
    pub fn free_move(&self, board: &Board) -> Option<Vertex> {
        if let Some(x) = self.unsettled(board) {
            return Some(x);
        }
        for r in &self.comps {
            if let Responder::Universal { u, v } = r {
                if !owned_by_dominator(board, *u) && !owned_by_dominator(board, *v) {
                    if let Some(&x) = [*u, *v].iter().find(|&&x| is_free(board, x)) {
                        return Some(x);
                    }
                }
            }
        }
        (0..board.len()).find(|&v| is_free(board, v))
    }

    /// Dominator's reply to Staller claiming `s`; `board` already includes `s`.
    pub fn respond(&mut self, s: Vertex, board: &Board) -> Option<Vertex> {
        let Some(c) = self.comp_of.get(s).copied().flatten() else {
            return self.free_move(board);
        };
        match &self.comps[c] {
            Responder::OddCycle(cyc) => {
                let cyc = cyc.clone();
                let k = cyc.len();
                let a = cyc
                    .iter()
                    .position(|&x| x == s)
                    .expect("vertex on its cycle");
                let at = |i: usize| cyc[(a + i) % k];
                let back = |i: usize| cyc[(a + k - i) % k];
                // Reply with a neighbor of a; the rest is covered by consecutive pairs.
                let forward = !matches!(board[at(1)], Some(Player::Staller));
                let pick = |i: usize| if forward { at(i) } else { back(i) };
                let pairs: Vec<(Vertex, Vertex)> = (0..(k - 3) / 2)
                    .map(|p| (pick(3 + 2 * p), pick(4 + 2 * p)))
                    .collect();
                self.comps[c] = Responder::Pairs(pairs);
                let target = pick(1);
                if is_free(board, target) {
                    Some(target)
                } else {
                    self.free_move(board)
                }
            }
            Responder::AnyOf(vs) => {
                if vs.iter().any(|&x| owned_by_dominator(board, x)) {
                    return self.free_move(board);
                }
                vs.iter()
                    .copied()
                    .find(|&x| is_free(board, x))
                    .or_else(|| self.free_move(board))
            }
            Responder::Universal { u, v } => {
                if owned_by_dominator(board, *u) || owned_by_dominator(board, *v) {
                    return self.free_move(board);
                }
                [*u, *v]
                    .into_iter()
                    .find(|&x| is_free(board, x))
                    .or_else(|| self.free_move(board))
            }
            Responder::Pairs(ps) => {
                let hit = ps.iter().find(|&&(a, b)| a == s || b == s).copied();
                match hit {
                    Some((a, b))
                        if !owned_by_dominator(board, a) && !owned_by_dominator(board, b) =>
                    {
                        let other = if a == s { b } else { a };
                        if is_free(board, other) {
                            Some(other)
                        } else {
                            self.free_move(board)
                        }
                    }
                    _ => self.free_move(board),
                }
            }
        }
    }
}

/// Compose Dominator's strategy from a factor certificate.
pub fn compose_dominator_strategy(
    g: &Graph,
    cert: &FactorCertificate,
) -> Result<DominatorStrategy, StrategyError> {
    DominatorStrategy::from_factor(g, cert)
}

/// Description of Staller's opening, usable as a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StallerPlan {
    /// Vertices of the attacked component.
    pub component: Vec<Vertex>,
    /// First vertex Staller claims.
    pub first_move: Vertex,
    /// `(u, v, w)` of the cut-factor when the opening is not an isolated vertex.
    pub cut_factor: Option<(Vertex, Vertex, Vertex)>,
}

/// Staller's first-player strategy driven by cut-factors.
#[derive(Debug, Clone)]
pub struct StallerStrategy {
    g: Graph,
    /// Active vertex set, in original ids, for the next Staller move.
    active: Option<Vec<Vertex>>,
    /// Components `G_v`, `G_w` awaiting Dominator's reply.
    pending: Option<(Vec<Vertex>, Vec<Vertex>)>,
    won: bool,
    plan: StallerPlan,
}

impl StallerStrategy {
    pub fn new(g: &Graph) -> Result<Self, StrategyError> {
        let flags = crate::graph::classify_graph(g);
        if perfect_12_factor(g).factor().is_some() {
            return Err(StrategyError::Precondition(
                "graph has a perfect [1,2]-factor".into(),
            ));
        }
        let comps = g.components();
        let target = comps
            .iter()
            .find(|c| c.len() == 1)
            .or_else(|| {
                comps.iter().find(|c| {
                    let (h, _) = g.induced_subgraph(c);
                    perfect_12_factor(&h).factor().is_none()
                })
            })
            .expect("a graph without a perfect factor has a factorless component")
            .clone();
        if target.len() > 1 && !(flags.is_block_graph || flags.is_outerplanar) {
            return Err(StrategyError::Precondition(
                "cut-factor strategy needs a block or outerplanar graph".into(),
            ));
        }
        let mut s = StallerStrategy {
            g: g.clone(),
            active: Some(target.clone()),
            pending: None,
            won: false,
            plan: StallerPlan {
                component: target,
                first_move: 0,
                cut_factor: None,
            },
        };
        // Dry run of the opening to fill in the plan.
        let mut probe = s.clone();
        let board = vec![None; g.n()];
        let first = probe.next_move(None, &board)?;
        s.plan.first_move = first;
        s.plan.cut_factor = probe.plan.cut_factor;
        Ok(s)
    }

    pub fn plan(&self) -> &StallerPlan {
        &self.plan
    }

    /// Staller's next move given Dominator's last move (if any).
    pub fn next_move(
        &mut self,
        dominator_move: Option<Vertex>,
        board: &Board,
    ) -> Result<Vertex, StrategyError> {
        if let Some((gv, gw)) = self.pending.take() {
            let reply_in_v = dominator_move.is_some_and(|d| gv.contains(&d));
            self.active = Some(if reply_in_v { gw } else { gv });
        }
        let any_free = || {
            (0..board.len())
                .find(|&v| is_free(board, v))
                .ok_or(StrategyError::NoMove(Player::Staller))
        };
        if self.won {
            return any_free();
        }
        let Some(active) = self.active.take() else {
            // Dominator moved outside the active line; keep attacking it.
            return any_free();
        };
        let (h, map) = self.g.induced_subgraph(&active);
        if let Some(&y) = h.isolated_vertices().first() {
            self.won = true;
            return Ok(map[y]);
        }
        let witness = find_cut_factor(&h)
            .map_err(|e| StrategyError::Precondition(e.to_string()))?
            .ok_or_else(|| {
                StrategyError::Precondition("no cut-factor in the active subgraph".into())
            })?;
        let (labels, count) = h.component_labels_avoiding(Some(witness.u));
        let mut parts = vec![Vec::new(); count];
        for (x, &l) in labels.iter().enumerate() {
            if l != usize::MAX {
                parts[l].push(map[x]);
            }
        }
        if self.plan.cut_factor.is_none() {
            self.plan.cut_factor = Some((map[witness.u], map[witness.v], map[witness.w]));
        }
        self.pending = Some((
            parts[labels[witness.v]].clone(),
            parts[labels[witness.w]].clone(),
        ));
        // While waiting, a move outside the active line leaves G_v as the default.
        self.active = None;
        Ok(map[witness.u])
    }
}

/// Staller's cut-factor strategy for playing first.
pub fn staller_cut_factor_strategy(g: &Graph) -> Result<StallerStrategy, StrategyError> {
    StallerStrategy::new(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WinReason {
    /// Dominator's vertices dominate the graph.
    Dominated,
    /// Staller owns the closed neighborhood of `vertex`.
    VertexIsolated { vertex: Vertex },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayTranscript {
    pub first: Player,
    pub moves: Vec<(Player, Vertex)>,
    pub winner: Player,
    pub reason: WinReason,
}

impl PlayTranscript {
    /// Replays the moves and checks legality, alternation and the winner.
    pub fn verify(&self, g: &Graph) -> Result<(), String> {
        let mut board = vec![None; g.n()];
        let mut mover = self.first;
        for (i, &(p, v)) in self.moves.iter().enumerate() {
            if p != mover {
                return Err(format!("move {i} by {p} out of turn"));
            }
            if v >= g.n() || board[v].is_some() {
                return Err(format!("move {i} claims unavailable vertex {v}"));
            }
            if game_result(g, &board).is_some() {
                return Err(format!("move {i} made after the game ended"));
            }
            board[v] = Some(p);
            mover = p.other();
        }
        match game_result(g, &board) {
            Some((w, r)) if w == self.winner && r == self.reason => Ok(()),
            Some((w, r)) => Err(format!(
                "replay ends with {w} ({r:?}), transcript says {}",
                self.winner
            )),
            None => Err("replay does not reach the end of the game".into()),
        }
    }
}

/// Winner and reason once the game is decided.
pub fn game_result(g: &Graph, board: &Board) -> Option<(Player, WinReason)> {
    for v in 0..g.n() {
        let closed_owned = board[v] == Some(Player::Staller)
            && g.neighbors(v)
                .iter()
                .all(|&w| board[w] == Some(Player::Staller));
        if closed_owned {
            return Some((Player::Staller, WinReason::VertexIsolated { vertex: v }));
        }
    }
    let dominated = (0..g.n()).all(|v| {
        owned_by_dominator(board, v) || g.neighbors(v).iter().any(|&w| owned_by_dominator(board, w))
    });
    dominated.then_some((Player::Dominator, WinReason::Dominated))
}

#[derive(Debug, Clone)]
pub enum DominatorPlayer {
    Strategy(DominatorStrategy),
    Oracle(Oracle),
    Random(u64),
    Exhaustive,
}

#[derive(Debug, Clone)]
pub enum StallerPlayer {
    Strategy(Box<StallerStrategy>),
    Oracle(Oracle),
    Random(u64),
    Exhaustive,
}

/// Full-tree verification of one fixed side against every opponent line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveReport {
    pub fixed_side: Player,
    pub lines: u64,
    pub fixed_side_losses: u64,
    pub first_losing_line: Option<Vec<(Player, Vertex)>>,
}

impl ExhaustiveReport {
    pub fn fixed_side_never_loses(&self) -> bool {
        self.fixed_side_losses == 0
    }
}

#[derive(Debug, Clone)]
pub enum MatchResult {
    Transcript(PlayTranscript),
    Exhaustive(ExhaustiveReport),
}

/// Per-match state of a non-exhaustive player.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
enum Agent {
    Dom(DominatorStrategy),
    Stall(Box<StallerStrategy>),
    Oracle(Oracle),
    Random(ChaCha8Rng),
}

impl Agent {
    fn from_dominator(p: DominatorPlayer) -> Option<Agent> {
        match p {
            DominatorPlayer::Strategy(s) => Some(Agent::Dom(s)),
            DominatorPlayer::Oracle(o) => Some(Agent::Oracle(o)),
            DominatorPlayer::Random(seed) => Some(Agent::Random(ChaCha8Rng::seed_from_u64(seed))),
            DominatorPlayer::Exhaustive => None,
        }
    }

    fn from_staller(p: StallerPlayer) -> Option<Agent> {
        match p {
            StallerPlayer::Strategy(s) => Some(Agent::Stall(s)),
            StallerPlayer::Oracle(o) => Some(Agent::Oracle(o)),
            StallerPlayer::Random(seed) => Some(Agent::Random(ChaCha8Rng::seed_from_u64(seed))),
            StallerPlayer::Exhaustive => None,
        }
    }

    fn choose(
        &mut self,
        me: Player,
        g: &Graph,
        board: &Board,
        last: Option<(Player, Vertex)>,
    ) -> Result<Vertex, StrategyError> {
        let free: Vec<Vertex> = (0..g.n()).filter(|&v| is_free(board, v)).collect();
        if free.is_empty() {
            return Err(StrategyError::NoMove(me));
        }
        let opponent_last = last.filter(|m| m.0 != me).map(|m| m.1);
        match self {
            Agent::Dom(s) => Ok(match opponent_last {
                Some(x) => s.respond(x, board),
                None => s.free_move(board),
            }
            .ok_or(StrategyError::NoMove(me))?),
            Agent::Stall(s) => s.next_move(opponent_last, board),
            Agent::Random(rng) => Ok(*free.choose(rng).expect("free is non-empty")),
            Agent::Oracle(o) => {
                let mask = |p: Player| {
                    (0..g.n())
                        .filter(|&v| board[v] == Some(p))
                        .fold(0u64, |m, v| m | 1 << v)
                };
                let (d, s) = (mask(Player::Dominator), mask(Player::Staller));
                for &v in &free {
                    let (d2, s2) = match me {
                        Player::Dominator => (d | 1 << v, s),
                        Player::Staller => (d, s | 1 << v),
                    };
                    let pos = GamePosition {
                        graph: g,
                        dominator: d2,
                        staller: s2,
                        to_move: me.other(),
                    };
                    if o.solve_position(&pos)? == me {
                        return Ok(v);
                    }
                }
                Ok(free[0])
            }
        }
    }
}

/// Plays one match, or verifies a fixed side against an exhaustive opponent.
pub fn play_match(
    g: &Graph,
    dom: DominatorPlayer,
    stall: StallerPlayer,
    first: Player,
) -> Result<MatchResult, StrategyError> {
    if matches!(stall, StallerPlayer::Strategy(_)) && first != Player::Staller {
        return Err(StrategyError::Precondition(
            "the cut-factor strategy plays first".into(),
        ));
    }
    match (Agent::from_dominator(dom), Agent::from_staller(stall)) {
        (Some(d), Some(s)) => {
            let mut agents = [d, s];
            let mut board = vec![None; g.n()];
            let mut moves = Vec::new();
            let mut mover = first;
            loop {
                if let Some((winner, reason)) = game_result(g, &board) {
                    return Ok(MatchResult::Transcript(PlayTranscript {
                        first,
                        moves,
                        winner,
                        reason,
                    }));
                }
                let agent = &mut agents[(mover == Player::Staller) as usize];
                let v = agent.choose(mover, g, &board, moves.last().copied())?;
                if v >= g.n() || board[v].is_some() {
                    return Err(StrategyError::IllegalMove {
                        player: mover,
                        vertex: v,
                        transcript: PlayTranscript {
                            first,
                            moves,
                            winner: mover.other(),
                            reason: WinReason::Dominated,
                        },
                    });
                }
                board[v] = Some(mover);
                moves.push((mover, v));
                mover = mover.other();
            }
        }
        (Some(d), None) => Ok(MatchResult::Exhaustive(exhaustive(
            g,
            d,
            Player::Dominator,
            first,
        )?)),
        (None, Some(s)) => Ok(MatchResult::Exhaustive(exhaustive(
            g,
            s,
            Player::Staller,
            first,
        )?)),
        (None, None) => Err(StrategyError::Precondition("both sides exhaustive".into())),
    }
}

fn exhaustive(
    g: &Graph,
    agent: Agent,
    fixed: Player,
    first: Player,
) -> Result<ExhaustiveReport, StrategyError> {
    let mut report = ExhaustiveReport {
        fixed_side: fixed,
        lines: 0,
        fixed_side_losses: 0,
        first_losing_line: None,
    };
    let mut board = vec![None; g.n()];
    let mut moves = Vec::new();
    walk(g, agent, fixed, first, &mut board, &mut moves, &mut report)?;
    Ok(report)
}

fn walk(
    g: &Graph,
    mut agent: Agent,
    fixed: Player,
    mover: Player,
    board: &mut Vec<Option<Player>>,
    moves: &mut Vec<(Player, Vertex)>,
    report: &mut ExhaustiveReport,
) -> Result<(), StrategyError> {
    if let Some((winner, _)) = game_result(g, board) {
        report.lines += 1;
        if winner != fixed {
            report.fixed_side_losses += 1;
            if report.first_losing_line.is_none() {
                report.first_losing_line = Some(moves.clone());
            }
        }
        return Ok(());
    }
    if mover == fixed {
        let v = agent.choose(mover, g, board, moves.last().copied())?;
        if v >= g.n() || board[v].is_some() {
            return Err(StrategyError::IllegalMove {
                player: mover,
                vertex: v,
                transcript: PlayTranscript {
                    first: moves.first().map_or(mover, |m| m.0),
                    moves: moves.clone(),
                    winner: mover.other(),
                    reason: WinReason::Dominated,
                },
            });
        }
        board[v] = Some(mover);
        moves.push((mover, v));
        let r = walk(g, agent, fixed, mover.other(), board, moves, report);
        moves.pop();
        board[v] = None;
        return r;
    }
    for v in 0..g.n() {
        if board[v].is_some() {
            continue;
        }
        board[v] = Some(mover);
        moves.push((mover, v));
        let r = walk(g, agent.clone(), fixed, mover.other(), board, moves, report);
        moves.pop();
        board[v] = None;
        r?;
    }
    Ok(())
}
