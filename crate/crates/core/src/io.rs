//! Instance text format and certificate files.
//!
//! An instance is an edge list with an optional interval section:
//!
//! ```text
//! # comment
//! 3 2
//! 0 1
//! 1 2
//! 0 0 1.5
//! 1 1 2
//! 2 7/4 3
//! ```
//!
//! The header is `n m`, followed by `m` edge lines. Interval lines are
//! `id min max` with integer, decimal or `p/q` endpoints. A file may also
//! consist of interval lines only, in which case the graph is derived.

use std::fmt;
use std::path::Path;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::factor::FactorCertificate;
use crate::graph::{Graph, Vertex};
use crate::interval::{
    intersection_graph, normalize, IntervalRep, PairingDominatingSet, RationalRep, Scalar,
};
use crate::oracle::Player;
use crate::strategy::{
    play_match, DominatorPlayer, MatchResult, PlayTranscript, StallerPlan, StallerPlayer,
    StallerStrategy,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    pub rep: Option<RationalRep>,
}

impl Instance {
    pub fn from_graph(graph: Graph) -> Self {
        Instance { graph, rep: None }
    }

    /// Builds an instance whose graph is the intersection graph of `rep`.
    pub fn from_rep<T: Scalar + Into<Rational64>>(rep: &IntervalRep<T>) -> Self {
        let graph = intersection_graph(rep);
        let rational = IntervalRep::new(
            rep.intervals()
                .iter()
                .map(|&(a, b)| (a.into(), b.into()))
                .collect(),
        )
        .expect("endpoints already ordered");
        Instance {
            graph,
            rep: Some(rational),
        }
    }

    /// The same instance with endpoints remapped to `1..=2n`.
    pub fn normalized(&self) -> Instance {
        Instance {
            graph: self.graph.clone(),
            rep: self.rep.as_ref().map(|r| {
                let norm = normalize(r);
                IntervalRep::new(
                    norm.intervals()
                        .iter()
                        .map(|&(a, b)| (a.into(), b.into()))
                        .collect(),
                )
                .expect("normalized endpoints are ordered")
            }),
        }
    }

    /// Lowercase hex SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        let text = emit_instance(self);
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(
                f,
                "line {}, column {}: {}",
                self.line, self.column, self.message
            )
        }
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{path}: {error}")]
    Io { path: String, error: std::io::Error },
    #[error("{path}: {error}")]
    Parse { path: String, error: ParseError },
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        column,
        message: message.into(),
    })
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (j, c) in body
            .char_indices()
            .chain(std::iter::once((body.len(), ' ')))
        {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(j),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &body[s..j],
                        column: s + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        if !tokens.is_empty() {
            out.push(Line {
                number: i + 1,
                tokens,
            });
        }
    }
    out
}

fn parse_usize(line: usize, t: &Token<'_>, what: &str) -> Result<usize, ParseError> {
    t.text.parse().or_else(|_| {
        err(
            line,
            t.column,
            format!("expected {what}, found `{}`", t.text),
        )
    })
}

/// Parses an integer, a decimal such as `-1.25`, or a fraction `p/q`.
pub fn parse_endpoint(s: &str) -> Option<Rational64> {
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.parse().ok()?;
        let q: i64 = q.parse().ok()?;
        return (q > 0).then(|| Rational64::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let scale = 10i64.checked_pow(frac.len() as u32)?;
    let frac: i64 = if frac.is_empty() {
        0
    } else {
        frac.parse().ok()?
    };
    let numer = int.checked_mul(scale)?.checked_add(frac)?;
    let numer = if neg { -numer } else { numer };
    Some(Rational64::new(numer, scale))
}

fn format_endpoint(x: Rational64) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_instance_str(text: &str) -> Result<Instance, ParseError> {
    let lines = tokenize(text);
    let Some(first) = lines.first() else {
        return err(0, 0, "empty instance");
    };
    let (graph_section, interval_lines) = match first.tokens.len() {
        2 => {
            let n = parse_usize(first.number, &first.tokens[0], "vertex count")?;
            let m = parse_usize(first.number, &first.tokens[1], "edge count")?;
            if lines.len() < 1 + m {
                return err(
                    first.number,
                    first.tokens[1].column,
                    format!("header promises {m} edges, found {}", lines.len() - 1),
                );
            }
            let mut edges = Vec::with_capacity(m);
            let mut seen = std::collections::HashSet::new();
            for l in &lines[1..=m] {
                if l.tokens.len() != 2 {
                    return err(l.number, l.tokens[0].column, "edge line must be `u v`");
                }
                let u = parse_usize(l.number, &l.tokens[0], "vertex")?;
                let v = parse_usize(l.number, &l.tokens[1], "vertex")?;
                for (x, t) in [(u, &l.tokens[0]), (v, &l.tokens[1])] {
                    if x >= n {
                        return err(l.number, t.column, format!("vertex {x} outside 0..{n}"));
                    }
                }
                if u == v {
                    return err(l.number, l.tokens[0].column, format!("self-loop at {u}"));
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return err(
                        l.number,
                        l.tokens[0].column,
                        format!("duplicate edge {u} {v}"),
                    );
                }
                edges.push((u, v));
            }
            let g = Graph::new(n, &edges).expect("edges checked");
            (Some((g, &lines[1..=m])), &lines[1 + m..])
        }
        3 => (None, &lines[..]),
        _ => {
            return err(
                first.number,
                first.tokens[0].column,
                "expected header `n m` or interval line `id min max`",
            )
        }
    };

    if interval_lines.is_empty() {
        let (g, _) = graph_section.expect("interval-only files have interval lines");
        return Ok(Instance::from_graph(g));
    }
    let n = interval_lines.len();
    if let Some((g, _)) = &graph_section {
        if g.n() != n {
            return err(
                interval_lines[0].number,
                1,
                format!("{n} interval lines for {} vertices", g.n()),
            );
        }
    }
    let mut slots: Vec<Option<(Rational64, Rational64)>> = vec![None; n];
    let mut line_of = vec![0; n];
    for l in interval_lines {
        if l.tokens.len() != 3 {
            return err(
                l.number,
                l.tokens[0].column,
                "interval line must be `id min max`",
            );
        }
        let id = parse_usize(l.number, &l.tokens[0], "interval id")?;
        if id >= n {
            return err(
                l.number,
                l.tokens[0].column,
                format!("interval id {id} outside 0..{n}"),
            );
        }
        if slots[id].is_some() {
            return err(
                l.number,
                l.tokens[0].column,
                format!("interval id {id} repeated"),
            );
        }
        let mut ends = [Rational64::from_integer(0); 2];
        for (k, t) in l.tokens[1..].iter().enumerate() {
            ends[k] = match parse_endpoint(t.text) {
                Some(x) => x,
                None => return err(l.number, t.column, format!("bad endpoint `{}`", t.text)),
            };
        }
        if ends[0] > ends[1] {
            return err(l.number, l.tokens[1].column, "min exceeds max");
        }
        slots[id] = Some((ends[0], ends[1]));
        line_of[id] = l.number;
    }
    let rep = IntervalRep::new(
        slots
            .into_iter()
            .map(|s| s.expect("ids bijective"))
            .collect(),
    )
    .expect("endpoints checked");
    let derived = intersection_graph(&rep);
    match graph_section {
        None => Ok(Instance {
            graph: derived,
            rep: Some(rep),
        }),
        Some((g, edge_lines)) => {
            for (l, (u, v)) in edge_lines.iter().zip(g_edges_in_file_order(edge_lines)) {
                if !derived.has_edge(u, v) {
                    return err(
                        l.number,
                        1,
                        format!("edge {u} {v} but intervals {u} and {v} are disjoint"),
                    );
                }
            }
            for (u, v) in derived.edges() {
                if !g.has_edge(u, v) {
                    return err(
                        line_of[u],
                        1,
                        format!("intervals {u} and {v} intersect but edge {u} {v} is missing"),
                    );
                }
            }
            Ok(Instance {
                graph: g,
                rep: Some(rep),
            })
        }
    }
}

fn g_edges_in_file_order(lines: &[Line<'_>]) -> Vec<(Vertex, Vertex)> {
    lines
        .iter()
        .map(|l| {
            (
                l.tokens[0].text.parse().unwrap(),
                l.tokens[1].text.parse().unwrap(),
            )
        })
        .collect()
}

pub fn parse_instance(path: impl AsRef<Path>) -> Result<Instance, InstanceError> {
    let p = path.as_ref();
    let text = std::fs::read_to_string(p).map_err(|error| InstanceError::Io {
        path: p.display().to_string(),
        error,
    })?;
    parse_instance_str(&text).map_err(|error| InstanceError::Parse {
        path: p.display().to_string(),
        error,
    })
}

/// Canonical text: sorted edges, intervals in id order.
pub fn emit_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    if let Some(rep) = &inst.rep {
        for (id, &(a, b)) in rep.intervals().iter().enumerate() {
            out.push_str(&format!(
                "{id} {} {}\n",
                format_endpoint(a),
                format_endpoint(b)
            ));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Factor,
    Pds,
    Apds,
    Staller,
    Transcript,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub kind: CertificateKind,
    /// Digest of the instance this certifies.
    pub digest: String,
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertificatePayload {
    Factor(FactorCertificate),
    Pds(PairingDominatingSet),
    Apds(PairingDominatingSet),
    Staller(StallerPlan),
    Transcript(PlayTranscript),
}

impl CertificatePayload {
    pub fn kind(&self) -> CertificateKind {
        match self {
            CertificatePayload::Factor(_) => CertificateKind::Factor,
            CertificatePayload::Pds(_) => CertificateKind::Pds,
            CertificatePayload::Apds(_) => CertificateKind::Apds,
            CertificatePayload::Staller(_) => CertificateKind::Staller,
            CertificatePayload::Transcript(_) => CertificateKind::Transcript,
        }
    }
}

impl CertificateFile {
    pub fn new(inst: &Instance, payload: &CertificatePayload) -> Self {
        let value = match payload {
            CertificatePayload::Factor(f) => serde_json::to_value(f),
            CertificatePayload::Pds(p) | CertificatePayload::Apds(p) => serde_json::to_value(p),
            CertificatePayload::Staller(s) => serde_json::to_value(s),
            CertificatePayload::Transcript(t) => serde_json::to_value(t),
        }
        .expect("certificates serialize");
        CertificateFile {
            kind: payload.kind(),
            digest: inst.digest(),
            payload: value,
        }
    }

    pub fn decode(&self) -> Result<CertificatePayload, serde_json::Error> {
        let v = self.payload.clone();
        Ok(match self.kind {
            CertificateKind::Factor => CertificatePayload::Factor(serde_json::from_value(v)?),
            CertificateKind::Pds => CertificatePayload::Pds(serde_json::from_value(v)?),
            CertificateKind::Apds => CertificatePayload::Apds(serde_json::from_value(v)?),
            CertificateKind::Staller => CertificatePayload::Staller(serde_json::from_value(v)?),
            CertificateKind::Transcript => {
                CertificatePayload::Transcript(serde_json::from_value(v)?)
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Above this size a Staller certificate is checked against the recomputed
/// plan only, without replaying every Dominator line.
pub const STALLER_REPLAY_MAX_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("verification failed: {0}")]
pub struct VerifyError(pub String);

pub fn verify_certificate(inst: &Instance, cert: &CertificateFile) -> Result<(), VerifyError> {
    let fail = |m: String| Err(VerifyError(m));
    if cert.digest != inst.digest() {
        return fail(format!(
            "digest {} does not match instance {}",
            cert.digest,
            inst.digest()
        ));
    }
    let payload = cert
        .decode()
        .map_err(|e| VerifyError(format!("malformed payload: {e}")))?;
    let g = &inst.graph;
    match payload {
        CertificatePayload::Factor(f) => f.validate(g).map_err(|e| VerifyError(e.to_string())),
        CertificatePayload::Pds(p) => p.validate(g).map_err(|e| VerifyError(e.to_string())),
        CertificatePayload::Apds(p) => p.validate_apds(g).map_err(|e| VerifyError(e.to_string())),
        CertificatePayload::Transcript(t) => t.verify(g).map_err(VerifyError),
        CertificatePayload::Staller(plan) => {
            let s = StallerStrategy::new(g).map_err(|e| VerifyError(e.to_string()))?;
            if *s.plan() != plan {
                return fail(format!(
                    "plan {plan:?} differs from recomputed {:?}",
                    s.plan()
                ));
            }
            if g.n() > STALLER_REPLAY_MAX_N {
                return Ok(());
            }
            match play_match(
                g,
                DominatorPlayer::Exhaustive,
                StallerPlayer::Strategy(Box::new(s)),
                Player::Staller,
            ) {
                Ok(MatchResult::Exhaustive(r)) if r.fixed_side_never_loses() => Ok(()),
                Ok(MatchResult::Exhaustive(r)) => fail(format!(
                    "Staller loses {} of {} lines, first {:?}",
                    r.fixed_side_losses, r.lines, r.first_losing_line
                )),
                Ok(MatchResult::Transcript(_)) => unreachable!("exhaustive opponent"),
                Err(e) => fail(e.to_string()),
            }
        }
    }
}
