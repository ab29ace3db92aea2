//! Routes an instance to the strongest applicable decider.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factor::{
    max_partial_12_factor_with, perfect_12_factor, FactorCertificate, FactorComponent,
    FactorConstraints, FactorResult, PartialFactorCertificate,
};
use crate::graph::{classify_graph, ClassFlags, Graph, Vertex};
use crate::interval::{
    intersection_graph, nestedness_and_chains, pds_dp, unit_interval_decide, IntervalRep,
    PairingDominatingSet, Scalar,
};
use crate::oracle::{Oracle, Outcome, Player};
use crate::strategy::{StallerPlan, StallerStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Regular,
    Factor,
    Block,
    Outerplanar,
    Tree,
    UnitInterval,
    IntervalDp,
    StarFactor,
    Oracle,
    None,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant serializes");
        f.write_str(s.as_str().expect("unit variant is a string"))
    }
}

/// Dominator-first witness: claim `center`, then hold `factor`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarFactorWitness {
    pub center: Vertex,
    /// Neighbors of the center left outside the factor.
    pub leaves: Vec<Vertex>,
    pub factor: PartialFactorCertificate,
}

impl StarFactorWitness {
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        self.factor.validate(g).map_err(|e| e.to_string())?;
        let mut seen = vec![false; g.n()];
        let mut mark = |v: Vertex| -> Result<(), String> {
            if v >= g.n() || seen[v] {
                return Err(format!("vertex {v} used twice or out of range"));
            }
            seen[v] = true;
            Ok(())
        };
        mark(self.center)?;
        for &l in &self.leaves {
            if !g.has_edge(self.center, l) {
                return Err(format!("leaf {l} is not adjacent to the center"));
            }
            mark(l)?;
        }
        for &v in &self.factor.covered {
            mark(v)?;
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err("star and factor do not partition the vertices".into())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Factor(FactorCertificate),
    Apds(PairingDominatingSet),
    /// Hall violator of `B(G)`: `|N(X)| < |X|`.
    NoFactor {
        hall_violator: Vec<Vertex>,
    },
    Staller(StallerPlan),
    StarFactor(StarFactorWitness),
    OracleTrace {
        dominator_first: Player,
        staller_first: Player,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub outcome: Outcome,
    pub method: Method,
    pub certificate: Option<Certificate>,
    /// Extra evidence used to settle `S` versus `N`.
    pub refinement: Option<(Method, Option<Certificate>)>,
    pub note: Option<String>,
}

impl Decision {
    pub fn has_certificate(&self) -> bool {
        self.certificate.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("interval representation disagrees with the graph: {0}")]
    InconsistentRep(String),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DecideOptions {
    pub oracle: Oracle,
    pub hints: Option<ClassFlags>,
}

/// Routing: isolated vertex, perfect factor, class results for block and
/// outerplanar graphs, interval deciders, then the oracle.
pub fn decide<T: Scalar>(
    g: &Graph,
    rep: Option<&IntervalRep<T>>,
    opts: &DecideOptions,
) -> Result<Decision, DecideError> {
    if let Some(r) = rep {
        if r.len() != g.n() {
            return Err(DecideError::InconsistentRep(format!(
                "{} intervals for {} vertices",
                r.len(),
                g.n()
            )));
        }
        if intersection_graph(r) != *g {
            return Err(DecideError::InconsistentRep(
                "intersection graph differs".into(),
            ));
        }
    }
    let flags = opts.hints.unwrap_or_else(|| classify_graph(g));

    if let Some(&x) = g.isolated_vertices().first() {
        let d = Decision {
            outcome: Outcome::NotDUnresolved,
            method: Method::Factor,
            certificate: Some(Certificate::NoFactor {
                hall_violator: vec![x],
            }),
            refinement: None,
            note: Some(format!("vertex {x} is isolated; Staller claims it first")),
        };
        return Ok(refine(g, d, opts));
    }

    let hall = match perfect_12_factor(g) {
        FactorResult::Factor(f) => {
            let method = if flags.regular_degree.is_some() {
                Method::Regular
            } else {
                Method::Factor
            };
            return Ok(Decision {
                outcome: Outcome::D,
                method,
                certificate: Some(Certificate::Factor(f)),
                refinement: None,
                note: None,
            });
        }
        FactorResult::NoFactor { hall_violator } => hall_violator,
    };

    if flags.is_block_graph || flags.is_outerplanar {
        let method = if flags.is_tree {
            Method::Tree
        } else if flags.is_block_graph {
            Method::Block
        } else {
            Method::Outerplanar
        };
        let (certificate, note) = match StallerStrategy::new(g) {
            Ok(s) => (Some(Certificate::Staller(s.plan().clone())), None),
            Err(e) => (
                Some(Certificate::NoFactor {
                    hall_violator: hall.clone(),
                }),
                Some(e.to_string()),
            ),
        };
        let note = note.or_else(|| {
            flags
                .is_tree
                .then(|| "tree without a perfect matching".to_string())
        });
        let d = Decision {
            outcome: Outcome::NotDUnresolved,
            method,
            certificate,
            refinement: None,
            note,
        };
        return Ok(refine(g, d, opts));
    }

    if let Some(r) = rep {
        let (k, _) = nestedness_and_chains(r);
        if k <= 1 {
            let u = unit_interval_decide(r).expect("nestedness checked");
            return Ok(Decision {
                outcome: u.outcome,
                method: Method::UnitInterval,
                certificate: u.factor.map(Certificate::Factor),
                refinement: None,
                note: None,
            });
        }
        return Ok(match pds_dp(r) {
            Some(p) => Decision {
                outcome: Outcome::D,
                method: Method::IntervalDp,
                certificate: Some(Certificate::Apds(p)),
                refinement: None,
                note: None,
            },
            None => refine(
                g,
                Decision {
                    outcome: Outcome::NotDUnresolved,
                    method: Method::IntervalDp,
                    certificate: Some(Certificate::NoFactor {
                        hall_violator: hall,
                    }),
                    refinement: None,
                    note: Some("no pairing dominating set".into()),
                },
                opts,
            ),
        });
    }

    if let Some(d) = oracle_decision(g, opts) {
        return Ok(d);
    }
    Ok(Decision {
        outcome: Outcome::Unknown,
        method: Method::None,
        certificate: None,
        refinement: None,
        note: Some(format!("{} vertices exceed the oracle bound", g.n())),
    })
}

fn oracle_decision(g: &Graph, opts: &DecideOptions) -> Option<Decision> {
    let o = opts.oracle;
    let dominator_first = o
        .solve_position(&crate::oracle::GamePosition::start(g, Player::Dominator))
        .ok()?;
    let staller_first = o
        .solve_position(&crate::oracle::GamePosition::start(g, Player::Staller))
        .ok()?;
    let outcome = match (dominator_first, staller_first) {
        (Player::Dominator, Player::Dominator) => Outcome::D,
        (Player::Staller, Player::Staller) => Outcome::S,
        (Player::Dominator, Player::Staller) => Outcome::N,
        (Player::Staller, Player::Dominator) => panic!("second player wins both ways"),
    };
    Some(Decision {
        outcome,
        method: Method::Oracle,
        certificate: Some(Certificate::OracleTrace {
            dominator_first,
            staller_first,
        }),
        refinement: None,
        note: None,
    })
}

/// Settles `S` versus `N` for a decision already known to be not `D`.
fn refine(g: &Graph, mut d: Decision, opts: &DecideOptions) -> Decision {
    debug_assert_eq!(d.outcome, Outcome::NotDUnresolved);
    if let Some(w) = dominator_first_star_factor(g) {
        d.outcome = Outcome::N;
        d.refinement = Some((Method::StarFactor, Some(Certificate::StarFactor(w))));
        return d;
    }
    if let Some(o) = oracle_decision(g, opts) {
        assert!(
            !o.outcome.is_d(),
            "oracle contradicts a proven not-D verdict"
        );
        d.outcome = o.outcome;
        d.refinement = Some((Method::Oracle, o.certificate));
    }
    d
}

/// A star centered at `c` plus a partial factor covering everything outside
/// the star. Centers are tried by degree, highest first.
pub fn dominator_first_star_factor(g: &Graph) -> Option<StarFactorWitness> {
    let mut centers: Vec<Vertex> = (0..g.n()).collect();
    centers.sort_by_key(|&c| (std::cmp::Reverse(g.degree(c)), c));
    for c in centers {
        let rest: Vec<Vertex> = (0..g.n()).filter(|&v| v != c).collect();
        let (h, map) = g.induced_subgraph(&rest);
        let forced_covered: Vec<Vertex> = (0..h.n()).filter(|&x| !g.has_edge(c, map[x])).collect();
        let constraints = FactorConstraints {
            forced_covered,
            ..Default::default()
        };
        let Ok(f) = max_partial_12_factor_with(&h, &constraints) else {
            continue;
        };
        let relabel = |v: &Vertex| map[*v];
        let components = f
            .components
            .iter()
            .map(|comp| match comp {
                FactorComponent::Edge { u, v } => FactorComponent::Edge {
                    u: map[*u],
                    v: map[*v],
                },
                FactorComponent::Cycle { vertices } => FactorComponent::Cycle {
                    vertices: vertices.iter().map(relabel).collect(),
                },
                FactorComponent::TwoUniversal { u, v, leaves } => FactorComponent::TwoUniversal {
                    u: map[*u],
                    v: map[*v],
                    leaves: leaves.iter().map(relabel).collect(),
                },
            })
            .collect();
        let mut covered: Vec<Vertex> = f.covered.iter().map(relabel).collect();
        covered.sort_unstable();
        let leaves = (0..h.n())
            .filter(|&x| !f.covers(x))
            .map(|x| map[x])
            .collect();
        return Some(StarFactorWitness {
            center: c,
            leaves,
            factor: PartialFactorCertificate {
                covered,
                components,
            },
        });
    }
    None
}
