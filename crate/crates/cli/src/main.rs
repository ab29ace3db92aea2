use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use mbdom::decider::{decide, dominator_first_star_factor, Certificate, DecideOptions, Method};
use mbdom::factor::{max_partial_12_factor, perfect_12_factor, FactorResult};
use mbdom::generate::{corpus, generate_instance, GenKind};
use mbdom::interval::{nestedness_and_chains, pds_dp_with_stats};
use mbdom::io::{emit_instance, parse_instance, CertificateFile, CertificatePayload, Instance};
use mbdom::oracle::{GamePosition, OracleConfig};
use mbdom::strategy::{
    compose_dominator_strategy, play_match, DominatorPlayer, MatchResult, StallerPlayer,
    StallerStrategy,
};
use mbdom::{Graph, Oracle, Outcome, Player};

const EXIT_CERTIFIED: u8 = 0;
const EXIT_UNCERTIFIED: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mbdom",
    version,
    about = "Maker-Breaker domination game solver"
)]
struct Cli {
    /// Seed for randomized players and generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest graph the game oracle will solve.
    #[arg(long, global = true, default_value_t = 13)]
    max_oracle_n: usize,
    /// Add the normalized instance text to the output.
    #[arg(long, global = true)]
    emit_normalized: bool,
    /// Verify strategies against every opponent line.
    #[arg(long, global = true)]
    exhaustive: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the outcome and print the decision with its certificate.
    Decide {
        instance: PathBuf,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Perfect [1,2]-factor or a Hall violator.
    Factor {
        instance: PathBuf,
        /// Report a maximum partial factor instead.
        #[arg(long)]
        partial: bool,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Pairing dominating set of an interval instance via the profile DP.
    Pds {
        instance: PathBuf,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Nestedness and a proper chain partition.
    Nu { instance: PathBuf },
    /// Exact outcome by exhaustive game search.
    Oracle { instance: PathBuf },
    /// Play one match, or verify a side with --exhaustive opponents.
    Play {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Agent::Strategy)]
        dominator: Agent,
        #[arg(long, value_enum, default_value_t = Agent::Oracle)]
        staller: Agent,
        #[arg(long, value_enum, default_value_t = First::Staller)]
        first: First,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Check a certificate file against an instance.
    Verify {
        instance: PathBuf,
        certificate: PathBuf,
    },
    /// Print a generated instance.
    Gen {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 9)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        max_clique: usize,
    },
    /// Batch experiment table, one row per case.
    Bench {
        /// Random instances per family.
        #[arg(long, default_value_t = 40)]
        count: usize,
        /// Exhaustive corpus size bound.
        #[arg(long, default_value_t = 6)]
        corpus_n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Agent {
    Strategy,
    Oracle,
    Random,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum First {
    Dominator,
    Staller,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Regular,
    Tree,
    Block,
    Outerplanar,
    Interval,
    ProperInterval,
    Gnp,
}

struct Ctx {
    seed: u64,
    oracle: Oracle,
    emit_normalized: bool,
    exhaustive: bool,
}

enum Failure {
    Input(anyhow::Error),
    Other(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Other(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        seed: cli.seed,
        oracle: Oracle::new(OracleConfig::default().with_max_game_n(cli.max_oracle_n)),
        emit_normalized: cli.emit_normalized,
        exhaustive: cli.exhaustive,
    };
    match run(&ctx, cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_UNKNOWN)
        }
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    parse_instance(path).map_err(|e| Failure::Input(e.into()))
}

fn print(ctx: &Ctx, inst: Option<&Instance>, mut out: Value) {
    if ctx.emit_normalized {
        if let Some(i) = inst {
            out["normalized"] = Value::String(emit_instance(&i.normalized()));
        }
    }
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(&out).expect("json")
    ));
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn write_cert(path: &Option<PathBuf>, inst: &Instance, payload: CertificatePayload) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, CertificateFile::new(inst, &payload).to_json())
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run(ctx: &Ctx, cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Decide { instance, cert_out } => {
            let inst = load(&instance)?;
            let opts = DecideOptions {
                oracle: ctx.oracle,
                hints: None,
            };
            let d = decide(&inst.graph, inst.rep.as_ref(), &opts)
                .map_err(|e| Failure::Input(e.into()))?;
            let payload = match &d.certificate {
                Some(Certificate::Factor(f)) => Some(CertificatePayload::Factor(f.clone())),
                Some(Certificate::Apds(p)) => Some(CertificatePayload::Apds(p.clone())),
                Some(Certificate::Staller(s)) => Some(CertificatePayload::Staller(s.clone())),
                _ => None,
            };
            if let Some(p) = payload {
                write_cert(&cert_out, &inst, p)?;
            }
            print(ctx, Some(&inst), serde_json::to_value(&d)?);
            Ok(match (d.outcome, &d.certificate) {
                (Outcome::Unknown, _) => EXIT_UNKNOWN,
                (_, None | Some(Certificate::OracleTrace { .. })) => EXIT_UNCERTIFIED,
                _ => EXIT_CERTIFIED,
            })
        }
        Command::Factor {
            instance,
            partial,
            cert_out,
        } => {
            let inst = load(&instance)?;
            if partial {
                let f = max_partial_12_factor(&inst.graph);
                print(
                    ctx,
                    Some(&inst),
                    json!({ "coverage": f.coverage(), "factor": f }),
                );
                return Ok(EXIT_CERTIFIED);
            }
            match perfect_12_factor(&inst.graph) {
                FactorResult::Factor(f) => {
                    write_cert(&cert_out, &inst, CertificatePayload::Factor(f.clone()))?;
                    print(ctx, Some(&inst), json!({ "factor": f }));
                }
                FactorResult::NoFactor { hall_violator } => {
                    print(
                        ctx,
                        Some(&inst),
                        json!({ "factor": null, "hall_violator": hall_violator }),
                    );
                }
            }
            Ok(EXIT_CERTIFIED)
        }
        Command::Pds { instance, cert_out } => {
            let inst = load(&instance)?;
            let Some(rep) = &inst.rep else {
                return Err(Failure::Input(anyhow::anyhow!(
                    "{}: no interval section",
                    instance.display()
                )));
            };
            let r = pds_dp_with_stats(rep);
            if let Some(p) = &r.pds {
                write_cert(&cert_out, &inst, CertificatePayload::Apds(p.clone()))?;
            }
            print(
                ctx,
                Some(&inst),
                json!({
                    "pds": r.pds,
                    "k": r.stats.k,
                    "layer_counts": r.stats.layer_counts,
                    "profile_bound": r.stats.profile_bound().to_string(),
                }),
            );
            Ok(if r.pds.is_some() {
                EXIT_CERTIFIED
            } else {
                EXIT_UNCERTIFIED
            })
        }
        Command::Nu { instance } => {
            let inst = load(&instance)?;
            let Some(rep) = &inst.rep else {
                return Err(Failure::Input(anyhow::anyhow!(
                    "{}: no interval section",
                    instance.display()
                )));
            };
            let (k, chains) = nestedness_and_chains(rep);
            print(
                ctx,
                Some(&inst),
                json!({ "nestedness": k, "chains": chains.chains }),
            );
            Ok(EXIT_CERTIFIED)
        }
        Command::Oracle { instance } => {
            let inst = load(&instance)?;
            let g = &inst.graph;
            let mut winners = Vec::new();
            for first in [Player::Dominator, Player::Staller] {
                match ctx.oracle.solve_position(&GamePosition::start(g, first)) {
                    Ok(w) => winners.push(w),
                    Err(e) => {
                        print(
                            ctx,
                            Some(&inst),
                            json!({ "outcome": Outcome::Unknown, "reason": e.to_string() }),
                        );
                        return Ok(EXIT_UNKNOWN);
                    }
                }
            }
            let outcome = ctx.oracle.outcome(g);
            print(
                ctx,
                Some(&inst),
                json!({ "outcome": outcome, "dominator_first": winners[0], "staller_first": winners[1] }),
            );
            Ok(EXIT_UNCERTIFIED)
        }
        Command::Play {
            instance,
            dominator,
            staller,
            first,
            cert_out,
        } => {
            let inst = load(&instance)?;
            let g = &inst.graph;
            let first = match first {
                First::Dominator => Player::Dominator,
                First::Staller => Player::Staller,
            };
            let exhaustive = |a: Agent| {
                ctx.exhaustive && !matches!(a, Agent::Strategy) || matches!(a, Agent::Exhaustive)
            };
            let dom = if exhaustive(dominator) {
                DominatorPlayer::Exhaustive
            } else {
                match dominator {
                    Agent::Strategy => {
                        let FactorResult::Factor(f) = perfect_12_factor(g) else {
                            return Err(Failure::Other(anyhow::anyhow!(
                                "no perfect [1,2]-factor, so no Dominator strategy"
                            )));
                        };
                        DominatorPlayer::Strategy(compose_dominator_strategy(g, &f)?)
                    }
                    Agent::Oracle => DominatorPlayer::Oracle(ctx.oracle),
                    Agent::Random | Agent::Exhaustive => DominatorPlayer::Random(ctx.seed),
                }
            };
            let stall = if exhaustive(staller) && !matches!(dom, DominatorPlayer::Exhaustive) {
                StallerPlayer::Exhaustive
            } else {
                match staller {
                    Agent::Strategy => StallerPlayer::Strategy(Box::new(StallerStrategy::new(g)?)),
                    Agent::Oracle => StallerPlayer::Oracle(ctx.oracle),
                    Agent::Random | Agent::Exhaustive => StallerPlayer::Random(ctx.seed),
                }
            };
            match play_match(g, dom, stall, first)? {
                MatchResult::Transcript(t) => {
                    write_cert(&cert_out, &inst, CertificatePayload::Transcript(t.clone()))?;
                    print(ctx, Some(&inst), json!({ "transcript": t }));
                    Ok(EXIT_CERTIFIED)
                }
                MatchResult::Exhaustive(r) => {
                    let ok = r.fixed_side_never_loses();
                    print(ctx, Some(&inst), json!({ "exhaustive": r }));
                    Ok(if ok { EXIT_CERTIFIED } else { EXIT_UNCERTIFIED })
                }
            }
        }
        Command::Verify {
            instance,
            certificate,
        } => {
            let inst = load(&instance)?;
            let text = std::fs::read_to_string(&certificate)
                .with_context(|| format!("reading {}", certificate.display()))
                .map_err(Failure::Input)?;
            let cert = CertificateFile::from_json(&text)
                .with_context(|| format!("parsing {}", certificate.display()))
                .map_err(Failure::Input)?;
            match mbdom::io::verify_certificate(&inst, &cert) {
                Ok(()) => {
                    print(ctx, None, json!({ "verified": true }));
                    Ok(EXIT_CERTIFIED)
                }
                Err(e) => {
                    print(ctx, None, json!({ "verified": false, "reason": e.0 }));
                    Ok(EXIT_UNCERTIFIED)
                }
            }
        }
        Command::Gen {
            kind,
            n,
            r,
            k,
            p,
            max_clique,
        } => {
            let kind = match kind {
                Kind::Regular => GenKind::Regular { n, r },
                Kind::Tree => GenKind::Tree { n },
                Kind::Block => GenKind::Block { n, max_clique },
                Kind::Outerplanar => GenKind::Outerplanar { n, drop: p },
                Kind::Interval => GenKind::Interval { n, k },
                Kind::ProperInterval => GenKind::ProperInterval { n },
                Kind::Gnp => GenKind::Gnp { n, p },
            };
            let inst = generate_instance(kind, ctx.seed).map_err(|e| Failure::Input(e.into()))?;
            let inst = if ctx.emit_normalized {
                inst.normalized()
            } else {
                inst
            };
            emit(&emit_instance(&inst));
            Ok(EXIT_CERTIFIED)
        }
        Command::Bench { count, corpus_n } => {
            bench(ctx, count, corpus_n);
            Ok(EXIT_CERTIFIED)
        }
    }
}

struct Case {
    family: &'static str,
    index: usize,
    inst: Instance,
}

fn bench_cases(seed: u64, count: usize, corpus_n: usize) -> Vec<Case> {
    let mut cases = Vec::new();
    for (index, g) in corpus(corpus_n).into_iter().enumerate() {
        cases.push(Case {
            family: "corpus",
            index,
            inst: Instance::from_graph(g),
        });
    }
    type Family = (&'static str, fn(usize, usize) -> GenKind);
    let families: [Family; 5] = [
        ("block", |n, _| GenKind::Block { n, max_clique: 4 }),
        ("outerplanar", |n, _| GenKind::Outerplanar { n, drop: 0.3 }),
        ("proper_interval", |n, _| GenKind::ProperInterval { n }),
        ("interval", |n, i| GenKind::Interval {
            n,
            k: 1 + i % 3.min(n),
        }),
        ("gnp", |n, _| GenKind::Gnp { n, p: 0.35 }),
    ];
    for (f, (family, make)) in families.iter().enumerate() {
        for index in 0..count {
            let n = 2 + index % 8;
            let s = seed
                .wrapping_mul(1_000_003)
                .wrapping_add((f * count + index) as u64);
            cases.push(Case {
                family,
                index,
                inst: generate_instance(make(n, index), s).expect("bench parameters are feasible"),
            });
        }
    }
    for (index, g) in [
        Graph::cycle(5),
        Graph::complete(6),
        Graph::hypercube(3),
        Graph::petersen(),
    ]
    .into_iter()
    .enumerate()
    {
        cases.push(Case {
            family: "regular",
            index,
            inst: Instance::from_graph(g),
        });
    }
    cases
}

fn bench_row(ctx: &Ctx, c: &Case) -> Value {
    let g = &c.inst.graph;
    let opts = DecideOptions {
        oracle: ctx.oracle,
        hints: None,
    };
    let d = decide(g, c.inst.rep.as_ref(), &opts).expect("generated instances are consistent");
    let oracle = ctx.oracle.outcome(g);
    let agree = match (d.outcome, oracle) {
        (_, Outcome::Unknown) | (Outcome::Unknown, _) => None,
        (Outcome::NotDUnresolved, o) => Some(o.is_not_d()),
        (a, b) => Some(a == b),
    };
    let mut row = json!({
        "family": c.family,
        "index": c.index,
        "n": g.n(),
        "m": g.m(),
        "method": d.method.to_string(),
        "refined_by": d.refinement.as_ref().map(|r| r.0.to_string()),
        "outcome": d.outcome,
        "oracle": oracle,
        "agree": agree,
        "star_factor": dominator_first_star_factor(g).is_some(),
    });
    if ctx.exhaustive && g.n() <= 9 {
        let survived = match &d.certificate {
            Some(Certificate::Factor(f)) => compose_dominator_strategy(g, f).ok().and_then(|s| {
                match play_match(
                    g,
                    DominatorPlayer::Strategy(s),
                    StallerPlayer::Exhaustive,
                    Player::Staller,
                ) {
                    Ok(MatchResult::Exhaustive(r)) => Some(r.fixed_side_never_loses()),
                    _ => None,
                }
            }),
            Some(Certificate::Staller(_)) => StallerStrategy::new(g).ok().and_then(|s| {
                match play_match(
                    g,
                    DominatorPlayer::Exhaustive,
                    StallerPlayer::Strategy(Box::new(s)),
                    Player::Staller,
                ) {
                    Ok(MatchResult::Exhaustive(r)) => Some(r.fixed_side_never_loses()),
                    _ => None,
                }
            }),
            _ => None,
        };
        row["strategy_survives"] = json!(survived);
    }
    if d.method == Method::None {
        row["agree"] = Value::Null;
    }
    row
}

fn bench(ctx: &Ctx, count: usize, corpus_n: usize) {
    let cases = bench_cases(ctx.seed, count, corpus_n);
    let rows: Vec<Value> = cases.par_iter().map(|c| bench_row(ctx, c)).collect();
    let cols = [
        "family",
        "index",
        "n",
        "m",
        "method",
        "refined_by",
        "outcome",
        "oracle",
        "agree",
        "star_factor",
    ];
    let mut header: Vec<&str> = cols.to_vec();
    if ctx.exhaustive {
        header.push("strategy_survives");
    }
    let mut table = header.join("\t") + "\n";
    for r in &rows {
        let cells: Vec<String> = header
            .iter()
            .map(|k| match &r[*k] {
                Value::String(s) => s.clone(),
                Value::Null => "-".into(),
                v => v.to_string(),
            })
            .collect();
        table += &cells.join("\t");
        table.push('\n');
    }
    emit(&table);
    let disagreements = rows.iter().filter(|r| r["agree"] == json!(false)).count();
    eprintln!(
        "{} cases, {} disagreements with the oracle",
        rows.len(),
        disagreements
    );
}
