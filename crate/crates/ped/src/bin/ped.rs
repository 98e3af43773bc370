//! `ped`: pedigrees, pedigree graphs and the connectivity game from the
//! command line.
//!
//! Exit codes: 0 success, 1 domain error, 2 assertion or conformance
//! failure, 3 IO error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pedigree_core::game::{game_rngs, run_game, BobPolicy, GameState};
use pedigree_core::graph::{build, pedigree_adjacent};
use pedigree_core::polytope::verify_adjacency_criterion;
use pedigree_core::{GraphError, Node, Pedigree, StrategyRegistry};
use pedigree::config::ExperimentConfig;
use pedigree::error::PedError;
use pedigree::formats::{graph_dot, graph_text, parse_pedigree, schemas, GraphJson, PedigreeJson, TrajectoryJson};
use pedigree::harness;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "ped", version, about = "Pedigree graphs, polytope adjacency and the Alice-vs-Bob connectivity game")]
struct Cli {
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each subcommand has its own default and rejects
    /// formats it cannot produce.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: available parallelism). Output does not
    /// depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pedigree graph of two pedigrees of the same size.
    Graph {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Whether two pedigrees are adjacent on the polytope (connected graph).
    Adjacent {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Monte Carlo campaign; one CSV row per target n.
    Simulate {
        /// `random`, `greedy-common`, `isolationist[:prefer-c]` or `scripted:<pedigree>`.
        #[arg(long)]
        alice: Option<String>,
        /// Target times, comma separated.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<Node>>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Isolations at or after this time count as late.
        #[arg(long)]
        tail_from: Option<Node>,
        /// Key-value config file; flags given alongside override it.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// One game with per-round S and T.
    Play {
        #[arg(long, default_value = "random")]
        alice: String,
        #[arg(long, default_value_t = 100)]
        n: Node,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<Node>,
    },
    /// Degree census of the polytope skeleton, 4 <= n <= 8.
    Census {
        #[arg(long)]
        n: Node,
    },
    /// Cross-checks graph adjacency against the exact hull oracle.
    VerifyPolytope {
        #[arg(long)]
        n: Node,
        /// Check this many random pairs instead of all.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact one-round transition tables on states reached by play.
    VerifyTransitions {
        /// Games to play.
        #[arg(long, default_value_t = 300)]
        samples: u64,
        /// Largest time reached.
        #[arg(long, default_value_t = 50)]
        n: Node,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Full Alice×Bob attachment enumeration on random reachable states.
    VerifyAttachment {
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 40)]
        n: Node,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// d-move count in (n0, 2n0] for games with few common edges at n0.
    Dmoves {
        #[arg(long, default_value = "random")]
        alice: String,
        /// n0.
        #[arg(long, default_value_t = 900)]
        n: Node,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Frequency of a component merge in (n0, 2n0], natural and with forced
    /// early isolations.
    TDecrease {
        #[arg(long, default_value = "random")]
        alice: String,
        /// n0.
        #[arg(long, default_value_t = 900)]
        n: Node,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 2_000)]
        enriched_samples: u64,
        /// Bob forces isolations while inserting nodes from here to n0.
        #[arg(long, default_value_t = 4)]
        enrich_from: Node,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Replays the ten-node worked example round by round.
    Example,
    /// Every pedigree of size n, in order.
    Enumerate {
        #[arg(long)]
        n: Node,
    },
    /// Uniform random pedigrees.
    Sample {
        #[arg(long)]
        n: Node,
        #[arg(long, default_value_t = 1)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// JSON schemas of every machine-readable output.
    Schema,
}

const EXAMPLE_A: &str = "n:10;idx:1,2,4,2,6,8,8";
const EXAMPLE_B: &str = "n:10;idx:3,1,3,5,7,8,3";

fn pretty(v: &impl serde::Serialize) -> Result<String, PedError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn unsupported(cmd: &str, f: Format) -> PedError {
    PedError::Domain(format!("`{cmd}` cannot produce {f:?} output").to_lowercase())
}

fn pair(a: &str, b: &str) -> Result<(Pedigree, Pedigree), PedError> {
    Ok((parse_pedigree(a)?, parse_pedigree(b)?))
}

fn conformance(ok: bool, what: &str, text: String) -> Result<String, (String, PedError)> {
    if ok {
        Ok(text)
    } else {
        Err((text, PedError::Conformance(what.to_string())))
    }
}

/// Output text, or output text plus the failure it documents.
type Outcome = Result<String, (String, PedError)>;

fn run(cli: &Cli) -> Result<Outcome, PedError> {
    let workers = cli.workers.unwrap_or_else(harness::default_workers);
    let fmt = cli.format;
    let text = match &cli.command {
        Command::Graph { a, b } => {
            let (a, b) = pair(a, b)?;
            let g = build(&a, &b)?;
            match fmt.unwrap_or(Format::Json) {
                Format::Json => pretty(&GraphJson::from(&g))?,
                Format::Text => graph_text(&g),
                Format::Dot => graph_dot(&g),
                Format::Csv => {
                    let mut s = String::from("u,v,tag\n");
                    for e in GraphJson::from(&g).edges {
                        let _ = writeln!(s, "{},{},{}", e.u, e.v, e.tag);
                    }
                    s
                }
            }
        }
        Command::Adjacent { a, b } => {
            let (pa, pb) = pair(a, b)?;
            let adj = pedigree_adjacent(&pa, &pb)?;
            match fmt.unwrap_or(Format::Json) {
                Format::Json => pretty(&json!({"a": pa.to_string(), "b": pb.to_string(), "adjacent": adj}))?,
                Format::Text => format!("{}\n", if adj { "adjacent" } else { "not adjacent" }),
                f => return Err(unsupported("adjacent", f)),
            }
        }
        Command::Simulate { alice, n, samples, seed, tail_from, config } => {
            let mut cfg = match config {
                Some(p) => std::fs::read_to_string(p)?.parse::<ExperimentConfig>()?,
                None => ExperimentConfig::default(),
            };
            if let Some(a) = alice {
                cfg.strategy = a.clone();
            }
            if let Some(n) = n {
                cfg.n_targets = n.clone();
                cfg.checkpoints = n.clone();
            }
            if let Some(s) = samples {
                cfg.samples = *s;
            }
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            if tail_from.is_some() {
                cfg.tail_from = *tail_from;
            }
            let stats = harness::monte_carlo(&cfg, workers)?;
            if let Some(p) = &cfg.out_csv {
                std::fs::write(p, stats.to_csv())?;
            }
            if let Some(p) = &cfg.out_json {
                std::fs::write(p, pretty(&stats)?)?;
            }
            match fmt.unwrap_or(Format::Csv) {
                Format::Csv => stats.to_csv(),
                Format::Json => pretty(&stats)?,
                Format::Text => {
                    let mut s = format!("strategy {} ({} games, seed {})\n", stats.strategy, stats.samples(), cfg.seed);
                    for (n, t) in &stats.targets {
                        let (lo, hi) = t.connected_ci(0.95);
                        let _ = writeln!(
                            s,
                            "  n = {n:>5}: connected {:.4} [{lo:.4}, {hi:.4}], mean Y {:.4}, mean T {:.4}",
                            t.connected_freq(),
                            t.mean_y(),
                            t.mean_t()
                        );
                    }
                    let _ = writeln!(s, "  max degree {}, late isolations {}", stats.checks.max_degree, stats.late_isolation_games);
                    s
                }
                f => return Err(unsupported("simulate", f)),
            }
        }
        Command::Play { alice, n, seed, checkpoints } => {
            let mut strat = StrategyRegistry::default().build(alice)?;
            let traj = run_game(strat.as_mut(), BobPolicy::Uniform, *n, *seed, checkpoints)?;
            match fmt.unwrap_or(Format::Json) {
                Format::Json => pretty(&TrajectoryJson::from(&traj))?,
                Format::Csv => {
                    let mut s = String::from("n,S,T\n");
                    for (i, (s_, t_)) in traj.s.iter().zip(&traj.t).enumerate() {
                        let _ = writeln!(s, "{},{s_},{t_}", i + 3);
                    }
                    s
                }
                Format::Text => format!(
                    "{} to n = {}: S = {}, T = {}, isolations at {:?}\n",
                    traj.strategy,
                    traj.n_max,
                    traj.s.last().unwrap_or(&0),
                    traj.t.last().unwrap_or(&0),
                    traj.isolated_at
                ),
                f => return Err(unsupported("play", f)),
            }
        }
        Command::Census { n } => {
            let r = harness::census(*n, workers)?;
            match fmt.unwrap_or(Format::Json) {
                Format::Json => pretty(&r)?,
                Format::Csv => {
                    let mut s = String::from("degree,count\n");
                    for (d, c) in &r.degree_histogram {
                        let _ = writeln!(s, "{d},{c}");
                    }
                    s
                }
                Format::Text => format!(
                    "n = {}: {} vertices, degrees {}..{}, min degree fraction {:.4}, complete {}\n",
                    r.n, r.vertices, r.min_degree, r.max_degree, r.min_degree_fraction, r.complete
                ),
                f => return Err(unsupported("census", f)),
            }
        }
        Command::VerifyPolytope { n, samples, seed } => {
            let r = verify_adjacency_criterion(*n, samples.map(|k| (k, *seed)))?;
            let body = match fmt.unwrap_or(Format::Json) {
                Format::Json => pretty(&json!({
                    "n": r.n,
                    "vertices": r.vertices,
                    "pairs": r.pairs,
                    "adjacent_pairs": r.adjacent_pairs,
                    "disagreements": r.disagreements.len(),
                    "disagreeing_pairs": r.disagreements,
                    "bad_certificates": r.bad_certificates.len(),
                    "complete": r.complete,
                    "min_degree": r.min_degree,
                    "max_degree": r.max_degree,
                }))?,
                Format::Text => format!(
                    "n = {}: {} pairs, {} adjacent, {} disagreements, {} bad certificates\n",
                    r.n,
                    r.pairs,
                    r.adjacent_pairs,
                    r.disagreements.len(),
                    r.bad_certificates.len()
                ),
                f => return Err(unsupported("verify-polytope", f)),
            };
            return Ok(conformance(r.ok(), "graph and hull adjacency disagree", body));
        }
        Command::VerifyTransitions { samples, n, seed } => {
            let r = harness::transition_conformance(*samples, *n, *seed, workers)?;
            let body = match fmt.unwrap_or(Format::Json) {
                Format::Json => pretty(&r)?,
                Format::Text => {
                    let cx = &r.documented_counterexample;
                    format!(
                        "{} instances ({} c, {} d): {} strict failures, printed d-move P(0,0) bound fails {} times\n\
                         counterexample {} / {} with Alice edge {}: observed {} > printed {} (refined {})\n",
                        r.instances,
                        r.c_moves,
                        r.d_moves,
                        r.strict_failures.len(),
                        r.printed_bound_failures,
                        cx.alice,
                        cx.bob,
                        cx.alice_edge,
                        cx.observed,
                        cx.printed_bound,
                        cx.refined_bound
                    )
                }
                f => return Err(unsupported("verify-transitions", f)),
            };
            return Ok(conformance(r.strict_ok(), "strict transition entry violated", body));
        }
        Command::VerifyAttachment { samples, n, seed } => {
            let r = harness::attachment_conformance(*samples, *n, *seed, workers)?;
            let body = match fmt.unwrap_or(Format::Json) {
                Format::Json => pretty(&r)?,
                Format::Text => format!("{} states, {} failures\n", r.states, r.failures.len()),
                f => return Err(unsupported("verify-attachment", f)),
            };
            return Ok(conformance(r.failures.is_empty(), "component maximum not attachable", body));
        }
        Command::Dmoves { alice, n, samples, seed } => {
            let r = harness::dmove_experiment(alice, *n, *samples, *seed, workers)?;
            let body = match fmt.unwrap_or(Format::Json) {
                Format::Json => pretty(&r)?,
                Format::Text => format!(
                    "{}: {} of {} games qualify, {} below {} d-moves (min {:?})\n",
                    r.strategy, r.qualifying, r.games, r.failures, r.threshold, r.min_dmoves
                ),
                f => return Err(unsupported("dmoves", f)),
            };
            return Ok(conformance(r.failures == 0, "too few d-moves", body));
        }
        Command::TDecrease { alice, n, samples, enriched_samples, enrich_from, seed } => {
            let r = harness::t_decrease_experiment(alice, *n, *samples, *enriched_samples, *enrich_from, *seed, workers)?;
            let body = match fmt.unwrap_or(Format::Json) {
                Format::Json => pretty(&r)?,
                Format::Text => format!(
                    "natural: {}/{} qualifying games merged; enriched: {}/{}\n",
                    r.natural.decreased, r.natural.qualifying, r.enriched.decreased, r.enriched.qualifying
                ),
                f => return Err(unsupported("t-decrease", f)),
            };
            return Ok(conformance(r.passes(), "merge frequency below bound", body));
        }
        Command::Example => example(fmt.unwrap_or(Format::Text))?,
        Command::Enumerate { n } => {
            let peds = Pedigree::enumerate(*n)?;
            list(peds, fmt.unwrap_or(Format::Text), "enumerate")?
        }
        Command::Sample { n, samples, seed } => {
            let mut rng = game_rngs(*seed).1;
            let peds: Vec<Pedigree> =
                (0..*samples).map(|_| Pedigree::sample_uniform(*n, &mut rng)).collect::<Result<_, _>>()?;
            list(peds.into_iter(), fmt.unwrap_or(Format::Text), "sample")?
        }
        Command::Schema => match fmt.unwrap_or(Format::Json) {
            Format::Json => pretty(&schemas())?,
            f => return Err(unsupported("schema", f)),
        },
    };
    Ok(Ok(text))
}

fn list(peds: impl Iterator<Item = Pedigree>, fmt: Format, cmd: &str) -> Result<String, PedError> {
    match fmt {
        Format::Text => Ok(peds.map(|p| p.to_string() + "\n").collect()),
        Format::Json => pretty(&peds.map(|p| PedigreeJson::from(&p)).collect::<Vec<_>>()),
        Format::Csv => {
            let mut s = String::from("pedigree,cycle\n");
            for p in peds {
                let c = p.to_cycle();
                let _ = writeln!(s, "\"{p}\",{}", c.order().iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
            }
            Ok(s)
        }
        f => Err(unsupported(cmd, f)),
    }
}

fn example(fmt: Format) -> Result<String, PedError> {
    let a: Pedigree = EXAMPLE_A.parse()?;
    let b: Pedigree = EXAMPLE_B.parse()?;
    let mut st = GameState::initial();
    let mut rounds = Vec::new();
    let mut s = format!("A = {a}\nB = {b}\n");
    for (pa, pb) in a.to_pairs().into_iter().zip(b.to_pairs()) {
        let out = st.advance(pa, pb)?;
        let tags: Vec<String> = out.edges.edges().iter().map(|e| format!("{}{{{},{}}}", e.tag, e.hi, e.lo)).collect();
        let _ = writeln!(
            s,
            "time {:>2}: A inserts into {pa}, B into {pb}; {}{}",
            out.node,
            if !out.vertex_added {
                "not a vertex".to_string()
            } else if out.isolated() {
                "vertex, isolated (no rule fires)".to_string()
            } else {
                format!("vertex, edges {}", tags.join(" "))
            },
            if out.delta_t != 0 { format!("; components {:+}", out.delta_t) } else { String::new() }
        );
        rounds.push(json!({
            "time": out.node,
            "alice_edge": pa.to_string(),
            "bob_edge": pb.to_string(),
            "vertex": out.vertex_added,
            "isolated": out.isolated(),
            "edges": tags,
        }));
    }
    let g = st.graph();
    let _ = writeln!(s, "final: vertices {:?}, {}", g.vertices().collect::<Vec<_>>(), if g.is_connected() { "connected" } else { "not connected" });
    match fmt {
        Format::Text => Ok(s),
        Format::Json => pretty(&json!({"a": EXAMPLE_A, "b": EXAMPLE_B, "rounds": rounds, "graph": GraphJson::from(g)})),
        f => Err(unsupported("example", f)),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), PedError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors are domain errors here; 2 is reserved for failed checks.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(&cli).and_then(|o| match o {
        Ok(text) => emit(&cli.out, &text),
        Err((text, e)) => {
            emit(&cli.out, &text)?;
            Err(e)
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = match &e {
                PedError::Graph(GraphError::IdenticalPedigree) => "identical pedigree".to_string(),
                other => other.to_string(),
            };
            eprintln!("ped: {msg}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

