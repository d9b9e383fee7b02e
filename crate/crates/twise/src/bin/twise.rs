//! Thin command-line front end over the library. Inputs are JSON files;
//! outputs are JSON on stdout or at --json-out.
//!
//! Exit codes: 0 success, 2 counterexample-candidate found, 3 budget
//! exhausted, 4 input error.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use twise::codes::{
    brute_force_list_recover, build_phf, johnson_radius, linear_phf_bound, verify_separation,
    CodeSpec, DecodeInstance, HashMatrix, DECODE_BUDGET, SCAN_BUDGET,
};
use twise::fields::FieldSpec;
use twise::hypergraphs::{
    connected_components, find_distinguishable_subgraph, signature_of, tree_assignments_with_budget,
    weak_partition_connectivity, Hypergraph,
};
use twise::intmat::{
    build, certify_nonsingular_treepack, nonsingular_randomized, SetSystem, Verdict,
};
use twise::lab::{
    montecarlo_suite, replay_record, search_hypergraph_conjecture, search_matrix_conjecture,
    Checkpoint, HyperSearchConfig, MatrixSearchConfig, MonteCarloConfig, ResultRecord,
    SCHEMA_VERSION,
};
use twise::sieve::{replay_trace, sieve_run, SieveConfig, SieveTrace};
use twise::{graphs, Error};

#[derive(Parser)]
#[command(name = "twise", version, about = "desk-scale intersection-matrix laboratory")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main JSON output here instead of stdout.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Instance/work budget for searches and scans.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads for the search harness.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Find k edge-disjoint spanning trees of a multigraph.
    Treepack {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short)]
        k: usize,
        /// Use the exhaustive backtracking packer instead.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Exhaustive partition-connectivity check.
    Partconn {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short)]
        k: usize,
    },
    /// Hypergraph operations.
    Hyper {
        #[command(subcommand)]
        cmd: HyperCmd,
    },
    /// Intersection-matrix operations.
    Intmat {
        #[command(subcommand)]
        cmd: IntmatCmd,
    },
    /// The randomized subset sieve.
    Sieve {
        #[command(subcommand)]
        cmd: SieveCmd,
    },
    /// Reed-Solomon coding operations.
    Rs {
        #[command(subcommand)]
        cmd: RsCmd,
    },
    /// Strongly perfect hash matrices.
    Phf {
        #[command(subcommand)]
        cmd: PhfCmd,
    },
    /// Experiment harness.
    Lab {
        #[command(subcommand)]
        cmd: LabCmd,
    },
}

#[derive(Subcommand)]
enum HyperCmd {
    /// Weak partition connectivity and component count.
    Conn {
        #[arg(long)]
        hypergraph: PathBuf,
    },
    /// Enumerate tree-assignments.
    Assign {
        #[arg(long)]
        hypergraph: PathBuf,
        /// Allow arbitrary (|e|-1)-edge replacements, not just trees.
        #[arg(long)]
        all: bool,
        /// Print at most this many assignments.
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Search tree-assignments for a k-distinguishable subgraph.
    Disting {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        all: bool,
    },
}

#[derive(Subcommand)]
enum IntmatCmd {
    /// Build the matrix and dump its coordinate form.
    Build {
        #[arg(long)]
        system: PathBuf,
        /// Comma-separated 1-based set indices (defaults to all).
        #[arg(long)]
        j: Option<String>,
        #[arg(short)]
        k: usize,
    },
    /// Randomized nonsingularity check.
    Check {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        j: Option<String>,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = (1 << 31) - 1)]
        prime: u64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Tree-packing nonsingularity certificate.
    Certify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        j: Option<String>,
        #[arg(short)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum SieveCmd {
    /// Run the pipeline on a set system.
    Run {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        ell: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 8.0)]
        c: f64,
        #[arg(long, default_value_t = 64)]
        max_retries: usize,
    },
    /// Reproduce a stored trace bit-identically.
    Replay {
        #[arg(long)]
        trace: PathBuf,
    },
}

#[derive(Subcommand)]
enum RsCmd {
    /// Encode a message.
    Encode {
        #[arg(long)]
        prime: u64,
        /// Comma-separated distinct evaluation points.
        #[arg(long)]
        alpha: String,
        /// Comma-separated message coefficients (length k).
        #[arg(long)]
        message: String,
    },
    /// Brute-force list decoding around a received word.
    Listdec {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        radius: f64,
        #[arg(short)]
        k: usize,
    },
    /// Brute-force list recovery from per-coordinate lists (JSON file).
    Listrec {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        alpha: String,
        /// JSON array of arrays, one list per coordinate.
        #[arg(long)]
        lists: PathBuf,
        #[arg(long)]
        radius: f64,
        #[arg(short)]
        k: usize,
    },
    /// The Johnson radius and list bound for [n, k] over F_q.
    Johnson {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(short)]
        q: u64,
    },
}

#[derive(Subcommand)]
enum PhfCmd {
    /// Sample evaluation vectors until one certifies.
    Build {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(short)]
        t: usize,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 8)]
        attempts: usize,
    },
    /// Count separating rows for explicit columns of a stored matrix.
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        /// Comma-separated column indices.
        #[arg(long)]
        columns: String,
    },
}

#[derive(Subcommand)]
enum LabCmd {
    /// Sweep conforming set systems for singular intersection matrices.
    SearchMatrix {
        #[arg(short)]
        t: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Sweep weakly-partition-connected hypergraphs for tree-assignment
    /// witnesses.
    SearchHyper {
        #[arg(short)]
        t: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 4)]
        max_edge_size: usize,
        #[arg(long, default_value_t = 8)]
        max_edges: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Statistical acceptance cells.
    Montecarlo {
        #[arg(long, default_value_t = 400)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-execute stored records (JSONL) or a sieve trace.
    Replay {
        /// JSONL record file; every line is replayed.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Single sieve trace file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExhausted(_) => ExitCode::from(3),
                _ => ExitCode::from(4),
            }
        }
    }
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>, Error> {
    s.split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|e| Error::InvalidInput(format!("bad number {p:?}: {e}")))
        })
        .collect()
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, Error> {
    Ok(parse_u64_list(s)?.into_iter().map(|v| v as usize).collect())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn emit(global: &Global, value: &serde_json::Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    match &global.json_out {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn j_indices(s: &SetSystem, j: &Option<String>) -> Result<Vec<usize>, Error> {
    match j {
        Some(text) => parse_usize_list(text),
        None => Ok((1..=s.t).collect()),
    }
}

fn jsonl_sink(
    path: &Option<PathBuf>,
    header: serde_json::Value,
) -> Result<(Option<std::io::BufWriter<fs::File>>, serde_json::Value), Error> {
    match path {
        Some(p) => {
            let exists = p.exists();
            let file = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
            let mut w = std::io::BufWriter::new(file);
            if !exists {
                let head = ResultRecord::new("header", 0, 0, 0, header.clone(), "header", json!({}), 0);
                writeln!(w, "{}", head.to_jsonl())
                    .map_err(|e| Error::InvalidInput(e.to_string()))?;
            }
            Ok((Some(w), header))
        }
        None => Ok((None, header)),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let g = &cli.global;
    match cli.command {
        Command::Treepack { graph, k, exhaustive } => {
            let mg = graphs::MultiGraph::from_json(&fs::read_to_string(&graph).map_err(|e| {
                Error::InvalidInput(format!("{}: {e}", graph.display()))
            })?)?;
            let packing = if exhaustive {
                graphs::tree_packing_exhaustive(&mg, k)?
            } else {
                graphs::tree_packing(&mg, k)?
            };
            match packing {
                Some(p) => {
                    assert!(graphs::verify_packing(&mg, &p, k));
                    emit(g, &json!({"packing": p.trees, "k": k}))?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    emit(g, &json!({"packing": null, "k": k}))?;
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Partconn { graph, k } => {
            let mg = graphs::MultiGraph::from_json(&fs::read_to_string(&graph).map_err(|e| {
                Error::InvalidInput(format!("{}: {e}", graph.display()))
            })?)?;
            let ok = graphs::is_partition_connected(&mg, k)?;
            emit(g, &json!({"partition_connected": ok, "k": k}))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Hyper { cmd } => run_hyper(g, cmd),
        Command::Intmat { cmd } => run_intmat(g, cmd),
        Command::Sieve { cmd } => run_sieve(g, cmd),
        Command::Rs { cmd } => run_rs(g, cmd),
        Command::Phf { cmd } => run_phf(g, cmd),
        Command::Lab { cmd } => run_lab(g, cmd),
    }
}

fn run_hyper(g: &Global, cmd: HyperCmd) -> Result<ExitCode, Error> {
    match cmd {
        HyperCmd::Conn { hypergraph } => {
            let h: Hypergraph = read_json(&hypergraph)?;
            let h = Hypergraph::new(h.t, &h.edges)?;
            let conn = weak_partition_connectivity(&h)?;
            emit(
                g,
                &json!({
                    "weak_partition_connectivity": conn,
                    "components": connected_components(&h),
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        HyperCmd::Assign {
            hypergraph,
            all,
            limit,
        } => {
            let h: Hypergraph = read_json(&hypergraph)?;
            let h = Hypergraph::new(h.t, &h.edges)?;
            let budget = g.budget.unwrap_or(twise::hypergraphs::ASSIGNMENT_BUDGET);
            let mut shown = Vec::new();
            let mut count = 0u64;
            for a in tree_assignments_with_budget(&h, !all, budget)? {
                if shown.len() < limit {
                    shown.push(a);
                }
                count += 1;
            }
            emit(g, &json!({"count": count, "assignments": shown}))?;
            Ok(ExitCode::SUCCESS)
        }
        HyperCmd::Disting { hypergraph, k, all } => {
            let h: Hypergraph = read_json(&hypergraph)?;
            let h = Hypergraph::new(h.t, &h.edges)?;
            let budget = g.budget.unwrap_or(twise::hypergraphs::ASSIGNMENT_BUDGET);
            for assignment in tree_assignments_with_budget(&h, !all, budget)? {
                if let Some((subset, dec)) =
                    find_distinguishable_subgraph(&assignment, k, budget, budget)?
                {
                    let sub = assignment.subgraph(&subset);
                    let sig = signature_of(&sub, &dec)?;
                    emit(
                        g,
                        &json!({
                            "distinguishable": true,
                            "assignment": assignment,
                            "subset": subset,
                            "decomposition": dec,
                            "signature": sig,
                        }),
                    )?;
                    return Ok(ExitCode::SUCCESS);
                }
            }
            emit(g, &json!({"distinguishable": false}))?;
            Ok(ExitCode::from(2))
        }
    }
}

fn run_intmat(g: &Global, cmd: IntmatCmd) -> Result<ExitCode, Error> {
    match cmd {
        IntmatCmd::Build { system, j, k } => {
            let s: SetSystem = SetSystem::from_json(&fs::read_to_string(&system).map_err(
                |e| Error::InvalidInput(format!("{}: {e}", system.display())),
            )?)?;
            let j = j_indices(&s, &j)?;
            let m = build(&s, &j, k)?;
            emit(g, &serde_json::to_value(m.to_dump()).unwrap())?;
            Ok(ExitCode::SUCCESS)
        }
        IntmatCmd::Check {
            system,
            j,
            k,
            prime,
            trials,
        } => {
            let s: SetSystem = SetSystem::from_json(&fs::read_to_string(&system).map_err(
                |e| Error::InvalidInput(format!("{}: {e}", system.display())),
            )?)?;
            let j = j_indices(&s, &j)?;
            let m = build(&s, &j, k)?;
            let spec = FieldSpec::new(prime)?;
            let mut rng = rand::SeedableRng::seed_from_u64(g.seed);
            let verdict: Verdict =
                nonsingular_randomized(&m, spec, trials, s.n, &mut rng as &mut rand_chacha::ChaCha8Rng);
            let nonsingular = verdict.is_nonsingular();
            emit(g, &json!({"verdict": verdict, "prime": prime}))?;
            Ok(if nonsingular {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        IntmatCmd::Certify { system, j, k } => {
            let s: SetSystem = SetSystem::from_json(&fs::read_to_string(&system).map_err(
                |e| Error::InvalidInput(format!("{}: {e}", system.display())),
            )?)?;
            let j = j_indices(&s, &j)?;
            let cert = certify_nonsingular_treepack(&s, &j, k)?;
            emit(g, &serde_json::to_value(&cert).unwrap())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_sieve(g: &Global, cmd: SieveCmd) -> Result<ExitCode, Error> {
    match cmd {
        SieveCmd::Run {
            system,
            epsilon,
            delta,
            ell,
            k,
            c,
            max_retries,
        } => {
            let s: SetSystem = SetSystem::from_json(&fs::read_to_string(&system).map_err(
                |e| Error::InvalidInput(format!("{}: {e}", system.display())),
            )?)?;
            let cfg = SieveConfig {
                epsilon,
                delta,
                ell,
                k,
                c,
                max_retries,
                ..SieveConfig::default()
            };
            let trace = sieve_run(&s, &cfg, g.seed)?;
            emit(g, &serde_json::to_value(&trace).unwrap())?;
            Ok(ExitCode::SUCCESS)
        }
        SieveCmd::Replay { trace } => {
            let t: SieveTrace = read_json(&trace)?;
            let again = replay_trace(&t)?;
            emit(g, &json!({"replayed": true, "final_j": again.final_j}))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_rs(g: &Global, cmd: RsCmd) -> Result<ExitCode, Error> {
    match cmd {
        RsCmd::Encode {
            prime,
            alpha,
            message,
        } => {
            let spec = FieldSpec::new(prime)?;
            let alpha: Vec<_> = parse_u64_list(&alpha)?
                .into_iter()
                .map(|v| spec.element(v))
                .collect();
            let message: Vec<_> = parse_u64_list(&message)?
                .into_iter()
                .map(|v| spec.element(v))
                .collect();
            let code = CodeSpec::new(spec, message.len(), alpha)?;
            let cw = code.encode(&message)?;
            emit(
                g,
                &json!({"codeword": cw.iter().map(|e| e.value()).collect::<Vec<_>>()}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        RsCmd::Listdec {
            prime,
            alpha,
            y,
            radius,
            k,
        } => {
            let spec = FieldSpec::new(prime)?;
            let alpha: Vec<_> = parse_u64_list(&alpha)?
                .into_iter()
                .map(|v| spec.element(v))
                .collect();
            let y: Vec<_> = parse_u64_list(&y)?
                .into_iter()
                .map(|v| spec.element(v))
                .collect();
            let code = CodeSpec::new(spec, k, alpha)?;
            let inst = DecodeInstance::from_received(&y, radius);
            let budget = g.budget.map(|b| b as u128).unwrap_or(DECODE_BUDGET);
            let list = brute_force_list_recover(&code, &inst, budget)?;
            emit_list(g, &list)
        }
        RsCmd::Listrec {
            prime,
            alpha,
            lists,
            radius,
            k,
        } => {
            let spec = FieldSpec::new(prime)?;
            let alpha: Vec<_> = parse_u64_list(&alpha)?
                .into_iter()
                .map(|v| spec.element(v))
                .collect();
            let raw: Vec<Vec<u64>> = read_json(&lists)?;
            let code = CodeSpec::new(spec, k, alpha)?;
            let inst = DecodeInstance {
                lists: raw
                    .into_iter()
                    .map(|l| l.into_iter().map(|v| spec.element(v)).collect())
                    .collect(),
                radius,
            };
            let budget = g.budget.map(|b| b as u128).unwrap_or(DECODE_BUDGET);
            let list = brute_force_list_recover(&code, &inst, budget)?;
            emit_list(g, &list)
        }
        RsCmd::Johnson { n, k, q } => {
            let (radius, bound) = johnson_radius(n, k, q);
            emit(g, &json!({"radius": radius, "list_bound": bound}))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit_list(g: &Global, list: &[Vec<twise::FieldElement>]) -> Result<ExitCode, Error> {
    let as_ints: Vec<Vec<u64>> = list
        .iter()
        .map(|m| m.iter().map(|e| e.value()).collect())
        .collect();
    emit(g, &json!({"count": as_ints.len(), "messages": as_ints}))?;
    Ok(ExitCode::SUCCESS)
}

fn run_phf(g: &Global, cmd: PhfCmd) -> Result<ExitCode, Error> {
    match cmd {
        PhfCmd::Build {
            n,
            k,
            t,
            prime,
            attempts,
        } => {
            let spec = FieldSpec::new(prime)?;
            let mut rng: rand_chacha::ChaCha8Rng = rand::SeedableRng::seed_from_u64(g.seed);
            let budget = g.budget.map(|b| b as u128).unwrap_or(SCAN_BUDGET);
            let out = build_phf(spec, n, k, t, attempts, budget, &mut rng)?;
            let certified = out.matrix.is_some();
            emit(
                g,
                &json!({
                    "certified": certified,
                    "threshold": linear_phf_bound(n, k, t)?,
                    "matrix": out.matrix,
                    "failures": out.failures,
                    "seed": g.seed,
                    "attempts": attempts,
                }),
            )?;
            Ok(if certified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        PhfCmd::Verify { matrix, columns } => {
            let m: HashMatrix = read_json(&matrix)?;
            let cols: Vec<u128> = parse_u64_list(&columns)?
                .into_iter()
                .map(|v| v as u128)
                .collect();
            let count = verify_separation(&m.code, &cols)?;
            emit(
                g,
                &json!({"separating_rows": count, "threshold": m.threshold}),
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_lab(g: &Global, cmd: LabCmd) -> Result<ExitCode, Error> {
    match cmd {
        LabCmd::SearchMatrix {
            t,
            k,
            n_max,
            out,
            checkpoint,
        } => {
            let mut cfg = MatrixSearchConfig {
                t,
                k,
                n_max,
                seed: g.seed,
                threads: g.threads,
                ..MatrixSearchConfig::default()
            };
            if let Some(b) = g.budget {
                cfg.budget = b;
            }
            if let Some(cp) = &checkpoint {
                if cp.exists() {
                    let c: Checkpoint = read_json(cp)?;
                    cfg.start_cursor = c.next_cursor;
                }
            }
            let (mut sink, _) = jsonl_sink(&out, serde_json::to_value(&cfg).unwrap())?;
            let summary = search_matrix_conjecture(&cfg, &mut |r| {
                if let Some(w) = sink.as_mut() {
                    writeln!(w, "{}", r.to_jsonl())
                        .map_err(|e| Error::InvalidInput(e.to_string()))?;
                } else {
                    println!("{}", r.to_jsonl());
                }
                Ok(())
            })?;
            if let Some(cp) = &checkpoint {
                let c = Checkpoint {
                    schema: SCHEMA_VERSION.into(),
                    experiment: "matrix-search".into(),
                    next_cursor: summary.next_cursor,
                };
                fs::write(cp, serde_json::to_string_pretty(&c).unwrap())
                    .map_err(|e| Error::InvalidInput(e.to_string()))?;
            }
            emit(g, &serde_json::to_value(&summary).unwrap())?;
            Ok(if summary.candidates > 0 {
                ExitCode::from(2)
            } else if !summary.exhausted {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        LabCmd::SearchHyper {
            t,
            k,
            c,
            max_edge_size,
            max_edges,
            out,
            checkpoint,
        } => {
            let mut cfg = HyperSearchConfig {
                t,
                k,
                c,
                max_edge_size,
                max_edges,
                seed: g.seed,
                threads: g.threads,
                ..HyperSearchConfig::default()
            };
            if let Some(b) = g.budget {
                cfg.budget = b;
            }
            if let Some(cp) = &checkpoint {
                if cp.exists() {
                    let chk: Checkpoint = read_json(cp)?;
                    cfg.start_cursor = chk.next_cursor;
                }
            }
            let (mut sink, _) = jsonl_sink(&out, serde_json::to_value(&cfg).unwrap())?;
            let summary = search_hypergraph_conjecture(&cfg, &mut |r| {
                if let Some(w) = sink.as_mut() {
                    writeln!(w, "{}", r.to_jsonl())
                        .map_err(|e| Error::InvalidInput(e.to_string()))?;
                } else {
                    println!("{}", r.to_jsonl());
                }
                Ok(())
            })?;
            if let Some(cp) = &checkpoint {
                let chk = Checkpoint {
                    schema: SCHEMA_VERSION.into(),
                    experiment: "hyper-search".into(),
                    next_cursor: summary.next_cursor,
                };
                fs::write(cp, serde_json::to_string_pretty(&chk).unwrap())
                    .map_err(|e| Error::InvalidInput(e.to_string()))?;
            }
            emit(g, &serde_json::to_value(&summary).unwrap())?;
            Ok(if summary.candidates > 0 {
                ExitCode::from(2)
            } else if !summary.exhausted {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        LabCmd::Montecarlo { trials, out } => {
            let cfg = MonteCarloConfig {
                trials,
                seed: g.seed,
                ..MonteCarloConfig::default()
            };
            let (mut sink, _) = jsonl_sink(&out, serde_json::to_value(&cfg).unwrap())?;
            let summary = montecarlo_suite(&cfg, &mut |r| {
                if let Some(w) = sink.as_mut() {
                    writeln!(w, "{}", r.to_jsonl())
                        .map_err(|e| Error::InvalidInput(e.to_string()))?;
                }
                Ok(())
            })?;
            for cell in &summary.cells {
                println!(
                    "{}: {} (observed {:.4}, bound {:.4}) {}",
                    cell.name,
                    if cell.pass { "PASS" } else { "FAIL" },
                    cell.observed,
                    cell.bound,
                    cell.detail
                );
            }
            emit(g, &serde_json::to_value(&summary).unwrap())?;
            Ok(if summary.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        LabCmd::Replay { records, trace } => {
            if let Some(path) = trace {
                let t: SieveTrace = read_json(&path)?;
                replay_trace(&t)?;
                emit(g, &json!({"replayed": true}))?;
                return Ok(ExitCode::SUCCESS);
            }
            let Some(path) = records else {
                return Err(Error::InvalidInput(
                    "provide --records or --trace".into(),
                ));
            };
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            let mut outcomes = Vec::new();
            let mut all_match = true;
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                let record = ResultRecord::from_jsonl(line)?;
                if record.experiment == "header" {
                    record.verify()?;
                    continue;
                }
                let out = replay_record(&record)?;
                all_match &= out.matches;
                outcomes.push(out);
            }
            emit(g, &serde_json::to_value(&outcomes).unwrap())?;
            Ok(if all_match {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}
