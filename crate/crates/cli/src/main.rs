//! Command-line front end: generate graphs, load them into table files,
//! build segment indexes, run queries, and sweep benchmarks to CSV.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use femgraph::graph::{read_edge_list, write_edge_list, INSEGS_FILE, OUTSEGS_FILE};
use femgraph::search;
use femgraph::segtable::{build_insegs, build_outsegs, SegBuildStats};
use femgraph::testkit::{gen_graph, node_ids, sample_queries, GenSpec, GraphKind};
use femgraph::{Algorithm, Cost, GraphDb, SegTable, SegTablePair, Session};

#[derive(Parser)]
#[command(
    name = "femgraph",
    version,
    about = "Shortest-path discovery over table-backed graphs"
)]
struct Cli {
    /// Buffer pool budget in pages.
    #[arg(long, global = true, env = "FEMGRAPH_BUFFER_PAGES")]
    buffer_pages: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Random,
    Power,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic weighted edge list.
    Gen {
        #[arg(long, value_enum, default_value = "random")]
        kind: KindArg,
        /// Number of nodes.
        #[arg(long)]
        n: u64,
        /// Average out-degree.
        #[arg(long, default_value_t = 3)]
        deg: u64,
        /// Smallest edge weight.
        #[arg(long, default_value_t = 1)]
        w_lo: u64,
        /// Largest edge weight.
        #[arg(long, default_value_t = 100)]
        w_hi: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output edge-list file.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Load a text edge list into a graph directory of table files.
    Load {
        /// Input edge-list file (`fid tid cost` per line).
        edge_list: PathBuf,
        /// Target graph directory.
        db: PathBuf,
    },
    /// Build and persist the segment index for a loaded graph.
    BuildSeg {
        db: PathBuf,
        /// Index threshold: pairs within this distance become segments.
        #[arg(long)]
        lthd: u64,
    },
    /// Run one shortest-path query.
    Query {
        db: PathBuf,
        /// Algorithm: dj, bdj, bsdj, bbfs, or bseg.
        #[arg(long)]
        algo: String,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        t: u64,
        /// For bseg: require the built index to have this threshold.
        #[arg(long)]
        lthd: Option<u64>,
        /// Disable candidate pruning (bsdj and bseg only).
        #[arg(long)]
        no_prune: bool,
        /// Print the recovered path edge by edge.
        #[arg(long)]
        show_path: bool,
    },
    /// Run a query workload across algorithms and write a CSV of results.
    Bench {
        db: PathBuf,
        /// Comma-separated algorithms to run.
        #[arg(long, default_value = "dj,bdj,bsdj,bbfs,bseg")]
        algos: String,
        /// Number of sampled queries.
        #[arg(long, default_value_t = 20)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated bseg thresholds; defaults to five minimum
        /// weights. Built in memory per run, no persisted index needed.
        #[arg(long)]
        lthd: Option<String>,
        /// Comma-separated buffer budgets; replays the workload per
        /// budget.
        #[arg(long)]
        buffers: Option<String>,
        /// CSV output file; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    let session = match cli.buffer_pages {
        Some(pages) => Session::new(pages),
        None => Session::with_default_buffer(),
    };
    match cli.command {
        Command::Gen {
            kind,
            n,
            deg,
            w_lo,
            w_hi,
            seed,
            out,
        } => cmd_gen(kind, n, deg, (w_lo, w_hi), seed, &out),
        Command::Load { edge_list, db } => cmd_load(&session, &edge_list, &db),
        Command::BuildSeg { db, lthd } => cmd_build_seg(&session, &db, lthd),
        Command::Query {
            db,
            algo,
            s,
            t,
            lthd,
            no_prune,
            show_path,
        } => cmd_query(&session, &db, &algo, s, t, lthd, no_prune, show_path),
        Command::Bench {
            db,
            algos,
            queries,
            seed,
            lthd,
            buffers,
            out,
        } => cmd_bench(
            &session,
            &db,
            &algos,
            queries,
            seed,
            lthd.as_deref(),
            buffers.as_deref(),
            out.as_deref(),
        ),
    }
}

fn cmd_gen(
    kind: KindArg,
    n: u64,
    deg: u64,
    weights: (u64, u64),
    seed: u64,
    out: &Path,
) -> anyhow::Result<u8> {
    let spec = GenSpec {
        kind: match kind {
            KindArg::Random => GraphKind::Random,
            KindArg::Power => GraphKind::Power,
        },
        n,
        avg_degree: deg,
        weight_range: weights,
        seed,
    };
    let edges = gen_graph(&spec)?;
    write_edge_list(out, &edges)?;
    let w_min = edges.iter().map(|e| e.cost).min().unwrap_or(Cost::ZERO);
    println!(
        "wrote {}: {} nodes, {} edges, min weight {}",
        out.display(),
        node_ids(&edges).len(),
        edges.len(),
        w_min
    );
    Ok(0)
}

fn cmd_load(session: &Session, edge_list: &Path, db: &Path) -> anyhow::Result<u8> {
    let edges = read_edge_list(edge_list)?;
    let graph = GraphDb::create(session, db, &edges)?;
    let stats = graph.stats();
    println!(
        "loaded {}: n={} m={} w_min={}",
        db.display(),
        stats.n,
        stats.m,
        stats.w_min
    );
    Ok(0)
}

fn print_build(label: &str, stats: &SegBuildStats) {
    println!(
        "{label}: {} segments, {} passes, {} ms, {} pages, threshold {}",
        stats.segment_count,
        stats.build_iterations,
        stats.build_time.as_millis(),
        stats.index_pages,
        stats.l_thd
    );
}

fn cmd_build_seg(session: &Session, db: &Path, lthd: u64) -> anyhow::Result<u8> {
    let graph = GraphDb::open(session, db)?;
    let l_thd = Cost::new(lthd);
    let (_, out_stats) = build_outsegs(session, &graph, l_thd, Some(&db.join(OUTSEGS_FILE)))?;
    print_build("outgoing", &out_stats);
    let (_, in_stats) = build_insegs(session, &graph, l_thd, Some(&db.join(INSEGS_FILE)))?;
    print_build("incoming", &in_stats);
    Ok(0)
}

fn load_pair(session: &Session, db: &Path) -> anyhow::Result<SegTablePair> {
    let out_path = db.join(OUTSEGS_FILE);
    let in_path = db.join(INSEGS_FILE);
    if !out_path.exists() || !in_path.exists() {
        bail!(
            "no segment index in {} — run build-seg first",
            db.display()
        );
    }
    let out = SegTable::open(session, &out_path)?;
    let inc = SegTable::open(session, &in_path)?;
    Ok(SegTablePair::new(out, inc)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_query(
    session: &Session,
    db: &Path,
    algo: &str,
    s: u64,
    t: u64,
    lthd: Option<u64>,
    no_prune: bool,
    show_path: bool,
) -> anyhow::Result<u8> {
    let algo = Algorithm::from_label(algo, !no_prune)
        .with_context(|| format!("unknown algorithm {algo:?}"))?;
    let graph = GraphDb::open(session, db)?;
    let pair = if matches!(algo, Algorithm::Segment { .. }) {
        let pair = load_pair(session, db)?;
        if let Some(want) = lthd {
            if pair.l_thd() != Cost::new(want) {
                bail!(
                    "built index has threshold {}, query asked for {want}",
                    pair.l_thd()
                );
            }
        }
        Some(pair)
    } else {
        None
    };

    let result = search::run(session, &graph, pair.as_ref(), algo, s, t)?;
    if result.found {
        println!("distance {} in {} edges", result.distance, result.edge_count());
    } else {
        println!("no path from {s} to {t}");
    }
    if show_path {
        for e in &result.edges {
            println!("{} -> {} ({})", e.fid, e.tid, e.cost);
        }
    }
    let st = &result.stats;
    println!(
        "expansions={} found_at={} visited={} page_reads={} wall_time_ms={}",
        st.expansions,
        st.found_at,
        st.visited,
        st.page_reads,
        st.wall_time.as_millis()
    );
    Ok(if result.found { 0 } else { 1 })
}

fn parse_list(text: &str, what: &str) -> anyhow::Result<Vec<u64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .with_context(|| format!("bad {what} value {tok:?}"))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    base_session: &Session,
    db: &Path,
    algos: &str,
    query_count: usize,
    seed: u64,
    lthd: Option<&str>,
    buffers: Option<&str>,
    out: Option<&Path>,
) -> anyhow::Result<u8> {
    let labels: Vec<&str> = algos.split(',').map(str::trim).collect();
    for label in &labels {
        if Algorithm::from_label(label, true).is_none() {
            bail!("unknown algorithm {label:?}");
        }
    }
    let budgets: Vec<Option<usize>> = match buffers {
        Some(list) => parse_list(list, "buffer")?
            .into_iter()
            .map(|b| Some(b as usize))
            .collect(),
        None => vec![None],
    };
    let graph_id = db
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| db.display().to_string());

    let mut writer: csv::Writer<Box<dyn Write>> = csv::Writer::from_writer(match out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| p.display().to_string())?),
        None => Box::new(std::io::stdout()),
    });
    writer.write_record([
        "graph_id",
        "algorithm",
        "lthd",
        "s",
        "t",
        "distance",
        "expansions",
        "visited",
        "page_reads",
        "wall_time_ms",
    ])?;

    // (algorithm, lthd, budget) -> (runs, expansions, visited, page_reads)
    let mut sums: BTreeMap<(String, Option<u64>, Option<usize>), (u64, u64, u64, u64)> =
        BTreeMap::new();

    for &budget in &budgets {
        let session = match budget {
            Some(pages) => Session::new(pages),
            None => base_session.clone(),
        };
        let graph = GraphDb::open(&session, db)?;
        let edges = graph.edge_list()?;
        let queries = sample_queries(&edges, query_count, seed);
        let w_min = graph.stats().w_min;
        let thresholds: Vec<u64> = match lthd {
            Some(list) => parse_list(list, "lthd")?,
            None => vec![5 * w_min.raw()],
        };

        for label in &labels {
            let is_seg = *label == "bseg";
            let threshold_runs: Vec<Option<u64>> = if is_seg {
                thresholds.iter().copied().map(Some).collect()
            } else {
                vec![None]
            };
            for lthd in threshold_runs {
                let pair = match lthd {
                    Some(raw) => {
                        let l = Cost::new(raw);
                        let (o, _) = build_outsegs(&session, &graph, l, None)?;
                        let (i, _) = build_insegs(&session, &graph, l, None)?;
                        Some(SegTablePair::new(o, i)?)
                    }
                    None => None,
                };
                let algo = Algorithm::from_label(label, true).expect("labels validated above");
                for &(s, t) in &queries {
                    session.reset_io_stats();
                    let r = search::run(&session, &graph, pair.as_ref(), algo, s, t)?;
                    writer.write_record([
                        graph_id.clone(),
                        (*label).to_string(),
                        lthd.map(|v| v.to_string()).unwrap_or_default(),
                        s.to_string(),
                        t.to_string(),
                        r.distance.to_string(),
                        r.stats.expansions.to_string(),
                        r.stats.visited.to_string(),
                        r.stats.page_reads.to_string(),
                        r.stats.wall_time.as_millis().to_string(),
                    ])?;
                    let entry = sums
                        .entry(((*label).to_string(), lthd, budget))
                        .or_insert((0, 0, 0, 0));
                    entry.0 += 1;
                    entry.1 += r.stats.expansions;
                    entry.2 += r.stats.visited;
                    entry.3 += r.stats.page_reads;
                }
            }
        }
    }
    writer.flush()?;

    for ((label, lthd, budget), (runs, exp, vis, reads)) in &sums {
        let runs = (*runs).max(1);
        eprintln!(
            "{label}{} buffers={}: mean expansions {:.1}, mean visited {:.1}, mean page_reads {:.1}",
            lthd.map(|v| format!("({v})")).unwrap_or_default(),
            budget.map(|b| b.to_string()).unwrap_or_else(|| "default".into()),
            *exp as f64 / runs as f64,
            *vis as f64 / runs as f64,
            *reads as f64 / runs as f64,
        );
    }
    Ok(0)
}
