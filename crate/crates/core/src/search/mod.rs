//! Shortest-path drivers over the visited-node table.
//!
//! Every algorithm here is the same loop wearing different settings: select
//! a frontier from the visited table, expand it against an adjacency
//! relation, merge the candidates back. What varies is the frontier
//! criterion (single minimum, all minima, everything, or a widening
//! distance ring), whether the walk runs from one end or both, and whether
//! expansion reads original edges or precomputed segments. The drivers
//! return the distance, the reconstructed edge path, and counters that make
//! the algorithms comparable: expansion rounds, visited rows, and pages
//! read.

mod bidir;
mod dijkstra;
mod seg;

pub use bidir::{bidir_breadth, bidir_dijkstra, bidir_set_dijkstra};
pub use dijkstra::dijkstra;
pub use seg::bidir_segment;

use std::time::Duration;

use crate::error::{Error, Result};
use crate::graph::GraphDb;
use crate::relops::{visited_schema, V_D2S, V_D2T, V_NID, V_P2S, V_P2T};
use crate::segtable::SegTablePair;
use crate::storage::{IoStats, Session, Table};
use crate::types::{Cost, EdgeTuple, NodeId, NO_NODE};

/// Counters describing one search run.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchStats {
    /// Expansion rounds: how many times a frontier was pushed through the
    /// adjacency relation.
    pub expansions: u64,
    /// The expansion round in which the reported distance was first
    /// recorded; zero when no path was found. Later rounds only verify
    /// that nothing cheaper remains.
    pub found_at: u64,
    /// Rows in the visited table when the search stopped.
    pub visited: u64,
    /// Pages fetched from storage backends during the run (buffer hits
    /// excluded).
    pub page_reads: u64,
    pub wall_time: Duration,
}

/// Outcome of a shortest-path search.
#[derive(Clone, Debug)]
pub struct PathResult {
    pub found: bool,
    /// Shortest distance, or infinity when no path exists.
    pub distance: Cost,
    /// The path as original-graph edges in order from source to target;
    /// empty when no path exists or source equals target.
    pub edges: Vec<EdgeTuple>,
    pub stats: SearchStats,
}

impl PathResult {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Which search to run; the names the command line exposes map onto these.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Dijkstra,
    BidirDijkstra,
    BidirSetDijkstra { prune: bool },
    BidirBreadth,
    Segment { prune: bool },
}

impl Algorithm {
    /// Short label used in result listings.
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Dijkstra => "dj",
            Algorithm::BidirDijkstra => "bdj",
            Algorithm::BidirSetDijkstra { .. } => "bsdj",
            Algorithm::BidirBreadth => "bbfs",
            Algorithm::Segment { .. } => "bseg",
        }
    }

    /// Parses a label; `prune` applies to the variants that support it.
    pub fn from_label(label: &str, prune: bool) -> Option<Algorithm> {
        match label {
            "dj" => Some(Algorithm::Dijkstra),
            "bdj" => Some(Algorithm::BidirDijkstra),
            "bsdj" => Some(Algorithm::BidirSetDijkstra { prune }),
            "bbfs" => Some(Algorithm::BidirBreadth),
            "bseg" => Some(Algorithm::Segment { prune }),
            _ => None,
        }
    }
}

/// Runs `algo` from `s` to `t`. Segment search needs the prebuilt index
/// pair; the other algorithms ignore it.
pub fn run(
    session: &Session,
    graph: &GraphDb,
    segs: Option<&SegTablePair>,
    algo: Algorithm,
    s: NodeId,
    t: NodeId,
) -> Result<PathResult> {
    match algo {
        Algorithm::Dijkstra => dijkstra(session, graph, s, t),
        Algorithm::BidirDijkstra => bidir_dijkstra(session, graph, s, t),
        Algorithm::BidirSetDijkstra { prune } => bidir_set_dijkstra(session, graph, s, t, prune),
        Algorithm::BidirBreadth => bidir_breadth(session, graph, s, t),
        Algorithm::Segment { prune } => {
            let segs = segs.ok_or_else(|| {
                Error::Schema("segment search needs a built segment index".into())
            })?;
            bidir_segment(session, graph, segs, s, t, prune)
        }
    }
}

/// Snapshot taken at the start of a run, turned into [`SearchStats`] at
/// the end.
pub(crate) struct RunMeter {
    io_before: IoStats,
    started: std::time::Instant,
}

impl RunMeter {
    pub(crate) fn start(session: &Session) -> RunMeter {
        RunMeter {
            io_before: session.io_stats(),
            started: std::time::Instant::now(),
        }
    }

    pub(crate) fn finish(
        self,
        session: &Session,
        expansions: u64,
        found_at: u64,
        visited: u64,
    ) -> SearchStats {
        SearchStats {
            expansions,
            found_at,
            visited,
            page_reads: session.io_stats().page_reads - self.io_before.page_reads,
            wall_time: self.started.elapsed(),
        }
    }
}

pub(crate) fn check_endpoints(graph: &GraphDb, s: NodeId, t: NodeId) -> Result<()> {
    for nid in [s, t] {
        if !graph.contains_node(nid)? {
            return Err(Error::NodeNotFound(nid));
        }
    }
    Ok(())
}

/// The trivial result for a search from a node to itself.
pub(crate) fn trivial_result(session: &Session, meter: RunMeter) -> PathResult {
    PathResult {
        found: true,
        distance: Cost::ZERO,
        edges: Vec::new(),
        stats: meter.finish(session, 0, 0, 0),
    }
}

/// Creates the visited table seeded with the forward source row and, for
/// bidirectional searches, the backward source row.
pub(crate) fn init_visited(
    session: &Session,
    s: NodeId,
    t: Option<NodeId>,
) -> Result<Table> {
    let mut visited = session.create_scratch_table("visited", visited_schema(), &["nid"], true)?;
    let s_row = [s, 0, s, 0, Cost::INF.raw(), NO_NODE, 0];
    match t {
        Some(t) => {
            let t_row = [t, Cost::INF.raw(), NO_NODE, 0, 0, t, 0];
            // Insert in key order so both land with a clean append.
            if s < t {
                visited.insert(&s_row)?;
                visited.insert(&t_row)?;
            } else {
                visited.insert(&t_row)?;
                visited.insert(&s_row)?;
            }
        }
        None => visited.insert(&s_row)?,
    }
    Ok(visited)
}

/// Minimum of `d2s + d2t` over the visited table and the node attaining
/// it; ties go to the smallest node id. Infinite means the two walks have
/// not met.
pub(crate) fn min_sum(visited: &Table) -> Result<(Cost, Option<NodeId>)> {
    let mut best = Cost::INF;
    let mut node = None;
    // Scan order is ascending node id, so keeping strict improvements
    // resolves ties toward the smallest id.
    visited.for_each(|r| {
        let sum = Cost::from_raw(r.get(V_D2S)).saturating_add(Cost::from_raw(r.get(V_D2T)));
        if sum < best {
            best = sum;
            node = Some(r.get(V_NID));
        }
    })?;
    Ok((best, node))
}

fn visited_row(visited: &Table, nid: NodeId) -> Result<Vec<u64>> {
    visited
        .lookup(&[nid])?
        .into_iter()
        .next()
        .ok_or_else(|| Error::corrupt(format!("path chain references unvisited node {nid}")))
}

/// Rebuilds the edge path through `meet` from the parent chains in the
/// visited table. With a segment index, each parent hop is a segment and
/// is unrolled into its original edges. The reconstructed weights must sum
/// to `expect`, or the table is corrupt.
pub(crate) fn recover_path(
    visited: &Table,
    s: NodeId,
    t: NodeId,
    meet: NodeId,
    segs: Option<&SegTablePair>,
    expect: Cost,
    hop_limit: u64,
) -> Result<Vec<EdgeTuple>> {
    let mut edges = Vec::new();

    // Forward half: meet back to s along d2s parents, then reversed.
    let mut rev: Vec<EdgeTuple> = Vec::new();
    let mut cur = meet;
    let mut hops = 0u64;
    while cur != s {
        let row = visited_row(visited, cur)?;
        let parent = row[V_P2S];
        if parent == NO_NODE {
            return Err(Error::corrupt(format!("forward chain breaks at node {cur}")));
        }
        let prow = visited_row(visited, parent)?;
        let step = Cost::from_raw(row[V_D2S])
            .checked_sub(Cost::from_raw(prow[V_D2S]))
            .ok_or_else(|| Error::corrupt("forward chain distances not monotone"))?;
        match segs {
            Some(p) => {
                let chunk = p.out.expand_segment(parent, cur, hop_limit)?;
                rev.extend(chunk.into_iter().rev());
            }
            None => rev.push(EdgeTuple::new(parent, cur, step.raw())),
        }
        cur = parent;
        hops += 1;
        if hops > hop_limit {
            return Err(Error::corrupt("forward chain does not reach the source"));
        }
    }
    edges.extend(rev.into_iter().rev());

    // Backward half: meet forward to t along d2t parents, already in order.
    let mut cur = meet;
    let mut hops = 0u64;
    while cur != t {
        let row = visited_row(visited, cur)?;
        let next = row[V_P2T];
        if next == NO_NODE {
            return Err(Error::corrupt(format!("backward chain breaks at node {cur}")));
        }
        let nrow = visited_row(visited, next)?;
        let step = Cost::from_raw(row[V_D2T])
            .checked_sub(Cost::from_raw(nrow[V_D2T]))
            .ok_or_else(|| Error::corrupt("backward chain distances not monotone"))?;
        match segs {
            Some(p) => edges.extend(p.inc.expand_segment(cur, next, hop_limit)?),
            None => edges.push(EdgeTuple::new(cur, next, step.raw())),
        }
        cur = next;
        hops += 1;
        if hops > hop_limit {
            return Err(Error::corrupt("backward chain does not reach the target"));
        }
    }

    let total = edges.iter().fold(Cost::ZERO, |acc, e| acc + e.cost);
    if total != expect {
        return Err(Error::corrupt(format!(
            "recovered path sums to {total}, search reported {expect}"
        )));
    }
    for pair in edges.windows(2) {
        if pair[0].tid != pair[1].fid {
            return Err(Error::corrupt("recovered path is not contiguous"));
        }
    }
    if let (Some(first), Some(last)) = (edges.first(), edges.last()) {
        if first.fid != s || last.tid != t {
            return Err(Error::corrupt("recovered path endpoints are wrong"));
        }
    }
    Ok(edges)
}
