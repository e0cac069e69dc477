//! Shortest-segment index: precomputed short paths plus residual edges.
//!
//! For a threshold `l_thd`, the index stores one tuple `(fid, tid, pid,
//! cost)` per ordered node pair whose shortest distance is at most the
//! threshold — `cost` is that exact distance — and keeps every original
//! edge whose endpoints are further apart than the threshold as a residual
//! tuple. Searching over this relation instead of the raw edge table
//! crosses up to `l_thd` of distance per hop, cutting the number of
//! expansion rounds; the stored `pid` (the segment-internal neighbor of one
//! endpoint) lets a found segment-level path be unrolled back into original
//! edges.
//!
//! The index exists in two orientations: outgoing (clustered on `fid`, pid
//! is the predecessor of `tid` inside the segment) for forward expansion,
//! and incoming (clustered on `tid`, pid is the successor of `fid`) for
//! backward expansion. Building the incoming side is the outgoing build run
//! on the transposed adjacency.

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::GraphDb;
use crate::storage::{Row, Schema, Session, Table, SEG_MAGIC};
use crate::testkit::oracle_apsp;
use crate::types::{Cost, EdgeTuple, NodeId};

/// Which expansion direction a segment table serves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegOrientation {
    /// Clustered on the segment source; answers "where can I go from u".
    Out,
    /// Clustered on the segment target; answers "who can reach v".
    In,
}

/// Facts about one index construction run.
#[derive(Clone, Copy, Debug)]
pub struct SegBuildStats {
    pub l_thd: Cost,
    /// Number of precomputed-shortest-segment tuples (residuals excluded).
    pub segment_count: u64,
    /// Passes of the bounded multi-source sweep (step 1 only; the residual
    /// merge is a single statement).
    pub build_iterations: u64,
    pub build_time: Duration,
    /// Data pages of the finished table.
    pub index_pages: u64,
}

/// One orientation of the segment index.
pub struct SegTable {
    table: Table,
    orientation: SegOrientation,
    l_thd: Cost,
}

fn seg_schema() -> Schema {
    Schema::new(&["fid", "tid", "pid", "cost"]).expect("segment schema is statically valid")
}

fn key_names(orientation: SegOrientation) -> [&'static str; 2] {
    match orientation {
        SegOrientation::Out => ["fid", "tid"],
        SegOrientation::In => ["tid", "fid"],
    }
}

impl SegTable {
    pub fn orientation(&self) -> SegOrientation {
        self.orientation
    }

    pub fn l_thd(&self) -> Cost {
        self.l_thd
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn row_count(&self) -> u64 {
        self.table.row_count()
    }

    /// Number of precomputed segments (tuples with cost within threshold).
    pub fn segment_count(&self) -> Result<u64> {
        let mut count = 0;
        let l = self.l_thd;
        self.table.for_each(|r| {
            if Cost::from_raw(r.get(3)) <= l {
                count += 1;
            }
        })?;
        Ok(count)
    }

    /// Opens a persisted segment table; the threshold comes from the file
    /// header and the orientation from its clustered key.
    pub fn open(session: &Session, path: &Path) -> Result<SegTable> {
        let table = session.open_table(path, SEG_MAGIC)?;
        let orientation = match table.key_fields() {
            [0, 1] => SegOrientation::Out,
            [1, 0] => SegOrientation::In,
            other => {
                return Err(Error::corrupt(format!(
                    "segment table has unexpected clustered key {other:?}"
                )))
            }
        };
        if table.schema().fields() != seg_schema().fields() {
            return Err(Error::corrupt("segment table has unexpected schema"));
        }
        Ok(SegTable {
            l_thd: Cost::from_raw(table.user_meta()),
            table,
            orientation,
        })
    }

    /// Builds a table from raw `(fid, tid, pid, cost)` rows, e.g. a text
    /// re-import. Rows may arrive in any order.
    pub fn from_rows(
        session: &Session,
        mut rows: Vec<[u64; 4]>,
        l_thd: Cost,
        orientation: SegOrientation,
        path: Option<&Path>,
    ) -> Result<SegTable> {
        match orientation {
            SegOrientation::Out => rows.sort_by_key(|r| (r[0], r[1])),
            SegOrientation::In => rows.sort_by_key(|r| (r[1], r[0])),
        }
        let mut table = make_table(session, orientation, l_thd, path)?;
        for r in &rows {
            table.insert(r)?;
        }
        if path.is_some() {
            table.flush()?;
        }
        Ok(SegTable {
            table,
            orientation,
            l_thd,
        })
    }

    /// The stored tuple for the ordered pair `(u, v)`, if any.
    pub fn get(&self, u: NodeId, v: NodeId) -> Result<Option<(NodeId, Cost)>> {
        let key = match self.orientation {
            SegOrientation::Out => [u, v],
            SegOrientation::In => [v, u],
        };
        let rows = self.table.lookup(&key)?;
        Ok(rows.first().map(|r| (r[2], Cost::from_raw(r[3]))))
    }

    /// Unrolls the stored segment `u -> v` into original-graph edges, in
    /// path order. A residual tuple yields its single edge. Walking follows
    /// the pid chain; a chain that fails to close within `hop_limit` steps
    /// means the index is corrupt.
    pub fn expand_segment(
        &self,
        u: NodeId,
        v: NodeId,
        hop_limit: u64,
    ) -> Result<Vec<EdgeTuple>> {
        let (_, total) = self
            .get(u, v)?
            .ok_or(Error::MissingSegment(u, v))?;
        let mut edges = Vec::new();
        match self.orientation {
            // pid chains run v -> pre(v) -> ... -> u; collect backwards.
            SegOrientation::Out => {
                let mut cur = v;
                let mut hops = 0u64;
                while cur != u {
                    let (pid, cost) = self
                        .get(u, cur)?
                        .ok_or(Error::MissingSegment(u, cur))?;
                    let prev_cost = if pid == u {
                        Cost::ZERO
                    } else {
                        self.get(u, pid)?
                            .ok_or(Error::MissingSegment(u, pid))?
                            .1
                    };
                    let w = cost.checked_sub(prev_cost).ok_or_else(|| {
                        Error::corrupt(format!(
                            "segment costs not monotone along chain ({u} -> {cur})"
                        ))
                    })?;
                    edges.push(EdgeTuple::new(pid, cur, w.raw()));
                    cur = pid;
                    hops += 1;
                    if hops > hop_limit {
                        return Err(Error::corrupt(format!(
                            "predecessor chain from ({u}, {v}) does not close"
                        )));
                    }
                }
                edges.reverse();
            }
            // pid chains run u -> succ(u) -> ... -> v; already in order.
            SegOrientation::In => {
                let mut cur = u;
                let mut hops = 0u64;
                while cur != v {
                    let (pid, cost) = self
                        .get(cur, v)?
                        .ok_or(Error::MissingSegment(cur, v))?;
                    let next_cost = if pid == v {
                        Cost::ZERO
                    } else {
                        self.get(pid, v)?
                            .ok_or(Error::MissingSegment(pid, v))?
                            .1
                    };
                    let w = cost.checked_sub(next_cost).ok_or_else(|| {
                        Error::corrupt(format!(
                            "segment costs not monotone along chain ({cur} -> {v})"
                        ))
                    })?;
                    edges.push(EdgeTuple::new(cur, pid, w.raw()));
                    cur = pid;
                    hops += 1;
                    if hops > hop_limit {
                        return Err(Error::corrupt(format!(
                            "successor chain from ({u}, {v}) does not close"
                        )));
                    }
                }
            }
        }
        let span: Cost = edges.iter().fold(Cost::ZERO, |acc, e| acc + e.cost);
        if span != total {
            return Err(Error::corrupt(format!(
                "expanded segment ({u}, {v}) sums to {span}, stored cost is {total}"
            )));
        }
        Ok(edges)
    }

    /// Every tuple as a plain weighted edge — the segment graph G'.
    pub fn as_edge_list(&self) -> Result<Vec<EdgeTuple>> {
        let mut out = Vec::with_capacity(self.table.row_count() as usize);
        self.table
            .for_each(|r| out.push(EdgeTuple::new(r.get(0), r.get(1), r.get(3))))?;
        Ok(out)
    }

    /// Writes `fid tid pid cost` lines, the text form `read_seg_text`
    /// parses back.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        use std::io::Write;
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let mut failed = None;
        self.table.for_each(|r| {
            if failed.is_none() {
                if let Err(e) =
                    writeln!(out, "{} {} {} {}", r.get(0), r.get(1), r.get(2), r.get(3))
                {
                    failed = Some(e);
                }
            }
        })?;
        if let Some(e) = failed {
            return Err(Error::io(path, e));
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

/// Parses the `fid tid pid cost` text form; `#` lines are comments.
pub fn read_seg_text(path: &Path) -> Result<Vec<[u64; 4]>> {
    use std::io::BufRead;
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let parsed: Option<Vec<u64>> = fields.iter().map(|t| t.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 4 => rows.push([v[0], v[1], v[2], v[3]]),
            _ => {
                return Err(Error::EdgeListParse {
                    path: path.to_owned(),
                    line: idx + 1,
                    msg: format!("expected four integers, got {text:?}"),
                })
            }
        }
    }
    Ok(rows)
}

/// Both orientations of one index, as a search needs them.
pub struct SegTablePair {
    pub out: SegTable,
    pub inc: SegTable,
}

impl SegTablePair {
    /// Pairs the two orientations, insisting they were built with the same
    /// threshold (mixing thresholds silently corrupts distances).
    pub fn new(out: SegTable, inc: SegTable) -> Result<SegTablePair> {
        if out.orientation != SegOrientation::Out || inc.orientation != SegOrientation::In {
            return Err(Error::Schema(
                "segment pair needs one outgoing and one incoming table".into(),
            ));
        }
        if out.l_thd != inc.l_thd {
            return Err(Error::ThresholdMismatch {
                out: out.l_thd.raw(),
                inc: inc.l_thd.raw(),
            });
        }
        Ok(SegTablePair { out, inc })
    }

    pub fn l_thd(&self) -> Cost {
        self.out.l_thd
    }
}

fn make_table(
    session: &Session,
    orientation: SegOrientation,
    l_thd: Cost,
    path: Option<&Path>,
) -> Result<Table> {
    let key = key_names(orientation);
    match path {
        Some(p) => session.create_table_file(p, seg_schema(), &key, true, SEG_MAGIC, l_thd.raw()),
        None => session.create_scratch_table("segs", seg_schema(), &key, true),
    }
}

/// Builds the outgoing-orientation index of `graph`.
pub fn build_outsegs(
    session: &Session,
    graph: &GraphDb,
    l_thd: Cost,
    path: Option<&Path>,
) -> Result<(SegTable, SegBuildStats)> {
    build_oriented(session, graph, l_thd, SegOrientation::Out, path)
}

/// Builds the incoming-orientation index of `graph`.
pub fn build_insegs(
    session: &Session,
    graph: &GraphDb,
    l_thd: Cost,
    path: Option<&Path>,
) -> Result<(SegTable, SegBuildStats)> {
    build_oriented(session, graph, l_thd, SegOrientation::In, path)
}

fn build_oriented(
    session: &Session,
    graph: &GraphDb,
    l_thd: Cost,
    orientation: SegOrientation,
    path: Option<&Path>,
) -> Result<(SegTable, SegBuildStats)> {
    let w_min = graph.stats().w_min;
    if !l_thd.is_finite() || l_thd < w_min {
        return Err(Error::ThresholdTooSmall {
            l_thd: l_thd.raw(),
            w_min: w_min.raw(),
        });
    }
    let start = Instant::now();

    // The incoming orientation is the outgoing build on the transposed
    // adjacency: walking edges target-to-source makes the recorded
    // "predecessor" the successor toward the target in the original graph.
    let adjacency = match orientation {
        SegOrientation::Out => graph.edges_out(),
        SegOrientation::In => graph.edges_in(),
    };
    let neighbor_of = |row: &Row| -> (NodeId, Cost) {
        match orientation {
            SegOrientation::Out => (row[1], Cost::from_raw(row[2])),
            SegOrientation::In => (row[0], Cost::from_raw(row[2])),
        }
    };

    // Step 1: bounded multi-source sweep. Every node starts as its own
    // source at distance zero; each pass expands the candidates lying
    // within k minimum-weights of their source (plus the globally minimal
    // candidate, which keeps sparse distance levels moving), admitting a
    // neighbor only while the segment stays within the threshold.
    let mut work = session.create_scratch_table(
        "segbuild",
        Schema::new(&["src", "nid", "dist", "parent", "flag"])?,
        &["src", "nid"],
        true,
    )?;
    for nid in graph.node_ids()? {
        work.insert(&[nid, nid, 0, nid, 0])?;
    }

    let mut iterations = 0u64;
    loop {
        let mut min_cand = Cost::INF;
        work.for_each(|r| {
            if r.get(4) == 0 {
                min_cand = min_cand.min(Cost::from_raw(r.get(2)));
            }
        })?;
        // Once every unexpanded candidate sits within one minimum weight of
        // the threshold, expanding it can admit nothing new — and bounded
        // candidates at this point already hold exact distances.
        if min_cand + w_min > l_thd {
            break;
        }
        iterations += 1;
        let ring = Cost::from_raw(iterations.saturating_mul(w_min.raw()));

        let mut frontier: Vec<(NodeId, NodeId, Cost)> = Vec::new();
        work.for_each(|r| {
            let d = Cost::from_raw(r.get(2));
            if r.get(4) == 0 && (d < ring || d == min_cand) {
                frontier.push((r.get(0), r.get(1), d));
            }
        })?;
        work.update_where(
            |r| {
                let d = Cost::from_raw(r.get(2));
                r.get(4) == 0 && (d < ring || d == min_cand)
            },
            |r| r[4] = 2,
        )?;

        let mut candidates: Vec<[u64; 4]> = Vec::new();
        for &(src, nid, d) in &frontier {
            for row in adjacency.lookup(&[nid])? {
                let (next, w) = neighbor_of(&row);
                let nd = d + w;
                if nd <= l_thd {
                    candidates.push([src, next, nd.raw(), nid]);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup_by_key(|c| [c[0], c[1]]);

        let source: Vec<Row> = candidates.iter().map(|c| c.to_vec()).collect();
        work.merge(
            &source,
            &[0, 1],
            |target, src| target.get(2) > src[2],
            |target, src| {
                target[2] = src[2];
                target[3] = src[3];
                target[4] = 0;
            },
            |src| vec![src[0], src[1], src[2], src[3], 0],
        )?;
        work.update_where(|r| r.get(4) == 2, |r| r[4] = 1)?;
    }

    // Emit the precomputed segments. The working table is clustered by
    // (source, node), which is exactly the output clustering for either
    // orientation, so inserts append in order.
    let mut table = make_table(session, orientation, l_thd, path)?;
    let mut pending: Vec<[u64; 4]> = Vec::new();
    work.for_each(|r| {
        let (src, nid, d, p) = (r.get(0), r.get(1), r.get(2), r.get(3));
        if src != nid {
            debug_assert!(Cost::from_raw(d) <= l_thd);
            match orientation {
                SegOrientation::Out => pending.push([src, nid, p, d]),
                SegOrientation::In => pending.push([nid, src, p, d]),
            }
        }
    })?;
    let segment_count = pending.len() as u64;
    for row in &pending {
        table.insert(row)?;
    }
    drop(work);

    // Step 2: one merge folds in the residual edges — originals whose
    // endpoints have no within-threshold segment. A recorded segment always
    // wins (its distance never exceeds the edge weight); self-loops can
    // never beat the zero-length empty path and are dropped outright.
    let all_edges = graph.edge_list()?;
    let (source, source_key): (Vec<Row>, [usize; 2]) = match orientation {
        SegOrientation::Out => (
            all_edges
                .iter()
                .filter(|e| e.fid != e.tid)
                .map(|e| vec![e.fid, e.tid, e.fid, e.cost.raw()])
                .collect(),
            [0, 1],
        ),
        SegOrientation::In => (
            all_edges
                .iter()
                .filter(|e| e.fid != e.tid)
                .map(|e| vec![e.fid, e.tid, e.tid, e.cost.raw()])
                .collect(),
            [1, 0],
        ),
    };
    table.merge(
        &source,
        &source_key,
        |_, _| false,
        |_, _| {},
        |src| src.to_vec(),
    )?;

    if path.is_some() {
        table.flush()?;
    }
    let stats = SegBuildStats {
        l_thd,
        segment_count,
        build_iterations: iterations,
        build_time: start.elapsed(),
        index_pages: table.data_pages(),
    };
    Ok((
        SegTable {
            table,
            orientation,
            l_thd,
        },
        stats,
    ))
}

/// One discrepancy between a segment table and ground truth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub fid: NodeId,
    pub tid: NodeId,
    pub what: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pair {} -> {}: {}", self.fid, self.tid, self.what)
    }
}

/// Outcome of checking a segment table against an all-pairs oracle.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checked_rows: u64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every stored tuple and every required pair against a brute-force
/// bounded all-pairs oracle over the raw edge list: recorded distances are
/// exact, pid links lie on shortest paths, every within-threshold pair is
/// present, and an original edge appears as a residual exactly when its
/// endpoints' true distance exceeds the threshold. Oracle-scale graphs
/// only.
pub fn validate_segtable(seg: &SegTable, edges: &[EdgeTuple]) -> Result<ValidationReport> {
    // An incoming-orientation table holds, for each tuple, the transposed
    // segment with pid as the successor — which is precisely the outgoing
    // convention on the transposed graph. Normalizing both to the outgoing
    // view lets one checker serve both orientations.
    let (edges_t, rows): (Vec<EdgeTuple>, Vec<[u64; 4]>) = match seg.orientation {
        SegOrientation::Out => {
            let mut rows = Vec::new();
            seg.table
                .for_each(|r| rows.push([r.get(0), r.get(1), r.get(2), r.get(3)]))?;
            (edges.to_vec(), rows)
        }
        SegOrientation::In => {
            let mut rows = Vec::new();
            seg.table
                .for_each(|r| rows.push([r.get(1), r.get(0), r.get(2), r.get(3)]))?;
            (
                edges
                    .iter()
                    .map(|e| EdgeTuple::new(e.tid, e.fid, e.cost.raw()))
                    .collect(),
                rows,
            )
        }
    };

    let l_thd = seg.l_thd;
    let apsp = oracle_apsp(&edges_t, l_thd)?;
    let weight: std::collections::HashMap<(NodeId, NodeId), Cost> = edges_t
        .iter()
        .map(|e| ((e.fid, e.tid), e.cost))
        .collect();
    let mut report = ValidationReport::default();
    let mut flag = |fid: NodeId, tid: NodeId, what: String| {
        report.violations.push(Violation { fid, tid, what });
    };

    let mut stored: std::collections::HashMap<(NodeId, NodeId), (NodeId, Cost)> =
        std::collections::HashMap::new();
    for [fid, tid, pid, cost] in rows {
        report.checked_rows += 1;
        let cost = Cost::from_raw(cost);
        stored.insert((fid, tid), (pid, cost));
        if fid == tid {
            flag(fid, tid, "self segment stored".into());
            continue;
        }
        let truth = apsp.get(&(fid, tid)).copied();
        if cost <= l_thd {
            match truth {
                None => flag(fid, tid, format!("segment cost {cost} but true distance exceeds the threshold")),
                Some(d) if d != cost => {
                    flag(fid, tid, format!("segment cost {cost} but true distance is {d}"))
                }
                Some(_) => {
                    // pid must be a real predecessor on a shortest path:
                    // an edge pid -> tid exists and closes the distance.
                    let prefix = if pid == fid {
                        Some(Cost::ZERO)
                    } else {
                        apsp.get(&(fid, pid)).copied()
                    };
                    let closes = match (prefix, weight.get(&(pid, tid))) {
                        (Some(dp), Some(&w)) => dp + w == cost,
                        _ => false,
                    };
                    if !closes {
                        flag(fid, tid, format!("pid {pid} does not lie on a shortest path"));
                    }
                }
            }
        } else {
            match weight.get(&(fid, tid)) {
                None => flag(fid, tid, "residual tuple for a non-edge".into()),
                Some(&w) if w != cost => {
                    flag(fid, tid, format!("residual cost {cost} differs from edge weight {w}"))
                }
                Some(_) => {}
            }
            if pid != fid {
                flag(fid, tid, format!("residual pid must be the source, found {pid}"));
            }
            if truth.is_some() {
                flag(fid, tid, "residual tuple for a pair within the threshold".into());
            }
        }
    }

    for (&(u, v), &d) in &apsp {
        match stored.get(&(u, v)) {
            Some(&(_, c)) if c <= l_thd => {}
            _ => flag(u, v, format!("missing segment for pair at distance {d}")),
        }
    }
    for e in &edges_t {
        if e.fid == e.tid {
            continue;
        }
        let is_far = !apsp.contains_key(&(e.fid, e.tid));
        let has_residual = matches!(stored.get(&(e.fid, e.tid)), Some(&(_, c)) if c > l_thd);
        if is_far && !has_residual {
            flag(e.fid, e.tid, "missing residual for a long edge".into());
        }
    }
    Ok(report)
}
