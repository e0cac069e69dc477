//! On-disk graph databases.
//!
//! A graph lives in a directory of three table files: a node table and the
//! same edge set twice — once clustered on the source node for forward
//! expansion and once clustered on the target node for backward expansion.
//! Both orientations exist because a bidirectional search walks incoming
//! edges with the same page locality it gets for outgoing ones.
//!
//! Edge lists interchange as plain text: one `fid tid cost` triple per
//! line, decimal integers separated by whitespace, `#` starting a comment
//! line. Duplicate `(fid, tid)` pairs collapse to their minimum cost at
//! load time, so the stored relation always has unique edge keys.

use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::storage::{Schema, Session, Table, TABLE_MAGIC};
use crate::types::{Cost, EdgeTuple, GraphStats, NodeId};

const NODES_FILE: &str = "nodes.femt";
const EDGES_OUT_FILE: &str = "edges_out.femt";
const EDGES_IN_FILE: &str = "edges_in.femt";

/// File name of the forward segment index inside a graph directory.
pub const OUTSEGS_FILE: &str = "outsegs.femt";
/// File name of the backward segment index inside a graph directory.
pub const INSEGS_FILE: &str = "insegs.femt";

/// A graph directory opened through one storage session.
pub struct GraphDb {
    dir: PathBuf,
    nodes: Table,
    edges_out: Table,
    edges_in: Table,
    stats: GraphStats,
}

impl GraphDb {
    /// Materializes `edges` into a fresh graph directory (created if
    /// missing, tables truncated if present) and flushes everything.
    pub fn create(session: &Session, dir: &Path, edges: &[EdgeTuple]) -> Result<GraphDb> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let w_min = edges.iter().map(|e| e.cost).min().unwrap_or(Cost::ZERO);

        let mut nodes = session.create_table_file(
            &dir.join(NODES_FILE),
            Schema::new(&["nid"])?,
            &["nid"],
            true,
            TABLE_MAGIC,
            0,
        )?;
        for &nid in &crate::testkit::node_ids(edges) {
            nodes.insert(&[nid])?;
        }

        let edge_schema = Schema::new(&["fid", "tid", "cost"])?;
        let mut edges_out = session.create_table_file(
            &dir.join(EDGES_OUT_FILE),
            edge_schema.clone(),
            &["fid", "tid"],
            true,
            TABLE_MAGIC,
            w_min.raw(),
        )?;
        let mut fwd: Vec<&EdgeTuple> = edges.iter().collect();
        fwd.sort_by_key(|e| (e.fid, e.tid));
        for e in fwd {
            edges_out.insert(&[e.fid, e.tid, e.cost.raw()])?;
        }

        let mut edges_in = session.create_table_file(
            &dir.join(EDGES_IN_FILE),
            edge_schema,
            &["tid", "fid"],
            true,
            TABLE_MAGIC,
            w_min.raw(),
        )?;
        let mut bwd: Vec<&EdgeTuple> = edges.iter().collect();
        bwd.sort_by_key(|e| (e.tid, e.fid));
        for e in bwd {
            edges_in.insert(&[e.fid, e.tid, e.cost.raw()])?;
        }

        nodes.flush()?;
        edges_out.flush()?;
        edges_in.flush()?;

        let stats = GraphStats {
            n: nodes.row_count(),
            m: edges_out.row_count(),
            w_min,
        };
        Ok(GraphDb {
            dir: dir.to_owned(),
            nodes,
            edges_out,
            edges_in,
            stats,
        })
    }

    /// Opens an existing graph directory.
    pub fn open(session: &Session, dir: &Path) -> Result<GraphDb> {
        let nodes = session.open_table(&dir.join(NODES_FILE), TABLE_MAGIC)?;
        let edges_out = session.open_table(&dir.join(EDGES_OUT_FILE), TABLE_MAGIC)?;
        let edges_in = session.open_table(&dir.join(EDGES_IN_FILE), TABLE_MAGIC)?;
        if edges_out.row_count() != edges_in.row_count() {
            return Err(Error::corrupt(format!(
                "edge orientations disagree: {} outgoing vs {} incoming rows",
                edges_out.row_count(),
                edges_in.row_count()
            )));
        }
        if edges_out.user_meta() != edges_in.user_meta() {
            return Err(Error::corrupt(
                "edge orientations disagree on the minimum weight",
            ));
        }
        let stats = GraphStats {
            n: nodes.row_count(),
            m: edges_out.row_count(),
            w_min: Cost::from_raw(edges_out.user_meta()),
        };
        Ok(GraphDb {
            dir: dir.to_owned(),
            nodes,
            edges_out,
            edges_in,
            stats,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stats(&self) -> GraphStats {
        self.stats
    }

    /// Edge table clustered on the source node.
    pub fn edges_out(&self) -> &Table {
        &self.edges_out
    }

    /// Edge table clustered on the target node.
    pub fn edges_in(&self) -> &Table {
        &self.edges_in
    }

    pub fn contains_node(&self, nid: NodeId) -> Result<bool> {
        self.nodes.contains_key(&[nid])
    }

    /// Ascending list of every node id.
    pub fn node_ids(&self) -> Result<Vec<NodeId>> {
        let mut out = Vec::with_capacity(self.stats.n as usize);
        self.nodes.for_each(|r| out.push(r.get(0)))?;
        Ok(out)
    }

    /// The full edge set in `(fid, tid)` order.
    pub fn edge_list(&self) -> Result<Vec<EdgeTuple>> {
        let mut out = Vec::with_capacity(self.stats.m as usize);
        self.edges_out
            .for_each(|r| out.push(EdgeTuple::new(r.get(0), r.get(1), r.get(2))))?;
        Ok(out)
    }
}

/// Parses an edge-list text file. Malformed lines report their path and
/// 1-based line number; duplicate `(fid, tid)` pairs keep the minimum cost.
pub fn read_edge_list(path: &Path) -> Result<Vec<EdgeTuple>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut edges: std::collections::BTreeMap<(NodeId, NodeId), u64> =
        std::collections::BTreeMap::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let parse = |tok: Option<&str>, what: &str| -> Result<u64> {
            let tok = tok.ok_or_else(|| Error::EdgeListParse {
                path: path.to_owned(),
                line: idx + 1,
                msg: format!("missing {what}"),
            })?;
            tok.parse::<u64>().map_err(|_| Error::EdgeListParse {
                path: path.to_owned(),
                line: idx + 1,
                msg: format!("{what} {tok:?} is not a non-negative integer"),
            })
        };
        let mut tokens = text.split_whitespace();
        let fid = parse(tokens.next(), "source id")?;
        let tid = parse(tokens.next(), "target id")?;
        let cost = parse(tokens.next(), "cost")?;
        if let Some(extra) = tokens.next() {
            return Err(Error::EdgeListParse {
                path: path.to_owned(),
                line: idx + 1,
                msg: format!("unexpected trailing token {extra:?}"),
            });
        }
        if cost == u64::MAX {
            return Err(Error::EdgeListParse {
                path: path.to_owned(),
                line: idx + 1,
                msg: "cost is reserved for the infinity sentinel".into(),
            });
        }
        edges
            .entry((fid, tid))
            .and_modify(|old| *old = (*old).min(cost))
            .or_insert(cost);
    }
    Ok(edges
        .into_iter()
        .map(|((fid, tid), w)| EdgeTuple::new(fid, tid, w))
        .collect())
}

/// Writes an edge list in the text format `read_edge_list` accepts.
pub fn write_edge_list(path: &Path, edges: &[EdgeTuple]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for e in edges {
        writeln!(out, "{} {} {}", e.fid, e.tid, e.cost.raw()).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
