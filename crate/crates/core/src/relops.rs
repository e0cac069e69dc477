//! The three set-at-a-time search operators and the window-dedup primitive.
//!
//! Every search below is the same loop over a visited-node table: select a
//! frontier ([`f_select`]), join it against an adjacency table
//! ([`e_expand`]), and fold the expansion results back in ([`m_merge`]).
//! What distinguishes plain Dijkstra from its set-at-a-time, best-first,
//! and segment-index variants is only the frontier criterion and which
//! adjacency table the expansion joins — so the operators take both as
//! parameters instead of hard-coding them.
//!
//! All three operators are direction-parameterized: the visited table
//! carries two independent column groups, `(d2s, p2s, f)` for the forward
//! search and `(d2t, p2t, b)` for the backward one, and a [`Direction`]
//! picks the group. A backward search is therefore the forward code run
//! against the incoming-edge table.

use crate::error::Result;
use crate::storage::{Row, Schema, Table};
use crate::types::{Cost, NodeId, NO_NODE};

/// Field order of a visited-node row.
pub const V_NID: usize = 0;
pub const V_D2S: usize = 1;
pub const V_P2S: usize = 2;
pub const V_F: usize = 3;
pub const V_D2T: usize = 4;
pub const V_P2T: usize = 5;
pub const V_B: usize = 6;

/// Flag values for the `f` / `b` columns.
pub const FLAG_CANDIDATE: u64 = 0;
pub const FLAG_DONE: u64 = 1;
pub const FLAG_SELECTED: u64 = 2;

/// Schema of the visited-node table: distance, parent, and flag for each of
/// the two search directions, keyed by node.
pub fn visited_schema() -> Schema {
    Schema::new(&["nid", "d2s", "p2s", "f", "d2t", "p2t", "b"])
        .expect("visited schema is statically valid")
}

/// Which column group of the visited table an operator works on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn dist_field(self) -> usize {
        match self {
            Direction::Forward => V_D2S,
            Direction::Backward => V_D2T,
        }
    }

    pub fn parent_field(self) -> usize {
        match self {
            Direction::Forward => V_P2S,
            Direction::Backward => V_P2T,
        }
    }

    pub fn flag_field(self) -> usize {
        match self {
            Direction::Forward => V_F,
            Direction::Backward => V_B,
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// A selected frontier node: id plus its current settled-side distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrontierRow {
    pub nid: NodeId,
    pub dist: Cost,
}

/// One candidate produced by expansion: a neighbor, the tentative distance
/// through the frontier, and the frontier node it came through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpandedRow {
    pub nid: NodeId,
    pub cost: Cost,
    pub parent: NodeId,
}

/// Which candidate rows a frontier selection keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontierCriterion {
    /// Exactly the named node (the classic extract-min choice).
    SingleMin { mid: NodeId },
    /// Every candidate tied at the given minimal distance.
    SetMin { min_dist: Cost },
    /// Candidates within `k` threshold-lengths of the source, plus the
    /// minimal candidate even when it lies further out. `k` counts the
    /// expansions already performed in this direction, starting at 1.
    Selective { k: u64, l_thd: Cost },
    /// Every candidate (best-first sweep).
    AllCandidates,
}

/// An adjacency table viewed from one side: lookups are by the clustered
/// node, `neighbor_field` names the other endpoint and `cost_field` the
/// traversal cost. Works for plain edge tables and for segment tables,
/// whose rows carry an extra field the expansion does not read.
#[derive(Clone, Copy)]
pub struct EdgeSource<'a> {
    table: &'a Table,
    neighbor_field: usize,
    cost_field: usize,
}

impl<'a> EdgeSource<'a> {
    pub fn new(table: &'a Table, neighbor_field: usize, cost_field: usize) -> EdgeSource<'a> {
        EdgeSource {
            table,
            neighbor_field,
            cost_field,
        }
    }

    /// An `(fid, tid, cost)` table clustered on `fid`.
    pub fn outgoing_edges(table: &'a Table) -> EdgeSource<'a> {
        EdgeSource::new(table, 1, 2)
    }

    /// An `(fid, tid, cost)` table clustered on `tid`.
    pub fn incoming_edges(table: &'a Table) -> EdgeSource<'a> {
        EdgeSource::new(table, 0, 2)
    }

    /// An `(fid, tid, pid, cost)` segment table clustered on `fid`.
    pub fn outgoing_segments(table: &'a Table) -> EdgeSource<'a> {
        EdgeSource::new(table, 1, 3)
    }

    /// An `(fid, tid, pid, cost)` segment table clustered on `tid`.
    pub fn incoming_segments(table: &'a Table) -> EdgeSource<'a> {
        EdgeSource::new(table, 0, 3)
    }

    /// Adjacency of one node, as (neighbor, cost) pairs.
    pub fn neighbors(&self, nid: NodeId) -> Result<Vec<(NodeId, Cost)>> {
        Ok(self
            .table
            .lookup(&[nid])?
            .into_iter()
            .map(|row| {
                (
                    row[self.neighbor_field],
                    Cost::from_raw(row[self.cost_field]),
                )
            })
            .collect())
    }
}

/// Keeps, per node id, the single row with minimum cost (ties broken by
/// smallest parent id). Output is sorted by node id.
pub fn window_min_dedup(mut rows: Vec<ExpandedRow>) -> Vec<ExpandedRow> {
    rows.sort_by_key(|r| (r.nid, r.cost, r.parent));
    rows.dedup_by_key(|r| r.nid);
    rows
}

/// Smallest candidate distance in the given direction, infinite when no
/// candidate has a finite distance (the exhaustion signal). Rows whose
/// distance is still infinite exist only as opposite-direction bookkeeping
/// and never count as reachable candidates.
pub fn min_candidate_dist(visited: &Table, dir: Direction) -> Result<Cost> {
    let dist_f = dir.dist_field();
    let flag_f = dir.flag_field();
    let mut min = Cost::INF;
    visited.for_each(|row| {
        if row.get(flag_f) == FLAG_CANDIDATE {
            min = min.min(Cost::from_raw(row.get(dist_f)));
        }
    })?;
    Ok(min)
}

/// The candidate with minimal (distance, node id), or `None` when every
/// candidate is exhausted. This is the extract-min of the one-at-a-time
/// search.
pub fn min_candidate_node(visited: &Table, dir: Direction) -> Result<Option<(Cost, NodeId)>> {
    let dist_f = dir.dist_field();
    let flag_f = dir.flag_field();
    let mut best: Option<(Cost, NodeId)> = None;
    visited.for_each(|row| {
        let d = Cost::from_raw(row.get(dist_f));
        if row.get(flag_f) == FLAG_CANDIDATE && d.is_finite() {
            let entry = (d, row.get(V_NID));
            if best.is_none_or(|b| entry < b) {
                best = Some(entry);
            }
        }
    })?;
    Ok(best)
}

/// Selects the frontier for one expansion round and marks the chosen rows
/// with flag 2, leaving every other row untouched. Returns the selection in
/// node-id order; an empty result means the frontier is exhausted.
pub fn f_select(
    visited: &mut Table,
    dir: Direction,
    criterion: FrontierCriterion,
) -> Result<Vec<FrontierRow>> {
    let dist_f = dir.dist_field();
    let flag_f = dir.flag_field();
    let min_dist = match criterion {
        // The selective rule admits the minimal candidate even beyond the
        // k-threshold ring, so it needs the current minimum up front.
        FrontierCriterion::Selective { .. } => min_candidate_dist(visited, dir)?,
        _ => Cost::INF,
    };
    let keeps = |dist: Cost, nid: NodeId| -> bool {
        if !dist.is_finite() {
            return false;
        }
        match criterion {
            FrontierCriterion::SingleMin { mid } => nid == mid,
            FrontierCriterion::SetMin { min_dist } => dist == min_dist,
            FrontierCriterion::Selective { k, l_thd } => {
                let ring = Cost::from_raw(k.saturating_mul(l_thd.raw()));
                dist <= ring || dist == min_dist
            }
            FrontierCriterion::AllCandidates => true,
        }
    };

    let mut selected = Vec::new();
    visited.for_each(|row| {
        let dist = Cost::from_raw(row.get(dist_f));
        let nid = row.get(V_NID);
        if row.get(flag_f) == FLAG_CANDIDATE && keeps(dist, nid) {
            selected.push(FrontierRow { nid, dist });
        }
    })?;
    let marked = visited.update_where(
        |row| {
            row.get(flag_f) == FLAG_CANDIDATE && keeps(Cost::from_raw(row.get(dist_f)), row.get(V_NID))
        },
        |row| row[flag_f] = FLAG_SELECTED,
    )?;
    debug_assert_eq!(marked, selected.len() as u64);
    Ok(selected)
}

/// Demotes every flag-2 row to flag 1: the selected frontier has been
/// expanded and is now settled for its direction. Returns how many rows
/// were finalized.
pub fn finish_selected(visited: &mut Table, dir: Direction) -> Result<u64> {
    let flag_f = dir.flag_field();
    visited.update_where(
        |row| row.get(flag_f) == FLAG_SELECTED,
        |row| row[flag_f] = FLAG_DONE,
    )
}

/// Joins the frontier with an adjacency table and returns the deduplicated
/// candidates. Each frontier row `r` contributes `(neighbor, r.dist + cost,
/// r.nid)` per adjacent edge. With `prune = (l_other, min_cost)` a
/// candidate is dropped when `r.dist + cost + l_other >= min_cost`: no path
/// through it can beat the best meeting point already known. A `min_cost`
/// of infinity prunes nothing (any finite sum stays below it).
pub fn e_expand(
    frontier: &[FrontierRow],
    edges: &EdgeSource<'_>,
    prune: Option<(Cost, Cost)>,
) -> Result<Vec<ExpandedRow>> {
    let mut out = Vec::new();
    for r in frontier {
        debug_assert!(r.dist.is_finite(), "frontier rows carry finite distances");
        for (neighbor, w) in edges.neighbors(r.nid)? {
            let cand = r.dist + w;
            if let Some((l_other, min_cost)) = prune {
                if cand + l_other >= min_cost {
                    continue;
                }
            }
            out.push(ExpandedRow {
                nid: neighbor,
                cost: cand,
                parent: r.nid,
            });
        }
    }
    Ok(window_min_dedup(out))
}

/// Folds expansion candidates into the visited table. A matched node whose
/// stored distance is strictly larger gets the new (distance, parent) and
/// reverts to candidate; an unmatched node is inserted as a fresh candidate
/// in both directions, with the opposite distance infinite and the opposite
/// parent null. Returns the number of affected rows — the progress measure
/// the search drivers watch.
pub fn m_merge(visited: &mut Table, dir: Direction, expanded: &[ExpandedRow]) -> Result<u64> {
    let dist_f = dir.dist_field();
    let parent_f = dir.parent_field();
    let flag_f = dir.flag_field();
    let opp = dir.opposite();
    let source: Vec<Row> = expanded
        .iter()
        .map(|e| vec![e.nid, e.cost.raw(), e.parent])
        .collect();
    visited.merge(
        &source,
        &[0],
        |target, src| Cost::from_raw(target.get(dist_f)) > Cost::from_raw(src[1]),
        |target, src| {
            target[dist_f] = src[1];
            target[parent_f] = src[2];
            target[flag_f] = FLAG_CANDIDATE;
        },
        |src| {
            let mut row = vec![0u64; 7];
            row[V_NID] = src[0];
            row[dist_f] = src[1];
            row[parent_f] = src[2];
            row[flag_f] = FLAG_CANDIDATE;
            row[opp.dist_field()] = Cost::INF.raw();
            row[opp.parent_field()] = NO_NODE;
            row[opp.flag_field()] = FLAG_CANDIDATE;
            row
        },
    )
}
