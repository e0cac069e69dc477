//! Single-direction search: extract the minimum candidate, expand it,
//! merge, repeat until the target is the minimum or nothing is left.

use super::{
    check_endpoints, init_visited, recover_path, trivial_result, PathResult, RunMeter,
};
use crate::error::Result;
use crate::graph::GraphDb;
use crate::relops::{
    e_expand, f_select, finish_selected, m_merge, min_candidate_node, Direction, EdgeSource,
    FrontierCriterion,
};
use crate::storage::Session;
use crate::types::{Cost, NodeId};

/// Forward-only shortest path from `s` to `t`.
pub fn dijkstra(session: &Session, graph: &GraphDb, s: NodeId, t: NodeId) -> Result<PathResult> {
    let meter = RunMeter::start(session);
    check_endpoints(graph, s, t)?;
    if s == t {
        return Ok(trivial_result(session, meter));
    }
    let mut visited = init_visited(session, s, None)?;
    let edges = EdgeSource::outgoing_edges(graph.edges_out());
    let mut expansions = 0u64;
    let mut last = Cost::ZERO;

    let distance = loop {
        // Exhaustion before reaching `t` means `t` is unreachable: were it
        // discovered, it would still be a candidate here.
        let Some((dist, mid)) = min_candidate_node(&visited, Direction::Forward)? else {
            break Cost::INF;
        };
        debug_assert!(dist >= last, "extracted minima must be non-decreasing");
        last = dist;
        if mid == t {
            // The minimum candidate's distance is final; no expansion of
            // the target itself is needed.
            break dist;
        }
        let frontier = f_select(
            &mut visited,
            Direction::Forward,
            FrontierCriterion::SingleMin { mid },
        )?;
        let expanded = e_expand(&frontier, &edges, None)?;
        expansions += 1;
        m_merge(&mut visited, Direction::Forward, &expanded)?;
        finish_selected(&mut visited, Direction::Forward)?;
    };

    let found = distance.is_finite();
    let edges = if found {
        recover_path(&visited, s, t, t, None, distance, graph.stats().n)?
    } else {
        Vec::new()
    };
    let rows = visited.row_count();
    Ok(PathResult {
        found,
        distance,
        edges,
        stats: meter.finish(session, expansions, if found { expansions } else { 0 }, rows),
    })
}
