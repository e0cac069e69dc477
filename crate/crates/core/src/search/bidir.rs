//! Bidirectional drivers: one loop, several frontier policies.
//!
//! The walk alternates between a forward sweep from the source and a
//! backward sweep from the target, always taking the direction whose last
//! merge touched fewer rows. Each sweep selects a frontier by the active
//! policy, expands it, merges the candidates, and refreshes the per-side
//! lower bound `l` (the smallest unexpanded candidate distance) and the
//! best meeting sum seen so far. Once `l_f + l_b` reaches the best sum, no
//! undiscovered route can beat it and the search stops.

use super::{
    check_endpoints, init_visited, min_sum, recover_path, trivial_result, PathResult, RunMeter,
};
use crate::error::Result;
use crate::graph::GraphDb;
use crate::relops::{
    e_expand, f_select, finish_selected, m_merge, min_candidate_dist, min_candidate_node,
    Direction, EdgeSource, FrontierCriterion,
};
use crate::segtable::SegTablePair;
use crate::storage::Session;
use crate::types::{Cost, NodeId};

/// Live bookkeeping of a bidirectional search.
#[derive(Clone, Copy, Debug)]
pub struct SearchState {
    /// Smallest unexpanded forward candidate distance.
    pub l_f: Cost,
    /// Smallest unexpanded backward candidate distance.
    pub l_b: Cost,
    /// Best source-to-target distance seen so far.
    pub min_cost: Cost,
    /// Size estimate of the forward / backward frontier, used to pick the
    /// cheaper direction. The plain drivers read the latest merge's
    /// affected count; the progress-gated loop counts the rows actually
    /// selected, because its continuation conditions require the counters
    /// to mean "this side still has a frontier" — a sweep whose merge
    /// improves nothing has not exhausted anything.
    pub n_f: u64,
    pub n_b: u64,
    /// Per-direction expansion counters, starting at one.
    pub fwd: u64,
    pub bwd: u64,
}

impl SearchState {
    pub fn new() -> SearchState {
        SearchState {
            l_f: Cost::ZERO,
            l_b: Cost::ZERO,
            min_cost: Cost::INF,
            n_f: 1,
            n_b: 1,
            fwd: 1,
            bwd: 1,
        }
    }
}

impl Default for SearchState {
    fn default() -> SearchState {
        SearchState::new()
    }
}

/// How a sweep picks its frontier.
pub(crate) enum Policy {
    /// One minimum candidate per sweep.
    SingleMin,
    /// Every candidate tied at the minimum.
    SetMin,
    /// Every candidate.
    Breadth,
    /// Candidates inside the widening ring `k * l_thd`, plus the minimum.
    Selective { l_thd: Cost },
}

pub(crate) struct DriveSpec<'a> {
    pub fwd_edges: EdgeSource<'a>,
    pub bwd_edges: EdgeSource<'a>,
    pub policy: Policy,
    pub prune: bool,
    /// Segment-search loop shape: continue while `l_f + l_b <= min_cost`
    /// and both of the latest merges made progress. Without it the loop is
    /// the plain bound rule, `l_f + l_b < min_cost`, with exhaustion
    /// surfacing as an infinite `l`.
    pub progress_gated: bool,
    /// Present when expansion hops are segments needing unrolling.
    pub segs: Option<&'a SegTablePair>,
}

pub(crate) fn drive(
    session: &Session,
    graph: &GraphDb,
    spec: DriveSpec<'_>,
    s: NodeId,
    t: NodeId,
) -> Result<PathResult> {
    let meter = RunMeter::start(session);
    check_endpoints(graph, s, t)?;
    if s == t {
        return Ok(trivial_result(session, meter));
    }
    let mut visited = init_visited(session, s, Some(t))?;
    let mut st = SearchState::new();
    let mut meet = None;
    let mut expansions = 0u64;
    let mut found_at = 0u64;

    loop {
        let reach = st.l_f.saturating_add(st.l_b);
        let keep_going = if spec.progress_gated {
            reach <= st.min_cost && st.n_f > 0 && st.n_b > 0
        } else {
            reach < st.min_cost
        };
        if !keep_going {
            break;
        }

        let dir = if st.n_f <= st.n_b {
            Direction::Forward
        } else {
            Direction::Backward
        };
        let criterion = match spec.policy {
            Policy::SingleMin => min_candidate_node(&visited, dir)?
                .map(|(_, mid)| FrontierCriterion::SingleMin { mid }),
            Policy::SetMin => {
                let min_dist = min_candidate_dist(&visited, dir)?;
                min_dist
                    .is_finite()
                    .then_some(FrontierCriterion::SetMin { min_dist })
            }
            Policy::Breadth => Some(FrontierCriterion::AllCandidates),
            Policy::Selective { l_thd } => Some(FrontierCriterion::Selective {
                k: match dir {
                    Direction::Forward => st.fwd,
                    Direction::Backward => st.bwd,
                },
                l_thd,
            }),
        };
        let frontier = match criterion {
            Some(c) => f_select(&mut visited, dir, c)?,
            None => Vec::new(),
        };
        if frontier.is_empty() {
            // This side has nothing left to expand: record exhaustion in
            // both loop currencies and let the condition above decide.
            match dir {
                Direction::Forward => {
                    st.l_f = Cost::INF;
                    st.n_f = 0;
                }
                Direction::Backward => {
                    st.l_b = Cost::INF;
                    st.n_b = 0;
                }
            }
            continue;
        }

        let edges = match dir {
            Direction::Forward => &spec.fwd_edges,
            Direction::Backward => &spec.bwd_edges,
        };
        let prune = spec.prune.then(|| {
            let l_other = match dir {
                Direction::Forward => st.l_b,
                Direction::Backward => st.l_f,
            };
            (l_other, st.min_cost)
        });
        let expanded = e_expand(&frontier, edges, prune)?;
        expansions += 1;
        let affected = m_merge(&mut visited, dir, &expanded)?;
        finish_selected(&mut visited, dir)?;
        let l = min_candidate_dist(&visited, dir)?;
        let size = if spec.progress_gated {
            frontier.len() as u64
        } else {
            affected
        };
        match dir {
            Direction::Forward => {
                st.n_f = size;
                st.fwd += 1;
                st.l_f = l;
            }
            Direction::Backward => {
                st.n_b = size;
                st.bwd += 1;
                st.l_b = l;
            }
        }
        let (mc, m) = min_sum(&visited)?;
        if mc < st.min_cost {
            found_at = expansions;
        }
        st.min_cost = mc;
        meet = m;
    }

    let found = st.min_cost.is_finite();
    let edges = if found {
        let meet = meet.expect("a finite meeting sum names a meeting node");
        recover_path(
            &visited,
            s,
            t,
            meet,
            spec.segs,
            st.min_cost,
            graph.stats().n,
        )?
    } else {
        Vec::new()
    };
    let rows = visited.row_count();
    Ok(PathResult {
        found,
        distance: if found { st.min_cost } else { Cost::INF },
        edges,
        stats: meter.finish(session, expansions, if found { found_at } else { 0 }, rows),
    })
}

/// Bidirectional search expanding one minimum candidate per sweep.
pub fn bidir_dijkstra(
    session: &Session,
    graph: &GraphDb,
    s: NodeId,
    t: NodeId,
) -> Result<PathResult> {
    drive(
        session,
        graph,
        DriveSpec {
            fwd_edges: EdgeSource::outgoing_edges(graph.edges_out()),
            bwd_edges: EdgeSource::incoming_edges(graph.edges_in()),
            policy: Policy::SingleMin,
            prune: false,
            progress_gated: false,
            segs: None,
        },
        s,
        t,
    )
}

/// Bidirectional search expanding the whole minimum-distance tier per
/// sweep, optionally pruning candidates that cannot beat the best meeting
/// sum.
pub fn bidir_set_dijkstra(
    session: &Session,
    graph: &GraphDb,
    s: NodeId,
    t: NodeId,
    prune: bool,
) -> Result<PathResult> {
    drive(
        session,
        graph,
        DriveSpec {
            fwd_edges: EdgeSource::outgoing_edges(graph.edges_out()),
            bwd_edges: EdgeSource::incoming_edges(graph.edges_in()),
            policy: Policy::SetMin,
            prune,
            progress_gated: false,
            segs: None,
        },
        s,
        t,
    )
}

/// Bidirectional sweep expanding every candidate each round — hop-bounded
/// rather than distance-ordered, so it floods more rows but needs few
/// rounds.
pub fn bidir_breadth(
    session: &Session,
    graph: &GraphDb,
    s: NodeId,
    t: NodeId,
) -> Result<PathResult> {
    drive(
        session,
        graph,
        DriveSpec {
            fwd_edges: EdgeSource::outgoing_edges(graph.edges_out()),
            bwd_edges: EdgeSource::incoming_edges(graph.edges_in()),
            policy: Policy::Breadth,
            prune: false,
            progress_gated: false,
            segs: None,
        },
        s,
        t,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::tests::fixture;
    use crate::testkit::{oracle_dijkstra, sample_queries};
    use crate::types::EdgeTuple;

    #[test]
    fn both_walks_meet_in_the_middle() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::new(64);
        // 0 -> 1 -> 2 -> 3 -> 4, all weight 1, plus a weight-10 shortcut.
        let edges = vec![
            EdgeTuple::new(0, 1, 1),
            EdgeTuple::new(0, 4, 10),
            EdgeTuple::new(1, 2, 1),
            EdgeTuple::new(2, 3, 1),
            EdgeTuple::new(3, 4, 1),
        ];
        let g = GraphDb::create(&session, dir.path(), &edges).unwrap();
        let r = bidir_dijkstra(&session, &g, 0, 4).unwrap();
        assert_eq!(r.distance, Cost::new(4));
        assert_eq!(r.edge_count(), 4, "the chain beats the shortcut");
    }

    #[test]
    fn tier_expansion_needs_fewer_rounds_than_single_extraction() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::new(256);
        let (g, edges) = fixture(&session, dir.path(), 200, 21);
        let mut single = 0u64;
        let mut tiered = 0u64;
        for (s, t) in sample_queries(&edges, 10, 3) {
            let a = bidir_dijkstra(&session, &g, s, t).unwrap();
            let b = bidir_set_dijkstra(&session, &g, s, t, true).unwrap();
            assert_eq!(a.distance, b.distance);
            single += a.stats.expansions;
            tiered += b.stats.expansions;
        }
        assert!(
            tiered <= single,
            "expanding whole tiers ({tiered}) cannot take more rounds than one-at-a-time ({single})"
        );
    }

    #[test]
    fn pruning_never_changes_the_answer() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::new(256);
        let (g, edges) = fixture(&session, dir.path(), 150, 22);
        for (s, t) in sample_queries(&edges, 15, 4) {
            let on = bidir_set_dijkstra(&session, &g, s, t, true).unwrap();
            let off = bidir_set_dijkstra(&session, &g, s, t, false).unwrap();
            assert_eq!(on.distance, off.distance, "{s} -> {t}");
            let (want, _) = oracle_dijkstra(&edges, s, t).unwrap();
            assert_eq!(on.distance, want);
        }
    }

    #[test]
    fn breadth_discovers_the_path_within_its_hop_count() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::new(256);
        let (g, edges) = fixture(&session, dir.path(), 200, 23);
        for (s, t) in sample_queries(&edges, 10, 5) {
            let r = bidir_breadth(&session, &g, s, t).unwrap();
            if r.found {
                let hops = r.edge_count() as u64;
                assert!(
                    r.stats.found_at <= hops + 2,
                    "{s} -> {t}: distance settled in round {} of a {hops}-hop path",
                    r.stats.found_at
                );
                assert!(r.stats.found_at <= r.stats.expansions);
            }
        }
    }

    #[test]
    fn tier_rounds_respect_the_distance_over_weight_bound() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::new(256);
        let (g, edges) = fixture(&session, dir.path(), 200, 24);
        let w_min = g.stats().w_min.raw();
        let n = g.stats().n;
        for (s, t) in sample_queries(&edges, 10, 6) {
            let r = bidir_set_dijkstra(&session, &g, s, t, true).unwrap();
            if r.found {
                let bound = (r.distance.raw().div_ceil(w_min) + 1).min(n);
                assert!(
                    r.stats.expansions <= bound,
                    "{s} -> {t}: {} rounds, bound {bound}",
                    r.stats.expansions
                );
            }
        }
    }
}
