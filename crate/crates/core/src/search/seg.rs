//! Bidirectional search that hops across precomputed segments.
//!
//! Expansion reads the segment tables instead of the edge tables, so one
//! hop covers up to a threshold worth of distance and the selective
//! frontier ring widens by that threshold per round. Found paths come back
//! segment-granular and are unrolled into original edges during recovery.

use super::bidir::{drive, DriveSpec, Policy};
use super::PathResult;
use crate::error::Result;
use crate::graph::GraphDb;
use crate::relops::EdgeSource;
use crate::segtable::SegTablePair;
use crate::storage::Session;
use crate::types::NodeId;

/// Shortest path over the segment index; `prune` drops candidates that
/// cannot beat the best meeting sum already known.
pub fn bidir_segment(
    session: &Session,
    graph: &GraphDb,
    segs: &SegTablePair,
    s: NodeId,
    t: NodeId,
    prune: bool,
) -> Result<PathResult> {
    drive(
        session,
        graph,
        DriveSpec {
            fwd_edges: EdgeSource::outgoing_segments(segs.out.table()),
            bwd_edges: EdgeSource::incoming_segments(segs.inc.table()),
            policy: Policy::Selective {
                l_thd: segs.l_thd(),
            },
            prune,
            progress_gated: true,
            segs: Some(segs),
        },
        s,
        t,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::tests::fixture;
    use crate::search::{bidir_set_dijkstra, run, Algorithm};
    use crate::segtable::{build_insegs, build_outsegs};
    use crate::testkit::{oracle_dijkstra, sample_queries};
    use crate::types::{Cost, EdgeTuple};

    fn build_pair(session: &Session, graph: &GraphDb, l_thd: u64) -> SegTablePair {
        let (out, _) = build_outsegs(session, graph, Cost::new(l_thd), None).unwrap();
        let (inc, _) = build_insegs(session, graph, Cost::new(l_thd), None).unwrap();
        SegTablePair::new(out, inc).unwrap()
    }

    #[test]
    fn segment_hops_recover_the_original_edge_path() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::new(128);
        // 0 -> 1 -> 2 -> 3, weights 2/2/2; threshold 4 precomputes pairs.
        let edges = vec![
            EdgeTuple::new(0, 1, 2),
            EdgeTuple::new(1, 2, 2),
            EdgeTuple::new(2, 3, 2),
        ];
        let g = GraphDb::create(&session, dir.path(), &edges).unwrap();
        let segs = build_pair(&session, &g, 4);
        let r = bidir_segment(&session, &g, &segs, 0, 3, true).unwrap();
        assert!(r.found);
        assert_eq!(r.distance, Cost::new(6));
        assert_eq!(r.edges, edges, "recovery must unroll segments to edges");
    }

    #[test]
    fn matches_the_oracle_across_thresholds() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::new(512);
        for seed in [31, 32] {
            let (g, edges) = fixture(&session, &dir.path().join(format!("g{seed}")), 120, seed);
            let queries = sample_queries(&edges, 10, seed);
            for l_thd in [5, 20] {
                let segs = build_pair(&session, &g, l_thd);
                for &(s, t) in &queries {
                    let r = bidir_segment(&session, &g, &segs, s, t, true).unwrap();
                    let (want, _) = oracle_dijkstra(&edges, s, t).unwrap();
                    assert_eq!(r.distance, want, "{s} -> {t} at threshold {l_thd}");
                    if r.found {
                        let sum: Cost = r.edges.iter().fold(Cost::ZERO, |a, e| a + e.cost);
                        assert_eq!(sum, want);
                    }
                    let off = bidir_segment(&session, &g, &segs, s, t, false).unwrap();
                    assert_eq!(off.distance, want, "pruning must not change answers");
                }
            }
        }
    }

    #[test]
    fn takes_fewer_rounds_than_edge_level_tier_search() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::new(512);
        let (g, edges) = fixture(&session, dir.path(), 200, 33);
        let segs = build_pair(&session, &g, 5 * g.stats().w_min.raw());
        let mut seg_rounds = 0u64;
        let mut tier_rounds = 0u64;
        for (s, t) in sample_queries(&edges, 12, 8) {
            let a = bidir_segment(&session, &g, &segs, s, t, true).unwrap();
            let b = bidir_set_dijkstra(&session, &g, s, t, true).unwrap();
            assert_eq!(a.distance, b.distance);
            seg_rounds += a.stats.expansions;
            tier_rounds += b.stats.expansions;
        }
        assert!(
            seg_rounds <= tier_rounds,
            "segment hops ({seg_rounds} rounds) cannot lose to edge hops ({tier_rounds})"
        );
    }

    #[test]
    fn self_query_and_missing_index_edge_cases() {
        let dir = tempfile::tempdir().unwrap();
        let session = Session::new(128);
        let (g, _) = fixture(&session, dir.path(), 40, 34);
        let segs = build_pair(&session, &g, 10);
        let r = bidir_segment(&session, &g, &segs, 7, 7, true).unwrap();
        assert!(r.found);
        assert_eq!(r.distance, Cost::ZERO);
        assert_eq!(r.stats.expansions, 0);

        assert!(
            run(&session, &g, None, Algorithm::Segment { prune: true }, 0, 1).is_err(),
            "segment search without an index must refuse to run"
        );
    }
}
