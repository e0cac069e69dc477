//! Shared fixtures for the benchmark suite: seeded graphs kept alive in a
//! temp directory together with their session.

use tempfile::TempDir;

use femgraph::testkit::{gen_graph, sample_queries, GenSpec, GraphKind};
use femgraph::{EdgeTuple, GraphDb, NodeId, Session};

pub struct Fixture {
    // Dropped last; keeps the table files alive.
    _dir: TempDir,
    pub session: Session,
    pub graph: GraphDb,
    pub edges: Vec<EdgeTuple>,
}

/// A seeded random graph loaded into table files.
pub fn random_graph(n: u64, seed: u64) -> Fixture {
    let dir = TempDir::new().expect("temp dir");
    let edges = gen_graph(&GenSpec {
        kind: GraphKind::Random,
        n,
        avg_degree: 3,
        weight_range: (1, 100),
        seed,
    })
    .expect("generator flags are valid");
    let session = Session::with_default_buffer();
    let graph = GraphDb::create(&session, dir.path(), &edges).expect("graph loads");
    Fixture {
        _dir: dir,
        session,
        graph,
        edges,
    }
}

/// Deterministic query pairs for a fixture.
pub fn queries(fixture: &Fixture, count: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    sample_queries(&fixture.edges, count, seed)
}
