//! Disk-backed shortest-path search expressed as relational operators.
//!
//! The crate is organized as a small stack:
//!
//! * [`storage`] — a paged table engine: fixed-size page files, a bounded
//!   buffer pool with strict LRU eviction, clustered tables with insert /
//!   lookup / scan / update / merge primitives, and per-session I/O counters.
//! * [`relops`] — the three set-at-a-time operators every search is built
//!   from: frontier selection, frontier expansion (a join against an edge or
//!   segment table), and a dedup + merge step that folds expansion results
//!   back into the visited-node table.
//! * [`search`] — five shortest-path algorithms assembled from those
//!   operators: plain Dijkstra, two bidirectional Dijkstra variants, a
//!   bidirectional best-first sweep, and a segment-index search.
//! * [`segtable`] — construction and validation of the shortest-segment
//!   index (all shortest paths up to a length threshold, plus residual
//!   edges), which trades preprocessing for far fewer expansion rounds.
//! * [`testkit`] — seeded graph generators and in-memory reference
//!   implementations used to cross-check everything above.
//!
//! All table access flows through a [`storage::Session`], so page reads,
//! page writes, and buffer hits are observable per run. That makes the I/O
//! behavior of a search — not just its answer — part of the tested contract.

pub mod error;
pub mod graph;
pub mod relops;
pub mod search;
pub mod segtable;
pub mod storage;
pub mod testkit;
mod types;

pub use error::{Error, Result};
pub use graph::GraphDb;
pub use search::{Algorithm, PathResult, SearchStats};
pub use segtable::{SegOrientation, SegTable, SegTablePair};
pub use storage::{IoStats, Session};
pub use types::{Cost, EdgeTuple, GraphStats, NodeId, NO_NODE};
