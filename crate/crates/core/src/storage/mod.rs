//! Disk-backed storage: fixed-size pages, a bounded LRU buffer pool, and
//! clustered tables of fixed-width 64-bit rows.
//!
//! The layering is deliberately small. [`backend`] moves raw 4 KiB pages
//! between memory and file or heap stores; [`pool`] caches them under a
//! strict page budget and counts every read, write, and hit; [`row`]
//! packs rows into page bytes; [`table`] keeps rows clustered by key; and
//! [`session`] ties one pool to all open tables so the I/O ledger covers
//! the whole workload.

pub mod backend;
pub mod pool;
pub mod row;
pub mod session;
pub mod table;

pub use backend::{PageBackend, PAGE_SIZE};
pub use pool::{FileId, IoStats};
pub use row::{Row, RowRef, Schema};
pub use session::{Session, DEFAULT_BUFFER_PAGES};
pub use table::{Table, TABLE_MAGIC};

/// Magic bytes of a segment-index table file.
pub const SEG_MAGIC: [u8; 4] = *b"FEMS";
