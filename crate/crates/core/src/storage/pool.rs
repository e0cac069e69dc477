//! Bounded page cache shared by every table in a session.
//!
//! Replacement is strict LRU over page accesses, with a deterministic
//! tie-break: among equally old frames the lowest (file, page) pair goes
//! first. Recency is a monotone counter, so ties only arise in theory, but
//! the rule keeps eviction order — and therefore every I/O counter —
//! reproducible run to run.
//!
//! The pool owns the backends of all registered files so it can write dirty
//! frames back on eviction. Three counters are maintained: `page_reads`
//! (backend → pool), `page_writes` (pool → backend), and `buffer_hits`
//! (requests served without touching the backend).

use std::collections::HashMap;

use super::backend::{boxed_page, PageBackend, PageData};
use crate::error::Result;

/// Handle for a file registered with the pool.
pub type FileId = u64;

/// Counters for traffic between the pool and its backends.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IoStats {
    /// Pages fetched from a backend into the pool.
    pub page_reads: u64,
    /// Pages written from the pool to a backend (evictions and flushes).
    pub page_writes: u64,
    /// Page requests satisfied from the pool.
    pub buffer_hits: u64,
}

struct Frame {
    data: Box<PageData>,
    dirty: bool,
    last_use: u64,
}

pub struct BufferPool {
    capacity: usize,
    clock: u64,
    next_file: FileId,
    frames: HashMap<(FileId, u64), Frame>,
    backends: HashMap<FileId, Box<dyn PageBackend>>,
    stats: IoStats,
}

impl BufferPool {
    pub fn new(capacity: usize) -> BufferPool {
        assert!(capacity >= 1, "buffer pool needs at least one page");
        BufferPool {
            capacity,
            clock: 0,
            next_file: 0,
            frames: HashMap::new(),
            backends: HashMap::new(),
            stats: IoStats::default(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Shrinks or grows the frame budget, evicting immediately if needed.
    pub fn set_capacity(&mut self, capacity: usize) -> Result<()> {
        assert!(capacity >= 1, "buffer pool needs at least one page");
        self.capacity = capacity;
        while self.frames.len() > self.capacity {
            self.evict_one()?;
        }
        Ok(())
    }

    pub fn stats(&self) -> IoStats {
        self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = IoStats::default();
    }

    pub fn register(&mut self, backend: Box<dyn PageBackend>) -> FileId {
        let id = self.next_file;
        self.next_file += 1;
        self.backends.insert(id, backend);
        id
    }

    /// Forgets a file. Remaining frames are dropped without write-back, so
    /// callers flush first if the contents matter.
    pub fn deregister(&mut self, file: FileId) {
        self.frames.retain(|&(f, _), _| f != file);
        self.backends.remove(&file);
    }

    /// Runs `f` over the page, fetching it from the backend on a miss.
    pub fn with_page<R>(
        &mut self,
        file: FileId,
        page_no: u64,
        f: impl FnOnce(&PageData) -> R,
    ) -> Result<R> {
        self.ensure(file, page_no)?;
        Ok(f(&self.frames[&(file, page_no)].data))
    }

    /// Like [`with_page`](Self::with_page) but marks the frame dirty.
    pub fn with_page_mut<R>(
        &mut self,
        file: FileId,
        page_no: u64,
        f: impl FnOnce(&mut PageData) -> R,
    ) -> Result<R> {
        self.ensure(file, page_no)?;
        let frame = self.frames.get_mut(&(file, page_no)).unwrap();
        frame.dirty = true;
        Ok(f(&mut frame.data))
    }

    /// Installs a fresh zeroed page without consulting the backend. Used for
    /// newly allocated pages, so no read is counted.
    pub fn create_page(&mut self, file: FileId, page_no: u64) -> Result<()> {
        let key = (file, page_no);
        self.clock += 1;
        if let Some(frame) = self.frames.get_mut(&key) {
            frame.data.fill(0);
            frame.dirty = true;
            frame.last_use = self.clock;
            return Ok(());
        }
        self.make_room()?;
        self.frames.insert(
            key,
            Frame {
                data: boxed_page(),
                dirty: true,
                last_use: self.clock,
            },
        );
        Ok(())
    }

    /// Writes every dirty frame of `file` back and syncs the backend.
    pub fn flush_file(&mut self, file: FileId) -> Result<()> {
        let backend = self
            .backends
            .get_mut(&file)
            .expect("flush of unregistered file");
        let mut pages: Vec<u64> = self
            .frames
            .iter()
            .filter(|(&(f, _), frame)| f == file && frame.dirty)
            .map(|(&(_, p), _)| p)
            .collect();
        pages.sort_unstable();
        for page_no in pages {
            let frame = self.frames.get_mut(&(file, page_no)).unwrap();
            backend.write(page_no, &frame.data)?;
            frame.dirty = false;
            self.stats.page_writes += 1;
        }
        backend.sync()
    }

    /// Drops frames of `file` with page number >= `first`, without
    /// write-back. Used when a rewrite shrinks a file and the tail frames
    /// are stale.
    pub fn discard_from(&mut self, file: FileId, first: u64) {
        self.frames
            .retain(|&(f, p), _| f != file || p < first);
    }

    fn ensure(&mut self, file: FileId, page_no: u64) -> Result<()> {
        let key = (file, page_no);
        self.clock += 1;
        if let Some(frame) = self.frames.get_mut(&key) {
            frame.last_use = self.clock;
            self.stats.buffer_hits += 1;
            return Ok(());
        }
        self.make_room()?;
        let backend = self
            .backends
            .get_mut(&file)
            .expect("page request for unregistered file");
        let mut data = boxed_page();
        backend.read(page_no, &mut data)?;
        self.stats.page_reads += 1;
        self.frames.insert(
            key,
            Frame {
                data,
                dirty: false,
                last_use: self.clock,
            },
        );
        Ok(())
    }

    fn make_room(&mut self) -> Result<()> {
        while self.frames.len() >= self.capacity {
            self.evict_one()?;
        }
        Ok(())
    }

    fn evict_one(&mut self) -> Result<()> {
        let victim = self
            .frames
            .iter()
            .map(|(&key, frame)| (frame.last_use, key))
            .min()
            .map(|(_, key)| key)
            .expect("eviction from an empty pool");
        let frame = self.frames.remove(&victim).unwrap();
        if frame.dirty {
            let backend = self
                .backends
                .get_mut(&victim.0)
                .expect("evicting page of unregistered file");
            backend.write(victim.1, &frame.data)?;
            self.stats.page_writes += 1;
        }
        Ok(())
    }
}
