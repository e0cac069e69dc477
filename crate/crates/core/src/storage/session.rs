//! Session: one buffer pool shared by every open table.
//!
//! All page traffic — persistent graph tables and in-memory scratch tables
//! alike — funnels through a single bounded pool, so the I/O counters see
//! the whole workload and the page-replacement budget is honest. A
//! [`Session`] is cheap to clone; clones share the pool.

use std::cell::RefCell;
use std::collections::HashSet;
use std::path::Path;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::storage::pool::{BufferPool, IoStats};
use crate::storage::row::Schema;
use crate::storage::table::Table;

/// Default pool capacity in pages (16 MiB of 4 KiB frames).
pub const DEFAULT_BUFFER_PAGES: usize = 4096;

pub(crate) struct SessionInner {
    pub(crate) pool: BufferPool,
    pub(crate) names: HashSet<String>,
    scratch_seq: u64,
}

/// Shared handle to a buffer pool plus a registry of open table names.
#[derive(Clone)]
pub struct Session {
    inner: Rc<RefCell<SessionInner>>,
}

impl Session {
    /// A session whose pool holds at most `buffer_pages` frames.
    pub fn new(buffer_pages: usize) -> Session {
        Session {
            inner: Rc::new(RefCell::new(SessionInner {
                pool: BufferPool::new(buffer_pages),
                names: HashSet::new(),
                scratch_seq: 0,
            })),
        }
    }

    /// A session with the default 16 MiB pool.
    pub fn with_default_buffer() -> Session {
        Session::new(DEFAULT_BUFFER_PAGES)
    }

    pub fn buffer_pages(&self) -> usize {
        self.inner.borrow().pool.capacity()
    }

    /// Resizes the pool, evicting (and writing back) surplus frames.
    pub fn set_buffer_pages(&self, buffer_pages: usize) -> Result<()> {
        self.inner.borrow_mut().pool.set_capacity(buffer_pages)
    }

    pub fn io_stats(&self) -> IoStats {
        self.inner.borrow().pool.stats()
    }

    pub fn reset_io_stats(&self) {
        self.inner.borrow_mut().pool.reset_stats();
    }

    /// Creates an in-memory table. Its pages live in the shared pool and
    /// spill to a heap-backed store under memory pressure, so scratch
    /// traffic is counted like any other.
    pub fn create_table(
        &self,
        name: &str,
        schema: Schema,
        key: &[&str],
        unique: bool,
    ) -> Result<Table> {
        self.claim_name(name)?;
        self.release_on_err(name, |inner| {
            Table::create(
                inner,
                name.to_owned(),
                None,
                schema,
                key,
                unique,
                crate::storage::table::TABLE_MAGIC,
                0,
            )
        })
    }

    /// Creates an in-memory table with a generated unique name.
    pub fn create_scratch_table(
        &self,
        prefix: &str,
        schema: Schema,
        key: &[&str],
        unique: bool,
    ) -> Result<Table> {
        let name = {
            let mut inner = self.inner.borrow_mut();
            inner.scratch_seq += 1;
            format!("{prefix}#{}", inner.scratch_seq)
        };
        self.claim_name(&name)?;
        self.release_on_err(&name.clone(), |inner| {
            Table::create(
                inner,
                name,
                None,
                schema,
                key,
                unique,
                crate::storage::table::TABLE_MAGIC,
                0,
            )
        })
    }

    /// Creates (truncating) a file-backed table. `magic` brands the file
    /// type and `user_meta` rides in the header for table-specific scalars.
    pub fn create_table_file(
        &self,
        path: &Path,
        schema: Schema,
        key: &[&str],
        unique: bool,
        magic: [u8; 4],
        user_meta: u64,
    ) -> Result<Table> {
        let name = path.to_string_lossy().into_owned();
        self.claim_name(&name)?;
        self.release_on_err(&name.clone(), |inner| {
            Table::create(
                inner,
                name,
                Some(path.to_owned()),
                schema,
                key,
                unique,
                magic,
                user_meta,
            )
        })
    }

    /// Opens an existing table file, verifying its magic bytes.
    pub fn open_table(&self, path: &Path, magic: [u8; 4]) -> Result<Table> {
        let name = path.to_string_lossy().into_owned();
        self.claim_name(&name)?;
        self.release_on_err(&name.clone(), |inner| {
            Table::open(inner, name, path.to_owned(), magic)
        })
    }

    fn claim_name(&self, name: &str) -> Result<()> {
        if !self.inner.borrow_mut().names.insert(name.to_owned()) {
            return Err(Error::DuplicateTable(name.to_owned()));
        }
        Ok(())
    }

    fn release_on_err(
        &self,
        name: &str,
        build: impl FnOnce(Rc<RefCell<SessionInner>>) -> Result<Table>,
    ) -> Result<Table> {
        let result = build(Rc::clone(&self.inner));
        if result.is_err() {
            self.inner.borrow_mut().names.remove(name);
        }
        result
    }
}

impl Default for Session {
    fn default() -> Session {
        Session::with_default_buffer()
    }
}
