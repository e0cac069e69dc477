//! Page-granular persistence behind the buffer pool.
//!
//! The pool only ever moves whole pages, so the backend interface is three
//! calls. Two implementations exist: real files for graph and index tables,
//! and an in-memory store for scratch tables (per-search visited tables,
//! build-time working sets) that still participates in buffer accounting.

use std::fs::File;
use std::os::unix::fs::FileExt;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Fixed page size for every table file.
pub const PAGE_SIZE: usize = 4096;

/// One page worth of bytes.
pub type PageData = [u8; PAGE_SIZE];

pub(crate) fn boxed_page() -> Box<PageData> {
    // Avoids placing 4 KiB on the stack before boxing.
    vec![0u8; PAGE_SIZE].into_boxed_slice().try_into().unwrap()
}

pub trait PageBackend {
    fn read(&mut self, page_no: u64, buf: &mut PageData) -> Result<()>;
    fn write(&mut self, page_no: u64, buf: &PageData) -> Result<()>;
    fn sync(&mut self) -> Result<()>;
}

/// Pages stored in a regular file at `page_no * PAGE_SIZE`.
pub struct FileBackend {
    file: File,
    path: PathBuf,
}

impl FileBackend {
    pub fn create(path: PathBuf) -> Result<FileBackend> {
        let file = File::options()
            .read(true)
            .write(true)
            .create(true)
            .truncate(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        Ok(FileBackend { file, path })
    }

    pub fn open(path: PathBuf) -> Result<FileBackend> {
        let file = File::options()
            .read(true)
            .write(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        Ok(FileBackend { file, path })
    }
}

impl PageBackend for FileBackend {
    fn read(&mut self, page_no: u64, buf: &mut PageData) -> Result<()> {
        self.file
            .read_exact_at(buf, page_no * PAGE_SIZE as u64)
            .map_err(|e| Error::io(&self.path, e))
    }

    fn write(&mut self, page_no: u64, buf: &PageData) -> Result<()> {
        self.file
            .write_all_at(buf, page_no * PAGE_SIZE as u64)
            .map_err(|e| Error::io(&self.path, e))
    }

    fn sync(&mut self) -> Result<()> {
        self.file.sync_data().map_err(|e| Error::io(&self.path, e))
    }
}

/// Pages stored on the heap; backs scratch tables.
#[derive(Default)]
pub struct MemBackend {
    pages: Vec<Box<PageData>>,
}

impl PageBackend for MemBackend {
    fn read(&mut self, page_no: u64, buf: &mut PageData) -> Result<()> {
        match self.pages.get(page_no as usize) {
            Some(p) => {
                buf.copy_from_slice(&p[..]);
                Ok(())
            }
            None => Err(Error::corrupt(format!(
                "read of unallocated in-memory page {page_no}"
            ))),
        }
    }

    fn write(&mut self, page_no: u64, buf: &PageData) -> Result<()> {
        let idx = page_no as usize;
        while self.pages.len() <= idx {
            self.pages.push(boxed_page());
        }
        self.pages[idx].copy_from_slice(buf);
        Ok(())
    }

    fn sync(&mut self) -> Result<()> {
        Ok(())
    }
}
