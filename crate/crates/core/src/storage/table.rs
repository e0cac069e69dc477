//! Clustered, paged tables.
//!
//! A table keeps rows ordered by a clustered key (any subset of its fields,
//! compared lexicographically). Page 0 of the file is a header; data pages
//! follow. An in-memory page directory — one `(page, min_key)` entry per
//! data page in logical order — routes lookups to the pages that can hold a
//! key, so point and prefix reads touch only those pages. Inserts keep rows
//! sorted by splitting full pages; a flush compacts everything back into
//! physically ordered, fully packed pages and persists the header plus the
//! directory (as trailing index pages).
//!
//! Rows with equal keys keep their insertion order: inserts land after
//! existing equal keys and page splits never reorder. There is no delete —
//! the workloads above only ever insert and update in place.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::path::PathBuf;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::storage::backend::{FileBackend, MemBackend, PageData, PAGE_SIZE};
use crate::storage::pool::FileId;
use crate::storage::row::{
    extract_key, page_rows, row_at, set_page_rows, shift_right, write_row, Row, RowRef, Schema,
    FIELD_BYTES, PAGE_HEADER,
};
use crate::storage::session::SessionInner;

/// Magic bytes of a general table file.
pub const TABLE_MAGIC: [u8; 4] = *b"FEMT";

const FORMAT_VERSION: u16 = 1;
const HEADER_NAMES_AT: usize = 64;
const NAME_SLOT: usize = 16;

#[derive(Clone, Debug)]
struct PageEntry {
    page_no: u64,
    min_key: Vec<u64>,
}

pub struct Table {
    session: Rc<RefCell<SessionInner>>,
    file: FileId,
    name: String,
    path: Option<PathBuf>,
    schema: Schema,
    key_fields: Vec<usize>,
    unique: bool,
    magic: [u8; 4],
    user_meta: u64,
    row_count: u64,
    directory: Vec<PageEntry>,
    /// Next never-allocated page number.
    next_page: u64,
    temp: bool,
    modified: bool,
}

impl Table {
    pub(crate) fn create(
        session: Rc<RefCell<SessionInner>>,
        name: String,
        path: Option<PathBuf>,
        schema: Schema,
        key: &[&str],
        unique: bool,
        magic: [u8; 4],
        user_meta: u64,
    ) -> Result<Table> {
        let key_fields = resolve_key(&schema, key)?;
        let temp = path.is_none();
        let file = {
            let mut inner = session.borrow_mut();
            match &path {
                Some(p) => inner.pool.register(Box::new(FileBackend::create(p.clone())?)),
                None => inner.pool.register(Box::<MemBackend>::default()),
            }
        };
        Ok(Table {
            session,
            file,
            name,
            path,
            schema,
            key_fields,
            unique,
            magic,
            user_meta,
            row_count: 0,
            directory: Vec::new(),
            next_page: 1,
            temp,
            modified: false,
        })
    }

    pub(crate) fn open(
        session: Rc<RefCell<SessionInner>>,
        name: String,
        path: PathBuf,
        expected_magic: [u8; 4],
    ) -> Result<Table> {
        let file = {
            let mut inner = session.borrow_mut();
            inner
                .pool
                .register(Box::new(FileBackend::open(path.clone())?))
        };
        let mut table = Table {
            session,
            file,
            name,
            path: Some(path),
            schema: Schema::new(&["placeholder"])?,
            key_fields: Vec::new(),
            unique: false,
            magic: expected_magic,
            user_meta: 0,
            row_count: 0,
            directory: Vec::new(),
            next_page: 1,
            temp: false,
            modified: false,
        };
        table.read_meta(expected_magic)?;
        Ok(table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn key_fields(&self) -> &[usize] {
        &self.key_fields
    }

    pub fn is_unique(&self) -> bool {
        self.unique
    }

    pub fn row_count(&self) -> u64 {
        self.row_count
    }

    pub fn data_pages(&self) -> u64 {
        self.directory.len() as u64
    }

    pub fn user_meta(&self) -> u64 {
        self.user_meta
    }

    pub fn path(&self) -> Option<&std::path::Path> {
        self.path.as_deref()
    }

    // ── Reads ──────────────────────────────────────────────────────────

    /// All rows whose clustered key starts with `prefix`, in (key,
    /// insertion) order. `prefix` may cover a leading subset of the key
    /// fields. Touches only the candidate pages the directory names.
    pub fn lookup(&self, prefix: &[u64]) -> Result<Vec<Row>> {
        self.check_prefix(prefix)?;
        let (start, end) = self.dir_range(prefix);
        let fields = self.schema.len();
        let kf = &self.key_fields[..prefix.len()];
        let mut out = Vec::new();
        for entry in &self.directory[start..end] {
            self.with_page(entry.page_no, |page| {
                for slot in 0..page_rows(page) {
                    let row = row_at(page, slot, fields);
                    match row.cmp_key_prefix(kf, prefix) {
                        Ordering::Equal => out.push(row.to_vec()),
                        _ => {}
                    }
                }
            })?;
        }
        Ok(out)
    }

    /// Whether a row with exactly this full key exists.
    pub fn contains_key(&self, key: &[u64]) -> Result<bool> {
        if key.len() != self.key_fields.len() {
            return Err(Error::Schema(format!(
                "key length {} does not match clustered key width {}",
                key.len(),
                self.key_fields.len()
            )));
        }
        Ok(self.locate(key)?.is_some())
    }

    /// Rows matching `pred`, in clustered order.
    pub fn scan(&self, mut pred: impl FnMut(RowRef<'_>) -> bool) -> Result<Vec<Row>> {
        let mut out = Vec::new();
        self.for_each(|row| {
            if pred(row) {
                out.push(row.to_vec());
            }
        })?;
        Ok(out)
    }

    /// Visits every row in clustered order without materializing it. The
    /// visitor must not call back into this session's tables.
    pub fn for_each(&self, mut f: impl FnMut(RowRef<'_>)) -> Result<()> {
        let fields = self.schema.len();
        for entry in &self.directory {
            self.with_page(entry.page_no, |page| {
                for slot in 0..page_rows(page) {
                    f(row_at(page, slot, fields));
                }
            })?;
        }
        Ok(())
    }

    // ── Writes ─────────────────────────────────────────────────────────

    /// Inserts one row, keeping clustered order. Duplicate keys are an
    /// error on unique tables and append after their equals otherwise.
    pub fn insert(&mut self, row: &[u64]) -> Result<()> {
        self.check_row_width(row)?;
        let key = extract_key(row, &self.key_fields);
        if self.unique && self.locate(&key)?.is_some() {
            return Err(Error::UniqueViolation(key));
        }
        self.insert_sorted(row, key)
    }

    /// Applies `assign` to every row matching `pred`; returns how many rows
    /// changed. The assignment must leave clustered-key fields untouched —
    /// any violation aborts the whole update before a single write.
    pub fn update_where(
        &mut self,
        mut pred: impl FnMut(RowRef<'_>) -> bool,
        mut assign: impl FnMut(&mut Row),
    ) -> Result<u64> {
        let fields = self.schema.len();
        let mut pending: Vec<(u64, usize, Row)> = Vec::new();
        for entry in &self.directory {
            self.with_page(entry.page_no, |page| -> Result<()> {
                for slot in 0..page_rows(page) {
                    let row = row_at(page, slot, fields);
                    if pred(row) {
                        let before = row.key(&self.key_fields);
                        let mut updated = row.to_vec();
                        assign(&mut updated);
                        if updated.len() != fields {
                            return Err(Error::Schema(
                                "update changed the row width".into(),
                            ));
                        }
                        if extract_key(&updated, &self.key_fields) != before {
                            return Err(Error::KeyMutation(before));
                        }
                        pending.push((entry.page_no, slot, updated));
                    }
                }
                Ok(())
            })??;
        }
        let changed = pending.len() as u64;
        for (page_no, slot, row) in pending {
            self.with_page_mut(page_no, |page| write_row(page, slot, &row))?;
        }
        if changed > 0 {
            self.modified = true;
        }
        Ok(changed)
    }

    /// Upserts `source` rows into this table (which must be unique on its
    /// clustered key). For each source row, `source_key` names the source
    /// fields forming the match key. A matched target row is rewritten via
    /// `assign` only when `matched` approves the pair; an unmatched source
    /// row is inserted as `project(source)`. Returns the number of affected
    /// (updated + inserted) rows.
    ///
    /// Source keys must be distinct: one merge may touch each target row at
    /// most once, which is what makes the operation deterministic under
    /// reordering.
    pub fn merge(
        &mut self,
        source: &[Row],
        source_key: &[usize],
        matched: impl Fn(RowRef<'_>, &[u64]) -> bool,
        assign: impl Fn(&mut Row, &[u64]),
        project: impl Fn(&[u64]) -> Row,
    ) -> Result<u64> {
        if !self.unique {
            return Err(Error::Schema(
                "merge target must be unique on its clustered key".into(),
            ));
        }
        if source_key.len() != self.key_fields.len() {
            return Err(Error::Schema(format!(
                "merge key width {} does not match target key width {}",
                source_key.len(),
                self.key_fields.len()
            )));
        }
        let fields = self.schema.len();
        let mut keyed: Vec<(Vec<u64>, &Row)> = source
            .iter()
            .map(|r| (extract_key(r, source_key), r))
            .collect();
        // Sorting gives page locality on the target; equal keys are illegal.
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in keyed.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateSourceKey(pair[0].0.clone()));
            }
        }

        let mut affected = 0u64;
        for (key, src) in keyed {
            match self.locate(&key)? {
                Some((page_no, slot)) => {
                    let hit = self.with_page(page_no, |page| {
                        let target = row_at(page, slot, fields);
                        matched(target, src).then(|| target.to_vec())
                    })?;
                    if let Some(mut row) = hit {
                        assign(&mut row, src);
                        if row.len() != fields {
                            return Err(Error::Schema(
                                "merge assignment changed the row width".into(),
                            ));
                        }
                        if extract_key(&row, &self.key_fields) != key {
                            return Err(Error::KeyMutation(key));
                        }
                        self.with_page_mut(page_no, |page| write_row(page, slot, &row))?;
                        self.modified = true;
                        affected += 1;
                    }
                }
                None => {
                    let row = project(src);
                    self.check_row_width(&row)?;
                    if extract_key(&row, &self.key_fields) != key {
                        return Err(Error::Schema(
                            "merge projection must preserve the match key".into(),
                        ));
                    }
                    self.insert_sorted(&row, key)?;
                    affected += 1;
                }
            }
        }
        Ok(affected)
    }

    /// Compacts rows into physically ordered, fully packed pages, rewrites
    /// the header and index pages, and writes everything through to the
    /// backend. After a flush the on-disk file is self-describing and
    /// reopenable.
    pub fn flush(&mut self) -> Result<()> {
        let mut rows: Vec<Row> = Vec::with_capacity(self.row_count as usize);
        self.for_each(|r| rows.push(r.to_vec()))?;
        debug_assert_eq!(rows.len() as u64, self.row_count);

        let per_page = self.schema.rows_per_page();
        let mut directory = Vec::with_capacity(rows.len() / per_page + 1);
        let mut page_no = 1u64;
        for chunk in rows.chunks(per_page) {
            self.create_page(page_no)?;
            self.with_page_mut(page_no, |page| {
                for (slot, row) in chunk.iter().enumerate() {
                    write_row(page, slot, row);
                }
                set_page_rows(page, chunk.len());
            })?;
            directory.push(PageEntry {
                page_no,
                min_key: extract_key(&chunk[0], &self.key_fields),
            });
            page_no += 1;
        }
        self.directory = directory;
        let data_pages = self.directory.len() as u64;

        let index_start = data_pages + 1;
        let index_pages = self.write_index(index_start)?;

        self.create_page(0)?;
        let header = self.build_header(data_pages, index_start, index_pages);
        self.with_page_mut(0, |page| page.copy_from_slice(&header[..]))?;

        let end = index_start + index_pages;
        let mut inner = self.session.borrow_mut();
        inner.pool.discard_from(self.file, end);
        inner.pool.flush_file(self.file)?;
        drop(inner);
        self.next_page = end;
        self.modified = false;
        Ok(())
    }

    // ── Internals ──────────────────────────────────────────────────────

    fn with_page<R>(&self, page_no: u64, f: impl FnOnce(&PageData) -> R) -> Result<R> {
        self.session.borrow_mut().pool.with_page(self.file, page_no, f)
    }

    fn with_page_mut<R>(&self, page_no: u64, f: impl FnOnce(&mut PageData) -> R) -> Result<R> {
        self.session
            .borrow_mut()
            .pool
            .with_page_mut(self.file, page_no, f)
    }

    fn create_page(&self, page_no: u64) -> Result<()> {
        self.session.borrow_mut().pool.create_page(self.file, page_no)
    }

    fn alloc_page(&mut self) -> Result<u64> {
        let page_no = self.next_page;
        self.next_page += 1;
        self.create_page(page_no)?;
        Ok(page_no)
    }

    fn check_row_width(&self, row: &[u64]) -> Result<()> {
        if row.len() != self.schema.len() {
            return Err(Error::Schema(format!(
                "row width {} does not match schema width {}",
                row.len(),
                self.schema.len()
            )));
        }
        Ok(())
    }

    fn check_prefix(&self, prefix: &[u64]) -> Result<()> {
        if prefix.is_empty() || prefix.len() > self.key_fields.len() {
            return Err(Error::Schema(format!(
                "lookup prefix length {} must be 1..={}",
                prefix.len(),
                self.key_fields.len()
            )));
        }
        Ok(())
    }

    /// Directory entry range `[start, end)` whose pages may hold keys
    /// starting with `prefix`. At most one extra page (the left boundary)
    /// can turn out not to contain the prefix.
    fn dir_range(&self, prefix: &[u64]) -> (usize, usize) {
        let p = prefix.len();
        let cmp = |entry: &PageEntry| -> Ordering { entry.min_key[..p].cmp(prefix) };
        let lt = self.directory.partition_point(|e| cmp(e) == Ordering::Less);
        let le = self.directory.partition_point(|e| cmp(e) != Ordering::Greater);
        (lt.saturating_sub(1), le)
    }

    /// Exact-key location on unique or non-unique tables; returns the first
    /// slot with an equal key.
    fn locate(&self, key: &[u64]) -> Result<Option<(u64, usize)>> {
        let (start, end) = self.dir_range(key);
        let fields = self.schema.len();
        for entry in &self.directory[start..end] {
            let found = self.with_page(entry.page_no, |page| {
                let rows = page_rows(page);
                let mut lo = 0usize;
                let mut hi = rows;
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if row_at(page, mid, fields).cmp_key_prefix(&self.key_fields, key)
                        == Ordering::Less
                    {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                if lo < rows
                    && row_at(page, lo, fields).cmp_key_prefix(&self.key_fields, key)
                        == Ordering::Equal
                {
                    Some(lo)
                } else {
                    None
                }
            })?;
            if let Some(slot) = found {
                return Ok(Some((entry.page_no, slot)));
            }
        }
        Ok(None)
    }

    fn insert_sorted(&mut self, row: &[u64], key: Vec<u64>) -> Result<()> {
        if self.directory.is_empty() {
            let page_no = self.alloc_page()?;
            self.with_page_mut(page_no, |page| {
                write_row(page, 0, row);
                set_page_rows(page, 1);
            })?;
            self.directory.push(PageEntry { page_no, min_key: key });
            self.row_count += 1;
            self.modified = true;
            return Ok(());
        }

        let fields = self.schema.len();
        let row_bytes = self.schema.row_bytes();
        let capacity = self.schema.rows_per_page();
        loop {
            let dir_idx = self
                .directory
                .partition_point(|e| e.min_key.as_slice() <= key.as_slice())
                .saturating_sub(1);
            let page_no = self.directory[dir_idx].page_no;
            // Upper bound within the page: equal keys stay in front.
            let (rows, slot) = self.with_page(page_no, |page| {
                let rows = page_rows(page);
                let mut lo = 0usize;
                let mut hi = rows;
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if row_at(page, mid, fields).cmp_key_prefix(&self.key_fields, &key)
                        == Ordering::Greater
                    {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                (rows, lo)
            })?;

            if rows < capacity {
                self.with_page_mut(page_no, |page| {
                    shift_right(page, slot, rows, row_bytes);
                    write_row(page, slot, row);
                    set_page_rows(page, rows + 1);
                })?;
                if slot == 0 {
                    self.directory[dir_idx].min_key = key;
                }
                self.row_count += 1;
                self.modified = true;
                return Ok(());
            }

            if slot == capacity && dir_idx == self.directory.len() - 1 {
                // Appending run (sorted loads): open a fresh tail page
                // instead of half-splitting, so bulk inserts pack tightly.
                let page_no = self.alloc_page()?;
                self.with_page_mut(page_no, |page| {
                    write_row(page, 0, row);
                    set_page_rows(page, 1);
                })?;
                self.directory.push(PageEntry { page_no, min_key: key });
                self.row_count += 1;
                self.modified = true;
                return Ok(());
            }

            self.split_page(dir_idx)?;
        }
    }

    fn split_page(&mut self, dir_idx: usize) -> Result<()> {
        let fields = self.schema.len();
        let row_bytes = self.schema.row_bytes();
        let page_no = self.directory[dir_idx].page_no;
        let (keep, moved, upper, new_min) = self.with_page(page_no, |page| {
            let rows = page_rows(page);
            debug_assert!(rows >= 2, "cannot split a page with fewer than two rows");
            let keep = rows / 2;
            let from = PAGE_HEADER + keep * row_bytes;
            let to = PAGE_HEADER + rows * row_bytes;
            (
                keep,
                rows - keep,
                page[from..to].to_vec(),
                row_at(page, keep, fields).key(&self.key_fields),
            )
        })?;
        let new_page = self.alloc_page()?;
        self.with_page_mut(new_page, |page| {
            page[PAGE_HEADER..PAGE_HEADER + upper.len()].copy_from_slice(&upper);
            set_page_rows(page, moved);
        })?;
        self.with_page_mut(page_no, |page| set_page_rows(page, keep))?;
        self.directory.insert(
            dir_idx + 1,
            PageEntry {
                page_no: new_page,
                min_key: new_min,
            },
        );
        self.modified = true;
        Ok(())
    }

    // ── Metadata persistence ───────────────────────────────────────────

    fn index_entry_fields(&self) -> usize {
        1 + self.key_fields.len()
    }

    fn index_entries_per_page(&self) -> usize {
        PAGE_SIZE / (self.index_entry_fields() * FIELD_BYTES)
    }

    fn write_index(&self, index_start: u64) -> Result<u64> {
        let per_page = self.index_entries_per_page();
        let entry_fields = self.index_entry_fields();
        let mut pages = 0u64;
        for chunk in self.directory.chunks(per_page) {
            let page_no = index_start + pages;
            self.create_page(page_no)?;
            self.with_page_mut(page_no, |page| {
                for (j, entry) in chunk.iter().enumerate() {
                    let at = j * entry_fields * FIELD_BYTES;
                    page[at..at + FIELD_BYTES].copy_from_slice(&entry.page_no.to_le_bytes());
                    for (k, v) in entry.min_key.iter().enumerate() {
                        let o = at + (1 + k) * FIELD_BYTES;
                        page[o..o + FIELD_BYTES].copy_from_slice(&v.to_le_bytes());
                    }
                }
            })?;
            pages += 1;
        }
        Ok(pages)
    }

    fn build_header(&self, data_pages: u64, index_start: u64, index_pages: u64) -> Box<PageData> {
        let mut page = crate::storage::backend::boxed_page();
        page[0..4].copy_from_slice(&self.magic);
        page[4..6].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        page[6..8].copy_from_slice(&(self.schema.len() as u16).to_le_bytes());
        page[8] = self.unique as u8;
        page[9] = self.key_fields.len() as u8;
        page[16..24].copy_from_slice(&self.row_count.to_le_bytes());
        page[24..32].copy_from_slice(&data_pages.to_le_bytes());
        page[32..40].copy_from_slice(&index_start.to_le_bytes());
        page[40..48].copy_from_slice(&index_pages.to_le_bytes());
        page[48..56].copy_from_slice(&self.user_meta.to_le_bytes());
        for (i, name) in self.schema.fields().iter().enumerate() {
            let at = HEADER_NAMES_AT + i * NAME_SLOT;
            page[at..at + name.len()].copy_from_slice(name.as_bytes());
        }
        let keys_at = HEADER_NAMES_AT + self.schema.len() * NAME_SLOT;
        for (i, &k) in self.key_fields.iter().enumerate() {
            page[keys_at + i] = k as u8;
        }
        page
    }

    fn read_meta(&mut self, expected_magic: [u8; 4]) -> Result<()> {
        let header: Box<PageData> = self.with_page(0, |p| {
            let mut copy = crate::storage::backend::boxed_page();
            copy.copy_from_slice(p);
            copy
        })?;
        if header[0..4] != expected_magic {
            return Err(Error::corrupt(format!(
                "bad magic {:?}, expected {:?}",
                &header[0..4],
                expected_magic
            )));
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::corrupt(format!(
                "unsupported format version {version}"
            )));
        }
        let field_count = u16::from_le_bytes([header[6], header[7]]) as usize;
        let unique = header[8] != 0;
        let key_len = header[9] as usize;
        if field_count == 0 || field_count > crate::storage::row::MAX_FIELDS {
            return Err(Error::corrupt(format!("bad field count {field_count}")));
        }
        let row_count = u64::from_le_bytes(header[16..24].try_into().unwrap());
        let data_pages = u64::from_le_bytes(header[24..32].try_into().unwrap());
        let index_start = u64::from_le_bytes(header[32..40].try_into().unwrap());
        let index_pages = u64::from_le_bytes(header[40..48].try_into().unwrap());
        let user_meta = u64::from_le_bytes(header[48..56].try_into().unwrap());

        let mut names = Vec::with_capacity(field_count);
        for i in 0..field_count {
            let at = HEADER_NAMES_AT + i * NAME_SLOT;
            let slot = &header[at..at + NAME_SLOT];
            let end = slot.iter().position(|&b| b == 0).unwrap_or(NAME_SLOT);
            let name = std::str::from_utf8(&slot[..end])
                .map_err(|_| Error::corrupt("non-UTF-8 field name"))?;
            names.push(name.to_owned());
        }
        let schema = Schema::new(&names).map_err(|e| Error::corrupt(e.to_string()))?;
        let keys_at = HEADER_NAMES_AT + field_count * NAME_SLOT;
        let mut key_fields = Vec::with_capacity(key_len);
        for i in 0..key_len {
            let k = header[keys_at + i] as usize;
            if k >= field_count {
                return Err(Error::corrupt(format!("key field index {k} out of range")));
            }
            key_fields.push(k);
        }
        if key_fields.is_empty() {
            return Err(Error::corrupt("table has no clustered key"));
        }

        self.schema = schema;
        self.key_fields = key_fields;
        self.unique = unique;
        self.user_meta = user_meta;
        self.row_count = row_count;
        self.next_page = index_start + index_pages;

        // Rebuild the directory from the index pages.
        let entry_fields = self.index_entry_fields();
        let per_page = self.index_entries_per_page();
        let mut directory = Vec::with_capacity(data_pages as usize);
        for i in 0..data_pages as usize {
            let page_no = index_start + (i / per_page) as u64;
            let at = (i % per_page) * entry_fields * FIELD_BYTES;
            let entry = self.with_page(page_no, |page| {
                let data_page =
                    u64::from_le_bytes(page[at..at + FIELD_BYTES].try_into().unwrap());
                let min_key = (0..self.key_fields.len())
                    .map(|k| {
                        let o = at + (1 + k) * FIELD_BYTES;
                        u64::from_le_bytes(page[o..o + FIELD_BYTES].try_into().unwrap())
                    })
                    .collect::<Vec<u64>>();
                PageEntry {
                    page_no: data_page,
                    min_key,
                }
            })?;
            if entry.page_no == 0 || entry.page_no > data_pages {
                return Err(Error::corrupt(format!(
                    "index names data page {} outside 1..={data_pages}",
                    entry.page_no
                )));
            }
            directory.push(entry);
        }
        for pair in directory.windows(2) {
            if pair[0].min_key > pair[1].min_key {
                return Err(Error::corrupt("index min-keys are not sorted"));
            }
        }
        self.directory = directory;
        Ok(())
    }
}

impl Drop for Table {
    fn drop(&mut self) {
        // Scratch tables vanish with their frames; persistent ones get a
        // best-effort flush so a forgotten close loses nothing.
        if !self.temp && self.modified {
            let _ = self.flush();
        }
        let mut inner = self.session.borrow_mut();
        inner.pool.deregister(self.file);
        inner.names.remove(&self.name);
    }
}

fn resolve_key(schema: &Schema, key: &[&str]) -> Result<Vec<usize>> {
    if key.is_empty() {
        return Err(Error::Schema("clustered key needs at least one field".into()));
    }
    let mut out = Vec::with_capacity(key.len());
    for name in key {
        let idx = schema
            .field_index(name)
            .ok_or_else(|| Error::Schema(format!("unknown key field {name:?}")))?;
        if out.contains(&idx) {
            return Err(Error::Schema(format!("duplicate key field {name:?}")));
        }
        out.push(idx);
    }
    Ok(out)
}
