//! Row and page byte layout.
//!
//! Rows are fixed width: every field is a little-endian `u64`, so a row of
//! `f` fields occupies `8 * f` bytes. A data page starts with an 8-byte
//! header (row count in the first two bytes) followed by packed rows. There
//! is no variable-length data and no per-row header, which keeps slot
//! arithmetic trivial and scans branch-free.

use crate::error::{Error, Result};
use crate::storage::backend::{PageData, PAGE_SIZE};

/// A materialized row.
pub type Row = Vec<u64>;

pub(crate) const PAGE_HEADER: usize = 8;
pub(crate) const FIELD_BYTES: usize = 8;

/// Maximum fields per table; keeps at least two rows on every page so page
/// splits always make progress.
pub const MAX_FIELDS: usize = 128;

const MAX_NAME_BYTES: usize = 15;

/// Ordered field names of a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    fields: Vec<String>,
}

impl Schema {
    pub fn new<S: AsRef<str>>(fields: &[S]) -> Result<Schema> {
        let fields: Vec<String> = fields.iter().map(|f| f.as_ref().to_owned()).collect();
        if fields.is_empty() {
            return Err(Error::Schema("a table needs at least one field".into()));
        }
        if fields.len() > MAX_FIELDS {
            return Err(Error::Schema(format!(
                "{} fields exceeds the limit of {MAX_FIELDS}",
                fields.len()
            )));
        }
        for name in &fields {
            if name.is_empty() || name.len() > MAX_NAME_BYTES {
                return Err(Error::Schema(format!(
                    "field name {name:?} must be 1..={MAX_NAME_BYTES} bytes"
                )));
            }
            if !name.bytes().all(|b| b.is_ascii_graphic()) {
                return Err(Error::Schema(format!(
                    "field name {name:?} must be printable ASCII"
                )));
            }
        }
        for (i, name) in fields.iter().enumerate() {
            if fields[..i].contains(name) {
                return Err(Error::Schema(format!("duplicate field name {name:?}")));
            }
        }
        Ok(Schema { fields })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn fields(&self) -> &[String] {
        &self.fields
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f == name)
    }

    pub fn row_bytes(&self) -> usize {
        self.fields.len() * FIELD_BYTES
    }

    pub fn rows_per_page(&self) -> usize {
        (PAGE_SIZE - PAGE_HEADER) / self.row_bytes()
    }
}

/// A borrowed view of one row inside a page.
#[derive(Clone, Copy)]
pub struct RowRef<'a> {
    bytes: &'a [u8],
    fields: usize,
}

impl<'a> RowRef<'a> {
    #[inline]
    pub fn get(&self, field: usize) -> u64 {
        let at = field * FIELD_BYTES;
        u64::from_le_bytes(self.bytes[at..at + FIELD_BYTES].try_into().unwrap())
    }

    pub fn width(&self) -> usize {
        self.fields
    }

    pub fn to_vec(&self) -> Row {
        (0..self.fields).map(|i| self.get(i)).collect()
    }

    pub fn key(&self, key_fields: &[usize]) -> Vec<u64> {
        key_fields.iter().map(|&i| self.get(i)).collect()
    }

    /// Compares this row's key against `prefix`, field by field.
    #[inline]
    pub fn cmp_key_prefix(&self, key_fields: &[usize], prefix: &[u64]) -> std::cmp::Ordering {
        for (&field, &want) in key_fields.iter().zip(prefix) {
            match self.get(field).cmp(&want) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    }
}

#[inline]
pub(crate) fn page_rows(page: &PageData) -> usize {
    u16::from_le_bytes([page[0], page[1]]) as usize
}

pub(crate) fn set_page_rows(page: &mut PageData, rows: usize) {
    debug_assert!(rows <= u16::MAX as usize);
    page[0..2].copy_from_slice(&(rows as u16).to_le_bytes());
}

#[inline]
pub(crate) fn row_at(page: &PageData, slot: usize, fields: usize) -> RowRef<'_> {
    let width = fields * FIELD_BYTES;
    let at = PAGE_HEADER + slot * width;
    RowRef {
        bytes: &page[at..at + width],
        fields,
    }
}

pub(crate) fn write_row(page: &mut PageData, slot: usize, row: &[u64]) {
    let at = PAGE_HEADER + slot * row.len() * FIELD_BYTES;
    for (i, v) in row.iter().enumerate() {
        let o = at + i * FIELD_BYTES;
        page[o..o + FIELD_BYTES].copy_from_slice(&v.to_le_bytes());
    }
}

/// Opens a gap at `slot`, shifting rows `slot..rows` one position right.
pub(crate) fn shift_right(page: &mut PageData, slot: usize, rows: usize, row_bytes: usize) {
    let start = PAGE_HEADER + slot * row_bytes;
    let end = PAGE_HEADER + rows * row_bytes;
    page.copy_within(start..end, start + row_bytes);
}

pub(crate) fn extract_key(row: &[u64], key_fields: &[usize]) -> Vec<u64> {
    key_fields.iter().map(|&i| row[i]).collect()
}
