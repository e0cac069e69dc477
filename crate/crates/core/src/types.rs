//! Shared scalar and tuple types used across the storage and search layers.

use std::fmt;
use std::str::FromStr;

/// Node identifier. Stored on disk as a raw `u64` row field.
pub type NodeId = u64;

/// Sentinel meaning "no node": the NULL parent of an unreached row.
pub const NO_NODE: NodeId = u64::MAX;

/// A path or edge cost.
///
/// Costs are non-negative integers with a dedicated infinity, encoded as the
/// maximum representable field value. All arithmetic saturates: `INF + x`
/// stays `INF` and a finite sum that would overflow clamps to `INF` instead
/// of wrapping. Ordering is plain numeric order, so `INF` compares greater
/// than every finite cost — exactly what distance comparisons need.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(u64);

impl Cost {
    pub const ZERO: Cost = Cost(0);
    pub const INF: Cost = Cost(u64::MAX);

    /// A finite cost. Debug builds reject the `INF` bit pattern here; use
    /// [`Cost::INF`] when infinity is meant.
    pub fn new(v: u64) -> Cost {
        debug_assert!(v != u64::MAX, "use Cost::INF for the infinite cost");
        Cost(v)
    }

    /// Reinterpret a stored field without the finiteness check.
    pub fn from_raw(v: u64) -> Cost {
        Cost(v)
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0 != u64::MAX
    }

    /// Finite value, or `None` for `INF`.
    pub fn finite(self) -> Option<u64> {
        self.is_finite().then_some(self.0)
    }

    pub fn saturating_add(self, rhs: Cost) -> Cost {
        Cost(self.0.saturating_add(rhs.0))
    }

    /// `self - rhs` when both are finite and the difference is non-negative.
    pub fn checked_sub(self, rhs: Cost) -> Option<Cost> {
        if self.is_finite() && rhs.is_finite() {
            self.0.checked_sub(rhs.0).map(Cost)
        } else {
            None
        }
    }
}

impl std::ops::Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        self.saturating_add(rhs)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "{}", self.0)
        } else {
            f.write_str("INF")
        }
    }
}

impl fmt::Debug for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Cost {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> std::result::Result<Cost, Self::Err> {
        if s == "INF" {
            return Ok(Cost::INF);
        }
        s.parse::<u64>().map(Cost::from_raw)
    }
}

/// One directed edge `fid -> tid` with a finite weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeTuple {
    pub fid: NodeId,
    pub tid: NodeId,
    pub cost: Cost,
}

impl EdgeTuple {
    pub fn new(fid: NodeId, tid: NodeId, cost: u64) -> EdgeTuple {
        EdgeTuple {
            fid,
            tid,
            cost: Cost::new(cost),
        }
    }
}

/// Summary facts about a loaded graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphStats {
    /// Number of distinct nodes.
    pub n: u64,
    /// Number of edges after duplicate collapsing.
    pub m: u64,
    /// Minimum edge weight; several frontier rules and iteration bounds
    /// depend on it.
    pub w_min: Cost,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_addition() {
        let inf = Cost::INF;
        assert_eq!(inf + Cost::new(7), Cost::INF);
        assert_eq!(Cost::new(7) + inf, Cost::INF);
        assert_eq!(inf + inf, Cost::INF);
    }

    #[test]
    fn finite_overflow_saturates() {
        let big = Cost::from_raw(u64::MAX - 1);
        assert_eq!(big + big, Cost::INF);
        assert_eq!(big + Cost::ZERO, big);
    }

    #[test]
    fn ordering_puts_infinity_last() {
        assert!(Cost::new(0) < Cost::new(1));
        assert!(Cost::new(u64::MAX - 1) < Cost::INF);
    }

    #[test]
    fn display_and_parse_round_trip() {
        assert_eq!(Cost::INF.to_string(), "INF");
        assert_eq!(Cost::new(42).to_string(), "42");
        assert_eq!("INF".parse::<Cost>().unwrap(), Cost::INF);
        assert_eq!("42".parse::<Cost>().unwrap(), Cost::new(42));
        assert!("4x2".parse::<Cost>().is_err());
    }

    #[test]
    fn checked_sub_rejects_infinite_operands() {
        assert_eq!(Cost::new(9).checked_sub(Cost::new(4)), Some(Cost::new(5)));
        assert_eq!(Cost::new(4).checked_sub(Cost::new(9)), None);
        assert_eq!(Cost::INF.checked_sub(Cost::new(1)), None);
        assert_eq!(Cost::new(1).checked_sub(Cost::INF), None);
    }
}
