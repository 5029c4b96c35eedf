//! Exact Borel sets on `[0,1)` represented as finite unions of half-open
//! intervals with rational endpoints.
//!
//! Every set is kept in canonical form: intervals sorted, pairwise disjoint,
//! and never abutting. Two sets are equal as point sets exactly when their
//! canonical representations are equal, so `==` is set equality.
//!
//! Pointwise conditions on finite families of sets are decided on the
//! [`RefinementPartition`] of the family: every member is a union of whole
//! cells, so a condition holds everywhere iff it holds on every cell.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::Ratio<i64>;

/// Shorthand for `Rational::new(n, d)`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn in_unit(x: &Rational) -> bool {
    *x >= Rational::zero() && *x <= Rational::one()
}

/// Half-open interval `[lo, hi)` inside `[0,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if !in_unit(&lo) || !in_unit(&hi) {
            return Err(Error::Domain(format!(
                "interval endpoints must lie in [0,1], got [{lo}, {hi})"
            )));
        }
        if lo >= hi {
            return Err(Error::Domain(format!("empty or reversed interval [{lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> Rational {
        self.lo
    }

    pub fn hi(&self) -> Rational {
        self.hi
    }

    pub fn length(&self) -> Rational {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (self.lo + self.hi) / Rational::from_integer(2)
    }

    pub fn contains_point(&self, x: Rational) -> bool {
        self.lo <= x && x < self.hi
    }

    /// `self ⊆ other`.
    pub fn within(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

/// Boolean set operation for [`BorelSet::combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
}

impl SetOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            SetOp::Union => a || b,
            SetOp::Intersect => a && b,
            SetOp::Difference => a && !b,
        }
    }
}

/// Finite union of half-open rational intervals in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BorelSet {
    intervals: Vec<Interval>,
}

impl BorelSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The whole space `[0,1)`.
    pub fn full() -> Self {
        Self {
            intervals: vec![Interval { lo: Rational::zero(), hi: Rational::one() }],
        }
    }

    /// The single interval `[lo, hi)`; empty when `lo == hi`.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        if lo == hi && in_unit(&lo) {
            return Ok(Self::empty());
        }
        Ok(Self { intervals: vec![Interval::new(lo, hi)?] })
    }

    /// Builds the canonical form of an arbitrary union of intervals.
    pub fn canonicalize<I: IntoIterator<Item = Interval>>(intervals: I) -> Self {
        let mut items: Vec<Interval> = intervals.into_iter().collect();
        items.sort();
        let mut out: Vec<Interval> = Vec::with_capacity(items.len());
        for iv in items {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        Self { intervals: out }
    }

    /// Canonicalizes raw `(lo, hi)` pairs, rejecting endpoints outside `[0,1]`.
    /// Degenerate pairs with `lo == hi` contribute nothing.
    pub fn from_pairs<I: IntoIterator<Item = (Rational, Rational)>>(pairs: I) -> Result<Self> {
        let mut items = Vec::new();
        for (lo, hi) in pairs {
            if lo == hi {
                if !in_unit(&lo) {
                    return Err(Error::Domain(format!("endpoint {lo} outside [0,1]")));
                }
                continue;
            }
            items.push(Interval::new(lo, hi)?);
        }
        Ok(Self::canonicalize(items))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == Self::full()
    }

    /// Distinct endpoints of the canonical form, in increasing order.
    pub fn endpoints(&self) -> impl Iterator<Item = Rational> + '_ {
        self.intervals.iter().flat_map(|iv| [iv.lo, iv.hi])
    }

    pub fn contains_point(&self, x: Rational) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.hi <= x);
        self.intervals.get(idx).is_some_and(|iv| iv.contains_point(x))
    }

    /// `cell ⊆ self`. Canonical form never splits a covered interval, so a
    /// single member interval must contain the whole cell.
    pub fn contains_interval(&self, cell: &Interval) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.hi <= cell.lo);
        self.intervals.get(idx).is_some_and(|iv| cell.within(iv))
    }

    pub fn combine(&self, op: SetOp, other: &BorelSet) -> BorelSet {
        let mut cuts: Vec<Rational> = self.endpoints().chain(other.endpoints()).collect();
        cuts.sort();
        cuts.dedup();
        let pieces = cuts.windows(2).filter_map(|w| {
            let piece = Interval { lo: w[0], hi: w[1] };
            let a = self.contains_interval(&piece);
            let b = other.contains_interval(&piece);
            op.apply(a, b).then_some(piece)
        });
        Self::canonicalize(pieces)
    }

    pub fn union(&self, other: &BorelSet) -> BorelSet {
        self.combine(SetOp::Union, other)
    }

    pub fn intersect(&self, other: &BorelSet) -> BorelSet {
        self.combine(SetOp::Intersect, other)
    }

    pub fn difference(&self, other: &BorelSet) -> BorelSet {
        self.combine(SetOp::Difference, other)
    }

    pub fn complement(&self) -> BorelSet {
        Self::full().difference(self)
    }

    pub fn is_subset(&self, other: &BorelSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Rational {
        self.intervals.iter().map(Interval::length).sum()
    }

    /// Union of the given cells.
    pub fn from_cells<'a, I>(cells: I) -> BorelSet
    where
        I: IntoIterator<Item = &'a Interval>,
    {
        Self::canonicalize(cells.into_iter().copied())
    }
}

impl fmt::Display for BorelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (n, iv) in self.intervals.iter().enumerate() {
            if n > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// Union of a family of sets.
pub fn union_all<'a, I: IntoIterator<Item = &'a BorelSet>>(sets: I) -> BorelSet {
    BorelSet::canonicalize(sets.into_iter().flat_map(|s| s.intervals.iter().copied()))
}

/// Consecutive cells exhausting `[0,1)` such that every set of the
/// generating family is a union of whole cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementPartition {
    cells: Vec<Interval>,
}

impl RefinementPartition {
    /// Minimal partition cut at every endpoint of every member.
    pub fn of<'a, I: IntoIterator<Item = &'a BorelSet>>(family: I) -> Self {
        let mut cuts = vec![Rational::zero(), Rational::one()];
        for set in family {
            cuts.extend(set.endpoints());
        }
        Self::from_cuts(cuts)
    }

    /// Partition cut at the given points (plus 0 and 1).
    pub fn from_cuts<I: IntoIterator<Item = Rational>>(cuts: I) -> Self {
        let mut cuts: Vec<Rational> = cuts.into_iter().filter(in_unit).collect();
        cuts.push(Rational::zero());
        cuts.push(Rational::one());
        cuts.sort();
        cuts.dedup();
        let cells = cuts.windows(2).map(|w| Interval { lo: w[0], hi: w[1] }).collect();
        Self { cells }
    }

    /// The uniform grid with `m` cells of width `1/m`.
    pub fn grid(m: usize) -> Self {
        let m = m.max(1) as i64;
        Self::from_cuts((0..=m).map(|q| rat(q, m)))
    }

    pub fn cells(&self) -> &[Interval] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the cell containing `x ∈ [0,1)`.
    pub fn cell_of(&self, x: Rational) -> Result<usize> {
        if x < Rational::zero() || x >= Rational::one() {
            return Err(Error::Domain(format!("point {x} outside [0,1)")));
        }
        Ok(self.cells.partition_point(|c| c.hi <= x))
    }

    /// Whether `set` is a union of whole cells of this partition.
    pub fn resolves(&self, set: &BorelSet) -> bool {
        set.endpoints()
            .all(|e| e == Rational::one() || self.cells.binary_search_by(|c| c.lo.cmp(&e)).is_ok())
    }

    /// Indices of the cells contained in `set`.
    pub fn cells_in(&self, set: &BorelSet) -> Vec<usize> {
        (0..self.cells.len()).filter(|&n| set.contains_interval(&self.cells[n])).collect()
    }
}

impl PartialOrd for BorelSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_subset(other), other.is_subset(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

// ---------------------------------------------------------------------------
// JSON encoding: rationals as [numerator, denominator]; a set as a list of
// [lo_num, lo_den, hi_num, hi_den] tuples.

pub mod rational_pair {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        [*x.numer(), *x.denom()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let [n, den] = <[i64; 2]>::deserialize(d)?;
        checked(n, den).map_err(D::Error::custom)
    }

    pub(crate) fn checked(n: i64, d: i64) -> std::result::Result<Rational, String> {
        if d <= 0 {
            return Err(format!("denominator must be positive, got {n}/{d}"));
        }
        Ok(Rational::new(n, d))
    }
}

pub mod rational_list {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[i64; 2]> = xs.iter().map(|x| [*x.numer(), *x.denom()]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let pairs = Vec::<[i64; 2]>::deserialize(d)?;
        pairs
            .into_iter()
            .map(|[n, den]| rational_pair::checked(n, den).map_err(D::Error::custom))
            .collect()
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [*self.lo.numer(), *self.lo.denom(), *self.hi.numer(), *self.hi.denom()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [ln, ld, hn, hd] = <[i64; 4]>::deserialize(d)?;
        let lo = rational_pair::checked(ln, ld).map_err(D::Error::custom)?;
        let hi = rational_pair::checked(hn, hd).map_err(D::Error::custom)?;
        Interval::new(lo, hi).map_err(D::Error::custom)
    }
}

impl Serialize for BorelSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.intervals.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BorelSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Interval>::deserialize(d)?;
        Ok(BorelSet::canonicalize(raw))
    }
}
