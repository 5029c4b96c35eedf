//! Finite-horizon versions of the selection arguments: interval windows
//! around a set, sub-sum and linking subsequence selection, and exact
//! row/column factors for operators given by links.
//!
//! Where the infinite arguments say "for all sufficiently large k", these
//! procedures check the inequality on the finite sequence and report the
//! first one that cannot be met.

mod factors;
mod intervals;
mod selection;

pub use factors::row_column_factors;
pub use intervals::{interval_family, IntervalFamily, Window};
pub use selection::{
    linking_select, sub_sum_select, verify_selection, LinkingCertificate, LinkingSelection, Selection,
    StepCertificate,
};
