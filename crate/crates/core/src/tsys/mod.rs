//! Triangular and extended triangular systems of sets, their pointwise
//! orders and cuts, maximality and maximal completion.

mod check;
mod complete;
mod cut;
mod examples;
mod support;
mod system;

pub use check::{check_extended, check_extended_with, check_triangular, check_triangular_with, AxiomReport, CheckMode, Violation};
pub use complete::{complete_to_maximal, complete_with, Completion};
pub use cut::{cuts, induced_cut_at, is_maximal, Cut, MaximalityMode};
pub use examples::{build_example, nonsimple_system, upper_triangular_empty_cut, Constituent, CutCase, ExampleKind, ExampleSpec};
pub use support::{derive_support_system, SupportSystem};
pub use system::{parse_system, AnySystem, ExtTriSystem, IndexTemplate, OrderKind, SystemDoc, SystemParseError, TriSystem, VirtualTag};
