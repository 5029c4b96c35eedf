//! A finite model of the uniform infinite-multiplicity nest: `m` grid cells
//! standing in for `[0,1)`, `k` blocks for the atoms `E_i` and `c` channels
//! for the multiplicity. Operators are dense complex matrices in the basis
//! `(cell, block, channel)`; fixtures are exact weighted link lists.

mod fixtures;
mod inequality;
mod membership;
mod operator;
mod random;
mod seminorm;
mod space;

pub use fixtures::{
    build_fixture, link_extent, member, nonclosure, nonsimple, rinf_witness, violator, Fixture, FixtureSpec,
};
pub use inequality::{product_inequality_cells, product_inequality_check, ProductInequality, SLACK};
pub use membership::{is_larson_member, membership, ConditionReport, ConditionViolation, MembershipReport};
pub use operator::{
    modulus_exceeds, project, selector_links, spectral_norm, unit, weight, weight_from_f64, weight_to_c64,
    BlockOperator, Link, LinkOperator, Selector, Weight,
};
pub use random::{random_nest_operator, random_operator, random_upper_triangular};
pub use seminorm::{
    cell_profile, cell_values, compressed_seminorm, compressed_window_norm, diag_seminorm, liminal, liminal_values,
    rinf_seminorm, window_norm, Axis, BlockSet, ProfileRow, SeminormProfile,
};
pub use space::{ModelSpace, Site};
