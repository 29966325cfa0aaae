//! Completions of marked group pairs: a group together with a subgroup
//! whose conjugates all meet it with finite index acts on the left cosets
//! of that subgroup, and the closure of the action is approached through
//! exact finite coset tables. Two instances are worked out: the lamp group
//! over the integers marked by an origin-pinned lamp subgroup, and the
//! determinant-one matrices with p-power denominators marked by the
//! integral ones. A wreath-product transfer for index-two subgroup maps
//! rounds out the toolkit.

pub mod arith;
pub mod lamp;
pub mod wreath;

pub use arith::ArithmeticPair;
pub use lamp::{
    completion_fingerprint, lamp_quotient_projection, nested_pinned_projection,
    pinned_orbit_index, FingerprintReport, LampElem, LampKernelReport, NestedCosetReport,
};
pub use wreath::{
    integer_mod_two_transfer, integer_transfer_with, symmetric_three_transfer,
    symmetric_three_transfer_with, WreathCheck,
};
