//! Exact moment-problem and sums-of-squares tooling for `*`-algebras of
//! complex polynomial fractions and their semigroup counterparts.

pub mod polycore;
pub mod fracalg;
pub mod fibres;
pub mod sos;
pub mod graded;
pub mod semigroups;
