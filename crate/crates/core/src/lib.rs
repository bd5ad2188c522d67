//! Fixed-vector dimensions and Atkin-Lehner signatures for nongeneric depth
//! zero supercuspidal representations of `GSp(4)` induced from the
//! normaliser of the paramodular-type maximal compact subgroup.

pub mod chars;
pub mod finitegrp;
pub mod identities;
pub mod models;
pub mod numerics;
pub mod padic;
pub mod support;
pub mod verify;
