//! Tabulation of number fields of bounded discriminant.

pub mod hpmbounds;
pub mod minorations;
pub mod ordermax;
pub mod polyarith;
pub mod sieve;
pub mod tabcli;
