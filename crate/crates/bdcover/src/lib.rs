//! Explicit local-field arithmetic for Brylinski–Deligne covers of Sp(2n):
//! tame Hilbert symbols, Weil indices, the Kubota cover of GL(2), calibrated
//! stable conjugacy, rank-one transfer factors and the character θ†.

pub mod cli;
pub mod cover;
pub mod error;
pub mod etale;
pub mod literal;
pub mod localfield;
pub mod packetdata;
pub mod quadforms;
pub mod stabconj;
pub mod suites;
pub mod symbols;
pub mod transfer;

pub use error::{Error, Result};
