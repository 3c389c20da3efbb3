//! Probabilistic epistemic situation calculus.
//!
//! Action theories are parsed from a small declarative language
//! ([`theory`]), belief states are progressed exactly over weighted sets
//! of situation histories ([`engine`]), and a brute-force [`oracle`]
//! recomputes the same quantities from first principles. [`gaussian`]
//! holds the closed-form Kalman recursion and Normal discretization.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod gaussian;
pub mod model;
pub mod oracle;
pub mod theory;
