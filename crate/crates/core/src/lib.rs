//! Completely syndetic sets: construction, certification, refutation.
//!
//! A set `A ⊆ G` is `n`-syndetic when finitely many translates of `A` cover
//! every `n`-element subset of `G` at once — some translate contains the whole
//! subset — and completely syndetic when this holds for every `n`. This crate
//! provides:
//!
//! * block coding of subsets of ℤ ([`blocks`], [`descriptor`]),
//! * horizon-bounded witness checking, witness search and synthesis, and an
//!   exact refutation for the thick-but-not-completely-syndetic example
//!   ([`witness`]),
//! * the gap/run analysis that certifies a complement carries no uniform
//!   bounded-difference progression structure ([`uss`]),
//! * the triangular-array family of low-density completely syndetic sets
//!   ([`construction`]),
//! * lifts along surjections from finitely generated groups onto ℤ
//!   ([`group`]).

pub mod bigser;
pub mod blocks;
pub mod construction;
pub mod descriptor;
pub mod error;
pub mod group;
pub mod hitting;
pub mod rational;
pub mod uss;
pub mod window;
pub mod witness;

pub use descriptor::{Limits, MinusSpec, SetDescriptor, SetEval, StreamSpec};
pub use error::{Error, Result};
pub use window::Window;
