//! Power semigroups of finite semigroups.
//!
//! The crate builds `P(S)`, the non-empty subsets of a finite semigroup `S`
//! under the setwise product, along with downward-complete subfamilies of
//! it, and offers the tools needed to study them: cancellativity
//! classifiers with explicit non-cancellation witnesses, an isomorphism
//! search for small semigroups, lifting and restriction of isomorphisms
//! between power semigroups, an exhaustive catalog of semigroups of order
//! at most five, and the two infinite carriers that matter for the theory
//! (numerical monoids and free semigroups).

pub mod cancellativity;
pub mod catalog;
pub mod error;
pub mod isomorphism;
pub mod power;
pub mod report;
pub mod semigroup;
pub mod witnesses;

pub use error::{Error, Result};
pub use power::{SubsetElement, SubsetFamily};
pub use semigroup::{Congruence, FiniteSemigroup};
