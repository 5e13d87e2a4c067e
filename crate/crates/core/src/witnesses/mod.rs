//! The infinite carriers: numerical monoids and free semigroups, plus the
//! identity-preservation property of surjective homomorphisms between
//! monoids.

pub mod free;
pub mod numerical;

use crate::error::{Error, Precondition, Result};
use crate::isomorphism::Morphism;

/// For a surjective homomorphism between monoids, whether the source
/// identity maps to the target identity.
pub fn identity_preserved(f: &Morphism) -> Result<bool> {
    if !f.is_homomorphism() || !f.is_surjective() {
        return Err(Error::precondition(Precondition::Other(
            "expected a surjective homomorphism".into(),
        )));
    }
    match (f.source().identity(), f.target().identity()) {
        (Some(e), Some(e2)) => Ok(f.apply(e) == e2),
        _ => Err(Error::precondition(Precondition::Other(
            "source and target must be monoids".into(),
        ))),
    }
}
