//! Cancellative elements of subset families.
//!
//! Two classifiers live here. The brute-force one inspects every product in
//! the family and is the reference answer. The structural one applies to
//! downward-complete families over a commutative carrier: their cancellative
//! members are exactly the singletons `{u}` with `u` cancellative in the
//! carrier. The explicit witness construction below shows, for any member
//! with two or more elements, two distinct members it fails to separate.

use serde::Serialize;

use crate::error::{Error, Precondition, Result};
use crate::power::{SubsetElement, SubsetFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// Some `a != b` in the multiplier with `a*a = a*b`.
    Case1,
    /// No such pair; uses `A*A` and `A*A` minus the product `a*b`.
    Case2,
    /// Collision found by exhaustive search.
    BruteForce,
}

/// Certificate that `multiplier` is not cancellative: it multiplies the
/// distinct sets `lhs` and `rhs` to the same product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CancellationWitness<T> {
    #[serde(rename = "case")]
    pub case_tag: CaseTag,
    pub multiplier: T,
    pub lhs: T,
    pub rhs: T,
    /// The elements `(a, b)` chosen by the construction.
    #[serde(skip)]
    pub pair: Option<(u64, u64)>,
}

impl<T> CancellationWitness<T> {
    pub fn case(&self) -> CaseTag {
        self.case_tag
    }
}

/// Left and right cancellativity of `m` inside the family.
pub fn cancellativity_in_family(family: &SubsetFamily, m: SubsetElement) -> (bool, bool) {
    (
        first_collision(family, m, Side::Left).is_none(),
        first_collision(family, m, Side::Right).is_none(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// First pair of distinct members `(x, y)` with `m*x = m*y` (or `x*m = y*m`).
fn first_collision(
    family: &SubsetFamily,
    m: SubsetElement,
    side: Side,
) -> Option<(SubsetElement, SubsetElement)> {
    let mut seen: std::collections::HashMap<SubsetElement, SubsetElement> =
        std::collections::HashMap::with_capacity(family.len());
    for &x in family.members() {
        let p = match side {
            Side::Left => family.product(m, x),
            Side::Right => family.product(x, m),
        };
        if let Some(&prev) = seen.get(&p) {
            return Some((prev, x));
        }
        seen.insert(p, x);
    }
    None
}

/// Members `m` for which both `x -> m*x` and `x -> x*m` are injective on
/// the family.
pub fn cancellative_elements_bruteforce(family: &SubsetFamily) -> Result<Vec<SubsetElement>> {
    if !family.is_subsemigroup() {
        return Err(Error::precondition(Precondition::NotSubsemigroup));
    }
    Ok(family
        .members()
        .iter()
        .copied()
        .filter(|&m| {
            first_collision(family, m, Side::Left).is_none()
                && first_collision(family, m, Side::Right).is_none()
        })
        .collect())
}

/// A brute-force non-cancellation witness for `m`, if one exists.
pub fn bruteforce_witness(
    family: &SubsetFamily,
    m: SubsetElement,
) -> Option<CancellationWitness<SubsetElement>> {
    first_collision(family, m, Side::Left)
        .or_else(|| first_collision(family, m, Side::Right))
        .map(|(lhs, rhs)| CancellationWitness {
            case_tag: CaseTag::BruteForce,
            multiplier: m,
            lhs,
            rhs,
            pair: None,
        })
}

fn require_commutative_complete(family: &SubsetFamily) -> Result<()> {
    if !family.ambient().is_commutative() {
        return Err(Error::precondition(Precondition::NotCommutative));
    }
    if !family.is_downward_complete() {
        return Err(Error::precondition(Precondition::NotDownwardComplete));
    }
    Ok(())
}

/// Cancellative members of a downward-complete family over a commutative
/// carrier, read off the carrier alone: the singletons of its cancellative
/// elements. No product of non-singletons is inspected.
pub fn classify_cancellatives_structural(family: &SubsetFamily) -> Result<Vec<SubsetElement>> {
    require_commutative_complete(family)?;
    let s = family.ambient();
    let mut out: Vec<SubsetElement> = (0..s.order())
        .filter(|&u| s.left_cancellative(u) && s.right_cancellative(u))
        .map(SubsetElement::singleton)
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Builds a witness that `a_set` (with at least two elements) is not
/// cancellative in a downward-complete family over a commutative carrier.
///
/// Case 1 scans ordered pairs `(a, b)`, `a != b`, in ascending order for
/// `a*a = a*b` and returns `(A, A, A \ {a})`. Otherwise Case 2 takes the two
/// smallest elements `a < b` of `A` and returns `(A, A*A, A*A \ {a*b})`.
/// The result is checked before it is returned; a failed check is reported
/// as [`Error::TheoremViolation`].
pub fn witness_noncancellative(
    family: &SubsetFamily,
    a_set: SubsetElement,
) -> Result<CancellationWitness<SubsetElement>> {
    require_commutative_complete(family)?;
    if a_set.len() < 2 {
        return Err(Error::precondition(Precondition::SubsetTooSmall));
    }
    if !family.contains(a_set) {
        return Err(Error::precondition(Precondition::NotMember));
    }
    let s = family.ambient();
    let case1 = a_set.elements().find_map(|a| {
        a_set
            .elements()
            .find(|&b| b != a && s.mul(a, a) == s.mul(a, b))
            .map(|b| (a, b))
    });
    let witness = match case1 {
        Some((a, b)) => CancellationWitness {
            case_tag: CaseTag::Case1,
            multiplier: a_set,
            lhs: a_set,
            rhs: a_set.without(a).expect("|A| >= 2"),
            pair: Some((a as u64, b as u64)),
        },
        None => {
            let mut it = a_set.elements();
            let a = it.next().expect("|A| >= 2");
            let b = it.next().expect("|A| >= 2");
            let square = family.product(a_set, a_set);
            let rhs = square.without(s.mul(a, b)).ok_or_else(|| {
                Error::TheoremViolation(format!(
                    "A*A = {square} collapses to the single product a*b for A = {a_set}"
                ))
            })?;
            CancellationWitness {
                case_tag: CaseTag::Case2,
                multiplier: a_set,
                lhs: square,
                rhs,
                pair: Some((a as u64, b as u64)),
            }
        }
    };
    verify_witness(family, &witness)?;
    Ok(witness)
}

/// Checks the witness invariants against `family`: the two sets differ,
/// both are members, both products (left and right) agree, and for Case 2
/// the square `b*b` lies in `rhs`.
pub fn verify_witness(family: &SubsetFamily, w: &CancellationWitness<SubsetElement>) -> Result<()> {
    let fail = |what: &str| {
        Err(Error::TheoremViolation(format!(
            "{:?} witness for {}: {what}",
            w.case_tag, w.multiplier
        )))
    };
    if w.lhs == w.rhs {
        return fail("lhs equals rhs");
    }
    if !family.contains(w.lhs) || !family.contains(w.rhs) {
        return fail("lhs or rhs outside the family");
    }
    let left_ok = family.product(w.multiplier, w.lhs) == family.product(w.multiplier, w.rhs);
    let right_ok = family.product(w.lhs, w.multiplier) == family.product(w.rhs, w.multiplier);
    match w.case_tag {
        CaseTag::BruteForce => {
            if !left_ok && !right_ok {
                return fail("products differ");
            }
        }
        CaseTag::Case1 | CaseTag::Case2 => {
            if !left_ok || !right_ok {
                return fail("products differ");
            }
        }
    }
    if w.case_tag == CaseTag::Case2 {
        let (_, b) = w.pair.expect("case 2 records its pair");
        let s = family.ambient();
        if !w.rhs.contains(s.mul(b as usize, b as usize)) {
            return fail("b*b missing from rhs");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::power::downward_complete_closure;
    use crate::semigroup::FiniteSemigroup;

    fn set(xs: &[usize]) -> SubsetElement {
        SubsetElement::from_elements(xs.iter().copied()).unwrap()
    }

    fn full(s: FiniteSemigroup) -> SubsetFamily {
        SubsetFamily::full(Arc::new(s)).unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        let pz2 = full(FiniteSemigroup::cyclic_group(2));
        assert_eq!(
            cancellative_elements_bruteforce(&pz2).unwrap(),
            vec![set(&[0]), set(&[1])]
        );

        let z3 = Arc::new(FiniteSemigroup::cyclic_group(3));
        let singles = SubsetFamily::singletons(z3);
        assert_eq!(cancellative_elements_bruteforce(&singles).unwrap().len(), 3);

        let pnull = full(FiniteSemigroup::null_semigroup(2));
        assert!(cancellative_elements_bruteforce(&pnull).unwrap().is_empty());
    }

    #[test]
    fn bruteforce_requires_subsemigroup() {
        let z3 = Arc::new(FiniteSemigroup::cyclic_group(3));
        let fam = SubsetFamily::new(z3, [set(&[0, 1])]).unwrap();
        assert!(matches!(
            cancellative_elements_bruteforce(&fam),
            Err(Error::PreconditionViolated(Precondition::NotSubsemigroup))
        ));
    }

    #[test]
    fn structural_examples() {
        let pz3 = full(FiniteSemigroup::cyclic_group(3));
        assert_eq!(
            classify_cancellatives_structural(&pz3).unwrap(),
            vec![set(&[0]), set(&[1]), set(&[2])]
        );
        let pand = full(FiniteSemigroup::min_semilattice(2));
        assert_eq!(
            classify_cancellatives_structural(&pand).unwrap(),
            vec![set(&[1])]
        );
        assert_eq!(
            cancellative_elements_bruteforce(&pand).unwrap(),
            vec![set(&[1])]
        );

        let plz = full(FiniteSemigroup::left_zero(2));
        assert!(matches!(
            classify_cancellatives_structural(&plz),
            Err(Error::PreconditionViolated(Precondition::NotCommutative))
        ));
        let z3 = Arc::new(FiniteSemigroup::cyclic_group(3));
        let partial = SubsetFamily::new(z3, [set(&[0])]).unwrap();
        assert!(matches!(
            classify_cancellatives_structural(&partial),
            Err(Error::PreconditionViolated(
                Precondition::NotDownwardComplete
            ))
        ));
    }

    #[test]
    fn witness_case1_semilattice() {
        let pand = full(FiniteSemigroup::min_semilattice(2));
        let w = witness_noncancellative(&pand, set(&[0, 1])).unwrap();
        assert_eq!(w.case(), CaseTag::Case1);
        assert_eq!(
            (w.multiplier, w.lhs, w.rhs),
            (set(&[0, 1]), set(&[0, 1]), set(&[1]))
        );
        assert_eq!(pand.product(w.multiplier, w.lhs), set(&[0, 1]));
    }

    #[test]
    fn witness_case2_cyclic() {
        let pz3 = full(FiniteSemigroup::cyclic_group(3));
        let w = witness_noncancellative(&pz3, set(&[0, 1])).unwrap();
        assert_eq!(w.case(), CaseTag::Case2);
        assert_eq!((w.lhs, w.rhs), (set(&[0, 1, 2]), set(&[0, 2])));
        assert_eq!(pz3.product(w.multiplier, w.rhs), set(&[0, 1, 2]));

        let pz2 = full(FiniteSemigroup::cyclic_group(2));
        let w = witness_noncancellative(&pz2, set(&[0, 1])).unwrap();
        assert_eq!(w.case(), CaseTag::Case2);
        assert_eq!((w.lhs, w.rhs), (set(&[0, 1]), set(&[0])));
    }

    #[test]
    fn witness_preconditions() {
        let pz3 = full(FiniteSemigroup::cyclic_group(3));
        assert!(matches!(
            witness_noncancellative(&pz3, set(&[1])),
            Err(Error::PreconditionViolated(Precondition::SubsetTooSmall))
        ));
        let z3 = Arc::new(FiniteSemigroup::cyclic_group(3));
        let singles = downward_complete_closure(z3, &[]).unwrap();
        assert!(matches!(
            witness_noncancellative(&singles, set(&[0, 1])),
            Err(Error::PreconditionViolated(Precondition::NotMember))
        ));
    }

    #[test]
    fn witness_json_shape() {
        let pz3 = full(FiniteSemigroup::cyclic_group(3));
        let w = witness_noncancellative(&pz3, set(&[0, 1])).unwrap();
        assert_eq!(
            serde_json::to_value(&w).unwrap(),
            serde_json::json!({"case": "Case2", "multiplier": 3, "lhs": 7, "rhs": 5})
        );
    }

    #[test]
    fn noncommutative_bruteforce_witness() {
        // left-zero band: {0}*X = {0} for every X
        let plz = full(FiniteSemigroup::left_zero(2));
        let w = bruteforce_witness(&plz, set(&[0])).unwrap();
        verify_witness(&plz, &w).unwrap();
        assert_eq!(w.case(), CaseTag::BruteForce);
    }
}
