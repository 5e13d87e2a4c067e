//! Numerical monoids: submonoids of `(N, +)` with finite complement.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cancellativity::{CancellationWitness, CaseTag};
use crate::error::{Error, Precondition, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NumericalMonoid {
    generators: Vec<u64>,
    gaps: Vec<u64>,
    frobenius: Option<u64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl NumericalMonoid {
    /// The monoid generated by `generators`, which must be positive with
    /// gcd 1.
    pub fn new(generators: &[u64]) -> Result<Self> {
        let mut gens: Vec<u64> = generators.to_vec();
        gens.sort_unstable();
        gens.dedup();
        if gens.is_empty() {
            return Err(Error::InvalidMonoid("no generators".into()));
        }
        if gens[0] == 0 {
            return Err(Error::InvalidMonoid("generators must be positive".into()));
        }
        if gens.iter().fold(0, |g, &x| gcd(g, x)) != 1 {
            return Err(Error::InvalidMonoid(format!(
                "generators {gens:?} have gcd greater than 1"
            )));
        }
        let min = gens[0];
        let max = *gens.last().expect("non-empty");
        let mut horizon = (min * max).max(1);
        loop {
            let reach = reachable(&gens, horizon);
            let last_gap = (0..=horizon).rev().find(|&x| !reach[x as usize]);
            // min consecutive members after the last gap settle every larger value
            let settled = match last_gap {
                None => true,
                Some(g) => g + min <= horizon,
            };
            if settled {
                let gaps: Vec<u64> = (0..=horizon).filter(|&x| !reach[x as usize]).collect();
                return Ok(NumericalMonoid {
                    generators: gens,
                    frobenius: last_gap,
                    gaps,
                });
            }
            horizon *= 2;
        }
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Sorted non-members.
    pub fn gaps(&self) -> &[u64] {
        &self.gaps
    }

    /// Largest non-member; `None` for `N` itself.
    pub fn frobenius(&self) -> Option<u64> {
        self.frobenius
    }

    pub fn multiplicity(&self) -> u64 {
        self.generators[0]
    }

    pub fn contains(&self, x: u64) -> bool {
        match self.frobenius {
            Some(f) if x <= f => self.gaps.binary_search(&x).is_err(),
            _ => true,
        }
    }

    pub fn report(&self) -> NmReport {
        NmReport {
            generators: self.generators.clone(),
            gaps: self.gaps.clone(),
            frobenius: self.frobenius,
            genus: self.gaps.len(),
        }
    }
}

fn reachable(gens: &[u64], horizon: u64) -> Vec<bool> {
    let mut reach = vec![false; horizon as usize + 1];
    reach[0] = true;
    for x in 1..=horizon as usize {
        reach[x] = gens
            .iter()
            .any(|&g| g as usize <= x && reach[x - g as usize]);
    }
    reach
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NmReport {
    pub generators: Vec<u64>,
    pub gaps: Vec<u64>,
    pub frobenius: Option<u64>,
    pub genus: usize,
}

/// Numerical monoids are isomorphic exactly when they are equal, so
/// comparing gap sets decides isomorphism.
pub fn nm_equal(a: &NumericalMonoid, b: &NumericalMonoid) -> bool {
    a.gaps == b.gaps
}

fn check_members(m: &NumericalMonoid, xs: &BTreeSet<u64>) -> Result<()> {
    match xs.iter().find(|&&x| !m.contains(x)) {
        Some(&value) => Err(Error::NonMemberInput { value }),
        None => Ok(()),
    }
}

/// `X + Y`.
pub fn nm_sumset(
    m: &NumericalMonoid,
    x: &BTreeSet<u64>,
    y: &BTreeSet<u64>,
) -> Result<BTreeSet<u64>> {
    check_members(m, x)?;
    check_members(m, y)?;
    let sum = sumset(x, y);
    if let Some(&value) = sum.iter().find(|&&s| !m.contains(s)) {
        return Err(Error::TheoremViolation(format!(
            "sum {value} escaped the monoid"
        )));
    }
    Ok(sum)
}

fn sumset(x: &BTreeSet<u64>, y: &BTreeSet<u64>) -> BTreeSet<u64> {
    x.iter()
        .flat_map(|a| y.iter().map(move |b| a + b))
        .collect()
}

/// Witness that a finite member set `A` with at least two elements is not
/// cancellative among finite subsets of `m`.
///
/// Addition is cancellative, so `a + a = a + b` never holds for `a != b`
/// and the construction always takes the second route: with `a < b` the
/// two smallest elements of `A`, `A + (A + A) = A + ((A + A) \ {a + b})`.
pub fn nm_witness_noncancellative(
    m: &NumericalMonoid,
    a_set: &BTreeSet<u64>,
) -> Result<CancellationWitness<BTreeSet<u64>>> {
    if a_set.len() < 2 {
        return Err(Error::precondition(Precondition::SubsetTooSmall));
    }
    check_members(m, a_set)?;
    if let Some(a) = a_set
        .iter()
        .find(|&&a| a_set.iter().any(|&b| b != a && a + a == a + b))
    {
        return Err(Error::TheoremViolation(format!(
            "addition failed to cancel at {a}"
        )));
    }
    let mut it = a_set.iter().copied();
    let a = it.next().expect("|A| >= 2");
    let b = it.next().expect("|A| >= 2");
    let lhs = sumset(a_set, a_set);
    let mut rhs = lhs.clone();
    rhs.remove(&(a + b));
    let w = CancellationWitness {
        case_tag: CaseTag::Case2,
        multiplier: a_set.clone(),
        lhs,
        rhs,
        pair: Some((a, b)),
    };
    verify_nm_witness(m, &w)?;
    Ok(w)
}

/// Distinct sets, member-only, equal sums with the multiplier, and `b + b`
/// kept in `rhs`.
pub fn verify_nm_witness(
    m: &NumericalMonoid,
    w: &CancellationWitness<BTreeSet<u64>>,
) -> Result<()> {
    let fail = |what: &str| Err(Error::TheoremViolation(format!("witness {w:?}: {what}")));
    if w.lhs == w.rhs || w.rhs.is_empty() {
        return fail("lhs and rhs not distinct non-empty sets");
    }
    if w.lhs.iter().chain(&w.rhs).any(|&x| !m.contains(x)) {
        return fail("non-member in lhs or rhs");
    }
    if sumset(&w.multiplier, &w.lhs) != sumset(&w.multiplier, &w.rhs) {
        return fail("sums differ");
    }
    if let Some((_, b)) = w.pair {
        if !w.rhs.contains(&(b + b)) {
            return fail("b + b missing from rhs");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[u64]) -> BTreeSet<u64> {
        xs.iter().copied().collect()
    }

    #[test]
    fn gaps_examples() {
        let m = NumericalMonoid::new(&[2, 3]).unwrap();
        assert_eq!(m.gaps(), &[1]);
        assert_eq!(m.frobenius(), Some(1));
        assert!(!m.contains(1));
        let m = NumericalMonoid::new(&[3, 5]).unwrap();
        assert_eq!(m.gaps(), &[1, 2, 4, 7]);
        assert_eq!(m.frobenius(), Some(7));
        assert!(!m.contains(7));
        assert!(m.contains(0) && m.contains(8) && m.contains(1000));
        let n = NumericalMonoid::new(&[1]).unwrap();
        assert!(n.gaps().is_empty());
        assert_eq!(n.frobenius(), None);
    }

    #[test]
    fn invalid_generators() {
        assert!(NumericalMonoid::new(&[]).is_err());
        assert!(NumericalMonoid::new(&[0, 1]).is_err());
        assert!(NumericalMonoid::new(&[4, 6]).is_err());
    }

    #[test]
    fn equality_examples() {
        let a = NumericalMonoid::new(&[2, 3]).unwrap();
        assert!(nm_equal(&a, &NumericalMonoid::new(&[3, 2, 2]).unwrap()));
        assert!(!nm_equal(&a, &NumericalMonoid::new(&[3, 4, 5]).unwrap()));
        // 11 is a gap of <4,6,9>; adding it as a generator closes only that gap
        let b = NumericalMonoid::new(&[4, 6, 9]).unwrap();
        let c = NumericalMonoid::new(&[4, 6, 9, 11]).unwrap();
        assert_eq!(b.gaps(), &[1, 2, 3, 5, 7, 11]);
        assert_eq!(c.gaps(), &[1, 2, 3, 5, 7]);
        assert!(!nm_equal(&b, &c));
    }

    #[test]
    fn sumset_examples() {
        let m = NumericalMonoid::new(&[2, 3]).unwrap();
        assert_eq!(
            nm_sumset(&m, &set(&[2, 3]), &set(&[2, 3])).unwrap(),
            set(&[4, 5, 6])
        );
        assert_eq!(
            nm_sumset(&m, &set(&[0]), &set(&[2, 7])).unwrap(),
            set(&[2, 7])
        );
        let m = NumericalMonoid::new(&[3, 5]).unwrap();
        assert_eq!(
            nm_sumset(&m, &set(&[3, 5]), &set(&[3])).unwrap(),
            set(&[6, 8])
        );
        assert!(matches!(
            nm_sumset(&m, &set(&[4]), &set(&[3])),
            Err(Error::NonMemberInput { value: 4 })
        ));
    }

    #[test]
    fn witness_examples() {
        let m = NumericalMonoid::new(&[2, 3]).unwrap();
        let w = nm_witness_noncancellative(&m, &set(&[2, 3])).unwrap();
        assert_eq!(w.lhs, set(&[4, 5, 6]));
        assert_eq!(w.rhs, set(&[4, 6]));
        assert_eq!(sumset(&w.multiplier, &w.rhs), set(&[6, 7, 8, 9]));

        let nat = NumericalMonoid::new(&[1]).unwrap();
        let w = nm_witness_noncancellative(&nat, &set(&[0, 1])).unwrap();
        assert_eq!(
            (w.lhs.clone(), w.rhs.clone()),
            (set(&[0, 1, 2]), set(&[0, 2]))
        );
        assert_eq!(sumset(&w.multiplier, &w.lhs), set(&[0, 1, 2, 3]));

        assert!(matches!(
            nm_witness_noncancellative(&m, &set(&[2])),
            Err(Error::PreconditionViolated(Precondition::SubsetTooSmall))
        ));
    }
}
