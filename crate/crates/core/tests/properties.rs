use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use powersemi::catalog::{enumerate_semigroups, Catalog, CatalogOptions};
use powersemi::isomorphism::{
    all_homomorphisms_exhaustive, find_isomorphism, lift_isomorphism, IsoFingerprint, Morphism,
};
use powersemi::power::{downward_complete_closure, power_element, DEFAULT_POWER_CAP};
use powersemi::witnesses::identity_preserved;
use powersemi::{FiniteSemigroup, SubsetElement};

fn catalogs() -> &'static [Catalog] {
    static CATS: OnceLock<Vec<Catalog>> = OnceLock::new();
    CATS.get_or_init(|| {
        (1..=4)
            .map(|n| enumerate_semigroups(n, true, CatalogOptions::default()).unwrap())
            .collect()
    })
}

fn entry(order: usize, index: usize) -> Arc<FiniteSemigroup> {
    let c = &catalogs()[order - 1];
    c.entries[index % c.entries.len()].semigroup.clone()
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn semigroup_and_perm() -> impl Strategy<Value = (Arc<FiniteSemigroup>, Vec<usize>)> {
    (1usize..=4, any::<usize>()).prop_flat_map(|(n, i)| (Just(entry(n, i)), perm_strategy(n)))
}

proptest! {
    #[test]
    fn singleton_embedding_is_homomorphism(n in 1usize..=4, i in any::<usize>()) {
        let s = entry(n, i);
        for a in 0..n {
            for b in 0..n {
                let p = s.setwise_product(SubsetElement::singleton(a), SubsetElement::singleton(b)).unwrap();
                prop_assert_eq!(p, SubsetElement::singleton(s.mul(a, b)));
            }
        }
    }

    #[test]
    fn fingerprint_and_search_survive_relabelling((s, perm) in semigroup_and_perm()) {
        let t = Arc::new(s.relabel(&perm).unwrap());
        prop_assert_eq!(IsoFingerprint::of(&s), IsoFingerprint::of(&t));
        let f = find_isomorphism(&s, &t);
        let g = find_isomorphism(&t, &s);
        prop_assert!(f.as_ref().is_some_and(Morphism::is_isomorphism));
        prop_assert!(g.is_some());
    }

    #[test]
    fn lift_preserves_cardinality((s, perm) in semigroup_and_perm()) {
        let t = Arc::new(s.relabel(&perm).unwrap());
        let f = find_isomorphism(&s, &t).unwrap();
        let big = lift_isomorphism(&f, DEFAULT_POWER_CAP).unwrap();
        for i in 0..big.source().order() {
            prop_assert_eq!(power_element(i).len(), power_element(big.apply(i)).len());
        }
    }

    #[test]
    fn closure_is_idempotent_and_monotone(n in 1usize..=4, i in any::<usize>(), g in 1u64..16, h in 1u64..16) {
        let s = entry(n, i);
        let full = (1u64 << n) - 1;
        let (g, h) = (SubsetElement::new(g & full).unwrap_or(SubsetElement::singleton(0)),
                      SubsetElement::new(h & full).unwrap_or(SubsetElement::singleton(0)));
        let small = downward_complete_closure(s.clone(), &[g]).unwrap();
        let again = downward_complete_closure(s.clone(), small.members()).unwrap();
        prop_assert_eq!(&small, &again);
        prop_assert!(small.is_downward_complete());
        let big = downward_complete_closure(s, &[g, h]).unwrap();
        prop_assert!(small.members().iter().all(|m| big.contains(*m)));
    }
}

#[test]
fn search_is_symmetric_across_catalog_order_3() {
    let c = &catalogs()[2];
    for a in &c.entries {
        for b in &c.entries {
            let ab = find_isomorphism(&a.semigroup, &b.semigroup).is_some();
            let ba = find_isomorphism(&b.semigroup, &a.semigroup).is_some();
            assert_eq!(ab, ba);
            assert_eq!(ab, a.id == b.id);
        }
    }
}

#[test]
fn surjective_monoid_homomorphisms_preserve_identity() {
    let monoids: Vec<Arc<FiniteSemigroup>> = catalogs()
        .iter()
        .flat_map(|c| c.entries.iter())
        .filter(|e| e.semigroup.identity().is_some())
        .map(|e| e.semigroup.clone())
        .collect();
    let mut checked = 0;
    for s in &monoids {
        for t in monoids.iter().filter(|t| t.order() <= s.order()) {
            for f in all_homomorphisms_exhaustive(s, t).unwrap() {
                if f.is_surjective() {
                    checked += 1;
                    assert!(identity_preserved(&f).unwrap(), "{:?}", f.map());
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn finite_cancellative_semigroups_are_groups() {
    for e in catalogs().iter().flat_map(|c| c.entries.iter()) {
        assert_eq!(
            e.semigroup.is_cancellative_semigroup(),
            e.semigroup.is_group()
        );
    }
}
