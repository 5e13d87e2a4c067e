//! Isomorphisms between finite semigroups and between power semigroups.
//!
//! [`find_isomorphism`] first compares [`IsoFingerprint`]s, then runs a
//! backtracking search in which every image choice is propagated through
//! the multiplication table: once `x -> y` and `z -> w` are fixed, `x*z`
//! is forced to `y*w`. Candidate images are restricted to target elements
//! with the same per-element invariants.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Precondition, Result};
use crate::power::{
    build_power_semigroup, power_element, power_index, SubsetElement, SubsetFamily,
};
use crate::semigroup::FiniteSemigroup;

/// An element map between two finite semigroups with its verified
/// properties.
#[derive(Debug, Clone)]
pub struct Morphism {
    source: Arc<FiniteSemigroup>,
    target: Arc<FiniteSemigroup>,
    map: Vec<usize>,
    homomorphism: bool,
    injective: bool,
    surjective: bool,
}

impl Morphism {
    /// Wraps `map` and checks it exhaustively.
    pub fn new(
        source: Arc<FiniteSemigroup>,
        target: Arc<FiniteSemigroup>,
        map: Vec<usize>,
    ) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::Parse(format!(
                "map has {} entries, source has order {}",
                map.len(),
                source.order()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= target.order()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                order: target.order(),
            });
        }
        let n = source.order();
        let homomorphism =
            (0..n).all(|x| (0..n).all(|y| map[source.mul(x, y)] == target.mul(map[x], map[y])));
        let mut hit = vec![false; target.order()];
        let mut injective = true;
        for &y in &map {
            if hit[y] {
                injective = false;
            }
            hit[y] = true;
        }
        let surjective = hit.iter().all(|&h| h);
        Ok(Morphism {
            source,
            target,
            map,
            homomorphism,
            injective,
            surjective,
        })
    }

    pub fn identity(s: Arc<FiniteSemigroup>) -> Self {
        let map = (0..s.order()).collect();
        Self::new(s.clone(), s, map).expect("identity map is well formed")
    }

    pub fn source(&self) -> &Arc<FiniteSemigroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteSemigroup> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_homomorphism(&self) -> bool {
        self.homomorphism
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn is_isomorphism(&self) -> bool {
        self.homomorphism && self.injective && self.surjective
    }

    /// Inverse map of a bijection.
    pub fn inverse(&self) -> Option<Morphism> {
        if !(self.injective && self.surjective) {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Morphism::new(self.target.clone(), self.source.clone(), inv).ok()
    }
}

impl PartialEq for Morphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && self.source == other.source && self.target == other.target
    }
}

impl Eq for Morphism {}

/// Isomorphism-invariant data attached to one element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ElementInvariant {
    pub idempotent: bool,
    /// Smallest `m` with `a^m = a^(m+r)` for some `r >= 1`.
    pub index: u8,
    /// Smallest such `r`.
    pub period: u8,
    /// `|aS|`
    pub left_image: u8,
    /// `|Sa|`
    pub right_image: u8,
    /// Number of elements commuting with `a`.
    pub commuting: u8,
}

impl ElementInvariant {
    pub fn of(s: &FiniteSemigroup, a: usize) -> Self {
        let n = s.order();
        // powers a, a^2, ... until the first repeat
        let mut first_seen = vec![0u8; n];
        let mut p = a;
        let mut k = 1u8;
        let (index, period) = loop {
            if first_seen[p] != 0 {
                let m = first_seen[p];
                break (m, k - m);
            }
            first_seen[p] = k;
            p = s.mul(p, a);
            k += 1;
        };
        let row = s.row(a);
        let left_image = row.iter().fold(0u64, |m, &v| m | 1 << v).count_ones() as u8;
        let right_image = (0..n).fold(0u64, |m, x| m | 1 << s.mul(x, a)).count_ones() as u8;
        let commuting = (0..n).filter(|&x| s.mul(a, x) == s.mul(x, a)).count() as u8;
        ElementInvariant {
            idempotent: s.is_idempotent(a),
            index,
            period,
            left_image,
            right_image,
            commuting,
        }
    }
}

/// Global and per-element invariants of a semigroup. Isomorphic semigroups
/// have equal fingerprints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IsoFingerprint {
    pub order: usize,
    pub commutative: bool,
    pub idempotents: usize,
    pub has_identity: bool,
    /// Sorted multiset of element invariants.
    pub elements: Vec<ElementInvariant>,
}

impl IsoFingerprint {
    pub fn of(s: &FiniteSemigroup) -> Self {
        let mut elements: Vec<ElementInvariant> =
            (0..s.order()).map(|a| ElementInvariant::of(s, a)).collect();
        elements.sort_unstable();
        IsoFingerprint {
            order: s.order(),
            commutative: s.is_commutative(),
            idempotents: elements.iter().filter(|e| e.idempotent).count(),
            has_identity: s.identity().is_some(),
            elements,
        }
    }

    /// Stable 64-bit digest for bucketing.
    pub fn digest(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }

    /// Describes the first invariant that differs, if any.
    pub fn mismatch(&self, other: &IsoFingerprint) -> Option<String> {
        if self.order != other.order {
            return Some(format!("order {} vs {}", self.order, other.order));
        }
        if self.commutative != other.commutative {
            return Some(format!(
                "commutative {} vs {}",
                self.commutative, other.commutative
            ));
        }
        if self.has_identity != other.has_identity {
            return Some(format!(
                "identity {} vs {}",
                self.has_identity, other.has_identity
            ));
        }
        if self.idempotents != other.idempotents {
            return Some(format!(
                "idempotents {} vs {}",
                self.idempotents, other.idempotents
            ));
        }
        self.elements
            .iter()
            .zip(&other.elements)
            .find(|(a, b)| a != b)
            .map(|(a, b)| format!("element invariants {a:?} vs {b:?}"))
    }
}

/// Outcome of an isomorphism decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoVerdict {
    pub isomorphic: bool,
    pub map: Option<Vec<usize>>,
    pub fingerprint_mismatch: Option<String>,
}

const UNSET: u8 = u8::MAX;

#[derive(Clone)]
struct PartialMap {
    fwd: Vec<u8>,
    back: Vec<u8>,
    assigned: Vec<u8>,
}

struct Search<'a> {
    s: &'a FiniteSemigroup,
    t: &'a FiniteSemigroup,
    /// Per-element class labels shared between source and target; `None`
    /// disables class filtering.
    classes: Option<(Vec<u32>, Vec<u32>)>,
    /// Source elements in assignment order.
    order: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(s: &'a FiniteSemigroup, t: &'a FiniteSemigroup, use_classes: bool) -> Self {
        let n = s.order();
        if !use_classes {
            return Search {
                s,
                t,
                classes: None,
                order: (0..n).collect(),
            };
        }
        let inv_s: Vec<ElementInvariant> = (0..n).map(|a| ElementInvariant::of(s, a)).collect();
        let inv_t: Vec<ElementInvariant> =
            (0..t.order()).map(|a| ElementInvariant::of(t, a)).collect();
        let mut ids: HashMap<ElementInvariant, u32> = HashMap::new();
        let mut label = |e: &ElementInvariant| {
            let next = ids.len() as u32;
            *ids.entry(*e).or_insert(next)
        };
        let cs: Vec<u32> = inv_s.iter().map(&mut label).collect();
        let ct: Vec<u32> = inv_t.iter().map(&mut label).collect();
        let mut size: HashMap<u32, usize> = HashMap::new();
        for &c in &cs {
            *size.entry(c).or_default() += 1;
        }
        let mut order: Vec<usize> = (0..n).collect();
        // rarest class first; ties broken by invariant, then index
        order.sort_by_key(|&x| (size[&cs[x]], inv_s[x], x));
        Search {
            s,
            t,
            classes: Some((cs, ct)),
            order,
        }
    }

    fn compatible(&self, x: usize, y: usize) -> bool {
        match &self.classes {
            Some((cs, ct)) => cs[x] == ct[y],
            None => true,
        }
    }

    /// Fixes `x -> y` and everything it forces. Returns false on conflict.
    fn assign(&self, st: &mut PartialMap, x: usize, y: usize) -> bool {
        let mut queue = vec![(x, y)];
        while let Some((x, y)) = queue.pop() {
            let cur = st.fwd[x];
            if cur != UNSET {
                if cur as usize != y {
                    return false;
                }
                continue;
            }
            if st.back[y] != UNSET || !self.compatible(x, y) {
                return false;
            }
            st.fwd[x] = y as u8;
            st.back[y] = x as u8;
            st.assigned.push(x as u8);
            for &z in &st.assigned {
                let z = z as usize;
                let w = st.fwd[z] as usize;
                queue.push((self.s.mul(x, z), self.t.mul(y, w)));
                queue.push((self.s.mul(z, x), self.t.mul(w, y)));
            }
        }
        true
    }

    fn run(&self, visit: &mut dyn FnMut(&[u8]) -> bool) {
        if self.s.order() != self.t.order() {
            return;
        }
        let n = self.s.order();
        let st = PartialMap {
            fwd: vec![UNSET; n],
            back: vec![UNSET; n],
            assigned: Vec::with_capacity(n),
        };
        self.dfs(st, 0, visit);
    }

    /// Returns true when the visitor asked to stop.
    fn dfs(&self, st: PartialMap, pos: usize, visit: &mut dyn FnMut(&[u8]) -> bool) -> bool {
        let Some(p) = (pos..self.order.len()).find(|&p| st.fwd[self.order[p]] == UNSET) else {
            return visit(&st.fwd);
        };
        let x = self.order[p];
        for y in 0..self.t.order() {
            if st.back[y] != UNSET || !self.compatible(x, y) {
                continue;
            }
            let mut next = st.clone();
            if self.assign(&mut next, x, y) && self.dfs(next, p + 1, visit) {
                return true;
            }
        }
        false
    }
}

fn to_morphism(s: &Arc<FiniteSemigroup>, t: &Arc<FiniteSemigroup>, fwd: &[u8]) -> Morphism {
    let map = fwd.iter().map(|&y| y as usize).collect();
    Morphism::new(s.clone(), t.clone(), map).expect("search produces total maps")
}

/// An isomorphism `s -> t`, if one exists.
pub fn find_isomorphism(s: &Arc<FiniteSemigroup>, t: &Arc<FiniteSemigroup>) -> Option<Morphism> {
    decide_isomorphism(s, t, &IsoFingerprint::of(s), &IsoFingerprint::of(t)).1
}

/// Full decision with precomputed fingerprints; the first component is the
/// fingerprint mismatch that settled a negative answer, if any.
pub fn decide_isomorphism(
    s: &Arc<FiniteSemigroup>,
    t: &Arc<FiniteSemigroup>,
    fs: &IsoFingerprint,
    ft: &IsoFingerprint,
) -> (Option<String>, Option<Morphism>) {
    if let Some(why) = fs.mismatch(ft) {
        return (Some(why), None);
    }
    let mut found = None;
    Search::new(s, t, true).run(&mut |fwd| {
        found = Some(to_morphism(s, t, fwd));
        true
    });
    debug_assert!(found.as_ref().is_none_or(Morphism::is_isomorphism));
    (None, found)
}

pub fn verdict(s: &Arc<FiniteSemigroup>, t: &Arc<FiniteSemigroup>) -> IsoVerdict {
    let (mismatch, found) =
        decide_isomorphism(s, t, &IsoFingerprint::of(s), &IsoFingerprint::of(t));
    IsoVerdict {
        isomorphic: found.is_some(),
        map: found.map(|m| m.map),
        fingerprint_mismatch: mismatch,
    }
}

/// Backtracking without fingerprints or invariant classes; only the
/// homomorphism propagation prunes. Used to double-check negative answers.
pub fn find_isomorphism_unpruned(
    s: &Arc<FiniteSemigroup>,
    t: &Arc<FiniteSemigroup>,
) -> Option<Morphism> {
    let mut found = None;
    Search::new(s, t, false).run(&mut |fwd| {
        found = Some(to_morphism(s, t, fwd));
        true
    });
    found
}

/// Every isomorphism `s -> t`, in the search's deterministic order.
pub fn all_isomorphisms(s: &Arc<FiniteSemigroup>, t: &Arc<FiniteSemigroup>) -> Vec<Morphism> {
    if IsoFingerprint::of(s) != IsoFingerprint::of(t) {
        return Vec::new();
    }
    let mut out = Vec::new();
    Search::new(s, t, true).run(&mut |fwd| {
        out.push(to_morphism(s, t, fwd));
        false
    });
    out
}

pub fn automorphisms(s: &Arc<FiniteSemigroup>) -> Vec<Morphism> {
    all_isomorphisms(s, s)
}

/// Every homomorphism `s -> t`, by enumerating all `|t|^|s|` maps.
pub fn all_homomorphisms_exhaustive(
    s: &Arc<FiniteSemigroup>,
    t: &Arc<FiniteSemigroup>,
) -> Result<Vec<Morphism>> {
    let (n, m) = (s.order(), t.order());
    let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > 1 << 24 {
        return Err(Error::OrderCapExceeded {
            order: n,
            cap: 1 << 24,
        });
    }
    let mut out = Vec::new();
    let mut map = vec![0usize; n];
    loop {
        let hom = (0..n).all(|x| (0..n).all(|y| map[s.mul(x, y)] == t.mul(map[x], map[y])));
        if hom {
            out.push(Morphism::new(s.clone(), t.clone(), map.clone())?);
        }
        // odometer increment, first coordinate fastest
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            map[i] += 1;
            if map[i] < m {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}

/// Lifts an isomorphism `f: H -> K` to `P(H) -> P(K)`, `X -> f[X]`.
pub fn lift_isomorphism(f: &Morphism, cap: usize) -> Result<Morphism> {
    if !f.is_isomorphism() {
        return Err(Error::precondition(Precondition::NotIsomorphism));
    }
    let ph = Arc::new(build_power_semigroup(f.source(), cap)?);
    let pk = Arc::new(build_power_semigroup(f.target(), cap)?);
    let map = (0..ph.order())
        .map(|i| {
            let image = power_element(i)
                .elements()
                .fold(0u64, |m, x| m | 1 << f.apply(x));
            power_index(SubsetElement::new(image).expect("non-empty image"))
        })
        .collect();
    let lifted = Morphism::new(ph, pk, map)?;
    if !lifted.is_isomorphism() {
        return Err(Error::TheoremViolation(
            "lift of an isomorphism is not an isomorphism".into(),
        ));
    }
    Ok(lifted)
}

fn check_endpoints(p: &SubsetFamily, q: &SubsetFamily, big: &Morphism) -> Result<()> {
    if !big.is_isomorphism() {
        return Err(Error::precondition(Precondition::NotIsomorphism));
    }
    if !p.is_downward_complete() || !q.is_downward_complete() {
        return Err(Error::precondition(Precondition::NotDownwardComplete));
    }
    if **big.source() != *p.semigroup()? || **big.target() != *q.semigroup()? {
        return Err(Error::precondition(Precondition::AmbientMismatch));
    }
    Ok(())
}

/// Restricts an isomorphism between downward-complete families `P` over `H`
/// and `Q` over `K` to the carriers, `x -> y` where `F({x}) = {y}`.
///
/// Requires `H` and `K` cancellative with at least one of them commutative.
/// The singleton-to-singleton property is checked rather than assumed; a
/// failure is reported as [`Error::TheoremViolation`].
pub fn restrict_isomorphism(
    p: &SubsetFamily,
    q: &SubsetFamily,
    big: &Morphism,
) -> Result<Morphism> {
    check_endpoints(p, q, big)?;
    let (h, k) = (p.ambient(), q.ambient());
    if !h.is_cancellative_semigroup() || !k.is_cancellative_semigroup() {
        return Err(Error::precondition(Precondition::NotCancellative));
    }
    if !h.is_commutative() && !k.is_commutative() {
        return Err(Error::precondition(Precondition::NotCommutative));
    }
    let mut map = Vec::with_capacity(h.order());
    for x in 0..h.order() {
        let i = p
            .index_of(SubsetElement::singleton(x))
            .expect("downward-complete families contain all singletons");
        let image = q.members()[big.apply(i)];
        match image.as_singleton() {
            Some(y) => map.push(y),
            None => {
                return Err(Error::TheoremViolation(format!(
                    "singleton {{{x}}} maps to non-singleton {image}"
                )))
            }
        }
    }
    let small = Morphism::new(h.clone(), k.clone(), map)?;
    if !small.is_isomorphism() {
        return Err(Error::TheoremViolation(
            "restriction to the carriers is not an isomorphism".into(),
        ));
    }
    Ok(small)
}

/// Checks that `K` is commutative given an isomorphism from a
/// downward-complete family over a commutative `H`. Returns the direct
/// commutativity check of `K`; `false` contradicts the transfer property.
pub fn verify_commutativity_transfer(
    p: &SubsetFamily,
    q: &SubsetFamily,
    big: &Morphism,
) -> Result<bool> {
    check_endpoints(p, q, big)?;
    if !p.ambient().is_commutative() {
        return Err(Error::precondition(Precondition::NotCommutative));
    }
    Ok(q.ambient().is_commutative())
}

/// Left, right and two-sided cancellativity of every element agree with
/// those of its image.
pub fn cancellative_preservation_check(f: &Morphism) -> Result<bool> {
    if !f.is_isomorphism() {
        return Err(Error::precondition(Precondition::NotIsomorphism));
    }
    let (s, t) = (f.source(), f.target());
    Ok((0..s.order()).all(|a| {
        let b = f.apply(a);
        s.left_cancellative(a) == t.left_cancellative(b)
            && s.right_cancellative(a) == t.right_cancellative(b)
    }))
}
