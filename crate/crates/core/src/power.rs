//! Power semigroups: non-empty subsets of a finite carrier under the setwise
//! product `XY = {xy : x in X, y in Y}`, and subfamilies of them.
//!
//! Subsets are `u64` bit masks (bit `i` set iff element `i` belongs to the
//! subset). The materialized power semigroup lists all non-empty masks in
//! ascending order, so the element with index `i` is the mask `i + 1`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Precondition, Result};
use crate::semigroup::{Congruence, FiniteSemigroup, MAX_ORDER};

/// Default largest carrier order whose power semigroup is materialized.
pub const DEFAULT_POWER_CAP: usize = 5;

/// Largest family size tolerated by closure computations.
const MAX_FAMILY_SIZE: usize = 1 << 20;

/// A non-empty subset of a finite carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SubsetElement(u64);

impl SubsetElement {
    /// `None` for the empty mask.
    pub fn new(mask: u64) -> Option<Self> {
        (mask != 0).then_some(SubsetElement(mask))
    }

    pub fn singleton(x: usize) -> Self {
        assert!(x < MAX_ORDER);
        SubsetElement(1 << x)
    }

    /// Subset with the given elements; `None` when `elements` is empty.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Option<Self> {
        let mask = elements.into_iter().fold(0u64, |m, x| {
            assert!(x < MAX_ORDER);
            m | 1 << x
        });
        Self::new(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Always false; kept for the usual `len` pairing.
    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, x: usize) -> bool {
        x < MAX_ORDER && self.0 & (1 << x) != 0
    }

    /// The unique element of a singleton.
    pub fn as_singleton(self) -> Option<usize> {
        (self.0.count_ones() == 1).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            (m != 0).then(|| {
                let x = m.trailing_zeros() as usize;
                m &= m - 1;
                x
            })
        })
    }

    pub fn is_subset_of(self, other: SubsetElement) -> bool {
        self.0 & !other.0 == 0
    }

    /// Removes `x`; `None` if nothing would remain.
    pub fn without(self, x: usize) -> Option<Self> {
        Self::new(self.0 & !(1u64 << x))
    }
}

impl fmt::Display for SubsetElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.elements().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Iterates the non-empty submasks of `mask`, in descending order.
pub(crate) fn nonempty_submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut sub = mask;
    let mut done = mask == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = sub;
        sub = (sub - 1) & mask;
        if sub == 0 {
            done = true;
        }
        Some(cur)
    })
}

impl FiniteSemigroup {
    fn full_mask(&self) -> u64 {
        if self.order() == 64 {
            u64::MAX
        } else {
            (1u64 << self.order()) - 1
        }
    }

    /// Checks that `x` is a subset of this carrier.
    pub fn check_subset(&self, x: SubsetElement) -> Result<()> {
        if x.mask() & !self.full_mask() == 0 {
            Ok(())
        } else {
            Err(Error::AmbientMismatch {
                mask: x.mask(),
                order: self.order(),
            })
        }
    }

    /// `{xy : x in X, y in Y}`.
    pub fn setwise_product(&self, x: SubsetElement, y: SubsetElement) -> Result<SubsetElement> {
        self.check_subset(x)?;
        self.check_subset(y)?;
        Ok(SubsetElement(self.product_mask(x.mask(), y.mask())))
    }

    #[inline]
    pub(crate) fn product_mask(&self, x: u64, y: u64) -> u64 {
        let mut out = 0u64;
        for a in SubsetElement(x).elements() {
            let row = self.row(a);
            for b in SubsetElement(y).elements() {
                out |= 1 << row[b];
            }
        }
        out
    }

    /// The full power semigroup, materialized when `order <= DEFAULT_POWER_CAP`.
    pub fn power_semigroup(&self) -> Result<FiniteSemigroup> {
        build_power_semigroup(self, DEFAULT_POWER_CAP)
    }
}

/// Materializes `P(S)` as a semigroup of order `2^n - 1` whose element `i`
/// is the subset with mask `i + 1`.
pub fn build_power_semigroup(s: &FiniteSemigroup, cap: usize) -> Result<FiniteSemigroup> {
    let n = s.order();
    // 2^n - 1 elements must themselves fit under MAX_ORDER
    let hard = 6;
    if n > cap.min(hard) {
        return Err(Error::OrderCapExceeded {
            order: n,
            cap: cap.min(hard),
        });
    }
    let m = (1usize << n) - 1;
    let mut table = Vec::with_capacity(m * m);
    for x in 1..=m as u64 {
        for y in 1..=m as u64 {
            table.push((s.product_mask(x, y) - 1) as u8);
        }
    }
    // setwise products of an associative operation are associative
    Ok(FiniteSemigroup::from_flat_trusted(m, table))
}

/// Index of `x` in the materialized power semigroup.
pub fn power_index(x: SubsetElement) -> usize {
    x.mask() as usize - 1
}

/// Subset represented by index `i` of the materialized power semigroup.
pub fn power_element(i: usize) -> SubsetElement {
    SubsetElement(i as u64 + 1)
}

/// Outcome of checking the defining conditions of a downward-complete
/// subsemigroup, with a witness for the first failure found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum Completeness {
    Complete,
    NotClosed {
        left: SubsetElement,
        right: SubsetElement,
        product: SubsetElement,
    },
    Uncovered {
        element: usize,
    },
    MissingSubset {
        member: SubsetElement,
        subset: SubsetElement,
    },
}

impl Completeness {
    pub fn holds(&self) -> bool {
        matches!(self, Completeness::Complete)
    }
}

/// A deduplicated set of subsets of a fixed carrier.
#[derive(Debug, Clone)]
pub struct SubsetFamily {
    ambient: Arc<FiniteSemigroup>,
    members: Vec<SubsetElement>,
    closed: Option<(SubsetElement, SubsetElement, SubsetElement)>,
    completeness: Completeness,
    table: OnceLock<Arc<FiniteSemigroup>>,
}

impl SubsetFamily {
    pub fn new<I>(ambient: Arc<FiniteSemigroup>, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = SubsetElement>,
    {
        let mut members: Vec<SubsetElement> = members.into_iter().collect();
        for &m in &members {
            ambient.check_subset(m)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self::from_sorted(ambient, members))
    }

    fn from_sorted(ambient: Arc<FiniteSemigroup>, members: Vec<SubsetElement>) -> Self {
        let mut family = SubsetFamily {
            ambient,
            members,
            closed: None,
            completeness: Completeness::Complete,
            table: OnceLock::new(),
        };
        family.closed = family.first_unclosed_product();
        family.completeness = family.check_completeness();
        family
    }

    /// All non-empty subsets of the carrier.
    pub fn full(ambient: Arc<FiniteSemigroup>) -> Result<Self> {
        let n = ambient.order();
        if n > 20 {
            return Err(Error::OrderCapExceeded { order: n, cap: 20 });
        }
        let members = (1..1u64 << n).map(SubsetElement).collect();
        Ok(Self::from_sorted(ambient, members))
    }

    /// All one-element subsets; the least downward-complete family.
    pub fn singletons(ambient: Arc<FiniteSemigroup>) -> Self {
        let members = (0..ambient.order()).map(SubsetElement::singleton).collect();
        Self::from_sorted(ambient, members)
    }

    pub fn ambient(&self) -> &Arc<FiniteSemigroup> {
        &self.ambient
    }

    pub fn members(&self) -> &[SubsetElement] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: SubsetElement) -> bool {
        self.index_of(x).is_some()
    }

    pub fn index_of(&self, x: SubsetElement) -> Option<usize> {
        self.members.binary_search(&x).ok()
    }

    pub fn is_subsemigroup(&self) -> bool {
        self.closed.is_none()
    }

    pub fn is_downward_complete(&self) -> bool {
        self.completeness.holds()
    }

    /// Certificate for the downward-completeness verdict.
    pub fn completeness(&self) -> &Completeness {
        &self.completeness
    }

    fn first_unclosed_product(&self) -> Option<(SubsetElement, SubsetElement, SubsetElement)> {
        for &x in &self.members {
            for &y in &self.members {
                let p = SubsetElement(self.ambient.product_mask(x.0, y.0));
                if !self.contains(p) {
                    return Some((x, y, p));
                }
            }
        }
        None
    }

    fn check_completeness(&self) -> Completeness {
        if let Some((left, right, product)) = self.closed {
            return Completeness::NotClosed {
                left,
                right,
                product,
            };
        }
        let covered = self.members.iter().fold(0u64, |acc, m| acc | m.0);
        if let Some(element) = (0..self.ambient.order()).find(|&x| covered & (1 << x) == 0) {
            return Completeness::Uncovered { element };
        }
        for &member in &self.members {
            for sub in nonempty_submasks(member.0) {
                if !self.contains(SubsetElement(sub)) {
                    return Completeness::MissingSubset {
                        member,
                        subset: SubsetElement(sub),
                    };
                }
            }
        }
        Completeness::Complete
    }

    /// Product of two members, as a subset of the carrier.
    pub fn product(&self, x: SubsetElement, y: SubsetElement) -> SubsetElement {
        SubsetElement(self.ambient.product_mask(x.0, y.0))
    }

    /// The family as an abstract semigroup; element `i` is `members()[i]`.
    pub fn semigroup(&self) -> Result<Arc<FiniteSemigroup>> {
        if !self.is_subsemigroup() {
            return Err(Error::precondition(Precondition::NotSubsemigroup));
        }
        let m = self.members.len();
        if m > MAX_ORDER {
            return Err(Error::OrderCapExceeded {
                order: m,
                cap: MAX_ORDER,
            });
        }
        Ok(self
            .table
            .get_or_init(|| {
                let mut table = Vec::with_capacity(m * m);
                for &x in &self.members {
                    for &y in &self.members {
                        let p = self.product(x, y);
                        table.push(self.index_of(p).expect("family is closed") as u8);
                    }
                }
                Arc::new(FiniteSemigroup::from_flat_trusted(m, table))
            })
            .clone())
    }

    pub fn report(&self) -> FamilyReport {
        FamilyReport {
            ambient_order: self.ambient.order(),
            members: self.members.iter().map(|m| m.0).collect(),
            downward_complete: self.is_downward_complete(),
            subsemigroup: self.is_subsemigroup(),
            certificate: (!self.is_downward_complete()).then(|| self.completeness.clone()),
        }
    }
}

impl PartialEq for SubsetFamily {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.members == other.members
    }
}

impl Eq for SubsetFamily {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub ambient_order: usize,
    pub members: Vec<u64>,
    pub downward_complete: bool,
    pub subsemigroup: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Completeness>,
}

/// Least downward-complete subsemigroup of `P(S)` containing `generators`.
pub fn downward_complete_closure(
    ambient: Arc<FiniteSemigroup>,
    generators: &[SubsetElement],
) -> Result<SubsetFamily> {
    for &g in generators {
        ambient.check_subset(g)?;
    }
    let mut set: BTreeSet<u64> = (0..ambient.order()).map(|x| 1u64 << x).collect();
    let mut frontier: Vec<u64> = Vec::new();
    let insert = |set: &mut BTreeSet<u64>, frontier: &mut Vec<u64>, mask: u64| -> Result<()> {
        for sub in nonempty_submasks(mask) {
            if set.insert(sub) {
                frontier.push(sub);
            }
        }
        if set.len() > MAX_FAMILY_SIZE {
            return Err(Error::OrderCapExceeded {
                order: ambient.order(),
                cap: MAX_FAMILY_SIZE,
            });
        }
        Ok(())
    };
    frontier.extend(set.iter().copied());
    for g in generators {
        insert(&mut set, &mut frontier, g.0)?;
    }
    // every new member is multiplied against everything present
    while let Some(x) = frontier.pop() {
        let current: Vec<u64> = set.iter().copied().collect();
        for y in current {
            insert(&mut set, &mut frontier, ambient.product_mask(x, y))?;
            insert(&mut set, &mut frontier, ambient.product_mask(y, x))?;
        }
    }
    let members = set.into_iter().map(SubsetElement).collect();
    Ok(SubsetFamily::from_sorted(ambient, members))
}

/// All non-empty subsets of each congruence class.
pub fn congruence_family(ambient: Arc<FiniteSemigroup>, c: &Congruence) -> Result<SubsetFamily> {
    if c.labels().len() != ambient.order() {
        return Err(Error::precondition(Precondition::Other(
            "congruence is defined on a different carrier".into(),
        )));
    }
    let mut members: Vec<SubsetElement> = c
        .class_masks()
        .into_iter()
        .flat_map(nonempty_submasks)
        .map(SubsetElement)
        .collect();
    members.sort_unstable();
    Ok(SubsetFamily::from_sorted(ambient, members))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> SubsetElement {
        SubsetElement::from_elements(xs.iter().copied()).unwrap()
    }

    #[test]
    fn setwise_product_examples() {
        let z2 = FiniteSemigroup::cyclic_group(2);
        assert_eq!(
            z2.setwise_product(set(&[0, 1]), set(&[0, 1])).unwrap(),
            set(&[0, 1])
        );
        let z3 = FiniteSemigroup::cyclic_group(3);
        // 0+0, 0+2, 1+0, 1+2 = 0, 2, 1, 0
        assert_eq!(
            z3.setwise_product(set(&[0, 1]), set(&[0, 2])).unwrap(),
            set(&[0, 1, 2])
        );
        for mask in 1..8 {
            let x = SubsetElement::new(mask).unwrap();
            assert_eq!(z3.setwise_product(set(&[0]), x).unwrap(), x);
        }
        assert!(matches!(
            z2.setwise_product(set(&[2]), set(&[0])),
            Err(Error::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn power_semigroup_of_z2() {
        let z2 = FiniteSemigroup::cyclic_group(2);
        let p = z2.power_semigroup().unwrap();
        assert_eq!(p.order(), 3);
        let full = power_index(set(&[0, 1]));
        for x in 0..3 {
            assert_eq!(p.mul(full, x), full);
            assert_eq!(p.mul(x, full), full);
        }
        // {1}+{1} = {0}
        assert_eq!(
            p.mul(power_index(set(&[1])), power_index(set(&[1]))),
            power_index(set(&[0]))
        );
    }

    #[test]
    fn power_cap() {
        let s = FiniteSemigroup::cyclic_group(5);
        assert_eq!(s.power_semigroup().unwrap().order(), 31);
        let s6 = FiniteSemigroup::cyclic_group(6);
        assert!(matches!(
            s6.power_semigroup(),
            Err(Error::OrderCapExceeded { .. })
        ));
        assert_eq!(build_power_semigroup(&s6, 6).unwrap().order(), 63);
    }

    #[test]
    fn submask_iteration() {
        let subs: Vec<u64> = nonempty_submasks(0b101).collect();
        assert_eq!(subs, vec![0b101, 0b100, 0b001]);
        assert_eq!(nonempty_submasks(0).count(), 0);
    }

    #[test]
    fn downward_completeness_examples() {
        let z4 = Arc::new(FiniteSemigroup::cyclic_group(4));
        assert!(SubsetFamily::singletons(z4.clone()).is_downward_complete());
        assert!(SubsetFamily::full(z4.clone())
            .unwrap()
            .is_downward_complete());

        let parity: Vec<SubsetElement> = [0b0001, 0b0100, 0b0101, 0b0010, 0b1000, 0b1010]
            .into_iter()
            .map(|m| SubsetElement::new(m).unwrap())
            .collect();
        let fam = SubsetFamily::new(z4.clone(), parity).unwrap();
        assert_eq!(fam.len(), 6);
        assert!(fam.is_downward_complete());

        let missing = SubsetFamily::new(
            z4.clone(),
            [set(&[0]), set(&[1]), set(&[2]), set(&[3]), set(&[0, 2, 3])],
        );
        let missing = missing.unwrap();
        assert!(!missing.is_downward_complete());
        assert!(!missing.is_subsemigroup());

        let uncovered = SubsetFamily::new(z4.clone(), [set(&[0])]).unwrap();
        assert_eq!(
            uncovered.completeness(),
            &Completeness::Uncovered { element: 1 }
        );

        // singletons plus the whole carrier: closed under products, not under subsets
        let closed = SubsetFamily::new(
            z4,
            [
                set(&[0]),
                set(&[1]),
                set(&[2]),
                set(&[3]),
                set(&[0, 1, 2, 3]),
            ],
        )
        .unwrap();
        assert!(closed.is_subsemigroup());
        assert!(matches!(
            closed.completeness(),
            Completeness::MissingSubset { .. }
        ));
    }

    #[test]
    fn closure_examples() {
        let z2 = Arc::new(FiniteSemigroup::cyclic_group(2));
        assert_eq!(
            downward_complete_closure(z2.clone(), &[]).unwrap(),
            SubsetFamily::singletons(z2.clone())
        );
        assert_eq!(
            downward_complete_closure(z2.clone(), &[set(&[0, 1])])
                .unwrap()
                .len(),
            3
        );

        let z4 = Arc::new(FiniteSemigroup::cyclic_group(4));
        let fam = downward_complete_closure(z4.clone(), &[set(&[0, 2]), set(&[1, 3])]).unwrap();
        let parity = Congruence::from_partition(&z4, &[0, 1, 0, 1]).unwrap();
        assert_eq!(fam, congruence_family(z4, &parity).unwrap());
        assert_eq!(fam.len(), 6);
    }

    #[test]
    fn congruence_family_extremes() {
        let s = Arc::new(FiniteSemigroup::min_semilattice(3));
        let id = congruence_family(s.clone(), &Congruence::identity(&s)).unwrap();
        assert_eq!(id, SubsetFamily::singletons(s.clone()));
        let all = congruence_family(s.clone(), &Congruence::universal(&s)).unwrap();
        assert_eq!(all, SubsetFamily::full(s).unwrap());
    }

    #[test]
    fn family_semigroup_matches_power_semigroup() {
        let s = Arc::new(FiniteSemigroup::cyclic_group(3));
        let fam = SubsetFamily::full(s.clone()).unwrap();
        assert_eq!(*fam.semigroup().unwrap(), s.power_semigroup().unwrap());
    }

    #[test]
    fn report_json_shape() {
        let s = Arc::new(FiniteSemigroup::cyclic_group(2));
        let json = serde_json::to_value(SubsetFamily::full(s).unwrap().report()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"ambient_order": 2, "members": [1, 2, 3], "downward_complete": true, "subsemigroup": true})
        );
    }
}
