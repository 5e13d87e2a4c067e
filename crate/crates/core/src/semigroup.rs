//! Finite semigroups given by Cayley tables, and congruences on them.
//!
//! Elements are the indices `0..n`. A table is validated once, at
//! construction; afterwards a [`FiniteSemigroup`] is immutable and its cached
//! flags (commutativity, identity) are always in sync with the table.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest order supported by [`FiniteSemigroup`]; subsets of the carrier
/// must fit in a `u64` mask.
pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSemigroup {
    order: usize,
    table: Vec<u8>,
    commutative: bool,
    identity: Option<usize>,
}

impl FiniteSemigroup {
    /// Validates a table given as rows; `rows[i][j]` is the product `i*j`.
    pub fn from_rows<R: AsRef<[usize]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        check_order(n)?;
        let mut table = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Parse(format!(
                    "row has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, order: n });
                }
                table.push(v as u8);
            }
        }
        Self::from_flat(n, table)
    }

    /// Validates a row-major flat table of length `n*n`.
    pub fn from_flat(order: usize, table: Vec<u8>) -> Result<Self> {
        check_order(order)?;
        if table.len() != order * order {
            return Err(Error::Parse(format!(
                "table has {} cells, expected {}",
                table.len(),
                order * order
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v as usize >= order) {
            return Err(Error::IndexOutOfRange {
                index: v as usize,
                order,
            });
        }
        if let Some((i, j, k)) = first_non_associative(order, &table) {
            return Err(Error::NonAssociative { i, j, k });
        }
        Ok(Self::with_flags(order, table))
    }

    /// Builds a semigroup from a product function, validating the result.
    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        check_order(order)?;
        let mut table = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                let v = f(i, j);
                if v >= order {
                    return Err(Error::IndexOutOfRange { index: v, order });
                }
                table.push(v as u8);
            }
        }
        Self::from_flat(order, table)
    }

    /// Skips the associativity scan; callers must have established it.
    pub(crate) fn from_flat_trusted(order: usize, table: Vec<u8>) -> Self {
        debug_assert!(first_non_associative(order, &table).is_none());
        Self::with_flags(order, table)
    }

    fn with_flags(order: usize, table: Vec<u8>) -> Self {
        let at = |i: usize, j: usize| table[i * order + j] as usize;
        let commutative = (0..order).all(|i| (i + 1..order).all(|j| at(i, j) == at(j, i)));
        let identity = (0..order).find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x));
        FiniteSemigroup {
            order,
            table,
            commutative,
            identity,
        }
    }

    /// The cyclic group of order `n`, written additively.
    pub fn cyclic_group(n: usize) -> Self {
        Self::from_fn(n, |i, j| (i + j) % n).expect("cyclic group is associative")
    }

    /// `x*y = 0` for all `x, y`.
    pub fn null_semigroup(n: usize) -> Self {
        Self::from_fn(n, |_, _| 0).expect("constant product is associative")
    }

    /// `x*y = x`.
    pub fn left_zero(n: usize) -> Self {
        Self::from_fn(n, |x, _| x).expect("left-zero band is associative")
    }

    /// `x*y = y`.
    pub fn right_zero(n: usize) -> Self {
        Self::from_fn(n, |_, y| y).expect("right-zero band is associative")
    }

    /// The chain `0 < 1 < .. < n-1` with `x*y = min(x, y)`.
    pub fn min_semilattice(n: usize) -> Self {
        Self::from_fn(n, usize::min).expect("semilattice is associative")
    }

    /// Z2 x Z2 with elements encoded as two-bit vectors under xor.
    pub fn klein_four() -> Self {
        Self::from_fn(4, |i, j| i ^ j).expect("klein four-group is associative")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    /// Row of `a` as a left multiplier: entry `j` is `a*j`.
    pub fn row(&self, a: usize) -> &[u8] {
        &self.table[a * self.order..(a + 1) * self.order]
    }

    /// Row-major table with one byte per cell.
    pub fn flat_table(&self) -> &[u8] {
        &self.table
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|i| self.row(i).iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn identity(&self) -> Option<usize> {
        self.identity
    }

    pub fn check_element(&self, a: usize) -> Result<()> {
        if a < self.order {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: a,
                order: self.order,
            })
        }
    }

    /// `x -> a*x` is injective.
    pub fn is_left_cancellative(&self, a: usize) -> Result<bool> {
        self.check_element(a)?;
        Ok(self.left_cancellative(a))
    }

    /// `x -> x*a` is injective.
    pub fn is_right_cancellative(&self, a: usize) -> Result<bool> {
        self.check_element(a)?;
        Ok(self.right_cancellative(a))
    }

    pub fn is_cancellative(&self, a: usize) -> Result<bool> {
        self.check_element(a)?;
        Ok(self.left_cancellative(a) && self.right_cancellative(a))
    }

    pub(crate) fn left_cancellative(&self, a: usize) -> bool {
        let mut seen = 0u64;
        for x in 0..self.order {
            let bit = 1u64 << self.mul(a, x);
            if seen & bit != 0 {
                return false;
            }
            seen |= bit;
        }
        true
    }

    pub(crate) fn right_cancellative(&self, a: usize) -> bool {
        let mut seen = 0u64;
        for x in 0..self.order {
            let bit = 1u64 << self.mul(x, a);
            if seen & bit != 0 {
                return false;
            }
            seen |= bit;
        }
        true
    }

    /// Every element is cancellative.
    pub fn is_cancellative_semigroup(&self) -> bool {
        (0..self.order).all(|a| self.left_cancellative(a) && self.right_cancellative(a))
    }

    /// Has an identity and every element has a two-sided inverse.
    pub fn is_group(&self) -> bool {
        match self.identity {
            None => false,
            Some(e) => (0..self.order)
                .all(|x| (0..self.order).any(|y| self.mul(x, y) == e && self.mul(y, x) == e)),
        }
    }

    pub fn is_idempotent(&self, a: usize) -> bool {
        self.mul(a, a) == a
    }

    /// The semigroup with the opposite product `x*'y = y*x`.
    pub fn opposite(&self) -> Self {
        let n = self.order;
        let table = (0..n * n)
            .map(|c| self.table[(c % n) * n + c / n])
            .collect();
        Self::with_flags(n, table)
    }

    /// Applies a bijective relabelling `perm` to the table:
    /// `perm(x)*perm(y) = perm(x*y)` in the result.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let n = self.order;
        if perm.len() != n {
            return Err(Error::Parse(format!(
                "permutation has length {}, expected {n}",
                perm.len()
            )));
        }
        let mut seen = 0u64;
        for &p in perm {
            if p >= n || seen & (1 << p) != 0 {
                return Err(Error::Parse("relabelling is not a permutation".into()));
            }
            seen |= 1 << p;
        }
        let mut table = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                table[perm[i] * n + perm[j]] = perm[self.mul(i, j)] as u8;
            }
        }
        Ok(Self::with_flags(n, table))
    }
}

fn check_order(n: usize) -> Result<()> {
    if (1..=MAX_ORDER).contains(&n) {
        Ok(())
    } else {
        Err(Error::OrderUnsupported {
            order: n,
            allowed: format!("1..={MAX_ORDER}"),
        })
    }
}

/// First triple `(i, j, k)` in ascending lexicographic order at which
/// associativity fails.
pub(crate) fn first_non_associative(n: usize, table: &[u8]) -> Option<(usize, usize, usize)> {
    let at = |i: usize, j: usize| table[i * n + j] as usize;
    for i in 0..n {
        for j in 0..n {
            let ij = at(i, j);
            for k in 0..n {
                if at(ij, k) != at(i, at(j, k)) {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

impl fmt::Display for FiniteSemigroup {
    /// Cayley-table text format: the order on the first line, then one row
    /// per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.order)?;
        for i in 0..self.order {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for FiniteSemigroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty table file".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse(format!("bad order line {header:?}")))?;
        check_order(n)?;
        let mut rows = Vec::with_capacity(n);
        for line in lines {
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad entry {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} rows, found {}",
                rows.len()
            )));
        }
        Self::from_rows(&rows)
    }
}

/// A congruence, stored as one block label per carrier element. Labels are
/// normalized so that blocks are numbered in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Congruence {
    labels: Vec<usize>,
}

impl Congruence {
    /// Validates `labels` as a congruence on `s`.
    pub fn from_partition(s: &FiniteSemigroup, labels: &[usize]) -> Result<Self> {
        let n = s.order();
        if labels.len() != n {
            return Err(Error::Parse(format!(
                "partition has {} labels, expected {n}",
                labels.len()
            )));
        }
        let labels = normalize_labels(labels);
        if let Some((x1, y1, x2, y2)) = first_incompatible(s, &labels) {
            return Err(Error::NotCompatible { x1, y1, x2, y2 });
        }
        Ok(Congruence { labels })
    }

    /// Equality relation.
    pub fn identity(s: &FiniteSemigroup) -> Self {
        Congruence {
            labels: (0..s.order()).collect(),
        }
    }

    /// The relation with a single class.
    pub fn universal(s: &FiniteSemigroup) -> Self {
        Congruence {
            labels: vec![0; s.order()],
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.labels[x] == self.labels[y]
    }

    pub fn num_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Classes as bit masks, in label order.
    pub fn class_masks(&self) -> Vec<u64> {
        let mut masks = vec![0u64; self.num_classes()];
        for (x, &l) in self.labels.iter().enumerate() {
            masks[l] |= 1 << x;
        }
        masks
    }
}

fn normalize_labels(labels: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(p) => p,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect()
}

fn first_incompatible(
    s: &FiniteSemigroup,
    labels: &[usize],
) -> Option<(usize, usize, usize, usize)> {
    let n = s.order();
    for x1 in 0..n {
        for y1 in (0..n).filter(|&y| labels[y] == labels[x1]) {
            for x2 in 0..n {
                for y2 in (0..n).filter(|&y| labels[y] == labels[x2]) {
                    if labels[s.mul(x1, x2)] != labels[s.mul(y1, y2)] {
                        return Some((x1, y1, x2, y2));
                    }
                }
            }
        }
    }
    None
}
