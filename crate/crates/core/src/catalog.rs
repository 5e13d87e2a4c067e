//! Exhaustive catalogs of small semigroups and the experiments run over
//! them: the global-isomorphism probe on power semigroups and the
//! exhaustive agreement check of the two cancellativity classifiers.
//!
//! Enumeration fills Cayley-table cells in row-major order and abandons a
//! partial table as soon as a fully determined triple violates
//! associativity. Leaves therefore arrive in ascending lexicographic order
//! of their row-major encoding. Up to order 4 only the lexicographically
//! least table of each isomorphism class is kept (checked against all
//! `n!` relabellings); at order 5 leaves are bucketed by fingerprint and
//! tested against the representatives already kept, and since leaves come
//! in lexicographic order the first member of each class is again its least
//! table.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cancellativity::{
    cancellative_elements_bruteforce, classify_cancellatives_structural, witness_noncancellative,
};
use crate::error::{Error, Result};
use crate::isomorphism::{
    decide_isomorphism, find_isomorphism, find_isomorphism_unpruned, IsoFingerprint, Morphism,
};
use crate::power::{
    build_power_semigroup, congruence_family, downward_complete_closure, SubsetElement,
    SubsetFamily,
};
use crate::semigroup::{Congruence, FiniteSemigroup};

/// Largest order handled without the long-running gate.
pub const MAX_QUICK_ORDER: usize = 4;
/// Largest order handled at all.
pub const MAX_ORDER: usize = 5;

const UNSET: u8 = u8::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalId {
    pub order: usize,
    pub index: usize,
}

#[derive(Debug)]
pub struct CatalogEntry {
    pub id: CanonicalId,
    pub semigroup: Arc<FiniteSemigroup>,
    pub fingerprint: IsoFingerprint,
    power: OnceLock<Arc<FiniteSemigroup>>,
    power_fingerprint: OnceLock<IsoFingerprint>,
}

impl CatalogEntry {
    fn new(id: CanonicalId, semigroup: FiniteSemigroup) -> Self {
        let fingerprint = IsoFingerprint::of(&semigroup);
        CatalogEntry {
            id,
            semigroup: Arc::new(semigroup),
            fingerprint,
            power: OnceLock::new(),
            power_fingerprint: OnceLock::new(),
        }
    }

    /// The materialized power semigroup, built on first use.
    pub fn power(&self) -> &Arc<FiniteSemigroup> {
        self.power.get_or_init(|| {
            Arc::new(
                build_power_semigroup(&self.semigroup, MAX_ORDER)
                    .expect("catalog orders are under the power cap"),
            )
        })
    }

    pub fn power_fingerprint(&self) -> &IsoFingerprint {
        self.power_fingerprint
            .get_or_init(|| IsoFingerprint::of(self.power()))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogOptions {
    /// Unlocks order 5.
    pub long_running: bool,
    pub jobs: usize,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions {
            long_running: false,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    /// Search-tree nodes whose partial table passed the associativity check.
    pub nodes: u64,
    /// Complete associative tables (labelled semigroups).
    pub associative_tables: usize,
    /// Tables discarded as isomorphic to a kept one.
    pub rejected: usize,
    /// Isomorphism tests run during construction.
    pub iso_tests: usize,
}

#[derive(Debug)]
pub struct Catalog {
    pub order: usize,
    pub up_to_isomorphism: bool,
    pub entries: Vec<CatalogEntry>,
    pub stats: EnumerationStats,
}

impl Catalog {
    pub fn commutative(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(|e| e.semigroup.is_commutative())
    }
}

fn thread_pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
}

fn check_order(n: usize, long_running: bool) -> Result<()> {
    let max = if long_running {
        MAX_ORDER
    } else {
        MAX_QUICK_ORDER
    };
    if (1..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::OrderUnsupported {
            order: n,
            allowed: if long_running || n != MAX_ORDER {
                format!("1..={max}")
            } else {
                format!("1..={MAX_QUICK_ORDER}, or {MAX_ORDER} with the long-running flag")
            },
        })
    }
}

/// Partial Cayley table used during enumeration.
struct Filler {
    n: usize,
    cells: Vec<u8>,
}

impl Filler {
    fn get(&self, i: usize, j: usize) -> Option<usize> {
        let v = self.cells[i * self.n + j];
        (v != UNSET).then_some(v as usize)
    }

    /// Checks every fully determined triple that uses cell `(r, s)`.
    fn consistent_at(&self, r: usize, s: usize) -> bool {
        let n = self.n;
        let v = self.get(r, s).expect("cell just set");
        // (r*s)*k vs r*(s*k)
        for k in 0..n {
            if let (Some(left), Some(sk)) = (self.get(v, k), self.get(s, k)) {
                if let Some(right) = self.get(r, sk) {
                    if left != right {
                        return false;
                    }
                }
            }
        }
        // (i*r)*s vs i*(r*s)
        for i in 0..n {
            if let (Some(ir), Some(right)) = (self.get(i, r), self.get(i, v)) {
                if let Some(left) = self.get(ir, s) {
                    if left != right {
                        return false;
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                // (a*b)*s with a*b = r, vs a*(b*s)
                if self.get(a, b) == Some(r) {
                    if let Some(bs) = self.get(b, s) {
                        if let Some(right) = self.get(a, bs) {
                            if v != right {
                                return false;
                            }
                        }
                    }
                }
                // (r*a)*b vs r*(a*b) with a*b = s
                if self.get(a, b) == Some(s) {
                    if let Some(ra) = self.get(r, a) {
                        if let Some(left) = self.get(ra, b) {
                            if left != v {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn dfs(&mut self, cell: usize, nodes: &mut u64, leaves: &mut Vec<Vec<u8>>) {
        let n = self.n;
        if cell == n * n {
            leaves.push(self.cells.clone());
            return;
        }
        for v in 0..n as u8 {
            self.cells[cell] = v;
            if self.consistent_at(cell / n, cell % n) {
                *nodes += 1;
                self.dfs(cell + 1, nodes, leaves);
            }
        }
        self.cells[cell] = UNSET;
    }
}

/// All consistent assignments of the first `depth` cells, in lexicographic
/// order.
fn prefixes(n: usize, depth: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for cell in 0..depth {
        let mut next = Vec::new();
        for p in &out {
            for v in 0..n as u8 {
                let mut f = Filler {
                    n,
                    cells: vec![UNSET; n * n],
                };
                f.cells[..cell].copy_from_slice(p);
                f.cells[cell] = v;
                if f.consistent_at(cell / n, cell % n) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

/// Every associative table of order `n`, in ascending row-major order.
pub fn associative_tables(n: usize, jobs: usize) -> Result<(Vec<Vec<u8>>, u64)> {
    check_order(n, true)?;
    let depth = (n * n).min(2);
    let starts = prefixes(n, depth);
    let work = |p: &Vec<u8>| {
        let mut f = Filler {
            n,
            cells: vec![UNSET; n * n],
        };
        f.cells[..p.len()].copy_from_slice(p);
        let mut nodes = 0u64;
        let mut leaves = Vec::new();
        f.dfs(p.len(), &mut nodes, &mut leaves);
        (leaves, nodes)
    };
    let parts: Vec<(Vec<Vec<u8>>, u64)> =
        thread_pool(jobs).install(|| starts.par_iter().map(work).collect());
    let mut nodes = starts.len() as u64;
    let mut leaves = Vec::new();
    for (l, k) in parts {
        leaves.extend(l);
        nodes += k;
    }
    Ok((leaves, nodes))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(n, cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// True when no relabelling of `table` is lexicographically smaller.
fn is_lex_min(n: usize, table: &[u8], perms: &[Vec<usize>]) -> bool {
    let mut inv = vec![0usize; n];
    for p in perms {
        for (x, &px) in p.iter().enumerate() {
            inv[px] = x;
        }
        // relabelled cell (a, b) holds p[table[inv a][inv b]]
        for c in 0..n * n {
            let (a, b) = (c / n, c % n);
            let relabelled = p[table[inv[a] * n + inv[b]] as usize] as u8;
            match relabelled.cmp(&table[c]) {
                std::cmp::Ordering::Less => return false,
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    true
}

/// Enumerates the semigroups of order `n`, optionally one per isomorphism
/// class, sorted by row-major table encoding.
pub fn enumerate_semigroups(
    n: usize,
    up_to_isomorphism: bool,
    opts: CatalogOptions,
) -> Result<Catalog> {
    check_order(n, opts.long_running)?;
    let (leaves, nodes) = associative_tables(n, opts.jobs)?;
    let mut stats = EnumerationStats {
        nodes,
        associative_tables: leaves.len(),
        ..Default::default()
    };
    let entry = |index: usize, t: Vec<u8>| {
        CatalogEntry::new(
            CanonicalId { order: n, index },
            FiniteSemigroup::from_flat_trusted(n, t),
        )
    };
    if !up_to_isomorphism {
        let entries = leaves
            .into_iter()
            .enumerate()
            .map(|(i, t)| entry(i, t))
            .collect();
        return Ok(Catalog {
            order: n,
            up_to_isomorphism,
            entries,
            stats,
        });
    }

    let kept: Vec<Vec<u8>> = if n <= MAX_QUICK_ORDER {
        let perms = permutations(n);
        let pool = thread_pool(opts.jobs);
        let flags: Vec<bool> = pool.install(|| {
            leaves
                .par_iter()
                .map(|t| is_lex_min(n, t, &perms))
                .collect()
        });
        leaves
            .into_iter()
            .zip(flags)
            .filter_map(|(t, keep)| keep.then_some(t))
            .collect()
    } else {
        let (kept, tests) = bucket_by_isomorphism(n, leaves, opts.jobs);
        stats.iso_tests += tests;
        kept
    };
    stats.rejected = stats.associative_tables - kept.len();
    let entries: Vec<CatalogEntry> = kept
        .into_iter()
        .enumerate()
        .map(|(i, t)| entry(i, t))
        .collect();
    stats.iso_tests += verify_pairwise_distinct(&entries)?;
    Ok(Catalog {
        order: n,
        up_to_isomorphism,
        entries,
        stats,
    })
}

/// Keeps the first leaf of each isomorphism class.
fn bucket_by_isomorphism(n: usize, leaves: Vec<Vec<u8>>, jobs: usize) -> (Vec<Vec<u8>>, usize) {
    let pool = thread_pool(jobs);
    let semigroups: Vec<Arc<FiniteSemigroup>> = leaves
        .into_iter()
        .map(|t| Arc::new(FiniteSemigroup::from_flat_trusted(n, t)))
        .collect();
    let fingerprints: Vec<IsoFingerprint> = pool.install(|| {
        semigroups
            .par_iter()
            .map(|s| IsoFingerprint::of(s))
            .collect()
    });
    let mut buckets: HashMap<&IsoFingerprint, Vec<usize>> = HashMap::new();
    let mut kept = Vec::new();
    let mut tests = 0;
    for (i, fp) in fingerprints.iter().enumerate() {
        let reps = buckets.entry(fp).or_default();
        let known = reps.iter().any(|&r| {
            tests += 1;
            decide_isomorphism(&semigroups[r], &semigroups[i], &fingerprints[r], fp)
                .1
                .is_some()
        });
        if !known {
            reps.push(i);
            kept.push(i);
        }
    }
    let tables = kept
        .into_iter()
        .map(|i| semigroups[i].flat_table().to_vec())
        .collect();
    (tables, tests)
}

/// Confirms that no two entries with equal fingerprints are isomorphic.
fn verify_pairwise_distinct(entries: &[CatalogEntry]) -> Result<usize> {
    let mut buckets: HashMap<&IsoFingerprint, Vec<&CatalogEntry>> = HashMap::new();
    for e in entries {
        buckets.entry(&e.fingerprint).or_default().push(e);
    }
    let mut tests = 0;
    for bucket in buckets.values() {
        for (i, a) in bucket.iter().enumerate() {
            for b in &bucket[i + 1..] {
                tests += 1;
                if find_isomorphism(&a.semigroup, &b.semigroup).is_some() {
                    return Err(Error::TheoremViolation(format!(
                        "catalog entries {:?} and {:?} are isomorphic",
                        a.id, b.id
                    )));
                }
            }
        }
    }
    Ok(tests)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub order: usize,
    pub seed: u64,
    pub rejected: usize,
    pub sampled: usize,
    /// Sampled rejected tables not isomorphic to any catalog entry.
    pub unmatched: Vec<Vec<usize>>,
}

/// Checks that a seeded sample of the discarded tables (the given fraction,
/// at least one) is isomorphic to a kept entry.
pub fn audit_rejections(
    catalog: &Catalog,
    fraction: f64,
    seed: u64,
    jobs: usize,
) -> Result<AuditReport> {
    let n = catalog.order;
    let (leaves, _) = associative_tables(n, jobs)?;
    let kept: std::collections::HashSet<&[u8]> = catalog
        .entries
        .iter()
        .map(|e| e.semigroup.flat_table())
        .collect();
    let rejected: Vec<&Vec<u8>> = leaves
        .iter()
        .filter(|t| !kept.contains(t.as_slice()))
        .collect();
    let want = ((rejected.len() as f64 * fraction).ceil() as usize)
        .clamp(1.min(rejected.len()), rejected.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample: Vec<&&Vec<u8>> = rejected.choose_multiple(&mut rng, want).collect();
    let mut by_fp: HashMap<&IsoFingerprint, Vec<&CatalogEntry>> = HashMap::new();
    for e in &catalog.entries {
        by_fp.entry(&e.fingerprint).or_default().push(e);
    }
    let mut unmatched = Vec::new();
    for t in &sample {
        let s = Arc::new(FiniteSemigroup::from_flat_trusted(n, t.to_vec()));
        let fp = IsoFingerprint::of(&s);
        let matched = by_fp.get(&fp).is_some_and(|c| {
            c.iter()
                .any(|e| find_isomorphism(&s, &e.semigroup).is_some())
        });
        if !matched {
            unmatched.push(s.flat_table().iter().map(|&v| v as usize).collect());
        }
    }
    Ok(AuditReport {
        order: n,
        seed,
        rejected: rejected.len(),
        sampled: sample.len(),
        unmatched,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeOptions {
    pub jobs: usize,
    /// Re-run negative decisions with the unpruned search. Defaults to on
    /// for orders up to 3.
    pub double_check_negatives: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub left: CanonicalId,
    pub right: CanonicalId,
    pub left_table: Vec<Vec<usize>>,
    pub right_table: Vec<Vec<usize>>,
    /// Isomorphism between the power semigroups (element `i` is mask `i+1`).
    pub map: Vec<usize>,
    pub reverified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub order: usize,
    pub classes: usize,
    pub pairs_checked: usize,
    pub counterexamples: Vec<Counterexample>,
    pub pruned_by_fingerprint: usize,
    /// Pairs that went to backtracking search.
    pub searched: usize,
    /// Negative answers confirmed by the unpruned search.
    pub double_checked: usize,
    /// Negative answers the unpruned search contradicted.
    pub double_check_disagreements: usize,
    pub elapsed_ms: u64,
}

impl ProbeReport {
    /// Zeroes wall-clock fields so that reports of identical runs compare
    /// byte for byte.
    pub fn without_timings(mut self) -> Self {
        self.elapsed_ms = 0;
        self
    }
}

enum PairOutcome {
    Pruned,
    Different {
        double_checked: bool,
        disagreement: bool,
    },
    Isomorphic(Box<Counterexample>),
}

/// Decides, for every unordered pair of distinct entries, whether their
/// power semigroups are isomorphic.
pub fn global_iso_probe(catalog: &Catalog, opts: ProbeOptions) -> Result<ProbeReport> {
    let start = Instant::now();
    if !catalog.up_to_isomorphism {
        return Err(Error::precondition(crate::error::Precondition::Other(
            "probe requires a catalog up to isomorphism".into(),
        )));
    }
    let pool = thread_pool(opts.jobs);
    let entries = &catalog.entries;
    pool.install(|| {
        entries.par_iter().for_each(|e| {
            e.power_fingerprint();
        })
    });
    let digests: Vec<u64> = entries
        .iter()
        .map(|e| e.power_fingerprint().digest())
        .collect();
    let pairs: Vec<(usize, usize)> = (0..entries.len())
        .flat_map(|i| (i + 1..entries.len()).map(move |j| (i, j)))
        .collect();
    let decide = |&(i, j): &(usize, usize)| -> PairOutcome {
        let (a, b) = (&entries[i], &entries[j]);
        let same_fp = digests[i] == digests[j] && a.power_fingerprint() == b.power_fingerprint();
        let found = if same_fp {
            decide_isomorphism(
                a.power(),
                b.power(),
                a.power_fingerprint(),
                b.power_fingerprint(),
            )
            .1
        } else {
            None
        };
        match found {
            Some(f) => {
                let recheck = Morphism::new(a.power().clone(), b.power().clone(), f.map().to_vec());
                Box::new(Counterexample {
                    left: a.id,
                    right: b.id,
                    left_table: a.semigroup.rows(),
                    right_table: b.semigroup.rows(),
                    map: f.map().to_vec(),
                    reverified: recheck.is_ok_and(|m| m.is_isomorphism()),
                })
                .into()
            }
            None if opts.double_check_negatives => {
                let disagreement = find_isomorphism_unpruned(a.power(), b.power()).is_some();
                PairOutcome::Different {
                    double_checked: true,
                    disagreement,
                }
            }
            None if !same_fp => PairOutcome::Pruned,
            None => PairOutcome::Different {
                double_checked: false,
                disagreement: false,
            },
        }
    };
    let outcomes: Vec<PairOutcome> = pool.install(|| pairs.par_iter().map(decide).collect());

    let mut report = ProbeReport {
        order: catalog.order,
        classes: entries.len(),
        pairs_checked: pairs.len(),
        counterexamples: Vec::new(),
        pruned_by_fingerprint: 0,
        searched: 0,
        double_checked: 0,
        double_check_disagreements: 0,
        elapsed_ms: 0,
    };
    for (&(i, j), outcome) in pairs.iter().zip(outcomes) {
        let same_fp = digests[i] == digests[j]
            && entries[i].power_fingerprint() == entries[j].power_fingerprint();
        if same_fp {
            report.searched += 1;
        } else {
            report.pruned_by_fingerprint += 1;
        }
        match outcome {
            PairOutcome::Pruned => {}
            PairOutcome::Different {
                double_checked,
                disagreement,
            } => {
                report.double_checked += double_checked as usize;
                report.double_check_disagreements += disagreement as usize;
            }
            PairOutcome::Isomorphic(c) => report.counterexamples.push(*c),
        }
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

impl From<Box<Counterexample>> for PairOutcome {
    fn from(c: Box<Counterexample>) -> Self {
        PairOutcome::Isomorphic(c)
    }
}

/// All set partitions of `0..n` as restricted growth strings, in
/// lexicographic order.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { max + 1 };
        for l in 0..=limit {
            cur.push(l);
            rec(n, cur, max.max(l), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), 0, &mut out);
    out
}

/// Every congruence of `s`, found by filtering all set partitions.
pub fn congruences(s: &FiniteSemigroup) -> Vec<Congruence> {
    set_partitions(s.order())
        .into_iter()
        .filter_map(|labels| Congruence::from_partition(s, &labels).ok())
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct AgreementOptions {
    pub seed: u64,
    /// Random downward-complete closures per commutative entry.
    pub closure_samples: usize,
}

impl Default for AgreementOptions {
    fn default() -> Self {
        AgreementOptions {
            seed: 0,
            closure_samples: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifierDisagreement {
    pub entry: CanonicalId,
    pub family: String,
    pub members: Vec<u64>,
    pub bruteforce: Vec<u64>,
    pub structural: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub max_order: usize,
    pub seed: u64,
    pub commutative_entries: usize,
    pub families_checked: usize,
    pub congruence_families: usize,
    pub closure_families: usize,
    pub witnesses_checked: usize,
    pub violations: Vec<ClassifierDisagreement>,
    pub witness_failures: Vec<String>,
}

impl CheckReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty() && self.witness_failures.is_empty()
    }
}

/// Compares the brute-force and structural cancellativity classifiers on
/// every commutative entry of the given catalogs: on the full power
/// semigroup, on every congruence family and on seeded random closures.
/// Every non-singleton member of every family also gets a checked witness.
pub fn classifier_agreement_check(catalogs: &[&Catalog], opts: AgreementOptions) -> CheckReport {
    let mut report = CheckReport {
        max_order: catalogs.iter().map(|c| c.order).max().unwrap_or(0),
        seed: opts.seed,
        commutative_entries: 0,
        families_checked: 0,
        congruence_families: 0,
        closure_families: 0,
        witnesses_checked: 0,
        violations: Vec::new(),
        witness_failures: Vec::new(),
    };
    for catalog in catalogs {
        for entry in catalog.commutative() {
            report.commutative_entries += 1;
            let s = &entry.semigroup;
            let mut families: Vec<(String, SubsetFamily)> = Vec::new();
            families.push((
                "full".into(),
                SubsetFamily::full(s.clone()).expect("small order"),
            ));
            for c in congruences(s) {
                report.congruence_families += 1;
                let fam = congruence_family(s.clone(), &c).expect("same carrier");
                families.push((format!("congruence {:?}", c.labels()), fam));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(
                opts.seed ^ ((entry.id.order as u64) << 32 | entry.id.index as u64),
            );
            let full_mask = (1u64 << s.order()) - 1;
            for _ in 0..opts.closure_samples {
                let k = rng.gen_range(1..=2);
                let gens: Vec<SubsetElement> = (0..k)
                    .map(|_| SubsetElement::new(rng.gen_range(1..=full_mask)).expect("non-zero"))
                    .collect();
                let fam = downward_complete_closure(s.clone(), &gens).expect("small order");
                report.closure_families += 1;
                let masks: Vec<u64> = gens.iter().map(|g| g.mask()).collect();
                families.push((format!("closure {masks:?}"), fam));
            }
            for (name, fam) in &families {
                report.families_checked += 1;
                let brute = cancellative_elements_bruteforce(fam);
                let structural = classify_cancellatives_structural(fam);
                let (brute, structural) = match (brute, structural) {
                    (Ok(b), Ok(s)) => (b, s),
                    (b, s) => {
                        report.witness_failures.push(format!(
                            "{:?} {name}: classifier error {:?} / {:?}",
                            entry.id,
                            b.err(),
                            s.err()
                        ));
                        continue;
                    }
                };
                if brute != structural {
                    report.violations.push(ClassifierDisagreement {
                        entry: entry.id,
                        family: name.clone(),
                        members: fam.members().iter().map(|m| m.mask()).collect(),
                        bruteforce: brute.iter().map(|m| m.mask()).collect(),
                        structural: structural.iter().map(|m| m.mask()).collect(),
                    });
                }
                for &a in fam.members().iter().filter(|a| a.len() >= 2) {
                    report.witnesses_checked += 1;
                    if let Err(e) = witness_noncancellative(fam, a) {
                        report
                            .witness_failures
                            .push(format!("{:?} {name} A={a}: {e}", entry.id));
                    }
                }
            }
        }
    }
    report
}

/// Shuffled copy of `0..n`, for tests that need random relabellings.
pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        for (n, labelled, classes) in [(1, 1, 1), (2, 8, 5), (3, 113, 24)] {
            let c = enumerate_semigroups(n, true, CatalogOptions::default()).unwrap();
            assert_eq!(c.stats.associative_tables, labelled, "order {n}");
            assert_eq!(c.entries.len(), classes, "order {n}");
            let all = enumerate_semigroups(n, false, CatalogOptions::default()).unwrap();
            assert_eq!(all.entries.len(), labelled);
        }
    }

    #[test]
    fn order_gate() {
        assert!(matches!(
            enumerate_semigroups(5, true, CatalogOptions::default()),
            Err(Error::OrderUnsupported { .. })
        ));
        assert!(enumerate_semigroups(0, true, CatalogOptions::default()).is_err());
        assert!(enumerate_semigroups(
            6,
            true,
            CatalogOptions {
                long_running: true,
                jobs: 1
            }
        )
        .is_err());
    }

    #[test]
    fn entries_sorted_and_lex_min() {
        let c = enumerate_semigroups(3, true, CatalogOptions::default()).unwrap();
        let tables: Vec<&[u8]> = c.entries.iter().map(|e| e.semigroup.flat_table()).collect();
        assert!(tables.windows(2).all(|w| w[0] < w[1]));
        let perms = permutations(3);
        assert!(tables.iter().all(|t| is_lex_min(3, t, &perms)));
    }

    #[test]
    fn partitions_are_bell_numbers() {
        let bell: Vec<usize> = (1..=5).map(|n| set_partitions(n).len()).collect();
        assert_eq!(bell, vec![1, 2, 5, 15, 52]);
    }

    #[test]
    fn congruences_of_z4() {
        // subgroups of Z4: {0}, {0,2}, Z4
        assert_eq!(congruences(&FiniteSemigroup::cyclic_group(4)).len(), 3);
    }

    #[test]
    fn probe_order_2() {
        let c = enumerate_semigroups(2, true, CatalogOptions::default()).unwrap();
        let r = global_iso_probe(
            &c,
            ProbeOptions {
                jobs: 2,
                double_check_negatives: true,
            },
        )
        .unwrap();
        assert_eq!(r.pairs_checked, 10);
        assert!(r.counterexamples.is_empty());
        assert_eq!(r.double_check_disagreements, 0);
        assert_eq!(r.pruned_by_fingerprint + r.searched, 10);
    }

    #[test]
    fn classifier_agreement_order_3_clean() {
        let cats: Vec<Catalog> = (1..=3)
            .map(|n| enumerate_semigroups(n, true, CatalogOptions::default()).unwrap())
            .collect();
        let refs: Vec<&Catalog> = cats.iter().collect();
        let r = classifier_agreement_check(&refs, AgreementOptions::default());
        assert!(r.clean(), "{r:?}");
        assert!(r.families_checked > r.commutative_entries);
    }
}
