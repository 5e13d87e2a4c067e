//! Free semigroups: non-empty words over a finite alphabet under
//! concatenation.
//!
//! Every non-empty set of one-letter words is cancellative among sets of
//! words, because words factor uniquely into letters: for distinct letters
//! `x1`, `x2` the sets `x1 Y1` and `x2 Y2` never meet. The campaign below
//! checks this on seeded random inputs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Precondition, Result};

/// A non-empty word; letters are alphabet indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Option<Self> {
        (!letters.is_empty()).then_some(Word(letters))
    }

    pub fn letter(x: u8) -> Self {
        Word(vec![x])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            if l < 26 {
                write!(f, "{}", (b'a' + l) as char)?;
            } else {
                write!(f, "[{l}]")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Lowercase letters, `a` being letter 0.
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .bytes()
            .map(|b| {
                if b.is_ascii_lowercase() {
                    Ok(b - b'a')
                } else {
                    Err(Error::Parse(format!(
                        "bad letter {:?} in word {s:?}",
                        b as char
                    )))
                }
            })
            .collect::<Result<Vec<u8>>>()?;
        Word::new(letters).ok_or_else(|| Error::Parse("empty word".into()))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub type WordSet = BTreeSet<Word>;

/// Parses a comma-separated list of words.
pub fn parse_word_set(s: &str) -> Result<WordSet> {
    s.split(',').map(|w| w.trim().parse()).collect()
}

/// `{x y : x in X, y in Y}`.
pub fn free_setwise_product(x: &WordSet, y: &WordSet) -> WordSet {
    x.iter()
        .flat_map(|a| y.iter().map(move |b| a.concat(b)))
        .collect()
}

fn require_letters(x: &WordSet, y1: &WordSet, y2: &WordSet) -> Result<()> {
    if x.is_empty() || y1.is_empty() || y2.is_empty() {
        return Err(Error::precondition(Precondition::Other(
            "word sets must be non-empty".into(),
        )));
    }
    if x.iter().any(|w| w.len() != 1) {
        return Err(Error::precondition(Precondition::Other(
            "multiplier must consist of one-letter words".into(),
        )));
    }
    Ok(())
}

/// Whether `X` separates `Y1` and `Y2` exactly when they differ, on both
/// sides: `(X Y1 == X Y2) == (Y1 == Y2)` and likewise for `Y1 X`, `Y2 X`.
/// `X` must consist of one-letter words.
pub fn free_cancellativity_check(x: &WordSet, y1: &WordSet, y2: &WordSet) -> Result<bool> {
    require_letters(x, y1, y2)?;
    let equal = y1 == y2;
    let left = (free_setwise_product(x, y1) == free_setwise_product(x, y2)) == equal;
    let right = (free_setwise_product(y1, x) == free_setwise_product(y2, x)) == equal;
    Ok(left && right)
}

/// `x1 Y1` and `x2 Y2` are disjoint for all distinct `x1, x2` in `X`.
pub fn disjointness_holds(x: &WordSet, y1: &WordSet, y2: &WordSet) -> bool {
    x.iter().all(|x1| {
        x.iter().filter(|x2| *x2 != x1).all(|x2| {
            let a: WordSet = y1.iter().map(|y| x1.concat(y)).collect();
            y2.iter().all(|y| !a.contains(&x2.concat(y)))
        })
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FreeCampaignOptions {
    pub alphabet: u8,
    pub trials: usize,
    pub seed: u64,
    pub max_word_len: usize,
    pub max_set_size: usize,
}

impl Default for FreeCampaignOptions {
    fn default() -> Self {
        FreeCampaignOptions {
            alphabet: 3,
            trials: 10_000,
            seed: 0,
            max_word_len: 6,
            max_set_size: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeViolation {
    pub trial: usize,
    pub x: Vec<Word>,
    pub y1: Vec<Word>,
    pub y2: Vec<Word>,
    pub cancellation_ok: bool,
    pub disjoint: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreeCampaignReport {
    pub alphabet: u8,
    pub trials: usize,
    pub seed: u64,
    pub equal_pairs: usize,
    pub distinct_pairs: usize,
    /// Trials whose multiplier had two or more letters and separated two
    /// distinct sets: explicit non-singleton cancellations.
    pub non_singleton_separations: usize,
    pub violations: Vec<FreeViolation>,
}

fn random_word(rng: &mut ChaCha8Rng, alphabet: u8, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    Word((0..len).map(|_| rng.gen_range(0..alphabet)).collect())
}

fn random_set(rng: &mut ChaCha8Rng, alphabet: u8, max_len: usize, max_size: usize) -> WordSet {
    let size = rng.gen_range(1..=max_size);
    (0..size)
        .map(|_| random_word(rng, alphabet, max_len))
        .collect()
}

/// A set close to `y`: one word added, removed or replaced.
fn mutate(rng: &mut ChaCha8Rng, y: &WordSet, alphabet: u8, max_len: usize) -> WordSet {
    let mut out = y.clone();
    match rng.gen_range(0..3) {
        0 => {
            out.insert(random_word(rng, alphabet, max_len));
        }
        1 if out.len() > 1 => {
            let victim = out.iter().nth(rng.gen_range(0..out.len())).cloned();
            out.remove(&victim.expect("index in range"));
        }
        _ => {
            let victim = out.iter().nth(rng.gen_range(0..out.len())).cloned();
            out.remove(&victim.expect("index in range"));
            out.insert(random_word(rng, alphabet, max_len));
        }
    }
    out
}

/// Runs seeded random trials of [`free_cancellativity_check`] together with
/// the disjointness check.
pub fn free_campaign(opts: FreeCampaignOptions) -> Result<FreeCampaignReport> {
    if opts.alphabet == 0 || opts.alphabet > 26 {
        return Err(Error::Parse("alphabet size must be in 1..=26".into()));
    }
    if opts.max_word_len == 0 || opts.max_set_size == 0 {
        return Err(Error::Parse(
            "word length and set size bounds must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = FreeCampaignReport {
        alphabet: opts.alphabet,
        trials: opts.trials,
        seed: opts.seed,
        equal_pairs: 0,
        distinct_pairs: 0,
        non_singleton_separations: 0,
        violations: Vec::new(),
    };
    let (a, len, size) = (opts.alphabet, opts.max_word_len, opts.max_set_size);
    for trial in 0..opts.trials {
        let letters: WordSet = loop {
            let pick: WordSet = (0..a)
                .filter(|_| rng.gen_bool(0.5))
                .map(Word::letter)
                .collect();
            if !pick.is_empty() {
                break pick;
            }
        };
        let y1 = random_set(&mut rng, a, len, size);
        let y2 = match rng.gen_range(0..4) {
            0 => y1.clone(),
            1 => random_set(&mut rng, a, len, size),
            _ => mutate(&mut rng, &y1, a, len),
        };
        if y1 == y2 {
            report.equal_pairs += 1;
        } else {
            report.distinct_pairs += 1;
        }
        let ok = free_cancellativity_check(&letters, &y1, &y2)?;
        let disjoint = disjointness_holds(&letters, &y1, &y2);
        if ok && y1 != y2 && letters.len() >= 2 {
            report.non_singleton_separations += 1;
        }
        if !ok || !disjoint {
            report.violations.push(FreeViolation {
                trial,
                x: letters.into_iter().collect(),
                y1: y1.into_iter().collect(),
                y2: y2.into_iter().collect(),
                cancellation_ok: ok,
                disjoint,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(s: &str) -> WordSet {
        parse_word_set(s).unwrap()
    }

    #[test]
    fn product_examples() {
        assert_eq!(free_setwise_product(&ws("a,b"), &ws("ab")), ws("aab,bab"));
        assert_eq!(free_setwise_product(&ws("a"), &ws("a")), ws("aa"));
        assert_eq!(free_setwise_product(&ws("a,ab"), &ws("b")), ws("ab,abb"));
    }

    #[test]
    fn check_examples() {
        let x = ws("a,b");
        assert_eq!(free_setwise_product(&x, &ws("ab,b")), ws("aab,bab,ab,bb"));
        assert!(free_cancellativity_check(&x, &ws("ab"), &ws("ab,b")).unwrap());
        assert!(free_cancellativity_check(&x, &ws("ab"), &ws("ab")).unwrap());
        assert!(disjointness_holds(&x, &ws("ab"), &ws("ab,b")));
        assert!(free_cancellativity_check(&ws("ab"), &ws("a"), &ws("a")).is_err());
    }

    #[test]
    fn mixed_length_multiplier_can_fail() {
        // lengths behave like sumsets in N: {1,2} + {1,2,3} = {1,2} + {1,3}
        let x = ws("a,aa");
        let y1 = ws("a,aa,aaa");
        let y2 = ws("a,aaa");
        assert_eq!(free_setwise_product(&x, &y1), free_setwise_product(&x, &y2));
        assert!(!disjointness_holds(&x, &y1, &y2));
    }

    #[test]
    fn words_parse_and_display() {
        let w: Word = "cab".parse().unwrap();
        assert_eq!(w.letters(), &[2, 0, 1]);
        assert_eq!(w.to_string(), "cab");
        assert!("".parse::<Word>().is_err());
        assert!("aB".parse::<Word>().is_err());
        assert!(Word::new(vec![]).is_none());
    }

    #[test]
    fn small_campaign_is_clean() {
        let r = free_campaign(FreeCampaignOptions {
            trials: 500,
            seed: 7,
            ..Default::default()
        })
        .unwrap();
        assert!(r.violations.is_empty());
        assert!(r.equal_pairs > 0 && r.distinct_pairs > 0);
        assert!(r.non_singleton_separations > 0);
    }
}
