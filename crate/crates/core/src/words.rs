//! Binary words, the Thue–Morse morphism and the structural facts about
//! Thue–Morse words that the lower-bound reduction relies on.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sam::SuffixAutomaton;

/// Longest word the generators will materialize unless told otherwise.
pub const DEFAULT_MAX_LEN: usize = 1 << 24;

/// A finite word over `{a, b}`, indexed from 0.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: impl Into<Vec<u8>>) -> Result<Self> {
        let symbols = symbols.into();
        if let Some(offset) = symbols.iter().position(|&c| c != b'a' && c != b'b') {
            return Err(Error::InvalidSymbol { offset, byte: symbols[offset] });
        }
        Ok(Word(symbols))
    }

    pub(crate) fn from_trusted(symbols: Vec<u8>) -> Self {
        debug_assert!(symbols.iter().all(|&c| c == b'a' || c == b'b'));
        Word(symbols)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn at(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn distinct_letters(&self) -> usize {
        let a = self.0.contains(&b'a') as usize;
        let b = self.0.contains(&b'b') as usize;
        a + b
    }

    /// Parses the word file format: one line of `a`/`b` terminated by a
    /// single newline, nothing else.
    pub fn from_file_bytes(bytes: &[u8]) -> Result<Self> {
        let Some((&last, body)) = bytes.split_last() else {
            return Err(Error::Parse { line: 1, message: "empty file".into() });
        };
        if last != b'\n' {
            return Err(Error::Parse { line: 1, message: "missing terminating newline".into() });
        }
        Word::new(body.to_vec())
    }

    pub fn to_file_string(&self) -> String {
        let mut s = self.to_string();
        s.push('\n');
        s
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::new(s.as_bytes().to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Validated on construction, always ASCII.
        f.write_str(std::str::from_utf8(&self.0).unwrap())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

/// A letter-to-word substitution on `{a, b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub image_of_a: Word,
    pub image_of_b: Word,
}

impl Morphism {
    /// The Thue–Morse morphism `a -> ab`, `b -> ba`.
    pub fn thue_morse() -> Self {
        Morphism {
            image_of_a: Word::from_trusted(b"ab".to_vec()),
            image_of_b: Word::from_trusted(b"ba".to_vec()),
        }
    }

    pub fn image(&self, letter: u8) -> &Word {
        if letter == b'a' {
            &self.image_of_a
        } else {
            &self.image_of_b
        }
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Vec::with_capacity(w.len() * self.image_of_a.len().max(self.image_of_b.len()));
        for &c in w.as_bytes() {
            out.extend_from_slice(self.image(c).as_bytes());
        }
        Word(out)
    }
}

pub fn apply_morphism(m: &Morphism, w: &Word) -> Word {
    m.apply(w)
}

fn checked_len(n: u32, limit: usize) -> Result<usize> {
    let requested = 1usize.checked_shl(n).filter(|&l| n < usize::BITS && l > 0);
    match requested {
        Some(len) if len <= limit => Ok(len),
        Some(len) => Err(Error::Budget { requested: len, limit }),
        None => Err(Error::Budget { requested: usize::MAX, limit }),
    }
}

/// The Thue–Morse word `t_n = mu^n(a)`, of length `2^n`.
pub fn thue_morse(n: u32) -> Result<Word> {
    thue_morse_with_limit(n, DEFAULT_MAX_LEN)
}

pub fn thue_morse_with_limit(n: u32, max_len: usize) -> Result<Word> {
    let len = checked_len(n, max_len)?;
    // t_n[i] is `b` exactly when i has an odd number of one bits.
    let symbols = (0..len)
        .map(|i| if i.count_ones() % 2 == 0 { b'a' } else { b'b' })
        .collect();
    Ok(Word(symbols))
}

/// Returns `n` when `w` equals `t_n`.
pub fn thue_morse_index(w: &Word) -> Option<u32> {
    if !w.len().is_power_of_two() {
        return None;
    }
    let n = w.len().trailing_zeros();
    let matches = w
        .as_bytes()
        .iter()
        .enumerate()
        .all(|(i, &c)| (c == b'b') == (i.count_ones() % 2 == 1));
    matches.then_some(n)
}

/// Undoes the Thue–Morse morphism: `ab -> a`, `ba -> b`.
pub fn inverse_tm_morphism(w: &Word) -> Result<Word> {
    if w.len() % 2 != 0 {
        return Err(Error::OddLength(w.len()));
    }
    let mut out = Vec::with_capacity(w.len() / 2);
    for (index, block) in w.as_bytes().chunks_exact(2).enumerate() {
        match block {
            b"ab" => out.push(b'a'),
            b"ba" => out.push(b'b'),
            _ => {
                return Err(Error::NotMorphicImage {
                    index,
                    block: String::from_utf8_lossy(block).into_owned(),
                })
            }
        }
    }
    Ok(Word(out))
}

/// All (possibly overlapping) occurrences of a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceSet {
    pub pattern: Word,
    pub positions: Vec<usize>,
    pub parities: BTreeSet<usize>,
}

pub fn occurrences(w: &Word, pattern: &Word) -> Result<OccurrenceSet> {
    if pattern.is_empty() {
        return Err(Error::usage("pattern must be non-empty"));
    }
    let positions: Vec<usize> = if pattern.len() > w.len() {
        Vec::new()
    } else {
        w.as_bytes()
            .windows(pattern.len())
            .enumerate()
            .filter(|(_, win)| *win == pattern.as_bytes())
            .map(|(i, _)| i)
            .collect()
    };
    let parities = positions.iter().map(|p| p % 2).collect();
    Ok(OccurrenceSet { pattern: pattern.clone(), positions, parities })
}

/// Two occurrences of `factor`, at `first < second`, sharing a position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapWitness {
    pub factor: Word,
    pub first: usize,
    pub second: usize,
}

/// Finds a factor with two overlapping occurrences, if any.
///
/// Two occurrences of `u` at `i < j < i + |u|` exist exactly when some
/// window of length `2p + 1` has period `p = j - i`; the witness reported is
/// the shortest such factor (smallest period, then leftmost).
pub fn has_overlapping_factors(w: &Word) -> Option<OverlapWitness> {
    let s = w.as_bytes();
    let n = s.len();
    for period in 1..=n / 2 {
        let mut run = 0usize;
        for k in 0..n - period {
            if s[k] == s[k + period] {
                run += 1;
                if run == period + 1 {
                    let first = k + 1 - run;
                    return Some(OverlapWitness {
                        factor: Word(s[first..first + period + 1].to_vec()),
                        first,
                        second: first + period,
                    });
                }
            } else {
                run = 0;
            }
        }
    }
    None
}

/// Factors whose occurrences in a Thue–Morse word may start at both parities.
pub const PARITY_EXEMPT: [&str; 6] = ["aba", "bab", "ab", "ba", "a", "b"];

pub fn is_parity_exempt(factor: &[u8]) -> bool {
    PARITY_EXEMPT.iter().any(|e| e.as_bytes() == factor)
}

/// A factor occurring at both an even and an odd position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityWitness {
    pub factor: Word,
    pub even_occ: usize,
    pub odd_occ: usize,
}

/// Finds a non-exempt factor of `w` whose occurrences have mixed parity.
///
/// All substrings of one suffix-automaton class share their end positions,
/// so a class has uniform start parity for each length iff its end
/// positions have uniform parity.
pub fn mixed_parity_factor(w: &Word) -> Option<ParityWitness> {
    let sam = SuffixAutomaton::new(w.as_bytes());
    // Per class: (smallest even end, smallest odd end).
    let ends = sam.fold_endpos(
        |e| if e % 2 == 0 { (e, usize::MAX) } else { (usize::MAX, e) },
        (usize::MAX, usize::MAX),
        |a, b| (a.0.min(b.0), a.1.min(b.1)),
    );
    let mut best: Option<ParityWitness> = None;
    for state in 1..sam.state_count() {
        let (even_end, odd_end) = ends[state];
        if even_end == usize::MAX || odd_end == usize::MAX {
            continue;
        }
        let Some(len) = (sam.min_len(state)..=sam.len[state])
            .find(|&l| !is_parity_exempt(&w.as_bytes()[even_end + 1 - l..=even_end]))
        else {
            continue;
        };
        let (a, b) = (even_end + 1 - len, odd_end + 1 - len);
        let (even_occ, odd_occ) = if a % 2 == 0 { (a, b) } else { (b, a) };
        let candidate = ParityWitness {
            factor: Word(w.as_bytes()[a..a + len].to_vec()),
            even_occ,
            odd_occ,
        };
        let better = match &best {
            None => true,
            Some(cur) => (len, even_occ.min(odd_occ)) < (cur.factor.len(), cur.even_occ.min(cur.odd_occ)),
        };
        if better {
            best = Some(candidate);
        }
    }
    best
}

/// Checks that every non-exempt factor of `t_n` occurs at a single parity.
pub fn check_parity_lemma(n: u32) -> Result<Option<ParityWitness>> {
    Ok(mixed_parity_factor(&thue_morse(n)?))
}

/// Outcome of one structural check on `t_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaOutcome {
    Pass,
    Fail(String),
}

impl LemmaOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, LemmaOutcome::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub n: u32,
    /// `aa` and `bb` start only at odd positions.
    pub squares_odd: LemmaOutcome,
    pub overlap_free: LemmaOutcome,
    /// `abab` and `baba` start only at even positions.
    pub alternations_even: LemmaOutcome,
    pub parity: LemmaOutcome,
    /// `t_n` is a prefix of `t_(n+1)`, and starts with `abbab` when n >= 3.
    pub prefix: LemmaOutcome,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.entries().iter().all(|(_, o)| o.passed())
    }

    pub fn entries(&self) -> [(&'static str, &LemmaOutcome); 5] {
        [
            ("squares_odd", &self.squares_odd),
            ("overlap_free", &self.overlap_free),
            ("alternations_even", &self.alternations_even),
            ("parity_classes", &self.parity),
            ("prefix", &self.prefix),
        ]
    }
}

fn parity_outcome(w: &Word, patterns: [&str; 2], parity: usize) -> Result<LemmaOutcome> {
    for p in patterns {
        let occ = occurrences(w, &p.parse()?)?;
        if let Some(&bad) = occ.positions.iter().find(|&&q| q % 2 != parity) {
            return Ok(LemmaOutcome::Fail(format!("{p} occurs at {bad}")));
        }
    }
    Ok(LemmaOutcome::Pass)
}

/// Runs every structural check on `t_n`.
pub fn lemma_suite(n: u32) -> Result<LemmaReport> {
    let t = thue_morse(n)?;
    let next = thue_morse(n + 1)?;

    let squares_odd = parity_outcome(&t, ["aa", "bb"], 1)?;
    let alternations_even = parity_outcome(&t, ["abab", "baba"], 0)?;
    let overlap_free = match has_overlapping_factors(&t) {
        None => LemmaOutcome::Pass,
        Some(o) => LemmaOutcome::Fail(format!("{} at {} and {}", o.factor, o.first, o.second)),
    };
    let parity = match mixed_parity_factor(&t) {
        None => LemmaOutcome::Pass,
        Some(p) => LemmaOutcome::Fail(format!("{} at {} and {}", p.factor, p.even_occ, p.odd_occ)),
    };
    let prefix = if !t.is_prefix_of(&next) {
        LemmaOutcome::Fail(format!("t_{n} is not a prefix of t_{}", n + 1))
    } else if n >= 3 && !t.as_bytes().starts_with(b"abbab") {
        LemmaOutcome::Fail("does not start with abbab".into())
    } else {
        LemmaOutcome::Pass
    };
    Ok(LemmaReport { n, squares_odd, overlap_free, alternations_even, parity, prefix })
}
