//! Repetitiveness measures: substring complexity δ, the LZ77 factor count
//! `z`, the BWT run count `r`, and a report putting them next to γ and `b`.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::sam::SuffixAutomaton;
use crate::solve::{self, SearchLimits, Solution};
use crate::suffix_array::suffix_array;
use crate::words::{thue_morse_index, Word};

/// BWT sentinel; sorts before both letters.
pub const SENTINEL: u8 = b'$';

/// `max_k d_k / k` as a fraction in lowest terms, with the smallest
/// maximizing `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delta {
    pub num: usize,
    pub den: usize,
    pub k: usize,
}

impl Delta {
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Compares δ against an integer.
    pub fn cmp_int(&self, x: usize) -> Ordering {
        self.num.cmp(&(x * self.den))
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn delta(w: &Word) -> Result<Delta> {
    if w.is_empty() {
        return Err(Error::usage("delta of the empty word is undefined"));
    }
    let counts = SuffixAutomaton::new(w.as_bytes()).distinct_counts_by_length(w.len());
    let (mut num, mut k) = (counts[1], 1);
    for (len, &d) in counts.iter().enumerate().skip(2) {
        if d * k > num * len {
            num = d;
            k = len;
        }
    }
    let g = gcd(num, k);
    Ok(Delta { num: num / g, den: k / g, k })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    pub start: usize,
    pub len: usize,
    /// `None` for a literal.
    pub source: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lz77 {
    pub factors: Vec<Factor>,
}

impl Lz77 {
    pub fn z(&self) -> usize {
        self.factors.len()
    }

    /// Rebuilds the text; literal letters are read from `letters`.
    pub fn decode(&self, letters: &Word) -> Word {
        let mut out: Vec<u8> = Vec::new();
        for f in &self.factors {
            match f.source {
                None => out.push(letters.at(f.start)),
                Some(s) => {
                    for o in 0..f.len {
                        out.push(out[s + o]);
                    }
                }
            }
        }
        Word::from_trusted(out)
    }
}

/// `z[i]` = longest common prefix of `s` and `s[i..]`.
fn z_function(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0, 0);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// Greedy self-referential LZ77: each factor is the longest prefix of the
/// rest that also starts at an earlier position (smallest such position on
/// ties), or a literal when its letter is new.
pub fn lz77(w: &Word) -> Lz77 {
    let t = w.as_bytes();
    let n = t.len();
    let mut factors = Vec::new();
    let mut i = 0;
    let mut buf = Vec::with_capacity(2 * n + 1);
    while i < n {
        // Against the whole text so matches may run on into the factor.
        buf.clear();
        buf.extend_from_slice(&t[i..]);
        buf.push(0);
        buf.extend_from_slice(t);
        let z = z_function(&buf);
        let offset = n - i + 1;
        let mut best = (0, 0);
        for j in 0..i {
            if z[offset + j] > best.0 {
                best = (z[offset + j], j);
            }
        }
        let factor = if best.0 == 0 {
            Factor { start: i, len: 1, source: None }
        } else {
            Factor { start: i, len: best.0, source: Some(best.1) }
        };
        i += factor.len;
        factors.push(factor);
    }
    Lz77 { factors }
}

/// Last column of the sorted rotations of `w$`.
pub fn bwt(w: &Word) -> Vec<u8> {
    let mut s = w.as_bytes().to_vec();
    s.push(SENTINEL);
    let n = s.len();
    suffix_array(&s).into_iter().map(|i| s[(i + n - 1) % n]).collect()
}

pub fn run_count(s: &[u8]) -> usize {
    if s.is_empty() {
        0
    } else {
        1 + s.windows(2).filter(|p| p[0] != p[1]).count()
    }
}

pub fn bwt_run_count(w: &Word) -> usize {
    run_count(&bwt(w))
}

/// Inverts [`bwt`].
pub fn inverse_bwt(last: &[u8]) -> Result<Word> {
    let n = last.len();
    if last.iter().filter(|&&c| c == SENTINEL).count() != 1 {
        return Err(Error::usage("BWT must contain exactly one sentinel"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (last[i], i));
    let mut lf = vec![0; n];
    for (j, &i) in order.iter().enumerate() {
        lf[i] = j;
    }
    // Row 0 is the rotation starting with the sentinel; walking LF reads
    // the text backwards.
    let mut out = Vec::with_capacity(n - 1);
    let mut row = 0;
    for _ in 0..n - 1 {
        out.push(last[row]);
        row = lf[row];
    }
    out.reverse();
    Word::new(out)
}

/// An exact value or what is known about it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimate {
    Exact(usize),
    Bracket { lower: usize, upper: usize },
    Upper(usize),
}

impl Estimate {
    pub fn exact(&self) -> Option<usize> {
        match self {
            Estimate::Exact(v) => Some(*v),
            _ => None,
        }
    }

    pub fn upper(&self) -> usize {
        match *self {
            Estimate::Exact(v) | Estimate::Upper(v) | Estimate::Bracket { upper: v, .. } => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainVerdict {
    pub relation: &'static str,
    /// `None` when a side is not exact.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub n: usize,
    pub delta: Delta,
    pub gamma: Estimate,
    pub gamma_witness: Vec<usize>,
    pub b: Estimate,
    pub z: usize,
    pub r: usize,
    pub chain: Vec<ChainVerdict>,
}

impl MeasureReport {
    pub fn chain_ok(&self) -> bool {
        self.chain.iter().all(|c| c.holds != Some(false))
    }

    /// One `key=value` per line, fixed order.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| writeln!(out, "{k}={v}").expect("writing to a string");
        line("n", self.n.to_string());
        line("delta_num", self.delta.num.to_string());
        line("delta_den", self.delta.den.to_string());
        line("delta_k", self.delta.k.to_string());
        match self.gamma {
            Estimate::Exact(g) => line("gamma", g.to_string()),
            Estimate::Bracket { lower, upper } => {
                line("gamma_lower", lower.to_string());
                line("gamma_upper", upper.to_string());
            }
            Estimate::Upper(u) => line("gamma_upper", u.to_string()),
        }
        let witness: Vec<String> = self.gamma_witness.iter().map(|p| p.to_string()).collect();
        line("gamma_witness", witness.join(","));
        match self.b {
            Estimate::Exact(b) => line("b_exact", b.to_string()),
            Estimate::Bracket { lower, upper } => {
                line("b_lower", lower.to_string());
                line("b_upper", upper.to_string());
            }
            Estimate::Upper(u) => line("b_upper", u.to_string()),
        }
        line("z", self.z.to_string());
        line("r", self.r.to_string());
        line("chain_ok", self.chain_ok().to_string());
        for c in &self.chain {
            let v = match c.holds {
                Some(h) => h.to_string(),
                None => "skipped".to_string(),
            };
            line(&format!("chain.{}", c.relation), v);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportLimits {
    /// Longest word for which exact b and γ are attempted (each solver also
    /// applies its own ceiling).
    pub exact_limit: usize,
    pub time_budget: Option<Duration>,
    pub workers: usize,
}

impl Default for ReportLimits {
    fn default() -> Self {
        ReportLimits { exact_limit: 64, time_budget: None, workers: 0 }
    }
}

fn solver_limits(base: SearchLimits, limits: &ReportLimits) -> SearchLimits {
    SearchLimits {
        max_word_length: base.max_word_length.min(limits.exact_limit),
        time_budget: limits.time_budget,
        workers: limits.workers,
    }
}

pub fn report(w: &Word, limits: &ReportLimits) -> Result<MeasureReport> {
    let delta = delta(w)?;
    let z = lz77(w).z();
    let r = bwt_run_count(w);

    let g_limits = solver_limits(SearchLimits::for_attractors(), limits);
    let (gamma, gamma_witness) = if w.len() <= g_limits.max_word_length {
        match solve::min_attractor(w, &g_limits)? {
            Solution::Exact { size, witness } => (Estimate::Exact(size), witness),
            Solution::Bracket { lower, upper, witness } => (Estimate::Bracket { lower, upper }, witness),
        }
    } else {
        let witness = solve::attractor_upper_bound(w)?;
        let lower = delta.num.div_ceil(delta.den).max(w.distinct_letters());
        (Estimate::Bracket { lower, upper: witness.len() }, witness)
    };

    let b_limits = solver_limits(SearchLimits::for_schemes(), limits);
    let b = if w.len() <= b_limits.max_word_length {
        match solve::min_scheme(w, &b_limits)? {
            Solution::Exact { size, .. } => Estimate::Exact(size),
            Solution::Bracket { lower, upper, .. } => Estimate::Bracket { lower, upper },
        }
    } else if let Some(n) = thue_morse_index(w).filter(|&n| n >= 2) {
        Estimate::Upper(n as usize + 2)
    } else {
        Estimate::Upper(solve::lz77_scheme(w).size())
    };

    let both = |x: Option<usize>, y: Option<usize>, f: fn(usize, usize) -> bool| x.zip(y).map(|(x, y)| f(x, y));
    let chain = vec![
        ChainVerdict { relation: "delta_le_gamma", holds: gamma.exact().map(|g| delta.cmp_int(g) != Ordering::Greater) },
        ChainVerdict { relation: "gamma_le_b", holds: both(gamma.exact(), b.exact(), |g, b| g <= b) },
        ChainVerdict { relation: "b_le_z", holds: both(b.exact(), Some(z), |b, z| b <= z) },
        ChainVerdict { relation: "b_le_2r", holds: both(b.exact(), Some(r), |b, r| b <= 2 * r) },
    ];
    Ok(MeasureReport { n: w.len(), delta, gamma, gamma_witness, b, z, r, chain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::thue_morse;

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&word("abba")).unwrap(), Delta { num: 2, den: 1, k: 1 });
        assert_eq!(delta(&word("a")).unwrap(), Delta { num: 1, den: 1, k: 1 });
        assert!(delta(&Word::default()).is_err());
    }

    #[test]
    fn lz77_examples() {
        let aaaa = lz77(&word("aaaa"));
        assert_eq!(
            aaaa.factors,
            vec![Factor { start: 0, len: 1, source: None }, Factor { start: 1, len: 3, source: Some(0) }]
        );
        assert_eq!(lz77(&word("ab")).z(), 2);
        let t = thue_morse(6).unwrap();
        assert_eq!(lz77(&t).decode(&t), t);
    }

    #[test]
    fn bwt_examples() {
        assert_eq!(bwt(&word("aaaa")), b"aaaa$");
        assert_eq!(bwt(&word("abba")), b"ab$ba");
        assert_eq!(bwt_run_count(&word("aaaa")), 2);
        assert_eq!(bwt_run_count(&word("abba")), 5);
        assert_eq!(bwt_run_count(&word("a")), 2);
        for s in ["a", "abba", "abbabaab", "aaaa", "bbab"] {
            assert_eq!(inverse_bwt(&bwt(&word(s))).unwrap(), word(s));
        }
    }

    #[test]
    fn report_for_t4() {
        let r = report(&thue_morse(4).unwrap(), &ReportLimits::default()).unwrap();
        assert_eq!(r.gamma, Estimate::Exact(4));
        assert_eq!(r.b, Estimate::Exact(6));
        assert!(r.chain_ok());
        assert!(r.chain.iter().all(|c| c.holds == Some(true)));
        let text = r.to_key_values();
        assert!(text.starts_with("n=16\ndelta_num="));
        assert!(text.contains("\ngamma=4\n") && text.contains("\nb_exact=6\n"));
    }

    #[test]
    fn report_for_abba_and_t10() {
        let r = report(&word("abba"), &ReportLimits::default()).unwrap();
        assert_eq!((r.gamma, r.b), (Estimate::Exact(2), Estimate::Exact(4)));
        let r = report(&thue_morse(10).unwrap(), &ReportLimits::default()).unwrap();
        assert_eq!(r.b, Estimate::Upper(12));
        assert_eq!(r.gamma.upper(), 4);
    }
}
