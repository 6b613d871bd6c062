//! Exact search for the smallest valid scheme and the smallest string
//! attractor of short words.
//!
//! Both searches return the canonical witness: the first one in a fixed
//! enumeration order, so the answer does not depend on how many threads
//! took part.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::measures::lz77;
use crate::sam::SuffixAutomaton;
use crate::schemes::{MacroScheme, Phrase};
use crate::words::{thue_morse_index, Word};

pub const DEFAULT_SCHEME_MAX_LEN: usize = 20;
pub const DEFAULT_ATTRACTOR_MAX_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_word_length: usize,
    /// Wall-clock budget; `None` searches to completion.
    pub time_budget: Option<Duration>,
    /// Worker threads; 0 lets the thread pool decide.
    pub workers: usize,
}

impl SearchLimits {
    pub fn for_schemes() -> Self {
        SearchLimits { max_word_length: DEFAULT_SCHEME_MAX_LEN, time_budget: None, workers: 0 }
    }

    pub fn for_attractors() -> Self {
        SearchLimits { max_word_length: DEFAULT_ATTRACTOR_MAX_LEN, time_budget: None, workers: 0 }
    }

    pub fn with_time_budget(mut self, budget: Duration) -> Self {
        self.time_budget = Some(budget);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn admit(&self, len: usize) -> Result<()> {
        if len > self.max_word_length {
            return Err(Error::Budget { requested: len, limit: self.max_word_length });
        }
        Ok(())
    }
}

/// Either the exact optimum or, when the budget ran out, the proven range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution<W> {
    Exact { size: usize, witness: W },
    Bracket { lower: usize, upper: usize, witness: W },
}

impl<W> Solution<W> {
    pub fn exact(&self) -> Option<usize> {
        match self {
            Solution::Exact { size, .. } => Some(*size),
            Solution::Bracket { .. } => None,
        }
    }

    pub fn upper(&self) -> usize {
        match self {
            Solution::Exact { size, .. } => *size,
            Solution::Bracket { upper, .. } => *upper,
        }
    }

    pub fn lower(&self) -> usize {
        match self {
            Solution::Exact { size, .. } => *size,
            Solution::Bracket { lower, .. } => *lower,
        }
    }

    pub fn witness(&self) -> &W {
        match self {
            Solution::Exact { witness, .. } | Solution::Bracket { witness, .. } => witness,
        }
    }
}

struct Clock {
    deadline: Option<Instant>,
    expired: AtomicBool,
    ticks: AtomicU64,
}

impl Clock {
    fn new(budget: Option<Duration>) -> Self {
        Clock {
            deadline: budget.map(|b| Instant::now() + b),
            expired: AtomicBool::new(false),
            ticks: AtomicU64::new(0),
        }
    }

    fn expired(&self) -> bool {
        let Some(deadline) = self.deadline else { return false };
        if self.expired.load(Ordering::Relaxed) {
            return true;
        }
        if self.ticks.fetch_add(1, Ordering::Relaxed) % 1024 == 0 && Instant::now() >= deadline {
            self.expired.store(true, Ordering::Relaxed);
        }
        self.expired.load(Ordering::Relaxed)
    }
}

fn first_success<T, R>(items: Vec<T>, workers: usize, f: impl Fn(T) -> Option<R> + Sync + Send) -> Option<R>
where
    T: Send,
    R: Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || items.into_par_iter().find_map_first(&f);
        if workers == 0 {
            return run();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        items.into_iter().find_map(f)
    }
}

/// Partial source function of a scheme under construction.
#[derive(Clone)]
struct PartialF {
    /// `Some(Some(s))` copy, `Some(None)` ground, `None` not yet assigned.
    map: Vec<Option<Option<usize>>>,
}

impl PartialF {
    fn new(n: usize) -> Self {
        PartialF { map: vec![None; n] }
    }

    /// Assigns `[start, start + len)` to copy from `source`; fails (and
    /// leaves the map untouched) if that closes a cycle.
    fn try_copy(&mut self, start: usize, len: usize, source: usize) -> bool {
        for o in 0..len {
            self.map[start + o] = Some(Some(source + o));
        }
        let n = self.map.len();
        for x in start..start + len {
            let mut y = x;
            let mut steps = 0;
            while let Some(Some(next)) = self.map[y] {
                y = next;
                steps += 1;
                if y == x || steps > n {
                    self.clear(start, len);
                    return false;
                }
            }
        }
        true
    }

    fn clear(&mut self, start: usize, len: usize) {
        for slot in &mut self.map[start..start + len] {
            *slot = None;
        }
    }
}

/// Earlier or later occurrences of `t[start..start + len]`, ascending,
/// excluding `start` itself.
fn sources(t: &[u8], start: usize, len: usize) -> Vec<usize> {
    let pattern = &t[start..start + len];
    (0..=t.len() - len).filter(|&s| s != start && &t[s..s + len] == pattern).collect()
}

struct SchemeSearch<'a> {
    t: &'a [u8],
    /// `occ[start][len]`
    occ: Vec<Vec<Vec<usize>>>,
    /// Letters (bit 0 = a, bit 1 = b) occurring in `t[pos..]`.
    suffix_letters: Vec<u8>,
    clock: &'a Clock,
}

fn letter_bit(c: u8) -> u8 {
    if c == b'a' {
        1
    } else {
        2
    }
}

impl<'a> SchemeSearch<'a> {
    fn new(t: &'a [u8], clock: &'a Clock) -> Self {
        let n = t.len();
        let occ = (0..n)
            .map(|start| (0..=n - start).map(|len| if len >= 2 { sources(t, start, len) } else { Vec::new() }).collect())
            .collect();
        let mut suffix_letters = vec![0u8; n + 1];
        for i in (0..n).rev() {
            suffix_letters[i] = suffix_letters[i + 1] | letter_bit(t[i]);
        }
        SchemeSearch { t, occ, suffix_letters, clock }
    }

    /// Choices for the phrase starting at `pos`, in canonical order.
    fn choices(&self, pos: usize, remaining: usize) -> Vec<(usize, Option<usize>)> {
        let max_len = self.t.len() - pos - (remaining - 1);
        let mut out = vec![(1, None)];
        for len in 2..=max_len {
            out.extend(self.occ[pos][len].iter().map(|&s| (len, Some(s))));
        }
        out
    }

    fn apply(&self, f: &mut PartialF, pos: usize, choice: (usize, Option<usize>)) -> bool {
        match choice {
            (_, None) => {
                f.map[pos] = Some(None);
                true
            }
            (len, Some(s)) => f.try_copy(pos, len, s),
        }
    }

    fn dfs(&self, f: &mut PartialF, pos: usize, remaining: usize, grounded: u8, out: &mut Vec<(usize, Option<usize>)>) -> Option<bool> {
        let n = self.t.len();
        if pos == n {
            return Some(remaining == 0 && grounded == self.suffix_letters[0]);
        }
        if self.clock.expired() {
            return None;
        }
        if remaining == 0 || remaining > n - pos {
            return Some(false);
        }
        let missing = self.suffix_letters[0] & !grounded;
        if missing & !self.suffix_letters[pos] != 0 || (missing.count_ones() as usize) > remaining {
            return Some(false);
        }
        for choice in self.choices(pos, remaining) {
            if !self.apply(f, pos, choice) {
                continue;
            }
            let g = if choice.1.is_none() { grounded | letter_bit(self.t[pos]) } else { grounded };
            out.push(choice);
            match self.dfs(f, pos + choice.0, remaining - 1, g, out) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            out.pop();
            f.clear(pos, choice.0);
        }
        Some(false)
    }

    /// First scheme of exactly `k` phrases in canonical order.
    fn first_of_size(&self, k: usize, workers: usize) -> Option<Option<Vec<(usize, Option<usize>)>>> {
        let n = self.t.len();
        if k == 0 || k > n {
            return Some(None);
        }
        let tops = self.choices(0, k);
        let found = first_success(tops, workers, |choice| {
            let mut f = PartialF::new(n);
            if !self.apply(&mut f, 0, choice) {
                return None;
            }
            let g = if choice.1.is_none() { letter_bit(self.t[0]) } else { 0 };
            let mut out = vec![choice];
            match self.dfs(&mut f, choice.0, k - 1, g, &mut out) {
                Some(true) => Some(Some(out)),
                Some(false) => None,
                None => Some(None),
            }
        });
        match found {
            Some(Some(phrases)) => Some(Some(phrases)),
            Some(None) => None,
            None if self.clock.expired() => None,
            None => Some(None),
        }
    }
}

fn to_scheme(t: &[u8], choices: &[(usize, Option<usize>)]) -> Result<MacroScheme> {
    let mut pos = 0;
    let mut phrases = Vec::with_capacity(choices.len());
    for &(len, source) in choices {
        phrases.push(match source {
            None => Phrase::Ground(t[pos]),
            Some(source) => Phrase::Copy { len, source },
        });
        pos += len;
    }
    MacroScheme::new(t.len(), phrases)
}

/// The valid scheme derived from the LZ77 factorization: literals become
/// grounds, length-1 copies become grounds too.
pub fn lz77_scheme(w: &Word) -> MacroScheme {
    let t = w.as_bytes();
    let phrases = lz77(w)
        .factors
        .iter()
        .map(|f| match f.source {
            Some(source) if f.len >= 2 => Phrase::Copy { len: f.len, source },
            _ => Phrase::Ground(t[f.start]),
        })
        .collect();
    MacroScheme::new(t.len(), phrases).expect("factorization covers the word")
}

/// Smallest valid scheme for `w`.
pub fn min_scheme(w: &Word, limits: &SearchLimits) -> Result<Solution<MacroScheme>> {
    limits.admit(w.len())?;
    let t = w.as_bytes();
    if t.is_empty() {
        return Ok(Solution::Exact { size: 0, witness: MacroScheme::new(0, Vec::new())? });
    }
    let clock = Clock::new(limits.time_budget);
    let search = SchemeSearch::new(t, &clock);
    let fallback = lz77_scheme(w);
    let lower_start = w.distinct_letters().max(if t.len() >= 2 { 2 } else { 1 });
    for k in lower_start..fallback.size() {
        match search.first_of_size(k, limits.workers) {
            Some(Some(choices)) => {
                let witness = to_scheme(t, &choices)?;
                certify_scheme(&witness, w)?;
                return Ok(Solution::Exact { size: k, witness });
            }
            Some(None) => {}
            None => return Ok(Solution::Bracket { lower: k, upper: fallback.size(), witness: fallback }),
        }
    }
    // Nothing smaller than the LZ77 scheme exists; return the canonical
    // witness of that size.
    let k = fallback.size();
    match search.first_of_size(k, limits.workers) {
        Some(Some(choices)) => {
            let witness = to_scheme(t, &choices)?;
            certify_scheme(&witness, w)?;
            Ok(Solution::Exact { size: k, witness })
        }
        Some(None) => Err(Error::internal("no scheme of LZ77 size found")),
        None => Ok(Solution::Exact { size: k, witness: fallback }),
    }
}

fn certify_scheme(b: &MacroScheme, w: &Word) -> Result<()> {
    if b.is_valid_for(w) {
        Ok(())
    } else {
        Err(Error::internal(format!("solver produced an invalid scheme: {b}")))
    }
}

/// Order in which [`find_sources`] tries candidate sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceOrder {
    Ascending,
    Shuffled(u64),
}

/// Searches for sources turning the parsing `lengths` of `w` into a valid
/// scheme. Length-1 phrases become grounds. Gives up after `node_limit`
/// search nodes.
pub fn find_sources(w: &Word, lengths: &[usize], order: SourceOrder, node_limit: u64) -> Option<MacroScheme> {
    let t = w.as_bytes();
    if lengths.iter().sum::<usize>() != t.len() || lengths.contains(&0) {
        return None;
    }
    let mut starts = Vec::with_capacity(lengths.len());
    let mut pos = 0;
    for &len in lengths {
        starts.push(pos);
        pos += len;
    }
    let mut rng = match order {
        SourceOrder::Shuffled(seed) => Some(StdRng::seed_from_u64(seed)),
        SourceOrder::Ascending => None,
    };
    let candidates: Vec<Vec<usize>> = starts
        .iter()
        .zip(lengths)
        .map(|(&start, &len)| {
            if len == 1 {
                return Vec::new();
            }
            let mut c = sources(t, start, len);
            if let Some(rng) = rng.as_mut() {
                c.shuffle(rng);
            }
            c
        })
        .collect();
    if lengths.iter().zip(&candidates).any(|(&len, c)| len >= 2 && c.is_empty()) {
        return None;
    }

    fn go(
        i: usize,
        starts: &[usize],
        lengths: &[usize],
        candidates: &[Vec<usize>],
        f: &mut PartialF,
        chosen: &mut Vec<Option<usize>>,
        nodes: &mut u64,
    ) -> Option<bool> {
        if i == starts.len() {
            return Some(true);
        }
        if lengths[i] == 1 {
            f.map[starts[i]] = Some(None);
            chosen.push(None);
            let found = go(i + 1, starts, lengths, candidates, f, chosen, nodes);
            if found == Some(false) {
                chosen.pop();
            }
            return found;
        }
        for &s in &candidates[i] {
            *nodes = nodes.checked_sub(1)?;
            if !f.try_copy(starts[i], lengths[i], s) {
                continue;
            }
            chosen.push(Some(s));
            if go(i + 1, starts, lengths, candidates, f, chosen, nodes)? {
                return Some(true);
            }
            chosen.pop();
            f.clear(starts[i], lengths[i]);
        }
        Some(false)
    }

    let mut f = PartialF::new(t.len());
    let mut chosen = Vec::with_capacity(lengths.len());
    let mut nodes = node_limit;
    if go(0, &starts, lengths, &candidates, &mut f, &mut chosen, &mut nodes) != Some(true) {
        return None;
    }
    let choices: Vec<(usize, Option<usize>)> = lengths.iter().copied().zip(chosen).collect();
    to_scheme(t, &choices).ok()
}

/// Outcome of an attractor check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttractorCheck {
    Ok,
    /// A shortest substring with no occurrence crossing the set (leftmost
    /// first occurrence among those).
    Missing(Word),
}

impl AttractorCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, AttractorCheck::Ok)
    }
}

fn checked_positions(w: &Word, positions: &[usize]) -> Result<Vec<usize>> {
    if let Some(&p) = positions.iter().find(|&&p| p >= w.len()) {
        return Err(Error::usage(format!("position {p} is outside a word of length {}", w.len())));
    }
    let mut sorted = positions.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

/// Checks whether `positions` is a string attractor of `w`, in linear time.
pub fn is_attractor(w: &Word, positions: &[usize]) -> Result<AttractorCheck> {
    let positions = checked_positions(w, positions)?;
    let t = w.as_bytes();
    if t.is_empty() {
        return Ok(AttractorCheck::Ok);
    }
    // gap[e]: distance from e back to the nearest attractor position.
    let mut gap = vec![usize::MAX; t.len()];
    let mut last = None;
    let mut next = positions.iter().peekable();
    for (e, slot) in gap.iter_mut().enumerate() {
        if next.peek() == Some(&&e) {
            last = Some(e);
            next.next();
        }
        if let Some(p) = last {
            *slot = e - p;
        }
    }
    let sam = SuffixAutomaton::new(t);
    let best_gap = sam.fold_endpos(|e| gap[e], usize::MAX, usize::min);
    let missing = (1..sam.state_count())
        .filter(|&v| best_gap[v] >= sam.min_len(v))
        .map(|v| {
            let len = sam.min_len(v);
            (len, sam.first_end[v] + 1 - len)
        })
        .min();
    Ok(match missing {
        None => AttractorCheck::Ok,
        Some((len, start)) => AttractorCheck::Missing(Word::from_trusted(t[start..start + len].to_vec())),
    })
}

/// For each substring class, the positions that would cover its shortest
/// member; only inclusion-minimal masks are kept. Words of at most 64
/// symbols.
fn cover_constraints(t: &[u8]) -> Vec<u64> {
    let sam = SuffixAutomaton::new(t);
    let ends = sam.endpos_masks();
    let mut masks: Vec<u64> = (1..sam.state_count())
        .map(|v| (0..sam.min_len(v)).fold(0u64, |acc, i| acc | (ends[v] >> i)))
        .collect();
    masks.sort_unstable_by_key(|m| (m.count_ones(), *m));
    masks.dedup();
    let mut kept: Vec<u64> = Vec::new();
    for m in masks {
        if !kept.iter().any(|&k| k & m == k) {
            kept.push(m);
        }
    }
    // Hardest-to-postpone constraints first.
    kept.sort_unstable_by_key(|m| (63 - m.leading_zeros(), *m));
    kept
}

fn attractor_dfs(constraints: &[u64], from: usize, chosen: u64, left: usize, clock: &Clock) -> Option<Option<u64>> {
    let Some(&c) = constraints.iter().find(|&&c| c & chosen == 0) else {
        return Some(Some(chosen));
    };
    if left == 0 {
        return Some(None);
    }
    if clock.expired() {
        return None;
    }
    let top = 63 - c.leading_zeros() as usize;
    for p in from..=top {
        if let Some(found) = attractor_dfs(constraints, p + 1, chosen | (1 << p), left - 1, clock)? {
            return Some(Some(found));
        }
    }
    Some(None)
}

fn mask_positions(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Smallest string attractor of `w` and its lexicographically smallest
/// witness.
pub fn min_attractor(w: &Word, limits: &SearchLimits) -> Result<Solution<Vec<usize>>> {
    limits.admit(w.len())?;
    if w.len() > 64 {
        return Err(Error::Budget { requested: w.len(), limit: 64 });
    }
    let t = w.as_bytes();
    if t.is_empty() {
        return Ok(Solution::Exact { size: 0, witness: Vec::new() });
    }
    let constraints = cover_constraints(t);
    let clock = Clock::new(limits.time_budget);
    for k in w.distinct_letters()..=t.len() {
        let top = 63 - constraints[0].leading_zeros() as usize;
        let found = first_success((0..=top).collect(), limits.workers, |p| {
            match attractor_dfs(&constraints, p + 1, 1 << p, k - 1, &clock) {
                Some(Some(mask)) => Some(Some(mask)),
                Some(None) => None,
                None => Some(None),
            }
        });
        match found {
            Some(Some(mask)) => {
                let witness = mask_positions(mask);
                if !is_attractor(w, &witness)?.is_ok() {
                    return Err(Error::internal(format!("solver produced a non-attractor {witness:?}")));
                }
                return Ok(Solution::Exact { size: k, witness });
            }
            None if !clock.expired() => {}
            _ => {
                let witness = attractor_upper_bound(w)?;
                return Ok(Solution::Bracket { lower: k, upper: witness.len(), witness });
            }
        }
    }
    Err(Error::internal("the full position set is always an attractor"))
}

/// A valid attractor without an optimality guarantee. Thue–Morse words get
/// a four-position attractor lifted level by level from an exact solution;
/// other words fall back to a greedy cover.
pub fn attractor_upper_bound(w: &Word) -> Result<Vec<usize>> {
    if let Some(n) = thue_morse_index(w) {
        if let Some(witness) = thue_morse_attractor(n) {
            return Ok(witness);
        }
    }
    greedy_attractor(w)
}

/// Adds the last position of the shortest uncovered substring until every
/// substring is covered.
pub fn greedy_attractor(w: &Word) -> Result<Vec<usize>> {
    let mut positions: Vec<usize> = Vec::new();
    loop {
        match is_attractor(w, &positions)? {
            AttractorCheck::Ok => {
                positions.sort_unstable();
                return Ok(positions);
            }
            AttractorCheck::Missing(u) => {
                let t = w.as_bytes();
                let start = t
                    .windows(u.len())
                    .position(|win| win == u.as_bytes())
                    .ok_or_else(|| Error::internal("missing substring does not occur"))?;
                positions.push(start + u.len() - 1);
            }
        }
    }
}

/// A size-4 attractor of `t_n` for `n >= 4`: solved exactly up to `t_6`,
/// then lifted by trying `2p + d` for each position `p`.
pub fn thue_morse_attractor(n: u32) -> Option<Vec<usize>> {
    if n < 4 || n >= usize::BITS - 1 {
        return None;
    }
    let exact_up_to = 6.min(n);
    let t = crate::words::thue_morse(exact_up_to).ok()?;
    let mut current = min_attractor(&t, &SearchLimits::for_attractors()).ok()?.witness().clone();
    for level in exact_up_to + 1..=n {
        let t = crate::words::thue_morse(level).ok()?;
        current = lift_attractor(&t, &current)?;
    }
    Some(current)
}

fn lift_attractor(t: &Word, previous: &[usize]) -> Option<Vec<usize>> {
    const OFFSETS: [usize; 4] = [0, 1, 2, 3];
    let k = previous.len();
    let total = OFFSETS.len().pow(k as u32);
    (0..total).find_map(|code| {
        let mut c = code;
        let candidate: Vec<usize> = previous
            .iter()
            .map(|&p| {
                let d = OFFSETS[c % OFFSETS.len()];
                c /= OFFSETS.len();
                (2 * p + d).saturating_sub(1).min(t.len() - 1)
            })
            .collect();
        matches!(is_attractor(t, &candidate), Ok(AttractorCheck::Ok)).then(|| {
            let mut sorted = candidate;
            sorted.sort_unstable();
            sorted
        })
    })
}
