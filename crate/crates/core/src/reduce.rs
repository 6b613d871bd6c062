//! Turning a valid scheme for `t_n` into a valid scheme for `t_(n-1)`.
//!
//! The pipeline has three steps:
//!
//! 1. every length-1 ground phrase is merged with its partner (positions
//!    `2i` and `2i + 1` are partners), so that afterwards the only literal
//!    phrases are *relaxed grounds*: length-2 phrases starting at an even
//!    position, which need no source;
//! 2. every length-3 phrase `aba`/`bab` is shrunk to a relaxed ground, then
//!    all boundaries that still separate partners are moved one position to
//!    the right, leaving only even-aligned phrases;
//! 3. the morphism is undone phrase by phrase, halving lengths and sources.
//!
//! Moving a boundary changes the source of the position that crosses it.
//! The crossing position is made to follow its partner: if `x` is the
//! partner it joins, the source chain `x, f(x), f(f(x)), ...` is walked, and
//! at every level the partner of the chain position is pulled into the same
//! phrase, so the moved letter copies from the partner of wherever `x`
//! copies from. This is sound while the chain keeps its parity (the partner
//! of a same-parity copy of a letter is always the other letter). At the
//! first parity change the phrase holding the chain position can only be
//! `aba`, `bab`, `ab`, `ba` or a lone letter; each possible place of the
//! chain position inside those is a terminal case, resolved by making the
//! pair a relaxed ground (or by pointing it at one).

use std::fmt;

use crate::error::{Error, Result};
use crate::schemes::{InvalidReason, MacroScheme, Phrase, SourceFunction, ValidityVerdict};
use crate::words::{is_parity_exempt, thue_morse_index, thue_morse_with_limit, Word, DEFAULT_MAX_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Span {
    start: usize,
    len: usize,
    /// `None` for ground and relaxed-ground phrases.
    source: Option<usize>,
}

impl Span {
    fn end(&self) -> usize {
        self.start + self.len - 1
    }

    fn contains(&self, x: usize) -> bool {
        self.start <= x && x <= self.end()
    }

    fn is_relaxed_ground(&self) -> bool {
        self.len == 2 && self.start % 2 == 0
    }
}

/// A phrase of a scheme under the relaxed convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaxedPhrase {
    /// A length-1 literal.
    Ground { pos: usize },
    /// A length-2 phrase at an even position, treated as a literal.
    RelaxedGround { start: usize },
    Copy { start: usize, len: usize, source: usize },
}

/// A scheme for a Thue–Morse word in which length-2 phrases starting at even
/// positions count as literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedScheme {
    text: Word,
    spans: Vec<Span>,
}

impl RelaxedScheme {
    /// Reinterprets a strict scheme; its even-aligned length-2 copies become
    /// relaxed grounds, everything else is kept.
    pub fn from_strict(b: &MacroScheme, text: &Word) -> Result<Self> {
        if b.text_len() != text.len() {
            return Err(Error::usage(format!(
                "scheme is for length {}, text has length {}",
                b.text_len(),
                text.len()
            )));
        }
        let spans = b
            .phrases()
            .iter()
            .zip(b.starts())
            .map(|(phrase, &start)| {
                let source = match *phrase {
                    Phrase::Ground(_) => None,
                    Phrase::Copy { source, .. } => Some(source),
                };
                normalize(Span { start, len: phrase.len(), source })
            })
            .collect();
        Ok(RelaxedScheme { text: text.clone(), spans })
    }

    pub fn text(&self) -> &Word {
        &self.text
    }

    pub fn size(&self) -> usize {
        self.spans.len()
    }

    pub fn phrases(&self) -> Vec<RelaxedPhrase> {
        self.spans
            .iter()
            .map(|s| match s.source {
                Some(source) => RelaxedPhrase::Copy { start: s.start, len: s.len, source },
                None if s.len == 1 => RelaxedPhrase::Ground { pos: s.start },
                None => RelaxedPhrase::RelaxedGround { start: s.start },
            })
            .collect()
    }

    /// Number of length-1 ground phrases.
    pub fn length1_grounds(&self) -> usize {
        self.spans.iter().filter(|s| s.len == 1).count()
    }

    pub fn relaxed_grounds(&self) -> usize {
        self.spans.iter().filter(|s| s.is_relaxed_ground()).count()
    }

    /// Phrase boundaries lying between partner positions `2i` and `2i + 1`,
    /// i.e. phrases starting at an odd position.
    pub fn partner_boundary_count(&self) -> usize {
        self.spans.iter().filter(|s| s.start % 2 == 1).count()
    }

    pub fn is_even_aligned(&self) -> bool {
        self.spans.iter().all(|s| s.start % 2 == 0 && s.len % 2 == 0)
    }

    pub fn source_function(&self) -> SourceFunction {
        let mut map = vec![None; self.text.len()];
        for s in &self.spans {
            if let Some(src) = s.source {
                for o in 0..s.len {
                    map[s.start + o] = Some(src + o);
                }
            }
        }
        SourceFunction(map)
    }

    fn content_mismatch(&self) -> Option<InvalidReason> {
        let t = self.text.as_bytes();
        let mut pos = 0;
        for (index, s) in self.spans.iter().enumerate() {
            if s.start != pos || s.len == 0 {
                return Some(InvalidReason::ContentMismatch { phrase: index, offset: 0 });
            }
            pos += s.len;
            if let Some(src) = s.source {
                if src + s.len > t.len() {
                    return Some(InvalidReason::ContentMismatch { phrase: index, offset: 0 });
                }
                if let Some(offset) = (0..s.len).find(|&o| t[s.start + o] != t[src + o]) {
                    return Some(InvalidReason::ContentMismatch { phrase: index, offset });
                }
            } else if s.len > 2 || (s.len == 2 && s.start % 2 == 1) {
                return Some(InvalidReason::ContentMismatch { phrase: index, offset: 0 });
            }
        }
        (pos != t.len()).then_some(InvalidReason::ContentMismatch { phrase: self.spans.len(), offset: 0 })
    }

    /// Validity under the relaxed convention.
    pub fn validate(&self) -> ValidityVerdict {
        if let Some(reason) = self.content_mismatch() {
            return ValidityVerdict::Invalid(reason);
        }
        let f = self.source_function();
        match f.unresolvable().first() {
            None => ValidityVerdict::Valid,
            Some(&x) => ValidityVerdict::Invalid(InvalidReason::Cycle(f.cycle_from(x))),
        }
    }

    fn span_index(&self, x: usize) -> usize {
        self.spans.partition_point(|s| s.start <= x) - 1
    }

    /// Makes `[lo, hi]` a single phrase with the given source, trimming or
    /// dropping whatever it overlaps. Relaxed grounds are never cut.
    fn carve(&mut self, lo: usize, hi: usize, source: Option<usize>) -> Result<()> {
        let first = self.span_index(lo);
        let last = self.span_index(hi);
        let mut replacement = Vec::with_capacity(3);
        let head = self.spans[first];
        let tail = self.spans[last];
        for s in &self.spans[first..=last] {
            let fully_inside = lo <= s.start && s.end() <= hi;
            if s.is_relaxed_ground() && !fully_inside {
                return Err(Error::internal(format!("cutting relaxed ground at {}", s.start)));
            }
        }
        if head.start < lo {
            replacement.push(normalize(Span { start: head.start, len: lo - head.start, source: head.source }));
        }
        replacement.push(normalize(Span { start: lo, len: hi - lo + 1, source }));
        if tail.end() > hi {
            let shift = hi + 1 - tail.start;
            replacement.push(normalize(Span {
                start: hi + 1,
                len: tail.end() - hi,
                source: tail.source.map(|s| s + shift),
            }));
        }
        let t = self.text.as_bytes();
        for s in &replacement {
            if let Some(src) = s.source {
                if src + s.len > t.len() || t[s.start..=s.end()] != t[src..src + s.len] {
                    return Err(Error::internal(format!("carving [{lo},{hi}] broke the phrase at {}", s.start)));
                }
            }
        }
        self.spans.splice(first..=last, replacement);
        Ok(())
    }

    /// Leftmost pair of adjacent relaxed grounds spelling `pattern`.
    fn relaxed_pair_spelling(&self, pattern: &[u8]) -> Option<usize> {
        let t = self.text.as_bytes();
        self.spans.windows(2).find_map(|w| {
            let ok = w[0].is_relaxed_ground()
                && w[1].is_relaxed_ground()
                && &t[w[0].start..w[0].start + 4] == pattern;
            ok.then_some(w[0].start)
        })
    }

    fn ensure_valid(&self, context: &str) -> Result<()> {
        match self.validate() {
            ValidityVerdict::Valid => Ok(()),
            ValidityVerdict::Invalid(reason) => Err(Error::internal(format!("{context}: {reason}"))),
        }
    }
}

fn normalize(mut s: Span) -> Span {
    if s.len == 1 || s.is_relaxed_ground() {
        s.source = None;
    }
    s
}

/// One boundary edit of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: u8,
    pub label: &'static str,
    pub positions: Vec<usize>,
    /// Partner-separating boundaries after the edit.
    pub partner_boundaries: usize,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<String> = self.positions.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "step={} case={} pos={} partner_boundaries={}",
            self.step,
            self.label,
            pos.join(","),
            self.partner_boundaries
        )
    }
}

/// How often each terminal case fired.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CaseCounts {
    pub case1: usize,
    pub case2: usize,
    pub case3_1: usize,
    pub case3_2: usize,
    pub case4: usize,
    pub case5: usize,
    pub case6: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionStats {
    pub step1: CaseCounts,
    /// Step 2 uses `case1..case5`; `case6` counts chains ending on a lone
    /// letter.
    pub step2: CaseCounts,
    pub extensions: usize,
    pub grounds_eliminated: usize,
    pub length3_eliminated: usize,
    /// Size after Step 1 and after Step 2.
    pub size_after_step1: usize,
    pub size_after_step2: usize,
    /// Relaxed grounds present after Step 1 and after Step 2.
    pub relaxed_after_step1: usize,
    pub relaxed_after_step2: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Grounds,
    OddPhrases,
}

/// A chain repair in progress: the letter at `x0 ^ 1` is joining the phrase
/// of `x0`.
#[derive(Debug, Clone, Copy)]
struct Instance {
    x0: usize,
}

impl Instance {
    /// `+1` when the joining letter sits right of `x0`.
    fn direction(&self) -> isize {
        if self.x0 % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Start of the window `pair(x0) ∪ anchor ground` used by Step 2. The
    /// anchor relaxed ground is the block adjacent to `pair(x0)` on the side
    /// of the joining letter.
    fn anchor_window(&self) -> Option<usize> {
        if self.direction() > 0 {
            Some(self.x0)
        } else {
            self.x0.checked_sub(3)
        }
    }
}

enum Outcome {
    Done,
    Recurse(Instance),
}

struct Reducer {
    scheme: RelaxedScheme,
    trace: Vec<TraceEvent>,
    stats: ReductionStats,
    pending: Vec<usize>,
}

impl Reducer {
    fn new(scheme: RelaxedScheme) -> Self {
        Reducer { scheme, trace: Vec::new(), stats: ReductionStats::default(), pending: Vec::new() }
    }

    fn log(&mut self, step: Step, label: &'static str, positions: Vec<usize>) {
        let step = match step {
            Step::Grounds => 1,
            Step::OddPhrases => 2,
        };
        let partner_boundaries = self.scheme.partner_boundary_count();
        self.trace.push(TraceEvent { step, label, positions, partner_boundaries });
    }

    fn counts(&mut self, step: Step) -> &mut CaseCounts {
        match step {
            Step::Grounds => &mut self.stats.step1,
            Step::OddPhrases => &mut self.stats.step2,
        }
    }

    fn text(&self) -> &[u8] {
        self.scheme.text.as_bytes()
    }

    /// Walks the source chain from `inst.x0`, pulling partners along, until
    /// a terminal case applies.
    fn repair(&mut self, step: Step, inst: Instance) -> Result<Outcome> {
        let n = self.scheme.text.len();
        let parity = inst.x0 % 2;
        let mut x = inst.x0;
        for _ in 0..=n {
            let xb = x ^ 1;
            let pair = x & !1;
            let pi = self.scheme.span_index(x);
            let p = self.scheme.spans[pi];
            let Some(src) = p.source else {
                if p.len == 2 {
                    self.counts(step).case5 += 1;
                    self.log(step, "5", vec![pair, pair + 1]);
                } else {
                    // A lone letter: it absorbs its partner.
                    self.scheme.carve(pair, pair + 1, None)?;
                    self.counts(step).case6 += 1;
                    self.log(step, "6", vec![pair, pair + 1]);
                }
                return Ok(Outcome::Done);
            };
            let fx = src + x - p.start;
            if fx % 2 == parity {
                if !p.contains(xb) {
                    let (lo, hi, s) = if xb > x { (p.start, xb, src) } else { (xb, p.end(), src - 1) };
                    self.scheme.carve(lo, hi, Some(s))?;
                    self.stats.extensions += 1;
                    self.log(step, "extend", vec![x, xb]);
                }
                x = fx;
                continue;
            }
            return match step {
                Step::Grounds => self.terminal_grounds(x, p).map(|_| Outcome::Done),
                Step::OddPhrases => self.terminal_odd(inst, x, p),
            };
        }
        Err(Error::internal(format!("source chain from {} does not terminate", inst.x0)))
    }

    /// Geometry of the phrase `p` holding the chain position `x` where the
    /// parity flips. Returns the letter left over outside `pair(x)` (if the
    /// phrase holds the whole pair) and whether it lies on the far side from
    /// the partner.
    fn classify(&self, x: usize, p: Span) -> Result<Shape> {
        let xb = x ^ 1;
        if p.len > 3 || !is_parity_exempt(&self.text()[p.start..=p.end()]) {
            return Err(Error::internal(format!(
                "phrase [{}, {}] changes parity but is not in the exempt set",
                p.start,
                p.end()
            )));
        }
        let toward_partner = |z: usize| (z > x) == (xb > x);
        Ok(if p.contains(xb) {
            let z = if p.start < x.min(xb) { p.start } else { p.end() };
            if toward_partner(z) {
                Shape::SpillsPastPartner { extra: z }
            } else {
                Shape::WholePairPlusOuter { extra: z }
            }
        } else if p.len == 3 {
            Shape::OuterThree
        } else {
            Shape::OuterTwo { extra: if p.start == x { p.end() } else { p.start } }
        })
    }

    fn terminal_grounds(&mut self, x: usize, p: Span) -> Result<()> {
        let step = Step::Grounds;
        let pair = x & !1;
        match self.classify(x, p)? {
            Shape::WholePairPlusOuter { extra } => {
                self.scheme.carve(pair, pair + 1, None)?;
                self.pending.push(extra);
                self.counts(step).case1 += 1;
                self.log(step, "1", vec![pair, pair + 1, extra]);
            }
            Shape::SpillsPastPartner { extra } => {
                self.scheme.carve(pair, pair + 1, None)?;
                self.pending.push(extra);
                self.counts(step).case2 += 1;
                self.log(step, "2", vec![pair, pair + 1, extra]);
            }
            Shape::OuterThree => {
                let lo = p.start.min(pair);
                let pattern = self.text()[lo..lo + 4].to_vec();
                match self.scheme.relaxed_pair_spelling(&pattern) {
                    Some(source) => {
                        self.scheme.carve(lo, lo + 3, Some(source))?;
                        self.counts(step).case3_2 += 1;
                        self.log(step, "3-2", vec![lo, lo + 3, source]);
                    }
                    None => {
                        self.scheme.carve(pair, pair + 1, None)?;
                        self.counts(step).case3_1 += 1;
                        self.log(step, "3-1", vec![lo, lo + 3]);
                    }
                }
            }
            Shape::OuterTwo { extra } => {
                self.scheme.carve(pair, pair + 1, None)?;
                self.pending.push(extra);
                self.counts(step).case4 += 1;
                self.log(step, "4", vec![pair, pair + 1, extra]);
            }
        }
        Ok(())
    }

    fn terminal_odd(&mut self, inst: Instance, x: usize, p: Span) -> Result<Outcome> {
        let step = Step::OddPhrases;
        let pair = x & !1;
        let shape = self.classify(x, p)?;
        if let Shape::SpillsPastPartner { extra } = shape {
            // The phrase is itself a length-3 phrase to shrink; its extra
            // letter joins its own partner.
            self.counts(step).case2 += 1;
            self.log(step, "2", vec![p.start, p.end()]);
            return Ok(Outcome::Recurse(Instance { x0: extra ^ 1 }));
        }
        // Re-source pair(x) plus its outer block from pair(x0) plus the
        // anchor ground: the outer block then follows x0's repaired chain and
        // pair(x) lands on the anchor.
        let window = if inst.direction() > 0 { pair.checked_sub(2) } else { Some(pair) };
        let (Some(lo), Some(source)) = (window, inst.anchor_window()) else {
            return Err(Error::internal(format!("no room for a re-sourced window at {pair}")));
        };
        let t = self.text();
        let fits = lo + 3 < t.len() && lo <= p.start && p.end() <= lo + 3 && source + 3 < t.len();
        if !fits || t[lo..lo + 4] != t[source..source + 4] {
            return Err(Error::internal(format!("window [{lo},{}] cannot copy from {source}", lo + 3)));
        }
        let anchor = if inst.direction() > 0 { source + 2 } else { source };
        let anchor_span = self.scheme.spans[self.scheme.span_index(anchor)];
        if anchor_span.start != anchor || !anchor_span.is_relaxed_ground() {
            return Err(Error::internal(format!("anchor ground at {anchor} is missing")));
        }
        self.scheme.carve(lo, lo + 3, Some(source))?;
        let (label, counter) = match shape {
            Shape::WholePairPlusOuter { .. } => ("1", &mut self.stats.step2.case1),
            Shape::OuterThree => ("3", &mut self.stats.step2.case3_1),
            Shape::OuterTwo { .. } => ("4", &mut self.stats.step2.case4),
            Shape::SpillsPastPartner { .. } => unreachable!(),
        };
        *counter += 1;
        self.log(step, label, vec![lo, lo + 3, source]);
        Ok(Outcome::Done)
    }

    fn next_ground(&mut self) -> Option<usize> {
        while let Some(pos) = self.pending.pop() {
            let s = self.scheme.spans[self.scheme.span_index(pos)];
            if s.len == 1 {
                return Some(pos);
            }
        }
        self.scheme.spans.iter().find(|s| s.len == 1).map(|s| s.start)
    }

    fn eliminate_grounds(&mut self) -> Result<()> {
        let limit = self.scheme.text.len() + 1;
        for _ in 0..limit {
            let Some(g) = self.next_ground() else {
                self.stats.size_after_step1 = self.scheme.size();
                self.stats.relaxed_after_step1 = self.scheme.relaxed_grounds();
                return Ok(());
            };
            let before = self.scheme.partner_boundary_count();
            self.log(Step::Grounds, "start", vec![g ^ 1, g]);
            self.repair(Step::Grounds, Instance { x0: g ^ 1 })?;
            self.stats.grounds_eliminated += 1;
            self.scheme.ensure_valid(&format!("after eliminating the ground at {g}"))?;
            let after = self.scheme.partner_boundary_count();
            if after >= before {
                return Err(Error::internal(format!("partner boundaries went {before} -> {after} at {g}")));
            }
        }
        Err(Error::internal("length-1 ground elimination does not terminate"))
    }

    fn next_length3(&self) -> Option<Span> {
        let t = self.text();
        self.scheme
            .spans
            .iter()
            .find(|s| s.len == 3 && is_parity_exempt(&t[s.start..=s.end()]))
            .copied()
    }

    fn eliminate_odd(&mut self) -> Result<()> {
        let limit = self.scheme.text.len() + 1;
        let mut done = false;
        for _ in 0..limit {
            let Some(p0) = self.next_length3() else {
                done = true;
                break;
            };
            let before = self.scheme.partner_boundary_count();
            let x0 = if p0.start % 2 == 1 { p0.start - 1 } else { p0.start + 3 };
            self.log(Step::OddPhrases, "start", vec![p0.start, p0.end()]);
            let mut stack = vec![Instance { x0 }];
            while let Some(inst) = stack.pop() {
                if let Outcome::Recurse(next) = self.repair(Step::OddPhrases, inst)? {
                    stack.push(next);
                }
                self.stats.length3_eliminated += 1;
            }
            self.scheme.ensure_valid(&format!("after shrinking the phrase at {}", p0.start))?;
            let after = self.scheme.partner_boundary_count();
            if after >= before {
                return Err(Error::internal(format!("partner boundaries went {before} -> {after}")));
            }
        }
        if !done {
            return Err(Error::internal("length-3 elimination does not terminate"));
        }
        self.align()?;
        self.stats.size_after_step2 = self.scheme.size();
        self.stats.relaxed_after_step2 = self.scheme.relaxed_grounds();
        Ok(())
    }

    /// Moves every boundary sitting between partners one position right.
    fn align(&mut self) -> Result<()> {
        let mut spans = Vec::with_capacity(self.scheme.spans.len());
        for s in &self.scheme.spans {
            let lo = s.start + s.start % 2;
            let hi = s.end() + (1 - s.end() % 2);
            if lo > hi {
                continue;
            }
            let len = hi - lo + 1;
            let source = if len == 2 {
                None
            } else {
                match s.source {
                    Some(src) if src % 2 == s.start % 2 => Some(src + (lo - s.start)),
                    _ => {
                        return Err(Error::internal(format!(
                            "phrase at {} cannot be aligned: source parity differs",
                            s.start
                        )))
                    }
                }
            };
            spans.push(Span { start: lo, len, source });
        }
        self.scheme.spans = spans;
        self.log(Step::OddPhrases, "align", Vec::new());
        self.scheme.ensure_valid("after alignment")?;
        if !self.scheme.is_even_aligned() {
            return Err(Error::internal("alignment left an odd boundary"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    /// The phrase holds `pair(x)` and one more letter beyond `x`'s side.
    WholePairPlusOuter { extra: usize },
    /// The phrase holds `pair(x)` and one more letter beyond the partner.
    SpillsPastPartner { extra: usize },
    /// The phrase ends at `x` (length 3) and excludes the partner.
    OuterThree,
    /// The phrase ends at `x` (length 2) and excludes the partner.
    OuterTwo { extra: usize },
}

fn checked_text(b: &RelaxedScheme, n: u32) -> Result<()> {
    if n < 3 {
        return Err(Error::usage(format!("reduction needs n >= 3, got {n}")));
    }
    if thue_morse_index(&b.text) != Some(n) {
        return Err(Error::usage(format!("scheme text is not t_{n}")));
    }
    Ok(())
}

/// Step 1: removes every length-1 ground phrase.
pub fn eliminate_ground_phrases(b: RelaxedScheme, n: u32) -> Result<RelaxedScheme> {
    checked_text(&b, n)?;
    b.ensure_valid("input").map_err(|e| Error::usage(e.to_string()))?;
    let mut r = Reducer::new(b);
    r.eliminate_grounds()?;
    Ok(r.scheme)
}

/// Step 2: removes odd-length phrases and aligns all boundaries to even
/// positions.
pub fn eliminate_odd_phrases(b: RelaxedScheme, n: u32) -> Result<RelaxedScheme> {
    checked_text(&b, n)?;
    if b.length1_grounds() > 0 {
        return Err(Error::usage("length-1 ground phrases must be eliminated first"));
    }
    b.ensure_valid("input").map_err(|e| Error::usage(e.to_string()))?;
    let mut r = Reducer::new(b);
    r.eliminate_odd()?;
    Ok(r.scheme)
}

/// Step 3: applies the inverse morphism to an even-aligned relaxed scheme.
pub fn halve(b: &RelaxedScheme) -> Result<MacroScheme> {
    let t = b.text.as_bytes();
    let mut phrases = Vec::with_capacity(b.spans.len());
    for s in &b.spans {
        if s.start % 2 != 0 || s.len % 2 != 0 {
            return Err(Error::internal(format!("phrase at {} is not even-aligned", s.start)));
        }
        match s.source {
            None if s.len == 2 => phrases.push(Phrase::Ground(if &t[s.start..s.start + 2] == b"ab" {
                b'a'
            } else {
                b'b'
            })),
            Some(src) if src % 2 == 0 && s.len >= 4 => {
                phrases.push(Phrase::Copy { len: s.len / 2, source: src / 2 })
            }
            _ => return Err(Error::internal(format!("phrase at {} cannot be halved", s.start))),
        }
    }
    MacroScheme::new(t.len() / 2, phrases)
}

/// Result of one reduction level.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub scheme: MacroScheme,
    pub input_size: usize,
    pub input_grounds: usize,
    pub stats: ReductionStats,
    pub trace: Vec<TraceEvent>,
}

impl Reduction {
    /// `|B_n| - ceil((g - 2) / 2)`, the guaranteed size ceiling.
    pub fn size_bound(&self) -> usize {
        let excess = self.input_grounds.saturating_sub(2);
        self.input_size - excess.div_ceil(2)
    }

    pub fn satisfies_size_bound(&self) -> bool {
        self.scheme.size() <= self.size_bound()
    }
}

/// One full level: a valid scheme for `t_n` becomes one for `t_(n-1)`.
pub fn reduce_once(b: &MacroScheme, n: u32) -> Result<Reduction> {
    if n < 3 {
        return Err(Error::usage(format!("reduction needs n >= 3, got {n}")));
    }
    let text = thue_morse_with_limit(n, DEFAULT_MAX_LEN)?;
    match b.validate(&text)? {
        ValidityVerdict::Valid => {}
        ValidityVerdict::Invalid(reason) => {
            return Err(Error::usage(format!("input is not a valid scheme for t_{n}: {reason}")))
        }
    }
    let mut r = Reducer::new(RelaxedScheme::from_strict(b, &text)?);
    r.eliminate_grounds()?;
    r.eliminate_odd()?;
    let scheme = halve(&r.scheme)?;
    let smaller = thue_morse_with_limit(n - 1, DEFAULT_MAX_LEN)?;
    if !scheme.is_valid_for(&smaller) {
        return Err(Error::internal("halved scheme is not valid"));
    }
    Ok(Reduction {
        scheme,
        input_size: b.size(),
        input_grounds: b.ground_count(),
        stats: r.stats,
        trace: r.trace,
    })
}

/// Outcome of repeated reduction: the first depth `levels` with
/// `|B_(n-levels)| <= |B_n| - levels`.
#[derive(Debug, Clone)]
pub struct BoundReduction {
    pub levels: u32,
    pub scheme: MacroScheme,
    pub steps: Vec<Reduction>,
}

/// Reduces up to three levels until the size drops by at least the depth.
pub fn reduce_to_bound(b: &MacroScheme, n: u32) -> Result<BoundReduction> {
    if n < 5 {
        return Err(Error::usage(format!("the three-level guarantee needs n >= 5, got {n}")));
    }
    let mut steps: Vec<Reduction> = Vec::new();
    let mut current = b.clone();
    for level in 1..=3u32 {
        let step = reduce_once(&current, n - level + 1)?;
        current = step.scheme.clone();
        steps.push(step);
        if current.size() + level as usize <= b.size() {
            return Ok(BoundReduction { levels: level, scheme: current, steps });
        }
    }
    let mut sizes = vec![b.size()];
    sizes.extend(steps.iter().map(|s| s.scheme.size()));
    Err(Error::BoundNotReached { sizes })
}

/// Applies `reduce_once` exactly `levels` times.
pub fn reduce_levels(b: &MacroScheme, n: u32, levels: u32) -> Result<Vec<Reduction>> {
    if levels > n.saturating_sub(2) {
        return Err(Error::usage(format!("cannot reduce t_{n} by {levels} levels")));
    }
    let mut out: Vec<Reduction> = Vec::new();
    let mut current = b.clone();
    for level in 0..levels {
        let step = reduce_once(&current, n - level)?;
        current = step.scheme.clone();
        out.push(step);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::upper_bound_scheme;
    use crate::words::thue_morse;

    fn relaxed(n: u32) -> RelaxedScheme {
        RelaxedScheme::from_strict(&upper_bound_scheme(n).unwrap(), &thue_morse(n).unwrap()).unwrap()
    }

    #[test]
    fn step1_on_t3_merges_the_ground_pair() {
        let out = eliminate_ground_phrases(relaxed(3), 3).unwrap();
        assert_eq!(
            out.phrases(),
            vec![
                RelaxedPhrase::RelaxedGround { start: 0 },
                RelaxedPhrase::RelaxedGround { start: 2 },
                RelaxedPhrase::RelaxedGround { start: 4 },
                RelaxedPhrase::RelaxedGround { start: 6 },
            ]
        );
        assert!(out.validate().is_valid());
    }

    #[test]
    fn step1_without_grounds_is_identity() {
        let step1 = eliminate_ground_phrases(relaxed(5), 5).unwrap();
        let again = eliminate_ground_phrases(step1.clone(), 5).unwrap();
        assert_eq!(step1, again);
    }

    #[test]
    fn halving_examples() {
        let t3 = thue_morse(3).unwrap();
        let step1 = eliminate_ground_phrases(relaxed(3), 3).unwrap();
        let step2 = eliminate_odd_phrases(step1, 3).unwrap();
        let halved = halve(&step2).unwrap();
        assert_eq!(halved.serialize(), "v1 4 4\nG a\nG b\nG b\nG a\n");

        let t4 = thue_morse(4).unwrap();
        let aligned = RelaxedScheme {
            text: t4.clone(),
            spans: vec![
                Span { start: 0, len: 2, source: None },
                Span { start: 2, len: 2, source: None },
                Span { start: 4, len: 2, source: None },
                Span { start: 6, len: 2, source: None },
                Span { start: 8, len: 4, source: Some(4) },
                Span { start: 12, len: 4, source: Some(0) },
            ],
        };
        assert!(aligned.validate().is_valid());
        let h = halve(&aligned).unwrap();
        assert_eq!(h.phrases()[4], Phrase::Copy { len: 2, source: 2 });
        assert_eq!(h.phrases()[1], Phrase::Ground(b'b'));
        assert!(h.is_valid_for(&t3));
    }

    #[test]
    fn reduce_once_on_t3() {
        let r = reduce_once(&upper_bound_scheme(3).unwrap(), 3).unwrap();
        assert_eq!(r.scheme.size(), 4);
        assert!(r.scheme.is_valid_for(&thue_morse(2).unwrap()));
        assert!(r.satisfies_size_bound());
        assert_eq!(r.stats.step1.case6, 1);
    }

    #[test]
    fn reduce_once_on_constructed_schemes() {
        for n in 3..=11 {
            let b = upper_bound_scheme(n).unwrap();
            let r = reduce_once(&b, n).unwrap();
            assert!(r.scheme.is_valid_for(&thue_morse(n - 1).unwrap()), "n={n}");
            assert_eq!(r.scheme.decode().unwrap(), thue_morse(n - 1).unwrap());
            assert!(r.satisfies_size_bound(), "n={n}");
            assert!(r.scheme.size() <= n as usize + 2);
        }
    }

    #[test]
    fn reduce_to_bound_on_constructed_schemes() {
        for n in 5..=10 {
            let b = upper_bound_scheme(n).unwrap();
            let out = reduce_to_bound(&b, n).unwrap();
            assert!((1..=3).contains(&out.levels));
            assert!(out.scheme.size() + out.levels as usize <= b.size());
            assert!(out.scheme.is_valid_for(&thue_morse(n - out.levels).unwrap()));
        }
    }

    #[test]
    fn rejects_invalid_input() {
        let t3 = thue_morse(3).unwrap();
        let bad = MacroScheme::new(
            8,
            vec![
                Phrase::Copy { len: 2, source: 3 },
                Phrase::Ground(b'b'),
                Phrase::Copy { len: 2, source: 6 },
                Phrase::Ground(b'a'),
                Phrase::Copy { len: 2, source: 0 },
            ],
        )
        .unwrap();
        assert!(!bad.is_valid_for(&t3));
        assert!(matches!(reduce_once(&bad, 3), Err(Error::Usage(_))));
        assert!(matches!(reduce_once(&upper_bound_scheme(2).unwrap(), 2), Err(Error::Usage(_))));
        assert!(matches!(reduce_to_bound(&upper_bound_scheme(4).unwrap(), 4), Err(Error::Usage(_))));
    }

    #[test]
    fn trace_records_monotone_partner_boundaries() {
        let r = reduce_once(&upper_bound_scheme(8).unwrap(), 8).unwrap();
        let step1: Vec<usize> =
            r.trace.iter().filter(|e| e.step == 1).map(|e| e.partner_boundaries).collect();
        assert!(step1.windows(2).all(|w| w[1] <= w[0]), "{step1:?}");
        assert!(r.trace.iter().any(|e| e.label == "align"));
    }
}
