//! Bidirectional (macro) schemes: a parsing of the text where every phrase
//! is either a one-letter literal (a ground phrase) or a copy of another
//! occurrence of itself, anywhere in the text.

use std::fmt;

use crate::error::{Error, Result};
use crate::words::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phrase {
    Ground(u8),
    Copy { len: usize, source: usize },
}

impl Phrase {
    pub fn len(&self) -> usize {
        match *self {
            Phrase::Ground(_) => 1,
            Phrase::Copy { len, .. } => len,
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Phrase::Ground(_))
    }
}

/// A scheme over a text of known length, with phrase starts precomputed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MacroScheme {
    text_len: usize,
    phrases: Vec<Phrase>,
    starts: Vec<usize>,
}

impl MacroScheme {
    /// Checks the structural invariants: phrases tile `[0, text_len)`,
    /// copies have length at least 2 and in-bounds sources, grounds carry a
    /// letter of the alphabet.
    pub fn new(text_len: usize, phrases: Vec<Phrase>) -> Result<Self> {
        let mut starts = Vec::with_capacity(phrases.len());
        let mut pos = 0usize;
        for (i, phrase) in phrases.iter().enumerate() {
            starts.push(pos);
            match *phrase {
                Phrase::Ground(c) if c != b'a' && c != b'b' => {
                    return Err(Error::usage(format!("phrase {i}: ground letter {:?} is not a or b", c as char)))
                }
                Phrase::Copy { len, .. } if len < 2 => {
                    return Err(Error::usage(format!("phrase {i}: copy of length {len} (must be at least 2)")))
                }
                Phrase::Copy { len, source } if source.checked_add(len).is_none_or(|end| end > text_len) => {
                    return Err(Error::usage(format!(
                        "phrase {i}: source {source} + length {len} exceeds text length {text_len}"
                    )))
                }
                _ => {}
            }
            pos += phrase.len();
        }
        if pos != text_len {
            return Err(Error::usage(format!("phrase lengths sum to {pos}, text length is {text_len}")));
        }
        Ok(MacroScheme { text_len, phrases, starts })
    }

    /// The all-ground scheme of a word.
    pub fn all_ground(w: &Word) -> Self {
        let phrases = w.as_bytes().iter().map(|&c| Phrase::Ground(c)).collect();
        MacroScheme::new(w.len(), phrases).expect("all-ground schemes are well formed")
    }

    pub fn text_len(&self) -> usize {
        self.text_len
    }

    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }

    /// Start position of every phrase.
    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    /// Number of phrases.
    pub fn size(&self) -> usize {
        self.phrases.len()
    }

    pub fn ground_count(&self) -> usize {
        self.phrases.iter().filter(|p| p.is_ground()).count()
    }

    pub fn phrase_containing(&self, pos: usize) -> usize {
        self.starts.partition_point(|&s| s <= pos) - 1
    }

    pub fn source_function(&self) -> SourceFunction {
        let mut map = vec![None; self.text_len];
        for (phrase, &start) in self.phrases.iter().zip(&self.starts) {
            if let Phrase::Copy { len, source } = *phrase {
                for offset in 0..len {
                    map[start + offset] = Some(source + offset);
                }
            }
        }
        SourceFunction(map)
    }

    pub fn validate(&self, w: &Word) -> Result<ValidityVerdict> {
        if w.len() != self.text_len {
            return Err(Error::usage(format!(
                "scheme is for length {}, word has length {}",
                self.text_len,
                w.len()
            )));
        }
        let text = w.as_bytes();
        for (index, (phrase, &start)) in self.phrases.iter().zip(&self.starts).enumerate() {
            match *phrase {
                Phrase::Ground(c) if c != text[start] => {
                    return Ok(ValidityVerdict::Invalid(InvalidReason::ContentMismatch { phrase: index, offset: 0 }))
                }
                Phrase::Copy { len, source } => {
                    if let Some(offset) = (0..len).find(|&o| text[start + o] != text[source + o]) {
                        return Ok(ValidityVerdict::Invalid(InvalidReason::ContentMismatch { phrase: index, offset }));
                    }
                }
                _ => {}
            }
        }
        let f = self.source_function();
        let stuck = f.unresolvable();
        if stuck.is_empty() {
            Ok(ValidityVerdict::Valid)
        } else {
            Ok(ValidityVerdict::Invalid(InvalidReason::Cycle(f.cycle_from(stuck[0]))))
        }
    }

    pub fn is_valid_for(&self, w: &Word) -> bool {
        matches!(self.validate(w), Ok(ValidityVerdict::Valid))
    }

    /// Reconstructs the text by resolving every position to a ground letter.
    pub fn decode(&self) -> Result<Word, DecodeError> {
        let f = self.source_function();
        let stuck = f.unresolvable();
        if !stuck.is_empty() {
            return Err(DecodeError { stuck });
        }
        let mut letter_at = vec![0u8; self.text_len];
        for (phrase, &start) in self.phrases.iter().zip(&self.starts) {
            if let Phrase::Ground(c) = *phrase {
                letter_at[start] = c;
            }
        }
        let mut out = vec![0u8; self.text_len];
        for x in 0..self.text_len {
            out[x] = letter_at[f.root(x)];
        }
        Ok(Word::from_trusted(out))
    }

    /// The scheme file format: `v1 <N> <k>` followed by one `G <c>` or
    /// `C <len> <src>` line per phrase.
    pub fn serialize(&self) -> String {
        let mut out = format!("v1 {} {}\n", self.text_len, self.phrases.len());
        for phrase in &self.phrases {
            match *phrase {
                Phrase::Ground(c) => out.push_str(&format!("G {}\n", c as char)),
                Phrase::Copy { len, source } => out.push_str(&format!("C {len} {source}\n")),
            }
        }
        out
    }

    pub fn parse(input: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(input)
            .map_err(|_| Error::Parse { line: 1, message: "not ASCII".into() })?;
        if !text.ends_with('\n') {
            return Err(Error::Parse { line: text.lines().count().max(1), message: "missing final newline".into() });
        }
        let lines: Vec<&str> = text[..text.len() - 1].split('\n').collect();
        let err = |line: usize, message: String| Error::Parse { line, message };

        let header: Vec<&str> = lines[0].split(' ').collect();
        let (text_len, count) = match header.as_slice() {
            ["v1", n, k] => (parse_number(n, 1)?, parse_number(k, 1)?),
            _ => return Err(err(1, format!("expected `v1 <N> <k>`, found {:?}", lines[0]))),
        };
        if lines.len() - 1 != count {
            return Err(err(lines.len(), format!("header announces {count} phrases, found {}", lines.len() - 1)));
        }
        let mut phrases = Vec::with_capacity(count);
        let mut covered = 0usize;
        for (i, line) in lines[1..].iter().enumerate() {
            let line_no = i + 2;
            let fields: Vec<&str> = line.split(' ').collect();
            let phrase = match fields.as_slice() {
                ["G", "a"] => Phrase::Ground(b'a'),
                ["G", "b"] => Phrase::Ground(b'b'),
                ["C", len, src] => {
                    let len = parse_number(len, line_no)?;
                    let source = parse_number(src, line_no)?;
                    if len < 2 {
                        return Err(err(line_no, format!("copy length {len} must be at least 2")));
                    }
                    if source >= text_len || source + len > text_len {
                        return Err(err(
                            line_no,
                            format!("source {source} with length {len} is out of range for N={text_len}"),
                        ));
                    }
                    Phrase::Copy { len, source }
                }
                _ => return Err(err(line_no, format!("malformed phrase line {line:?}"))),
            };
            covered += phrase.len();
            phrases.push(phrase);
        }
        if covered != text_len {
            return Err(err(lines.len(), format!("phrase lengths sum to {covered}, header says {text_len}")));
        }
        MacroScheme::new(text_len, phrases).map_err(|e| err(1, e.to_string()))
    }
}

fn parse_number(field: &str, line: usize) -> Result<usize> {
    let canonical = !field.is_empty()
        && field.bytes().all(|c| c.is_ascii_digit())
        && (field == "0" || !field.starts_with('0'));
    if !canonical {
        return Err(Error::Parse { line, message: format!("expected a decimal integer, found {field:?}") });
    }
    field
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("integer {field:?} out of range") })
}

impl fmt::Display for MacroScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, phrase) in self.phrases.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            match *phrase {
                Phrase::Ground(c) => write!(f, "{}", c as char)?,
                Phrase::Copy { len, source } => write!(f, "({len},{source})")?,
            }
        }
        Ok(())
    }
}

/// The per-position source map `f_B`; `None` stands for ⊥.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFunction(pub Vec<Option<usize>>);

impl SourceFunction {
    pub fn get(&self, x: usize) -> Option<usize> {
        self.0[x]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Positions whose chain under `f` never reaches ⊥, ascending.
    pub fn unresolvable(&self) -> Vec<usize> {
        #[derive(Clone, Copy, PartialEq)]
        enum State {
            Unknown,
            OnPath,
            Resolved,
            Stuck,
        }
        let n = self.0.len();
        let mut state = vec![State::Unknown; n];
        let mut path = Vec::new();
        for start in 0..n {
            let mut x = start;
            let outcome = loop {
                match state[x] {
                    State::Resolved => break State::Resolved,
                    State::Stuck | State::OnPath => break State::Stuck,
                    State::Unknown => {}
                }
                state[x] = State::OnPath;
                path.push(x);
                match self.0[x] {
                    None => break State::Resolved,
                    Some(next) => x = next,
                }
            };
            for &p in &path {
                state[p] = outcome;
            }
            path.clear();
        }
        (0..n).filter(|&x| state[x] == State::Stuck).collect()
    }

    /// Walks `f` from `x` (which must be unresolvable) and returns the cycle
    /// it falls into, starting from its first repeated position.
    pub fn cycle_from(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![usize::MAX; self.0.len()];
        let mut walk = Vec::new();
        let mut cur = x;
        while seen[cur] == usize::MAX {
            seen[cur] = walk.len();
            walk.push(cur);
            cur = self.0[cur].expect("unresolvable positions always have a source");
        }
        walk.split_off(seen[cur])
    }

    /// The ⊥-position that `x` eventually copies from. Panics on cycles.
    pub fn root(&self, mut x: usize) -> usize {
        let mut steps = 0;
        while let Some(next) = self.0[x] {
            x = next;
            steps += 1;
            assert!(steps <= self.0.len(), "cycle through {x}");
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidReason {
    ContentMismatch { phrase: usize, offset: usize },
    /// `x0 -> x1 -> ... -> x0` under the source function (closing repeat
    /// omitted).
    Cycle(Vec<usize>),
    Unresolvable(Vec<usize>),
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::ContentMismatch { phrase, offset } => {
                write!(f, "content-mismatch:phrase={phrase},offset={offset}")
            }
            InvalidReason::Cycle(c) => {
                let parts: Vec<String> = c.iter().chain(c.first()).map(|x| x.to_string()).collect();
                write!(f, "cycle:{}", parts.join("->"))
            }
            InvalidReason::Unresolvable(s) => {
                let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                write!(f, "unresolvable:{}", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidityVerdict {
    Valid,
    Invalid(InvalidReason),
}

impl ValidityVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidityVerdict::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{} positions never resolve to a ground phrase", .stuck.len())]
pub struct DecodeError {
    pub stuck: Vec<usize>,
}

impl DecodeError {
    pub fn reason(&self) -> InvalidReason {
        InvalidReason::Unresolvable(self.stuck.clone())
    }
}

pub fn source_function(b: &MacroScheme) -> SourceFunction {
    b.source_function()
}

pub fn validate(b: &MacroScheme, w: &Word) -> Result<ValidityVerdict> {
    b.validate(w)
}

pub fn decode(b: &MacroScheme) -> Result<Word, DecodeError> {
    b.decode()
}

pub fn ground_count(b: &MacroScheme) -> usize {
    b.ground_count()
}
