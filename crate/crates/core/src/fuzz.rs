//! Random valid schemes for stress tests.
//!
//! Three families, all seeded:
//!
//! - [`lz_style`]: left-to-right parsings whose copies always point to an
//!   earlier start, which can never form a cycle;
//! - [`perturbed`]: boundaries of a constructed scheme moved, split or
//!   merged at random, then re-sourced by the backtracking search;
//! - [`random_parsing`]: short random phrase lengths, re-sourced the same
//!   way, so sources point both left and right;
//! - [`split_grounds`]: copies of a valid scheme cut into pieces, some of
//!   them turned into single-letter grounds.

use rand::rngs::StdRng;
use rand::Rng;

use crate::construct::upper_bound_scheme;
use crate::schemes::{MacroScheme, Phrase};
use crate::solve::{find_sources, SourceOrder};
use crate::words::Word;

/// Parses `w` left to right; each copy takes a random length up to the
/// longest earlier match and a random earlier source.
pub fn lz_style(w: &Word, rng: &mut StdRng) -> MacroScheme {
    let t = w.as_bytes();
    let n = t.len();
    let mut phrases = Vec::new();
    let mut i = 0;
    let greed: f64 = rng.gen_range(0.3..1.0);
    while i < n {
        let longest = (0..i)
            .map(|j| t[i..].iter().zip(&t[j..]).take_while(|(x, y)| x == y).count())
            .max()
            .unwrap_or(0);
        if longest < 2 || rng.gen_bool(0.05) {
            phrases.push(Phrase::Ground(t[i]));
            i += 1;
            continue;
        }
        let len = if rng.gen_bool(greed) { longest } else { rng.gen_range(2..=longest) };
        let sources: Vec<usize> = (0..i).filter(|&j| t[i..i + len] == t[j..j + len]).collect();
        let source = sources[rng.gen_range(0..sources.len())];
        phrases.push(Phrase::Copy { len, source });
        i += len;
    }
    MacroScheme::new(n, phrases).expect("parsing covers the word")
}

/// Random boundary edits of the size-`n + 2` scheme for `t_n`, re-sourced
/// by search. `None` when no valid source assignment turned up.
pub fn perturbed(n: u32, w: &Word, rng: &mut StdRng) -> Option<MacroScheme> {
    let base = upper_bound_scheme(n).ok()?;
    let mut lengths: Vec<usize> = base.phrases().iter().map(Phrase::len).collect();
    let edits = rng.gen_range(1..=4);
    for _ in 0..edits {
        let i = rng.gen_range(0..lengths.len());
        match rng.gen_range(0..3) {
            // Shift the boundary after phrase i.
            0 if i + 1 < lengths.len() => {
                let total = lengths[i] + lengths[i + 1];
                let left = rng.gen_range(1..total);
                lengths[i] = left;
                lengths[i + 1] = total - left;
            }
            // Split phrase i.
            1 if lengths[i] >= 2 => {
                let left = rng.gen_range(1..lengths[i]);
                let right = lengths[i] - left;
                lengths[i] = left;
                lengths.insert(i + 1, right);
            }
            // Merge phrase i with the next one.
            2 if i + 1 < lengths.len() => {
                lengths[i] += lengths.remove(i + 1);
            }
            _ => {}
        }
    }
    find_sources(w, &lengths, SourceOrder::Shuffled(rng.gen()), 20_000)
}

/// Random phrase lengths between 1 and `max_len`, re-sourced by search.
pub fn random_parsing(w: &Word, max_len: usize, rng: &mut StdRng) -> Option<MacroScheme> {
    let n = w.len();
    let mut lengths = Vec::new();
    let mut covered = 0;
    while covered < n {
        let len = rng.gen_range(1..=max_len.min(n - covered));
        lengths.push(len);
        covered += len;
    }
    find_sources(w, &lengths, SourceOrder::Shuffled(rng.gen()), 20_000)
}

/// Cuts copy phrases of `b` into pieces with consecutive sources; pieces of
/// length 1 become grounds. Validity is preserved since `f` only loses
/// edges.
pub fn split_grounds(b: &MacroScheme, w: &Word, rng: &mut StdRng) -> MacroScheme {
    let t = w.as_bytes();
    let mut phrases = Vec::new();
    for (phrase, &start) in b.phrases().iter().zip(b.starts()) {
        let Phrase::Copy { len, source } = *phrase else {
            phrases.push(*phrase);
            continue;
        };
        if !rng.gen_bool(0.3) {
            phrases.push(*phrase);
            continue;
        }
        let mut o = 0;
        while o < len {
            let piece = rng.gen_range(1..=(len - o).min(3));
            if piece == 1 {
                phrases.push(Phrase::Ground(t[start + o]));
            } else {
                phrases.push(Phrase::Copy { len: piece, source: source + o });
            }
            o += piece;
        }
    }
    MacroScheme::new(b.text_len(), phrases).expect("pieces cover the phrase")
}

/// One scheme from a random family; always valid for `w = t_n`.
pub fn any_valid(n: u32, w: &Word, rng: &mut StdRng) -> MacroScheme {
    loop {
        let b = match rng.gen_range(0..4) {
            0 => lz_style(w, rng),
            1 => match perturbed(n, w, rng) {
                Some(b) => b,
                None => continue,
            },
            2 => match random_parsing(w, rng.gen_range(3..=8), rng) {
                Some(b) => b,
                None => continue,
            },
            _ => {
                let inner = if rng.gen_bool(0.5) {
                    lz_style(w, rng)
                } else {
                    upper_bound_scheme(n).expect("n within range")
                };
                split_grounds(&inner, w, rng)
            }
        };
        debug_assert!(b.is_valid_for(w));
        return b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::thue_morse;
    use rand::SeedableRng;

    #[test]
    fn generated_schemes_are_valid() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in 3..=8 {
            let w = thue_morse(n).unwrap();
            for _ in 0..50 {
                assert!(lz_style(&w, &mut rng).is_valid_for(&w));
                if let Some(b) = perturbed(n, &w, &mut rng) {
                    assert!(b.is_valid_for(&w));
                }
                if let Some(b) = random_parsing(&w, 5, &mut rng) {
                    assert!(b.is_valid_for(&w));
                }
                let b = upper_bound_scheme(n).unwrap();
                assert!(split_grounds(&b, &w, &mut rng).is_valid_for(&w));
            }
        }
    }
}
