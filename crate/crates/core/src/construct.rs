//! Size-`(n + 2)` schemes for `t_n`, built by pushing a scheme for `t_n`
//! through the morphism and repairing the two designated ground phrases.

use crate::error::{Error, Result};
use crate::schemes::{MacroScheme, Phrase};
use crate::words::DEFAULT_MAX_LEN;

/// A scheme for `t_n` together with the indices of one ground `a` and one
/// ground `b` phrase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftState {
    pub scheme: MacroScheme,
    pub index_a: usize,
    pub index_b: usize,
}

impl LiftState {
    fn check(&self) -> Result<()> {
        let phrases = self.scheme.phrases();
        let ok = |i: usize, c: u8| phrases.get(i) == Some(&Phrase::Ground(c));
        if !ok(self.index_a, b'a') || !ok(self.index_b, b'b') {
            return Err(Error::usage("designated phrases must be Ground(a) and Ground(b)"));
        }
        let len = self.scheme.text_len();
        if !len.is_power_of_two() || len < 4 {
            return Err(Error::usage(format!("text length {len} is not 2^n with n >= 2")));
        }
        Ok(())
    }
}

/// The all-ground scheme `a|b|b|a` for `t_2`, designating its leftmost
/// grounds.
pub fn base_scheme_t2() -> LiftState {
    let phrases = b"abba".map(Phrase::Ground).to_vec();
    LiftState {
        scheme: MacroScheme::new(4, phrases).expect("well formed"),
        index_a: 0,
        index_b: 1,
    }
}

/// Turns a scheme for `t_n` into one for `t_(n+1)` with exactly one more
/// phrase.
pub fn lift(state: &LiftState) -> Result<LiftState> {
    state.check()?;
    let scheme = &state.scheme;
    let starts = scheme.starts();
    let src_of_ab = 2 * starts[state.index_a];
    let src_of_ba = 2 * starts[state.index_b];

    let mut phrases = Vec::with_capacity(scheme.size() + 1);
    let mut index_b = 0;
    for (i, phrase) in scheme.phrases().iter().enumerate() {
        match *phrase {
            _ if i == state.index_a => phrases.push(Phrase::Copy { len: 2, source: 3 }),
            _ if i == state.index_b => {
                index_b = phrases.len();
                phrases.push(Phrase::Ground(b'b'));
                phrases.push(Phrase::Ground(b'a'));
            }
            Phrase::Ground(b'a') => phrases.push(Phrase::Copy { len: 2, source: src_of_ab }),
            Phrase::Ground(_) => phrases.push(Phrase::Copy { len: 2, source: src_of_ba }),
            Phrase::Copy { len, source } => phrases.push(Phrase::Copy { len: 2 * len, source: 2 * source }),
        }
    }
    Ok(LiftState {
        scheme: MacroScheme::new(2 * scheme.text_len(), phrases)?,
        index_a: index_b + 1,
        index_b,
    })
}

/// A valid scheme for `t_n` with `n + 2` phrases.
pub fn upper_bound_scheme(n: u32) -> Result<MacroScheme> {
    upper_bound_scheme_with_limit(n, DEFAULT_MAX_LEN)
}

pub fn upper_bound_scheme_with_limit(n: u32, max_len: usize) -> Result<MacroScheme> {
    if n < 2 {
        return Err(Error::usage(format!("n must be at least 2, got {n}")));
    }
    if n >= usize::BITS || (1usize << n) > max_len {
        let requested = if n >= usize::BITS { usize::MAX } else { 1usize << n };
        return Err(Error::Budget { requested, limit: max_len });
    }
    let mut state = base_scheme_t2();
    for _ in 2..n {
        state = lift(&state)?;
    }
    Ok(state.scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::thue_morse;

    #[test]
    fn base_case() {
        let base = base_scheme_t2();
        assert_eq!(base.scheme.serialize(), "v1 4 4\nG a\nG b\nG b\nG a\n");
        assert!(base.scheme.is_valid_for(&thue_morse(2).unwrap()));
        assert_eq!(base.scheme.ground_count(), 4);
    }

    #[test]
    fn first_lift_matches_hand_execution() {
        let lifted = lift(&base_scheme_t2()).unwrap();
        assert_eq!(lifted.scheme.serialize(), "v1 8 5\nC 2 3\nG b\nG a\nC 2 2\nC 2 0\n");
        assert_eq!((lifted.index_b, lifted.index_a), (1, 2));
        assert!(lifted.scheme.is_valid_for(&thue_morse(3).unwrap()));
    }

    #[test]
    fn lifted_sources_preserve_parity() {
        let mut state = base_scheme_t2();
        for _ in 0..8 {
            state = lift(&state).unwrap();
            // The merged `ab` phrase copies from the odd position 3 and is the
            // one place where parity flips; everything else keeps it.
            let scheme = &state.scheme;
            let merged: Vec<usize> = (0..scheme.size())
                .filter(|&i| scheme.phrases()[i] == Phrase::Copy { len: 2, source: 3 })
                .collect();
            assert_eq!(merged.len(), 1);
            let f = scheme.source_function();
            for x in 0..f.len() {
                if let Some(y) = f.get(x) {
                    if scheme.phrase_containing(x) != merged[0] {
                        assert_eq!(x % 2, y % 2, "x={x} f(x)={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn sizes_and_validity() {
        assert_eq!(upper_bound_scheme(2).unwrap().size(), 4);
        assert_eq!(upper_bound_scheme(3).unwrap(), lift(&base_scheme_t2()).unwrap().scheme);
        for n in 2..=14 {
            let scheme = upper_bound_scheme(n).unwrap();
            let t = thue_morse(n).unwrap();
            assert_eq!(scheme.size(), n as usize + 2);
            assert!(scheme.is_valid_for(&t), "n={n}");
            assert_eq!(scheme.decode().unwrap(), t);
            if n >= 3 {
                assert_eq!(scheme.ground_count(), 2);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(upper_bound_scheme(1), Err(Error::Usage(_))));
        assert!(matches!(upper_bound_scheme_with_limit(10, 512), Err(Error::Budget { .. })));
        let mut state = base_scheme_t2();
        state.index_a = 1;
        assert!(matches!(lift(&state), Err(Error::Usage(_))));
    }
}
