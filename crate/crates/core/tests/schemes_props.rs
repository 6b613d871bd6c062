use proptest::prelude::*;
use tmscheme::schemes::{MacroScheme, Phrase, ValidityVerdict};
use tmscheme::solve::{find_sources, SourceOrder};
use tmscheme::words::Word;
use tmscheme_oracles as naive;

/// A word plus a structurally sound scheme over it whose copies may or may
/// not match and may or may not be cyclic.
fn word_and_scheme() -> impl Strategy<Value = (Vec<u8>, Vec<Phrase>)> {
    (2usize..=14)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop::sample::select(vec![b'a', b'b']), n),
                prop::collection::vec((1usize..=4, any::<prop::sample::Index>()), 1..=n),
            )
        })
        .prop_map(|(w, raw)| {
            let n = w.len();
            let mut phrases = Vec::new();
            let mut pos = 0;
            for (len, src) in raw {
                if pos == n {
                    break;
                }
                let len = len.min(n - pos);
                phrases.push(if len == 1 {
                    Phrase::Ground(w[pos])
                } else {
                    Phrase::Copy { len, source: src.index(n - len + 1) }
                });
                pos += len;
            }
            while pos < n {
                phrases.push(Phrase::Ground(w[pos]));
                pos += 1;
            }
            (w, phrases)
        })
}

fn as_naive(b: &MacroScheme) -> Vec<naive::NaivePhrase> {
    b.phrases()
        .iter()
        .map(|p| match *p {
            Phrase::Ground(_) => (1, None),
            Phrase::Copy { len, source } => (len, Some(source)),
        })
        .collect()
}

proptest! {
    #[test]
    fn validity_matches_oracle((w, phrases) in word_and_scheme()) {
        let b = MacroScheme::new(w.len(), phrases).unwrap();
        let word = Word::new(w.clone()).unwrap();
        let verdict = b.validate(&word).unwrap();
        prop_assert_eq!(verdict.is_valid(), naive::scheme_is_valid(&w, &as_naive(&b)));
    }

    #[test]
    fn decode_agrees_with_validate((w, phrases) in word_and_scheme()) {
        let b = MacroScheme::new(w.len(), phrases).unwrap();
        match b.decode() {
            Ok(decoded) => prop_assert!(b.validate(&decoded).unwrap().is_valid()),
            Err(e) => {
                prop_assert!(!e.stuck.is_empty());
                let word = Word::new(w).unwrap();
                let cyclic = matches!(b.validate(&word).unwrap(), ValidityVerdict::Invalid(_));
                prop_assert!(cyclic);
            }
        }
    }

    #[test]
    fn valid_schemes_resolve_and_copy_letters((w, phrases) in word_and_scheme(), seed in any::<u64>()) {
        // Keep the parsing, re-source it into a valid scheme.
        let word = Word::new(w.clone()).unwrap();
        let lengths: Vec<usize> = phrases.iter().map(Phrase::len).collect();
        let b = find_sources(&word, &lengths, SourceOrder::Shuffled(seed), 100_000)
            .unwrap_or_else(|| MacroScheme::all_ground(&word));
        prop_assert!(b.is_valid_for(&word));
        let f = b.source_function();
        for x in 0..w.len() {
            if let Some(y) = f.get(x) {
                prop_assert_eq!(w[x], w[y]);
            }
            let mut y = x;
            let mut steps = 0;
            while let Some(next) = f.get(y) {
                y = next;
                steps += 1;
                prop_assert!(steps <= w.len());
            }
        }
        prop_assert_eq!(b.decode().unwrap(), word);
        prop_assert!(b.ground_count() >= Word::new(w).unwrap().distinct_letters());
    }

    #[test]
    fn serialization_round_trips((w, phrases) in word_and_scheme()) {
        let b = MacroScheme::new(w.len(), phrases).unwrap();
        let text = b.serialize();
        prop_assert_eq!(MacroScheme::parse(text.as_bytes()).unwrap(), b);
    }
}

#[test]
fn cycle_witness_follows_f() {
    let b = MacroScheme::parse(b"v1 8 5\nC 2 3\nG b\nC 2 6\nG a\nC 2 0\n").unwrap();
    let t3: Word = "abbabaab".parse().unwrap();
    match b.validate(&t3).unwrap() {
        ValidityVerdict::Invalid(reason) => assert_eq!(reason.to_string(), "cycle:0->3->6->0"),
        ValidityVerdict::Valid => panic!("cyclic scheme accepted"),
    }
}
