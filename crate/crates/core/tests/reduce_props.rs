use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use tmscheme::construct::upper_bound_scheme;
use tmscheme::fuzz;
use tmscheme::reduce::{
    eliminate_ground_phrases, eliminate_odd_phrases, halve, reduce_once, reduce_to_bound, RelaxedPhrase, RelaxedScheme,
};
use tmscheme::words::thue_morse;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn reduce_once_is_sound(n in 3u32..=8, seed in any::<u64>()) {
        let t = thue_morse(n).unwrap();
        let b = fuzz::any_valid(n, &t, &mut StdRng::seed_from_u64(seed));
        let r = reduce_once(&b, n).unwrap();
        let smaller = thue_morse(n - 1).unwrap();
        prop_assert!(r.scheme.is_valid_for(&smaller));
        prop_assert_eq!(r.scheme.decode().unwrap(), smaller);
        prop_assert!(r.satisfies_size_bound(), "{} > {}", r.scheme.size(), r.size_bound());
        // Step 1 never increases the partner-separating boundaries.
        let step1: Vec<usize> = r.trace.iter().filter(|e| e.step == 1).map(|e| e.partner_boundaries).collect();
        prop_assert!(step1.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn each_step_meets_its_postcondition(n in 3u32..=8, seed in any::<u64>()) {
        let t = thue_morse(n).unwrap();
        let b = fuzz::any_valid(n, &t, &mut StdRng::seed_from_u64(seed));
        let relaxed = RelaxedScheme::from_strict(&b, &t).unwrap();
        let s1 = eliminate_ground_phrases(relaxed.clone(), n).unwrap();
        prop_assert_eq!(s1.length1_grounds(), 0);
        prop_assert!(s1.validate().is_valid());
        prop_assert!(s1.partner_boundary_count() <= relaxed.partner_boundary_count());
        let s2 = eliminate_odd_phrases(s1.clone(), n).unwrap();
        prop_assert!(s2.is_even_aligned());
        prop_assert!(s2.validate().is_valid());
        prop_assert!(s2.size() <= s1.size());
        prop_assert!(s2.relaxed_grounds() >= s1.relaxed_grounds());
        for p in s2.phrases() {
            if let RelaxedPhrase::Copy { len, .. } = p {
                prop_assert!(len >= 4);
            }
        }
        let h = halve(&s2).unwrap();
        prop_assert_eq!(h.size(), s2.size());
        prop_assert!(h.is_valid_for(&thue_morse(n - 1).unwrap()));
    }

    #[test]
    fn three_levels_always_suffice(n in 5u32..=8, seed in any::<u64>()) {
        let t = thue_morse(n).unwrap();
        let b = fuzz::any_valid(n, &t, &mut StdRng::seed_from_u64(seed));
        let out = reduce_to_bound(&b, n).unwrap();
        prop_assert!((1..=3).contains(&out.levels));
        prop_assert!(out.scheme.size() + out.levels as usize <= b.size());
        prop_assert!(out.scheme.is_valid_for(&thue_morse(n - out.levels).unwrap()));
    }
}

#[test]
fn constructed_schemes_reduce_within_bound() {
    for n in 5..=10 {
        let b = upper_bound_scheme(n).unwrap();
        let out = reduce_to_bound(&b, n).unwrap();
        assert!(out.scheme.size() + out.levels as usize <= n as usize + 2);
        assert!(out.scheme.is_valid_for(&thue_morse(n - out.levels).unwrap()));
    }
}

#[test]
fn many_grounds_give_a_large_drop() {
    // All-ground scheme of t_5: 32 grounds, so the size must drop by 15.
    let t = thue_morse(5).unwrap();
    let b = tmscheme::MacroScheme::all_ground(&t);
    let r = reduce_once(&b, 5).unwrap();
    assert!(r.scheme.size() <= 32 - 15);
    assert!(r.scheme.is_valid_for(&thue_morse(4).unwrap()));
}
