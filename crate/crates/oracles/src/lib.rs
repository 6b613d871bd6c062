//! Slow, obviously-correct reference implementations.
//!
//! Nothing here shares code with `tmscheme`; words are plain byte strings
//! over `a`/`b` and schemes are lists of `(length, source)` with `None` for
//! a ground.

use std::collections::HashSet;

pub type NaivePhrase = (usize, Option<usize>);

/// `μⁿ(a)` by literal string substitution.
pub fn thue_morse(n: u32) -> Vec<u8> {
    let mut w = b"a".to_vec();
    for _ in 0..n {
        w = w.iter().flat_map(|&c| if c == b'a' { *b"ab" } else { *b"ba" }).collect();
    }
    w
}

/// All binary words of length `len`, in lexicographic order.
pub fn all_words(len: usize) -> Vec<Vec<u8>> {
    (0..1u64 << len)
        .map(|m| (0..len).map(|i| if m >> (len - 1 - i) & 1 == 0 { b'a' } else { b'b' }).collect())
        .collect()
}

pub fn occurrences(w: &[u8], p: &[u8]) -> Vec<usize> {
    if p.is_empty() || p.len() > w.len() {
        return Vec::new();
    }
    (0..=w.len() - p.len()).filter(|&i| &w[i..i + p.len()] == p).collect()
}

pub fn distinct_substrings(w: &[u8]) -> HashSet<Vec<u8>> {
    let mut set = HashSet::new();
    for i in 0..w.len() {
        for j in i + 1..=w.len() {
            set.insert(w[i..j].to_vec());
        }
    }
    set
}

pub fn distinct_of_length(w: &[u8], k: usize) -> usize {
    w.windows(k).collect::<HashSet<_>>().len()
}

/// Some factor with two overlapping occurrences, if any.
pub fn has_overlap(w: &[u8]) -> bool {
    distinct_substrings(w).iter().any(|f| {
        let occ = occurrences(w, f);
        occ.windows(2).any(|p| p[1] < p[0] + f.len())
    })
}

/// Factors (outside the exempt set) occurring at both parities.
pub fn mixed_parity_factors(w: &[u8]) -> Vec<Vec<u8>> {
    const EXEMPT: [&[u8]; 6] = [b"aba", b"bab", b"ab", b"ba", b"a", b"b"];
    let mut out: Vec<Vec<u8>> = distinct_substrings(w)
        .into_iter()
        .filter(|f| !EXEMPT.contains(&f.as_slice()))
        .filter(|f| {
            let occ = occurrences(w, f);
            occ.iter().any(|p| p % 2 == 0) && occ.iter().any(|p| p % 2 == 1)
        })
        .collect();
    out.sort();
    out
}

/// Shortest substring not covered by `positions` (leftmost first
/// occurrence among the shortest), or `None` for an attractor.
pub fn attractor_missing(w: &[u8], positions: &[usize]) -> Option<Vec<u8>> {
    for len in 1..=w.len() {
        for start in 0..=w.len() - len {
            let f = &w[start..start + len];
            if occurrences(w, f)[0] != start {
                continue;
            }
            let covered = occurrences(w, f).iter().any(|&o| positions.iter().any(|&p| o <= p && p < o + len));
            if !covered {
                return Some(f.to_vec());
            }
        }
    }
    None
}

/// Combinations of `k` out of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    let mut c: Vec<usize> = (0..k).collect();
    if k > n {
        return false;
    }
    loop {
        if visit(&c) {
            return true;
        }
        let Some(i) = (0..k).rev().find(|&i| c[i] != i + n - k) else { return false };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Smallest attractor size and the lexicographically first witness.
pub fn min_attractor(w: &[u8]) -> (usize, Vec<usize>) {
    if w.is_empty() {
        return (0, Vec::new());
    }
    for k in 1..=w.len() {
        let mut found = None;
        combinations(w.len(), k, |c| {
            if attractor_missing(w, c).is_none() {
                found = Some(c.to_vec());
                true
            } else {
                false
            }
        });
        if let Some(c) = found {
            return (k, c);
        }
    }
    unreachable!("all positions form an attractor")
}

/// Checks a scheme by following every position's source chain.
pub fn scheme_is_valid(w: &[u8], phrases: &[NaivePhrase]) -> bool {
    let n = w.len();
    let mut f = vec![None; n];
    let mut pos = 0;
    for &(len, source) in phrases {
        if len == 0 || pos + len > n {
            return false;
        }
        match source {
            None if len != 1 => return false,
            None => {}
            Some(s) => {
                if len < 2 || s + len > n || w[pos..pos + len] != w[s..s + len] {
                    return false;
                }
                for o in 0..len {
                    f[pos + o] = Some(s + o);
                }
            }
        }
        pos += len;
    }
    if pos != n {
        return false;
    }
    (0..n).all(|x| {
        let mut y = x;
        for _ in 0..=n {
            match f[y] {
                None => return true,
                Some(z) => y = z,
            }
        }
        false
    })
}

/// Smallest valid scheme size: every parsing with `k` phrases and every
/// source choice, for increasing `k`.
pub fn min_scheme_size(w: &[u8]) -> usize {
    let n = w.len();
    if n == 0 {
        return 0;
    }
    for k in 1..=n {
        let mut found = false;
        // Boundaries: a (k-1)-subset of 1..n.
        combinations(n - 1, k - 1, |cuts| {
            let mut bounds = vec![0];
            bounds.extend(cuts.iter().map(|c| c + 1));
            bounds.push(n);
            let lens: Vec<usize> = bounds.windows(2).map(|b| b[1] - b[0]).collect();
            let options: Vec<Vec<Option<usize>>> = bounds
                .windows(2)
                .map(|b| {
                    let len = b[1] - b[0];
                    if len == 1 {
                        vec![None]
                    } else {
                        (0..=n - len).map(Some).collect()
                    }
                })
                .collect();
            let mut idx = vec![0usize; k];
            loop {
                let phrases: Vec<NaivePhrase> = (0..k).map(|i| (lens[i], options[i][idx[i]])).collect();
                if scheme_is_valid(w, &phrases) {
                    found = true;
                    return true;
                }
                let Some(i) = (0..k).rev().find(|&i| idx[i] + 1 < options[i].len()) else { return false };
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = 0;
                }
            }
        });
        if found {
            return k;
        }
    }
    unreachable!("the all-ground scheme is valid")
}

/// `max_k d_k / k` as an unreduced `(d_k, k)` with the smallest maximizing k.
pub fn delta(w: &[u8]) -> (usize, usize) {
    let mut best = (0, 1);
    for k in 1..=w.len() {
        let d = distinct_of_length(w, k);
        if d * best.1 > best.0 * k {
            best = (d, k);
        }
    }
    best
}

/// Greedy LZ77 with self-overlap; `(start, len, source)`.
pub fn lz77(w: &[u8]) -> Vec<(usize, usize, Option<usize>)> {
    let n = w.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut best = (0, 0);
        for j in 0..i {
            let mut l = 0;
            while i + l < n && w[j + l] == w[i + l] {
                l += 1;
            }
            if l > best.0 {
                best = (l, j);
            }
        }
        if best.0 == 0 {
            out.push((i, 1, None));
            i += 1;
        } else {
            out.push((i, best.0, Some(best.1)));
            i += best.0;
        }
    }
    out
}

/// Last column of the sorted rotations of `w$`.
pub fn bwt(w: &[u8]) -> Vec<u8> {
    let mut s = w.to_vec();
    s.push(b'$');
    let n = s.len();
    let mut rotations: Vec<Vec<u8>> = (0..n).map(|i| [&s[i..], &s[..i]].concat()).collect();
    rotations.sort();
    rotations.iter().map(|r| r[n - 1]).collect()
}

pub fn runs(s: &[u8]) -> usize {
    s.iter().enumerate().filter(|&(i, &c)| i == 0 || s[i - 1] != c).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_checked_values() {
        assert_eq!(thue_morse(3), b"abbabaab");
        assert_eq!(occurrences(&thue_morse(4), b"abba"), vec![0, 6, 12]);
        assert!(has_overlap(b"ababa"));
        assert!(!has_overlap(&thue_morse(5)));
        assert_eq!(min_attractor(b"abba"), (2, vec![0, 2]));
        assert_eq!(attractor_missing(b"abba", &[0, 1]), Some(b"ba".to_vec()));
        assert_eq!(min_scheme_size(b"aaaa"), 2);
        assert_eq!(min_scheme_size(b"abba"), 4);
        assert_eq!(delta(b"abba"), (2, 1));
        assert_eq!(lz77(b"aaaa"), vec![(0, 1, None), (1, 3, Some(0))]);
        assert_eq!(bwt(b"abba"), b"ab$ba");
        assert_eq!(runs(b"aaaa$"), 2);
        assert_eq!(all_words(2), vec![b"aa".to_vec(), b"ab".to_vec(), b"ba".to_vec(), b"bb".to_vec()]);
    }
}
