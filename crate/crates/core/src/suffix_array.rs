/// Suffix array by prefix doubling. `s` may contain any bytes; suffixes
/// compare as byte strings, a proper prefix sorting first.
pub(crate) fn suffix_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    let mut sa: Vec<usize> = (0..n).collect();
    let mut rank: Vec<usize> = s.iter().map(|&c| c as usize + 1).collect();
    let mut tmp = vec![0usize; n];
    if n < 2 {
        return sa;
    }
    let mut k = 1;
    loop {
        let key = |i: usize| (rank[i], if i + k < n { rank[i + k] } else { 0 });
        sa.sort_unstable_by_key(|&i| key(i));
        tmp[sa[0]] = 1;
        for w in 1..n {
            tmp[sa[w]] = tmp[sa[w - 1]] + (key(sa[w]) != key(sa[w - 1])) as usize;
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1]] == n {
            break;
        }
        k *= 2;
    }
    sa
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sorting_suffixes() {
        for s in ["", "a", "abba", "abbabaab", "aaaa", "baabab", "mississippi"] {
            let mut expected: Vec<usize> = (0..s.len()).collect();
            expected.sort_by_key(|&i| &s[i..]);
            assert_eq!(suffix_array(s.as_bytes()), expected, "{s}");
        }
    }
}
