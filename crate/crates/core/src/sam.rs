//! Suffix automaton over the binary alphabet.
//!
//! Every state stands for one end-position equivalence class: all of its
//! substrings occur ending at exactly the same set of positions, and their
//! lengths form the contiguous range `min_len(v) ..= len[v]`. Several
//! measures are phrased most naturally over these classes (distinct
//! substring counts per length, attractor coverage, occurrence parities).

pub(crate) const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub(crate) struct SuffixAutomaton {
    pub len: Vec<usize>,
    pub link: Vec<usize>,
    next: Vec<[usize; 2]>,
    /// End position of the first occurrence of the class.
    pub first_end: Vec<usize>,
    /// Whether the state was created as the class of a whole prefix
    /// (as opposed to a clone); primary states own exactly one end position.
    pub primary: Vec<bool>,
}

#[inline]
fn code(symbol: u8) -> usize {
    (symbol == b'b') as usize
}

impl SuffixAutomaton {
    pub fn new(text: &[u8]) -> Self {
        let cap = 2 * text.len().max(1);
        let mut sam = SuffixAutomaton {
            len: Vec::with_capacity(cap),
            link: Vec::with_capacity(cap),
            next: Vec::with_capacity(cap),
            first_end: Vec::with_capacity(cap),
            primary: Vec::with_capacity(cap),
        };
        sam.push(0, NONE, [NONE; 2], NONE, false);
        let mut last = 0;
        for (pos, &symbol) in text.iter().enumerate() {
            let c = code(symbol);
            let cur = sam.push(sam.len[last] + 1, NONE, [NONE; 2], pos, true);
            let mut p = last;
            while p != NONE && sam.next[p][c] == NONE {
                sam.next[p][c] = cur;
                p = sam.link[p];
            }
            if p == NONE {
                sam.link[cur] = 0;
            } else {
                let q = sam.next[p][c];
                if sam.len[p] + 1 == sam.len[q] {
                    sam.link[cur] = q;
                } else {
                    let clone = sam.push(
                        sam.len[p] + 1,
                        sam.link[q],
                        sam.next[q],
                        sam.first_end[q],
                        false,
                    );
                    while p != NONE && sam.next[p][c] == q {
                        sam.next[p][c] = clone;
                        p = sam.link[p];
                    }
                    sam.link[q] = clone;
                    sam.link[cur] = clone;
                }
            }
            last = cur;
        }
        sam
    }

    fn push(&mut self, len: usize, link: usize, next: [usize; 2], end: usize, primary: bool) -> usize {
        self.len.push(len);
        self.link.push(link);
        self.next.push(next);
        self.first_end.push(end);
        self.primary.push(primary);
        self.len.len() - 1
    }

    pub fn state_count(&self) -> usize {
        self.len.len()
    }

    /// Shortest substring length represented by a non-root state.
    pub fn min_len(&self, state: usize) -> usize {
        self.len[self.link[state]] + 1
    }

    /// Non-root states ordered by decreasing `len` (children before their
    /// suffix-link parents).
    pub fn by_len_desc(&self) -> Vec<usize> {
        let max = self.len.iter().copied().max().unwrap_or(0);
        let mut buckets = vec![0usize; max + 2];
        for &l in &self.len {
            buckets[l + 1] += 1;
        }
        for i in 1..buckets.len() {
            buckets[i] += buckets[i - 1];
        }
        let mut order = vec![0; self.len.len()];
        for (state, &l) in self.len.iter().enumerate() {
            order[buckets[l]] = state;
            buckets[l] += 1;
        }
        order.retain(|&s| s != 0);
        order.reverse();
        order
    }

    /// Aggregates a value over the end-position set of every state.
    ///
    /// `leaf(e)` is the contribution of end position `e`; `join` must be
    /// associative and commutative with `zero` as identity.
    pub fn fold_endpos<T: Copy>(
        &self,
        leaf: impl Fn(usize) -> T,
        zero: T,
        join: impl Fn(T, T) -> T,
    ) -> Vec<T> {
        let mut acc: Vec<T> = (0..self.state_count())
            .map(|s| if self.primary[s] { leaf(self.first_end[s]) } else { zero })
            .collect();
        for s in self.by_len_desc() {
            let parent = self.link[s];
            acc[parent] = join(acc[parent], acc[s]);
        }
        acc
    }

    /// `counts[k]` is the number of distinct substrings of length `k`.
    pub fn distinct_counts_by_length(&self, text_len: usize) -> Vec<usize> {
        let mut diff = vec![0isize; text_len + 2];
        for s in 1..self.state_count() {
            diff[self.min_len(s)] += 1;
            diff[self.len[s] + 1] -= 1;
        }
        let mut counts = vec![0usize; text_len + 1];
        let mut running = 0isize;
        for (k, slot) in counts.iter_mut().enumerate() {
            running += diff[k];
            *slot = running as usize;
        }
        counts
    }

    /// Explicit end positions of every state, as bitmasks. Only for texts of
    /// at most 64 symbols.
    pub fn endpos_masks(&self) -> Vec<u64> {
        self.fold_endpos(|e| 1u64 << e, 0, |a, b| a | b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_match_window_enumeration() {
        for text in ["a", "ab", "abba", "abbabaab", "aaaa", "abababba"] {
            let sam = SuffixAutomaton::new(text.as_bytes());
            let counts = sam.distinct_counts_by_length(text.len());
            for k in 1..=text.len() {
                let set: HashSet<&[u8]> = text.as_bytes().windows(k).collect();
                assert_eq!(counts[k], set.len(), "{text} k={k}");
            }
        }
    }

    #[test]
    fn endpos_masks_list_every_occurrence() {
        let text = b"abbabaabbaababba";
        let sam = SuffixAutomaton::new(text);
        let masks = sam.endpos_masks();
        for s in 1..sam.state_count() {
            let e = sam.first_end[s];
            let l = sam.min_len(s);
            let pattern = &text[e + 1 - l..=e];
            let mut expected = 0u64;
            for (start, w) in text.windows(l).enumerate() {
                if w == pattern {
                    expected |= 1 << (start + l - 1);
                }
            }
            assert_eq!(masks[s], expected);
        }
    }
}
