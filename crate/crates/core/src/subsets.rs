//! Lexicographic enumeration of fixed-size subsets of an index pool.

use crate::graph::VertexSet;

/// Iterator over all `k`-element subsets of `pool`, in lexicographic
/// order of the chosen positions. `pool` is expected to be sorted when
/// lexicographic order over vertex indices matters.
pub(crate) struct Combinations<'a> {
    pool: &'a [usize],
    positions: Vec<usize>,
    exhausted: bool,
}

pub(crate) fn combinations(pool: &[usize], k: usize) -> Combinations<'_> {
    Combinations {
        pool,
        positions: (0..k).collect(),
        exhausted: k > pool.len(),
    }
}

impl Iterator for Combinations<'_> {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        if self.exhausted {
            return None;
        }
        let item: VertexSet = self.positions.iter().map(|&i| self.pool[i]).collect();
        // Advance to the next combination.
        let k = self.positions.len();
        let n = self.pool.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.exhausted = true;
                break;
            }
            i -= 1;
            if self.positions[i] + (k - i) < n {
                self.positions[i] += 1;
                for j in (i + 1)..k {
                    self.positions[j] = self.positions[j - 1] + 1;
                }
                break;
            }
        }
        Some(item)
    }
}
