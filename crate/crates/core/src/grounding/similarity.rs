//! Character similarity by recursive longest-common-substring decomposition.
//!
//! `matching_chars(a, b)` finds the longest common substring of `a` and `b`
//! (earliest in `a`, then earliest in `b` on ties), counts its length, and
//! repeats on the pieces to its left and to its right. The similarity ratio
//! is `2 * M / (len(a) + len(b))`.

use alloc::vec;
use alloc::vec::Vec;

/// Longest common substring of `a[alo..ahi]` and `b[blo..bhi]` as
/// `(start_in_a, start_in_b, len)`.
fn longest_match(a: &[char], b: &[char], alo: usize, ahi: usize, blo: usize, bhi: usize) -> (usize, usize, usize) {
    let width = bhi - blo;
    let mut prev = vec![0usize; width + 1];
    let mut cur = vec![0usize; width + 1];
    let (mut best_i, mut best_j, mut best_k) = (alo, blo, 0);
    for i in alo..ahi {
        for j in blo..bhi {
            let col = j - blo + 1;
            if a[i] == b[j] {
                let k = prev[col - 1] + 1;
                cur[col] = k;
                // scanning end positions in order, so a strictly longer run is
                // the only way to replace an earlier start
                if k > best_k {
                    best_k = k;
                    best_i = i + 1 - k;
                    best_j = j + 1 - k;
                }
            } else {
                cur[col] = 0;
            }
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    (best_i, best_j, best_k)
}

/// Total length of the matching blocks.
pub fn matching_chars(a: &[char], b: &[char]) -> usize {
    let mut total = 0;
    let mut stack: Vec<(usize, usize, usize, usize)> = vec![(0, a.len(), 0, b.len())];
    while let Some((alo, ahi, blo, bhi)) = stack.pop() {
        if alo >= ahi || blo >= bhi {
            continue;
        }
        let (i, j, k) = longest_match(a, b, alo, ahi, blo, bhi);
        if k == 0 {
            continue;
        }
        total += k;
        stack.push((alo, i, blo, j));
        stack.push((i + k, ahi, j + k, bhi));
    }
    total
}

/// Similarity as an exact fraction `2M / (len_a + len_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub numerator: usize,
    pub denominator: usize,
}

impl Ratio {
    pub fn value(self) -> f64 {
        if self.denominator == 0 {
            1.0
        } else {
            self.numerator as f64 / self.denominator as f64
        }
    }

    /// Exact comparison by cross multiplication.
    pub fn cmp_exact(self, other: Ratio) -> core::cmp::Ordering {
        let lhs = self.numerator as u128 * other.denominator.max(1) as u128;
        let rhs = other.numerator as u128 * self.denominator.max(1) as u128;
        lhs.cmp(&rhs)
    }
}

pub fn ratio(a: &[char], b: &[char]) -> Ratio {
    Ratio {
        numerator: 2 * matching_chars(a, b),
        denominator: a.len() + b.len(),
    }
}
