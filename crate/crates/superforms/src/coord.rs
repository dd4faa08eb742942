//! Chart dimensions, coordinate labels and odd-index-set combinatorics.

use serde::{Deserialize, Serialize};

/// Dimension `p|q` of the chart: `p` even coordinates `z_i`, `q` odd
/// coordinates `th_a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub p: usize,
    pub q: usize,
}

impl Dims {
    pub fn new(p: usize, q: usize) -> Self {
        Dims { p, q }
    }

    /// All coordinates, even ones first.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.p)
            .map(Var::Z)
            .chain((0..self.q).map(Var::Theta))
    }
}

/// A coordinate of the chart; indices are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Z(usize),
    Theta(usize),
}

impl Var {
    /// `true` for odd coordinates.
    pub fn is_odd(&self) -> bool {
        matches!(self, Var::Theta(_))
    }
}

/// Subsets of odd indices are stored as bitmasks (ascending index order).
pub type OddSet = u16;

/// Number of elements of `set` strictly below `i`.
pub fn bits_below(set: OddSet, i: usize) -> u32 {
    (set & ((1u16 << i) - 1)).count_ones()
}

/// Number of elements of `set` strictly above `i`.
pub fn bits_above(set: OddSet, i: usize) -> u32 {
    (set >> i >> 1).count_ones()
}

pub fn set_contains(set: OddSet, i: usize) -> bool {
    set & (1 << i) != 0
}

pub fn set_len(set: OddSet) -> u32 {
    set.count_ones()
}

pub fn set_iter(set: OddSet) -> impl Iterator<Item = usize> {
    (0..16).filter(move |i| set & (1 << i) != 0)
}

/// Merges two ascending odd words, `a` to the left of `b`. Returns the merged
/// set and whether the Koszul reordering sign is negative; `None` on overlap.
pub fn merge_sets(a: OddSet, b: OddSet) -> Option<(OddSet, bool)> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    for i in set_iter(a) {
        inversions += bits_below(b, i);
    }
    Some((a | b, inversions % 2 == 1))
}

/// Inserts index `i` coming from the left of the word `set`.
pub fn insert_from_left(set: OddSet, i: usize) -> Option<(OddSet, bool)> {
    if set_contains(set, i) {
        return None;
    }
    Some((set | (1 << i), bits_below(set, i) % 2 == 1))
}

/// Inserts index `i` coming from the right of the word `set`.
pub fn insert_from_right(set: OddSet, i: usize) -> Option<(OddSet, bool)> {
    if set_contains(set, i) {
        return None;
    }
    Some((set | (1 << i), bits_above(set, i) % 2 == 1))
}

/// Removes index `i` by a left derivative; the sign counts the factors passed.
pub fn remove_from_left(set: OddSet, i: usize) -> Option<(OddSet, bool)> {
    if !set_contains(set, i) {
        return None;
    }
    Some((set & !(1 << i), bits_below(set, i) % 2 == 1))
}

/// Removes index `i` from the right end of the word.
pub fn remove_from_right(set: OddSet, i: usize) -> Option<(OddSet, bool)> {
    if !set_contains(set, i) {
        return None;
    }
    Some((set & !(1 << i), bits_above(set, i) % 2 == 1))
}

/// All exponent vectors of the given length with entry sum at most `max`.
pub fn bounded_exps(len: usize, max: u32) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; len];
    fn rec(cur: &mut Vec<u8>, pos: usize, left: u32, out: &mut Vec<Vec<u8>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[pos] = e as u8;
            rec(cur, pos + 1, left - e, out);
        }
        cur[pos] = 0;
    }
    rec(&mut cur, 0, max, &mut out);
    out
}

/// All subsets of `{0..n}` as bitmasks.
pub fn all_subsets(n: usize) -> Vec<OddSet> {
    (0..(1u32 << n)).map(|m| m as OddSet).collect()
}
