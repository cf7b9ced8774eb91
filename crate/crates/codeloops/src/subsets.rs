//! Index tables for the pair and triple coordinates of parameter space.
//!
//! Parameter vectors carry one bit per nonempty subset of `{1..d}` of size at
//! most three, ordered by size and then lexicographically. Pairs `(i, j)` with
//! `i < j` and triples `(i, j, k)` with `i < j < k` get dense 0-based indices
//! in that lexicographic order; every module shares these tables.

use std::sync::OnceLock;

pub const MAX_DIM: usize = 12;

#[derive(Debug)]
pub struct SubsetTables {
    dim: usize,
    pairs: Vec<(usize, usize)>,
    triples: Vec<(usize, usize, usize)>,
    pair_idx: [[u16; MAX_DIM + 1]; MAX_DIM + 1],
    triple_idx: Vec<u16>,
}

impl SubsetTables {
    fn new(dim: usize) -> Self {
        assert!(dim <= MAX_DIM);
        let mut pairs = Vec::new();
        let mut pair_idx = [[u16::MAX; MAX_DIM + 1]; MAX_DIM + 1];
        for i in 1..=dim {
            for j in i + 1..=dim {
                pair_idx[i][j] = pairs.len() as u16;
                pairs.push((i, j));
            }
        }
        let side = MAX_DIM + 1;
        let mut triples = Vec::new();
        let mut triple_idx = vec![u16::MAX; side * side * side];
        for i in 1..=dim {
            for j in i + 1..=dim {
                for k in j + 1..=dim {
                    triple_idx[(i * side + j) * side + k] = triples.len() as u16;
                    triples.push((i, j, k));
                }
            }
        }
        SubsetTables { dim, pairs, triples, pair_idx, triple_idx }
    }

    /// Shared table for `dim`, built on first use.
    pub fn get(dim: usize) -> &'static SubsetTables {
        static TABLES: OnceLock<Vec<SubsetTables>> = OnceLock::new();
        let all = TABLES.get_or_init(|| (0..=MAX_DIM).map(SubsetTables::new).collect());
        &all[dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    /// Dense index of pair `(i, j)`, `1 <= i < j <= dim`.
    pub fn pair(&self, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i < j && j <= self.dim);
        self.pair_idx[i][j] as usize
    }

    /// Dense index of triple `(i, j, k)`, `1 <= i < j < k <= dim`.
    pub fn triple(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(1 <= i && i < j && j < k && k <= self.dim);
        let side = MAX_DIM + 1;
        self.triple_idx[(i * side + j) * side + k] as usize
    }

    pub fn pair_at(&self, idx: usize) -> (usize, usize) {
        self.pairs[idx]
    }

    pub fn triple_at(&self, idx: usize) -> (usize, usize, usize) {
        self.triples[idx]
    }

    /// Mask over pair indices of all pairs contained in the support of `x`.
    pub fn pair_mask(&self, x: u64) -> u128 {
        let mut out = 0u128;
        let mut rest = x;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize + 1;
            rest &= rest - 1;
            let mut rest2 = rest;
            while rest2 != 0 {
                let j = rest2.trailing_zeros() as usize + 1;
                rest2 &= rest2 - 1;
                out |= 1u128 << self.pair(i, j);
            }
        }
        out
    }

    /// Mask over triple indices of all triples contained in the support of `x`.
    pub fn triple_mask(&self, x: u64) -> [u64; 4] {
        let mut out = [0u64; 4];
        let mut rest = x;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize + 1;
            rest &= rest - 1;
            let mut rest2 = rest;
            while rest2 != 0 {
                let j = rest2.trailing_zeros() as usize + 1;
                rest2 &= rest2 - 1;
                let mut rest3 = rest2;
                while rest3 != 0 {
                    let k = rest3.trailing_zeros() as usize + 1;
                    rest3 &= rest3 - 1;
                    let t = self.triple(i, j, k);
                    out[t / 64] |= 1u64 << (t % 64);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let t = SubsetTables::get(8);
        assert_eq!(t.pair_count(), 28);
        assert_eq!(t.triple_count(), 56);
        let t = SubsetTables::get(12);
        assert_eq!(t.pair_count(), 66);
        assert_eq!(t.triple_count(), 220);
        assert_eq!(SubsetTables::get(2).triple_count(), 0);
        assert_eq!(SubsetTables::get(1).pair_count(), 0);
    }

    #[test]
    fn lexicographic_order() {
        let t = SubsetTables::get(4);
        assert_eq!(t.pair(1, 2), 0);
        assert_eq!(t.pair(1, 3), 1);
        assert_eq!(t.pair(3, 4), 5);
        assert_eq!(t.triple(1, 2, 3), 0);
        assert_eq!(t.triple(1, 2, 4), 1);
        assert_eq!(t.triple(1, 3, 4), 2);
        assert_eq!(t.triple(2, 3, 4), 3);
        assert_eq!(t.pair_at(5), (3, 4));
        assert_eq!(t.triple_at(3), (2, 3, 4));
    }

    #[test]
    fn masks_match_direct_enumeration() {
        let t = SubsetTables::get(6);
        let x = 0b101101u64; // {1, 3, 4, 6}
        let pm = t.pair_mask(x);
        for idx in 0..t.pair_count() {
            let (i, j) = t.pair_at(idx);
            let inside = x >> (i - 1) & 1 == 1 && x >> (j - 1) & 1 == 1;
            assert_eq!(pm >> idx & 1 == 1, inside);
        }
        let tm = t.triple_mask(x);
        for idx in 0..t.triple_count() {
            let (i, j, k) = t.triple_at(idx);
            let inside = [i, j, k].iter().all(|&b| x >> (b - 1) & 1 == 1);
            assert_eq!(tm[idx / 64] >> (idx % 64) & 1 == 1, inside);
        }
    }
}
