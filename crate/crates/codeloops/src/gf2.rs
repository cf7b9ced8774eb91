//! Bit-packed linear algebra over GF(2).
//!
//! The whole crate uses the row-vector convention: vectors are rows, matrices
//! act on the right (`v -> v * M`), and row `i` of a matrix is the image of the
//! `i`-th basis vector. Coordinates are 1-based in the public API and map to
//! bit `i - 1` of a `u64`, so the encoding of a vector `u` is
//! `sum_i u_i * 2^(i-1)`.

use std::fmt;

use crate::{Error, Result};

/// Vector over GF(2) with `1 <= dim <= 64` coordinates, packed into one word.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVec {
    dim: usize,
    bits: u64,
}

impl BitVec {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=64).contains(&dim), "dim must be in 1..=64");
        BitVec { dim, bits: 0 }
    }

    /// Builds a vector from its packed encoding. Bits above `dim` must be clear.
    pub fn from_bits(dim: usize, bits: u64) -> Self {
        assert!((1..=64).contains(&dim), "dim must be in 1..=64");
        assert!(dim == 64 || bits < (1u64 << dim), "encoding out of range");
        BitVec { dim, bits }
    }

    /// The basis vector `e_i`, `i` 1-based.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!((1..=dim).contains(&i), "basis index out of range");
        Self::from_bits(dim, 1u64 << (i - 1))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Coordinate `i`, 1-based.
    pub fn get(&self, i: usize) -> bool {
        assert!((1..=self.dim).contains(&i));
        self.bits >> (i - 1) & 1 == 1
    }

    /// Copy with coordinate `i` set to `value`.
    pub fn with_bit(&self, i: usize, value: bool) -> Self {
        assert!((1..=self.dim).contains(&i));
        let mask = 1u64 << (i - 1);
        BitVec {
            dim: self.dim,
            bits: if value { self.bits | mask } else { self.bits & !mask },
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Coordinate-wise sum. Errors on dimension mismatch.
    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        Ok(BitVec { dim: self.dim, bits: self.bits ^ other.bits })
    }

    /// Coordinate-wise product (set intersection). Errors on dimension mismatch.
    pub fn intersect(&self, other: &BitVec) -> Result<BitVec> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        Ok(BitVec { dim: self.dim, bits: self.bits & other.bits })
    }

    /// Parses a 0/1 string, leftmost character = coordinate 1.
    pub fn parse01(text: &str) -> Result<BitVec> {
        let dim = text.len();
        if !(1..=64).contains(&dim) {
            return Err(Error::Parse(format!("vector length {dim} out of 1..=64")));
        }
        let mut bits = 0u64;
        for (k, ch) in text.chars().enumerate() {
            match ch {
                '1' => bits |= 1u64 << k,
                '0' => {}
                other => return Err(Error::Parse(format!("bad vector character {other:?}"))),
            }
        }
        Ok(BitVec { dim, bits })
    }
}

impl fmt::Display for BitVec {
    /// 0/1 string, leftmost character = coordinate 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

/// Square matrix over GF(2), one `u64` row per basis vector image.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMat {
    dim: usize,
    rows: Vec<u64>,
}

impl BitMat {
    pub fn identity(dim: usize) -> Self {
        assert!((1..=64).contains(&dim));
        BitMat { dim, rows: (0..dim).map(|i| 1u64 << i).collect() }
    }

    /// Builds a matrix from packed rows; row `k` (0-based) is the image of `e_(k+1)`.
    pub fn from_rows(dim: usize, rows: Vec<u64>) -> Self {
        assert!((1..=64).contains(&dim));
        assert_eq!(rows.len(), dim);
        if dim < 64 {
            let mask = (1u64 << dim) - 1;
            assert!(rows.iter().all(|r| r & !mask == 0), "row out of range");
        }
        BitMat { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Packed row `k`, 0-based.
    pub fn row(&self, k: usize) -> u64 {
        self.rows[k]
    }

    /// Entry in row `i`, column `j`, both 1-based.
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i - 1] >> (j - 1) & 1 == 1
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, &r)| r == 1u64 << i)
    }

    /// Right action on a packed row vector: `v * M`.
    pub fn apply(&self, v: u64) -> u64 {
        let mut out = 0u64;
        let mut rest = v;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            out ^= self.rows[i];
            rest &= rest - 1;
        }
        out
    }

    /// Matrix product `self * other`, so that `v * (self * other) = (v * self) * other`.
    pub fn mul(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.dim, other.dim);
        BitMat {
            dim: self.dim,
            rows: self.rows.iter().map(|&r| other.apply(r)).collect(),
        }
    }

    pub fn transpose(&self) -> BitMat {
        let mut rows = vec![0u64; self.dim];
        for (i, &r) in self.rows.iter().enumerate() {
            let mut rest = r;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rows[j] |= 1u64 << i;
                rest &= rest - 1;
            }
        }
        BitMat { dim: self.dim, rows }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.dim {
            let mask = 1u64 << col;
            if let Some(p) = (rank..rows.len()).find(|&r| rows[r] & mask != 0) {
                rows.swap(rank, p);
                for r in 0..rows.len() {
                    if r != rank && rows[r] & mask != 0 {
                        rows[r] ^= rows[rank];
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    /// Gauss-Jordan inverse. Errors on singular input.
    pub fn inverse(&self) -> Result<BitMat> {
        let d = self.dim;
        let mut left = self.rows.clone();
        let mut right: Vec<u64> = (0..d).map(|i| 1u64 << i).collect();
        for col in 0..d {
            let mask = 1u64 << col;
            let pivot = (col..d).find(|&r| left[r] & mask != 0).ok_or(Error::Singular)?;
            left.swap(col, pivot);
            right.swap(col, pivot);
            for r in 0..d {
                if r != col && left[r] & mask != 0 {
                    left[r] ^= left[col];
                    right[r] ^= right[col];
                }
            }
        }
        Ok(BitMat { dim: d, rows: right })
    }

    /// Packs a matrix with `dim <= 8` into one word, row `k` in byte `k`.
    pub fn pack8(&self) -> u64 {
        debug_assert!(self.dim <= 8);
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &r)| acc | (r << (8 * k)))
    }

    pub fn unpack8(dim: usize, packed: u64) -> BitMat {
        debug_assert!(dim <= 8);
        let rows = (0..dim).map(|k| (packed >> (8 * k)) & 0xff).collect();
        BitMat { dim, rows }
    }
}

impl fmt::Debug for BitMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMat[{}]", self.dim)?;
        for i in 1..=self.dim {
            for j in 1..=self.dim {
                write!(f, "{}", if self.get(i, j) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Bit row of arbitrary width, used for affine-system coefficients whose
/// variable count exceeds the 64-coordinate cap of [`BitVec`].
#[derive(Clone, PartialEq, Eq)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn zero(width: usize) -> Self {
        BitRow { words: vec![0; width.div_ceil(64)] }
    }

    pub fn get(&self, idx: usize) -> bool {
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        let mask = 1u64 << (idx % 64);
        if value {
            self.words[idx / 64] |= mask;
        } else {
            self.words[idx / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.words.len(), other.words.len());
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|k| k * 64 + self.words[k].trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }
}

/// Linear system `A x = b` over GF(2), rows appended one at a time.
pub struct AffineSystem {
    num_vars: usize,
    rows: Vec<(BitRow, bool)>,
}

impl AffineSystem {
    pub fn new(num_vars: usize) -> Self {
        AffineSystem { num_vars, rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn push(&mut self, coeffs: BitRow, rhs: bool) {
        debug_assert_eq!(coeffs.words.len(), self.num_vars.div_ceil(64));
        self.rows.push((coeffs, rhs));
    }

    /// Convenience: a row touching the listed variable indices.
    pub fn push_sparse(&mut self, vars: &[usize], rhs: bool) {
        let mut row = BitRow::zero(self.num_vars);
        for &v in vars {
            debug_assert!(v < self.num_vars);
            // A variable listed twice cancels, matching GF(2) addition.
            row.set(v, !row.get(v));
        }
        self.push(row, rhs);
    }
}

/// Incremental reduced row echelon form over GF(2).
///
/// Rows are kept fully reduced against each other, so once every desired row
/// has been absorbed a solution falls out by reading pivot rows directly.
pub struct Echelon {
    num_vars: usize,
    rows: Vec<(BitRow, bool)>,
    pivot_of_row: Vec<usize>,
    row_of_pivot: Vec<Option<u32>>,
}

impl Echelon {
    pub fn new(num_vars: usize) -> Self {
        Echelon {
            num_vars,
            rows: Vec::new(),
            pivot_of_row: Vec::new(),
            row_of_pivot: vec![None; num_vars],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Absorbs one row. Returns whether the rank grew; errors on `0 = 1`.
    pub fn add_row(&mut self, mut coeffs: BitRow, mut rhs: bool) -> Result<bool> {
        // Clear every pivot column appearing in the row, not only the leading
        // one. Stored rows are fully reduced, so each elimination removes one
        // pivot bit and toggles free columns only; one pass suffices.
        let pivot_hits: Vec<u32> =
            coeffs.ones().filter_map(|b| self.row_of_pivot[b]).collect();
        for r in pivot_hits {
            let (row, rr) = &self.rows[r as usize];
            coeffs.xor_assign(row);
            rhs ^= rr;
        }
        debug_assert!(coeffs.ones().all(|b| self.row_of_pivot[b].is_none()));
        let Some(lead) = coeffs.leading() else {
            return if rhs { Err(Error::Inconsistent) } else { Ok(false) };
        };
        // Back-reduce existing rows so the new pivot column is clean.
        for r in 0..self.rows.len() {
            if self.rows[r].0.get(lead) {
                self.rows[r].0.xor_assign(&coeffs);
                self.rows[r].1 ^= rhs;
            }
        }
        self.row_of_pivot[lead] = Some(self.rows.len() as u32);
        self.rows.push((coeffs, rhs));
        self.pivot_of_row.push(lead);
        Ok(true)
    }

    /// One solution of the absorbed system, free variables pinned to `pin`.
    pub fn solution(&self, pin: bool) -> BitRow {
        let mut x = BitRow::zero(self.num_vars);
        if pin {
            for v in 0..self.num_vars {
                if self.row_of_pivot[v].is_none() {
                    x.set(v, true);
                }
            }
        }
        for (r, (row, rhs)) in self.rows.iter().enumerate() {
            let pivot = self.pivot_of_row[r];
            let mut val = *rhs;
            if pin {
                // Rows are reduced, so every non-pivot set bit is a free variable.
                val ^= (row.ones().count() - 1) % 2 == 1;
            }
            x.set(pivot, val);
        }
        x
    }
}

/// Solves `A x = b`, returning one solution with free variables pinned to 0,
/// or `Error::Inconsistent`. Deterministic: variables are eliminated in
/// increasing index order, rows in insertion order.
pub fn solve_affine(sys: &AffineSystem) -> Result<BitRow> {
    let mut ech = Echelon::new(sys.num_vars);
    for (coeffs, rhs) in &sys.rows {
        ech.add_row(coeffs.clone(), *rhs)?;
    }
    Ok(ech.solution(false))
}

/// `|GL(d, 2)| = prod_(i=0..d-1) (2^d - 2^i)`.
pub fn gl_order(d: usize) -> u128 {
    assert!((1..=12).contains(&d));
    (0..d).map(|i| (1u128 << d) - (1u128 << i)).product()
}

/// Standard generators of `GL(d, 2)`: the d-cycle coordinate permutation, one
/// elementary transvection (`e_1 -> e_1 + e_2`), and their inverses (deduped;
/// the transvection is an involution).
pub fn gl_generators(d: usize) -> Vec<BitMat> {
    assert!((1..=12).contains(&d));
    if d == 1 {
        return vec![BitMat::identity(1)];
    }
    let cycle = BitMat::from_rows(d, (0..d).map(|i| 1u64 << ((i + 1) % d)).collect());
    let mut trans_rows: Vec<u64> = (0..d).map(|i| 1u64 << i).collect();
    trans_rows[0] = 0b11;
    let trans = BitMat::from_rows(d, trans_rows);
    let mut gens = vec![cycle.clone(), trans];
    let cycle_inv = cycle.inverse().expect("permutation matrix");
    if cycle_inv != cycle {
        gens.push(cycle_inv);
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weight_and_intersect() {
        let u = BitVec::parse01("1101").unwrap();
        let v = BitVec::parse01("0111").unwrap();
        assert_eq!(u.weight(), 3);
        assert_eq!(u.intersect(&v).unwrap().weight(), 2);
        assert_eq!(u.xor(&v).unwrap(), BitVec::parse01("1010").unwrap());
        assert!(u.xor(&BitVec::zero(5)).is_err());
    }

    #[test]
    fn basis_encoding() {
        assert_eq!(BitVec::basis(6, 1).bits(), 1);
        assert_eq!(BitVec::basis(6, 6).bits(), 32);
    }

    #[test]
    fn matrix_apply_follows_rows() {
        // Row i is the image of e_(i+1); applying to e_1 + e_2 sums rows 0 and 1.
        let m = BitMat::from_rows(3, vec![0b011, 0b100, 0b111]);
        assert_eq!(m.apply(0b011), 0b111);
        assert_eq!(m.apply(0), 0);
    }

    #[test]
    fn inverse_multiplies_to_identity() {
        let m = BitMat::from_rows(4, vec![0b0011, 0b0010, 0b1100, 0b0101]);
        match m.inverse() {
            Ok(inv) => {
                assert!(m.mul(&inv).is_identity());
                assert!(inv.mul(&m).is_identity());
            }
            Err(_) => assert!(m.rank() < 4),
        }
        let singular = BitMat::from_rows(3, vec![0b011, 0b011, 0b100]);
        assert!(matches!(singular.inverse(), Err(Error::Singular)));
    }

    /// All 65536 binary 4x4 matrices: exactly 20160 are invertible, and every
    /// inverse multiplies back to the identity on both sides.
    #[test]
    fn inverse_exhaustive_d4() {
        let mut invertible = 0u32;
        for bits in 0u64..65536 {
            let rows: Vec<u64> = (0..4).map(|i| (bits >> (4 * i)) & 0xf).collect();
            let m = BitMat::from_rows(4, rows);
            match m.inverse() {
                Ok(inv) => {
                    invertible += 1;
                    assert!(m.mul(&inv).is_identity());
                    assert!(inv.mul(&m).is_identity());
                }
                Err(_) => assert!(m.rank() < 4),
            }
        }
        assert_eq!(invertible as u128, gl_order(4));
    }

    #[test]
    fn product_is_composition_of_right_actions() {
        let a = BitMat::from_rows(3, vec![0b010, 0b100, 0b101]);
        let b = BitMat::from_rows(3, vec![0b110, 0b001, 0b010]);
        let ab = a.mul(&b);
        for v in 0..8u64 {
            assert_eq!(ab.apply(v), b.apply(a.apply(v)));
        }
    }

    #[test]
    fn solve_affine_empty_system_pins_to_zero() {
        let sys = AffineSystem::new(3);
        let x = solve_affine(&sys).unwrap();
        assert!(x.is_zero());
    }

    #[test]
    fn solve_affine_small_system() {
        // x1 = 1, x1 + x2 = 0  =>  (1, 1).
        let mut sys = AffineSystem::new(2);
        sys.push_sparse(&[0], true);
        sys.push_sparse(&[0, 1], false);
        let x = solve_affine(&sys).unwrap();
        assert!(x.get(0) && x.get(1));
    }

    #[test]
    fn solve_affine_detects_inconsistency() {
        let mut sys = AffineSystem::new(1);
        sys.push_sparse(&[0], false);
        sys.push_sparse(&[0], true);
        assert!(matches!(solve_affine(&sys), Err(Error::Inconsistent)));
    }

    #[test]
    fn echelon_pin_one_solution_satisfies_rows() {
        let mut sys = AffineSystem::new(5);
        sys.push_sparse(&[0, 2], true);
        sys.push_sparse(&[1, 2, 4], false);
        let mut ech = Echelon::new(5);
        for (c, r) in &sys.rows {
            ech.add_row(c.clone(), *r).unwrap();
        }
        for pin in [false, true] {
            let x = ech.solution(pin);
            for (c, r) in &sys.rows {
                let dot = c.ones().filter(|&v| x.get(v)).count() % 2 == 1;
                assert_eq!(dot, *r);
            }
        }
    }

    #[test]
    fn gl_order_values() {
        assert_eq!(gl_order(3), 168);
        assert_eq!(gl_order(4), 20160);
        assert_eq!(gl_order(6), 20158709760);
    }

    #[test]
    fn gl_generators_are_invertible() {
        for d in 1..=8 {
            for g in gl_generators(d) {
                assert!(g.inverse().is_ok());
            }
        }
    }

    #[test]
    fn pack8_round_trip() {
        let m = BitMat::from_rows(5, vec![3, 17, 9, 30, 1]);
        assert_eq!(BitMat::unpack8(5, m.pack8()), m);
    }

    proptest! {
        #[test]
        fn weight_identity(a in any::<u64>(), b in any::<u64>()) {
            let u = BitVec::from_bits(64, a);
            let v = BitVec::from_bits(64, b);
            let lhs = u.xor(&v).unwrap().weight() + 2 * u.intersect(&v).unwrap().weight();
            prop_assert_eq!(lhs, u.weight() + v.weight());
        }

        #[test]
        fn transpose_involution(rows in proptest::collection::vec(0u64..256, 8)) {
            let m = BitMat::from_rows(8, rows);
            prop_assert_eq!(m.transpose().transpose(), m);
        }
    }
}
