//! Squaring maps, combinatorial polarization, and parameter vectors.
//!
//! A squaring map is a function `f: F_2^d -> F_2` with `f(0) = 0`, stored as a
//! `2^d`-bit truth table indexed by vector encoding. Its m-th derived form is
//!
//! ```text
//! f_m(v_1, ..., v_m) = sum over nonempty I subset {1..m} of f(sum_{i in I} v_i)
//! ```
//!
//! (signs drop mod 2). `f_2` is the commutator bilinear-ish form, `f_3` the
//! associator trilinear form, and squaring maps of code loops are exactly those
//! with `f_4 = 0`. Such an `f` is determined by its parameter vector: the bits
//! `omega_i = f(e_i)`, `omega_ij = f_2(e_i, e_j)`, `omega_ijk = f_3(e_i, e_j, e_k)`,
//! and the reconstruction is polynomial:
//!
//! ```text
//! f(x)      = sum x_i omega_i + sum_{i<j} x_i x_j omega_ij + sum_{i<j<k} x_i x_j x_k omega_ijk
//! f_2(x, y) = sum_{i<j} (x_i y_j + x_j y_i) omega_ij
//!           + sum_{i<j<k} (x_i x_j y_k + x_i x_k y_j + x_j x_k y_i
//!                        + x_i y_j y_k + x_j y_i y_k + x_k y_i y_j) omega_ijk
//! f_3(x, y, z) = sum_{i<j<k} (all six x_a y_b z_c over {i,j,k}) omega_ijk
//! ```

use std::fmt;

use crate::subsets::SubsetTables;
use crate::{Error, Result};

#[inline]
fn bit(x: u64, i: usize) -> u64 {
    x >> (i - 1) & 1
}

/// Truth table of a map `F_2^d -> F_2`, `d <= 12`.
#[derive(Clone, PartialEq, Eq)]
pub struct SquareMap {
    dim: usize,
    table: Vec<u64>,
}

impl SquareMap {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=12).contains(&dim));
        SquareMap { dim, table: vec![0; (1usize << dim).div_ceil(64)] }
    }

    pub fn from_fn(dim: usize, f: impl Fn(u64) -> bool) -> Self {
        let mut map = Self::zero(dim);
        for x in 0..1u64 << dim {
            if f(x) {
                map.set(x, true);
            }
        }
        map
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, x: u64) -> bool {
        debug_assert!(x < 1u64 << self.dim);
        self.table[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    pub fn set(&mut self, x: u64, value: bool) {
        debug_assert!(x < 1u64 << self.dim);
        let mask = 1u64 << (x % 64);
        if value {
            self.table[(x / 64) as usize] |= mask;
        } else {
            self.table[(x / 64) as usize] &= !mask;
        }
    }

    /// Pointwise transform `f -> f(v * T)` for an arbitrary matrix `T`.
    pub fn compose(&self, t: &crate::gf2::BitMat) -> SquareMap {
        assert_eq!(t.dim(), self.dim);
        SquareMap::from_fn(self.dim, |v| self.get(t.apply(v)))
    }
}

/// m-th derived form of `f` at `vs` (with `m = vs.len()`), by direct
/// evaluation of the inclusion-exclusion sum over nonempty subsets.
pub fn derived_form(f: &SquareMap, vs: &[u64]) -> bool {
    let m = vs.len();
    assert!(m >= 1, "derived form needs at least one argument");
    let mut acc = false;
    for mask in 1u32..1u32 << m {
        let mut sum = 0u64;
        let mut rest = mask;
        while rest != 0 {
            sum ^= vs[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        acc ^= f.get(sum);
    }
    acc
}

/// Parameter vector: one bit per subset of `{1..d}` of size 1, 2 or 3, in
/// size-then-lexicographic order. Supports `d <= 12`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamVector {
    dim: usize,
    w1: u64,
    w2: u128,
    w3: [u64; 4],
}

impl ParamVector {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=12).contains(&dim));
        ParamVector { dim, w1: 0, w2: 0, w3: [0; 4] }
    }

    /// Assembles a vector from packed components (`d <= 8`, each in one word).
    pub fn from_parts(dim: usize, w1: u64, w2: u64, w3: u64) -> Self {
        assert!((1..=8).contains(&dim));
        let t = SubsetTables::get(dim);
        debug_assert!(dim == 64 || w1 < 1u64 << dim);
        debug_assert!(t.pair_count() == 64 || w2 < 1u64 << t.pair_count());
        debug_assert!(t.triple_count() == 64 || w3 < 1u64 << t.triple_count());
        ParamVector { dim, w1, w2: w2 as u128, w3: [w3, 0, 0, 0] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Packed singles component.
    pub fn part1(&self) -> u64 {
        self.w1
    }

    /// Packed pairs component (`d <= 8`).
    pub fn part2(&self) -> u64 {
        debug_assert!(self.dim <= 8);
        self.w2 as u64
    }

    /// Packed triples component (`d <= 8`).
    pub fn part3(&self) -> u64 {
        debug_assert!(self.dim <= 8);
        self.w3[0]
    }

    pub fn get1(&self, i: usize) -> bool {
        debug_assert!((1..=self.dim).contains(&i));
        self.w1 >> (i - 1) & 1 == 1
    }

    pub fn get2(&self, i: usize, j: usize) -> bool {
        self.w2 >> SubsetTables::get(self.dim).pair(i, j) & 1 == 1
    }

    pub fn get3(&self, i: usize, j: usize, k: usize) -> bool {
        let idx = SubsetTables::get(self.dim).triple(i, j, k);
        self.w3[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn set1(&mut self, i: usize, value: bool) {
        debug_assert!((1..=self.dim).contains(&i));
        let mask = 1u64 << (i - 1);
        if value { self.w1 |= mask } else { self.w1 &= !mask }
    }

    pub fn set2(&mut self, i: usize, j: usize, value: bool) {
        let mask = 1u128 << SubsetTables::get(self.dim).pair(i, j);
        if value { self.w2 |= mask } else { self.w2 &= !mask }
    }

    pub fn set3(&mut self, i: usize, j: usize, k: usize, value: bool) {
        let idx = SubsetTables::get(self.dim).triple(i, j, k);
        let mask = 1u64 << (idx % 64);
        if value { self.w3[idx / 64] |= mask } else { self.w3[idx / 64] &= !mask }
    }

    pub fn is_zero(&self) -> bool {
        self.w1 == 0 && self.w2 == 0 && self.w3 == [0; 4]
    }

    /// The associator part as a form.
    pub fn triform(&self) -> TriForm {
        assert!(self.dim <= 10, "form type caps at d = 10");
        TriForm { dim: self.dim, bits: self.w3[0] as u128 | (self.w3[1] as u128) << 64 }
    }

    pub fn with_triform(mut self, a: &TriForm) -> Self {
        assert_eq!(self.dim, a.dim);
        self.w3 = [a.bits as u64, (a.bits >> 64) as u64, 0, 0];
        self
    }

    /// Full encoding as one integer, `d <= 8` (at most 92 bits).
    pub fn encode(&self) -> u128 {
        assert!(self.dim <= 8);
        let t = SubsetTables::get(self.dim);
        self.w1 as u128
            | self.w2 << self.dim
            | (self.w3[0] as u128) << (self.dim + t.pair_count())
    }

    /// Evaluates the reconstructed squaring map at one point.
    pub fn eval(&self, x: u64) -> bool {
        let t = SubsetTables::get(self.dim);
        let mut acc = (self.w1 & x).count_ones();
        acc += (self.w2 & t.pair_mask(x)).count_ones();
        let tm = t.triple_mask(x);
        for w in 0..4 {
            acc += (self.w3[w] & tm[w]).count_ones();
        }
        acc & 1 == 1
    }

    /// Iterates the set triples as 1-based `(i, j, k)`.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let t = SubsetTables::get(self.dim);
        (0..4).flat_map(move |w| {
            let mut rest = self.w3[w];
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(t.triple_at(w * 64 + b))
                }
            })
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let t = SubsetTables::get(self.dim);
        let mut rest = self.w2;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(t.pair_at(b))
            }
        })
    }

    pub fn singles(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.w1;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(b + 1)
            }
        })
    }
}

impl fmt::Debug for ParamVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "omega[")?;
        let mut first = true;
        for i in self.singles() {
            if !first { write!(f, " ")? } else { first = false }
            write!(f, "{i}")?;
        }
        for (i, j) in self.pairs() {
            if !first { write!(f, " ")? } else { first = false }
            write!(f, "{i}{j}")?;
        }
        for (i, j, k) in self.triples() {
            if !first { write!(f, " ")? } else { first = false }
            write!(f, "{i}{j}{k}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, "]")
    }
}

/// Evaluates the second derived form from parameters.
pub fn eval_f2(omega: &ParamVector, x: u64, y: u64) -> bool {
    let mut acc = 0u64;
    for (i, j) in omega.pairs() {
        acc ^= bit(x, i) & bit(y, j);
        acc ^= bit(x, j) & bit(y, i);
    }
    for (i, j, k) in omega.triples() {
        acc ^= bit(x, i) & bit(x, j) & bit(y, k);
        acc ^= bit(x, i) & bit(x, k) & bit(y, j);
        acc ^= bit(x, j) & bit(x, k) & bit(y, i);
        acc ^= bit(x, i) & bit(y, j) & bit(y, k);
        acc ^= bit(x, j) & bit(y, i) & bit(y, k);
        acc ^= bit(x, k) & bit(y, i) & bit(y, j);
    }
    acc == 1
}

/// Evaluates the third derived form (trilinear) from parameters.
pub fn eval_f3(omega: &ParamVector, x: u64, y: u64, z: u64) -> bool {
    let mut acc = 0u64;
    for (i, j, k) in omega.triples() {
        acc ^= bit(x, i) & bit(y, j) & bit(z, k);
        acc ^= bit(x, i) & bit(y, k) & bit(z, j);
        acc ^= bit(x, j) & bit(y, i) & bit(z, k);
        acc ^= bit(x, j) & bit(y, k) & bit(z, i);
        acc ^= bit(x, k) & bit(y, i) & bit(z, j);
        acc ^= bit(x, k) & bit(y, j) & bit(z, i);
    }
    acc == 1
}

/// Rebuilds the truth table of the squaring map a parameter vector encodes.
pub fn map_from_params(omega: &ParamVector) -> SquareMap {
    let mut map = SquareMap::zero(omega.dim());
    for x in 0..1u64 << omega.dim() {
        if omega.eval(x) {
            map.set(x, true);
        }
    }
    map
}

/// Reads parameters off a map by evaluating derived forms on basis tuples.
/// Does not check `f_4 = 0`; use [`params_from_map`] for the checked version.
fn params_raw(f: &SquareMap) -> ParamVector {
    let d = f.dim();
    let mut omega = ParamVector::zero(d);
    for i in 1..=d {
        omega.set1(i, f.get(1 << (i - 1)));
    }
    for i in 1..=d {
        for j in i + 1..=d {
            omega.set2(i, j, derived_form(f, &[1 << (i - 1), 1 << (j - 1)]));
        }
    }
    for i in 1..=d {
        for j in i + 1..=d {
            for k in j + 1..=d {
                let vs = [1 << (i - 1), 1 << (j - 1), 1 << (k - 1)];
                omega.set3(i, j, k, derived_form(f, &vs));
            }
        }
    }
    omega
}

/// True iff the fourth derived form of `f` vanishes identically.
///
/// Exact at every dimension: `f_4 = 0` holds iff `f(0) = 0` and `f` equals the
/// polynomial reconstruction from its own basis parameters, which is a `2^d`
/// table comparison rather than a `2^(4d)` quadruple sweep.
pub fn check_f4_zero(f: &SquareMap) -> bool {
    f.get(0) == false && map_from_params(&params_raw(f)) == *f
}

/// Spot-check that `f_4` vanishes by direct quadruple evaluation: all basis
/// quadruples plus `samples` seeded random quadruples. Probabilistic
/// counterpart of [`check_f4_zero`], kept as an independent test route.
pub fn f4_vanishes_sampled(f: &SquareMap, seed: u64, samples: usize) -> bool {
    use rand::{Rng, SeedableRng};
    let d = f.dim();
    for i in 1..=d {
        for j in 1..=d {
            for k in 1..=d {
                for l in 1..=d {
                    let vs = [1u64 << (i - 1), 1 << (j - 1), 1 << (k - 1), 1 << (l - 1)];
                    if derived_form(f, &vs) {
                        return false;
                    }
                }
            }
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mask = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
    for _ in 0..samples {
        let vs = [
            rng.gen::<u64>() & mask,
            rng.gen::<u64>() & mask,
            rng.gen::<u64>() & mask,
            rng.gen::<u64>() & mask,
        ];
        if derived_form(f, &vs) {
            return false;
        }
    }
    true
}

/// Reads the parameter vector of a squaring map. Errors with
/// [`Error::F4NotZero`] when the map is not a code-loop squaring map.
pub fn params_from_map(f: &SquareMap) -> Result<ParamVector> {
    if f.get(0) {
        return Err(Error::F4NotZero);
    }
    let omega = params_raw(f);
    if map_from_params(&omega) != *f {
        return Err(Error::F4NotZero);
    }
    Ok(omega)
}

/// Trilinear alternating form given by its triple coordinates, `d <= 10`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TriForm {
    dim: usize,
    bits: u128,
}

impl TriForm {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=10).contains(&dim));
        TriForm { dim, bits: 0 }
    }

    pub fn from_bits(dim: usize, bits: u128) -> Self {
        assert!((1..=10).contains(&dim));
        let count = SubsetTables::get(dim).triple_count();
        assert!(count == 128 || bits < 1u128 << count);
        TriForm { dim, bits }
    }

    /// Packed coordinates as one word (`d <= 8`).
    pub fn word(&self) -> u64 {
        debug_assert!(self.dim <= 8);
        self.bits as u64
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.bits >> SubsetTables::get(self.dim).triple(i, j, k) & 1 == 1
    }

    /// Embeds into a parameter vector with zero squaring and commutator parts.
    pub fn lift(&self) -> ParamVector {
        let mut omega = ParamVector::zero(self.dim);
        omega.w3 = [self.bits as u64, (self.bits >> 64) as u64, 0, 0];
        omega
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let t = SubsetTables::get(self.dim);
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(t.triple_at(b))
            }
        })
    }
}

impl fmt::Debug for TriForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TriForm({})", format_form(self))
    }
}

/// Parses compact form notation: `"0"` for the zero form, otherwise
/// `'+'`-separated triples of strictly increasing digits, e.g. `"123+345"`.
/// Digits are 1-based coordinates, so the grammar caps at `d <= 9`.
pub fn parse_form(text: &str, dim: usize) -> Result<TriForm> {
    assert!((1..=9).contains(&dim), "form notation supports d <= 9");
    if text == "0" {
        return Ok(TriForm::zero(dim));
    }
    let tables = SubsetTables::get(dim);
    let mut bits = 0u128;
    for token in text.split('+') {
        let digits: Vec<usize> = token
            .chars()
            .map(|c| c.to_digit(10).map(|v| v as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::FormParse(format!("malformed token {token:?}")))?;
        if digits.len() != 3 {
            return Err(Error::FormParse(format!("malformed token {token:?}: need 3 digits")));
        }
        let (i, j, k) = (digits[0], digits[1], digits[2]);
        if i == 0 || k > dim {
            return Err(Error::FormParse(format!("token {token:?}: digit out of range 1..={dim}")));
        }
        if !(i < j && j < k) {
            return Err(Error::FormParse(format!("token {token:?}: digits must strictly increase")));
        }
        let mask = 1u128 << tables.triple(i, j, k);
        if bits & mask != 0 {
            return Err(Error::FormParse(format!("duplicate token {token:?}")));
        }
        bits |= mask;
    }
    Ok(TriForm { dim, bits })
}

/// Formats a form in compact notation with tokens in lexicographic order.
pub fn format_form(a: &TriForm) -> String {
    if a.is_zero() {
        return "0".to_string();
    }
    a.triples()
        .map(|(i, j, k)| format!("{i}{j}{k}"))
        .collect::<Vec<_>>()
        .join("+")
}
