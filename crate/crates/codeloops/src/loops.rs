//! Loop materialization: factor sets from parameter vectors, multiplication
//! tables of the resulting central extensions, Moufang and associativity
//! verification, parameter extraction, and doubly even binary codes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::gf2::{BitRow, Echelon};
use crate::polar::{eval_f2, eval_f3, ParamVector};
use crate::{Error, Result};

/// Factor set of a central extension: a `2^d x 2^d` bit table with
/// `theta(0, u) = theta(u, 0) = 0`. Loop elements are encoded as
/// `(a, u) -> a * 2^d + enc(u)`, making `0` the identity and `2^d` the
/// designated central element.
#[derive(Clone)]
pub struct FactorSet {
    dim: usize,
    row_words: usize,
    bits: Vec<u64>,
}

impl FactorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Loop order `2^(d+1)`.
    pub fn order(&self) -> usize {
        2 << self.dim
    }

    pub fn theta(&self, u: u64, v: u64) -> bool {
        debug_assert!(u < 1 << self.dim && v < 1 << self.dim);
        let idx = u as usize * self.row_words + v as usize / 64;
        self.bits[idx] >> (v % 64) & 1 == 1
    }

    /// Product of two encoded elements in the extension:
    /// `(a, u)(b, v) = (a + b + theta(u, v), u + v)`.
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        let mask = (1u64 << self.dim) - 1;
        let (a, u) = (x >> self.dim & 1, x & mask);
        let (b, v) = (y >> self.dim & 1, y & mask);
        (a ^ b ^ self.theta(u, v) as u64) << self.dim | (u ^ v)
    }

    fn set_theta(&mut self, u: u64, v: u64, value: bool) {
        let idx = u as usize * self.row_words + v as usize / 64;
        let mask = 1u64 << (v % 64);
        if value {
            self.bits[idx] |= mask;
        } else {
            self.bits[idx] &= !mask;
        }
    }

    fn zero(dim: usize) -> Self {
        assert!((1..=12).contains(&dim), "factor sets support d <= 12");
        let n = 1usize << dim;
        let row_words = n.div_ceil(64);
        FactorSet { dim, row_words, bits: vec![0; n * row_words] }
    }

    /// Closed-form factor set of a parameter vector, valid in every dimension:
    ///
    /// ```text
    /// theta(x, y) = sum_i w_i x_i y_i
    ///             + sum_(i<j) w_ij x_i y_j
    ///             + sum_(i<j<k) w_ijk (x_i x_j y_k + x_i x_k y_j + x_j x_k y_i)
    /// ```
    ///
    /// The diagonal recovers the squaring polynomial, the symmetrization
    /// recovers its second derived form, and the cocycle sum telescopes to the
    /// third, so all three defining constraints hold identically.
    pub fn closed_form(omega: &ParamVector) -> Self {
        let dim = omega.dim();
        let mut out = Self::zero(dim);
        let n = 1usize << dim;

        let singles: Vec<usize> = (1..=dim).filter(|&i| omega.get1(i)).collect();
        let mut pairs = Vec::new();
        let mut triples = Vec::new();
        for i in 1..=dim {
            for j in i + 1..=dim {
                if omega.get2(i, j) {
                    pairs.push((i, j));
                }
                for k in j + 1..=dim {
                    if omega.get3(i, j, k) {
                        triples.push((i, j, k));
                    }
                }
            }
        }

        // Column masks: mask c marks the v with bit c set.
        let mut coord_masks = vec![vec![0u64; out.row_words]; dim];
        for v in 0..n {
            for (c, mask) in coord_masks.iter_mut().enumerate() {
                if v >> c & 1 == 1 {
                    mask[v / 64] |= 1 << (v % 64);
                }
            }
        }

        for u in 0..n as u64 {
            let bit = |c: usize| u >> (c - 1) & 1 == 1;
            // Coefficient of v_c in theta(u, .), one bit per coordinate.
            let mut coeff = 0u64;
            for &i in &singles {
                if bit(i) {
                    coeff ^= 1 << (i - 1);
                }
            }
            for &(i, j) in &pairs {
                if bit(i) {
                    coeff ^= 1 << (j - 1);
                }
            }
            for &(i, j, k) in &triples {
                if bit(i) && bit(j) {
                    coeff ^= 1 << (k - 1);
                }
                if bit(i) && bit(k) {
                    coeff ^= 1 << (j - 1);
                }
                if bit(j) && bit(k) {
                    coeff ^= 1 << (i - 1);
                }
            }
            let row = u as usize * out.row_words;
            let mut rest = coeff;
            while rest != 0 {
                let c = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                for w in 0..out.row_words {
                    out.bits[row + w] ^= coord_masks[c][w];
                }
            }
        }
        out
    }
}

/// Value assigned to the free variables of the factor-set solver. Different
/// pinnings give different factor sets for the same parameters; the loops
/// they build are isomorphic, and parameter extraction cannot tell them
/// apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pinning {
    Zeros,
    Ones,
}

/// Solves the factor-set constraints as a linear system over the
/// `(2^d - 1)^2` unknowns `theta(u, v)` with `u, v` nonzero:
///
/// * diagonal: `theta(u, u) = f(u)`,
/// * symmetry: `theta(u, v) + theta(v, u) = f_2(u, v)`,
/// * cocycle: `theta(u, v) + theta(u+v, w) + theta(v, w) + theta(u, v+w) = f_3(u, v, w)`.
///
/// The diagonal and symmetry rows load eagerly; the cubic family of cocycle
/// rows is enforced by verify-and-repair rounds, each adding only violated
/// rows, which keeps the echelon small. A closed-form solution always exists,
/// so `Inconsistent` from the elimination is an internal error.
pub fn solve_factor_set(omega: &ParamVector, pin: Pinning) -> Result<FactorSet> {
    let dim = omega.dim();
    assert!(dim <= 6, "the factor-set solver supports d <= 6");
    let n = 1usize << dim;
    let m = n - 1;
    let var = |u: u64, v: u64| (u as usize - 1) * m + (v as usize - 1);

    let sparse = |vars: &[usize]| {
        let mut row = BitRow::zero(m * m);
        for &v in vars {
            // A variable listed twice cancels, matching GF(2) addition.
            row.set(v, !row.get(v));
        }
        row
    };

    let mut ech = Echelon::new(m * m);
    for u in 1..n as u64 {
        ech.add_row(sparse(&[var(u, u)]), omega.eval(u))?;
        for v in u + 1..n as u64 {
            ech.add_row(sparse(&[var(u, v), var(v, u)]), eval_f2(omega, u, v))?;
        }
    }

    let pin_ones = pin == Pinning::Ones;
    for round in 0.. {
        assert!(round < 64, "factor-set repair must converge");
        let solution = ech.solution(pin_ones);
        let mut theta = FactorSet::zero(dim);
        for u in 1..n as u64 {
            for v in 1..n as u64 {
                theta.set_theta(u, v, solution.get(var(u, v)));
            }
        }
        let mut violations = 0usize;
        for u in 1..n as u64 {
            for v in 1..n as u64 {
                for w in 1..n as u64 {
                    let lhs = theta.theta(u, v)
                        ^ theta.theta(u ^ v, w)
                        ^ theta.theta(v, w)
                        ^ theta.theta(u, v ^ w);
                    if lhs == eval_f3(omega, u, v, w) {
                        continue;
                    }
                    violations += 1;
                    let mut vars = Vec::with_capacity(4);
                    vars.push(var(u, v));
                    if u ^ v != 0 {
                        vars.push(var(u ^ v, w));
                    }
                    vars.push(var(v, w));
                    if v ^ w != 0 {
                        vars.push(var(u, v ^ w));
                    }
                    ech.add_row(sparse(&vars), eval_f3(omega, u, v, w))?;
                }
            }
        }
        if violations == 0 {
            return Ok(theta);
        }
    }
    unreachable!()
}

/// Multiplication table of a loop of order `n = 2^(d+1)`, elements encoded as
/// `(a, u) -> a * 2^d + enc(u)` with `0` the identity.
#[derive(Clone, PartialEq, Eq)]
pub struct LoopTable {
    dim: usize,
    cells: Vec<u16>,
}

impl LoopTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        2 << self.dim
    }

    pub fn get(&self, x: usize, y: usize) -> usize {
        let n = self.order();
        debug_assert!(x < n && y < n);
        self.cells[x * n + y] as usize
    }

    /// Cayley table of the central extension defined by a factor set.
    pub fn build_loop(theta: &FactorSet) -> Self {
        assert!(theta.dim() <= 8, "explicit tables support d <= 8 (order 512)");
        let dim = theta.dim();
        let n = 2usize << dim;
        let mut cells = vec![0u16; n * n];
        for x in 0..n as u64 {
            for y in 0..n as u64 {
                cells[(x as usize) * n + y as usize] = theta.mul(x, y) as u16;
            }
        }
        LoopTable { dim, cells }
    }

    /// Identity at 0 and every row and column a permutation.
    pub fn is_latin(&self) -> bool {
        self.check_loop().is_ok()
    }

    /// Checks the quasigroup axioms, naming the first violation.
    pub fn check_loop(&self) -> Result<()> {
        let n = self.order();
        for x in 0..n {
            if self.get(0, x) != x || self.get(x, 0) != x {
                return Err(Error::NotALoop(format!("element 0 is not an identity at {x}")));
            }
        }
        let mut seen = vec![false; n];
        for x in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for y in 0..n {
                if std::mem::replace(&mut seen[self.get(x, y)], true) {
                    return Err(Error::NotALoop(format!("row {x} repeats a value")));
                }
            }
            seen.iter_mut().for_each(|s| *s = false);
            for y in 0..n {
                if std::mem::replace(&mut seen[self.get(y, x)], true) {
                    return Err(Error::NotALoop(format!("column {x} repeats a value")));
                }
            }
        }
        Ok(())
    }

    /// Serializes as text: first line the order, then one line per row.
    pub fn to_text(&self) -> String {
        let n = self.order();
        let mut out = String::with_capacity(n * n * 4);
        out.push_str(&n.to_string());
        out.push('\n');
        for x in 0..n {
            for y in 0..n {
                if y > 0 {
                    out.push(' ');
                }
                out.push_str(&self.get(x, y).to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty loop table".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::Parse("loop table: first line must be the order".into()))?;
        if !(n >= 4 && n.is_power_of_two() && n <= 1 << 13) {
            return Err(Error::Parse(format!(
                "loop table order {n} is not a power of two in 4..=8192"
            )));
        }
        let dim = n.trailing_zeros() as usize - 1;
        let mut cells = Vec::with_capacity(n * n);
        for (i, line) in lines.enumerate() {
            if i >= n {
                return Err(Error::Parse(format!("loop table has more than {n} rows")));
            }
            for tok in line.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("loop table: bad entry {tok:?}")))?;
                if v >= n {
                    return Err(Error::Parse(format!("loop table entry {v} out of 0..{n}")));
                }
                cells.push(v as u16);
            }
            if cells.len() != (i + 1) * n {
                return Err(Error::Parse(format!("loop table row {i} does not have {n} entries")));
            }
        }
        if cells.len() != n * n {
            return Err(Error::Parse(format!("loop table needs {n} rows")));
        }
        Ok(LoopTable { dim, cells })
    }
}

/// Outcome of an identity check over a loop table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The identity holds on every triple.
    ExhaustivePass,
    /// The identity held on this many sampled triples.
    SampledPass(u64),
    /// A triple violating the identity.
    Fail([usize; 3]),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        !matches!(self, Verdict::Fail(_))
    }
}

fn check_identity(
    t: &LoopTable,
    samples: u64,
    seed: u64,
    test: impl Fn(&LoopTable, usize, usize, usize) -> bool + Sync,
) -> Result<Verdict> {
    t.check_loop()?;
    let n = t.order();
    if n <= 256 {
        let fail = (0..n).into_par_iter().find_map_any(|x| {
            for y in 0..n {
                for z in 0..n {
                    if !test(t, x, y, z) {
                        return Some([x, y, z]);
                    }
                }
            }
            None
        });
        return Ok(match fail {
            Some(triple) => Verdict::Fail(triple),
            None => Verdict::ExhaustivePass,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        if !test(t, x, y, z) {
            return Ok(Verdict::Fail([x, y, z]));
        }
    }
    Ok(Verdict::SampledPass(samples))
}

/// Moufang law `x(y(xz)) = ((xy)x)z`, exhaustive for orders up to 256 and
/// sampled above.
pub fn is_moufang(t: &LoopTable, samples: u64, seed: u64) -> Result<Verdict> {
    check_identity(t, samples, seed, |t, x, y, z| {
        t.get(x, t.get(y, t.get(x, z))) == t.get(t.get(t.get(x, y), x), z)
    })
}

/// Associativity `(xy)z = x(yz)`, exhaustive for orders up to 256 and sampled
/// above.
pub fn is_associative(t: &LoopTable, samples: u64, seed: u64) -> Result<Verdict> {
    check_identity(t, samples, seed, |t, x, y, z| {
        t.get(t.get(x, y), z) == t.get(x, t.get(y, z))
    })
}

/// Commutativity, always exhaustive (quadratic in the order).
pub fn is_commutative(t: &LoopTable) -> Result<bool> {
    t.check_loop()?;
    let n = t.order();
    for x in 0..n {
        for y in 0..x {
            if t.get(x, y) != t.get(y, x) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn factor_set_identity(
    theta: &FactorSet,
    samples: u64,
    seed: u64,
    test: impl Fn(&FactorSet, u64, u64, u64) -> bool,
) -> Verdict {
    let n = theta.order() as u64;
    if n <= 256 {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !test(theta, x, y, z) {
                        return Verdict::Fail([x as usize, y as usize, z as usize]);
                    }
                }
            }
        }
        return Verdict::ExhaustivePass;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        if !test(theta, x, y, z) {
            return Verdict::Fail([x as usize, y as usize, z as usize]);
        }
    }
    Verdict::SampledPass(samples)
}

/// Moufang law checked directly through a factor set, for extensions too
/// large to hold as tables. Exhaustive up to order 256, sampled above.
pub fn moufang_through_factor_set(theta: &FactorSet, samples: u64, seed: u64) -> Verdict {
    factor_set_identity(theta, samples, seed, |t, x, y, z| {
        t.mul(x, t.mul(y, t.mul(x, z))) == t.mul(t.mul(t.mul(x, y), x), z)
    })
}

/// Associativity checked directly through a factor set. Exhaustive up to
/// order 256, sampled above.
pub fn associative_through_factor_set(theta: &FactorSet, samples: u64, seed: u64) -> Verdict {
    factor_set_identity(theta, samples, seed, |t, x, y, z| {
        t.mul(t.mul(x, y), z) == t.mul(x, t.mul(y, z))
    })
}

/// Reads the squaring, commutator and associator parameters back off a
/// multiplication table in the standard central-extension encoding
/// (`(a, u) -> a * 2^d + enc(u)`, center generated by `2^d`).
///
/// Verifies the encoding as it goes: products must respect cosets, squares
/// and commutators must land in the center everywhere, and associators must
/// land in the center on every triple for orders up to 256 (basis triples
/// plus their coset variants above that).
pub fn extract_pca(t: &LoopTable) -> Result<ParamVector> {
    t.check_loop()?;
    let n = t.order();
    let dim = t.dim();
    let z = 1usize << dim;

    // Coset structure: the low d bits of a product must be the XOR of the
    // factors' low bits.
    for x in 0..n {
        for y in 0..n {
            if t.get(x, y) & (z - 1) != (x ^ y) & (z - 1) {
                return Err(Error::Encoding(format!(
                    "product at ({x}, {y}) leaves the expected coset"
                )));
            }
        }
    }
    // The designated central element must commute and associate centrally:
    // multiplying by it must flip the high bit on both sides.
    for x in 0..n {
        if t.get(x, z) != x ^ z || t.get(z, x) != x ^ z {
            return Err(Error::Encoding(format!(
                "element {z} does not act as the designated central involution at {x}"
            )));
        }
    }

    let mut omega = ParamVector::zero(dim);

    // Squares land in the center and are constant on cosets.
    for u in 0..z {
        let sq = t.get(u, u);
        if sq & (z - 1) != 0 {
            return Err(Error::Encoding(format!("square of {u} is not central")));
        }
        if t.get(u ^ z, u ^ z) != sq {
            return Err(Error::Encoding(format!("squares differ across the coset of {u}")));
        }
    }
    for i in 1..=dim {
        let e = 1usize << (i - 1);
        omega.set1(i, t.get(e, e) == z);
    }

    // Commutators land in the center and ignore the central components.
    for u in 0..z {
        for v in 0..z {
            let ab = t.get(u, v);
            let ba = t.get(v, u);
            if ab ^ ba != 0 && ab ^ ba != z {
                return Err(Error::Encoding(format!(
                    "commutator of ({u}, {v}) is not central"
                )));
            }
            if (t.get(u ^ z, v) ^ t.get(v, u ^ z)) != ab ^ ba
                || (t.get(u, v ^ z) ^ t.get(v ^ z, u)) != ab ^ ba
            {
                return Err(Error::Encoding(format!(
                    "commutators differ across the cosets of ({u}, {v})"
                )));
            }
        }
    }
    for i in 1..=dim {
        for j in i + 1..=dim {
            let (a, b) = (1usize << (i - 1), 1usize << (j - 1));
            omega.set2(i, j, t.get(a, b) ^ t.get(b, a) == z);
        }
    }

    // Associators land in the center: exhaustive for small tables, basis
    // triples with coset variants otherwise.
    let associator = |x: usize, y: usize, w: usize| -> Result<usize> {
        let lhs = t.get(t.get(x, y), w);
        let rhs = t.get(x, t.get(y, w));
        if lhs ^ rhs != 0 && lhs ^ rhs != z {
            return Err(Error::Encoding(format!(
                "associator of ({x}, {y}, {w}) is not central"
            )));
        }
        Ok(lhs ^ rhs)
    };
    if n <= 256 {
        for x in 0..n {
            for y in 0..n {
                for w in 0..n {
                    associator(x, y, w)?;
                }
            }
        }
    }
    for i in 1..=dim {
        for j in i + 1..=dim {
            for k in j + 1..=dim {
                let (a, b, c) = (1usize << (i - 1), 1usize << (j - 1), 1usize << (k - 1));
                let val = associator(a, b, c)?;
                for coset in 1..8usize {
                    let (x, y, w) = (
                        a ^ if coset & 1 != 0 { z } else { 0 },
                        b ^ if coset & 2 != 0 { z } else { 0 },
                        c ^ if coset & 4 != 0 { z } else { 0 },
                    );
                    if associator(x, y, w)? != val {
                        return Err(Error::Encoding(format!(
                            "associators differ across the cosets of ({a}, {b}, {c})"
                        )));
                    }
                }
                omega.set3(i, j, k, val == z);
            }
        }
    }
    Ok(omega)
}

/// A binary linear code given by independent generator words over
/// `F_2^length`, bit `p` of a word marking coordinate `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    length: usize,
    generators: Vec<u64>,
}

impl CodeSpec {
    pub fn new(length: usize, generators: Vec<u64>) -> Result<Self> {
        assert!((1..=64).contains(&length), "code length must be in 1..=64");
        assert!(
            (1..=12).contains(&generators.len()),
            "code dimension must be in 1..=12"
        );
        if length < 64 {
            let mask = (1u64 << length) - 1;
            assert!(
                generators.iter().all(|g| g & !mask == 0),
                "generator exceeds the code length"
            );
        }
        // Independence check by elimination.
        let mut basis: Vec<u64> = Vec::new();
        for &g in &generators {
            let mut v = g;
            for &b in &basis {
                let high = 63 - b.leading_zeros();
                if v >> high & 1 == 1 {
                    v ^= b;
                }
            }
            if v == 0 {
                return Err(Error::DependentGenerators);
            }
            basis.push(v);
            basis.sort_unstable_by_key(|b| std::cmp::Reverse(*b));
        }
        Ok(CodeSpec { length, generators })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// All `2^dim` codewords, indexed by coefficient masks over the
    /// generators.
    pub fn codewords(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.dim()).map(move |mask| {
            let mut w = 0;
            let mut rest = mask;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                w ^= self.generators[i];
            }
            w
        })
    }

    /// Parses the text form: first line `length dim`, then `dim` lines of
    /// 0/1 characters, leftmost character = coordinate 0.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty code file".into()))?;
        let mut parts = header.split_whitespace();
        let (length, dim): (usize, usize) = match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(d), None) => (
                l.parse().map_err(|_| Error::Parse("code header: bad length".into()))?,
                d.parse().map_err(|_| Error::Parse("code header: bad dimension".into()))?,
            ),
            _ => return Err(Error::Parse("code header must be \"length dim\"".into())),
        };
        if !(1..=64).contains(&length) || !(1..=12).contains(&dim) {
            return Err(Error::Parse(format!(
                "code of length {length} and dimension {dim} is out of range"
            )));
        }
        let mut generators = Vec::with_capacity(dim);
        for line in lines {
            let row = line.trim();
            if row.len() != length {
                return Err(Error::Parse(format!(
                    "generator row {row:?} does not have {length} characters"
                )));
            }
            let mut g = 0u64;
            for (p, ch) in row.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => g |= 1 << p,
                    _ => return Err(Error::Parse(format!("bad character {ch:?} in {row:?}"))),
                }
            }
            generators.push(g);
        }
        if generators.len() != dim {
            return Err(Error::Parse(format!("code needs {dim} generator rows")));
        }
        CodeSpec::new(length, generators)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.length, self.dim());
        for &g in &self.generators {
            for p in 0..self.length {
                out.push(if g >> p & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// Every codeword has weight divisible by four. The generator criterion
/// (generator weights divisible by 4, pairwise intersections even) is
/// sufficient, and the whole code is exhausted as well.
pub fn is_doubly_even(code: &CodeSpec) -> bool {
    let gens = code.generators();
    let generators_pass = gens.iter().all(|g| g.count_ones() % 4 == 0)
        && gens.iter().enumerate().all(|(i, &g)| {
            gens[..i].iter().all(|&h| (g & h).count_ones() % 2 == 0)
        });
    generators_pass && code.codewords().all(|w| w.count_ones() % 4 == 0)
}

/// Parameters of the code loop over a doubly even code, read off the
/// generators: `w_i = |g_i|/4`, `w_ij = |g_i meet g_j|/2`,
/// `w_ijk = |g_i meet g_j meet g_k|`, all modulo 2.
pub fn code_to_params(code: &CodeSpec) -> Result<ParamVector> {
    if !is_doubly_even(code) {
        return Err(Error::NotDoublyEven(
            "a codeword has weight not divisible by 4".into(),
        ));
    }
    let dim = code.dim();
    let g = code.generators();
    let mut omega = ParamVector::zero(dim);
    for i in 1..=dim {
        omega.set1(i, g[i - 1].count_ones() >> 2 & 1 == 1);
        for j in i + 1..=dim {
            omega.set2(i, j, (g[i - 1] & g[j - 1]).count_ones() >> 1 & 1 == 1);
            for k in j + 1..=dim {
                omega.set3(i, j, k, (g[i - 1] & g[j - 1] & g[k - 1]).count_ones() & 1 == 1);
            }
        }
    }
    Ok(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::parse_form;

    fn random_params(dim: usize, seed: u64) -> ParamVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut omega = ParamVector::zero(dim);
        for i in 1..=dim {
            omega.set1(i, rng.gen());
            for j in i + 1..=dim {
                omega.set2(i, j, rng.gen());
                for k in j + 1..=dim {
                    omega.set3(i, j, k, rng.gen());
                }
            }
        }
        omega
    }

    fn assert_constraints(theta: &FactorSet, omega: &ParamVector) {
        let n = 1u64 << theta.dim();
        for u in 0..n {
            assert_eq!(theta.theta(u, 0), false);
            assert_eq!(theta.theta(0, u), false);
            assert_eq!(theta.theta(u, u), omega.eval(u), "diagonal at {u}");
            for v in 0..n {
                assert_eq!(
                    theta.theta(u, v) ^ theta.theta(v, u),
                    eval_f2(omega, u, v),
                    "symmetry at ({u}, {v})"
                );
                for w in 0..n {
                    assert_eq!(
                        theta.theta(u, v)
                            ^ theta.theta(u ^ v, w)
                            ^ theta.theta(v, w)
                            ^ theta.theta(u, v ^ w),
                        eval_f3(omega, u, v, w),
                        "cocycle at ({u}, {v}, {w})"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_satisfies_all_constraints() {
        for dim in 1..=4 {
            for seed in 0..5 {
                let omega = random_params(dim, seed);
                assert_constraints(&FactorSet::closed_form(&omega), &omega);
            }
        }
    }

    #[test]
    fn solver_satisfies_all_constraints_both_pinnings() {
        for seed in 0..20 {
            let omega = random_params(4, 100 + seed);
            assert_constraints(&solve_factor_set(&omega, Pinning::Zeros).unwrap(), &omega);
            assert_constraints(&solve_factor_set(&omega, Pinning::Ones).unwrap(), &omega);
        }
    }

    #[test]
    fn zero_params_solve_to_zero_theta_and_boolean_group() {
        let omega = ParamVector::zero(3);
        let theta = solve_factor_set(&omega, Pinning::Zeros).unwrap();
        for u in 0..8 {
            for v in 0..8 {
                assert!(!theta.theta(u, v));
            }
        }
        let t = LoopTable::build_loop(&theta);
        assert_eq!(t.order(), 16);
        assert_eq!(is_associative(&t, 0, 0).unwrap(), Verdict::ExhaustivePass);
        assert!(is_commutative(&t).unwrap());
        for x in 0..16 {
            assert_eq!(t.get(x, x), 0, "every element must square to the identity");
        }
    }

    #[test]
    fn lone_associator_bit_gives_nonassociative_moufang_of_order_16() {
        let mut omega = ParamVector::zero(3);
        omega.set3(1, 2, 3, true);
        let theta = solve_factor_set(&omega, Pinning::Zeros).unwrap();
        // The cocycle constraint at the basis triple, directly.
        assert!(
            theta.theta(1, 2) ^ theta.theta(3, 4) ^ theta.theta(2, 4) ^ theta.theta(1, 6),
        );
        let t = LoopTable::build_loop(&theta);
        assert_eq!(t.order(), 16);
        assert_eq!(is_moufang(&t, 0, 0).unwrap(), Verdict::ExhaustivePass);
        assert!(matches!(is_associative(&t, 0, 0).unwrap(), Verdict::Fail(_)));
        assert_eq!(extract_pca(&t).unwrap(), omega);
    }

    #[test]
    fn lone_square_bit_at_d2_gives_group_with_order_four_element() {
        let mut omega = ParamVector::zero(2);
        omega.set1(1, true);
        let t = LoopTable::build_loop(&solve_factor_set(&omega, Pinning::Zeros).unwrap());
        assert_eq!(t.order(), 8);
        assert_eq!(is_associative(&t, 0, 0).unwrap(), Verdict::ExhaustivePass);
        let sq = t.get(1, 1);
        assert_ne!(sq, 0);
        assert_eq!(t.get(sq, sq), 0, "element 1 must have order 4");
    }

    #[test]
    fn pipeline_round_trips_at_d4_and_pinning_does_not_leak() {
        for seed in 0..10 {
            let omega = random_params(4, 300 + seed);
            let zeros = LoopTable::build_loop(&solve_factor_set(&omega, Pinning::Zeros).unwrap());
            let ones = LoopTable::build_loop(&solve_factor_set(&omega, Pinning::Ones).unwrap());
            assert_eq!(is_moufang(&zeros, 0, 0).unwrap(), Verdict::ExhaustivePass);
            assert_eq!(is_moufang(&ones, 0, 0).unwrap(), Verdict::ExhaustivePass);
            assert_eq!(extract_pca(&zeros).unwrap(), omega);
            assert_eq!(extract_pca(&ones).unwrap(), omega);
        }
    }

    #[test]
    fn closed_form_and_solver_agree_at_the_parameter_level() {
        for seed in 0..10 {
            let omega = random_params(5, 500 + seed);
            let closed = LoopTable::build_loop(&FactorSet::closed_form(&omega));
            assert_eq!(is_moufang(&closed, 0, 0).unwrap(), Verdict::ExhaustivePass);
            assert_eq!(extract_pca(&closed).unwrap(), omega);
        }
    }

    #[test]
    fn zero_associator_part_builds_groups() {
        for seed in 0..10 {
            let mut omega = random_params(4, 700 + seed);
            for i in 1..=4 {
                for j in i + 1..=4 {
                    for k in j + 1..=4 {
                        omega.set3(i, j, k, false);
                    }
                }
            }
            let t = LoopTable::build_loop(&FactorSet::closed_form(&omega));
            assert_eq!(is_associative(&t, 0, 0).unwrap(), Verdict::ExhaustivePass);
        }
    }

    #[test]
    fn zero_commutator_and_associator_parts_build_commutative_groups() {
        let mut omega = ParamVector::zero(4);
        omega.set1(1, true);
        omega.set1(3, true);
        let t = LoopTable::build_loop(&FactorSet::closed_form(&omega));
        assert_eq!(is_associative(&t, 0, 0).unwrap(), Verdict::ExhaustivePass);
        assert!(is_commutative(&t).unwrap());
    }

    #[test]
    fn corrupted_group_table_fails_moufang_or_latin() {
        let t = LoopTable::build_loop(&FactorSet::closed_form(&ParamVector::zero(3)));
        // Swapping an intercalate keeps the table Latin but breaks the law.
        let mut cells = t.cells.clone();
        let n = t.order();
        let (x1, y1, x2, y2) = (2usize, 4usize, 3usize, 5usize);
        assert_eq!(t.get(x1, y1), t.get(x2, y2));
        assert_eq!(t.get(x1, y2), t.get(x2, y1));
        cells.swap(x1 * n + y1, x1 * n + y2);
        cells.swap(x2 * n + y1, x2 * n + y2);
        let broken = LoopTable { dim: t.dim, cells };
        broken.check_loop().expect("the intercalate swap preserves Latinness");
        assert!(matches!(is_moufang(&broken, 0, 0).unwrap(), Verdict::Fail(_)));

        // Swapping two entries in one row breaks the columns instead.
        let mut cells = t.cells.clone();
        cells.swap(2 * n + 4, 2 * n + 5);
        let not_latin = LoopTable { dim: t.dim, cells };
        assert!(matches!(is_moufang(&not_latin, 0, 0), Err(Error::NotALoop(_))));
    }

    #[test]
    fn table_text_round_trip() {
        let mut omega = ParamVector::zero(3);
        omega.set3(1, 2, 3, true);
        omega.set1(2, true);
        let t = LoopTable::build_loop(&FactorSet::closed_form(&omega));
        let restored = LoopTable::from_text(&t.to_text()).unwrap();
        assert!(restored == t);
        assert!(LoopTable::from_text("3\n0 1 2\n1 2 0\n2 0 1\n").is_err());
    }

    #[test]
    fn code_files_round_trip_and_reject_dependent_rows() {
        let code = CodeSpec::from_text("8 4\n11111111\n00001111\n00110011\n01010101\n").unwrap();
        assert_eq!(code.length(), 8);
        assert_eq!(code.dim(), 4);
        assert_eq!(CodeSpec::from_text(&code.to_text()).unwrap(), code);
        assert!(matches!(
            CodeSpec::new(8, vec![0b1111, 0b11110000, 0b11111111]),
            Err(Error::DependentGenerators)
        ));
    }

    #[test]
    fn doubly_even_codes_are_recognized() {
        let hamming = CodeSpec::from_text("8 4\n11111111\n00001111\n00110011\n01010101\n").unwrap();
        assert!(is_doubly_even(&hamming));
        let repetition = CodeSpec::new(4, vec![0b1111]).unwrap();
        assert!(is_doubly_even(&repetition));
        let with_weight_two = CodeSpec::new(8, vec![0b11, 0b11110000]).unwrap();
        assert!(!is_doubly_even(&with_weight_two));
        assert!(matches!(
            code_to_params(&with_weight_two),
            Err(Error::NotDoublyEven(_))
        ));
    }

    #[test]
    fn repetition_code_has_square_parameter_set() {
        let repetition = CodeSpec::new(4, vec![0b1111]).unwrap();
        let omega = code_to_params(&repetition).unwrap();
        assert!(omega.get1(1), "weight 4 gives |g|/4 = 1");
    }

    #[test]
    fn hamming_code_loop_is_nonassociative_moufang_of_order_32() {
        let code = CodeSpec::from_text("8 4\n11111111\n00001111\n00110011\n01010101\n").unwrap();
        let omega = code_to_params(&code).unwrap();
        let t = LoopTable::build_loop(&FactorSet::closed_form(&omega));
        assert_eq!(t.order(), 32);
        assert_eq!(is_moufang(&t, 0, 0).unwrap(), Verdict::ExhaustivePass);
        assert!(matches!(is_associative(&t, 0, 0).unwrap(), Verdict::Fail(_)));
        assert_eq!(extract_pca(&t).unwrap(), omega);
    }

    #[test]
    fn extraction_rejects_foreign_encodings() {
        // Latin with identity 0, but 1 * 1 = 3 leaves the coset of 0.
        let text = "4\n0 1 2 3\n1 3 0 2\n2 0 3 1\n3 2 1 0\n";
        let t = LoopTable::from_text(text).unwrap();
        t.check_loop().unwrap();
        assert!(matches!(extract_pca(&t), Err(Error::Encoding(_))));

        // The cyclic group of order 4 in its natural labeling is a genuine
        // central extension: extraction succeeds and reads off the square.
        let z4 = LoopTable::from_text("4\n0 1 2 3\n1 2 3 0\n2 3 0 1\n3 0 1 2\n").unwrap();
        let omega = extract_pca(&z4).unwrap();
        assert!(omega.get1(1));
    }

    #[test]
    fn solver_example_hits_the_documented_associator_constraint() {
        let omega = {
            let mut w = ParamVector::zero(3);
            w.set3(1, 2, 3, true);
            w
        };
        let theta = solve_factor_set(&omega, Pinning::Zeros).unwrap();
        let f3 = parse_form("123", 3).unwrap();
        assert!(f3.get(1, 2, 3));
        // theta(e1+e2, e3) + theta(e1, e2+e3) + theta(e2, e3) + theta(e1, e2) = 1.
        assert!(theta.theta(3, 4) ^ theta.theta(1, 6) ^ theta.theta(2, 4) ^ theta.theta(1, 2));
    }

    #[test]
    fn factor_set_identity_checks_agree_with_table_checks() {
        let mut omega = ParamVector::zero(3);
        omega.set3(1, 2, 3, true);
        let theta = FactorSet::closed_form(&omega);
        assert_eq!(moufang_through_factor_set(&theta, 0, 0), Verdict::ExhaustivePass);
        assert!(matches!(associative_through_factor_set(&theta, 0, 0), Verdict::Fail(_)));
        let table = LoopTable::build_loop(&theta);
        assert_eq!(is_moufang(&table, 0, 0).unwrap(), Verdict::ExhaustivePass);
        assert!(matches!(is_associative(&table, 0, 0).unwrap(), Verdict::Fail(_)));
        // Past table range the check samples; any closed-form set is Moufang.
        let wide = random_params(9, 7);
        let big = FactorSet::closed_form(&wide);
        assert_eq!(moufang_through_factor_set(&big, 20_000, 11), Verdict::SampledPass(20_000));
    }
}
