//! The `GL(d, 2)` action on parameter space, in stratified form.
//!
//! A matrix `S` acts on squaring maps by `f -> f(v * S^-1)`; on parameters the
//! action is block triangular with respect to the subset-size grading. Writing
//! `T = S^-1 = (t_ij)` and `omega = (p, c, a)` for the size-1/2/3 components:
//!
//! ```text
//! a' = a * N3          N3[ijk][uvw] = 3x3 determinant of T on rows {u,v,w}, cols {i,j,k}
//! c' = c * N2 + nu2(a) N2[ij][uv]   = t_ui t_vj + t_uj t_vi
//! p' = p * N1 + nu1(c, a)           N1[i][u] = t_ui
//! ```
//!
//! with the inhomogeneous parts
//!
//! ```text
//! nu2(a)[uv]   = sum_{i<j<k} (t_ui t_uj t_vk + t_ui t_uk t_vj + t_uj t_uk t_vi
//!              + t_ui t_vj t_vk + t_uj t_vi t_vk + t_uk t_vi t_vj) a_ijk
//! nu1(c, a)[u] = sum_{i<j} t_ui t_uj c_ij + sum_{i<j<k} t_ui t_uj t_uk a_ijk
//! ```
//!
//! All blocks are stored row-indexed as XOR masks, and the nu parts as
//! parity-of-AND masks per output coordinate, so one application costs a few
//! dozen word operations. This module serves the orbit machinery and is capped
//! at `d <= 8`.

use crate::gf2::BitMat;
use crate::polar::ParamVector;
use crate::subsets::SubsetTables;
use crate::Result;

/// Precomputed data for one group element acting on parameter space.
#[derive(Clone)]
pub struct ActionData {
    dim: usize,
    element: BitMat,
    tinv: BitMat,
    /// Row `i` (0-based input coordinate): mask of output single coordinates.
    n1: Vec<u64>,
    /// Row per input pair index: mask of output pair coordinates.
    n2: Vec<u64>,
    /// Row per input triple index: mask of output triple coordinates.
    n3: Vec<u64>,
    /// Per output pair index: parity mask over input triple coordinates.
    nu2: Vec<u64>,
    /// Per output single coordinate: parity mask over input pair coordinates.
    nu1_c: Vec<u64>,
    /// Per output single coordinate: parity mask over input triple coordinates.
    nu1_a: Vec<u64>,
}

#[inline]
fn tbit(t: &BitMat, r: usize, c: usize) -> u64 {
    t.row(r - 1) >> (c - 1) & 1
}

fn build_from_t(element: BitMat, t: BitMat) -> ActionData {
    let d = element.dim();
    assert!(d <= 8, "action data caps at d = 8");
    let tables = SubsetTables::get(d);
    let np = tables.pair_count();
    let nt = tables.triple_count();

    let mut n1 = vec![0u64; d];
    for i in 1..=d {
        for u in 1..=d {
            n1[i - 1] |= tbit(&t, u, i) << (u - 1);
        }
    }

    let mut n2 = vec![0u64; np];
    let mut nu2 = vec![0u64; np];
    for col in 0..np {
        let (u, v) = tables.pair_at(col);
        for row in 0..np {
            let (i, j) = tables.pair_at(row);
            let e = tbit(&t, u, i) & tbit(&t, v, j) ^ tbit(&t, u, j) & tbit(&t, v, i);
            n2[row] |= e << col;
        }
        for row in 0..nt {
            let (i, j, k) = tables.triple_at(row);
            let e = tbit(&t, u, i) & tbit(&t, u, j) & tbit(&t, v, k)
                ^ tbit(&t, u, i) & tbit(&t, u, k) & tbit(&t, v, j)
                ^ tbit(&t, u, j) & tbit(&t, u, k) & tbit(&t, v, i)
                ^ tbit(&t, u, i) & tbit(&t, v, j) & tbit(&t, v, k)
                ^ tbit(&t, u, j) & tbit(&t, v, i) & tbit(&t, v, k)
                ^ tbit(&t, u, k) & tbit(&t, v, i) & tbit(&t, v, j);
            nu2[col] |= e << row;
        }
    }

    let mut n3 = vec![0u64; nt];
    for col in 0..nt {
        let (u, v, w) = tables.triple_at(col);
        for row in 0..nt {
            let (i, j, k) = tables.triple_at(row);
            // 3x3 determinant (= permanent over GF(2)) of T on rows {u,v,w}, cols {i,j,k}.
            let e = tbit(&t, u, i) & (tbit(&t, v, j) & tbit(&t, w, k) ^ tbit(&t, v, k) & tbit(&t, w, j))
                ^ tbit(&t, u, j) & (tbit(&t, v, i) & tbit(&t, w, k) ^ tbit(&t, v, k) & tbit(&t, w, i))
                ^ tbit(&t, u, k) & (tbit(&t, v, i) & tbit(&t, w, j) ^ tbit(&t, v, j) & tbit(&t, w, i));
            n3[row] |= e << col;
        }
    }

    let mut nu1_c = vec![0u64; d];
    let mut nu1_a = vec![0u64; d];
    for u in 1..=d {
        for row in 0..np {
            let (i, j) = tables.pair_at(row);
            nu1_c[u - 1] |= (tbit(&t, u, i) & tbit(&t, u, j)) << row;
        }
        for row in 0..nt {
            let (i, j, k) = tables.triple_at(row);
            nu1_a[u - 1] |= (tbit(&t, u, i) & tbit(&t, u, j) & tbit(&t, u, k)) << row;
        }
    }

    ActionData { dim: d, element, tinv: t, n1, n2, n3, nu2, nu1_c, nu1_a }
}

/// Builds the action of `S` (errors if `S` is singular).
pub fn build_action(s: &BitMat) -> Result<ActionData> {
    let t = s.inverse()?;
    Ok(build_from_t(s.clone(), t))
}

/// Builds the transpose-twisted action `f -> f(v * S^t)`. Composing with the
/// inverse-transpose automorphism turns it into the standard action, so orbit
/// partitions agree; it exists as an independent cross-check route.
pub fn build_action_transposed(s: &BitMat) -> Result<ActionData> {
    s.inverse()?; // reject singular input; the data itself only needs S^t
    Ok(build_from_t(s.clone(), s.transpose()))
}

/// Applies the triple-component action of `S` to one point without building
/// the full table set. Costs one matrix inverse plus `popcount(a)` small
/// determinants per output coordinate; intended for randomized searches where
/// each group element acts on a single point.
pub fn act3_point(s: &BitMat, a: u64) -> u64 {
    let t = s.inverse().expect("act3_point requires an invertible matrix");
    let tables = SubsetTables::get(s.dim());
    let mut out = 0u64;
    for col in 0..tables.triple_count() {
        let (u, v, w) = tables.triple_at(col);
        let mut bit = 0u64;
        let mut rest = a;
        while rest != 0 {
            let (i, j, k) = tables.triple_at(rest.trailing_zeros() as usize);
            rest &= rest - 1;
            bit ^= tbit(&t, u, i) & (tbit(&t, v, j) & tbit(&t, w, k) ^ tbit(&t, v, k) & tbit(&t, w, j))
                ^ tbit(&t, u, j) & (tbit(&t, v, i) & tbit(&t, w, k) ^ tbit(&t, v, k) & tbit(&t, w, i))
                ^ tbit(&t, u, k) & (tbit(&t, v, i) & tbit(&t, w, j) ^ tbit(&t, v, j) & tbit(&t, w, i));
        }
        out |= bit << col;
    }
    out
}

/// Applies the pair-component action of `S` to one point over a fixed triple
/// component, without building the full table set. Same single-point niche as
/// [`act3_point`].
pub fn act2_point(s: &BitMat, c: u64, a: u64) -> u64 {
    let t = s.inverse().expect("act2_point requires an invertible matrix");
    let tables = SubsetTables::get(s.dim());
    let mut out = 0u64;
    for col in 0..tables.pair_count() {
        let (u, v) = tables.pair_at(col);
        let mut bit = 0u64;
        let mut rest = c;
        while rest != 0 {
            let (i, j) = tables.pair_at(rest.trailing_zeros() as usize);
            rest &= rest - 1;
            bit ^= tbit(&t, u, i) & tbit(&t, v, j) ^ tbit(&t, u, j) & tbit(&t, v, i);
        }
        let mut rest = a;
        while rest != 0 {
            let (i, j, k) = tables.triple_at(rest.trailing_zeros() as usize);
            rest &= rest - 1;
            bit ^= tbit(&t, u, i) & tbit(&t, u, j) & tbit(&t, v, k)
                ^ tbit(&t, u, i) & tbit(&t, u, k) & tbit(&t, v, j)
                ^ tbit(&t, u, j) & tbit(&t, u, k) & tbit(&t, v, i)
                ^ tbit(&t, u, i) & tbit(&t, v, j) & tbit(&t, v, k)
                ^ tbit(&t, u, j) & tbit(&t, v, i) & tbit(&t, v, k)
                ^ tbit(&t, u, k) & tbit(&t, v, i) & tbit(&t, v, j);
        }
        out |= bit << col;
    }
    out
}

#[inline]
fn xor_rows(rows: &[u64], mut input: u64) -> u64 {
    let mut out = 0;
    while input != 0 {
        out ^= rows[input.trailing_zeros() as usize];
        input &= input - 1;
    }
    out
}

#[inline]
fn parity(x: u64) -> u64 {
    (x.count_ones() & 1) as u64
}

impl ActionData {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The acting matrix `S`.
    pub fn element(&self) -> &BitMat {
        &self.element
    }

    /// The matrix `T` the coordinate formulas read (`S^-1`, or `S^t` for the
    /// twisted variant).
    pub fn tinv(&self) -> &BitMat {
        &self.tinv
    }

    /// Action on the triple component.
    pub fn act3(&self, a: u64) -> u64 {
        xor_rows(&self.n3, a)
    }

    /// Inhomogeneous contribution of the triple part to the pair part.
    pub fn nu2_vec(&self, a: u64) -> u64 {
        let mut out = 0;
        for (col, &mask) in self.nu2.iter().enumerate() {
            out |= parity(mask & a) << col;
        }
        out
    }

    /// Action on the pair component over a fixed triple component.
    pub fn act2(&self, c: u64, a: u64) -> u64 {
        xor_rows(&self.n2, c) ^ self.nu2_vec(a)
    }

    /// Inhomogeneous contribution of the pair and triple parts to the singles.
    pub fn nu1_vec(&self, c: u64, a: u64) -> u64 {
        let mut out = 0;
        for u in 0..self.dim {
            out |= (parity(self.nu1_c[u] & c) ^ parity(self.nu1_a[u] & a)) << u;
        }
        out
    }

    /// Action on the singles component over fixed pair and triple components.
    pub fn act1(&self, p: u64, c: u64, a: u64) -> u64 {
        xor_rows(&self.n1, p) ^ self.nu1_vec(c, a)
    }

    /// Full action on a parameter vector.
    pub fn act_full(&self, omega: &ParamVector) -> ParamVector {
        assert_eq!(omega.dim(), self.dim);
        let (p, c, a) = (omega.part1(), omega.part2(), omega.part3());
        ParamVector::from_parts(self.dim, self.act1(p, c, a), self.act2(c, a), self.act3(a))
    }
}
