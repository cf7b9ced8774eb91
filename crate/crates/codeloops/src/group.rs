//! Stabilizer chains for subgroups of `GL(d, 2)`, `d <= 8`.
//!
//! Every subgroup here acts faithfully on the nonzero vectors of `V = F_2^d`
//! (at most 255 points), so a base-and-strong-generators chain over those
//! points supports exact order computation, membership by sifting, uniform
//! random sampling, and stabilizer construction. Stabilizers of points in big
//! parameter-space orbits come from birthday collisions among random orbit
//! images; their completeness is certified downstream by the index-sum
//! identity, never assumed.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::gf2::BitMat;
use crate::{Error, Result};

struct Level {
    base: u64,
    gens: Vec<BitMat>,
    /// Transversal element per point encoding: maps the base point to that point.
    transversal: Vec<Option<BitMat>>,
    /// Orbit of the base in discovery order.
    orbit: Vec<u64>,
}

impl Level {
    fn new(dim: usize, base: u64) -> Self {
        let mut transversal = vec![None; 1 << dim];
        transversal[base as usize] = Some(BitMat::identity(dim));
        Level { base, gens: Vec::new(), transversal, orbit: vec![base] }
    }

    /// Extends the orbit closure, keeping existing transversal entries.
    /// Returns the orbit length before extension.
    fn extend_orbit(&mut self) -> usize {
        let old_len = self.orbit.len();
        let mut head = 0;
        while head < self.orbit.len() {
            let p = self.orbit[head];
            head += 1;
            for g in &self.gens {
                let q = g.apply(p);
                if self.transversal[q as usize].is_none() {
                    let u = self.transversal[p as usize].as_ref().unwrap().mul(g);
                    self.transversal[q as usize] = Some(u);
                    self.orbit.push(q);
                }
            }
        }
        old_len
    }
}

/// Base-and-strong-generators chain.
pub struct StabChain {
    dim: usize,
    gens: Vec<BitMat>,
    levels: Vec<Level>,
}

impl Clone for StabChain {
    fn clone(&self) -> Self {
        // Rebuilding is cheap at <= 255 points and keeps the derived state consistent.
        bsgs_build(self.dim, self.gens.clone())
    }
}

impl StabChain {
    pub fn trivial(dim: usize) -> Self {
        assert!((1..=8).contains(&dim));
        StabChain { dim, gens: Vec::new(), levels: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The generators this chain was built from (deduped, identity dropped).
    pub fn generators(&self) -> &[BitMat] {
        &self.gens
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn base(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Every group element, bit-packed, for groups of order at most `cap`.
    ///
    /// Elements are the products of one transversal element per level,
    /// deepest level first; the sift decomposition makes that map a bijection
    /// onto the group, so each element appears exactly once.
    pub fn elements_packed(&self, cap: usize) -> Result<Vec<u64>> {
        assert!(self.dim <= 8, "packed enumeration requires dim <= 8");
        let order = self.order();
        if order > cap as u128 {
            return Err(Error::BudgetExhausted(format!(
                "group order {order} exceeds the element enumeration cap {cap}"
            )));
        }
        fn rec(levels: &[Vec<&BitMat>], prefix: BitMat, out: &mut Vec<u64>) {
            match levels.split_last() {
                None => out.push(prefix.pack8()),
                Some((deepest, rest)) => {
                    for t in deepest {
                        rec(rest, prefix.mul(t), out);
                    }
                }
            }
        }
        let transversals: Vec<Vec<&BitMat>> = self
            .levels
            .iter()
            .map(|l| {
                l.orbit.iter().map(|&p| l.transversal[p as usize].as_ref().unwrap()).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(order as usize);
        rec(&transversals, BitMat::identity(self.dim), &mut out);
        assert_eq!(out.len() as u128, order);
        Ok(out)
    }

    /// Strips `g` through the transversals. Returns the residue and the level
    /// it got stuck at (`levels.len()` when it passed every level).
    fn sift(&self, g: &BitMat) -> (usize, BitMat) {
        let mut residue = g.clone();
        for (i, level) in self.levels.iter().enumerate() {
            let image = residue.apply(level.base);
            match level.transversal[image as usize] {
                Some(ref u) => {
                    residue = residue.mul(&u.inverse().expect("transversal element"));
                }
                None => return (i, residue),
            }
        }
        (self.levels.len(), residue)
    }

    pub fn contains(&self, g: &BitMat) -> bool {
        let (level, residue) = self.sift(g);
        level == self.levels.len() && residue.is_identity()
    }

    /// Sift decomposition: transversal elements stripped per level, innermost
    /// last, so that `g = residue * u_(k-1) * ... * u_0` when membership holds.
    pub fn sift_decompose(&self, g: &BitMat) -> (BitMat, Vec<BitMat>) {
        let mut residue = g.clone();
        let mut strips = Vec::new();
        for level in &self.levels {
            let image = residue.apply(level.base);
            match level.transversal[image as usize] {
                Some(ref u) => {
                    residue = residue.mul(&u.inverse().expect("transversal element"));
                    strips.push(u.clone());
                }
                None => break,
            }
        }
        (residue, strips)
    }

    /// Adds a generator and restores chain completeness.
    pub fn add_generator(&mut self, g: BitMat) {
        assert_eq!(g.dim(), self.dim);
        if g.is_identity() || self.contains(&g) {
            return;
        }
        self.gens.push(g.clone());
        self.add_strong(0, g);
    }

    /// Installs a strong generator `h` that fixes the bases of all levels
    /// before `start`. The generator joins every level from `start` through
    /// the deepest level whose base prefix it fixes (a new final level is
    /// created when it fixes every existing base). Keeping generator sets
    /// nested downward like this is what makes sifting through deeper
    /// transversals a sound membership certificate at every level.
    fn add_strong(&mut self, start: usize, h: BitMat) {
        debug_assert!(!h.is_identity());
        let mut deepest = start;
        while deepest < self.levels.len() && h.apply(self.levels[deepest].base) == self.levels[deepest].base
        {
            deepest += 1;
        }
        if deepest == self.levels.len() {
            let base = (1..1u64 << self.dim)
                .find(|&p| h.apply(p) != p)
                .expect("non-identity element moves a nonzero point");
            self.levels.push(Level::new(self.dim, base));
        }
        for level in start..=deepest {
            self.levels[level].gens.push(h.clone());
            let old_len = self.levels[level].extend_orbit();

            // New Schreier generators: old points with the new generator, plus
            // all generators on newly reached points. Older combinations
            // already sift to identity and stay clean because transversal
            // entries never change once set.
            let mut tasks: Vec<(u64, usize)> = Vec::new();
            let gen_count = self.levels[level].gens.len();
            for idx in 0..self.levels[level].orbit.len() {
                let p = self.levels[level].orbit[idx];
                if idx < old_len {
                    tasks.push((p, gen_count - 1));
                } else {
                    for gi in 0..gen_count {
                        tasks.push((p, gi));
                    }
                }
            }
            for (p, gi) in tasks {
                let schreier = {
                    let lvl = &self.levels[level];
                    let gen = &lvl.gens[gi];
                    let q = gen.apply(p);
                    let u_p = lvl.transversal[p as usize].as_ref().unwrap();
                    let u_q = lvl.transversal[q as usize].as_ref().unwrap();
                    u_p.mul(gen).mul(&u_q.inverse().expect("transversal element"))
                };
                if schreier.is_identity() {
                    continue;
                }
                // Sift through the tail of the chain only; a non-identity
                // residue is a new strong generator one level down.
                let mut residue = schreier;
                for lvl in self.levels.iter().skip(level + 1) {
                    let image = residue.apply(lvl.base);
                    match lvl.transversal[image as usize] {
                        Some(ref u) => {
                            residue = residue.mul(&u.inverse().expect("transversal element"))
                        }
                        None => break,
                    }
                }
                if !residue.is_identity() {
                    self.add_strong(level + 1, residue);
                }
            }
        }
    }
}

/// Builds a stabilizer chain from a generator list.
pub fn bsgs_build(dim: usize, gens: Vec<BitMat>) -> StabChain {
    let mut chain = StabChain::trivial(dim);
    for g in gens {
        chain.add_generator(g);
    }
    chain
}

/// Exact-uniform random elements of a chain's group: one uniformly chosen
/// transversal element per level, multiplied together.
pub struct RandomSampler<'c> {
    chain: &'c StabChain,
    rng: ChaCha8Rng,
}

impl<'c> RandomSampler<'c> {
    pub fn new(chain: &'c StabChain, seed: u64) -> Self {
        RandomSampler { chain, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn next_element(&mut self) -> BitMat {
        let mut acc = BitMat::identity(self.chain.dim);
        for level in self.chain.levels.iter().rev() {
            let p = level.orbit[self.rng.gen_range(0..level.orbit.len())];
            acc = acc.mul(level.transversal[p as usize].as_ref().unwrap());
        }
        acc
    }
}

/// Grows a chain from a stream of stabilizer elements until its order reaches
/// `target`. Errors if the stream dries up first.
pub(crate) fn close_to_target(
    dim: usize,
    elements: impl Iterator<Item = BitMat>,
    target: u128,
) -> Result<StabChain> {
    let mut chain = StabChain::trivial(dim);
    if chain.order() == target {
        return Ok(chain);
    }
    for g in elements {
        chain.add_generator(g);
        let order = chain.order();
        if order == target {
            return Ok(chain);
        }
        assert!(order < target && target % order == 0, "stabilizer overshoot: Lagrange violated");
    }
    Err(Error::Verification(format!(
        "stabilizer element stream exhausted at order {} below target {}",
        chain.order(),
        target
    )))
}

/// Budget knobs for [`stabilizer_birthday`].
#[derive(Clone, Copy, Debug)]
pub struct BirthdayBudget {
    /// Random-sample cap for the collision phase.
    pub max_samples: u64,
    /// Node cap for the exact small-orbit breadth-first attempt.
    pub bfs_cap: usize,
}

impl Default for BirthdayBudget {
    fn default() -> Self {
        BirthdayBudget { max_samples: 8_000_000, bfs_cap: 1 << 21 }
    }
}

/// Stabilizer of `point` under the group of `parent`, acting by `apply`.
///
/// Tries three routes in order: (1) every parent generator already fixes the
/// point, so the stabilizer is the whole group; (2) the orbit fits under
/// `budget.bfs_cap`, so a breadth-first enumeration gives the exact orbit size
/// and Schreier generators are drawn until the Lagrange-exact order is hit;
/// (3) birthday collisions among images of uniform random elements, each
/// collision yielding one uniformly distributed stabilizer element, collected
/// until `target_order` (when given) is reached.
///
/// Route (3) without a target returns whatever subgroup the budget produced;
/// the caller certifies completeness (e.g. via the index-sum identity). With a
/// target, exhausting the budget early is an error.
pub fn stabilizer_birthday<P, F>(
    parent: &StabChain,
    point: &P,
    apply: F,
    target_order: Option<u128>,
    seed: u64,
    budget: &BirthdayBudget,
) -> Result<StabChain>
where
    P: Eq + std::hash::Hash + Clone,
    F: Fn(&BitMat, &P) -> P,
{
    let dim = parent.dim();
    if let Some(settled) = stabilizer_exact_routes(parent, point, &apply, target_order, budget.bfs_cap) {
        return settled;
    }

    // Birthday phase. Collision of two samples with equal images gives a
    // stabilizer element distributed uniformly in the true stabilizer.
    let mut chain = StabChain::trivial(dim);
    let mut sampler = RandomSampler::new(parent, seed);
    let mut seen: HashMap<P, u64> = HashMap::new();
    seen.insert(point.clone(), BitMat::identity(dim).pack8());
    for _ in 0..budget.max_samples {
        let g = sampler.next_element();
        let image = apply(&g, point);
        match seen.get(&image) {
            None => {
                seen.insert(image, g.pack8());
            }
            Some(&packed) => {
                let other = BitMat::unpack8(dim, packed);
                let s = g.mul(&other.inverse().expect("group element"));
                if s.is_identity() || chain.contains(&s) {
                    continue;
                }
                assert!(apply(&s, point) == *point, "collision element must fix the point");
                chain.add_generator(s);
                if let Some(t) = target_order {
                    let order = chain.order();
                    if order == t {
                        return Ok(chain);
                    }
                    if order > t || t % order != 0 {
                        return Err(Error::Verification(format!(
                            "stabilizer order {order} incompatible with hint {t}"
                        )));
                    }
                }
            }
        }
    }
    match target_order {
        Some(t) => Err(Error::BudgetExhausted(format!(
            "birthday stabilizer stalled at order {} of {} after {} samples",
            chain.order(),
            t,
            budget.max_samples
        ))),
        None => Ok(chain),
    }
}

/// Routes that settle a stabilizer without random collisions: the whole group
/// already fixes the point, or the orbit fits under `bfs_cap` and is
/// enumerated exactly. `None` means the caller must fall back to collisions.
fn stabilizer_exact_routes<P, F>(
    parent: &StabChain,
    point: &P,
    apply: &F,
    target_order: Option<u128>,
    bfs_cap: usize,
) -> Option<Result<StabChain>>
where
    P: Eq + std::hash::Hash + Clone,
    F: Fn(&BitMat, &P) -> P,
{
    if parent.generators().iter().all(|g| apply(g, point) == *point) {
        return Some(Ok(parent.clone()));
    }
    let bfs = bounded_orbit(parent.generators(), point, apply, bfs_cap)?;
    let orbit_size = bfs.orbit.len() as u128;
    assert!(parent.order() % orbit_size == 0, "orbit size must divide the group order");
    let target = parent.order() / orbit_size;
    if let Some(t) = target_order {
        if t != target {
            return Some(Err(Error::Verification(format!(
                "stabilizer order hint {t} contradicts exact orbit computation {target}"
            ))));
        }
    }
    let gens = parent.generators();
    let schreier = (0..bfs.orbit.len()).flat_map(|slot| {
        let bfs = &bfs;
        (0..gens.len()).map(move |gi| {
            let u_p = bfs.transporter(gens, slot);
            let q = apply(&gens[gi], &bfs.orbit[slot]);
            let q_slot = bfs.slot_of[&q] as usize;
            let u_q = bfs.transporter(gens, q_slot);
            u_p.mul(&gens[gi]).mul(&u_q.inverse().expect("group element"))
        })
    });
    Some(close_to_target(
        parent.dim(),
        schreier.inspect(|s| debug_assert!(apply(s, point) == *point)),
        target,
    ))
}

/// Parallel capped-table variant of [`stabilizer_birthday`] for `u64` point
/// spaces whose orbits are far too large to enumerate or even to table in
/// full. Random images of the point go into a fixed-size open-addressed
/// table; two group elements mapping the point to the same image combine into
/// one stabilizer element. Output is deterministic for a fixed seed
/// regardless of worker count: sampling is parallel over fixed-size chunks
/// with per-chunk derived seeds, and table commits happen sequentially in
/// chunk order.
///
/// Expected samples to one collision are `orbit size / table size`, so the
/// caller should size `table_slots` as large as its memory budget allows
/// (16 bytes per slot). The zero point is reserved as the empty-slot marker.
pub fn stabilizer_birthday_capped<F>(
    parent: &StabChain,
    point: u64,
    apply: F,
    target_order: u128,
    seed: u64,
    table_slots: usize,
    max_samples: u64,
) -> Result<StabChain>
where
    F: Fn(&BitMat, u64) -> u64 + Sync,
{
    assert!(point != 0, "the zero point is reserved as the table's empty marker");
    assert!(parent.dim() <= 8);
    let by_ref = |g: &BitMat, p: &u64| apply(g, *p);
    if let Some(settled) =
        stabilizer_exact_routes(parent, &point, &by_ref, Some(target_order), 1 << 21)
    {
        return settled;
    }

    let dim = parent.dim();
    let mut chain = StabChain::trivial(dim);
    if chain.order() == target_order {
        return Ok(chain);
    }
    let slots = table_slots.next_power_of_two();
    let shift = 64 - slots.trailing_zeros();
    let index_mask = slots - 1;
    let mut keys = vec![0u64; slots];
    let mut vals = vec![0u64; slots];
    // Stop inserting at 7/8 load so linear probes always hit an empty slot.
    let fill_cap = slots - slots / 8;
    let mut filled = 0usize;

    const CHUNK: u64 = 1 << 18;
    let wave = rayon::current_num_threads().max(1) as u64 * 2;
    let mut next_chunk = 0u64;
    let mut sampled = 0u64;
    while sampled < max_samples {
        let batches: Vec<Vec<(u64, u64)>> = (next_chunk..next_chunk + wave)
            .into_par_iter()
            .map(|ci| {
                let chunk_seed = seed ^ (ci + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                let mut sampler = RandomSampler::new(parent, chunk_seed);
                (0..CHUNK)
                    .map(|_| {
                        let g = sampler.next_element();
                        (apply(&g, point), g.pack8())
                    })
                    .collect()
            })
            .collect();
        next_chunk += wave;
        sampled += wave * CHUNK;
        for (image, packed) in batches.into_iter().flatten() {
            let candidate = if image == point {
                Some(BitMat::unpack8(dim, packed))
            } else {
                let mut idx = (image.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> shift) as usize;
                loop {
                    let key = keys[idx];
                    if key == 0 {
                        if filled < fill_cap {
                            keys[idx] = image;
                            vals[idx] = packed;
                            filled += 1;
                        }
                        break None;
                    }
                    if key == image {
                        let other = BitMat::unpack8(dim, vals[idx]);
                        let g = BitMat::unpack8(dim, packed);
                        break Some(g.mul(&other.inverse().expect("group element")));
                    }
                    idx = (idx + 1) & index_mask;
                }
            };
            let Some(s) = candidate else { continue };
            if s.is_identity() || chain.contains(&s) {
                continue;
            }
            assert!(apply(&s, point) == point, "collision element must fix the point");
            chain.add_generator(s);
            let order = chain.order();
            if order == target_order {
                return Ok(chain);
            }
            if order > target_order || target_order % order != 0 {
                return Err(Error::Verification(format!(
                    "stabilizer order {order} incompatible with target {target_order}"
                )));
            }
        }
    }
    Err(Error::BudgetExhausted(format!(
        "capped birthday search stalled at order {} of {} after {} samples",
        chain.order(),
        target_order,
        sampled
    )))
}

/// Fully enumerated bounded orbit with parent links for transporter rebuilds.
struct BfsOrbit<P> {
    orbit: Vec<P>,
    /// `(parent slot, generator index)` per slot; slot 0 is the root.
    links: Vec<(u32, u8)>,
    slot_of: HashMap<P, u32>,
}

impl<P: Eq + std::hash::Hash + Clone> BfsOrbit<P> {
    /// Transporter mapping the orbit root to the point at `slot`.
    fn transporter(&self, gens: &[BitMat], mut slot: usize) -> BitMat {
        let mut path = Vec::new();
        while slot != 0 {
            let (parent, gi) = self.links[slot];
            path.push(gi);
            slot = parent as usize;
        }
        let mut acc = BitMat::identity(gens[0].dim());
        for &gi in path.iter().rev() {
            acc = acc.mul(&gens[gi as usize]);
        }
        acc
    }
}

/// Breadth-first orbit of `point` capped at `cap` nodes; `None` when the orbit
/// is larger than the cap.
fn bounded_orbit<P, F>(gens: &[BitMat], point: &P, apply: &F, cap: usize) -> Option<BfsOrbit<P>>
where
    P: Eq + std::hash::Hash + Clone,
    F: Fn(&BitMat, &P) -> P,
{
    let mut slot_of: HashMap<P, u32> = HashMap::new();
    let mut orbit = vec![point.clone()];
    let mut links = vec![(0u32, 0u8)];
    slot_of.insert(point.clone(), 0);
    let mut head = 0;
    while head < orbit.len() {
        for (gi, g) in gens.iter().enumerate() {
            let q = apply(g, &orbit[head]);
            if !slot_of.contains_key(&q) {
                if orbit.len() >= cap {
                    return None;
                }
                slot_of.insert(q.clone(), orbit.len() as u32);
                links.push((head as u32, gi as u8));
                orbit.push(q);
            }
        }
        head += 1;
    }
    Some(BfsOrbit { orbit, links, slot_of })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{gl_generators, gl_order};

    /// Structural soundness of a chain: every level's generators fix all
    /// shallower bases, and every Schreier generator of every level sifts to
    /// the identity through the tail of the chain.
    fn assert_chain_sound(chain: &StabChain) {
        for (li, lvl) in chain.levels.iter().enumerate() {
            for g in &lvl.gens {
                for blvl in chain.levels.iter().take(li) {
                    assert_eq!(g.apply(blvl.base), blvl.base, "nesting violated at level {li}");
                }
            }
            for &p in &lvl.orbit {
                for g in &lvl.gens {
                    let q = g.apply(p);
                    let u_p = lvl.transversal[p as usize].as_ref().unwrap();
                    let u_q = lvl.transversal[q as usize].as_ref().unwrap();
                    let mut r = u_p.mul(g).mul(&u_q.inverse().unwrap());
                    for tl in &chain.levels[li + 1..] {
                        let img = r.apply(tl.base);
                        let u = tl.transversal[img as usize]
                            .as_ref()
                            .expect("Schreier generator image must be in a deeper orbit");
                        r = r.mul(&u.inverse().unwrap());
                    }
                    assert!(r.is_identity(), "dirty Schreier generator at level {li}");
                }
            }
        }
    }

    #[test]
    fn chains_are_structurally_sound() {
        for d in 2..=5 {
            assert_chain_sound(&bsgs_build(d, gl_generators(d)));
        }
    }

    /// Chain order for random 2-generated subgroups of `GL(3, 2)` must match
    /// a plain multiplicative closure of the same generators.
    #[test]
    fn subgroup_orders_match_closure_d3() {
        let gl3 = bsgs_build(3, gl_generators(3));
        let mut sampler = RandomSampler::new(&gl3, 7);
        for _ in 0..25 {
            let gens = vec![sampler.next_element(), sampler.next_element()];
            let mut seen: std::collections::HashSet<u64> =
                [BitMat::identity(3).pack8()].into_iter().collect();
            let mut frontier: Vec<BitMat> = vec![BitMat::identity(3)];
            while let Some(x) = frontier.pop() {
                for g in &gens {
                    let y = x.mul(g);
                    if seen.insert(y.pack8()) {
                        frontier.push(y);
                    }
                }
            }
            let chain = bsgs_build(3, gens);
            assert_eq!(chain.order(), seen.len() as u128);
            assert_chain_sound(&chain);
        }
    }

    #[test]
    fn gl_chain_orders_match_formula() {
        for d in 1..=8 {
            let chain = bsgs_build(d, gl_generators(d));
            assert_eq!(chain.order(), gl_order(d), "d = {d}");
        }
    }

    #[test]
    fn sift_round_trip() {
        let chain = bsgs_build(5, gl_generators(5));
        let mut sampler = RandomSampler::new(&chain, 99);
        for _ in 0..100 {
            let g = sampler.next_element();
            assert!(chain.contains(&g));
            let (residue, strips) = chain.sift_decompose(&g);
            assert!(residue.is_identity());
            let mut acc = residue;
            for u in strips.iter().rev() {
                acc = acc.mul(u);
            }
            assert_eq!(acc, g);
        }
    }

    #[test]
    fn sampler_is_uniform_on_gl3() {
        // 168000 draws over a 168-element group: every count within 5 sigma.
        let chain = bsgs_build(3, gl_generators(3));
        let mut counts: HashMap<u64, u64> = HashMap::new();
        let mut sampler = RandomSampler::new(&chain, 20240101);
        let draws = 168_000u64;
        for _ in 0..draws {
            *counts.entry(sampler.next_element().pack8()).or_default() += 1;
        }
        assert_eq!(counts.len(), 168);
        let expect = draws as f64 / 168.0;
        let sigma = (draws as f64 * (1.0 / 168.0) * (167.0 / 168.0)).sqrt();
        for (_, &c) in &counts {
            assert!((c as f64 - expect).abs() < 5.0 * sigma, "count {c} vs {expect}");
        }
    }

    #[test]
    fn trivial_and_subgroup_chains() {
        let chain = StabChain::trivial(4);
        assert_eq!(chain.order(), 1);
        assert!(chain.contains(&BitMat::identity(4)));
        // <single transvection> has order 2.
        let mut rows: Vec<u64> = (0..4).map(|i| 1u64 << i).collect();
        rows[0] = 0b11;
        let t = BitMat::from_rows(4, rows);
        let chain = bsgs_build(4, vec![t.clone()]);
        assert_eq!(chain.order(), 2);
        assert!(chain.contains(&t));
        assert!(!chain.contains(&gl_generators(4)[0]));
    }

    #[test]
    fn elements_packed_enumerates_each_element_once() {
        let chain = bsgs_build(3, gl_generators(3));
        let elems = chain.elements_packed(1 << 10).unwrap();
        assert_eq!(elems.len(), 168);
        let distinct: std::collections::HashSet<u64> = elems.iter().copied().collect();
        assert_eq!(distinct.len(), 168);
        for &p in &elems {
            assert_eq!(BitMat::unpack8(3, p).rank(), 3);
        }
        assert!(chain.elements_packed(100).is_err());
    }

    #[test]
    fn capped_birthday_small_orbit_takes_exact_route() {
        let chain = bsgs_build(5, gl_generators(5));
        // Orbit of a nonzero vector is the 31 nonzero vectors.
        let target = chain.order() / 31;
        let apply = |g: &BitMat, p: u64| g.apply(p);
        let stab =
            stabilizer_birthday_capped(&chain, 1, apply, target, 7, 1 << 12, 1 << 22).unwrap();
        assert_eq!(stab.order(), target);
        for g in stab.generators() {
            assert_eq!(g.apply(1), 1);
        }
    }

    #[test]
    fn capped_birthday_collision_path_hits_pointwise_stabilizer() {
        // GL(7,2) acting pointwise on independent 4-tuples of vectors: the
        // orbit (127*126*124*120 points) exceeds the internal exhaustive cap,
        // so this runs the real collision search. The stabilizer order is the
        // tail of the GL order product.
        let chain = bsgs_build(7, gl_generators(7));
        let point = 1u64 | 2 << 8 | 4 << 16 | 8 << 24;
        let apply = |g: &BitMat, p: u64| {
            g.apply(p & 0xff)
                | g.apply(p >> 8 & 0xff) << 8
                | g.apply(p >> 16 & 0xff) << 16
                | g.apply(p >> 24 & 0xff) << 24
        };
        let target = (112u128) * 96 * 64;
        let stab =
            stabilizer_birthday_capped(&chain, point, apply, target, 11, 1 << 20, 1 << 24).unwrap();
        assert_eq!(stab.order(), target);
        for g in stab.generators() {
            assert_eq!(apply(g, point), point);
        }
    }
}
