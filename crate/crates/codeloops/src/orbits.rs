//! Orbit partitions of coordinate spaces under a generated matrix group.
//!
//! A "space" here is the set of integers `0..2^space_bits`, each encoding one
//! coordinate block of parameter space (the triple part, the pair part under a
//! fixed triple part, or the singleton part under fixed pair and triple
//! parts). The group acts through closures built on [`crate::action`] data, so
//! the same engine serves every stage and the brute-force cross-check.
//!
//! Orbits are discovered by scanning seeds in increasing encoding and flooding
//! breadth-first, so each orbit's representative is its minimum encoding and
//! the whole structure is deterministic. Parent links per point record which
//! generator reached it first; composing them along the tree yields an
//! explicit transporter matrix from the representative to any point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::action::ActionData;
use crate::gf2::BitMat;
use crate::group::{close_to_target, StabChain};
use crate::{Error, Result};

/// Construction knobs for [`orbit_partition`].
#[derive(Clone, Copy, Debug)]
pub struct PartitionOptions {
    /// Store parent links (needed for transporters and Schreier stabilizers).
    pub with_parents: bool,
    /// Store contiguous per-orbit point lists (needed for point sampling).
    pub with_visit_lists: bool,
    /// Hard cap on the bytes this partition may allocate.
    pub memory_budget: u64,
    /// Spaces with at least this many bits flood each frontier in parallel.
    pub parallel_threshold_bits: u32,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions {
            with_parents: true,
            with_visit_lists: true,
            memory_budget: 4 << 30,
            parallel_threshold_bits: 24,
        }
    }
}

/// A complete orbit partition of `0..2^space_bits`.
pub struct OrbitIndex {
    space_bits: u32,
    actions: Vec<ActionData>,
    orbit_of: Vec<u32>,
    parent_point: Option<Vec<u32>>,
    parent_gen: Option<Vec<u8>>,
    reps: Vec<u64>,
    sizes: Vec<u64>,
    visit_offsets: Option<Vec<u64>>,
    visit_points: Option<Vec<u32>>,
}

const UNSEEN: u32 = u32::MAX;

/// Partitions `0..2^space_bits` into orbits of the group generated by
/// `actions`, acting by `apply`.
pub fn orbit_partition<F>(
    actions: Vec<ActionData>,
    space_bits: u32,
    apply: F,
    opts: &PartitionOptions,
) -> Result<OrbitIndex>
where
    F: Fn(&ActionData, u64) -> u64 + Sync,
{
    assert!(space_bits <= 34, "space too large to index");
    assert!(!actions.is_empty());
    let n = 1usize << space_bits;
    let per_point = 4
        + if opts.with_parents { 5 } else { 0 }
        + if opts.with_visit_lists { 4 } else { 0 };
    let need = (n as u64) * per_point as u64;
    if need > opts.memory_budget {
        return Err(Error::MemoryBudget { need, budget: opts.memory_budget });
    }

    let mut orbit_of = vec![UNSEEN; n];
    let mut parent_point = opts.with_parents.then(|| vec![0u32; n]);
    let mut parent_gen = opts.with_parents.then(|| vec![0u8; n]);
    let mut reps: Vec<u64> = Vec::new();
    let mut sizes: Vec<u64> = Vec::new();

    let parallel = space_bits >= opts.parallel_threshold_bits;
    let mut frontier: Vec<u32> = Vec::new();
    let mut next_frontier: Vec<u32> = Vec::new();
    for seed in 0..n {
        if orbit_of[seed] != UNSEEN {
            continue;
        }
        let orbit_id = reps.len() as u32;
        reps.push(seed as u64);
        orbit_of[seed] = orbit_id;
        if let Some(pp) = parent_point.as_mut() {
            pp[seed] = seed as u32;
        }
        let mut size = 1u64;
        frontier.clear();
        frontier.push(seed as u32);
        while !frontier.is_empty() {
            next_frontier.clear();
            if parallel && frontier.len() >= 1024 {
                // Flood in chunks: image computation is parallel, commits are
                // sequential in frontier-then-generator order, so the forest
                // is identical to the sequential one.
                const CHUNK: usize = 1 << 18;
                for chunk in frontier.chunks(CHUNK) {
                    let computed: Vec<Vec<u64>> = chunk
                        .par_iter()
                        .map(|&p| {
                            actions.iter().map(|a| apply(a, p as u64)).collect::<Vec<u64>>()
                        })
                        .collect();
                    for (ci, &p) in chunk.iter().enumerate() {
                        for (gi, &q) in computed[ci].iter().enumerate() {
                            let qi = q as usize;
                            if orbit_of[qi] == UNSEEN {
                                orbit_of[qi] = orbit_id;
                                if let Some(pp) = parent_point.as_mut() {
                                    pp[qi] = p;
                                }
                                if let Some(pg) = parent_gen.as_mut() {
                                    pg[qi] = gi as u8;
                                }
                                size += 1;
                                next_frontier.push(q as u32);
                            }
                        }
                    }
                }
            } else {
                for &p in &frontier {
                    for (gi, a) in actions.iter().enumerate() {
                        let q = apply(a, p as u64) as usize;
                        if orbit_of[q] == UNSEEN {
                            orbit_of[q] = orbit_id;
                            if let Some(pp) = parent_point.as_mut() {
                                pp[q] = p;
                            }
                            if let Some(pg) = parent_gen.as_mut() {
                                pg[q] = gi as u8;
                            }
                            size += 1;
                            next_frontier.push(q as u32);
                        }
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next_frontier);
        }
        sizes.push(size);
    }

    let (visit_offsets, visit_points) = if opts.with_visit_lists {
        let mut offsets = vec![0u64; reps.len() + 1];
        for (orb, &s) in sizes.iter().enumerate() {
            offsets[orb + 1] = offsets[orb] + s;
        }
        let mut cursor = offsets.clone();
        let mut points = vec![0u32; n];
        for (p, &orb) in orbit_of.iter().enumerate() {
            points[cursor[orb as usize] as usize] = p as u32;
            cursor[orb as usize] += 1;
        }
        (Some(offsets), Some(points))
    } else {
        (None, None)
    };

    Ok(OrbitIndex {
        space_bits,
        actions,
        orbit_of,
        parent_point,
        parent_gen,
        reps,
        sizes,
        visit_offsets,
        visit_points,
    })
}

impl std::fmt::Debug for OrbitIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OrbitIndex")
            .field("space_bits", &self.space_bits)
            .field("orbits", &self.reps.len())
            .finish_non_exhaustive()
    }
}

impl OrbitIndex {
    pub fn space_bits(&self) -> u32 {
        self.space_bits
    }

    pub fn orbit_count(&self) -> usize {
        self.reps.len()
    }

    /// Minimum-encoding representative of each orbit, in discovery order
    /// (which is increasing representative encoding).
    pub fn reps(&self) -> &[u64] {
        &self.reps
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn orbit_id(&self, point: u64) -> u32 {
        self.orbit_of[point as usize]
    }

    pub fn actions(&self) -> &[ActionData] {
        &self.actions
    }

    /// Points of one orbit in increasing encoding; requires visit lists.
    pub fn orbit_points(&self, orbit: u32) -> &[u32] {
        let offsets = self.visit_offsets.as_ref().expect("visit lists not built");
        let points = self.visit_points.as_ref().expect("visit lists not built");
        &points[offsets[orbit as usize] as usize..offsets[orbit as usize + 1] as usize]
    }

    /// Group element mapping the orbit representative to `point`, composed
    /// from the parent-link forest. Requires parent links.
    pub fn transporter(&self, point: u64) -> BitMat {
        let pp = self.parent_point.as_ref().expect("parent links not built");
        let pg = self.parent_gen.as_ref().expect("parent links not built");
        let mut path: Vec<u8> = Vec::new();
        let mut cur = point as u32;
        while pp[cur as usize] != cur {
            path.push(pg[cur as usize]);
            cur = pp[cur as usize];
        }
        let mut acc = BitMat::identity(self.actions[0].dim());
        for &gi in path.iter().rev() {
            acc = acc.mul(self.actions[gi as usize].element());
        }
        acc
    }

    /// Stabilizer of an orbit representative inside the acting group.
    ///
    /// The target order is Lagrange-exact (`parent order / orbit size`), so
    /// the chain is provably complete on return. Elements come from Schreier
    /// generators at seeded-random orbit points; if that random stream stalls,
    /// the full deterministic Schreier enumeration finishes the job.
    pub fn stabilizer_from_schreier<F>(
        &self,
        orbit: u32,
        parent: &StabChain,
        apply: F,
        seed: u64,
    ) -> Result<StabChain>
    where
        F: Fn(&ActionData, u64) -> u64,
    {
        let size = self.sizes[orbit as usize] as u128;
        assert!(parent.order() % size == 0, "orbit size must divide group order");
        let target = parent.order() / size;
        if size == 1 {
            return Ok(parent.clone());
        }
        let points = self.orbit_points(orbit);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random_phase = 4096usize;
        let dim = parent.dim();
        let schreier = |p: u64, gi: usize, this: &Self| -> BitMat {
            let u_p = this.transporter(p);
            let q = apply(&this.actions[gi], p);
            let u_q = this.transporter(q);
            u_p.mul(this.actions[gi].element()).mul(&u_q.inverse().expect("group element"))
        };
        let random_stream = (0..random_phase).map(|_| {
            let p = points[rng.gen_range(0..points.len())] as u64;
            let gi = rng.gen_range(0..self.actions.len());
            schreier(p, gi, self)
        });
        let exhaustive_stream = points
            .iter()
            .flat_map(|&p| (0..self.actions.len()).map(move |gi| (p as u64, gi)))
            .map(|(p, gi)| schreier(p, gi, self));
        close_to_target(dim, random_stream.chain(exhaustive_stream), target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::build_action;
    use crate::gf2::{gl_generators, gl_order};
    use crate::group::bsgs_build;
    use crate::subsets::SubsetTables;

    fn triple_actions(d: usize) -> Vec<ActionData> {
        gl_generators(d).into_iter().map(|g| build_action(&g).unwrap()).collect()
    }

    #[test]
    fn cubic_form_orbits_d4() {
        // All nonzero alternating trilinear forms on F_2^4 are equivalent:
        // two orbits, sizes 1 and 15.
        let t = SubsetTables::get(4);
        let idx = orbit_partition(
            triple_actions(4),
            t.triple_count() as u32,
            |a, x| a.act3(x),
            &PartitionOptions::default(),
        )
        .unwrap();
        assert_eq!(idx.orbit_count(), 2);
        assert_eq!(idx.reps(), &[0, 1]);
        assert_eq!(idx.sizes(), &[1, 15]);
    }

    #[test]
    fn transporters_map_rep_to_point() {
        let idx = orbit_partition(
            triple_actions(5),
            SubsetTables::get(5).triple_count() as u32,
            |a, x| a.act3(x),
            &PartitionOptions::default(),
        )
        .unwrap();
        for orbit in 0..idx.orbit_count() as u32 {
            let rep = idx.reps()[orbit as usize];
            for &p in idx.orbit_points(orbit).iter().step_by(97) {
                let t = idx.transporter(p as u64);
                let a = build_action(&t).unwrap();
                assert_eq!(a.act3(rep), p as u64);
            }
        }
    }

    #[test]
    fn stabilizer_orders_on_cubic_forms_d4_d5() {
        // Known stabilizer orders of the zero form and a single triple.
        for (d, expect) in [(4usize, 1344u128), (5, 64512)] {
            let chain = bsgs_build(d, gl_generators(d));
            let idx = orbit_partition(
                triple_actions(d),
                SubsetTables::get(d).triple_count() as u32,
                |a, x| a.act3(x),
                &PartitionOptions::default(),
            )
            .unwrap();
            let zero_orbit = idx.orbit_id(0);
            let stab0 =
                idx.stabilizer_from_schreier(zero_orbit, &chain, |a, x| a.act3(x), 11).unwrap();
            assert_eq!(stab0.order(), gl_order(d));
            let one_orbit = idx.orbit_id(1);
            let stab1 =
                idx.stabilizer_from_schreier(one_orbit, &chain, |a, x| a.act3(x), 11).unwrap();
            assert_eq!(stab1.order(), expect);
            // Every chain generator really fixes the representative.
            for g in stab1.generators() {
                assert_eq!(build_action(g).unwrap().act3(1), 1);
            }
        }
    }

    #[test]
    fn parallel_and_sequential_floods_agree() {
        let make = |threshold: u32| {
            let opts = PartitionOptions { parallel_threshold_bits: threshold, ..Default::default() };
            orbit_partition(triple_actions(6), 20, |a, x| a.act3(x), &opts).unwrap()
        };
        let seq = make(64);
        let par = make(0);
        assert_eq!(seq.reps(), par.reps());
        assert_eq!(seq.sizes(), par.sizes());
        assert_eq!(seq.orbit_of, par.orbit_of);
        assert_eq!(seq.parent_point, par.parent_point);
    }

    #[test]
    fn memory_budget_is_enforced() {
        let opts = PartitionOptions { memory_budget: 16, ..Default::default() };
        let err = orbit_partition(triple_actions(4), 4, |a, x| a.act3(x), &opts).unwrap_err();
        assert!(matches!(err, Error::MemoryBudget { .. }));
    }
}
