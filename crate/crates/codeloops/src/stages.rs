//! Staged enumeration of the parameter space: associator forms first, then
//! commutator parts over a fixed form, then squaring parts over both. Also
//! holds the exhaustive small-dimension oracle and the canonical-form engine.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::action::{act2_point, act3_point, build_action, build_action_transposed, ActionData};
use crate::catalogue::{self, CatalogueEntry};
use crate::config::RunConfig;
use crate::gf2::{gl_generators, gl_order, BitMat};
use crate::group::{bsgs_build, stabilizer_birthday, stabilizer_birthday_capped, StabChain};
use crate::orbits::{orbit_partition, OrbitIndex, PartitionOptions};
use crate::polar::{parse_form, ParamVector, TriForm};
use crate::report::{EnumerationReport, FormRecord, OmegaSpec};
use crate::subsets::SubsetTables;
use crate::{Error, Result};

/// Form stabilizers at or below this order are enumerated element by element
/// and their orbit counts taken by fixed-point averaging; larger stabilizers
/// get the pair space partitioned instead.
const AVERAGING_CUTOFF: u128 = 1 << 22;

/// Sample budget for the capped randomized stabilizer searches backing the
/// dimension-8 form stabilizers. Sized at three times the expectation for the
/// worst form at the default table size.
const HEAVY_SAMPLE_BUDGET: u64 = 6_000_000_000;

/// One associator-form class: its catalogue row, the packed form word and the
/// full stabilizer chain of that word in `GL(d, 2)`.
pub struct FormClass {
    pub id: u32,
    pub word: u64,
    pub stab: StabChain,
}

impl FormClass {
    pub fn dim(&self) -> usize {
        self.stab.dim()
    }

    pub fn form(&self) -> TriForm {
        TriForm::from_bits(self.dim(), self.word as u128)
    }
}

fn entry_word(entry: &CatalogueEntry, dim: usize) -> Result<u64> {
    Ok(parse_form(entry.form, dim)?.word())
}

/// Largest power-of-two slot count whose 16-byte slots fit in half the budget.
fn collision_table_slots(memory_budget: u64) -> usize {
    let cap = (memory_budget / 32).clamp(1 << 20, 1 << 28);
    ((cap + 1).next_power_of_two() / 2) as usize
}

/// Stage 1: one [`FormClass`] per orbit of `GL(d, 2)` on the triple space,
/// in catalogue order and with catalogue representatives.
///
/// Dimensions up to 6 partition the whole triple space, so completeness is
/// direct. Dimensions 7 and 8 take the representatives from the built-in
/// catalogue and certify completeness through the index-sum identity, which
/// every dimension re-checks before returning. Each stabilizer order is also
/// matched against its catalogue row, so a wrong chain cannot escape.
pub fn enumerate_stage1(dim: usize, cfg: &RunConfig) -> Result<Vec<FormClass>> {
    if !(1..=8).contains(&dim) {
        return Err(Error::UnsupportedDim { dim, what: "staged enumeration" });
    }
    if dim == 8 && !cfg.allow_heavy {
        return Err(Error::HeavyGated(
            "dimension 8 needs hours and gigabytes".into(),
        ));
    }
    let entries = catalogue::entries(dim);
    let gl_chain = bsgs_build(dim, gl_generators(dim));

    let forms = if dim < 3 {
        // The triple space is a single point; the zero form is the only class.
        vec![FormClass { id: 0, word: 0, stab: gl_chain.clone() }]
    } else if dim <= 6 {
        stage1_by_partition(dim, entries, &gl_chain, cfg)?
    } else {
        stage1_by_search(dim, entries, &gl_chain, cfg)?
    };

    let orders: Vec<u128> = forms.iter().map(|f| f.stab.order()).collect();
    catalogue::verify_index_sum(dim, &orders)?;
    Ok(forms)
}

fn stage1_by_partition(
    dim: usize,
    entries: &[CatalogueEntry],
    gl_chain: &StabChain,
    cfg: &RunConfig,
) -> Result<Vec<FormClass>> {
    let actions: Vec<ActionData> =
        gl_generators(dim).iter().map(build_action).collect::<Result<_>>()?;
    let bits = SubsetTables::get(dim).triple_count() as u32;
    let opts = PartitionOptions { memory_budget: cfg.memory_budget, ..PartitionOptions::default() };
    let index = orbit_partition(actions, bits, |ad, a| ad.act3(a), &opts)?;
    if index.orbit_count() != entries.len() {
        return Err(Error::Verification(format!(
            "triple space at d = {dim} splits into {} orbits, catalogue lists {}",
            index.orbit_count(),
            entries.len()
        )));
    }
    let mut seen = vec![false; index.orbit_count()];
    let mut forms = Vec::with_capacity(entries.len());
    for entry in entries {
        let word = entry_word(entry, dim)?;
        let orbit = index.orbit_id(word);
        if std::mem::replace(&mut seen[orbit as usize], true) {
            return Err(Error::Verification(format!(
                "catalogue rows at d = {dim} repeat the orbit of {}",
                entry.form
            )));
        }
        let seed = cfg.stream_seed("stage1-stab", &[dim as u64, entry.id as u64]);
        let rep_stab = index.stabilizer_from_schreier(orbit, gl_chain, |ad, a| ad.act3(a), seed)?;
        // Conjugate the partition representative's stabilizer onto the
        // catalogue word: for t mapping representative to word, generators
        // map as h to t^-1 h t.
        let t = index.transporter(word);
        let tinv = t.inverse()?;
        let gens = rep_stab.generators().iter().map(|h| tinv.mul(h).mul(&t)).collect();
        let stab = bsgs_build(dim, gens);
        check_form_order(entry, &stab)?;
        forms.push(FormClass { id: entry.id, word, stab });
    }
    Ok(forms)
}

/// The triple spaces at `d = 7, 8` span `2^35` and `2^56` points, beyond any
/// partition. Representatives come from the catalogue; each stabilizer is a
/// randomized search driven to the Lagrange-exact catalogue order, and the
/// index-sum identity in [`enumerate_stage1`] then certifies that the rows
/// form a complete irredundant set of orbit representatives.
fn stage1_by_search(
    dim: usize,
    entries: &[CatalogueEntry],
    gl_chain: &StabChain,
    cfg: &RunConfig,
) -> Result<Vec<FormClass>> {
    let mut forms = Vec::with_capacity(entries.len());
    for entry in entries {
        let word = entry_word(entry, dim)?;
        let seed = cfg.stream_seed("stage1-stab", &[dim as u64, entry.id as u64]);
        let stab = if dim == 7 || word == 0 {
            stabilizer_birthday(
                gl_chain,
                &word,
                |g, &a| act3_point(g, a),
                Some(entry.stabilizer_order),
                seed,
                &cfg.birthday,
            )?
        } else {
            stabilizer_birthday_capped(
                gl_chain,
                word,
                |g, a| act3_point(g, a),
                entry.stabilizer_order,
                seed,
                collision_table_slots(cfg.memory_budget),
                HEAVY_SAMPLE_BUDGET,
            )?
        };
        check_form_order(entry, &stab)?;
        forms.push(FormClass { id: entry.id, word, stab });
    }
    Ok(forms)
}

fn check_form_order(entry: &CatalogueEntry, stab: &StabChain) -> Result<()> {
    if stab.order() != entry.stabilizer_order {
        return Err(Error::Verification(format!(
            "form {} at d = {}: computed stabilizer order {}, catalogue says {}",
            entry.form,
            entry.dim,
            stab.order(),
            entry.stabilizer_order
        )));
    }
    Ok(())
}

/// One commutator-part class over a fixed form: the minimal representative of
/// a pair-space orbit, its exact stabilizer inside the form stabilizer, and
/// the orbit size.
pub struct CommutatorClass {
    pub rep: u64,
    pub stab: StabChain,
    pub orbit_size: u64,
}

/// Stage 2: orbits of the form stabilizer on the pair space, each with a
/// provably complete stabilizer chain. Representatives come out in increasing
/// order of their packed encoding.
pub fn enumerate_stage2(form: &FormClass, cfg: &RunConfig) -> Result<Vec<CommutatorClass>> {
    let dim = form.dim();
    if dim < 8 {
        let index = stage2_partition(form, cfg, true)?;
        let word = form.word;
        (0..index.orbit_count() as u32)
            .map(|orbit| {
                let rep = index.reps()[orbit as usize];
                let seed =
                    cfg.stream_seed("stage2-stab", &[dim as u64, form.id as u64, rep]);
                let stab = index.stabilizer_from_schreier(
                    orbit,
                    &form.stab,
                    |ad, c| ad.act2(c, word),
                    seed,
                )?;
                Ok(CommutatorClass { rep, stab, orbit_size: index.sizes()[orbit as usize] })
            })
            .collect()
    } else {
        // The 2^28-point pair space still partitions, but visit lists would
        // add a gigabyte, so stabilizers come from the randomized search with
        // Lagrange-exact targets instead of Schreier generators.
        let index = stage2_partition(form, cfg, false)?;
        let word = form.word;
        (0..index.orbit_count() as u32)
            .map(|orbit| {
                let rep = index.reps()[orbit as usize];
                let size = index.sizes()[orbit as usize] as u128;
                assert!(
                    form.stab.order() % size == 0,
                    "orbit size must divide the form stabilizer order"
                );
                let seed =
                    cfg.stream_seed("stage2-stab", &[dim as u64, form.id as u64, rep]);
                let stab = stabilizer_birthday(
                    &form.stab,
                    &rep,
                    |g, &c| act2_point(g, c, word),
                    Some(form.stab.order() / size),
                    seed,
                    &cfg.birthday,
                )?;
                Ok(CommutatorClass { rep, stab, orbit_size: index.sizes()[orbit as usize] })
            })
            .collect()
    }
}

fn stage2_partition(form: &FormClass, cfg: &RunConfig, visit_lists: bool) -> Result<OrbitIndex> {
    let dim = form.dim();
    let bits = SubsetTables::get(dim).pair_count() as u32;
    let mut actions: Vec<ActionData> =
        form.stab.generators().iter().map(build_action).collect::<Result<_>>()?;
    if actions.is_empty() {
        // A trivial chain carries no generators; the partition machinery
        // still needs one action to run.
        actions.push(build_action(&BitMat::identity(dim))?);
    }
    let word = form.word;
    let opts = PartitionOptions {
        with_parents: true,
        with_visit_lists: visit_lists,
        memory_budget: cfg.memory_budget,
        parallel_threshold_bits: 20,
    };
    orbit_partition(actions, bits, |ad, c| ad.act2(c, word), &opts)
}

/// Stage 3: orbits of the squaring part under a joint stabilizer of the
/// commutator part `c` and the form `a`. Returns the orbit count and the
/// minimal representative of each orbit in increasing order.
pub fn enumerate_stage3(c: u64, a: u64, stab: &StabChain) -> Result<(u64, Vec<u64>)> {
    for g in stab.generators() {
        debug_assert_eq!(act3_point(g, a), a, "stage-3 generators must fix the form");
        debug_assert_eq!(act2_point(g, c, a), c, "stage-3 generators must fix the pair part");
    }
    let actions: Vec<ActionData> =
        stab.generators().iter().map(build_action).collect::<Result<_>>()?;
    let dim = stab.dim();
    let n = 1usize << dim;
    let mut seen = vec![false; n];
    let mut reps = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n as u64 {
        if seen[start as usize] {
            continue;
        }
        reps.push(start);
        seen[start as usize] = true;
        stack.push(start);
        while let Some(p) = stack.pop() {
            for ad in &actions {
                let q = ad.act1(p, c, a);
                if !seen[q as usize] {
                    seen[q as usize] = true;
                    stack.push(q);
                }
            }
        }
    }
    Ok((reps.len() as u64, reps))
}

/// Affine description of one stabilizer element acting on the joint
/// (pair part, squaring part) fiber over a fixed form `a`: returns the rows
/// of the joint linear part (pair bits low, squaring bits high), the joint
/// constant, and the same data restricted to the pair part alone.
///
/// `t` plays the transpose-side role in the twisted action, exactly as the
/// full action tables are built from the inverse of the group element.
fn stage23_affine(t: &BitMat, a: u64, dim: usize) -> (Vec<u64>, u64, Vec<u64>, u64) {
    let tables = SubsetTables::get(dim);
    let np = tables.pair_count();
    let tb = |r: usize, c: usize| t.row(r - 1) >> (c - 1) & 1;

    let mut pair_rows = vec![0u64; np];
    let mut pair_const = 0u64;
    for col in 0..np {
        let (u, v) = tables.pair_at(col);
        for (row, pr) in pair_rows.iter_mut().enumerate() {
            let (i, j) = tables.pair_at(row);
            *pr |= (tb(u, i) & tb(v, j) ^ tb(u, j) & tb(v, i)) << col;
        }
        let mut bit = 0u64;
        let mut rest = a;
        while rest != 0 {
            let (i, j, k) = tables.triple_at(rest.trailing_zeros() as usize);
            rest &= rest - 1;
            bit ^= tb(u, i) & tb(u, j) & tb(v, k)
                ^ tb(u, i) & tb(u, k) & tb(v, j)
                ^ tb(u, j) & tb(u, k) & tb(v, i)
                ^ tb(u, i) & tb(v, j) & tb(v, k)
                ^ tb(u, j) & tb(v, i) & tb(v, k)
                ^ tb(u, k) & tb(v, i) & tb(v, j);
        }
        pair_const |= bit << col;
    }

    let mut joint_rows = Vec::with_capacity(np + dim);
    for (row, &pr) in pair_rows.iter().enumerate() {
        let (i, j) = tables.pair_at(row);
        // The pair bit (i, j) feeds squaring coordinate u with weight
        // t(u, i) t(u, j).
        let mut high = 0u64;
        for u in 1..=dim {
            high |= (tb(u, i) & tb(u, j)) << (u - 1);
        }
        joint_rows.push(pr | high << np);
    }
    for i in 1..=dim {
        let mut row = 0u64;
        for u in 1..=dim {
            row |= tb(u, i) << (u - 1);
        }
        joint_rows.push(row << np);
    }
    let mut square_const = 0u64;
    for u in 1..=dim {
        let mut bit = 0u64;
        let mut rest = a;
        while rest != 0 {
            let (i, j, k) = tables.triple_at(rest.trailing_zeros() as usize);
            rest &= rest - 1;
            bit ^= tb(u, i) & tb(u, j) & tb(u, k);
        }
        square_const |= bit << (u - 1);
    }
    (joint_rows, pair_const | square_const << np, pair_rows, pair_const)
}

/// Number of solutions of `x * m = b` over GF(2) in `n` variables: zero when
/// the system is inconsistent, otherwise `2^(n - rank)`. Rows are columns of
/// the `n`-bit space; `b` reduces alongside the elimination, so a nonzero
/// residue certifies inconsistency.
fn affine_solution_count(mut rows: Vec<u64>, mut b: u64, n: usize) -> u64 {
    let mut rank = 0usize;
    for col in 0..n {
        let mask = 1u64 << col;
        if let Some(found) = (rank..rows.len()).position(|r| rows[r] & mask != 0) {
            rows.swap(rank, rank + found);
            let pivot = rows[rank];
            for row in rows.iter_mut().skip(rank + 1) {
                if *row & mask != 0 {
                    *row ^= pivot;
                }
            }
            if b & mask != 0 {
                b ^= pivot;
            }
            rank += 1;
        }
    }
    if b != 0 {
        0
    } else {
        1u64 << (n - rank)
    }
}

/// Orbit counts for one form by fixed-point averaging over every element of
/// its stabilizer: the orbit count equals the average number of fixed points.
/// Fixed points of an affine map `x -> xL + k` are the solutions of
/// `x(L + I) = k`. Summing over all elements makes inversion unnecessary,
/// since the action tables of a whole group are the group itself.
///
/// Returns (pair-part orbits, joint orbits); the joint count is the number of
/// loops with this form. This route materializes no representatives.
fn averaged_orbit_counts(form: &FormClass, _cfg: &RunConfig) -> Result<(u64, u64)> {
    let dim = form.dim();
    let np = SubsetTables::get(dim).pair_count();
    let word = form.word;
    let elements = form.stab.elements_packed(AVERAGING_CUTOFF as usize)?;
    let order = elements.len() as u128;
    let (joint_sum, pair_sum) = elements
        .par_iter()
        .map(|&packed| {
            let t = BitMat::unpack8(dim, packed);
            let (mut joint, joint_const, mut pair, pair_const) = stage23_affine(&t, word, dim);
            for (idx, row) in joint.iter_mut().enumerate() {
                *row ^= 1u64 << idx;
            }
            for (idx, row) in pair.iter_mut().enumerate() {
                *row ^= 1u64 << idx;
            }
            (
                affine_solution_count(joint, joint_const, np + dim) as u128,
                affine_solution_count(pair, pair_const, np) as u128,
            )
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    assert!(
        joint_sum % order == 0 && pair_sum % order == 0,
        "fixed-point sums must average to whole orbit counts"
    );
    Ok(((pair_sum / order) as u64, (joint_sum / order) as u64))
}

/// Which associator forms an enumeration covers.
#[derive(Clone, Debug)]
pub enum FormFilter {
    All,
    /// Only the zero form, counting the loops that are groups.
    ZeroOnly,
    /// Only the class of the given form.
    One(TriForm),
}

/// Full classification at dimension `dim`: every form class, its commutator
/// orbits and its loop count, cross-checked row by row against the catalogue.
pub fn enumerate_all(dim: usize, cfg: &RunConfig) -> Result<EnumerationReport> {
    enumerate_filtered(dim, cfg, &FormFilter::All)
}

/// Classification restricted to the forms selected by `filter`. Totals cover
/// the selected rows only. Every computed row is verified against its
/// catalogue entry; a mismatch is an error, never a silently wrong report.
pub fn enumerate_filtered(
    dim: usize,
    cfg: &RunConfig,
    filter: &FormFilter,
) -> Result<EnumerationReport> {
    cfg.install_workers();
    let forms = enumerate_stage1(dim, cfg)?;
    let selected: Vec<&FormClass> = match filter {
        FormFilter::All => forms.iter().collect(),
        FormFilter::ZeroOnly => {
            assert_eq!(forms[0].word, 0, "the zero form is always catalogued first");
            vec![&forms[0]]
        }
        FormFilter::One(f) => {
            if f.dim() != dim {
                return Err(Error::DimMismatch(format!(
                    "filter form has dimension {}, enumeration runs at {}",
                    f.dim(),
                    dim
                )));
            }
            let (id, _) = catalogue::match_catalogue(
                f,
                cfg.stream_seed("filter-match", &[dim as u64]),
                cfg.birthday.max_samples,
            )?;
            vec![&forms[id as usize]]
        }
    };

    let entries = catalogue::entries(dim);
    let mut records = Vec::with_capacity(selected.len());
    let mut total = 0u64;
    let mut zero_form_total = 0u64;
    for form in selected {
        let entry = &entries[form.id as usize];
        let (c_orbits, loops, reps) = enumerate_form(form, cfg)?;
        if c_orbits != entry.c_orbits || loops != entry.loops {
            return Err(Error::Verification(format!(
                "form {} at d = {dim}: computed {} pair classes and {} loops, \
                 catalogue says {} and {}",
                entry.form, c_orbits, loops, entry.c_orbits, entry.loops
            )));
        }
        total += loops;
        if form.word == 0 {
            zero_form_total = loops;
        }
        records.push(FormRecord {
            form: entry.form.to_string(),
            catalogue_id: Some(form.id),
            stabilizer_order: form.stab.order().to_string(),
            c_orbits,
            loops,
            representatives: reps
                .map(|list| list.iter().map(OmegaSpec::from_params).collect()),
        });
    }
    Ok(EnumerationReport { dim, total, zero_form_total, forms: records })
}

/// Pair classes, loop count and capped representatives for one form. Large
/// dimension-8 stabilizers are counted by fixed-point averaging (no
/// representatives); everything else walks stages 2 and 3.
fn enumerate_form(
    form: &FormClass,
    cfg: &RunConfig,
) -> Result<(u64, u64, Option<Vec<ParamVector>>)> {
    let dim = form.dim();
    if dim == 8 && form.stab.order() <= AVERAGING_CUTOFF {
        let (c_orbits, loops) = averaged_orbit_counts(form, cfg)?;
        return Ok((c_orbits, loops, None));
    }
    let classes = enumerate_stage2(form, cfg)?;
    let mut loops = 0u64;
    let mut reps: Vec<ParamVector> = Vec::new();
    for class in &classes {
        let (count, squares) = enumerate_stage3(class.rep, form.word, &class.stab)?;
        loops += count;
        for p in squares {
            if reps.len() == cfg.rep_cap {
                break;
            }
            reps.push(ParamVector::from_parts(dim, p, class.rep, form.word));
        }
    }
    Ok((classes.len() as u64, loops, (cfg.rep_cap > 0).then_some(reps)))
}

/// Which of the two twisted actions the exhaustive oracle exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionStyle {
    /// The action used throughout the staged pipeline.
    Standard,
    /// The transpose-side twist; orbit counts must come out identical.
    Transposed,
}

/// Union-find where the smaller root always wins, so every class root is the
/// minimal point of its class.
struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Every invertible `dim x dim` matrix over GF(2), by filtering all row
/// encodings through a rank check.
fn all_invertible(dim: usize) -> Vec<BitMat> {
    assert!(dim <= 4, "exhaustive matrix listing supports d <= 4");
    let mask = (1u64 << dim) - 1;
    let mut out = Vec::new();
    for enc in 0..1u64 << (dim * dim) {
        let rows: Vec<u64> = (0..dim).map(|r| enc >> (r * dim) & mask).collect();
        let m = BitMat::from_rows(dim, rows);
        if m.rank() == dim {
            out.push(m);
        }
    }
    out
}

/// Exhaustive oracle for small dimensions: applies every element of
/// `GL(d, 2)` to every parameter vector and collects orbits by union-find.
/// Shares nothing with the staged pipeline beyond the action tables: no
/// stabilizer chains, no Schreier generators, no catalogue constants feed the
/// counts. Representative lists use the same minimal-encoding convention, so
/// reports are comparable field by field with [`enumerate_all`].
pub fn brute_force_orbits(
    dim: usize,
    style: ActionStyle,
    cfg: &RunConfig,
) -> Result<EnumerationReport> {
    assert!((1..=4).contains(&dim), "exhaustive oracle supports d <= 4");
    cfg.install_workers();
    let tables = SubsetTables::get(dim);
    let np = tables.pair_count();
    let nt = tables.triple_count();
    let n = 1usize << (dim + np + nt);
    let pmask = (1u64 << dim) - 1;
    let cmask = (1u64 << np) - 1;

    let actions: Vec<ActionData> = all_invertible(dim)
        .iter()
        .map(|m| match style {
            ActionStyle::Standard => build_action(m),
            ActionStyle::Transposed => build_action_transposed(m),
        })
        .collect::<Result<_>>()?;
    assert_eq!(actions.len() as u128, gl_order(dim));

    // Waves keep image computation parallel while unions stay sequential.
    let mut uf = UnionFind::new(n);
    for wave in actions.chunks(64) {
        let images: Vec<Vec<u32>> = wave
            .par_iter()
            .map(|ad| {
                (0..n as u64)
                    .map(|e| {
                        let (p, c, a) = (e & pmask, e >> dim & cmask, e >> (dim + np));
                        let image = ad.act1(p, c, a)
                            | ad.act2(c, a) << dim
                            | ad.act3(a) << (dim + np);
                        image as u32
                    })
                    .collect()
            })
            .collect();
        for image in images {
            for (e, &f) in image.iter().enumerate() {
                uf.union(e as u32, f);
            }
        }
    }
    let orbit_reps: Vec<u64> = {
        let mut reps: Vec<u64> =
            (0..n as u32).filter(|&e| uf.find(e) == e).map(u64::from).collect();
        reps.sort_unstable();
        reps
    };

    // The form classes get their own union-find over the triple space.
    let mut forms_uf = UnionFind::new(1 << nt);
    for ad in &actions {
        for a in 0..1u64 << nt {
            forms_uf.union(a as u32, ad.act3(a) as u32);
        }
    }
    let entries = catalogue::entries(dim);
    let mut root_to_id: HashMap<u32, u32> = HashMap::new();
    for entry in entries {
        let word = entry_word(entry, dim)?;
        let prior = root_to_id.insert(forms_uf.find(word as u32), entry.id);
        assert!(prior.is_none(), "catalogue rows must hit distinct form orbits");
    }
    assert_eq!(
        root_to_id.len(),
        (0..1u32 << nt).filter(|&a| forms_uf.find(a) == a).count(),
        "catalogue must cover every form orbit"
    );

    let mut records = Vec::with_capacity(entries.len());
    let mut total = 0u64;
    let mut zero_form_total = 0u64;
    for entry in entries {
        let word = entry_word(entry, dim)?;
        let fixing: Vec<&ActionData> =
            actions.iter().filter(|ad| ad.act3(word) == word).collect();
        let stabilizer_order = fixing.len() as u128;

        let mut pair_uf = UnionFind::new(1 << np);
        for ad in &fixing {
            for c in 0..1u64 << np {
                pair_uf.union(c as u32, ad.act2(c, word) as u32);
            }
        }
        let c_orbits = (0..1u32 << np).filter(|&c| pair_uf.find(c) == c).count() as u64;

        let mine: Vec<u64> = orbit_reps
            .iter()
            .copied()
            .filter(|&e| root_to_id[&forms_uf.find((e >> (dim + np)) as u32)] == entry.id)
            .collect();
        let loops = mine.len() as u64;
        total += loops;
        if word == 0 {
            zero_form_total = loops;
        }
        let reps: Vec<OmegaSpec> = mine
            .iter()
            .take(cfg.rep_cap)
            .map(|&e| {
                let w =
                    ParamVector::from_parts(dim, e & pmask, e >> dim & cmask, e >> (dim + np));
                OmegaSpec::from_params(&w)
            })
            .collect();
        records.push(FormRecord {
            form: entry.form.to_string(),
            catalogue_id: Some(entry.id),
            stabilizer_order: stabilizer_order.to_string(),
            c_orbits,
            loops,
            representatives: (cfg.rep_cap > 0).then_some(reps),
        });
    }
    assert_eq!(total, orbit_reps.len() as u64, "every orbit must land in one form class");
    Ok(EnumerationReport { dim, total, zero_form_total, forms: records })
}

/// Canonical-form engine. Stage data is built once per dimension and lazily
/// per form, then reused across queries.
///
/// The canonical representative of an orbit is stage-minimal: the catalogue
/// form word, the minimal pair part in its orbit over the form stabilizer,
/// then the minimal squaring part over the joint stabilizer. That point is
/// also the numerically smallest encoding in the whole orbit, because the
/// packed encoding orders by form, then pair part, then squaring part.
pub struct Canonicalizer {
    dim: usize,
    cfg: RunConfig,
    forms: Vec<FormClass>,
    /// Triple-space partition and its orbit-to-form map, dimensions 3 to 6.
    triple_index: Option<(OrbitIndex, Vec<u32>)>,
    stage2: HashMap<u32, OrbitIndex>,
    stage3: HashMap<(u32, u64), StabChain>,
}

impl Canonicalizer {
    pub fn new(dim: usize, cfg: &RunConfig) -> Result<Self> {
        let forms = enumerate_stage1(dim, cfg)?;
        let triple_index = if (3..=6).contains(&dim) {
            let actions: Vec<ActionData> =
                gl_generators(dim).iter().map(build_action).collect::<Result<_>>()?;
            let bits = SubsetTables::get(dim).triple_count() as u32;
            let opts = PartitionOptions {
                with_parents: true,
                with_visit_lists: false,
                memory_budget: cfg.memory_budget,
                parallel_threshold_bits: 24,
            };
            let index = orbit_partition(actions, bits, |ad, a| ad.act3(a), &opts)?;
            let mut orbit_to_form = vec![u32::MAX; index.orbit_count()];
            for form in &forms {
                orbit_to_form[index.orbit_id(form.word) as usize] = form.id;
            }
            assert!(
                orbit_to_form.iter().all(|&id| id != u32::MAX),
                "every triple orbit must carry a catalogue id"
            );
            Some((index, orbit_to_form))
        } else {
            None
        };
        Ok(Canonicalizer {
            dim,
            cfg: cfg.clone(),
            forms,
            triple_index,
            stage2: HashMap::new(),
            stage3: HashMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn forms(&self) -> &[FormClass] {
        &self.forms
    }

    /// Catalogue id of the form's class and a matrix carrying the form onto
    /// the catalogue word.
    fn form_reduction(&self, a: u64) -> Result<(u32, BitMat)> {
        if self.dim < 3 {
            return Ok((0, BitMat::identity(self.dim)));
        }
        if let Some((index, orbit_to_form)) = &self.triple_index {
            let id = orbit_to_form[index.orbit_id(a) as usize];
            let word = self.forms[id as usize].word;
            // transporter(x) carries the partition representative to x, so
            // rep -> a inverted and chained with rep -> word carries a to
            // the catalogue word.
            let to_a = index.transporter(a);
            let to_word = index.transporter(word);
            let g = to_a.inverse()?.mul(&to_word);
            debug_assert_eq!(act3_point(&g, a), word);
            return Ok((id, g));
        }
        // Dimensions 7 and 8: randomized matching against the catalogue.
        let form = TriForm::from_bits(self.dim, a as u128);
        let seed = self.cfg.stream_seed("canon-match", &[self.dim as u64, a]);
        let (id, witness) =
            catalogue::match_catalogue(&form, seed, self.cfg.birthday.max_samples)?;
        // The witness carries the catalogue word to the form; its inverse
        // carries the form back.
        let g = witness.inverse()?;
        debug_assert_eq!(act3_point(&g, a), self.forms[id as usize].word);
        Ok((id, g))
    }

    fn stage2_index(&mut self, id: u32) -> Result<&OrbitIndex> {
        if !self.stage2.contains_key(&id) {
            let index = stage2_partition(&self.forms[id as usize], &self.cfg, false)?;
            self.stage2.insert(id, index);
        }
        Ok(&self.stage2[&id])
    }

    fn stage3_stab(&mut self, id: u32, c_rep: u64, orbit_size: u128) -> Result<&StabChain> {
        let key = (id, c_rep);
        if !self.stage3.contains_key(&key) {
            let form = &self.forms[id as usize];
            let word = form.word;
            assert!(form.stab.order() % orbit_size == 0);
            let seed =
                self.cfg.stream_seed("canon-stage3", &[self.dim as u64, id as u64, c_rep]);
            let stab = stabilizer_birthday(
                &form.stab,
                &c_rep,
                |g, &c| act2_point(g, c, word),
                Some(form.stab.order() / orbit_size),
                seed,
                &self.cfg.birthday,
            )?;
            self.stage3.insert(key, stab);
        }
        Ok(&self.stage3[&key])
    }

    /// Canonical representative of the orbit of `omega`, plus a matrix `g`
    /// whose action carries the canonical point back to `omega`.
    pub fn canonicalize(&mut self, omega: &ParamVector) -> Result<(ParamVector, BitMat)> {
        assert_eq!(omega.dim(), self.dim, "parameter vector dimension mismatch");
        let (id, to_word) = self.form_reduction(omega.part3())?;
        let word = self.forms[id as usize].word;
        let at_word = build_action(&to_word)?.act_full(omega);
        debug_assert_eq!(at_word.part3(), word);

        let (c_rep, orbit_size, to_c_rep) = {
            let index = self.stage2_index(id)?;
            let c = at_word.part2();
            let orbit = index.orbit_id(c);
            let c_rep = index.reps()[orbit as usize];
            let to_c = index.transporter(c);
            (c_rep, index.sizes()[orbit as usize] as u128, to_c.inverse()?)
        };
        let at_c_rep = build_action(&to_c_rep)?.act_full(&at_word);
        debug_assert_eq!(at_c_rep.part2(), c_rep);
        debug_assert_eq!(at_c_rep.part3(), word);

        let dim = self.dim;
        let stab = self.stage3_stab(id, c_rep, orbit_size)?;
        let (p_min, to_p_min) =
            minimize_squares(dim, stab.generators(), at_c_rep.part1(), c_rep, word)?;
        let canonical = ParamVector::from_parts(dim, p_min, c_rep, word);
        let forward = to_word.mul(&to_c_rep).mul(&to_p_min);
        let back = forward.inverse()?;
        debug_assert_eq!(build_action(&back)?.act_full(&canonical), *omega);
        Ok((canonical, back))
    }

    /// A matrix whose action carries `w1` to `w2`, or `None` when the two lie
    /// in different orbits.
    pub fn isomorphism(
        &mut self,
        w1: &ParamVector,
        w2: &ParamVector,
    ) -> Result<Option<BitMat>> {
        let (c1, g1) = self.canonicalize(w1)?;
        let (c2, g2) = self.canonicalize(w2)?;
        if c1 != c2 {
            return Ok(None);
        }
        // canonical^g1 = w1 and canonical^g2 = w2, so w1^(g1^-1 g2) = w2.
        let h = g1.inverse()?.mul(&g2);
        debug_assert_eq!(build_action(&h)?.act_full(w1), *w2);
        Ok(Some(h))
    }
}

/// Breadth-first minimization of the squaring part under generators fixing
/// both the pair part `c` and the form `a`: returns the orbit minimum and a
/// matrix carrying `start` to it.
fn minimize_squares(
    dim: usize,
    gens: &[BitMat],
    start: u64,
    c: u64,
    a: u64,
) -> Result<(u64, BitMat)> {
    if gens.is_empty() {
        return Ok((start, BitMat::identity(dim)));
    }
    let actions: Vec<ActionData> = gens.iter().map(build_action).collect::<Result<_>>()?;
    let n = 1usize << dim;
    let mut how: Vec<Option<BitMat>> = vec![None; n];
    how[start as usize] = Some(BitMat::identity(dim));
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    while let Some(p) = queue.pop_front() {
        let carrier = how[p as usize].clone().expect("queued points carry a matrix");
        for ad in &actions {
            let q = ad.act1(p, c, a);
            if how[q as usize].is_none() {
                // carrier applies first, then the generator: start -> p -> q.
                how[q as usize] = Some(carrier.mul(ad.element()));
                queue.push_back(q);
            }
        }
    }
    let (min_point, matrix) = how
        .iter()
        .enumerate()
        .find_map(|(p, m)| m.as_ref().map(|m| (p as u64, m.clone())))
        .expect("the start point is always reached");
    Ok((min_point, matrix))
}
