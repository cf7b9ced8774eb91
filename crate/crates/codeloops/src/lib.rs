//! Classification of code loops of order `2^(d+1)` for `d <= 7` (best-effort `d = 8`).
//!
//! A code loop is a Moufang loop that is a central extension of the two-element
//! group by an elementary abelian 2-group `V = F_2^d`, with squaring map `P`,
//! commutator map `C` and associator map `A` living in the center. Such a loop
//! is determined up to isomorphism by a parameter vector of bits
//!
//! ```text
//! omega_i = P(e_i),   omega_ij = C(e_i, e_j),   omega_ijk = A(e_i, e_j, e_k)
//! ```
//!
//! over a basis of `V`, and two parameter vectors give isomorphic loops exactly
//! when they lie in the same orbit of a polynomial `GL(d, 2)` action. This crate
//! computes those orbits in three stratified stages (associator part, then
//! commutator part, then squaring part), materializes any parameter vector as an
//! explicit multiplication table, and verifies the result.
//!
//! The crate is organized as a library; `examples/` holds one runnable program
//! per capability (`cargo run --release --example count_loops`), and the
//! `codeloops` binary exposes the same capabilities as subcommands.
//!
//! Modules:
//!
//! * [`gf2`]: bit-packed vectors, matrices and affine solving over GF(2).
//! * [`subsets`]: index tables for the pair/triple coordinates of parameter space.
//! * [`polar`]: squaring maps, derived forms, parameter vectors, form notation.
//! * [`action`]: the `GL(d, 2)` action on parameter space in stratified form.
//! * [`group`]: Schreier-Sims stabilizer chains, uniform sampling, birthday stabilizers.
//! * [`orbits`]: orbit partitions with Schreier links, transporters, stabilizers.
//! * [`stages`]: the three-stage enumeration, brute-force oracle, canonical forms.
//! * [`loops`]: factor sets, loop tables, Moufang checks, doubly even codes.
//! * [`catalogue`]: built-in classification of associator forms, form invariants.
//! * [`report`]: enumeration reports and their JSON/CSV/text serialization.
//! * [`config`]: run configuration (seed, workers, budgets).
//! * [`cmd`]: implementations backing the CLI subcommands.

pub mod action;
pub mod catalogue;
pub mod cmd;
pub mod config;
pub mod gf2;
pub mod group;
pub mod loops;
pub mod orbits;
pub mod polar;
pub mod report;
pub mod stages;
pub mod subsets;

pub use action::ActionData;
pub use catalogue::{CatalogueEntry, FormInvariants};
pub use config::RunConfig;
pub use gf2::{AffineSystem, BitMat, BitVec};
pub use group::StabChain;
pub use loops::{CodeSpec, FactorSet, LoopTable, Pinning, Verdict};
pub use orbits::OrbitIndex;
pub use polar::{ParamVector, SquareMap, TriForm};
pub use report::EnumerationReport;
pub use stages::{
    brute_force_orbits, enumerate_all, enumerate_filtered, enumerate_stage1, enumerate_stage2,
    enumerate_stage3, ActionStyle, Canonicalizer, CommutatorClass, FormClass, FormFilter,
};

use thiserror::Error as ThisError;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("unsupported dimension {dim}: {what}")]
    UnsupportedDim { dim: usize, what: &'static str },
    #[error("singular matrix")]
    Singular,
    #[error("inconsistent affine system")]
    Inconsistent,
    #[error("fourth derived form does not vanish")]
    F4NotZero,
    #[error("form notation: {0}")]
    FormParse(String),
    #[error("not a loop: {0}")]
    NotALoop(String),
    #[error("loop table encoding violation: {0}")]
    Encoding(String),
    #[error("code is not doubly even: {0}")]
    NotDoublyEven(String),
    #[error("code generators are linearly dependent")]
    DependentGenerators,
    #[error("randomized search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("memory budget exceeded: need {need} bytes, budget {budget} (see --allow-heavy)")]
    MemoryBudget { need: u64, budget: u64 },
    #[error("heavy computation gated: {0}; pass --allow-heavy to proceed")]
    HeavyGated(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
