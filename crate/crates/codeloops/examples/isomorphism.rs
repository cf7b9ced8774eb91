//! Decides isomorphism of code loops given by parameter vectors: scrambles a
//! vector with random changes of basis, recovers explicit isomorphism
//! witnesses, and separates genuinely different loops.
//!
//! Run with `cargo run --release --example isomorphism`.

use codeloops::action::build_action;
use codeloops::gf2::gl_generators;
use codeloops::group::{bsgs_build, RandomSampler};
use codeloops::stages::Canonicalizer;
use codeloops::{ParamVector, RunConfig};

fn main() -> codeloops::Result<()> {
    let dim = 5;
    let cfg = RunConfig::default();
    let mut canon = Canonicalizer::new(dim, &cfg)?;

    let mut omega = ParamVector::zero(dim);
    omega.set1(2, true);
    omega.set2(1, 4, true);
    omega.set3(1, 2, 3, true);
    omega.set3(3, 4, 5, true);

    let gl = bsgs_build(dim, gl_generators(dim));
    let mut sampler = RandomSampler::new(&gl, cfg.stream_seed("example-iso", &[]));
    for round in 0..5 {
        let s = sampler.next_element();
        let moved = build_action(&s)?.act_full(&omega);
        let witness = canon
            .isomorphism(&omega, &moved)?
            .expect("a basis image is always isomorphic");
        // The witness acts on parameters exactly as it acts on the loop.
        assert_eq!(build_action(&witness)?.act_full(&omega), moved);
        println!("round {round}: recovered a witness carrying omega to its image");
    }

    // Same squaring and commutator data, different associator class.
    let mut other = omega;
    other.set3(3, 4, 5, false);
    assert!(canon.isomorphism(&omega, &other)?.is_none());
    println!("dropping the 345 associator triple changes the isomorphism class");

    let (canonical, _) = canon.canonicalize(&omega)?;
    println!(
        "canonical form of the scrambled family: parts {} / {} / {}",
        canonical.part1(),
        canonical.part2(),
        canonical.part3()
    );
    Ok(())
}
