//! Builds the Parker loop: the code loop of the extended binary Golay
//! [24,12] code, a nonassociative Moufang loop of order 8192. The order is
//! past what a multiplication table can hold here, so the loop is driven
//! through its factor set directly.
//!
//! Run with `cargo run --release --example parker_loop`.

use codeloops::loops::{
    associative_through_factor_set, code_to_params, is_doubly_even, moufang_through_factor_set,
};
use codeloops::{CodeSpec, FactorSet, RunConfig, Verdict};

/// Generator matrix [I | A] of the extended binary Golay code: a bordered
/// circulant of the quadratic residues mod 11.
fn golay() -> CodeSpec {
    let circulant = "11011100010";
    let mut text = String::from("24 12\n");
    text.push_str("100000000000011111111111\n");
    for i in 0..11 {
        for j in 0..12 {
            text.push(if j == i + 1 { '1' } else { '0' });
        }
        text.push('1');
        text.push_str(&circulant[i..]);
        text.push_str(&circulant[..i]);
        text.push('\n');
    }
    CodeSpec::from_text(&text).expect("the Golay generators are independent")
}

fn main() -> codeloops::Result<()> {
    let cfg = RunConfig::default();
    let code = golay();
    assert!(is_doubly_even(&code));
    let weights: Vec<u32> = code.generators().iter().map(|g| g.count_ones()).collect();
    println!("generator weights: {weights:?}");

    let omega = code_to_params(&code)?;
    println!(
        "parameter bits set: {} squares, {} commutators, {} associators",
        omega.singles().count(),
        omega.pairs().count(),
        omega.triples().count()
    );

    let theta = FactorSet::closed_form(&omega);
    let n = theta.order() as u64;
    println!("loop order: {n}");

    // Every element squares into the center {e, z} with z = 2^12.
    let center = 1u64 << 12;
    for x in 0..n {
        let sq = theta.mul(x, x);
        assert!(sq == 0 || sq == center);
    }
    println!("every square lies in the center");

    let samples = 1_000_000;
    let verdict = moufang_through_factor_set(&theta, samples, cfg.stream_seed("parker", &[0]));
    assert_eq!(verdict, Verdict::SampledPass(samples));
    println!("moufang law: held on {samples} sampled triples");

    let Verdict::Fail([x, y, z]) =
        associative_through_factor_set(&theta, samples, cfg.stream_seed("parker", &[1]))
    else {
        panic!("the Parker loop is not associative");
    };
    println!("associativity fails, e.g. on ({x}, {y}, {z})");

    let (x, y) = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| theta.mul(x, y) != theta.mul(y, x))
        .expect("the Parker loop is not commutative");
    println!("commutativity fails, e.g. on ({x}, {y})");
    Ok(())
}
