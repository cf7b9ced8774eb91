//! Turns a doubly even binary code into a code loop. The extended Hamming
//! [8,4] code yields a nonassociative Moufang loop of order 32; a code with
//! a weight-2 word is rejected.
//!
//! Run with `cargo run --release --example code_to_loop`.

use codeloops::loops::{code_to_params, extract_pca, is_associative, is_doubly_even, is_moufang};
use codeloops::{CodeSpec, Error, FactorSet, LoopTable, Verdict};

fn main() -> codeloops::Result<()> {
    // Extended Hamming [8,4]: every codeword weight is 0, 4 or 8.
    let hamming = CodeSpec::from_text("8 4\n11111111\n00001111\n00110011\n01010101\n")?;
    assert!(is_doubly_even(&hamming));
    for word in hamming.codewords() {
        assert_eq!(word.count_ones() % 4, 0);
    }

    let omega = code_to_params(&hamming)?;
    println!("parameters from the [8,4] code:");
    println!("  squares    (weight/4):        {:?}", omega.singles().collect::<Vec<_>>());
    println!("  commutators (intersection/2): {:?}", omega.pairs().collect::<Vec<_>>());
    println!("  associators (triple overlap): {:?}", omega.triples().collect::<Vec<_>>());

    let table = LoopTable::build_loop(&FactorSet::closed_form(&omega));
    table.check_loop()?;
    println!("loop order: {}", table.order());
    assert_eq!(is_moufang(&table, 0, 0)?, Verdict::ExhaustivePass);
    assert!(matches!(is_associative(&table, 0, 0)?, Verdict::Fail(_)));
    println!("moufang: yes (exhaustive); associative: no");
    assert_eq!(extract_pca(&table)?, omega);

    // Weight 2 is not divisible by 4, so this code cannot carry a loop.
    let narrow = CodeSpec::from_text("4 2\n1100\n0011\n")?;
    match code_to_params(&narrow) {
        Err(Error::NotDoublyEven(reason)) => println!("rejected weight-2 code: {reason}"),
        other => panic!("weight-2 code must be rejected, got {other:?}"),
    }
    Ok(())
}
