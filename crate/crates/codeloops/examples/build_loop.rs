//! Builds the smallest nonassociative code loop: dimension 3, lone
//! associator parameter on the triple {1,2,3}, order 16. Prints the
//! multiplication table, checks the loop identities and reads the
//! parameters back off the table.
//!
//! Run with `cargo run --release --example build_loop`.

use codeloops::loops::{extract_pca, is_associative, is_commutative, is_moufang};
use codeloops::{FactorSet, LoopTable, ParamVector, Verdict};

fn main() -> codeloops::Result<()> {
    let mut omega = ParamVector::zero(3);
    omega.set3(1, 2, 3, true);

    let theta = FactorSet::closed_form(&omega);
    let table = LoopTable::build_loop(&theta);
    table.check_loop()?;
    println!("{}", table.to_text());

    // Order 16 is small enough that every check below is exhaustive.
    assert_eq!(is_moufang(&table, 0, 0)?, Verdict::ExhaustivePass);
    let Verdict::Fail([x, y, z]) = is_associative(&table, 0, 0)? else {
        panic!("a nonzero associator part cannot build a group");
    };
    println!("moufang: yes");
    println!(
        "associative: no, ({x} {y}) {z} = {} but {x} ({y} {z}) = {}",
        table.get(table.get(x, y), z),
        table.get(x, table.get(y, z))
    );
    println!("commutative: {}", if is_commutative(&table)? { "yes" } else { "no" });

    let back = extract_pca(&table)?;
    assert_eq!(back, omega);
    println!("extracted parameters match the ones the loop was built from");
    Ok(())
}
