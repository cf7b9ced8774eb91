//! Cross-checks the staged orbit enumeration against a brute-force oracle
//! that applies every matrix of GL(3,2) to every parameter vector and
//! union-finds the whole space, then repeats the comparison with the
//! transpose-twisted action, which must produce the same counts.
//!
//! Run with `cargo run --release --example brute_force_check -- [dim]`.

use codeloops::stages::{brute_force_orbits, enumerate_all, ActionStyle};
use codeloops::RunConfig;

fn main() -> codeloops::Result<()> {
    let dim: usize = std::env::args().nth(1).map(|s| s.parse().expect("dim")).unwrap_or(3);
    assert!(dim <= 4, "the oracle enumerates all of GL(d,2) and stops at d = 4");
    let cfg = RunConfig::default();

    let staged = enumerate_all(dim, &cfg)?;
    let oracle = brute_force_orbits(dim, ActionStyle::Standard, &cfg)?;
    assert_eq!(oracle.total, staged.total);
    assert_eq!(oracle.zero_form_total, staged.zero_form_total);
    assert_eq!(oracle.forms.len(), staged.forms.len());
    for (brute, smart) in oracle.forms.iter().zip(&staged.forms) {
        assert_eq!(brute.form, smart.form);
        assert_eq!(brute.stabilizer_order, smart.stabilizer_order);
        assert_eq!(brute.c_orbits, smart.c_orbits);
        assert_eq!(brute.loops, smart.loops);
        println!(
            "form {:12} stabilizer {:>6}  c-orbits {:>2}  loops {:>3}   (oracle agrees)",
            brute.form, brute.stabilizer_order, brute.c_orbits, brute.loops
        );
    }
    println!("staged enumeration matches the oracle field by field at dimension {dim}");

    // Twisting by inverse transpose permutes each orbit, not the counts.
    let twisted = brute_force_orbits(dim, ActionStyle::Transposed, &cfg)?;
    assert_eq!(twisted.total, staged.total);
    assert_eq!(twisted.zero_form_total, staged.zero_form_total);
    for (a, b) in twisted.forms.iter().zip(&staged.forms) {
        assert_eq!(a.stabilizer_order, b.stabilizer_order);
        assert_eq!(a.c_orbits, b.c_orbits);
        assert_eq!(a.loops, b.loops);
    }
    println!("transpose-twisted action gives identical counts");
    Ok(())
}
