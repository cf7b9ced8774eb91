//! Classifies alternating trilinear forms on a 6-dimensional space over
//! GF(2) up to change of basis: orbit representatives, stabilizer orders and
//! the orbit-stabilizer certificate that the classes cover the whole space.
//!
//! Run with `cargo run --release --example classify_forms -- [dim]`.

use codeloops::gf2::gl_order;
use codeloops::polar::format_form;
use codeloops::stages::enumerate_stage1;
use codeloops::RunConfig;

fn main() -> codeloops::Result<()> {
    let dim: usize = std::env::args().nth(1).map(|s| s.parse().expect("dim")).unwrap_or(6);
    let cfg = RunConfig::default();
    let start = std::time::Instant::now();
    let forms = enumerate_stage1(dim, &cfg)?;
    println!("{} form classes at dimension {dim} ({:.1?})", forms.len(), start.elapsed());
    let gl = gl_order(dim);
    let mut sum: u128 = 0;
    for class in &forms {
        let orbit = gl / class.stab.order();
        sum += orbit;
        println!(
            "  {:>2}  {:24}  stabilizer {:>14}  orbit {:>10}",
            class.id,
            format_form(&class.form()),
            class.stab.order(),
            orbit
        );
    }
    // Orbit sizes partition the space of alternating trilinear forms.
    let triples = dim * (dim - 1) * (dim - 2) / 6;
    assert_eq!(sum, 1u128 << triples);
    println!("index sum {sum} = 2^{triples}: classes cover the whole space");
    Ok(())
}
