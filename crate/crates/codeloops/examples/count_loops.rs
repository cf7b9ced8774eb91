//! Counts code loops of order 4 through 64 up to isomorphism and checks the
//! totals against the built-in classification table.
//!
//! Run with `cargo run --release --example count_loops`.

use codeloops::catalogue;
use codeloops::stages::enumerate_all;
use codeloops::RunConfig;

fn main() -> codeloops::Result<()> {
    let cfg = RunConfig::default();
    println!("{:>4}  {:>5}  {:>5}  {:>6}", "dim", "order", "loops", "groups");
    for dim in 1..=5 {
        let start = std::time::Instant::now();
        let report = enumerate_all(dim, &cfg)?;
        assert_eq!(Some(report.total), catalogue::expected_total(dim));
        assert_eq!(Some(report.zero_form_total), catalogue::expected_zero_form_total(dim));
        println!(
            "{:>4}  {:>5}  {:>5}  {:>6}   ({:.1?})",
            dim,
            2u64 << dim,
            report.total,
            report.zero_form_total,
            start.elapsed()
        );
    }
    println!("all totals match the published classification");
    Ok(())
}
