//! Enumerates every polar space with at most 3000 generators over GF(2),
//! GF(3) and GF(4), and compares each level with the counting formula.
//!
//! Run with `cargo run --release --example polar_census`.

use std::time::Instant;

use polarsys::polar::{build_polar, count_subspaces};

fn main() -> polarsys::Result<()> {
    println!("{:<10} {:>8} {:>11}  per-level counts (enumerated = formula)", "space", "points", "generators");
    for (family, d, q) in polarsys::polar::buildable_spaces(3000) {
        let t = Instant::now();
        let p = build_polar(family, d, q)?;
        let levels: Vec<String> = (1..=d)
            .map(|k| {
                let want = count_subspaces(d as u32, family.e2(), q, k as u32).unwrap();
                let got = p.level(k).len();
                assert_eq!(want, got.into());
                got.to_string()
            })
            .collect();
        println!(
            "{:<10} {:>8} {:>11}  [{}]  {:.2?}",
            family.label(d, q),
            p.point_count(),
            p.generator_count(),
            levels.join(", "),
            t.elapsed()
        );
    }
    Ok(())
}
