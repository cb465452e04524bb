//! The Ebert partition of PG(3,3) into four elliptic quadrics, and the
//! 1-systems of the Klein quadric formed by their tangent pencils.
//!
//! Run with `cargo run --release --example ebert_klein`.

use polarsys::constructions::klein_one_systems;

fn main() -> polarsys::Result<()> {
    let ks = klein_one_systems(3)?;
    let e = &ks.partition;
    let sizes: Vec<usize> = e.orbits.iter().map(Vec::len).collect();
    println!("orbits {sizes:?}, relabeling {:?}", e.relabel);
    for (i, f) in e.forms.iter().enumerate() {
        println!("  quadric {i}: monomials {:?}", f.entries());
    }
    if let Some(c) = &e.census {
        println!(
            "lines: {} tangent to none, {} tangent to two, {} other; parity {}",
            c.tangent_to_none, c.tangent_to_two, c.other_lines, c.parity_ok
        );
    }
    for (i, (s, chk)) in ks.systems.iter().zip(&ks.checks).enumerate() {
        println!("S_{i}: {} lines of {}, 1-system {}", s.len(), ks.klein.label(), chk.ok());
    }
    println!("planes holding two lines of the union: {}", ks.planes_with_two);
    for (m, c) in &ks.covers {
        println!("  cover of {m} systems: every point on {:?} planes", c.m);
    }
    Ok(())
}
