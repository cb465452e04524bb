//! Baer subgeometries PG(3,2) embedded in H(3,4), counted by closing frames
//! of Hermitian points and by reading them off quadric generators that hold
//! no line of L1.
//!
//! Run with `cargo run --release --example baer_subgeometries`.

use polarsys::fieldred::{build_context, enumerate_baer_embedded, random_baer_subgeometry, symplectic_restriction_check};

fn main() -> polarsys::Result<()> {
    let ctx = build_context(4, 2)?;
    let count = enumerate_baer_embedded(&ctx)?;
    println!(
        "by closure {}, via generators {} (from {} generators, fibers {:?}), closed form {}",
        count.by_closure, count.by_generators, count.zero_line_generators, count.fiber_sizes, count.predicted
    );
    let sigma = &count.subgeometries[0];
    let chk = symplectic_restriction_check(&ctx, sigma);
    println!("first subgeometry: {} points, polarity restricts to a symplectic one: {}, {} isotropic lines", sigma.len(), chk.ok, chk.isotropic_lines);
    let all = count.subgeometries.iter().all(|s| symplectic_restriction_check(&ctx, s).ok);
    println!("all {} symplectic: {all}", count.subgeometries.len());
    let control = random_baer_subgeometry(&ctx, 7)?;
    println!("a random non-embedded subgeometry passes: {}", symplectic_restriction_check(&ctx, &control).ok);
    Ok(())
}
