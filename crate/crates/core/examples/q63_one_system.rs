//! The 1-system of Q(6,3) made of seven reguli, for every permutation and a
//! few regulus choices.
//!
//! Run with `cargo run --release --example q63_one_system`.

use polarsys::constructions::q63_construction;

fn main() -> polarsys::Result<()> {
    let perms = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
    for phi in perms {
        for bits in [0u8, 0b1010101, 0b1111111] {
            let c = q63_construction(phi, bits)?;
            println!(
                "phi {phi:?} bits {bits:07b}: {} lines, 1-system {}, cover {} planes m={:?}, with opposite {} planes m={:?}",
                c.system.len(),
                c.check.ok(),
                c.cover.0.len(),
                c.cover.1.m,
                c.double_cover.0.len(),
                c.double_cover.1.m
            );
        }
    }
    let c = q63_construction([1, 2, 3], 0)?;
    println!("quadric points on each span of two solids: {:?}", c.span_points);
    Ok(())
}
