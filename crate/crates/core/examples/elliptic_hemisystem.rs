//! Hemisystems of Q-(5,3) from 35 external lines whose polar solids cut the
//! quadric in hyperbolic quadrics; one regulus per block.
//!
//! Run with `cargo run --release --example elliptic_hemisystem`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polarsys::constructions::{elliptic_line_family, hemisystem_from_partition, partition_from_lines};

fn main() -> polarsys::Result<()> {
    let fam = elliptic_line_family(3)?;
    println!("external lines: {} + {} + {}", fam.x.len(), fam.x1.len(), fam.x2.len());
    let census = fam.pair_census();
    println!("pairwise spans over {} pairs:", census.pairs);
    for (kind, n) in &census.spans {
        println!("  {kind:<10} {n}");
    }
    let part = partition_from_lines(&fam)?;
    println!("{} blocks of two reguli partition the lines of {}", part.blocks.len(), part.space().label());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..4 {
        let bits: Vec<bool> = (0..part.blocks.len()).map(|_| rng.gen()).collect();
        let (set, cert) = hemisystem_from_partition(&part, &bits)?;
        let word: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        println!("  {word}: {} lines, every point on {:?}", set.len(), cert.m);
    }
    Ok(())
}
