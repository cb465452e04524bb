//! Moving regular systems along the chain of polar spaces: a spread of Q(4,2)
//! and a hemisystem of Q-(5,3) lifted one rank up, a restriction, and the
//! nucleus projection Q(4,2) -> W(3,2).
//!
//! Run with `cargo run --release --example chain_operations`.

use polarsys::constructions::{elliptic_line_family, hemisystem_from_partition, partition_from_lines, spread_search};
use polarsys::polar::{build_polar, Family};
use polarsys::regsys::{chain_lift, chain_restrict, regularity_profile, GeneratorSet};

fn main() -> polarsys::Result<()> {
    let q42 = build_polar(Family::Q, 2, 2)?;
    let spread = spread_search(&q42, 1_000_000)?.spread.expect("Q(4,2) has spreads");
    let lift = chain_lift(&spread, 1)?;
    println!(
        "spread of {} lines of {} -> {} planes of {}, m = {:?} (predicted {})",
        spread.len(),
        q42.label(),
        lift.set.len(),
        lift.space.label(),
        lift.certificate.m,
        lift.expected_m
    );

    let part = partition_from_lines(&elliptic_line_family(3)?)?;
    let (hemi, _) = hemisystem_from_partition(&part, &vec![false; part.blocks.len()])?;
    let big = chain_lift(&hemi, 1)?;
    println!(
        "hemisystem of {} lines -> {} planes of {}, m = {:?}",
        hemi.len(),
        big.set.len(),
        big.space.label(),
        big.certificate.m
    );

    let q63 = build_polar(Family::Q, 3, 3)?;
    let down = chain_restrict(&GeneratorSet::all(&q63), 2)?;
    println!("all planes of {} restricted: {} of {}, m = {:?}", q63.label(), down.set.len(), down.space.label(), down.certificate.m);

    let proj = q42.nucleus_project()?;
    let image = GeneratorSet::new(&proj.w, proj.push_generators(spread.ids()))?;
    let c = regularity_profile(&image, 1)?;
    println!("nucleus {:?}: spread image is {} lines of {}, m = {:?}", proj.nucleus, image.len(), proj.w.label(), c.m);
    Ok(())
}
