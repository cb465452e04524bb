//! Field reduction of Hermitian varieties H(N-1, q^2) to quadrics of
//! PG(2N-1, q): the spreads L and L1, the identity H = Q o phi, and the
//! census of generators by contained L1 lines.
//!
//! Run with `cargo run --release --example field_reduction`.

use polarsys::Error;
use polarsys::fieldred::{build_context, check_identity, generator_census, predicted_orbits, verify_spreads};

fn main() -> polarsys::Result<()> {
    for (n, q) in [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (5, 2)] {
        let ctx = build_context(n, q)?;
        let sp = verify_spreads(&ctx)?;
        let id = check_identity(&ctx);
        println!(
            "N={n} q={q} ({}): |L| = {}, |L1| = {}, {} quadric points, spreads ok {}, identity ok on {} vectors{}",
            ctx.kind(),
            sp.spread_lines,
            sp.l1_lines,
            sp.quadric_points,
            sp.ok(),
            id.checked,
            if id.exhaustive { " (all)" } else { " (sampled)" }
        );
        let c = match generator_census(&ctx, true) {
            Err(Error::CapExceeded { .. }) => generator_census(&ctx, false)?,
            other => other?,
        };
        println!("    generators {}: enumerated {:?}, predicted {:?}, match {}", c.generator_count, c.histogram, c.predicted, c.matches);
    }
    println!("orbit sizes for N=6, q=2: {:?}", predicted_orbits(6, 2));
    Ok(())
}
