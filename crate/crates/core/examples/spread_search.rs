//! Bounded exact-cover search for spreads of small polar spaces.
//!
//! Run with `cargo run --release --example spread_search`.

use polarsys::constructions::spread_search;
use polarsys::polar::{build_polar, Family};
use polarsys::regsys::regularity_profile;

fn main() -> polarsys::Result<()> {
    for (family, d, q) in [(Family::Q, 2, 2), (Family::W, 2, 2), (Family::Q, 2, 3), (Family::QMinus, 2, 2), (Family::QPlus, 2, 3)] {
        let p = build_polar(family, d, q)?;
        match spread_search(&p, 1_000_000) {
            Ok(s) => {
                let found = match &s.spread {
                    Some(set) => format!("{} generators, m = {:?}", set.len(), regularity_profile(set, 1)?.m),
                    None if s.exhausted => "none exists".to_string(),
                    None => "budget exhausted".to_string(),
                };
                println!("{:<9} {found} after {} nodes", p.label(), s.nodes);
            }
            Err(e) => println!("{:<9} {e}", p.label()),
        }
    }
    Ok(())
}
