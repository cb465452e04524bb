//! Spectrum of the distance-2 graph on generators of W(7,2), its Hoffman
//! bound, and the closed-form audit ruling out 1-regular systems w.r.t. lines.
//!
//! Run with `cargo run --release --example spectral_audit`.

use polarsys::polar::{build_polar, Family};
use polarsys::spectra::{build_distance_graph, cross_check, nonexistence_audit, spectrum};

fn main() -> polarsys::Result<()> {
    let p = build_polar(Family::W, 4, 2)?;
    let g = build_distance_graph(&p, 2)?;
    println!("{}: {} generators, D^2 valency {:?}", p.label(), g.order(), g.valency());
    let s = spectrum(&g)?;
    for (value, mult) in &s.eigenvalues {
        println!("  eigenvalue {value:>4}  multiplicity {mult}");
    }
    println!("  residual {:.1e}, exact annihilator check: {}", s.max_residual, s.annihilated);
    if let Some(h) = s.hoffman_value() {
        println!("  Hoffman bound {h}");
    }
    let audit = nonexistence_audit(Family::W, 4, 2, 2)?;
    println!(
        "audit: a 1-regular system would have {} members, the bound is {}/{}: {:?}",
        audit.system_size, audit.bound.num, audit.bound.den, audit.verdict
    );
    println!("computed and closed-form spectra agree: {}", cross_check(&audit, &s));
    for (family, d) in [(Family::QPlus, 4), (Family::Q, 4), (Family::QMinus, 5)] {
        let a = nonexistence_audit(family, d, 3, d - 2)?;
        println!("  {:<10} bound {:>12}/{:<4} size {:>8}  {:?}", a.space, a.bound.num, a.bound.den, a.system_size, a.verdict);
    }
    Ok(())
}
