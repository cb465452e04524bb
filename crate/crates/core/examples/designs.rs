//! The eigenspace decomposition of the dual polar scheme of Q+(5,2): designs
//! versus regular systems, the intersection law for design-orthogonal sets,
//! and the cone section as an antidesign.
//!
//! Run with `cargo run --release --example designs`.

use polarsys::polar::{build_polar, Family};
use polarsys::regsys::{cone_section_generators, orthogonality_check, regularity_profile, switch, v_decomposition, GeneratorSet};

fn main() -> polarsys::Result<()> {
    let p = build_polar(Family::QPlus, 3, 2)?;
    let dec = v_decomposition(&p, 3)?;
    println!("{}: eigenspace dimensions {:?}", p.label(), dec.dims());
    let (a, _) = p.latin_greek_split()?;
    let latin = GeneratorSet::new(&p, a.clone())?;
    let (switched, _) = switch(&p, &a, &p.level(1).spaces()[0])?;
    let pencil = GeneratorSet::new(&p, p.generators_through(1)[0].clone())?;
    for (name, s) in [("Latin class", &latin), ("switched class", &switched), ("point pencil", &pencil)] {
        let regular: Vec<bool> = (1..=2).map(|k| regularity_profile(s, k).map(|c| c.is_regular)).collect::<Result<_, _>>()?;
        let design: Vec<bool> = (1..=2).map(|k| dec.is_k_design(s, k)).collect::<Result<_, _>>()?;
        println!("  {name:<15} regular {regular:?} design {design:?} dual degrees {:?}", dec.dual_degree_set(s)?);
    }
    let r = orthogonality_check(&dec, &latin, &pencil)?;
    println!("Latin class vs pencil: |meet| = {}, predicted {}/{}, holds {}", r.intersection, r.predicted.0, r.predicted.1, r.holds);

    let q = build_polar(Family::QMinus, 2, 3)?;
    let dq = v_decomposition(&q, 1)?;
    let omega = cone_section_generators(&q)?;
    println!("{}: cone section of {} lines is a 1-antidesign: {}", q.label(), omega.len(), dq.is_k_antidesign(&omega, 1)?);
    Ok(())
}
