//! Acceptance suite: one PASS/FAIL line per criterion, with the pinned time
//! budget for each. Run with `cargo test --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polarsys::constructions::{
    elliptic_line_family, hemisystem_from_partition, klein_one_systems, partition_from_lines, q63_construction,
    spread_search, verify_one_system,
};
use polarsys::fieldred::{
    build_context, check_identity_exhaustive, check_identity_sampled, enumerate_baer_embedded, generator_census,
    verify_spreads, IDENTITY_SAMPLES, IDENTITY_SEED,
};
use polarsys::polar::{build_polar, buildable_spaces, count_subspaces, Family};
use polarsys::regsys::{
    chain_lift, cone_section_generators, orthogonality_check, regularity_profile, switch, v_decomposition,
    GeneratorSet,
};
use polarsys::spectra::{build_distance_graph, hoffman_bound, nonexistence_audit, spectrum, Verdict};
use polarsys::Result;

/// Largest allowed `|A v - lambda v|` and distance to the snapped integer.
const RESIDUAL_TOL: f64 = 1e-6;
const RANDOM_SUBSETS: usize = 200;
const SAMPLED_CHOICES: usize = 50;

type Check = Result<Vec<(String, bool)>>;

fn item(name: impl Into<String>, ok: bool) -> (String, bool) {
    (name.into(), ok)
}

fn counting() -> Check {
    let mut out = Vec::new();
    let mut mismatches = Vec::new();
    let spaces = buildable_spaces(3000);
    for &(family, d, q) in &spaces {
        let p = build_polar(family, d, q)?;
        for k in 1..=d {
            let want = count_subspaces(d as u32, family.e2(), q, k as u32)?;
            if want != p.level(k).len().into() {
                mismatches.push(format!("{} level {k}", p.label()));
            }
        }
    }
    let families: BTreeSet<Family> = spaces.iter().map(|s| s.0).collect();
    out.push(item(format!("{} spaces over all six families", spaces.len()), families.len() == 6));
    out.push(item(format!("every level matches the formula {mismatches:?}"), mismatches.is_empty()));
    Ok(out)
}

fn spectral() -> Check {
    let w = build_polar(Family::W, 4, 2)?;
    let s = spectrum(&build_distance_graph(&w, 2)?)?;
    let distinct = s.distinct();
    let bound = s.hoffman_value();
    let audit = nonexistence_audit(Family::W, 4, 2, 2)?;
    let qp = nonexistence_audit(Family::QPlus, 4, 2, 2)?;
    Ok(vec![
        item(format!("W(7,2) D^2 spectrum {distinct:?}"), distinct == [280, 70, 42, 0, -8]),
        item(
            format!("residual {:.1e}, snap error {:.1e}", s.max_residual, s.max_snap_error),
            s.max_residual < RESIDUAL_TOL && s.max_snap_error < RESIDUAL_TOL && s.annihilated,
        ),
        item(
            "Hoffman bound 255/4 from the computed spectrum",
            bound == Some(BigRational::new(255.into(), 4.into()))
                && bound == hoffman_bound(s.eigenvalues.iter().map(|e| e.1).sum(), s.k, s.lambda),
        ),
        item(
            "closed-form audit: 255/4 < 153, contradiction",
            audit.bound.num == "255"
                && audit.bound.den == "4"
                && audit.system_size == "153"
                && audit.verdict == Verdict::Contradiction
                && audit.display_agrees,
        ),
        item(
            "Q+(7,2): bound 18 < 45",
            qp.bound.num == "18" && qp.bound.den == "1" && qp.system_size == "45" && qp.verdict == Verdict::Contradiction,
        ),
    ])
}

fn elliptic_hemisystems() -> Check {
    let fam = elliptic_line_family(3)?;
    let census = fam.pair_census();
    let part = partition_from_lines(&fam)?;
    let space = part.space().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut seen = BTreeSet::new();
    let mut all_ok = true;
    for _ in 0..SAMPLED_CHOICES {
        let bits: Vec<bool> = (0..part.blocks.len()).map(|_| rng.gen()).collect();
        let (set, c) = hemisystem_from_partition(&part, &bits)?;
        all_ok &= set.len() == 140 && c.m == Some(5) && c.is_hemisystem;
        seen.insert(set.ids().to_vec());
    }
    let covered: usize = part.blocks.iter().map(|b| b.classes[0].len() + b.classes[1].len()).sum();
    Ok(vec![
        item(
            format!("family sizes {} + {} + {}", fam.x.len(), fam.x1.len(), fam.x2.len()),
            (fam.x.len(), fam.x1.len(), fam.x2.len()) == (18, 9, 8),
        ),
        item(
            format!("{} pairs, {} span violations", census.pairs, census.violations.len()),
            census.pairs == 595 && census.violations.is_empty(),
        ),
        item(
            format!("{} blocks partition {covered} of {} generators", part.blocks.len(), space.generator_count()),
            part.blocks.len() == 35 && covered == 280 && space.generator_count() == 280,
        ),
        item(
            format!("{SAMPLED_CHOICES} sampled choices: 140 generators, each of {} points on 5", space.point_count()),
            all_ok && space.point_count() == 112,
        ),
        item(format!("{} distinct sampled hemisystems", seen.len()), seen.len() == SAMPLED_CHOICES),
    ])
}

fn ebert_klein() -> Check {
    let ks = klein_one_systems(3)?;
    let e = &ks.partition;
    let census = e.census.clone().expect("census is computed for odd q");
    let sizes: Vec<usize> = e.orbits.iter().map(Vec::len).collect();
    let mut out = vec![
        item(format!("orbit sizes {sizes:?}"), sizes == [10; 4]),
        item("each orbit fits a nondegenerate elliptic quadric", e.forms.len() == 4),
        item(
            format!("line census: {} tangent to none, {} tangent to two", census.tangent_to_none, census.tangent_to_two),
            census.tangent_to_none == 50 && census.tangent_to_two == 80 && census.lines == 130,
        ),
        item(format!("parity condition (relabel {:?})", e.relabel), census.parity_ok || e.relabel.is_some()),
    ];
    let systems_ok = ks.systems.iter().all(|s| s.len() == 10) && ks.checks.iter().all(|c| c.ok());
    let rechecked = ks.systems.iter().map(verify_one_system).collect::<Result<Vec<_>>>()?;
    out.push(item("four verified 1-systems of 10 lines", systems_ok && rechecked.iter().all(|c| c.ok())));
    out.push(item(
        format!("{} planes with two lines of the union", ks.planes_with_two),
        ks.planes_with_two == 0 && census.planes_tangent_to_two == 0,
    ));
    let covers: Vec<(usize, Option<u64>)> = ks.covers.iter().map(|(m, c)| (*m, c.m)).collect();
    out.push(item(
        format!("covers 2m-regular on {} points: {covers:?}", ks.klein.point_count()),
        ks.klein.point_count() == 130
            && covers.len() == 4
            && covers.iter().enumerate().all(|(i, &(_, m))| m == Some(2 * (i as u64 + 1))),
    ));
    Ok(out)
}

fn q63() -> Check {
    let c = q63_construction([1, 2, 3], 0)?;
    Ok(vec![
        item(format!("{} lines in {} reguli", c.system.len(), c.solids.len()), c.system.len() == 28 && c.solids.len() == 7),
        item("1-system verified (and its opposite)", c.check.ok() && c.opposite_check.ok()),
        item(
            format!("cover: {} planes, m = {:?}, {} points", c.cover.0.len(), c.cover.1.m, c.space.point_count()),
            c.cover.0.len() == 112 && c.cover.1.m == Some(4) && c.space.point_count() == 364,
        ),
        item(
            format!("S and opposite: {} planes, m = {:?}", c.double_cover.0.len(), c.double_cover.1.m),
            c.double_cover.0.len() == 224 && c.double_cover.1.m == Some(8),
        ),
        item("all 21 solid spans meet the quadric in 112 points", c.span_points == [112; 21]),
    ])
}

fn chain() -> Check {
    let q42 = build_polar(Family::Q, 2, 2)?;
    let spread = spread_search(&q42, 1_000_000)?.spread.expect("Q(4,2) has a spread");
    let lift = chain_lift(&spread, 1)?;
    let fam = elliptic_line_family(3)?;
    let part = partition_from_lines(&fam)?;
    let (hemi, _) = hemisystem_from_partition(&part, &vec![false; part.blocks.len()])?;
    let big = chain_lift(&hemi, 1)?;
    let proj = q42.nucleus_project()?;
    let image = GeneratorSet::new(&proj.w, proj.push_generators(spread.ids()))?;
    let ic = regularity_profile(&image, 1)?;
    Ok(vec![
        item(
            format!("spread of 5 lines lifts to {} planes of {}, m = {:?}", lift.set.len(), lift.space.label(), lift.certificate.m),
            spread.len() == 5 && lift.set.len() == 10 && lift.space.label() == "Q+(5,2)" && lift.certificate.m == Some(2),
        ),
        item(
            format!("hemisystem lifts to {} planes of {}, m = {:?}", big.set.len(), big.space.label(), big.certificate.m),
            big.set.len() == 560 && big.space.label() == "Q(6,3)" && big.certificate.m == Some(20),
        ),
        item(
            format!("nucleus projection: {} lines of {}, m = {:?}", image.len(), proj.w.label(), ic.m),
            image.len() == 5 && proj.w.label() == "W(3,2)" && ic.m == Some(1),
        ),
    ])
}

fn field_reduction() -> Check {
    let ctx = build_context(4, 2)?;
    let sp = verify_spreads(&ctx)?;
    let census = generator_census(&ctx, true)?;
    let baer = enumerate_baer_embedded(&ctx)?;
    let mut identity_ok = true;
    for (n, q) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
        let r = check_identity_exhaustive(&build_context(n, q)?);
        identity_ok &= r.ok() && r.exhaustive;
    }
    for n in [4, 5] {
        let r = check_identity_sampled(&build_context(n, 2)?, IDENTITY_SAMPLES, IDENTITY_SEED);
        identity_ok &= r.ok() && r.checked == IDENTITY_SAMPLES as u64;
    }
    let want = BTreeMap::from([(0, 108), (1, 135), (5, 27)]);
    Ok(vec![
        item(
            format!("|L1| = {}, exact cover of {} points", sp.l1_lines, sp.quadric_points),
            sp.ok() && sp.l1_lines == 45 && sp.quadric_points == 135,
        ),
        item(
            format!("generator census {:?}", census.histogram),
            census.histogram == want && census.predicted == want && census.matches,
        ),
        item(
            format!("Baer count {} by closure, {} via generators, fibers {:?}", baer.by_closure, baer.by_generators, baer.fiber_sizes),
            baer.agree && baer.by_closure == 36 && baer.fiber_sizes == BTreeMap::from([(3, 36)]),
        ),
        item(
            format!("H = Q o phi: exhaustive for N <= 3, {IDENTITY_SAMPLES} samples at N = 4, 5"),
            identity_ok,
        ),
    ])
}

fn design() -> Check {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (family, d) in [(Family::QMinus, 2), (Family::QPlus, 3)] {
        let p = build_polar(family, d, 2)?;
        let dec = v_decomposition(&p, d)?;
        let n = p.generator_count() as u32;
        let mut sets = Vec::new();
        for _ in 0..RANDOM_SUBSETS {
            let ids: Vec<u32> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            sets.push(GeneratorSet::new(&p, ids)?);
        }
        // constructed regular systems
        let mut regular = Vec::new();
        if family == Family::QPlus {
            let (a, b) = p.latin_greek_split()?;
            regular.push(GeneratorSet::new(&p, a)?);
            regular.push(GeneratorSet::new(&p, b)?);
            let sigma = p.level(1).spaces()[0].clone();
            let a = regular[0].ids().to_vec();
            regular.push(switch(&p, &a, &sigma)?.0);
        } else if let Some(s) = spread_search(&p, 1_000_000)?.spread {
            regular.push(s);
        }
        regular.push(GeneratorSet::all(&p));
        sets.extend(regular.iter().cloned());
        let mut agree = true;
        for s in &sets {
            for k in 1..d {
                agree &= dec.is_k_design(s, k)? == regularity_profile(s, k)?.is_regular;
            }
        }
        out.push(item(
            format!("{}: design iff regular on {} sets ({} constructed)", p.label(), sets.len(), regular.len()),
            agree,
        ));
        let mut law = true;
        let mut pairs = 0;
        for r in regular.iter().filter(|r| regularity_profile(r, 1).is_ok_and(|c| c.is_regular)) {
            for pencil in p.generators_through(1) {
                let pen = GeneratorSet::new(&p, pencil.clone())?;
                let rep = orthogonality_check(&dec, r, &pen)?;
                law &= rep.design_orthogonal && rep.holds;
                pairs += 1;
            }
        }
        out.push(item(format!("{}: intersection law on {pairs} (system, pencil) pairs", p.label()), law && pairs > 0));
    }
    for (family, d, q) in [(Family::QMinus, 2, 2), (Family::QMinus, 2, 3), (Family::Q, 2, 3)] {
        let p = build_polar(family, d, q)?;
        let dec = v_decomposition(&p, 1)?;
        let omega = cone_section_generators(&p)?;
        out.push(item(format!("{}: cone section is a 1-antidesign", p.label()), dec.is_k_antidesign(&omega, 1)?));
    }
    Ok(out)
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { name: "counting conformance", limit: Duration::from_secs(120), run: counting },
        Criterion { name: "spectral audit", limit: Duration::from_secs(180), run: spectral },
        Criterion { name: "elliptic hemisystem", limit: Duration::from_secs(120), run: elliptic_hemisystems },
        Criterion { name: "Ebert/Klein", limit: Duration::from_secs(60), run: ebert_klein },
        Criterion { name: "Q(6,3) 1-system", limit: Duration::from_secs(120), run: q63 },
        Criterion { name: "chain lift and projection", limit: Duration::from_secs(120), run: chain },
        Criterion { name: "field reduction", limit: Duration::from_secs(240), run: field_reduction },
        Criterion { name: "design machinery", limit: Duration::from_secs(120), run: design },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = (c.run)();
        let elapsed = t.elapsed();
        let in_time = elapsed <= c.limit;
        let (ok, details) = match result {
            Ok(items) => (items.iter().all(|x| x.1) && in_time, items),
            Err(e) => (false, vec![item(format!("error: {e}"), false)]),
        };
        println!(
            "[{}] {}. {} ({:.1}s, limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
        for (name, good) in details {
            println!("       {} {name}", if good { "ok  " } else { "FAIL" });
        }
        failed += usize::from(!ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
