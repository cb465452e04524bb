//! Command-line front end. Every command prints one JSON document on stdout
//! and a short census table on stderr.
//!
//! Exit codes: 0 when everything checked out, 1 when a verification failed
//! (the JSON names the witness), 2 for usage errors and exceeded caps.

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cert::{verify, Certificate, SystemRecord};
use crate::constructions::{
    cover_from_system, cover_from_systems, ebert_partition, elliptic_line_family, hemisystem_from_partition,
    klein_one_systems, partition_from_lines, q63_construction, spread_search,
};
use crate::error::{invalid, Error, Result};
use crate::fieldred::{
    build_context, check_identity, enumerate_baer_embedded, generator_census, random_baer_subgeometry,
    symplectic_restriction_check, verify_spreads,
};
use crate::polar::{build_polar, count_subspaces, to_u64, Family, PolarSpace};
use crate::regsys::{chain_lift, chain_restrict, regularity_profile, switch, GeneratorSet, RegularityCertificate};
use crate::spectra::{build_distance_graph, nonexistence_audit, spectrum};

const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "polarsys", about = "Regular systems of generators in small polar spaces", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Default)]
struct Opts {
    /// Qplus, Hodd, W, Q, Heven or Qminus.
    #[arg(long)]
    family: Option<Family>,
    /// Rank (for field-reduction and baer: the dimension N).
    #[arg(long)]
    d: Option<usize>,
    /// Field order.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    /// Also write the JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Number of (k-1)-spaces from the closed formula.
    Count(Opts),
    /// Enumerate a space and compare every level with the formula.
    Build(Opts),
    /// Re-check a certificate file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum of the distance-i graph on generators.
    Spectrum(Opts),
    /// Closed-form eigenvalue audit of 1-regular systems.
    AuditNonexistence(Opts),
    #[command(subcommand)]
    Construct(Construction),
}

#[derive(Subcommand, Debug)]
enum Construction {
    LatinGreek(Opts),
    Switch(Opts),
    ChainLift(Opts),
    ChainRestrict(Opts),
    EllipticHemisystem(Opts),
    Ebert(Opts),
    Klein(Opts),
    Q63(Opts),
    Cover(Opts),
    SpreadSearch(Opts),
    FieldReduction(Opts),
    Baer(Opts),
}

/// A finished command: the certificate, whether all checks passed, and the table.
pub struct Outcome {
    pub certificate: Certificate,
    pub ok: bool,
    pub table: Table,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| invalid(format!("--{name} is required")))
}

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn row(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn record(label: &str, set: &GeneratorSet, cert: &RegularityCertificate) -> SystemRecord {
    SystemRecord::new(label, set, cert)
}

fn space_of(o: &Opts) -> Result<Arc<PolarSpace>> {
    build_polar(need(o.family, "family")?, need(o.d, "d")?, need(o.q, "q")?)
}

type Table = Vec<(String, String)>;

fn count(o: &Opts) -> Result<(Value, bool, Table)> {
    let (f, d, q, k) = (need(o.family, "family")?, need(o.d, "d")?, need(o.q, "q")?, need(o.k, "k")?);
    let n = count_subspaces(d as u32, f.e2(), q, k as u32)?;
    let value: Value = match u64::try_from(&n) {
        Ok(x) => x.into(),
        Err(_) => n.to_string().into(),
    };
    let payload = json!({"family": f.name(), "d": d, "q": q, "k": k, "count": value});
    Ok((payload, true, vec![row("space", f.label(d, q)), row("count", n)]))
}

fn build(o: &Opts) -> Result<Outcome> {
    let p = space_of(o)?;
    let mut levels = Vec::new();
    let mut table = vec![row("space", p.label())];
    let mut ok = true;
    for k in 1..=p.rank() {
        let formula = to_u64(&count_subspaces(p.rank() as u32, p.e2(), p.q(), k as u32)?);
        let got = p.level(k).len() as u64;
        ok &= got == formula;
        levels.push(json!({"k": k, "enumerated": got, "formula": formula, "match": got == formula}));
        table.push(row(&format!("level {k}"), format!("{got} (formula {formula})")));
    }
    Ok(Outcome {
        certificate: cert(Some(&p), json!({ "levels": levels }), vec![]),
        ok,
        table,
    })
}

fn spectrum_cmd(o: &Opts) -> Result<Outcome> {
    let p = space_of(o)?;
    let g = build_distance_graph(&p, need(o.i, "i")?)?;
    let s = spectrum(&g)?;
    let ok = s.annihilated && s.max_residual < 1e-6 && s.max_snap_error < 1e-6;
    let table = vec![
        row("space", &s.space),
        row("eigenvalues", format!("{:?}", s.eigenvalues)),
        row("max residual", format!("{:.2e}", s.max_residual)),
        row("annihilated", s.annihilated),
    ];
    Ok(Outcome {
        certificate: cert(Some(&p), to_json(&s), vec![]),
        ok,
        table,
    })
}

fn audit(o: &Opts) -> Result<Outcome> {
    let (f, d, q, k) = (need(o.family, "family")?, need(o.d, "d")?, need(o.q, "q")?, need(o.k, "k")?);
    let a = nonexistence_audit(f, d, q, k)?;
    let num: f64 = a.bound.num.parse().map_err(|_| invalid("bound numerator"))?;
    let den: f64 = a.bound.den.parse().map_err(|_| invalid("bound denominator"))?;
    let mut payload = to_json(&a);
    payload["bound_value"] = json!(num / den);
    let table = vec![
        row("space", &a.space),
        row("bound", format!("{}/{}", a.bound.num, a.bound.den)),
        row("system size", &a.system_size),
        row("verdict", payload["verdict"].as_str().unwrap_or("")),
    ];
    Ok(Outcome {
        certificate: cert(None, payload, vec![]),
        ok: a.display_agrees,
        table,
    })
}

fn latin_greek(o: &Opts) -> Result<Outcome> {
    let p = build_polar(Family::QPlus, need(o.d, "d")?, need(o.q, "q")?)?;
    let k = o.k.unwrap_or(1);
    let (a, b) = p.latin_greek_split()?;
    let mut systems = Vec::new();
    let mut table = vec![row("space", p.label())];
    let mut ok = true;
    for (label, ids) in [("latin", a), ("greek", b)] {
        let set = GeneratorSet::new(&p, ids)?;
        let c = regularity_profile(&set, k)?;
        ok &= c.is_hemisystem;
        table.push(row(label, format!("{} generators, m = {:?}", set.len(), c.m)));
        systems.push(record(label, &set, &c));
    }
    Ok(Outcome {
        certificate: cert(Some(&p), json!({"k": k}), systems),
        ok,
        table,
    })
}

fn switch_cmd(o: &Opts) -> Result<Outcome> {
    let p = build_polar(Family::QPlus, need(o.d, "d")?, need(o.q, "q")?)?;
    let s = o.k.unwrap_or(1);
    if s == 0 || s >= p.rank() {
        return Err(invalid(format!("--k (dimension of sigma) must be in 1..{}", p.rank())));
    }
    let idx = o.i.unwrap_or(0);
    let sigma = p
        .level(s)
        .spaces()
        .get(idx)
        .cloned()
        .ok_or_else(|| invalid(format!("--i {idx} out of range")))?;
    let (a, _) = p.latin_greek_split()?;
    let (set, c) = switch(&p, &a, &sigma)?;
    let table = vec![
        row("space", p.label()),
        row("sigma", format!("vector dimension {s}, id {idx}")),
        row("switched", format!("{} generators, hemisystem at level {}", set.len(), c.k)),
    ];
    Ok(Outcome {
        certificate: cert(Some(&p), json!({"sigma_dim": s, "sigma_id": idx}), vec![record("switched", &set, &c)]),
        ok: c.is_hemisystem,
        table,
    })
}

fn seeded_bits(seed: u64, n: usize) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen()).collect()
}

/// A regular system to feed the chain operations: a spread of Q(4,q), a
/// hemisystem of Q-(5,q) for q odd, otherwise every generator.
fn chain_source(o: &Opts, p: &Arc<PolarSpace>) -> Result<(GeneratorSet, &'static str)> {
    match (p.family(), p.rank(), p.q() % 2) {
        (Family::Q, 2, _) => {
            let s = spread_search(p, o.budget.unwrap_or(DEFAULT_BUDGET))?;
            Ok((s.spread.ok_or_else(|| Error::Verification("no spread found".into()))?, "spread"))
        }
        (Family::QMinus, 2, 1) => {
            let part = partition_from_lines(&elliptic_line_family(p.q())?)?;
            let bits = seeded_bits(o.seed.unwrap_or(0), part.blocks.len());
            let (set, _) = hemisystem_from_partition(&part, &bits)?;
            // the partition was built in its own copy of the space
            Ok((GeneratorSet::new(p, set.ids().to_vec())?, "hemisystem"))
        }
        _ => Ok((GeneratorSet::all(p), "all generators")),
    }
}

fn chain(o: &Opts, lift: bool) -> Result<Outcome> {
    let p = space_of(o)?;
    let k = o.k.unwrap_or(if lift { 1 } else { 2 });
    let (src, kind) = chain_source(o, &p)?;
    let src_cert = regularity_profile(&src, k)?;
    let res = if lift { chain_lift(&src, k)? } else { chain_restrict(&src, k)? };
    let table = vec![
        row("source", format!("{kind} of {}: {} generators, m = {:?}", p.label(), src.len(), src_cert.m)),
        row(
            "result",
            format!(
                "{} generators of {}, m = {:?} (expected {})",
                res.set.len(),
                res.space.label(),
                res.certificate.m,
                res.expected_m
            ),
        ),
    ];
    let payload = json!({"source": kind, "k": k, "expected_m": res.expected_m, "target": res.space.label()});
    Ok(Outcome {
        certificate: cert(
            Some(&p),
            payload,
            vec![record("source", &src, &src_cert), record("result", &res.set, &res.certificate)],
        ),
        ok: res.certificate.m == Some(res.expected_m),
        table,
    })
}

fn elliptic(o: &Opts) -> Result<Outcome> {
    let q = o.q.unwrap_or(3);
    let fam = elliptic_line_family(q)?;
    let census = fam.pair_census();
    let part = partition_from_lines(&fam)?;
    let bits = seeded_bits(o.seed.unwrap_or(0), part.blocks.len());
    let (set, c) = hemisystem_from_partition(&part, &bits)?;
    let table = vec![
        row("lines", format!("{} + {} + {}", fam.x.len(), fam.x1.len(), fam.x2.len())),
        row("pairs checked", census.pairs),
        row("span violations", census.violations.len()),
        row("blocks", part.blocks.len()),
        row("hemisystem", format!("{} generators, m = {:?}", set.len(), c.m)),
    ];
    let payload = json!({
        "family_sizes": [fam.x.len(), fam.x1.len(), fam.x2.len()],
        "pair_census": census,
        "blocks": part.blocks.len(),
        "choice": bits,
    });
    Ok(Outcome {
        certificate: cert(Some(fam.space()), payload, vec![record("hemisystem", &set, &c)]),
        ok: census.violations.is_empty() && c.is_hemisystem,
        table,
    })
}

fn ebert(o: &Opts) -> Result<Outcome> {
    let e = ebert_partition(o.q.unwrap_or(3))?;
    let sizes: Vec<usize> = e.orbits.iter().map(Vec::len).collect();
    let mut table = vec![row("orbit sizes", format!("{sizes:?}"))];
    if let Some(c) = &e.census {
        table.push(row("tangent to none", c.tangent_to_none));
        table.push(row("tangent to two", c.tangent_to_two));
        table.push(row("parity", c.parity_ok));
    }
    let ok = e.census.as_ref().is_none_or(|c| c.parity_ok || e.relabel.is_some());
    let payload = json!({
        "orbit_sizes": sizes,
        "forms": e.forms.iter().map(|f| f.entries()).collect::<Vec<_>>(),
        "census": e.census,
        "relabel": e.relabel,
    });
    Ok(Outcome {
        certificate: cert(None, payload, vec![]),
        ok,
        table,
    })
}

fn klein(o: &Opts) -> Result<Outcome> {
    let ks = klein_one_systems(o.q.unwrap_or(3))?;
    let mut systems = Vec::new();
    let mut ok = ks.checks.iter().all(|c| c.ok()) && ks.planes_with_two == 0;
    let mut table = vec![
        row("systems", format!("{} of {} lines", ks.systems.len(), ks.systems[0].len())),
        row("tangent lines", format!("{:?}", ks.tangent_lines)),
        row("planes with two", ks.planes_with_two),
    ];
    for m in 1..=ks.systems.len() {
        let (set, c) = cover_from_systems(&ks.systems[..m])?;
        ok &= c.m == Some(2 * m as u64);
        table.push(row(&format!("cover of {m}"), format!("{} generators, m = {:?}", set.len(), c.m)));
        systems.push(record(&format!("cover-{m}"), &set, &c));
    }
    let payload = json!({
        "system_sizes": ks.systems.iter().map(|s| s.len()).collect::<Vec<_>>(),
        "checks": ks.checks,
        "tangent_lines": ks.tangent_lines,
        "planes_with_two": ks.planes_with_two,
    });
    Ok(Outcome {
        certificate: cert(Some(&ks.klein), payload, systems),
        ok,
        table,
    })
}

const PERMUTATIONS: [[usize; 3]; 6] = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];

fn q63(o: &Opts, cover_only: bool) -> Result<Outcome> {
    let phi = *PERMUTATIONS
        .get(o.i.unwrap_or(0))
        .ok_or_else(|| invalid("--i selects one of the 6 permutations"))?;
    let bits = (o.seed.unwrap_or(0) % 128) as u8;
    let c = q63_construction(phi, bits)?;
    let mut systems = vec![record("cover", &c.cover.0, &c.cover.1)];
    if !cover_only {
        systems.push(record("double-cover", &c.double_cover.0, &c.double_cover.1));
    }
    let table = vec![
        row("phi", format!("{phi:?}")),
        row("regulus bits", format!("{bits:07b}")),
        row("lines", c.system.len()),
        row("cover", format!("{} planes, m = {:?}", c.cover.0.len(), c.cover.1.m)),
        row("double cover", format!("{} planes, m = {:?}", c.double_cover.0.len(), c.double_cover.1.m)),
    ];
    let payload = json!({
        "phi": phi,
        "regulus_bits": bits,
        "lines": c.system.len(),
        "span_points": c.span_points,
        "check": c.check,
        "opposite_check": c.opposite_check,
        // no graph-automorphism backend: stabilizer orders are not computed
        "automorphisms": "unverified",
    });
    Ok(Outcome {
        certificate: cert(Some(&c.space), payload, systems),
        ok: c.check.ok() && c.opposite_check.ok(),
        table,
    })
}

fn cover(o: &Opts) -> Result<Outcome> {
    match o.family.unwrap_or(Family::Q) {
        Family::Q => q63(o, true),
        Family::QPlus => {
            let ks = klein_one_systems(o.q.unwrap_or(3))?;
            let m = o.i.unwrap_or(1).clamp(1, ks.systems.len());
            let s = &ks.systems[..m];
            let (set, c) = if m == 1 { cover_from_system(&s[0])? } else { cover_from_systems(s)? };
            Ok(Outcome {
                ok: c.m == Some(2 * m as u64),
                table: vec![row("cover", format!("{m} systems: {} generators, m = {:?}", set.len(), c.m))],
                certificate: cert(Some(&ks.klein), json!({"systems": m}), vec![record("cover", &set, &c)]),
            })
        }
        f => Err(Error::WrongFamily(format!("covers are built in Q(6,3) or Q+(5,q), not {f}"))),
    }
}

fn spread(o: &Opts) -> Result<Outcome> {
    let p = space_of(o)?;
    let s = spread_search(&p, o.budget.unwrap_or(DEFAULT_BUDGET))?;
    let mut table = vec![
        row("space", p.label()),
        row("nodes", s.nodes),
        row("found", s.spread.is_some()),
        row("exhausted", s.exhausted),
    ];
    let mut systems = Vec::new();
    let mut payload = json!({"found": s.spread.is_some(), "nodes": s.nodes, "exhausted": s.exhausted});
    if let Some(set) = &s.spread {
        let c = regularity_profile(set, 1)?;
        systems.push(record("spread", set, &c));
        if p.family() == Family::Q && p.q() % 2 == 0 {
            let proj = p.nucleus_project()?;
            let img = GeneratorSet::new(&proj.w, proj.push_generators(set.ids()))?;
            let ic = regularity_profile(&img, 1)?;
            table.push(row("projected", format!("{} generators of {}, m = {:?}", img.len(), proj.w.label(), ic.m)));
            payload["projected_to"] = json!(proj.w.label());
            systems.push(record("projected", &img, &ic));
        }
    }
    let ok = systems.iter().all(|r| r.m == Some(1)) && !systems.is_empty();
    Ok(Outcome {
        certificate: cert(Some(&p), payload, systems),
        ok,
        table,
    })
}

fn field_reduction(o: &Opts) -> Result<Outcome> {
    let ctx = build_context(need(o.d, "d")?, need(o.q, "q")?)?;
    let spreads = verify_spreads(&ctx)?;
    let identity = check_identity(&ctx);
    let census = match generator_census(&ctx, true) {
        Err(Error::CapExceeded { .. }) => generator_census(&ctx, false)?,
        other => other?,
    };
    let table = vec![
        row("type", ctx.kind()),
        row("L1 lines", spreads.l1_lines),
        row("quadric points", spreads.quadric_points),
        row("identity", format!("{} vectors, exhaustive = {}", identity.checked, identity.exhaustive)),
        row("census", format!("{:?}", census.histogram)),
        row("predicted", format!("{:?}", census.predicted)),
    ];
    let ok = spreads.ok() && identity.ok() && census.matches;
    Ok(Outcome {
        certificate: cert(None, json!({"spreads": spreads, "identity": identity, "census": census}), vec![]),
        ok,
        table,
    })
}

fn baer(o: &Opts) -> Result<Outcome> {
    let ctx = build_context(o.d.unwrap_or(4), o.q.unwrap_or(2))?;
    let count = enumerate_baer_embedded(&ctx)?;
    let checks: Vec<_> = count.subgeometries.iter().map(|s| symplectic_restriction_check(&ctx, s)).collect();
    let symplectic = checks.iter().all(|c| c.ok);
    let control = random_baer_subgeometry(&ctx, o.seed.unwrap_or(0))?;
    let control_check = symplectic_restriction_check(&ctx, &control);
    let table = vec![
        row("by closure", count.by_closure),
        row("by generators", count.by_generators),
        row("predicted", count.predicted),
        row("fibers", format!("{:?}", count.fiber_sizes)),
        row("all symplectic", symplectic),
        row("control symplectic", control_check.ok),
    ];
    let payload = json!({
        "count": count,
        "isotropic_lines": checks.iter().map(|c| c.isotropic_lines).collect::<Vec<_>>(),
        "all_symplectic": symplectic,
        "control": control_check,
    });
    Ok(Outcome {
        certificate: cert(None, payload, vec![]),
        ok: count.agree && symplectic && !control_check.ok,
        table,
    })
}

thread_local! {
    static ECHO: std::cell::RefCell<Vec<String>> = const { std::cell::RefCell::new(Vec::new()) };
}

fn cert(p: Option<&Arc<PolarSpace>>, payload: Value, systems: Vec<SystemRecord>) -> Certificate {
    let command = ECHO.with(|e| e.borrow().clone());
    Certificate::new(command, p.map(|p| p.descriptor()), payload, systems)
}

fn verify_cmd(input: &PathBuf) -> Result<Outcome> {
    let text = std::fs::read_to_string(input).map_err(|e| invalid(format!("cannot read {}: {e}", input.display())))?;
    let c = Certificate::from_json(&text)?;
    let report = verify(&c)?;
    // rerun the recorded command and compare byte for byte
    let reproduced = if c.command.is_empty() {
        None
    } else {
        let argv = std::iter::once("polarsys".to_string()).chain(c.command.iter().cloned());
        match Cli::try_parse_from(argv) {
            Ok(cli) if !matches!(cli.cmd, Cmd::Verify { .. }) => {
                let again = with_echo(c.command.clone(), || dispatch(&cli.cmd))?;
                Some(again.certificate.to_canonical_json() == c.to_canonical_json())
            }
            _ => Some(false),
        }
    };
    let ok = report.ok() && reproduced != Some(false);
    let mut table = vec![row("hash", report.hash_ok)];
    for s in &report.systems {
        table.push(row(&s.label, if s.ok { "ok".to_string() } else { s.reason.clone().unwrap_or_default() }));
    }
    if let Some(r) = reproduced {
        table.push(row("reproduced", r));
    }
    let payload = json!({"verified": ok, "report": report, "reproduced": reproduced});
    Ok(Outcome {
        certificate: Certificate::new(vec![], c.space.clone(), payload, vec![]),
        ok,
        table,
    })
}

fn with_echo<T>(echo: Vec<String>, f: impl FnOnce() -> T) -> T {
    let old = ECHO.with(|e| e.replace(echo));
    let out = f();
    ECHO.with(|e| e.replace(old));
    out
}

fn simple(r: (Value, bool, Table)) -> Outcome {
    Outcome {
        certificate: cert(None, r.0, vec![]),
        ok: r.1,
        table: r.2,
    }
}

fn dispatch(cmd: &Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Count(o) => Ok(simple(count(o)?)),
        Cmd::Build(o) => build(o),
        Cmd::Verify { input, .. } => verify_cmd(input),
        Cmd::Spectrum(o) => spectrum_cmd(o),
        Cmd::AuditNonexistence(o) => audit(o),
        Cmd::Construct(c) => match c {
            Construction::LatinGreek(o) => latin_greek(o),
            Construction::Switch(o) => switch_cmd(o),
            Construction::ChainLift(o) => chain(o, true),
            Construction::ChainRestrict(o) => chain(o, false),
            Construction::EllipticHemisystem(o) => elliptic(o),
            Construction::Ebert(o) => ebert(o),
            Construction::Klein(o) => klein(o),
            Construction::Q63(o) => q63(o, false),
            Construction::Cover(o) => cover(o),
            Construction::SpreadSearch(o) => spread(o),
            Construction::FieldReduction(o) => field_reduction(o),
            Construction::Baer(o) => baer(o),
        },
    }
}

fn out_path(cmd: &Cmd) -> Option<&PathBuf> {
    match cmd {
        Cmd::Verify { out, .. } => out.as_ref(),
        Cmd::Count(o) | Cmd::Build(o) | Cmd::Spectrum(o) | Cmd::AuditNonexistence(o) => o.out.as_ref(),
        Cmd::Construct(c) => match c {
            Construction::LatinGreek(o)
            | Construction::Switch(o)
            | Construction::ChainLift(o)
            | Construction::ChainRestrict(o)
            | Construction::EllipticHemisystem(o)
            | Construction::Ebert(o)
            | Construction::Klein(o)
            | Construction::Q63(o)
            | Construction::Cover(o)
            | Construction::SpreadSearch(o)
            | Construction::FieldReduction(o)
            | Construction::Baer(o) => o.out.as_ref(),
        },
    }
}

/// The arguments after the program name, without `--out` and its value.
fn echo_of(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if std::mem::take(&mut skip) {
            continue;
        }
        if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a.clone());
        }
    }
    out
}

/// Writes via a temporary file and a rename, so readers never see a partial file.
fn write_atomic(path: &PathBuf, text: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}

/// Runs one command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<String> = argv.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let echo = echo_of(&args);
    match with_echo(echo, || dispatch(&cli.cmd)) {
        Ok(outcome) => {
            let text = outcome.certificate.to_canonical_json();
            print!("{text}");
            for (k, v) in &outcome.table {
                eprintln!("{k:>20}  {v}");
            }
            if let Some(path) = out_path(&cli.cmd) {
                if let Err(e) = write_atomic(path, &text) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            if outcome.ok {
                0
            } else {
                1
            }
        }
        Err(Error::Verification(msg)) => {
            println!("{}", json!({"verified": false, "error": msg}));
            eprintln!("verification failed: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_drops_out() {
        let a: Vec<String> = ["p", "count", "--out", "x.json", "--d", "2", "--out=y"].map(String::from).into();
        assert_eq!(echo_of(&a), ["count", "--d", "2"]);
    }

    #[test]
    fn count_example() {
        let cli = Cli::try_parse_from(["p", "count", "--family", "Qminus", "--d", "2", "--q", "3", "--k", "2"]).unwrap();
        let o = dispatch(&cli.cmd).unwrap();
        assert_eq!(o.certificate.payload["count"], 280);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["p", "count", "--family", "X"]), 2);
        assert_eq!(run(["p", "count", "--family", "W"]), 2);
        assert_eq!(run(["p", "construct", "ebert", "--q", "9"]), 2);
    }
}
