//! Field reduction `V(N, q^2) -> V(2N, q)`, `x_i = y_i + w z_i -> (y_i, z_i)`.
//!
//! Under it the Hermitian form with Gram matrix `J` (pairs `[[0, xi], [xi^q, 0]]`,
//! plus a trailing `-xi^2` when `N` is odd) becomes the quadratic form
//! `-xi^2 (sum of y_a z_b - z_a y_b over coordinate pairs) [+ y^2 + y z - alpha z^2]`,
//! hyperbolic for `N` even and elliptic for `N` odd. The images of the points
//! of PG(N-1, q^2) form a Desarguesian line spread `L` of PG(2N-1, q); those
//! of the Hermitian points form a line spread `L1` of the quadric.

mod baer;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use baer::{
    baer_by_closure, baer_from_generators, enumerate_baer_embedded, random_baer_subgeometry,
    symplectic_restriction_check, BaerCount, BaerSubgeometry, SymplecticCheck,
};

use crate::error::{cap_check, invalid, Error, Result};
use crate::fields::{field_of_order, Elem, Field, QuadExtension};
use crate::polar::{count_subspaces, generator_count, to_u64, Caps, Family, Form, PolarSpace};
use crate::projective::{code, enumerate_points, Subspace};

/// Seed of the sampled `H = Q o phi` check.
pub const IDENTITY_SEED: u64 = 0x5EED;
pub const IDENTITY_SAMPLES: usize = 100_000;

#[derive(Debug, Clone)]
pub struct ReductionContext {
    pub qext: QuadExtension,
    /// Dimension over GF(q^2).
    pub n: usize,
    /// On GF(q^2)^N.
    pub hermitian: Form,
    /// On GF(q)^(2N).
    pub quadric: Form,
    /// `QPlus` (N even) or `QMinus` (N odd).
    pub family: Family,
    /// `L`: `phi(<x>)` for every point `<x>` of PG(N-1, q^2), in point order.
    pub spread: Vec<Subspace>,
    /// Normalized representative over GF(q^2) of each line of `spread`.
    pub spread_points: Vec<Vec<Elem>>,
    /// Indices into `spread` of the lines with `H(x, x) = 0`.
    pub l1: Vec<usize>,
}

fn ext_to_base(x: Elem, q: usize) -> Result<Elem> {
    if (x as usize) < q {
        Ok(x)
    } else {
        Err(Error::Verification(format!("element {x} is not in the subfield")))
    }
}

/// `N = 2..=5`, `q = 2, 3`.
pub fn build_context(n: usize, q: u64) -> Result<ReductionContext> {
    if !(2..=5).contains(&n) {
        return Err(invalid(format!("field reduction is built for N in 2..=5, got {n}")));
    }
    if !(2..=3).contains(&q) {
        return Err(invalid(format!("field reduction is built for q in 2..=3, got {q}")));
    }
    cap_check("ambient vectors", (q as u128).pow(2 * n as u32), crate::projective::AMBIENT_CAP)?;
    let base = field_of_order(q)?;
    let qext = QuadExtension::new(&base)?;
    let e = qext.ext.clone();
    let xi = qext.xi;
    let xi_q = qext.conj(xi);
    let xi2 = e.mul(xi, xi);

    let mut j = vec![0; n * n];
    for p in (0..n - 1).step_by(2) {
        j[p * n + p + 1] = xi;
        j[(p + 1) * n + p] = xi_q;
    }
    if n % 2 == 1 {
        j[n * n - 1] = e.neg(xi2);
    }
    let hermitian = Form::hermitian(&e, n, j)?;

    let m = 2 * n;
    let c = ext_to_base(e.neg(xi2), q as usize)?;
    let mut coeffs = vec![0; m * m];
    for p in (0..n - 1).step_by(2) {
        // -xi^2 (y_a z_b - z_a y_b) with a = p, b = p + 1
        let (ya, za, yb, zb) = (2 * p, 2 * p + 1, 2 * p + 2, 2 * p + 3);
        coeffs[ya * m + zb] = c;
        coeffs[za * m + yb] = base.neg(c);
    }
    if n % 2 == 1 {
        let (y, z) = (m - 2, m - 1);
        coeffs[y * m + y] = c;
        coeffs[y * m + z] = c;
        coeffs[z * m + z] = base.mul(c, base.neg(qext.alpha));
    }
    let quadric = Form::quadratic(&base, m, coeffs)?;
    let family = if n.is_multiple_of(2) { Family::QPlus } else { Family::QMinus };

    let mut ctx = ReductionContext {
        qext,
        n,
        hermitian,
        quadric,
        family,
        spread: Vec::new(),
        spread_points: Vec::new(),
        l1: Vec::new(),
    };
    let points = enumerate_points(&e, n)?;
    ctx.spread = points.iter().map(|p| ctx.phi_point(&p.0)).collect();
    ctx.l1 = points
        .iter()
        .enumerate()
        .filter(|(_, p)| ctx.hermitian.is_singular(&e, &p.0))
        .map(|(i, _)| i)
        .collect();
    ctx.spread_points = points.into_iter().map(|p| p.0).collect();
    Ok(ctx)
}

impl ReductionContext {
    pub fn q(&self) -> u64 {
        self.qext.q()
    }
    pub fn base(&self) -> &Arc<Field> {
        &self.qext.base
    }
    pub fn ext(&self) -> &Arc<Field> {
        &self.qext.ext
    }
    pub fn kind(&self) -> &'static str {
        if self.family == Family::QPlus {
            "hyperbolic"
        } else {
            "elliptic"
        }
    }
    /// Rank of the quadric.
    pub fn quadric_rank(&self) -> usize {
        if self.family == Family::QPlus {
            self.n
        } else {
            self.n - 1
        }
    }
    /// `(family, rank)` of the Hermitian polar space H(N-1, q^2).
    pub fn hermitian_family(&self) -> (Family, usize) {
        if self.n.is_multiple_of(2) {
            (Family::HOdd, self.n / 2)
        } else {
            (Family::HEven, (self.n - 1) / 2)
        }
    }

    /// `(y_1, z_1, ..., y_N, z_N)`.
    pub fn phi(&self, x: &[Elem]) -> Vec<Elem> {
        x.iter()
            .flat_map(|&c| self.ext().coeffs(c).into_iter().map(|d| d as Elem))
            .collect()
    }

    /// `<phi(x), phi(w x)>`: the spread line of `<x>`.
    pub fn phi_point(&self, x: &[Elem]) -> Subspace {
        let e = self.ext();
        let wx: Vec<Elem> = x.iter().map(|&c| e.mul(self.qext.w, c)).collect();
        Subspace::from_vectors(self.base(), 2 * self.n, &[self.phi(x), self.phi(&wx)])
            .expect("images have length 2N")
    }

    /// Image of a GF(q^2)-subspace: a GF(q)-subspace of twice the dimension.
    pub fn phi_subspace(&self, s: &Subspace) -> Result<Subspace> {
        if s.ambient() != self.n {
            return Err(Error::AmbientMismatch(self.n, s.ambient()));
        }
        let e = self.ext();
        let rows: Vec<Vec<Elem>> = s
            .rows()
            .flat_map(|r| {
                let wr: Vec<Elem> = r.iter().map(|&c| e.mul(self.qext.w, c)).collect();
                [self.phi(r), self.phi(&wr)]
            })
            .collect();
        Subspace::from_vectors(self.base(), 2 * self.n, &rows)
    }

    /// The quadric as an enumerated polar space.
    pub fn quadric_space(&self) -> Result<Arc<PolarSpace>> {
        let caps = Caps {
            max_level: 250_000,
            max_generators: 30_000,
        };
        Ok(Arc::new(PolarSpace::from_form(
            self.family,
            self.quadric_rank(),
            self.base().clone(),
            self.quadric.clone(),
            caps,
        )?))
    }
}

/// Outcome of checking `H(x, x) = Q(phi(x))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub exhaustive: bool,
    pub checked: u64,
    /// First failing vector, if any.
    pub failure: Option<Vec<Elem>>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Exhaustive for `N <= 3`, else [`IDENTITY_SAMPLES`] seeded samples.
pub fn check_identity(ctx: &ReductionContext) -> IdentityReport {
    if ctx.n <= 3 {
        check_identity_exhaustive(ctx)
    } else {
        check_identity_sampled(ctx, IDENTITY_SAMPLES, IDENTITY_SEED)
    }
}

fn identity_holds(ctx: &ReductionContext, x: &[Elem]) -> bool {
    let h = ctx.hermitian.value(ctx.ext(), x);
    let qv = ctx.quadric.value(ctx.base(), &ctx.phi(x));
    h == qv
}

pub fn check_identity_exhaustive(ctx: &ReductionContext) -> IdentityReport {
    let order = ctx.ext().order();
    let total = order.pow(ctx.n as u32);
    let failure = (0..total).into_par_iter().find_first(|&c| {
        let x = decode(order, c, ctx.n);
        !identity_holds(ctx, &x)
    });
    IdentityReport {
        exhaustive: true,
        checked: total as u64,
        failure: failure.map(|c| decode(order, c, ctx.n)),
    }
}

pub fn check_identity_sampled(ctx: &ReductionContext, samples: usize, seed: u64) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = ctx.ext().order();
    let mut failure = None;
    for _ in 0..samples {
        let x: Vec<Elem> = (0..ctx.n).map(|_| rng.gen_range(0..order) as Elem).collect();
        if !identity_holds(ctx, &x) {
            failure = Some(x);
            break;
        }
    }
    IdentityReport {
        exhaustive: false,
        checked: samples as u64,
        failure,
    }
}

fn decode(order: usize, mut c: usize, n: usize) -> Vec<Elem> {
    let mut v = vec![0; n];
    for x in v.iter_mut().rev() {
        *x = (c % order) as Elem;
        c /= order;
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadReport {
    pub spread_lines: usize,
    pub ambient_points: usize,
    /// Every point of PG(2N-1, q) on exactly one line of `L`.
    pub spread_ok: bool,
    pub l1_lines: usize,
    pub quadric_points: usize,
    /// Every quadric point on exactly one line of `L1`, and `L1` lines lie on the quadric.
    pub l1_ok: bool,
    /// `|L1|` equals the point count of H(N-1, q^2).
    pub hermitian_points: u64,
}

impl SpreadReport {
    pub fn ok(&self) -> bool {
        self.spread_ok && self.l1_ok && self.l1_lines as u64 == self.hermitian_points
    }
}

pub fn verify_spreads(ctx: &ReductionContext) -> Result<SpreadReport> {
    let f = ctx.base();
    let order = f.order();
    let m = 2 * ctx.n;
    let mut hits = vec![0u8; order.pow(m as u32)];
    for line in &ctx.spread {
        for v in line.points(f) {
            let h = &mut hits[code(order, &v)];
            *h = h.saturating_add(1);
        }
    }
    let ambient = enumerate_points(f, m)?;
    let spread_ok = ambient.iter().all(|p| hits[code(order, &p.0)] == 1);
    let quadric_points: Vec<&Vec<Elem>> = ambient
        .iter()
        .map(|p| &p.0)
        .filter(|v| ctx.quadric.is_singular(f, v))
        .collect();
    let mut on_l1 = vec![0u8; hits.len()];
    let mut lines_singular = true;
    for &i in &ctx.l1 {
        for v in ctx.spread[i].points(f) {
            lines_singular &= ctx.quadric.is_singular(f, &v);
            let h = &mut on_l1[code(order, &v)];
            *h = h.saturating_add(1);
        }
    }
    let l1_ok = lines_singular && quadric_points.iter().all(|v| on_l1[code(order, v)] == 1);
    let (fam, rank) = ctx.hermitian_family();
    let hermitian_points = to_u64(&count_subspaces(rank as u32, fam.e2(), ctx.q() * ctx.q(), 1)?);
    Ok(SpreadReport {
        spread_lines: ctx.spread.len(),
        ambient_points: ambient.len(),
        spread_ok,
        l1_lines: ctx.l1.len(),
        quadric_points: quadric_points.len(),
        l1_ok,
        hermitian_points,
    })
}

/// Generators of the quadric by the number of `L1` lines they contain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorCensus {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: u64,
    #[serde(rename = "type")]
    pub kind: String,
    /// Empty when the generators were not enumerated.
    pub histogram: BTreeMap<u64, u64>,
    /// Orbit sizes from the closed forms, keyed by `(q^(2i) - 1)/(q^2 - 1)`.
    pub predicted: BTreeMap<u64, u64>,
    pub generator_count: u64,
    pub enumerated: bool,
    #[serde(rename = "match")]
    pub matches: bool,
}

fn prod(range: impl Iterator<Item = u128>) -> u128 {
    range.product()
}

/// `|O_{h,i}|` (hyperbolic, `N = 2h`) or the elliptic analogue (`N = 2h+1`).
pub fn predicted_orbits(n: usize, q: u64) -> BTreeMap<u64, u64> {
    let q = q as u128;
    let h = (n / 2) as u32;
    let elliptic = n % 2 == 1;
    let tail = if elliptic {
        prod((2..=h + 1).map(|j| q.pow(2 * j - 1) + 1))
    } else {
        prod((1..=h).map(|j| q.pow(2 * j - 1) + 1))
    };
    (0..=h)
        .map(|i| {
            let a = h - i;
            let expo = if elliptic { a * (a + 1) } else { a * a.saturating_sub(1) };
            let num = prod((a + 1..=h).map(|j| q.pow(2 * j) - 1));
            let den = prod((1..=i).map(|j| q.pow(2 * j) - 1));
            let key = (q.pow(2 * i) - 1) / (q * q - 1);
            (key as u64, (q.pow(expo) * num / den * tail) as u64)
        })
        .collect()
}

/// Enumerates the generators when `enumerate` is set; otherwise only
/// compares the sum of the orbit sizes with the generator count.
pub fn generator_census(ctx: &ReductionContext, enumerate: bool) -> Result<GeneratorCensus> {
    let q = ctx.q();
    let predicted = predicted_orbits(ctx.n, q);
    let generator_count = to_u64(&generator_count(ctx.quadric_rank() as u32, ctx.family.e2(), q)?);
    let mut census = GeneratorCensus {
        n: ctx.n,
        q,
        kind: ctx.kind().into(),
        histogram: BTreeMap::new(),
        predicted,
        generator_count,
        enumerated: enumerate,
        matches: false,
    };
    if enumerate {
        let space = ctx.quadric_space()?;
        let (line_of, _) = l1_point_map(ctx, &space)?;
        census.histogram = l1_counts(ctx, &space, &line_of)
            .into_iter()
            .fold(BTreeMap::new(), |mut h, c| {
                *h.entry(c as u64).or_insert(0) += 1;
                h
            });
        census.matches = census.histogram == census.predicted;
    } else {
        census.matches = census.predicted.values().sum::<u64>() == generator_count;
    }
    Ok(census)
}

/// For each point id of `space`, the index (into `ctx.l1`) of its `L1` line.
fn l1_point_map(ctx: &ReductionContext, space: &PolarSpace) -> Result<(Vec<u32>, Vec<Vec<u32>>)> {
    let f = ctx.base();
    let mut line_of = vec![u32::MAX; space.point_count()];
    let mut lines = Vec::with_capacity(ctx.l1.len());
    for (t, &i) in ctx.l1.iter().enumerate() {
        let ids = ctx.spread[i]
            .points(f)
            .iter()
            .map(|v| space.point_id(v).ok_or_else(|| Error::Verification("an L1 line leaves the quadric".into())))
            .collect::<Result<Vec<u32>>>()?;
        for &x in &ids {
            line_of[x as usize] = t as u32;
        }
        lines.push(ids);
    }
    Ok((line_of, lines))
}

/// Number of `L1` lines inside each generator.
fn l1_counts(ctx: &ReductionContext, space: &PolarSpace, line_of: &[u32]) -> Vec<usize> {
    let per_line = ctx.q() as usize + 1;
    (0..space.generator_count() as u32)
        .into_par_iter()
        .map(|g| {
            let mut hits: HashMap<u32, usize> = HashMap::new();
            for &x in space.generator_points(g) {
                *hits.entry(line_of[x as usize]).or_insert(0) += 1;
            }
            hits.values().filter(|&&c| c == per_line).count()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_context() {
        let ctx = build_context(2, 2).unwrap();
        assert_eq!(ctx.spread.len(), 5);
        assert_eq!(ctx.kind(), "hyperbolic");
        let rep = verify_spreads(&ctx).unwrap();
        assert!(rep.ok());
        assert_eq!((rep.quadric_points, rep.l1_lines), (9, 3));
    }

    #[test]
    fn spreads_at_q2() {
        let c4 = build_context(4, 2).unwrap();
        let r4 = verify_spreads(&c4).unwrap();
        assert!(r4.ok());
        assert_eq!((r4.l1_lines, r4.quadric_points, r4.spread_lines), (45, 135, 85));
        let c3 = build_context(3, 2).unwrap();
        let r3 = verify_spreads(&c3).unwrap();
        assert!(r3.ok());
        assert_eq!((c3.kind(), r3.l1_lines, r3.quadric_points), ("elliptic", 9, 27));
    }

    #[test]
    fn spreads_at_q3() {
        for n in [2, 3] {
            let ctx = build_context(n, 3).unwrap();
            let rep = verify_spreads(&ctx).unwrap();
            assert!(rep.ok(), "N = {n}");
            assert_eq!(rep.spread_lines as u64, (3u64.pow(2 * n as u32) - 1) / 8);
        }
    }

    #[test]
    fn identities() {
        for (n, q) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let ctx = build_context(n, q).unwrap();
            let rep = check_identity(&ctx);
            assert!(rep.exhaustive && rep.ok());
        }
        for n in [4, 5] {
            let ctx = build_context(n, 2).unwrap();
            let rep = check_identity(&ctx);
            assert!(!rep.exhaustive && rep.ok() && rep.checked == 100_000);
            assert!(check_identity_exhaustive(&ctx).ok());
        }
    }

    #[test]
    fn phi_doubles_dimension() {
        for n in [2, 3] {
            let ctx = build_context(n, 2).unwrap();
            for r in [1, 2] {
                for s in crate::projective::enumerate_subspaces(ctx.ext(), n, r).unwrap() {
                    assert_eq!(ctx.phi_subspace(&s).unwrap().dim(), 2 * r);
                }
            }
        }
    }

    #[test]
    fn orbit_formulas() {
        let hyp = predicted_orbits(4, 2);
        assert_eq!(hyp, BTreeMap::from([(0, 108), (1, 135), (5, 27)]));
        assert_eq!(predicted_orbits(2, 3), BTreeMap::from([(0, 4), (1, 4)]));
        let ell = predicted_orbits(5, 2);
        assert_eq!(ell.values().sum::<u64>(), 25245);
    }

    #[test]
    fn censuses() {
        let c = generator_census(&build_context(4, 2).unwrap(), true).unwrap();
        assert!(c.matches);
        assert_eq!(c.histogram, BTreeMap::from([(0, 108), (1, 135), (5, 27)]));
        let e = generator_census(&build_context(3, 2).unwrap(), true).unwrap();
        assert!(e.matches);
        assert_eq!(e.histogram, BTreeMap::from([(0, 36), (1, 9)]));
        let counting = generator_census(&build_context(5, 2).unwrap(), false).unwrap();
        assert!(counting.matches && counting.histogram.is_empty());
        assert_eq!(counting.generator_count, 25245);
    }
}
