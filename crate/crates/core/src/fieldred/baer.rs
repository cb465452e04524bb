//! Baer subgeometries PG(N-1, q) embedded in H(N-1, q^2), N even.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{l1_counts, l1_point_map, ReductionContext};
use crate::error::{invalid, Error, Result};
use crate::fields::{Elem, Field};
use crate::polar::Family;
use crate::projective::{code, normalize, rref, Subspace};

/// The points of a Baer subgeometry, as sorted normalized vectors over GF(q^2).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BaerSubgeometry {
    pub points: Vec<Vec<Elem>>,
}

impl BaerSubgeometry {
    /// All GF(q)-combinations of `basis`, projectively.
    pub fn from_basis(ext: &Field, q: usize, basis: &[Vec<Elem>]) -> Self {
        let n = basis.first().map_or(0, Vec::len);
        let mut set = BTreeSet::new();
        for c in 1..q.pow(basis.len() as u32) {
            let mut v = vec![0; n];
            let mut t = c;
            for b in basis {
                let lambda = (t % q) as Elem;
                t /= q;
                if lambda != 0 {
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = ext.add(*x, ext.mul(lambda, y));
                    }
                }
            }
            normalize(ext, &mut v);
            set.insert(v);
        }
        BaerSubgeometry {
            points: set.into_iter().collect(),
        }
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaerCount {
    /// Distinct subgeometries from frames of Hermitian points.
    pub by_closure: usize,
    /// Distinct subgeometries read off generators holding no `L1` line.
    pub by_generators: usize,
    pub zero_line_generators: usize,
    /// `generators per subgeometry -> subgeometries`.
    pub fiber_sizes: BTreeMap<usize, usize>,
    /// `q^(n^2-n) prod_{i=2..n} (q^(2i-1)+1)` with `N = 2n`.
    pub predicted: u64,
    pub agree: bool,
    #[serde(skip)]
    pub subgeometries: Vec<BaerSubgeometry>,
}

fn check_ctx(ctx: &ReductionContext) -> Result<()> {
    if ctx.family != Family::QPlus || ctx.q() != 2 || ctx.n > 4 {
        return Err(invalid("Baer enumeration needs N in {2, 4} and q = 2"));
    }
    Ok(())
}

fn hermitian_points(ctx: &ReductionContext) -> Vec<Vec<Elem>> {
    ctx.l1.iter().map(|&i| ctx.spread_points[i].clone()).collect()
}

/// Inverse of the `n x n` matrix with the given rows, if invertible.
fn inverse(f: &Field, rows: &[&[Elem]]) -> Option<Vec<Elem>> {
    let n = rows.len();
    let mut m = vec![0; n * 2 * n];
    for (i, r) in rows.iter().enumerate() {
        m[i * 2 * n..i * 2 * n + n].copy_from_slice(r);
        m[i * 2 * n + n + i] = 1;
    }
    let piv = rref(f, &mut m, 2 * n);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some((0..n).flat_map(|i| m[i * 2 * n + n..(i + 1) * 2 * n].to_vec()).collect())
}

/// Every frame `v_1..v_N, v_{N+1}` of Hermitian points, with
/// `v_{N+1} = sum a_i v_i` and all `a_i != 0`, spans the Baer subgeometry
/// generated over GF(q) by `a_i v_i`; keep those lying on the variety.
pub fn baer_by_closure(ctx: &ReductionContext) -> Result<BTreeSet<BaerSubgeometry>> {
    check_ctx(ctx)?;
    let e = ctx.ext();
    let n = ctx.n;
    let q = ctx.q() as usize;
    let pts = hermitian_points(ctx);
    let order = e.order();
    let mut on_h = vec![false; order.pow(n as u32)];
    for p in &pts {
        on_h[code(order, p)] = true;
    }
    let mut firsts: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::new();
    fn combos(k: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            combos(k, m, i + 1, cur, out);
            cur.pop();
        }
    }
    combos(n, pts.len(), 0, &mut cur, &mut firsts);
    let found: Vec<BaerSubgeometry> = firsts
        .par_iter()
        .flat_map_iter(|idx| {
            let rows: Vec<&[Elem]> = idx.iter().map(|&i| pts[i].as_slice()).collect();
            let inv = inverse(e, &rows);
            let mut out = Vec::new();
            if let Some(inv) = inv {
                for p in &pts {
                    let a: Vec<Elem> = (0..n)
                        .map(|j| (0..n).fold(0, |s, k| e.add(s, e.mul(p[k], inv[k * n + j]))))
                        .collect();
                    if a.contains(&0) {
                        continue;
                    }
                    let basis: Vec<Vec<Elem>> =
                        (0..n).map(|i| rows[i].iter().map(|&c| e.mul(a[i], c)).collect()).collect();
                    let s = BaerSubgeometry::from_basis(e, q, &basis);
                    if s.points.iter().all(|v| on_h[code(order, v)]) {
                        out.push(s);
                    }
                }
            }
            out
        })
        .collect();
    Ok(found.into_iter().collect())
}

/// For each generator of the quadric holding no `L1` line, the Hermitian
/// points whose `L1` lines meet it; with the number of generators per result.
pub fn baer_from_generators(ctx: &ReductionContext) -> Result<(BTreeMap<BaerSubgeometry, usize>, usize)> {
    check_ctx(ctx)?;
    let space = ctx.quadric_space()?;
    let (line_of, _) = l1_point_map(ctx, &space)?;
    let counts = l1_counts(ctx, &space, &line_of);
    let mut out: BTreeMap<BaerSubgeometry, usize> = BTreeMap::new();
    let mut zero = 0;
    for (g, &c) in counts.iter().enumerate() {
        if c != 0 {
            continue;
        }
        zero += 1;
        let mut pts: Vec<Vec<Elem>> = space
            .generator_points(g as u32)
            .iter()
            .map(|&x| ctx.spread_points[ctx.l1[line_of[x as usize] as usize]].clone())
            .collect();
        pts.sort();
        pts.dedup();
        *out.entry(BaerSubgeometry { points: pts }).or_insert(0) += 1;
    }
    Ok((out, zero))
}

/// Both methods, compared with each other and with the closed form.
pub fn enumerate_baer_embedded(ctx: &ReductionContext) -> Result<BaerCount> {
    let closure = baer_by_closure(ctx)?;
    let (fibers, zero) = baer_from_generators(ctx)?;
    let q = ctx.q();
    let h = (ctx.n / 2) as u32;
    let predicted = q.pow(h * h - h) * (2..=h).map(|i| q.pow(2 * i - 1) + 1).product::<u64>();
    let mut fiber_sizes = BTreeMap::new();
    for &c in fibers.values() {
        *fiber_sizes.entry(c).or_insert(0) += 1;
    }
    let same = closure.len() == fibers.len() && closure.iter().zip(fibers.keys()).all(|(a, b)| a == b);
    Ok(BaerCount {
        by_closure: closure.len(),
        by_generators: fibers.len(),
        zero_line_generators: zero,
        fiber_sizes,
        predicted,
        agree: same && closure.len() as u64 == predicted,
        subgeometries: closure.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticCheck {
    pub ok: bool,
    /// Index of a point whose polar trace is not a hyperplane through it.
    pub witness: Option<usize>,
    /// Lines of the subgeometry that are totally isotropic.
    pub isotropic_lines: usize,
}

/// The Hermitian polarity restricted to `sigma`: every point lies in its own
/// trace, and every trace is a hyperplane of `sigma`.
pub fn symplectic_restriction_check(ctx: &ReductionContext, sigma: &BaerSubgeometry) -> SymplecticCheck {
    let e = ctx.ext();
    let n = ctx.n;
    let q = ctx.q() as usize;
    let hyper = (q.pow(n as u32 - 1) - 1) / (q - 1);
    let h = &ctx.hermitian;
    let witness = sigma.points.iter().enumerate().position(|(_, p)| {
        let trace: Vec<&Vec<Elem>> = sigma.points.iter().filter(|x| h.pair(e, p, x) == 0).collect();
        let span = Subspace::from_vectors(e, n, &trace).map(|s| s.dim()).unwrap_or(0);
        !(h.pair(e, p, p) == 0 && trace.len() == hyper && span == n - 1)
    });
    let mut lines = BTreeSet::new();
    for (i, a) in sigma.points.iter().enumerate() {
        for b in &sigma.points[i + 1..] {
            if h.pair(e, a, b) != 0 || h.pair(e, a, a) != 0 || h.pair(e, b, b) != 0 {
                continue;
            }
            let line = Subspace::from_vectors(e, n, &[a, b]).expect("same length");
            let on: Vec<usize> = (0..sigma.len()).filter(|&k| line.contains_vector(e, &sigma.points[k])).collect();
            lines.insert(on);
        }
    }
    SymplecticCheck {
        ok: witness.is_none(),
        witness,
        isotropic_lines: lines.len(),
    }
}

/// A Baer subgeometry from a random GF(q^2)-basis, drawn until it is not
/// contained in the Hermitian variety.
pub fn random_baer_subgeometry(ctx: &ReductionContext, seed: u64) -> Result<BaerSubgeometry> {
    let e = ctx.ext();
    let n = ctx.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let basis: Vec<Vec<Elem>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0..e.order()) as Elem).collect())
            .collect();
        if Subspace::from_vectors(e, n, &basis)?.dim() < n {
            continue;
        }
        let s = BaerSubgeometry::from_basis(e, ctx.q() as usize, &basis);
        if s.points.iter().any(|p| !ctx.hermitian.is_singular(e, p)) {
            return Ok(s);
        }
    }
    Err(Error::Verification("no non-embedded subgeometry drawn".into()))
}

#[cfg(test)]
mod tests {
    use super::super::build_context;
    use super::*;

    #[test]
    fn baer_count_n2() {
        let ctx = build_context(4, 2).unwrap();
        let c = enumerate_baer_embedded(&ctx).unwrap();
        assert_eq!((c.by_closure, c.by_generators, c.predicted), (36, 36, 36));
        assert!(c.agree);
        assert_eq!(c.zero_line_generators, 108);
        assert_eq!(c.fiber_sizes, BTreeMap::from([(3, 36)]));
        assert!(c.subgeometries.iter().all(|s| s.len() == 15));
        for s in &c.subgeometries {
            let chk = symplectic_restriction_check(&ctx, s);
            assert!(chk.ok);
            assert_eq!(chk.isotropic_lines, 15);
        }
        let bad = random_baer_subgeometry(&ctx, 1).unwrap();
        assert!(!symplectic_restriction_check(&ctx, &bad).ok);
    }

    #[test]
    fn baer_count_n1() {
        let ctx = build_context(2, 2).unwrap();
        let c = enumerate_baer_embedded(&ctx).unwrap();
        assert_eq!((c.by_closure, c.predicted), (1, 1));
        assert!(c.agree);
    }
}
