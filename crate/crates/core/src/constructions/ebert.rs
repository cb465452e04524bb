//! PG(3,q) as GF(q^4)*/GF(q)*: the subgroup of order q^2+1 of the Singer
//! cycle has q+1 orbits, each an elliptic quadric. For q odd the tangent
//! lines of each quadric map under the Klein correspondence onto a 1-system
//! of Q+(5,q).

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cover_from_systems, verify_one_system, OneSystem, SystemCheck};
use crate::error::{invalid, Error, Result};
use crate::fields::{field_of_order, Elem, Field};
use crate::polar::{Caps, Family, Form, PolarSpace};
use crate::projective::{code, enumerate_subspaces, kernel, pluecker, PointRep, Subspace};
use crate::regsys::RegularityCertificate;

/// Line and plane tangency census of the partition, q odd.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EbertCensus {
    pub lines: usize,
    pub tangent_to_none: usize,
    pub tangent_to_two: usize,
    /// Lines tangent to any other number of quadrics.
    pub other_lines: usize,
    pub planes_tangent_to_two: usize,
    /// `tangent_pairs[i][j]`: some line is tangent to both `E_i` and `E_j`.
    pub tangent_pairs: Vec<Vec<bool>>,
    /// The pair table is nonempty exactly when `i + j` is odd.
    pub parity_ok: bool,
}

#[derive(Debug, Clone)]
pub struct EbertPartition {
    pub field: Arc<Field>,
    /// `orbits[i]`: normalized points `<beta^t>` with `t ≡ i (mod q+1)`, sorted.
    pub orbits: Vec<Vec<Vec<Elem>>>,
    /// Upper-triangular coefficients of a quadratic form vanishing exactly on each orbit.
    pub forms: Vec<Form>,
    pub census: Option<EbertCensus>,
    /// Set when the natural labeling fails the parity law: `relabel[i]` is
    /// the new index of orbit `i` (orbits and forms are already permuted).
    pub relabel: Option<Vec<usize>>,
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn primitive_element(f: &Field) -> Elem {
    let n = f.order() as u64 - 1;
    let factors = prime_factors(n);
    f.elements()
        .skip(2)
        .find(|&b| factors.iter().all(|&r| f.pow(b, n / r) != 1))
        .expect("multiplicative groups of finite fields are cyclic")
}

/// A quadratic form in 4 variables vanishing on `pts` and defining an
/// elliptic quadric with exactly those points.
fn fit_quadric(f: &Arc<Field>, pts: &[Vec<Elem>]) -> Result<Form> {
    let mono: Vec<(usize, usize)> = (0..4).flat_map(|i| (i..4).map(move |j| (i, j))).collect();
    let rows: Vec<Elem> = pts
        .iter()
        .flat_map(|x| mono.iter().map(|&(i, j)| f.mul(x[i], x[j])))
        .collect();
    let basis = kernel(f, &rows, mono.len());
    if basis.len() > 6 {
        return Err(Error::Verification(format!("quadric fit has a {}-dimensional solution space", basis.len())));
    }
    let order = f.order();
    let points = crate::projective::enumerate_points(f, 4)?;
    for c in 1..order.pow(basis.len() as u32) {
        let mut v = vec![0; mono.len()];
        let mut t = c;
        for b in &basis {
            let a = (t % order) as Elem;
            t /= order;
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.add(*x, f.mul(a, y));
            }
        }
        let mut coeffs = vec![0; 16];
        for (&(i, j), &a) in mono.iter().zip(&v) {
            coeffs[i * 4 + j] = a;
        }
        let form = Form::quadratic(f, 4, coeffs)?;
        let zeros = points.iter().filter(|p| form.is_singular(f, p.coords())).count();
        if zeros != pts.len() {
            continue;
        }
        // succeeds only for a nondegenerate form with the elliptic point and line counts
        if PolarSpace::from_form(Family::QMinus, 1, f.clone(), form.clone(), Caps::default()).is_ok() {
            return Ok(form);
        }
    }
    Err(Error::Verification("orbit is not an elliptic quadric".into()))
}

/// The `q+1` Singer-subgroup orbits on PG(3,q), each verified to be an
/// elliptic quadric; with the tangency census for q odd.
pub fn ebert_partition(q: u64) -> Result<EbertPartition> {
    if !(2..=4).contains(&q) {
        return Err(invalid(format!("Ebert partitions are built for q in 2..=4, got {q}")));
    }
    let base = field_of_order(q)?;
    let big = Field::extension(&base, &base.smallest_irreducible(4))?;
    let beta = primitive_element(&big);
    let theta = (q.pow(4) - 1) / (q - 1);
    let classes = q as usize + 1;
    let mut orbits = vec![Vec::new(); classes];
    let mut x = 1;
    for t in 0..theta {
        let v: Vec<Elem> = big.coeffs(x).into_iter().map(|c| c as Elem).collect();
        orbits[(t % (q + 1)) as usize].push(PointRep::new(&base, v)?.0);
        x = big.mul(x, beta);
    }
    for o in &mut orbits {
        o.sort();
        o.dedup();
        if o.len() as u64 != q * q + 1 {
            return Err(Error::Verification(format!("orbit of size {}", o.len())));
        }
    }
    let forms = orbits
        .par_iter()
        .map(|o| fit_quadric(&base, o))
        .collect::<Result<Vec<Form>>>()?;
    let mut part = EbertPartition {
        field: base,
        orbits,
        forms,
        census: None,
        relabel: None,
    };
    if q % 2 == 1 {
        let census = tangency_census(&part)?;
        if !census.parity_ok {
            let perm = parity_relabel(&census.tangent_pairs)
                .ok_or_else(|| Error::Verification("no labeling satisfies the parity law".into()))?;
            let mut orbits = vec![Vec::new(); classes];
            let mut forms = part.forms.clone();
            for (i, &j) in perm.iter().enumerate() {
                orbits[j] = part.orbits[i].clone();
                forms[j] = part.forms[i].clone();
            }
            part.orbits = orbits;
            part.forms = forms;
            part.relabel = Some(perm);
            part.census = Some(tangency_census(&part)?);
        } else {
            part.census = Some(census);
        }
    }
    Ok(part)
}

/// First permutation (lexicographic) under which tangent pairs have odd index sum.
fn parity_relabel(pairs: &[Vec<bool>]) -> Option<Vec<usize>> {
    fn next_perm(p: &mut [usize]) -> bool {
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
            return false;
        };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }
    let n = pairs.len();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let ok = (0..n).all(|i| (0..n).all(|j| i == j || pairs[i][j] == ((perm[i] + perm[j]) % 2 == 1)));
        if ok {
            return Some(perm);
        }
        if !next_perm(&mut perm) {
            return None;
        }
    }
}

impl EbertPartition {
    pub fn q(&self) -> u64 {
        self.field.order() as u64
    }
    /// Orbit index of every point of PG(3,q), by coordinate code.
    fn labels(&self) -> Vec<usize> {
        let order = self.field.order();
        let mut lab = vec![usize::MAX; order.pow(4)];
        for (i, o) in self.orbits.iter().enumerate() {
            for v in o {
                lab[code(order, v)] = i;
            }
        }
        lab
    }
    /// `counts[i]`: points of `s` on `E_i`.
    fn meet_counts(&self, labels: &[usize], s: &Subspace) -> Vec<usize> {
        let mut c = vec![0; self.orbits.len()];
        for v in s.points(&self.field) {
            c[labels[code(self.field.order(), &v)]] += 1;
        }
        c
    }
    /// Lines of PG(3,q) tangent to `E_i`, grouped by point of contact
    /// (in orbit order).
    pub fn tangent_pencils(&self, i: usize) -> Result<Vec<Vec<Subspace>>> {
        let f = &self.field;
        let labels = self.labels();
        let lines = enumerate_subspaces(f, 4, 2)?;
        Ok(self.orbits[i]
            .iter()
            .map(|pt| {
                lines
                    .iter()
                    .filter(|l| l.contains_vector(f, pt) && self.meet_counts(&labels, l)[i] == 1)
                    .cloned()
                    .collect()
            })
            .collect())
    }
}

fn tangency_census(part: &EbertPartition) -> Result<EbertCensus> {
    let f = &part.field;
    let n = part.orbits.len();
    let labels = part.labels();
    let lines = enumerate_subspaces(f, 4, 2)?;
    let planes = enumerate_subspaces(f, 4, 3)?;
    let mut tangent_pairs = vec![vec![false; n]; n];
    let (mut none, mut two, mut other) = (0, 0, 0);
    for l in &lines {
        let tangent: Vec<usize> = part
            .meet_counts(&labels, l)
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == 1)
            .map(|(i, _)| i)
            .collect();
        match tangent.len() {
            0 => none += 1,
            2 => two += 1,
            _ => other += 1,
        }
        for &a in &tangent {
            for &b in &tangent {
                tangent_pairs[a][b] |= a != b;
            }
        }
    }
    let planes_tangent_to_two = planes
        .iter()
        .filter(|p| part.meet_counts(&labels, p).iter().filter(|&&c| c == 1).count() >= 2)
        .count();
    let parity_ok = (0..n).all(|i| (0..n).all(|j| i == j || tangent_pairs[i][j] == ((i + j) % 2 == 1)));
    Ok(EbertCensus {
        lines: lines.len(),
        tangent_to_none: none,
        tangent_to_two: two,
        other_lines: other,
        planes_tangent_to_two,
        tangent_pairs,
        parity_ok,
    })
}

/// The Klein quadric `X0 X5 + X1 X4 + X2 X3` holding Plücker coordinates.
pub fn klein_quadric(f: &Arc<Field>) -> Result<Arc<PolarSpace>> {
    let mut c = vec![0; 36];
    for (i, j) in [(0, 5), (1, 4), (2, 3)] {
        c[i * 6 + j] = 1;
    }
    let form = Form::quadratic(f, 6, c)?;
    Ok(Arc::new(PolarSpace::from_form(Family::QPlus, 3, f.clone(), form, Caps::default())?))
}

/// The 1-systems `S_i` of the Klein quadric from the Ebert quadrics `E_i`.
#[derive(Debug, Clone)]
pub struct KleinSystems {
    pub partition: EbertPartition,
    pub klein: Arc<PolarSpace>,
    pub systems: Vec<OneSystem>,
    pub checks: Vec<SystemCheck>,
    /// Tangent lines per quadric.
    pub tangent_lines: Vec<usize>,
    /// Planes of the Klein quadric holding two lines of the union; always 0.
    pub planes_with_two: usize,
    /// Cover of `S_0 ∪ ... ∪ S_{m-1}` for `m = 1..=q+1`.
    pub covers: Vec<(usize, RegularityCertificate)>,
}

/// Klein images of the tangent pencils of each Ebert quadric, q odd;
/// verified 1-systems with pairwise plane-disjoint covers.
pub fn klein_one_systems(q: u64) -> Result<KleinSystems> {
    if q.is_multiple_of(2) {
        return Err(Error::WrongFamily("Klein 1-systems from Ebert partitions need q odd".into()));
    }
    let partition = ebert_partition(q)?;
    let f = partition.field.clone();
    let klein = klein_quadric(&f)?;
    let mut systems = Vec::new();
    let mut tangent_lines = Vec::new();
    for i in 0..partition.orbits.len() {
        let pencils = partition.tangent_pencils(i)?;
        tangent_lines.push(pencils.iter().map(Vec::len).sum());
        let members = pencils
            .iter()
            .map(|pencil| {
                let images = pencil
                    .iter()
                    .map(|l| pluecker(&f, l).map(|p| p.0))
                    .collect::<Result<Vec<Vec<Elem>>>>()?;
                let s = Subspace::from_vectors(&f, 6, &images)?;
                if s.dim() != 2 {
                    return Err(Error::Verification("a tangent pencil does not map to a line".into()));
                }
                Ok(s)
            })
            .collect::<Result<Vec<Subspace>>>()?;
        systems.push(OneSystem::new(&klein, &members)?);
    }
    let checks = systems.iter().map(verify_one_system).collect::<Result<Vec<_>>>()?;
    if let Some(c) = checks.iter().find(|c| !c.ok()) {
        return Err(Error::Verification(format!("not a 1-system: {c:?}")));
    }
    let mut lines_per_plane = vec![0usize; klein.generator_count()];
    let through = klein.generators_through(2);
    for s in &systems {
        for &m in s.member_ids() {
            for &g in &through[m as usize] {
                lines_per_plane[g as usize] += 1;
            }
        }
    }
    let planes_with_two = lines_per_plane.iter().filter(|&&c| c >= 2).count();
    let covers = (1..=systems.len())
        .map(|m| cover_from_systems(&systems[..m]).map(|(_, c)| (m, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(KleinSystems {
        partition,
        klein,
        systems,
        checks,
        tangent_lines,
        planes_with_two,
        covers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbits_partition_pg3() {
        for q in [2, 3, 4] {
            let part = ebert_partition(q).unwrap();
            let total: usize = part.orbits.iter().map(Vec::len).sum();
            assert_eq!(part.orbits.len() as u64, q + 1);
            assert_eq!(total as u64, (q + 1) * (q * q + 1));
            let mut all: Vec<_> = part.orbits.concat();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), total);
        }
    }

    #[test]
    fn census_at_q3() {
        let c = ebert_partition(3).unwrap().census.unwrap();
        assert_eq!((c.lines, c.tangent_to_none, c.tangent_to_two, c.other_lines), (130, 50, 80, 0));
        assert_eq!(c.planes_tangent_to_two, 0);
        assert!(c.parity_ok);
    }

    #[test]
    fn klein_systems_at_q3() {
        let k = klein_one_systems(3).unwrap();
        assert_eq!(k.systems.len(), 4);
        assert!(k.systems.iter().all(|s| s.len() == 10));
        assert_eq!(k.tangent_lines, vec![40; 4]);
        assert_eq!(k.planes_with_two, 0);
        for (m, c) in &k.covers {
            assert_eq!(c.m, Some(2 * *m as u64));
        }
    }

    #[test]
    fn relabel_search() {
        // a 4-cycle 0-2-1-3-0 of tangent pairs needs 2 and 3 swapped
        let mut t = vec![vec![false; 4]; 4];
        for (a, b) in [(0, 2), (2, 1), (1, 3), (3, 0)] {
            t[a][b] = true;
            t[b][a] = true;
        }
        assert_eq!(parity_relabel(&t), Some(vec![0, 2, 1, 3]));
    }
}
