//! Points and subspaces of PG(n-1, q) given by vectors of length `n`.
//!
//! A subspace is stored as its reduced row echelon basis, which is also its
//! identity: two subspaces are equal iff their RREF bytes are equal.

use crate::error::{cap_check, Error, Result};
use crate::fields::{Elem, Field};

/// Largest ambient vector space (`q^n`) for which points are enumerated.
pub const AMBIENT_CAP: u128 = 1 << 24;

/// Reduces the `rows x ncols` matrix `m` in place to RREF, dropping zero rows.
/// Returns the pivot columns.
pub fn rref(f: &Field, m: &mut Vec<Elem>, ncols: usize) -> Vec<usize> {
    let nrows = m.len().checked_div(ncols).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(i) = (r..nrows).find(|&i| m[i * ncols + c] != 0) else {
            continue;
        };
        if i != r {
            for j in 0..ncols {
                m.swap(i * ncols + j, r * ncols + j);
            }
        }
        let s = f.inv(m[r * ncols + c]);
        if s != 1 {
            for j in c..ncols {
                m[r * ncols + j] = f.mul(m[r * ncols + j], s);
            }
        }
        for i in 0..nrows {
            let t = m[i * ncols + c];
            if i == r || t == 0 {
                continue;
            }
            for j in c..ncols {
                let v = f.mul(t, m[r * ncols + j]);
                m[i * ncols + j] = f.sub(m[i * ncols + j], v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r * ncols);
    pivots
}

/// Basis of `{x : A x = 0}` for the `rows x ncols` matrix `a`.
pub fn kernel(f: &Field, a: &[Elem], ncols: usize) -> Vec<Vec<Elem>> {
    let mut m = a.to_vec();
    let pivots = rref(f, &mut m, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&j| !is_pivot[j])
        .map(|j| {
            let mut v = vec![0; ncols];
            v[j] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(m[i * ncols + j]);
            }
            v
        })
        .collect()
}

/// Scales `v` so its first nonzero coordinate is 1. Returns false for the zero vector.
pub fn normalize(f: &Field, v: &mut [Elem]) -> bool {
    match v.iter().position(|&x| x != 0) {
        None => false,
        Some(i) => {
            let s = f.inv(v[i]);
            if s != 1 {
                for x in v[i..].iter_mut() {
                    *x = f.mul(*x, s);
                }
            }
            true
        }
    }
}

pub fn dot(f: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// A normalized nonzero vector: the first nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointRep(pub Vec<Elem>);

impl PointRep {
    pub fn new(f: &Field, mut coords: Vec<Elem>) -> Result<Self> {
        if normalize(f, &mut coords) {
            Ok(PointRep(coords))
        } else {
            Err(Error::Invalid("zero vector is not a point".into()))
        }
    }
    pub fn coords(&self) -> &[Elem] {
        &self.0
    }
}

/// Integer code of a vector; lexicographic on coordinates.
pub fn code(order: usize, v: &[Elem]) -> usize {
    v.iter().fold(0usize, |acc, &x| acc * order + x as usize)
}

fn decode(order: usize, mut c: usize, n: usize) -> Vec<Elem> {
    let mut v = vec![0; n];
    for x in v.iter_mut().rev() {
        *x = (c % order) as Elem;
        c /= order;
    }
    v
}

/// Number of points of PG(n-1, q).
pub fn point_count(q: u128, n: u32) -> u128 {
    (q.pow(n) - 1) / (q - 1)
}

/// All points of PG(n-1, q) in lexicographic coordinate order.
pub fn enumerate_points(f: &Field, n: usize) -> Result<Vec<PointRep>> {
    let order = f.order();
    cap_check("ambient vectors", (order as u128).pow(n as u32), AMBIENT_CAP)?;
    Ok((1..order.pow(n as u32))
        .map(|c| decode(order, c, n))
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .map(PointRep)
        .collect())
}

/// A subspace of the vector space of dimension `n`, stored as an RREF basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    rows: Vec<Elem>,
    n: usize,
}

impl Subspace {
    pub fn empty(n: usize) -> Self {
        Subspace { rows: Vec::new(), n }
    }
    pub fn whole(n: usize) -> Self {
        let mut rows = vec![0; n * n];
        for i in 0..n {
            rows[i * n + i] = 1;
        }
        Subspace { rows, n }
    }
    /// Span of the given vectors.
    pub fn from_vectors<V: AsRef<[Elem]>>(f: &Field, n: usize, vecs: &[V]) -> Result<Self> {
        let mut rows = Vec::with_capacity(vecs.len() * n);
        for v in vecs {
            let v = v.as_ref();
            if v.len() != n {
                return Err(Error::AmbientMismatch(n, v.len()));
            }
            rows.extend_from_slice(v);
        }
        rref(f, &mut rows, n);
        Ok(Subspace { rows, n })
    }
    /// Wraps rows already known to be in RREF.
    pub(crate) fn from_rref_unchecked(rows: Vec<Elem>, n: usize) -> Self {
        Subspace { rows, n }
    }
    pub fn point(f: &Field, p: &PointRep) -> Self {
        Subspace::from_vectors(f, p.0.len(), &[&p.0]).expect("point has ambient length")
    }

    /// Vector dimension (projective dimension + 1).
    pub fn dim(&self) -> usize {
        self.rows.len().checked_div(self.n).unwrap_or(0)
    }
    /// Vector dimension of the ambient space.
    pub fn ambient(&self) -> usize {
        self.n
    }
    pub fn rows(&self) -> impl Iterator<Item = &[Elem]> {
        self.rows.chunks(self.n.max(1))
    }
    pub fn row(&self, i: usize) -> &[Elem] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }
    /// Canonical bytes: the RREF basis, row-major.
    pub fn key(&self) -> &[Elem] {
        &self.rows
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.n != other.n {
            Err(Error::AmbientMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn span(&self, f: &Field, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        rref(f, &mut rows, self.n);
        Ok(Subspace { rows, n: self.n })
    }

    /// Span with a single extra vector.
    pub fn extend(&self, f: &Field, v: &[Elem]) -> Subspace {
        let mut rows = self.rows.clone();
        rows.extend_from_slice(v);
        rref(f, &mut rows, self.n);
        Subspace { rows, n: self.n }
    }

    /// `{y : <x, y> = 0 for all x in self}` under the standard dot product.
    pub fn annihilator(&self, f: &Field) -> Subspace {
        let mut rows: Vec<Elem> = kernel(f, &self.rows, self.n).concat();
        rref(f, &mut rows, self.n);
        Subspace { rows, n: self.n }
    }

    /// Intersection, as the annihilator of the sum of annihilators.
    pub fn meet(&self, f: &Field, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        let sum = self.annihilator(f).span(f, &other.annihilator(f))?;
        Ok(sum.annihilator(f))
    }

    pub fn contains_vector(&self, f: &Field, v: &[Elem]) -> bool {
        let mut r = v.to_vec();
        for row in self.rows() {
            let p = row.iter().position(|&x| x != 0).expect("RREF rows are nonzero");
            let t = r[p];
            if t != 0 {
                for (x, &y) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(t, y));
                }
            }
        }
        r.iter().all(|&x| x == 0)
    }

    pub fn contains(&self, f: &Field, p: &PointRep) -> Result<bool> {
        if p.0.len() != self.n {
            return Err(Error::AmbientMismatch(self.n, p.0.len()));
        }
        Ok(self.contains_vector(f, &p.0))
    }

    pub fn is_subspace_of(&self, f: &Field, other: &Subspace) -> bool {
        self.n == other.n && self.rows().all(|r| other.contains_vector(f, r))
    }

    /// The normalized vectors of all points, in the order of their
    /// coefficient vectors with respect to the RREF basis.
    pub fn points(&self, f: &Field) -> Vec<Vec<Elem>> {
        let r = self.dim();
        let order = f.order();
        let mut out = Vec::new();
        for c in 1..order.pow(r as u32) {
            let coeff = decode(order, c, r);
            if coeff.iter().find(|&&x| x != 0) != Some(&1) {
                continue;
            }
            let mut v = vec![0; self.n];
            for (i, &a) in coeff.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (x, &y) in v.iter_mut().zip(self.row(i)) {
                    *x = f.add(*x, f.mul(a, y));
                }
            }
            // The leading coefficient is 1 on the row with the leftmost pivot,
            // so `v` is already normalized.
            out.push(v);
        }
        out
    }

    /// Image under `v -> v M` for the `n x m` matrix `mat` (row-major).
    pub fn map(&self, f: &Field, mat: &[Elem], m: usize) -> Subspace {
        let mut rows = Vec::with_capacity(self.dim() * m);
        for row in self.rows() {
            for j in 0..m {
                let mut s = 0;
                for (i, &x) in row.iter().enumerate() {
                    s = f.add(s, f.mul(x, mat[i * m + j]));
                }
                rows.push(s);
            }
        }
        rref(f, &mut rows, m);
        Subspace { rows, n: m }
    }
}

/// All RREF coefficient matrices of `r`-dimensional subspaces of GF(q)^n,
/// sorted lexicographically by their bytes.
pub fn rref_matrices(f: &Field, n: usize, r: usize) -> Vec<Vec<Elem>> {
    fn combos(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            combos(n, r, c + 1, cur, out);
            cur.pop();
        }
    }
    let mut pivot_sets = Vec::new();
    combos(n, r, 0, &mut Vec::new(), &mut pivot_sets);
    let order = f.order();
    let mut out = Vec::new();
    for piv in pivot_sets {
        let mut free = Vec::new();
        for (i, &p) in piv.iter().enumerate() {
            for c in p + 1..n {
                if !piv.contains(&c) {
                    free.push(i * n + c);
                }
            }
        }
        for code in 0..order.pow(free.len() as u32) {
            let mut m = vec![0; r * n];
            for (i, &p) in piv.iter().enumerate() {
                m[i * n + p] = 1;
            }
            let mut c = code;
            for &slot in &free {
                m[slot] = (c % order) as Elem;
                c /= order;
            }
            out.push(m);
        }
    }
    out.sort();
    out
}

/// All `r`-dimensional subspaces of GF(q)^n in lexicographic RREF order.
pub fn enumerate_subspaces(f: &Field, n: usize, r: usize) -> Result<Vec<Subspace>> {
    let count = gaussian_binomial_u128(f.order() as u128, n as u32, r as u32);
    cap_check("subspaces", count, 1 << 22)?;
    Ok(rref_matrices(f, n, r)
        .into_iter()
        .map(|rows| Subspace { rows, n })
        .collect())
}

/// Gaussian binomial coefficient, in machine integers (small arguments only).
pub fn gaussian_binomial_u128(q: u128, n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    num / den
}

/// All `r`-dimensional subspaces of `s`, sorted by RREF key.
pub fn subspaces_of(f: &Field, s: &Subspace, r: usize) -> Vec<Subspace> {
    let (k, n) = (s.dim(), s.ambient());
    let mut out: Vec<Subspace> = rref_matrices(f, k, r)
        .iter()
        .map(|c| {
            let rows: Vec<Vec<Elem>> = (0..r)
                .map(|i| {
                    let mut v = vec![0; n];
                    for (j, row) in s.rows().enumerate() {
                        let a = c[i * k + j];
                        if a != 0 {
                            for t in 0..n {
                                v[t] = f.add(v[t], f.mul(a, row[t]));
                            }
                        }
                    }
                    v
                })
                .collect();
            Subspace::from_vectors(f, n, &rows).expect("rows have ambient length")
        })
        .collect();
    out.sort();
    out
}

/// Plücker coordinates `(p01, p02, p03, p12, p31, p23)` of a line of PG(3, q).
pub fn pluecker(f: &Field, line: &Subspace) -> Result<PointRep> {
    if line.ambient() != 4 || line.dim() != 2 {
        return Err(Error::Invalid("Plücker coordinates need a line of PG(3,q)".into()));
    }
    let (a, b) = (line.row(0), line.row(1));
    let p = |i: usize, j: usize| f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i]));
    PointRep::new(f, vec![p(0, 1), p(0, 2), p(0, 3), p(1, 2), p(3, 1), p(2, 3)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_field;
    use std::collections::HashSet;

    #[test]
    fn point_counts() {
        let f2 = make_field(2, 1).unwrap();
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(enumerate_points(&f2, 2).unwrap().len(), 3);
        assert_eq!(enumerate_points(&f3, 4).unwrap().len(), 40);
        let pts = enumerate_points(&f3, 6).unwrap();
        assert_eq!(pts.len(), 364);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn subspace_counts_match_gaussian_binomial() {
        for (q, n) in [(2u32, 4usize), (3, 4), (4, 3), (2, 5)] {
            let f = crate::fields::field_of_order(q as u64).unwrap();
            for r in 0..=n {
                let subs = enumerate_subspaces(&f, n, r).unwrap();
                assert_eq!(
                    subs.len() as u128,
                    gaussian_binomial_u128(q as u128, n as u32, r as u32)
                );
                // RREF representations are distinct.
                let keys: HashSet<_> = subs.iter().map(|s| s.key().to_vec()).collect();
                assert_eq!(keys.len(), subs.len());
            }
        }
    }

    #[test]
    fn dimension_formula_exhaustive_pg32() {
        let f = make_field(2, 1).unwrap();
        let all: Vec<Subspace> = (0..=4)
            .flat_map(|r| enumerate_subspaces(&f, 4, r).unwrap())
            .collect();
        for a in &all {
            for b in &all {
                let s = a.span(&f, b).unwrap();
                let m = a.meet(&f, b).unwrap();
                assert_eq!(s.dim() + m.dim(), a.dim() + b.dim());
                assert!(m.is_subspace_of(&f, a) && m.is_subspace_of(&f, b));
                assert!(a.is_subspace_of(&f, &s) && b.is_subspace_of(&f, &s));
            }
        }
    }

    #[test]
    fn span_and_meet_examples() {
        let f = make_field(2, 1).unwrap();
        let p = Subspace::from_vectors(&f, 4, &[[1, 0, 1, 0]]).unwrap();
        assert_eq!(p.span(&f, &p).unwrap(), p);
        let l1 = Subspace::from_vectors(&f, 4, &[[1, 0, 0, 0], [0, 1, 0, 0]]).unwrap();
        let l2 = Subspace::from_vectors(&f, 4, &[[0, 0, 1, 0], [0, 0, 0, 1]]).unwrap();
        assert_eq!(l1.span(&f, &l2).unwrap().dim(), 4);
        let f3 = make_field(3, 1).unwrap();
        let pi1 = Subspace::from_vectors(&f3, 4, &[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]).unwrap();
        let pi2 = Subspace::from_vectors(&f3, 4, &[[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 2]]).unwrap();
        assert_eq!(pi1.meet(&f3, &pi2).unwrap().dim(), 2);
        assert!(matches!(p.span(&f, &Subspace::empty(3)), Err(Error::AmbientMismatch(4, 3))));
    }

    #[test]
    fn pluecker_klein_correspondence() {
        for q in [2u64, 3, 4] {
            let f = crate::fields::field_of_order(q).unwrap();
            let lines = enumerate_subspaces(&f, 4, 2).unwrap();
            let images: HashSet<PointRep> = lines
                .iter()
                .map(|l| pluecker(&f, l).unwrap())
                .inspect(|x| {
                    let v = &x.0;
                    let rel = f.add(
                        f.add(f.mul(v[0], v[5]), f.mul(v[1], v[4])),
                        f.mul(v[2], v[3]),
                    );
                    assert_eq!(rel, 0);
                })
                .collect();
            assert_eq!(images.len() as u64, (q * q + 1) * (q * q + q + 1));
        }
        let f = make_field(3, 1).unwrap();
        let l01 = Subspace::from_vectors(&f, 4, &[[1, 0, 0, 0], [0, 1, 0, 0]]).unwrap();
        let l23 = Subspace::from_vectors(&f, 4, &[[0, 0, 1, 0], [0, 0, 0, 1]]).unwrap();
        assert_eq!(pluecker(&f, &l01).unwrap().0, vec![1, 0, 0, 0, 0, 0]);
        assert_eq!(pluecker(&f, &l23).unwrap().0, vec![0, 0, 0, 0, 0, 1]);
    }
}
