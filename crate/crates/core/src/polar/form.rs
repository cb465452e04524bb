use crate::error::{Error, Result};
use crate::fields::{find_alpha, Elem, Field};
use crate::projective::{kernel, Subspace};

use super::Family;

/// The kind of reflexive form defining a polar space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormKind {
    /// A quadratic form; `coeffs[i*n+j]` (i <= j) is the coefficient of `X_i X_j`.
    Quadratic { coeffs: Vec<Elem> },
    Alternating,
    /// Hermitian with conjugation `x -> x^s` where the field order is `s^2`.
    Hermitian { s: u64 },
}

/// A nondegenerate form on GF(q)^n.
///
/// `gram` is the (sesqui)linear Gram matrix: `B(x, y) = x G sigma(y)` with
/// sigma the identity or the conjugation. For quadrics it is the
/// polarization `G = C + C^T`, which is singular in characteristic 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    n: usize,
    kind: FormKind,
    gram: Vec<Elem>,
}

impl Form {
    /// Quadratic form from its upper-triangular coefficient matrix.
    pub fn quadratic(f: &Field, n: usize, coeffs: Vec<Elem>) -> Result<Form> {
        if coeffs.len() != n * n {
            return Err(Error::Invalid("coefficient matrix has wrong size".into()));
        }
        let mut c = coeffs;
        for i in 0..n {
            for j in 0..i {
                c[i * n + j] = 0;
            }
        }
        let mut gram = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] = if i == j {
                    f.add(c[i * n + i], c[i * n + i])
                } else {
                    f.add(c[i * n + j], c[j * n + i])
                };
            }
        }
        Ok(Form {
            n,
            kind: FormKind::Quadratic { coeffs: c },
            gram,
        })
    }

    pub fn alternating(f: &Field, n: usize, gram: Vec<Elem>) -> Result<Form> {
        let ok = gram.len() == n * n
            && (0..n).all(|i| {
                gram[i * n + i] == 0 && (0..n).all(|j| gram[i * n + j] == f.neg(gram[j * n + i]))
            });
        if !ok {
            return Err(Error::Invalid("matrix is not alternating".into()));
        }
        Ok(Form {
            n,
            kind: FormKind::Alternating,
            gram,
        })
    }

    pub fn hermitian(f: &Field, n: usize, gram: Vec<Elem>) -> Result<Form> {
        let s = f
            .sqrt_order()
            .ok_or_else(|| Error::Invalid("Hermitian forms need a field of square order".into()))?
            as u64;
        let ok = gram.len() == n * n
            && (0..n).all(|i| (0..n).all(|j| gram[j * n + i] == f.pow(gram[i * n + j], s)));
        if !ok {
            return Err(Error::Invalid("matrix is not Hermitian".into()));
        }
        Ok(Form {
            n,
            kind: FormKind::Hermitian { s },
            gram,
        })
    }

    /// The fixed coordinate form of each family at rank `d`.
    pub fn canonical(family: Family, d: usize, f: &Field) -> Result<Form> {
        let n = family.vdim(d);
        match family {
            Family::QPlus | Family::Q | Family::QMinus => {
                let mut c = vec![0; n * n];
                let off = match family {
                    Family::QPlus => 0,
                    Family::Q => {
                        c[0] = 1;
                        1
                    }
                    _ => {
                        // x0^2 - x0 x1 - alpha x1^2 has no nontrivial zero
                        let alpha = find_alpha(f);
                        c[0] = 1;
                        c[1] = f.neg(1);
                        c[n + 1] = f.neg(alpha);
                        2
                    }
                };
                for i in (off..n).step_by(2) {
                    c[i * n + i + 1] = 1;
                }
                Form::quadratic(f, n, c)
            }
            Family::W => {
                let mut g = vec![0; n * n];
                for i in (0..n).step_by(2) {
                    g[i * n + i + 1] = 1;
                    g[(i + 1) * n + i] = f.neg(1);
                }
                Form::alternating(f, n, g)
            }
            Family::HOdd | Family::HEven => {
                let mut g = vec![0; n * n];
                for i in 0..n {
                    g[i * n + i] = 1;
                }
                Form::hermitian(f, n, g)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn kind(&self) -> &FormKind {
        &self.kind
    }
    pub fn gram(&self) -> &[Elem] {
        &self.gram
    }

    fn conj(&self, f: &Field, x: Elem) -> Elem {
        match self.kind {
            FormKind::Hermitian { s } => f.pow(x, s),
            _ => x,
        }
    }

    /// `Q(x)` for quadrics, `H(x, x)` for Hermitian forms, 0 for alternating forms.
    pub fn value(&self, f: &Field, x: &[Elem]) -> Elem {
        match &self.kind {
            FormKind::Quadratic { coeffs } => {
                let mut s = 0;
                for i in 0..self.n {
                    if x[i] == 0 {
                        continue;
                    }
                    for j in i..self.n {
                        let c = coeffs[i * self.n + j];
                        if c != 0 && x[j] != 0 {
                            s = f.add(s, f.mul(c, f.mul(x[i], x[j])));
                        }
                    }
                }
                s
            }
            FormKind::Alternating => 0,
            FormKind::Hermitian { .. } => self.pair(f, x, x),
        }
    }

    pub fn is_singular(&self, f: &Field, x: &[Elem]) -> bool {
        self.value(f, x) == 0
    }

    /// `B(x, y)`.
    pub fn pair(&self, f: &Field, x: &[Elem], y: &[Elem]) -> Elem {
        let n = self.n;
        let mut s = 0;
        for (j, &yj) in y.iter().enumerate().take(n).filter(|e| *e.1 != 0) {
            let a = x.iter().enumerate().take(n).fold(0, |a, (i, &xi)| f.add(a, f.mul(xi, self.gram[i * n + j])));
            s = f.add(s, f.mul(a, self.conj(f, yj)));
        }
        s
    }

    /// A vector `u` with `B(x, y) = 0` iff `u . y = 0`.
    pub fn functional(&self, f: &Field, x: &[Elem]) -> Vec<Elem> {
        (0..self.n)
            .map(|j| {
                let a = (0..self.n).fold(0, |acc, i| f.add(acc, f.mul(x[i], self.gram[i * self.n + j])));
                // (sum a_j y_j^s)^s = sum a_j^s y_j since s^2 = q
                self.conj(f, a)
            })
            .collect()
    }

    /// The subspace orthogonal to `s`.
    pub fn perp(&self, f: &Field, s: &Subspace) -> Subspace {
        let rows: Vec<Elem> = s.rows().flat_map(|r| self.functional(f, r)).collect();
        let ker = kernel(f, &rows, self.n);
        Subspace::from_vectors(f, self.n, &ker).expect("kernel vectors have ambient length")
    }

    /// Radical of the (polarized) Gram matrix.
    pub fn radical(&self, f: &Field) -> Subspace {
        self.perp(f, &Subspace::whole(self.n))
    }

    /// Nondegenerate: the radical contains no singular vector.
    pub fn is_nondegenerate(&self, f: &Field) -> bool {
        let rad = self.radical(f);
        rad.dim() == 0 || rad.points(f).iter().all(|v| !self.is_singular(f, v))
    }

    /// Restriction to the hyperplane `X_j = 0`, in the remaining coordinates.
    pub fn drop_coordinate(&self, f: &Field, j: usize) -> Result<Form> {
        let n = self.n - 1;
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != j).collect();
        let sub = |m: &[Elem]| -> Vec<Elem> {
            keep.iter()
                .flat_map(|&a| keep.iter().map(move |&b| m[a * self.n + b]))
                .collect()
        };
        match &self.kind {
            FormKind::Quadratic { coeffs } => Form::quadratic(f, n, sub(coeffs)),
            FormKind::Alternating => Form::alternating(f, n, sub(&self.gram)),
            FormKind::Hermitian { .. } => Form::hermitian(f, n, sub(&self.gram)),
        }
    }

    /// Sparse description: `(i, j, coefficient)` triples of the quadratic
    /// coefficients, or of the Gram matrix for the other kinds.
    pub fn entries(&self) -> Vec<(usize, usize, Elem)> {
        let m = match &self.kind {
            FormKind::Quadratic { coeffs } => coeffs,
            _ => &self.gram,
        };
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i * self.n + j] != 0)
            .map(|(i, j)| (i, j, m[i * self.n + j]))
            .collect()
    }

    /// Inverse of [`Form::entries`].
    pub fn from_entries(f: &Field, kind: &str, n: usize, entries: &[(usize, usize, Elem)]) -> Result<Form> {
        let mut m = vec![0; n * n];
        for &(i, j, c) in entries {
            if i >= n || j >= n || c as usize >= f.order() {
                return Err(Error::Invalid("form entry out of range".into()));
            }
            m[i * n + j] = c;
        }
        match kind {
            "quadratic" => Form::quadratic(f, n, m),
            "alternating" => Form::alternating(f, n, m),
            "hermitian" => Form::hermitian(f, n, m),
            other => Err(Error::Invalid(format!("unknown form kind {other}"))),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            FormKind::Quadratic { .. } => "quadratic",
            FormKind::Alternating => "alternating",
            FormKind::Hermitian { .. } => "hermitian",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::field_of_order;
    use crate::projective::enumerate_points;

    #[test]
    fn canonical_forms_are_nondegenerate() {
        for fam in [Family::QPlus, Family::Q, Family::QMinus, Family::W] {
            for q in [2u64, 3, 4] {
                let f = field_of_order(q).unwrap();
                for d in 1..=3 {
                    let form = Form::canonical(fam, d, &f).unwrap();
                    assert!(form.is_nondegenerate(&f), "{fam:?} d={d} q={q}");
                }
            }
        }
        let f4 = field_of_order(4).unwrap();
        for fam in [Family::HOdd, Family::HEven] {
            let form = Form::canonical(fam, 2, &f4).unwrap();
            assert!(form.is_nondegenerate(&f4));
        }
    }

    #[test]
    fn elliptic_binary_part_is_anisotropic() {
        for q in [2u64, 3, 4, 5] {
            let f = field_of_order(q).unwrap();
            let form = Form::canonical(Family::QMinus, 1, &f).unwrap();
            assert!(enumerate_points(&f, 4)
                .unwrap()
                .iter()
                .filter(|p| p.0[2] == 0 && p.0[3] == 0)
                .all(|p| !form.is_singular(&f, &p.0)));
        }
    }

    #[test]
    fn functional_agrees_with_pairing() {
        for (fam, q) in [(Family::QMinus, 3u64), (Family::HOdd, 4), (Family::W, 3), (Family::Q, 4)] {
            let f = field_of_order(q).unwrap();
            let form = Form::canonical(fam, 2, &f).unwrap();
            let pts = enumerate_points(&f, form.n()).unwrap();
            for x in pts.iter().step_by(7) {
                let u = form.functional(&f, &x.0);
                for y in pts.iter().step_by(5) {
                    let b = form.pair(&f, &x.0, &y.0);
                    assert_eq!(b == 0, crate::projective::dot(&f, &u, &y.0) == 0);
                }
            }
        }
    }

    #[test]
    fn perp_is_an_involution() {
        let f = field_of_order(3).unwrap();
        let form = Form::canonical(Family::Q, 2, &f).unwrap();
        for r in 0..=5 {
            for s in crate::projective::enumerate_subspaces(&f, 5, r).unwrap().iter().step_by(11) {
                let p = form.perp(&f, s);
                assert_eq!(p.dim(), 5 - r);
                assert_eq!(&form.perp(&f, &p), s);
            }
        }
        assert_eq!(form.perp(&f, &Subspace::whole(5)).dim(), 0);
    }
}
