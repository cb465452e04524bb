//! Exact eigenspace decomposition of the generator space of the dual polar
//! scheme, and the design/antidesign tests built on it.
//!
//! `C_j` is the incidence matrix of (j-1)-spaces against generators, with
//! `C_0` the all-ones row and `C_d` the identity. `W_j = Im(C_j^t)` is
//! nested and `W_j = V_0 ⊥ ... ⊥ V_j` with `V_j = W_j ∩ Ker(C_{j-1})`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{cap_check, invalid, Error, Result};
use crate::polar::PolarSpace;

use super::GeneratorSet;

/// Largest generator count handled by the exact decomposition.
pub const DESIGN_GENERATOR_CAP: u128 = 2500;

type Q = BigRational;

/// A matrix in reduced row echelon form over the rationals.
#[derive(Debug, Clone)]
struct Echelon {
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(mut rows: Vec<Vec<Q>>, ncols: usize) -> Echelon {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][c].recip();
            for x in rows[r].iter_mut() {
                *x = &*x * &inv;
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && !row[c].is_zero() {
                    let factor = row[c].clone();
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        if !y.is_zero() {
                            *x -= &factor * y;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        Echelon { rows, pivots }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Whether `v` lies in the row space.
    fn contains(&self, v: &[Q]) -> bool {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if !v[c].is_zero() {
                let factor = v[c].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &factor * y;
                    }
                }
            }
        }
        v.iter().all(Zero::is_zero)
    }

    /// A basis of `{y : A y = 0}` for the matrix this echelon form came from.
    fn kernel(&self, ncols: usize) -> Vec<Vec<Q>> {
        let free: Vec<usize> = (0..ncols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut y = vec![Q::zero(); ncols];
                y[fc] = Q::one();
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    y[pc] = -row[fc].clone();
                }
                y
            })
            .collect()
    }
}

/// Scales a rational vector to a primitive integer vector.
fn primitive(v: &[Q]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// The decomposition `V_0 ⊥ ... ⊥ V_k` for one polar space.
pub struct VDecomposition {
    space: Arc<PolarSpace>,
    /// Primitive integer basis of each `V_j`.
    bases: Vec<Vec<Vec<BigInt>>>,
    /// Echelon form of `W_j`.
    w: Vec<Echelon>,
}

impl std::fmt::Debug for VDecomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "VDecomposition({:?}, dims {:?})", self.space, self.dims())
    }
}

/// Rows of `C_j` as sorted generator lists.
fn incidence_rows(p: &PolarSpace, j: usize) -> Vec<Vec<u32>> {
    if j == 0 {
        vec![(0..p.generator_count() as u32).collect()]
    } else {
        p.generators_through(j).to_vec()
    }
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Computes `V_0, ..., V_up_to` exactly and verifies their dimensions and
/// pairwise orthogonality.
pub fn v_decomposition(p: &Arc<PolarSpace>, up_to: usize) -> Result<VDecomposition> {
    if up_to > p.rank() {
        return Err(invalid(format!("up_to = {up_to} exceeds the rank {}", p.rank())));
    }
    let n = p.generator_count();
    cap_check("generators for exact design algebra", n as u128, DESIGN_GENERATOR_CAP)?;
    let dense = |rows: &[Vec<u32>]| -> Vec<Vec<Q>> {
        rows.iter()
            .map(|r| {
                let mut v = vec![Q::zero(); n];
                for &g in r {
                    v[g as usize] = Q::one();
                }
                v
            })
            .collect()
    };
    let mut prev = incidence_rows(p, 0);
    let mut w = vec![Echelon::new(dense(&prev), n)];
    let mut bases = vec![vec![vec![BigInt::one(); n]]];
    for j in 1..=up_to {
        let cur = incidence_rows(p, j);
        let wj = Echelon::new(dense(&cur), n);
        // y in Ker(C_{j-1} C_j^t)  <=>  C_j^t y in Ker(C_{j-1})
        let m: Vec<Vec<Q>> = prev
            .iter()
            .map(|a| cur.iter().map(|b| Q::from_integer(intersection_len(a, b).into())).collect())
            .collect();
        let ker = Echelon::new(m, cur.len()).kernel(cur.len());
        let images: Vec<Vec<Q>> = ker
            .iter()
            .map(|y| {
                let mut x = vec![Q::zero(); n];
                for (row, c) in cur.iter().zip(y) {
                    if !c.is_zero() {
                        for &g in row {
                            x[g as usize] += c;
                        }
                    }
                }
                x
            })
            .collect();
        let vj = Echelon::new(images, n);
        let want = wj.rank() - w[j - 1].rank();
        if vj.rank() != want {
            return Err(Error::Verification(format!(
                "dim V_{j} = {} but rank W_{j} - rank W_{} = {want}",
                vj.rank(),
                j - 1
            )));
        }
        bases.push(vj.rows.iter().map(|r| primitive(r)).collect());
        w.push(wj);
        prev = cur;
    }
    let dec = VDecomposition {
        space: p.clone(),
        bases,
        w,
    };
    dec.verify_orthogonal()?;
    Ok(dec)
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

impl VDecomposition {
    pub fn space(&self) -> &Arc<PolarSpace> {
        &self.space
    }
    pub fn up_to(&self) -> usize {
        self.bases.len() - 1
    }
    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }
    /// `rank C_j = dim W_j`.
    pub fn rank_w(&self, j: usize) -> usize {
        self.w[j].rank()
    }
    /// Primitive integer basis of `V_j`.
    pub fn basis(&self, j: usize) -> &[Vec<BigInt>] {
        &self.bases[j]
    }

    fn verify_orthogonal(&self) -> Result<()> {
        for i in 0..self.bases.len() {
            for j in i + 1..self.bases.len() {
                if self.bases[i].iter().any(|a| self.bases[j].iter().any(|b| !dot(a, b).is_zero())) {
                    return Err(Error::Verification(format!("V_{i} and V_{j} are not orthogonal")));
                }
            }
        }
        Ok(())
    }

    fn check_set(&self, s: &GeneratorSet) -> Result<()> {
        if Arc::ptr_eq(s.space(), &self.space) {
            Ok(())
        } else {
            Err(invalid("generator set belongs to another space"))
        }
    }

    fn projects_nonzero(&self, s: &GeneratorSet, j: usize) -> bool {
        self.bases[j]
            .iter()
            .any(|b| !s.ids().iter().map(|&g| &b[g as usize]).sum::<BigInt>().is_zero())
    }

    /// `chi_S` is orthogonal to `V_1, ..., V_k`.
    pub fn is_k_design(&self, s: &GeneratorSet, k: usize) -> Result<bool> {
        self.check_set(s)?;
        if k == 0 || k > self.up_to() {
            return Err(invalid(format!("k = {k} outside 1..={}", self.up_to())));
        }
        Ok((1..=k).all(|j| !self.projects_nonzero(s, j)))
    }

    /// `chi_S` lies in `V_0 ⊥ ... ⊥ V_k`.
    pub fn is_k_antidesign(&self, s: &GeneratorSet, k: usize) -> Result<bool> {
        self.check_set(s)?;
        if k > self.up_to() {
            return Err(invalid(format!("k = {k} exceeds {}", self.up_to())));
        }
        let chi: Vec<Q> = s.indicator().into_iter().map(|b| Q::from_integer(BigInt::from(b as u8))).collect();
        Ok(self.w[k].contains(&chi))
    }

    /// The indices `j >= 1` with a nonzero projection of `chi_S` onto `V_j`;
    /// needs the full decomposition.
    pub fn dual_degree_set(&self, s: &GeneratorSet) -> Result<Vec<usize>> {
        self.check_set(s)?;
        if self.up_to() != self.space.rank() {
            return Err(invalid("dual degree set needs the decomposition up to the rank"));
        }
        Ok((1..=self.up_to()).filter(|&j| self.projects_nonzero(s, j)).collect())
    }

    /// Membership of `v` in `W_j`, for callers holding rational vectors.
    pub fn in_w(&self, j: usize, v: &[BigInt]) -> bool {
        self.w[j].contains(&to_q(v))
    }
}

/// The intersection law for design-orthogonal subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub dual_degrees_1: Vec<usize>,
    pub dual_degrees_2: Vec<usize>,
    /// The two dual degree sets are disjoint.
    pub design_orthogonal: bool,
    pub intersection: u64,
    /// `|S1| |S2| / n` as a reduced fraction.
    pub predicted: (u64, u64),
    /// `intersection == predicted`; meaningful only when design-orthogonal.
    pub holds: bool,
}

/// Compares `|S1 ∩ S2|` with `|S1| |S2| / n`.
pub fn orthogonality_check(dec: &VDecomposition, s1: &GeneratorSet, s2: &GeneratorSet) -> Result<OrthogonalityReport> {
    let d1 = dec.dual_degree_set(s1)?;
    let d2 = dec.dual_degree_set(s2)?;
    let n = dec.space.generator_count() as u64;
    let num = s1.len() as u64 * s2.len() as u64;
    let g = num.gcd(&n);
    let predicted = (num / g, n / g);
    let intersection = s1.intersection_len(s2)? as u64;
    Ok(OrthogonalityReport {
        design_orthogonal: d1.iter().all(|j| !d2.contains(j)),
        holds: predicted.1 == 1 && predicted.0 == intersection,
        dual_degrees_1: d1,
        dual_degrees_2: d2,
        intersection,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::{build_polar, Family};
    use crate::regsys::{cone_section_generators, regularity_profile};

    #[test]
    fn dimensions_q5_2_elliptic() {
        let p = build_polar(Family::QMinus, 2, 2).unwrap();
        let dec = v_decomposition(&p, 2).unwrap();
        let dims = dec.dims();
        assert_eq!(dims[0], 1);
        assert_eq!(dims.iter().sum::<usize>(), 45);
        assert_eq!(dec.rank_w(1), dims[0] + dims[1]);
        assert_eq!(dec.rank_w(2), 45);
    }

    #[test]
    fn pencils_are_antidesigns() {
        let p = build_polar(Family::QPlus, 3, 2).unwrap();
        let dec = v_decomposition(&p, 3).unwrap();
        for r in 1..=2 {
            for sigma in (0..p.level(r).len()).step_by(7) {
                let s = GeneratorSet::new(&p, p.generators_through(r)[sigma].clone()).unwrap();
                assert!(dec.is_k_antidesign(&s, r).unwrap());
                assert!(dec.dual_degree_set(&s).unwrap().iter().all(|&j| j <= r));
            }
        }
    }

    #[test]
    fn design_iff_regular_on_classes() {
        let p = build_polar(Family::QPlus, 3, 2).unwrap();
        let dec = v_decomposition(&p, 3).unwrap();
        let (a, _) = p.latin_greek_split().unwrap();
        let a = GeneratorSet::new(&p, a).unwrap();
        for k in 1..=2 {
            assert_eq!(dec.is_k_design(&a, k).unwrap(), regularity_profile(&a, k).unwrap().is_regular);
        }
        assert!(dec.is_k_design(&a, 2).unwrap());
        assert_eq!(dec.dual_degree_set(&a).unwrap(), vec![3]);
    }

    #[test]
    fn cone_section_is_a_one_antidesign() {
        let p = build_polar(Family::QMinus, 2, 3).unwrap();
        let dec = v_decomposition(&p, 1).unwrap();
        let omega = cone_section_generators(&p).unwrap();
        assert!(dec.is_k_antidesign(&omega, 1).unwrap());
        assert!(dec.dual_degree_set(&omega).is_err());
    }

    #[test]
    fn orthogonality_trivial_cases() {
        let p = build_polar(Family::QMinus, 2, 2).unwrap();
        let dec = v_decomposition(&p, 2).unwrap();
        let all = GeneratorSet::all(&p);
        let rep = orthogonality_check(&dec, &all, &all).unwrap();
        assert!(rep.design_orthogonal && rep.holds);
        assert_eq!(rep.intersection, 45);
        let pencil = GeneratorSet::new(&p, p.generators_through(1)[0].clone()).unwrap();
        let one = GeneratorSet::new(&p, vec![pencil.ids()[0]]).unwrap();
        let rep = orthogonality_check(&dec, &one, &pencil).unwrap();
        assert!(!rep.design_orthogonal);
    }
}
