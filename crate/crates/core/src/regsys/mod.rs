//! Regular systems: sets of generators meeting every (k-1)-space equally often.

mod chain;
mod design;

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use chain::{chain_lift, chain_restrict, cone_section_generators, section_coordinate, ChainResult};
pub use design::{orthogonality_check, v_decomposition, OrthogonalityReport, VDecomposition};

use crate::error::{invalid, Error, Result};
use crate::polar::{generators_through, q_half_pow, PolarSpace};
use crate::projective::Subspace;

/// A subset of the generators of a polar space, by strictly increasing ids.
#[derive(Clone)]
pub struct GeneratorSet {
    space: Arc<PolarSpace>,
    ids: Vec<u32>,
}

impl std::fmt::Debug for GeneratorSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GeneratorSet({:?}, {} ids)", self.space, self.ids.len())
    }
}

impl PartialEq for GeneratorSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) && self.ids == other.ids
    }
}

impl GeneratorSet {
    /// Validates that `ids` are strictly increasing generator ids.
    pub fn new(space: &Arc<PolarSpace>, ids: Vec<u32>) -> Result<Self> {
        let n = space.generator_count() as u32;
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("generator ids must be strictly increasing"));
        }
        if ids.last().is_some_and(|&g| g >= n) {
            return Err(invalid(format!("generator id out of range 0..{n}")));
        }
        Ok(GeneratorSet {
            space: space.clone(),
            ids,
        })
    }
    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(space: &Arc<PolarSpace>, mut ids: Vec<u32>) -> Result<Self> {
        ids.sort_unstable();
        ids.dedup();
        GeneratorSet::new(space, ids)
    }
    pub fn all(space: &Arc<PolarSpace>) -> Self {
        GeneratorSet {
            space: space.clone(),
            ids: (0..space.generator_count() as u32).collect(),
        }
    }
    pub fn empty(space: &Arc<PolarSpace>) -> Self {
        GeneratorSet {
            space: space.clone(),
            ids: Vec::new(),
        }
    }
    pub fn space(&self) -> &Arc<PolarSpace> {
        &self.space
    }
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }
    pub fn len(&self) -> usize {
        self.ids.len()
    }
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
    pub fn contains(&self, g: u32) -> bool {
        self.ids.binary_search(&g).is_ok()
    }
    pub fn indicator(&self) -> Vec<bool> {
        let mut v = vec![false; self.space.generator_count()];
        for &g in &self.ids {
            v[g as usize] = true;
        }
        v
    }
    fn same_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) {
            Ok(())
        } else {
            Err(invalid("generator sets live in different spaces"))
        }
    }
    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let mut ids = [self.ids.as_slice(), other.ids.as_slice()].concat();
        ids.sort_unstable();
        ids.dedup();
        Ok(GeneratorSet { space: self.space.clone(), ids })
    }
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let ids = self.ids.iter().copied().filter(|&g| !other.contains(g)).collect();
        Ok(GeneratorSet { space: self.space.clone(), ids })
    }
    pub fn intersection_len(&self, other: &Self) -> Result<usize> {
        self.same_space(other)?;
        Ok(self.ids.iter().filter(|&&g| other.contains(g)).count())
    }
    pub fn is_subset(&self, other: &Self) -> bool {
        self.ids.iter().all(|&g| other.contains(g))
    }
    pub fn complement(&self) -> Self {
        let ids = (0..self.space.generator_count() as u32).filter(|&g| !self.contains(g)).collect();
        GeneratorSet { space: self.space.clone(), ids }
    }
}

/// A (k-1)-space whose count breaks regularity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Id of the (k-1)-space at level k.
    pub sigma: u32,
    pub count: u64,
}

/// The regularity profile of a generator set at one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityCertificate {
    pub k: usize,
    pub m: Option<u64>,
    pub min_count: u64,
    pub max_count: u64,
    pub is_regular: bool,
    pub is_hemisystem: bool,
    /// A (k-1)-space attaining the minimum count, reported when irregular.
    pub witness: Option<Witness>,
}

impl RegularityCertificate {
    /// Checks the profile is exactly `m`-regular.
    pub fn expect_m(&self, m: u64) -> Result<()> {
        if self.m == Some(m) {
            Ok(())
        } else {
            Err(Error::Verification(format!(
                "expected {m}-regular w.r.t. level {}, found counts {}..={}",
                self.k, self.min_count, self.max_count
            )))
        }
    }
}

/// Counts, for every (k-1)-space, the members of `s` containing it.
pub fn subspace_counts(s: &GeneratorSet, k: usize) -> Result<Vec<u64>> {
    let p = &s.space;
    if k == 0 || k > p.rank() {
        return Err(invalid(format!("level {k} outside 1..={}", p.rank())));
    }
    let contained = p.contained(k);
    let mut counts = vec![0u64; p.level(k).len()];
    for &g in &s.ids {
        for &x in &contained[g as usize] {
            counts[x as usize] += 1;
        }
    }
    Ok(counts)
}

/// Regularity of `s` with respect to the (k-1)-spaces.
pub fn regularity_profile(s: &GeneratorSet, k: usize) -> Result<RegularityCertificate> {
    let counts = subspace_counts(s, k)?;
    let (mut lo, mut hi, mut arg) = (u64::MAX, 0, 0);
    for (i, &c) in counts.iter().enumerate() {
        if c < lo {
            lo = c;
            arg = i;
        }
        hi = hi.max(c);
    }
    let regular = lo == hi;
    Ok(RegularityCertificate {
        k,
        m: regular.then_some(lo),
        min_count: lo,
        max_count: hi,
        is_regular: regular,
        is_hemisystem: regular && 2 * s.len() == s.space.generator_count(),
        witness: (!regular).then_some(Witness {
            sigma: arg as u32,
            count: lo,
        }),
    })
}

fn big(x: &BigUint) -> u64 {
    x.to_u64().expect("count fits in 64 bits")
}

/// `|A|` of an m-regular system w.r.t. (k-1)-spaces: `m * prod_{i=1..k} (q^(d+e-i) + 1)`.
pub fn regular_system_size(p: &PolarSpace, m: u64, k: usize) -> Result<u64> {
    let (d, e2, q) = (p.rank() as u32, p.e2(), p.q());
    let mut size = BigUint::from(m);
    for i in 1..=k as u32 {
        size *= q_half_pow(q, 2 * (d - i) + e2)? + 1u32;
    }
    Ok(big(&size))
}

/// Outcome of the basic-properties checks on a pair of regular systems.
#[derive(Debug, Clone)]
pub struct BasicPropertiesReport {
    pub m: u64,
    pub m_prime: u64,
    /// Size law for `A`.
    pub size_ok: bool,
    /// `(k', m')` for every lower level of `A`, each verified regular.
    pub lower: Vec<(usize, u64)>,
    /// `B \ A` when `A` is a subset of `B`.
    pub difference: Option<RegularityCertificate>,
    /// `A ∪ B` when the sets are disjoint.
    pub union: Option<RegularityCertificate>,
}

/// Checks size, restriction to lower levels, complement and disjoint union.
pub fn basic_properties_check(a: &GeneratorSet, b: &GeneratorSet, k: usize) -> Result<BasicPropertiesReport> {
    a.same_space(b)?;
    let p = a.space.clone();
    let (d, e2, q) = (p.rank() as u32, p.e2(), p.q());
    let ca = regularity_profile(a, k)?;
    let cb = regularity_profile(b, k)?;
    let (Some(m), Some(m2)) = (ca.m, cb.m) else {
        return Err(invalid("both inputs must be regular"));
    };
    let size_ok = regular_system_size(&p, m, k)? == a.len() as u64;
    let through_k = big(&generators_through(d, e2, q, k as u32)?);
    let mut lower = Vec::new();
    for kp in 1..k {
        let through_kp = big(&generators_through(d, e2, q, kp as u32)?);
        if !(m * through_kp).is_multiple_of(through_k) {
            return Err(Error::Verification(format!("level {kp}: non-integral multiplicity")));
        }
        let want = m * through_kp / through_k;
        regularity_profile(a, kp)?.expect_m(want)?;
        lower.push((kp, want));
    }
    let difference = if a.is_subset(b) {
        let c = regularity_profile(&b.difference(a)?, k)?;
        c.expect_m(m2 - m)?;
        Some(c)
    } else {
        None
    };
    let union = if a.intersection_len(b)? == 0 {
        let c = regularity_profile(&a.union(b)?, k)?;
        c.expect_m(m + m2)?;
        Some(c)
    } else {
        None
    };
    Ok(BasicPropertiesReport {
        m,
        m_prime: m2,
        size_ok,
        lower,
        difference,
        union,
    })
}

/// The regularity of the trivial systems: `∅` is 0-regular and the full set
/// is `|M_{P_{d-k,e}}|`-regular.
pub fn trivial_multiplicities(p: &PolarSpace, k: usize) -> Result<(u64, u64)> {
    Ok((0, big(&generators_through(p.rank() as u32, p.e2(), p.q(), k as u32)?)))
}

/// Replaces the members of one Latin/Greek class through `sigma` by the
/// members of the other class through `sigma`.
///
/// The result is a hemisystem w.r.t. (d-s-2)-spaces, `s = dim sigma`; the
/// returned certificate is at level `k = d - s - 1`.
pub fn switch(
    p: &Arc<PolarSpace>,
    class: &[u32],
    sigma: &Subspace,
) -> Result<(GeneratorSet, RegularityCertificate)> {
    let (a, b) = p.latin_greek_split()?;
    let other = if class == a.as_slice() {
        b
    } else if class == b.as_slice() {
        a
    } else {
        return Err(invalid("input is not a Latin/Greek class"));
    };
    let d = p.rank();
    let s = sigma.dim();
    if s < 1 || s + 2 > d || !p.is_totally_isotropic(sigma) || sigma.ambient() != p.vdim() {
        return Err(invalid(format!("sigma must be totally singular of dimension 1..={}", d - 2)));
    }
    let pts = p.points_on(sigma);
    let through = |g: u32| pts.iter().all(|&x| p.generator_bits(g).contains(x as usize));
    let mut ids: Vec<u32> = class.iter().copied().filter(|&g| !through(g)).collect();
    ids.extend(other.iter().copied().filter(|&g| through(g)));
    let set = GeneratorSet::from_unsorted(p, ids)?;
    let cert = regularity_profile(&set, d - s - 1)?;
    if !cert.is_hemisystem {
        return Err(Error::Verification("switched set is not a hemisystem".into()));
    }
    Ok((set, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::{build_polar, Family};

    #[test]
    fn profiles_of_trivial_sets() {
        let p = build_polar(Family::QMinus, 2, 3).unwrap();
        let all = regularity_profile(&GeneratorSet::all(&p), 1).unwrap();
        assert_eq!((all.m, all.is_hemisystem), (Some(10), false));
        let none = regularity_profile(&GeneratorSet::empty(&p), 1).unwrap();
        assert_eq!(none.m, Some(0));
        assert_eq!(trivial_multiplicities(&p, 1).unwrap(), (0, 10));
        let one = regularity_profile(&GeneratorSet::new(&p, vec![3]).unwrap(), 1).unwrap();
        assert!(!one.is_regular && one.witness.as_ref().unwrap().count == 0);
    }

    #[test]
    fn latin_class_is_a_hemisystem() {
        let p = build_polar(Family::QPlus, 3, 2).unwrap();
        let (a, _) = p.latin_greek_split().unwrap();
        let set = GeneratorSet::new(&p, a).unwrap();
        let c = regularity_profile(&set, 1).unwrap();
        assert_eq!((c.m, c.is_hemisystem), (Some(3), true));
        // w.r.t. lines each class is a 1-regular system
        assert_eq!(regularity_profile(&set, 2).unwrap().m, Some(1));
    }

    #[test]
    fn generator_set_validation() {
        let p = build_polar(Family::W, 2, 2).unwrap();
        assert!(GeneratorSet::new(&p, vec![2, 1]).is_err());
        assert!(GeneratorSet::new(&p, vec![1, 1]).is_err());
        assert!(GeneratorSet::new(&p, vec![15]).is_err());
        assert!(regularity_profile(&GeneratorSet::all(&p), 3).is_err());
    }

    #[test]
    fn switching_in_q5_2() {
        let p = build_polar(Family::QPlus, 3, 2).unwrap();
        let (a, _) = p.latin_greek_split().unwrap();
        let f = p.field().clone();
        for x in 0..p.point_count() {
            let sigma = Subspace::from_vectors(&f, 6, &[&p.points()[x]]).unwrap();
            let (set, cert) = switch(&p, &a, &sigma).unwrap();
            assert_eq!((set.len(), cert.k, cert.m), (15, 1, Some(3)));
            assert_ne!(set.ids(), a.as_slice());
        }
        let line = p.level(2).spaces()[0].clone();
        assert!(switch(&p, &a, &line).is_err());
        assert!(switch(&p, &a[1..], &p.level(1).spaces()[0]).is_err());
    }

    #[test]
    fn basic_properties_on_latin_classes() {
        let p = build_polar(Family::QPlus, 3, 2).unwrap();
        let (a, b) = p.latin_greek_split().unwrap();
        let a = GeneratorSet::new(&p, a).unwrap();
        let b = GeneratorSet::new(&p, b).unwrap();
        let rep = basic_properties_check(&a, &b, 2).unwrap();
        assert!(rep.size_ok);
        assert_eq!(rep.lower, vec![(1, 3)]);
        assert_eq!(rep.union.unwrap().m, Some(2));
        let rep = basic_properties_check(&a, &GeneratorSet::all(&p), 2).unwrap();
        assert_eq!(rep.difference.unwrap().m, Some(1));
        assert!(basic_properties_check(&GeneratorSet::new(&p, vec![0]).unwrap(), &b, 1).is_err());
    }
}
