//! Moving regular systems between P_{d,e} and its neighbours one step along
//! the chain Q+(2d+1) > Q(2d) > Q-(2d+1) (and H(2d+1) > H(2d)).

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::fields::Elem;
use crate::polar::{count_subspaces, q_half_pow, to_u64, Caps, Family, Form, FormKind, PolarSpace};
use crate::projective::Subspace;

use super::{regularity_profile, GeneratorSet, RegularityCertificate};

/// A regular system transported to a neighbouring polar space.
#[derive(Debug, Clone)]
pub struct ChainResult {
    pub space: Arc<PolarSpace>,
    pub set: GeneratorSet,
    pub certificate: RegularityCertificate,
    /// The multiplicity predicted by the chain law.
    pub expected_m: u64,
}

/// `q^(e-1) + 1` for the family of `p`.
fn chain_factor(p: &PolarSpace) -> Result<u64> {
    Ok(to_u64(&q_half_pow(p.q(), p.e2() - 2)?) + 1)
}

fn check_family(p: &PolarSpace) -> Result<()> {
    match p.family() {
        Family::Q | Family::QMinus | Family::HEven => Ok(()),
        _ => Err(Error::WrongFamily(format!(
            "{} is not one of Q(2d,q), Q-(2d+1,q), H(2d,q)",
            p.label()
        ))),
    }
}

/// The partner family: `p` is a hyperplane section of a space of the
/// partner family one rank up, and contains one of the same rank.
fn partner(family: Family) -> Family {
    match family {
        Family::Q => Family::QPlus,
        Family::QMinus => Family::Q,
        Family::HEven => Family::HOdd,
        _ => unreachable!("checked by check_family"),
    }
}

/// A coordinate `j` such that `X_j = 0` cuts `p` in a nondegenerate section
/// of the next family down (same rank).
pub fn section_coordinate(p: &PolarSpace) -> Result<usize> {
    check_family(p)?;
    let target = partner(p.family());
    let want = to_u64(&count_subspaces(p.rank() as u32, target.e2(), p.q(), 1)?) as usize;
    let f = p.field();
    (0..p.vdim())
        .find(|&j| {
            p.points().iter().filter(|x| x[j] == 0).count() == want
                && p.form().drop_coordinate(f, j).is_ok_and(|g| g.is_nondegenerate(f))
        })
        .ok_or_else(|| Error::Verification(format!("no coordinate hyperplane of {} has the right section", p.label())))
}

/// Generators of `p` lying in the hyperplane `X_j = 0`.
fn generators_in_hyperplane(p: &PolarSpace, ids: impl Iterator<Item = u32>, j: usize) -> Vec<u32> {
    ids.filter(|&g| p.generators()[g as usize].rows().all(|r| r[j] == 0)).collect()
}

/// The members of `p` contained in the canonical section one step down: the
/// generator set of a cone with empty vertex, a 1-antidesign.
pub fn cone_section_generators(p: &Arc<PolarSpace>) -> Result<GeneratorSet> {
    let j = section_coordinate(p)?;
    GeneratorSet::new(p, generators_in_hyperplane(p, 0..p.generator_count() as u32, j))
}

/// The form of `p` extended by one variable so that `p` is the section `Y = 0`
/// of the next family up.
fn lifted_form(p: &PolarSpace) -> Result<Form> {
    let f = p.field();
    let n = p.vdim();
    let m = n + 1;
    let widen = |src: &[Elem]| -> Vec<Elem> {
        let mut out = vec![0; m * m];
        for i in 0..n {
            out[i * m..i * m + n].copy_from_slice(&src[i * n..(i + 1) * n]);
        }
        out
    };
    match (p.family(), p.form().kind()) {
        (Family::Q, FormKind::Quadratic { coeffs }) => {
            // an isolated square term a X_j^2 becomes a X_j (X_j + Y)
            let j = (0..n)
                .find(|&j| coeffs[j * n + j] != 0 && (0..n).all(|i| i == j || (coeffs[i * n + j] == 0 && coeffs[j * n + i] == 0)))
                .ok_or_else(|| invalid("lift needs a quadratic form with an isolated square term"))?;
            let mut c = widen(coeffs);
            c[j * m + n] = coeffs[j * n + j];
            Form::quadratic(f, m, c)
        }
        (Family::QMinus, FormKind::Quadratic { coeffs }) => {
            let mut c = widen(coeffs);
            c[n * m + n] = 1;
            Form::quadratic(f, m, c)
        }
        (Family::HEven, FormKind::Hermitian { .. }) => {
            let mut g = widen(p.form().gram());
            g[n * m + n] = 1;
            Form::hermitian(f, m, g)
        }
        _ => Err(invalid("form kind does not match the family")),
    }
}

fn regular_m(r: &GeneratorSet, k: usize) -> Result<u64> {
    let p = r.space();
    if k == 0 || k >= p.rank() + usize::from(p.rank() == 1) {
        return Err(invalid(format!("level k = {k} outside 1..{}", p.rank())));
    }
    regularity_profile(r, k)?
        .m
        .ok_or_else(|| invalid(format!("input is not regular w.r.t. level {k}")))
}

/// All generators of the next space up that contain a member of `r`.
///
/// `r` must be m-regular w.r.t. (k-1)-spaces; the result is verified
/// `m (q^(e-1) + 1)`-regular w.r.t. (k-1)-spaces.
pub fn chain_lift(r: &GeneratorSet, k: usize) -> Result<ChainResult> {
    let p = r.space();
    check_family(p)?;
    let m = regular_m(r, k)?;
    let f = p.field();
    let up = partner(p.family());
    let big = Arc::new(PolarSpace::from_form(up, p.rank() + 1, f.clone(), lifted_form(p)?, Caps::default())?);
    let n = p.vdim();
    let hyperplane = Subspace::from_vectors(
        f,
        n + 1,
        &(0..n).map(|i| (0..=n).map(|j| Elem::from(i == j)).collect()).collect::<Vec<Vec<Elem>>>(),
    )?;
    let members = r.indicator();
    let mut ids = Vec::new();
    for (g, gen) in big.generators().iter().enumerate() {
        let cut = gen.meet(f, &hyperplane)?;
        let rows: Vec<&[Elem]> = cut.rows().map(|row| &row[..n]).collect();
        let below = Subspace::from_vectors(f, n, &rows)?;
        let id = p
            .locate_generator(&below)
            .ok_or_else(|| Error::Verification("a generator meets the section outside its generators".into()))?;
        if members[id as usize] {
            ids.push(g as u32);
        }
    }
    let set = GeneratorSet::new(&big, ids)?;
    let certificate = regularity_profile(&set, k)?;
    let expected_m = m * chain_factor(p)?;
    certificate.expect_m(expected_m)?;
    Ok(ChainResult {
        space: big,
        set,
        certificate,
        expected_m,
    })
}

/// Members of `r` inside the canonical section one step down.
///
/// `r` must be m-regular w.r.t. (k-1)-spaces with `k >= 2`; the result is
/// verified `m (q^(e-1) + 1)`-regular w.r.t. (k-2)-spaces of the section.
pub fn chain_restrict(r: &GeneratorSet, k: usize) -> Result<ChainResult> {
    let p = r.space();
    check_family(p)?;
    if k < 2 {
        return Err(invalid("restriction needs k >= 2"));
    }
    let m = regular_m(r, k)?;
    let f = p.field();
    let j = section_coordinate(p)?;
    let down = partner(p.family());
    let small = Arc::new(PolarSpace::from_form(
        down,
        p.rank(),
        f.clone(),
        p.form().drop_coordinate(f, j)?,
        Caps::default(),
    )?);
    let mut ids = Vec::new();
    for g in generators_in_hyperplane(p, r.ids().iter().copied(), j) {
        let rows: Vec<Vec<Elem>> = p.generators()[g as usize]
            .rows()
            .map(|row| row.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &c)| c).collect())
            .collect();
        let s = Subspace::from_vectors(f, p.vdim() - 1, &rows)?;
        ids.push(
            small
                .locate_generator(&s)
                .ok_or_else(|| Error::Verification("restricted member is not a generator of the section".into()))?,
        );
    }
    let set = GeneratorSet::from_unsorted(&small, ids)?;
    let certificate = regularity_profile(&set, k - 1)?;
    let expected_m = m * chain_factor(p)?;
    certificate.expect_m(expected_m)?;
    Ok(ChainResult {
        space: small,
        set,
        certificate,
        expected_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::build_polar;

    #[test]
    fn lift_of_everything_and_nothing() {
        let p = build_polar(Family::QMinus, 2, 2).unwrap();
        let all = chain_lift(&GeneratorSet::all(&p), 1).unwrap();
        // each generator of Q(6,2) meets the section in exactly one line
        assert_eq!(all.set.len(), 135);
        assert_eq!((all.expected_m, all.certificate.m), (15, Some(15)));
        let none = chain_lift(&GeneratorSet::empty(&p), 1).unwrap();
        assert!(none.set.is_empty());
        assert_eq!(none.certificate.m, Some(0));
    }

    #[test]
    fn hermitian_lift() {
        let p = build_polar(Family::HEven, 2, 4).unwrap();
        let res = chain_lift(&GeneratorSet::all(&p), 1).unwrap();
        assert_eq!(res.space.label(), "H(5,4)");
        assert_eq!((res.set.len(), res.expected_m), (891, 27));
    }

    #[test]
    fn restrict_full_q6_3() {
        let p = build_polar(Family::Q, 3, 3).unwrap();
        let res = chain_restrict(&GeneratorSet::all(&p), 2).unwrap();
        assert_eq!(res.space.label(), "Q+(5,3)");
        assert_eq!((res.set.len(), res.certificate.m), (80, Some(8)));
        let none = chain_restrict(&GeneratorSet::empty(&p), 2).unwrap();
        assert!(none.set.is_empty());
    }

    #[test]
    fn restrict_rejects_points() {
        let p = build_polar(Family::QMinus, 2, 2).unwrap();
        assert!(chain_restrict(&GeneratorSet::all(&p), 1).is_err());
        let w = build_polar(Family::W, 2, 2).unwrap();
        assert!(chain_lift(&GeneratorSet::all(&w), 1).is_err());
    }

    #[test]
    fn cone_sections() {
        for (fam, d, q, want) in [(Family::QMinus, 2, 3, 40), (Family::Q, 2, 3, 8), (Family::HEven, 2, 4, 27)] {
            let p = build_polar(fam, d, q).unwrap();
            assert_eq!(cone_section_generators(&p).unwrap().len(), want, "{}", p.label());
        }
    }
}
