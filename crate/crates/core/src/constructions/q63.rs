//! A 1-system of Q(6,3) made of seven reguli, from a self-polar simplex of
//! internal points.

use std::sync::Arc;

use super::elliptic::{lines_in, split_reguli};
use super::{cover_from_system, cover_from_systems, verify_one_system, OneSystem, SystemCheck};
use crate::error::{invalid, Error, Result};
use crate::fields::Elem;
use crate::polar::{build_polar, Family, PointClass, PolarSpace};
use crate::projective::{enumerate_points, Subspace};
use crate::regsys::{GeneratorSet, RegularityCertificate};

#[derive(Debug, Clone)]
pub struct Q63Construction {
    pub space: Arc<PolarSpace>,
    /// `P_1..P_7`: pairwise orthogonal internal points.
    pub simplex: Vec<Vec<Elem>>,
    /// `T_1, T_1', T_2, T_2', T_3, T_3', pi^perp`.
    pub solids: Vec<Subspace>,
    /// Quadric points on the span of each pair of solids (21 pairs).
    pub span_points: Vec<usize>,
    pub system: OneSystem,
    /// The opposite reguli.
    pub opposite: OneSystem,
    pub check: SystemCheck,
    pub opposite_check: SystemCheck,
    pub cover: (GeneratorSet, RegularityCertificate),
    pub double_cover: (GeneratorSet, RegularityCertificate),
}

/// Depth-first search for `want` pairwise orthogonal points among `cands`,
/// taking the smallest admissible candidate at every step.
fn simplex_search(p: &PolarSpace, cands: &[Vec<Elem>], want: usize) -> Option<Vec<usize>> {
    fn go(p: &PolarSpace, cands: &[Vec<Elem>], want: usize, cur: &mut Vec<usize>) -> bool {
        if cur.len() == want {
            return true;
        }
        let start = cur.last().map_or(0, |&i| i + 1);
        for i in start..cands.len() {
            let f = p.field();
            if cur.iter().all(|&j| p.form().pair(f, &cands[i], &cands[j]) == 0) {
                cur.push(i);
                if go(p, cands, want, cur) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    let mut cur = Vec::new();
    go(p, cands, want, &mut cur).then_some(cur)
}

/// Builds the seven hyperbolic solid sections from the simplex and the
/// permutation `phi` of `{1,2,3}`; bit `t` of `regulus_bits` selects, in solid
/// `t`, the regulus not containing the smallest line id.
pub fn q63_construction(phi: [usize; 3], regulus_bits: u8) -> Result<Q63Construction> {
    let mut sorted = phi;
    sorted.sort_unstable();
    if sorted != [1, 2, 3] {
        return Err(invalid(format!("{phi:?} is not a permutation of 1, 2, 3")));
    }
    if regulus_bits >= 1 << 7 {
        return Err(invalid("regulus bits must fit in 7 bits"));
    }
    let space = build_polar(Family::Q, 3, 3)?;
    let p = &space;
    let f = p.field();
    let internal: Vec<Vec<Elem>> = enumerate_points(f, 7)?
        .into_iter()
        .map(|x| x.0)
        .filter(|x| !p.form().is_singular(f, x) && p.point_class(x) == Ok(PointClass::Internal))
        .collect();
    let idx = simplex_search(p, &internal, 7).ok_or_else(|| Error::Verification("no self-polar simplex".into()))?;
    let simplex: Vec<Vec<Elem>> = idx.iter().map(|&i| internal[i].clone()).collect();
    let span = |ids: &[usize]| -> Result<Subspace> {
        let vs: Vec<&[Elem]> = ids.iter().map(|&i| simplex[i - 1].as_slice()).collect();
        Subspace::from_vectors(f, 7, &vs)
    };
    let r = [span(&[1, 2])?, span(&[2, 3])?, span(&[3, 1])?];
    let l = [span(&[4, 5])?, span(&[4, 7])?, span(&[4, 6])?];
    let lp = [span(&[6, 7])?, span(&[5, 6])?, span(&[5, 7])?];
    let mut solids = Vec::with_capacity(7);
    for i in 0..3 {
        solids.push(r[i].span(f, &l[phi[i] - 1])?);
        solids.push(r[i].span(f, &lp[phi[i] - 1])?);
    }
    solids.push(p.perp(&span(&[1, 2, 3])?)?);

    let mut chosen = Vec::new();
    let mut opposite = Vec::new();
    for (t, s) in solids.iter().enumerate() {
        if s.dim() != 4 {
            return Err(Error::Verification(format!("solid {t} has vector dimension {}", s.dim())));
        }
        let classes = split_reguli(p, &lines_in(p, s))?;
        let bit = usize::from(regulus_bits >> t & 1 == 1);
        chosen.extend_from_slice(&classes[bit]);
        opposite.extend_from_slice(&classes[1 - bit]);
    }
    let mut span_points = Vec::new();
    for a in 0..7 {
        for b in a + 1..7 {
            span_points.push(p.points_on(&solids[a].span(f, &solids[b])?).len());
        }
    }
    let as_system = |ids: &[u32]| -> Result<OneSystem> {
        let lines: Vec<Subspace> = ids.iter().map(|&g| p.level(2).spaces()[g as usize].clone()).collect();
        OneSystem::new(&space, &lines)
    };
    let system = as_system(&chosen)?;
    let opp = as_system(&opposite)?;
    let check = verify_one_system(&system)?;
    let opposite_check = verify_one_system(&opp)?;
    if !check.ok() || !opposite_check.ok() {
        return Err(Error::Verification(format!("not a 1-system: {check:?} / {opposite_check:?}")));
    }
    let cover = cover_from_system(&system)?;
    let double_cover = cover_from_systems(&[system.clone(), opp.clone()])?;
    Ok(Q63Construction {
        space,
        simplex,
        solids,
        span_points,
        system,
        opposite: opp,
        check,
        opposite_check,
        cover,
        double_cover,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::check_join_law;

    #[test]
    fn identity_permutation() {
        let c = q63_construction([1, 2, 3], 0).unwrap();
        assert_eq!(c.system.len(), 28);
        assert_eq!(c.span_points, vec![112; 21]);
        assert_eq!((c.cover.0.len(), c.cover.1.m), (112, Some(4)));
        assert_eq!((c.double_cover.0.len(), c.double_cover.1.m), (224, Some(8)));
        assert!(check_join_law(&c.system).unwrap());
    }

    #[test]
    fn other_choices() {
        let c = q63_construction([2, 3, 1], 0b1010101).unwrap();
        assert!(c.check.ok());
        assert!(q63_construction([1, 1, 2], 0).is_err());
        assert!(q63_construction([1, 2, 3], 200).is_err());
    }
}
