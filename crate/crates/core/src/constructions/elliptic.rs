//! Hemisystems of Q-(5,q), q odd, from a family of external lines whose
//! polar solids cut the quadric in hyperbolic quadrics partitioning its lines.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::polar::{build_polar, Family, PolarSpace};
use crate::projective::{enumerate_subspaces, subspaces_of, Subspace};
use crate::regsys::{regularity_profile, GeneratorSet, RegularityCertificate};

/// External lines of PG(5,q) built around a hyperbolic solid section.
#[derive(Debug, Clone)]
pub struct LineFamily {
    space: Arc<PolarSpace>,
    /// The first solid (in RREF order) meeting the quadric in a Q+(3,q).
    pub pi: Subspace,
    /// `pi^perp`.
    pub ell: Subspace,
    pub ell1: Subspace,
    /// `ell1^perp ∩ pi`.
    pub ell2: Subspace,
    /// External lines of `pi`.
    pub x: Vec<Subspace>,
    /// External lines of `ell1^perp` meeting `ell`.
    pub x1: Vec<Subspace>,
    /// External lines of `ell2^perp` meeting `ell` and `ell1` in one point each.
    pub x2: Vec<Subspace>,
}

/// Span sizes over all pairs of lines in a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCensus {
    pub pairs: usize,
    /// `(meets, quadric points on the span) -> pairs`.
    pub spans: BTreeMap<String, usize>,
    /// Index pairs with a one-point span section (meeting lines) or a
    /// `(q+1)`-point span section (skew lines).
    pub violations: Vec<(usize, usize)>,
}

impl LineFamily {
    pub fn space(&self) -> &Arc<PolarSpace> {
        &self.space
    }
    /// `x`, then `x1`, then `x2`.
    pub fn lines(&self) -> Vec<Subspace> {
        self.x.iter().chain(&self.x1).chain(&self.x2).cloned().collect()
    }
    pub fn len(&self) -> usize {
        self.x.len() + self.x1.len() + self.x2.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pair_census(&self) -> PairCensus {
        let p = &self.space;
        let f = p.field();
        let lines = self.lines();
        let q = p.q() as usize;
        let rows: Vec<Vec<(usize, bool, usize)>> = (0..lines.len())
            .into_par_iter()
            .map(|i| {
                (i + 1..lines.len())
                    .map(|j| {
                        let span = lines[i].span(f, &lines[j]).expect("same ambient");
                        (j, span.dim() == 3, p.points_on(&span).len())
                    })
                    .collect()
            })
            .collect();
        let mut spans = BTreeMap::new();
        let mut violations = Vec::new();
        let mut pairs = 0;
        for (i, row) in rows.into_iter().enumerate() {
            for (j, meets, count) in row {
                pairs += 1;
                let key = format!("{}:{count}", if meets { "meet" } else { "skew" });
                *spans.entry(key).or_insert(0) += 1;
                if (meets && count == 1) || (!meets && count == q + 1) {
                    violations.push((i, j));
                }
            }
        }
        PairCensus {
            pairs,
            spans,
            violations,
        }
    }
}

fn external(p: &PolarSpace, s: &Subspace) -> bool {
    p.points_on(s).is_empty()
}

fn meets_in_point(f: &crate::fields::Field, a: &Subspace, b: &Subspace) -> bool {
    a.meet(f, b).map(|m| m.dim() == 1).unwrap_or(false)
}

/// The family `X ∪ X1 ∪ X2` of `(q^2-q+1)(q^2+1)/2` external lines of
/// Q-(5,q), verified to satisfy the pairwise span condition.
pub fn elliptic_line_family(q: u64) -> Result<LineFamily> {
    if q.is_multiple_of(2) {
        return Err(Error::WrongFamily("the external line family needs q odd".into()));
    }
    crate::error::cap_check("field order for the external line family", q as u128, 5)?;
    let space = build_polar(Family::QMinus, 2, q)?;
    let p = &space;
    let f = p.field();
    let hyperbolic = ((q + 1) * (q + 1)) as usize;
    let pi = enumerate_subspaces(f, 6, 4)?
        .into_iter()
        .find(|s| p.points_on(s).len() == hyperbolic && p.perp(s).is_ok_and(|l| external(p, &l)))
        .ok_or_else(|| Error::Verification("no hyperbolic solid section".into()))?;
    let ell = p.perp(&pi)?;
    let x: Vec<Subspace> = subspaces_of(f, &pi, 2).into_iter().filter(|l| external(p, l)).collect();
    let ell1 = x.first().cloned().ok_or_else(|| Error::Verification("solid has no external line".into()))?;
    let pi1 = p.perp(&ell1)?;
    let ell2 = pi1.meet(f, &pi)?;
    let pi2 = p.perp(&ell2)?;
    let x1: Vec<Subspace> = subspaces_of(f, &pi1, 2)
        .into_iter()
        .filter(|l| external(p, l) && l.meet(f, &ell).is_ok_and(|m| m.dim() >= 1))
        .collect();
    let x2: Vec<Subspace> = subspaces_of(f, &pi2, 2)
        .into_iter()
        .filter(|l| external(p, l) && meets_in_point(f, l, &ell) && meets_in_point(f, l, &ell1))
        .collect();
    let fam = LineFamily {
        space: space.clone(),
        pi,
        ell,
        ell1,
        ell2,
        x,
        x1,
        x2,
    };
    let want = ((q * q - q + 1) * (q * q + 1) / 2) as usize;
    if fam.len() != want {
        return Err(Error::Verification(format!("family has {} lines, expected {want}", fam.len())));
    }
    let census = fam.pair_census();
    if let Some(&(i, j)) = census.violations.first() {
        return Err(Error::Verification(format!("lines {i} and {j} violate the span condition")));
    }
    Ok(fam)
}

/// An external line and the two reguli of lines of the quadric in its polar solid.
#[derive(Debug, Clone)]
pub struct Block {
    pub line: Subspace,
    /// `classes[0]` contains the smallest generator id of the block.
    pub classes: [Vec<u32>; 2],
}

#[derive(Debug, Clone)]
pub struct PartitionIntoHyperbolics {
    space: Arc<PolarSpace>,
    pub blocks: Vec<Block>,
}

impl PartitionIntoHyperbolics {
    pub fn space(&self) -> &Arc<PolarSpace> {
        &self.space
    }
}

/// Splits the lines (level-2 ids) of a Q+(3,q) section into its two reguli.
pub(crate) fn split_reguli(p: &PolarSpace, ids: &[u32]) -> Result<[Vec<u32>; 2]> {
    let first = *ids.first().ok_or_else(|| invalid("empty hyperbolic section"))?;
    let level = p.level(2);
    let on_first = level.points(first as usize);
    let (a, b): (Vec<u32>, Vec<u32>) = ids
        .iter()
        .partition(|&&g| g == first || level.points(g as usize).iter().all(|x| on_first.binary_search(x).is_err()));
    if a.len() != b.len() {
        return Err(Error::Verification(format!("reguli of sizes {} and {}", a.len(), b.len())));
    }
    Ok([a, b])
}

/// Lines of the quadric inside the solid `s`, sorted by id.
pub(crate) fn lines_in(p: &PolarSpace, s: &Subspace) -> Vec<u32> {
    let on: Vec<u32> = p.points_on(s);
    let level = p.level(2);
    (0..level.len() as u32)
        .filter(|&i| level.points(i as usize).iter().all(|x| on.binary_search(x).is_ok()))
        .collect()
}

/// For each line of `fam`, the lines of Q-(5,q) in its polar solid; verified
/// to partition all lines of the quadric.
pub fn partition_from_lines(fam: &LineFamily) -> Result<PartitionIntoHyperbolics> {
    let p = &fam.space;
    let blocks = fam
        .lines()
        .into_par_iter()
        .map(|line| {
            let solid = p.perp(&line)?;
            let ids = lines_in(p, &solid);
            let classes = split_reguli(p, &ids)?;
            Ok(Block { line, classes })
        })
        .collect::<Result<Vec<Block>>>()?;
    let mut seen = vec![false; p.generator_count()];
    for (b, block) in blocks.iter().enumerate() {
        for &g in block.classes.iter().flatten() {
            if std::mem::replace(&mut seen[g as usize], true) {
                return Err(Error::Verification(format!("line {g} lies in two blocks (second is {b})")));
            }
        }
    }
    if let Some(g) = seen.iter().position(|&s| !s) {
        return Err(Error::Verification(format!("line {g} lies in no block")));
    }
    Ok(PartitionIntoHyperbolics {
        space: p.clone(),
        blocks,
    })
}

/// One regulus per block; `choice[b]` picks `classes[1]` of block `b`.
/// Certified as a hemisystem with respect to points.
pub fn hemisystem_from_partition(
    part: &PartitionIntoHyperbolics,
    choice: &[bool],
) -> Result<(GeneratorSet, RegularityCertificate)> {
    if choice.len() != part.blocks.len() {
        return Err(invalid(format!("{} choice bits for {} blocks", choice.len(), part.blocks.len())));
    }
    let ids = part
        .blocks
        .iter()
        .zip(choice)
        .flat_map(|(b, &c)| b.classes[usize::from(c)].iter().copied())
        .collect();
    let set = GeneratorSet::from_unsorted(&part.space, ids)?;
    let cert = regularity_profile(&set, 1)?;
    let p = &part.space;
    let row = p.generators_through(1)[0].len() as u64;
    cert.expect_m(row / 2)?;
    Ok((set, cert))
}
