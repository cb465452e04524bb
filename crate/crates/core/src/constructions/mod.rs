//! Explicit regular systems: elliptic hemisystems from hyperbolic
//! partitions, Klein 1-systems from an Ebert partition, a 1-system of
//! Q(6,3) built from seven reguli, covers of k-systems and spread search.

mod ebert;
mod elliptic;
mod q63;

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

pub use ebert::{ebert_partition, klein_one_systems, EbertCensus, EbertPartition, KleinSystems};
pub use elliptic::{
    elliptic_line_family, hemisystem_from_partition, partition_from_lines, Block, LineFamily, PairCensus,
    PartitionIntoHyperbolics,
};
pub use q63::{q63_construction, Q63Construction};

use crate::error::{invalid, Error, Result};
use crate::polar::{generator_count, q_half_pow, to_u64, PolarSpace};
use crate::projective::Subspace;
use crate::regsys::{regularity_profile, GeneratorSet, RegularityCertificate};

/// A set of totally isotropic k-spaces (projective dimension `k`).
#[derive(Debug, Clone)]
pub struct OneSystem {
    space: Arc<PolarSpace>,
    k: usize,
    /// Ids at level `k + 1`, in construction order.
    members: Vec<u32>,
}

/// Why a set of k-spaces fails to be a k-system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemWitness {
    /// A member `i`, a generator through it, and another member `j` it meets.
    pub member: u32,
    pub generator: u32,
    pub other: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemCheck {
    pub size_ok: bool,
    pub witness: Option<SystemWitness>,
}

impl SystemCheck {
    pub fn ok(&self) -> bool {
        self.size_ok && self.witness.is_none()
    }
}

impl OneSystem {
    /// Locates `members` among the totally isotropic `(k+1)`-dimensional subspaces.
    pub fn new(space: &Arc<PolarSpace>, members: &[Subspace]) -> Result<Self> {
        let k = members.first().map(|m| m.dim()).ok_or_else(|| invalid("a k-system has members"))?;
        if k < 2 || k + 1 > space.rank() {
            return Err(invalid(format!("members must be k-spaces with 1 <= k <= d - 2, got dimension {k}")));
        }
        let ids = members
            .iter()
            .map(|m| {
                if m.dim() != k {
                    return Err(invalid("members differ in dimension"));
                }
                space
                    .level(k)
                    .locate(m)
                    .ok_or_else(|| invalid("member is not totally isotropic"))
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(OneSystem {
            space: space.clone(),
            k: k - 1,
            members: ids,
        })
    }
    pub fn space(&self) -> &Arc<PolarSpace> {
        &self.space
    }
    /// Projective dimension of the members.
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn member_ids(&self) -> &[u32] {
        &self.members
    }
    pub fn members(&self) -> Vec<Subspace> {
        let level = self.space.level(self.k + 1);
        self.members.iter().map(|&i| level.spaces()[i as usize].clone()).collect()
    }
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
    fn member_points(&self, i: usize) -> &[u32] {
        self.space.level(self.k + 1).points(self.members[i] as usize)
    }
    /// `q^(d+e-1) + 1`.
    pub fn expected_size(&self) -> Result<u64> {
        let p = &self.space;
        Ok(to_u64(&q_half_pow(p.q(), 2 * (p.rank() as u32 - 1) + p.e2())?) + 1)
    }
}

/// Every generator through a member avoids all other members.
pub fn verify_one_system(s: &OneSystem) -> Result<SystemCheck> {
    let p = &s.space;
    let size_ok = s.len() as u64 == s.expected_size()?;
    let through = p.generators_through(s.k + 1);
    let mut owner = vec![u32::MAX; p.point_count()];
    let mut witness = None;
    'outer: for i in 0..s.len() {
        for &x in s.member_points(i) {
            if owner[x as usize] != u32::MAX {
                witness = Some(SystemWitness {
                    member: s.members[owner[x as usize] as usize],
                    generator: through[s.members[i] as usize][0],
                    other: s.members[i],
                });
                break 'outer;
            }
            owner[x as usize] = i as u32;
        }
    }
    if witness.is_none() {
        'scan: for (i, &m) in s.members.iter().enumerate() {
            for &g in &through[m as usize] {
                if let Some(&x) = p.generator_points(g).iter().find(|&&x| {
                    let o = owner[x as usize];
                    o != u32::MAX && o != i as u32
                }) {
                    witness = Some(SystemWitness {
                        member: m,
                        generator: g,
                        other: s.members[owner[x as usize] as usize],
                    });
                    break 'scan;
                }
            }
        }
    }
    Ok(SystemCheck { size_ok, witness })
}

/// All generators containing a member, certified
/// `|M_{P_{d-k-1,e}}|`-regular w.r.t. points.
pub fn cover_from_system(s: &OneSystem) -> Result<(GeneratorSet, RegularityCertificate)> {
    cover_from_systems(std::slice::from_ref(s))
}

/// The union of the covers of several systems with pairwise disjoint covers;
/// certified regular with the summed multiplicity.
pub fn cover_from_systems(systems: &[OneSystem]) -> Result<(GeneratorSet, RegularityCertificate)> {
    let first = systems.first().ok_or_else(|| invalid("no systems given"))?;
    let p = first.space.clone();
    let mut ids = Vec::new();
    let mut m = 0;
    for s in systems {
        if !Arc::ptr_eq(&s.space, &p) {
            return Err(invalid("systems live in different spaces"));
        }
        let through = p.generators_through(s.k + 1);
        ids.extend(s.members.iter().flat_map(|&x| through[x as usize].iter().copied()));
        let (d, e2) = (p.rank() as u32, p.e2());
        m += to_u64(&generator_count(d - s.k as u32 - 1, e2, p.q())?);
    }
    let total = ids.len();
    let set = GeneratorSet::from_unsorted(&p, ids)?;
    if set.len() != total {
        return Err(Error::Verification("covers of the systems overlap".into()));
    }
    let cert = regularity_profile(&set, 1)?;
    cert.expect_m(m)?;
    Ok((set, cert))
}

/// For each point on no member, the number of members in its perp equals
/// `q^(d-k-2+e) + 1` (one (k+1)-space joins the point to each such member).
pub fn check_join_law(s: &OneSystem) -> Result<bool> {
    let p = &s.space;
    let want = to_u64(&q_half_pow(p.q(), 2 * (p.rank() - s.k - 2) as u32 + p.e2())?) + 1;
    let mut on_member = FixedBitSet::with_capacity(p.point_count());
    for i in 0..s.len() {
        for &x in s.member_points(i) {
            on_member.insert(x as usize);
        }
    }
    Ok((0..p.point_count() as u32).filter(|&x| !on_member.contains(x as usize)).all(|x| {
        let perp = p.perp_points(x);
        let joins = (0..s.len()).filter(|&i| s.member_points(i).iter().all(|&y| perp.contains(y as usize))).count();
        joins as u64 == want
    }))
}

/// Outcome of a bounded exact-cover search.
#[derive(Debug, Clone)]
pub struct SpreadSearch {
    pub spread: Option<GeneratorSet>,
    /// Search nodes visited.
    pub nodes: u64,
    /// True when the search space was exhausted (no spread exists).
    pub exhausted: bool,
}

/// Searches for generators partitioning the points, branching on the first
/// uncovered point and trying generators in id order.
pub fn spread_search(p: &Arc<PolarSpace>, budget: u64) -> Result<SpreadSearch> {
    const CELL_CAP: u128 = 10_000;
    crate::error::cap_check(
        "exact-cover cells",
        p.point_count() as u128 * p.generator_count() as u128,
        CELL_CAP,
    )?;
    let through = p.generators_through(1);
    let mut covered = FixedBitSet::with_capacity(p.point_count());
    let mut chosen = Vec::new();
    let mut nodes = 0;
    let found = search(p, through, &mut covered, &mut chosen, &mut nodes, budget);
    Ok(SpreadSearch {
        exhausted: !found && nodes < budget,
        spread: if found {
            Some(GeneratorSet::from_unsorted(p, chosen)?)
        } else {
            None
        },
        nodes,
    })
}

fn search(
    p: &PolarSpace,
    through: &[Vec<u32>],
    covered: &mut FixedBitSet,
    chosen: &mut Vec<u32>,
    nodes: &mut u64,
    budget: u64,
) -> bool {
    let Some(x) = (0..p.point_count()).find(|&x| !covered.contains(x)) else {
        return true;
    };
    for &g in &through[x] {
        if *nodes >= budget {
            return false;
        }
        *nodes += 1;
        let bits = p.generator_bits(g);
        if !bits.is_disjoint(covered) {
            continue;
        }
        covered.union_with(bits);
        chosen.push(g);
        if search(p, through, covered, chosen, nodes, budget) {
            return true;
        }
        chosen.pop();
        covered.difference_with(bits);
    }
    false
}
