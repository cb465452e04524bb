//! The six families of finite classical polar spaces P_{d,e}.
//!
//! A [`PolarSpace`] owns a nondegenerate [`Form`], the frozen list of its
//! points and, for every `1 <= k <= d`, the frozen list of its totally
//! isotropic (k-1)-spaces in lexicographic RREF order. Level `d` holds the
//! generators. Ids are positions in these lists.

mod counting;
mod form;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use counting::{
    count_subspaces, gaussian_binomial, generator_count, generators_through, integer_sqrt,
    q_half_pow, to_u64,
};
pub use form::{Form, FormKind};

use crate::error::{cap_check, invalid, Error, Result};
use crate::fields::{field_of_order, Elem, Field};
use crate::projective::{code, rref, rref_matrices, Subspace, AMBIENT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Q+(2d-1, q), e = 0
    QPlus,
    /// H(2d-1, q), q square, e = 1/2
    HOdd,
    /// W(2d-1, q), e = 1
    W,
    /// Q(2d, q), e = 1
    Q,
    /// H(2d, q), q square, e = 3/2
    HEven,
    /// Q-(2d+1, q), e = 2
    QMinus,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::QPlus,
        Family::HOdd,
        Family::W,
        Family::Q,
        Family::HEven,
        Family::QMinus,
    ];

    /// Twice the parameter e.
    pub fn e2(self) -> u32 {
        match self {
            Family::QPlus => 0,
            Family::HOdd => 1,
            Family::W | Family::Q => 2,
            Family::HEven => 3,
            Family::QMinus => 4,
        }
    }

    /// `e` as a reduced fraction.
    pub fn e(self) -> (u32, u32) {
        let e2 = self.e2();
        if e2.is_multiple_of(2) {
            (e2 / 2, 1)
        } else {
            (e2, 2)
        }
    }

    /// Vector dimension of the ambient space at rank `d`.
    pub fn vdim(self, d: usize) -> usize {
        match self {
            Family::QPlus | Family::HOdd | Family::W => 2 * d,
            Family::Q | Family::HEven => 2 * d + 1,
            Family::QMinus => 2 * d + 2,
        }
    }

    pub fn is_hermitian(self) -> bool {
        matches!(self, Family::HOdd | Family::HEven)
    }
    pub fn is_quadric(self) -> bool {
        matches!(self, Family::QPlus | Family::Q | Family::QMinus)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::QPlus => "Qplus",
            Family::HOdd => "Hodd",
            Family::W => "W",
            Family::Q => "Q",
            Family::HEven => "Heven",
            Family::QMinus => "Qminus",
        }
    }

    /// Conventional label, e.g. `Q-(5,3)`.
    pub fn label(self, d: usize, q: u64) -> String {
        let sym = match self {
            Family::QPlus => "Q+",
            Family::HOdd | Family::HEven => "H",
            Family::W => "W",
            Family::Q => "Q",
            Family::QMinus => "Q-",
        };
        format!("{sym}({},{q})", self.vdim(d) - 1)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Qplus" | "Q+" | "qplus" => Family::QPlus,
            "Hodd" | "hodd" | "H-odd" => Family::HOdd,
            "W" | "w" => Family::W,
            "Q" | "q" => Family::Q,
            "Heven" | "heven" | "H-even" => Family::HEven,
            "Qminus" | "Q-" | "qminus" => Family::QMinus,
            other => return Err(invalid(format!("unknown family {other}"))),
        })
    }
}

/// Enumeration limits.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    /// Largest number of subspaces at any single level.
    pub max_level: u128,
    pub max_generators: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_level: 250_000,
            max_generators: 30_000,
        }
    }
}

/// All totally isotropic subspaces of one vector dimension.
#[derive(Debug)]
pub struct Level {
    spaces: Vec<Subspace>,
    points: Vec<Vec<u32>>,
    index: HashMap<Vec<Elem>, u32>,
}

impl Level {
    pub fn len(&self) -> usize {
        self.spaces.len()
    }
    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }
    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }
    /// Sorted point ids of subspace `i`.
    pub fn points(&self, i: usize) -> &[u32] {
        &self.points[i]
    }
    pub fn locate(&self, s: &Subspace) -> Option<u32> {
        self.index.get(s.key()).copied()
    }
    fn from_sorted(mut entries: Vec<(Subspace, Vec<u32>)>) -> Level {
        entries.sort_by(|a, b| a.0.key().cmp(b.0.key()));
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (s, _))| (s.key().to_vec(), i as u32))
            .collect();
        let (spaces, points) = entries.into_iter().unzip();
        Level {
            spaces,
            points,
            index,
        }
    }
}

/// Serializable summary of a polar space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub family: String,
    pub d: usize,
    pub q: u64,
    pub e_num: u32,
    pub e_den: u32,
    pub ambient_dim: usize,
    pub point_count: u64,
    pub generator_count: u64,
}

/// A polar space with all of its totally isotropic subspaces enumerated.
pub struct PolarSpace {
    family: Family,
    d: usize,
    field: Arc<Field>,
    form: Form,
    points: Vec<Vec<Elem>>,
    lookup: Vec<u32>,
    perp_bits: Vec<FixedBitSet>,
    levels: Vec<Level>,
    gen_bits: Vec<FixedBitSet>,
    contained: Vec<OnceLock<Vec<Vec<u32>>>>,
    through: Vec<OnceLock<Vec<Vec<u32>>>>,
}

impl fmt::Debug for PolarSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

const NONE: u32 = u32::MAX;

/// Builds the space with the fixed coordinate form of its family.
pub fn build_polar(family: Family, d: usize, q: u64) -> Result<Arc<PolarSpace>> {
    let field = field_of_order(q)?;
    let form = Form::canonical(family, d, &field)?;
    PolarSpace::from_form(family, d, field, form, Caps::default()).map(Arc::new)
}

/// Like [`build_polar`], memoized for the lifetime of the process.
pub fn shared_polar(family: Family, d: usize, q: u64) -> Result<Arc<PolarSpace>> {
    type Cache = Mutex<HashMap<(Family, usize, u64), Arc<PolarSpace>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&(family, d, q)) {
        return Ok(p.clone());
    }
    let p = build_polar(family, d, q)?;
    cache.lock().unwrap().insert((family, d, q), p.clone());
    Ok(p)
}

/// Every `(family, d, q)` with `q` in {2, 3, 4} (Hermitian families need a
/// square order, so only q = 4) whose generator count is at most `max_generators`.
pub fn buildable_spaces(max_generators: u64) -> Vec<(Family, usize, u64)> {
    let mut out = Vec::new();
    for family in Family::ALL {
        let qs: &[u64] = if family.is_hermitian() { &[4] } else { &[2, 3, 4] };
        for &q in qs {
            for d in 1.. {
                let n = generator_count(d as u32, family.e2(), q).expect("valid parameters");
                if n > max_generators.into() {
                    break;
                }
                out.push((family, d, q));
            }
        }
    }
    out
}

impl PolarSpace {
    /// Enumerates the polar space of `form`, which must be of the given family and rank.
    pub fn from_form(family: Family, d: usize, field: Arc<Field>, form: Form, caps: Caps) -> Result<PolarSpace> {
        let n = family.vdim(d);
        if d == 0 || form.n() != n {
            return Err(invalid(format!("{family} of rank {d} needs a form in {n} variables")));
        }
        if family.is_hermitian() != matches!(form.kind(), FormKind::Hermitian { .. })
            || (family == Family::W) != matches!(form.kind(), FormKind::Alternating)
        {
            return Err(invalid(format!("form kind does not fit family {family}")));
        }
        if !form.is_nondegenerate(&field) {
            return Err(invalid("form is degenerate"));
        }
        let q = field.order() as u64;
        let e2 = family.e2();
        cap_check("ambient vectors", (q as u128).pow(n as u32), AMBIENT_CAP)?;
        let expected: Vec<u128> = (1..=d as u32)
            .map(|k| count_subspaces(d as u32, e2, q, k).map(|c| to_u64(&c) as u128))
            .collect::<Result<_>>()?;
        for &c in &expected {
            cap_check("subspaces per level", c, caps.max_level)?;
        }
        cap_check("generators", expected[d - 1], caps.max_generators)?;

        let order = field.order();
        let mut lookup = vec![NONE; order.pow(n as u32)];
        let mut points = Vec::new();
        for p in crate::projective::enumerate_points(&field, n)? {
            if form.is_singular(&field, &p.0) {
                lookup[code(order, &p.0)] = points.len() as u32;
                points.push(p.0);
            }
        }
        let np = points.len();
        let functionals: Vec<Vec<Elem>> = points.iter().map(|p| form.functional(&field, p)).collect();
        let perp_bits: Vec<FixedBitSet> = functionals
            .par_iter()
            .map(|u| {
                let mut b = FixedBitSet::with_capacity(np);
                for (j, y) in points.iter().enumerate() {
                    if crate::projective::dot(&field, u, y) == 0 {
                        b.insert(j);
                    }
                }
                b
            })
            .collect();

        let mut space = PolarSpace {
            family,
            d,
            field,
            form,
            points,
            lookup,
            perp_bits,
            levels: Vec::new(),
            gen_bits: Vec::new(),
            contained: (0..d).map(|_| OnceLock::new()).collect(),
            through: (0..d).map(|_| OnceLock::new()).collect(),
        };
        let first = Level::from_sorted(
            space
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| (Subspace::from_rref_unchecked(p.clone(), n), vec![i as u32]))
                .collect(),
        );
        space.levels.push(first);
        for _ in 1..d {
            let next = space.extend_level(space.levels.last().unwrap());
            space.levels.push(next);
        }
        for (k, &want) in expected.iter().enumerate() {
            let got = space.levels[k].len() as u128;
            if got != want {
                return Err(Error::Verification(format!(
                    "{}: enumerated {got} subspaces of dimension {}, counting formula gives {want}",
                    space.label(),
                    k + 1
                )));
            }
        }
        space.gen_bits = space.levels[d - 1]
            .points
            .iter()
            .map(|pts| space.bits_of(pts))
            .collect();
        Ok(space)
    }

    /// All (j+1)-dimensional extensions of the j-dimensional level `prev`.
    fn extend_level(&self, prev: &Level) -> Level {
        let f = &self.field;
        let np = self.points.len();
        let mut index: HashMap<Vec<Elem>, usize> = HashMap::new();
        let mut entries: Vec<(Subspace, Vec<u32>)> = Vec::new();
        for (s, pts) in prev.spaces.iter().zip(&prev.points) {
            let mut cand = FixedBitSet::with_capacity(np);
            cand.insert_range(..);
            for row in s.rows() {
                cand.intersect_with(&self.perp_bits[self.point_id(row).expect("basis rows are points") as usize]);
            }
            for &p in pts {
                cand.set(p as usize, false);
            }
            let mut done = FixedBitSet::with_capacity(np);
            for p in cand.ones() {
                if done.contains(p) {
                    continue;
                }
                let t = s.extend(f, &self.points[p]);
                let slot = match index.get(t.key()) {
                    Some(&i) => i,
                    None => {
                        let mut tp: Vec<u32> = t
                            .points(f)
                            .iter()
                            .map(|v| self.point_id(v).expect("extension stays isotropic"))
                            .collect();
                        tp.sort_unstable();
                        index.insert(t.key().to_vec(), entries.len());
                        entries.push((t, tp));
                        entries.len() - 1
                    }
                };
                for &x in &entries[slot].1 {
                    done.insert(x as usize);
                }
            }
        }
        Level::from_sorted(entries)
    }

    fn bits_of(&self, pts: &[u32]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.points.len());
        for &p in pts {
            b.insert(p as usize);
        }
        b
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn rank(&self) -> usize {
        self.d
    }
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    pub fn form(&self) -> &Form {
        &self.form
    }
    /// Order of the field the form lives over.
    pub fn q(&self) -> u64 {
        self.field.order() as u64
    }
    pub fn e2(&self) -> u32 {
        self.family.e2()
    }
    /// Vector dimension of the ambient space.
    pub fn vdim(&self) -> usize {
        self.form.n()
    }
    pub fn label(&self) -> String {
        self.family.label(self.d, self.q())
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        let (e_num, e_den) = self.family.e();
        SpaceDescriptor {
            family: self.family.name().to_string(),
            d: self.d,
            q: self.q(),
            e_num,
            e_den,
            ambient_dim: self.vdim() - 1,
            point_count: self.points.len() as u64,
            generator_count: self.generator_count() as u64,
        }
    }

    pub fn points(&self) -> &[Vec<Elem>] {
        &self.points
    }
    pub fn point_count(&self) -> usize {
        self.points.len()
    }
    /// Id of a normalized vector, if it is a point of the polar space.
    pub fn point_id(&self, v: &[Elem]) -> Option<u32> {
        let c = code(self.field.order(), v);
        self.lookup.get(c).copied().filter(|&i| i != NONE)
    }
    /// Polar-space points orthogonal to point `p`.
    pub fn perp_points(&self, p: u32) -> &FixedBitSet {
        &self.perp_bits[p as usize]
    }

    /// Level of (k-1)-spaces, `1 <= k <= d`.
    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k - 1]
    }
    pub fn generators(&self) -> &[Subspace] {
        &self.levels[self.d - 1].spaces
    }
    pub fn generator_count(&self) -> usize {
        self.levels[self.d - 1].len()
    }
    pub fn generator_points(&self, g: u32) -> &[u32] {
        &self.levels[self.d - 1].points[g as usize]
    }
    pub fn generator_bits(&self, g: u32) -> &FixedBitSet {
        &self.gen_bits[g as usize]
    }
    pub fn locate_generator(&self, s: &Subspace) -> Option<u32> {
        self.levels[self.d - 1].locate(s)
    }
    /// Finds a totally isotropic subspace among the enumerated levels.
    pub fn locate(&self, s: &Subspace) -> Option<(usize, u32)> {
        let k = s.dim();
        if k == 0 || k > self.d {
            return None;
        }
        self.level(k).locate(s).map(|i| (k, i))
    }

    /// Vector dimension of `x`, given only its number of points.
    pub fn dim_from_point_count(&self, count: usize) -> usize {
        let q = self.q() as usize;
        let (mut r, mut size) = (0, 0);
        while size < count {
            size = size * q + 1;
            r += 1;
        }
        debug_assert_eq!(size, count);
        r
    }

    /// Vector dimension of the meet of two generators.
    pub fn generator_meet_dim(&self, a: u32, b: u32) -> usize {
        let c = self.gen_bits[a as usize].intersection_count(&self.gen_bits[b as usize]);
        self.dim_from_point_count(c)
    }

    /// Points of the polar space on an arbitrary subspace, sorted.
    pub fn points_on(&self, s: &Subspace) -> Vec<u32> {
        let mut v: Vec<u32> = s
            .points(&self.field)
            .iter()
            .filter_map(|p| self.point_id(p))
            .collect();
        v.sort_unstable();
        v
    }

    pub fn perp(&self, s: &Subspace) -> Result<Subspace> {
        if s.ambient() != self.vdim() {
            return Err(Error::AmbientMismatch(self.vdim(), s.ambient()));
        }
        Ok(self.form.perp(&self.field, s))
    }

    pub fn is_totally_isotropic(&self, s: &Subspace) -> bool {
        let f = &self.field;
        let rows: Vec<&[Elem]> = s.rows().collect();
        rows.iter().all(|r| self.form.is_singular(f, r))
            && rows
                .iter()
                .enumerate()
                .all(|(i, a)| rows[i + 1..].iter().all(|b| self.form.pair(f, a, b) == 0))
    }

    /// For every generator, the sorted ids of the (k-1)-spaces it contains.
    pub fn contained(&self, k: usize) -> &[Vec<u32>] {
        self.contained[k - 1].get_or_init(|| {
            let gens = &self.levels[self.d - 1];
            if k == 1 {
                return gens.points.clone();
            }
            if k == self.d {
                return (0..gens.len() as u32).map(|g| vec![g]).collect();
            }
            let f = &self.field;
            let n = self.vdim();
            let coeffs = rref_matrices(f, self.d, k);
            let level = self.level(k);
            gens.spaces
                .par_iter()
                .map(|g| {
                    let mut ids: Vec<u32> = coeffs
                        .iter()
                        .map(|c| {
                            let mut rows = vec![0; k * n];
                            for i in 0..k {
                                for (j, gr) in g.rows().enumerate() {
                                    let a = c[i * self.d + j];
                                    if a == 0 {
                                        continue;
                                    }
                                    for t in 0..n {
                                        rows[i * n + t] = f.add(rows[i * n + t], f.mul(a, gr[t]));
                                    }
                                }
                            }
                            rref(f, &mut rows, n);
                            level.index[&rows]
                        })
                        .collect();
                    ids.sort_unstable();
                    ids
                })
                .collect()
        })
    }

    /// For every (k-1)-space, the sorted ids of the generators through it.
    pub fn generators_through(&self, k: usize) -> &[Vec<u32>] {
        self.through[k - 1].get_or_init(|| {
            let mut out = vec![Vec::new(); self.level(k).len()];
            for (g, ids) in self.contained(k).iter().enumerate() {
                for &s in ids {
                    out[s as usize].push(g as u32);
                }
            }
            out
        })
    }

    /// Incidence between (k-1)-spaces (rows) and generators (columns).
    pub fn incidence_matrix(&self, k: usize) -> Result<IncidenceMatrix> {
        if k == 0 || k > self.d {
            return Err(invalid(format!("level {k} outside 1..={}", self.d)));
        }
        Ok(IncidenceMatrix {
            k,
            cols: self.generator_count(),
            rows: self.generators_through(k).to_vec(),
        })
    }

    /// The two classes of generators of a hyperbolic quadric; the first
    /// contains generator 0.
    pub fn latin_greek_split(&self) -> Result<(Vec<u32>, Vec<u32>)> {
        if self.family != Family::QPlus {
            return Err(Error::WrongFamily(format!("{} has no Latin/Greek classes", self.label())));
        }
        let (a, b): (Vec<u32>, Vec<u32>) = (0..self.generator_count() as u32)
            .partition(|&g| (self.d - self.generator_meet_dim(0, g)).is_multiple_of(2));
        Ok((a, b))
    }

    /// Internal or external, for a point off a parabolic quadric with q odd.
    pub fn point_class(&self, x: &[Elem]) -> Result<PointClass> {
        if self.family != Family::Q || self.q().is_multiple_of(2) {
            return Err(Error::WrongFamily("point classes need Q(2d,q) with q odd".into()));
        }
        if x.len() != self.vdim() || x.iter().all(|&c| c == 0) {
            return Err(invalid("not a point of the ambient space"));
        }
        if self.form.is_singular(&self.field, x) {
            return Err(invalid("point lies on the quadric"));
        }
        let u = self.form.functional(&self.field, x);
        let count = self
            .points
            .iter()
            .filter(|y| crate::projective::dot(&self.field, &u, y) == 0)
            .count() as u64;
        let (q, d) = (self.q(), self.d as u32);
        let elliptic = (q.pow(d) + 1) * (q.pow(d - 1) - 1) / (q - 1);
        let hyperbolic = (q.pow(d - 1) + 1) * (q.pow(d) - 1) / (q - 1);
        match count {
            c if c == elliptic => Ok(PointClass::Internal),
            c if c == hyperbolic => Ok(PointClass::External),
            c => Err(Error::Verification(format!("polar section has {c} points"))),
        }
    }

    /// Projection of Q(2d, q), q even, from its nucleus onto a hyperplane.
    pub fn nucleus_project(&self) -> Result<NucleusProjection> {
        if self.family != Family::Q || !self.q().is_multiple_of(2) {
            return Err(Error::WrongFamily("nucleus projection needs Q(2d,q) with q even".into()));
        }
        let f = &self.field;
        let rad = self.form.radical(f);
        if rad.dim() != 1 {
            return Err(Error::Verification("the nucleus is not a single point".into()));
        }
        let nucleus = rad.row(0).to_vec();
        let drop = nucleus.iter().position(|&c| c != 0).expect("nonzero");
        let n = self.vdim();
        // v -> v - (v_drop / N_drop) N, then forget coordinate `drop`
        let mut mat = vec![0; n * (n - 1)];
        let inv = f.inv(nucleus[drop]);
        for i in 0..n {
            let mut img: Vec<Elem> = (0..n).map(|j| if i == j { 1 } else { 0 }).collect();
            if i == drop {
                for j in 0..n {
                    img[j] = f.sub(img[j], f.mul(inv, nucleus[j]));
                }
            }
            let kept: Vec<Elem> = (0..n).filter(|&j| j != drop).map(|j| img[j]).collect();
            mat[i * (n - 1)..(i + 1) * (n - 1)].copy_from_slice(&kept);
        }
        let wgram: Vec<Elem> = {
            let g = self.form.gram();
            (0..n)
                .filter(|&i| i != drop)
                .flat_map(|i| (0..n).filter(|&j| j != drop).map(move |j| g[i * n + j]))
                .collect()
        };
        let wform = Form::alternating(f, n - 1, wgram)?;
        let w = Arc::new(PolarSpace::from_form(Family::W, self.d, f.clone(), wform, Caps::default())?);
        let mut maps = Vec::with_capacity(self.d);
        for k in 1..=self.d {
            let map: Vec<u32> = self
                .level(k)
                .spaces()
                .iter()
                .map(|s| {
                    let img = s.map(f, &mat, n - 1);
                    w.level(k).locate(&img).ok_or_else(|| {
                        Error::Verification(format!("projection of {:?} is not totally isotropic", s.key()))
                    })
                })
                .collect::<Result<_>>()?;
            let mut seen = vec![false; w.level(k).len()];
            for &m in &map {
                if std::mem::replace(&mut seen[m as usize], true) {
                    return Err(Error::Verification(format!("projection is not injective at level {k}")));
                }
            }
            if map.len() != w.level(k).len() {
                return Err(Error::Verification(format!("projection is not onto at level {k}")));
            }
            maps.push(map);
        }
        Ok(NucleusProjection {
            nucleus,
            w,
            maps,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Internal,
    External,
}

/// Row-sparse 0/1 matrix: `rows[s]` lists the generators containing (k-1)-space `s`.
#[derive(Debug, Clone)]
pub struct IncidenceMatrix {
    pub k: usize,
    pub cols: usize,
    pub rows: Vec<Vec<u32>>,
}

impl IncidenceMatrix {
    /// The common row sum, if all row sums agree.
    pub fn constant_row_sum(&self) -> Option<usize> {
        let first = self.rows.first()?.len();
        self.rows.iter().all(|r| r.len() == first).then_some(first)
    }
}

/// The bijection between Q(2d, q), q even, and W(2d-1, q) given by
/// projecting from the nucleus.
pub struct NucleusProjection {
    pub nucleus: Vec<Elem>,
    pub w: Arc<PolarSpace>,
    /// `maps[k-1][i]` is the W-id of the image of (k-1)-space `i`.
    pub maps: Vec<Vec<u32>>,
}

impl NucleusProjection {
    pub fn push_generators(&self, ids: &[u32]) -> Vec<u32> {
        let map = self.maps.last().expect("rank >= 1");
        let mut out: Vec<u32> = ids.iter().map(|&g| map[g as usize]).collect();
        out.sort_unstable();
        out
    }
    pub fn pull_generators(&self, ids: &[u32]) -> Vec<u32> {
        let map = self.maps.last().expect("rank >= 1");
        let mut inv = vec![0; map.len()];
        for (i, &m) in map.iter().enumerate() {
            inv[m as usize] = i as u32;
        }
        let mut out: Vec<u32> = ids.iter().map(|&g| inv[g as usize]).collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_space_sizes() {
        let p = build_polar(Family::QMinus, 2, 3).unwrap();
        assert_eq!((p.point_count(), p.generator_count()), (112, 280));
        let p = build_polar(Family::QPlus, 3, 2).unwrap();
        assert_eq!((p.point_count(), p.generator_count()), (35, 30));
        let p = build_polar(Family::W, 2, 2).unwrap();
        assert_eq!((p.point_count(), p.generator_count()), (15, 15));
        let h = build_polar(Family::HOdd, 2, 4).unwrap();
        assert_eq!((h.point_count(), h.generator_count()), (45, 27));
    }

    #[test]
    fn generators_are_totally_isotropic_and_sorted() {
        for (fam, d, q) in [(Family::Q, 2, 3), (Family::HEven, 2, 4), (Family::W, 3, 2), (Family::QMinus, 2, 4)] {
            let p = build_polar(fam, d, q).unwrap();
            assert!(p.generators().iter().all(|g| g.dim() == d && p.is_totally_isotropic(g)));
            assert!(p.generators().windows(2).all(|w| w[0].key() < w[1].key()));
        }
    }

    #[test]
    fn incidence_row_sums() {
        let p = build_polar(Family::QMinus, 2, 3).unwrap();
        let c1 = p.incidence_matrix(1).unwrap();
        assert_eq!((c1.rows.len(), c1.cols, c1.constant_row_sum()), (112, 280, Some(10)));
        let p = build_polar(Family::Q, 3, 3).unwrap();
        assert_eq!(p.incidence_matrix(2).unwrap().constant_row_sum(), Some(4));
        let p = build_polar(Family::QPlus, 3, 2).unwrap();
        assert_eq!(p.incidence_matrix(3).unwrap().constant_row_sum(), Some(1));
    }

    #[test]
    fn latin_greek_parity() {
        for (d, q, half) in [(2, 2, 3), (3, 2, 15), (4, 2, 135), (3, 3, 40)] {
            let p = build_polar(Family::QPlus, d, q).unwrap();
            let (a, b) = p.latin_greek_split().unwrap();
            assert_eq!((a.len(), b.len()), (half, half));
            let in_a: Vec<bool> = (0..p.generator_count() as u32).map(|g| a.binary_search(&g).is_ok()).collect();
            for x in 0..p.generator_count() as u32 {
                for y in 0..p.generator_count() as u32 {
                    let even = (d - p.generator_meet_dim(x, y)).is_multiple_of(2);
                    assert_eq!(even, in_a[x as usize] == in_a[y as usize]);
                }
            }
        }
        assert!(build_polar(Family::Q, 2, 2).unwrap().latin_greek_split().is_err());
    }

    #[test]
    fn internal_external_points() {
        let q43 = build_polar(Family::Q, 2, 3).unwrap();
        let f = q43.field().clone();
        let off: Vec<_> = crate::projective::enumerate_points(&f, 5)
            .unwrap()
            .into_iter()
            .filter(|p| q43.point_id(&p.0).is_none())
            .collect();
        let internal = off.iter().filter(|p| q43.point_class(&p.0).unwrap() == PointClass::Internal).count();
        // elliptic polar sections: q^2(q^2-1)/2; hyperbolic: q^2(q^2+1)/2
        assert_eq!((off.len(), internal), (81, 36));
        // conic: external points lie on two tangents
        let conic = build_polar(Family::Q, 1, 3).unwrap();
        for p in crate::projective::enumerate_points(&f, 3).unwrap() {
            if conic.point_id(&p.0).is_some() {
                continue;
            }
            let tangents = (0..conic.point_count() as u32)
                .filter(|&t| {
                    let s = Subspace::from_vectors(&f, 3, &[&p.0, &conic.points()[t as usize]]).unwrap();
                    conic.points_on(&s).len() == 1
                })
                .count();
            let want = if conic.point_class(&p.0).unwrap() == PointClass::External { 2 } else { 0 };
            assert_eq!(tangents, want);
        }
    }

    #[test]
    fn nucleus_projection_is_bijective() {
        let q42 = build_polar(Family::Q, 2, 2).unwrap();
        let np = q42.nucleus_project().unwrap();
        assert_eq!(np.w.family(), Family::W);
        assert_eq!(np.maps[1].len(), 15);
        assert_eq!(np.nucleus, vec![1, 0, 0, 0, 0]);
        assert!(build_polar(Family::Q, 2, 3).unwrap().nucleus_project().is_err());
        // the nucleus of a conic in even characteristic lies on every tangent
        let conic = build_polar(Family::Q, 1, 2).unwrap();
        let f = conic.field().clone();
        let nuc = conic.form().radical(&f).row(0).to_vec();
        for t in conic.points() {
            let line = Subspace::from_vectors(&f, 3, &[&nuc, t]).unwrap();
            assert_eq!(conic.points_on(&line).len(), 1);
        }
    }

    #[test]
    fn perp_of_external_line_in_elliptic_quadric() {
        let p = build_polar(Family::QMinus, 2, 3).unwrap();
        let f = p.field().clone();
        let lines = crate::projective::enumerate_subspaces(&f, 6, 2).unwrap();
        let ext = lines.iter().find(|l| p.points_on(l).is_empty()).unwrap();
        let solid = p.perp(ext).unwrap();
        assert_eq!(solid.dim(), 4);
        assert!([16, 10].contains(&p.points_on(&solid).len()));
    }
}
