//! Table-driven arithmetic in GF(p), GF(p^k) and towers of such fields.
//!
//! Elements are small integer ids. The id of c_0 + c_1 X + ... + c_{k-1} X^{k-1}
//! is `sum c_i * b^i` where `b` is the order of the coefficient field, so ids
//! below `b` are exactly the embedded coefficient field. Id order is the
//! normative element order used for every deterministic tie-break.

use std::fmt;
use std::sync::Arc;

use crate::error::{cap_check, Error, Result};

/// A field element id. Field orders never exceed [`FIELD_ORDER_CAP`].
pub type Elem = u8;

/// Largest supported field order.
pub const FIELD_ORDER_CAP: usize = 256;

/// A finite field with precomputed operation tables.
///
/// Either a prime field, or `base[X]/(modulus)` for a monic irreducible
/// `modulus` over another table field.
pub struct Field {
    p: u32,
    order: usize,
    base: Option<Arc<Field>>,
    modulus: Vec<Elem>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.order == other.order
            && self.modulus == other.modulus
            && self.base == other.base
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})[modulus {:?}]", self.order, self.modulus)
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Field {
    /// The prime field GF(p). Its modulus is recorded as `X`.
    pub fn prime(p: u32) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        cap_check("field order", p as u128, FIELD_ORDER_CAP as u128)?;
        let n = p as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                add[a * n + b] = ((a + b) % n) as Elem;
                mul[a * n + b] = ((a * b) % n) as Elem;
            }
        }
        let neg = (0..n).map(|a| ((n - a) % n) as Elem).collect();
        let inv = (0..n)
            .map(|a| (0..n).find(|&b| a * b % n == 1).unwrap_or(0) as Elem)
            .collect();
        Ok(Arc::new(Field {
            p,
            order: n,
            base: None,
            modulus: vec![0, 1],
            add,
            mul,
            neg,
            inv,
        }))
    }

    /// `base[X]/(modulus)`; `modulus` is monic, low-to-high, and must be irreducible.
    pub fn extension(base: &Arc<Field>, modulus: &[Elem]) -> Result<Arc<Field>> {
        let k = modulus.len().saturating_sub(1);
        if k < 1 || modulus[k] != 1 {
            return Err(Error::Invalid("modulus must be monic of degree >= 1".into()));
        }
        let b = base.order;
        let order = (b as u128).pow(k as u32);
        cap_check("field order", order, FIELD_ORDER_CAP as u128)?;
        if !base.is_irreducible(modulus) {
            return Err(Error::Reducible);
        }
        let order = order as usize;
        let digits = |mut id: usize| -> Vec<Elem> {
            (0..k)
                .map(|_| {
                    let d = (id % b) as Elem;
                    id /= b;
                    d
                })
                .collect()
        };
        let encode = |c: &[Elem]| c.iter().rev().fold(0usize, |acc, &d| acc * b + d as usize);
        let all: Vec<Vec<Elem>> = (0..order).map(digits).collect();
        let mut add = vec![0; order * order];
        let mut mul = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                let s: Vec<Elem> = (0..k).map(|i| base.add(all[x][i], all[y][i])).collect();
                add[x * order + y] = encode(&s) as Elem;
                let prod = base.poly_mul(&all[x], &all[y]);
                let mut r = base.poly_rem(&prod, modulus);
                r.resize(k, 0);
                mul[x * order + y] = encode(&r) as Elem;
            }
        }
        let neg = (0..order)
            .map(|x| encode(&all[x].iter().map(|&c| base.neg(c)).collect::<Vec<_>>()) as Elem)
            .collect();
        let inv = (0..order)
            .map(|x| {
                if x == 0 {
                    0
                } else {
                    (1..order).find(|&y| mul[x * order + y] == 1).expect("field has inverses")
                        as Elem
                }
            })
            .collect();
        Ok(Arc::new(Field {
            p: base.p,
            order,
            base: Some(base.clone()),
            modulus: modulus.to_vec(),
            add,
            mul,
            neg,
            inv,
        }))
    }

    pub fn order(&self) -> usize {
        self.order
    }
    pub fn characteristic(&self) -> u32 {
        self.p
    }
    /// The coefficient field this one was built over, if any.
    pub fn base(&self) -> Option<&Arc<Field>> {
        self.base.as_ref()
    }
    /// Monic modulus over the coefficient field, low-to-high.
    pub fn modulus(&self) -> &[Elem] {
        &self.modulus
    }
    /// `s` such that `order = s^2`, if the order is a square.
    pub fn sqrt_order(&self) -> Option<usize> {
        let s = (self.order as f64).sqrt().round() as usize;
        (s * s == self.order).then_some(s)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.order + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.order + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }
    /// Multiplicative inverse; `inv(0)` is reported as 0, use [`Field::try_inv`] to guard.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a as usize]
    }
    pub fn try_inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.inv(a))
        }
    }
    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
    /// The image of the integer `n` in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(|x| x as Elem)
    }

    /// Little-endian coefficient list over the coefficient field.
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let b = self.base.as_ref().map_or(self.order, |f| f.order) as u32;
        let k = self.modulus.len() - 1;
        let mut id = a as u32;
        (0..k)
            .map(|_| {
                let d = id % b;
                id /= b;
                d
            })
            .collect()
    }
    /// Inverse of [`Field::coeffs`].
    pub fn from_coeffs(&self, c: &[u32]) -> Result<Elem> {
        let b = self.base.as_ref().map_or(self.order, |f| f.order) as u32;
        if c.len() != self.modulus.len() - 1 || c.iter().any(|&d| d >= b) {
            return Err(Error::Invalid(format!("bad coefficient list {c:?}")));
        }
        Ok(c.iter().rev().fold(0u32, |acc, &d| acc * b + d) as Elem)
    }

    fn poly_mul(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        out
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    fn poly_rem(&self, a: &[Elem], m: &[Elem]) -> Vec<Elem> {
        let dm = m.len() - 1;
        let mut r = a.to_vec();
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            if lead != 0 {
                for (i, &c) in m.iter().enumerate() {
                    r[shift + i] = self.sub(r[shift + i], self.mul(lead, c));
                }
            }
            r.pop();
        }
        r
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(&self, f: &[Elem]) -> bool {
        let deg = f.len() - 1;
        for t in 1..=deg / 2 {
            let count = self.order.pow(t as u32);
            for code in 0..count {
                let mut g: Vec<Elem> = Vec::with_capacity(t + 1);
                let mut c = code;
                for _ in 0..t {
                    g.push((c % self.order) as Elem);
                    c /= self.order;
                }
                g.push(1);
                if self.poly_rem(f, &g).iter().all(|&x| x == 0) {
                    return false;
                }
            }
        }
        true
    }

    /// Smallest monic irreducible polynomial of degree `k` over this field,
    /// enumerating lower coefficients in element-id order.
    pub fn smallest_irreducible(&self, k: usize) -> Vec<Elem> {
        let count = self.order.pow(k as u32);
        (0..count)
            .map(|code| {
                let mut f: Vec<Elem> = Vec::with_capacity(k + 1);
                let mut c = code;
                for _ in 0..k {
                    f.push((c % self.order) as Elem);
                    c /= self.order;
                }
                f.push(1);
                f
            })
            .find(|f| self.is_irreducible(f))
            .expect("irreducible polynomials exist in every degree")
    }
}

/// GF(p^k) with the smallest monic irreducible modulus over GF(p).
pub fn make_field(p: u32, k: u32) -> Result<Arc<Field>> {
    if k == 0 {
        return Err(Error::Invalid("extension degree must be >= 1".into()));
    }
    let gfp = Field::prime(p)?;
    if k == 1 {
        return Ok(gfp);
    }
    cap_check("field order", (p as u128).pow(k), FIELD_ORDER_CAP as u128)?;
    let modulus = gfp.smallest_irreducible(k as usize);
    Field::extension(&gfp, &modulus)
}

/// GF(q) for a prime power `q`.
pub fn field_of_order(q: u64) -> Result<Arc<Field>> {
    if q < 2 {
        return Err(Error::Invalid(format!("{q} is not a prime power")));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    if r != 1 {
        return Err(Error::Invalid(format!("{q} is not a prime power")));
    }
    make_field(p as u32, k)
}

/// An element bundled with its field, for checked arithmetic across API boundaries.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Arc<Field>,
    id: Elem,
}

/// Operations accepted by [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Neg,
    Pow(u64),
}

impl FieldElement {
    pub fn new(field: &Arc<Field>, id: Elem) -> Result<Self> {
        if (id as usize) >= field.order() {
            return Err(Error::Invalid(format!("id {id} outside {:?}", field)));
        }
        Ok(FieldElement {
            field: field.clone(),
            id,
        })
    }
    pub fn id(&self) -> Elem {
        self.id
    }
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.id)
    }
    fn same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }
    fn with(&self, id: Elem) -> Self {
        FieldElement {
            field: self.field.clone(),
            id,
        }
    }
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.with(self.field.add(self.id, other.id)))
    }
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.with(self.field.mul(self.id, other.id)))
    }
    pub fn neg(&self) -> Self {
        self.with(self.field.neg(self.id))
    }
    pub fn inv(&self) -> Result<Self> {
        Ok(self.with(self.field.try_inv(self.id)?))
    }
    pub fn pow(&self, e: u64) -> Self {
        self.with(self.field.pow(self.id, e))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs())
    }
}

/// One arithmetic step; `b` is ignored by the unary operations.
pub fn arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Inv => a.inv(),
        ArithOp::Neg => Ok(a.neg()),
        ArithOp::Pow(e) => Ok(a.pow(e)),
    }
}

/// Smallest `alpha` (in id order) with `X^2 - X - alpha` irreducible over `f`.
pub fn find_alpha(f: &Field) -> Elem {
    f.elements()
        .find(|&alpha| {
            f.elements()
                .all(|x| f.sub(f.sub(f.mul(x, x), x), alpha) != 0)
        })
        .expect("some X^2 - X - alpha is irreducible")
}

/// GF(q) inside GF(q^2) = GF(q)[X]/(X^2 - X - alpha), with `w` the class of X
/// and `xi = 2w - 1`.
#[derive(Debug, Clone)]
pub struct QuadExtension {
    pub base: Arc<Field>,
    pub ext: Arc<Field>,
    pub alpha: Elem,
    pub w: Elem,
    pub xi: Elem,
}

impl QuadExtension {
    pub fn new(base: &Arc<Field>) -> Result<Self> {
        let f = base;
        let alpha = find_alpha(f);
        let modulus = [f.neg(alpha), f.neg(1), 1];
        let ext = Field::extension(base, &modulus)?;
        let w = f.order() as Elem;
        let xi = ext.sub(ext.add(w, w), 1);
        let qe = QuadExtension {
            base: base.clone(),
            ext,
            alpha,
            w,
            xi,
        };
        qe.check()?;
        Ok(qe)
    }
    pub fn q(&self) -> u64 {
        self.base.order() as u64
    }
    /// `x -> x^q`.
    pub fn conj(&self, x: Elem) -> Elem {
        self.ext.pow(x, self.q())
    }
    /// Verifies the defining identities of `w` and `xi`.
    pub fn check(&self) -> Result<()> {
        let e = &self.ext;
        let a = self.alpha; // base ids embed unchanged
        let four_a_plus_1 = e.add(e.mul(e.from_int(4), a), 1);
        let checks = [
            ("w^2 = w + alpha", e.mul(self.w, self.w) == e.add(self.w, a)),
            ("w + w^q = 1", e.add(self.w, self.conj(self.w)) == 1),
            ("w^(q+1) = -alpha", e.pow(self.w, self.q() + 1) == e.neg(a)),
            ("xi^q = -xi", self.conj(self.xi) == e.neg(self.xi)),
            ("xi^2 = 4 alpha + 1", e.mul(self.xi, self.xi) == four_a_plus_1),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(Error::Verification(format!("quadratic extension: {name}"))),
            None => Ok(()),
        }
    }
}
