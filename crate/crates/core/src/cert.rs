//! Self-describing JSON certificates.
//!
//! A certificate is hashed over its canonical serialization: the JSON value
//! with `sha256` removed, keys sorted (serde_json's default map is ordered),
//! no whitespace. Each regular system carries its form, so it can be
//! re-checked without knowing how it was built.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};
use crate::fields::{field_of_order, Elem};
use crate::polar::{Caps, Family, Form, PolarSpace, SpaceDescriptor};
use crate::regsys::{regularity_profile, GeneratorSet, RegularityCertificate, Witness};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormRecord {
    pub kind: String,
    pub n: usize,
    pub entries: Vec<(usize, usize, Elem)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub min: u64,
    pub max: u64,
}

/// A generator set with its claimed regularity at one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub label: String,
    pub space: SpaceDescriptor,
    pub form: FormRecord,
    pub k: usize,
    pub m: Option<u64>,
    pub ids: Vec<u32>,
    pub profile: Profile,
    pub hemisystem: bool,
}

impl SystemRecord {
    pub fn new(label: impl Into<String>, set: &GeneratorSet, cert: &RegularityCertificate) -> Self {
        let p = set.space();
        SystemRecord {
            label: label.into(),
            space: p.descriptor(),
            form: FormRecord {
                kind: p.form().kind_name().to_string(),
                n: p.form().n(),
                entries: p.form().entries(),
            },
            k: cert.k,
            m: cert.m,
            ids: set.ids().to_vec(),
            profile: Profile {
                min: cert.min_count,
                max: cert.max_count,
            },
            hemisystem: cert.is_hemisystem,
        }
    }

    /// Rebuilds the space from the recorded form.
    pub fn rebuild_space(&self) -> Result<Arc<PolarSpace>> {
        let family: Family = self.space.family.parse()?;
        let field = field_of_order(self.space.q)?;
        let form = Form::from_entries(&field, &self.form.kind, self.form.n, &self.form.entries)?;
        if form.n() != family.vdim(self.space.d) {
            return Err(invalid("form dimension does not match the family"));
        }
        Ok(Arc::new(PolarSpace::from_form(family, self.space.d, field, form, Caps::default())?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    /// The arguments that produced this certificate.
    pub command: Vec<String>,
    pub space: Option<SpaceDescriptor>,
    pub payload: Value,
    pub systems: Vec<SystemRecord>,
    pub sha256: String,
}

fn canonical_without_hash(v: &Value) -> String {
    let mut v = v.clone();
    if let Value::Object(m) = &mut v {
        m.remove("sha256");
    }
    v.to_string()
}

impl Certificate {
    pub fn new(command: Vec<String>, space: Option<SpaceDescriptor>, payload: Value, systems: Vec<SystemRecord>) -> Self {
        let mut c = Certificate {
            schema_version: SCHEMA_VERSION,
            command,
            space,
            payload,
            systems,
            sha256: String::new(),
        };
        c.sha256 = c.content_hash();
        c
    }

    pub fn content_hash(&self) -> String {
        let v = serde_json::to_value(self).expect("certificates serialize");
        hex::encode(Sha256::digest(canonical_without_hash(&v).as_bytes()))
    }

    /// Sorted keys, no whitespace, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("certificates serialize");
        format!("{v}\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| invalid(format!("malformed certificate: {e}")))
    }
}

/// Outcome of re-checking one recorded system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemVerdict {
    pub label: String,
    pub ok: bool,
    pub reason: Option<String>,
    /// A (k-1)-space whose count differs from the claim.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub hash_ok: bool,
    pub systems: Vec<SystemVerdict>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.hash_ok && self.systems.iter().all(|s| s.ok)
    }
}

/// Recomputes the regularity profile of `rec` in its rebuilt space.
pub fn verify_system(rec: &SystemRecord) -> Result<SystemVerdict> {
    let p = rec.rebuild_space()?;
    let fail = |reason: String, witness| SystemVerdict {
        label: rec.label.clone(),
        ok: false,
        reason: Some(reason),
        witness,
    };
    if p.descriptor() != rec.space {
        return Ok(fail("space descriptor does not match the rebuilt space".into(), None));
    }
    let set = match GeneratorSet::from_unsorted(&p, rec.ids.clone()) {
        Ok(s) if s.ids() == rec.ids.as_slice() => s,
        Ok(_) => return Ok(fail("ids are not strictly increasing".into(), None)),
        Err(e) => return Ok(fail(e.to_string(), None)),
    };
    let cert = regularity_profile(&set, rec.k)?;
    let counts_ok = cert.min_count == rec.profile.min && cert.max_count == rec.profile.max;
    if cert.m == rec.m && counts_ok && cert.is_hemisystem == rec.hemisystem {
        return Ok(SystemVerdict {
            label: rec.label.clone(),
            ok: true,
            reason: None,
            witness: None,
        });
    }
    // locate a (k-1)-space whose count disagrees with the claim
    let counts = crate::regsys::subspace_counts(&set, rec.k)?;
    let witness = counts
        .iter()
        .enumerate()
        .find(|&(_, &c)| match rec.m {
            Some(m) => c != m,
            None => c < rec.profile.min || c > rec.profile.max,
        })
        .map(|(i, &c)| Witness {
            sigma: i as u32,
            count: c,
        });
    Ok(fail(
        format!(
            "claimed m = {:?} with counts {}..={}, found m = {:?} with counts {}..={}",
            rec.m, rec.profile.min, rec.profile.max, cert.m, cert.min_count, cert.max_count
        ),
        witness,
    ))
}

/// Checks the content hash and every recorded system.
pub fn verify(cert: &Certificate) -> Result<VerifyReport> {
    let systems = cert.systems.iter().map(verify_system).collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        hash_ok: cert.content_hash() == cert.sha256,
        systems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::build_polar;
    use serde_json::json;

    fn latin_cert() -> Certificate {
        let p = build_polar(Family::QPlus, 3, 2).unwrap();
        let (a, _) = p.latin_greek_split().unwrap();
        let set = GeneratorSet::new(&p, a).unwrap();
        let rc = regularity_profile(&set, 1).unwrap();
        Certificate::new(
            vec!["construct".into(), "latin-greek".into()],
            Some(p.descriptor()),
            json!({"size": set.len()}),
            vec![SystemRecord::new("latin", &set, &rc)],
        )
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let c = latin_cert();
        let s = c.to_canonical_json();
        let back = Certificate::from_json(&s).unwrap();
        assert_eq!(back.to_canonical_json(), s);
        assert!(verify(&back).unwrap().ok());
        assert_eq!(latin_cert().sha256, c.sha256);
    }

    #[test]
    fn tampering_is_caught_with_witness() {
        let mut c = latin_cert();
        c.systems[0].ids.pop();
        let r = verify(&c).unwrap();
        assert!(!r.hash_ok && !r.systems[0].ok);
        assert!(r.systems[0].witness.is_some());
        c.sha256 = c.content_hash();
        assert!(verify(&c).unwrap().hash_ok);
        assert!(!verify(&c).unwrap().ok());
    }

    #[test]
    fn keys_are_sorted() {
        let s = latin_cert().to_canonical_json();
        let a = s.find("\"command\"").unwrap();
        let b = s.find("\"payload\"").unwrap();
        let c = s.find("\"schema_version\"").unwrap();
        assert!(a < b && b < c);
    }
}
