//! Writing, re-checking and tampering with a certificate.
//!
//! Run with `cargo run --release --example certificates`.

use polarsys::cert::{verify, Certificate, SystemRecord};
use polarsys::constructions::q63_construction;

fn main() -> polarsys::Result<()> {
    let c = q63_construction([1, 2, 3], 0)?;
    let rec = SystemRecord::new("cover", &c.cover.0, &c.cover.1);
    let cert = Certificate::new(vec!["example".into()], Some(c.space.descriptor()), serde_json::json!({"lines": 28}), vec![rec]);
    let text = cert.to_canonical_json();
    println!("{} bytes, sha256 {}", text.len(), cert.sha256);
    let back = Certificate::from_json(&text)?;
    println!("re-check: {:?}", verify(&back)?);

    let mut bad = back.clone();
    bad.systems[0].ids.pop();
    let report = verify(&bad)?;
    println!("after dropping one plane: hash ok {}, system {:?}", report.hash_ok, report.systems[0]);
    Ok(())
}
