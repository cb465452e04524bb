//! Builds and checks regular systems of generators in small finite polar
//! spaces (quadrics, symplectic and Hermitian spaces over GF(q), q <= 4).
//!
//! - [`fields`]: table-driven GF(p^k) and the quadratic extension GF(q) < GF(q^2)
//! - [`projective`]: points and RREF subspaces of PG(n, q), Plücker coordinates
//! - [`polar`]: the six families of polar spaces, enumeration and counting
//! - [`regsys`]: regular systems, Delsarte designs, switching, chain lift/restrict
//! - [`spectra`]: distance graphs, spectra, Hoffman bounds, non-existence audits
//! - [`constructions`]: hemisystems of Q-(5,q), Ebert partitions, Klein 1-systems,
//!   the Q(6,3) simplex construction, spread search
//! - [`fieldred`]: field reduction, the spreads L and L1, generator censuses,
//!   embedded Baer subgeometries
//! - [`cert`] and [`cli`]: canonical JSON certificates and the command-line front end

pub mod cert;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod fieldred;
pub mod fields;
pub mod polar;
pub mod projective;
pub mod regsys;
pub mod spectra;

pub use error::{Error, Result};
