//! Sobolev calculus for Banach-space-valued functions on box domains.
//!
//! * [`banach`]: concrete spaces `X`, norms, duality pairings, lattice operations.
//! * [`gridfn`]: grid functions `u: Omega -> X`, Bochner norms, differences,
//!   mollification, reflection and traces.
//! * [`calculus`]: difference-quotient criterion, composition and chain rules,
//!   norm and lattice derivative fields.
//! * [`theorems`]: embedding, Morrey, Poincare, `W_0` characterisations,
//!   compactness probe and tensor extension checks.
//! * [`counterexamples`]: quantitative failure witnesses.
//! * [`suite`]: the entry catalog and manifest runner behind the CLI.

pub mod banach;
pub mod calculus;
pub mod corpus;
pub mod counterexamples;
pub mod error;
pub mod fit;
pub mod gridfn;
pub mod suite;
pub mod theorems;

pub use banach::{Exponent, PairingResult, SpaceDescriptor, SpaceKind};
pub use error::{Error, Result};
pub use gridfn::{BoxDomain, DerivativeField, GridFunction, GridSpec, Scheme};
