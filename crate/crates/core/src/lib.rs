//! Workbench for ideal completions of discrete group algebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: exact group models, balls and growth;
//! * [`ring`]: finitely supported group-ring elements;
//! * [`pd`]: functions on groups, positive-definiteness checks, tail
//!   certificates, ℓ^p norms and ideal membership;
//! * [`rep`]: finite unitary representations and truncated GNS windows;
//! * [`completions`]: norm estimates in the full, reduced and ideal
//!   completions, Schur multipliers, certificates and the coproduct;
//! * [`notation`]: text forms for functions and elements;
//! * [`dynamics`]: finite transformation groupoids with quasi-invariant
//!   measures.

pub mod completions;
pub mod dynamics;
pub mod error;
pub mod group;
pub mod linalg;
pub mod notation;
pub mod pd;
pub mod rep;
pub mod ring;

pub use error::{Error, Result};
pub use group::{Ball, GroupElement, GroupKind, GroupModel, Homomorphism, DEFAULT_BUDGET};
pub use pd::{GroupFunction, IdealSpec, TailCertificate};
pub use rep::{FiniteUnitaryRep, GnsWindow};
pub use ring::GroupRingElement;
