//! Finite transformation groupoids: actions on finite sets with a
//! full-support measure, Radon–Nikodym cocycles, the covariant
//! representation, groupoid positive-definite functions and certificates.

mod cocycle;
mod groupoid;
mod system;

pub use cocycle::{
    covariant_rep, dn_report, envelopes, radon_nikodym, spectral_gap, Candidate, Cocycle, CovariantRep, DnReport,
    EnvelopeScope, Envelopes, SpectralGap, EXACT_TOL, FIXED_TOL,
};
pub use groupoid::{
    action_certificate, groupoid_pd_check, groupoid_schur_multiply, state_function, state_kernel, sup_norm_profile,
    ActionCertificate, ActionCheck, ActionKind, CrossedElement, GroupoidFunction, GroupoidPdReport,
};
pub use system::{FiniteSystem, SystemJson, MEASURE_SUM_TOL};

use serde::ser::{SerializeSeq, Serializer};

use crate::linalg::C;

/// Complex vectors as `[re, im]` pairs.
pub(crate) fn serialize_complex_vec<S: Serializer>(v: &[C], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}
