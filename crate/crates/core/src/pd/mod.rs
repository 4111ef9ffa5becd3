//! Functions on a group: families, transforms, positive-definiteness and
//! conditionally-negative-type checks, `ℓ^p` norms and ideal membership.

mod certificate;
mod checks;
mod function;
mod ideal;

pub use certificate::{SupDecay, TailCertificate};
pub use checks::{cnd_window_check, pd_matrix, pd_window_check, CndOutcome, CndReport, DEFAULT_PSD_TOL};
pub use function::{Family, GroupFunction};
pub use ideal::{ideal_membership, lp_norm, IdealSpec, LpReport, LpStatus, Membership, Verdict};
