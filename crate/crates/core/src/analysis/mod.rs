//! Post-processing of runs: classification, the comparison barrier used as
//! a vanishing oracle, threshold bracketing in `μ` and long-time limit
//! checks.

mod bisect;
mod classify;
mod limits;
mod supersolution;

pub use bisect::{estimate_mu_star, MuBracket, Probe};
pub use classify::{classify, Evidence, Verdict, VerdictKind};
pub use limits::{verify_limits, LimitCheck, LimitReport};
pub use supersolution::{build_supersolution, check_domination, DominationReport, Supersolution};
