//! Classification thresholds shared by the solver's early stop and the
//! classifier.

use serde::{Deserialize, Serialize};

use crate::model::{lambda_threshold, spreading_limits, ModelParams, Regime};

/// Duration over which the spreading floor must hold.
pub const TRAILING_WINDOW: f64 = 2.0;
/// Relative prey tolerance on the probe window for a vanishing run.
pub const PREY_RELAX_RTOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyTols {
    /// Slack on the critical span: `2 dx`.
    pub span_tol: f64,
    /// Sup-norm below which the predator counts as gone.
    pub u_tol: f64,
    /// Front-speed floor `|g'| + |h'|` for a settled vanishing run.
    pub v_tol: f64,
    /// Predator level the probe window must keep for spreading.
    pub u_floor: f64,
    /// Trailing duration for the spreading floor.
    pub trailing: f64,
    /// Critical span `Λ`.
    pub lambda: f64,
}

impl ClassifyTols {
    pub fn defaults(p: &ModelParams, dx: f64, t_max: f64) -> Self {
        let scale = (1.0 + p.a * p.b) / (1.0 + p.a * p.c);
        let u_star = match p.regime() {
            Regime::Uncovered => 1.0,
            _ => spreading_limits(p).map(|l| l.0).unwrap_or(1.0),
        };
        Self {
            span_tol: 2.0 * dx,
            u_tol: 1e-4 * scale,
            v_tol: 1e-5 * p.h0 / t_max,
            u_floor: 0.5 * u_star,
            trailing: TRAILING_WINDOW.min(0.5 * t_max),
            lambda: lambda_threshold(p),
        }
    }

    pub fn span_limit(&self) -> f64 {
        self.lambda + self.span_tol
    }
}
