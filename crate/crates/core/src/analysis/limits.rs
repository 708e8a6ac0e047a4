use serde::{Deserialize, Serialize};

use super::classify::VerdictKind;
use crate::model::{spreading_limits, ModelParams, Regime};
use crate::solver::SimulationResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    pub name: String,
    pub target: f64,
    /// Value at the probe-window centre.
    pub center: f64,
    /// Largest deviation from the target over the probe window.
    pub max_dev: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub verdict: VerdictKind,
    pub t: f64,
    pub probe_window: [f64; 2],
    pub checks: Vec<LimitCheck>,
    pub pass: bool,
}

fn check(name: &str, target: f64, xs: &[f64], vals: &[f64], centre: f64, tol: f64) -> LimitCheck {
    let max_dev = vals.iter().fold(0.0f64, |m, v| m.max((v - target).abs()));
    // linear interpolation at the centre
    let k = xs.partition_point(|&x| x < centre).clamp(1, xs.len() - 1);
    let th = (centre - xs[k - 1]) / (xs[k] - xs[k - 1]);
    let center = vals[k - 1] + th * (vals[k] - vals[k - 1]);
    LimitCheck { name: name.into(), target, center, max_dev, tol, pass: max_dev <= tol }
}

/// Compares the final fields on the probe window with the long-time limits
/// for the given verdict. `tol` is absolute. Undecided runs yield an empty
/// failing report; spreading in the uncovered regime has no closed-form
/// target and yields an empty passing one.
pub fn verify_limits(result: &SimulationResult, p: &ModelParams, verdict: VerdictKind, tol: f64) -> LimitReport {
    let line = result.numerics.line_grid();
    let [lo, hi] = result.numerics.probe_window;
    let centre = 0.5 * (lo + hi);
    let u = result.final_u_on_line();
    let z = &result.final_state.z;
    let idx: Vec<usize> = (0..line.n_x).filter(|&i| line.x[i] >= lo && line.x[i] <= hi).collect();
    let xs: Vec<f64> = idx.iter().map(|&i| line.x[i]).collect();
    let us: Vec<f64> = idx.iter().map(|&i| u[i]).collect();
    let vs: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
    let targets = match verdict {
        VerdictKind::Spreading => match p.regime() {
            Regime::Uncovered => None,
            _ => spreading_limits(p).ok(),
        },
        VerdictKind::Vanishing => Some((0.0, p.b)),
        VerdictKind::Undecided => None,
    };
    let checks: Vec<LimitCheck> = match targets {
        Some((tu, tv)) if xs.len() >= 2 => {
            vec![check("u", tu, &xs, &us, centre, tol), check("v", tv, &xs, &vs, centre, tol)]
        }
        _ => Vec::new(),
    };
    let pass = match verdict {
        VerdictKind::Undecided => false,
        _ => checks.iter().all(|c| c.pass),
    };
    LimitReport { verdict, t: result.t_end(), probe_window: [lo, hi], checks, pass }
}
