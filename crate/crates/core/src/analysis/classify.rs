use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::solver::{FrontSample, SimulationResult};
use crate::tolerances::ClassifyTols;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Spreading,
    Vanishing,
    Undecided,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Spreading => "Spreading",
            VerdictKind::Vanishing => "Vanishing",
            VerdictKind::Undecided => "Undecided",
        }
    }
}

/// Quantities the decision was based on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub t_end: f64,
    pub final_span: f64,
    pub lambda: f64,
    pub span_limit: f64,
    /// First time the span exceeded `Λ + span_tol`.
    pub t_span_crossed: Option<f64>,
    pub sup_u_end: f64,
    pub u_tol: f64,
    pub front_speed_end: f64,
    pub v_tol: f64,
    /// Smallest probe-window predator level over the trailing window.
    pub probe_u_trailing_min: f64,
    pub u_floor: f64,
    pub trailing: f64,
    /// Largest `|v − b| / b` on the probe window at the final time.
    pub prey_rel_dev_end: f64,
    /// For undecided runs: the criterion that came closest, with its margin.
    pub closest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub evidence: Evidence,
    pub t_decided: Option<f64>,
}

fn speed(s: &FrontSample) -> f64 {
    s.g_dot.abs() + s.h_dot.abs()
}

/// Classifies a run as spreading, vanishing or undecided.
///
/// Spreading needs the span past `Λ + span_tol` and the probe-window
/// predator at or above `u_floor` throughout the trailing window. Vanishing
/// needs the span at most `Λ + span_tol` over the whole run, `‖u‖∞ < u_tol`
/// and front speed below `v_tol` at the end.
pub fn classify(result: &SimulationResult, p: &ModelParams, tols: &ClassifyTols) -> Verdict {
    let series = &result.series;
    let last = result.last();
    let t_end = last.t;
    let limit = tols.span_limit();
    let t_span_crossed = series.iter().find(|s| s.h - s.g > limit).map(|s| s.t);
    let trailing = tols.trailing.min(0.5 * t_end);
    let window_start = t_end - trailing;
    let probe_u_trailing_min =
        series.iter().filter(|s| s.t >= window_start).fold(f64::INFINITY, |m, s| m.min(s.probe_u));
    let prey_rel_dev_end = ((last.probe_v_min - p.b).abs()).max((last.probe_v_max - p.b).abs()) / p.b;
    let mut evidence = Evidence {
        t_end,
        final_span: last.h - last.g,
        lambda: tols.lambda,
        span_limit: limit,
        t_span_crossed,
        sup_u_end: last.sup_u,
        u_tol: tols.u_tol,
        front_speed_end: speed(last),
        v_tol: tols.v_tol,
        probe_u_trailing_min,
        u_floor: tols.u_floor,
        trailing,
        prey_rel_dev_end,
        closest: None,
    };

    if t_span_crossed.is_some() && probe_u_trailing_min >= tols.u_floor {
        // earliest t with the floor held over [t − trailing, t] after crossing
        let mut held_from: Option<f64> = None;
        let mut t_decided = t_end;
        for s in series {
            let ok = s.h - s.g > limit && s.probe_u >= tols.u_floor;
            held_from = if ok { held_from.or(Some(s.t)) } else { None };
            if let Some(t0) = held_from {
                if s.t - t0 >= trailing {
                    t_decided = s.t;
                    break;
                }
            }
        }
        return Verdict { kind: VerdictKind::Spreading, evidence, t_decided: Some(t_decided) };
    }

    let vanish_at = |s: &FrontSample| s.h - s.g <= limit && s.sup_u < tols.u_tol && speed(s) < tols.v_tol;
    if t_span_crossed.is_none() && vanish_at(last) {
        let k = series.iter().rposition(|s| !vanish_at(s)).map_or(0, |k| k + 1);
        return Verdict { kind: VerdictKind::Vanishing, evidence, t_decided: Some(series[k].t) };
    }

    // relative shortfall of each rule
    let margins = if t_span_crossed.is_some() {
        vec![("probe predator floor", (tols.u_floor - probe_u_trailing_min) / tols.u_floor)]
    } else {
        vec![
            ("span above critical", (limit - evidence.final_span) / limit),
            ("predator decay", (last.sup_u - tols.u_tol).max(0.0) / tols.u_tol),
            ("front speed floor", (speed(last) - tols.v_tol).max(0.0) / tols.v_tol),
        ]
    };
    let (name, m) = margins.into_iter().filter(|(_, m)| *m > 0.0).fold(("none", f64::INFINITY), |best, cur| {
        if cur.1 < best.1 {
            cur
        } else {
            best
        }
    });
    evidence.closest = Some(format!("{name}: relative shortfall {m:.3e}"));
    Verdict { kind: VerdictKind::Undecided, evidence, t_decided: None }
}
