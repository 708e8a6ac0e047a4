use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{classify, VerdictKind};
use crate::error::{Error, Result};
use crate::model::{lambda_threshold, ModelParams};
use crate::profile::Profile;
use crate::solver::{simulate, NumericsConfig};
use crate::tolerances::ClassifyTols;

/// One accepted bisection probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub mu: f64,
    pub verdict: VerdictKind,
    pub t_max: f64,
    /// Still undecided after the doubled horizon; counted as spreading.
    pub near_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuBracket {
    pub lo: f64,
    pub hi: f64,
    pub initial: (f64, f64),
    pub n_bisect: u32,
    pub probes: Vec<Probe>,
}

impl MuBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn near_threshold(&self) -> impl Iterator<Item = &Probe> {
        self.probes.iter().filter(|p| p.near_threshold)
    }

    /// Every vanishing probe lies below every spreading one, and the final
    /// bracket separates them.
    pub fn is_consistent(&self) -> bool {
        let v_max = self
            .probes
            .iter()
            .filter(|p| p.verdict == VerdictKind::Vanishing)
            .fold(f64::NEG_INFINITY, |m, p| m.max(p.mu));
        let s_min =
            self.probes.iter().filter(|p| p.verdict != VerdictKind::Vanishing).fold(f64::INFINITY, |m, p| m.min(p.mu));
        v_max < s_min && v_max <= self.lo && s_min >= self.hi && self.lo < self.hi
    }
}

fn probe(p: &ModelParams, mu: f64, u0: &Profile, v0: &Profile, cfg: &NumericsConfig) -> Result<Probe> {
    let q = p.with_mu(mu);
    let run = |cfg: &NumericsConfig| -> Result<VerdictKind> {
        let r = simulate(&q, u0, v0, cfg)?;
        let tols = ClassifyTols::defaults(&q, r.numerics.line_grid().dx, r.numerics.t_max);
        Ok(classify(&r, &q, &tols).kind)
    };
    let mut verdict = run(cfg)?;
    let mut t_max = cfg.t_max;
    if verdict == VerdictKind::Undecided {
        t_max *= 2.0;
        log::info!("μ = {mu}: undecided, retrying with t_max = {t_max}");
        verdict = run(&NumericsConfig { t_max, ..cfg.clone() })?;
    }
    Ok(Probe { mu, verdict, t_max, near_threshold: verdict == VerdictKind::Undecided })
}

/// Bisects `[mu_lo, mu_hi]` for the spreading threshold in `μ`.
///
/// The ends must classify as vanishing and spreading. Probes are full
/// simulations with the given numerics (early stop is switched on). Each
/// round runs the midpoint together with both possible next midpoints in
/// parallel, so two halvings cost one probe latency; the accepted sequence
/// is the same as plain bisection.
pub fn estimate_mu_star(
    p_base: &ModelParams,
    u0: &Profile,
    v0: &Profile,
    cfg: &NumericsConfig,
    bracket: (f64, f64),
    n_bisect: u32,
) -> Result<MuBracket> {
    p_base.validate()?;
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::Validation(format!("invalid μ bracket [{lo}, {hi}]")));
    }
    let lambda = lambda_threshold(p_base);
    if 2.0 * p_base.h0 >= lambda {
        return Err(Error::Domain(format!("no threshold in μ when 2 h0 >= Λ = {lambda}")));
    }
    let cfg = NumericsConfig { early_stop: true, ..cfg.clone() };
    let (a, b) = rayon::join(|| probe(p_base, lo, u0, v0, &cfg), || probe(p_base, hi, u0, v0, &cfg));
    let (a, b) = (a?, b?);
    if a.verdict != VerdictKind::Vanishing || b.verdict != VerdictKind::Spreading {
        return Err(Error::Bracket(format!(
            "ends classify as {} at μ = {lo} and {} at μ = {hi}",
            a.verdict.as_str(),
            b.verdict.as_str()
        )));
    }
    let mut probes = vec![a, b];
    let mut done = 0;
    while done < n_bisect {
        let mid = 0.5 * (lo + hi);
        let mut mus = vec![mid];
        if done + 1 < n_bisect {
            mus.push(0.5 * (lo + mid));
            mus.push(0.5 * (mid + hi));
        }
        let results: Vec<Result<Probe>> = mus.par_iter().map(|&mu| probe(p_base, mu, u0, v0, &cfg)).collect();
        let mut results = results.into_iter();
        let first = results.next().unwrap()?;
        let lower_side = first.verdict == VerdictKind::Vanishing;
        if lower_side {
            lo = mid;
        } else {
            hi = mid;
        }
        probes.push(first);
        done += 1;
        if done < n_bisect {
            let (q_lo, q_hi) = (results.next().unwrap(), results.next().unwrap());
            let second = if lower_side { q_hi? } else { q_lo? };
            if second.verdict == VerdictKind::Vanishing {
                lo = second.mu;
            } else {
                hi = second.mu;
            }
            probes.push(second);
            done += 1;
        }
    }
    let out = MuBracket { lo, hi, initial: bracket, n_bisect, probes };
    if !out.is_consistent() {
        return Err(Error::Oracle(format!(
            "bisection probes are not ordered in μ: {:?}",
            out.probes.iter().map(|p| (p.mu, p.verdict)).collect::<Vec<_>>()
        )));
    }
    Ok(out)
}
