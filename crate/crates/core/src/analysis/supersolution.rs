//! Explicit comparison barrier for subcritical habitats.
//!
//! With `ϑ = h0/2 + Λ/4` and `v̄` the logistic upper bound for the prey,
//!
//! ```text
//! f(t) = M exp ∫₀ᵗ [1 + a v̄(s) − (π/2ϑ)²] ds
//! η(t) = ( h0² (1+δ)² + μ π ∫₀ᵗ f )^{1/2}
//! ū(t, x) = f(t) cos(π x / (2 η(t)))   on |x| < η(t)
//! ```
//!
//! dominates the predator while `η < ϑ`, which holds for all time once
//! `μ ≤ mu0 = (ϑ² − h0²(1+δ)²) / (π ∫₀^∞ f)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::y_to_x;
use crate::model::{lambda_threshold, ModelParams};
use crate::profile::Profile;
use crate::quad::adaptive_simpson;
use crate::solver::SimulationResult;
use crate::steady::ode_upper_v;

/// Panel width of the cumulative tables.
const PANEL: f64 = 1.0 / 32.0;
const EXPONENT_TOL: f64 = 1e-14;
/// Relative size of the neglected-tail bound at which integration stops.
const TAIL_RTOL: f64 = 1e-9;
const MAX_HORIZON: f64 = 1e6;
const M_SEARCH_DOUBLINGS: u32 = 40;
const M_SAMPLES: usize = 4001;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Supersolution {
    pub m: f64,
    pub delta: f64,
    /// `ϑ = h0/2 + Λ/4`.
    pub theta_len: f64,
    pub mu0: f64,
    /// Expansion coefficient used in `η`; `mu0` unless overridden.
    pub mu: f64,
    /// `∫₀^∞ f`, tail bound included.
    pub f_integral: f64,
    /// Where table integration stopped.
    pub horizon: f64,
    /// Bound added for `∫_horizon^∞ f`.
    pub tail_bound: f64,
    /// Decay rate used for the tail bound.
    tail_rate: f64,
    a: f64,
    b: f64,
    h0: f64,
    v0_sup: f64,
    k2: f64,
    // exponent and ∫ f at t = i · PANEL
    exponent_table: Vec<f64>,
    f_table: Vec<f64>,
}

impl Supersolution {
    pub fn v_bar(&self, t: f64) -> f64 {
        ode_upper_v(t, self.b, self.v0_sup)
    }

    /// Growth rate `1 + a v̄(t) − (π/2ϑ)²`.
    pub fn rate(&self, t: f64) -> f64 {
        1.0 + self.a * self.v_bar(t) - self.k2
    }

    fn panel(&self, t: f64) -> (usize, f64) {
        let i = ((t / PANEL).floor() as usize).min(self.exponent_table.len() - 1);
        (i, i as f64 * PANEL)
    }

    /// `∫₀ᵗ [1 + a v̄ − (π/2ϑ)²]`.
    pub fn exponent(&self, t: f64) -> f64 {
        let (i, t0) = self.panel(t);
        if t == t0 {
            return self.exponent_table[i];
        }
        let r = |s: f64| self.rate(s);
        self.exponent_table[i] + adaptive_simpson(&r, t0, t, EXPONENT_TOL)
    }

    pub fn f(&self, t: f64) -> f64 {
        self.m * self.exponent(t).exp()
    }

    /// `∫₀ᵗ f`. Beyond the table horizon this is the exponential upper
    /// bound that also gives the tail estimate.
    pub fn f_cumulative(&self, t: f64) -> f64 {
        if t >= self.horizon {
            let end = self.f_table[self.f_table.len() - 1];
            return end + self.tail_bound * (-(t - self.horizon) * self.tail_rate).exp_m1().abs();
        }
        let (i, t0) = self.panel(t);
        if t == t0 {
            return self.f_table[i];
        }
        let f = |s: f64| self.f(s);
        self.f_table[i] + adaptive_simpson(&f, t0, t, 1e-13 * self.f_integral)
    }

    pub fn eta(&self, t: f64) -> f64 {
        let e0 = self.h0 * (1.0 + self.delta);
        (e0 * e0 + self.mu * PI * self.f_cumulative(t)).sqrt()
    }

    /// `f(t) cos(π x / 2η(t))` inside `|x| < η(t)`, zero outside.
    pub fn barrier(&self, t: f64, x: f64) -> f64 {
        let eta = self.eta(t);
        if x.abs() >= eta {
            0.0
        } else {
            self.f(t) * (PI * x / (2.0 * eta)).cos()
        }
    }

    /// Same barrier with a different `μ` in `η`.
    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..self.clone() }
    }

    /// Closed form of the exponent, for cross-checking the quadrature.
    pub fn exponent_closed_form(&self, t: f64) -> f64 {
        let growth = self.v0_sup / self.b * (self.b * t).exp_m1();
        (1.0 - self.k2) * t + self.a * growth.ln_1p()
    }
}

/// Builds the barrier and the vanishing threshold `mu0`.
pub fn build_supersolution(p: &ModelParams, u0: &Profile, v0: &Profile, delta: f64) -> Result<Supersolution> {
    p.validate()?;
    u0.validate_predator(p.h0)?;
    v0.validate_prey()?;
    let lambda = lambda_threshold(p);
    if 2.0 * p.h0 >= lambda {
        return Err(Error::Domain(format!("barrier needs 2 h0 < Λ (2 h0 = {}, Λ = {lambda})", 2.0 * p.h0)));
    }
    let theta_len = 0.5 * p.h0 + 0.25 * lambda;
    let e0 = p.h0 * (1.0 + delta);
    if !(delta > 0.0 && theta_len > e0) {
        return Err(Error::Validation(format!(
            "delta must satisfy 0 < delta and h0 (1 + delta) < ϑ = {theta_len} (got {delta})"
        )));
    }

    // amplitude: smallest power-of-two multiple of ‖u0‖∞ above u0
    let u_sup = u0.sup_norm();
    let fu = u0.evaluator(p.h0);
    let width = 2.0 * e0;
    let hx = 2.0 * p.h0 / (M_SAMPLES - 1) as f64;
    let dominated = |m: f64| {
        (0..M_SAMPLES).all(|i| {
            let x = -p.h0 + hx * i as f64;
            fu(x) <= m * (PI * x / width).cos()
        })
    };
    let mut m = u_sup;
    let mut doublings = 0;
    while !dominated(m) {
        doublings += 1;
        if doublings > M_SEARCH_DOUBLINGS {
            return Err(Error::Construction(format!(
                "initial predator is not below 2^{M_SEARCH_DOUBLINGS} ‖u0‖∞ cos(πx / 2h0(1+δ))"
            )));
        }
        m *= 2.0;
    }

    let k2 = (PI / (2.0 * theta_len)).powi(2);
    let mut s = Supersolution {
        m,
        delta,
        theta_len,
        mu0: 0.0,
        mu: 0.0,
        f_integral: 0.0,
        horizon: 0.0,
        tail_bound: 0.0,
        tail_rate: 0.0,
        a: p.a,
        b: p.b,
        h0: p.h0,
        v0_sup: v0.sup_norm(),
        k2,
        exponent_table: vec![0.0],
        f_table: vec![0.0],
    };
    let r_inf = 1.0 + p.a * p.b - k2;
    debug_assert!(r_inf < 0.0);

    loop {
        let i = s.exponent_table.len() - 1;
        let (t0, t1) = (i as f64 * PANEL, (i + 1) as f64 * PANEL);
        let r = |t: f64| s.rate(t);
        let e1 = s.exponent_table[i] + adaptive_simpson(&r, t0, t1, EXPONENT_TOL);
        let e0_val = s.exponent_table[i];
        let f = |t: f64| {
            let e = e0_val + adaptive_simpson(&r, t0, t, EXPONENT_TOL);
            m * e.exp()
        };
        let scale = s.f_table[i].max(m * PANEL);
        let f1 = s.f_table[i] + adaptive_simpson(&f, t0, t1, 1e-14 * scale);
        s.exponent_table.push(e1);
        s.f_table.push(f1);

        let rate_now = s.rate(t1);
        if rate_now < 0.0 {
            // rate is monotone in t and tends to r_inf < 0
            let decay = rate_now.max(r_inf).abs();
            let tail = m * e1.exp() / decay;
            if tail < TAIL_RTOL * f1 {
                s.tail_rate = decay;
                s.horizon = t1;
                s.tail_bound = tail;
                s.f_integral = f1 + tail;
                break;
            }
        }
        if t1 > MAX_HORIZON {
            return Err(Error::Construction("barrier integral did not settle".into()));
        }
    }
    s.mu0 = (theta_len * theta_len - e0 * e0) / (PI * s.f_integral);
    s.mu = s.mu0;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub pass: bool,
    /// Slack allowed on every check, `2 dx`.
    pub eps: f64,
    /// Smallest `η − h` and `g + η` over the series.
    pub front_margin: f64,
    pub front_margin_t: f64,
    /// Smallest `ū − u` over snapshot nodes.
    pub density_margin: f64,
    pub density_margin_t: f64,
    pub density_margin_x: f64,
    pub times_checked: usize,
}

impl DominationReport {
    pub fn worst_margin(&self) -> f64 {
        self.front_margin.min(self.density_margin)
    }
}

/// Checks the run against the barrier: fronts inside `[−η, η]` at every
/// series time and `u ≤ ū` at every snapshot node, both within `2 dx`.
pub fn check_domination(result: &SimulationResult, sup: &Supersolution) -> DominationReport {
    let eps = 2.0 * result.numerics.line_grid().dx;
    let mut front_margin = f64::INFINITY;
    let mut front_margin_t = 0.0;
    for s in &result.series {
        let eta = sup.eta(s.t);
        let m = (eta - s.h).min(s.g + eta);
        if m < front_margin {
            front_margin = m;
            front_margin_t = s.t;
        }
    }
    let grid = result.numerics.straight_grid();
    let mut density_margin = f64::INFINITY;
    let (mut dm_t, mut dm_x) = (0.0, 0.0);
    for snap in &result.snapshots {
        let eta = sup.eta(snap.t);
        let f = sup.f(snap.t);
        for (&y, &w) in grid.y.iter().zip(&snap.w) {
            let x = y_to_x(&snap.front, y).expect("grid nodes lie in [-1, 1]");
            let bar = if x.abs() >= eta { 0.0 } else { f * (PI * x / (2.0 * eta)).cos() };
            let m = bar - w;
            if m < density_margin {
                density_margin = m;
                dm_t = snap.t;
                dm_x = x;
            }
        }
    }
    DominationReport {
        pass: front_margin >= -eps && density_margin >= -eps,
        eps,
        front_margin,
        front_margin_t,
        density_margin,
        density_margin_t: dm_t,
        density_margin_x: dm_x,
        times_checked: result.snapshots.len(),
    }
}
