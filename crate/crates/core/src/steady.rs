//! Logistic two-point boundary value problems
//!
//! ```text
//! −d w'' = w (β − θ w)  on (−l, l),   w(±l) = k
//! ```
//!
//! solved by damped Newton on the centred three-point discretisation. The
//! damping is a diagonal shift that shrinks with the residual. With
//! `k = 0` a positive solution exists iff `l > (π/2) √(d/β)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tridiag::solve_in_place;

pub const MIN_NODES: usize = 64;
pub const MAX_NEWTON: usize = 50;
/// Relative level (of `β/θ`) under which an iterate counts as collapsed.
pub const COLLAPSE_LEVEL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticBvp {
    pub d: f64,
    pub beta: f64,
    pub theta: f64,
    pub l: f64,
    #[serde(default)]
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyProfile {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    /// Max defect of the discrete equations at the returned profile.
    pub residual_norm: f64,
    pub iterations: usize,
    /// Set when `k = 0` and only the zero solution exists.
    pub subcritical: bool,
}

impl SteadyProfile {
    pub fn center_value(&self) -> f64 {
        let n = self.values.len();
        if n % 2 == 1 {
            self.values[n / 2]
        } else {
            0.5 * (self.values[n / 2 - 1] + self.values[n / 2])
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v))
    }
}

impl LogisticBvp {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("d", self.d), ("beta", self.beta), ("theta", self.theta), ("l", self.l)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!("{name} must be positive (got {v})")));
            }
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(Error::Validation(format!("k must be nonnegative (got {})", self.k)));
        }
        Ok(())
    }

    /// Principal Dirichlet growth rate `β − d (π / 2l)²`.
    pub fn principal_rate(&self) -> f64 {
        self.beta - self.d * (PI / (2.0 * self.l)).powi(2)
    }

    /// Same rate for the discrete Laplacian with `n` nodes.
    fn discrete_principal_rate(&self, n: usize) -> f64 {
        let h = 2.0 * self.l / (n - 1) as f64;
        self.beta - 4.0 * self.d / (h * h) * (PI * h / (4.0 * self.l)).sin().powi(2)
    }
}

/// `(π/2) √(d/β)`.
pub fn existence_threshold(d: f64, beta: f64) -> Result<f64> {
    if !(d > 0.0 && beta > 0.0 && d.is_finite() && beta.is_finite()) {
        return Err(Error::Validation(format!("d and beta must be positive (got {d}, {beta})")));
    }
    Ok(0.5 * PI * (d / beta).sqrt())
}

/// Logistic upper solution `b e^{bt} / (e^{bt} − 1 + b / v0_sup)`.
pub fn ode_upper_v(t: f64, b: f64, v0_sup: f64) -> f64 {
    if t == 0.0 {
        return v0_sup;
    }
    // divide through by e^{bt} so large t does not overflow
    let e = (-b * t).exp();
    b / (1.0 - e + e * b / v0_sup)
}

fn residual(p: &LogisticBvp, h: f64, w: &[f64], out: &mut [f64]) -> f64 {
    let n = w.len();
    let c = p.d / (h * h);
    let mut worst = 0.0f64;
    for i in 1..n - 1 {
        let r = -c * (w[i - 1] - 2.0 * w[i] + w[i + 1]) - w[i] * (p.beta - p.theta * w[i]);
        out[i - 1] = r;
        worst = worst.max(r.abs());
    }
    worst
}

/// Solves the BVP on `n` uniform nodes to max residual `tol`.
pub fn solve_bvp(p: &LogisticBvp, n: usize, tol: f64) -> Result<SteadyProfile> {
    p.validate()?;
    if n < MIN_NODES {
        return Err(Error::Validation(format!("need at least {MIN_NODES} nodes (got {n})")));
    }
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("tol must be positive (got {tol})")));
    }
    let h = 2.0 * p.l / (n - 1) as f64;
    let x: Vec<f64> = (0..n).map(|i| -p.l + h * i as f64).collect();
    let top = p.k.max(p.beta / p.theta);
    let mut w: Vec<f64> = x.iter().map(|&x| p.k + (top - p.k) * (PI * x / (2.0 * p.l)).cos()).collect();
    w[0] = p.k;
    w[n - 1] = p.k;

    let m = n - 2;
    let c = p.d / (h * h);
    let mut f = vec![0.0; m];
    let mut f_try = vec![0.0; m];
    let mut lower = vec![-c; m];
    let mut upper = vec![-c; m];
    let mut diag = vec![0.0; m];
    let mut scratch = vec![0.0; m];
    let mut trial = w.clone();
    let mut res = residual(p, h, &w, &mut f);
    // damping shift: (J + σ I) δ = −F, i.e. an implicit pseudo-time step of
    // length 1/σ. σ shrinks with the residual so the tail is plain Newton.
    let res0 = res.max(f64::MIN_POSITIVE);
    let mut sigma_scale = p.beta;
    let mut iterations = 0;
    // extra full steps after the tolerance is met; near w = 0 each one
    // squares the iterate, which separates collapse from slow convergence
    let mut polish = 2;
    while res > tol || polish > 0 {
        if res <= tol {
            polish -= 1;
        }
        if iterations == MAX_NEWTON {
            return Err(Error::Solver(format!(
                "Newton did not converge in {MAX_NEWTON} iterations (residual {res:e})"
            )));
        }
        iterations += 1;
        let sigma = sigma_scale * res / res0;
        for i in 0..m {
            diag[i] = 2.0 * c - p.beta + 2.0 * p.theta * w[i + 1] + sigma;
        }
        lower.fill(-c);
        upper.fill(-c);
        let mut delta: Vec<f64> = f.iter().map(|r| -r).collect();
        solve_in_place(&lower, &diag, &upper, &mut delta, &mut scratch);
        for i in 0..m {
            trial[i + 1] = (w[i + 1] + delta[i]).max(0.0);
        }
        let r = residual(p, h, &trial, &mut f_try);
        if !(r.is_finite() && r < 10.0 * res) {
            sigma_scale *= 4.0;
            continue;
        }
        std::mem::swap(&mut w, &mut trial);
        std::mem::swap(&mut f, &mut f_try);
        res = r;
        if res == 0.0 {
            break;
        }
    }

    let collapsed = p.k == 0.0 && w.iter().all(|&v| v < COLLAPSE_LEVEL * p.beta / p.theta);
    let mut subcritical = false;
    if p.k == 0.0 {
        let continuous = p.principal_rate() <= 0.0;
        let discrete = p.discrete_principal_rate(n) <= 0.0;
        if collapsed != continuous {
            if collapsed != discrete {
                return Err(Error::Solver(format!(
                    "Newton {} but the principal rate is {:e}",
                    if collapsed { "collapsed to zero" } else { "kept a positive profile" },
                    p.principal_rate()
                )));
            }
            log::warn!("l = {} is within the discretisation gap of the existence threshold", p.l);
        }
        subcritical = collapsed;
        if collapsed {
            w.fill(0.0);
            res = residual(p, h, &w, &mut f);
        }
    }
    Ok(SteadyProfile { x, values: w, residual_norm: res, iterations, subcritical })
}
