//! Model parameters, closed-form thresholds and long-time limits.
//!
//! Nothing in here touches a grid: every function is a pure map from the six
//! model constants (and, for the large-μ bound, a sampled initial profile) to
//! numbers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::SampledProfile;
use crate::quad::simpson_uniform;

/// The six positive constants of the predator-prey free-boundary system.
///
/// `a` is the predation benefit, `b` the prey growth rate, `c` the predation
/// loss, `d` the prey diffusivity, `mu` the front expansion coefficient and
/// `h0` the initial half-span of the predator habitat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub mu: f64,
    pub h0: f64,
}

/// Hunting regime, a pure function of `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `b > c` and `a c < 1`: both species persist at positive constants.
    Weak,
    /// `b <= c`: the prey is driven to zero when the predator spreads.
    Strong,
    /// `b > c` but `a c >= 1`: no limit is known here.
    Uncovered,
}

impl ModelParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64, mu: f64, h0: f64) -> Result<Self> {
        let p = Self { a, b, c, d, mu, h0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("D", self.d), ("mu", self.mu), ("h0", self.h0)]
        {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!("{name} must be positive (got {v})")));
            }
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        if self.b <= self.c {
            Regime::Strong
        } else if self.a * self.c < 1.0 {
            Regime::Weak
        } else {
            Regime::Uncovered
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_h0(mut self, h0: f64) -> Self {
        self.h0 = h0;
        self
    }
}

/// Critical habitat span `Λ = π / sqrt(1 + a b)`.
///
/// A habitat that ever becomes wider than this cannot vanish.
pub fn lambda_threshold(p: &ModelParams) -> f64 {
    PI * (1.0 / (1.0 + p.a * p.b)).sqrt()
}

/// Large-μ sufficient bound μ⁰ for spreading when `2 h0 < Λ`.
///
/// `μ⁰ = max{1, ‖u0‖∞} (π² − 4 h0²) / (2 ∫ (x + h0) u0(x) dx)` with the
/// integral taken by composite Simpson on the samples of `u0`, which must be
/// uniform on `[−h0, h0]`.
pub fn mu_upper_bound(p: &ModelParams, u0: &SampledProfile) -> Result<f64> {
    p.validate()?;
    let lambda = lambda_threshold(p);
    if 2.0 * p.h0 >= lambda {
        return Err(Error::Domain(format!(
            "2 h0 = {} >= Λ = {lambda}: spreading is already guaranteed, μ⁰ is not defined",
            2.0 * p.h0
        )));
    }
    u0.check_predator_support(p.h0)?;
    let h = u0.uniform_spacing()?;
    let weighted: Vec<f64> = u0.x.iter().zip(&u0.values).map(|(x, u)| (x + p.h0) * u).collect();
    let integral = simpson_uniform(&weighted, h);
    if !(integral > 0.0) {
        return Err(Error::Validation(format!("degenerate initial predator profile: ∫(x+h0) u0 dx = {integral}")));
    }
    let sup = u0.sup_norm();
    Ok(sup.max(1.0) * (PI * PI - 4.0 * p.h0 * p.h0) / (2.0 * integral))
}

/// The four bracketing sequences of the long-time limit argument.
///
/// Entry `i` holds round `i + 1`; `under_u` has one more entry than the
/// others because the recursion is seeded with `under_u[0] = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitIterates {
    pub under_u: Vec<f64>,
    pub over_u: Vec<f64>,
    pub under_v: Vec<f64>,
    pub over_v: Vec<f64>,
}

impl LimitIterates {
    pub fn rounds(&self) -> usize {
        self.over_v.len()
    }

    /// `over_v[i] - under_v[i]` for the last completed round.
    pub fn final_v_gap(&self) -> f64 {
        let n = self.rounds();
        self.over_v[n - 1] - self.under_v[n - 1]
    }
}

/// Default iteration budget for [`limit_iteration_converged`].
pub const LIMIT_ROUNDS_DEFAULT: usize = 200;
/// Early-exit gap for [`limit_iteration_converged`].
pub const LIMIT_GAP_EXIT: f64 = 1e-14;

/// Runs exactly `n_rounds` rounds of the bracketing recursion
///
/// ```text
/// v̄ᵢ = b − c u̲ᵢ,  ūᵢ = 1 + a v̄ᵢ,  v̲ᵢ = b − c ūᵢ,  u̲ᵢ₊₁ = 1 + a v̲ᵢ
/// ```
///
/// seeded with `u̲₁ = 1`. Only defined in the weak-hunting regime.
pub fn limit_iteration(p: &ModelParams, n_rounds: usize) -> Result<LimitIterates> {
    iterate(p, n_rounds, None)
}

/// Runs up to [`LIMIT_ROUNDS_DEFAULT`] rounds, stopping once the v-gap drops
/// below [`LIMIT_GAP_EXIT`].
pub fn limit_iteration_converged(p: &ModelParams) -> Result<LimitIterates> {
    iterate(p, LIMIT_ROUNDS_DEFAULT, Some(LIMIT_GAP_EXIT))
}

fn iterate(p: &ModelParams, n_rounds: usize, gap_exit: Option<f64>) -> Result<LimitIterates> {
    p.validate()?;
    if p.regime() != Regime::Weak {
        return Err(Error::Domain(format!(
            "limit iteration needs weak hunting (b > c, a c < 1); got b={}, c={}, ac={}",
            p.b,
            p.c,
            p.a * p.c
        )));
    }
    if n_rounds == 0 {
        return Err(Error::Validation("n_rounds must be at least 1".into()));
    }
    let mut it = LimitIterates {
        under_u: vec![1.0],
        over_u: Vec::with_capacity(n_rounds),
        under_v: Vec::with_capacity(n_rounds),
        over_v: Vec::with_capacity(n_rounds),
    };
    for _ in 0..n_rounds {
        let uu = *it.under_u.last().unwrap();
        let ov = p.b - p.c * uu;
        let ou = 1.0 + p.a * ov;
        let uv = p.b - p.c * ou;
        it.over_v.push(ov);
        it.over_u.push(ou);
        it.under_v.push(uv);
        it.under_u.push(1.0 + p.a * uv);
        if gap_exit.is_some_and(|g| (ov - uv).abs() < g) {
            break;
        }
    }
    Ok(it)
}

/// Long-time limits `(u*, v*)` on compacts when the predator spreads.
pub fn spreading_limits(p: &ModelParams) -> Result<(f64, f64)> {
    p.validate()?;
    match p.regime() {
        Regime::Weak => {
            let den = 1.0 + p.a * p.c;
            Ok(((1.0 + p.a * p.b) / den, (p.b - p.c) / den))
        }
        Regime::Strong => Ok((1.0, 0.0)),
        Regime::Uncovered => Err(Error::Domain(format!(
            "b > c with a c = {} >= 1: the long-time limit is not established for this regime",
            p.a * p.c
        ))),
    }
}

/// A-priori bounds `(M_u, M_v)` on predator and prey densities.
///
/// `M_v = max{‖v0‖∞, b}` and `M_u = max{‖u0‖∞, 1 + a M_v}`.
pub fn a_priori_bounds(p: &ModelParams, u0_sup: f64, v0_sup: f64) -> (f64, f64) {
    let m_v = v0_sup.max(p.b);
    let m_u = u0_sup.max(1.0 + p.a * m_v);
    (m_u, m_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;

    fn params(a: f64, b: f64, c: f64) -> ModelParams {
        ModelParams::new(a, b, c, 1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn lambda_examples() {
        assert!((lambda_threshold(&params(1.0, 3.0, 0.5)) - PI / 2.0).abs() < 1e-15);
        let l = lambda_threshold(&params(1.0, 0.5, 0.1));
        assert!((l - PI * (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((l - 2.565099).abs() < 1e-6);
    }

    #[test]
    fn zero_a_rejected() {
        let err = ModelParams::new(0.0, 3.0, 0.5, 1.0, 1.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        let err = ModelParams::new(1.0, 3.0, -1.0, 1.0, 1.0, 0.5).unwrap_err();
        assert_eq!(err, Error::Validation("c must be positive (got -1)".into()));
    }

    #[test]
    fn regimes() {
        assert_eq!(params(1.0, 2.0, 0.5).regime(), Regime::Weak);
        assert_eq!(params(1.0, 1.0, 2.0).regime(), Regime::Strong);
        assert_eq!(params(1.0, 2.0, 2.0).regime(), Regime::Strong);
        assert_eq!(params(2.0, 2.0, 1.0).regime(), Regime::Uncovered);
    }

    #[test]
    fn iteration_first_round() {
        let it = limit_iteration(&params(1.0, 2.0, 0.5), 1).unwrap();
        assert_eq!(it.under_u, vec![1.0, 1.75]);
        assert_eq!(it.over_v, vec![1.5]);
        assert_eq!(it.over_u, vec![2.5]);
        assert_eq!(it.under_v, vec![0.75]);
    }

    #[test]
    fn iteration_gap_bound_after_fifty_rounds() {
        // closed form: over_v[i] - under_v[i] = (b - c) q^(2i-1)
        for &(a, b, c) in &[(1.0, 2.0, 0.5), (0.95, 2.0, 1.0), (0.3, 5.0, 1.2)] {
            let p = params(a, b, c);
            let it = limit_iteration(&p, 50).unwrap();
            let q: f64 = a * c;
            let bound = (b - c) * q.powi(99);
            let gap = (it.over_v[49] - it.under_v[49]).abs();
            // subtraction of O(1) numbers cannot resolve gaps below a few ulps
            assert!(gap <= bound + 4.0 * f64::EPSILON * b, "gap {gap} bound {bound}");
        }
    }

    #[test]
    fn iteration_rejects_wrong_regime() {
        assert!(matches!(limit_iteration(&params(1.0, 1.0, 2.0), 5), Err(Error::Domain(_))));
        assert!(matches!(limit_iteration(&params(1.0, 2.0, 0.5), 0), Err(Error::Validation(_))));
    }

    #[test]
    fn converged_iteration_exits_early() {
        let it = limit_iteration_converged(&params(1.0, 2.0, 0.5)).unwrap();
        assert!(it.rounds() < LIMIT_ROUNDS_DEFAULT);
        assert!(it.final_v_gap().abs() < LIMIT_GAP_EXIT);
    }

    #[test]
    fn limits_examples() {
        assert_eq!(spreading_limits(&params(1.0, 2.0, 0.5)).unwrap(), (2.0, 1.0));
        assert_eq!(spreading_limits(&params(1.0, 1.0, 2.0)).unwrap(), (1.0, 0.0));
        assert!(matches!(spreading_limits(&params(2.0, 2.0, 1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn mu_upper_bound_cosine() {
        // ∫_{-1/2}^{1/2} (x + 1/2) cos(πx) dx = 1/π, so μ⁰ = (π² − 1) π / 2
        let p = ModelParams::new(1.0, 0.5, 0.1, 1.0, 1.0, 0.5).unwrap();
        let u0 = Profile::Cosine { amplitude: 1.0 }.sample(p.h0, 2001).unwrap();
        let mu = mu_upper_bound(&p, &u0).unwrap();
        assert!((mu - (PI * PI - 1.0) * PI / 2.0).abs() < 1e-9, "{mu}");
    }

    #[test]
    fn mu_upper_bound_errors() {
        let p = ModelParams::new(1.0, 0.5, 0.1, 1.0, 1.0, 0.5).unwrap();
        let zero = SampledProfile::uniform(-0.5, 0.5, vec![0.0; 101]).unwrap();
        assert!(matches!(mu_upper_bound(&p, &zero), Err(Error::Validation(_))));
        let wide = p.with_h0(1.5);
        let u0 = Profile::Cosine { amplitude: 1.0 }.sample(1.5, 101).unwrap();
        assert!(matches!(mu_upper_bound(&wide, &u0), Err(Error::Domain(_))));
    }

    #[test]
    fn mu_upper_bound_scale_invariant_above_unit_sup() {
        let p = ModelParams::new(1.0, 0.5, 0.1, 1.0, 1.0, 0.5).unwrap();
        let u0 = Profile::Quartic { amplitude: 1.5 }.sample(p.h0, 801).unwrap();
        let base = mu_upper_bound(&p, &u0).unwrap();
        let doubled = u0.scaled(2.0);
        let twice = mu_upper_bound(&p, &doubled).unwrap();
        assert!(((twice - base) / base).abs() < 1e-13);
    }

    #[test]
    fn bounds_use_the_proof_values() {
        let p = params(1.0, 2.0, 0.5);
        assert_eq!(a_priori_bounds(&p, 0.5, 1.0), (3.0, 2.0));
        assert_eq!(a_priori_bounds(&p, 7.0, 4.0), (7.0, 4.0));
    }
}
