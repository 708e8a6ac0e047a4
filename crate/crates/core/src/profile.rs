//! Initial profiles: the shipped analytic families and user samples.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;

/// Uniformly spaced samples of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledProfile {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

const SPACING_RTOL: f64 = 1e-9;
/// Tolerance on the predator's endpoint zeros.
pub const ENDPOINT_ZERO_TOL: f64 = 1e-12;

impl SampledProfile {
    pub fn new(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if x.len() != values.len() {
            return Err(Error::Validation(format!("profile has {} abscissae but {} values", x.len(), values.len())));
        }
        if x.len() < 3 {
            return Err(Error::Validation("profile needs at least 3 samples".into()));
        }
        if values.iter().chain(&x).any(|v| !v.is_finite()) {
            return Err(Error::Validation("profile contains non-finite samples".into()));
        }
        let p = Self { x, values };
        p.uniform_spacing()?;
        Ok(p)
    }

    /// Samples at `n` uniform nodes of `[a, b]`, endpoints included.
    pub fn uniform(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::Validation("profile needs at least 2 samples".into()));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut x: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        x[n - 1] = b;
        Self::new(x, values)
    }

    /// Common spacing of the abscissae; errors if they are not uniform.
    pub fn uniform_spacing(&self) -> Result<f64> {
        let n = self.x.len();
        let h = (self.x[n - 1] - self.x[0]) / (n - 1) as f64;
        if !(h > 0.0) {
            return Err(Error::Validation("profile abscissae must increase".into()));
        }
        for w in self.x.windows(2) {
            if ((w[1] - w[0]) - h).abs() > SPACING_RTOL * h.max(1.0) * 1e3 {
                return Err(Error::Validation("profile samples must be uniformly spaced".into()));
            }
        }
        Ok(h)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { x: self.x.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn interpolant(&self) -> MonotoneCubic {
        let h = (self.x[self.x.len() - 1] - self.x[0]) / (self.x.len() - 1) as f64;
        MonotoneCubic::new(self.x[0], h, &self.values)
    }

    /// Checks the predator requirements: support exactly `[−h0, h0]`,
    /// nonnegative, zero at both ends, positive somewhere inside.
    pub fn check_predator_support(&self, h0: f64) -> Result<()> {
        let n = self.x.len();
        let tol = 1e-9 * h0.max(1.0);
        if (self.x[0] + h0).abs() > tol || (self.x[n - 1] - h0).abs() > tol {
            return Err(Error::Validation(format!(
                "predator samples must span [-h0, h0] = [{}, {h0}], got [{}, {}]",
                -h0,
                self.x[0],
                self.x[n - 1]
            )));
        }
        if self.values.iter().any(|&v| v < 0.0) {
            return Err(Error::Validation("initial predator density must be nonnegative".into()));
        }
        if self.values[0].abs() > ENDPOINT_ZERO_TOL || self.values[n - 1].abs() > ENDPOINT_ZERO_TOL {
            return Err(Error::Validation(format!(
                "initial predator density must vanish at ±h0 (got {}, {})",
                self.values[0],
                self.values[n - 1]
            )));
        }
        Ok(())
    }
}

/// An initial profile, either from a named family or from samples.
///
/// Predator families live on `[−h0, h0]` and vanish outside; the prey
/// family is a constant. Sampled prey profiles extend as constants beyond
/// their sample range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `A cos(π x / (2 h0))`
    Cosine {
        amplitude: f64,
    },
    /// `A (1 − (x/h0)²)²`
    Quartic {
        amplitude: f64,
    },
    /// `v ≡ value`
    Constant {
        value: f64,
    },
    Samples {
        x: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Profile {
    pub fn from_samples(s: SampledProfile) -> Self {
        Profile::Samples { x: s.x, values: s.values }
    }

    /// Evaluates the profile at `x` for a habitat of half-span `h0`.
    pub fn eval(&self, x: f64, h0: f64) -> f64 {
        match self {
            Profile::Cosine { amplitude } => {
                if x.abs() >= h0 {
                    0.0
                } else {
                    amplitude * (PI * x / (2.0 * h0)).cos()
                }
            }
            Profile::Quartic { amplitude } => {
                if x.abs() >= h0 {
                    0.0
                } else {
                    let r = x / h0;
                    amplitude * (1.0 - r * r).powi(2)
                }
            }
            Profile::Constant { value } => *value,
            Profile::Samples { x: xs, values } => {
                // validated elsewhere; rebuild is cheap relative to a run
                let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
                MonotoneCubic::new(xs[0], h, values).eval(x)
            }
        }
    }

    /// A reusable evaluator that avoids rebuilding sample interpolants.
    pub fn evaluator(&self, h0: f64) -> Box<dyn Fn(f64) -> f64 + Send + Sync> {
        match self {
            Profile::Samples { x, values } => {
                let h = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
                let ip = MonotoneCubic::new(x[0], h, values);
                Box::new(move |t| ip.eval(t))
            }
            other => {
                let p = other.clone();
                Box::new(move |t| p.eval(t, h0))
            }
        }
    }

    /// Samples the predator profile on `n` uniform nodes of `[−h0, h0]`.
    pub fn sample(&self, h0: f64, n: usize) -> Result<SampledProfile> {
        match self {
            Profile::Samples { x, values } => SampledProfile::new(x.clone(), values.clone()),
            _ => {
                let f = self.evaluator(h0);
                let h = 2.0 * h0 / (n - 1) as f64;
                let mut v: Vec<f64> = (0..n).map(|i| f(-h0 + h * i as f64)).collect();
                if matches!(self, Profile::Cosine { .. } | Profile::Quartic { .. }) {
                    v[0] = 0.0;
                    v[n - 1] = 0.0;
                }
                SampledProfile::uniform(-h0, h0, v)
            }
        }
    }

    /// Sup norm. Analytic families are exact; samples use their maximum.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Profile::Cosine { amplitude } | Profile::Quartic { amplitude } => amplitude.abs(),
            Profile::Constant { value } => value.abs(),
            Profile::Samples { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Validates this as the initial predator on `[−h0, h0]`.
    pub fn validate_predator(&self, h0: f64) -> Result<()> {
        match self {
            Profile::Cosine { amplitude } | Profile::Quartic { amplitude } => {
                if !(amplitude.is_finite() && *amplitude > 0.0) {
                    return Err(Error::Validation(format!("predator amplitude must be positive (got {amplitude})")));
                }
                Ok(())
            }
            Profile::Constant { .. } => {
                Err(Error::Validation("a constant predator profile cannot vanish at ±h0".into()))
            }
            Profile::Samples { x, values } => {
                let s = SampledProfile::new(x.clone(), values.clone())?;
                s.check_predator_support(h0)?;
                if !s.values.iter().any(|&v| v > 0.0) {
                    return Err(Error::Validation("initial predator density is identically zero".into()));
                }
                Ok(())
            }
        }
    }

    /// Validates this as the initial prey: positive and bounded.
    pub fn validate_prey(&self) -> Result<()> {
        match self {
            Profile::Constant { value } => {
                if !(value.is_finite() && *value > 0.0) {
                    return Err(Error::Validation(format!("prey density must be positive (got {value})")));
                }
                Ok(())
            }
            Profile::Samples { x, values } => {
                SampledProfile::new(x.clone(), values.clone())?;
                if values.iter().any(|&v| !(v > 0.0)) {
                    return Err(Error::Validation("initial prey density must be positive".into()));
                }
                Ok(())
            }
            _ => Err(Error::Validation("prey profile must be constant or sampled".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_vanish_at_endpoints() {
        for p in [Profile::Cosine { amplitude: 2.0 }, Profile::Quartic { amplitude: 2.0 }] {
            let s = p.sample(0.7, 101).unwrap();
            s.check_predator_support(0.7).unwrap();
            assert_eq!(s.sup_norm(), 2.0);
            assert_eq!(p.eval(0.0, 0.7), 2.0);
            assert_eq!(p.eval(0.9, 0.7), 0.0);
        }
    }

    #[test]
    fn rejects_bad_predator_samples() {
        let s = SampledProfile::uniform(-1.0, 1.0, vec![0.1, 1.0, 0.0]).unwrap();
        assert!(s.check_predator_support(1.0).is_err());
        let s = SampledProfile::uniform(-1.0, 1.0, vec![0.0, 1.0, 0.0]).unwrap();
        assert!(s.check_predator_support(2.0).is_err());
        assert!(SampledProfile::new(vec![0.0, 0.1, 0.5], vec![1.0; 3]).is_err());
        assert!(Profile::Constant { value: 1.0 }.validate_predator(1.0).is_err());
        assert!(Profile::Constant { value: -1.0 }.validate_prey().is_err());
    }

    #[test]
    fn sampled_profile_extends_as_constant() {
        let p = Profile::Samples { x: vec![-1.0, 0.0, 1.0], values: vec![2.0, 3.0, 4.0] };
        assert_eq!(p.eval(5.0, 1.0), 4.0);
        assert_eq!(p.eval(-5.0, 1.0), 2.0);
        let f = p.evaluator(1.0);
        assert!((f(0.5) - 3.5).abs() < 1e-14);
    }
}
