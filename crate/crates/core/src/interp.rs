//! Shape-preserving cubic Hermite interpolation on uniform grids.
//!
//! Node slopes come from fourth-order centred differences, so smooth data are
//! reproduced to O(h⁴). Two limiters then act on the slopes:
//!
//! * where the data are locally monotone the slope is clipped to the Hyman
//!   bound `3 min(|Δ₋|, |Δ₊|)` with the sign of the data;
//! * on every interval whose endpoint values are both nonnegative the slopes
//!   are clipped to `s_left >= -3 f_left / h`, `s_right <= 3 f_right / h`,
//!   which is sufficient for the cubic to stay nonnegative on that interval.
//!
//! On smooth monotone data neither limiter binds once the grid is fine, so the
//! fourth-order accuracy survives.

/// Interpolant over uniformly spaced samples starting at `x0`.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x0: f64,
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant. Needs at least two samples and `h > 0`.
    pub fn new(x0: f64, h: f64, values: &[f64]) -> Self {
        assert!(values.len() >= 2, "need at least two samples");
        assert!(h > 0.0);
        let slopes = limited_slopes(values, h);
        Self { x0, h, values: values.to_vec(), slopes }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.values.len() - 1) as f64
    }

    /// Evaluates at `x`; points outside the sample range take the nearest
    /// end value.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let s = (x - self.x0) / self.h;
        if s <= 0.0 {
            return self.values[0];
        }
        if s >= (n - 1) as f64 {
            return self.values[n - 1];
        }
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.h * self.slopes[i], self.h * self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        // f0 h00 + f1 h01 written so that constants come back exactly
        f0 + h01 * (f1 - f0) + h10 * d0 + h11 * d1
    }
}

fn raw_slope(f: &[f64], i: usize, h: f64) -> f64 {
    let n = f.len();
    if n == 2 {
        return (f[1] - f[0]) / h;
    }
    if i >= 2 && i + 2 < n {
        (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h)
    } else if i >= 1 && i + 1 < n {
        (f[i + 1] - f[i - 1]) / (2.0 * h)
    } else if i == 0 {
        (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    } else {
        (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
    }
}

fn limited_slopes(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut s: Vec<f64> = (0..n).map(|i| raw_slope(f, i, h)).collect();
    for i in 0..n {
        let left = (i > 0).then(|| (f[i] - f[i - 1]) / h);
        let right = (i + 1 < n).then(|| (f[i + 1] - f[i]) / h);
        if let (Some(dl), Some(dr)) = (left, right) {
            if dl * dr > 0.0 {
                let bound = 3.0 * dl.abs().min(dr.abs());
                let sign = dl.signum();
                s[i] = sign * (sign * s[i]).clamp(0.0, bound);
            } else if dl == 0.0 && dr == 0.0 {
                s[i] = 0.0;
            }
        } else {
            // end nodes: never point against the adjacent secant
            let d = left.or(right).unwrap();
            if s[i] * d < 0.0 {
                s[i] = 0.0;
            } else if s[i].abs() > 3.0 * d.abs() {
                s[i] = 3.0 * d;
            }
        }
        if f[i] >= 0.0 {
            let cap = 3.0 * f[i] / h;
            if i + 1 < n && f[i + 1] >= 0.0 && s[i] < -cap {
                s[i] = -cap;
            }
            if i > 0 && f[i - 1] >= 0.0 && s[i] > cap {
                s[i] = cap;
            }
        }
    }
    s
}
