//! Discretisation geometry.
//!
//! The predator lives on the moving interval `[g(t), h(t)]`, which the affine
//! map `x = ((h − g) y + h + g) / 2` straightens onto `y ∈ [−1, 1]`. Under
//! that map the predator equation becomes
//!
//! ```text
//! w_t = φ(t) w_yy + ψ(t, y) w_y + w (1 − w + a z)
//! φ = 4 / (h − g)²,   ψ = ((h' − g') y + h' + g') / (h − g)
//! ```
//!
//! The prey lives on the truncated line `[−L, L]` with zero-flux ends. The
//! two interpolations below couple the species across the grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;

/// Minimum interior node count on the straightened grid.
pub const MIN_STRAIGHT_INTERIOR: usize = 32;
/// Largest negative interpolation undershoot that is silently clamped.
pub const UNDERSHOOT_CLAMP: f64 = 1e-12;
/// Fraction of `L` the fronts may reach before the run is stopped.
pub const WINDOW_FRACTION: f64 = 0.9;

/// Uniform grid on `[−1, 1]` with `n_y` interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StraightGrid {
    pub n_y: usize,
    pub y: Vec<f64>,
    pub dy: f64,
}

impl StraightGrid {
    pub fn new(n_y: usize) -> Result<Self> {
        if n_y < MIN_STRAIGHT_INTERIOR {
            return Err(Error::Validation(format!("n_y must be at least {MIN_STRAIGHT_INTERIOR} (got {n_y})")));
        }
        let dy = 2.0 / (n_y + 1) as f64;
        let mut y: Vec<f64> = (0..n_y + 2).map(|j| -1.0 + dy * j as f64).collect();
        y[n_y + 1] = 1.0;
        Ok(Self { n_y, y, dy })
    }

    /// Total node count, boundaries included.
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Uniform grid on `[−L, L]` with `n_x` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGrid {
    pub half_width: f64,
    pub n_x: usize,
    pub x: Vec<f64>,
    pub dx: f64,
}

impl LineGrid {
    pub fn new(half_width: f64, n_x: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Validation(format!("L must be positive (got {half_width})")));
        }
        if n_x < 5 {
            return Err(Error::Validation(format!("n_x must be at least 5 (got {n_x})")));
        }
        let dx = 2.0 * half_width / (n_x - 1) as f64;
        let mut x: Vec<f64> = (0..n_x).map(|i| -half_width + dx * i as f64).collect();
        x[n_x - 1] = half_width;
        Ok(Self { half_width, n_x, x, dx })
    }

    /// Default truncation half-width `max(10 h0, 4 Λ, 20)`.
    pub fn default_half_width(h0: f64, lambda: f64) -> f64 {
        (10.0 * h0).max(4.0 * lambda).max(20.0)
    }
}

/// Front positions and velocities at one time level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontState {
    pub g: f64,
    pub h: f64,
    pub g_dot: f64,
    pub h_dot: f64,
}

impl FrontState {
    pub fn at_rest(g: f64, h: f64) -> Self {
        Self { g, h, g_dot: 0.0, h_dot: 0.0 }
    }

    pub fn span(&self) -> f64 {
        self.h - self.g
    }

    fn check(&self) -> Result<()> {
        if !(self.h - self.g > 0.0) {
            return Err(Error::Geometry(format!("degenerate habitat: g = {} is not left of h = {}", self.g, self.h)));
        }
        Ok(())
    }
}

/// The coefficients `φ` and `ψ(y) = slope · y + offset` of the
/// straightened predator equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformCoefficients {
    pub phi: f64,
    pub psi_slope: f64,
    pub psi_offset: f64,
}

impl TransformCoefficients {
    pub fn psi(&self, y: f64) -> f64 {
        self.psi_slope * y + self.psi_offset
    }

    pub fn psi_on(&self, grid: &StraightGrid) -> Vec<f64> {
        grid.y.iter().map(|&y| self.psi(y)).collect()
    }
}

pub fn transform_coefficients(front: &FrontState) -> Result<TransformCoefficients> {
    front.check()?;
    let span = front.span();
    Ok(TransformCoefficients {
        phi: 4.0 / (span * span),
        psi_slope: (front.h_dot - front.g_dot) / span,
        psi_offset: (front.h_dot + front.g_dot) / span,
    })
}

/// Straightened coordinate to physical position.
pub fn y_to_x(front: &FrontState, y: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&y) {
        return Err(Error::Range(format!("y = {y} lies outside [-1, 1]")));
    }
    front.check()?;
    Ok(map_y(front, y))
}

/// Physical position to straightened coordinate.
pub fn x_to_y(front: &FrontState, x: f64) -> Result<f64> {
    front.check()?;
    Ok((2.0 * x - (front.h + front.g)) / front.span())
}

#[inline]
fn map_y(front: &FrontState, y: f64) -> f64 {
    if y == -1.0 {
        front.g
    } else if y == 1.0 {
        front.h
    } else {
        0.5 * (front.span() * y + front.h + front.g)
    }
}

/// Prey values at the physical images of the straightened nodes.
pub fn interp_prey_to_straight(
    z_line: &[f64],
    line: &LineGrid,
    front: &FrontState,
    grid: &StraightGrid,
) -> Result<Vec<f64>> {
    let ip = MonotoneCubic::new(-line.half_width, line.dx, z_line);
    let mut out = vec![0.0; grid.len()];
    prey_to_straight_with(&ip, line, front, grid, &mut out)?;
    Ok(out)
}

pub(crate) fn prey_to_straight_with(
    ip: &MonotoneCubic,
    line: &LineGrid,
    front: &FrontState,
    grid: &StraightGrid,
    out: &mut [f64],
) -> Result<()> {
    front.check()?;
    if front.g < -line.half_width || front.h > line.half_width {
        return Err(Error::Geometry(format!(
            "habitat [{}, {}] leaves the prey window [-{L}, {L}]; enlarge L",
            front.g,
            front.h,
            L = line.half_width
        )));
    }
    for (o, &y) in out.iter_mut().zip(&grid.y) {
        *o = ip.eval(map_y(front, y));
    }
    clamp_undershoot(out, "prey")
}

/// Predator values on the line grid: interpolated inside `(g, h)`, exactly
/// zero elsewhere.
pub fn interp_pred_to_line(w: &[f64], grid: &StraightGrid, front: &FrontState, line: &LineGrid) -> Result<Vec<f64>> {
    let ip = MonotoneCubic::new(-1.0, grid.dy, w);
    let mut out = vec![0.0; line.n_x];
    pred_to_line_with(&ip, front, line, &mut out)?;
    Ok(out)
}

pub(crate) fn pred_to_line_with(
    ip: &MonotoneCubic,
    front: &FrontState,
    line: &LineGrid,
    out: &mut [f64],
) -> Result<()> {
    front.check()?;
    let span = front.span();
    let mid = front.h + front.g;
    for (o, &x) in out.iter_mut().zip(&line.x) {
        *o = if x > front.g && x < front.h { ip.eval((2.0 * x - mid) / span) } else { 0.0 };
    }
    clamp_undershoot(out, "predator")
}

fn clamp_undershoot(v: &mut [f64], what: &str) -> Result<()> {
    for x in v.iter_mut() {
        if *x < 0.0 {
            if *x < -UNDERSHOOT_CLAMP {
                return Err(Error::Solver(format!("{what} interpolation undershoot {x}")));
            }
            *x = 0.0;
        }
    }
    Ok(())
}
