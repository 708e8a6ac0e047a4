//! Time integration of the coupled free-boundary system.
//!
//! Each step runs fronts first: the Stefan condition `h' = −μ u_x` is
//! evaluated from the current predator profile and both fronts move. The
//! predator is then advanced on the straightened grid with `φ w_yy` implicit
//! and `ψ w_y` plus the reaction explicit, and finally the prey is advanced
//! on the line grid with `D z_xx` implicit and the reaction explicit. Both
//! linear solves are tridiagonal.
//!
//! The base step `dt` is fixed. It is additionally capped while the fronts
//! are fast so that a front never crosses more than half a predator cell per
//! step and the explicit advection stays well inside its stability bound.
//! Both caps are deterministic functions of the state, so identical configs
//! give bit-identical trajectories. A step that breaks an invariant is
//! retried with half the step, up to [`MAX_RETRIES`] times.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    pred_to_line_with, prey_to_straight_with, transform_coefficients, FrontState, LineGrid, StraightGrid,
    UNDERSHOOT_CLAMP, WINDOW_FRACTION,
};
use crate::interp::MonotoneCubic;
use crate::model::{a_priori_bounds, lambda_threshold, ModelParams};
use crate::profile::Profile;
use crate::tolerances::{ClassifyTols, PREY_RELAX_RTOL};
use crate::tridiag::solve_in_place;

pub const MAX_RETRIES: u32 = 8;
/// Fraction of a physical predator cell a front may cross per step.
pub const FRONT_CFL: f64 = 0.5;
/// Cap `dt s² <= ADVECTION_CAP` keeps the explicit advection's
/// anti-diffusion at a quarter of the physical diffusion.
pub const ADVECTION_CAP: f64 = 0.5;
/// Target prey spacing used when `n_x` is left to its default.
pub const DEFAULT_DX: f64 = 0.05;
/// Predator values below this are flushed to zero (keeps subnormals out of
/// the inner loops once the predator is gone).
const FLUSH_TO_ZERO: f64 = 1e-250;

/// Which front a boundary quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

fn default_dt() -> f64 {
    0.01
}
fn default_n_y() -> usize {
    128
}
fn default_t_max() -> f64 {
    50.0
}
fn default_order() -> u8 {
    3
}
fn default_tol_bounds() -> f64 {
    1e-8
}
fn default_snapshot_every() -> f64 {
    1.0
}

/// Numerical controls. Unset optional fields take documented defaults once
/// the model is known; see [`NumericsConfig::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    /// Base time step (default 0.01).
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Interior nodes on the straightened grid (default 128, minimum 32).
    #[serde(default = "default_n_y")]
    pub n_y: usize,
    /// Prey nodes on `[−L, L]` (default: spacing close to 0.05).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_x: Option<usize>,
    /// Prey truncation half-width (default `max(10 h0, 4 Λ, 20)`).
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Final time (default 50).
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    /// One-sided stencil order for the front gradient: 2 or 3 (default 3).
    #[serde(default = "default_order")]
    pub front_stencil_order: u8,
    /// Slack on the a-priori density bounds (default 1e-8).
    #[serde(default = "default_tol_bounds")]
    pub tol_bounds: f64,
    /// Snapshot cadence in time units (default 1).
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: f64,
    /// Compact window for long-time checks (default `[−h0, h0]`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_window: Option<[f64; 2]>,
    /// Stop as soon as the run is classifiable.
    #[serde(default)]
    pub early_stop: bool,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            n_y: default_n_y(),
            n_x: None,
            half_width: None,
            t_max: default_t_max(),
            front_stencil_order: default_order(),
            tol_bounds: default_tol_bounds(),
            snapshot_every: default_snapshot_every(),
            probe_window: None,
            early_stop: false,
        }
    }
}

/// A [`NumericsConfig`] with every default filled in for a given model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedNumerics {
    pub dt: f64,
    pub n_y: usize,
    pub n_x: usize,
    pub half_width: f64,
    pub t_max: f64,
    pub front_stencil_order: u8,
    pub tol_bounds: f64,
    pub snapshot_every: f64,
    pub probe_window: [f64; 2],
    pub early_stop: bool,
}

impl NumericsConfig {
    pub fn resolve(&self, p: &ModelParams) -> Result<ResolvedNumerics> {
        let lambda = lambda_threshold(p);
        let half_width = self.half_width.unwrap_or_else(|| LineGrid::default_half_width(p.h0, lambda));
        let n_x = self.n_x.unwrap_or_else(|| (2.0 * half_width / DEFAULT_DX).ceil() as usize + 1);
        let probe_window = self.probe_window.unwrap_or([-p.h0, p.h0]);
        let r = ResolvedNumerics {
            dt: self.dt,
            n_y: self.n_y,
            n_x,
            half_width,
            t_max: self.t_max,
            front_stencil_order: self.front_stencil_order,
            tol_bounds: self.tol_bounds,
            snapshot_every: self.snapshot_every,
            probe_window,
            early_stop: self.early_stop,
        };
        r.validate(p)?;
        Ok(r)
    }
}

impl ResolvedNumerics {
    fn validate(&self, p: &ModelParams) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} must be positive (got {v})")))
            }
        };
        pos("dt", self.dt)?;
        pos("t_max", self.t_max)?;
        pos("L", self.half_width)?;
        pos("snapshot_every", self.snapshot_every)?;
        if !(self.tol_bounds >= 0.0) {
            return Err(Error::Validation("tol_bounds must be nonnegative".into()));
        }
        if !matches!(self.front_stencil_order, 2 | 3) {
            return Err(Error::Validation(format!(
                "front_stencil_order must be 2 or 3 (got {})",
                self.front_stencil_order
            )));
        }
        if p.h0 >= WINDOW_FRACTION * self.half_width {
            return Err(Error::Validation(format!(
                "L = {} leaves no room for the initial habitat h0 = {}",
                self.half_width, p.h0
            )));
        }
        let [lo, hi] = self.probe_window;
        if !(lo < hi && lo >= -self.half_width && hi <= self.half_width) {
            return Err(Error::Validation(format!("probe window [{lo}, {hi}] is not inside [-L, L]")));
        }
        StraightGrid::new(self.n_y)?;
        LineGrid::new(self.half_width, self.n_x)?;
        Ok(())
    }

    pub fn straight_grid(&self) -> StraightGrid {
        StraightGrid::new(self.n_y).expect("validated")
    }

    pub fn line_grid(&self) -> LineGrid {
        LineGrid::new(self.half_width, self.n_x).expect("validated")
    }

    /// Explicit-diffusion step bound at the initial span, `dy² (2 h0)² / 8`.
    /// Only advisory: diffusion is implicit.
    pub fn soft_cfl_limit(&self, h0: f64) -> f64 {
        let dy = 2.0 / (self.n_y + 1) as f64;
        dy * dy * (2.0 * h0).powi(2) / 8.0
    }
}

/// Predator, prey and fronts at one time level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub t: f64,
    /// Predator on the straightened grid, `w[0] = w[last] = 0`.
    pub w: Vec<f64>,
    /// Prey on the line grid.
    pub z: Vec<f64>,
    pub front: FrontState,
}

/// Physical front gradient `u_x` from a one-sided stencil on `w`.
///
/// Order 2 uses three points, order 3 four; the result is `w_y · 2/(h − g)`.
pub fn boundary_flux(w: &[f64], front: &FrontState, side: Side, order: u8) -> Result<f64> {
    let span = front.span();
    if !(span > 0.0) {
        return Err(Error::Geometry(format!("non-positive span {span}")));
    }
    let n = w.len();
    if n < 4 {
        return Err(Error::Validation("need at least four predator nodes".into()));
    }
    let dy = 2.0 / (n - 1) as f64;
    let w_y = match (side, order) {
        (Side::Left, 2) => (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dy),
        (Side::Left, 3) => (-11.0 * w[0] + 18.0 * w[1] - 9.0 * w[2] + 2.0 * w[3]) / (6.0 * dy),
        (Side::Right, 2) => (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * dy),
        (Side::Right, 3) => (11.0 * w[n - 1] - 18.0 * w[n - 2] + 9.0 * w[n - 3] - 2.0 * w[n - 4]) / (6.0 * dy),
        (_, o) => return Err(Error::Validation(format!("unsupported stencil order {o}"))),
    };
    Ok(w_y * 2.0 / span)
}

/// Front velocities from the Stefan condition, with the no-retreat clamp.
/// Returns `(g_dot, h_dot, clamped_sides)`.
fn stefan_velocities(w: &[f64], front: &FrontState, mu: f64, order: u8) -> Result<(f64, f64, u32)> {
    let mut g_dot = -mu * boundary_flux(w, front, Side::Left, order)?;
    let mut h_dot = -mu * boundary_flux(w, front, Side::Right, order)?;
    let mut clamped = 0;
    if g_dot > 0.0 {
        log::debug!("left front would retreat (g' = {g_dot:e}); clamped to rest");
        g_dot = 0.0;
        clamped += 1;
    }
    if h_dot < 0.0 {
        log::debug!("right front would retreat (h' = {h_dot:e}); clamped to rest");
        h_dot = 0.0;
        clamped += 1;
    }
    Ok((g_dot, h_dot, clamped))
}

/// One recorded time level of the front series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontSample {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    pub g_dot: f64,
    pub h_dot: f64,
    /// `‖u(t)‖∞` over the habitat.
    pub sup_u: f64,
    /// `‖u(t)‖∞` over the probe window.
    pub probe_u: f64,
    /// Prey at the probe-window centre.
    pub probe_v: f64,
    pub probe_v_min: f64,
    pub probe_v_max: f64,
}

/// Predator (straightened) and prey (line) profiles at an output time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub front: FrontState,
    pub w: Vec<f64>,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Integrated to `t_max`.
    Completed,
    /// A front reached `0.9 L` after the span had passed the critical span.
    WindowReached,
    /// Early stop: spreading criteria held over the trailing window.
    StoppedSpreading,
    /// Early stop: predator gone, fronts at rest, prey relaxed.
    StoppedVanishing,
}

/// Run-wide diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub steps: u64,
    pub retries: u64,
    pub clamped_fronts: u64,
    pub min_dt: f64,
    pub bound_u: f64,
    pub bound_v: f64,
    /// Largest `w − bound_u` seen (nonpositive when the bound holds).
    pub max_u_excess: f64,
    /// Largest `z − bound_v` seen.
    pub max_v_excess: f64,
    pub min_v: f64,
    pub soft_cfl_limit: f64,
}

/// Full trajectory record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub params: ModelParams,
    pub numerics: ResolvedNumerics,
    pub lambda: f64,
    pub series: Vec<FrontSample>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: FieldState,
    pub termination: Termination,
    pub diagnostics: Diagnostics,
}

impl SimulationResult {
    pub fn last(&self) -> &FrontSample {
        self.series.last().expect("series always has the initial sample")
    }

    pub fn t_end(&self) -> f64 {
        self.last().t
    }

    /// Front positions at `t`, linearly interpolated in the series.
    pub fn fronts_at(&self, t: f64) -> (f64, f64) {
        let s = &self.series;
        if t <= s[0].t {
            return (s[0].g, s[0].h);
        }
        let k = s.partition_point(|x| x.t < t);
        if k >= s.len() {
            let l = s.last().unwrap();
            return (l.g, l.h);
        }
        let (a, b) = (&s[k - 1], &s[k]);
        let th = if b.t > a.t { (t - a.t) / (b.t - a.t) } else { 1.0 };
        (a.g + th * (b.g - a.g), a.h + th * (b.h - a.h))
    }

    /// Predator density on the line grid at the final time.
    pub fn final_u_on_line(&self) -> Vec<f64> {
        let grid = self.numerics.straight_grid();
        let line = self.numerics.line_grid();
        crate::grid::interp_pred_to_line(&self.final_state.w, &grid, &self.final_state.front, &line)
            .expect("final state is valid")
    }
}

/// Thresholds for the optional early stop.
#[derive(Debug, Clone, Copy)]
struct StopRule {
    tols: ClassifyTols,
    b: f64,
}

/// Reusable stepping machinery for one model and grid pair.
pub struct Stepper {
    params: ModelParams,
    num: ResolvedNumerics,
    grid: StraightGrid,
    line: LineGrid,
    bound_u: f64,
    bound_v: f64,
    probe_lo: usize,
    probe_hi: usize,
    // scratch
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    scratch: Vec<f64>,
    z_on_straight: Vec<f64>,
    u_on_line: Vec<f64>,
}

/// Outcome of one accepted step.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub dt: f64,
    pub retries: u32,
    pub clamped: u32,
}

impl Stepper {
    /// `bound_u`/`bound_v` are the a-priori density bounds the run must keep.
    pub fn new(params: ModelParams, num: ResolvedNumerics, u0_sup: f64, v0_sup: f64) -> Result<Self> {
        params.validate()?;
        num.validate(&params)?;
        let grid = num.straight_grid();
        let line = num.line_grid();
        let (bound_u, bound_v) = a_priori_bounds(&params, u0_sup, v0_sup);
        let [lo, hi] = num.probe_window;
        let probe_lo = line.x.partition_point(|&x| x < lo);
        let probe_hi = line.x.partition_point(|&x| x <= hi);
        let n = grid.len().max(line.n_x);
        Ok(Self {
            params,
            grid,
            line,
            bound_u,
            bound_v,
            probe_lo,
            probe_hi: probe_hi.max(probe_lo + 1),
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            scratch: vec![0.0; n],
            z_on_straight: vec![0.0; num.n_y + 2],
            u_on_line: vec![0.0; num.n_x],
            num,
        })
    }

    pub fn straight_grid(&self) -> &StraightGrid {
        &self.grid
    }

    pub fn line_grid(&self) -> &LineGrid {
        &self.line
    }

    /// Initial field state from the two profiles.
    pub fn initial_state(&self, u0: &Profile, v0: &Profile) -> Result<FieldState> {
        let h0 = self.params.h0;
        let fu = u0.evaluator(h0);
        let fv = v0.evaluator(h0);
        let mut w: Vec<f64> = self.grid.y.iter().map(|&y| fu(h0 * y).max(0.0)).collect();
        let last = w.len() - 1;
        w[0] = 0.0;
        w[last] = 0.0;
        let z: Vec<f64> = self.line.x.iter().map(|&x| fv(x)).collect();
        let mut front = FrontState::at_rest(-h0, h0);
        let (g_dot, h_dot, _) = stefan_velocities(&w, &front, self.params.mu, self.num.front_stencil_order)?;
        front.g_dot = g_dot;
        front.h_dot = h_dot;
        Ok(FieldState { t: 0.0, w, z, front })
    }

    /// Largest step allowed by the front caps for the given velocities.
    fn capped_dt(&self, front: &FrontState, g_dot: f64, h_dot: f64) -> f64 {
        let s = g_dot.abs().max(h_dot.abs());
        let mut dt = self.num.dt;
        if s > 0.0 {
            let dx_phys = 0.5 * front.span() * self.grid.dy;
            dt = dt.min(FRONT_CFL * dx_phys / s).min(ADVECTION_CAP / (s * s));
        }
        dt
    }

    /// Advances by at most `dt_max`, halving on invariant breaches.
    pub fn advance(&mut self, state: &FieldState, dt_max: f64) -> Result<(FieldState, StepReport)> {
        let (g_dot, h_dot, clamped) =
            stefan_velocities(&state.w, &state.front, self.params.mu, self.num.front_stencil_order)?;
        let mut dt = dt_max.min(self.capped_dt(&state.front, g_dot, h_dot));
        let mut last_err = None;
        for retry in 0..=MAX_RETRIES {
            match self.try_step(state, dt, g_dot, h_dot) {
                Ok(next) => return Ok((next, StepReport { dt, retries: retry, clamped })),
                Err(e) => {
                    log::debug!("step at t = {} with dt = {dt:e} rejected: {e}", state.t);
                    last_err = Some(e);
                    dt *= 0.5;
                }
            }
        }
        Err(Error::Solver(format!(
            "step at t = {} failed after {MAX_RETRIES} halvings (last dt = {:e}): {}",
            state.t,
            dt * 2.0,
            last_err.unwrap()
        )))
    }

    fn try_step(&mut self, s: &FieldState, dt: f64, g_dot: f64, h_dot: f64) -> Result<FieldState> {
        let p = self.params;
        let front = FrontState { g: s.front.g + dt * g_dot, h: s.front.h + dt * h_dot, g_dot, h_dot };

        // predator on the straightened grid
        let z_ip = MonotoneCubic::new(-self.line.half_width, self.line.dx, &s.z);
        prey_to_straight_with(&z_ip, &self.line, &front, &self.grid, &mut self.z_on_straight)?;
        let coef = transform_coefficients(&front)?;
        let ny = self.grid.len();
        let dy = self.grid.dy;
        let r = dt * coef.phi / (dy * dy);
        let m = ny - 2;
        let mut w_new = vec![0.0; ny];
        {
            let rhs = &mut w_new[1..ny - 1];
            for (k, out) in rhs.iter_mut().enumerate() {
                let j = k + 1;
                let wj = s.w[j];
                let adv = coef.psi(self.grid.y[j]) * (s.w[j + 1] - s.w[j - 1]) / (2.0 * dy);
                let react = wj * (1.0 - wj + p.a * self.z_on_straight[j]);
                *out = wj + dt * (adv + react);
            }
            self.lower[..m].fill(-r);
            self.upper[..m].fill(-r);
            self.diag[..m].fill(1.0 + 2.0 * r);
            solve_in_place(&self.lower[..m], &self.diag[..m], &self.upper[..m], rhs, &mut self.scratch[..m]);
        }
        for v in w_new.iter_mut() {
            if *v < FLUSH_TO_ZERO {
                if *v < -UNDERSHOOT_CLAMP {
                    return Err(Error::Solver(format!("negative predator density {v:e}")));
                }
                *v = 0.0;
            }
            if *v > self.bound_u + self.num.tol_bounds {
                return Err(Error::Solver(format!("predator density {v} exceeds the a-priori bound {}", self.bound_u)));
            }
        }

        // prey on the line grid
        let w_ip = MonotoneCubic::new(-1.0, dy, &w_new);
        pred_to_line_with(&w_ip, &front, &self.line, &mut self.u_on_line)?;
        let nx = self.line.n_x;
        let rx = dt * p.d / (self.line.dx * self.line.dx);
        let mut z_new: Vec<f64> =
            s.z.iter().zip(&self.u_on_line).map(|(&z, &u)| z + dt * z * (p.b - z - p.c * u)).collect();
        self.lower[..nx].fill(-rx);
        self.upper[..nx].fill(-rx);
        self.diag[..nx].fill(1.0 + 2.0 * rx);
        // zero flux: ghost node mirrors the first interior node
        self.upper[0] = -2.0 * rx;
        self.lower[nx - 1] = -2.0 * rx;
        solve_in_place(&self.lower[..nx], &self.diag[..nx], &self.upper[..nx], &mut z_new, &mut self.scratch[..nx]);
        for v in z_new.iter() {
            if !(*v > 0.0) {
                return Err(Error::Solver(format!("prey density {v:e} is not positive")));
            }
            if *v > self.bound_v + self.num.tol_bounds {
                return Err(Error::Solver(format!("prey density {v} exceeds the a-priori bound {}", self.bound_v)));
            }
        }
        Ok(FieldState { t: s.t + dt, w: w_new, z: z_new, front })
    }

    /// Series sample for a state; uses the predator interpolated to the
    /// line grid, so call right after a step or after [`Self::refresh_line`].
    fn sample(&self, s: &FieldState) -> FrontSample {
        let sup_u = s.w.iter().fold(0.0f64, |m, &v| m.max(v));
        let probe = self.probe_lo..self.probe_hi;
        let probe_u = self.u_on_line[probe.clone()].iter().fold(0.0f64, |m, &v| m.max(v));
        let (vmin, vmax) =
            s.z[probe].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let [lo, hi] = self.num.probe_window;
        let centre = 0.5 * (lo + hi);
        let pos = (centre + self.line.half_width) / self.line.dx;
        let i = (pos.floor() as usize).min(self.line.n_x - 2);
        let th = pos - i as f64;
        let probe_v = (1.0 - th) * s.z[i] + th * s.z[i + 1];
        FrontSample {
            t: s.t,
            g: s.front.g,
            h: s.front.h,
            g_dot: s.front.g_dot,
            h_dot: s.front.h_dot,
            sup_u,
            probe_u,
            probe_v,
            probe_v_min: vmin,
            probe_v_max: vmax,
        }
    }

    fn refresh_line(&mut self, s: &FieldState) -> Result<()> {
        let w_ip = MonotoneCubic::new(-1.0, self.grid.dy, &s.w);
        pred_to_line_with(&w_ip, &s.front, &self.line, &mut self.u_on_line)
    }

    fn bound_excess(&self, s: &FieldState) -> (f64, f64, f64) {
        let wmax = s.w.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let (zmin, zmax) = s.z.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        (wmax - self.bound_u, zmax - self.bound_v, zmin)
    }
}

/// Advances `state` by one step of at most `cfg.dt` (subject to the front
/// caps and halve-and-retry). The a-priori bounds are taken from the
/// current state.
pub fn step(state: &FieldState, p: &ModelParams, cfg: &NumericsConfig) -> Result<FieldState> {
    let num = cfg.resolve(p)?;
    if state.w.len() != num.n_y + 2 || state.z.len() != num.n_x {
        return Err(Error::Validation("state does not match the configured grids".into()));
    }
    let u_sup = state.w.iter().fold(0.0f64, |m, &v| m.max(v));
    let v_sup = state.z.iter().fold(0.0f64, |m, &v| m.max(v));
    let mut stepper = Stepper::new(*p, num, u_sup, v_sup)?;
    stepper.advance(state, cfg.dt).map(|(s, _)| s)
}

/// The zero-flux ends stand in for the whole line, so the initial prey must
/// already be flat on each of `x <= −L/2` and `x >= L/2`.
fn check_prey_far_field(v0: &Profile, num: &ResolvedNumerics) -> Result<()> {
    let line = num.line_grid();
    let f = v0.evaluator(0.0);
    let half = 0.5 * num.half_width;
    for side in [-1.0, 1.0] {
        let (lo, hi) = line
            .x
            .iter()
            .filter(|&&x| side * x >= half)
            .map(|&x| f(x))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if hi - lo > 1e-9 * hi.abs() {
            return Err(Error::Validation(format!(
                "initial prey must be constant on {} (varies over [{lo}, {hi}])",
                if side < 0.0 { format!("x <= -{half}") } else { format!("x >= {half}") }
            )));
        }
    }
    Ok(())
}

/// Integrates from the initial profiles to `t_max`, or until the run is
/// classifiable when `early_stop` is set.
pub fn simulate(p: &ModelParams, u0: &Profile, v0: &Profile, cfg: &NumericsConfig) -> Result<SimulationResult> {
    p.validate()?;
    u0.validate_predator(p.h0)?;
    v0.validate_prey()?;
    let num = cfg.resolve(p)?;
    check_prey_far_field(v0, &num)?;
    let lambda = lambda_threshold(p);
    let soft = num.soft_cfl_limit(p.h0);
    if num.dt > soft {
        log::info!("dt = {} exceeds the explicit-diffusion guide {soft:e}; diffusion is implicit", num.dt);
    }
    let mut stepper = Stepper::new(*p, num.clone(), u0.sup_norm(), v0.sup_norm())?;
    let tols = ClassifyTols::defaults(p, stepper.line.dx, num.t_max);
    let stop = num.early_stop.then_some(StopRule { tols, b: p.b });

    let mut state = stepper.initial_state(u0, v0)?;
    stepper.refresh_line(&state)?;
    let mut series = vec![stepper.sample(&state)];
    let mut snapshots = vec![Snapshot { t: 0.0, front: state.front, w: state.w.clone(), z: state.z.clone() }];
    let (eu, ev, zmin) = stepper.bound_excess(&state);
    let mut diag = Diagnostics {
        steps: 0,
        retries: 0,
        clamped_fronts: 0,
        min_dt: num.dt,
        bound_u: stepper.bound_u,
        bound_v: stepper.bound_v,
        max_u_excess: eu,
        max_v_excess: ev,
        min_v: zmin,
        soft_cfl_limit: soft,
    };
    let mut next_snap = num.snapshot_every;
    let mut floor_since: Option<f64> = None;
    let window = WINDOW_FRACTION * num.half_width;
    let time_eps = 1e-12 * num.t_max.max(1.0);
    let mut termination = Termination::Completed;

    while state.t < num.t_max - time_eps {
        let target = next_snap.min(num.t_max);
        let (mut next, rep) = stepper.advance(&state, (target - state.t).min(num.dt))?;
        if (next.t - target).abs() <= time_eps {
            next.t = target;
        }
        state = next;
        diag.steps += 1;
        diag.retries += u64::from(rep.retries);
        diag.clamped_fronts += u64::from(rep.clamped);
        diag.min_dt = diag.min_dt.min(rep.dt);
        let (eu, ev, zmin) = stepper.bound_excess(&state);
        diag.max_u_excess = diag.max_u_excess.max(eu);
        diag.max_v_excess = diag.max_v_excess.max(ev);
        diag.min_v = diag.min_v.min(zmin);
        let sample = stepper.sample(&state);
        series.push(sample);
        if state.t >= next_snap - time_eps {
            snapshots.push(Snapshot { t: state.t, front: state.front, w: state.w.clone(), z: state.z.clone() });
            while next_snap <= state.t + time_eps {
                next_snap += num.snapshot_every;
            }
        }

        if -state.front.g >= window || state.front.h >= window {
            if state.front.span() > tols.span_limit() {
                termination = Termination::WindowReached;
                break;
            }
            return Err(Error::Geometry(format!(
                "front reached 0.9 L = {window} at t = {} before the span passed Λ; enlarge L",
                state.t
            )));
        }
        if let Some(rule) = stop {
            let spreading = sample.h - sample.g > rule.tols.span_limit() && sample.probe_u >= rule.tols.u_floor;
            floor_since = if spreading { floor_since.or(Some(state.t)) } else { None };
            if floor_since.is_some_and(|t0| state.t - t0 >= rule.tols.trailing) {
                termination = Termination::StoppedSpreading;
                break;
            }
            let vanished = sample.h - sample.g <= rule.tols.span_limit()
                && sample.sup_u < rule.tols.u_tol
                && sample.g_dot.abs() + sample.h_dot.abs() < rule.tols.v_tol
                && (sample.probe_v_min - rule.b).abs() <= PREY_RELAX_RTOL * rule.b
                && (sample.probe_v_max - rule.b).abs() <= PREY_RELAX_RTOL * rule.b;
            if vanished {
                termination = Termination::StoppedVanishing;
                break;
            }
        }
    }
    if snapshots.last().map(|s| s.t) != Some(state.t) {
        snapshots.push(Snapshot { t: state.t, front: state.front, w: state.w.clone(), z: state.z.clone() });
    }
    Ok(SimulationResult {
        params: *p,
        numerics: num,
        lambda,
        series,
        snapshots,
        final_state: state,
        termination,
        diagnostics: diag,
    })
}
