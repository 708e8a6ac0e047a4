//! Mode drivers. Each writes its artifacts under the output directory and
//! returns the summary document plus a short report for stdout.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use predfront_core::analysis::{
    build_supersolution, check_domination, classify, estimate_mu_star, verify_limits, DominationReport, LimitReport,
    MuBracket, Supersolution, Verdict, VerdictKind,
};
use predfront_core::{
    a_priori_bounds, existence_threshold, lambda_threshold, limit_iteration, mu_upper_bound, simulate, solve_bvp,
    spreading_limits, ClassifyTols, Diagnostics, Error, LogisticBvp, ModelParams, NumericsConfig, Profile, Regime,
    ResolvedNumerics, SimulationResult, Termination,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::{fmt_num, write_csv, write_json, write_run, write_table};
use crate::config::{Axis, Mode, Param, RunConfig, SweepSpec};
use crate::error::CliError;
use crate::plots::{emit_plots, heat_map};

/// Nodes used to sample `u0` for the quadrature in the large-μ bound.
pub const U0_SAMPLES: usize = 2001;

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seedless: bool,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub summary: serde_json::Value,
    pub report: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Thresholds {
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub barrier_amplitude: Option<f64>,
}

/// `Λ` always; `μ⁰`, the barrier threshold and its barrier when `2 h0 < Λ`.
pub fn thresholds(
    p: &ModelParams,
    u0: &Profile,
    v0: &Profile,
    delta: Option<f64>,
) -> Result<(Thresholds, Option<Supersolution>), CliError> {
    let lambda = lambda_threshold(p);
    if 2.0 * p.h0 >= lambda {
        return Ok((Thresholds { lambda, mu_upper: None, mu0: None, delta: None, barrier_amplitude: None }, None));
    }
    let mu_upper = mu_upper_bound(p, &u0.sample(p.h0, U0_SAMPLES)?)?;
    let delta = delta.unwrap_or_else(|| auto_delta(p));
    let sup = build_supersolution(p, u0, v0, delta)?;
    let t = Thresholds {
        lambda,
        mu_upper: Some(mu_upper),
        mu0: Some(sup.mu0),
        delta: Some(delta),
        barrier_amplitude: Some(sup.m),
    };
    Ok((t, Some(sup)))
}

/// `min(0.05, (ϑ/h0 − 1)/2)`, always feasible when `2 h0 < Λ`.
pub fn auto_delta(p: &ModelParams) -> f64 {
    let theta_len = 0.5 * p.h0 + 0.25 * lambda_threshold(p);
    (0.5 * (theta_len / p.h0 - 1.0)).min(0.05)
}

/// Absolute tolerance for the limit checks: `rtol` times the larger target.
pub fn limit_tolerance(p: &ModelParams, verdict: VerdictKind, rtol: f64) -> f64 {
    let scale = match verdict {
        VerdictKind::Spreading => spreading_limits(p).map(|(u, v)| u.max(v)).unwrap_or(1.0),
        VerdictKind::Vanishing => p.b,
        VerdictKind::Undecided => 1.0,
    };
    rtol * scale
}

#[derive(Debug, Clone, Serialize)]
struct Bounds {
    bound_u: f64,
    bound_v: f64,
    max_u_excess: f64,
    max_v_excess: f64,
    tol_bounds: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SimulateSummary<'a> {
    mode: &'static str,
    verdict: &'static str,
    evidence: &'a predfront_core::analysis::Evidence,
    t_decided: Option<f64>,
    termination: Termination,
    regime: Regime,
    thresholds: &'a Thresholds,
    limits: &'a LimitReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    domination: Option<&'a DominationReport>,
    bounds: Bounds,
    diagnostics: &'a Diagnostics,
    params: &'a ModelParams,
    numerics: &'a ResolvedNumerics,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("summaries serialize")
}

fn workers(cfg_workers: Option<usize>, opts: &RunOptions) -> Result<Option<usize>, CliError> {
    let w = opts.workers.or(cfg_workers);
    match w {
        Some(0) => Err(CliError::Config("workers must be at least 1".into())),
        None if opts.seedless => {
            Err(CliError::Config("--seedless: worker count must be given (--workers or sweep.workers)".into()))
        }
        w => Ok(w),
    }
}

fn with_pool<T: Send>(n: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = n {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs `mode` for a validated config.
pub fn run(cfg: &RunConfig, mode: Mode, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    if let Some(m) = cfg.mode {
        if m != mode {
            return Err(CliError::Config(format!("config declares mode {m:?} but {mode:?} was requested")));
        }
    }
    let out = opts.out.clone().unwrap_or_else(|| cfg.outputs.dir.clone());
    let mut saved = cfg.clone();
    saved.mode = Some(mode);
    crate::config::save_config(&saved, &out.join("config.toml"))?;
    match mode {
        Mode::Simulate => run_simulate(cfg, &out),
        Mode::Bisect => run_bisect(cfg, &out, opts),
        Mode::Sweep => run_sweep(cfg, &out, opts),
        Mode::Steady => run_steady(cfg, &out),
        Mode::Limits => run_limits(cfg, &out),
    }
}

/// One simulation with its verdict, limit report and barrier check.
pub struct Analysed {
    pub result: SimulationResult,
    pub verdict: Verdict,
    pub limits: LimitReport,
    pub thresholds: Thresholds,
    pub domination: Option<DominationReport>,
}

pub fn analyse(
    p: &ModelParams,
    u0: &Profile,
    v0: &Profile,
    num: &NumericsConfig,
    delta: Option<f64>,
    limit_rtol: f64,
) -> Result<Analysed, CliError> {
    let result = simulate(p, u0, v0, num)?;
    let tols = ClassifyTols::defaults(p, result.numerics.line_grid().dx, result.numerics.t_max);
    let verdict = classify(&result, p, &tols);
    let limits = verify_limits(&result, p, verdict.kind, limit_tolerance(p, verdict.kind, limit_rtol));
    let (thresholds, sup) = thresholds(p, u0, v0, delta)?;
    let domination = match sup {
        Some(s) if p.mu <= s.mu0 => Some(check_domination(&result, &s.with_mu(p.mu))),
        _ => None,
    };
    Ok(Analysed { result, verdict, limits, thresholds, domination })
}

fn simulate_summary(a: &Analysed) -> serde_json::Value {
    let r = &a.result;
    let d = &r.diagnostics;
    let tol = r.numerics.tol_bounds;
    to_value(&SimulateSummary {
        mode: "simulate",
        verdict: a.verdict.kind.as_str(),
        evidence: &a.verdict.evidence,
        t_decided: a.verdict.t_decided,
        termination: r.termination,
        regime: r.params.regime(),
        thresholds: &a.thresholds,
        limits: &a.limits,
        domination: a.domination.as_ref(),
        bounds: Bounds {
            bound_u: d.bound_u,
            bound_v: d.bound_v,
            max_u_excess: d.max_u_excess,
            max_v_excess: d.max_v_excess,
            tol_bounds: tol,
            pass: d.max_u_excess <= tol && d.max_v_excess <= tol,
        },
        diagnostics: d,
        params: &r.params,
        numerics: &r.numerics,
    })
}

fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let (u0, v0) = (cfg.predator()?, cfg.prey()?);
    let a = analyse(&cfg.model, &u0, &v0, &cfg.effective_numerics(), cfg.analysis.delta, cfg.analysis.limit_rtol)?;
    write_run(out, &a.result, cfg.outputs.snapshots)?;
    let summary = simulate_summary(&a);
    write_json(&out.join("summary.json"), &summary)?;
    if cfg.outputs.plots {
        emit_plots(out)?;
    }
    let ev = &a.verdict.evidence;
    let mut report = format!(
        "verdict {} at t = {} (span {:.6}, Λ = {:.6})",
        a.verdict.kind.as_str(),
        ev.t_end,
        ev.final_span,
        ev.lambda
    );
    if let Some(d) = &a.domination {
        let _ = write!(report, "; barrier check {}", if d.pass { "passed" } else { "FAILED" });
        if !d.pass {
            return Err(Error::Oracle(format!(
                "run escapes the barrier: worst margin {} below −{} (see {})",
                d.worst_margin(),
                d.eps,
                out.join("summary.json").display()
            ))
            .into());
        }
    }
    Ok(RunOutcome { out_dir: out.to_path_buf(), summary, report })
}

#[derive(Serialize)]
struct BisectSummary<'a> {
    mode: &'static str,
    thresholds: &'a Thresholds,
    lo: f64,
    hi: f64,
    width: f64,
    initial: (f64, f64),
    n_bisect: u32,
    consistent: bool,
    near_threshold: usize,
    probes: usize,
    params: &'a ModelParams,
}

fn run_bisect(cfg: &RunConfig, out: &Path, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let (u0, v0) = (cfg.predator()?, cfg.prey()?);
    let p = &cfg.model;
    let (th, _) = thresholds(p, &u0, &v0, cfg.analysis.delta)?;
    let (Some(mu_upper), Some(mu0)) = (th.mu_upper, th.mu0) else {
        return Err(Error::Domain(format!("no threshold in μ: 2 h0 = {} >= Λ = {}", 2.0 * p.h0, th.lambda)).into());
    };
    let spec = cfg.bisect.clone().unwrap_or_default();
    let bracket = (spec.mu_lo.unwrap_or(mu0), spec.mu_hi.unwrap_or(mu_upper));
    let n = workers(None, opts)?;
    let num = cfg.effective_numerics();
    let b: MuBracket = with_pool(n, || estimate_mu_star(p, &u0, &v0, &num, bracket, spec.n_bisect))??;
    let rows: Vec<Vec<String>> = b
        .probes
        .iter()
        .map(|q| vec![fmt_num(q.mu), q.verdict.as_str().to_string(), fmt_num(q.t_max), q.near_threshold.to_string()])
        .collect();
    write_table(&out.join("bisect.csv"), &["mu", "verdict", "t_max", "near_threshold"], &rows)?;
    let summary = to_value(&BisectSummary {
        mode: "bisect",
        thresholds: &th,
        lo: b.lo,
        hi: b.hi,
        width: b.width(),
        initial: b.initial,
        n_bisect: b.n_bisect,
        consistent: b.is_consistent(),
        near_threshold: b.near_threshold().count(),
        probes: b.probes.len(),
        params: p,
    });
    write_json(&out.join("summary.json"), &summary)?;
    let report = format!("μ* in [{}, {}] (width {}, {} probes)", b.lo, b.hi, b.width(), b.probes.len());
    Ok(RunOutcome { out_dir: out.to_path_buf(), summary, report })
}

#[derive(Debug, Clone, Serialize)]
pub struct CellRecord {
    pub cell: usize,
    pub values: Vec<f64>,
    pub verdict: VerdictKind,
    pub final_span: f64,
    pub lambda: f64,
    pub t_end: f64,
}

/// Parameter sets of a sweep, first axis fastest.
pub fn sweep_cells(base: &ModelParams, spec: &SweepSpec) -> Vec<(Vec<f64>, ModelParams)> {
    let vals: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let n: usize = vals.iter().map(Vec::len).product();
    (0..n)
        .map(|k| {
            let mut p = *base;
            let mut rem = k;
            let mut coords = Vec::with_capacity(vals.len());
            for (ax, v) in spec.axes.iter().zip(&vals) {
                let x = v[rem % v.len()];
                rem /= v.len();
                ax.param.set(&mut p, x);
                coords.push(x);
            }
            (coords, p)
        })
        .collect()
}

#[derive(Serialize)]
struct CellSummary<'a> {
    cell: usize,
    verdict: &'static str,
    evidence: &'a predfront_core::analysis::Evidence,
    termination: Termination,
    params: &'a ModelParams,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    mode: &'static str,
    axes: &'a [Axis],
    cells: usize,
    spreading: usize,
    vanishing: usize,
    undecided: usize,
    vanishing_outside_critical: usize,
}

fn run_sweep(cfg: &RunConfig, out: &Path, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let spec = cfg.sweep.clone().ok_or_else(|| CliError::Config("sweep mode needs a [sweep] section".into()))?;
    spec.validate()?;
    let (u0, v0) = (cfg.predator()?, cfg.prey()?);
    let num = cfg.effective_numerics();
    let cells = sweep_cells(&cfg.model, &spec);
    for (_, p) in &cells {
        p.validate()?;
        num.resolve(p)?;
        u0.validate_predator(p.h0)?;
    }
    let n = workers(spec.workers, opts)?;
    let results: Vec<Result<CellRecord, CliError>> = with_pool(n, || {
        cells
            .par_iter()
            .enumerate()
            .map(|(k, (coords, p))| {
                let r = simulate(p, &u0, &v0, &num)?;
                let tols = ClassifyTols::defaults(p, r.numerics.line_grid().dx, r.numerics.t_max);
                let v = classify(&r, p, &tols);
                let dir = out.join("cells").join(format!("{k:04}"));
                write_run(&dir, &r, false)?;
                write_json(
                    &dir.join("summary.json"),
                    &CellSummary {
                        cell: k,
                        verdict: v.kind.as_str(),
                        evidence: &v.evidence,
                        termination: r.termination,
                        params: p,
                    },
                )?;
                log::info!("cell {k}: {}", v.kind.as_str());
                Ok(CellRecord {
                    cell: k,
                    values: coords.clone(),
                    verdict: v.kind,
                    final_span: v.evidence.final_span,
                    lambda: v.evidence.lambda,
                    t_end: v.evidence.t_end,
                })
            })
            .collect()
    })?;
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    merge_sweep(out, &spec, &cfg.model, &records, cfg.outputs.plots)
}

/// Single-threaded merge of per-cell records into the phase diagram.
fn merge_sweep(
    out: &Path,
    spec: &SweepSpec,
    base: &ModelParams,
    records: &[CellRecord],
    plots: bool,
) -> Result<RunOutcome, CliError> {
    let mut header: Vec<&str> = vec!["cell"];
    header.extend(spec.axes.iter().map(|a| a.param.name()));
    header.extend(["verdict", "final_span", "lambda", "t_end"]);
    let cell_h0 = |r: &CellRecord| {
        let mut p = *base;
        for (ax, &x) in spec.axes.iter().zip(&r.values) {
            ax.param.set(&mut p, x);
        }
        p.h0
    };
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.cell.to_string()];
            row.extend(r.values.iter().map(|&x| fmt_num(x)));
            row.extend([r.verdict.as_str().to_string(), fmt_num(r.final_span), fmt_num(r.lambda), fmt_num(r.t_end)]);
            row
        })
        .collect();
    write_table(&out.join("phase_diagram.csv"), &header, &rows)?;
    let count = |k: VerdictKind| records.iter().filter(|r| r.verdict == k).count();
    let summary = to_value(&SweepSummary {
        mode: "sweep",
        axes: &spec.axes,
        cells: records.len(),
        spreading: count(VerdictKind::Spreading),
        vanishing: count(VerdictKind::Vanishing),
        undecided: count(VerdictKind::Undecided),
        vanishing_outside_critical: records
            .iter()
            .filter(|r| r.verdict == VerdictKind::Vanishing && 2.0 * cell_h0(r) >= r.lambda)
            .count(),
    });
    write_json(&out.join("summary.json"), &summary)?;
    if plots {
        let svg = sweep_svg(spec, base, records);
        crate::artifacts::write_atomic(&out.join("plots").join("phase_diagram.svg"), svg.as_bytes())?;
    }
    let report = format!(
        "{} cells: {} spreading, {} vanishing, {} undecided",
        records.len(),
        count(VerdictKind::Spreading),
        count(VerdictKind::Vanishing),
        count(VerdictKind::Undecided)
    );
    Ok(RunOutcome { out_dir: out.to_path_buf(), summary, report })
}

/// Points on `2 h0 = Λ` in axis coordinates, solved along the first axis
/// among `h0`, `a`, `b` (the others leave `2 h0 − Λ` unchanged).
pub fn critical_curve(spec: &SweepSpec, base: &ModelParams) -> Vec<(f64, f64)> {
    let Some(si) = [Param::H0, Param::A, Param::B].iter().find_map(|q| spec.axes.iter().position(|a| a.param == *q))
    else {
        return Vec::new();
    };
    let solve = &spec.axes[si];
    let other = spec.axes.iter().enumerate().find(|(i, _)| *i != si).map(|(_, a)| a);
    let others: Vec<f64> = match other {
        Some(ax) => (0..=100).map(|k| ax.min + (ax.max - ax.min) * k as f64 / 100.0).collect(),
        None => vec![f64::NAN],
    };
    let gap = |s: f64, o: f64| {
        let mut p = *base;
        solve.param.set(&mut p, s);
        if let Some(ax) = other {
            ax.param.set(&mut p, o);
        }
        2.0 * p.h0 - lambda_threshold(&p)
    };
    let mut pts = Vec::new();
    for &o in &others {
        let (mut lo, mut hi) = (solve.min, solve.max);
        let (flo, fhi) = (gap(lo, o), gap(hi, o));
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if gap(mid, o).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        match other {
            None => {
                pts.push((s, 0.0));
                pts.push((s, 1.0));
            }
            Some(_) if si == 0 => pts.push((s, o)),
            Some(_) => pts.push((o, s)),
        }
    }
    pts
}

fn sweep_svg(spec: &SweepSpec, base: &ModelParams, records: &[CellRecord]) -> String {
    let xs = spec.axes[0].values();
    let ys = spec.axes.get(1).map(Axis::values).unwrap_or_default();
    let nx = xs.len();
    let lookup = |i: usize, j: usize| records.get(i + nx * j).map(|r| r.verdict.as_str());
    let curve = critical_curve(spec, base);
    let overlay = if curve.is_empty() { None } else { Some(("2 h0 = Λ", curve)) };
    heat_map(
        "Spreading-vanishing phase diagram",
        spec.axes[0].param.name(),
        spec.axes.get(1).map(|a| a.param.name()).unwrap_or(""),
        &xs,
        &ys,
        &lookup,
        overlay,
    )
}

#[derive(Serialize)]
struct SteadySummary<'a> {
    mode: &'static str,
    problem: &'a LogisticBvp,
    existence_threshold: f64,
    subcritical: bool,
    center_value: f64,
    max_value: f64,
    residual_norm: f64,
    iterations: usize,
    n: usize,
}

fn run_steady(cfg: &RunConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let spec = cfg.steady.clone().ok_or_else(|| CliError::Config("steady mode needs a [steady] section".into()))?;
    let bvp = spec.problem();
    let sol = solve_bvp(&bvp, spec.n, spec.tol)?;
    let rows: Vec<Vec<f64>> = sol.x.iter().zip(&sol.values).map(|(&x, &w)| vec![x, w]).collect();
    write_csv(&out.join("steady.csv"), &["x", "w"], &rows)?;
    let l_star = existence_threshold(bvp.d, bvp.beta)?;
    let summary = to_value(&SteadySummary {
        mode: "steady",
        problem: &bvp,
        existence_threshold: l_star,
        subcritical: sol.subcritical,
        center_value: sol.center_value(),
        max_value: sol.max_value(),
        residual_norm: sol.residual_norm,
        iterations: sol.iterations,
        n: spec.n,
    });
    write_json(&out.join("summary.json"), &summary)?;
    let report = if sol.subcritical {
        format!("l = {} is below l* = {l_star}: zero solution", bvp.l)
    } else {
        format!("positive solution, centre value {}, residual {:e}", sol.center_value(), sol.residual_norm)
    };
    Ok(RunOutcome { out_dir: out.to_path_buf(), summary, report })
}

#[derive(Serialize)]
struct LimitsSummary<'a> {
    mode: &'static str,
    regime: Regime,
    lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    u_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_star: Option<f64>,
    rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_v_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap_ratio: Option<f64>,
    q_squared: f64,
    bounds: (f64, f64),
    params: &'a ModelParams,
}

fn run_limits(cfg: &RunConfig, out: &Path) -> Result<RunOutcome, CliError> {
    let p = &cfg.model;
    let rounds = cfg.limits.clone().unwrap_or_default().rounds;
    let targets = spreading_limits(p).ok();
    let (u0, v0) = (cfg.predator()?, cfg.prey()?);
    let mut report = String::new();
    let mut final_gap = None;
    let mut ratio = None;
    if p.regime() == Regime::Weak {
        let it = limit_iteration(p, rounds)?;
        let _ =
            writeln!(report, "{:>5} {:>22} {:>22} {:>22} {:>22}", "round", "under_u", "over_u", "under_v", "over_v");
        let mut rows = Vec::with_capacity(it.rounds());
        for i in 0..it.rounds() {
            let (uu, ou, uv, ov) = (it.under_u[i], it.over_u[i], it.under_v[i], it.over_v[i]);
            let _ = writeln!(report, "{:>5} {uu:>22.15} {ou:>22.15} {uv:>22.15} {ov:>22.15}", i + 1);
            rows.push(vec![(i + 1) as f64, uu, ou, uv, ov]);
        }
        write_csv(&out.join("limits.csv"), &["round", "under_u", "over_u", "under_v", "over_v"], &rows)?;
        final_gap = Some(it.final_v_gap());
        let n = it.rounds();
        if n >= 2 {
            let g = |i: usize| it.over_v[i] - it.under_v[i];
            if g(n - 2) > 0.0 {
                ratio = Some(g(n - 1) / g(n - 2));
            }
        }
    } else {
        let _ = writeln!(report, "regime {:?}: the bracketing iteration needs weak hunting", p.regime());
    }
    match targets {
        Some((u, v)) => {
            let _ = writeln!(report, "targets: u* = {u}, v* = {v}");
        }
        None => {
            let _ = writeln!(report, "targets: none established for this regime");
        }
    }
    let lambda = lambda_threshold(p);
    let _ = write!(report, "Λ = {lambda}");
    let summary = to_value(&LimitsSummary {
        mode: "limits",
        regime: p.regime(),
        lambda,
        u_star: targets.map(|t| t.0),
        v_star: targets.map(|t| t.1),
        rounds,
        final_v_gap: final_gap,
        gap_ratio: ratio,
        q_squared: (p.a * p.c).powi(2),
        bounds: a_priori_bounds(p, u0.sup_norm(), v0.sup_norm()),
        params: p,
    });
    write_json(&out.join("summary.json"), &summary)?;
    Ok(RunOutcome { out_dir: out.to_path_buf(), summary, report })
}
