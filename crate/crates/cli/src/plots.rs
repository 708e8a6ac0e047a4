//! Static SVG charts. Output depends only on the input files: fixed
//! viewport, fixed number formatting, no timestamps.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::artifacts::{read_csv, write_atomic};
use crate::error::CliError;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;

pub struct Curve<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

pub struct Guide<'a> {
    pub label: String,
    pub y: f64,
    pub color: &'a str,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }
    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        let d = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        return (lo - d, hi + d);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        out,
        "<rect x=\"{l:.1}\" y=\"{t:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\"/>",
        r - l,
        b - t
    );
    for k in 0..=4 {
        let xv = f.x0 + (f.x1 - f.x0) * k as f64 / 4.0;
        let yv = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        let (px, py) = (f.px(xv), f.py(yv));
        let _ =
            writeln!(out, "<line x1=\"{px:.1}\" y1=\"{b:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>", b + 4.0);
        let _ = writeln!(out, "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", b + 16.0, tick(xv));
        let _ =
            writeln!(out, "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{l:.1}\" y2=\"{py:.1}\" stroke=\"black\"/>", l - 4.0);
        let _ =
            writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>", l - 6.0, py + 4.0, tick(yv));
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        (l + r) / 2.0,
        H - 10.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>",
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v == 0.0 || (1e-2..1e4).contains(&v.abs()) {
        format!("{v:.2}")
    } else {
        format!("{v:.1e}")
    }
}

/// Line chart with optional horizontal guide lines.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, curves: &[Curve], guides: &[Guide]) -> String {
    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
    for c in curves {
        for &(x, y) in &c.points {
            xs = (xs.0.min(x), xs.1.max(x));
            ys = (ys.0.min(y), ys.1.max(y));
        }
    }
    for g in guides {
        ys = (ys.0.min(g.y), ys.1.max(g.y));
    }
    let (x0, x1) = padded(xs.0, xs.1);
    let (y0, y1) = padded(ys.0, ys.1);
    let f = Frame { x0, x1, y0, y1 };
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &f, xlabel, ylabel);
    for g in guides {
        let py = f.py(g.y);
        let _ = writeln!(
            out,
            "<line x1=\"{LEFT:.1}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"{}\" stroke-dasharray=\"2 3\"/>",
            W - RIGHT,
            g.color
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" fill=\"{}\">{}</text>",
            W - RIGHT - 4.0,
            py - 4.0,
            g.color,
            escape(&g.label)
        );
    }
    for (k, c) in curves.iter().enumerate() {
        let mut d = String::new();
        for (i, &(x, y)) in c.points.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, f.px(x), f.py(y));
        }
        let dash = if c.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        let _ = writeln!(out, "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>", c.color);
        let ly = TOP + 14.0 + 14.0 * k as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>",
            LEFT + 8.0,
            LEFT + 28.0,
            c.color
        );
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>", LEFT + 32.0, ly + 4.0, escape(c.label));
    }
    out.push_str("</svg>\n");
    out
}

/// Verdict grid with an optional overlay curve in data coordinates.
pub fn heat_map(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    xs: &[f64],
    ys: &[f64],
    verdict: &dyn Fn(usize, usize) -> Option<&'static str>,
    overlay: Option<(&str, Vec<(f64, f64)>)>,
) -> String {
    let cell = |v: &[f64], i: usize| -> (f64, f64) {
        let n = v.len();
        let lo = if i == 0 { v[0] - 0.5 * (v[1] - v[0]) } else { 0.5 * (v[i - 1] + v[i]) };
        let hi = if i + 1 == n { v[n - 1] + 0.5 * (v[n - 1] - v[n - 2]) } else { 0.5 * (v[i] + v[i + 1]) };
        (lo, hi)
    };
    let single_row = ys.len() < 2;
    let (x0, _) = cell(xs, 0);
    let (_, x1) = cell(xs, xs.len() - 1);
    let (y0, y1) = if single_row { (0.0, 1.0) } else { (cell(ys, 0).0, cell(ys, ys.len() - 1).1) };
    let f = Frame { x0, x1, y0, y1 };
    let mut out = String::new();
    header(&mut out, title);
    for i in 0..xs.len() {
        for j in 0..ys.len().max(1) {
            let (xa, xb) = cell(xs, i);
            let (ya, yb) = if single_row { (0.0, 1.0) } else { cell(ys, j) };
            let color = match verdict(i, j) {
                Some("Spreading") => "#d9534f",
                Some("Vanishing") => "#5bc0de",
                Some(_) => "#cccccc",
                None => "#ffffff",
            };
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{color}\" stroke=\"white\" stroke-width=\"0.5\"/>",
                f.px(xa),
                f.py(yb),
                f.px(xb) - f.px(xa),
                f.py(ya) - f.py(yb)
            );
        }
    }
    axes(&mut out, &f, xlabel, if single_row { "" } else { ylabel });
    if let Some((label, pts)) = overlay {
        let mut d = String::new();
        for (i, &(x, y)) in pts.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if i == 0 { "M" } else { " L" },
                f.px(x.clamp(x0, x1)),
                f.py(y.clamp(y0, y1))
            );
        }
        let _ = writeln!(
            out,
            "<path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" stroke-dasharray=\"6 3\"/>"
        );
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>", LEFT + 8.0, TOP + 14.0, escape(label));
    }
    let legend = [("Spreading", "#d9534f"), ("Vanishing", "#5bc0de"), ("Undecided", "#cccccc")];
    for (k, (name, color)) in legend.iter().enumerate() {
        let x = W - RIGHT - 240.0 + 80.0 * k as f64;
        let _ = writeln!(out, "<rect x=\"{x:.1}\" y=\"24\" width=\"10\" height=\"10\" fill=\"{color}\"/>");
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"33\">{name}</text>", x + 14.0);
    }
    out.push_str("</svg>\n");
    out
}

fn require(dir: &Path, files: &[&str]) -> Result<(), CliError> {
    let missing: Vec<String> = files.iter().filter(|f| !dir.join(f).is_file()).map(|f| f.to_string()).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::MissingInputs { dir: dir.display().to_string(), expected: missing })
    }
}

fn column(header: &[String], name: &str) -> Result<usize, CliError> {
    header.iter().position(|h| h == name).ok_or_else(|| CliError::Config(format!("column {name} missing")))
}

fn last_snapshot(dir: &Path) -> Result<Option<std::path::PathBuf>, CliError> {
    let snaps = dir.join("snapshots");
    if !snaps.is_dir() {
        return Ok(None);
    }
    let mut names: Vec<_> = fs::read_dir(&snaps)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    names.sort();
    Ok(names.pop())
}

/// Writes `plots/fronts.svg` and, when snapshots exist, `plots/profiles.svg`
/// from the artifacts of a simulate run.
pub fn emit_plots(dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    require(dir, &["fronts.csv", "summary.json"])?;
    let (hdr, rows) = read_csv(&dir.join("fronts.csv"))?;
    if rows.is_empty() {
        return Err(CliError::Config(format!("{} has no rows", dir.join("fronts.csv").display())));
    }
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.join("summary.json"))?).map_err(|e| CliError::Config(e.to_string()))?;
    let lambda = summary["thresholds"]["lambda"].as_f64();
    let (it, ig, ih) = (column(&hdr, "t")?, column(&hdr, "g")?, column(&hdr, "h")?);
    let g: Vec<(f64, f64)> = rows.iter().map(|r| (r[it], r[ig])).collect();
    let h: Vec<(f64, f64)> = rows.iter().map(|r| (r[it], r[ih])).collect();
    let span: Vec<(f64, f64)> = rows.iter().map(|r| (r[it], r[ih] - r[ig])).collect();
    let guides: Vec<Guide> =
        lambda.map(|l| Guide { label: format!("span = Λ = {l:.4}"), y: l, color: "#888888" }).into_iter().collect();
    let fronts = line_chart(
        "Free boundaries",
        "t",
        "x",
        &[
            Curve { label: "g(t)", color: "#1f77b4", dashed: false, points: g },
            Curve { label: "h(t)", color: "#d62728", dashed: false, points: h },
            Curve { label: "h − g", color: "#2ca02c", dashed: true, points: span },
        ],
        &guides,
    );

    let mut outputs = vec![("fronts.svg", fronts)];
    if let Some(snap) = last_snapshot(dir)? {
        let (hdr, rows) = read_csv(&snap)?;
        if !rows.is_empty() {
            let (ix, iu, iv) = (column(&hdr, "x")?, column(&hdr, "u")?, column(&hdr, "v")?);
            let mut guides = Vec::new();
            if let Some(checks) = summary["limits"]["checks"].as_array() {
                for c in checks {
                    if let (Some(name), Some(target)) = (c["name"].as_str(), c["target"].as_f64()) {
                        let color = if name == "u" { "#d62728" } else { "#1f77b4" };
                        guides.push(Guide { label: format!("{name} limit {target:.4}"), y: target, color });
                    }
                }
            }
            let profiles = line_chart(
                "Final profiles",
                "x",
                "density",
                &[
                    Curve {
                        label: "u",
                        color: "#d62728",
                        dashed: false,
                        points: rows.iter().map(|r| (r[ix], r[iu])).collect(),
                    },
                    Curve {
                        label: "v",
                        color: "#1f77b4",
                        dashed: false,
                        points: rows.iter().map(|r| (r[ix], r[iv])).collect(),
                    },
                ],
                &guides,
            );
            outputs.push(("profiles.svg", profiles));
        }
    }
    let mut written = Vec::new();
    for (name, svg) in outputs {
        let path = dir.join("plots").join(name);
        write_atomic(&path, svg.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
