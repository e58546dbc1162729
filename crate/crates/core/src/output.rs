//! CSV, JSON and SVG emission.
//!
//! The trajectory CSV is the authoritative output. Its column order is fixed
//! by [`CSV_HEADER`]; floats are written in Rust's shortest round-trip form so
//! identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde_json::{json, Value};

use crate::sim::{RunSummary, SweepStats, TrajectoryRecord};

pub const CSV_HEADER: [&str; 14] = [
    "t", "j", "h", "eta", "mu1", "mu2", "mu3", "etap", "mup1", "mup2", "mup3", "V", "twist_norm", "jump_flag",
];

pub fn write_trajectory_csv<W: Write>(records: &[TrajectoryRecord], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let row = [
            r.t.to_string(),
            r.j.to_string(),
            r.h.to_string(),
            r.eta.to_string(),
            r.mu[0].to_string(),
            r.mu[1].to_string(),
            r.mu[2].to_string(),
            r.eta_dual.to_string(),
            r.mu_dual[0].to_string(),
            r.mu_dual[1].to_string(),
            r.mu_dual[2].to_string(),
            r.v.to_string(),
            r.twist_norm.to_string(),
            u8::from(r.jump).to_string(),
        ];
        w.write_record(&row)?;
    }
    w.flush()
}

/// Parses a trajectory CSV back into records.
pub fn read_trajectory_csv<R: io::Read>(input: R) -> io::Result<Vec<TrajectoryRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(io::Error::new(io::ErrorKind::InvalidData, format!("unexpected header {header:?}")));
    }
    let bad = |e: std::num::ParseFloatError| io::Error::new(io::ErrorKind::InvalidData, e);
    let mut records = Vec::new();
    for row in rd.records() {
        let row = row?;
        let f = |i: usize| row[i].parse::<f64>().map_err(bad);
        let int = |i: usize| {
            row[i].parse::<i64>().map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
        };
        records.push(TrajectoryRecord {
            t: f(0)?,
            j: int(1)? as u32,
            h: int(2)? as i8,
            eta: f(3)?,
            mu: [f(4)?, f(5)?, f(6)?],
            eta_dual: f(7)?,
            mu_dual: [f(8)?, f(9)?, f(10)?],
            v: f(11)?,
            twist_norm: f(12)?,
            jump: int(13)? != 0,
        });
    }
    Ok(records)
}

pub fn summary_json(preset: &str, s: &RunSummary) -> Value {
    json!({
        "preset": preset,
        "label": s.label,
        "controller": s.controller.name(),
        "seed": s.seed,
        "jumps": s.jumps,
        "sign_flips": s.sign_flips,
        "convergence_time_s": s.convergence_time,
        "terminal_V": s.terminal_v,
        "terminal_pose": s.final_state.q.vec8(),
        "terminal_h": s.final_state.h.as_i8(),
        "projection_displacement": s.projection_displacement,
        "projection_displacement_desired": s.projection_displacement_desired,
        "steps": s.steps,
    })
}

pub const SWEEP_HEADER: [&str; 8] = [
    "delta",
    "runs",
    "median_jumps",
    "mean_jumps",
    "max_jumps",
    "median_sign_flips",
    "median_convergence_time_s",
    "converged",
];

pub fn write_sweep_csv<W: Write>(rows: &[SweepStats], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record(&[
            r.delta.to_string(),
            r.runs.to_string(),
            r.median_jumps.to_string(),
            r.mean_jumps.to_string(),
            r.max_jumps.to_string(),
            r.median_sign_flips.to_string(),
            r.median_convergence_time.map(|t| t.to_string()).unwrap_or_default(),
            r.converged.to_string(),
        ])?;
    }
    w.flush()
}

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Minimal polyline plot.
pub fn svg_plot(title: &str, x_label: &str, series: &[Series<'_>]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const M: f64 = 48.0;

    let all = series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black" stroke-width="0.5"/>"#,
        W - 2.0 * M,
        H - 2.0 * M
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(x_label));
    for (v, y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(svg, r#"<text x="{}" y="{y:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.3}</text>"#, M - 4.0);
    }
    for (v, x) in [(x0, sx(x0)), (x1, sx(x1))] {
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{v:.3}</text>"#, H - M + 14.0);
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(svg, r##"<line x1="{M}" x2="{}" y1="{z:.1}" y2="{z:.1}" stroke="#999" stroke-dasharray="3,3"/>"##, W - M, z = sy(0.0));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            M + 8.0,
            M + 14.0 + 14.0 * i as f64,
            escape(s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The four standard trajectory plots: `η`, translation, `V` and the switch
/// signal `s(t)`, keyed by file suffix.
pub fn trajectory_plots(label: &str, records: &[TrajectoryRecord]) -> Vec<(&'static str, String)> {
    let pick = |f: &dyn Fn(&TrajectoryRecord) -> f64| records.iter().map(|r| (r.t, f(r))).collect::<Vec<_>>();
    let p: Vec<[f64; 3]> = records.iter().map(TrajectoryRecord::translation).collect();
    let p_series = |k: usize| records.iter().zip(&p).map(|(r, p)| (r.t, p[k])).collect::<Vec<_>>();
    vec![
        (
            "eta",
            svg_plot(
                &format!("{label}: rotation"),
                "t [s]",
                &[
                    Series { name: "eta", points: pick(&|r| r.eta) },
                    Series { name: "|mu|", points: pick(&|r| crate::algebra::norm3(&r.mu)) },
                ],
            ),
        ),
        (
            "translation",
            svg_plot(
                &format!("{label}: translation"),
                "t [s]",
                &[
                    Series { name: "p1", points: p_series(0) },
                    Series { name: "p2", points: p_series(1) },
                    Series { name: "p3", points: p_series(2) },
                ],
            ),
        ),
        ("lyapunov", svg_plot(&format!("{label}: V"), "t [s]", &[Series { name: "V", points: pick(&|r| r.v) }])),
        ("switch", svg_plot(&format!("{label}: s(t)"), "t [s]", &[Series { name: "s", points: pick(&|r| r.h as f64) }])),
    ]
}
