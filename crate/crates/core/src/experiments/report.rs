use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use statrs::statistics::{Data, Max, Min, OrderStatistics};

use crate::search::{Mode, TIMELINE_HEADER};

use super::compare::{median, ComparisonReport};
use super::ExperimentError;

pub const STATS_FILE: &str = "stats.json";
pub const TIMELINES_FILE: &str = "timelines.csv";
pub const COVERAGE_SVG: &str = "coverage_over_time.svg";
pub const BOX_SVG: &str = "box.svg";

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

fn colour(mode: Mode) -> &'static str {
    match mode {
        Mode::Fitness => "#1f77b4",
        Mode::Novelty => "#d62728",
    }
}

pub fn stats_json(report: &ComparisonReport) -> String {
    let medians: serde_json::Map<String, serde_json::Value> =
        report.modes.iter().map(|&m| (m.to_string(), json!(report.median(m)))).collect();
    let v = json!({
        "game": report.game,
        "modes": report.modes,
        "repetitions": report.repetitions,
        "coverage_samples": report.coverage_samples,
        "median_coverage": medians,
        "a12": report.a12,
        "u": report.u,
        "p": report.p,
        "significant": report.significant,
        "events": report.events,
        "seed": report.seed,
        "config": report.config,
    });
    serde_json::to_string_pretty(&v).expect("stats serialize") + "\n"
}

pub fn timelines_csv(report: &ComparisonReport) -> String {
    let mut out = format!("{TIMELINE_HEADER}\n");
    for run in &report.runs {
        out.push_str(&run.timeline.csv_rows(&run.run_id(), run.mode.as_str()));
    }
    out
}

/// Median coverage per generation across a mode's runs. Runs that ended
/// early hold their last value.
pub fn median_curve(report: &ComparisonReport, mode: Mode) -> Vec<f64> {
    let runs: Vec<_> = report.runs.iter().filter(|r| r.mode == mode && !r.timeline.points.is_empty()).collect();
    let len = runs.iter().map(|r| r.timeline.points.len()).max().unwrap_or(0);
    (0..len)
        .map(|g| {
            let at: Vec<f64> = runs
                .iter()
                .map(|r| {
                    let p = r.timeline.points[g.min(r.timeline.points.len() - 1)];
                    if p.total == 0 { 0.0 } else { p.covered as f64 / p.total as f64 }
                })
                .collect();
            median(&at)
        })
        .collect()
}

fn svg_open(out: &mut String, title: &str, report: &ComparisonReport) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, "<desc>game={} seed={} config={}</desc>", escape(&report.game), report.seed, escape(&report.config.to_string()));
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn y_of(coverage: f64) -> f64 {
    HEIGHT - BOTTOM - coverage * (HEIGHT - TOP - BOTTOM)
}

fn y_axis(out: &mut String) {
    let x_end = WIDTH - RIGHT;
    for i in 0..=5 {
        let c = i as f64 / 5.0;
        let y = y_of(c);
        let _ = writeln!(out, r##"<line x1="{LEFT}" y1="{y:.1}" x2="{x_end}" y2="{y:.1}" stroke="#dddddd"/>"##);
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{c:.1}</text>"#, LEFT - 6.0, y + 4.0);
    }
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">coverage</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
}

pub fn coverage_svg(report: &ComparisonReport) -> String {
    let curves: Vec<(Mode, Vec<f64>)> = report.modes.iter().map(|&m| (m, median_curve(report, m))).collect();
    let last = curves.iter().map(|(_, c)| c.len()).max().unwrap_or(1).saturating_sub(1).max(1) as f64;
    let x_of = |g: f64| LEFT + g / last * (WIDTH - LEFT - RIGHT);

    let mut out = String::new();
    svg_open(&mut out, &format!("{}: median coverage over generations", escape(&report.game)), report);
    y_axis(&mut out);
    for i in 0..=4 {
        let g = (last * i as f64 / 4.0).round();
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{g}</text>"#, x_of(g), HEIGHT - BOTTOM + 18.0);
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">generation</text>"#, WIDTH / 2.0, HEIGHT - 10.0);

    for (i, (mode, curve)) in curves.iter().enumerate() {
        let mut d = String::new();
        for (g, c) in curve.iter().enumerate() {
            let (x, y) = (x_of(g as f64), y_of(*c));
            if g == 0 {
                let _ = write!(d, "M{x:.1} {y:.1}");
            } else {
                let _ = write!(d, " H{x:.1} V{y:.1}");
            }
        }
        let _ = writeln!(
            out,
            r#"<path class="series" data-mode="{mode}" d="{d}" fill="none" stroke="{}" stroke-width="2"/>"#,
            colour(*mode)
        );
        let ly = TOP + 14.0 * i as f64;
        let _ = writeln!(out, r#"<text x="{:.1}" y="{ly:.1}" fill="{}">{mode}</text>"#, LEFT + 10.0, colour(*mode));
    }
    out.push_str("</svg>\n");
    out
}

pub fn box_svg(report: &ComparisonReport) -> String {
    let mut out = String::new();
    svg_open(&mut out, &format!("{}: final coverage per repetition", escape(&report.game)), report);
    y_axis(&mut out);
    let slot = (WIDTH - LEFT - RIGHT) / report.modes.len().max(1) as f64;
    for (i, &mode) in report.modes.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let half = slot.min(160.0) / 4.0;
        let samples = report.coverage_samples.get(&mode).cloned().unwrap_or_default();
        let _ = writeln!(out, r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{mode}</text>"#, HEIGHT - BOTTOM + 18.0);
        if samples.is_empty() {
            continue;
        }
        let mut data = Data::new(samples);
        let (lo, q1, med, q3, hi) =
            (data.min(), data.lower_quartile(), data.median(), data.upper_quartile(), data.max());
        let stroke = colour(mode);
        let _ = writeln!(out, r#"<g class="series" data-mode="{mode}" stroke="{stroke}" stroke-width="2">"#);
        let _ = writeln!(out, r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}"/>"#, y_of(lo), y_of(hi));
        for v in [lo, hi] {
            let _ = writeln!(out, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/>"#, cx - half / 2.0, y_of(v), cx + half / 2.0, y_of(v));
        }
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="white"/>"#,
            cx - half,
            y_of(q3),
            2.0 * half,
            y_of(q1) - y_of(q3)
        );
        let _ = writeln!(out, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke-width="3"/>"#, cx - half, y_of(med), cx + half, y_of(med));
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Writes the four report files into `dir`, creating it if needed.
pub fn write_report(report: &ComparisonReport, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let files = [
        (STATS_FILE, stats_json(report)),
        (TIMELINES_FILE, timelines_csv(report)),
        (COVERAGE_SVG, coverage_svg(report)),
        (BOX_SVG, box_svg(report)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| ExperimentError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
