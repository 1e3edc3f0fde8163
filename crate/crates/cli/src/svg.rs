//! Static log-log chart of `D` against `k` with the bound curves.

use std::fmt::Write as _;

use crate::scan::ScanReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Axes {
    fn px(&self, k: f64) -> f64 {
        MARGIN + (k.log10() - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v.log10() - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn polyline(out: &mut String, axes: &Axes, pts: &[(f64, f64)], style: &str) {
    if pts.is_empty() {
        return;
    }
    let coords: Vec<String> = pts
        .iter()
        .map(|&(k, v)| format!("{:.2},{:.2}", axes.px(k), axes.py(v)))
        .collect();
    let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, coords.join(" "));
}

pub fn render(report: &ScanReport) -> String {
    let d_pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.d_value > 0.0)
        .map(|r| (r.k as f64, r.d_value))
        .collect();
    let lower: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.k as f64, r.theorem1_lower)).collect();
    let upper: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter_map(|r| r.theorem2_upper.map(|u| (r.k as f64, u)))
        .collect();
    let etk: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter_map(|r| r.etk_bound.map(|u| (r.k as f64, u)))
        .collect();

    let all = d_pts.iter().chain(&lower).chain(&upper).chain(&etk);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(k, v) in all {
        x0 = x0.min(k.log10());
        x1 = x1.max(k.log10());
        y0 = y0.min(v.log10());
        y1 = y1.max(v.log10());
    }
    let axes = Axes {
        x0: x0.floor(),
        x1: x1.ceil().max(x0.floor() + 1.0),
        y0: y0.floor(),
        y1: y1.ceil().max(y0.floor() + 1.0),
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for e in axes.x0 as i32..=axes.x1 as i32 {
        let x = axes.px(10f64.powi(e));
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{top}" x2="{x:.2}" y2="{bottom}" stroke="#ddd"/><text x="{x:.2}" y="{}" text-anchor="middle">1e{e}</text>"##,
            bottom + 16.0
        );
    }
    for e in axes.y0 as i32..=axes.y1 as i32 {
        let y = axes.py(10f64.powi(e));
        let _ = writeln!(
            out,
            r##"<line x1="{left}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            left - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">k</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">D</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    polyline(&mut out, &axes, &lower, r##"stroke="#2a7" stroke-dasharray="6 4""##);
    polyline(&mut out, &axes, &upper, r##"stroke="#c33" stroke-dasharray="6 4""##);
    polyline(&mut out, &axes, &etk, r##"stroke="#d80" stroke-dasharray="2 3""##);
    polyline(&mut out, &axes, &d_pts, r##"stroke="#236""##);
    for &(k, v) in &d_pts {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#236"/>"##,
            axes.px(k),
            axes.py(v)
        );
    }

    let legend = [
        ("#236", "D", d_pts.len()),
        ("#2a7", "lower bound", lower.len()),
        ("#c33", "upper bound", upper.len()),
        ("#d80", "ETK at M", etk.len()),
    ];
    for (i, (colour, label, _)) in legend.iter().filter(|l| l.2 > 0).enumerate() {
        let y = top + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{colour}"/><text x="{}" y="{}">{label}</text>"#,
            right - 110.0,
            right - 90.0,
            right - 84.0,
            y + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}
