//! Standalone SVG heatmap: `C` along x, `m` along y, mean solve time as color.

use std::fmt::Write;

use qpfeas_core::GridSpec;

use crate::bench::{Method, SummaryRecord};

const CELL_W: f64 = 90.0;
const CELL_H: f64 = 50.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 50.0;
const LEGEND_W: f64 = 120.0;

/// Linear ramp from pale yellow (fastest) to dark red (slowest).
fn ramp(frac: f64) -> String {
    let f = frac.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(255.0, 128.0),
        lerp(245.0, 0.0),
        lerp(200.0, 38.0)
    )
}

fn fmt_seconds(ns: f64) -> String {
    format!("{:.3e}", ns * 1e-9)
}

pub fn render(spec: &GridSpec, summary: &[SummaryRecord], method: Method) -> String {
    let mean = |m: usize, c: usize| {
        summary
            .iter()
            .find(|s| s.m == m && s.c == c && s.method == method)
            .map(|s| s.mean_time_ns)
    };
    let values: Vec<f64> = summary
        .iter()
        .filter(|s| s.method == method)
        .map(|s| s.mean_time_ns)
        .collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let nx = spec.c_values.len();
    let ny = spec.m_values.len();
    let width = LEFT + CELL_W * nx as f64 + LEGEND_W;
    let height = TOP + CELL_H * ny as f64 + 50.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="24" font-size="15">{} mean solve time [s]</text>"#,
        method.as_str()
    );
    // Largest m on top.
    for (row, &m) in spec.m_values.iter().rev().enumerate() {
        let y = TOP + CELL_H * row as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{m}</text>"#,
            LEFT - 8.0,
            y + CELL_H / 2.0 + 4.0
        );
        for (col, &c) in spec.c_values.iter().enumerate() {
            let x = LEFT + CELL_W * col as f64;
            let (fill, label) = match mean(m, c) {
                Some(v) => (ramp((v - lo) / span), fmt_seconds(v)),
                None => ("#dddddd".to_string(), "n/a".to_string()),
            };
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{fill}" stroke="white"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" font-size="10">{label}</text>"#,
                x + CELL_W / 2.0,
                y + CELL_H / 2.0 + 4.0
            );
        }
    }
    let axis_y = TOP + CELL_H * ny as f64;
    for (col, &c) in spec.c_values.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{c}</text>"#,
            LEFT + CELL_W * (col as f64 + 0.5),
            axis_y + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">C</text>"#,
        LEFT + CELL_W * nx as f64 / 2.0,
        axis_y + 38.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle">m</text>"#,
        TOP + CELL_H * ny as f64 / 2.0
    );

    let lx = LEFT + CELL_W * nx as f64 + 30.0;
    let steps = 10;
    let step_h = CELL_H * ny as f64 / steps as f64;
    for k in 0..steps {
        let frac = 1.0 - k as f64 / (steps - 1) as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{}" width="20" height="{step_h}" fill="{}"/>"#,
            TOP + step_h * k as f64,
            ramp(frac)
        );
    }
    if values.is_empty() {
        let _ = writeln!(s, r#"<text x="{lx}" y="{}">no data</text>"#, TOP - 6.0);
    } else {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 26.0,
            TOP + 10.0,
            fmt_seconds(hi)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{axis_y}">{}</text>"#,
            lx + 26.0,
            fmt_seconds(lo)
        );
    }
    s.push_str("</svg>\n");
    s
}
