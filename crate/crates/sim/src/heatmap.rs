//! SVG heatmaps of scan maps: time on x, scan parameter on y, linear colour
//! scale annotated with its minimum and maximum.

use std::fmt::Write as _;
use std::path::Path;

use rydberg_core::experiments::{ScanAxis, ScanResult};

use crate::error::{Result, SimError};
use crate::output::fmt_g;

/// Upper bound on rendered time columns; longer maps are averaged down.
pub const MAX_COLUMNS: usize = 500;

const CELL_W: f64 = 1.0;
const ROW_H: f64 = 4.0;
const MARGIN: f64 = 60.0;
const LEGEND_W: f64 = 16.0;

/// Viridis-like anchor colours, low to high.
const PALETTE: [(u8, u8, u8); 5] = [(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)];

fn colour(u: f64) -> (u8, u8, u8) {
    let u = if u.is_finite() { u.clamp(0.0, 1.0) } else { 0.0 };
    let x = u * (PALETTE.len() - 1) as f64;
    let k = (x.floor() as usize).min(PALETTE.len() - 2);
    let f = x - k as f64;
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
    let (a, b) = (PALETTE[k], PALETTE[k + 1]);
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn observable<'a>(scan: &'a ScanResult, name: &str) -> Result<&'a [Vec<f64>]> {
    match name {
        "rho33" => Ok(&scan.rho33),
        "im_rho21" => Ok(&scan.im_rho21),
        _ => Err(SimError::Usage(format!("unknown observable `{name}` (rho33 or im_rho21)"))),
    }
}

/// Averages `row` into at most `cols` bins of equal sample count.
fn downsample(row: &[f64], cols: usize) -> Vec<f64> {
    if row.len() <= cols {
        return row.to_vec();
    }
    (0..cols)
        .map(|c| {
            let (a, b) = (c * row.len() / cols, (c + 1) * row.len() / cols);
            row[a..b].iter().sum::<f64>() / (b - a) as f64
        })
        .collect()
}

/// SVG document for `observable` (`rho33` or `im_rho21`) of `scan`.
pub fn heatmap_svg(scan: &ScanResult, name: &str) -> Result<String> {
    let data = observable(scan, name)?;
    if scan.params.is_empty() || scan.times.is_empty() {
        return Err(SimError::Usage("cannot render an empty scan".into()));
    }
    let rows: Vec<Vec<f64>> = data.iter().map(|r| downsample(r, MAX_COLUMNS)).collect();
    let cols = rows[0].len();
    let (lo, hi) = rows.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = hi - lo;
    let plot_w = cols as f64 * CELL_W;
    let plot_h = rows.len() as f64 * ROW_H;
    let width = plot_w + 2.0 * MARGIN + LEGEND_W + 60.0;
    let height = plot_h + 2.0 * MARGIN;
    let (param_label, scale) = match scan.axis {
        ScanAxis::Intensity => ("intensity (MW/cm2)", 1e-10),
        ScanAxis::Detuning => ("detuning 480 (GHz)", 1.0 / (std::f64::consts::TAU * 1e9)),
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" shape-rendering="crispEdges" font-family="sans-serif" font-size="11">"#,
        w = fmt_g(width),
        h = fmt_g(height)
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    // first parameter at the bottom
    for (i, row) in rows.iter().enumerate() {
        let y = MARGIN + plot_h - (i + 1) as f64 * ROW_H;
        for (c, &v) in row.iter().enumerate() {
            let u = if span > 0.0 { (v - lo) / span } else { 0.5 };
            let (r, g, b) = colour(u);
            let _ = writeln!(
                s,
                r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                fmt_g(MARGIN + c as f64 * CELL_W),
                fmt_g(y),
                fmt_g(CELL_W),
                fmt_g(ROW_H)
            );
        }
    }
    let legend_x = MARGIN + plot_w + 20.0;
    for k in 0..64 {
        let (r, g, b) = colour(k as f64 / 63.0);
        let y = MARGIN + plot_h * (1.0 - (k + 1) as f64 / 64.0);
        let _ = writeln!(
            s,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
            fmt_g(legend_x),
            fmt_g(y),
            fmt_g(LEGEND_W),
            fmt_g(plot_h / 64.0)
        );
    }
    let t0 = scan.times[0] * 1e9;
    let t1 = scan.times[scan.times.len() - 1] * 1e9;
    let p0 = scan.params[0] * scale;
    let p1 = scan.params[scan.params.len() - 1] * scale;
    let text = |s: &mut String, x: f64, y: f64, anchor: &str, body: String| {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="{anchor}">{body}</text>"#, fmt_g(x), fmt_g(y));
    };
    text(&mut s, legend_x, MARGIN - 6.0, "start", format!("max {}", fmt_g(hi)));
    text(&mut s, legend_x, MARGIN + plot_h + 14.0, "start", format!("min {}", fmt_g(lo)));
    text(&mut s, MARGIN, MARGIN + plot_h + 14.0, "start", format!("{} ns", fmt_g(t0)));
    text(&mut s, MARGIN + plot_w, MARGIN + plot_h + 14.0, "end", format!("{} ns", fmt_g(t1)));
    text(&mut s, MARGIN + plot_w / 2.0, MARGIN + plot_h + 30.0, "middle", "time".into());
    text(&mut s, MARGIN - 4.0, MARGIN + plot_h, "end", fmt_g(p0));
    text(&mut s, MARGIN - 4.0, MARGIN + 10.0, "end", fmt_g(p1));
    text(&mut s, MARGIN, MARGIN - 20.0, "start", format!("{name} vs {param_label}"));
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes [`heatmap_svg`] to `path`.
pub fn render_heatmap(scan: &ScanResult, name: &str, path: &Path) -> Result<()> {
    let svg = heatmap_svg(scan, name)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    }
    std::fs::write(path, svg).map_err(|e| SimError::io(path, e))
}
