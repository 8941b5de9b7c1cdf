use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use crate::error::{CliError, Result};
use crate::output::write_atomic;
use crate::svg::{label, ticks, Svg};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// Staircase for jump lists, line for uniformly spaced samples.
    Auto,
    Staircase,
    Line,
}

#[derive(Args, Clone, Debug)]
pub struct PlotArgs {
    /// CSV file to draw; repeat for a multi-panel figure.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Style::Auto)]
    pub style: Style,
    #[arg(long)]
    pub title: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Staircase,
    Line,
}

/// One panel's data: `points` are `(x, value)`; for a staircase each value
/// holds until the next point and the last one until `end`.
#[derive(Clone, Debug, PartialEq)]
struct Series {
    name: String,
    x_label: String,
    y_label: String,
    points: Vec<(f64, f64)>,
    end: f64,
    jump_list: bool,
}

fn malformed(path: &Path, reason: impl Into<String>) -> CliError {
    CliError::MalformedInput {
        path: path.to_owned(),
        reason: reason.into(),
    }
}

/// Right end from a `<stem>.meta.json` sidecar (`n` for flows, `xmax` for
/// limit paths).
fn sidecar_end(path: &Path) -> Option<f64> {
    let stem = path.file_stem()?.to_string_lossy().into_owned();
    let meta = path.with_file_name(format!("{stem}.meta.json"));
    let text = fs::read_to_string(meta).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    v.get("n").or_else(|| v.get("xmax"))?.as_f64()
}

fn read_series(path: &Path) -> Result<Series> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed(path, "empty file"))?.trim();
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() != 2 {
        return Err(malformed(
            path,
            format!("expected a two-column header such as `k,C` or `x,value`, found {header:?}"),
        ));
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || malformed(path, format!("row {}: {line:?}", i + 2));
        let (a, b) = line.split_once(',').ok_or_else(bad)?;
        let x: f64 = a.trim().parse().map_err(|_| bad())?;
        let y: f64 = b.trim().parse().map_err(|_| bad())?;
        if x.is_nan() || y.is_nan() {
            return Err(bad());
        }
        if let Some(&(px, _)) = points.last() {
            if x < px {
                return Err(malformed(path, format!("row {}: x decreases", i + 2)));
            }
        }
        // Levels that outlive the horizon have no finite hitting time.
        if y.is_finite() {
            points.push((x, y));
        }
    }
    let jump_list = cols == ["k", "C"];
    let last_x = points.last().map(|p| p.0);
    let end = sidecar_end(path)
        .or(last_x)
        .unwrap_or(1.0);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Series {
        name,
        x_label: cols[0].to_owned(),
        y_label: cols[1].to_owned(),
        points,
        end,
        jump_list,
    })
}

fn uniform(points: &[(f64, f64)]) -> bool {
    if points.len() < 3 {
        return false;
    }
    let d = points[1].0 - points[0].0;
    d > 0.0
        && points
            .windows(2)
            .all(|w| ((w[1].0 - w[0].0) - d).abs() <= 1e-6 * d.abs().max(1e-300))
}

fn shape_for(s: &Series, style: Style) -> Shape {
    match style {
        Style::Staircase => Shape::Staircase,
        Style::Line => Shape::Line,
        Style::Auto if s.jump_list => Shape::Staircase,
        Style::Auto if uniform(&s.points) => Shape::Line,
        Style::Auto => Shape::Staircase,
    }
}

/// Polyline vertices in data coordinates.
fn vertices(s: &Series, shape: Shape) -> Vec<(f64, f64)> {
    match shape {
        Shape::Line => {
            if s.points.is_empty() {
                vec![(0.0, 0.0), (s.end, 0.0)]
            } else {
                s.points.clone()
            }
        }
        Shape::Staircase => {
            // Jump lists start from C = 0 at k = 0.
            let mut out = Vec::with_capacity(2 * s.points.len() + 2);
            let (mut x, mut v) = if s.jump_list {
                (0.0, 0.0)
            } else {
                match s.points.first() {
                    Some(&p) => p,
                    None => (0.0, 0.0),
                }
            };
            out.push((x, v));
            let rest = if s.jump_list { &s.points[..] } else { s.points.get(1..).unwrap_or(&[]) };
            for &(px, pv) in rest {
                if px > x {
                    out.push((px, v));
                }
                out.push((px, pv));
                x = px;
                v = pv;
            }
            if s.end > x {
                out.push((s.end, v));
            }
            out
        }
    }
}

/// Keep at most a few vertices per horizontal pixel: first, low, high and
/// last of each bucket.
fn thin(points: Vec<(f64, f64)>, to_px: impl Fn(f64) -> f64, max_per_px: usize) -> Vec<(f64, f64)> {
    let px_count = points
        .last()
        .map(|p| to_px(p.0) - to_px(points[0].0))
        .unwrap_or(0.0)
        .abs() as usize
        + 1;
    if points.len() <= max_per_px * px_count {
        return points;
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < points.len() {
        let col = to_px(points[i].0).floor();
        let mut j = i;
        while j < points.len() && to_px(points[j].0).floor() == col {
            j += 1;
        }
        let bucket = &points[i..j];
        let lo = bucket.iter().copied().fold(bucket[0], |a, b| if b.1 < a.1 { b } else { a });
        let hi = bucket.iter().copied().fold(bucket[0], |a, b| if b.1 > a.1 { b } else { a });
        let mut keep = vec![bucket[0], lo, hi, bucket[bucket.len() - 1]];
        keep.sort_by(|a, b| a.0.total_cmp(&b.0));
        keep.dedup();
        out.extend(keep);
        i = j;
    }
    out
}

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 320.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 28.0;
const BOTTOM: f64 = 44.0;

fn draw_panel(svg: &mut Svg, s: &Series, shape: Shape, ox: f64, oy: f64) {
    let verts = vertices(s, shape);
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (0f64, f64::NEG_INFINITY);
    for &(x, y) in &verts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let (pw, ph) = (PANEL_W - LEFT - RIGHT, PANEL_H - TOP - BOTTOM);
    let (px, py) = (ox + LEFT, oy + TOP);
    let to_x = |x: f64| px + (x - x0) / (x1 - x0) * pw;
    let to_y = |y: f64| py + ph - (y - y0) / (y1 - y0) * ph;

    svg.rect(px, py, pw, ph, "#444");
    for t in ticks(x0, x1, 5) {
        let x = to_x(t);
        svg.line(x, py + ph, x, py + ph + 4.0, "#444");
        svg.text(x, py + ph + 16.0, "middle", 11.0, &label(t));
    }
    for t in ticks(y0, y1, 5) {
        let y = to_y(t);
        svg.line(px - 4.0, y, px, y, "#444");
        svg.text(px - 6.0, y + 4.0, "end", 11.0, &label(t));
    }
    svg.text(px + pw / 2.0, oy + PANEL_H - 8.0, "middle", 12.0, &s.x_label);
    svg.vtext(ox + 16.0, py + ph / 2.0, 12.0, &s.y_label);
    svg.text(px + pw / 2.0, oy + 18.0, "middle", 13.0, &s.name);

    let verts = thin(verts, to_x, 4);
    let screen: Vec<(f64, f64)> = verts.iter().map(|&(x, y)| (to_x(x), to_y(y))).collect();
    svg.polyline(&screen, "#1f4e9c");
}

fn render(series: &[Series], style: Style, title: Option<&str>) -> String {
    let n = series.len();
    let cols = match n {
        0 | 1 => 1,
        2..=4 => 2,
        _ => 3,
    };
    let rows = n.div_ceil(cols).max(1);
    let head = if title.is_some() { 32.0 } else { 0.0 };
    let mut svg = Svg::new(cols as f64 * PANEL_W, head + rows as f64 * PANEL_H);
    if let Some(t) = title {
        svg.text(cols as f64 * PANEL_W / 2.0, 22.0, "middle", 16.0, t);
    }
    for (i, s) in series.iter().enumerate() {
        let (r, c) = (i / cols, i % cols);
        draw_panel(&mut svg, s, shape_for(s, style), c as f64 * PANEL_W, head + r as f64 * PANEL_H);
    }
    svg.finish()
}

pub fn run(args: &PlotArgs) -> Result<()> {
    let series = args
        .inputs
        .iter()
        .map(|p| read_series(p))
        .collect::<Result<Vec<_>>>()?;
    let doc = render(&series, args.style, args.title.as_deref());
    if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    write_atomic(&args.output, |w| w.write_all(doc.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(points: Vec<(f64, f64)>, end: f64, jump_list: bool) -> Series {
        Series {
            name: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            points,
            end,
            jump_list,
        }
    }

    #[test]
    fn staircase_from_jump_list() {
        let s = series(vec![(2.0, 1.0), (5.0, 3.0)], 8.0, true);
        assert_eq!(
            vertices(&s, Shape::Staircase),
            vec![(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (5.0, 1.0), (5.0, 3.0), (8.0, 3.0)]
        );
    }

    #[test]
    fn empty_jump_list_is_flat_zero() {
        let s = series(vec![], 10.0, true);
        assert_eq!(vertices(&s, Shape::Staircase), vec![(0.0, 0.0), (10.0, 0.0)]);
    }

    #[test]
    fn step_csv_uses_its_first_row_as_initial_value() {
        let s = series(vec![(0.0, 0.3), (0.5, 0.9)], 1.0, false);
        assert_eq!(
            vertices(&s, Shape::Staircase),
            vec![(0.0, 0.3), (0.5, 0.3), (0.5, 0.9), (1.0, 0.9)]
        );
    }

    #[test]
    fn auto_style_detects_uniform_grids() {
        let grid = series((0..10).map(|i| (i as f64 * 0.1, i as f64)).collect(), 0.9, false);
        assert_eq!(shape_for(&grid, Style::Auto), Shape::Line);
        let jumps = series(vec![(0.0, 0.0), (0.3, 1.0), (0.35, 2.0)], 1.0, false);
        assert_eq!(shape_for(&jumps, Style::Auto), Shape::Staircase);
    }

    #[test]
    fn thinning_keeps_extremes() {
        let pts: Vec<(f64, f64)> = (0..10_000).map(|i| (i as f64, ((i * 7919) % 101) as f64)).collect();
        let out = thin(pts, |x| x / 1000.0, 4);
        assert!(out.len() <= 4 * 10);
        assert!(out.iter().any(|p| p.1 == 100.0));
        assert!(out.iter().any(|p| p.1 == 0.0));
        assert!(out.windows(2).all(|w| w[0].0 <= w[1].0));
    }

    #[test]
    fn render_is_deterministic() {
        let s = vec![series(vec![(2.0, 1.0)], 4.0, true); 6];
        let a = render(&s, Style::Auto, Some("grid"));
        assert_eq!(a, render(&s, Style::Auto, Some("grid")));
        assert_eq!(a.matches("<polyline").count(), 6);
    }
}
