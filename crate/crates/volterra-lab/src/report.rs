//! Artifact emission: CSV tables, self-contained SVG line charts, and JSON
//! summary records. Everything is written with deterministic formatting —
//! identical inputs produce bit-identical files.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// Write equal-length columns as CSV. Numbers use Rust's shortest
/// round-trip `f64` formatting, so files are deterministic and lossless.
pub fn write_csv(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    if columns.len() != header.len() {
        return Err(Error::config(format!(
            "CSV at {}: {} header fields but {} columns",
            path.display(),
            header.len(),
            columns.len()
        )));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::config(format!(
            "CSV at {}: columns have unequal lengths",
            path.display()
        )));
    }
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in 0..rows {
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                text.push(',');
            }
            write!(text, "{}", col[row]).expect("write to String");
        }
        text.push('\n');
    }
    atomic_write(path, text.as_bytes())
}

/// One curve of a chart.
pub struct SvgSeries<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
}

const SVG_WIDTH: f64 = 900.0;
const SVG_HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 48.0;
const PALETTE: [&str; 6] = ["#1f6feb", "#d4380d", "#237804", "#722ed1", "#ad6800", "#006d75"];
/// Points beyond this are stride-downsampled — charts are for eyeballs,
/// CSV carries the full data.
const MAX_PLOT_POINTS: usize = 2000;

/// Write a minimal line chart: shared x-axis, one polyline per series,
/// min/max axis labels, a small legend. Non-finite values break the line.
pub fn write_svg_chart(
    path: &Path,
    title: &str,
    x: &[f64],
    series: &[SvgSeries<'_>],
) -> Result<()> {
    if series.is_empty() || x.is_empty() {
        return Err(Error::config(format!(
            "SVG at {}: nothing to plot",
            path.display()
        )));
    }
    for s in series {
        if s.values.len() != x.len() {
            return Err(Error::config(format!(
                "SVG at {}: series \"{}\" length {} does not match x length {}",
                path.display(),
                s.label,
                s.values.len(),
                x.len()
            )));
        }
    }

    let stride = x.len().div_ceil(MAX_PLOT_POINTS).max(1);
    let idx: Vec<usize> = (0..x.len())
        .step_by(stride)
        .chain(std::iter::once(x.len() - 1))
        .collect();

    let (x_min, x_max) = finite_range(idx.iter().map(|&i| x[i]));
    let (mut y_min, mut y_max) =
        finite_range(series.iter().flat_map(|s| idx.iter().map(|&i| s.values[i])));
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }

    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let to_px = |xv: f64, yv: f64| -> (f64, f64) {
        (
            MARGIN_LEFT + (xv - x_min) / x_span * plot_w,
            MARGIN_TOP + (y_max - yv) / (y_max - y_min) * plot_h,
        )
    };

    let mut svg = String::new();
    write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    )
    .expect("write to String");
    svg.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    write!(
        svg,
        r##"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" fill="#222">{}</text>"##,
        MARGIN_LEFT,
        escape_xml(title)
    )
    .expect("write to String");

    // axes
    let (x0, y0) = (MARGIN_LEFT, MARGIN_TOP + plot_h);
    write!(
        svg,
        r##"<line x1="{x0:.1}" y1="{:.1}" x2="{x0:.1}" y2="{y0:.1}" stroke="#999"/><line x1="{x0:.1}" y1="{y0:.1}" x2="{:.1}" y2="{y0:.1}" stroke="#999"/>"##,
        MARGIN_TOP,
        MARGIN_LEFT + plot_w
    )
    .expect("write to String");
    for (value, px, py, anchor, dy) in [
        (x_min, x0, y0 + 18.0, "middle", 0.0),
        (x_max, MARGIN_LEFT + plot_w, y0 + 18.0, "middle", 0.0),
        (y_min, x0 - 8.0, y0, "end", 4.0),
        (y_max, x0 - 8.0, MARGIN_TOP, "end", 4.0),
    ] {
        write!(
            svg,
            r##"<text x="{px:.1}" y="{:.1}" font-family="sans-serif" font-size="12" fill="#555" text-anchor="{anchor}">{value:.6}</text>"##,
            py + dy
        )
        .expect("write to String");
    }

    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for &i in &idx {
            let yv = s.values[i];
            if !yv.is_finite() {
                pen_down = false;
                continue;
            }
            let (px, py) = to_px(x[i], yv);
            write!(d, "{}{px:.2} {py:.2} ", if pen_down { "L" } else { "M" })
                .expect("write to String");
            pen_down = true;
        }
        if !d.is_empty() {
            write!(
                svg,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.3"/>"#,
                d.trim_end()
            )
            .expect("write to String");
        }
        // legend swatch + label
        let lx = MARGIN_LEFT + 12.0 + 150.0 * si as f64;
        write!(
            svg,
            r##"<rect x="{lx:.1}" y="{:.1}" width="12" height="4" fill="{color}"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" fill="#333">{}</text>"##,
            MARGIN_TOP - 10.0,
            lx + 18.0,
            MARGIN_TOP - 4.0,
            escape_xml(s.label)
        )
        .expect("write to String");
    }
    svg.push_str("</svg>\n");
    atomic_write(path, svg.as_bytes())
}

/// Serialize a summary record as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if lo > hi {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_deterministic_and_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let t = [0.0, 0.1, 0.2];
        let v = [1.0, -0.5, 1.0 / 3.0];
        write_csv(&path, &["t", "v"], &[&t, &v]).unwrap();
        let first = std::fs::read(&path).unwrap();
        write_csv(&path, &["t", "v"], &[&t, &v]).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("t,v\n0,1\n0.1,-0.5\n"));
        let third: f64 = text.lines().nth(3).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(third, 1.0 / 3.0);
    }

    #[test]
    fn csv_rejects_ragged_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        assert!(write_csv(&path, &["a", "b"], &[&[1.0], &[1.0, 2.0]]).is_err());
        assert!(write_csv(&path, &["a"], &[&[1.0], &[2.0]]).is_err());
    }

    #[test]
    fn svg_chart_produces_well_formed_markup() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("chart.svg");
        let t: Vec<f64> = (0..5000).map(|i| i as f64 * 1e-2).collect();
        let y: Vec<f64> = t.iter().map(|t| (-t).exp()).collect();
        write_svg_chart(&path, "resolvent <r>", &t, &[SvgSeries { label: "r", values: &y }])
            .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.ends_with("</svg>\n"));
        assert!(text.contains("resolvent &lt;r&gt;"));
        assert!(text.contains("<path"));
        // downsampled: no more than ~2001 plotted points ⇒ bounded size
        assert!(text.len() < 64 * 1024);
    }

    #[test]
    fn svg_breaks_lines_at_non_finite_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gap.svg");
        let t = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, f64::NAN, 2.0, 3.0];
        write_svg_chart(&path, "gap", &t, &[SvgSeries { label: "y", values: &y }]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let moves = text.matches('M').count();
        assert!(moves >= 2, "expected a pen lift, got {moves} moves");
    }

    #[test]
    fn json_summary_round_trips() {
        #[derive(Serialize)]
        struct Demo {
            name: &'static str,
            value: f64,
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.json");
        write_json(&path, &Demo { name: "x", value: 0.5 }).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["value"], 0.5);
        assert!(text.ends_with('\n'));
    }
}
