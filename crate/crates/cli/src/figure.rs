//! SVG rendering of traced curves over a hatched feasible region.

use std::fmt::Write;

use transversal_core::cone::transversal_status;
use transversal_core::geom::{Direction, MinimaxOptions, OrderOutcome, Scene, DEFAULT_TIE_FACTOR};
use transversal_core::sextic::{Chart, TraceSet};

/// One chart of a figure.
#[derive(Clone, Debug)]
pub struct Panel {
    pub title: String,
    pub traces: TraceSet,
    /// Centers of chart cells whose direction admits a transversal.
    pub feasible: Vec<[f64; 2]>,
    /// Side length of a feasible cell in chart units.
    pub cell: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    /// Width and height of one panel in user units.
    pub panel_size: f64,
    pub stroke_width: f64,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            panel_size: 400.0,
            stroke_width: 1.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub svg: String,
    pub warnings: Vec<String>,
}

const MARGIN: f64 = 20.0;
const TITLE: f64 = 24.0;
const LEGEND: f64 = 56.0;

/// Curve name and stroke color.
const CURVE_COLORS: [(&str, &str, &str); 5] = [
    ("sigma", "#d62728", "sextic"),
    ("hessian", "#000000", "Hessian"),
    ("conic01", "#1f5fd6", "conic 01"),
    ("conic02", "#2ca02c", "conic 02"),
    ("conic12", "#8c8c8c", "conic 12"),
];

/// Cells of an `n x n` grid over the chart whose direction has a transversal
/// in some order.  Returns the cell centers and the cell size.
pub fn feasible_cells(scene: &Scene, chart: &Chart, n: usize, tol: f64) -> (Vec<[f64; 2]>, f64) {
    let n = n.max(1);
    let (x0, x1) = chart.x_range;
    let (y0, y1) = chart.y_range;
    let h = ((x1 - x0) / n as f64).min((y1 - y0) / n as f64);
    let tie = DEFAULT_TIE_FACTOR * scene.diameter();
    let opts = MinimaxOptions::with_tol(tol);
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let p = [x0 + (i as f64 + 0.5) * (x1 - x0) / n as f64, y0 + (j as f64 + 0.5) * (y1 - y0) / n as f64];
            let Ok(u) = Direction::new(chart.lift(p[0], p[1]).to_vec()) else { continue };
            if let Ok((slack, OrderOutcome::Strict(_), _)) = transversal_status(scene, &u, tie, &opts) {
                if slack <= tol {
                    out.push(p);
                }
            }
        }
    }
    (out, h)
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Panels side by side with a shared legend.  An empty panel list gives a
/// valid SVG holding only the legend, plus a warning.
pub fn render_figure(panels: &[Panel], style: &Style) -> Figure {
    let mut warnings = Vec::new();
    if panels.is_empty() {
        warnings.push("no traces to render; the figure holds only its legend".to_string());
    }
    for p in panels {
        if p.traces.curves.iter().all(|c| c.polylines.is_empty()) {
            warnings.push(format!("panel '{}' has no traced curves", p.title));
        }
    }
    let size = style.panel_size;
    let width = MARGIN + panels.len().max(1) as f64 * (size + MARGIN);
    let height = MARGIN + if panels.is_empty() { 0.0 } else { TITLE + size + MARGIN } + LEGEND;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {} {}" width="{}" height="{}" font-family="sans-serif" font-size="13">"#,
        fmt(width),
        fmt(height),
        fmt(width),
        fmt(height)
    );
    svg.push_str(
        "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\
         <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#e8a33d\" stroke-width=\"2\"/></pattern></defs>\n",
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, fmt(width), fmt(height));

    for (k, panel) in panels.iter().enumerate() {
        let left = MARGIN + k as f64 * (size + MARGIN);
        let top = MARGIN + TITLE;
        let chart = &panel.traces.chart;
        let (x0, x1) = chart.x_range;
        let (y0, y1) = chart.y_range;
        let sx = size / (x1 - x0);
        let sy = size / (y1 - y0);
        let px = |x: f64| left + (x - x0) * sx;
        let py = |y: f64| top + (y1 - y) * sy;

        let _ = writeln!(svg, r#"<g id="panel{k}">"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            fmt(left + size / 2.0),
            fmt(MARGIN + TITLE - 8.0),
            escape(&panel.title)
        );
        let _ = writeln!(
            svg,
            r#"<clipPath id="clip{k}"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>"#,
            fmt(left),
            fmt(top),
            fmt(size),
            fmt(size)
        );
        let _ = writeln!(svg, r#"<g clip-path="url(#clip{k})">"#);
        if !panel.feasible.is_empty() {
            svg.push_str("<path fill=\"url(#hatch)\" stroke=\"none\" d=\"");
            let (w, h) = (panel.cell * sx, panel.cell * sy);
            for c in &panel.feasible {
                let _ = write!(
                    svg,
                    "M{} {}h{}v{}h-{}z",
                    fmt(px(c[0]) - w / 2.0),
                    fmt(py(c[1]) - h / 2.0),
                    fmt(w),
                    fmt(h),
                    fmt(w)
                );
            }
            svg.push_str("\"/>\n");
        }
        for (name, color, _) in CURVE_COLORS {
            let Some(curve) = panel.traces.curve(name) else { continue };
            for line in curve.polylines.iter().filter(|l| l.len() >= 2) {
                let pts: Vec<String> = line.iter().map(|p| format!("{},{}", fmt(px(p[0])), fmt(py(p[1])))).collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline class="{name}" fill="none" stroke="{color}" stroke-width="{}" points="{}"/>"#,
                    style.stroke_width,
                    pts.join(" ")
                );
            }
        }
        svg.push_str("</g>\n");
        let _ = writeln!(
            svg,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
            fmt(left),
            fmt(top),
            fmt(size),
            fmt(size)
        );
        svg.push_str("</g>\n");
    }

    // legend
    let ly = height - LEGEND + 20.0;
    let mut lx = MARGIN;
    for (_, color, label) in CURVE_COLORS {
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{label}</text>"#,
            fmt(lx),
            fmt(ly),
            fmt(lx + 24.0),
            fmt(ly),
            fmt(lx + 30.0),
            fmt(ly + 4.0)
        );
        lx += 100.0;
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{}" y="{}" width="24" height="14" fill="url(#hatch)" stroke="#444"/><text x="{}" y="{}">feasible directions</text>"##,
        fmt(lx),
        fmt(ly - 7.0),
        fmt(lx + 30.0),
        fmt(ly + 4.0)
    );
    svg.push_str("</svg>\n");
    Figure { svg, warnings }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use transversal_core::sextic::{trace_curves, Triple};

    #[test]
    fn empty_input_gives_a_skeleton() {
        let fig = render_figure(&[], &Style::default());
        assert!(fig.svg.starts_with("<svg") && fig.svg.trim_end().ends_with("</svg>"));
        assert!(!fig.svg.contains("<polyline"));
        assert_eq!(fig.warnings.len(), 1);
    }

    #[test]
    fn curves_get_their_colors() {
        let t = Triple::new([[0.0, 0.0, 0.0], [4.0, 1.0, 0.0], [8.0, -1.0, 1.0]], [1.0, 1.2, 1.1]).unwrap();
        let chart = Chart::coordinate(0, 1.0);
        let panel = Panel {
            title: "a & b".into(),
            traces: trace_curves(&t, &chart, 60),
            feasible: vec![[0.0, 0.0]],
            cell: 0.1,
        };
        let fig = render_figure(&[panel], &Style::default());
        assert!(fig.svg.contains(r##"class="sigma" fill="none" stroke="#d62728""##));
        assert!(fig.svg.contains("url(#hatch)"));
        assert!(fig.svg.contains("a &amp; b"));
        assert!(fig.warnings.is_empty());
    }
}
