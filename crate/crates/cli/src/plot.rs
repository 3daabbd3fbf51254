//! Static SVG error plots: log-log error against h for h-sweeps, semi-log
//! error against p for p-sweeps.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::csv::{StudyRow, SweepParam};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if log {
            (lo, hi) = (lo.floor(), hi.ceil());
        } else {
            let pad = ((hi - lo) * 0.05).max(0.5);
            (lo, hi) = (lo - pad, hi + pad);
        }
        if hi <= lo {
            hi = lo + 1.0;
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            (self.lo as i32..=self.hi as i32).map(|e| (10f64.powi(e), format!("1e{e}"))).collect()
        } else {
            (self.lo.ceil() as i64..=self.hi.floor() as i64).map(|v| (v as f64, v.to_string())).collect()
        }
    }
}

fn px(ax: &Axis, v: f64) -> f64 {
    LEFT + ax.unit(v) * (WIDTH - LEFT - RIGHT)
}

fn py(ax: &Axis, v: f64) -> f64 {
    HEIGHT - BOTTOM - ax.unit(v) * (HEIGHT - TOP - BOTTOM)
}

/// Least-squares slope of `log10 y` against `log10 x` (h-mode) or the
/// exponential rate `r` in `y ~ exp(-r x)` (p-mode).
fn fitted_slope(pts: &[(f64, f64)], param: SweepParam) -> Option<f64> {
    let xs: Vec<f64> = pts.iter().map(|p| if param == SweepParam::H { p.0.ln() } else { p.0 }).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(if param == SweepParam::H { sxy / sxx } else { -sxy / sxx })
}

/// Render the relative-error curves of `rows`, one per eigenvalue index.
/// Rows without an error are left out. h-sweeps get dashed guides of slope
/// `2(p-1)`.
pub fn emit_plot(rows: &[StudyRow]) -> String {
    let param = rows.first().map(|r| r.param).unwrap_or(SweepParam::H);
    let mut curves: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        if let Some(e) = r.relerr.filter(|e| *e > 0.0) {
            let x = if param == SweepParam::H { r.h } else { r.p as f64 };
            curves.entry(r.k).or_default().push((x, e));
        }
    }
    let xs = curves.values().flatten().map(|p| p.0);
    let ys = curves.values().flatten().map(|p| p.1);
    let xa = Axis::fit(xs, param == SweepParam::H);
    let ya = Axis::fit(ys, true);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#).unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    writeln!(
        s,
        r#"<rect class="frame" x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    )
    .unwrap();
    for (v, label) in xa.ticks() {
        let x = px(&xa, v);
        writeln!(s, r##"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{:.2}" stroke="#999"/>"##, y1 + 5.0).unwrap();
        writeln!(s, r#"<text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{label}</text>"#, y1 + 20.0).unwrap();
    }
    for (v, label) in ya.ticks() {
        let y = py(&ya, v);
        writeln!(s, r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="#999"/>"##, x0 - 5.0).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{label}</text>"#, x0 - 8.0, y + 4.0).unwrap();
    }
    let xlabel = if param == SweepParam::H { "h" } else { "p" };
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{xlabel}</text>"#, (x0 + x1) / 2.0, HEIGHT - 15.0).unwrap();
    writeln!(
        s,
        r#"<text x="20" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.2})">relative error</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    )
    .unwrap();

    for (i, (k, pts)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(&xa, x), py(&ya, y))).collect();
            writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" ")).unwrap();
        }
        for &(x, y) in pts {
            writeln!(s, r#"<circle class="data" cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(&xa, x), py(&ya, y)).unwrap();
        }
        let mut label = format!("lambda_{k}");
        if let Some(slope) = fitted_slope(pts, param) {
            let name = if param == SweepParam::H { "slope" } else { "r" };
            write!(label, " ({name} {slope:.2})").unwrap();
        }
        let ly = y0 + 18.0 * (i as f64 + 1.0);
        writeln!(s, r#"<text x="{:.2}" y="{ly:.2}" font-size="12" fill="{color}">{label}</text>"#, x1 + 10.0).unwrap();
    }

    if param == SweepParam::H {
        let p = rows.first().map(|r| r.p).unwrap_or(2);
        if let Some(first) = curves.values().next().filter(|c| c.len() > 1) {
            let order = 2.0 * (p as f64 - 1.0);
            let (ha, ea) = first[0];
            let hb = first[first.len() - 1].0;
            let eb = ea * (hb / ha).powf(order);
            // clip the guide to the frame
            let eb = eb.max(10f64.powf(ya.lo));
            let hb = ha * (eb / ea).powf(1.0 / order);
            writeln!(
                s,
                r##"<line class="guide" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555" stroke-dasharray="6 4"/>"##,
                px(&xa, ha),
                py(&ya, ea),
                px(&xa, hb),
                py(&ya, eb)
            )
            .unwrap();
            writeln!(s, r##"<text x="{:.2}" y="{:.2}" font-size="12" fill="#555">slope {order}</text>"##, px(&xa, hb) + 4.0, py(&ya, eb)).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Frame rectangle `(x, y, width, height)` and data point centres of an SVG
/// written by [`emit_plot`].
pub fn svg_geometry(svg: &str) -> Option<((f64, f64, f64, f64), Vec<(f64, f64)>)> {
    let attr = |line: &str, name: &str| -> Option<f64> {
        let key = format!(" {name}=\"");
        let start = line.find(&key)? + key.len();
        let end = line[start..].find('"')? + start;
        line[start..end].parse().ok()
    };
    let mut frame = None;
    let mut points = Vec::new();
    for line in svg.lines() {
        if line.contains(r#"class="frame""#) {
            frame = Some((attr(line, "x")?, attr(line, "y")?, attr(line, "width")?, attr(line, "height")?));
        } else if line.contains(r#"class="data""#) {
            points.push((attr(line, "cx")?, attr(line, "cy")?));
        }
    }
    Some((frame?, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(param: SweepParam, h: f64, p: usize, k: usize, relerr: f64) -> StudyRow {
        StudyRow { param, h, p, n_v: 0, n_u: 0, k, lambda: 1.0, relerr: Some(relerr), rate: None }
    }

    fn inside(svg: &str) -> usize {
        let ((x, y, w, h), pts) = svg_geometry(svg).unwrap();
        for (cx, cy) in &pts {
            assert!(*cx >= x && *cx <= x + w && *cy >= y && *cy <= y + h, "({cx},{cy}) outside frame");
        }
        pts.len()
    }

    #[test]
    fn p_sweep_has_one_curve_per_eigenvalue() {
        let mut rows = Vec::new();
        for p in 2..=5 {
            for k in 1..=5 {
                rows.push(row(SweepParam::P, 0.125, p, k, (-2.5 * p as f64).exp() * k as f64));
            }
        }
        let svg = emit_plot(&rows);
        assert_eq!(inside(&svg), 20);
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert!(!svg.contains("guide"));
        assert!(svg.contains("(r 2.50)"));
    }

    #[test]
    fn h_sweep_draws_slope_guide() {
        let rows: Vec<_> = [0.125, 0.0625, 0.03125].iter().map(|&h| row(SweepParam::H, h, 2, 1, h * h)).collect();
        let svg = emit_plot(&rows);
        assert_eq!(inside(&svg), 3);
        assert!(svg.contains(r#"class="guide""#));
        assert!(svg.contains("(slope 2.00)"));
    }

    #[test]
    fn single_row_has_point_but_no_fit() {
        let svg = emit_plot(&[row(SweepParam::H, 0.125, 2, 1, 1e-3)]);
        assert_eq!(inside(&svg), 1);
        assert!(!svg.contains("slope"));
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn empty_input_is_valid_svg() {
        let svg = emit_plot(&[]);
        assert_eq!(inside(&svg), 0);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
