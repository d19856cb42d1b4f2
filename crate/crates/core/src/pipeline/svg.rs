//! Static SVG maps and curve charts.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::geodata::RegionBoundary;
use crate::numeric::{quantile_sorted, sorted};

/// Five-class sequential ramp, light to dark.
pub const RAMP: [&str; 5] = ["#fde725", "#5ec962", "#21918c", "#3b528b", "#440154"];
pub const MISSING: &str = "#cccccc";
const SERIES: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

const W: f64 = 640.0;
const H: f64 = 480.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Quantile class breaks (20/40/60/80 %) of the finite values.
pub fn class_breaks(values: &[f64]) -> Vec<f64> {
    let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return Vec::new();
    }
    let s = sorted(&v);
    [0.2, 0.4, 0.6, 0.8].iter().map(|&p| quantile_sorted(&s, p)).collect()
}

pub fn class_of(v: f64, breaks: &[f64]) -> usize {
    breaks.iter().take_while(|&&b| v > b).count()
}

/// Regions filled by value class; missing values are grey.
pub fn choropleth(boundaries: &[RegionBoundary], values: &BTreeMap<String, f64>, title: &str, unit: &str) -> String {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for b in boundaries {
        for p in &b.polygons {
            for r in &p.rings {
                for &(x, y) in r {
                    x0 = x0.min(x);
                    x1 = x1.max(x);
                    y0 = y0.min(y);
                    y1 = y1.max(y);
                }
            }
        }
    }
    let map_w = W - 180.0;
    let map_h = H - 60.0;
    let scale = (map_w / (x1 - x0).max(1e-9)).min(map_h / (y1 - y0).max(1e-9));
    let px = |x: f64| 10.0 + (x - x0) * scale;
    let py = |y: f64| 40.0 + (y1 - y) * scale;
    let vals: Vec<f64> = values.values().copied().collect();
    let breaks = class_breaks(&vals);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="10" y="24" font-family="sans-serif" font-size="16">{}</text>"#, esc(title));
    for b in boundaries {
        let v = values.get(&b.id).copied().filter(|v| v.is_finite());
        let fill = v.map(|v| RAMP[class_of(v, &breaks)]).unwrap_or(MISSING);
        let mut d = String::new();
        for p in &b.polygons {
            for r in &p.rings {
                for (k, &(x, y)) in r.iter().enumerate() {
                    let _ = write!(d, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, px(x), py(y));
                }
                d.push_str("Z ");
            }
        }
        let _ = writeln!(
            s,
            r##"<path d="{}" fill="{fill}" fill-rule="evenodd" stroke="#333" stroke-width="0.5"><title>{}: {}</title></path>"##,
            d.trim_end(),
            esc(&b.id),
            v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into())
        );
    }
    let lx = W - 160.0;
    let _ = writeln!(s, r#"<text x="{lx}" y="52" font-family="sans-serif" font-size="12">{}</text>"#, esc(unit));
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(&breaks);
    edges.push(f64::INFINITY);
    let lo = vals.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    for (k, c) in RAMP.iter().enumerate().take(breaks.len() + 1) {
        let a = if k == 0 { lo } else { edges[k] };
        let b = if k == breaks.len() { hi } else { edges[k + 1] };
        let y = 62.0 + k as f64 * 22.0;
        let _ = writeln!(s, r#"<rect x="{lx}" y="{y}" width="16" height="16" fill="{c}"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{a:.3} – {b:.3}</text>"#,
            lx + 22.0,
            y + 12.0
        );
    }
    let y = 62.0 + (breaks.len() + 1) as f64 * 22.0;
    let _ = writeln!(s, r#"<rect x="{lx}" y="{y}" width="16" height="16" fill="{MISSING}"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">no data</text>"#, lx + 22.0, y + 12.0);
    s.push_str("</svg>\n");
    s
}

/// A step curve: each point is (cumulative quantity, cost).
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Cost-potential step chart; an optional vertical marker at `marker_x`.
pub fn curve_chart(series: &[Series], title: &str, x_label: &str, y_label: &str, marker_x: Option<f64>) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let xmax = all.clone().map(|p| p.0).filter(|v| v.is_finite()).fold(0.0, f64::max).max(marker_x.unwrap_or(0.0)).max(1e-12);
    let ymax = all.map(|p| p.1).filter(|v| v.is_finite()).fold(0.0, f64::max).max(1e-12) * 1.1;
    let (l, r, t, b) = (70.0, W - 150.0, 40.0, H - 50.0);
    let px = |x: f64| l + x / xmax * (r - l);
    let py = |y: f64| b - y / ymax * (b - t);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="10" y="24" font-family="sans-serif" font-size="16">{}</text>"#, esc(title));
    let _ = writeln!(s, r##"<path d="M{l},{t} L{l},{b} L{r},{b}" fill="none" stroke="#000"/>"##);
    for k in 0..=4 {
        let fx = xmax * k as f64 / 4.0;
        let fy = ymax * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{fx:.3}</text>"#, px(fx), b + 14.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{fy:.2}</text>"#, l - 4.0, py(fy) + 3.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#, (l + r) / 2.0, H - 14.0, esc(x_label));
    let _ = writeln!(s, r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">{}</text>"#, (t + b) / 2.0, (t + b) / 2.0, esc(y_label));
    if let Some(m) = marker_x {
        let _ = writeln!(s, r##"<path d="M{:.2},{t} L{:.2},{b}" stroke="#d62728" stroke-dasharray="4 3"/>"##, px(m), px(m));
    }
    for (k, ser) in series.iter().enumerate() {
        let c = SERIES[k % SERIES.len()];
        let mut d = String::new();
        let mut prev_x = 0.0;
        for (j, &(x, y)) in ser.points.iter().enumerate() {
            if !y.is_finite() {
                continue;
            }
            let _ = write!(d, "{}{:.2},{:.2} L{:.2},{:.2} ", if j == 0 { "M" } else { "L" }, px(prev_x), py(y), px(x), py(y));
            prev_x = x;
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#, d.trim_end());
        let ly = t + 10.0 + k as f64 * 16.0;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="12" height="3" fill="{c}"/>"#, r + 10.0, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" font-family="sans-serif" font-size="11">{}</text>"#, r + 26.0, esc(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_cover_the_range() {
        let b = class_breaks(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(b.len(), 4);
        assert_eq!(class_of(0.0, &b), 0);
        assert_eq!(class_of(6.0, &b), 4);
    }

    #[test]
    fn chart_is_well_formed() {
        let s = curve_chart(
            &[Series { label: "a<b".into(), points: vec![(1.0, 2.0), (2.0, 3.0)] }],
            "t",
            "x",
            "y",
            Some(1.5),
        );
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a&lt;b"));
    }
}
