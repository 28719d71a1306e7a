//! Static SVG line plots of a result table.

use std::fmt::Write as _;

use super::table::ResultTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.1e}")
    } else {
        format!("{}", (v * 1e4).round() / 1e4)
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64> + Clone, allow_log: bool) -> Axis {
        let lo = values.clone().fold(f64::INFINITY, f64::min);
        let hi = values.fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            return Axis { lo: 0.0, hi: 1.0, log: false };
        }
        if allow_log && lo > 0.0 && hi / lo > 100.0 {
            return Axis { lo: lo.log10().floor(), hi: hi.log10().ceil(), log: true };
        }
        if hi > lo {
            let pad = (hi - lo) * 0.05;
            Axis { lo: lo - pad, hi: hi + pad, log: false }
        } else {
            Axis { lo: lo - 0.5, hi: hi + 0.5, log: false }
        }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.max(1e-300).log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo as i32, self.hi as i32);
            return (a..=b).map(|e| (10f64.powi(e), format!("1e{e}"))).collect();
        }
        (0..=5)
            .map(|k| {
                let v = self.lo + (self.hi - self.lo) * k as f64 / 5.0;
                (v, fmt_tick(v))
            })
            .collect()
    }
}

/// Plots every (strategy, metric) series of `metric`, or of every metric when
/// `metric` is `None`. The y axis turns logarithmic when positive values span
/// more than two decades.
pub fn render_svg(table: &ResultTable, metric: Option<&str>) -> String {
    let rows: Vec<_> = table.rows.iter().filter(|r| metric.is_none_or(|m| r.metric == m)).collect();
    let mut series: Vec<(String, String)> = Vec::new();
    for r in &rows {
        let key = (r.strategy.clone(), r.metric.clone());
        if !series.contains(&key) {
            series.push(key);
        }
    }
    let xs = Axis::fit(rows.iter().map(|r| r.x), false);
    let ys = Axis::fit(rows.iter().map(|r| r.value).filter(|v| v.is_finite()), true);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + xs.frac(x) * pw;
    let py = |y: f64| TOP + (1.0 - ys.frac(y)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let title = table.spec_value("experiment").unwrap_or("results");
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for (v, label) in xs.ticks() {
        let x = px(v);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 20.0, escape(&label));
    }
    for (v, label) in ys.ticks() {
        let y = py(v);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, escape(&label));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">x</text>"#, LEFT + pw / 2.0, HEIGHT - 15.0);

    for (k, (strategy, m)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| &r.strategy == strategy && &r.metric == m && r.value.is_finite())
            .filter(|r| !ys.log || r.value > 0.0)
            .map(|r| (px(r.x), py(r.value)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, path.join(" "));
        for (x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let label = if metric.is_some() { strategy.clone() } else { format!("{strategy} {m}") };
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&label));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::table::Row;

    #[test]
    fn renders_each_series() {
        let mut t = ResultTable::new(vec![("experiment".into(), "demo <1>".into())]);
        for (k, s) in ["a", "b"].iter().enumerate() {
            for i in 0..4 {
                t.push(Row {
                    x: i as f64,
                    strategy: s.to_string(),
                    metric: "wer".into(),
                    value: 10f64.powi(-(i + k as i32)),
                    stderr: 0.0,
                    trials: 1,
                    seed: 0,
                });
            }
        }
        let svg = render_svg(&t, Some("wer"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("1e-4"));
        assert!(svg.contains("demo &lt;1&gt;"));
        assert_eq!(render_svg(&t, Some("wer")), svg);
    }

    #[test]
    fn empty_table() {
        let svg = render_svg(&ResultTable::default(), None);
        assert!(svg.contains("</svg>"));
    }
}
