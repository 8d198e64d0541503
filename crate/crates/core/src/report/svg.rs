//! Grouped bar charts as standalone SVG. Coordinates are printed with two
//! decimals so identical data always yields identical bytes.

use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#1f4e79", "#2e75b6", "#9dc3e6", "#c55a11", "#f4b183", "#548235", "#a9d18e", "#7f6000",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    pub groups: Vec<String>,
    pub series: Vec<String>,
    /// `values[group][series]`; `None` leaves a gap.
    pub values: Vec<Vec<Option<f64>>>,
    /// Text drawn above each bar (significance stars), same shape as
    /// `values`.
    pub marks: Vec<Vec<String>>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

impl BarChart {
    pub fn render(&self) -> String {
        let bar = 16.0;
        let gap = 28.0;
        let left = 64.0;
        let top = 48.0;
        let plot_h = 260.0;
        let n_series = self.series.len().max(1) as f64;
        let group_w = n_series * bar + gap;
        let plot_w = (self.groups.len() as f64 * group_w).max(160.0);
        let legend_w = 20.0
            + 7.0
                * self
                    .series
                    .iter()
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0) as f64;
        let width = left + plot_w + 24.0 + legend_w + 16.0;
        let height = top + plot_h + 64.0;

        let finite = self
            .values
            .iter()
            .flatten()
            .flatten()
            .copied()
            .filter(|v| v.is_finite());
        let (lo, hi) = finite.fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let lo = (lo * 10.0).floor() / 10.0;
        let hi = ((hi * 10.0).ceil() / 10.0).max(lo + 0.1);
        let y = |v: f64| top + plot_h * (hi - v) / (hi - lo);
        let step = if hi - lo > 1.0 { 0.2 } else { 0.1 };

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" font-size="14" text-anchor="middle">{}</text>"#,
            left + plot_w / 2.0,
            escape(&self.title)
        );
        let ticks = ((hi - lo) / step).round() as i64;
        for k in 0..=ticks {
            let v = lo + k as f64 * step;
            let _ = writeln!(
                s,
                r##"<line x1="{left:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"##,
                left + plot_w,
                y(v),
                y(v),
                left - 6.0,
                y(v) + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            top + plot_h / 2.0,
            escape(&self.y_label)
        );
        for (g, name) in self.groups.iter().enumerate() {
            let x0 = left + gap / 2.0 + g as f64 * group_w;
            for (k, value) in self.values[g].iter().enumerate() {
                let Some(v) = value.filter(|v| v.is_finite()) else {
                    continue;
                };
                let x = x0 + k as f64 * bar;
                let (y_top, h) = if v >= 0.0 {
                    (y(v), y(0.0) - y(v))
                } else {
                    (y(0.0), y(v) - y(0.0))
                };
                let _ = writeln!(
                    s,
                    r#"<rect x="{x:.2}" y="{y_top:.2}" width="{:.2}" height="{h:.2}" fill="{}"><title>{}: {v:.3}</title></rect>"#,
                    bar - 2.0,
                    PALETTE[k % PALETTE.len()],
                    escape(&self.series[k])
                );
                let mark = self
                    .marks
                    .get(g)
                    .and_then(|m| m.get(k))
                    .map(String::as_str)
                    .unwrap_or("");
                if !mark.is_empty() {
                    let ty = if v >= 0.0 {
                        y_top - 3.0
                    } else {
                        y_top + h + 10.0
                    };
                    let _ = writeln!(
                        s,
                        r#"<text x="{:.2}" y="{ty:.2}" font-size="9" text-anchor="middle">{}</text>"#,
                        x + (bar - 2.0) / 2.0,
                        escape(mark)
                    );
                }
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                x0 + n_series * bar / 2.0,
                top + plot_h + 18.0,
                escape(name)
            );
        }
        let _ = writeln!(
            s,
            r#"<line x1="{left:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="black"/>"#,
            left + plot_w,
            y(0.0),
            y(0.0)
        );
        let lx = left + plot_w + 24.0;
        for (k, name) in self.series.iter().enumerate() {
            let ly = top + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<rect x="{lx:.2}" y="{ly:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                PALETTE[k % PALETTE.len()],
                lx + 14.0,
                ly + 9.0,
                escape(name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
