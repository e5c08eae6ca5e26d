//! Minimal self-contained SVG line charts: axes, ticks, legend, dashed
//! reference lines, point markers and error bars. No external plotting
//! dependency, so reproduction artifacts are single files.

use std::fmt::Write as _;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

const AXIS: &str = "#333";
const REF: &str = "#666";

const PALETTE: [&str; 8] = [
    "#c23b22", "#2a7f62", "#275d8e", "#8e6127", "#6b3fa0", "#3f8fa0", "#a03f6b", "#555555",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesKind {
    Line,
    Dashed,
    Points,
    /// Points with `+-` error whiskers from `y_err`.
    ErrorBars,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub kind: SeriesKind,
    pub points: Vec<(f64, f64)>,
    pub y_err: Option<Vec<f64>>,
    /// Palette index; series with the same index share a color.
    pub color: usize,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    series: Vec<Series>,
    hlines: Vec<(f64, String)>,
    vlines: Vec<(f64, String)>,
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            log_y: false,
            series: Vec::new(),
            hlines: Vec::new(),
            vlines: Vec::new(),
        }
    }

    pub fn add_series(&mut self, label: &str, kind: SeriesKind, points: Vec<(f64, f64)>) {
        let color = self.series.len() % PALETTE.len();
        self.series.push(Series {
            label: label.to_string(),
            kind,
            points,
            y_err: None,
            color,
        });
    }

    pub fn add_series_colored(
        &mut self,
        label: &str,
        kind: SeriesKind,
        points: Vec<(f64, f64)>,
        color: usize,
    ) {
        self.series.push(Series {
            label: label.to_string(),
            kind,
            points,
            y_err: None,
            color,
        });
    }

    pub fn add_error_bars(&mut self, label: &str, points: Vec<(f64, f64)>, y_err: Vec<f64>) {
        let color = self.series.len() % PALETTE.len();
        self.series.push(Series {
            label: label.to_string(),
            kind: SeriesKind::ErrorBars,
            points,
            y_err: Some(y_err),
            color,
        });
    }

    /// Dashed horizontal reference line.
    pub fn hline(&mut self, y: f64, label: &str) {
        self.hlines.push((y, label.to_string()));
    }

    /// Dashed vertical reference line.
    pub fn vline(&mut self, x: f64, label: &str) {
        self.vlines.push((x, label.to_string()));
    }

    fn data_ranges(&self) -> ((f64, f64), (f64, f64)) {
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for (i, &(px, py)) in s.points.iter().enumerate() {
                if !px.is_finite() || !py.is_finite() {
                    continue;
                }
                if self.log_y && py <= 0.0 {
                    continue;
                }
                x.0 = x.0.min(px);
                x.1 = x.1.max(px);
                let (lo, hi) = match &s.y_err {
                    Some(errs) => (py - errs[i], py + errs[i]),
                    None => (py, py),
                };
                let lo = if self.log_y && lo <= 0.0 { py } else { lo };
                y.0 = y.0.min(lo);
                y.1 = y.1.max(hi);
            }
        }
        for &(hy, _) in &self.hlines {
            if !self.log_y || hy > 0.0 {
                y.0 = y.0.min(hy);
                y.1 = y.1.max(hy);
            }
        }
        for &(vx, _) in &self.vlines {
            x.0 = x.0.min(vx);
            x.1 = x.1.max(vx);
        }
        if !x.0.is_finite() || x.0 == x.1 {
            x = (0.0, 1.0);
        }
        if !y.0.is_finite() || y.0 == y.1 {
            y = (0.0, 1.0);
        }
        // breathing room on the y axis
        if self.log_y {
            y.0 *= 0.8;
            y.1 *= 1.25;
        } else {
            let pad = 0.05 * (y.1 - y.0);
            y.0 -= pad;
            y.1 += pad;
        }
        (x, y)
    }

    pub fn to_svg(&self) -> String {
        let ((x_lo, x_hi), (y_lo, y_hi)) = self.data_ranges();
        let (ty_lo, ty_hi) = if self.log_y {
            (y_lo.log10(), y_hi.log10())
        } else {
            (y_lo, y_hi)
        };
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = move |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let ty = |y: f64| if self.log_y { y.log10() } else { y };
        let sy = move |y: f64| MARGIN_TOP + (1.0 - (y - ty_lo) / (ty_hi - ty_lo)) * plot_h;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // axes box
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="{AXIS}" stroke-width="1"/>"#
        );

        // x ticks
        for t in nice_ticks(x_lo, x_hi) {
            let px = sx(t);
            let _ = writeln!(
                out,
                r#"<line x1="{px:.1}" y1="{}" x2="{px:.1}" y2="{}" stroke="{AXIS}"/>"#,
                MARGIN_TOP + plot_h,
                MARGIN_TOP + plot_h + 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{px:.1}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                MARGIN_TOP + plot_h + 18.0,
                fmt_tick(t)
            );
        }
        // y ticks
        let y_ticks = if self.log_y {
            log_ticks(y_lo, y_hi)
        } else {
            nice_ticks(y_lo, y_hi)
        };
        for t in y_ticks {
            let py = sy(ty(t));
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{py:.1}" x2="{MARGIN_LEFT}" y2="{py:.1}" stroke="{AXIS}"/>"#,
                MARGIN_LEFT - 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 8.0,
                py + 4.0,
                fmt_tick(t)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        // reference lines
        for (y, label) in &self.hlines {
            if self.log_y && *y <= 0.0 {
                continue;
            }
            let py = sy(ty(*y));
            let _ = writeln!(
                out,
                r#"<line x1="{MARGIN_LEFT}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="{REF}" stroke-width="1" stroke-dasharray="6 4"/>"#,
                MARGIN_LEFT + plot_w
            );
            if !label.is_empty() {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end" fill="{REF}">{}</text>"#,
                    MARGIN_LEFT + plot_w - 4.0,
                    py - 4.0,
                    escape(label)
                );
            }
        }
        for (x, label) in &self.vlines {
            let px = sx(*x);
            let _ = writeln!(
                out,
                r#"<line x1="{px:.1}" y1="{MARGIN_TOP}" x2="{px:.1}" y2="{:.1}" stroke="{REF}" stroke-width="1" stroke-dasharray="6 4"/>"#,
                MARGIN_TOP + plot_h
            );
            if !label.is_empty() {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" fill="{REF}">{}</text>"#,
                    px + 4.0,
                    MARGIN_TOP + 12.0,
                    escape(label)
                );
            }
        }

        // series
        for s in &self.series {
            let color = PALETTE[s.color % PALETTE.len()];
            match s.kind {
                SeriesKind::Line | SeriesKind::Dashed => {
                    let dash = if s.kind == SeriesKind::Dashed {
                        r#" stroke-dasharray="7 4""#
                    } else {
                        ""
                    };
                    let mut path = String::new();
                    let mut pen_down = false;
                    for &(x, y) in &s.points {
                        if !y.is_finite() || (self.log_y && y <= 0.0) {
                            pen_down = false;
                            continue;
                        }
                        let cmd = if pen_down { 'L' } else { 'M' };
                        let _ = write!(path, "{cmd}{:.2} {:.2} ", sx(x), sy(ty(y)));
                        pen_down = true;
                    }
                    let _ = writeln!(
                        out,
                        r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#,
                        path.trim_end()
                    );
                }
                SeriesKind::Points => {
                    for &(x, y) in &s.points {
                        if !y.is_finite() || (self.log_y && y <= 0.0) {
                            continue;
                        }
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="2.6" fill="{color}"/>"#,
                            sx(x),
                            sy(ty(y))
                        );
                    }
                }
                SeriesKind::ErrorBars => {
                    let errs = s.y_err.as_ref().expect("error-bar series carries y_err");
                    for (&(x, y), &e) in s.points.iter().zip(errs) {
                        if !y.is_finite() || (self.log_y && y <= 0.0) {
                            continue;
                        }
                        let px = sx(x);
                        let (top, bot) = (sy(ty(y + e)), sy(ty((y - e).max(if self.log_y { y * 0.5 } else { y - e }))));
                        let _ = writeln!(
                            out,
                            r#"<line x1="{px:.2}" y1="{top:.2}" x2="{px:.2}" y2="{bot:.2}" stroke="{color}" stroke-width="1.2"/>"#
                        );
                        for py in [top, bot] {
                            let _ = writeln!(
                                out,
                                r#"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="{color}" stroke-width="1.2"/>"#,
                                px - 3.0,
                                px + 3.0
                            );
                        }
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{px:.2}" cy="{:.2}" r="2.4" fill="{color}"/>"#,
                            sy(ty(y))
                        );
                    }
                }
            }
        }

        // legend
        let mut ly = MARGIN_TOP + 14.0;
        for s in &self.series {
            if s.label.is_empty() {
                continue;
            }
            let color = PALETTE[s.color % PALETTE.len()];
            let lx = MARGIN_LEFT + plot_w - 200.0;
            match s.kind {
                SeriesKind::Points | SeriesKind::ErrorBars => {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                        lx + 11.0,
                        ly - 4.0
                    );
                }
                _ => {
                    let dash = if s.kind == SeriesKind::Dashed {
                        r#" stroke-dasharray="7 4""#
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        out,
                        r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"{dash}/>"#,
                        ly - 4.0,
                        lx + 22.0,
                        ly - 4.0
                    );
                }
            }
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{ly:.1}" font-family="sans-serif" font-size="11">{}</text>"#,
                lx + 28.0,
                escape(&s.label)
            );
            ly += 16.0;
        }

        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_tick(t: f64) -> String {
    if t != 0.0 && (t.abs() < 1e-3 || t.abs() >= 1e4) {
        format!("{t:.0e}")
    } else {
        let s = format!("{t:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

/// 5-8 ticks at a 1/2/5 step covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| span / s <= 8.0)
        .unwrap_or(mag * 10.0);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(if t.abs() < 1e-12 * span { 0.0 } else { t });
        t += step;
    }
    out
}

/// Decade ticks for a log axis.
fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut e = lo.log10().floor() as i32;
    while 10f64.powi(e) <= hi {
        let v = 10f64.powi(e);
        if v >= lo {
            out.push(v);
        }
        e += 1;
    }
    if out.is_empty() {
        out.push(lo);
        out.push(hi);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_svg() {
        let mut c = Chart::new("demo", "t", "rho");
        c.add_series("sim", SeriesKind::Line, vec![(0.0, 0.3), (1.0, 0.5), (2.0, 0.7)]);
        c.add_series("theory", SeriesKind::Dashed, vec![(0.0, 0.75), (2.0, 0.75)]);
        c.hline(0.75, "steady");
        c.vline(0.5, "threshold");
        c.add_error_bars("data", vec![(1.0, 0.5)], vec![0.05]);
        let svg = c.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.matches("<circle").count() >= 2);
    }

    #[test]
    fn log_axis_skips_non_positive_values() {
        let mut c = Chart::new("log", "t", "rho");
        c.log_y = true;
        c.add_series("s", SeriesKind::Line, vec![(0.0, 0.0), (1.0, 0.1), (2.0, 1.0)]);
        let svg = c.to_svg();
        assert!(svg.contains("<path"));
    }

    #[test]
    fn ticks_cover_the_range() {
        let ticks = nice_ticks(0.0, 50.0);
        assert!(ticks.len() >= 5 && ticks.len() <= 9);
        assert!(ticks[0] >= 0.0 && *ticks.last().unwrap() <= 50.0);
    }
}
