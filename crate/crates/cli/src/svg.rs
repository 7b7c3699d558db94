//! Minimal SVG line plots of mean rounds against graph size.
//!
//! Output is plain text assembled with fixed-precision number formatting,
//! so identical summaries render to identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::CliError;
use crate::summary::SummaryRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axes {
    pub x: Scale,
    pub y: Scale,
}

/// Rendered document plus any notes about clamped values.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgPlot {
    pub document: String,
    pub warnings: Vec<String>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

struct AxisMap {
    scale: Scale,
    lo: f64,
    hi: f64,
}

impl AxisMap {
    fn new(scale: Scale, values: &[f64]) -> Self {
        let (mut lo, mut hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        match scale {
            Scale::Log => {
                lo = 10f64.powf(lo.log10().floor());
                hi = 10f64.powf(hi.log10().ceil());
                if hi <= lo {
                    hi = lo * 10.0;
                }
            }
            Scale::Linear => {
                if hi <= lo {
                    lo -= 0.5;
                    hi += 0.5;
                }
            }
        }
        AxisMap { scale, lo, hi }
    }

    /// Position in [0, 1] along the axis.
    fn unit(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => (v - self.lo) / (self.hi - self.lo),
            Scale::Log => (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10()),
        }
    }

    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log => {
                let (a, b) = (
                    self.lo.log10().round() as i32,
                    self.hi.log10().round() as i32,
                );
                (a..=b).map(|e| 10f64.powi(e)).collect()
            }
            Scale::Linear => (0..=4)
                .map(|k| self.lo + (self.hi - self.lo) * k as f64 / 4.0)
                .collect(),
        }
    }
}

fn tick_label(v: f64, scale: Scale) -> String {
    match scale {
        Scale::Log => format!("1e{}", v.log10().round() as i32),
        Scale::Linear if v.fract() == 0.0 && v.abs() < 1e9 => format!("{}", v as i64),
        Scale::Linear => format!("{v:.3}"),
    }
}

fn series_label(r: &SummaryRow) -> String {
    let mut s = format!("d={} λ={}", r.d, r.lambda);
    if let Some(a) = r.alpha {
        write!(s, " α={a}").unwrap();
    }
    s
}

/// Replaces non-positive values on a log axis by the smallest positive
/// value present (1 if none) and records a warning per replacement.
fn clamp_for_log(values: &mut [f64], what: &str, warnings: &mut Vec<String>) {
    let floor = values
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() {
        10f64.powf(floor.log10().floor())
    } else {
        1.0
    };
    for v in values.iter_mut().filter(|v| **v <= 0.0) {
        warnings.push(format!(
            "{what} value {v} is not positive on a log axis; clamped to {floor}"
        ));
        *v = floor;
    }
}

/// (d, λ bits, α bits).
type SeriesKey = (usize, u64, u64);

/// Mean rounds against n, one polyline per (d, λ, α) series. Points whose
/// trials were all censored have no mean and are skipped.
pub fn emit_svg(summary: &[SummaryRow], axes: Axes) -> Result<SvgPlot, CliError> {
    let mut series: BTreeMap<SeriesKey, Vec<(f64, f64, String)>> = BTreeMap::new();
    for r in summary {
        if let Some(m) = r.mean_rounds {
            let key = (r.d, r.lambda.to_bits(), r.alpha.unwrap_or(0.0).to_bits());
            series
                .entry(key)
                .or_default()
                .push((r.n as f64, m, series_label(r)));
        }
    }
    if series.is_empty() {
        return Err(CliError::Config(
            "nothing to plot: summary has no points with a mean".into(),
        ));
    }
    let mut warnings = Vec::new();
    let mut xs: Vec<f64> = series.values().flatten().map(|p| p.0).collect();
    let mut ys: Vec<f64> = series.values().flatten().map(|p| p.1).collect();
    if axes.x == Scale::Log {
        clamp_for_log(&mut xs, "x", &mut warnings);
    }
    if axes.y == Scale::Log {
        clamp_for_log(&mut ys, "y", &mut warnings);
    }
    let xm = AxisMap::new(axes.x, &xs);
    let ym = AxisMap::new(axes.y, &ys);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + xm.unit(x) * plot_w;
    let py = |y: f64| TOP + (1.0 - ym.unit(y)) * plot_h;

    let mut doc = String::new();
    let w = &mut doc;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(
        w,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        w,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for t in xm.ticks() {
        let x = px(t);
        let y0 = TOP + plot_h;
        writeln!(
            w,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 5.0
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            tick_label(t, axes.x)
        )
        .unwrap();
    }
    for t in ym.ticks() {
        let y = py(t);
        writeln!(
            w,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/>"#,
            LEFT - 5.0
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            tick_label(t, axes.y)
        )
        .unwrap();
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">mean rounds</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    )
    .unwrap();

    let mut k = 0;
    for (idx, points) in series.values().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let coords: Vec<(f64, f64)> = points
            .iter()
            .map(|_| {
                let c = (px(xs[k]), py(ys[k]));
                k += 1;
                c
            })
            .collect();
        let path: Vec<String> = coords
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" points="{}"/>"#,
            path.join(" ")
        )
        .unwrap();
        for (x, y) in &coords {
            writeln!(
                w,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#
            )
            .unwrap();
        }
        let ly = TOP + 14.0 * (idx as f64 + 1.0);
        let lx = WIDTH - RIGHT + 10.0;
        writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}"/>"#,
            ly - 4.0,
            lx + 16.0,
            ly - 4.0
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
            lx + 20.0,
            points[0].2
        )
        .unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(SvgPlot {
        document: doc,
        warnings,
    })
}
