//! Static SVG figures drawn from result tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use cluster_innovation::table::{format_number, Cell, Table};

use crate::error::CliError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    FitnessVsDe,
    DiversityVsDe,
    ParetoFront,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::FitnessVsDe, PlotKind::DiversityVsDe, PlotKind::ParetoFront];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::FitnessVsDe => "fitness_vs_dE",
            PlotKind::DiversityVsDe => "diversity_vs_dE",
            PlotKind::ParetoFront => "pareto_front",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Header plus numeric cells; non-numeric or empty cells are `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NumericTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl NumericTable {
    pub fn from_table(table: &Table) -> Self {
        let rows = table
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Num(v) => Some(*v),
                        Cell::Int(v) => Some(*v as f64),
                        Cell::Text(s) => s.parse().ok(),
                        Cell::Missing => None,
                    })
                    .collect()
            })
            .collect();
        NumericTable {
            header: table.header.clone(),
            rows,
        }
    }

    pub fn read_csv(path: &Path) -> Result<Self, CliError> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let header = reader
            .headers()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            rows.push(record.iter().map(|f| f.parse().ok()).collect());
        }
        Ok(NumericTable { header, rows })
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// First of `names` present in the header.
    fn require(&self, kind: PlotKind, names: &[&str]) -> Result<usize, CliError> {
        names.iter().find_map(|n| self.column(n)).ok_or_else(|| {
            CliError::Config(format!("{} plot needs a `{}` column", kind.name(), names.join("` or `")))
        })
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        Frame {
            x: padded_range(xs),
            y: padded_range(ys),
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    if span <= 0.0 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    (lo - 0.05 * span, hi + 0.05 * span)
}

/// About five round tick positions inside `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let mut out = Vec::new();
    let first = (lo / step).ceil();
    for i in 0.. {
        let t = (first + i as f64) * step;
        if t > hi + step * 1e-9 {
            break;
        }
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
    }
    out
}

fn label(v: f64) -> String {
    let s = format_number(v);
    if s.len() <= 8 {
        s
    } else {
        format!("{v:.3e}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open_svg(out: &mut String, frame: &Frame, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, (LEFT + WIDTH - RIGHT) / 2.0, escape(title));
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(out, r#"<g class="axes" stroke="black" fill="none">"#);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}"/>"#);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    for t in ticks(frame.x.0, frame.x.1) {
        let x = frame.px(t);
        let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{}"/>"#, y1 + 5.0);
    }
    for t in ticks(frame.y.0, frame.y.1) {
        let y = frame.py(t);
        let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}"/>"#, x0 - 5.0);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="tick-labels">"#);
    for t in ticks(frame.x.0, frame.x.1) {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, frame.px(t), y1 + 18.0, label(t));
    }
    for t in ticks(frame.y.0, frame.y.1) {
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{}</text>"#, x0 - 8.0, frame.py(t), label(t));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 10.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn no_data(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<text class="no-data" x="{}" y="{}" text-anchor="middle" fill="gray">no data</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        (TOP + HEIGHT - BOTTOM) / 2.0
    );
}

fn legend_entry(out: &mut String, i: usize, color: &str, text: &str) {
    let (x, y) = (WIDTH - RIGHT + 15.0, TOP + 10.0 + 18.0 * i as f64);
    let _ = writeln!(out, r#"<rect x="{x}" y="{}" width="12" height="12" fill="{color}"/>"#, y - 9.0);
    let _ = writeln!(out, r#"<text x="{}" y="{y}" dominant-baseline="middle">{}</text>"#, x + 18.0, escape(text));
}

/// Lines of an indicator mean against `d_E`, one per `p_E` value. Rows
/// sharing `(p_E, d_E)` are averaged, so raw replication tables and grids
/// with further axes plot too.
fn line_plot(table: &NumericTable, kind: PlotKind, y_names: &[&str], y_label: &str) -> Result<String, CliError> {
    let x_col = table.require(kind, &["d_E"])?;
    let y_col = table.require(kind, y_names)?;
    let group_col = table.column("p_E");
    let mut groups: BTreeMap<u64, BTreeMap<u64, (f64, usize)>> = BTreeMap::new();
    for row in &table.rows {
        let (Some(x), Some(y)) = (row[x_col], row[y_col]) else { continue };
        let g = group_col.and_then(|c| row[c]).unwrap_or(f64::NAN);
        let cell = groups.entry(g.to_bits()).or_default().entry(x.to_bits()).or_insert((0.0, 0));
        cell.0 += y;
        cell.1 += 1;
    }
    let mut series: Vec<(f64, Vec<(f64, f64)>)> = groups
        .into_iter()
        .map(|(g, pts)| {
            let mut pts: Vec<(f64, f64)> = pts.into_iter().map(|(x, (s, n))| (f64::from_bits(x), s / n as f64)).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            (f64::from_bits(g), pts)
        })
        .collect();
    series.sort_by(|a, b| a.0.total_cmp(&b.0));
    let all = series.iter().flat_map(|(_, p)| p.iter().copied());
    let frame = Frame::fit(all.clone().map(|p| p.0), all.map(|p| p.1));

    let mut out = String::new();
    let title = format!("{y_label} vs distance decay");
    open_svg(&mut out, &frame, &title, "d_E", y_label);
    if series.is_empty() {
        no_data(&mut out);
    }
    for (i, (g, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let vertices: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            vertices.join(" ")
        );
        if !g.is_nan() {
            legend_entry(&mut out, i, color, &format!("p_E = {}", label(*g)));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Scatter of mean fitness against mean diversity. Marker area grows with
/// the sample count; colour follows `d_E` (or `p_E`) when present.
fn pareto_plot(table: &NumericTable) -> Result<String, CliError> {
    let kind = PlotKind::ParetoFront;
    let f_col = table.require(kind, &["mean_f"])?;
    let d_col = table.require(kind, &["mean_d"])?;
    let n_col = table.require(kind, &["n_samples"])?;
    let color_by = ["d_E", "p_E"].into_iter().find_map(|n| table.column(n).map(|c| (n, c)));
    let points: Vec<(f64, f64, f64, Option<f64>)> = table
        .rows
        .iter()
        .filter_map(|row| {
            let (f, d, n) = (row[f_col]?, row[d_col]?, row[n_col]?);
            Some((f, d, n, color_by.and_then(|(_, c)| row[c])))
        })
        .collect();
    let frame = Frame::fit(points.iter().map(|p| p.0), points.iter().map(|p| p.1));
    let shade = padded_range(points.iter().filter_map(|p| p.3));

    let mut out = String::new();
    open_svg(&mut out, &frame, "Fitness / diversity trade-off", "mean average fitness", "mean diversity");
    if points.is_empty() {
        no_data(&mut out);
    }
    let _ = writeln!(out, r#"<g class="markers" fill-opacity="0.7" stroke="black" stroke-width="0.5">"#);
    for &(f, d, n, c) in &points {
        let radius = 2.0 + 1.5 * n.max(0.0).sqrt();
        let color = c.map_or_else(|| PALETTE[0].to_owned(), |v| ramp((v - shade.0) / (shade.1 - shade.0)));
        let _ = writeln!(
            out,
            r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="{radius:.2}" fill="{color}"><title>n = {}</title></circle>"#,
            frame.px(f),
            frame.py(d),
            label(n)
        );
    }
    let _ = writeln!(out, "</g>");
    if let Some((name, _)) = color_by {
        if !points.is_empty() {
            legend_entry(&mut out, 0, &ramp(0.0), &format!("low {name}"));
            legend_entry(&mut out, 1, &ramp(1.0), &format!("high {name}"));
        }
    }
    legend_entry(&mut out, 3, "none", "size: samples");
    out.push_str("</svg>\n");
    Ok(out)
}

/// Blue to red colour ramp over `[0, 1]`.
fn ramp(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.5 };
    let r = (40.0 + 200.0 * t).round() as u8;
    let b = (240.0 - 200.0 * t).round() as u8;
    format!("#{r:02x}50{b:02x}")
}

pub fn render(table: &NumericTable, kind: PlotKind) -> Result<String, CliError> {
    match kind {
        PlotKind::FitnessVsDe => line_plot(table, kind, &["avg_fitness_mean", "avg_fitness"], "average fitness"),
        PlotKind::DiversityVsDe => line_plot(table, kind, &["diversity_mean", "diversity"], "diversity"),
        PlotKind::ParetoFront => pareto_plot(table),
    }
}

/// Renders `kind` from `table` into `path`.
pub fn plot_static(table: &NumericTable, kind: PlotKind, path: &Path) -> Result<(), CliError> {
    let svg = render(table, kind)?;
    std::fs::write(path, svg).map_err(|e| CliError::io(path, e))
}
