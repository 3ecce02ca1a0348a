//! Deterministic SVG output: PCA scatterplots and circular network layouts.
//!
//! Every marker carries its exact coordinates as `data-pc1`/`data-pc2`
//! attributes so plots can be checked against the projection table.

use std::f64::consts::PI;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use syntonet::export::xml_escape;
use syntonet::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    /// Reference samples.
    Circle,
    /// Syntonets.
    Square,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub pc1: f64,
    pub pc2: f64,
    pub marker: Marker,
    /// Ensemble or temperament name.
    pub group: String,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorBy {
    Group,
    Beta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// How syntonet squares are filled. Model circles always use their
    /// ensemble colour.
    pub color_by: ColorBy,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            title: String::new(),
            x_label: "PC1".into(),
            y_label: "PC2".into(),
            color_by: ColorBy::Group,
            width: 760.0,
            height: 560.0,
        }
    }
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Fixed colours for the known names, palette order for anything else.
fn group_color(name: &str, order: &[String]) -> &'static str {
    let fixed = [
        ("ER", 0),
        ("WS1", 1),
        ("WS2", 2),
        ("BA", 3),
        ("GEO", 4),
        ("SBM", 5),
        ("equal", 0),
        ("just", 3),
        ("meantone", 2),
        ("pythagorean", 4),
        ("werckmeister", 1),
    ];
    if let Some(&(_, i)) = fixed.iter().find(|(n, _)| *n == name) {
        return PALETTE[i];
    }
    let i = order.iter().position(|g| g == name).unwrap_or(0);
    PALETTE[i % PALETTE.len()]
}

/// Blue to yellow through green, sampled at `t` in [0, 1].
pub fn ramp(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn first_seen(points: &[PlotPoint], marker: Marker) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in points.iter().filter(|p| p.marker == marker) {
        if !out.contains(&p.group) {
            out.push(p.group.clone());
        }
    }
    out
}

fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / count as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Renders a scatterplot. Fails on an empty point set or non-finite
/// coordinates.
pub fn render_scatter(points: &[PlotPoint], style: &PlotStyle) -> Result<String> {
    if points.is_empty() {
        bail!("nothing to plot");
    }
    if points.iter().any(|p| !(p.pc1.is_finite() && p.pc2.is_finite())) {
        bail!("non-finite coordinate in plot data");
    }
    let (w, h) = (style.width, style.height);
    let legend_w = 170.0;
    let (left, right, top, bottom) = (70.0, w - legend_w - 20.0, 50.0, h - 60.0);

    let bounds = |f: fn(&PlotPoint) -> f64| {
        let lo = points.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
        (lo - pad, hi + pad)
    };
    let (x0, x1) = bounds(|p| p.pc1);
    let (y0, y1) = bounds(|p| p.pc2);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);

    let models = first_seen(points, Marker::Circle);
    let syntonets = first_seen(points, Marker::Square);
    let betas: Vec<f64> = points.iter().filter(|p| p.marker == Marker::Square).filter_map(|p| p.beta).collect();
    let b_lo = betas.iter().copied().fold(f64::INFINITY, f64::min);
    let b_hi = betas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let by_beta = style.color_by == ColorBy::Beta && !betas.is_empty();
    let beta_t = |b: f64| if b_hi > b_lo { (b - b_lo) / (b_hi - b_lo) } else { 0.5 };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#)?;
    if !style.title.is_empty() {
        writeln!(
            s,
            r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
            (left + right) / 2.0,
            xml_escape(&style.title)
        )?;
    }
    // Axes, ticks and light grid.
    writeln!(
        s,
        r##"<rect x="{left}" y="{top}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
        right - left,
        bottom - top
    )?;
    for t in nice_ticks(x0, x1, 6) {
        let x = sx(t);
        writeln!(s, r##"<line x1="{x:.2}" y1="{top}" x2="{x:.2}" y2="{bottom}" stroke="#eee"/>"##)?;
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 16.0,
            fmt_tick(t)
        )?;
    }
    for t in nice_ticks(y0, y1, 6) {
        let y = sy(t);
        writeln!(s, r##"<line x1="{left}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="#eee"/>"##)?;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            y + 4.0,
            fmt_tick(t)
        )?;
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        h - 20.0,
        xml_escape(&style.x_label)
    )?;
    writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        xml_escape(&style.y_label)
    )?;

    // Models first so syntonets stay visible on top.
    writeln!(s, r#"<g id="models">"#)?;
    for p in points.iter().filter(|p| p.marker == Marker::Circle) {
        writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.55" data-group="{}" data-pc1="{}" data-pc2="{}"/>"#,
            sx(p.pc1),
            sy(p.pc2),
            group_color(&p.group, &models),
            xml_escape(&p.group),
            p.pc1,
            p.pc2
        )?;
    }
    writeln!(s, "</g>")?;
    writeln!(s, r#"<g id="syntonets">"#)?;
    for p in points.iter().filter(|p| p.marker == Marker::Square) {
        let fill = match (by_beta, p.beta) {
            (true, Some(b)) => ramp(beta_t(b)),
            _ => group_color(&p.group, &syntonets).to_string(),
        };
        let beta = p.beta.map(|b| format!(r#" data-beta="{b}""#)).unwrap_or_default();
        writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="{fill}" stroke="#000" stroke-width="0.8" data-group="{}"{beta} data-pc1="{}" data-pc2="{}"/>"##,
            sx(p.pc1) - 4.0,
            sy(p.pc2) - 4.0,
            xml_escape(&p.group),
            p.pc1,
            p.pc2
        )?;
    }
    writeln!(s, "</g>")?;

    // Legend.
    let lx = right + 20.0;
    let mut ly = top + 10.0;
    writeln!(s, r#"<g id="legend">"#)?;
    if !models.is_empty() {
        writeln!(s, r#"<text x="{lx}" y="{ly:.2}" font-weight="bold">models</text>"#)?;
        ly += 18.0;
        for g in &models {
            writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 5.0,
                ly - 4.0,
                group_color(g, &models),
                lx + 16.0,
                ly,
                xml_escape(g)
            )?;
            ly += 17.0;
        }
        ly += 8.0;
    }
    if !syntonets.is_empty() {
        writeln!(s, r#"<text x="{lx}" y="{ly:.2}" font-weight="bold">syntonets</text>"#)?;
        ly += 18.0;
        if by_beta {
            let names = syntonets.join(", ");
            writeln!(
                s,
                r##"<rect x="{lx}" y="{:.2}" width="8" height="8" fill="#fff" stroke="#000"/><text x="{:.2}" y="{ly:.2}">{}</text>"##,
                ly - 8.0,
                lx + 16.0,
                xml_escape(&names)
            )?;
            ly += 22.0;
            writeln!(s, r#"<defs><linearGradient id="beta-ramp" x1="0" y1="1" x2="0" y2="0">"#)?;
            for k in 0..=4 {
                let t = k as f64 / 4.0;
                writeln!(s, r#"<stop offset="{t}" stop-color="{}"/>"#, ramp(t))?;
            }
            writeln!(s, "</linearGradient></defs>")?;
            let bar_h = 120.0;
            writeln!(
                s,
                r##"<rect x="{lx}" y="{ly:.2}" width="14" height="{bar_h}" fill="url(#beta-ramp)" stroke="#333"/>"##
            )?;
            writeln!(s, r#"<text x="{:.2}" y="{:.2}">β = {b_hi}</text>"#, lx + 20.0, ly + 9.0)?;
            writeln!(s, r#"<text x="{:.2}" y="{:.2}">β = {b_lo}</text>"#, lx + 20.0, ly + bar_h)?;
        } else {
            for g in &syntonets {
                writeln!(
                    s,
                    r##"<rect x="{lx}" y="{:.2}" width="8" height="8" fill="{}" stroke="#000"/><text x="{:.2}" y="{ly:.2}">{}</text>"##,
                    ly - 8.0,
                    group_color(g, &syntonets),
                    lx + 16.0,
                    xml_escape(g)
                )?;
                ly += 17.0;
            }
        }
    }
    writeln!(s, "</g>")?;
    writeln!(s, "</svg>")?;
    Ok(s)
}

/// Nodes evenly spaced on a circle in index order, starting at the top and
/// running clockwise. Nodes outside `highlight` are drawn hollow. Node
/// colour follows pitch class (index mod 12).
pub fn render_network(g: &Graph, highlight: &[bool], title: &str) -> Result<String> {
    let n = g.node_count();
    if n == 0 {
        bail!("nothing to draw");
    }
    if highlight.len() != n {
        bail!("highlight mask has {} entries for {n} nodes", highlight.len());
    }
    let size = 640.0;
    let (c, r) = (size / 2.0, size / 2.0 - 60.0);
    let pos: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64 - PI / 2.0;
            (c + r * a.cos(), c + 20.0 + r * a.sin())
        })
        .collect();
    let mut s = String::new();
    let hh = size + 40.0;
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{hh}" viewBox="0 0 {size} {hh}" font-family="sans-serif" font-size="7">"#
    )?;
    writeln!(s, r#"<rect width="{size}" height="{hh}" fill="white"/>"#)?;
    writeln!(
        s,
        r#"<text x="{c}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        xml_escape(title)
    )?;
    writeln!(s, r##"<g id="edges" stroke="#555" stroke-opacity="0.35" stroke-width="0.7">"##)?;
    for e in g.edges() {
        let (a, b) = (pos[e.source], pos[e.target]);
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            a.0, a.1, b.0, b.1
        )?;
    }
    writeln!(s, "</g>")?;
    writeln!(s, r#"<g id="nodes">"#)?;
    let hue = |i: usize| format!("hsl({}, 65%, 50%)", (i % 12) * 30);
    for (i, &(x, y)) in pos.iter().enumerate() {
        let label = g.labels().get(i).cloned().unwrap_or_else(|| i.to_string());
        let fill = if highlight[i] { hue(i) } else { "white".into() };
        writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{fill}" stroke="{}" data-node="{i}"><title>{}</title></circle>"#,
            hue(i),
            xml_escape(&label)
        )?;
        let a = 2.0 * PI * i as f64 / n as f64 - PI / 2.0;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            c + (r + 14.0) * a.cos(),
            c + 22.0 + (r + 14.0) * a.sin(),
            xml_escape(&label)
        )?;
    }
    writeln!(s, "</g>")?;
    writeln!(s, "</svg>")?;
    Ok(s)
}
