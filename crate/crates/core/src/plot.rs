//! Self-contained SVG figures: trajectories, weight heatmaps, partition maps.
//!
//! Documents contain no timestamps, random ids or external references, and
//! every coordinate is printed with two decimals, so identical input gives
//! identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::domain::WorldPoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlotError {
    #[error("input has no data rows")]
    Empty,

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("line {line}: cannot parse `{value}` in column `{column}`")]
    BadValue {
        line: u64,
        column: String,
        value: String,
    },

    #[error("line {line}: expected {expected} values, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("malformed csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Trajectory3d,
    TrajectoryXy,
    PositionVsTime,
    WeightHeatmap,
    PartitionMap,
}

impl PlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::Trajectory3d => "trajectory3d",
            PlotKind::TrajectoryXy => "trajectory_xy",
            PlotKind::PositionVsTime => "position_vs_time",
            PlotKind::WeightHeatmap => "weight_heatmap",
            PlotKind::PartitionMap => "partition_map",
        }
    }
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            PlotKind::Trajectory3d,
            PlotKind::TrajectoryXy,
            PlotKind::PositionVsTime,
            PlotKind::WeightHeatmap,
            PlotKind::PartitionMap,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| format!("unknown plot kind {s:?}"))
    }
}

pub const DEFAULT_COLORS: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub width_px: u32,
    pub height_px: u32,
    /// Cycled per agent (or per region).
    pub colors: Vec<String>,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            width_px: 800,
            height_px: 600,
            colors: DEFAULT_COLORS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl PlotStyle {
    fn color(&self, k: usize) -> &str {
        if self.colors.is_empty() {
            "#000000"
        } else {
            &self.colors[k % self.colors.len()]
        }
    }
}

// ---------------------------------------------------------------- input

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// One agent's path, keyed as e.g. `uav 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub kind: String,
    pub id: u64,
    pub points: Vec<TrackPoint>,
}

impl Track {
    pub fn label(&self) -> String {
        format!("{} {}", self.kind, self.id)
    }
}

/// Parses a trajectory CSV into per-agent tracks, UAVs before survivors.
pub fn parse_trajectories(text: &str) -> Result<Vec<Track>, PlotError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| PlotError::Csv(e.to_string()))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(PlotError::Empty);
    }
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PlotError::MissingColumn(name.to_string()))
    };
    let (ct, ck, ci, cx, cy, cz) = (
        col("t")?,
        col("agent_kind")?,
        col("agent_id")?,
        col("x")?,
        col("y")?,
        col("z")?,
    );

    let mut tracks: BTreeMap<(u8, u64), Track> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| PlotError::Csv(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |c: usize| -> Result<f64, PlotError> {
            let raw = rec.get(c).unwrap_or("");
            raw.trim().parse().map_err(|_| PlotError::BadValue {
                line,
                column: headers[c].to_string(),
                value: raw.to_string(),
            })
        };
        let kind = rec.get(ck).unwrap_or("").to_string();
        let raw_id = rec.get(ci).unwrap_or("");
        let id: u64 = raw_id.trim().parse().map_err(|_| PlotError::BadValue {
            line,
            column: "agent_id".into(),
            value: raw_id.to_string(),
        })?;
        let point = TrackPoint {
            t: num(ct)?,
            x: num(cx)?,
            y: num(cy)?,
            z: num(cz)?,
        };
        let rank = if kind == "uav" { 0 } else { 1 };
        tracks
            .entry((rank, id))
            .or_insert_with(|| Track {
                kind: kind.clone(),
                id,
                points: Vec::new(),
            })
            .points
            .push(point);
    }
    if tracks.is_empty() {
        return Err(PlotError::Empty);
    }
    Ok(tracks.into_values().collect())
}

/// Parses a headerless numeric grid, first line = southmost row.
pub fn parse_grid<T: FromStr>(text: &str) -> Result<Vec<Vec<T>>, PlotError> {
    let mut rows = Vec::new();
    let mut width = None;
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(c, v)| {
                v.trim().parse::<T>().map_err(|_| PlotError::BadValue {
                    line: k as u64 + 1,
                    column: c.to_string(),
                    value: v.to_string(),
                })
            })
            .collect::<Result<Vec<T>, _>>()?;
        let w = *width.get_or_insert(row.len());
        if row.len() != w {
            return Err(PlotError::Ragged {
                line: k + 1,
                expected: w,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(PlotError::Empty);
    }
    Ok(rows)
}

// ---------------------------------------------------------------- svg writer

struct Svg {
    buf: String,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

impl Svg {
    fn new(style: &PlotStyle, title: &str) -> Self {
        let (w, h) = (style.width_px, style.height_px);
        let mut buf = String::new();
        let _ = writeln!(
            buf,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(buf, "<title>{}</title>", esc(title));
        let _ = writeln!(
            buf,
            r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##
        );
        Svg { buf }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        let _ = writeln!(
            self.buf,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{stroke}" stroke-width="{width:.2}"/>"#,
            a.0, a.1, b.0, b.1
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, class: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", p.0, p.1))
            .collect();
        let _ = writeln!(
            self.buf,
            r#"<polyline class="{class}" points="{}" fill="none" stroke="{stroke}" stroke-width="1.50"/>"#,
            coords.join(" ")
        );
    }

    fn polygon(&mut self, pts: &[(f64, f64)], fill: &str, stroke: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", p.0, p.1))
            .collect();
        let _ = writeln!(
            self.buf,
            r#"<polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="1.00"/>"#,
            coords.join(" ")
        );
    }

    fn start_marker(&mut self, p: (f64, f64), color: &str) {
        let _ = writeln!(
            self.buf,
            r##"<circle class="start" cx="{:.2}" cy="{:.2}" r="4.00" fill="{color}" stroke="#000000" stroke-width="0.80"/>"##,
            p.0, p.1
        );
    }

    fn end_marker(&mut self, p: (f64, f64), color: &str) {
        let _ = writeln!(
            self.buf,
            r##"<rect class="end" x="{:.2}" y="{:.2}" width="8.00" height="8.00" fill="{color}" stroke="#000000" stroke-width="0.80"/>"##,
            p.0 - 4.0,
            p.1 - 4.0
        );
    }

    fn text(&mut self, p: (f64, f64), anchor: &str, s: &str) {
        let _ = writeln!(
            self.buf,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}">{}</text>"#,
            p.0,
            p.1,
            esc(s)
        );
    }

    fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

/// Affine map from a data box onto a pixel box, y pointing up.
#[derive(Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

impl Frame {
    fn new(xr: (f64, f64), yr: (f64, f64), px: (f64, f64, f64, f64)) -> Self {
        let pad = |(a, b): (f64, f64)| {
            if b - a > 1e-12 {
                (a, b)
            } else {
                (a - 0.5, b + 0.5)
            }
        };
        let (x0, x1) = pad(xr);
        let (y0, y1) = pad(yr);
        Frame {
            x0,
            x1,
            y0,
            y1,
            left: px.0,
            top: px.1,
            right: px.2,
            bottom: px.3,
        }
    }

    /// Same scale on both axes, centred in the pixel box.
    fn equal(xr: (f64, f64), yr: (f64, f64), px: (f64, f64, f64, f64)) -> Self {
        let f = Frame::new(xr, yr, px);
        let sx = (f.right - f.left) / (f.x1 - f.x0);
        let sy = (f.bottom - f.top) / (f.y1 - f.y0);
        let s = sx.min(sy);
        let w = (f.x1 - f.x0) * s;
        let h = (f.y1 - f.y0) * s;
        let left = f.left + ((f.right - f.left) - w) / 2.0;
        let top = f.top + ((f.bottom - f.top) - h) / 2.0;
        Frame {
            left,
            right: left + w,
            top,
            bottom: top + h,
            ..f
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left),
            self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top),
        )
    }

    fn axes(&self, svg: &mut Svg, xlabel: &str, ylabel: &str) {
        svg.line(
            (self.left, self.bottom),
            (self.right, self.bottom),
            "#000000",
            1.0,
        );
        svg.line(
            (self.left, self.bottom),
            (self.left, self.top),
            "#000000",
            1.0,
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = self.x0 + f * (self.x1 - self.x0);
            let yv = self.y0 + f * (self.y1 - self.y0);
            let (px, _) = self.map(xv, self.y0);
            let (_, py) = self.map(self.x0, yv);
            svg.line((px, self.bottom), (px, self.bottom + 4.0), "#000000", 1.0);
            svg.text((px, self.bottom + 16.0), "middle", &format!("{xv:.1}"));
            svg.line((self.left - 4.0, py), (self.left, py), "#000000", 1.0);
            svg.text((self.left - 6.0, py + 4.0), "end", &format!("{yv:.1}"));
        }
        svg.text(
            ((self.left + self.right) / 2.0, self.bottom + 32.0),
            "middle",
            xlabel,
        );
        svg.text(
            (self.left - 40.0, (self.top + self.bottom) / 2.0),
            "middle",
            ylabel,
        );
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn legend(svg: &mut Svg, style: &PlotStyle, tracks: &[Track]) {
    let x = style.width_px as f64 - 110.0;
    for (k, tr) in tracks.iter().enumerate() {
        let y = 20.0 + 16.0 * k as f64;
        svg.line((x, y - 4.0), (x + 18.0, y - 4.0), style.color(k), 3.0);
        svg.text((x + 24.0, y), "start", &tr.label());
    }
}

fn draw_tracks(
    svg: &mut Svg,
    style: &PlotStyle,
    tracks: &[Track],
    project: impl Fn(&TrackPoint) -> (f64, f64),
) {
    for (k, tr) in tracks.iter().enumerate() {
        let color = style.color(k);
        let pts: Vec<(f64, f64)> = tr.points.iter().map(&project).collect();
        svg.polyline(&pts, color, "track");
        svg.start_marker(pts[0], color);
        svg.end_marker(*pts.last().expect("tracks are non-empty"), color);
    }
}

fn plot_box(style: &PlotStyle) -> (f64, f64, f64, f64) {
    (
        70.0,
        30.0,
        style.width_px as f64 - 130.0,
        style.height_px as f64 - 50.0,
    )
}

// ---------------------------------------------------------------- figures

/// Top-down x-y projection of every agent's path.
pub fn trajectory_xy(tracks: &[Track], style: &PlotStyle) -> String {
    let mut svg = Svg::new(style, "trajectories, x-y projection");
    let xr = range(tracks.iter().flat_map(|t| t.points.iter().map(|p| p.x)));
    let yr = range(tracks.iter().flat_map(|t| t.points.iter().map(|p| p.y)));
    let frame = Frame::equal(xr, yr, plot_box(style));
    frame.axes(&mut svg, "x (m)", "y (m)");
    draw_tracks(&mut svg, style, tracks, |p| frame.map(p.x, p.y));
    legend(&mut svg, style, tracks);
    svg.finish()
}

fn iso(x: f64, y: f64, z: f64) -> (f64, f64) {
    let (c, s) = (30f64.to_radians().cos(), 30f64.to_radians().sin());
    ((x - y) * c, (x + y) * s + z)
}

/// Fixed-angle isometric view of the 3-D paths over the ground plane.
pub fn trajectory3d(tracks: &[Track], style: &PlotStyle) -> String {
    let mut svg = Svg::new(style, "trajectories, isometric view");
    let (gx0, gx1) = range(tracks.iter().flat_map(|t| t.points.iter().map(|p| p.x)));
    let (gy0, gy1) = range(tracks.iter().flat_map(|t| t.points.iter().map(|p| p.y)));
    let ground = [
        iso(gx0, gy0, 0.0),
        iso(gx1, gy0, 0.0),
        iso(gx1, gy1, 0.0),
        iso(gx0, gy1, 0.0),
    ];
    let projected: Vec<(f64, f64)> = tracks
        .iter()
        .flat_map(|t| t.points.iter().map(|p| iso(p.x, p.y, p.z)))
        .chain(ground)
        .collect();
    let frame = Frame::equal(
        range(projected.iter().map(|p| p.0)),
        range(projected.iter().map(|p| p.1)),
        plot_box(style),
    );
    let ground_px: Vec<(f64, f64)> = ground.iter().map(|&(u, v)| frame.map(u, v)).collect();
    svg.polygon(&ground_px, "#f2f2f2", "#999999");
    for (k, (x, y)) in [(gx1, gy0), (gx0, gy1)].into_iter().enumerate() {
        let (u, v) = iso(x, y, 0.0);
        let label = if k == 0 { "x" } else { "y" };
        svg.text(frame.map(u, v), "middle", label);
    }
    // drop lines from each track's start to the ground
    for (k, tr) in tracks.iter().enumerate() {
        let p = tr.points[0];
        let (a, b) = (iso(p.x, p.y, p.z), iso(p.x, p.y, 0.0));
        svg.line(
            frame.map(a.0, a.1),
            frame.map(b.0, b.1),
            style.color(k),
            0.5,
        );
    }
    draw_tracks(&mut svg, style, tracks, |p| {
        let (u, v) = iso(p.x, p.y, p.z);
        frame.map(u, v)
    });
    legend(&mut svg, style, tracks);
    svg.finish()
}

type Coord = fn(&TrackPoint) -> f64;

/// x, y and z against time in three stacked panels.
pub fn position_vs_time(tracks: &[Track], style: &PlotStyle) -> String {
    let mut svg = Svg::new(style, "position against time");
    let (left, top, right, bottom) = plot_box(style);
    let panel_h = (bottom - top) / 3.0;
    let tr_range = range(tracks.iter().flat_map(|t| t.points.iter().map(|p| p.t)));
    let axes: [(&str, Coord); 3] = [("x (m)", |p| p.x), ("y (m)", |p| p.y), ("z (m)", |p| p.z)];
    for (k, (label, get)) in axes.into_iter().enumerate() {
        let ptop = top + k as f64 * panel_h;
        let frame = Frame::new(
            tr_range,
            range(tracks.iter().flat_map(|t| t.points.iter().map(get))),
            (left, ptop + 8.0, right, ptop + panel_h - 40.0),
        );
        frame.axes(&mut svg, if k == 2 { "t (s)" } else { "" }, label);
        draw_tracks(&mut svg, style, tracks, |p| frame.map(p.t, get(p)));
    }
    legend(&mut svg, style, tracks);
    svg.finish()
}

/// Light-to-dark ramp; `f` in [0, 1], larger is darker.
pub fn ramp(f: f64) -> (u8, u8, u8) {
    let f = f.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    (lerp(255.0, 8.0), lerp(255.0, 29.0), lerp(217.0, 88.0))
}

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn grid_frame(style: &PlotStyle, cols: usize, rows: usize) -> (f64, f64, f64) {
    let (left, top, right, bottom) = plot_box(style);
    let cell = ((right - left) / cols as f64).min((bottom - top) / rows as f64);
    (left, top, cell)
}

/// Per-cell weights on a log-scaled monotone ramp; heavier cells are darker.
pub fn weight_heatmap(grid: &[Vec<u64>], style: &PlotStyle) -> String {
    let mut svg = Svg::new(style, "cell weights");
    let rows = grid.len();
    let cols = grid[0].len();
    let (left, top, cell) = grid_frame(style, cols, rows);
    let all = grid.iter().flatten().copied();
    let lo = all.clone().min().unwrap_or(1).max(1) as f64;
    let hi = all.max().unwrap_or(1).max(1) as f64;
    let span = hi.ln() - lo.ln();
    for (j, row) in grid.iter().enumerate() {
        for (i, &w) in row.iter().enumerate() {
            let f = if span > 0.0 {
                ((w.max(1) as f64).ln() - lo.ln()) / span
            } else {
                1.0
            };
            let (x, y) = (left + i as f64 * cell, top + (rows - 1 - j) as f64 * cell);
            let _ = writeln!(
                svg.buf,
                r#"<rect class="cell" x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{}"><title>({i}, {j}): {w}</title></rect>"#,
                hex(ramp(f))
            );
        }
    }
    // colour bar
    let bx = left + cols as f64 * cell + 20.0;
    for k in 0..10 {
        let f = k as f64 / 9.0;
        let y = top + (9 - k) as f64 * 16.0;
        let _ = writeln!(
            svg.buf,
            r#"<rect class="bar" x="{bx:.2}" y="{y:.2}" width="16.00" height="16.00" fill="{}"/>"#,
            hex(ramp(f))
        );
    }
    svg.text((bx + 20.0, top + 12.0), "start", &format!("{hi}"));
    svg.text((bx + 20.0, top + 156.0), "start", &format!("{lo}"));
    svg.finish()
}

/// Owner regions in distinct colours, optional seed markers in world units.
pub fn partition_map(
    grid: &[Vec<usize>],
    seeds: &[WorldPoint],
    cell_size_m: f64,
    style: &PlotStyle,
) -> String {
    let mut svg = Svg::new(style, "partition");
    let rows = grid.len();
    let cols = grid[0].len();
    let (left, top, cell) = grid_frame(style, cols, rows);
    for (j, row) in grid.iter().enumerate() {
        for (i, &owner) in row.iter().enumerate() {
            let (x, y) = (left + i as f64 * cell, top + (rows - 1 - j) as f64 * cell);
            let _ = writeln!(
                svg.buf,
                r#"<rect class="cell" x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{}" fill-opacity="0.55"/>"#,
                style.color(owner)
            );
        }
    }
    let scale = cell / cell_size_m;
    let bottom = top + rows as f64 * cell;
    for (k, s) in seeds.iter().enumerate() {
        let (x, y) = (left + s.x * scale, bottom - s.y * scale);
        let _ = writeln!(
            svg.buf,
            r##"<circle class="seed" cx="{x:.2}" cy="{y:.2}" r="5.00" fill="{}" stroke="#000000" stroke-width="1.50"/>"##,
            style.color(k)
        );
        svg.text((x + 7.0, y - 7.0), "start", &format!("uav {k}"));
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRAJ: &str = "t,agent_kind,agent_id,x,y,z,mode\n\
        0,uav,0,0,0,2,lawnmower\n0,survivor,0,5,5,0,moving\n\
        0.1,uav,0,0.2,0,2,lawnmower\n0.1,survivor,0,5,5.05,0,moving\n";

    #[test]
    fn parses_tracks_uavs_first() {
        let tracks = parse_trajectories(TRAJ).unwrap();
        assert_eq!(tracks.len(), 2);
        assert_eq!(tracks[0].label(), "uav 0");
        assert_eq!(tracks[1].points[1].y, 5.05);
    }

    #[test]
    fn missing_column_is_named() {
        let text = "t,agent_kind,agent_id,x,z\n0,uav,0,1,2\n";
        assert_eq!(
            parse_trajectories(text),
            Err(PlotError::MissingColumn("y".into()))
        );
    }

    #[test]
    fn empty_inputs_rejected() {
        assert_eq!(parse_trajectories(""), Err(PlotError::Empty));
        assert_eq!(
            parse_trajectories("t,agent_kind,agent_id,x,y,z,mode\n"),
            Err(PlotError::Empty)
        );
        assert_eq!(parse_grid::<u64>("\n"), Err(PlotError::Empty));
    }

    #[test]
    fn ragged_grid_rejected() {
        assert!(matches!(
            parse_grid::<u64>("1,2\n3\n"),
            Err(PlotError::Ragged { line: 2, .. })
        ));
    }

    #[test]
    fn ramp_darkens_monotonically() {
        let lum = |f: f64| {
            let (r, g, b) = ramp(f);
            0.2126 * r as f64 + 0.7152 * g as f64 + 0.0722 * b as f64
        };
        for k in 0..100 {
            assert!(lum(k as f64 / 100.0) > lum((k + 1) as f64 / 100.0));
        }
    }

    #[test]
    fn trajectory_figures_have_one_track_each() {
        let tracks = parse_trajectories(TRAJ).unwrap();
        let style = PlotStyle::default();
        for svg in [
            trajectory_xy(&tracks, &style),
            trajectory3d(&tracks, &style),
        ] {
            assert!(svg.starts_with("<svg"));
            assert!(svg.ends_with("</svg>\n"));
            assert_eq!(svg.matches("class=\"track\"").count(), 2);
            assert_eq!(svg.matches("class=\"start\"").count(), 2);
            assert_eq!(svg.matches("class=\"end\"").count(), 2);
        }
        assert_eq!(
            position_vs_time(&tracks, &style)
                .matches("class=\"track\"")
                .count(),
            6
        );
    }

    #[test]
    fn partition_map_colours_by_owner() {
        let grid = vec![vec![0, 0, 1], vec![2, 2, 1]];
        let svg = partition_map(
            &grid,
            &[WorldPoint::new(0.5, 0.5)],
            1.0,
            &PlotStyle::default(),
        );
        assert_eq!(svg.matches("class=\"cell\"").count(), 6);
        assert_eq!(svg.matches("class=\"seed\"").count(), 1);
        for c in &DEFAULT_COLORS[..3] {
            assert!(svg.contains(&format!("fill=\"{c}\" fill-opacity")));
        }
    }
}
