//! Grid diagrams: marginal supports and inequality overlays on the cell grid.
//!
//! Layout: for two settings the grid has rows `coords[0]` and columns
//! `coords[1]`; for three settings it is split into `2^n` side-by-side slices
//! indexed by `coords[2]`; a single setting gives one row.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::LinearForm;
use crate::scenario::{Event, GridIndex, Outcomes, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Style {
    /// The support is one contiguous run along a single axis.
    Line,
    Ribbon,
    DashedTarget,
}

impl Style {
    fn name(self) -> &'static str {
        match self {
            Style::Line => "line",
            Style::Ribbon => "ribbon",
            Style::DashedTarget => "target",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    pub label: String,
    /// Flat cell indices, ascending.
    pub cells: BTreeSet<usize>,
    pub style: Style,
    pub color: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDiagram {
    pub scenario: Scenario,
    pub layers: Vec<Layer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Monospaced text; `ascii` swaps box-drawing characters for `+-|`.
    Text { ascii: bool },
    Svg,
}

/// Slice, row and column of every cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub slices: usize,
    pub rows: usize,
    pub cols: usize,
}

pub fn layout(scenario: Scenario) -> Result<Layout> {
    let g = scenario.grid_size();
    match scenario.settings() {
        1 => Ok(Layout { slices: 1, rows: 1, cols: g }),
        2 => Ok(Layout { slices: 1, rows: g, cols: g }),
        3 => Ok(Layout { slices: g, rows: g, cols: g }),
        m => Err(Error::UnsupportedScenario(format!("grid diagrams need 1 to 3 settings, got {m}"))),
    }
}

/// `(slice, row, col)` of a flat cell.
pub fn position(scenario: Scenario, cell: usize) -> (usize, usize, usize) {
    let c = scenario.grid_index(cell).coords;
    match c.len() {
        1 => (0, 0, c[0]),
        2 => (0, c[0], c[1]),
        _ => (c[2], c[0], c[1]),
    }
}

fn is_line(scenario: Scenario, cells: &BTreeSet<usize>) -> bool {
    let pos: Vec<(usize, usize, usize)> = cells.iter().map(|&c| position(scenario, c)).collect();
    let Some(&first) = pos.first() else { return false };
    let along = |f: fn(&(usize, usize, usize)) -> usize, g: fn(&(usize, usize, usize)) -> (usize, usize)| {
        pos.iter().all(|p| g(p) == g(&first)) && {
            let mut v: Vec<usize> = pos.iter().map(f).collect();
            v.sort_unstable();
            v.windows(2).all(|w| w[1] == w[0] + 1)
        }
    };
    along(|p| p.2, |p| (p.0, p.1)) || along(|p| p.1, |p| (p.0, p.2))
}

fn support_layer(scenario: Scenario, e: &Event, style: Option<Style>, color: usize) -> Result<Layer> {
    scenario.validate_event(e)?;
    let cells: BTreeSet<usize> = scenario.support_cells(e).into_iter().collect();
    let style = style.unwrap_or(if is_line(scenario, &cells) { Style::Line } else { Style::Ribbon });
    Ok(Layer { label: e.to_string(), cells, style, color })
}

impl GridDiagram {
    pub fn empty(scenario: Scenario) -> Result<Self> {
        layout(scenario)?;
        Ok(GridDiagram { scenario, layers: Vec::new() })
    }

    pub fn cells_of(&self, cell: &GridIndex) -> Result<Vec<&Layer>> {
        let c = self.scenario.flat_index(cell)?;
        Ok(self.layers.iter().filter(|l| l.cells.contains(&c)).collect())
    }
}

/// One layer holding the support of `P_s(o)`.
pub fn diagram_of_marginal(scenario: Scenario, e: &Event) -> Result<GridDiagram> {
    layout(scenario)?;
    Ok(GridDiagram { scenario, layers: vec![support_layer(scenario, e, None, 0)?] })
}

/// One layer per positive unit term, then a dashed layer for the negative term.
///
/// Only forms with zero constant, `+1` positive coefficients and at most one
/// `−1` term are drawable.
pub fn diagram_of_form(form: &LinearForm) -> Result<GridDiagram> {
    let sc = form.scenario();
    layout(sc)?;
    let (pos, neg) = form.split_by_sign();
    let unit = |c: &crate::scalar::Rational| c.abs().is_one();
    if !form.constant().is_zero() || neg.len() > 1 || !pos.iter().chain(&neg).all(|t| unit(&t.coef)) {
        return Err(Error::UnsupportedForm(format!(
            "{form}: need unit positive terms, at most one −1 term and no constant"
        )));
    }
    let mut layers = Vec::with_capacity(pos.len() + neg.len());
    for (i, t) in pos.iter().enumerate() {
        layers.push(support_layer(sc, &t.event, None, i)?);
    }
    for t in neg {
        layers.push(support_layer(sc, &t.event, Some(Style::DashedTarget), layers.len())?);
    }
    Ok(GridDiagram { scenario: sc, layers })
}

/// `P_s(o)` for every setting vector `s` at fixed outcomes, one diagram each.
pub fn marginal_family(scenario: Scenario, outcomes: &Outcomes) -> Result<Vec<GridDiagram>> {
    scenario.validate_outcomes(outcomes)?;
    scenario
        .setting_vectors()
        .into_iter()
        .map(|s| diagram_of_marginal(scenario, &Event { settings: s, outcomes: outcomes.clone() }))
        .collect()
}

pub fn emit(diagram: &GridDiagram, format: Format) -> Result<String> {
    match format {
        Format::Text { ascii } => emit_text(diagram, ascii),
        Format::Svg => emit_svg(diagram),
    }
}

/// Several diagrams separated by blank lines (text) or stacked vertically (SVG).
pub fn emit_many(diagrams: &[GridDiagram], format: Format) -> Result<String> {
    match format {
        Format::Text { .. } => {
            let parts = diagrams.iter().map(|d| emit(d, format)).collect::<Result<Vec<_>>>()?;
            Ok(parts.join("\n"))
        }
        Format::Svg => {
            let parts = diagrams.iter().map(emit_svg_body).collect::<Result<Vec<_>>>()?;
            let width = parts.iter().map(|p| p.width).max().unwrap_or(0);
            let height: usize = parts.iter().map(|p| p.height).sum();
            let mut out = svg_header(width, height);
            let mut y = 0;
            for p in &parts {
                let _ = writeln!(out, "<g transform=\"translate(0,{y})\">");
                out.push_str(&p.body);
                out.push_str("</g>\n");
                y += p.height;
            }
            out.push_str("</svg>\n");
            Ok(out)
        }
    }
}

fn layer_letter(i: usize) -> char {
    (b'A' + (i % 26) as u8) as char
}

struct Frame {
    h: char,
    v: char,
    corners: [[char; 3]; 3],
}

const BOX: Frame = Frame { h: '─', v: '│', corners: [['┌', '┬', '┐'], ['├', '┼', '┤'], ['└', '┴', '┘']] };
const ASCII: Frame = Frame { h: '-', v: '|', corners: [['+', '+', '+'], ['+', '+', '+'], ['+', '+', '+']] };

fn emit_text(d: &GridDiagram, ascii: bool) -> Result<String> {
    let lay = layout(d.scenario)?;
    let frame = if ascii { &ASCII } else { &BOX };
    let width = d.layers.len().max(1);
    let blank = if d.layers.is_empty() { vec![' '] } else { vec!['.'; width] };
    let mut grid = vec![vec![vec![blank; lay.cols]; lay.rows]; lay.slices];
    for (i, layer) in d.layers.iter().enumerate() {
        for &cell in &layer.cells {
            let (s, r, c) = position(d.scenario, cell);
            grid[s][r][c][i] = layer_letter(i);
        }
    }
    let label_w = lay.rows.saturating_sub(1).to_string().len();
    let col_w = width.max(lay.cols.saturating_sub(1).to_string().len());
    let rule = |kind: usize| -> String {
        let k = &frame.corners[kind];
        let mut s = String::new();
        s.push(k[0]);
        for c in 0..lay.cols {
            s.extend(std::iter::repeat_n(frame.h, col_w));
            s.push(if c + 1 == lay.cols { k[2] } else { k[1] });
        }
        s
    };
    let mut slices_text: Vec<Vec<String>> = Vec::new();
    for (s, slice) in grid.iter().enumerate() {
        let mut lines = Vec::new();
        if lay.slices > 1 {
            lines.push(format!("{:label_w$} i2 = {s}", ""));
        }
        let mut header = format!("{:label_w$}  ", "");
        for c in 0..lay.cols {
            let _ = write!(header, "{c:^col_w$} ");
        }
        lines.push(header.trim_end().to_string());
        lines.push(format!("{:label_w$} {}", "", rule(0)));
        for (r, row) in slice.iter().enumerate() {
            let mut line = format!("{r:>label_w$} {}", frame.v);
            for cell in row {
                let cell: String = cell.iter().collect();
                let _ = write!(line, "{cell:<col_w$}{}", frame.v);
            }
            lines.push(line);
            lines.push(format!("{:label_w$} {}", "", rule(if r + 1 == lay.rows { 2 } else { 1 })));
        }
        slices_text.push(lines);
    }
    let mut out = format!("{}\n", d.scenario);
    let widths: Vec<usize> = slices_text.iter().map(|l| l.iter().map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    for i in 0..slices_text[0].len() {
        let mut line = String::new();
        for (k, lines) in slices_text.iter().enumerate() {
            if k > 0 {
                line.push_str("  ");
            }
            let pad = widths[k] - lines[i].chars().count();
            line.push_str(&lines[i]);
            line.extend(std::iter::repeat_n(' ', pad));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for (i, layer) in d.layers.iter().enumerate() {
        let _ = writeln!(out, "{}  {:<6}  {}", layer_letter(i), layer.style.name(), layer.label);
    }
    Ok(out)
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];
const CELL: usize = 24;
const MARGIN: usize = 28;
const SLICE_GAP: usize = 24;
const LEGEND_LINE: usize = 18;

struct SvgPart {
    body: String,
    width: usize,
    height: usize,
}

fn svg_header(width: usize, height: usize) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn emit_svg(d: &GridDiagram) -> Result<String> {
    let part = emit_svg_body(d)?;
    let mut out = svg_header(part.width, part.height);
    out.push_str(&part.body);
    out.push_str("</svg>\n");
    Ok(out)
}

fn emit_svg_body(d: &GridDiagram) -> Result<SvgPart> {
    let lay = layout(d.scenario)?;
    let slice_w = lay.cols * CELL;
    let grid_w = lay.slices * slice_w + (lay.slices - 1) * SLICE_GAP;
    let grid_h = lay.rows * CELL;
    let width = grid_w + 2 * MARGIN;
    let height = grid_h + 2 * MARGIN + d.layers.len() * LEGEND_LINE;
    let origin = |s: usize, r: usize, c: usize| (MARGIN + s * (slice_w + SLICE_GAP) + c * CELL, MARGIN + r * CELL);
    let mut b = String::new();
    let _ = writeln!(b, "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>");
    b.push_str("<g fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\">\n");
    for s in 0..lay.slices {
        for r in 0..lay.rows {
            for c in 0..lay.cols {
                let (x, y) = origin(s, r, c);
                let _ = writeln!(b, "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\"/>");
            }
        }
        if lay.slices > 1 {
            let (x, _) = origin(s, 0, 0);
            let _ = writeln!(
                b,
                "<text x=\"{x}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"#333333\" stroke=\"none\">i2 = {s}</text>",
                MARGIN - 8
            );
        }
    }
    b.push_str("</g>\n");
    for (i, layer) in d.layers.iter().enumerate() {
        let color = PALETTE[layer.color % PALETTE.len()];
        let inset = 1 + 2 * (i % 5);
        let _ = writeln!(b, "<g data-layer=\"{}\">", escape(&layer.label));
        if layer.style != Style::DashedTarget {
            for &cell in &layer.cells {
                let (s, r, c) = position(d.scenario, cell);
                let (x, y) = origin(s, r, c);
                let _ = writeln!(
                    b,
                    "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{color}\" fill-opacity=\"0.18\" stroke=\"none\"/>"
                );
            }
        }
        let dash = if layer.style == Style::DashedTarget { " stroke-dasharray=\"4 3\"" } else { "" };
        let _ = writeln!(b, "<path fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash} d=\"{}\"/>", outline(d, layer, inset, &origin));
        if layer.style == Style::Line && layer.cells.len() > 1 {
            let first = position(d.scenario, *layer.cells.first().expect("nonempty"));
            let last = position(d.scenario, *layer.cells.last().expect("nonempty"));
            let (x1, y1) = origin(first.0, first.1, first.2);
            let (x2, y2) = origin(last.0, last.1, last.2);
            let h = CELL / 2;
            let _ = writeln!(
                b,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"3\"/>",
                x1 + h,
                y1 + h,
                x2 + h,
                y2 + h
            );
        }
        b.push_str("</g>\n");
    }
    for (i, layer) in d.layers.iter().enumerate() {
        let color = PALETTE[layer.color % PALETTE.len()];
        let y = MARGIN + grid_h + 14 + i * LEGEND_LINE;
        let _ = writeln!(
            b,
            "<text x=\"{MARGIN}\" y=\"{y}\" font-family=\"monospace\" font-size=\"12\" fill=\"{color}\">{}  {}  {}</text>",
            layer_letter(i),
            layer.style.name(),
            escape(&layer.label)
        );
    }
    Ok(SvgPart { body: b, width, height })
}

/// Boundary edges of a layer's cells within each slice, inset by `inset` pixels.
fn outline(d: &GridDiagram, layer: &Layer, inset: usize, origin: &impl Fn(usize, usize, usize) -> (usize, usize)) -> String {
    let pos: BTreeSet<(usize, usize, usize)> = layer.cells.iter().map(|&c| position(d.scenario, c)).collect();
    let has = |s: usize, r: isize, c: isize| r >= 0 && c >= 0 && pos.contains(&(s, r as usize, c as usize));
    let mut path = String::new();
    for &(s, r, c) in &pos {
        let (x, y) = origin(s, r, c);
        let (ri, ci) = (r as isize, c as isize);
        let (x0, y0, x1, y1) = (x + inset, y + inset, x + CELL - inset, y + CELL - inset);
        // Edges run to the cell border where the neighbor is covered, so runs join up.
        let left = if has(s, ri, ci - 1) { x } else { x0 };
        let right = if has(s, ri, ci + 1) { x + CELL } else { x1 };
        let top = if has(s, ri - 1, ci) { y } else { y0 };
        let bottom = if has(s, ri + 1, ci) { y + CELL } else { y1 };
        if !has(s, ri - 1, ci) {
            let _ = write!(path, "M{left} {y0}H{right}");
        }
        if !has(s, ri + 1, ci) {
            let _ = write!(path, "M{left} {y1}H{right}");
        }
        if !has(s, ri, ci - 1) {
            let _ = write!(path, "M{x0} {top}V{bottom}");
        }
        if !has(s, ri, ci + 1) {
            let _ = write!(path, "M{x1} {top}V{bottom}");
        }
    }
    path
}
