//! SVG pictures of tilings and of patterns sheet by sheet, and CSV tables.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::alphabet::{shaded_regions, Pattern, Slot};
use crate::codec::on_sheet;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::tiling::{make_tile, Row, TilingWindow, Viewport};

/// Drawing parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    /// Plane rectangle shown.
    pub viewport: Viewport,
    /// Stroke width of tile and cell outlines, in pixels.
    pub stroke: f64,
    /// Stroke width of the decoded overlay, in pixels.
    pub overlay_stroke: f64,
    /// Draw letter names.
    pub labels: bool,
    /// Index into the sheet roots of a pattern, for per-sheet views.
    pub sheet: usize,
    /// Pixels per plane unit.
    pub scale: f64,
}

impl RenderSpec {
    /// Default strokes around a viewport.
    pub fn new(viewport: Viewport, scale: f64) -> Self {
        RenderSpec { viewport, stroke: 1.0, overlay_stroke: 2.0, labels: true, sheet: 0, scale }
    }

    /// Rejects a non-positive scale, negative strokes and degenerate viewports.
    pub fn validate(&self) -> Result<()> {
        let v = &self.viewport;
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Input(format!("scale must be positive, got {}", self.scale)));
        }
        if !(self.stroke >= 0.0 && self.overlay_stroke >= 0.0) {
            return Err(Error::Input("stroke widths must be non-negative".into()));
        }
        if !(v.x1 > v.x0 && v.y1 > v.y0) || ![v.x0, v.x1, v.y0, v.y1].iter().all(|c| c.is_finite()) {
            return Err(Error::Input(format!("degenerate viewport {v:?}")));
        }
        Ok(())
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.viewport.x0) * self.scale, (self.viewport.y1 - y) * self.scale)
    }

    fn meets(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> bool {
        let v = &self.viewport;
        x0 < v.x1 && x1 > v.x0 && y0 < v.y1 && y1 > v.y0
    }
}

/// Fixed three-decimal formatting without negative zero.
fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn points(spec: &RenderSpec, pts: &[(f64, f64)]) -> String {
    pts.iter()
        .map(|&(x, y)| {
            let (u, v) = spec.px(x, y);
            format!("{},{}", num(u), num(v))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn header(spec: &RenderSpec) -> String {
    let v = &spec.viewport;
    let (w, h) = ((v.x1 - v.x0) * spec.scale, (v.y1 - v.y0) * spec.scale);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(w),
        h = num(h)
    );
    let _ = writeln!(out, r#"<clipPath id="view"><rect x="0" y="0" width="{}" height="{}"/></clipPath>"#, num(w), num(h));
    out
}

/// Corners of a tile polygon, clockwise from the top-left: the top edge, the
/// right side, then the bottom from right to left through every cut point.
pub fn tile_polygon(left: f64, top: f64, width: f64, height: f64, cuts: &[f64]) -> Vec<(f64, f64)> {
    let bottom = top - height;
    let mut pts = vec![(left, top), (left + width, top), (left + width, bottom)];
    let mut x = left + width;
    for c in cuts.iter().rev().take(cuts.len().saturating_sub(1)) {
        x -= c;
        pts.push((x, bottom));
    }
    pts.push((left, bottom));
    pts
}

/// Draws every tile of a window meeting the viewport as a polygon with the
/// cuts of its rule. The window must carry its generator.
pub fn render_tiling_svg(w: &TilingWindow, spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    if w.rows.iter().all(|r| r.tiles.is_empty()) {
        return Err(Error::Input("empty window".into()));
    }
    let t = w.generator()?;
    let s = t.sigma();
    let mut out = header(spec);
    out.push_str("<g class=\"tiles\" clip-path=\"url(#view)\" fill=\"none\" stroke=\"black\"");
    let _ = writeln!(out, " stroke-width=\"{}\">", num(spec.stroke));
    for row in &w.rows {
        for tile in &row.tiles {
            let height = t.scale.height;
            if !spec.meets(tile.left, tile.right(), row.top - height, row.top) {
                continue;
            }
            let st = make_tile(s, &t.scale, tile.letter, tile.left, row.top, tile.rule)?;
            let ratio = tile.width / st.width;
            let cuts: Vec<f64> = st.cuts.iter().map(|c| c * ratio).collect();
            let poly = tile_polygon(tile.left, row.top, tile.width, height, &cuts);
            let _ = writeln!(out, r#"<polygon points="{}"/>"#, points(spec, &poly));
            if spec.labels {
                let (cx, cy) = spec.px(tile.left + tile.width / 2.0, row.top - height / 2.0);
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" stroke="none" fill="black" text-anchor="middle">{}</text>"#,
                    num(cx),
                    num(cy),
                    s.alphabet[tile.letter]
                );
            }
        }
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// The decoded tiling as tile outlines: top edges, and sides reaching down
/// to the next row (or the viewport bottom for the last row).
pub fn overlay_group(rows: &[Row], spec: &RenderSpec) -> String {
    let mut out = String::new();
    out.push_str("<g class=\"overlay\" clip-path=\"url(#view)\" fill=\"none\" stroke=\"red\"");
    let _ = writeln!(out, " stroke-width=\"{}\">", num(spec.overlay_stroke));
    for (k, row) in rows.iter().enumerate() {
        let bottom = rows.get(k + 1).map_or(spec.viewport.y0, |r| r.top);
        for tile in &row.tiles {
            if !spec.meets(tile.left, tile.right(), bottom, row.top) {
                continue;
            }
            let pts = [(tile.left, bottom), (tile.left, row.top), (tile.right(), row.top), (tile.right(), bottom)];
            let _ = writeln!(out, r#"<polyline points="{}"/>"#, points(spec, &pts));
        }
    }
    out.push_str("</g>\n");
    out
}

/// Draws the cells of one sheet of a pattern: each `Φ`-box with its shaded
/// regions, the unit cell `[0,2]×[0,1]` stretched over the box with `y = 1`
/// on the box top. A decoded window, when given, is overlaid in red.
pub fn render_sheet_svg(p: &Pattern, sheet: Dyadic, spec: &RenderSpec, decoded: Option<&TilingWindow>) -> Result<String> {
    spec.validate()?;
    let cells: Vec<_> = p.cells.iter().filter(|(g, _)| on_sheet(g, sheet)).collect();
    if cells.is_empty() {
        return Err(Error::Input(format!("sheet {sheet} does not meet the pattern")));
    }
    let mut out = header(spec);
    out.push_str("<g class=\"cells\" clip-path=\"url(#view)\" stroke=\"black\"");
    let _ = writeln!(out, " stroke-width=\"{}\">", num(spec.stroke));
    for (g, l) in cells {
        let b = g.phi_box();
        let (x, w, top) = (b.x.to_f64(), b.width.to_f64(), b.y as f64);
        if !spec.meets(x, x + w, top - 1.0, top) {
            continue;
        }
        let map = |(u, v): (f64, f64)| (x + u * w / 2.0, top - 1.0 + v);
        let outline = [(0.0, 1.0), (2.0, 1.0), (2.0, 0.0), (0.0, 0.0)].map(map);
        let _ = writeln!(out, r#"<polygon class="box" fill="none" points="{}"/>"#, points(spec, &outline));
        for (poly, slot) in shaded_regions(l.kind) {
            let fill = match slot {
                Slot::Primary => "#999999",
                Slot::Secondary => "#cccccc",
            };
            let pts: Vec<_> = poly.into_iter().map(map).collect();
            let _ = writeln!(out, r#"<polygon class="{}" fill="{fill}" stroke="none" points="{}"/>"#, l.kind, points(spec, &pts));
        }
        if spec.labels {
            let (cx, cy) = spec.px(x + w / 2.0, top - 0.5);
            let _ = writeln!(out, r#"<text x="{}" y="{}" stroke="none" text-anchor="middle">{}</text>"#, num(cx), num(cy), l.kind);
        }
    }
    out.push_str("</g>\n");
    if let Some(d) = decoded {
        out.push_str(&overlay_group(&d.rows, spec));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes serializable rows as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Input(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// CSV text of serializable rows.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Input(e.to_string()))
}
