use std::fmt::Write as _;
use std::path::Path;

use super::write_string;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::netlist::{Netlist, NodeKind};
use crate::placement::Placement;

const IMAGE_SIZE: f64 = 800.0;
const MARGIN: f64 = 10.0;

/// Renders a placement as SVG 1.1. Macros are filled rectangles, soft nodes
/// outlined squares, ports short ticks. Y grows upward on the canvas.
pub fn render_svg(netlist: &Netlist, placement: &Placement, grid: &Grid) -> Result<String> {
    placement.ensure_complete(netlist)?;
    let canvas = netlist.canvas;
    let scale = IMAGE_SIZE / canvas.width.max(canvas.height);
    let (w, h) = (canvas.width * scale, canvas.height * scale);
    let tx = |x: f64| MARGIN + x * scale;
    let ty = |y: f64| MARGIN + h - y * scale;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.3}" height="{:.3}" viewBox="0 0 {:.3} {:.3}">"#,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r##"<rect class="canvas" x="{:.3}" y="{:.3}" width="{w:.3}" height="{h:.3}" fill="white" stroke="black" stroke-width="1.5"/>"##,
        tx(0.0),
        ty(canvas.height)
    );
    s.push_str("<g class=\"grid\" stroke=\"#cccccc\" stroke-width=\"0.5\">\n");
    for c in 1..grid.n_cols {
        let x = tx(c as f64 * grid.cell_w);
        let _ = writeln!(s, r#"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}"/>"#, ty(0.0), ty(canvas.height));
    }
    for r in 1..grid.n_rows {
        let y = ty(r as f64 * grid.cell_h);
        let _ = writeln!(s, r#"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}"/>"#, tx(0.0), tx(canvas.width));
    }
    s.push_str("</g>\n");

    for (i, node) in netlist.nodes.iter().enumerate() {
        let loc = placement.get(i).expect("checked complete");
        match node.kind {
            NodeKind::Macro => {
                let bb = placement.bbox(netlist, i);
                let fill = if node.movable { "#d9534f" } else { "#777777" };
                let _ = writeln!(
                    s,
                    r#"<rect class="macro" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}" fill-opacity="0.8" stroke="black" stroke-width="0.5"><title>{}</title></rect>"#,
                    tx(bb.xl),
                    ty(bb.yh),
                    bb.width() * scale,
                    bb.height() * scale,
                    xml_escape(&node.id)
                );
            }
            NodeKind::Cluster | NodeKind::StdCell => {
                let bb = placement.bbox(netlist, i);
                let _ = writeln!(
                    s,
                    r##"<rect class="{}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#1f77b4" stroke-width="0.5"/>"##,
                    node.kind,
                    tx(bb.xl),
                    ty(bb.yh),
                    bb.width() * scale,
                    bb.height() * scale
                );
            }
            NodeKind::Port => {
                let (x, y) = (tx(loc.x), ty(loc.y));
                let _ = writeln!(
                    s,
                    r##"<line class="port" x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#2ca02c" stroke-width="1.5"/>"##,
                    x - 3.0,
                    x + 3.0
                );
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(netlist: &Netlist, placement: &Placement, grid: &Grid, path: &Path) -> Result<()> {
    if grid.canvas != netlist.canvas {
        return Err(Error::InvalidConfig("grid canvas differs from netlist canvas".into()));
    }
    let svg = render_svg(netlist, placement, grid)?;
    write_string(path, &svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{Canvas, NetlistBuilder, Node};
    use crate::placement::Location;

    #[test]
    fn empty_netlist_has_only_outline_and_grid() {
        let canvas = Canvas::new(100.0, 100.0).unwrap();
        let nl = NetlistBuilder::new(canvas).build().0;
        let g = Grid::with_default_capacity(canvas, 4, 4).unwrap();
        let svg = render_svg(&nl, &Placement::new(0), &g).unwrap();
        assert_eq!(svg.matches("<rect").count(), 1);
        assert_eq!(svg.matches("<line").count(), 6);
    }

    #[test]
    fn centered_macro_is_centered_in_image() {
        let canvas = Canvas::new(100.0, 100.0).unwrap();
        let mut b = NetlistBuilder::new(canvas);
        b.add_node(Node::new("m", NodeKind::Macro, 20.0, 20.0, true)).unwrap();
        let nl = b.build().0;
        let mut p = Placement::new(1);
        p.set(0, Location::new(50.0, 50.0));
        let g = Grid::with_default_capacity(canvas, 2, 2).unwrap();
        let svg = render_svg(&nl, &p, &g).unwrap();
        // image 820 wide; macro 160 wide centered at 410
        assert!(svg.contains(r#"class="macro" x="330.000" y="330.000" width="160.000" height="160.000""#));
    }
}
