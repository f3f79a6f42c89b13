//! Naive reference implementations of the proxy-cost terms. They share no
//! code with the library beyond the data types.

use macroplace::grid::Grid;
use macroplace::netlist::{Netlist, NodeKind};
use macroplace::placement::{Orientation, Placement};

pub fn pin_xy(netlist: &Netlist, placement: &Placement, node: usize, dx: f64, dy: f64) -> (f64, f64) {
    let loc = placement.get(node).unwrap();
    let _ = netlist;
    let (dx, dy) = match loc.orient {
        Orientation::N => (dx, dy),
        Orientation::FN => (-dx, dy),
        Orientation::S => (-dx, -dy),
        Orientation::FS => (dx, -dy),
    };
    (loc.x + dx, loc.y + dy)
}

pub fn wirelength(netlist: &Netlist, placement: &Placement) -> f64 {
    let mut sum = 0.0;
    for net in &netlist.nets {
        let pts: Vec<(f64, f64)> = net
            .pins
            .iter()
            .map(|p| pin_xy(netlist, placement, p.node, p.dx, p.dy))
            .collect();
        let mut span_x = 0.0f64;
        let mut span_y = 0.0f64;
        for a in &pts {
            for b in &pts {
                span_x = span_x.max(b.0 - a.0);
                span_y = span_y.max(b.1 - a.1);
            }
        }
        sum += net.weight * (span_x + span_y) / (netlist.canvas.width + netlist.canvas.height);
    }
    sum / netlist.nets.len() as f64
}

fn top_mean(mut v: Vec<f64>, percent: usize) -> f64 {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut k = 0;
    while k * 100 < v.len() * percent {
        k += 1;
    }
    let k = k.max(1);
    v[..k].iter().sum::<f64>() / k as f64
}

fn bbox(netlist: &Netlist, placement: &Placement, i: usize) -> (f64, f64, f64, f64) {
    let n = &netlist.nodes[i];
    let l = placement.get(i).unwrap();
    (l.x - n.width / 2.0, l.y - n.height / 2.0, l.x + n.width / 2.0, l.y + n.height / 2.0)
}

fn overlap_1d(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

pub fn density(netlist: &Netlist, placement: &Placement, grid: &Grid) -> f64 {
    let (cw, ch) = (grid.canvas.width / grid.n_cols as f64, grid.canvas.height / grid.n_rows as f64);
    let mut cells = Vec::new();
    for r in 0..grid.n_rows {
        for c in 0..grid.n_cols {
            let (x0, y0) = (c as f64 * cw, r as f64 * ch);
            let mut occupied = 0.0;
            for i in 0..netlist.nodes.len() {
                if netlist.nodes[i].kind == NodeKind::Port {
                    continue;
                }
                let (xl, yl, xh, yh) = bbox(netlist, placement, i);
                occupied += overlap_1d(xl, xh, x0, x0 + cw) * overlap_1d(yl, yh, y0, y0 + ch);
            }
            cells.push(occupied / (cw * ch));
        }
    }
    top_mean(cells, 10)
}

fn cell_of(grid: &Grid, x: f64, y: f64) -> (usize, usize) {
    let (cw, ch) = (grid.canvas.width / grid.n_cols as f64, grid.canvas.height / grid.n_rows as f64);
    let mut col = 0;
    for c in 0..grid.n_cols {
        if x >= c as f64 * cw {
            col = c;
        }
    }
    let mut row = 0;
    for r in 0..grid.n_rows {
        if y >= r as f64 * ch {
            row = r;
        }
    }
    (col, row)
}

/// A straight route piece: `Horizontal(row, from_col, to_col)` or
/// `Vertical(col, from_row, to_row)`, weighted.
#[derive(Clone, Copy, Debug)]
pub enum Segment {
    Horizontal(usize, usize, usize, f64),
    Vertical(usize, usize, usize, f64),
}

fn l_route(from: (usize, usize), to: (usize, usize), w: f64, out: &mut Vec<Segment>) {
    out.push(Segment::Horizontal(from.1, from.0, to.0, w));
    out.push(Segment::Vertical(to.0, from.1, to.1, w));
}

fn dist(a: (usize, usize), b: (usize, usize)) -> usize {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1)
}

/// Route segments of every net with at least two distinct pin cells.
pub fn segments(netlist: &Netlist, placement: &Placement, grid: &Grid) -> Vec<Segment> {
    let mut out = Vec::new();
    for net in &netlist.nets {
        let src_pin = net.pins.iter().position(|p| p.is_source).unwrap_or(0);
        let mut cells: Vec<(usize, usize)> = Vec::new();
        let mut src = (0, 0);
        for (k, p) in net.pins.iter().enumerate() {
            let (x, y) = pin_xy(netlist, placement, p.node, p.dx, p.dy);
            let cell = cell_of(grid, x, y);
            if k == src_pin {
                src = cell;
            }
            if !cells.contains(&cell) {
                cells.push(cell);
            }
        }
        let others: Vec<(usize, usize)> = cells.iter().copied().filter(|&c| c != src).collect();
        let w = net.weight;
        match cells.len() {
            1 => {}
            3 => {
                let t = [src, others[0], others[1]];
                let aligned = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
                    .into_iter()
                    .find(|&(a, b, _)| t[a].0 == t[b].0 || t[a].1 == t[b].1);
                match aligned {
                    Some((a, b, c)) => {
                        l_route(t[a], t[b], w, &mut out);
                        let from = if dist(t[b], t[c]) < dist(t[a], t[c]) { t[b] } else { t[a] };
                        l_route(from, t[c], w, &mut out);
                    }
                    None => {
                        l_route(src, others[0], w, &mut out);
                        l_route(src, others[1], w, &mut out);
                    }
                }
            }
            _ => {
                for &o in &others {
                    l_route(src, o, w, &mut out);
                }
            }
        }
    }
    out
}

/// Raw (H, V) boundary-crossing demand per cell, row-major.
pub fn demand(grid: &Grid, segs: &[Segment]) -> (Vec<f64>, Vec<f64>) {
    let mut h = Vec::new();
    let mut v = Vec::new();
    for r in 0..grid.n_rows {
        for c in 0..grid.n_cols {
            let mut dh = 0.0;
            let mut dv = 0.0;
            for s in segs {
                match *s {
                    Segment::Horizontal(row, a, b, w) if row == r && a.min(b) <= c && c < a.max(b) => dh += w,
                    Segment::Vertical(col, a, b, w) if col == c && a.min(b) <= r && r < a.max(b) => dv += w,
                    _ => {}
                }
            }
            h.push(dh);
            v.push(dv);
        }
    }
    (h, v)
}

/// Each source spreads evenly over its in-grid window; gathered per target.
pub fn smooth(values: &[f64], n_cols: usize, n_rows: usize, along_rows: bool, radius: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for r in 0..n_rows {
        for c in 0..n_cols {
            let mut acc = 0.0;
            for sr in 0..n_rows {
                for sc in 0..n_cols {
                    let (pos, src_pos, len, same_line) = if along_rows {
                        (c, sc, n_cols, sr == r)
                    } else {
                        (r, sr, n_rows, sc == c)
                    };
                    if !same_line || pos.abs_diff(src_pos) > radius {
                        continue;
                    }
                    let window = (0..len).filter(|&p| p.abs_diff(src_pos) <= radius).count();
                    acc += values[sr * n_cols + sc] / window as f64;
                }
            }
            out[r * n_cols + c] = acc;
        }
    }
    out
}

pub fn macro_blockage(netlist: &Netlist, placement: &Placement, grid: &Grid, mh: f64, mv: f64) -> (Vec<f64>, Vec<f64>) {
    let (cw, ch) = (grid.canvas.width / grid.n_cols as f64, grid.canvas.height / grid.n_rows as f64);
    let mut h = Vec::new();
    let mut v = Vec::new();
    for r in 0..grid.n_rows {
        for c in 0..grid.n_cols {
            let (x0, y0) = (c as f64 * cw, r as f64 * ch);
            let (right, top) = (x0 + cw, y0 + ch);
            let mut bh = 0.0;
            let mut bv = 0.0;
            for i in 0..netlist.nodes.len() {
                if netlist.nodes[i].kind != NodeKind::Macro {
                    continue;
                }
                let (xl, yl, xh, yh) = bbox(netlist, placement, i);
                if xl < right && right < xh {
                    let len = overlap_1d(yl, yh, y0, top);
                    if len > 0.0 {
                        bh += mh * len / grid.h_capacity;
                    }
                }
                if yl < top && top < yh {
                    let len = overlap_1d(xl, xh, x0, right);
                    if len > 0.0 {
                        bv += mv * len / grid.v_capacity;
                    }
                }
            }
            h.push(bh);
            v.push(bv);
        }
    }
    (h, v)
}

pub fn congestion(netlist: &Netlist, placement: &Placement, grid: &Grid, radius: usize, mh: f64, mv: f64) -> f64 {
    let segs = segments(netlist, placement, grid);
    let (dh, dv) = demand(grid, &segs);
    let sh = smooth(&dh, grid.n_cols, grid.n_rows, true, radius);
    let sv = smooth(&dv, grid.n_cols, grid.n_rows, false, radius);
    let (bh, bv) = macro_blockage(netlist, placement, grid, mh, mv);
    let mut pooled = Vec::new();
    for i in 0..sh.len() {
        pooled.push(bh[i] + sh[i] / grid.h_capacity);
    }
    for i in 0..sv.len() {
        pooled.push(bv[i] + sv[i] / grid.v_capacity);
    }
    top_mean(pooled, 5)
}
