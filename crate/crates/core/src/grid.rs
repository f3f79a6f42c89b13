//! Uniform canvas gridding and macro legality checks.

use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::netlist::{Canvas, Netlist};
use crate::placement::{Orientation, Placement};

/// Relative tolerance for containment and overlap tests, scaled by the
/// larger canvas dimension. Absorbs rounding in `(col + 0.5) * cell_w`.
pub const GEOM_REL_EPS: f64 = 1e-9;

pub const DEFAULT_GRID_COLS: usize = 32;
pub const DEFAULT_GRID_ROWS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub canvas: Canvas,
    pub n_cols: usize,
    pub n_rows: usize,
    pub cell_w: f64,
    pub cell_h: f64,
    /// Routing tracks across each cell's right boundary.
    pub h_capacity: f64,
    /// Routing tracks across each cell's top boundary.
    pub v_capacity: f64,
}

pub fn build_grid(canvas: Canvas, n_cols: usize, n_rows: usize, h_capacity: f64, v_capacity: f64) -> Result<Grid> {
    if n_cols == 0 || n_rows == 0 {
        return Err(Error::InvalidDimension(format!(
            "grid must have at least one column and row, got {n_cols} x {n_rows}"
        )));
    }
    if !(h_capacity > 0.0 && v_capacity > 0.0 && h_capacity.is_finite() && v_capacity.is_finite()) {
        return Err(Error::InvalidDimension(format!(
            "routing capacities must be positive, got h={h_capacity} v={v_capacity}"
        )));
    }
    Ok(Grid {
        canvas,
        n_cols,
        n_rows,
        cell_w: canvas.width / n_cols as f64,
        cell_h: canvas.height / n_rows as f64,
        h_capacity,
        v_capacity,
    })
}

impl Grid {
    /// Grid with the default capacity of ten tracks per unit of boundary length.
    pub fn with_default_capacity(canvas: Canvas, n_cols: usize, n_rows: usize) -> Result<Grid> {
        if n_cols == 0 || n_rows == 0 {
            return build_grid(canvas, n_cols, n_rows, 1.0, 1.0);
        }
        let cell_w = canvas.width / n_cols as f64;
        let cell_h = canvas.height / n_rows as f64;
        build_grid(canvas, n_cols, n_rows, 10.0 * cell_h, 10.0 * cell_w)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cols * self.n_rows
    }

    /// Row-major index, row 0 at the bottom.
    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.n_cols + col
    }

    pub fn col_row(&self, index: usize) -> (usize, usize) {
        (index % self.n_cols, index / self.n_cols)
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Result<(f64, f64)> {
        if col >= self.n_cols || row >= self.n_rows {
            return Err(Error::OutOfRange {
                col,
                row,
                n_cols: self.n_cols,
                n_rows: self.n_rows,
            });
        }
        Ok(((col as f64 + 0.5) * self.cell_w, (row as f64 + 0.5) * self.cell_h))
    }

    pub fn cell_rect(&self, col: usize, row: usize) -> Rect {
        Rect::new(
            col as f64 * self.cell_w,
            row as f64 * self.cell_h,
            (col + 1) as f64 * self.cell_w,
            (row + 1) as f64 * self.cell_h,
        )
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_w * self.cell_h
    }

    /// Cell containing a point; points on or past the canvas edge clamp to the
    /// nearest cell.
    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let clamp = |v: f64, n: usize| -> usize {
            if v.is_nan() || v <= 0.0 {
                0
            } else {
                (v as usize).min(n - 1)
            }
        };
        (clamp(x / self.cell_w, self.n_cols), clamp(y / self.cell_h, self.n_rows))
    }

    /// Inclusive range of columns a horizontal span touches with positive length.
    pub fn col_span(&self, xl: f64, xh: f64) -> Option<(usize, usize)> {
        span(xl, xh, self.cell_w, self.n_cols)
    }

    pub fn row_span(&self, yl: f64, yh: f64) -> Option<(usize, usize)> {
        span(yl, yh, self.cell_h, self.n_rows)
    }

    pub fn eps(&self) -> f64 {
        GEOM_REL_EPS * self.canvas.width.max(self.canvas.height)
    }

    pub fn canvas_rect(&self) -> Rect {
        Rect::new(0.0, 0.0, self.canvas.width, self.canvas.height)
    }
}

fn span(lo: f64, hi: f64, step: f64, n: usize) -> Option<(usize, usize)> {
    let lo = lo.max(0.0);
    let hi = hi.min(step * n as f64);
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return None;
    }
    let first = ((lo / step).floor() as usize).min(n - 1);
    // A span ending exactly on a boundary does not enter the next cell.
    let last_f = (hi / step).ceil() as usize;
    let last = last_f.saturating_sub(1).clamp(first, n - 1);
    Some((first, last))
}

/// Whether `macro_idx` can sit at the center of `cell` with `orient`, given
/// every other macro already in `placement`.
pub fn is_legal_macro_location(
    netlist: &Netlist,
    placement: &Placement,
    grid: &Grid,
    macro_idx: usize,
    cell: (usize, usize),
    orient: Orientation,
) -> Result<bool> {
    let node = netlist
        .nodes
        .get(macro_idx)
        .ok_or_else(|| Error::UnknownNode(macro_idx.to_string()))?;
    if !node.movable {
        return Err(Error::NotMovable(node.id.clone()));
    }
    let _ = orient; // mirrors never change the footprint
    let (cx, cy) = match grid.cell_center(cell.0, cell.1) {
        Ok(c) => c,
        Err(_) => return Ok(false),
    };
    Ok(fits_at(netlist, placement, grid, macro_idx, cx, cy, &[]))
}

/// Legality of `macro_idx` centered at `(cx, cy)`, ignoring the macros in
/// `skip` (used when several macros move at once).
pub(crate) fn fits_at(
    netlist: &Netlist,
    placement: &Placement,
    grid: &Grid,
    macro_idx: usize,
    cx: f64,
    cy: f64,
    skip: &[usize],
) -> bool {
    let node = &netlist.nodes[macro_idx];
    let bb = Rect::centered(cx, cy, node.width, node.height);
    let eps = grid.eps();
    if !bb.inside(&grid.canvas_rect(), eps) {
        return false;
    }
    for (other, loc) in placement.iter() {
        if other == macro_idx || skip.contains(&other) {
            continue;
        }
        let o = &netlist.nodes[other];
        if o.kind != crate::netlist::NodeKind::Macro {
            continue;
        }
        let obb = Rect::centered(loc.x, loc.y, o.width, o.height);
        if bb.overlaps_eps(&obb, eps) {
            return false;
        }
    }
    true
}
