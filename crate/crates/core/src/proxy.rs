//! Proxy cost: `wirelength + gamma * density + lambda * congestion`.
//!
//! * Wirelength is the weighted HPWL averaged over nets and normalized by
//!   `canvas.width + canvas.height`.
//! * Density is the mean of the top 10% per-cell occupancy ratios.
//! * Congestion is the mean of the top 5% of the pooled horizontal and
//!   vertical per-cell values, each the sum of macro blockage and smoothed
//!   L-pattern net routing demand over boundary capacity.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::netlist::{Netlist, NodeKind};
use crate::placement::Placement;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProxyWeights {
    /// Density weight.
    pub gamma: f64,
    /// Congestion weight.
    pub lambda: f64,
}

impl Default for ProxyWeights {
    fn default() -> Self {
        ProxyWeights { gamma: 0.5, lambda: 0.5 }
    }
}

impl ProxyWeights {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        if !(gamma.is_finite() && lambda.is_finite() && gamma >= 0.0 && lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "proxy weights must be finite and nonnegative, got gamma={gamma} lambda={lambda}"
            )));
        }
        Ok(ProxyWeights { gamma, lambda })
    }
}

impl FromStr for ProxyWeights {
    type Err = String;

    /// Parses `gamma:lambda`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (g, l) = s.split_once(':').ok_or_else(|| format!("expected GAMMA:LAMBDA, got `{s}`"))?;
        let g = g.trim().parse::<f64>().map_err(|e| e.to_string())?;
        let l = l.trim().parse::<f64>().map_err(|e| e.to_string())?;
        ProxyWeights::new(g, l).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProxyConfig {
    pub weights: ProxyWeights,
    /// Half-width of the net-congestion smoothing window, in cells.
    pub smooth_radius: usize,
    /// Horizontal tracks blocked per unit length of macro edge.
    pub macro_h_usage: f64,
    /// Vertical tracks blocked per unit length of macro edge.
    pub macro_v_usage: f64,
}

impl Default for ProxyConfig {
    fn default() -> Self {
        ProxyConfig {
            weights: ProxyWeights::default(),
            smooth_radius: 2,
            macro_h_usage: 1.0,
            macro_v_usage: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProxyBreakdown {
    pub wirelength: f64,
    pub density: f64,
    pub congestion: f64,
    pub total: f64,
}

impl ProxyBreakdown {
    pub fn combine(wirelength: f64, density: f64, congestion: f64, weights: ProxyWeights) -> Self {
        ProxyBreakdown {
            wirelength,
            density,
            congestion,
            total: wirelength + weights.gamma * density + weights.lambda * congestion,
        }
    }

    /// Same components under different weights; no geometry is recomputed.
    pub fn reweighted(&self, weights: ProxyWeights) -> Self {
        ProxyBreakdown::combine(self.wirelength, self.density, self.congestion, weights)
    }
}

/// Per-cell congestion maps, row-major with row 0 at the bottom.
#[derive(Clone, Debug, PartialEq)]
pub struct CongestionGrids {
    pub n_cols: usize,
    pub n_rows: usize,
    pub h_macro: Vec<f64>,
    pub v_macro: Vec<f64>,
    pub h_net: Vec<f64>,
    pub v_net: Vec<f64>,
}

impl CongestionGrids {
    pub fn zeros(n_cols: usize, n_rows: usize) -> Self {
        let n = n_cols * n_rows;
        CongestionGrids {
            n_cols,
            n_rows,
            h_macro: vec![0.0; n],
            v_macro: vec![0.0; n],
            h_net: vec![0.0; n],
            v_net: vec![0.0; n],
        }
    }

    pub fn h_cong(&self) -> Vec<f64> {
        self.h_macro.iter().zip(&self.h_net).map(|(a, b)| a + b).collect()
    }

    pub fn v_cong(&self) -> Vec<f64> {
        self.v_macro.iter().zip(&self.v_net).map(|(a, b)| a + b).collect()
    }
}

/// Raw routing demand (track count) crossing each cell's right (`h`) and
/// top (`v`) boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Demand {
    pub n_cols: usize,
    pub n_rows: usize,
    pub h: Vec<f64>,
    pub v: Vec<f64>,
}

impl Demand {
    pub fn zeros(grid: &Grid) -> Self {
        Demand {
            n_cols: grid.n_cols,
            n_rows: grid.n_rows,
            h: vec![0.0; grid.n_cells()],
            v: vec![0.0; grid.n_cells()],
        }
    }

    pub fn total(&self) -> (f64, f64) {
        (self.h.iter().sum(), self.v.iter().sum())
    }

    fn idx(&self, col: usize, row: usize) -> usize {
        row * self.n_cols + col
    }

    /// Horizontal run in `row` between two columns: crosses the right
    /// boundaries of columns `min..max`.
    fn add_h_run(&mut self, row: usize, c1: usize, c2: usize, w: f64) {
        let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        for c in lo..hi {
            let i = self.idx(c, row);
            self.h[i] += w;
        }
    }

    /// Vertical run in `col` between two rows: crosses the top boundaries of
    /// rows `min..max`.
    fn add_v_run(&mut self, col: usize, r1: usize, r2: usize, w: f64) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        for r in lo..hi {
            let i = self.idx(col, r);
            self.v[i] += w;
        }
    }

    /// Horizontal arm first from `from`, then the vertical arm at `to`'s column.
    fn add_l(&mut self, from: (usize, usize), to: (usize, usize), w: f64) {
        self.add_h_run(from.1, from.0, to.0, w);
        self.add_v_run(to.0, from.1, to.1, w);
    }
}

fn hpwl(placement: &Placement, net: &crate::netlist::Net) -> f64 {
    let (mut xl, mut yl, mut xh, mut yh) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for pin in &net.pins {
        let (x, y) = placement.pin_position(pin);
        xl = xl.min(x);
        xh = xh.max(x);
        yl = yl.min(y);
        yh = yh.max(y);
    }
    (xh - xl) + (yh - yl)
}

/// Unnormalized weighted HPWL summed over all nets.
pub fn total_hpwl(netlist: &Netlist, placement: &Placement) -> Result<f64> {
    ensure_pins_located(netlist, placement)?;
    Ok(netlist.nets.iter().map(|net| net.weight * hpwl(placement, net)).sum())
}

pub fn wirelength_cost(netlist: &Netlist, placement: &Placement) -> Result<f64> {
    if netlist.nets.is_empty() {
        return Err(Error::EmptyNetlist);
    }
    ensure_pins_located(netlist, placement)?;
    let norm = netlist.canvas.width + netlist.canvas.height;
    let sum: f64 = netlist
        .nets
        .iter()
        .map(|net| net.weight * hpwl(placement, net) / norm)
        .sum();
    Ok(sum / netlist.nets.len() as f64)
}

fn ensure_pins_located(netlist: &Netlist, placement: &Placement) -> Result<()> {
    for net in &netlist.nets {
        for pin in &net.pins {
            placement.loc(netlist, pin.node)?;
        }
    }
    Ok(())
}

/// Mean of the largest `ceil(len * num / den)` values.
pub fn top_fraction_mean(values: &[f64], num: usize, den: usize) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let k = (values.len() * num).div_ceil(den).max(1);
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted[..k].iter().sum::<f64>() / k as f64
}

/// Per-cell occupied area over cell area, counting every node with area.
pub fn density_grid(netlist: &Netlist, placement: &Placement, grid: &Grid) -> Vec<f64> {
    let mut area = vec![0.0; grid.n_cells()];
    for (i, node) in netlist.nodes.iter().enumerate() {
        if node.kind == NodeKind::Port || node.area() <= 0.0 {
            continue;
        }
        let Some(_) = placement.get(i) else { continue };
        let bb = placement.bbox(netlist, i);
        let (Some((c0, c1)), Some((r0, r1))) = (grid.col_span(bb.xl, bb.xh), grid.row_span(bb.yl, bb.yh)) else {
            continue;
        };
        for r in r0..=r1 {
            for c in c0..=c1 {
                area[grid.index(c, r)] += bb.overlap_area(&grid.cell_rect(c, r));
            }
        }
    }
    let cell_area = grid.cell_area();
    area.iter_mut().for_each(|a| *a /= cell_area);
    area
}

pub fn density_cost(netlist: &Netlist, placement: &Placement, grid: &Grid) -> f64 {
    top_fraction_mean(&density_grid(netlist, placement, grid), 1, 10)
}

/// Macro blockage on right (horizontal) and top (vertical) cell boundaries,
/// already divided by capacity.
pub fn macro_congestion(netlist: &Netlist, placement: &Placement, grid: &Grid, usage: (f64, f64)) -> (Vec<f64>, Vec<f64>) {
    let (mh, mv) = usage;
    let mut h = vec![0.0; grid.n_cells()];
    let mut v = vec![0.0; grid.n_cells()];
    for (i, node) in netlist.nodes.iter().enumerate() {
        if node.kind != NodeKind::Macro || placement.get(i).is_none() {
            continue;
        }
        let bb = placement.bbox(netlist, i);
        let (Some((c0, c1)), Some((r0, r1))) = (grid.col_span(bb.xl, bb.xh), grid.row_span(bb.yl, bb.yh)) else {
            continue;
        };
        for c in c0..=c1 {
            let xb = (c + 1) as f64 * grid.cell_w;
            if !(bb.xl < xb && xb < bb.xh) {
                continue;
            }
            for r in r0..=r1 {
                let cell = grid.cell_rect(c, r);
                let len = bb.yh.min(cell.yh) - bb.yl.max(cell.yl);
                if len > 0.0 {
                    h[grid.index(c, r)] += mh * len / grid.h_capacity;
                }
            }
        }
        for r in r0..=r1 {
            let yb = (r + 1) as f64 * grid.cell_h;
            if !(bb.yl < yb && yb < bb.yh) {
                continue;
            }
            for c in c0..=c1 {
                let cell = grid.cell_rect(c, r);
                let len = bb.xh.min(cell.xh) - bb.xl.max(cell.xl);
                if len > 0.0 {
                    v[grid.index(c, r)] += mv * len / grid.v_capacity;
                }
            }
        }
    }
    (h, v)
}

/// Adds the routing demand of one net, given the distinct grid cells its
/// pins occupy and which of them holds the source pin.
///
/// * 1 cell: nothing.
/// * 2 cells: one L, horizontal arm from the source first.
/// * 3 cells: if two cells share a row or column, that straight segment is
///   routed once and an L branches to the third cell from the segment's
///   nearer endpoint; otherwise a source-anchored star.
/// * more: a star of source-anchored Ls.
pub fn route_net(cells: &[(usize, usize)], source: usize, weight: f64, demand: &mut Demand) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::EmptyCellSet);
    }
    if source >= cells.len() {
        return Err(Error::InvalidConfig(format!(
            "source index {source} out of range for {} cells",
            cells.len()
        )));
    }
    let src = cells[source];
    match cells.len() {
        1 => {}
        3 => {
            let mut ordered = vec![src];
            ordered.extend(cells.iter().enumerate().filter(|&(i, _)| i != source).map(|(_, &c)| c));
            route_three(&ordered, weight, demand);
        }
        _ => {
            for (i, &c) in cells.iter().enumerate() {
                if i != source {
                    demand.add_l(src, c, weight);
                }
            }
        }
    }
    Ok(())
}

fn manhattan(a: (usize, usize), b: (usize, usize)) -> usize {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1)
}

fn route_three(cells: &[(usize, usize)], w: f64, demand: &mut Demand) {
    for (p, q, t) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        let (a, b, third) = (cells[p], cells[q], cells[t]);
        if a.1 == b.1 || a.0 == b.0 {
            // straight segment; add_l degenerates to one arm
            demand.add_l(a, b, w);
            let from = if manhattan(b, third) < manhattan(a, third) { b } else { a };
            demand.add_l(from, third, w);
            return;
        }
    }
    demand.add_l(cells[0], cells[1], w);
    demand.add_l(cells[0], cells[2], w);
}

/// Distinct pin cells of a net in first-seen order, and the source's position.
pub fn net_cells(placement: &Placement, net: &crate::netlist::Net, grid: &Grid) -> (Vec<(usize, usize)>, usize) {
    let mut cells: Vec<(usize, usize)> = Vec::with_capacity(net.pins.len());
    let src_pin = net.source_index();
    let mut source = 0;
    for (k, pin) in net.pins.iter().enumerate() {
        let (x, y) = placement.pin_position(pin);
        let cell = grid.cell_of(x, y);
        let pos = match cells.iter().position(|&c| c == cell) {
            Some(p) => p,
            None => {
                cells.push(cell);
                cells.len() - 1
            }
        };
        if k == src_pin {
            source = pos;
        }
    }
    (cells, source)
}

/// Superposed routing demand of all nets.
pub fn net_demand(netlist: &Netlist, placement: &Placement, grid: &Grid) -> Result<Demand> {
    ensure_pins_located(netlist, placement)?;
    let mut demand = Demand::zeros(grid);
    for net in &netlist.nets {
        let (cells, source) = net_cells(placement, net, grid);
        route_net(&cells, source, net.weight, &mut demand)?;
    }
    Ok(demand)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Spread along rows.
    H,
    /// Spread along columns.
    V,
}

/// Spreads each cell's value uniformly over the `2 * radius + 1` cells
/// centered on it along `dir`, truncated at the grid edge.
pub fn smooth_congestion(values: &[f64], n_cols: usize, n_rows: usize, dir: Direction, radius: usize) -> Vec<f64> {
    if radius == 0 {
        return values.to_vec();
    }
    let mut out = vec![0.0; values.len()];
    for r in 0..n_rows {
        for c in 0..n_cols {
            let v = values[r * n_cols + c];
            if v == 0.0 {
                continue;
            }
            match dir {
                Direction::H => {
                    let (lo, hi) = (c.saturating_sub(radius), (c + radius).min(n_cols - 1));
                    let share = v / (hi - lo + 1) as f64;
                    for cc in lo..=hi {
                        out[r * n_cols + cc] += share;
                    }
                }
                Direction::V => {
                    let (lo, hi) = (r.saturating_sub(radius), (r + radius).min(n_rows - 1));
                    let share = v / (hi - lo + 1) as f64;
                    for rr in lo..=hi {
                        out[rr * n_cols + c] += share;
                    }
                }
            }
        }
    }
    out
}

/// All four congestion maps for a placement.
pub fn congestion_grids(netlist: &Netlist, placement: &Placement, grid: &Grid, config: &ProxyConfig) -> Result<CongestionGrids> {
    let (h_macro, v_macro) = macro_congestion(netlist, placement, grid, (config.macro_h_usage, config.macro_v_usage));
    let demand = net_demand(netlist, placement, grid)?;
    let h_smooth = smooth_congestion(&demand.h, grid.n_cols, grid.n_rows, Direction::H, config.smooth_radius);
    let v_smooth = smooth_congestion(&demand.v, grid.n_cols, grid.n_rows, Direction::V, config.smooth_radius);
    Ok(CongestionGrids {
        n_cols: grid.n_cols,
        n_rows: grid.n_rows,
        h_macro,
        v_macro,
        h_net: h_smooth.iter().map(|d| d / grid.h_capacity).collect(),
        v_net: v_smooth.iter().map(|d| d / grid.v_capacity).collect(),
    })
}

pub fn congestion_cost(grids: &CongestionGrids) -> f64 {
    let mut pooled = grids.h_cong();
    pooled.extend(grids.v_cong());
    top_fraction_mean(&pooled, 1, 20)
}

/// Full proxy cost for a complete placement.
pub fn proxy_cost(netlist: &Netlist, placement: &Placement, grid: &Grid, config: &ProxyConfig) -> Result<ProxyBreakdown> {
    let wirelength = wirelength_cost(netlist, placement)?;
    let density = density_cost(netlist, placement, grid);
    let grids = congestion_grids(netlist, placement, grid, config)?;
    let congestion = congestion_cost(&grids);
    Ok(ProxyBreakdown::combine(wirelength, density, congestion, config.weights))
}
