//! Seeded random instances for integration and acceptance tests.

use macroplace::geometry::Rect;
use macroplace::grid::{build_grid, Grid};
use macroplace::netlist::{Canvas, Netlist, NetlistBuilder, Node, NodeKind, PinSpec};
use macroplace::placement::{Location, Orientation, Placement};
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Instance {
    pub netlist: Netlist,
    pub placement: Placement,
    pub grid: Grid,
}

fn boundary_point<R: Rng>(rng: &mut R, w: f64, h: f64) -> (f64, f64) {
    match rng.random_range(0..4) {
        0 => (rng.random_range(0.0..=w), 0.0),
        1 => (rng.random_range(0.0..=w), h),
        2 => (0.0, rng.random_range(0.0..=h)),
        _ => (w, rng.random_range(0.0..=h)),
    }
}

/// Center inside the canvas for a `w x h` box, sometimes snapped to a cell center.
fn inside_center<R: Rng>(rng: &mut R, grid: &Grid, w: f64, h: f64) -> (f64, f64) {
    let cw = grid.canvas.width;
    let ch = grid.canvas.height;
    if rng.random_bool(0.3) {
        let c = rng.random_range(0..grid.n_cols);
        let r = rng.random_range(0..grid.n_rows);
        let (x, y) = grid.cell_center(c, r).unwrap();
        let x = x.clamp(w / 2.0, cw - w / 2.0);
        let y = y.clamp(h / 2.0, ch - h / 2.0);
        return (x, y);
    }
    (
        rng.random_range(w / 2.0..=cw - w / 2.0),
        rng.random_range(h / 2.0..=ch - h / 2.0),
    )
}

fn random_nets<R: Rng>(rng: &mut R, b: &mut NetlistBuilder, nodes: &[Node], max_nets: usize, max_degree: usize) {
    let n_nets = rng.random_range(1..=max_nets);
    let mut made = 0;
    while made < n_nets {
        let degree = rng.random_range(2..=max_degree.min(nodes.len()));
        let mut ids: Vec<usize> = (0..nodes.len()).collect();
        ids.shuffle(rng);
        ids.truncate(degree);
        let source = if rng.random_bool(0.8) { Some(rng.random_range(0..degree)) } else { None };
        let pins: Vec<PinSpec> = ids
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let n = &nodes[i];
                let dx = if n.width > 0.0 { rng.random_range(-n.width / 2.0..=n.width / 2.0) } else { 0.0 };
                let dy = if n.height > 0.0 { rng.random_range(-n.height / 2.0..=n.height / 2.0) } else { 0.0 };
                PinSpec::new(n.id.clone(), dx, dy, source == Some(k))
            })
            .collect();
        let weight = if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.5..2.0) };
        if b.add_net(format!("n{made}"), weight, &pins).unwrap() {
            made += 1;
        }
    }
}

/// Up to 10 nodes of every kind and up to 8 nets on an 8x8 grid.
pub fn proxy_instance<R: Rng>(rng: &mut R) -> Instance {
    let w = rng.random_range(40.0..200.0);
    let h = rng.random_range(40.0..200.0);
    let canvas = Canvas::new(w, h).unwrap();
    let grid = build_grid(
        canvas,
        8,
        8,
        rng.random_range(0.5..5.0) * h / 8.0,
        rng.random_range(0.5..5.0) * w / 8.0,
    )
    .unwrap();
    let n = rng.random_range(2..=10);
    let mut nodes = Vec::new();
    for i in 0..n {
        let kind = match rng.random_range(0..10) {
            0..=3 => NodeKind::Macro,
            4..=5 => NodeKind::StdCell,
            6..=7 => NodeKind::Cluster,
            _ => NodeKind::Port,
        };
        let (nw, nh) = match kind {
            NodeKind::Macro => (rng.random_range(0.05..0.5) * w, rng.random_range(0.05..0.5) * h),
            NodeKind::StdCell => (rng.random_range(0.005..0.03) * w, rng.random_range(0.005..0.03) * h),
            NodeKind::Cluster => {
                let s = rng.random_range(0.02..0.3) * w.min(h);
                (s, s)
            }
            NodeKind::Port => (0.0, 0.0),
        };
        let movable = kind != NodeKind::Port && rng.random_bool(0.7);
        nodes.push(Node::new(format!("v{i}"), kind, nw, nh, movable));
    }
    let mut b = NetlistBuilder::new(canvas);
    for node in &nodes {
        b.add_node(node.clone()).unwrap();
    }
    random_nets(rng, &mut b, &nodes, 8, 5);
    let netlist = b.build().0;
    let mut placement = Placement::new(n);
    for (i, node) in netlist.nodes.iter().enumerate() {
        let (x, y) = if node.kind == NodeKind::Port {
            boundary_point(rng, w, h)
        } else {
            inside_center(rng, &grid, node.width, node.height)
        };
        let orient = if node.kind == NodeKind::Macro {
            Orientation::ALL[rng.random_range(0..4)]
        } else {
            Orientation::N
        };
        placement.set(i, Location::with_orient(x, y, orient));
    }
    Instance {
        netlist,
        placement,
        grid,
    }
}

/// Macros (some fixed, placed legally), boundary ports and std cells with
/// random initial locations, on an 8x8 grid.
pub fn placement_instance<R: Rng>(rng: &mut R, n_movable: usize, n_fixed: usize, n_cells: usize) -> Instance {
    let w = rng.random_range(100.0..300.0);
    let h = rng.random_range(100.0..300.0);
    let canvas = Canvas::new(w, h).unwrap();
    let grid = Grid::with_default_capacity(canvas, 8, 8).unwrap();
    let (cw, ch) = (grid.cell_w, grid.cell_h);
    let mut nodes = Vec::new();
    for i in 0..n_movable {
        nodes.push(Node::new(
            format!("m{i}"),
            NodeKind::Macro,
            rng.random_range(0.3..1.5) * cw,
            rng.random_range(0.3..1.5) * ch,
            true,
        ));
    }
    for i in 0..n_fixed {
        nodes.push(Node::new(
            format!("f{i}"),
            NodeKind::Macro,
            rng.random_range(0.3..1.0) * cw,
            rng.random_range(0.3..1.0) * ch,
            false,
        ));
    }
    let n_ports = rng.random_range(2..=5);
    for i in 0..n_ports {
        nodes.push(Node::new(format!("p{i}"), NodeKind::Port, 0.0, 0.0, false));
    }
    for i in 0..n_cells {
        nodes.push(Node::new(
            format!("s{i}"),
            NodeKind::StdCell,
            rng.random_range(0.05..0.2) * cw,
            rng.random_range(0.1..0.3) * ch,
            true,
        ));
    }
    let mut b = NetlistBuilder::new(canvas);
    for node in &nodes {
        b.add_node(node.clone()).unwrap();
    }
    random_nets(rng, &mut b, &nodes, 3 * nodes.len(), 5);
    let netlist = b.build().0;

    let mut placement = Placement::new(nodes.len());
    let mut fixed_boxes: Vec<Rect> = Vec::new();
    for (i, node) in netlist.nodes.iter().enumerate() {
        match node.kind {
            NodeKind::Macro if !node.movable => {
                // fixed macros sit at free cell centers so the instance stays legal
                loop {
                    let (x, y) = grid
                        .cell_center(rng.random_range(0..grid.n_cols), rng.random_range(0..grid.n_rows))
                        .unwrap();
                    let bb = Rect::centered(x, y, node.width, node.height);
                    if fixed_boxes.iter().all(|f| !f.overlaps(&bb)) {
                        fixed_boxes.push(bb);
                        placement.set(i, Location::new(x, y));
                        break;
                    }
                }
            }
            NodeKind::Port => {
                let (x, y) = boundary_point(rng, w, h);
                placement.set(i, Location::new(x, y));
            }
            NodeKind::StdCell => {
                let (x, y) = inside_center(rng, &grid, node.width, node.height);
                placement.set(i, Location::new(x, y));
            }
            _ => {}
        }
    }
    Instance {
        netlist,
        placement,
        grid,
    }
}

/// Fixed ports and nets over `sizes.len()` movable macros on a 3x3 grid
/// where every macro fits inside one cell.
pub fn exhaustive_instance<R: Rng>(rng: &mut R, n_macros: usize) -> Instance {
    let w = rng.random_range(60.0..150.0);
    let h = rng.random_range(60.0..150.0);
    let canvas = Canvas::new(w, h).unwrap();
    let grid = Grid::with_default_capacity(canvas, 3, 3).unwrap();
    let mut nodes = Vec::new();
    for i in 0..n_macros {
        nodes.push(Node::new(
            format!("m{i}"),
            NodeKind::Macro,
            rng.random_range(0.3..1.0) * grid.cell_w,
            rng.random_range(0.3..1.0) * grid.cell_h,
            true,
        ));
    }
    let n_ports = rng.random_range(2..=4);
    for i in 0..n_ports {
        nodes.push(Node::new(format!("p{i}"), NodeKind::Port, 0.0, 0.0, false));
    }
    let mut b = NetlistBuilder::new(canvas);
    for node in &nodes {
        b.add_node(node.clone()).unwrap();
    }
    random_nets(rng, &mut b, &nodes, 6, 4);
    let netlist = b.build().0;
    let mut placement = Placement::new(nodes.len());
    for (i, node) in netlist.nodes.iter().enumerate() {
        if node.kind == NodeKind::Port {
            let (x, y) = boundary_point(rng, w, h);
            placement.set(i, Location::new(x, y));
        }
    }
    Instance {
        netlist,
        placement,
        grid,
    }
}
