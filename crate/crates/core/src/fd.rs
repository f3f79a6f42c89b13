//! Force-directed placement of soft nodes (standard-cell clusters) around
//! fixed macros and ports.
//!
//! Each iteration accumulates star-model attraction along nets and pairwise
//! repulsion between overlapping nodes, normalizes each axis by the largest
//! absolute component over all nodes so the biggest step equals
//! `max(width, height) / num_iters`, and moves only soft nodes. A move that
//! would leave the canvas is dropped for that iteration.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster::ClusteredNetlist;
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::netlist::{Net, Netlist, NodeKind, Pin};
use crate::placement::{Location, Placement};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FdStart {
    /// Every soft node starts at the canvas center.
    #[default]
    CanvasCenter,
    /// Soft nodes start from their locations in the input placement.
    Current,
}

impl FromStr for FdStart {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "center" => Ok(FdStart::CanvasCenter),
            "current" => Ok(FdStart::Current),
            other => Err(format!("expected `center` or `current`, got `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdParams {
    pub num_iters: usize,
    /// Attractive factor.
    pub k_a: f64,
    /// Repulsive factor.
    pub k_r: f64,
    /// Extra attraction multiplier for two-pin nets touching a port.
    pub io_factor: f64,
    pub seed: u64,
    pub start: FdStart,
}

impl Default for FdParams {
    fn default() -> Self {
        FdParams {
            num_iters: 100,
            k_a: 1.0,
            k_r: 1.0,
            io_factor: 1.0,
            seed: 0,
            start: FdStart::CanvasCenter,
        }
    }
}

impl FdParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_iters == 0 {
            return Err(Error::InvalidConfig("FD needs at least one iteration".into()));
        }
        for (name, v) in [("k_a", self.k_a), ("k_r", self.k_r), ("io_factor", self.io_factor)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be a nonnegative number, got {v}")));
            }
        }
        Ok(())
    }
}

/// Per-node force accumulators.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ForceField {
    pub fx: Vec<f64>,
    pub fy: Vec<f64>,
}

impl ForceField {
    pub fn zeros(n: usize) -> Self {
        ForceField {
            fx: vec![0.0; n],
            fy: vec![0.0; n],
        }
    }

    fn reset(&mut self) {
        self.fx.iter_mut().for_each(|v| *v = 0.0);
        self.fy.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn max_abs_x(&self) -> f64 {
        self.fx.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_y(&self) -> f64 {
        self.fy.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Star decomposition: `(center, other)` pairs centered on the source pin,
/// or on the first pin when none is marked.
pub fn decompose_star(net: &Net) -> Result<Vec<(Pin, Pin)>> {
    if net.pins.len() < 2 {
        return Err(Error::DegenerateNet(net.id.clone()));
    }
    let c = net.source_index();
    let center = net.pins[c];
    Ok(net
        .pins
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != c)
        .map(|(_, &p)| (center, p))
        .collect())
}

/// Attraction on the node owning `p1`, pointing toward `p2`. Component
/// magnitudes are `k_a * io_scale * |p1 - p2|` per axis; the node owning
/// `p2` receives the negation.
pub fn attractive_force(p1: (f64, f64), p2: (f64, f64), k_a: f64, io_scale: f64) -> (f64, f64) {
    let k = k_a * io_scale;
    (k * (p2.0 - p1.0), k * (p2.1 - p1.1))
}

/// Repulsion on node 1 (center `c1`, size `s1`) away from node 2. Zero unless
/// the two bounding boxes overlap with positive area. Component magnitudes
/// are `k_r * f_r_max * |delta| / dist`. Coincident centers get a unit
/// direction drawn from `rng`.
pub fn repulsive_force<R: Rng + ?Sized>(
    c1: (f64, f64),
    s1: (f64, f64),
    c2: (f64, f64),
    s2: (f64, f64),
    k_r: f64,
    f_r_max: f64,
    rng: &mut R,
) -> (f64, f64) {
    let r1 = Rect::centered(c1.0, c1.1, s1.0, s1.1);
    let r2 = Rect::centered(c2.0, c2.1, s2.0, s2.1);
    if !r1.overlaps(&r2) {
        return (0.0, 0.0);
    }
    pair_repulsion(c1, c2, k_r * f_r_max, rng)
}

fn pair_repulsion<R: Rng + ?Sized>(c1: (f64, f64), c2: (f64, f64), magnitude: f64, rng: &mut R) -> (f64, f64) {
    let (dx, dy) = (c1.0 - c2.0, c1.1 - c2.1);
    let dist = dx.hypot(dy);
    if dist > 0.0 {
        (magnitude * dx / dist, magnitude * dy / dist)
    } else {
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        (magnitude * theta.cos(), magnitude * theta.sin())
    }
}

/// State handed to an observer after each FD iteration.
#[derive(Debug)]
pub struct FdIteration<'a> {
    pub iter: usize,
    /// Node centers after this iteration's moves.
    pub centers: &'a [(f64, f64)],
    /// Normalized forces (the requested displacement of every node).
    pub forces: &'a ForceField,
    pub max_move_distance: f64,
}

/// Runs FD on the clustered netlist. `placement` must locate every macro and
/// port; soft nodes start per `params.start`.
pub fn fd_place(cnl: &ClusteredNetlist, placement: &Placement, params: &FdParams) -> Result<Placement> {
    fd_place_netlist(&cnl.netlist, placement, params, |_| {})
}

/// FD with attraction disabled, used to spread overlapping clusters.
pub fn fd_repulsive_only(cnl: &ClusteredNetlist, placement: &Placement, params: &FdParams) -> Result<Placement> {
    let params = FdParams { k_a: 0.0, ..*params };
    fd_place(cnl, placement, &params)
}

/// FD over any netlist, calling `observer` after every iteration.
pub fn fd_place_netlist<F>(netlist: &Netlist, placement: &Placement, params: &FdParams, mut observer: F) -> Result<Placement>
where
    F: FnMut(&FdIteration<'_>),
{
    params.validate()?;
    let n = netlist.nodes.len();
    let movable: Vec<usize> = netlist.movable_soft_nodes();
    let canvas = netlist.canvas;
    let (cx0, cy0) = canvas.center();

    let mut centers = Vec::with_capacity(n);
    for (i, node) in netlist.nodes.iter().enumerate() {
        let soft = node.kind.is_soft() && node.movable;
        let c = match (soft, params.start, placement.get(i)) {
            (true, FdStart::CanvasCenter, _) | (true, FdStart::Current, None) => (cx0, cy0),
            (_, _, Some(l)) => (l.x, l.y),
            (false, _, None) => return Err(Error::MissingLocation(node.id.clone())),
        };
        centers.push(c);
    }
    let mut out = placement.clone();
    if movable.is_empty() {
        log::warn!("FD: no movable clusters, returning input placement");
        return Ok(out);
    }

    let sizes: Vec<(f64, f64)> = netlist.nodes.iter().map(|n| (n.width, n.height)).collect();
    let is_port: Vec<bool> = netlist.nodes.iter().map(|n| n.kind == NodeKind::Port).collect();
    let orients: Vec<_> = (0..n).map(|i| placement.get(i).map(|l| l.orient).unwrap_or_default()).collect();
    let star_pairs: Vec<(Pin, Pin)> = if params.k_a > 0.0 {
        let mut v = Vec::new();
        for net in &netlist.nets {
            v.extend(decompose_star(net)?);
        }
        v
    } else {
        Vec::new()
    };
    // nodes that can take part in an overlap
    let solid: Vec<usize> = (0..n).filter(|&i| sizes[i].0 > 0.0 && sizes[i].1 > 0.0).collect();

    let max_move = canvas.width.max(canvas.height) / params.num_iters as f64;
    let f_r_max = max_move;
    let canvas_rect = Rect::new(0.0, 0.0, canvas.width, canvas.height);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut forces = ForceField::zeros(n);
    let mut order: Vec<usize> = solid.clone();

    for iter in 0..params.num_iters {
        forces.reset();

        for (a, b) in &star_pairs {
            let pa = pin_pos(&centers, &orients, a);
            let pb = pin_pos(&centers, &orients, b);
            let io = if is_port[a.node] || is_port[b.node] { params.io_factor } else { 1.0 };
            let (fx, fy) = attractive_force(pa, pb, params.k_a, io);
            forces.fx[a.node] += fx;
            forces.fy[a.node] += fy;
            forces.fx[b.node] -= fx;
            forces.fy[b.node] -= fy;
        }

        if params.k_r > 0.0 {
            let rects: Vec<Rect> = (0..n)
                .map(|i| Rect::centered(centers[i].0, centers[i].1, sizes[i].0, sizes[i].1))
                .collect();
            order.sort_by(|&i, &j| rects[i].xl.total_cmp(&rects[j].xl).then(i.cmp(&j)));
            for (k, &i) in order.iter().enumerate() {
                for &j in &order[k + 1..] {
                    if rects[j].xl >= rects[i].xh {
                        break;
                    }
                    if !rects[i].overlaps(&rects[j]) {
                        continue;
                    }
                    let (fx, fy) = pair_repulsion(centers[i], centers[j], params.k_r * f_r_max, &mut rng);
                    forces.fx[i] += fx;
                    forces.fy[i] += fy;
                    forces.fx[j] -= fx;
                    forces.fy[j] -= fy;
                }
            }
        }

        let (mx, my) = (forces.max_abs_x(), forces.max_abs_y());
        if mx > 0.0 {
            forces.fx.iter_mut().for_each(|f| *f = *f / mx * max_move);
        }
        if my > 0.0 {
            forces.fy.iter_mut().for_each(|f| *f = *f / my * max_move);
        }

        for &i in &movable {
            let (nx, ny) = (centers[i].0 + forces.fx[i], centers[i].1 + forces.fy[i]);
            let moved = Rect::centered(nx, ny, sizes[i].0, sizes[i].1);
            if moved.inside(&canvas_rect, 0.0) {
                centers[i] = (nx, ny);
            }
        }

        observer(&FdIteration {
            iter,
            centers: &centers,
            forces: &forces,
            max_move_distance: max_move,
        });
    }

    for &i in &movable {
        out.set(i, Location::with_orient(centers[i].0, centers[i].1, orients[i]));
    }
    Ok(out)
}

fn pin_pos(centers: &[(f64, f64)], orients: &[crate::placement::Orientation], pin: &Pin) -> (f64, f64) {
    let (dx, dy) = orients[pin.node].transform(pin.dx, pin.dy);
    (centers[pin.node].0 + dx, centers[pin.node].1 + dy)
}
