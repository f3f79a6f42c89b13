//! Grid-bucket clustering of standard cells into square soft macros.
//!
//! Standard cells are grouped by the grid cell containing their initial
//! location. This stands in for hypergraph-based grouping; location is the
//! only input used.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::netlist::{Netlist, NetlistBuilder, Node, NodeKind, Pin};
use crate::placement::{Location, Placement};

#[derive(Clone, Debug)]
pub struct ClusteredNetlist {
    /// Netlist with every movable std cell replaced by its cluster.
    pub netlist: Netlist,
    /// Std-cell id -> cluster id.
    pub cluster_of: HashMap<String, String>,
    /// Original node index -> node index in `netlist`.
    pub node_map: Vec<usize>,
    /// Exact summed member area of each node in `netlist`; equals
    /// `width * height` for nodes that are not clusters.
    pub member_area: Vec<f64>,
    /// Clusters at their bucket centers, other nodes at their input locations.
    pub initial: Placement,
    /// Nets dropped because all their pins fell inside one cluster.
    pub internal_nets: usize,
}

impl ClusteredNetlist {
    /// Wraps a netlist without clustering; std cells stay as individual soft nodes.
    pub fn unclustered(netlist: Netlist, initial: Placement) -> Self {
        let member_area = netlist.nodes.iter().map(Node::area).collect();
        let node_map = (0..netlist.nodes.len()).collect();
        ClusteredNetlist {
            netlist,
            cluster_of: HashMap::new(),
            node_map,
            member_area,
            initial,
            internal_nets: 0,
        }
    }

    pub fn num_clusters(&self) -> usize {
        self.netlist.count_kind(NodeKind::Cluster)
    }

    /// Maps a placement of this netlist back onto the source netlist.
    /// Clustered std cells keep their `original` locations.
    pub fn lift(&self, source: &Netlist, original: &Placement, clustered: &Placement) -> Placement {
        let mut out = original.clone();
        for (i, node) in source.nodes.iter().enumerate() {
            let target = self.node_map[i];
            if node.kind == NodeKind::StdCell && self.netlist.nodes[target].kind == NodeKind::Cluster {
                continue;
            }
            if let Some(loc) = clustered.get(target) {
                out.set(i, loc);
            }
        }
        out
    }
}

/// Clusters movable std cells by the grid cell holding their initial center.
pub fn cluster_by_grid(netlist: &Netlist, initial: &Placement, grid: &Grid) -> Result<ClusteredNetlist> {
    let is_clusterable = |n: &Node| n.kind == NodeKind::StdCell && n.movable;

    // bucket index (row-major, so ordered by (row, col)) -> member node indices
    let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, node) in netlist.nodes.iter().enumerate() {
        if !is_clusterable(node) {
            continue;
        }
        let loc = initial
            .get(i)
            .ok_or_else(|| Error::MissingInitialLocation(node.id.clone()))?;
        let (c, r) = grid.cell_of(loc.x, loc.y);
        buckets.entry(grid.index(c, r)).or_default().push(i);
    }

    let mut builder = NetlistBuilder::new(netlist.canvas);
    let mut node_map = vec![usize::MAX; netlist.nodes.len()];
    let mut member_area = Vec::new();
    let mut placement = Placement::new(0);
    let mut taken: HashSet<&str> = HashSet::new();
    for (i, node) in netlist.nodes.iter().enumerate() {
        if is_clusterable(node) {
            continue;
        }
        let idx = builder.add_node(node.clone())?;
        node_map[i] = idx;
        member_area.push(node.area());
        if let Some(loc) = initial.get(i) {
            placement.set(idx, loc);
        }
        taken.insert(node.id.as_str());
    }

    let mut cluster_of = HashMap::new();
    for (&bucket, members) in &buckets {
        let (c, r) = grid.col_row(bucket);
        let mut id = format!("cluster_{r}_{c}");
        while taken.contains(id.as_str()) {
            id.push('_');
        }
        let area: f64 = members.iter().map(|&m| netlist.nodes[m].area()).sum();
        let side = area.sqrt();
        let idx = builder.add_node(Node::new(id.clone(), NodeKind::Cluster, side, side, true))?;
        member_area.push(area);
        let (x, y) = grid.cell_center(c, r)?;
        placement.set(idx, Location::new(x, y));
        for &m in members {
            node_map[m] = idx;
            cluster_of.insert(netlist.nodes[m].id.clone(), id.clone());
        }
    }

    let mut internal_nets = 0;
    for net in &netlist.nets {
        let mut pins: Vec<Pin> = Vec::with_capacity(net.pins.len());
        let mut cluster_slot: HashMap<usize, usize> = HashMap::new();
        for pin in &net.pins {
            let owner = &netlist.nodes[pin.node];
            let target = node_map[pin.node];
            if is_clusterable(owner) {
                match cluster_slot.get(&target) {
                    Some(&slot) => pins[slot].is_source |= pin.is_source,
                    None => {
                        cluster_slot.insert(target, pins.len());
                        pins.push(Pin {
                            node: target,
                            dx: 0.0,
                            dy: 0.0,
                            is_source: pin.is_source,
                        });
                    }
                }
            } else {
                pins.push(Pin { node: target, ..*pin });
            }
        }
        if pins.len() < 2 {
            internal_nets += 1;
            continue;
        }
        builder.add_resolved_net(net.id.clone(), net.weight, pins)?;
    }
    if internal_nets > 0 {
        log::debug!("dropped {internal_nets} net(s) internal to a single cluster");
    }

    let (clustered, _) = builder.build();
    let mut initial_out = Placement::new(clustered.nodes.len());
    for (i, loc) in placement.iter() {
        initial_out.set(i, loc);
    }
    Ok(ClusteredNetlist {
        netlist: clustered,
        cluster_of,
        node_map,
        member_area,
        initial: initial_out,
        internal_nets,
    })
}

/// Degenerate initial placements that put every movable node at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VacuousMode {
    Point(f64, f64),
    LowerLeft,
    UpperRight,
}

impl FromStr for VacuousMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lower-left" => Ok(VacuousMode::LowerLeft),
            "upper-right" => Ok(VacuousMode::UpperRight),
            _ => {
                let rest = s
                    .strip_prefix("point:")
                    .ok_or_else(|| format!("expected lower-left, upper-right or point:X,Y, got `{s}`"))?;
                let (x, y) = rest.split_once(',').ok_or_else(|| format!("bad point `{rest}`"))?;
                let x = x.trim().parse::<f64>().map_err(|e| e.to_string())?;
                let y = y.trim().parse::<f64>().map_err(|e| e.to_string())?;
                Ok(VacuousMode::Point(x, y))
            }
        }
    }
}

/// Places every movable node at the single point selected by `mode`.
/// Fixed nodes are left without a location.
pub fn apply_vacuous_placement(netlist: &Netlist, mode: VacuousMode) -> Result<Placement> {
    let canvas = netlist.canvas;
    let (x, y) = match mode {
        VacuousMode::Point(x, y) => (x, y),
        VacuousMode::LowerLeft => (0.0, 0.0),
        VacuousMode::UpperRight => (canvas.width, canvas.height),
    };
    if !canvas.contains_point(x, y) {
        return Err(Error::PointOutsideCanvas { x, y });
    }
    let mut p = Placement::new(netlist.nodes.len());
    for (i, n) in netlist.nodes.iter().enumerate() {
        if n.movable {
            p.set(i, Location::new(x, y));
        }
    }
    Ok(p)
}
