//! Netlist data model: nodes, pins, weighted nets and the canvas they live on.
//!
//! Node references inside pins are indices into [`Netlist::nodes`]; string ids
//! are only used at the file boundary.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Macro,
    StdCell,
    Cluster,
    Port,
}

impl NodeKind {
    /// Soft nodes are the ones force-directed placement is allowed to move.
    pub fn is_soft(self) -> bool {
        matches!(self, NodeKind::StdCell | NodeKind::Cluster)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Macro => "macro",
            NodeKind::StdCell => "stdcell",
            NodeKind::Cluster => "cluster",
            NodeKind::Port => "port",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "macro" => Ok(NodeKind::Macro),
            "stdcell" => Ok(NodeKind::StdCell),
            "cluster" => Ok(NodeKind::Cluster),
            "port" => Ok(NodeKind::Port),
            other => Err(format!("unknown node kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub width: f64,
    pub height: f64,
    pub movable: bool,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind, width: f64, height: f64, movable: bool) -> Self {
        Node {
            id: id.into(),
            kind,
            width,
            height,
            movable,
        }
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn is_movable_macro(&self) -> bool {
        self.kind == NodeKind::Macro && self.movable
    }
}

/// A pin on a net. Offsets are measured from the owner's center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pin {
    pub node: usize,
    pub dx: f64,
    pub dy: f64,
    pub is_source: bool,
}

impl Pin {
    pub fn at_center(node: usize) -> Self {
        Pin {
            node,
            dx: 0.0,
            dy: 0.0,
            is_source: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Net {
    pub id: String,
    pub weight: f64,
    pub pins: Vec<Pin>,
}

impl Net {
    /// Index of the driving pin: the marked source, or the first pin.
    pub fn source_index(&self) -> usize {
        self.pins.iter().position(|p| p.is_source).unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Canvas {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(Error::InvalidDimension(format!(
                "canvas must be positive, got {width} x {height}"
            )));
        }
        Ok(Canvas { width, height })
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width).contains(&x) && (0.0..=self.height).contains(&y)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.width / 2.0, self.height / 2.0)
    }
}

/// Immutable netlist. Build it with [`NetlistBuilder`].
#[derive(Clone, Debug)]
pub struct Netlist {
    pub nodes: Vec<Node>,
    pub nets: Vec<Net>,
    pub canvas: Canvas,
    index: HashMap<String, usize>,
}

impl Netlist {
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Result<&Node> {
        self.node_index(id)
            .map(|i| &self.nodes[i])
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Indices of movable hard macros, in netlist order.
    pub fn movable_macros(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].is_movable_macro())
            .collect()
    }

    /// Indices of soft nodes that force-directed placement may move.
    pub fn movable_soft_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].kind.is_soft() && self.nodes[i].movable)
            .collect()
    }

    pub fn num_pins(&self) -> usize {
        self.nets.iter().map(|n| n.pins.len()).sum()
    }

    pub fn count_kind(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }
}

/// Pin reference by node name, before resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct PinSpec {
    pub node: String,
    pub dx: f64,
    pub dy: f64,
    pub is_source: bool,
}

impl PinSpec {
    pub fn new(node: impl Into<String>, dx: f64, dy: f64, is_source: bool) -> Self {
        PinSpec {
            node: node.into(),
            dx,
            dy,
            is_source,
        }
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct BuildStats {
    pub dropped_nets: usize,
    pub clamped_pins: usize,
    pub extra_sources: usize,
}

#[derive(Debug)]
pub struct NetlistBuilder {
    canvas: Canvas,
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    nets: Vec<Net>,
    stats: BuildStats,
}

impl NetlistBuilder {
    pub fn new(canvas: Canvas) -> Self {
        NetlistBuilder {
            canvas,
            nodes: Vec::new(),
            index: HashMap::new(),
            nets: Vec::new(),
            stats: BuildStats::default(),
        }
    }

    pub fn add_node(&mut self, node: Node) -> Result<usize> {
        match node.kind {
            NodeKind::Port => {
                if node.width != 0.0 || node.height != 0.0 {
                    return Err(Error::InvalidDimension(format!(
                        "port `{}` must have zero size",
                        node.id
                    )));
                }
            }
            _ => {
                if !(node.width > 0.0 && node.height > 0.0) {
                    return Err(Error::InvalidDimension(format!(
                        "node `{}` must have positive size, got {} x {}",
                        node.id, node.width, node.height
                    )));
                }
            }
        }
        if self.index.contains_key(&node.id) {
            return Err(Error::InvalidConfig(format!("duplicate node id `{}`", node.id)));
        }
        let idx = self.nodes.len();
        self.index.insert(node.id.clone(), idx);
        self.nodes.push(node);
        Ok(idx)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Adds a net by node names. Nets with fewer than two pins are dropped
    /// with a warning; returns whether the net was kept.
    pub fn add_net(&mut self, id: impl Into<String>, weight: f64, pins: &[PinSpec]) -> Result<bool> {
        let id = id.into();
        let mut resolved = Vec::with_capacity(pins.len());
        for p in pins {
            let node = self.index.get(&p.node).copied().ok_or_else(|| Error::DanglingPinReference {
                net: id.clone(),
                node: p.node.clone(),
            })?;
            resolved.push(Pin {
                node,
                dx: p.dx,
                dy: p.dy,
                is_source: p.is_source,
            });
        }
        self.add_resolved_net(id, weight, resolved)
    }

    /// Adds a net whose pins already carry node indices.
    pub fn add_resolved_net(&mut self, id: String, weight: f64, mut pins: Vec<Pin>) -> Result<bool> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::InvalidConfig(format!("net `{id}` has invalid weight {weight}")));
        }
        if pins.len() < 2 {
            log::warn!("dropping net `{id}` with {} pin(s)", pins.len());
            self.stats.dropped_nets += 1;
            return Ok(false);
        }
        let mut seen_source = false;
        for pin in &mut pins {
            let owner = self
                .nodes
                .get(pin.node)
                .ok_or_else(|| Error::DanglingPinReference {
                    net: id.clone(),
                    node: pin.node.to_string(),
                })?;
            let (hw, hh) = (owner.width / 2.0, owner.height / 2.0);
            if pin.dx.abs() > hw || pin.dy.abs() > hh {
                self.stats.clamped_pins += 1;
                pin.dx = pin.dx.clamp(-hw, hw);
                pin.dy = pin.dy.clamp(-hh, hh);
            }
            if pin.is_source {
                if seen_source {
                    pin.is_source = false;
                    self.stats.extra_sources += 1;
                }
                seen_source = true;
            }
        }
        self.nets.push(Net { id, weight, pins });
        Ok(true)
    }

    pub fn stats(&self) -> BuildStats {
        self.stats
    }

    pub fn build(self) -> (Netlist, BuildStats) {
        if self.stats.clamped_pins > 0 {
            log::warn!(
                "clamped {} pin offset(s) into their owner's extents",
                self.stats.clamped_pins
            );
        }
        if self.stats.extra_sources > 0 {
            log::warn!(
                "{} net(s) declared more than one source pin; kept the first",
                self.stats.extra_sources
            );
        }
        (
            Netlist {
                nodes: self.nodes,
                nets: self.nets,
                canvas: self.canvas,
                index: self.index,
            },
            self.stats,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canvas() -> Canvas {
        Canvas::new(100.0, 100.0).unwrap()
    }

    #[test]
    fn rejects_dangling_pin() {
        let mut b = NetlistBuilder::new(canvas());
        b.add_node(Node::new("a", NodeKind::Macro, 10.0, 10.0, true)).unwrap();
        let err = b
            .add_net("n", 1.0, &[PinSpec::new("a", 0.0, 0.0, true), PinSpec::new("zz", 0.0, 0.0, false)])
            .unwrap_err();
        assert!(matches!(err, Error::DanglingPinReference { .. }));
    }

    #[test]
    fn drops_single_pin_net() {
        let mut b = NetlistBuilder::new(canvas());
        b.add_node(Node::new("a", NodeKind::Macro, 10.0, 10.0, true)).unwrap();
        assert!(!b.add_net("n", 1.0, &[PinSpec::new("a", 0.0, 0.0, true)]).unwrap());
        let (nl, stats) = b.build();
        assert!(nl.nets.is_empty());
        assert_eq!(stats.dropped_nets, 1);
    }

    #[test]
    fn clamps_pin_offsets_and_extra_sources() {
        let mut b = NetlistBuilder::new(canvas());
        b.add_node(Node::new("a", NodeKind::Macro, 10.0, 4.0, true)).unwrap();
        b.add_node(Node::new("p", NodeKind::Port, 0.0, 0.0, false)).unwrap();
        b.add_net(
            "n",
            1.0,
            &[PinSpec::new("a", 7.0, -3.0, true), PinSpec::new("p", 1.0, 0.0, true)],
        )
        .unwrap();
        let (nl, stats) = b.build();
        let pins = &nl.nets[0].pins;
        assert_eq!((pins[0].dx, pins[0].dy), (5.0, -2.0));
        assert_eq!((pins[1].dx, pins[1].dy), (0.0, 0.0));
        assert!(!pins[1].is_source);
        assert_eq!(stats.clamped_pins, 2);
        assert_eq!(stats.extra_sources, 1);
    }

    #[test]
    fn port_must_be_zero_sized() {
        let mut b = NetlistBuilder::new(canvas());
        assert!(b.add_node(Node::new("p", NodeKind::Port, 1.0, 0.0, false)).is_err());
        assert!(b.add_node(Node::new("m", NodeKind::Macro, 0.0, 1.0, true)).is_err());
        b.add_node(Node::new("m", NodeKind::Macro, 1.0, 1.0, true)).unwrap();
        assert!(b.add_node(Node::new("m", NodeKind::Macro, 1.0, 1.0, true)).is_err());
    }

    #[test]
    fn source_index_falls_back_to_first() {
        let net = Net {
            id: "n".into(),
            weight: 1.0,
            pins: vec![Pin::at_center(0), Pin::at_center(1)],
        };
        assert_eq!(net.source_index(), 0);
    }
}
