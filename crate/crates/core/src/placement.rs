//! Node locations and orientations.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::netlist::{Netlist, Pin};

/// Macro orientation restricted to mirrors and the 180-degree rotation.
///
/// Stored internally as a pair of flips, so composition is XOR.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    #[default]
    N,
    /// Mirrored across the vertical axis (x negated).
    FN,
    /// Rotated 180 degrees.
    S,
    /// Mirrored across the horizontal axis (y negated).
    FS,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [Orientation::N, Orientation::FN, Orientation::S, Orientation::FS];

    fn flips(self) -> (bool, bool) {
        match self {
            Orientation::N => (false, false),
            Orientation::FN => (true, false),
            Orientation::S => (true, true),
            Orientation::FS => (false, true),
        }
    }

    fn from_flips(fx: bool, fy: bool) -> Self {
        match (fx, fy) {
            (false, false) => Orientation::N,
            (true, false) => Orientation::FN,
            (true, true) => Orientation::S,
            (false, true) => Orientation::FS,
        }
    }

    pub fn compose(self, other: Orientation) -> Orientation {
        let (ax, ay) = self.flips();
        let (bx, by) = other.flips();
        Orientation::from_flips(ax ^ bx, ay ^ by)
    }

    pub fn transform(self, dx: f64, dy: f64) -> (f64, f64) {
        let (fx, fy) = self.flips();
        (if fx { -dx } else { dx }, if fy { -dy } else { dy })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::N => "N",
            Orientation::FN => "FN",
            Orientation::S => "S",
            Orientation::FS => "FS",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "N" => Ok(Orientation::N),
            "FN" => Ok(Orientation::FN),
            "S" => Ok(Orientation::S),
            "FS" => Ok(Orientation::FS),
            other => Err(format!("unsupported orientation `{other}`")),
        }
    }
}

/// Pin offset as seen after applying `orient` to its owner.
pub fn transform_pin_offset(offset: (f64, f64), orient: Orientation) -> (f64, f64) {
    orient.transform(offset.0, offset.1)
}

/// Center location of one node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    pub x: f64,
    pub y: f64,
    pub orient: Orientation,
}

impl Location {
    pub fn new(x: f64, y: f64) -> Self {
        Location {
            x,
            y,
            orient: Orientation::N,
        }
    }

    pub fn with_orient(x: f64, y: f64, orient: Orientation) -> Self {
        Location { x, y, orient }
    }
}

/// Node index -> center location. Nodes without a location are `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Placement {
    locs: Vec<Option<Location>>,
}

impl Placement {
    pub fn new(num_nodes: usize) -> Self {
        Placement {
            locs: vec![None; num_nodes],
        }
    }

    pub fn len(&self) -> usize {
        self.locs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locs.is_empty()
    }

    pub fn get(&self, node: usize) -> Option<Location> {
        self.locs.get(node).copied().flatten()
    }

    pub fn set(&mut self, node: usize, loc: Location) {
        if node >= self.locs.len() {
            self.locs.resize(node + 1, None);
        }
        self.locs[node] = Some(loc);
    }

    pub fn clear(&mut self, node: usize) {
        if let Some(slot) = self.locs.get_mut(node) {
            *slot = None;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Location)> + '_ {
        self.locs.iter().enumerate().filter_map(|(i, l)| l.map(|l| (i, l)))
    }

    pub fn loc(&self, netlist: &Netlist, node: usize) -> Result<Location> {
        self.get(node)
            .ok_or_else(|| Error::MissingLocation(netlist.nodes[node].id.clone()))
    }

    /// Fails with the first node that has no location.
    pub fn ensure_complete(&self, netlist: &Netlist) -> Result<()> {
        for (i, n) in netlist.nodes.iter().enumerate() {
            if self.get(i).is_none() {
                return Err(Error::MissingLocation(n.id.clone()));
            }
        }
        Ok(())
    }

    /// Absolute pin position. Panics if the owner has no location.
    pub fn pin_position(&self, pin: &Pin) -> (f64, f64) {
        let loc = self.locs[pin.node].expect("pin owner has no location");
        let (dx, dy) = loc.orient.transform(pin.dx, pin.dy);
        (loc.x + dx, loc.y + dy)
    }

    /// Bounding box of a placed node. Panics if it has no location.
    pub fn bbox(&self, netlist: &Netlist, node: usize) -> Rect {
        let loc = self.locs[node].expect("node has no location");
        let n = &netlist.nodes[node];
        Rect::centered(loc.x, loc.y, n.width, n.height)
    }
}
