//! Bookshelf `.pl` placement files. Coordinates on disk are lower-left
//! corners; in memory they are centers.

use std::fmt::Write as _;
use std::path::Path;

use super::{parse_f64, read_to_string, strip_comment, tokens, write_string};
use crate::error::{Error, Result};
use crate::netlist::Netlist;
use crate::placement::{Location, Placement};

/// Decimal digits written for every coordinate.
pub const PL_PRECISION: usize = 6;

pub fn format_placement(netlist: &Netlist, placement: &Placement) -> Result<String> {
    let mut out = String::from("UCLA pl 1.0\n\n");
    for (i, node) in netlist.nodes.iter().enumerate() {
        let Some(loc) = placement.get(i) else {
            if node.movable {
                return Err(Error::MissingLocation(node.id.clone()));
            }
            continue;
        };
        let x = loc.x - node.width / 2.0;
        let y = loc.y - node.height / 2.0;
        let _ = write!(
            out,
            "{} {:.p$} {:.p$} : {}",
            node.id,
            x,
            y,
            loc.orient,
            p = PL_PRECISION
        );
        if !node.movable {
            out.push_str(" /FIXED");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes every located node; fails if a movable node has no location.
pub fn write_placement(netlist: &Netlist, placement: &Placement, path: &Path) -> Result<()> {
    let text = format_placement(netlist, placement)?;
    write_string(path, &text)
}

pub fn parse_placement_str(netlist: &Netlist, text: &str, file: &str) -> Result<Placement> {
    let mut placement = Placement::new(netlist.nodes.len());
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() || line.starts_with("UCLA") {
            continue;
        }
        let toks = tokens(line);
        if toks.len() < 3 {
            return Err(Error::malformed(file, lineno, "expected `name x y [: orient]`"));
        }
        let idx = netlist
            .node_index(toks[0])
            .ok_or_else(|| Error::malformed(file, lineno, format!("unknown node `{}`", toks[0])))?;
        let node = &netlist.nodes[idx];
        let x = parse_f64(file, lineno, toks[1])?;
        let y = parse_f64(file, lineno, toks[2])?;
        let orient = match toks.iter().position(|t| *t == ":").and_then(|c| toks.get(c + 1)) {
            Some(o) => o.parse().map_err(|e: String| Error::malformed(file, lineno, e))?,
            None => Default::default(),
        };
        placement.set(
            idx,
            Location::with_orient(x + node.width / 2.0, y + node.height / 2.0, orient),
        );
    }
    Ok(placement)
}

pub fn read_placement(netlist: &Netlist, path: &Path) -> Result<Placement> {
    let text = read_to_string(path)?;
    let file = path.display().to_string();
    parse_placement_str(netlist, &text, &file)
}
