//! Reader for the Bookshelf placement format (`.aux`, `.nodes`, `.nets`,
//! `.pl`, optional `.scl`).
//!
//! Classification: terminals no taller than a placement row become zero-size
//! ports, taller terminals become fixed macros, and movable objects taller
//! than a row become macros. The row height comes from the `.scl` file, or
//! the most common movable height when no `.scl` is given.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use super::{parse_f64, read_to_string, strip_comment, tokens, Design};
use crate::error::{Error, Result};
use crate::netlist::{Canvas, Netlist, NetlistBuilder, Node, NodeKind, PinSpec};
use crate::placement::{Location, Orientation, Placement};

/// Header declarations next to what the parser actually found.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub declared_nodes: usize,
    pub declared_terminals: usize,
    pub declared_nets: usize,
    pub declared_pins: usize,
    pub parsed_nodes: usize,
    pub parsed_terminals: usize,
    /// Nets read from the file, before dropping degenerate ones.
    pub parsed_nets: usize,
    pub parsed_pins: usize,
    pub dropped_nets: usize,
    pub clamped_locations: usize,
}

impl ParseStats {
    pub fn from_netlist(netlist: &Netlist) -> Self {
        let terminals = netlist.nodes.iter().filter(|n| !n.movable).count();
        ParseStats {
            declared_nodes: netlist.nodes.len(),
            declared_terminals: terminals,
            declared_nets: netlist.nets.len(),
            declared_pins: netlist.num_pins(),
            parsed_nodes: netlist.nodes.len(),
            parsed_terminals: terminals,
            parsed_nets: netlist.nets.len(),
            parsed_pins: netlist.num_pins(),
            dropped_nets: 0,
            clamped_locations: 0,
        }
    }
}

#[derive(Debug)]
struct RawNode {
    name: String,
    width: f64,
    height: f64,
    terminal: bool,
}

#[derive(Debug)]
struct RawNet {
    name: String,
    pins: Vec<PinSpec>,
}

#[derive(Debug, Default)]
struct AuxFiles {
    nodes: Option<PathBuf>,
    nets: Option<PathBuf>,
    pl: Option<PathBuf>,
    scl: Option<PathBuf>,
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn header_count(file: &str, lineno: usize, toks: &[&str]) -> Result<usize> {
    toks.last()
        .and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| Error::malformed(file, lineno, format!("bad header `{}`", toks.join(" "))))
}

fn parse_aux(path: &Path) -> Result<AuxFiles> {
    let text = read_to_string(path)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut files = AuxFiles::default();
    for line in text.lines() {
        let line = strip_comment(line);
        let Some((_, rest)) = line.split_once(':') else {
            continue;
        };
        for name in rest.split_whitespace() {
            let p = dir.join(name);
            match Path::new(name).extension().and_then(|e| e.to_str()) {
                Some("nodes") => files.nodes = Some(p),
                Some("nets") => files.nets = Some(p),
                Some("pl") => files.pl = Some(p),
                Some("scl") => files.scl = Some(p),
                _ => {}
            }
        }
    }
    let aux = display_name(path);
    for (slot, ext) in [(&files.nodes, "nodes"), (&files.nets, "nets"), (&files.pl, "pl")] {
        if slot.is_none() {
            return Err(Error::malformed(&aux, 1, format!("no .{ext} file listed")));
        }
    }
    Ok(files)
}

fn parse_nodes(path: &Path) -> Result<(Vec<RawNode>, usize, usize)> {
    let text = read_to_string(path)?;
    let file = display_name(path);
    let mut nodes = Vec::new();
    let (mut num_nodes, mut num_terminals) = (None, None);
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() || line.starts_with("UCLA") {
            continue;
        }
        let toks = tokens(line);
        match toks[0] {
            "NumNodes" => num_nodes = Some(header_count(&file, lineno, &toks)?),
            "NumTerminals" => num_terminals = Some(header_count(&file, lineno, &toks)?),
            name => {
                if toks.len() < 3 {
                    return Err(Error::malformed(&file, lineno, "expected `name width height [terminal]`"));
                }
                let width = parse_f64(&file, lineno, toks[1])?;
                let height = parse_f64(&file, lineno, toks[2])?;
                let terminal = matches!(toks.get(3), Some(&"terminal") | Some(&"terminal_NI"));
                nodes.push(RawNode {
                    name: name.to_string(),
                    width,
                    height,
                    terminal,
                });
            }
        }
    }
    let num_nodes = num_nodes.ok_or_else(|| Error::malformed(&file, 1, "missing NumNodes header"))?;
    let num_terminals = num_terminals.unwrap_or(0);
    if num_nodes != nodes.len() {
        return Err(Error::malformed(
            &file,
            text.lines().count(),
            format!("header declares {num_nodes} nodes, found {}", nodes.len()),
        ));
    }
    let found_terminals = nodes.iter().filter(|n| n.terminal).count();
    if num_terminals != found_terminals {
        return Err(Error::malformed(
            &file,
            text.lines().count(),
            format!("header declares {num_terminals} terminals, found {found_terminals}"),
        ));
    }
    Ok((nodes, num_nodes, num_terminals))
}

fn parse_nets(path: &Path) -> Result<(Vec<RawNet>, usize, usize)> {
    let text = read_to_string(path)?;
    let file = display_name(path);
    let mut nets: Vec<RawNet> = Vec::new();
    let (mut num_nets, mut num_pins) = (None, None);
    let mut expected = 0usize;
    let mut open_line = 0usize;
    let check_degree = |nets: &[RawNet], expected: usize, open_line: usize| -> Result<()> {
        if let Some(last) = nets.last() {
            if last.pins.len() != expected {
                return Err(Error::malformed(
                    &file,
                    open_line,
                    format!("NetDegree {expected} but {} pins listed", last.pins.len()),
                ));
            }
        }
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() || line.starts_with("UCLA") {
            continue;
        }
        let toks = tokens(line);
        match toks[0] {
            "NumNets" => num_nets = Some(header_count(&file, lineno, &toks)?),
            "NumPins" => num_pins = Some(header_count(&file, lineno, &toks)?),
            "NetDegree" => {
                check_degree(&nets, expected, open_line)?;
                let rest: Vec<&str> = toks[1..].iter().copied().filter(|t| *t != ":").collect();
                expected = rest
                    .first()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::malformed(&file, lineno, "bad NetDegree line"))?;
                let name = rest
                    .get(1)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("net{}", nets.len()));
                open_line = lineno;
                nets.push(RawNet {
                    name,
                    pins: Vec::with_capacity(expected),
                });
            }
            node => {
                let net = nets
                    .last_mut()
                    .ok_or_else(|| Error::malformed(&file, lineno, "pin line before any NetDegree"))?;
                let dir = toks.get(1).copied().unwrap_or("B");
                let (dx, dy) = match toks.iter().position(|t| *t == ":") {
                    Some(c) => {
                        if toks.len() < c + 3 {
                            return Err(Error::malformed(&file, lineno, "expected `: dx dy` after pin"));
                        }
                        (parse_f64(&file, lineno, toks[c + 1])?, parse_f64(&file, lineno, toks[c + 2])?)
                    }
                    None => (0.0, 0.0),
                };
                net.pins.push(PinSpec::new(node, dx, dy, dir == "O"));
            }
        }
    }
    check_degree(&nets, expected, open_line)?;
    let num_nets = num_nets.ok_or_else(|| Error::malformed(&file, 1, "missing NumNets header"))?;
    let total_pins: usize = nets.iter().map(|n| n.pins.len()).sum();
    let lines = text.lines().count();
    if num_nets != nets.len() {
        return Err(Error::malformed(
            &file,
            lines,
            format!("header declares {num_nets} nets, found {}", nets.len()),
        ));
    }
    let num_pins = num_pins.unwrap_or(total_pins);
    if num_pins != total_pins {
        return Err(Error::malformed(
            &file,
            lines,
            format!("header declares {num_pins} pins, found {total_pins}"),
        ));
    }
    Ok((nets, num_nets, num_pins))
}

#[derive(Debug, Default)]
struct Rows {
    row_height: Option<f64>,
    xmax: f64,
    ymax: f64,
    count: usize,
}

fn parse_scl(path: &Path) -> Result<Rows> {
    let text = read_to_string(path)?;
    let file = display_name(path);
    let mut rows = Rows::default();
    let (mut coord, mut height, mut spacing, mut origin, mut sites) = (0.0, 0.0, 1.0, 0.0, 0.0);
    let mut in_row = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() || line.starts_with("UCLA") {
            continue;
        }
        let toks = tokens(line);
        let value = |k: usize| -> Result<f64> {
            let t = toks.get(k).ok_or_else(|| Error::malformed(&file, lineno, "missing value"))?;
            parse_f64(&file, lineno, t)
        };
        match toks[0] {
            "CoreRow" => {
                in_row = true;
                (coord, height, spacing, origin, sites) = (0.0, 0.0, 1.0, 0.0, 0.0);
            }
            "Coordinate" => coord = value(2)?,
            "Height" => height = value(2)?,
            "Sitespacing" => spacing = value(2)?,
            "SubrowOrigin" => {
                origin = value(2)?;
                if let Some(k) = toks.iter().position(|t| t.eq_ignore_ascii_case("NumSites")) {
                    sites = value(k + 2)?;
                }
            }
            "End" if in_row => {
                in_row = false;
                rows.count += 1;
                rows.row_height.get_or_insert(height);
                rows.xmax = rows.xmax.max(origin + sites * spacing);
                rows.ymax = rows.ymax.max(coord + height);
            }
            _ => {}
        }
    }
    Ok(rows)
}

struct RawLocation {
    x: f64,
    y: f64,
    orient: Orientation,
}

fn parse_pl_raw(path: &Path, index: &HashMap<&str, usize>) -> Result<Vec<Option<RawLocation>>> {
    let text = read_to_string(path)?;
    let file = display_name(path);
    let mut out: Vec<Option<RawLocation>> = (0..index.len()).map(|_| None).collect();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() || line.starts_with("UCLA") {
            continue;
        }
        let toks = tokens(line);
        if toks.len() < 3 {
            return Err(Error::malformed(&file, lineno, "expected `name x y [: orient]`"));
        }
        let idx = *index
            .get(toks[0])
            .ok_or_else(|| Error::malformed(&file, lineno, format!("unknown node `{}`", toks[0])))?;
        let x = parse_f64(&file, lineno, toks[1])?;
        let y = parse_f64(&file, lineno, toks[2])?;
        let orient = match toks.iter().position(|t| *t == ":") {
            Some(c) => match toks.get(c + 1) {
                Some(o) => o.parse().map_err(|e: String| Error::malformed(&file, lineno, e))?,
                None => Orientation::N,
            },
            None => Orientation::N,
        };
        out[idx] = Some(RawLocation { x, y, orient });
    }
    Ok(out)
}

fn most_common_height(nodes: &[RawNode]) -> Option<f64> {
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for n in nodes.iter().filter(|n| !n.terminal && n.height > 0.0) {
        *counts.entry(n.height.to_bits()).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(f64::from_bits(b.0).total_cmp(&f64::from_bits(a.0))))
        .map(|(h, _)| f64::from_bits(h))
}

/// Parses a Bookshelf benchmark through its `.aux` file.
pub fn parse_bookshelf(aux_path: &Path) -> Result<Design> {
    let files = parse_aux(aux_path)?;
    let (raw_nodes, declared_nodes, declared_terminals) = parse_nodes(files.nodes.as_ref().unwrap())?;
    let (raw_nets, declared_nets, declared_pins) = parse_nets(files.nets.as_ref().unwrap())?;
    let rows = match &files.scl {
        Some(p) => Some(parse_scl(p)?),
        None => None,
    };
    let name_index: HashMap<&str, usize> = raw_nodes.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
    if name_index.len() != raw_nodes.len() {
        return Err(Error::malformed(
            &display_name(files.nodes.as_ref().unwrap()),
            1,
            "duplicate node names",
        ));
    }
    let raw_locs = parse_pl_raw(files.pl.as_ref().unwrap(), &name_index)?;

    let row_height = rows
        .as_ref()
        .and_then(|r| r.row_height)
        .or_else(|| most_common_height(&raw_nodes))
        .unwrap_or(0.0);
    let kind_of = |n: &RawNode| -> NodeKind {
        let tall = n.height > row_height;
        match (n.terminal, tall) {
            (true, false) => NodeKind::Port,
            (true, true) | (false, true) => NodeKind::Macro,
            (false, false) => NodeKind::StdCell,
        }
    };

    let canvas = match rows.as_ref().filter(|r| r.count > 0) {
        Some(r) => Canvas::new(r.xmax, r.ymax)?,
        None => {
            let mut xmax: f64 = 0.0;
            let mut ymax: f64 = 0.0;
            let mut any_fixed = false;
            for (n, l) in raw_nodes.iter().zip(&raw_locs) {
                if let (true, Some(l)) = (n.terminal, l) {
                    any_fixed = true;
                    xmax = xmax.max(l.x + n.width);
                    ymax = ymax.max(l.y + n.height);
                }
            }
            if !any_fixed {
                for (n, l) in raw_nodes.iter().zip(&raw_locs) {
                    if let Some(l) = l {
                        xmax = xmax.max(l.x + n.width);
                        ymax = ymax.max(l.y + n.height);
                    }
                }
            }
            Canvas::new(xmax, ymax)?
        }
    };

    let mut builder = NetlistBuilder::new(canvas);
    let mut placement = Placement::new(raw_nodes.len());
    let mut clamped = 0usize;
    for (i, (n, l)) in raw_nodes.iter().zip(&raw_locs).enumerate() {
        let kind = kind_of(n);
        let (w, h) = if kind == NodeKind::Port { (0.0, 0.0) } else { (n.width, n.height) };
        builder.add_node(Node::new(n.name.clone(), kind, w, h, !n.terminal))?;
        let Some(l) = l else { continue };
        let (mut cx, mut cy) = (l.x + w / 2.0, l.y + h / 2.0);
        if n.terminal {
            let (hw, hh) = ((w / 2.0).min(canvas.width / 2.0), (h / 2.0).min(canvas.height / 2.0));
            let (nx, ny) = (cx.clamp(hw, canvas.width - hw), cy.clamp(hh, canvas.height - hh));
            if (nx, ny) != (cx, cy) {
                log::debug!("clamped fixed node `{}` from ({cx}, {cy}) to ({nx}, {ny})", n.name);
                clamped += 1;
                (cx, cy) = (nx, ny);
            }
        }
        placement.set(i, Location::with_orient(cx, cy, l.orient));
    }
    if clamped > 0 {
        log::info!("clamped {clamped} fixed node location(s) onto the canvas");
    }
    for net in &raw_nets {
        builder.add_net(net.name.clone(), 1.0, &net.pins)?;
    }
    let (netlist, build_stats) = builder.build();
    let stats = ParseStats {
        declared_nodes,
        declared_terminals,
        declared_nets,
        declared_pins,
        parsed_nodes: raw_nodes.len(),
        parsed_terminals: raw_nodes.iter().filter(|n| n.terminal).count(),
        parsed_nets: raw_nets.len(),
        parsed_pins: raw_nets.iter().map(|n| n.pins.len()).sum(),
        dropped_nets: build_stats.dropped_nets,
        clamped_locations: clamped,
    };
    Ok(Design {
        netlist,
        placement,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_set(dir: &Path, nodes: &str, nets: &str, pl: &str, scl: Option<&str>) -> PathBuf {
        fs::write(dir.join("t.nodes"), nodes).unwrap();
        fs::write(dir.join("t.nets"), nets).unwrap();
        fs::write(dir.join("t.pl"), pl).unwrap();
        let mut aux = String::from("RowBasedPlacement : t.nodes t.nets t.pl");
        if let Some(scl) = scl {
            fs::write(dir.join("t.scl"), scl).unwrap();
            aux.push_str(" t.scl");
        }
        aux.push('\n');
        fs::write(dir.join("t.aux"), aux).unwrap();
        dir.join("t.aux")
    }

    const NODES: &str = "UCLA nodes 1.0\n# comment\nNumNodes : 3\nNumTerminals : 1\n  a 2 1\n  b 2 1\n  p 1 1 terminal\n";
    const NETS: &str = "UCLA nets 1.0\nNumNets : 1\nNumPins : 3\nNetDegree : 3 n0\n  a O : 0.5 0\n  b I : -1 0.5\n  p I\n";
    const PL: &str = "UCLA pl 1.0\na 0 0 : N\nb 4 0 : N\np 11 3 : N /FIXED\n";
    const SCL: &str = "UCLA scl 1.0\nNumRows : 2\nCoreRow Horizontal\n Coordinate : 0\n Height : 1\n Sitewidth : 1\n Sitespacing : 1\n Siteorient : 1\n Sitesymmetry : 1\n SubrowOrigin : 0 NumSites : 10\nEnd\nCoreRow Horizontal\n Coordinate : 1\n Height : 1\n Sitewidth : 1\n Sitespacing : 1\n Siteorient : 1\n Sitesymmetry : 1\n SubrowOrigin : 0 NumSites : 10\nEnd\n";

    #[test]
    fn minimal_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let aux = write_set(dir.path(), NODES, NETS, PL, Some(SCL));
        let d = parse_bookshelf(&aux).unwrap();
        assert_eq!(d.netlist.nodes.len(), 3);
        assert_eq!(d.netlist.nets.len(), 1);
        assert_eq!(d.netlist.canvas, Canvas::new(10.0, 2.0).unwrap());
        assert_eq!(d.netlist.nodes[2].kind, NodeKind::Port);
        assert!(!d.netlist.nodes[2].movable);
        assert_eq!(d.netlist.nodes[0].kind, NodeKind::StdCell);
        // lower-left (0,0) of a 2x1 cell -> center (1, 0.5)
        assert_eq!(d.placement.get(0).unwrap(), Location::new(1.0, 0.5));
        // port at (11,3) clamped onto a 10x2 canvas
        assert_eq!(d.placement.get(2).unwrap(), Location::new(10.0, 2.0));
        assert_eq!(d.stats.clamped_locations, 1);
        assert!(d.netlist.nets[0].pins[0].is_source);
        assert_eq!(d.stats.declared_nodes, d.stats.parsed_nodes);
    }

    #[test]
    fn canvas_from_fixed_objects_without_scl() {
        let dir = tempfile::tempdir().unwrap();
        let aux = write_set(dir.path(), NODES, NETS, PL, None);
        let d = parse_bookshelf(&aux).unwrap();
        assert_eq!(d.netlist.canvas, Canvas::new(12.0, 4.0).unwrap());
    }

    #[test]
    fn dangling_pin_reference() {
        let dir = tempfile::tempdir().unwrap();
        let nets = NETS.replace("  b I", "  zz I");
        let aux = write_set(dir.path(), NODES, &nets, PL, Some(SCL));
        assert!(matches!(parse_bookshelf(&aux), Err(Error::DanglingPinReference { .. })));
    }

    #[test]
    fn header_mismatch_is_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let nodes = NODES.replace("NumNodes : 3", "NumNodes : 4");
        let aux = write_set(dir.path(), &nodes, NETS, PL, Some(SCL));
        assert!(matches!(parse_bookshelf(&aux), Err(Error::MalformedLine { .. })));

        let nets = NETS.replace("NetDegree : 3", "NetDegree : 2");
        let aux = write_set(dir.path(), NODES, &nets, PL, Some(SCL));
        let err = parse_bookshelf(&aux).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 4, .. }), "{err}");
    }

    #[test]
    fn bad_number_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let nodes = NODES.replace("  b 2 1", "  b two 1");
        let aux = write_set(dir.path(), &nodes, NETS, PL, Some(SCL));
        assert!(matches!(parse_bookshelf(&aux), Err(Error::MalformedLine { line: 6, .. })));
    }

    #[test]
    fn missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let aux = write_set(dir.path(), NODES, NETS, PL, None);
        fs::remove_file(dir.path().join("t.nets")).unwrap();
        assert!(matches!(parse_bookshelf(&aux), Err(Error::MissingFile(_))));
        assert!(matches!(
            parse_bookshelf(&dir.path().join("nope.aux")),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn tall_objects_become_macros() {
        let dir = tempfile::tempdir().unwrap();
        let nodes = "UCLA nodes 1.0\nNumNodes : 3\nNumTerminals : 1\na 2 1\nm 4 4\nf 3 3 terminal\n";
        let nets = "UCLA nets 1.0\nNumNets : 1\nNumPins : 2\nNetDegree : 2\na I\nm O\n";
        let pl = "a 0 0\nm 1 1 : N\nf 5 0 : FS /FIXED\n";
        let aux = write_set(dir.path(), nodes, nets, pl, Some(SCL));
        let d = parse_bookshelf(&aux).unwrap();
        let kinds: Vec<_> = d.netlist.nodes.iter().map(|n| (n.kind, n.movable)).collect();
        assert_eq!(
            kinds,
            vec![(NodeKind::StdCell, true), (NodeKind::Macro, true), (NodeKind::Macro, false)]
        );
        assert_eq!(d.netlist.nets[0].id, "net0");
        assert_eq!(d.placement.get(2).unwrap().orient, Orientation::FS);
    }
}
