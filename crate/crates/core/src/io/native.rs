//! Native line-based netlist format.
//!
//! ```text
//! # comment
//! canvas <width> <height>
//! node <id> <macro|stdcell|cluster|port> <width> <height> [fixed]
//! net <id> [<weight>]
//! pin <node-id> <dx> <dy> [source]
//! ```
//!
//! `pin` records attach to the most recent `net`. Offsets are from the node
//! center. Numbers are written in shortest round-trip form, so
//! parse -> write -> parse is exact.

use std::fmt::Write as _;
use std::path::Path;

use super::{parse_f64, read_to_string, strip_comment, write_string};
use crate::error::{Error, Result};
use crate::netlist::{Canvas, Netlist, NetlistBuilder, Node, NodeKind, PinSpec};

struct PendingNet {
    id: String,
    weight: f64,
    pins: Vec<PinSpec>,
}

pub fn parse_native_str(text: &str, file: &str) -> Result<Netlist> {
    let mut builder: Option<NetlistBuilder> = None;
    let mut pending: Option<PendingNet> = None;

    fn flush(builder: &mut NetlistBuilder, pending: Option<PendingNet>) -> Result<()> {
        if let Some(net) = pending {
            builder.add_net(net.id, net.weight, &net.pins)?;
        }
        Ok(())
    }

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let need_builder = |b: &mut Option<NetlistBuilder>| -> Result<()> {
            if b.is_none() {
                return Err(Error::malformed(file, lineno, "`canvas` must come first"));
            }
            Ok(())
        };
        match toks[0] {
            "canvas" => {
                if builder.is_some() {
                    return Err(Error::malformed(file, lineno, "duplicate `canvas` record"));
                }
                if toks.len() != 3 {
                    return Err(Error::malformed(file, lineno, "expected `canvas <width> <height>`"));
                }
                let w = parse_f64(file, lineno, toks[1])?;
                let h = parse_f64(file, lineno, toks[2])?;
                let canvas = Canvas::new(w, h).map_err(|e| Error::malformed(file, lineno, e.to_string()))?;
                builder = Some(NetlistBuilder::new(canvas));
            }
            "node" => {
                need_builder(&mut builder)?;
                if !(toks.len() == 5 || (toks.len() == 6 && toks[5] == "fixed")) {
                    return Err(Error::malformed(
                        file,
                        lineno,
                        "expected `node <id> <kind> <width> <height> [fixed]`",
                    ));
                }
                let kind: NodeKind = toks[2].parse().map_err(|e: String| Error::malformed(file, lineno, e))?;
                let w = parse_f64(file, lineno, toks[3])?;
                let h = parse_f64(file, lineno, toks[4])?;
                let movable = toks.len() == 5;
                builder
                    .as_mut()
                    .unwrap()
                    .add_node(Node::new(toks[1], kind, w, h, movable))
                    .map_err(|e| Error::malformed(file, lineno, e.to_string()))?;
            }
            "net" => {
                need_builder(&mut builder)?;
                if toks.len() != 2 && toks.len() != 3 {
                    return Err(Error::malformed(file, lineno, "expected `net <id> [<weight>]`"));
                }
                let weight = match toks.get(2) {
                    Some(t) => parse_f64(file, lineno, t)?,
                    None => 1.0,
                };
                if weight < 0.0 {
                    return Err(Error::malformed(file, lineno, "net weight must be nonnegative"));
                }
                flush(builder.as_mut().unwrap(), pending.take())?;
                pending = Some(PendingNet {
                    id: toks[1].to_string(),
                    weight,
                    pins: Vec::new(),
                });
            }
            "pin" => {
                need_builder(&mut builder)?;
                if !(toks.len() == 4 || (toks.len() == 5 && toks[4] == "source")) {
                    return Err(Error::malformed(file, lineno, "expected `pin <node> <dx> <dy> [source]`"));
                }
                let net = pending
                    .as_mut()
                    .ok_or_else(|| Error::malformed(file, lineno, "`pin` before any `net`"))?;
                let dx = parse_f64(file, lineno, toks[2])?;
                let dy = parse_f64(file, lineno, toks[3])?;
                net.pins.push(PinSpec::new(toks[1], dx, dy, toks.len() == 5));
            }
            other => {
                return Err(Error::malformed(file, lineno, format!("unknown record `{other}`")));
            }
        }
    }
    let mut builder = builder.ok_or_else(|| Error::malformed(file, 1, "no `canvas` record"))?;
    flush(&mut builder, pending)?;
    Ok(builder.build().0)
}

pub fn parse_native(path: &Path) -> Result<Netlist> {
    let text = read_to_string(path)?;
    parse_native_str(&text, &path.display().to_string())
}

pub fn format_native(netlist: &Netlist) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "canvas {} {}", netlist.canvas.width, netlist.canvas.height);
    for n in &netlist.nodes {
        let _ = write!(out, "node {} {} {} {}", n.id, n.kind, n.width, n.height);
        if !n.movable {
            out.push_str(" fixed");
        }
        out.push('\n');
    }
    for net in &netlist.nets {
        let _ = writeln!(out, "net {} {}", net.id, net.weight);
        for p in &net.pins {
            let _ = write!(out, "pin {} {} {}", netlist.nodes[p.node].id, p.dx, p.dy);
            if p.is_source {
                out.push_str(" source");
            }
            out.push('\n');
        }
    }
    out
}

pub fn write_native(netlist: &Netlist, path: &Path) -> Result<()> {
    write_string(path, &format_native(netlist))
}
