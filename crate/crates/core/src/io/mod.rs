//! File formats: Bookshelf (read), native text netlists, `.pl` placements and SVG plots.

pub mod bookshelf;
pub mod native;
pub mod pl;
pub mod svg;

use std::path::Path;

use crate::error::{Error, Result};
use crate::netlist::Netlist;
use crate::placement::Placement;

pub use bookshelf::{parse_bookshelf, ParseStats};
pub use native::{parse_native, parse_native_str, write_native};
pub use pl::{read_placement, write_placement};
pub use svg::write_svg;

/// A netlist together with whatever locations its input files carried.
#[derive(Clone, Debug)]
pub struct Design {
    pub netlist: Netlist,
    pub placement: Placement,
    pub stats: ParseStats,
}

/// Loads a `.aux` Bookshelf set or a native netlist (plus an optional `.pl`).
pub fn load_design(path: &Path, pl: Option<&Path>) -> Result<Design> {
    let mut design = if path.extension().is_some_and(|e| e == "aux") {
        parse_bookshelf(path)?
    } else {
        let netlist = parse_native(path)?;
        let stats = ParseStats::from_netlist(&netlist);
        let placement = Placement::new(netlist.nodes.len());
        Design {
            netlist,
            placement,
            stats,
        }
    };
    if let Some(pl) = pl {
        let extra = read_placement(&design.netlist, pl)?;
        for (i, loc) in extra.iter() {
            design.placement.set(i, loc);
        }
    }
    Ok(design)
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_string(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Splits a Bookshelf-style line into tokens, treating `:` as its own token
/// whether or not it is surrounded by whitespace.
pub(crate) fn tokens(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for word in line.split_whitespace() {
        let mut rest = word;
        while let Some(pos) = rest.find(':') {
            if pos > 0 {
                out.push(&rest[..pos]);
            }
            out.push(":");
            rest = &rest[pos + 1..];
        }
        if !rest.is_empty() {
            out.push(rest);
        }
    }
    out
}

/// Strips a trailing `#` comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub(crate) fn parse_f64(file: &str, line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::malformed(file, line, format!("expected a number, got `{tok}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_splits_colons() {
        assert_eq!(tokens("NumNodes:12"), vec!["NumNodes", ":", "12"]);
        assert_eq!(tokens("  a  O : 0.5 -1"), vec!["a", "O", ":", "0.5", "-1"]);
        assert_eq!(tokens("x y :N"), vec!["x", "y", ":", "N"]);
    }
}
