//! Line-oriented netlist text format.
//!
//! ```text
//! # comment
//! <id> <KIND> in=<net,...> [clk=<net>] out=<net,...> [open]
//! ```

use std::fmt::Write as _;

use super::{Cell, CellKind, Netlist};
use crate::error::{Error, Result};

impl Netlist {
    /// Parses and validates netlist text. Each cell remembers its 1-based source line.
    pub fn parse(text: &str) -> Result<Netlist> {
        let mut cells = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cells.push(parse_line(line, line_no)?);
        }
        Netlist::from_cells(cells.clone()).map_err(|e| locate(e, &cells))
    }

    /// Canonical text: cells sorted by id, one per line, after a fixed header.
    pub fn serialize(&self) -> String {
        let mut out = String::from("# sfqrm netlist v1\n");
        for c in self.cells() {
            let _ = write!(out, "{} {} in={}", c.id, c.kind, c.inputs.join(","));
            if let Some(clk) = &c.clock {
                let _ = write!(out, " clk={clk}");
            }
            let _ = write!(out, " out={}", c.outputs.join(","));
            if c.open {
                out.push_str(" open");
            }
            out.push('\n');
        }
        out
    }

    /// Renumbers source lines to match [`Netlist::serialize`].
    pub(crate) fn renumber_canonical(mut self) -> Netlist {
        for (i, c) in self.cells_mut().enumerate() {
            c.line = i + 2;
        }
        self
    }
}

/// Attaches the source line of the cell or net an error names.
fn locate(err: Error, cells: &[Cell]) -> Error {
    let line = match &err {
        Error::DuplicateCell(id)
        | Error::Arity { cell: id, .. }
        | Error::Unclocked(id)
        | Error::ClockOnData { cell: id, .. }
        | Error::Cycle(id) => cells.iter().rev().find(|c| &c.id == id).map(|c| c.line),
        Error::MultiDriver(net) | Error::FanOut(net) | Error::Dangling(net) => {
            let net = net.split_whitespace().next().unwrap_or_default();
            let mentions = |c: &&Cell| c.outputs.iter().chain(&c.inputs).chain(&c.clock).any(|n| n == net);
            // report the second mention for conflicts, the only one otherwise
            let hits: Vec<usize> = cells.iter().filter(mentions).map(|c| c.line).collect();
            hits.get(1).or(hits.first()).copied()
        }
        _ => None,
    };
    match line {
        Some(line) => Error::Located {
            line,
            inner: Box::new(err),
        },
        None => err,
    }
}

fn parse_line(line: &str, line_no: usize) -> Result<Cell> {
    let syntax = |msg: String| Error::Syntax { line: line_no, msg };
    let mut tokens = line.split_whitespace();
    let id = tokens.next().ok_or_else(|| syntax("missing cell id".into()))?;
    if !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
        return Err(syntax(format!("invalid cell id `{id}`")));
    }
    let kind: CellKind = tokens
        .next()
        .ok_or_else(|| syntax(format!("cell `{id}` has no kind")))?
        .parse()
        .map_err(|e: Error| syntax(e.to_string()))?;

    let mut inputs = None;
    let mut clock = None;
    let mut outputs = None;
    let mut open = false;
    for tok in tokens {
        if tok == "open" {
            open = true;
            continue;
        }
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected key=value, found `{tok}`")))?;
        let nets = || -> Result<Vec<String>> {
            if value.is_empty() {
                return Ok(Vec::new());
            }
            value
                .split(',')
                .map(|n| {
                    if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
                        Err(syntax(format!("invalid net name `{n}`")))
                    } else {
                        Ok(n.to_string())
                    }
                })
                .collect()
        };
        let slot = match key {
            "in" => &mut inputs,
            "out" => &mut outputs,
            "clk" => {
                if clock.is_some() {
                    return Err(syntax("duplicate clk=".into()));
                }
                let v = nets()?;
                if v.len() != 1 {
                    return Err(syntax("clk= takes exactly one net".into()));
                }
                clock = v.into_iter().next();
                continue;
            }
            other => return Err(syntax(format!("unknown attribute `{other}`"))),
        };
        if slot.is_some() {
            return Err(syntax(format!("duplicate {key}=")));
        }
        *slot = Some(nets()?);
    }
    Ok(Cell {
        id: id.to_string(),
        kind,
        inputs: inputs.ok_or_else(|| syntax(format!("cell `{id}` is missing in=")))?,
        clock,
        outputs: outputs.ok_or_else(|| syntax(format!("cell `{id}` is missing out=")))?,
        line: line_no,
        open,
    })
}
