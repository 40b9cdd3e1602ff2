//! Clocked SFQ netlists: cell graph, structural validation, text format and
//! fault rewriting.
//!
//! Every net has exactly one driver and one receiver. The reserved nets are
//! `CLK` (clock root), `M1..Mk` (message inputs, no driver) and `C1..Cn`
//! (codeword outputs, no receiver).

mod fault;
mod parse;
mod reference;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fault::{inject_faults, sample_fault_plan, FaultPlan};
pub use reference::{build_no_encoder, build_rm13_reference, rm13_fault_groups, FaultGroup};

pub const CLOCK_NET: &str = "CLK";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CellKind {
    Xor,
    Dff,
    Splitter,
    Dc2Sfq,
    Sfq2Dc,
    Source,
    Sink,
}

impl CellKind {
    pub const ALL: [CellKind; 7] = [
        CellKind::Xor,
        CellKind::Dff,
        CellKind::Splitter,
        CellKind::Dc2Sfq,
        CellKind::Sfq2Dc,
        CellKind::Source,
        CellKind::Sink,
    ];

    /// (data inputs, outputs, clocked)
    pub fn ports(self) -> (usize, usize, bool) {
        match self {
            CellKind::Xor => (2, 1, true),
            CellKind::Dff => (1, 1, true),
            CellKind::Splitter => (1, 2, false),
            CellKind::Dc2Sfq | CellKind::Sfq2Dc => (1, 1, false),
            CellKind::Source => (0, 1, false),
            CellKind::Sink => (1, 0, false),
        }
    }

    pub fn is_clocked(self) -> bool {
        self.ports().2
    }

    /// Cells that can be opened by a fault. Input converters, sources and
    /// sinks belong to the test fixture rather than the encoder.
    pub fn is_faultable(self) -> bool {
        !matches!(self, CellKind::Dc2Sfq | CellKind::Source | CellKind::Sink)
    }

    pub fn name(self) -> &'static str {
        match self {
            CellKind::Xor => "XOR",
            CellKind::Dff => "DFF",
            CellKind::Splitter => "SPLITTER",
            CellKind::Dc2Sfq => "DC2SFQ",
            CellKind::Sfq2Dc => "SFQ2DC",
            CellKind::Source => "SOURCE",
            CellKind::Sink => "SINK",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CellKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown cell kind `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub id: String,
    pub kind: CellKind,
    pub inputs: Vec<String>,
    pub clock: Option<String>,
    pub outputs: Vec<String>,
    /// 1-based line in the source text; 0 when built programmatically.
    pub line: usize,
    /// Open-circuit fault: the cell never emits.
    pub open: bool,
}

impl Cell {
    pub fn new(id: &str, kind: CellKind, inputs: &[&str], clock: Option<&str>, outputs: &[&str]) -> Self {
        Cell {
            id: id.to_string(),
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            clock: clock.map(str::to_string),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            line: 0,
            open: false,
        }
    }
}

// Source lines are provenance, not structure.
impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.kind == other.kind
            && self.inputs == other.inputs
            && self.clock == other.clock
            && self.outputs == other.outputs
            && self.open == other.open
    }
}

impl Eq for Cell {}

/// Where a pulse on a net ends up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint<'a> {
    Data { cell: &'a str, port: usize },
    Clock { cell: &'a str },
    Output,
}

/// A validated netlist. Construction always goes through [`Netlist::from_cells`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Netlist {
    cells: BTreeMap<String, Cell>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    clock_tree: BTreeSet<String>,
}

pub(crate) fn is_input_net(net: &str) -> bool {
    reserved_index(net, 'M').is_some()
}

pub(crate) fn is_output_net(net: &str) -> bool {
    reserved_index(net, 'C').is_some()
}

fn reserved_index(net: &str, prefix: char) -> Option<usize> {
    let rest = net.strip_prefix(prefix)?;
    if rest.is_empty() || rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

impl Netlist {
    pub fn from_cells(cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for cell in cells {
            if map.contains_key(&cell.id) {
                return Err(Error::DuplicateCell(cell.id));
            }
            map.insert(cell.id.clone(), cell);
        }
        if map.is_empty() {
            return Err(Error::NoCells);
        }
        for cell in map.values() {
            check_arity(cell)?;
        }

        let mut drivers: BTreeMap<&str, &str> = BTreeMap::new();
        let mut receivers: BTreeMap<&str, Vec<Endpoint>> = BTreeMap::new();
        for cell in map.values() {
            for net in &cell.outputs {
                if net == CLOCK_NET || is_input_net(net) || drivers.insert(net, &cell.id).is_some() {
                    return Err(Error::MultiDriver(net.clone()));
                }
            }
            for (port, net) in cell.inputs.iter().enumerate() {
                receivers
                    .entry(net)
                    .or_default()
                    .push(Endpoint::Data { cell: &cell.id, port });
            }
            if let Some(net) = &cell.clock {
                receivers
                    .entry(net)
                    .or_default()
                    .push(Endpoint::Clock { cell: &cell.id });
            }
        }
        for (net, recv) in &receivers {
            if recv.len() > 1 {
                return Err(Error::FanOut(net.to_string()));
            }
            if is_output_net(net) {
                return Err(Error::Dangling(format!(
                    "{net} (output port consumed inside the netlist)"
                )));
            }
            let external = *net == CLOCK_NET || is_input_net(net);
            if !external && !drivers.contains_key(net) {
                if let [Endpoint::Clock { cell }] = recv.as_slice() {
                    return Err(Error::Unclocked(cell.to_string()));
                }
                return Err(Error::Dangling(net.to_string()));
            }
        }
        for net in drivers.keys() {
            if !is_output_net(net) && !receivers.contains_key(net) {
                return Err(Error::Dangling(net.to_string()));
            }
        }

        // clock tree: splitters reachable from CLK
        let mut clock_tree = BTreeSet::new();
        let mut clock_nets = BTreeSet::new();
        let mut queue: VecDeque<&str> = VecDeque::new();
        if receivers.contains_key(CLOCK_NET) {
            queue.push_back(CLOCK_NET);
        }
        while let Some(net) = queue.pop_front() {
            clock_nets.insert(net.to_string());
            for ep in receivers.get(net).into_iter().flatten() {
                match *ep {
                    Endpoint::Data { cell, .. } => {
                        let c = &map[cell];
                        if c.kind == CellKind::Splitter {
                            clock_tree.insert(cell.to_string());
                            queue.extend(c.outputs.iter().map(String::as_str));
                        } else {
                            return Err(Error::ClockOnData {
                                net: net.to_string(),
                                cell: cell.to_string(),
                            });
                        }
                    }
                    Endpoint::Clock { .. } => {}
                    Endpoint::Output => {}
                }
            }
        }
        for cell in map.values() {
            if let Some(clk) = &cell.clock {
                if !clock_nets.contains(clk) {
                    return Err(Error::Unclocked(cell.id.clone()));
                }
            }
        }

        let mut inputs: Vec<String> = receivers
            .keys()
            .filter(|n| is_input_net(n))
            .map(|s| s.to_string())
            .collect();
        inputs.sort_by_key(|n| reserved_index(n, 'M'));
        let mut outputs: Vec<String> = drivers
            .keys()
            .filter(|n| is_output_net(n))
            .map(|s| s.to_string())
            .collect();
        outputs.sort_by_key(|n| reserved_index(n, 'C'));

        let net = Netlist {
            cells: map,
            inputs,
            outputs,
            clock_tree,
        };
        net.topological_order()?;
        Ok(net)
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.values()
    }

    pub fn cell(&self, id: &str) -> Option<&Cell> {
        self.cells.get(id)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Message input nets, `M1..Mk` in order.
    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    /// Codeword output nets, `C1..Cn` in order.
    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn clock_tree(&self) -> &BTreeSet<String> {
        &self.clock_tree
    }

    pub fn is_clock_splitter(&self, id: &str) -> bool {
        self.clock_tree.contains(id)
    }

    pub fn open_cells(&self) -> BTreeSet<String> {
        self.cells.values().filter(|c| c.open).map(|c| c.id.clone()).collect()
    }

    /// Cells a fault plan may target, sorted by id.
    pub fn faultable_cells(&self) -> Vec<&str> {
        self.cells
            .values()
            .filter(|c| c.kind.is_faultable())
            .map(|c| c.id.as_str())
            .collect()
    }

    pub fn census(&self) -> BTreeMap<CellKind, usize> {
        let mut out = BTreeMap::new();
        for c in self.cells.values() {
            *out.entry(c.kind).or_insert(0) += 1;
        }
        out
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.values().filter(|c| c.kind == kind).count()
    }

    /// The cell driving `net`, if any.
    pub fn driver(&self, net: &str) -> Option<&Cell> {
        self.cells.values().find(|c| c.outputs.iter().any(|o| o == net))
    }

    /// Where a pulse on `net` is delivered.
    pub fn receiver(&self, net: &str) -> Option<Endpoint<'_>> {
        if is_output_net(net) {
            return Some(Endpoint::Output);
        }
        for c in self.cells.values() {
            if let Some(port) = c.inputs.iter().position(|i| i == net) {
                return Some(Endpoint::Data { cell: &c.id, port });
            }
            if c.clock.as_deref() == Some(net) {
                return Some(Endpoint::Clock { cell: &c.id });
            }
        }
        None
    }

    /// Cells in dependency order (drivers before receivers), clock edges included.
    pub fn topological_order(&self) -> Result<Vec<&str>> {
        let mut driver_of: BTreeMap<&str, &str> = BTreeMap::new();
        for c in self.cells.values() {
            for o in &c.outputs {
                driver_of.insert(o, &c.id);
            }
        }
        let mut indegree: BTreeMap<&str, usize> = self.cells.keys().map(|k| (k.as_str(), 0)).collect();
        let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for c in self.cells.values() {
            for net in c.inputs.iter().chain(c.clock.iter()) {
                if let Some(&d) = driver_of.get(net.as_str()) {
                    *indegree.get_mut(c.id.as_str()).unwrap() += 1;
                    succ.entry(d).or_default().push(&c.id);
                }
            }
        }
        let mut ready: VecDeque<&str> = indegree.iter().filter(|(_, &d)| d == 0).map(|(k, _)| *k).collect();
        let mut order = Vec::with_capacity(self.cells.len());
        while let Some(id) = ready.pop_front() {
            order.push(id);
            for &s in succ.get(id).into_iter().flatten() {
                let d = indegree.get_mut(s).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push_back(s);
                }
            }
        }
        if order.len() != self.cells.len() {
            let stuck = indegree
                .iter()
                .find(|(_, &d)| d > 0)
                .map(|(k, _)| k.to_string())
                .unwrap_or_default();
            return Err(Error::Cycle(stuck));
        }
        Ok(order)
    }

    /// Number of clocked stages on every input-to-output data path.
    ///
    /// Fails with [`Error::Unbalanced`] if two paths disagree.
    pub fn pipeline_depth(&self) -> Result<usize> {
        // depths[net] = set of clocked-stage counts reaching that net
        let mut depths: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
        for i in &self.inputs {
            depths.entry(i).or_default().insert(0);
        }
        for id in self.topological_order()? {
            let c = &self.cells[id];
            let mut reach = BTreeSet::new();
            for i in &c.inputs {
                if let Some(d) = depths.get(i.as_str()) {
                    reach.extend(d.iter().copied());
                }
            }
            if c.kind.is_clocked() {
                reach = reach.into_iter().map(|d| d + 1).collect();
            }
            for o in &c.outputs {
                depths.entry(o).or_default().extend(reach.iter().copied());
            }
        }
        let mut all = BTreeSet::new();
        for o in &self.outputs {
            let d = depths.get(o.as_str()).cloned().unwrap_or_default();
            if d.len() > 1 {
                return Err(Error::Unbalanced(format!(
                    "output {o} is reached through {d:?} clocked stages"
                )));
            }
            all.extend(d);
        }
        match all.len() {
            0 => Ok(0),
            1 => Ok(*all.iter().next().unwrap()),
            _ => Err(Error::Unbalanced(format!("outputs sit at different depths {all:?}"))),
        }
    }

    /// Data-path fan-in cone of an output net (clock tree excluded).
    pub fn data_cone(&self, output: &str) -> BTreeSet<String> {
        let mut cone = BTreeSet::new();
        let mut stack = vec![output.to_string()];
        while let Some(net) = stack.pop() {
            if let Some(c) = self.driver(&net) {
                if cone.insert(c.id.clone()) {
                    stack.extend(c.inputs.iter().cloned());
                }
            }
        }
        cone
    }

    /// Output nets whose behavior depends on `cell`, following data and clock edges.
    pub fn affected_outputs(&self, cell: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![cell.to_string()];
        while let Some(id) = stack.pop() {
            if !seen.insert(id.clone()) {
                continue;
            }
            let Some(c) = self.cells.get(&id) else { continue };
            for net in &c.outputs {
                match self.receiver(net) {
                    Some(Endpoint::Output) => {
                        out.insert(net.clone());
                    }
                    Some(Endpoint::Data { cell, .. }) | Some(Endpoint::Clock { cell }) => {
                        stack.push(cell.to_string());
                    }
                    None => {}
                }
            }
        }
        out
    }

    /// Faultable cells whose failure can only disturb a single output channel.
    pub fn channel_exclusive_cells(&self) -> Vec<&str> {
        self.faultable_cells()
            .into_iter()
            .filter(|id| self.affected_outputs(id).len() == 1)
            .collect()
    }

    pub(crate) fn cells_mut(&mut self) -> impl Iterator<Item = &mut Cell> {
        self.cells.values_mut()
    }

    pub(crate) fn cell_mut(&mut self, id: &str) -> Option<&mut Cell> {
        self.cells.get_mut(id)
    }
}

fn check_arity(cell: &Cell) -> Result<()> {
    let (ins, outs, clocked) = cell.kind.ports();
    let err = |msg: String| {
        Err(Error::Arity {
            cell: cell.id.clone(),
            msg,
        })
    };
    if cell.inputs.len() != ins {
        return err(format!(
            "{} takes {ins} data inputs, found {}",
            cell.kind,
            cell.inputs.len()
        ));
    }
    if cell.outputs.len() != outs {
        return err(format!(
            "{} drives {outs} outputs, found {}",
            cell.kind,
            cell.outputs.len()
        ));
    }
    match (clocked, &cell.clock) {
        (true, None) => Err(Error::Unclocked(cell.id.clone())),
        (false, Some(_)) => err(format!("{} takes no clock", cell.kind)),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buffer() -> Vec<Cell> {
        vec![
            Cell::new("in1", CellKind::Dc2Sfq, &["M1"], None, &["a"]),
            Cell::new("d1", CellKind::Dff, &["a"], Some("CLK"), &["b"]),
            Cell::new("out1", CellKind::Sfq2Dc, &["b"], None, &["C1"]),
        ]
    }

    #[test]
    fn minimal_pipeline_validates() {
        let net = Netlist::from_cells(buffer()).unwrap();
        assert_eq!(net.inputs(), ["M1"]);
        assert_eq!(net.outputs(), ["C1"]);
        assert_eq!(net.pipeline_depth().unwrap(), 1);
        assert!(net.clock_tree().is_empty());
    }

    #[test]
    fn empty_is_rejected() {
        assert!(matches!(Netlist::from_cells(vec![]), Err(Error::NoCells)));
    }

    #[test]
    fn fan_out_violation() {
        let mut cells = buffer();
        cells.push(Cell::new("d2", CellKind::Dff, &["a"], Some("CLK"), &["C2"]));
        // CLK now feeds two cells, `a` feeds two cells
        let err = Netlist::from_cells(cells).unwrap_err();
        assert!(matches!(err, Error::FanOut(_)), "{err}");
    }

    #[test]
    fn unclocked_dff() {
        let mut cells = buffer();
        cells[1].clock = Some("nowhere".into());
        assert!(matches!(Netlist::from_cells(cells), Err(Error::Unclocked(id)) if id == "d1"));
        let mut cells = buffer();
        cells[1].clock = None;
        assert!(matches!(Netlist::from_cells(cells), Err(Error::Unclocked(_))));
    }

    #[test]
    fn dangling_net() {
        let mut cells = buffer();
        cells[2].inputs = vec!["zz".into()];
        assert!(matches!(Netlist::from_cells(cells), Err(Error::Dangling(_))));
    }

    #[test]
    fn cycle_detected() {
        let cells = vec![
            Cell::new("x", CellKind::Xor, &["M1", "fb"], Some("CLK"), &["s"]),
            Cell::new("s1", CellKind::Splitter, &["s"], None, &["fb", "o"]),
            Cell::new("out", CellKind::Sfq2Dc, &["o"], None, &["C1"]),
        ];
        assert!(matches!(Netlist::from_cells(cells), Err(Error::Cycle(_))));
    }

    #[test]
    fn unbalanced_paths() {
        let cells = vec![
            Cell::new("i1", CellKind::Dc2Sfq, &["M1"], None, &["a"]),
            Cell::new("i2", CellKind::Dc2Sfq, &["M2"], None, &["b"]),
            Cell::new("ck", CellKind::Splitter, &["CLK"], None, &["k1", "k2"]),
            Cell::new("d", CellKind::Dff, &["a"], Some("k1"), &["a2"]),
            Cell::new("x", CellKind::Xor, &["a2", "b"], Some("k2"), &["y"]),
            Cell::new("o", CellKind::Sfq2Dc, &["y"], None, &["C1"]),
        ];
        let net = Netlist::from_cells(cells).unwrap();
        assert!(matches!(net.pipeline_depth(), Err(Error::Unbalanced(_))));
    }

    #[test]
    fn clock_into_data_port() {
        let cells = vec![
            Cell::new("i1", CellKind::Dc2Sfq, &["CLK"], None, &["a"]),
            Cell::new("o", CellKind::Sfq2Dc, &["a"], None, &["C1"]),
        ];
        assert!(matches!(Netlist::from_cells(cells), Err(Error::ClockOnData { .. })));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("splitter".parse::<CellKind>().unwrap(), CellKind::Splitter);
        assert_eq!("SFQ2DC".parse::<CellKind>().unwrap(), CellKind::Sfq2Dc);
        assert!("NAND".parse::<CellKind>().is_err());
    }
}
