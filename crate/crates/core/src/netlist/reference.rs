//! Built-in netlists: the RM(1,3) encoder and the 4-channel baseline without
//! an encoder.
//!
//! Encoder data path (two clocked stages on every path):
//!
//! ```text
//! stage 1                     stage 2                      output
//! xor_m1m2 = m1^m2  ─┬─────── xor_c1 = x12 ^ x34           c1
//! xor_m3m4 = m3^m4  ─┘  ┌──── xor_c2 = x12 ^ dff_m3        c2
//! dff_m3   = m3     ────┘ ┌── xor_c3 = x12 ^ dff_m4        c3
//! dff_m4   = m4     ──────┤   dff_c4 = x12                 c4
//! xor_m1m3 = m1^m3  ──────┴── xor_c5 = x13 ^ dff_m4        c5
//!                             dff_c6 = x13                 c6
//! xor_m1m4 = m1^m4  ───────── dff_c7 = x14                 c7
//! dff_c8_1 = m1     ───────── dff_c8_2                     c8
//! ```
//!
//! Each of c1, c2, c7 and c8 has a pair of clocked cells that feed no other
//! output, and each pair shares one leaf splitter of the clock tree.

use super::{Cell, CellKind, Netlist};

struct Builder(Vec<Cell>);

impl Builder {
    fn add(&mut self, id: &str, kind: CellKind, inputs: &[&str], clock: Option<&str>, outputs: &[&str]) {
        self.0.push(Cell::new(id, kind, inputs, clock, outputs));
    }

    fn split(&mut self, id: &str, input: &str, a: &str, b: &str) {
        self.add(id, CellKind::Splitter, &[input], None, &[a, b]);
    }

    fn xor(&mut self, id: &str, a: &str, b: &str, out: &str) {
        let clk = format!("k_{id}");
        self.add(id, CellKind::Xor, &[a, b], Some(&clk), &[out]);
    }

    fn dff(&mut self, id: &str, input: &str, out: &str) {
        let clk = format!("k_{id}");
        self.add(id, CellKind::Dff, &[input], Some(&clk), &[out]);
    }

    fn finish(self) -> Netlist {
        Netlist::from_cells(self.0)
            .expect("built-in netlist is valid")
            .renumber_canonical()
    }
}

/// The RM(1,3) encoder: 8 XOR, 7 DFF, 26 splitters (14 in the clock tree),
/// 4 DC2SFQ input converters and 8 SFQ2DC output converters.
pub fn build_rm13_reference() -> Netlist {
    let mut b = Builder(Vec::new());
    for i in 1..=4 {
        b.add(
            &format!("dc2sfq_m{i}"),
            CellKind::Dc2Sfq,
            &[&format!("M{i}")],
            None,
            &[&format!("m{i}")],
        );
    }

    // input fan-out
    b.split("spl_m1_a", "m1", "m1a", "m1b");
    b.split("spl_m1_b", "m1a", "m1_x12", "m1_x13");
    b.split("spl_m1_c", "m1b", "m1_x14", "m1_d8");
    b.split("spl_m3_a", "m3", "m3_x34", "m3b");
    b.split("spl_m3_b", "m3b", "m3_x13", "m3_d");
    b.split("spl_m4_a", "m4", "m4_x34", "m4b");
    b.split("spl_m4_b", "m4b", "m4_d", "m4_x14");

    // stage 1
    b.xor("xor_m1m2", "m1_x12", "m2", "x12");
    b.xor("xor_m3m4", "m3_x34", "m4_x34", "x34");
    b.xor("xor_m1m3", "m1_x13", "m3_x13", "x13");
    b.xor("xor_m1m4", "m1_x14", "m4_x14", "x14");
    b.dff("dff_m3", "m3_d", "d3");
    b.dff("dff_m4", "m4_d", "d4");
    b.dff("dff_c8_1", "m1_d8", "d8");

    // stage-1 fan-out
    b.split("spl_x12_a", "x12", "x12a", "x12b");
    b.split("spl_x12_b", "x12a", "x12_c1", "x12_c2");
    b.split("spl_x12_c", "x12b", "x12_c3", "x12_c4");
    b.split("spl_x13", "x13", "x13_c5", "x13_c6");
    b.split("spl_d4", "d4", "d4_c3", "d4_c5");

    // stage 2
    b.xor("xor_c1", "x12_c1", "x34", "s1");
    b.xor("xor_c2", "x12_c2", "d3", "s2");
    b.xor("xor_c3", "x12_c3", "d4_c3", "s3");
    b.dff("dff_c4", "x12_c4", "s4");
    b.xor("xor_c5", "x13_c5", "d4_c5", "s5");
    b.dff("dff_c6", "x13_c6", "s6");
    b.dff("dff_c7", "x14", "s7");
    b.dff("dff_c8_2", "d8", "s8");

    for i in 1..=8 {
        b.add(
            &format!("sfq2dc_c{i}"),
            CellKind::Sfq2Dc,
            &[&format!("s{i}")],
            None,
            &[&format!("C{i}")],
        );
    }

    // clock tree: 15 clocked sinks, full binary tree of 14 splitters
    b.split("clk_root", "CLK", "k_l1a", "k_l1b");
    b.split("clk_l1_a", "k_l1a", "k_l2a", "k_l2b");
    b.split("clk_l1_b", "k_l1b", "k_l2c", "k_l2d");
    b.split("clk_l2_a", "k_l2a", "k_pair_c1", "k_pair_c2");
    b.split("clk_l2_b", "k_l2b", "k_pair_c7", "k_pair_c8");
    b.split("clk_l2_c", "k_l2c", "k_leaf_x12", "k_leaf_x13");
    b.split("clk_l2_d", "k_l2d", "k_leaf_m4", "k_xor_c5");
    b.split("clk_pair_c1", "k_pair_c1", "k_xor_m3m4", "k_xor_c1");
    b.split("clk_pair_c2", "k_pair_c2", "k_xor_c2", "k_dff_m3");
    b.split("clk_pair_c7", "k_pair_c7", "k_xor_m1m4", "k_dff_c7");
    b.split("clk_pair_c8", "k_pair_c8", "k_dff_c8_1", "k_dff_c8_2");
    b.split("clk_leaf_x12", "k_leaf_x12", "k_xor_m1m2", "k_dff_c4");
    b.split("clk_leaf_x13", "k_leaf_x13", "k_xor_m1m3", "k_dff_c6");
    b.split("clk_leaf_m4", "k_leaf_m4", "k_dff_m4", "k_xor_c3");

    b.finish()
}

/// Four DC2SFQ converters wired straight to four SFQ2DC converters.
pub fn build_no_encoder() -> Netlist {
    let mut b = Builder(Vec::new());
    for i in 1..=4 {
        let net = format!("m{i}");
        b.add(
            &format!("dc2sfq_m{i}"),
            CellKind::Dc2Sfq,
            &[&format!("M{i}")],
            None,
            &[&net],
        );
        b.add(
            &format!("sfq2dc_c{i}"),
            CellKind::Sfq2Dc,
            &[&net],
            None,
            &[&format!("C{i}")],
        );
    }
    b.finish()
}

/// A set of cells whose joint failure is confined to one output channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultGroup {
    pub channel: usize,
    /// Two clocked cells on the channel's exclusive path.
    pub pair: [&'static str; 2],
    /// Leaf clock splitter feeding both cells of the pair.
    pub clock_splitter: &'static str,
}

impl FaultGroup {
    pub fn triple(&self) -> [&'static str; 3] {
        [self.pair[0], self.pair[1], self.clock_splitter]
    }
}

/// The channel-confined fault groups of [`build_rm13_reference`].
pub fn rm13_fault_groups() -> Vec<FaultGroup> {
    vec![
        FaultGroup {
            channel: 1,
            pair: ["xor_m3m4", "xor_c1"],
            clock_splitter: "clk_pair_c1",
        },
        FaultGroup {
            channel: 2,
            pair: ["xor_c2", "dff_m3"],
            clock_splitter: "clk_pair_c2",
        },
        FaultGroup {
            channel: 7,
            pair: ["xor_m1m4", "dff_c7"],
            clock_splitter: "clk_pair_c7",
        },
        FaultGroup {
            channel: 8,
            pair: ["dff_c8_1", "dff_c8_2"],
            clock_splitter: "clk_pair_c8",
        },
    ]
}
