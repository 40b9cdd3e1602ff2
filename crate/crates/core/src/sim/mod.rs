//! Cycle-accurate pulse simulation of clocked SFQ netlists.
//!
//! A cycle is the atomic time unit. Each cycle runs two phases:
//!
//! 1. the clock pulse travels down the clock tree; every clocked cell it
//!    reaches releases its output (XOR: odd number of data pulses since the
//!    previous clock, DFF: a stored pulse) and clears its state;
//! 2. DC2SFQ converters emit one pulse per high input level, and all pulses
//!    travel through splitters until they land in a clocked cell (stored for
//!    the next cycle) or an SFQ2DC converter (which toggles its DC level).
//!
//! Open and failed cells never emit. An open clock splitter therefore stops
//! the clock for its whole subtree.

mod spread;
pub mod waveform;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bits::{BitBlock, BitRole};
use crate::error::{Error, Result};
use crate::netlist::{CellKind, Endpoint, FaultPlan, Netlist, CLOCK_NET};
use crate::rng::{stream_rng, Stream};

pub use spread::{apply_spread, SpreadModel};
pub use waveform::{bits_to_waveform, classify_levels, levels_to_waveform, nrz_levels, transitions, waveform_to_bits};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub clock_freq_hz: f64,
    pub cycles_per_message: usize,
    pub samples_per_cycle: usize,
    /// Gaussian amplitude noise as a fraction of the level swing.
    pub noise_sigma: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            clock_freq_hz: 5e9,
            cycles_per_message: 1,
            samples_per_cycle: 8,
            noise_sigma: 0.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !(self.clock_freq_hz > 0.0 && self.clock_freq_hz.is_finite()) {
            return bad("clock frequency must be positive");
        }
        if self.cycles_per_message == 0 {
            return bad("cycles_per_message must be >= 1");
        }
        if self.samples_per_cycle < 4 || !self.samples_per_cycle.is_multiple_of(2) {
            return bad("samples_per_cycle must be even and >= 4");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad("noise_sigma must be >= 0");
        }
        Ok(())
    }

    pub fn cycle_ns(&self) -> f64 {
        1e9 / self.clock_freq_hz
    }
}

/// One output channel of a simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelTrace {
    pub channel: String,
    /// Converter output, `samples_per_cycle` samples per cycle.
    pub samples: Vec<f64>,
    /// Transition bits recovered from `samples`, one per cycle.
    pub bits: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimOutput {
    pub traces: Vec<ChannelTrace>,
    /// Clocked stages between a message and its codeword.
    pub latency: usize,
    pub cycles_per_message: usize,
    pub message_count: usize,
}

impl SimOutput {
    /// Cycle at which the codeword of message `index` appears.
    pub fn output_cycle(&self, index: usize) -> usize {
        index * self.cycles_per_message + self.latency
    }

    /// Received codewords, one per message.
    pub fn received(&self) -> Vec<BitBlock> {
        (0..self.message_count)
            .map(|i| {
                let t = self.output_cycle(i);
                let bits = self.traces.iter().map(|tr| tr.bits[t]).collect();
                BitBlock::codeword(bits).expect("transition bits are bits")
            })
            .collect()
    }

    /// `time_ns,channel,level` rows at sample resolution.
    pub fn trace_csv(&self, cfg: &SimConfig) -> String {
        let mut out = String::from("time_ns,channel,level\n");
        let dt = cfg.cycle_ns() / cfg.samples_per_cycle as f64;
        for tr in &self.traces {
            for (i, v) in tr.samples.iter().enumerate() {
                let _ = writeln!(out, "{:.4},{},{}", i as f64 * dt, tr.channel, v);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Dest {
    Nowhere,
    Data(usize),
    Clock(usize),
    Channel(usize),
}

/// A netlist compiled to index form, reusable across runs.
#[derive(Clone, Debug)]
pub struct Simulator {
    ids: Vec<String>,
    kinds: Vec<CellKind>,
    open: Vec<bool>,
    outputs: Vec<Vec<Dest>>,
    input_dest: Vec<Dest>,
    clock_dest: Dest,
    channels: Vec<String>,
    latency: usize,
}

impl Simulator {
    pub fn new(net: &Netlist) -> Result<Self> {
        let ids: Vec<String> = net.cells().map(|c| c.id.clone()).collect();
        let index = |id: &str| ids.binary_search_by(|x| x.as_str().cmp(id)).expect("cell id exists");
        let channels: Vec<String> = net.outputs().to_vec();
        let dest = |n: &str| match net.receiver(n) {
            Some(Endpoint::Data { cell, .. }) => Dest::Data(index(cell)),
            Some(Endpoint::Clock { cell }) => Dest::Clock(index(cell)),
            Some(Endpoint::Output) => Dest::Channel(channels.iter().position(|c| c == n).expect("output net")),
            None => Dest::Nowhere,
        };
        let outputs = net
            .cells()
            .map(|c| c.outputs.iter().map(|o| dest(o)).collect())
            .collect();
        let input_dest = net.inputs().iter().map(|i| dest(i)).collect();
        let clock_dest = dest(CLOCK_NET);
        Ok(Simulator {
            kinds: net.cells().map(|c| c.kind).collect(),
            open: net.cells().map(|c| c.open).collect(),
            ids,
            outputs,
            input_dest,
            clock_dest,
            latency: net.pipeline_depth()?,
            channels,
        })
    }

    pub fn latency(&self) -> usize {
        self.latency
    }

    pub fn input_count(&self) -> usize {
        self.input_dest.len()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    /// Silent-cell mask for a plan, including cells already open in the netlist.
    pub fn dead_mask(&self, plan: &FaultPlan) -> Result<Vec<bool>> {
        let mut dead = self.open.clone();
        for id in plan.dead_cells() {
            match self.ids.binary_search_by(|x| x.as_str().cmp(id)) {
                Ok(i) => dead[i] = true,
                Err(_) => return Err(Error::UnknownCell(id.to_string())),
            }
        }
        Ok(dead)
    }

    /// Runs the pulse engine on per-cycle input levels and returns the DC
    /// level of every output channel after each cycle.
    pub fn run_levels(&self, dead: &[bool], inputs: &[Vec<bool>], cycles: usize) -> Vec<Vec<bool>> {
        let n = self.ids.len();
        let mut parity = vec![false; n];
        let mut stored = vec![false; n];
        let mut converter = vec![false; n];
        let mut level = vec![false; self.channels.len()];
        let mut trace = vec![Vec::with_capacity(cycles); self.channels.len()];
        let mut fired = Vec::new();
        let mut stack = Vec::new();

        for t in 0..cycles {
            // phase 1: clock
            fired.clear();
            stack.push(self.clock_dest);
            while let Some(d) = stack.pop() {
                match d {
                    Dest::Data(c) if self.kinds[c] == CellKind::Splitter => {
                        if !dead[c] {
                            stack.extend(self.outputs[c].iter().copied());
                        }
                    }
                    Dest::Clock(c) => fired.push(c),
                    _ => {}
                }
            }
            for &c in &fired {
                let emit = match self.kinds[c] {
                    CellKind::Xor => parity[c],
                    CellKind::Dff => stored[c],
                    _ => false,
                };
                parity[c] = false;
                stored[c] = false;
                if emit && !dead[c] {
                    stack.push(self.outputs[c][0]);
                }
            }

            // phase 2: data
            for (i, d) in self.input_dest.iter().enumerate() {
                if inputs[i].get(t).copied().unwrap_or(false) {
                    stack.push(*d);
                }
            }
            while let Some(d) = stack.pop() {
                match d {
                    Dest::Nowhere | Dest::Clock(_) => {}
                    Dest::Channel(ch) => level[ch] ^= true,
                    Dest::Data(c) => match self.kinds[c] {
                        CellKind::Xor => parity[c] ^= true,
                        CellKind::Dff => stored[c] = true,
                        CellKind::Sink | CellKind::Source => {}
                        CellKind::Sfq2Dc => {
                            if !dead[c] {
                                converter[c] ^= true;
                                // the output net carries a DC level, not pulses
                                if let Some(Dest::Channel(ch)) = self.outputs[c].first() {
                                    level[*ch] = converter[c];
                                } else {
                                    stack.extend(self.outputs[c].iter().copied());
                                }
                            }
                        }
                        CellKind::Splitter | CellKind::Dc2Sfq => {
                            if !dead[c] {
                                stack.extend(self.outputs[c].iter().copied());
                            }
                        }
                    },
                }
            }
            for (ch, l) in level.iter().enumerate() {
                trace[ch].push(*l);
            }
        }
        trace
    }

    /// Full pipeline: message bits to input waveforms, pulse simulation,
    /// converter waveforms, and classification back to transition bits.
    pub fn run(&self, plan: &FaultPlan, messages: &[BitBlock], cfg: &SimConfig) -> Result<SimOutput> {
        cfg.validate()?;
        let dead = self.dead_mask(plan)?;
        let width = self.input_count();
        if let Some(bad) = messages.iter().find(|m| m.len() != width) {
            return Err(Error::LengthMismatch {
                expected: width,
                got: bad.len(),
            });
        }
        let cpm = cfg.cycles_per_message;
        let cycles = if messages.is_empty() {
            0
        } else {
            messages.len() * cpm + self.latency
        };

        let mut noise = stream_rng(plan.seed, plan.realization_index, Stream::Noise);
        let inputs: Vec<Vec<bool>> = (0..width)
            .map(|i| {
                let mut bits = vec![0u8; cycles];
                for (j, m) in messages.iter().enumerate() {
                    bits[j * cpm] = m.bits()[i];
                }
                classify_levels(&bits_to_waveform(&bits, cfg, &mut noise), cfg)
            })
            .collect();

        let levels = self.run_levels(&dead, &inputs, cycles);
        let traces = levels
            .iter()
            .zip(&self.channels)
            .map(|(lv, name)| {
                let samples = levels_to_waveform(lv, cfg, &mut noise);
                let bits = waveform_to_bits(&samples, cfg);
                ChannelTrace {
                    channel: name.clone(),
                    samples,
                    bits,
                }
            })
            .collect();
        Ok(SimOutput {
            traces,
            latency: self.latency,
            cycles_per_message: cpm,
            message_count: messages.len(),
        })
    }
}

/// Simulates `messages` streamed back-to-back through `net` under `plan`.
pub fn simulate(net: &Netlist, plan: &FaultPlan, messages: &[BitBlock], cfg: &SimConfig) -> Result<SimOutput> {
    Simulator::new(net)?.run(plan, messages, cfg)
}

/// All `2^k` messages for a netlist with `k` inputs, in increasing order.
pub fn exhaustive_messages(width: usize) -> Vec<BitBlock> {
    (0u64..(1 << width))
        .map(|v| BitBlock::from_u64(v, width, BitRole::Message))
        .collect()
}
