//! Reed-Muller RM(1,3) encoding for SFQ-to-CMOS output links.
//!
//! The crate bundles a general RM(r,m) codec with majority-logic decoding, a
//! gate-level netlist model of the clocked SFQ encoder, a two-phase pulse
//! simulator with NRZ waveform conversion, fault injection, and Monte-Carlo
//! yield experiments that compare encoded and unencoded links.

pub mod bits;
pub mod cli;
pub mod codec;
pub mod error;
pub mod mc;
pub mod netlist;
pub mod rng;
pub mod sim;

pub use bits::{BitBlock, BitRole};
pub use codec::{
    encode_xor_oracle, error_pattern_census, DecodeMode, DecodeOutcome, DecodeStatus, RmCode, WeightCounts,
};
pub use error::{Error, Result};
pub use mc::{
    compare_arms, fault_tolerance_census, run_experiment, run_experiment_on, Arm, CdfTable, ExperimentResult,
    ExperimentSpec,
};
pub use netlist::{
    build_no_encoder, build_rm13_reference, inject_faults, sample_fault_plan, Cell, CellKind, FaultPlan, Netlist,
};
pub use sim::{simulate, SimConfig, SimOutput, Simulator, SpreadModel};
