//! Monte-Carlo yield experiments over sampled circuit realizations.
//!
//! For every realization the engine samples a fault plan, draws a stream of
//! uniform random 4-bit messages, pushes them through the simulated link and
//! counts erroneous messages. All randomness is keyed by
//! `(seed, realization)`, so arms that share a seed see the same messages,
//! and a realization's faults at a lower probability are a subset of its
//! faults at a higher one.

mod cdf;
mod census;
mod stats;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{BitBlock, BitRole};
use crate::codec::{DecodeMode, RmCode};
use crate::error::{Error, Result};
use crate::netlist::{build_no_encoder, build_rm13_reference, sample_fault_plan, Netlist};
use crate::rng::{stream_rng, Stream};
use crate::sim::{SimConfig, Simulator, SpreadModel};

pub use cdf::{CdfMeta, CdfPoint, CdfTable};
pub use census::{
    fault_tolerance_census, CensusReport, CensusRow, FaultClass, FaultEvaluator, SizeSummary, MAX_CENSUS_SIZE,
};
pub use stats::paired_bootstrap_ci;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// Encoder + majority-logic decoder; a message is wrong iff the decoded
    /// message differs (decoder failures count as wrong).
    Rm13AfterEcc,
    /// Encoder only; a message is wrong iff any codeword bit differs.
    Rm13BeforeEcc,
    /// Four bare converter channels carrying the raw message.
    NoEncoder,
}

impl Arm {
    pub const ALL: [Arm; 3] = [Arm::Rm13AfterEcc, Arm::Rm13BeforeEcc, Arm::NoEncoder];

    pub fn name(self) -> &'static str {
        match self {
            Arm::Rm13AfterEcc => "rm13_after_ecc",
            Arm::Rm13BeforeEcc => "rm13_before_ecc",
            Arm::NoEncoder => "no_encoder",
        }
    }

    pub fn uses_encoder(self) -> bool {
        !matches!(self, Arm::NoEncoder)
    }

    pub fn builtin_netlist(self) -> Netlist {
        if self.uses_encoder() {
            build_rm13_reference()
        } else {
            build_no_encoder()
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Arm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Arm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown arm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub arm: Arm,
    pub realizations: usize,
    pub messages_per_realization: usize,
    /// Per-cell open-fault probability.
    pub fault_prob: f64,
    pub spread: Option<SpreadModel>,
    pub seed: u64,
    pub sim: SimConfig,
    /// Worker threads; 0 uses the global pool. Never affects results.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            arm: Arm::Rm13AfterEcc,
            realizations: 1000,
            messages_per_realization: 100,
            fault_prob: 0.0,
            spread: None,
            seed: 0,
            sim: SimConfig::default(),
            workers: 0,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::InvalidParameter("realizations must be >= 1".into()));
        }
        if self.messages_per_realization == 0 {
            return Err(Error::InvalidParameter("messages_per_realization must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.fault_prob) {
            return Err(Error::InvalidParameter(format!(
                "fault probability {} is not in [0, 1]",
                self.fault_prob
            )));
        }
        if let Some(s) = &self.spread {
            s.validate()?;
        }
        self.sim.validate()
    }

    pub fn with_arm(&self, arm: Arm) -> Self {
        ExperimentSpec { arm, ..self.clone() }
    }

    pub fn meta(&self) -> CdfMeta {
        CdfMeta {
            arm: self.arm,
            seed: self.seed,
            fault_prob: self.fault_prob,
            spread_pct: self.spread.as_ref().map(|s| s.spread_pct),
            realizations: self.realizations,
            messages: self.messages_per_realization,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    /// Erroneous messages per realization, indexed by realization.
    pub n_err: Vec<u32>,
    pub cdf: CdfTable,
}

impl ExperimentResult {
    fn new(spec: ExperimentSpec, n_err: Vec<u32>) -> Self {
        let cdf = CdfTable::from_counts(&n_err, spec.meta());
        ExperimentResult { spec, n_err, cdf }
    }
}

/// The message stream of one realization. Shared by every arm with the same seed.
pub fn random_messages(seed: u64, realization: u64, count: usize, width: usize) -> Vec<BitBlock> {
    let mut rng = stream_rng(seed, realization, Stream::Messages);
    (0..count)
        .map(|_| BitBlock::from_u64(rng.random_range(0..(1u64 << width)), width, BitRole::Message))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    before_ecc: u32,
    after_ecc: u32,
}

struct Link<'a> {
    sim: Simulator,
    net: &'a Netlist,
    code: Option<RmCode>,
}

impl<'a> Link<'a> {
    fn new(net: &'a Netlist, encoder: bool) -> Result<Self> {
        let sim = Simulator::new(net)?;
        let code = encoder.then(RmCode::rm13);
        let (ins, outs) = (sim.input_count(), sim.channel_count());
        let fits = match &code {
            Some(c) => ins == c.k() && outs == c.n(),
            None => ins == outs && ins > 0,
        };
        if !fits {
            return Err(Error::ArmMismatch(format!(
                "netlist has {ins} inputs and {outs} outputs"
            )));
        }
        Ok(Link { sim, net, code })
    }

    fn realization(&self, spec: &ExperimentSpec, r: u64) -> Result<Tally> {
        let plan = sample_fault_plan(self.net, spec.fault_prob, spec.spread.as_ref(), spec.seed, r)?;
        let msgs = random_messages(spec.seed, r, spec.messages_per_realization, self.sim.input_count());
        let received = self.sim.run(&plan, &msgs, &spec.sim)?.received();
        let mut tally = Tally::default();
        for (m, rx) in msgs.iter().zip(&received) {
            match &self.code {
                Some(code) => {
                    let tx = code.encode(m)?;
                    tally.before_ecc += u32::from(*rx != tx);
                    let out = code.decode(rx, DecodeMode::Correct)?;
                    tally.after_ecc += u32::from(out.decoded.as_ref() != Some(m));
                }
                None => {
                    let wrong = rx.bits() != m.bits();
                    tally.before_ecc += u32::from(wrong);
                    tally.after_ecc += u32::from(wrong);
                }
            }
        }
        Ok(tally)
    }

    fn run(&self, spec: &ExperimentSpec) -> Result<Vec<Tally>> {
        par_map(spec.workers, spec.realizations, |r| self.realization(spec, r as u64))
    }
}

fn par_map<T, F>(workers: usize, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let work = || (0..count).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    if workers == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work)
    }
}

/// Runs one arm on its built-in netlist.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    run_experiment_on(spec, &spec.arm.builtin_netlist())
}

/// Runs one arm on a caller-supplied netlist.
pub fn run_experiment_on(spec: &ExperimentSpec, net: &Netlist) -> Result<ExperimentResult> {
    spec.validate()?;
    let tallies = Link::new(net, spec.arm.uses_encoder())?.run(spec)?;
    let n_err = tallies
        .iter()
        .map(|t| match spec.arm {
            Arm::Rm13BeforeEcc => t.before_ecc,
            _ => t.after_ecc,
        })
        .collect();
    Ok(ExperimentResult::new(spec.clone(), n_err))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmComparison {
    /// One result per input spec, same order.
    pub results: Vec<ExperimentResult>,
    /// Realizations where after-ECC errors exceed before-ECC errors, when both arms ran.
    pub dominance_violations: Option<usize>,
}

impl ArmComparison {
    pub fn get(&self, arm: Arm) -> Option<&ExperimentResult> {
        self.results.iter().find(|r| r.spec.arm == arm)
    }

    pub fn p_zero(&self, arm: Arm) -> Option<f64> {
        self.get(arm).map(|r| r.cdf.p_zero())
    }
}

/// Runs several arms under common random numbers.
///
/// The specs must be identical except for `arm`. Both encoder arms are read
/// off the same simulations, so their per-realization error counts are paired.
pub fn compare_arms(specs: &[ExperimentSpec]) -> Result<ArmComparison> {
    let first = specs
        .first()
        .ok_or_else(|| Error::NonComparable("no specs given".into()))?;
    for (i, s) in specs.iter().enumerate() {
        if s.with_arm(first.arm) != *first {
            return Err(Error::NonComparable(format!(
                "spec {i} differs from spec 0 in more than the arm"
            )));
        }
        if specs[..i].iter().any(|o| o.arm == s.arm) {
            return Err(Error::NonComparable(format!("arm {} appears twice", s.arm)));
        }
    }
    first.validate()?;

    let encoder = specs.iter().any(|s| s.arm.uses_encoder()).then(build_rm13_reference);
    let encoder_tallies = match &encoder {
        Some(net) => Some(Link::new(net, true)?.run(first)?),
        None => None,
    };
    let baseline_tallies = match specs.iter().any(|s| s.arm == Arm::NoEncoder) {
        true => Some(Link::new(&build_no_encoder(), false)?.run(first)?),
        false => None,
    };

    let results = specs
        .iter()
        .map(|s| {
            let n_err = match s.arm {
                Arm::Rm13AfterEcc => encoder_tallies.as_ref().unwrap().iter().map(|t| t.after_ecc).collect(),
                Arm::Rm13BeforeEcc => encoder_tallies.as_ref().unwrap().iter().map(|t| t.before_ecc).collect(),
                Arm::NoEncoder => baseline_tallies.as_ref().unwrap().iter().map(|t| t.after_ecc).collect(),
            };
            ExperimentResult::new(s.clone(), n_err)
        })
        .collect();

    let both = specs.iter().any(|s| s.arm == Arm::Rm13AfterEcc) && specs.iter().any(|s| s.arm == Arm::Rm13BeforeEcc);
    let dominance_violations = both.then(|| {
        encoder_tallies
            .as_ref()
            .unwrap()
            .iter()
            .filter(|t| t.after_ecc > t.before_ecc)
            .count()
    });
    Ok(ArmComparison {
        results,
        dominance_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(arm: Arm, fault_prob: f64) -> ExperimentSpec {
        ExperimentSpec {
            arm,
            realizations: 40,
            messages_per_realization: 30,
            fault_prob,
            seed: 5,
            ..ExperimentSpec::default()
        }
    }

    #[test]
    fn fault_free_is_a_unit_step() {
        for arm in Arm::ALL {
            let res = run_experiment(&small(arm, 0.0)).unwrap();
            assert_eq!(
                res.cdf.points,
                vec![CdfPoint {
                    n_err: 0,
                    cum_prob: 1.0
                }]
            );
        }
    }

    #[test]
    fn dead_circuit_misses_every_nonzero_message() {
        let spec = small(Arm::Rm13AfterEcc, 1.0);
        let res = run_experiment(&spec).unwrap();
        for (r, &n) in res.n_err.iter().enumerate() {
            let msgs = random_messages(spec.seed, r as u64, spec.messages_per_realization, 4);
            let nonzero = msgs.iter().filter(|m| m.weight() > 0).count() as u32;
            assert_eq!(n, nonzero);
        }
    }

    #[test]
    fn comparison_requires_matching_specs() {
        let a = small(Arm::Rm13AfterEcc, 0.01);
        let mut b = small(Arm::NoEncoder, 0.01);
        b.seed = 6;
        assert!(matches!(compare_arms(&[a.clone(), b]), Err(Error::NonComparable(_))));
        assert!(matches!(compare_arms(&[a.clone(), a]), Err(Error::NonComparable(_))));
        assert!(compare_arms(&[]).is_err());
    }

    #[test]
    fn comparison_matches_single_runs() {
        let specs: Vec<_> = Arm::ALL.iter().map(|&a| small(a, 0.02)).collect();
        let cmp = compare_arms(&specs).unwrap();
        for s in &specs {
            assert_eq!(cmp.get(s.arm).unwrap(), &run_experiment(s).unwrap());
        }
        assert_eq!(cmp.dominance_violations, Some(0));
    }

    #[test]
    fn arm_mismatch() {
        let spec = small(Arm::NoEncoder, 0.0);
        let err = run_experiment_on(&spec, &build_rm13_reference()).unwrap_err();
        assert!(matches!(err, Error::ArmMismatch(_)));
        let spec = small(Arm::Rm13AfterEcc, 0.0);
        assert!(run_experiment_on(&spec, &build_no_encoder()).is_err());
    }

    #[test]
    fn invalid_specs() {
        let mut s = small(Arm::Rm13AfterEcc, 0.0);
        s.realizations = 0;
        assert!(run_experiment(&s).is_err());
        let s = small(Arm::Rm13AfterEcc, 2.0);
        assert!(run_experiment(&s).is_err());
    }

    #[test]
    fn arm_names() {
        for arm in Arm::ALL {
            assert_eq!(arm.name().parse::<Arm>().unwrap(), arm);
        }
        assert!("both".parse::<Arm>().is_err());
    }
}
