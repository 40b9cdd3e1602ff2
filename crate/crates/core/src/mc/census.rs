//! Exhaustive enumeration of small fault sets.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitBlock;
use crate::codec::RmCode;
use crate::error::{Error, Result};
use crate::netlist::{FaultPlan, Netlist};
use crate::sim::{exhaustive_messages, SimConfig, Simulator};

/// Largest fault-set size the census will enumerate (C(49,3) = 18424 sets).
pub const MAX_CENSUS_SIZE: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultClass {
    /// No output bit ever differs from the fault-free circuit.
    Harmless,
    /// Worst case stays within the code's correction radius.
    Correctable,
    Uncorrectable,
}

impl FaultClass {
    pub fn name(self) -> &'static str {
        match self {
            FaultClass::Harmless => "harmless",
            FaultClass::Correctable => "correctable",
            FaultClass::Uncorrectable => "uncorrectable",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        [FaultClass::Harmless, FaultClass::Correctable, FaultClass::Uncorrectable]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Table(format!("unknown fault class `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub size: usize,
    pub fault_set: Vec<String>,
    /// Largest Hamming distance from the fault-free output over all messages.
    pub worst_bit_errors: usize,
    pub class: FaultClass,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub harmless: usize,
    pub correctable: usize,
    pub uncorrectable: usize,
}

impl SizeSummary {
    pub fn total(&self) -> usize {
        self.harmless + self.correctable + self.uncorrectable
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub faultable_cells: usize,
    pub correction_radius: usize,
    pub max_size: usize,
    pub rows: Vec<CensusRow>,
}

impl CensusReport {
    pub fn summary(&self) -> BTreeMap<usize, SizeSummary> {
        let mut out: BTreeMap<usize, SizeSummary> = (1..=self.max_size).map(|s| (s, SizeSummary::default())).collect();
        for row in &self.rows {
            let s = out.entry(row.size).or_default();
            match row.class {
                FaultClass::Harmless => s.harmless += 1,
                FaultClass::Correctable => s.correctable += 1,
                FaultClass::Uncorrectable => s.uncorrectable += 1,
            }
        }
        out
    }

    pub fn row(&self, fault_set: &[&str]) -> Option<&CensusRow> {
        self.rows
            .iter()
            .find(|r| r.fault_set.iter().map(String::as_str).eq(fault_set.iter().copied()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,fault_set,worst_bit_errors,class\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.size,
                r.fault_set.join(";"),
                r.worst_bit_errors,
                r.class.name()
            );
        }
        out
    }

    pub fn rows_from_csv(text: &str) -> Result<Vec<CensusRow>> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("size,fault_set,worst_bit_errors,class") {
            return Err(Error::Table("missing census header".into()));
        }
        lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                let bad = || Error::Table(format!("bad census row `{l}`"));
                if f.len() != 4 {
                    return Err(bad());
                }
                Ok(CensusRow {
                    size: f[0].parse().map_err(|_| bad())?,
                    fault_set: f[1].split(';').filter(|s| !s.is_empty()).map(String::from).collect(),
                    worst_bit_errors: f[2].parse().map_err(|_| bad())?,
                    class: FaultClass::parse(f[3])?,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("census serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Compares faulted runs of a netlist against its fault-free outputs on all
/// `2^k` messages.
pub struct FaultEvaluator {
    sim: Simulator,
    messages: Vec<BitBlock>,
    baseline: Vec<BitBlock>,
    cfg: SimConfig,
    radius: usize,
}

impl FaultEvaluator {
    /// The correction radius is that of the RM code whose length and
    /// dimension match the netlist, or 0 if none does.
    pub fn new(net: &Netlist) -> Result<Self> {
        let sim = Simulator::new(net)?;
        let radius = matching_radius(sim.input_count(), sim.channel_count());
        if sim.input_count() > 16 {
            return Err(Error::ResourceGuard(format!(
                "{} inputs is too many to enumerate",
                sim.input_count()
            )));
        }
        let messages = exhaustive_messages(sim.input_count());
        let cfg = SimConfig::default();
        let baseline = sim.run(&FaultPlan::default(), &messages, &cfg)?.received();
        Ok(FaultEvaluator {
            sim,
            messages,
            baseline,
            cfg,
            radius,
        })
    }

    pub fn correction_radius(&self) -> usize {
        self.radius
    }

    pub fn worst_bit_errors(&self, cells: &[&str]) -> Result<usize> {
        let plan = FaultPlan::open(cells.iter().copied());
        let got = self.sim.run(&plan, &self.messages, &self.cfg)?.received();
        Ok(got
            .iter()
            .zip(&self.baseline)
            .map(|(a, b)| a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count())
            .max()
            .unwrap_or(0))
    }

    pub fn classify(&self, worst: usize) -> FaultClass {
        match worst {
            0 => FaultClass::Harmless,
            w if w <= self.radius => FaultClass::Correctable,
            _ => FaultClass::Uncorrectable,
        }
    }

    pub fn evaluate(&self, cells: &[&str]) -> Result<CensusRow> {
        let worst = self.worst_bit_errors(cells)?;
        let mut fault_set: Vec<String> = cells.iter().map(|s| s.to_string()).collect();
        fault_set.sort();
        Ok(CensusRow {
            size: cells.len(),
            fault_set,
            worst_bit_errors: worst,
            class: self.classify(worst),
        })
    }
}

fn matching_radius(k: usize, n: usize) -> usize {
    if !n.is_power_of_two() || n < 2 {
        return 0;
    }
    let m = n.trailing_zeros() as usize;
    (0..=m)
        .filter_map(|r| RmCode::new(r, m).ok())
        .find(|c| c.k() == k)
        .map_or(0, |c| c.correction_radius())
}

/// Lexicographic `size`-subsets of `0..n`.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..size).rev().find(|&i| idx[i] != i + n - size) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Classifies every set of 1 to `max_size` simultaneously open faultable cells.
pub fn fault_tolerance_census(net: &Netlist, max_size: usize) -> Result<CensusReport> {
    if max_size > MAX_CENSUS_SIZE {
        return Err(Error::ResourceGuard(format!(
            "census size {max_size} exceeds the limit of {MAX_CENSUS_SIZE}"
        )));
    }
    let eval = FaultEvaluator::new(net)?;
    let cells = net.faultable_cells();
    let sets: Vec<Vec<usize>> = (1..=max_size).flat_map(|s| combinations(cells.len(), s)).collect();
    let rows = sets
        .par_iter()
        .map(|set| {
            let ids: Vec<&str> = set.iter().map(|&i| cells[i]).collect();
            eval.evaluate(&ids)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CensusReport {
        faultable_cells: cells.len(),
        correction_radius: eval.correction_radius(),
        max_size,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{build_no_encoder, build_rm13_reference};

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(49, 3).len(), 18424);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(4, 2)[..3], [vec![0, 1], vec![0, 2], vec![0, 3]]);
    }

    #[test]
    fn radius_detection() {
        assert_eq!(matching_radius(4, 8), 1);
        assert_eq!(matching_radius(4, 4), 0);
        assert_eq!(matching_radius(3, 8), 0);
    }

    #[test]
    fn single_faults_on_reference() {
        let report = fault_tolerance_census(&build_rm13_reference(), 1).unwrap();
        assert_eq!(report.rows.len(), 49);
        let row = report.row(&["dff_c8_2"]).unwrap();
        assert_eq!(row.class, FaultClass::Correctable);
        // xor_m1m2 feeds four output channels
        assert_eq!(report.row(&["xor_m1m2"]).unwrap().class, FaultClass::Uncorrectable);
    }

    #[test]
    fn baseline_has_no_margin() {
        let report = fault_tolerance_census(&build_no_encoder(), 2).unwrap();
        assert_eq!(report.correction_radius, 0);
        assert!(report.rows.iter().all(|r| r.class == FaultClass::Uncorrectable));
        assert_eq!(report.summary()[&2].total(), 6);
    }

    #[test]
    fn guard_and_round_trip() {
        let net = build_no_encoder();
        assert!(matches!(fault_tolerance_census(&net, 4), Err(Error::ResourceGuard(_))));
        let report = fault_tolerance_census(&net, 1).unwrap();
        assert_eq!(CensusReport::rows_from_csv(&report.to_csv()).unwrap(), report.rows);
        assert_eq!(CensusReport::from_json(&report.to_json()).unwrap(), report);
    }
}
