//! Fault plans and the open-circuit rewrite.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Netlist;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::sim::SpreadModel;

/// Cells failed in one realization.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FaultPlan {
    pub seed: u64,
    pub realization_index: u64,
    /// Open-circuit defects.
    pub open_cells: BTreeSet<String>,
    /// Cells pushed out of their operating margin by parameter spread.
    pub failed_cells: BTreeSet<String>,
}

impl FaultPlan {
    pub fn open<I, S>(cells: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        FaultPlan {
            open_cells: cells.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.open_cells.is_empty() && self.failed_cells.is_empty()
    }

    /// Every cell that stays silent under this plan.
    pub fn dead_cells(&self) -> BTreeSet<&str> {
        self.open_cells
            .iter()
            .chain(&self.failed_cells)
            .map(String::as_str)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fault plan serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub(crate) fn check_against(&self, net: &Netlist) -> Result<()> {
        match self.dead_cells().into_iter().find(|id| net.cell(id).is_none()) {
            Some(id) => Err(Error::UnknownCell(id.to_string())),
            None => Ok(()),
        }
    }
}

/// Returns a copy of `net` where every cell named by `plan` is open.
pub fn inject_faults(net: &Netlist, plan: &FaultPlan) -> Result<Netlist> {
    plan.check_against(net)?;
    let mut out = net.clone();
    for id in plan.dead_cells() {
        out.cell_mut(id).expect("checked above").open = true;
    }
    Ok(out)
}

/// Samples the faults of one realization.
///
/// Each faultable cell draws one uniform number from the open-fault stream and
/// is opened iff it falls below `fault_prob`. Because the draws do not depend
/// on `fault_prob`, the plan at a smaller probability is a subset of the plan
/// at a larger one for the same `(seed, realization)`.
pub fn sample_fault_plan(
    net: &Netlist,
    fault_prob: f64,
    spread: Option<&SpreadModel>,
    seed: u64,
    realization: u64,
) -> Result<FaultPlan> {
    if !(0.0..=1.0).contains(&fault_prob) {
        return Err(Error::InvalidParameter(format!(
            "fault probability {fault_prob} is not in [0, 1]"
        )));
    }
    let mut rng = stream_rng(seed, realization, Stream::OpenFaults);
    let open_cells = net
        .faultable_cells()
        .into_iter()
        .filter(|_| rng.random::<f64>() < fault_prob)
        .map(str::to_string)
        .collect();
    let failed_cells = match spread {
        Some(model) => model.sample_failures(net, &mut stream_rng(seed, realization, Stream::Spread))?,
        None => BTreeSet::new(),
    };
    Ok(FaultPlan {
        seed,
        realization_index: realization,
        open_cells,
        failed_cells,
    })
}
