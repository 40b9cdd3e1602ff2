//! Behavioral stand-in for process parameter spread.
//!
//! Each faultable cell draws one deviation uniformly from
//! `[-spread_pct, +spread_pct]` and fails iff `|deviation|` exceeds the
//! operating margin of its kind. A failed cell is silent, exactly like an open
//! one. The margins are calibration knobs, not device physics.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netlist::{build_no_encoder, build_rm13_reference, CellKind, Netlist};
use crate::rng::{stream_rng, Stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadModel {
    pub spread_pct: f64,
    /// Margin for kinds missing from `margins`.
    pub default_margin: f64,
    #[serde(default)]
    pub margins: BTreeMap<CellKind, f64>,
}

impl SpreadModel {
    pub fn new(spread_pct: f64, default_margin: f64) -> Result<Self> {
        let model = SpreadModel {
            spread_pct,
            default_margin,
            margins: BTreeMap::new(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_margin(mut self, kind: CellKind, margin: f64) -> Result<Self> {
        self.margins.insert(kind, margin);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.spread_pct) {
            return Err(Error::InvalidParameter(format!(
                "spread {} is not in [0, 0.5]",
                self.spread_pct
            )));
        }
        for m in std::iter::once(&self.default_margin).chain(self.margins.values()) {
            if !(*m > 0.0 && *m <= 0.5) {
                return Err(Error::InvalidParameter(format!("margin {m} is not in (0, 0.5]")));
            }
        }
        Ok(())
    }

    pub fn margin(&self, kind: CellKind) -> f64 {
        self.margins.get(&kind).copied().unwrap_or(self.default_margin)
    }

    /// `P(|U(-s, s)| > margin)`.
    pub fn failure_probability(&self, kind: CellKind) -> f64 {
        let s = self.spread_pct;
        let m = self.margin(kind);
        if s <= m {
            0.0
        } else {
            (s - m) / s
        }
    }

    /// Margins chosen so that, at `spread_pct`, the built-in baseline survives
    /// with probability `baseline_zero_fail` and the built-in encoder with
    /// probability `encoder_zero_fail`. Output converters share one margin,
    /// all other encoder cells another.
    pub fn calibrated(spread_pct: f64, baseline_zero_fail: f64, encoder_zero_fail: f64) -> Result<Self> {
        if spread_pct <= 0.0 {
            return Err(Error::InvalidParameter("calibration needs a positive spread".into()));
        }
        let baseline = build_no_encoder();
        let encoder = build_rm13_reference();
        let n_out_base = baseline.count(CellKind::Sfq2Dc) as f64;
        let n_out_enc = encoder.count(CellKind::Sfq2Dc) as i32;
        let n_logic = (encoder.faultable_cells().len() - encoder.count(CellKind::Sfq2Dc)) as f64;

        let out_survive = baseline_zero_fail.powf(1.0 / n_out_base);
        let logic_survive = (encoder_zero_fail / out_survive.powi(n_out_enc)).powf(1.0 / n_logic);
        if !(0.0 < logic_survive && logic_survive <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "targets {baseline_zero_fail} / {encoder_zero_fail} are not jointly reachable"
            )));
        }
        SpreadModel::new(spread_pct, (spread_pct * logic_survive).min(0.5))?
            .with_margin(CellKind::Sfq2Dc, (spread_pct * out_survive).min(0.5))
    }

    /// The default calibration used by the Monte-Carlo tools: ±20% spread,
    /// 80% baseline survival, 55.4% encoder survival.
    pub fn reference() -> Self {
        Self::calibrated(0.20, 0.80, 0.554).expect("reference targets are reachable")
    }

    /// Same margins, different spread.
    pub fn at_spread(&self, spread_pct: f64) -> Result<Self> {
        let model = SpreadModel {
            spread_pct,
            ..self.clone()
        };
        model.validate()?;
        Ok(model)
    }

    pub fn sample_failures<R: Rng + ?Sized>(&self, net: &Netlist, rng: &mut R) -> Result<BTreeSet<String>> {
        self.validate()?;
        let mut failed = BTreeSet::new();
        for id in net.faultable_cells() {
            let kind = net.cell(id).expect("faultable cell exists").kind;
            let deviation = if self.spread_pct > 0.0 {
                rng.random_range(-self.spread_pct..=self.spread_pct)
            } else {
                0.0
            };
            if deviation.abs() > self.margin(kind) {
                failed.insert(id.to_string());
            }
        }
        Ok(failed)
    }
}

/// Cells failed by `model` for a given seed.
pub fn apply_spread(net: &Netlist, model: &SpreadModel, seed: u64) -> Result<BTreeSet<String>> {
    model.sample_failures(net, &mut stream_rng(seed, 0, Stream::Spread))
}
