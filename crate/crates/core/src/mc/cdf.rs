use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Arm;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub n_err: u32,
    pub cum_prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfMeta {
    pub arm: Arm,
    pub seed: u64,
    pub fault_prob: f64,
    pub spread_pct: Option<f64>,
    pub realizations: usize,
    pub messages: usize,
}

/// Empirical CDF of erroneous messages per realization.
///
/// Canonical form keeps one point per distinct observed `n_err`, so a unit
/// step at zero is the single point `(0, 1.0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfTable {
    pub meta: CdfMeta,
    pub points: Vec<CdfPoint>,
}

impl CdfTable {
    pub fn from_counts(counts: &[u32], meta: CdfMeta) -> Self {
        let mut sorted = counts.to_vec();
        sorted.sort_unstable();
        let total = sorted.len() as f64;
        let mut points: Vec<CdfPoint> = Vec::new();
        for (i, &n) in sorted.iter().enumerate() {
            let cum_prob = (i + 1) as f64 / total;
            match points.last_mut() {
                Some(p) if p.n_err == n => p.cum_prob = cum_prob,
                _ => points.push(CdfPoint { n_err: n, cum_prob }),
            }
        }
        CdfTable { meta, points }
    }

    /// `P(N_err <= x)`.
    pub fn prob_at_most(&self, x: u32) -> f64 {
        self.points
            .iter()
            .take_while(|p| p.n_err <= x)
            .last()
            .map_or(0.0, |p| p.cum_prob)
    }

    /// `P(N_err = 0)`.
    pub fn p_zero(&self) -> f64 {
        self.prob_at_most(0)
    }

    /// Checks monotonicity, support and termination at 1.
    pub fn is_valid(&self) -> bool {
        let support = self.meta.messages as u32;
        self.points
            .windows(2)
            .all(|w| w[0].n_err < w[1].n_err && w[0].cum_prob <= w[1].cum_prob)
            && self
                .points
                .iter()
                .all(|p| p.n_err <= support && (0.0..=1.0).contains(&p.cum_prob))
            && self.points.last().is_some_and(|p| p.cum_prob == 1.0)
    }

    /// `true` if `self` lies on or above `other` at every `n_err` in `0..=messages`.
    pub fn dominates(&self, other: &CdfTable) -> bool {
        let top = self.meta.messages.max(other.meta.messages) as u32;
        (0..=top).all(|x| self.prob_at_most(x) >= other.prob_at_most(x))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_err,cum_prob\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.n_err, p.cum_prob);
        }
        out
    }

    pub fn points_from_csv(text: &str) -> Result<Vec<CdfPoint>> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("n_err,cum_prob") {
            return Err(Error::Table("missing `n_err,cum_prob` header".into()));
        }
        lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let (n, p) = l
                    .split_once(',')
                    .ok_or_else(|| Error::Table(format!("bad row `{l}`")))?;
                Ok(CdfPoint {
                    n_err: n
                        .trim()
                        .parse()
                        .map_err(|_| Error::Table(format!("bad n_err in `{l}`")))?,
                    cum_prob: p
                        .trim()
                        .parse()
                        .map_err(|_| Error::Table(format!("bad cum_prob in `{l}`")))?,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("cdf serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> CdfMeta {
        CdfMeta {
            arm: Arm::Rm13AfterEcc,
            seed: 1,
            fault_prob: 0.0,
            spread_pct: None,
            realizations: 4,
            messages: 10,
        }
    }

    #[test]
    fn unit_step_is_one_row() {
        let t = CdfTable::from_counts(&[0, 0, 0, 0], meta());
        assert_eq!(t.to_csv(), "n_err,cum_prob\n0,1\n");
        assert!(t.is_valid());
        assert_eq!(t.p_zero(), 1.0);
    }

    #[test]
    fn steps() {
        let t = CdfTable::from_counts(&[3, 0, 1, 0], meta());
        assert_eq!(t.points.len(), 3);
        assert_eq!(t.prob_at_most(0), 0.5);
        assert_eq!(t.prob_at_most(2), 0.75);
        assert_eq!(t.prob_at_most(10), 1.0);
        assert!(t.is_valid());
    }

    #[test]
    fn round_trips() {
        let t = CdfTable::from_counts(&[7, 2, 2, 9], meta());
        assert_eq!(CdfTable::points_from_csv(&t.to_csv()).unwrap(), t.points);
        assert_eq!(CdfTable::from_json(&t.to_json()).unwrap(), t);
        assert!(CdfTable::points_from_csv("x,y\n").is_err());
    }
}
