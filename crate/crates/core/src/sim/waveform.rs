//! Two-level sampled waveforms and NRZ transition coding.
//!
//! Levels are nominally `0.0` (low) and `1.0` (high); classification averages
//! each cycle window and thresholds at the midpoint.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::SimConfig;

pub const LOW: f64 = 0.0;
pub const HIGH: f64 = 1.0;
pub const THRESHOLD: f64 = (LOW + HIGH) / 2.0;

fn render<R: Rng + ?Sized>(levels: impl Iterator<Item = bool>, cfg: &SimConfig, rng: &mut R) -> Vec<f64> {
    let spc = cfg.samples_per_cycle;
    let noise = (cfg.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, cfg.noise_sigma * (HIGH - LOW)).expect("sigma is finite and positive"));
    let mut out = Vec::new();
    for level in levels {
        let v = if level { HIGH } else { LOW };
        for _ in 0..spc {
            out.push(match &noise {
                Some(n) => v + n.sample(rng),
                None => v,
            });
        }
    }
    out
}

/// One plateau per bit: high for `1`, low for `0`.
pub fn bits_to_waveform<R: Rng + ?Sized>(bits: &[u8], cfg: &SimConfig, rng: &mut R) -> Vec<f64> {
    render(bits.iter().map(|&b| b == 1), cfg, rng)
}

pub fn levels_to_waveform<R: Rng + ?Sized>(levels: &[bool], cfg: &SimConfig, rng: &mut R) -> Vec<f64> {
    render(levels.iter().copied(), cfg, rng)
}

/// Averages each cycle window and compares against [`THRESHOLD`].
/// A trailing partial window is dropped.
pub fn classify_levels(samples: &[f64], cfg: &SimConfig) -> Vec<bool> {
    samples
        .chunks_exact(cfg.samples_per_cycle)
        .map(|w| w.iter().sum::<f64>() / w.len() as f64 > THRESHOLD)
        .collect()
}

/// Level sequence of an SFQ-to-DC converter that toggles once per `1`.
pub fn nrz_levels(bits: &[u8]) -> Vec<bool> {
    let mut level = false;
    bits.iter()
        .map(|&b| {
            level ^= b == 1;
            level
        })
        .collect()
}

/// `1` wherever the level differs from the previous cycle; the level before
/// the first cycle is the reset level (low).
pub fn transitions(levels: &[bool]) -> Vec<u8> {
    let mut prev = false;
    levels
        .iter()
        .map(|&l| {
            let bit = u8::from(l != prev);
            prev = l;
            bit
        })
        .collect()
}

/// Classifies a converter output waveform back into transition-coded bits.
pub fn waveform_to_bits(samples: &[f64], cfg: &SimConfig) -> Vec<u8> {
    transitions(&classify_levels(samples, cfg))
}
