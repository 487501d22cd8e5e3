use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::wrap_angle;
use crate::{Error, Result};

/// Uniform `b`-bit phase shifter: `2^b` levels `-π + kΔ`, `k = 1..=2^b`,
/// `Δ = 2π / 2^b`, so the levels live in `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseQuantizer {
    bits: u32,
}

impl PhaseQuantizer {
    pub const MAX_BITS: u32 = 30;

    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > Self::MAX_BITS {
            return Err(Error::invalid(format!(
                "phase quantizer bits must be in 1..={}, got {bits}",
                Self::MAX_BITS
            )));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn n_levels(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.n_levels() as f64
    }

    /// Sorted level set.
    pub fn levels(&self) -> Vec<f64> {
        (1..=self.n_levels()).map(|k| self.level(k)).collect()
    }

    fn level(&self, k: u64) -> f64 {
        if k == self.n_levels() {
            PI
        } else {
            -PI + k as f64 * self.step()
        }
    }

    /// Nearest level on the circle; equidistant inputs go to the smaller phase.
    pub fn quantize(&self, phase: f64) -> f64 {
        let levels = self.n_levels();
        let x = wrap_angle(phase);
        let t = ((x + PI) / self.step()).floor() as u64;
        let lo = if t == 0 { levels } else { t.min(levels) };
        let hi = if t >= levels { 1 } else { t + 1 };
        let (a, b) = (self.level(lo), self.level(hi));
        let (da, db) = (circular_distance(x, a), circular_distance(x, b));
        if da < db || (da == db && a <= b) {
            a
        } else {
            b
        }
    }
}

pub fn quantize_phases(theta: &[f64], quantizer: &PhaseQuantizer) -> Vec<f64> {
    theta.iter().map(|&t| quantizer.quantize(t)).collect()
}

/// Distance between two angles on the unit circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}
