//! b-bit phase sets, nearest-point circular quantization and TRIS phase
//! alignment.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::Scene;
use crate::error::{Error, Result};
use crate::geometry::Position3;

pub const MAX_BITS: u8 = 16;

/// Phase-shifter resolution of the TRIS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhaseResolution {
    Bits(u8),
    Continuous,
}

impl PhaseResolution {
    pub fn bits(b: u8) -> Result<Self> {
        if (1..=MAX_BITS).contains(&b) {
            Ok(PhaseResolution::Bits(b))
        } else {
            Err(Error::invalid(format!(
                "phase bits must lie in 1..={MAX_BITS}, got {b}"
            )))
        }
    }

    /// Worst-case per-element residual phase after alignment, `π / 2^b`.
    pub fn max_residual(self) -> f64 {
        match self {
            PhaseResolution::Bits(b) => TAU / f64::from(1u32 << b) / 2.0,
            PhaseResolution::Continuous => 0.0,
        }
    }
}

impl fmt::Display for PhaseResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseResolution::Bits(b) => write!(f, "{b}"),
            PhaseResolution::Continuous => f.write_str("cont"),
        }
    }
}

impl FromStr for PhaseResolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cont" | "continuous" => Ok(PhaseResolution::Continuous),
            other => {
                let b: u8 = other
                    .parse()
                    .map_err(|_| Error::invalid(format!("not a phase resolution: `{other}`")))?;
                PhaseResolution::bits(b)
            }
        }
    }
}

/// Uniform set `{k · 2π / 2^b : k = 0, …, 2^b − 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSet {
    bits: u8,
    values: Vec<f64>,
}

impl PhaseSet {
    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        TAU / self.values.len() as f64
    }

    fn value(&self, k: usize) -> f64 {
        self.values[k % self.values.len()]
    }
}

pub fn phase_set(b: u8) -> Result<PhaseSet> {
    PhaseResolution::bits(b)?;
    let levels = 1usize << b;
    let step = TAU / levels as f64;
    Ok(PhaseSet {
        bits: b,
        values: (0..levels).map(|k| k as f64 * step).collect(),
    })
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(TAU - d)
}

/// Nearest member of `set` under circular distance; exact ties go to the
/// smaller set value.
pub fn quantize(phi: f64, set: &PhaseSet) -> f64 {
    let r = phi.rem_euclid(TAU);
    let k = (r / set.step()).floor() as usize;
    let lo = set.value(k);
    let hi = set.value(k + 1);
    let (dl, dh) = (circular_distance(r, lo), circular_distance(r, hi));
    if dl < dh {
        lo
    } else if dh < dl {
        hi
    } else {
        lo.min(hi)
    }
}

/// Per-element TRIS phases in `[0, 2π)` with their resolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseConfig {
    phases: Vec<f64>,
    resolution: PhaseResolution,
}

impl PhaseConfig {
    /// Arbitrary phases, reduced to `[0, 2π)`.
    pub fn continuous(phases: Vec<f64>) -> Self {
        Self {
            phases: phases.into_iter().map(|p| p.rem_euclid(TAU)).collect(),
            resolution: PhaseResolution::Continuous,
        }
    }

    /// Phases that must already be members of the `b`-bit set (after
    /// reduction to `[0, 2π)`, within `1e-9` rad). Stored as exact set values.
    pub fn quantized(phases: Vec<f64>, bits: u8) -> Result<Self> {
        let set = phase_set(bits)?;
        let phases = phases
            .into_iter()
            .enumerate()
            .map(|(n, p)| {
                let q = quantize(p, &set);
                if circular_distance(p.rem_euclid(TAU), q) <= 1e-9 {
                    Ok(q)
                } else {
                    Err(Error::invalid(format!(
                        "phase {p} at element {n} is not in the {bits}-bit set"
                    )))
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            phases,
            resolution: PhaseResolution::Bits(bits),
        })
    }

    pub fn zeros(n: usize, resolution: PhaseResolution) -> Self {
        Self {
            phases: vec![0.0; n],
            resolution,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.phases
    }

    pub fn resolution(&self) -> PhaseResolution {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Phases that compensate the propagation phase of every path through the
/// TRIS, quantized element-wise for finite resolutions.
pub fn aligned_phases(
    t: Position3,
    scene: &Scene,
    resolution: PhaseResolution,
) -> Result<PhaseConfig> {
    let ideal = scene.propagation_phases(t)?;
    let phases = match resolution {
        PhaseResolution::Continuous => ideal,
        PhaseResolution::Bits(b) => {
            let set = phase_set(b)?;
            ideal.into_iter().map(|p| quantize(p, &set)).collect()
        }
    };
    Ok(PhaseConfig { phases, resolution })
}
