//! Joint optimization of the MA position and the TRIS phases.
//!
//! The outer loop alternates a gradient-ascent MA update (normalized in-plane
//! gradient, step halving from `mu0` down to `mu_min`) with element-wise
//! quantized phase alignment at the new position. Every accepted change is
//! non-decreasing in SNR, so the recorded SNR sequence is monotone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{propagation_phase, Scene, Snr};
use crate::error::{Error, Result};
use crate::geometry::{distance, in_region, MaRegion, Position3};
use crate::phase::{aligned_phases, PhaseConfig, PhaseResolution};

/// Floor used in the relative convergence test.
const SNR_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Initial step length along the normalized gradient, meters.
    pub mu0: f64,
    /// Backtracking stops once the step falls below this length, meters.
    pub mu_min: f64,
    /// Relative SNR change that counts as converged.
    pub epsilon: f64,
    pub i_max: usize,
    pub q_max: usize,
}

impl OptimizerSettings {
    /// `mu0 = λ/4`, `mu_min = λ·1e−6`, `ε = 1e−6`, 50 outer and 200 inner
    /// iterations.
    pub fn for_wavelength(wavelength: f64) -> Self {
        Self {
            mu0: wavelength / 4.0,
            mu_min: wavelength * 1e-6,
            epsilon: 1e-6,
            i_max: 50,
            q_max: 200,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu_min > 0.0 && self.mu_min < self.mu0 && self.mu0.is_finite()) {
            return Err(Error::invalid(format!(
                "need 0 < mu_min < mu0, got mu_min = {}, mu0 = {}",
                self.mu_min, self.mu0
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.i_max == 0 || self.q_max == 0 {
            return Err(Error::invalid("i_max and q_max must be at least 1"));
        }
        Ok(())
    }
}

/// Gradient of the SNR with respect to the MA position, per meter.
///
/// `∇SNR = 2κ Re{ (−Σ_n e^{jψ_n} (t − e_n) (j 2π/λ + 1/d_n^T) / (d_n^R (d_n^T)²)) c* }`
pub fn snr_gradient(t: Position3, phases: &PhaseConfig, scene: &Scene) -> Result<[f64; 3]> {
    let phases = phases.values();
    if phases.len() != scene.len() {
        return Err(Error::invalid(format!(
            "phase vector has {} entries, TRIS has {} elements",
            phases.len(),
            scene.len()
        )));
    }
    let k = scene.wavenumber();
    let mut c = Complex64::new(0.0, 0.0);
    let mut dc = [Complex64::new(0.0, 0.0); 3];
    for (n, e) in scene.elements().iter().enumerate() {
        let dt = distance(t, *e);
        if !(dt > 0.0) {
            return Err(Error::SingularGeometry { element: n });
        }
        let dr = scene.rx_distances()[n];
        let psi = phases[n] - propagation_phase(k, dt) - scene.rx_phases()[n];
        let rot = Complex64::from_polar(1.0, psi);
        c += rot / (dt * dr);
        let w = -rot * Complex64::new(1.0 / dt, k) / (dr * dt * dt);
        let rel = t - *e;
        dc[0] += w * rel.x;
        dc[1] += w * rel.y;
        dc[2] += w * rel.z;
    }
    let scale = 2.0 * scene.kappa();
    let cc = c.conj();
    Ok(dc.map(|d| scale * (d * cc).re))
}

/// Result of one gradient-ascent MA update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaUpdate {
    pub position: Position3,
    pub snr: Snr,
    /// Number of accepted gradient steps.
    pub steps: usize,
}

/// Up to `q_max` gradient-ascent steps with fixed phases.
///
/// Each step moves along the normalized in-plane gradient, halving the step
/// length from `mu0` until the candidate is feasible and strictly improves
/// the SNR. If the step drops below `mu_min` first, the position is kept and
/// the loop ends.
pub fn ma_update(
    t: Position3,
    phases: &PhaseConfig,
    scene: &Scene,
    region: &MaRegion,
    settings: &OptimizerSettings,
) -> Result<MaUpdate> {
    if !in_region(t, region) {
        return Err(Error::invalid("MA update started outside the feasible region"));
    }
    let mut position = t;
    let mut current = scene.snr(position, phases)?;
    let mut steps = 0;
    for _ in 0..settings.q_max {
        let [gx, gy, _] = snr_gradient(position, phases, scene)?;
        let norm = gx.hypot(gy);
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        let dir = Position3::new(gx / norm, gy / norm, 0.0);
        let mut mu = settings.mu0;
        let mut accepted = None;
        loop {
            let candidate = position + dir * mu;
            mu /= 2.0;
            if in_region(candidate, region) {
                let snr = scene.snr(candidate, phases)?;
                if snr.linear() > current.linear() {
                    accepted = Some((candidate, snr));
                    break;
                }
            }
            if mu < settings.mu_min {
                break;
            }
        }
        match accepted {
            Some((candidate, snr)) => {
                position = candidate;
                current = snr;
                steps += 1;
            }
            None => break,
        }
    }
    Ok(MaUpdate {
        position,
        snr: current,
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
}

/// State after one outer iteration (or the initial state).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AoRecord {
    /// Linear SNR.
    pub snr: f64,
    pub position: Position3,
    pub phases: Vec<f64>,
    /// Accepted gradient steps during this iteration.
    pub ga_steps: usize,
    /// Whether the realigned phases were adopted. They are kept only when
    /// they do not lower the SNR at the new position.
    pub phases_updated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AoTrace {
    pub resolution: PhaseResolution,
    pub initial: AoRecord,
    pub iterations: Vec<AoRecord>,
    pub termination: Termination,
}

impl AoTrace {
    /// Initial SNR followed by the SNR after each outer iteration.
    pub fn snr_sequence(&self) -> Vec<f64> {
        std::iter::once(&self.initial)
            .chain(&self.iterations)
            .map(|r| r.snr)
            .collect()
    }

    pub fn final_record(&self) -> &AoRecord {
        self.iterations.last().unwrap_or(&self.initial)
    }

    pub fn is_monotone(&self) -> bool {
        self.snr_sequence().windows(2).all(|w| w[1] >= w[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoResult {
    pub position: Position3,
    pub phases: PhaseConfig,
    pub snr: Snr,
    pub trace: AoTrace,
}

fn record(snr: Snr, position: Position3, phases: &PhaseConfig, ga_steps: usize, updated: bool) -> AoRecord {
    AoRecord {
        snr: snr.linear(),
        position,
        phases: phases.values().to_vec(),
        ga_steps,
        phases_updated: updated,
    }
}

/// Alternating optimization of MA position and phases starting at `t0` with
/// phases aligned to `t0`.
pub fn ao_optimize(
    t0: Position3,
    scene: &Scene,
    region: &MaRegion,
    resolution: PhaseResolution,
    settings: &OptimizerSettings,
) -> Result<AoResult> {
    settings.validate()?;
    if !in_region(t0, region) {
        return Err(Error::invalid(format!(
            "initial MA position ({}, {}, {}) is outside the feasible region",
            t0.x, t0.y, t0.z
        )));
    }
    let mut position = t0;
    let mut phases = aligned_phases(t0, scene, resolution)?;
    let mut snr = scene.snr(position, &phases)?;
    let initial = record(snr, position, &phases, 0, true);
    let mut iterations = Vec::new();
    let mut termination = Termination::MaxIterations;

    for _ in 0..settings.i_max {
        let previous = snr;
        let moved = ma_update(position, &phases, scene, region, settings)?;
        position = moved.position;
        snr = moved.snr;

        let realigned = aligned_phases(position, scene, resolution)?;
        let realigned_snr = scene.snr(position, &realigned)?;
        let updated = realigned_snr.linear() >= snr.linear();
        if updated {
            phases = realigned;
            snr = realigned_snr;
        }
        iterations.push(record(snr, position, &phases, moved.steps, updated));

        let change = (snr.linear() - previous.linear()).abs();
        if change <= settings.epsilon * previous.linear().max(SNR_FLOOR) {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(AoResult {
        position,
        phases,
        snr,
        trace: AoTrace {
            resolution,
            initial,
            iterations,
            termination,
        },
    })
}
