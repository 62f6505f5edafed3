//! Conventional fully-active base station: a fixed uniform linear array with
//! one RF chain per antenna, doing MRT over the direct line-of-sight link.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{propagation_phase, to_db, Scene, Snr, SystemParams};
use crate::error::{Error, Result};
use crate::geometry::{distance, MaRegion, Position3};
use crate::optimizer::{ao_optimize, OptimizerSettings};
use crate::phase::PhaseResolution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub antenna_count: usize,
    pub spacing: f64,
    pub center: Position3,
    /// Array axis; normalized on use.
    pub axis: Position3,
    /// Direct-link gain. `None` means `G_f · G_g` from the system parameters.
    pub direct_gain: Option<f64>,
}

impl BaselineConfig {
    /// `M`-element ULA along `x` with `λ/2` spacing.
    pub fn ula(antenna_count: usize, center: Position3, wavelength: f64) -> Self {
        Self {
            antenna_count,
            spacing: wavelength / 2.0,
            center,
            axis: Position3::new(1.0, 0.0, 0.0),
            direct_gain: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.antenna_count == 0 {
            return Err(Error::invalid("baseline needs at least one antenna"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::invalid(format!(
                "baseline spacing must be positive, got {}",
                self.spacing
            )));
        }
        if !(self.axis.norm() > 0.0) || !self.center.is_finite() {
            return Err(Error::invalid("baseline axis must be non-zero and center finite"));
        }
        if let Some(g) = self.direct_gain {
            if !(g > 0.0) {
                return Err(Error::invalid(format!("direct gain must be positive, got {g}")));
            }
        }
        Ok(())
    }

    pub fn positions(&self) -> Vec<Position3> {
        let axis = self.axis * (1.0 / self.axis.norm());
        let mid = (self.antenna_count as f64 - 1.0) / 2.0;
        (0..self.antenna_count)
            .map(|m| self.center + axis * ((m as f64 - mid) * self.spacing))
            .collect()
    }
}

/// Direct channel `h_m = (λ √G / 4π) e^{−j 2π d_m/λ} / d_m` per antenna.
pub fn direct_channel(config: &BaselineConfig, params: &SystemParams) -> Result<Vec<Complex64>> {
    config.validate()?;
    params.validate()?;
    let gain = config.direct_gain.unwrap_or_else(|| params.gain_product());
    let amp = params.wavelength * gain.sqrt() / (4.0 * PI);
    let k = params.wavenumber();
    config
        .positions()
        .into_iter()
        .enumerate()
        .map(|(m, p)| {
            let d = distance(params.user_position, p);
            if d > 0.0 {
                Ok(Complex64::from_polar(amp / d, -propagation_phase(k, d)))
            } else {
                Err(Error::SingularGeometry { element: m })
            }
        })
        .collect()
}

/// MRT with total power `P`: `SNR = (P/σ²) Σ_m |h_m|²`.
pub fn mrt_snr(config: &BaselineConfig, params: &SystemParams) -> Result<Snr> {
    let h = direct_channel(config, params)?;
    let energy: f64 = h.iter().map(|x| x.norm_sqr()).sum();
    Ok(Snr::from_linear(params.transmit_power / params.noise_variance * energy))
}

/// `10 log10(SNR_proposed / SNR_baseline)` where the proposed SNR comes from
/// running the optimizer from the region center.
pub fn proposed_vs_baseline_gap(
    scene: &Scene,
    region: &MaRegion,
    resolution: PhaseResolution,
    settings: &OptimizerSettings,
    config: &BaselineConfig,
) -> Result<f64> {
    let proposed = ao_optimize(region.center, scene, region, resolution, settings)?;
    let baseline = mrt_snr(config, scene.params())?;
    Ok(to_db(proposed.snr.linear() / baseline.linear()))
}
