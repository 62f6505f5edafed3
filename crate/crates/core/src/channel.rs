//! Near-field MA→TRIS and TRIS→user link model, the cascaded sum and the
//! received SNR.
//!
//! The SNR is evaluated in the factorized form `SNR = κ |c|²` where
//! `c = Σ e^{jψ_n} / (d_n^T d_n^R)` carries only the geometric amplitudes and
//! `κ = λ² Γ² P G F / (16 π² σ²)` carries every gain. The per-link
//! coefficients `f_n`, `g_n` are exposed separately and agree with the
//! factorized form.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Position3, TrisGeometry};
use crate::phase::PhaseConfig;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Physical constants and link-budget scalars. All powers in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Wavelength `λ`, meters.
    pub wavelength: f64,
    /// MA antenna gain `G_f`.
    pub tx_gain: f64,
    /// Normalized pattern of the TRIS face toward the MA, `F_f`.
    pub tx_pattern: f64,
    /// TRIS-to-user side gain `G_g`.
    pub rx_gain: f64,
    /// Normalized pattern of the TRIS face toward the user, `F_g`.
    pub rx_pattern: f64,
    /// Amplitude transmission loss `Γ ∈ [0, 1]`.
    pub transmission_loss: f64,
    /// Transmit power `P`, watts.
    pub transmit_power: f64,
    /// Noise variance `σ²`, watts.
    pub noise_variance: f64,
    pub user_position: Position3,
}

impl SystemParams {
    /// Unit gains, lossless TRIS, 1 W transmit power and 1 W noise.
    pub fn with_wavelength(wavelength: f64) -> Self {
        Self {
            wavelength,
            tx_gain: 1.0,
            tx_pattern: 1.0,
            rx_gain: 1.0,
            rx_pattern: 1.0,
            transmission_loss: 1.0,
            transmit_power: 1.0,
            noise_variance: 1.0,
            user_position: Position3::new(0.0, 0.0, 50.0),
        }
    }

    pub fn with_frequency(carrier_frequency: f64) -> Self {
        Self::with_wavelength(SPEED_OF_LIGHT / carrier_frequency)
    }

    /// 20 GHz carrier, 13.6 dBm transmit power, −70 dBm noise, boresight user
    /// at 50 m, unit gains and `Γ = 1`.
    pub fn reference() -> Self {
        Self {
            transmit_power: dbm_to_watts(13.6),
            noise_variance: dbm_to_watts(-70.0),
            ..Self::with_frequency(20e9)
        }
    }

    pub fn carrier_frequency(&self) -> f64 {
        SPEED_OF_LIGHT / self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    /// `G = G_f G_g`.
    pub fn gain_product(&self) -> f64 {
        self.tx_gain * self.rx_gain
    }

    /// `F = F_f F_g`.
    pub fn pattern_product(&self) -> f64 {
        self.tx_pattern * self.rx_pattern
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("wavelength", self.wavelength)?;
        positive("tx_gain", self.tx_gain)?;
        positive("tx_pattern", self.tx_pattern)?;
        positive("rx_gain", self.rx_gain)?;
        positive("rx_pattern", self.rx_pattern)?;
        positive("transmit_power", self.transmit_power)?;
        positive("noise_variance", self.noise_variance)?;
        if !(0.0..=1.0).contains(&self.transmission_loss) {
            return Err(Error::invalid(format!(
                "transmission_loss must lie in [0, 1], got {}",
                self.transmission_loss
            )));
        }
        if !self.user_position.is_finite() {
            return Err(Error::invalid("user position must be finite"));
        }
        Ok(())
    }
}

/// `κ = λ² Γ² P G F / (16 π² σ²)`.
pub fn kappa(params: &SystemParams) -> f64 {
    let lam = params.wavelength;
    let gamma = params.transmission_loss;
    lam * lam * gamma * gamma * params.transmit_power * params.gain_product()
        * params.pattern_product()
        / (16.0 * PI * PI * params.noise_variance)
}

/// Received SNR, stored linear.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Snr(f64);

impl Snr {
    pub fn from_linear(linear: f64) -> Self {
        Snr(linear)
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        to_db(self.0)
    }
}

/// Per-element link coefficients and distances for one MA position.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkCoefficients {
    /// `f_n(t)`
    pub tx: Vec<Complex64>,
    /// `g_n`
    pub rx: Vec<Complex64>,
    pub tx_distances: Vec<f64>,
    pub rx_distances: Vec<f64>,
}

/// Phase `(2π/λ) d` reduced to `[0, 2π)`.
#[inline]
pub(crate) fn propagation_phase(wavenumber: f64, d: f64) -> f64 {
    (wavenumber * d).rem_euclid(TAU)
}

fn distances_to(point: Position3, elements: &[Position3]) -> Result<Vec<f64>> {
    elements
        .iter()
        .enumerate()
        .map(|(n, e)| {
            let d = distance(point, *e);
            if d > 0.0 {
                Ok(d)
            } else {
                Err(Error::SingularGeometry { element: n })
            }
        })
        .collect()
}

fn spherical_coefficients(amplitude: f64, wavenumber: f64, distances: &[f64]) -> Vec<Complex64> {
    distances
        .iter()
        .map(|&d| Complex64::from_polar(amplitude / d, -propagation_phase(wavenumber, d)))
        .collect()
}

/// `f_n(t) = √(λ G_f F_f / 4π) · e^{−j 2π d_n^T/λ} / d_n^T`.
pub fn tx_coefficients(
    t: Position3,
    geometry: &TrisGeometry,
    params: &SystemParams,
) -> Result<Vec<Complex64>> {
    let d = distances_to(t, geometry.elements())?;
    let amp = (params.wavelength * params.tx_gain * params.tx_pattern / (4.0 * PI)).sqrt();
    Ok(spherical_coefficients(amp, params.wavenumber(), &d))
}

/// `g_n = √(λ G_g F_g / 4π) · e^{−j 2π d_n^R/λ} / d_n^R`.
pub fn rx_coefficients(geometry: &TrisGeometry, params: &SystemParams) -> Result<Vec<Complex64>> {
    let d = distances_to(params.user_position, geometry.elements())?;
    let amp = (params.wavelength * params.rx_gain * params.rx_pattern / (4.0 * PI)).sqrt();
    Ok(spherical_coefficients(amp, params.wavenumber(), &d))
}

/// A TRIS geometry with its link parameters and the user-side quantities
/// that do not depend on the MA position.
#[derive(Debug, Clone)]
pub struct Scene {
    geometry: TrisGeometry,
    params: SystemParams,
    kappa: f64,
    wavenumber: f64,
    rx_distances: Vec<f64>,
    rx_phases: Vec<f64>,
}

impl Scene {
    pub fn new(geometry: TrisGeometry, params: SystemParams) -> Result<Self> {
        params.validate()?;
        let rx_distances = distances_to(params.user_position, geometry.elements())?;
        let wavenumber = params.wavenumber();
        let rx_phases = rx_distances
            .iter()
            .map(|&d| propagation_phase(wavenumber, d))
            .collect();
        Ok(Self {
            kappa: kappa(&params),
            wavenumber,
            geometry,
            params,
            rx_distances,
            rx_phases,
        })
    }

    pub fn geometry(&self) -> &TrisGeometry {
        &self.geometry
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn elements(&self) -> &[Position3] {
        self.geometry.elements()
    }

    pub fn len(&self) -> usize {
        self.geometry.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geometry.is_empty()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn rx_distances(&self) -> &[f64] {
        &self.rx_distances
    }

    /// `(2π/λ) d_n^R mod 2π`.
    pub fn rx_phases(&self) -> &[f64] {
        &self.rx_phases
    }

    pub fn tx_distances(&self, t: Position3) -> Result<Vec<f64>> {
        distances_to(t, self.elements())
    }

    /// Continuous phases that cancel the propagation phase of every path,
    /// `(2π/λ)(d_n^T + d_n^R) mod 2π`.
    pub fn propagation_phases(&self, t: Position3) -> Result<Vec<f64>> {
        let d = self.tx_distances(t)?;
        Ok(d.iter()
            .zip(&self.rx_phases)
            .map(|(&dt, &rx)| (propagation_phase(self.wavenumber, dt) + rx).rem_euclid(TAU))
            .collect())
    }

    pub fn link_coefficients(&self, t: Position3) -> Result<LinkCoefficients> {
        Ok(LinkCoefficients {
            tx: tx_coefficients(t, &self.geometry, &self.params)?,
            rx: rx_coefficients(&self.geometry, &self.params)?,
            tx_distances: self.tx_distances(t)?,
            rx_distances: self.rx_distances.clone(),
        })
    }

    fn check_len(&self, phases: &[f64]) -> Result<()> {
        if phases.len() != self.len() {
            return Err(Error::invalid(format!(
                "phase vector has {} entries, TRIS has {} elements",
                phases.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// Cascaded sum for an arbitrary (not necessarily quantized) phase slice.
    pub fn cascaded_sum_raw(&self, t: Position3, phases: &[f64]) -> Result<Complex64> {
        self.check_len(phases)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, e) in self.elements().iter().enumerate() {
            let dt = distance(t, *e);
            if !(dt > 0.0) {
                return Err(Error::SingularGeometry { element: n });
            }
            let psi = phases[n] - propagation_phase(self.wavenumber, dt) - self.rx_phases[n];
            acc += Complex64::from_polar(1.0 / (dt * self.rx_distances[n]), psi);
        }
        Ok(acc)
    }

    /// `c(t, φ̃) = Σ_n e^{jψ_n} / (d_n^T d_n^R)`.
    pub fn cascaded_sum(&self, t: Position3, phases: &PhaseConfig) -> Result<Complex64> {
        self.cascaded_sum_raw(t, phases.values())
    }

    pub fn snr_raw(&self, t: Position3, phases: &[f64]) -> Result<Snr> {
        Ok(Snr(self.kappa * self.cascaded_sum_raw(t, phases)?.norm_sqr()))
    }

    /// `SNR = κ |c(t, φ̃)|²`.
    pub fn snr(&self, t: Position3, phases: &PhaseConfig) -> Result<Snr> {
        self.snr_raw(t, phases.values())
    }

    /// `Σ_n 1 / (d_n^T d_n^R)`.
    pub fn coherent_amplitude(&self, t: Position3) -> Result<f64> {
        let d = self.tx_distances(t)?;
        Ok(d.iter()
            .zip(&self.rx_distances)
            .map(|(dt, dr)| 1.0 / (dt * dr))
            .sum())
    }

    /// Continuous-phase bound `κ (Σ_n 1 / (d_n^T d_n^R))²`.
    pub fn snr_upper_bound(&self, t: Position3) -> Result<Snr> {
        let a = self.coherent_amplitude(t)?;
        Ok(Snr(self.kappa * a * a))
    }
}

pub fn cascaded_sum(
    t: Position3,
    phases: &PhaseConfig,
    geometry: &TrisGeometry,
    params: &SystemParams,
) -> Result<Complex64> {
    Scene::new(geometry.clone(), *params)?.cascaded_sum(t, phases)
}

pub fn snr(
    t: Position3,
    phases: &PhaseConfig,
    geometry: &TrisGeometry,
    params: &SystemParams,
) -> Result<Snr> {
    Scene::new(geometry.clone(), *params)?.snr(t, phases)
}

pub fn snr_upper_bound(t: Position3, geometry: &TrisGeometry, params: &SystemParams) -> Result<Snr> {
    Scene::new(geometry.clone(), *params)?.snr_upper_bound(t)
}
