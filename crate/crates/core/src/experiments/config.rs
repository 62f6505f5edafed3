//! Flat key-value experiment configuration (TOML syntax).
//!
//! Every key is optional and falls back to the reference setup: 20 GHz,
//! λ/2 TRIS spacing, −70 dBm noise, boresight user at 50 m, MA region of
//! side 0.15 m centered on boresight 0.5 m behind the TRIS.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::channel::{dbm_to_watts, SystemParams, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::geometry::{MaRegion, Position3};
use crate::optimizer::OptimizerSettings;
use crate::phase::PhaseResolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    SnrVsBits,
    SnrVsPower,
    NfFfSweep,
    SingleRun,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::SnrVsBits,
        Scenario::SnrVsPower,
        Scenario::NfFfSweep,
        Scenario::SingleRun,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::SnrVsBits => "snr_vs_bits",
            Scenario::SnrVsPower => "snr_vs_power",
            Scenario::NfFfSweep => "nf_ff_sweep",
            Scenario::SingleRun => "single_run",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| {
                Error::config(
                    "scenario",
                    format!("unknown scenario `{s}` (expected snr_vs_bits, snr_vs_power, nf_ff_sweep or single_run)"),
                )
            })
    }
}

/// Resolved experiment configuration, in the human units of the config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub output: PathBuf,
    pub workers: usize,
    pub record_timing: bool,

    pub frequency_ghz: f64,
    pub power_dbm: f64,
    pub noise_dbm: f64,
    pub user_distance_m: f64,
    pub tx_gain: f64,
    pub tx_pattern: f64,
    pub rx_gain: f64,
    pub rx_pattern: f64,
    pub transmission_loss: f64,

    pub side_counts: Vec<usize>,
    pub spacing_wavelengths: f64,

    pub region_side_m: f64,
    pub region_center_x_m: f64,
    pub region_center_y_m: f64,
    pub d_t_m: f64,

    pub bits: Vec<u8>,
    pub include_continuous: bool,
    pub starts: usize,

    pub power_list_dbm: Vec<f64>,
    pub power_bits: Vec<u8>,

    pub d_t_sweep_m: Vec<f64>,
    pub d_total_m: f64,
    pub sweep_bits: Vec<u8>,

    pub baseline_spacing_wavelengths: f64,

    pub mu0_wavelengths: f64,
    pub mu_min_wavelengths: f64,
    pub epsilon: f64,
    pub i_max: usize,
    pub q_max: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::SingleRun,
            seed: 0,
            output: PathBuf::from("out"),
            workers: 1,
            record_timing: false,
            frequency_ghz: 20.0,
            power_dbm: 13.6,
            noise_dbm: -70.0,
            user_distance_m: 50.0,
            tx_gain: 1.0,
            tx_pattern: 1.0,
            rx_gain: 1.0,
            rx_pattern: 1.0,
            transmission_loss: 1.0,
            side_counts: vec![10, 18],
            spacing_wavelengths: 0.5,
            region_side_m: 0.15,
            region_center_x_m: 0.0,
            region_center_y_m: 0.0,
            d_t_m: 0.5,
            bits: vec![1, 2, 3, 4],
            include_continuous: true,
            starts: 10,
            power_list_dbm: (0..=15).map(|k| 2.0 * k as f64).collect(),
            power_bits: vec![2],
            d_t_sweep_m: vec![0.5, 1.5, 5.0, 15.0, 25.0],
            d_total_m: 50.0,
            sweep_bits: vec![2],
            baseline_spacing_wavelengths: 0.5,
            mu0_wavelengths: 0.25,
            mu_min_wavelengths: 1e-6,
            epsilon: 1e-6,
            i_max: 50,
            q_max: 200,
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "seed",
    "output",
    "workers",
    "record_timing",
    "frequency_ghz",
    "power_dbm",
    "noise_dbm",
    "user_distance_m",
    "tx_gain",
    "tx_pattern",
    "rx_gain",
    "rx_pattern",
    "transmission_loss",
    "side_counts",
    "spacing_wavelengths",
    "region_side_m",
    "region_center_x_m",
    "region_center_y_m",
    "d_t_m",
    "bits",
    "include_continuous",
    "starts",
    "power_list_dbm",
    "power_bits",
    "d_t_sweep_m",
    "d_total_m",
    "sweep_bits",
    "baseline_spacing_wavelengths",
    "mu0_wavelengths",
    "mu_min_wavelengths",
    "epsilon",
    "i_max",
    "q_max",
];

fn take<T: DeserializeOwned>(table: &toml::Table, key: &str, slot: &mut T) -> Result<()> {
    if let Some(value) = table.get(key) {
        *slot = value
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(key, e.message().to_string()))?;
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<document>", e.message().to_string()))?;
        if let Some(key) = table.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(Error::config(key.as_str(), "unknown key"));
        }
        if let Some((key, _)) = table.iter().find(|(_, v)| v.is_table()) {
            return Err(Error::config(key.as_str(), "nested tables are not supported"));
        }

        let mut c = ExperimentConfig::default();
        if let Some(v) = table.get("scenario") {
            let s = v
                .as_str()
                .ok_or_else(|| Error::config("scenario", "expected a string"))?;
            c.scenario = s.parse()?;
        }
        if let Some(v) = table.get("seed") {
            let s = v
                .as_integer()
                .ok_or_else(|| Error::config("seed", "expected an integer"))?;
            c.seed = u64::try_from(s)
                .map_err(|_| Error::config("seed", "must be a non-negative 64-bit integer"))?;
        }
        take(&table, "output", &mut c.output)?;
        take(&table, "workers", &mut c.workers)?;
        take(&table, "record_timing", &mut c.record_timing)?;
        take(&table, "frequency_ghz", &mut c.frequency_ghz)?;
        take(&table, "power_dbm", &mut c.power_dbm)?;
        take(&table, "noise_dbm", &mut c.noise_dbm)?;
        take(&table, "user_distance_m", &mut c.user_distance_m)?;
        take(&table, "tx_gain", &mut c.tx_gain)?;
        take(&table, "tx_pattern", &mut c.tx_pattern)?;
        take(&table, "rx_gain", &mut c.rx_gain)?;
        take(&table, "rx_pattern", &mut c.rx_pattern)?;
        take(&table, "transmission_loss", &mut c.transmission_loss)?;
        take(&table, "side_counts", &mut c.side_counts)?;
        take(&table, "spacing_wavelengths", &mut c.spacing_wavelengths)?;
        take(&table, "region_side_m", &mut c.region_side_m)?;
        take(&table, "region_center_x_m", &mut c.region_center_x_m)?;
        take(&table, "region_center_y_m", &mut c.region_center_y_m)?;
        take(&table, "d_t_m", &mut c.d_t_m)?;
        take(&table, "bits", &mut c.bits)?;
        take(&table, "include_continuous", &mut c.include_continuous)?;
        take(&table, "starts", &mut c.starts)?;
        take(&table, "power_list_dbm", &mut c.power_list_dbm)?;
        take(&table, "power_bits", &mut c.power_bits)?;
        take(&table, "d_t_sweep_m", &mut c.d_t_sweep_m)?;
        take(&table, "d_total_m", &mut c.d_total_m)?;
        take(&table, "sweep_bits", &mut c.sweep_bits)?;
        take(&table, "baseline_spacing_wavelengths", &mut c.baseline_spacing_wavelengths)?;
        take(&table, "mu0_wavelengths", &mut c.mu0_wavelengths)?;
        take(&table, "mu_min_wavelengths", &mut c.mu_min_wavelengths)?;
        take(&table, "epsilon", &mut c.epsilon)?;
        take(&table, "i_max", &mut c.i_max)?;
        take(&table, "q_max", &mut c.q_max)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(key: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive and finite, got {v}")))
            }
        }
        fn finite(key: &str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be finite, got {v}")))
            }
        }
        fn non_empty<T>(key: &str, v: &[T]) -> Result<()> {
            if v.is_empty() {
                Err(Error::config(key, "list must not be empty"))
            } else {
                Ok(())
            }
        }
        fn bits_ok(key: &str, v: &[u8]) -> Result<()> {
            non_empty(key, v)?;
            for &b in v {
                PhaseResolution::bits(b).map_err(|e| Error::config(key, e.to_string()))?;
            }
            Ok(())
        }

        positive("frequency_ghz", self.frequency_ghz)?;
        finite("power_dbm", self.power_dbm)?;
        finite("noise_dbm", self.noise_dbm)?;
        positive("user_distance_m", self.user_distance_m)?;
        positive("tx_gain", self.tx_gain)?;
        positive("tx_pattern", self.tx_pattern)?;
        positive("rx_gain", self.rx_gain)?;
        positive("rx_pattern", self.rx_pattern)?;
        if !(0.0..=1.0).contains(&self.transmission_loss) {
            return Err(Error::config("transmission_loss", "must lie in [0, 1]"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers", "must be at least 1"));
        }
        non_empty("side_counts", &self.side_counts)?;
        if self.side_counts.contains(&0) {
            return Err(Error::config("side_counts", "side counts must be at least 1"));
        }
        positive("spacing_wavelengths", self.spacing_wavelengths)?;
        positive("region_side_m", self.region_side_m)?;
        finite("region_center_x_m", self.region_center_x_m)?;
        finite("region_center_y_m", self.region_center_y_m)?;
        positive("d_t_m", self.d_t_m)?;
        bits_ok("bits", &self.bits)?;
        if self.starts == 0 {
            return Err(Error::config("starts", "must be at least 1"));
        }
        non_empty("power_list_dbm", &self.power_list_dbm)?;
        for &p in &self.power_list_dbm {
            finite("power_list_dbm", p)?;
        }
        bits_ok("power_bits", &self.power_bits)?;
        positive("d_total_m", self.d_total_m)?;
        non_empty("d_t_sweep_m", &self.d_t_sweep_m)?;
        for &d in &self.d_t_sweep_m {
            if !(d > 0.0 && d < self.d_total_m) {
                return Err(Error::config(
                    "d_t_sweep_m",
                    format!("{d} is outside (0, {})", self.d_total_m),
                ));
            }
        }
        bits_ok("sweep_bits", &self.sweep_bits)?;
        positive("baseline_spacing_wavelengths", self.baseline_spacing_wavelengths)?;
        positive("mu0_wavelengths", self.mu0_wavelengths)?;
        positive("mu_min_wavelengths", self.mu_min_wavelengths)?;
        if self.mu_min_wavelengths >= self.mu0_wavelengths {
            return Err(Error::config("mu_min_wavelengths", "must be smaller than mu0_wavelengths"));
        }
        positive("epsilon", self.epsilon)?;
        if self.i_max == 0 {
            return Err(Error::config("i_max", "must be at least 1"));
        }
        if self.q_max == 0 {
            return Err(Error::config("q_max", "must be at least 1"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / (self.frequency_ghz * 1e9)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing_wavelengths * self.wavelength()
    }

    /// System parameters with powers converted to watts and the user on
    /// boresight at `user_distance`.
    pub fn system_params(&self, power_dbm: f64, user_distance: f64) -> SystemParams {
        SystemParams {
            wavelength: self.wavelength(),
            tx_gain: self.tx_gain,
            tx_pattern: self.tx_pattern,
            rx_gain: self.rx_gain,
            rx_pattern: self.rx_pattern,
            transmission_loss: self.transmission_loss,
            transmit_power: dbm_to_watts(power_dbm),
            noise_variance: dbm_to_watts(self.noise_dbm),
            user_position: Position3::new(0.0, 0.0, user_distance),
        }
    }

    /// MA region `d_t` behind the TRIS.
    pub fn region(&self, d_t: f64) -> Result<MaRegion> {
        MaRegion::new(
            Position3::new(self.region_center_x_m, self.region_center_y_m, -d_t),
            self.region_side_m,
        )
    }

    pub fn optimizer_settings(&self) -> OptimizerSettings {
        let lam = self.wavelength();
        OptimizerSettings {
            mu0: self.mu0_wavelengths * lam,
            mu_min: self.mu_min_wavelengths * lam,
            epsilon: self.epsilon,
            i_max: self.i_max,
            q_max: self.q_max,
        }
    }

    /// `bits` followed by the continuous case when enabled.
    pub fn resolutions(&self) -> Vec<PhaseResolution> {
        let mut r: Vec<_> = self.bits.iter().map(|&b| PhaseResolution::Bits(b)).collect();
        if self.include_continuous {
            r.push(PhaseResolution::Continuous);
        }
        r
    }
}
