use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Scenario};
use super::rng::{stream_id, StreamRng};
use crate::baseline::{mrt_snr, BaselineConfig};
use crate::channel::{to_db, Scene};
use crate::error::{Error, Result};
use crate::geometry::{build_tris_grid, rayleigh_distance, MaRegion, Position3};
use crate::optimizer::{ao_optimize, AoTrace};
use crate::phase::{aligned_phases, PhaseResolution};

/// Antenna counts of the conventional-array columns.
pub const BASELINE_COUNTS: [usize; 2] = [1, 10];

/// One CSV row: a single optimizer run and its reference values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub scenario: Scenario,
    pub n: usize,
    pub resolution: PhaseResolution,
    pub power_dbm: f64,
    pub d_t: f64,
    pub seed: u64,
    /// Start index. Start 0 uses the nominal region; later starts shift the
    /// region so its center is a point drawn uniformly over the nominal one.
    /// The fixed antenna sits at that center and AO starts from it.
    pub start: usize,
    pub start_position: Position3,
    pub snr_db_proposed_ma: f64,
    pub snr_db_fixed: f64,
    pub snr_db_upper_bound: f64,
    pub snr_db_baseline_m1: f64,
    pub snr_db_baseline_m10: f64,
    pub iterations: usize,
    pub near_field: bool,
    pub wall_ms: Option<f64>,
}

impl ResultRow {
    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.scenario
            .cmp(&other.scenario)
            .then(self.n.cmp(&other.n))
            .then(self.resolution.cmp(&other.resolution))
            .then(self.power_dbm.total_cmp(&other.power_dbm))
            .then(self.d_t.total_cmp(&other.d_t))
            .then(self.start.cmp(&other.start))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Job {
    side: usize,
    side_index: usize,
    resolution: PhaseResolution,
    power_dbm: f64,
    d_t: f64,
    user_distance: f64,
    start: usize,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub scenario: Scenario,
    pub rows: Vec<ResultRow>,
    pub traces: Vec<AoTrace>,
    /// Rayleigh distance per TRIS element count, in config order.
    pub rayleigh_distances: Vec<(usize, f64)>,
}

fn with_continuous(bits: &[u8], include: bool) -> Vec<PhaseResolution> {
    let mut r: Vec<_> = bits.iter().map(|&b| PhaseResolution::Bits(b)).collect();
    if include {
        r.push(PhaseResolution::Continuous);
    }
    r
}

fn jobs(config: &ExperimentConfig, scenario: Scenario) -> Vec<Job> {
    let sides = config.side_counts.iter().copied().enumerate();
    let mut out = Vec::new();
    let mut push = |side_index, side, resolution, power_dbm, d_t, user_distance, start| {
        out.push(Job {
            side,
            side_index,
            resolution,
            power_dbm,
            d_t,
            user_distance,
            start,
        })
    };
    match scenario {
        Scenario::SnrVsBits => {
            for (si, side) in sides {
                for res in config.resolutions() {
                    for k in 0..config.starts {
                        push(si, side, res, config.power_dbm, config.d_t_m, config.user_distance_m, k);
                    }
                }
            }
        }
        Scenario::SnrVsPower => {
            let res = with_continuous(&config.power_bits, config.include_continuous);
            for &p in &config.power_list_dbm {
                for (si, side) in sides.clone() {
                    for &r in &res {
                        push(si, side, r, p, config.d_t_m, config.user_distance_m, 0);
                    }
                }
            }
        }
        Scenario::NfFfSweep => {
            let res = with_continuous(&config.sweep_bits, config.include_continuous);
            for &d in &config.d_t_sweep_m {
                for (si, side) in sides.clone() {
                    for &r in &res {
                        push(si, side, r, config.power_dbm, d, config.d_total_m - d, 0);
                    }
                }
            }
        }
        Scenario::SingleRun => {
            let res = config.resolutions()[0];
            push(0, config.side_counts[0], res, config.power_dbm, config.d_t_m, config.user_distance_m, 0);
        }
    }
    out
}

fn run_job(config: &ExperimentConfig, scenario: Scenario, job: &Job) -> Result<(ResultRow, AoTrace)> {
    let clock = Instant::now();
    let geometry = build_tris_grid(job.side, config.spacing())?;
    let rayleigh = rayleigh_distance(&geometry, config.wavelength());
    let params = config.system_params(job.power_dbm, job.user_distance);
    let scene = Scene::new(geometry, params)?;
    let nominal = config.region(job.d_t)?;

    let t0 = if job.start == 0 {
        nominal.center
    } else {
        // keyed by grid and start only, so every resolution sees the same offsets
        let mut rng = StreamRng::new(
            config.seed,
            stream_id([
                job.side_index as u16,
                0,
                (job.start >> 16) as u16,
                job.start as u16,
            ]),
        );
        let (u, v) = (rng.uniform(), rng.uniform());
        nominal.point_at(u, v)
    };
    let region = MaRegion::new(t0, nominal.side)?;

    let fixed_phases = aligned_phases(t0, &scene, job.resolution)?;
    let fixed = scene.snr(t0, &fixed_phases)?;
    let settings = config.optimizer_settings();
    let result = ao_optimize(t0, &scene, &region, job.resolution, &settings)?;
    let ub = scene.snr_upper_bound(result.position)?;

    let baseline_db = |m: usize| -> Result<f64> {
        let mut cfg = BaselineConfig::ula(m, nominal.center, params.wavelength);
        cfg.spacing = config.baseline_spacing_wavelengths * params.wavelength;
        Ok(mrt_snr(&cfg, &params)?.db())
    };

    let row = ResultRow {
        scenario,
        n: scene.len(),
        resolution: job.resolution,
        power_dbm: job.power_dbm,
        d_t: job.d_t,
        seed: config.seed,
        start: job.start,
        start_position: t0,
        snr_db_proposed_ma: result.snr.db(),
        snr_db_fixed: fixed.db(),
        snr_db_upper_bound: to_db(ub.linear()),
        snr_db_baseline_m1: baseline_db(BASELINE_COUNTS[0])?,
        snr_db_baseline_m10: baseline_db(BASELINE_COUNTS[1])?,
        iterations: result.trace.iterations.len(),
        near_field: job.d_t < rayleigh,
        wall_ms: config
            .record_timing
            .then(|| clock.elapsed().as_secs_f64() * 1e3),
    };
    Ok((row, result.trace))
}

/// Runs every job of `scenario` on a pool of `config.workers` threads and
/// returns rows in a fixed order independent of completion order.
pub fn run_scenario(config: &ExperimentConfig, scenario: Scenario) -> Result<ScenarioOutput> {
    config.validate()?;
    let jobs = jobs(config, scenario);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let mut results: Vec<(ResultRow, AoTrace)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| run_job(config, scenario, job))
            .collect::<Result<Vec<_>>>()
    })?;
    results.sort_by(|a, b| a.0.sort_key_cmp(&b.0));
    let (rows, traces) = results.into_iter().unzip();

    let rayleigh_distances = config
        .side_counts
        .iter()
        .map(|&s| {
            let g = build_tris_grid(s, config.spacing())?;
            Ok((g.len(), rayleigh_distance(&g, config.wavelength())))
        })
        .collect::<Result<_>>()?;

    Ok(ScenarioOutput {
        scenario,
        rows,
        traces,
        rayleigh_distances,
    })
}

pub fn run_snr_vs_bits(config: &ExperimentConfig) -> Result<ScenarioOutput> {
    run_scenario(config, Scenario::SnrVsBits)
}

pub fn run_snr_vs_power(config: &ExperimentConfig) -> Result<ScenarioOutput> {
    run_scenario(config, Scenario::SnrVsPower)
}

pub fn run_nf_ff_sweep(config: &ExperimentConfig) -> Result<ScenarioOutput> {
    run_scenario(config, Scenario::NfFfSweep)
}

pub fn run_single(config: &ExperimentConfig) -> Result<ScenarioOutput> {
    run_scenario(config, Scenario::SingleRun)
}
