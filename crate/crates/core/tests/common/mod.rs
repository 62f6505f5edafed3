//! Test-only oracles, written directly from the model formulas and kept
//! independent of the library's evaluation path.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use matris::experiments::StreamRng;
use matris::geometry::{build_tris_grid, MaRegion, Position3, TrisGeometry};
use matris::{PhaseConfig, Scene, SystemParams};
use num_complex::Complex64;

/// 20 GHz reference setup: λ/2 spacing, unit gains, user at 50 m on boresight.
pub fn reference_scene(side: usize) -> Scene {
    let params = SystemParams::reference();
    Scene::new(build_tris_grid(side, params.wavelength / 2.0).unwrap(), params).unwrap()
}

pub fn scene_from(geometry: TrisGeometry) -> Scene {
    Scene::new(geometry, SystemParams::reference()).unwrap()
}

pub fn reference_region() -> MaRegion {
    MaRegion::new(Position3::new(0.0, 0.0, -0.5), 0.15).unwrap()
}

pub fn random_point(rng: &mut StreamRng, region: &MaRegion) -> Position3 {
    let (u, v) = (rng.uniform(), rng.uniform());
    region.point_at(u, v)
}

fn dist(a: Position3, b: Position3) -> f64 {
    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// `κ` by direct formula.
pub fn kappa_oracle(p: &SystemParams) -> f64 {
    let l = p.wavelength;
    let g = p.transmission_loss;
    l * l * g * g * p.transmit_power * p.tx_gain * p.rx_gain * p.tx_pattern * p.rx_pattern
        / (16.0 * PI * PI * p.noise_variance)
}

/// Per-element complex path weights `e^{−j k (d^T + d^R)} / (d^T d^R)`.
pub fn path_weights(scene: &Scene, t: Position3) -> Vec<Complex64> {
    let p = scene.params();
    let k = TAU / p.wavelength;
    scene
        .elements()
        .iter()
        .map(|e| {
            let dt = dist(t, *e);
            let dr = dist(p.user_position, *e);
            let phase = (k * dt).rem_euclid(TAU) + (k * dr).rem_euclid(TAU);
            Complex64::from_polar(1.0 / (dt * dr), -phase)
        })
        .collect()
}

/// SNR for arbitrary phases computed from raw distances.
pub fn snr_oracle(scene: &Scene, t: Position3, phases: &[f64]) -> f64 {
    let w = path_weights(scene, t);
    let c: Complex64 = w
        .iter()
        .zip(phases)
        .map(|(w, &phi)| w * Complex64::from_polar(1.0, phi))
        .sum();
    kappa_oracle(scene.params()) * c.norm_sqr()
}

pub fn upper_bound_oracle(scene: &Scene, t: Position3) -> f64 {
    let a: f64 = path_weights(scene, t).iter().map(|w| w.norm()).sum();
    kappa_oracle(scene.params()) * a * a
}

/// Central finite-difference gradient of the SNR with fixed phases.
pub fn fd_gradient(scene: &Scene, t: Position3, phases: &PhaseConfig, h: f64) -> [f64; 3] {
    let f = |p: Position3| snr_oracle(scene, p, phases.values());
    let axes = [
        Position3::new(h, 0.0, 0.0),
        Position3::new(0.0, h, 0.0),
        Position3::new(0.0, 0.0, h),
    ];
    axes.map(|d| (f(t + d) - f(t - d)) / (2.0 * h))
}

pub fn rel_err3(a: [f64; 3], b: [f64; 3]) -> f64 {
    let diff = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    let scale = (b[0].powi(2) + b[1].powi(2) + b[2].powi(2)).sqrt();
    diff / scale
}

/// Best SNR over every `2^(bN)` phase vector at fixed `t`, by enumeration.
pub fn exhaustive_best_snr(scene: &Scene, t: Position3, bits: u8) -> f64 {
    let w = path_weights(scene, t);
    let levels = 1usize << bits;
    let rot: Vec<Complex64> = (0..levels)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / levels as f64))
        .collect();
    let n = w.len();
    let total = levels.pow(n as u32);
    let mut best = 0.0f64;
    for code in 0..total {
        let mut c = Complex64::new(0.0, 0.0);
        let mut rest = code;
        for wn in &w {
            c += wn * rot[rest % levels];
            rest /= levels;
        }
        best = best.max(c.norm_sqr());
    }
    kappa_oracle(scene.params()) * best
}

/// Maximum of the continuous-phase bound over an `n × n` grid on the region.
pub fn grid_max_upper_bound(scene: &Scene, region: &MaRegion, n: usize) -> (f64, Position3) {
    region
        .grid(n)
        .map(|p| (upper_bound_oracle(scene, p), p))
        .fold((f64::NEG_INFINITY, region.center), |a, b| if b.0 > a.0 { b } else { a })
}

pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}
