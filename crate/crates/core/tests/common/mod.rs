//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's field code: the oracles are written
//! from the textbook formulas with plain complex sums.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dra_synth::pattern::{ActivationMask, ArrayConfig};

/// Brute-force complex array factor: every active subarray contributes
/// `exp(j2π[x(u−u0) + y(v−v0)])`, positions from the array geometry.
pub fn dense_array_factor(config: &ArrayConfig, mask: &ActivationMask, u: f64, v: f64, u0: f64, v0: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let cx = (config.subarray_count_x as f64 - 1.0) / 2.0;
    let cy = (config.subarray_count_y as f64 - 1.0) / 2.0;
    for i in 0..config.subarray_count_x {
        for j in 0..config.subarray_count_y {
            if mask.get(i, j) {
                let x = (i as f64 - cx) * config.subarray_pitch_wavelengths;
                let y = (j as f64 - cy) * config.subarray_pitch_wavelengths;
                let phase = 2.0 * PI * (x * (u - u0) + y * (v - v0));
                acc += Complex64::from_polar(1.0, phase);
            }
        }
    }
    acc
}

/// Brute-force total field: every radiator of every active subarray summed
/// individually, times the `cos^q θ` element pattern.
pub fn dense_total_field(config: &ArrayConfig, mask: &ActivationMask, u: f64, v: f64, w: f64, u0: f64, v0: f64) -> f64 {
    if w < 0.0 {
        return 0.0;
    }
    let ex = config.elements_per_subarray_x;
    let ey = config.elements_per_subarray_y;
    let d = config.element_pitch_wavelengths;
    let mut sub = Complex64::new(0.0, 0.0);
    for a in 0..ex {
        for b in 0..ey {
            let x = (a as f64 - (ex as f64 - 1.0) / 2.0) * d;
            let y = (b as f64 - (ey as f64 - 1.0) / 2.0) * d;
            sub += Complex64::from_polar(1.0, 2.0 * PI * (x * u + y * v));
        }
    }
    let af = dense_array_factor(config, mask, u, v, u0, v0);
    w.powf(config.element_pattern_exponent) * sub.norm() * af.norm()
}

pub fn random_mask(rows: usize, cols: usize, density: f64, rng: &mut ChaCha8Rng) -> ActivationMask {
    let cells = (0..rows * cols).map(|_| rng.gen_bool(density)).collect();
    ActivationMask::new(rows, cols, cells).unwrap()
}

/// Random quadrant-symmetric mask with at least one active cell.
pub fn random_symmetric_mask(rows: usize, cols: usize, density: f64, rng: &mut ChaCha8Rng) -> ActivationMask {
    let mut m = ActivationMask::filled(rows, cols, false);
    for i in 0..rows / 2 {
        for j in 0..cols / 2 {
            if rng.gen_bool(density) {
                m.set(i, j, true);
                m.set(rows - 1 - i, j, true);
                m.set(i, cols - 1 - j, true);
                m.set(rows - 1 - i, cols - 1 - j, true);
            }
        }
    }
    if m.active_count() == 0 {
        m.set(rows / 2, cols / 2, true);
        m.set(rows / 2 - 1, cols / 2, true);
        m.set(rows / 2, cols / 2 - 1, true);
        m.set(rows / 2 - 1, cols / 2 - 1, true);
    }
    m
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut k = 0;
        while k < idx.len() {
            let mut e = k;
            while e + 1 < idx.len() && v[idx[e + 1]] == v[idx[k]] {
                e += 1;
            }
            let avg = (k + e) as f64 / 2.0 + 1.0;
            for &i in &idx[k..=e] {
                r[i] = avg;
            }
            k = e + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let sy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    cov / (sx * sy)
}
