//! Discrete space-time `X^{s,b}` diagnostic for recorded trajectories.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::dynamics::Trajectory;
use crate::energies::check_uniform;
use crate::spectral::eigenvalue;
use crate::{Error, Result};

/// Periodic Hann window on `len` samples.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|j| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * j as f64 / len as f64).cos()))
        .collect()
}

/// `(Σ_n (2n+2)^s Σ_τ ⟨τ + 2n+2⟩^{2b} |F_n(τ)|² / (MΔ))^{1/2}`, where `F_n`
/// is the Hann-windowed coefficient series of degree `n` transformed with
/// kernel `e^{+iτt}`. A linear solution `c e^{i(2n+2)t}` then concentrates at
/// `τ = −(2n+2)`, where the weight is smallest.
pub fn xsb_discrete(traj: &Trajectory, s: f64, b: f64) -> Result<f64> {
    let len = traj.snapshots.len();
    if len != traj.times.len() {
        return Err(Error::Parameter("trajectory was recorded without snapshots".into()));
    }
    if len < 2 {
        return Err(Error::TooFewSamples { have: len, need: 2 });
    }
    check_uniform(&traj.times)?;
    let delta = traj.times[1] - traj.times[0];
    let window = hann(len);
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(len);
    let n_max = traj.snapshots.iter().map(|u| u.n_max()).max().unwrap_or(0);
    let tau: Vec<f64> = (0..len)
        .map(|q| {
            let k = if q <= len / 2 { q as f64 } else { q as f64 - len as f64 };
            2.0 * std::f64::consts::PI * k / (len as f64 * delta)
        })
        .collect();

    let mut total = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for k1 in 0..=n_max {
        for k2 in 0..=(n_max - k1) {
            for (j, u) in traj.snapshots.iter().enumerate() {
                buf[j] = u.get(k1, k2) * window[j];
            }
            if buf.iter().all(|c| c.norm_sqr() == 0.0) {
                continue;
            }
            fft.process(&mut buf);
            let lambda = eigenvalue(k1 + k2) as f64;
            let mut acc = 0.0;
            for (q, f) in buf.iter().enumerate() {
                let w = 1.0 + (tau[q] + lambda).powi(2);
                acc += w.powf(b) * (f * delta).norm_sqr();
            }
            total += lambda.powf(s) * acc / (len as f64 * delta);
        }
    }
    Ok(total.sqrt())
}
