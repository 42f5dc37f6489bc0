//! 1-D free-diffusion channel between the gate population and the sensor.

use std::f64::consts::PI;

use crate::config::SimParams;
use crate::error::{Error, Result};
use crate::gate::GateResponse;

/// Fundamental solution of the 1-D diffusion equation, 1/m.
pub fn green(z: f64, t: f64, d: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::InvalidArgument(format!("diffusion time must be positive, got {t}")));
    }
    Ok(green_unchecked(z, t, d))
}

pub(crate) fn green_unchecked(z: f64, t: f64, d: f64) -> f64 {
    (-z * z / (4.0 * d * t)).exp() / (4.0 * PI * d * t).sqrt()
}

/// Channel impulse response sampled on the simulation grid; sample `k` is
/// the Green's function at elapsed time `k·dt + tau_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelKernel {
    pub values: Vec<f64>,
    pub z2: f64,
    pub d: f64,
    pub tau_g: f64,
}

impl ChannelKernel {
    pub fn new(p: &SimParams, len: usize) -> Self {
        let dt = p.dt();
        let values = (0..len).map(|k| green_unchecked(p.z2, k as f64 * dt + p.tau_g, p.d)).collect();
        Self { values, z2: p.z2, d: p.d, tau_g: p.tau_g }
    }
}

/// Causal discrete convolution of a series with the channel kernel, scaled
/// by `dt`. Summation runs in a fixed order so results are bit-reproducible.
pub fn convolve(g: &[f64], kernel: &ChannelKernel, dt: f64) -> Vec<f64> {
    let h = &kernel.values;
    if h.is_empty() {
        return vec![0.0; g.len()];
    }
    (0..g.len())
        .map(|j| {
            // lags beyond the kernel contribute nothing
            let first = j.saturating_sub(h.len() - 1);
            let mut acc = 0.0;
            for k in first..=j {
                acc += g[k] * h[j - k];
            }
            dt * acc
        })
        .collect()
}

/// Propagates a gate response through the channel.
pub fn propagate(g: &GateResponse, p: &SimParams) -> Vec<f64> {
    let kernel = ChannelKernel::new(p, g.samples.len());
    convolve(&g.samples, &kernel, p.dt())
}

/// Shifts a series right by `samples`, zero-filling the head and keeping the
/// length.
pub fn delay(series: &[f64], samples: usize) -> Vec<f64> {
    let n = series.len();
    let mut out = vec![0.0; n];
    if samples < n {
        out[samples..].copy_from_slice(&series[..n - samples]);
    }
    out
}

/// Signal arriving at the sensor, mol/L: the propagated gate output, held
/// back by the transport delay `tau_g` and brought to concentration units by
/// `output_scale`.
pub fn sensor_signal(g: &GateResponse, p: &SimParams) -> Vec<f64> {
    let y = propagate(g, p);
    delay(&y, p.samples_for(p.tau_g)).into_iter().map(|v| (p.output_scale * v).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const D: f64 = 1.37e-7;

    #[test]
    fn green_at_origin() {
        // 1 / sqrt(4 pi 1.37e-7 100), evaluated independently
        assert_relative_eq!(green(0.0, 100.0, D).unwrap(), 76.214_005_047_613_39, max_relative = 1e-12);
        assert_relative_eq!(green(50e-6, 100.0, D).unwrap(), 76.210_528_210_632_74, max_relative = 1e-12);
    }

    #[test]
    fn green_rejects_non_positive_time() {
        assert!(green(0.0, 0.0, D).is_err());
        assert!(green(0.0, -1.0, D).is_err());
        assert!(green(0.0, f64::NAN, D).is_err());
    }

    #[test]
    fn green_is_even() {
        for z in [1e-6, 3e-5, 1e-3] {
            assert_eq!(green(z, 250.0, D).unwrap(), green(-z, 250.0, D).unwrap());
        }
    }

    #[test]
    fn impulse_reproduces_kernel() {
        let p = SimParams::default();
        let mut g = vec![0.0; 40];
        g[0] = 1.0;
        let kernel = ChannelKernel::new(&p, 40);
        let y = convolve(&g, &kernel, p.dt());
        for (a, b) in y.iter().zip(&kernel.values) {
            assert_eq!(*a, p.dt() * b);
        }
    }

    #[test]
    fn short_kernel_truncates() {
        let kernel = ChannelKernel { values: vec![1.0, 0.5], z2: 0.0, d: D, tau_g: 1.0 };
        let y = convolve(&[1.0, 1.0, 1.0, 1.0], &kernel, 1.0);
        assert_eq!(y, vec![1.0, 1.5, 1.5, 1.5]);
    }

    #[test]
    fn delay_shifts_and_truncates() {
        assert_eq!(delay(&[1.0, 2.0, 3.0], 1), vec![0.0, 1.0, 2.0]);
        assert_eq!(delay(&[1.0, 2.0, 3.0], 0), vec![1.0, 2.0, 3.0]);
        assert_eq!(delay(&[1.0, 2.0, 3.0], 5), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn kernel_peak_falls_with_tau_g() {
        let short = ChannelKernel::new(&SimParams::default(), 1);
        let long = ChannelKernel::new(&SimParams { tau_g: 600.0, ..SimParams::default() }, 1);
        assert!(long.values[0] < short.values[0]);
        assert!(short.values.iter().chain(&long.values).all(|v| *v >= 0.0 && v.is_finite()));
    }
}
