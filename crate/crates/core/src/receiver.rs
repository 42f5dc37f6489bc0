//! Electrolyte noise at the sensor.
//!
//! The noise term is the deterministic thermal-resistive expression
//! `4·k_B·T·R_b`, added to the propagated signal; it is not sampled.

use std::f64::consts::PI;

use crate::config::SimParams;

/// Conductivity of each sample; the factor 10³ takes mol/L to mol/m³.
pub fn conductivity(y: &[f64], gamma_s: f64) -> Vec<f64> {
    y.iter().map(|v| gamma_s * v.max(0.0) * 1e3).collect()
}

pub fn electrolyte_noise(y: &[f64], p: &SimParams) -> Vec<f64> {
    let geometry = (PI / p.a_e).sqrt();
    let kt4 = 4.0 * p.k_boltzmann * p.t_abs;
    conductivity(y, p.gamma_s)
        .into_iter()
        .map(|g| kt4 * geometry / g.max(p.gamma_floor))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSignal {
    pub y_g: Vec<f64>,
    pub n_g: Vec<f64>,
    pub y_f: Vec<f64>,
}

pub fn received(y_g: Vec<f64>, p: &SimParams) -> ReceivedSignal {
    let n_g = electrolyte_noise(&y_g, p);
    let y_f = y_g.iter().zip(&n_g).map(|(s, n)| s + n).collect();
    ReceivedSignal { y_g, n_g, y_f }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn conductivity_values() {
        assert_eq!(conductivity(&[0.0], 34.892), vec![0.0]);
        assert_relative_eq!(conductivity(&[1e-3], 34.892)[0], 34.892, max_relative = 1e-15);
        let g = conductivity(&[2e-6, 4e-6], 34.892);
        assert_relative_eq!(g[1], 2.0 * g[0], max_relative = 1e-15);
    }

    #[test]
    fn noise_at_floor() {
        // frozen: 4 kT sqrt(pi / a_e) / (34.892 * 1e-9 * 1e3), evaluated independently
        let p = SimParams::default();
        let n = electrolyte_noise(&[0.0, 1e-12], &p);
        assert_relative_eq!(n[0], 8.420_360_673_336_865e-11, max_relative = 1e-12);
        assert_eq!(n[0], n[1]);
        let n = electrolyte_noise(&[1e-8], &p);
        assert_relative_eq!(n[0], 8.420_360_673_336_865e-12, max_relative = 1e-12);
    }

    #[test]
    fn noise_falls_with_signal() {
        let p = SimParams::default();
        let n = electrolyte_noise(&[1e-9, 1e-8, 1e-7], &p);
        assert!(n[0] > n[1] && n[1] > n[2] && n[2] > 0.0);
    }

    #[test]
    fn zero_temperature_is_noiseless() {
        let p = SimParams { t_abs: 0.0, ..SimParams::default() };
        let r = received(vec![0.0, 1e-8, 3e-8], &p);
        assert!(r.n_g.iter().all(|v| *v == 0.0));
        assert_eq!(r.y_f, r.y_g);
    }

    #[test]
    fn sum_identity() {
        let p = SimParams::default();
        let r = received(vec![0.0, 2e-8, 5e-9], &p);
        for j in 0..3 {
            assert_relative_eq!(r.y_f[j] - r.y_g[j], r.n_g[j], epsilon = f64::EPSILON * r.y_f[j]);
        }
    }
}
