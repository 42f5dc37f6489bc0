//! Simulation parameters, scenario flags and the flat `key = value` config
//! format.
//!
//! Canonical units: seconds, metres, mol/L for concentrations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every physical and protocol constant of the simulator.
///
/// Serde names match the config-file keys exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    #[serde(rename = "K_A")]
    pub k_a: f64,
    #[serde(rename = "K_B")]
    pub k_b: f64,
    #[serde(rename = "K_C")]
    pub k_c: f64,
    /// Hill coefficient.
    pub n: f64,
    /// Output consumption rate, 1/s.
    pub gamma: f64,
    /// Diffusion coefficient, m²/s.
    #[serde(rename = "D")]
    pub d: f64,
    /// Insertion point to population, m.
    pub z1: f64,
    /// Population to sensor, m.
    pub z2: f64,
    #[serde(rename = "m_A")]
    pub m_a: f64,
    #[serde(rename = "m_B")]
    pub m_b: f64,
    #[serde(rename = "m_C")]
    pub m_c: f64,
    /// Production delay, s.
    pub t_c: f64,
    pub t_total: f64,
    /// Pulse period, s.
    pub t_p: f64,
    pub tau_in: f64,
    pub tau_g: f64,
    #[serde(rename = "Gamma_s")]
    pub gamma_s: f64,
    #[serde(rename = "T_abs")]
    pub t_abs: f64,
    /// Sensor passage area, m².
    pub a_e: f64,
    #[serde(rename = "k_B")]
    pub k_boltzmann: f64,
    #[serde(rename = "sigma_AND")]
    pub sigma_and: f64,
    #[serde(rename = "sigma_ON")]
    pub sigma_on: f64,
    pub samples_per_pulse: usize,
    pub n_pulses: usize,
    pub j_tot: usize,
    pub r_ch: f64,
    pub h_ch1: f64,
    /// Divisor of the blind detector's initial threshold.
    #[serde(rename = "L_p")]
    pub l_p: usize,
    pub seed: u64,

    /// Multiplier taking the transmitter output to the Hill-input scale of
    /// the gate (where K = 10).
    pub hill_scale: f64,
    /// Multiplier taking the propagated gate output to mol/L at the sensor.
    pub output_scale: f64,
    /// Lower bound on the conductivity used by the electrolyte-noise term.
    #[serde(rename = "Gamma_floor")]
    pub gamma_floor: f64,
    /// RK4 steps per sample interval.
    pub rk4_substeps: usize,
    /// Current-vs-pH fit, nA per pH unit and nA.
    pub ph_fit_slope: f64,
    pub ph_fit_intercept: f64,
    /// Current-vs-O₂ fit. Placeholder defaults; replace with measured values.
    pub o2_fit_slope: f64,
    pub o2_fit_intercept: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        let gamma_s = 34.892;
        Self {
            k_a: 10.0,
            k_b: 10.0,
            k_c: 10.0,
            n: 2.0,
            gamma: 0.01,
            d: 1.37e-7,
            z1: 5e-6,
            z2: 50e-6,
            m_a: 1.2e-3,
            m_b: 1.8e-3,
            m_c: 1.2e-3,
            t_c: 720.0,
            t_total: 18000.0,
            t_p: 1800.0,
            tau_in: 100.0,
            tau_g: 100.0,
            gamma_s,
            t_abs: 300.15,
            a_e: 100e-12,
            k_boltzmann: 1.380649e-23,
            sigma_and: 2e-9,
            sigma_on: 1e-9,
            samples_per_pulse: 50,
            n_pulses: 10,
            j_tot: 500,
            r_ch: 5e-6,
            h_ch1: 10e-6,
            l_p: 2,
            seed: 1,
            hill_scale: 100.0,
            output_scale: DEFAULT_OUTPUT_SCALE,
            // conductivity of 1 nmol/L
            gamma_floor: gamma_s * 1e-9 * 1e3,
            rk4_substeps: 16,
            ph_fit_slope: -0.3219,
            ph_fit_intercept: 3.1867,
            o2_fit_slope: -1.0,
            o2_fit_intercept: 0.0,
        }
    }
}

/// Puts the noise-free AND threshold at the default operating point near
/// 2.27e-8 mol/L.
pub const DEFAULT_OUTPUT_SCALE: f64 = 2.37e-13;

impl SimParams {
    /// Sample interval, s.
    pub fn dt(&self) -> f64 {
        self.t_p / self.samples_per_pulse as f64
    }

    /// Whole number of samples closest to `seconds`.
    pub fn samples_for(&self, seconds: f64) -> usize {
        (seconds / self.dt()).round().max(0.0) as usize
    }

    /// Same parameters with a different pulse count; horizon and sample
    /// count follow.
    pub fn with_pulses(&self, n_pulses: usize) -> Self {
        let mut p = self.clone();
        p.n_pulses = n_pulses;
        p.j_tot = p.samples_per_pulse * n_pulses;
        p.t_total = p.t_p * n_pulses as f64;
        p
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("K_A", self.k_a),
            ("K_B", self.k_b),
            ("K_C", self.k_c),
            ("n", self.n),
            ("gamma", self.gamma),
            ("D", self.d),
            ("z1", self.z1),
            ("z2", self.z2),
            ("t_c", self.t_c),
            ("t_total", self.t_total),
            ("t_p", self.t_p),
            ("tau_in", self.tau_in),
            ("tau_g", self.tau_g),
            ("Gamma_s", self.gamma_s),
            ("T_abs", self.t_abs),
            ("a_e", self.a_e),
            ("k_B", self.k_boltzmann),
            ("r_ch", self.r_ch),
            ("h_ch1", self.h_ch1),
            ("hill_scale", self.hill_scale),
            ("output_scale", self.output_scale),
            ("Gamma_floor", self.gamma_floor),
        ];
        for (name, value) in positive {
            if !value.is_finite() {
                return Err(Error::InvalidParam { name, value, reason: "must be finite" });
            }
            if value <= 0.0 {
                return Err(Error::InvalidParam { name, value, reason: "must be positive" });
            }
        }
        // amplitudes and noise levels may be switched off with zero
        let non_negative = [
            ("m_A", self.m_a),
            ("m_B", self.m_b),
            ("m_C", self.m_c),
            ("sigma_AND", self.sigma_and),
            ("sigma_ON", self.sigma_on),
        ];
        for (name, value) in non_negative {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParam { name, value, reason: "must be finite and non-negative" });
            }
        }
        let finite = [
            ("ph_fit_slope", self.ph_fit_slope),
            ("ph_fit_intercept", self.ph_fit_intercept),
            ("o2_fit_slope", self.o2_fit_slope),
            ("o2_fit_intercept", self.o2_fit_intercept),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParam { name, value, reason: "must be finite" });
            }
        }
        let counts = [
            ("samples_per_pulse", self.samples_per_pulse),
            ("n_pulses", self.n_pulses),
            ("L_p", self.l_p),
            ("rk4_substeps", self.rk4_substeps),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(Error::InvalidParam { name, value: 0.0, reason: "must be at least 1" });
            }
        }
        if self.seed > i64::MAX as u64 {
            return Err(Error::InvalidParam {
                name: "seed",
                value: self.seed as f64,
                reason: "must fit in a signed 64-bit integer",
            });
        }
        if self.j_tot != self.samples_per_pulse * self.n_pulses {
            return Err(Error::Inconsistent(format!(
                "j_tot = {} but samples_per_pulse × n_pulses = {}",
                self.j_tot,
                self.samples_per_pulse * self.n_pulses
            )));
        }
        let horizon = self.t_p * self.n_pulses as f64;
        if (self.t_total - horizon).abs() > 1e-9 * horizon {
            return Err(Error::Inconsistent(format!(
                "t_total = {} but t_p × n_pulses = {}",
                self.t_total, horizon
            )));
        }
        Ok(())
    }

    /// Serialises to the config format; `load_params` reads it back exactly.
    pub fn to_config_text(&self) -> String {
        let table = toml::Table::try_from(self).expect("parameters serialise to a flat table");
        let mut out = String::new();
        for (key, value) in &table {
            // shortest round-trip form, exponent notation for small magnitudes
            let text = match value {
                toml::Value::Float(v) => format!("{v:?}"),
                other => other.to_string(),
            };
            out.push_str(&format!("{key} = {text}\n"));
        }
        out
    }
}

/// Parses config text, fills absent keys with defaults and validates.
///
/// `j_tot` and `t_total` follow `samples_per_pulse`, `n_pulses` and `t_p`
/// unless given explicitly, in which case they must agree.
pub fn load_params(text: &str) -> Result<SimParams> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let mut p: SimParams = table
        .clone()
        .try_into()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    if !table.contains_key("j_tot") {
        p.j_tot = p.samples_per_pulse * p.n_pulses;
    }
    if !table.contains_key("t_total") {
        p.t_total = p.t_p * p.n_pulses as f64;
    }
    p.validate()?;
    Ok(p)
}

// ---------------------------------------------------------------------------
// Scenario flags
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    On,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorKind {
    Standard,
    Blind,
}

impl GateKind {
    pub const ALL: [GateKind; 2] = [GateKind::And, GateKind::On];

    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::On => "ON",
        }
    }
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 2] = [DetectorKind::Standard, DetectorKind::Blind];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorKind::Standard => "standard",
            DetectorKind::Blind => "blind",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(GateKind::And),
            "on" => Ok(GateKind::On),
            _ => Err(Error::InvalidArgument(format!("unknown gate `{s}`"))),
        }
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(DetectorKind::Standard),
            "blind" => Ok(DetectorKind::Blind),
            _ => Err(Error::InvalidArgument(format!("unknown detector `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioFlags {
    pub production_noise: bool,
    pub production_delay: bool,
    pub detector: DetectorKind,
    pub gate: GateKind,
}

impl ScenarioFlags {
    pub fn new(gate: GateKind, detector: DetectorKind) -> Self {
        Self { production_noise: false, production_delay: false, detector, gate }
    }

    pub fn with_noise(mut self, on: bool) -> Self {
        self.production_noise = on;
        self
    }

    pub fn with_delay(mut self, on: bool) -> Self {
        self.production_delay = on;
        self
    }

    /// Noise/delay combination, e.g. `YPN+NPD` for production noise without
    /// production delay.
    pub fn label(&self) -> &'static str {
        scenario_label(self.production_noise, self.production_delay)
    }
}

pub fn scenario_label(noise: bool, delay: bool) -> &'static str {
    match (noise, delay) {
        (false, false) => "NPN+NPD",
        (false, true) => "NPN+YPD",
        (true, false) => "YPN+NPD",
        (true, true) => "YPN+YPD",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let p = load_params("").unwrap();
        assert_eq!(p, SimParams::default());
        assert_eq!(p.d, 1.37e-7);
        assert_eq!(p.dt(), 36.0);
    }

    #[test]
    fn defaults_match_table() {
        let p = SimParams::default();
        assert_eq!((p.k_a, p.k_b, p.k_c, p.n, p.gamma), (10.0, 10.0, 10.0, 2.0, 0.01));
        assert_eq!((p.z1, p.z2), (5e-6, 50e-6));
        assert_eq!((p.m_a, p.m_b, p.m_c), (1.2e-3, 1.8e-3, 1.2e-3));
        assert_eq!((p.t_c, p.t_total, p.t_p), (720.0, 18000.0, 1800.0));
        assert_eq!((p.tau_in, p.tau_g), (100.0, 100.0));
        assert_eq!((p.gamma_s, p.t_abs, p.a_e), (34.892, 300.15, 100e-12));
        assert_eq!(p.k_boltzmann, 1.380649e-23);
        assert_eq!((p.sigma_and, p.sigma_on), (2e-9, 1e-9));
        assert_eq!((p.samples_per_pulse, p.n_pulses, p.j_tot), (50, 10, 500));
        assert_eq!((p.r_ch, p.h_ch1, p.l_p), (5e-6, 10e-6, 2));
        p.validate().unwrap();
    }

    #[test]
    fn single_override() {
        let p = load_params("tau_g = 600").unwrap();
        assert_eq!(p.tau_g, 600.0);
        assert_eq!(p, SimParams { tau_g: 600.0, ..SimParams::default() });
    }

    #[test]
    fn comments_and_blank_lines() {
        let p = load_params("# header\n\nD = 2e-7 # faster\nseed = 9\n").unwrap();
        assert_eq!(p.d, 2e-7);
        assert_eq!(p.seed, 9);
    }

    #[test]
    fn rejects_negative_gamma() {
        let err = load_params("gamma = -1").unwrap_err();
        assert!(matches!(err, Error::InvalidParam { name: "gamma", .. }), "{err}");
        assert!(err.is_config());
    }

    #[test]
    fn rejects_unknown_key() {
        let err = load_params("gama = 0.01").unwrap_err();
        assert!(matches!(err, Error::Parse(_)), "{err}");
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(load_params("tau_g = = 3"), Err(Error::Parse(_))));
        assert!(matches!(load_params("tau_g = \"long\""), Err(Error::Parse(_))));
    }

    #[test]
    fn derived_counts_follow_pulses() {
        let p = load_params("n_pulses = 4").unwrap();
        assert_eq!(p.j_tot, 200);
        assert_eq!(p.t_total, 7200.0);
    }

    #[test]
    fn inconsistent_j_tot() {
        let err = load_params("j_tot = 499").unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)), "{err}");
        let err = load_params("n_pulses = 4\nt_total = 18000").unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)), "{err}");
    }

    #[test]
    fn zero_amplitude_is_allowed() {
        let p = load_params("m_A = 0").unwrap();
        assert_eq!(p.m_a, 0.0);
    }

    #[test]
    fn config_text_round_trip() {
        let p = SimParams { tau_g: 321.5, seed: 77, m_b: 2.5e-3, ..SimParams::default() };
        assert_eq!(load_params(&p.to_config_text()).unwrap(), p);
    }

    #[test]
    fn labels() {
        let f = ScenarioFlags::new(GateKind::And, DetectorKind::Blind);
        assert_eq!(f.label(), "NPN+NPD");
        assert_eq!(f.with_noise(true).with_delay(true).label(), "YPN+YPD");
        assert_eq!("On".parse::<GateKind>().unwrap(), GateKind::On);
        assert!("xor".parse::<GateKind>().is_err());
    }
}
